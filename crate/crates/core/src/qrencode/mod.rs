//! QR Code encoder: from payload bytes to a masked module matrix.

mod bits;
mod encode;
pub(crate) mod format;
mod mask;
mod matrix;
mod segment;
pub(crate) mod tables;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use bits::{BitReader, BitString};
pub use encode::{
    assemble_codewords, choose_version, encode_symbol, interleave, interleave_blocks, split_blocks, EncodedSymbol,
    MaskPolicy, VersionPolicy,
};
pub use format::{decode_format_bits, decode_version_bits, format_bits, version_bits, FORMAT_MASK};
pub use mask::{apply_mask, mask_bit, penalty_score, MaskId};
pub use matrix::{build_function_patterns, place_codewords, ModuleMatrix};
pub use segment::{alphanumeric_value, char_count_bits, encode_segment, select_mode, Mode, Segment};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("payload is empty")]
    EmptyInput,
    #[error("character at position {position} is not valid in {mode:?} mode")]
    InvalidCharacter { position: usize, mode: Mode },
    #[error("payload of {bits} bits does not fit any version at EC level {ec}")]
    TooLarge { bits: usize, ec: EcLevel },
    #[error("payload of {bits} bits does not fit version {version} at EC level {ec}")]
    InvalidForcedVersion { bits: usize, version: QrVersion, ec: EcLevel },
    #[error("version {0} is outside 1..=40")]
    InvalidVersion(u32),
    #[error("mask {0} is outside 0..=7")]
    InvalidMask(u32),
    #[error("EC level {0:?} is not one of L, M, Q, H")]
    InvalidEcLevel(String),
    #[error("kanji segments are not supported by this encoder")]
    KanjiUnsupported,
}

/// Symbol version, 1 through 40.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QrVersion(u8);

impl QrVersion {
    pub const MIN: QrVersion = QrVersion(1);
    pub const MAX: QrVersion = QrVersion(40);

    pub fn new(v: u32) -> Result<Self, EncodeError> {
        if (1..=40).contains(&v) {
            Ok(QrVersion(v as u8))
        } else {
            Err(EncodeError::InvalidVersion(v))
        }
    }

    /// Version whose side length is `size`, if any.
    pub fn from_size(size: usize) -> Option<Self> {
        if (21..=177).contains(&size) && (size - 17).is_multiple_of(4) {
            Some(QrVersion(((size - 17) / 4) as u8))
        } else {
            None
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn size(self) -> usize {
        4 * self.0 as usize + 17
    }

    pub fn all() -> impl Iterator<Item = QrVersion> {
        (1..=40).map(QrVersion)
    }

    pub(crate) fn index(self) -> usize {
        self.0 as usize
    }

    pub fn total_codewords(self) -> usize {
        tables::TOTAL_CODEWORDS[self.index()] as usize
    }

    pub fn remainder_bits(self) -> usize {
        tables::REMAINDER_BITS[self.index()] as usize
    }

    pub fn alignment_positions(self) -> &'static [u8] {
        tables::ALIGNMENT_POSITIONS[self.index()]
    }
}

impl fmt::Display for QrVersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EcLevel {
    L,
    M,
    Q,
    H,
}

impl EcLevel {
    pub const ALL: [EcLevel; 4] = [EcLevel::L, EcLevel::M, EcLevel::Q, EcLevel::H];

    /// Two-bit field used in format information.
    pub fn format_bits(self) -> u8 {
        match self {
            EcLevel::L => 0b01,
            EcLevel::M => 0b00,
            EcLevel::Q => 0b11,
            EcLevel::H => 0b10,
        }
    }

    pub fn from_format_bits(bits: u8) -> EcLevel {
        match bits & 0b11 {
            0b01 => EcLevel::L,
            0b00 => EcLevel::M,
            0b11 => EcLevel::Q,
            _ => EcLevel::H,
        }
    }

    fn table_row(self) -> usize {
        match self {
            EcLevel::L => 0,
            EcLevel::M => 1,
            EcLevel::Q => 2,
            EcLevel::H => 3,
        }
    }
}

impl fmt::Display for EcLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EcLevel::L => "L",
            EcLevel::M => "M",
            EcLevel::Q => "Q",
            EcLevel::H => "H",
        };
        f.write_str(s)
    }
}

impl FromStr for EcLevel {
    type Err = EncodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "L" => Ok(EcLevel::L),
            "M" => Ok(EcLevel::M),
            "Q" => Ok(EcLevel::Q),
            "H" => Ok(EcLevel::H),
            _ => Err(EncodeError::InvalidEcLevel(s.to_string())),
        }
    }
}

/// How the codewords of one (version, EC level) are split into RS blocks.
///
/// Short blocks come first; long blocks carry one extra data codeword.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockStructure {
    pub ec_per_block: usize,
    pub short_blocks: usize,
    pub short_data_len: usize,
    pub long_blocks: usize,
}

impl BlockStructure {
    pub fn new(version: QrVersion, ec: EcLevel) -> Self {
        let row = ec.table_row();
        let v = version.index();
        let blocks = tables::EC_BLOCK_COUNT[row][v] as usize;
        let ec_per_block = tables::EC_CODEWORDS_PER_BLOCK[row][v] as usize;
        let total = version.total_codewords();
        let long_blocks = total % blocks;
        let short_blocks = blocks - long_blocks;
        let short_data_len = total / blocks - ec_per_block;
        Self { ec_per_block, short_blocks, short_data_len, long_blocks }
    }

    pub fn block_count(&self) -> usize {
        self.short_blocks + self.long_blocks
    }

    /// Data codeword count of every block, in order.
    pub fn data_lengths(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.block_count()).map(|i| self.short_data_len + usize::from(i >= self.short_blocks))
    }

    pub fn data_codewords(&self) -> usize {
        self.data_lengths().sum()
    }

    pub fn total_codewords(&self) -> usize {
        self.data_codewords() + self.block_count() * self.ec_per_block
    }

    /// Total codewords the RS decoder can repair across all blocks.
    pub fn correction_capacity(&self) -> usize {
        self.block_count() * (self.ec_per_block / 2)
    }
}
