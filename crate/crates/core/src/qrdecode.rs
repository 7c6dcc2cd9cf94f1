//! Decodes an already-sampled module matrix back to its payload bytes.

use thiserror::Error;

use crate::gf256::{rs_decode, RsError};
use crate::qrencode::format::{format_positions, version_positions};
use crate::qrencode::{
    apply_mask, char_count_bits, decode_format_bits, decode_version_bits, tables, BitReader, BlockStructure, EcLevel,
    MaskId, Mode, ModuleMatrix, QrVersion,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("{0}x{0} is not a valid symbol size")]
    InvalidSize(usize),
    #[error("neither format information copy could be read")]
    FormatUnreadable,
    #[error("version information is unreadable or disagrees with the symbol size")]
    VersionMismatch,
    #[error("block {block}: too many errors to correct")]
    DecodeFailure { block: usize },
    #[error("malformed bit stream: {0}")]
    MalformedBitstream(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedSymbol {
    pub payload: Vec<u8>,
    pub version: QrVersion,
    pub ec: EcLevel,
    pub mask: MaskId,
    pub errors_corrected: usize,
}

fn checked_version(matrix: &ModuleMatrix) -> Result<QrVersion, DecodeError> {
    matrix.version().ok_or(DecodeError::InvalidSize(matrix.size()))
}

fn read_word(matrix: &ModuleMatrix, positions: &[(usize, usize)]) -> u32 {
    positions.iter().enumerate().fold(0, |acc, (i, &(r, c))| acc | (u32::from(matrix.get(r, c)) << i))
}

/// Reads both format copies and keeps the one closest to a valid word.
pub fn read_format(matrix: &ModuleMatrix) -> Result<(EcLevel, MaskId), DecodeError> {
    checked_version(matrix)?;
    let copies: Vec<_> = format_positions(matrix.size())
        .iter()
        .filter_map(|pos| decode_format_bits(read_word(matrix, pos) as u16))
        .collect();
    match copies.as_slice() {
        [] => Err(DecodeError::FormatUnreadable),
        [(ec, mask, _)] => Ok((*ec, *mask)),
        [a, b] => {
            let best = if b.2 < a.2 { b } else { a };
            if a.2 == b.2 && (a.0, a.1) != (b.0, b.1) {
                return Err(DecodeError::FormatUnreadable);
            }
            Ok((best.0, best.1))
        }
        _ => unreachable!(),
    }
}

/// For version 7 and up, checks that at least one version block decodes to
/// the version implied by the size, and that no block decodes to another.
fn check_version_info(matrix: &ModuleMatrix, version: QrVersion) -> Result<(), DecodeError> {
    if version.value() < 7 {
        return Ok(());
    }
    let decoded: Vec<QrVersion> = version_positions(matrix.size())
        .iter()
        .filter_map(|pos| decode_version_bits(read_word(matrix, pos)).map(|(v, _)| v))
        .collect();
    if decoded.is_empty() || decoded.iter().any(|&v| v != version) {
        return Err(DecodeError::VersionMismatch);
    }
    Ok(())
}

/// Unmasks the data area and reads codewords along the placement path.
pub fn extract_codewords(matrix: &ModuleMatrix, version: QrVersion, mask: MaskId) -> Vec<u8> {
    let unmasked = apply_mask(matrix, mask);
    let mut out = vec![0u8; version.total_codewords()];
    for (i, (r, c)) in unmasked.data_positions().into_iter().enumerate().take(out.len() * 8) {
        if unmasked.get(r, c) {
            out[i / 8] |= 1 << (7 - i % 8);
        }
    }
    out
}

/// Inverse of the encoder's interleave: returns each block as `data ‖ ec`.
pub fn deinterleave(codewords: &[u8], structure: &BlockStructure) -> Vec<Vec<u8>> {
    let lengths: Vec<usize> = structure.data_lengths().collect();
    let mut blocks: Vec<Vec<u8>> = lengths.iter().map(|&l| Vec::with_capacity(l + structure.ec_per_block)).collect();
    let mut it = codewords.iter().copied();
    let longest = lengths.iter().copied().max().unwrap_or(0);
    for i in 0..longest {
        for (b, &len) in blocks.iter_mut().zip(&lengths) {
            if i < len {
                b.push(it.next().expect("codeword count matches structure"));
            }
        }
    }
    for _ in 0..structure.ec_per_block {
        for b in blocks.iter_mut() {
            b.push(it.next().expect("codeword count matches structure"));
        }
    }
    blocks
}

pub fn decode_symbol(matrix: &ModuleMatrix) -> Result<DecodedSymbol, DecodeError> {
    let version = checked_version(matrix)?;
    let (ec, mask) = read_format(matrix)?;
    check_version_info(matrix, version)?;

    let structure = BlockStructure::new(version, ec);
    let raw = extract_codewords(matrix, version, mask);
    let mut data = Vec::with_capacity(structure.data_codewords());
    let mut errors_corrected = 0;
    for (block, (received, len)) in deinterleave(&raw, &structure).iter().zip(structure.data_lengths()).enumerate() {
        let (fixed, n) = rs_decode(received, structure.ec_per_block).map_err(|e| match e {
            RsError::DecodeFailure => DecodeError::DecodeFailure { block },
            other => unreachable!("table-driven block shape rejected: {other}"),
        })?;
        errors_corrected += n;
        data.extend_from_slice(&fixed[..len]);
    }

    let payload = parse_bitstream(&data, version)?;
    Ok(DecodedSymbol { payload, version, ec, mask, errors_corrected })
}

/// Parses segments, then verifies the terminator, zero bit-padding and the
/// 0xEC/0x11 pad cycle.
pub fn parse_bitstream(data: &[u8], version: QrVersion) -> Result<Vec<u8>, DecodeError> {
    use DecodeError::MalformedBitstream as Bad;

    let mut r = BitReader::new(data);
    let mut payload = Vec::new();
    loop {
        if r.remaining() < 4 {
            // terminator may be truncated when the data fills the symbol
            if r.read(r.remaining()) != Some(0) {
                return Err(Bad("nonzero bits after final segment"));
            }
            break;
        }
        let indicator = r.read(4).expect("checked");
        if indicator == 0 {
            break;
        }
        let mode = Mode::from_indicator(indicator).ok_or(Bad("unknown mode indicator"))?;
        let count = r.read(char_count_bits(version, mode)).ok_or(Bad("truncated character count"))? as usize;
        match mode {
            Mode::Numeric => {
                let mut left = count;
                while left > 0 {
                    let digits = left.min(3);
                    let value = r.read(digits * 3 + 1).ok_or(Bad("truncated numeric data"))?;
                    if value >= 10u32.pow(digits as u32) {
                        return Err(Bad("numeric group out of range"));
                    }
                    let text = format!("{value:0width$}", width = digits);
                    payload.extend_from_slice(text.as_bytes());
                    left -= digits;
                }
            }
            Mode::Alphanumeric => {
                let mut left = count;
                while left > 0 {
                    if left >= 2 {
                        let value = r.read(11).ok_or(Bad("truncated alphanumeric data"))?;
                        if value >= 45 * 45 {
                            return Err(Bad("alphanumeric pair out of range"));
                        }
                        payload.push(tables::ALPHANUMERIC_CHARSET[(value / 45) as usize]);
                        payload.push(tables::ALPHANUMERIC_CHARSET[(value % 45) as usize]);
                        left -= 2;
                    } else {
                        let value = r.read(6).ok_or(Bad("truncated alphanumeric data"))?;
                        if value >= 45 {
                            return Err(Bad("alphanumeric character out of range"));
                        }
                        payload.push(tables::ALPHANUMERIC_CHARSET[value as usize]);
                        left -= 1;
                    }
                }
            }
            Mode::Byte => {
                for _ in 0..count {
                    payload.push(r.read(8).ok_or(Bad("truncated byte data"))? as u8);
                }
            }
            Mode::Kanji => return Err(Bad("kanji segments are not supported")),
        }
    }

    let align = (8 - r.position() % 8) % 8;
    if r.read(align.min(r.remaining())) != Some(0) {
        return Err(Bad("nonzero padding bits"));
    }
    let pad_start = r.position() / 8;
    for (i, &b) in data[pad_start..].iter().enumerate() {
        let expected = if i % 2 == 0 { 0xEC } else { 0x11 };
        if b != expected {
            return Err(Bad("unexpected pad codeword"));
        }
    }
    Ok(payload)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qrencode::{
        build_function_patterns, encode_symbol, interleave_blocks, place_codewords, MaskPolicy, VersionPolicy,
    };

    fn v(n: u32) -> QrVersion {
        QrVersion::new(n).unwrap()
    }

    #[test]
    fn wrong_size() {
        let m = ModuleMatrix::blank(20);
        assert_eq!(decode_symbol(&m), Err(DecodeError::InvalidSize(20)));
        assert_eq!(read_format(&m), Err(DecodeError::InvalidSize(20)));
    }

    #[test]
    fn format_round_trip() {
        let sym = encode_symbol(b"HELLO", EcLevel::M, MaskPolicy::Force(MaskId::new(0).unwrap()), VersionPolicy::Auto)
            .unwrap();
        assert_eq!(read_format(&sym.matrix).unwrap(), (EcLevel::M, MaskId::new(0).unwrap()));
    }

    #[test]
    fn v1_has_26_codewords() {
        let sym = encode_symbol(b"abc", EcLevel::L, MaskPolicy::Auto, VersionPolicy::Auto).unwrap();
        assert_eq!(extract_codewords(&sym.matrix, v(1), sym.mask).len(), 26);
    }

    #[test]
    fn placement_inverse() {
        for ver in 1..=10 {
            let version = v(ver);
            let codewords: Vec<u8> = (0..version.total_codewords()).map(|i| (i * 37 + ver as usize) as u8).collect();
            let mut m = build_function_patterns(version);
            place_codewords(&mut m, &codewords);
            let mask = MaskId::new(ver % 8).unwrap();
            let masked = apply_mask(&m, mask);
            assert_eq!(extract_codewords(&masked, version, mask), codewords);
        }
    }

    #[test]
    fn deinterleave_inverts_interleave() {
        for ver in 1..=40 {
            for ec in EcLevel::ALL {
                let version = v(ver);
                let bs = BlockStructure::new(version, ec);
                let data: Vec<u8> = (0..bs.data_codewords()).map(|i| (i % 251) as u8).collect();
                let inter = interleave_blocks(&data, version, ec);
                let blocks = deinterleave(&inter, &bs);
                let rebuilt: Vec<u8> =
                    blocks.iter().zip(bs.data_lengths()).flat_map(|(b, l)| b[..l].to_vec()).collect();
                assert_eq!(rebuilt, data);
            }
        }
    }

    #[test]
    fn kanji_rejected() {
        // mode 1000, count 1, then 13 bits
        let data = [0b1000_0000, 0b0001_0000, 0, 0];
        assert_eq!(
            parse_bitstream(&data, v(1)),
            Err(DecodeError::MalformedBitstream("kanji segments are not supported"))
        );
    }

    #[test]
    fn bad_padding_rejected() {
        // byte mode, count 1, 'A', terminator, then a wrong pad
        let data = [0x40, 0x14, 0x10, 0xEC, 0xEC];
        assert!(matches!(parse_bitstream(&data, v(1)), Err(DecodeError::MalformedBitstream(_))));
        let good = [0x40, 0x14, 0x10, 0xEC, 0x11];
        assert_eq!(parse_bitstream(&good, v(1)).unwrap(), b"A");
    }

    #[test]
    fn unknown_mode() {
        assert!(matches!(parse_bitstream(&[0x70, 0, 0], v(1)), Err(DecodeError::MalformedBitstream(_))));
    }

    #[test]
    fn truncated_segment() {
        // byte mode claiming 200 bytes
        assert!(matches!(parse_bitstream(&[0x4C, 0x80, 0x00], v(1)), Err(DecodeError::MalformedBitstream(_))));
    }
}
