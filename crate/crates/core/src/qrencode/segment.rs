use super::bits::BitString;
use super::tables::ALPHANUMERIC_CHARSET;
use super::{EncodeError, QrVersion};

/// Data mode, tagged in the bit stream by a 4-bit indicator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Numeric,
    Alphanumeric,
    Byte,
    Kanji,
}

impl Mode {
    pub fn indicator(self) -> u32 {
        match self {
            Mode::Numeric => 0b0001,
            Mode::Alphanumeric => 0b0010,
            Mode::Byte => 0b0100,
            Mode::Kanji => 0b1000,
        }
    }

    pub fn from_indicator(bits: u32) -> Option<Mode> {
        match bits {
            0b0001 => Some(Mode::Numeric),
            0b0010 => Some(Mode::Alphanumeric),
            0b0100 => Some(Mode::Byte),
            0b1000 => Some(Mode::Kanji),
            _ => None,
        }
    }
}

/// Width of the character-count field.
pub fn char_count_bits(version: QrVersion, mode: Mode) -> usize {
    let band = match version.value() {
        1..=9 => 0,
        10..=26 => 1,
        _ => 2,
    };
    let widths = match mode {
        Mode::Numeric => [10, 12, 14],
        Mode::Alphanumeric => [9, 11, 13],
        Mode::Byte => [8, 16, 16],
        Mode::Kanji => [8, 10, 12],
    };
    widths[band]
}

pub fn alphanumeric_value(c: u8) -> Option<u32> {
    ALPHANUMERIC_CHARSET.iter().position(|&x| x == c).map(|p| p as u32)
}

/// Narrowest mode able to hold every byte. Kanji is never chosen.
pub fn select_mode(text: &[u8]) -> Result<Mode, EncodeError> {
    if text.is_empty() {
        Err(EncodeError::EmptyInput)
    } else if text.iter().all(u8::is_ascii_digit) {
        Ok(Mode::Numeric)
    } else if text.iter().all(|&c| alphanumeric_value(c).is_some()) {
        Ok(Mode::Alphanumeric)
    } else {
        Ok(Mode::Byte)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    mode: Mode,
    data: Vec<u8>,
}

impl Segment {
    /// Validates `data` against the mode's character set.
    pub fn new(mode: Mode, data: Vec<u8>) -> Result<Self, EncodeError> {
        let bad = match mode {
            Mode::Numeric => data.iter().position(|c| !c.is_ascii_digit()),
            Mode::Alphanumeric => data.iter().position(|&c| alphanumeric_value(c).is_none()),
            Mode::Byte => None,
            Mode::Kanji => return Err(EncodeError::KanjiUnsupported),
        };
        match bad {
            Some(position) => Err(EncodeError::InvalidCharacter { position, mode }),
            None => Ok(Self { mode, data }),
        }
    }

    /// Single segment in the narrowest applicable mode.
    pub fn auto(data: &[u8]) -> Result<Self, EncodeError> {
        let mode = select_mode(data)?;
        Self::new(mode, data.to_vec())
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    /// Payload bits excluding the header.
    pub fn payload_bits(&self) -> usize {
        let n = self.data.len();
        match self.mode {
            Mode::Numeric => n / 3 * 10 + [0, 4, 7][n % 3],
            Mode::Alphanumeric => n / 2 * 11 + (n % 2) * 6,
            Mode::Byte => n * 8,
            Mode::Kanji => n / 2 * 13,
        }
    }

    /// Header plus payload bits at `version`, or `None` if the character
    /// count overflows the count field.
    pub fn encoded_bits(&self, version: QrVersion) -> Option<usize> {
        let count_bits = char_count_bits(version, self.mode);
        (self.data.len() < 1 << count_bits).then(|| 4 + count_bits + self.payload_bits())
    }
}

/// Mode indicator, character count and payload.
pub fn encode_segment(segment: &Segment, version: QrVersion) -> BitString {
    let mut bits = BitString::new();
    bits.push(segment.mode.indicator(), 4);
    bits.push(segment.data.len() as u32, char_count_bits(version, segment.mode));
    match segment.mode {
        Mode::Numeric => {
            for chunk in segment.data.chunks(3) {
                let value = chunk.iter().fold(0u32, |acc, &d| acc * 10 + u32::from(d - b'0'));
                bits.push(value, chunk.len() * 3 + 1);
            }
        }
        Mode::Alphanumeric => {
            for pair in segment.data.chunks(2) {
                let first = alphanumeric_value(pair[0]).expect("validated");
                match pair.get(1) {
                    Some(&c) => bits.push(first * 45 + alphanumeric_value(c).expect("validated"), 11),
                    None => bits.push(first, 6),
                }
            }
        }
        Mode::Byte => {
            for &b in &segment.data {
                bits.push(u32::from(b), 8);
            }
        }
        Mode::Kanji => unreachable!("kanji segments cannot be constructed"),
    }
    bits
}
