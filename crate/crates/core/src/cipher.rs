//! The password-keyed substitution cipher.
//!
//! A password is folded into a small integer *code*, the code is added to
//! every character of the message, the resulting 16-bit words are reversed
//! and finally every bit of every word is complemented. Decryption runs the
//! same steps backwards.
//!
//! The canonical ciphertext is a sequence of 16-bit words ([`CipherWords`]).
//! Complemented values are frequently not valid text, so text forms exist
//! only as serializations ([`Serialization`]).

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CipherError {
    #[error("password must not be empty")]
    EmptyPassword,
    #[error("password character {ch:?} at index {index} is outside the 0-255 range")]
    PasswordCharacter { index: usize, ch: char },
    #[error("character at index {index} plus code {code} exceeds 16 bits")]
    Overflow16 { index: usize, code: u32 },
    #[error("word {word} at index {index} does not decrypt to a character (wrong password or corrupt data)")]
    InvalidWord { index: usize, word: u16 },
    #[error("cannot apply {op} to words in stage {stage:?}")]
    StageOrder { op: &'static str, stage: Stage },
    #[error("malformed entity text at byte {offset}")]
    MalformedEntity { offset: usize },
    #[error("raw16 data has odd length {len}")]
    OddLength { len: usize },
}

/// Key material derived from a password.
///
/// `n` is `plen² × Σ bytes` and `code` is the decimal digit sum of `n`,
/// taken once. The password bytes themselves are not retained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SecretCode {
    plen: usize,
    n: u128,
    code: u32,
}

impl SecretCode {
    pub fn plen(&self) -> usize {
        self.plen
    }

    pub fn n(&self) -> u128 {
        self.n
    }

    pub fn code(&self) -> u32 {
        self.code
    }
}

/// Converts a text password to bytes, one byte per character.
///
/// Characters above U+00FF are rejected rather than UTF-8 encoded, so that
/// "ÿ" contributes 255 to the key exactly as a Latin-1 keyboard would.
pub fn password_bytes(password: &str) -> Result<Vec<u8>, CipherError> {
    password
        .chars()
        .enumerate()
        .map(|(index, ch)| u8::try_from(u32::from(ch)).map_err(|_| CipherError::PasswordCharacter { index, ch }))
        .collect()
}

pub fn derive_code(password: &[u8]) -> Result<SecretCode, CipherError> {
    if password.is_empty() {
        return Err(CipherError::EmptyPassword);
    }
    let plen = password.len();
    let byte_sum: u128 = password.iter().map(|&b| u128::from(b)).sum();
    let plen_sq = (plen as u128) * (plen as u128);
    let n = plen_sq * byte_sum;
    Ok(SecretCode { plen, n, code: digit_sum(n) })
}

fn digit_sum(mut n: u128) -> u32 {
    let mut sum = 0;
    while n > 0 {
        sum += (n % 10) as u32;
        n /= 10;
    }
    sum
}

/// Which cipher steps have been applied to a word sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    /// Code added to each character.
    Added,
    /// Added, then reversed.
    Reversed,
    /// Added, reversed and complemented: the transmitted ciphertext.
    Final,
}

#[derive(Clone, PartialEq, Eq)]
pub struct CipherWords {
    words: Vec<u16>,
    stage: Stage,
}

impl CipherWords {
    pub fn new(words: Vec<u16>, stage: Stage) -> Self {
        Self { words, stage }
    }

    /// Wraps received ciphertext, e.g. the output of [`deserialize`].
    pub fn from_final(words: Vec<u16>) -> Self {
        Self::new(words, Stage::Final)
    }

    pub fn words(&self) -> &[u16] {
        &self.words
    }

    pub fn into_words(self) -> Vec<u16> {
        self.words
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl fmt::Debug for CipherWords {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CipherWords").field("stage", &self.stage).field("words", &self.words).finish()
    }
}

pub fn add_code(message: &str, code: &SecretCode) -> Result<CipherWords, CipherError> {
    let words = message
        .chars()
        .enumerate()
        .map(|(index, ch)| {
            let value = u32::from(ch) + code.code;
            u16::try_from(value).map_err(|_| CipherError::Overflow16 { index, code: code.code })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CipherWords::new(words, Stage::Added))
}

/// Reverses the word order. Moves `Added` to `Reversed` and back.
pub fn reverse_words(words: CipherWords) -> Result<CipherWords, CipherError> {
    let stage = match words.stage {
        Stage::Added => Stage::Reversed,
        Stage::Reversed => Stage::Added,
        Stage::Final => return Err(CipherError::StageOrder { op: "reverse", stage: Stage::Final }),
    };
    let mut w = words.words;
    w.reverse();
    Ok(CipherWords::new(w, stage))
}

/// Complements all 16 bits of every word. Moves `Reversed` to `Final` and back.
pub fn complement16(words: CipherWords) -> Result<CipherWords, CipherError> {
    let stage = match words.stage {
        Stage::Reversed => Stage::Final,
        Stage::Final => Stage::Reversed,
        Stage::Added => return Err(CipherError::StageOrder { op: "complement", stage: Stage::Added }),
    };
    let w = words.words.into_iter().map(|x| x ^ 0xFFFF).collect();
    Ok(CipherWords::new(w, stage))
}

pub fn encrypt(message: &str, password: &[u8]) -> Result<CipherWords, CipherError> {
    let code = derive_code(password)?;
    complement16(reverse_words(add_code(message, &code)?)?)
}

pub fn decrypt(words: &CipherWords, password: &[u8]) -> Result<String, CipherError> {
    let code = derive_code(password)?;
    if words.stage != Stage::Final {
        return Err(CipherError::StageOrder { op: "decrypt", stage: words.stage });
    }
    let added = reverse_words(complement16(words.clone())?)?;
    added
        .words
        .iter()
        .enumerate()
        .map(|(index, &word)| {
            u32::from(word)
                .checked_sub(code.code)
                .and_then(char::from_u32)
                .ok_or(CipherError::InvalidWord { index, word })
        })
        .collect()
}

/// Byte-level interchange formats for ciphertext words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Serialization {
    /// `&#<decimal>;` per word, ASCII.
    #[default]
    Entity,
    /// Two bytes per word, big-endian.
    Raw16,
}

impl Serialization {
    pub fn as_str(self) -> &'static str {
        match self {
            Serialization::Entity => "entity",
            Serialization::Raw16 => "raw16",
        }
    }
}

pub fn serialize(words: &[u16], format: Serialization) -> Vec<u8> {
    match format {
        Serialization::Entity => {
            let mut out = String::with_capacity(words.len() * 8);
            for w in words {
                out.push_str("&#");
                out.push_str(&w.to_string());
                out.push(';');
            }
            out.into_bytes()
        }
        Serialization::Raw16 => words.iter().flat_map(|w| w.to_be_bytes()).collect(),
    }
}

pub fn deserialize(data: &[u8], format: Serialization) -> Result<Vec<u16>, CipherError> {
    match format {
        Serialization::Entity => parse_entities(data),
        Serialization::Raw16 => {
            if !data.len().is_multiple_of(2) {
                return Err(CipherError::OddLength { len: data.len() });
            }
            Ok(data.chunks_exact(2).map(|p| u16::from_be_bytes([p[0], p[1]])).collect())
        }
    }
}

// Tokens are "&#" digits, optionally followed by ';'. The next '&' (or end of
// input) also ends a token, so bare "&#96&#55" parses the same as "&#96;&#55;".
fn parse_entities(data: &[u8]) -> Result<Vec<u16>, CipherError> {
    let mut words = Vec::new();
    let mut pos = 0;
    while pos < data.len() {
        let start = pos;
        if data.get(pos..pos + 2) != Some(b"&#") {
            return Err(CipherError::MalformedEntity { offset: pos });
        }
        pos += 2;
        let digits_start = pos;
        let mut value: u32 = 0;
        while let Some(&b) = data.get(pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value * 10 + u32::from(b - b'0');
            if value > u32::from(u16::MAX) {
                return Err(CipherError::MalformedEntity { offset: start });
            }
            pos += 1;
        }
        if pos == digits_start {
            return Err(CipherError::MalformedEntity { offset: pos });
        }
        match data.get(pos) {
            Some(b';') => pos += 1,
            Some(b'&') | None => {}
            Some(_) => return Err(CipherError::MalformedEntity { offset: pos }),
        }
        words.push(value as u16);
    }
    Ok(words)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hello_world_code() {
        let sc = derive_code(b"Hello World").unwrap();
        assert_eq!(sc.plen(), 11);
        assert_eq!(sc.n(), 127_292);
        assert_eq!(sc.code(), 23);
    }

    #[test]
    fn single_letter_code() {
        // 1² × 65 = 65, 6 + 5 = 11
        let sc = derive_code(b"A").unwrap();
        assert_eq!((sc.n(), sc.code()), (65, 11));
    }

    #[test]
    fn empty_password() {
        assert_eq!(derive_code(b""), Err(CipherError::EmptyPassword));
        assert_eq!(encrypt("hi", b"").unwrap_err(), CipherError::EmptyPassword);
    }

    #[test]
    fn zero_code_only_for_zero_bytes() {
        assert_eq!(derive_code(&[0, 0, 0]).unwrap().code(), 0);
        assert!(derive_code(&[0, 1]).unwrap().code() > 0);
    }

    #[test]
    fn permuted_passwords_collide() {
        assert_eq!(derive_code(b"ab").unwrap(), derive_code(b"ba").unwrap());
    }

    #[test]
    fn latin1_password() {
        assert_eq!(password_bytes("ÿa").unwrap(), vec![255, 97]);
        assert!(matches!(password_bytes("aĀ"), Err(CipherError::PasswordCharacter { index: 1, .. })));
    }

    #[test]
    fn add_code_values() {
        let code = derive_code(b"Hello World").unwrap();
        let words = add_code("I love you ÿþý", &code).unwrap();
        assert_eq!(words.stage(), Stage::Added);
        assert_eq!(words.words(), &[96, 55, 131, 134, 141, 124, 55, 144, 134, 140, 55, 278, 277, 276]);
        assert!(add_code("", &code).unwrap().is_empty());
    }

    #[test]
    fn add_code_overflow_reports_index() {
        let code = derive_code(b"Hello World").unwrap();
        let msg = format!("ab{}", char::from_u32(0xFFF0).unwrap());
        assert_eq!(add_code(&msg, &code).unwrap_err(), CipherError::Overflow16 { index: 2, code: 23 });
        // exactly 0xFFFF is allowed
        let edge = char::from_u32(0xFFFF - 23).unwrap().to_string();
        assert_eq!(add_code(&edge, &code).unwrap().words(), &[0xFFFF]);
    }

    #[test]
    fn reverse_and_complement() {
        let w = CipherWords::new(vec![96, 55, 131], Stage::Added);
        let r = reverse_words(w.clone()).unwrap();
        assert_eq!(r.words(), &[131, 55, 96]);
        assert_eq!(reverse_words(r.clone()).unwrap(), w);
        assert!(reverse_words(CipherWords::new(vec![], Stage::Added)).unwrap().is_empty());

        let c = complement16(CipherWords::new(vec![0x0114, 0x0000], Stage::Reversed)).unwrap();
        assert_eq!(c.words(), &[0xFEEB, 0xFFFF]);
        assert_eq!(c.stage(), Stage::Final);
        assert_eq!(complement16(c).unwrap().words(), &[0x0114, 0x0000]);
    }

    #[test]
    fn stage_order_enforced() {
        let added = CipherWords::new(vec![1], Stage::Added);
        assert!(matches!(complement16(added), Err(CipherError::StageOrder { .. })));
        let fin = CipherWords::from_final(vec![1]);
        assert!(matches!(reverse_words(fin), Err(CipherError::StageOrder { .. })));
    }

    #[test]
    fn worked_example_encrypts() {
        let ct = encrypt("I love you ÿþý", b"Hello World").unwrap();
        let expected: Vec<u16> =
            [276u16, 277, 278, 55, 140, 134, 144, 55, 124, 141, 134, 131, 55, 96].iter().map(|w| !w).collect();
        assert_eq!(ct.words(), expected.as_slice());
        assert_eq!(ct.words()[0], 0xFEEB);
        assert_eq!(decrypt(&ct, b"Hello World").unwrap(), "I love you ÿþý");
        assert!(encrypt("", b"x").unwrap().is_empty());
    }

    #[test]
    fn decrypt_rejects_underflow() {
        // complemented 0xFFFF -> 0, and 0 - 23 < 0
        let ct = CipherWords::from_final(vec![0xFFFF]);
        assert_eq!(decrypt(&ct, b"Hello World").unwrap_err(), CipherError::InvalidWord { index: 0, word: 0 });
    }

    #[test]
    fn decrypt_rejects_surrogates() {
        let ct = CipherWords::from_final(vec![!(0xD800u16 + 23)]);
        assert!(matches!(decrypt(&ct, b"Hello World"), Err(CipherError::InvalidWord { .. })));
    }

    #[test]
    fn entity_format() {
        assert_eq!(serialize(&[96, 55], Serialization::Entity), b"&#96;&#55;");
        assert_eq!(deserialize(b"&#96;&#55;", Serialization::Entity).unwrap(), vec![96, 55]);
        assert_eq!(deserialize(b"&#96&#55", Serialization::Entity).unwrap(), vec![96, 55]);
        assert_eq!(deserialize(b"&#65535;", Serialization::Entity).unwrap(), vec![65535]);
        assert!(deserialize(b"", Serialization::Entity).unwrap().is_empty());
    }

    #[test]
    fn entity_errors() {
        for bad in [&b"&#70000;"[..], b"&#65536", b"&#;", b"96;", b"&#9x;", b"&#1;;", b"&", b"&#12; "] {
            assert!(
                matches!(deserialize(bad, Serialization::Entity), Err(CipherError::MalformedEntity { .. })),
                "{:?}",
                String::from_utf8_lossy(bad)
            );
        }
    }

    #[test]
    fn raw16_format() {
        assert_eq!(serialize(&[0xFEEB], Serialization::Raw16), vec![0xFE, 0xEB]);
        assert_eq!(deserialize(&[0xFE, 0xEB], Serialization::Raw16).unwrap(), vec![0xFEEB]);
        assert_eq!(deserialize(&[1, 2, 3], Serialization::Raw16).unwrap_err(), CipherError::OddLength { len: 3 });
    }
}
