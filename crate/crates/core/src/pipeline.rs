//! End-to-end: message → ciphertext → one or more QR symbols, and back.
//!
//! The serialized ciphertext is split into chunks of at most
//! [`DEFAULT_LIMIT`] bytes, each carried by its own symbol. A [`Manifest`]
//! records the order, chunk lengths and a CRC-32 of the serialized
//! ciphertext so a receiver can check it has every symbol in order.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cipher::{self, CipherError, CipherWords, Serialization};
use crate::qrdecode::{decode_symbol, DecodeError};
use crate::qrencode::{encode_symbol, EcLevel, EncodeError, MaskPolicy, ModuleMatrix, VersionPolicy};

/// Largest chunk carried by one symbol.
pub const DEFAULT_LIMIT: usize = 1264;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Cipher(#[from] CipherError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error("symbol {index}: {source}")]
    Decode { index: usize, source: DecodeError },
    #[error("limit {limit} is smaller than one {serialization} token")]
    LimitTooSmall { limit: usize, serialization: &'static str },
    #[error("no symbols supplied")]
    NoSymbols,
    #[error("symbols do not match the manifest order or count")]
    OrderMismatch,
    #[error("ciphertext checksum does not match the manifest")]
    ChecksumMismatch,
    #[error("invalid manifest: {0}")]
    Manifest(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SerializationName {
    Entity,
    Raw16,
}

impl From<Serialization> for SerializationName {
    fn from(s: Serialization) -> Self {
        match s {
            Serialization::Entity => SerializationName::Entity,
            Serialization::Raw16 => SerializationName::Raw16,
        }
    }
}

impl From<SerializationName> for Serialization {
    fn from(s: SerializationName) -> Self {
        match s {
            SerializationName::Entity => Serialization::Entity,
            SerializationName::Raw16 => Serialization::Raw16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EcLevelName {
    L,
    M,
    Q,
    H,
}

impl From<EcLevel> for EcLevelName {
    fn from(ec: EcLevel) -> Self {
        match ec {
            EcLevel::L => EcLevelName::L,
            EcLevel::M => EcLevelName::M,
            EcLevel::Q => EcLevelName::Q,
            EcLevel::H => EcLevelName::H,
        }
    }
}

impl From<EcLevelName> for EcLevel {
    fn from(ec: EcLevelName) -> Self {
        match ec {
            EcLevelName::L => EcLevel::L,
            EcLevelName::M => EcLevel::M,
            EcLevelName::Q => EcLevel::Q,
            EcLevelName::H => EcLevel::H,
        }
    }
}

/// JSON sidecar describing a multi-symbol message. Covers ciphertext only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub total: usize,
    pub serialization: SerializationName,
    pub ec_level: EcLevelName,
    pub chunk_lengths: Vec<usize>,
    pub crc32: u32,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        let m: Manifest = serde_json::from_str(text)?;
        if m.total != m.chunk_lengths.len() || m.total == 0 {
            return Err(PipelineError::OrderMismatch);
        }
        Ok(m)
    }
}

#[derive(Debug, Clone)]
pub struct SymbolSet {
    pub symbols: Vec<ModuleMatrix>,
    pub manifest: Manifest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    pub ec: EcLevel,
    pub serialization: Serialization,
    pub mask: MaskPolicy,
    pub version: VersionPolicy,
    pub limit: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            ec: EcLevel::H,
            serialization: Serialization::Entity,
            mask: MaskPolicy::Auto,
            version: VersionPolicy::Auto,
            limit: DEFAULT_LIMIT,
        }
    }
}

/// Greedy split into chunks of at most `limit` bytes that never cut a
/// serialization unit: an `&#…;` token for ENTITY, a 2-byte word for RAW16.
pub fn split_payload(data: &[u8], limit: usize, serialization: Serialization) -> Result<Vec<&[u8]>, PipelineError> {
    let too_small = || PipelineError::LimitTooSmall { limit, serialization: serialization.as_str() };
    // candidate cut points, in order, ending at data.len()
    let boundaries: Vec<usize> = match serialization {
        Serialization::Entity => data
            .iter()
            .enumerate()
            .skip(1)
            .filter(|&(_, &b)| b == b'&')
            .map(|(i, _)| i)
            .chain(std::iter::once(data.len()))
            .collect(),
        Serialization::Raw16 => (1..=data.len().div_ceil(2)).map(|w| (2 * w).min(data.len())).collect(),
    };

    let mut chunks = Vec::new();
    let mut start = 0;
    let mut last_fit = None;
    for &b in &boundaries {
        if b - start > limit {
            let cut = last_fit.ok_or_else(too_small)?;
            chunks.push(&data[start..cut]);
            start = cut;
            if b - start > limit {
                return Err(too_small());
            }
        }
        last_fit = Some(b);
    }
    if start < data.len() {
        chunks.push(&data[start..]);
    }
    Ok(chunks)
}

pub fn encrypt_to_symbols(message: &str, password: &[u8], options: &Options) -> Result<SymbolSet, PipelineError> {
    let ciphertext = cipher::encrypt(message, password)?;
    let serialized = cipher::serialize(ciphertext.words(), options.serialization);
    let chunks = split_payload(&serialized, options.limit, options.serialization)?;
    if chunks.is_empty() {
        // same error the encoder gives for an empty payload
        return Err(EncodeError::EmptyInput.into());
    }
    let symbols = chunks
        .iter()
        .map(|chunk| encode_symbol(chunk, options.ec, options.mask, options.version).map(|s| s.matrix))
        .collect::<Result<Vec<_>, _>>()?;
    let manifest = Manifest {
        total: symbols.len(),
        serialization: options.serialization.into(),
        ec_level: options.ec.into(),
        chunk_lengths: chunks.iter().map(|c| c.len()).collect(),
        crc32: crc32fast::hash(&serialized),
    };
    Ok(SymbolSet { symbols, manifest })
}

/// Decodes every symbol and concatenates the payloads in order.
pub fn decode_payloads(matrices: &[ModuleMatrix]) -> Result<Vec<Vec<u8>>, PipelineError> {
    matrices
        .iter()
        .enumerate()
        .map(|(index, m)| decode_symbol(m).map(|d| d.payload).map_err(|source| PipelineError::Decode { index, source }))
        .collect()
}

/// Inverse of [`encrypt_to_symbols`].
///
/// With a manifest the symbol count, CRC and chunk lengths are checked and
/// its serialization is used; without one, payloads are concatenated in the
/// given order and `fallback` names the serialization.
pub fn decrypt_from_symbols(
    matrices: &[ModuleMatrix],
    manifest: Option<&Manifest>,
    password: &[u8],
    fallback: Serialization,
) -> Result<String, PipelineError> {
    if matrices.is_empty() {
        return Err(PipelineError::NoSymbols);
    }
    if let Some(m) = manifest {
        if m.total != matrices.len() {
            return Err(PipelineError::OrderMismatch);
        }
    }
    let payloads = decode_payloads(matrices)?;
    let serialized = payloads.concat();
    let serialization = match manifest {
        Some(m) => {
            if crc32fast::hash(&serialized) != m.crc32 {
                return Err(PipelineError::ChecksumMismatch);
            }
            let lengths: Vec<usize> = payloads.iter().map(Vec::len).collect();
            if lengths != m.chunk_lengths {
                return Err(PipelineError::OrderMismatch);
            }
            m.serialization.into()
        }
        None => fallback,
    };
    let words = cipher::deserialize(&serialized, serialization)?;
    Ok(cipher::decrypt(&CipherWords::from_final(words), password)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_at_threshold() {
        let data = vec![b'a'; 1264];
        assert_eq!(split_payload(&data, 1264, Serialization::Raw16).unwrap().len(), 1);
        let data = vec![b'a'; 1265];
        let chunks = split_payload(&data, 1264, Serialization::Raw16).unwrap();
        assert_eq!(chunks.iter().map(|c| c.len()).collect::<Vec<_>>(), vec![1264, 1]);
    }

    #[test]
    fn split_entity_on_tokens() {
        let data = b"&#96;&#55;&#131;";
        let chunks = split_payload(data, 7, Serialization::Entity).unwrap();
        assert_eq!(chunks, vec![&b"&#96;"[..], b"&#55;", b"&#131;"]);
        let chunks = split_payload(data, 10, Serialization::Entity).unwrap();
        assert_eq!(chunks, vec![&b"&#96;&#55;"[..], b"&#131;"]);
        assert!(matches!(split_payload(data, 4, Serialization::Entity), Err(PipelineError::LimitTooSmall { .. })));
    }

    #[test]
    fn split_raw16_on_words() {
        let data = [1u8, 2, 3, 4, 5, 6];
        let chunks = split_payload(&data, 5, Serialization::Raw16).unwrap();
        assert_eq!(chunks, vec![&[1u8, 2, 3, 4][..], &[5, 6]]);
        assert!(matches!(split_payload(&data, 1, Serialization::Raw16), Err(PipelineError::LimitTooSmall { .. })));
    }

    #[test]
    fn split_empty() {
        assert!(split_payload(b"", 10, Serialization::Entity).unwrap().is_empty());
    }

    #[test]
    fn manifest_field_names() {
        let m = Manifest {
            total: 1,
            serialization: SerializationName::Entity,
            ec_level: EcLevelName::H,
            chunk_lengths: vec![5],
            crc32: 7,
        };
        let v: serde_json::Value = serde_json::from_str(&m.to_json()).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["chunk_lengths", "crc32", "ec_level", "serialization", "total"]);
        assert_eq!(v["serialization"], "entity");
        assert_eq!(v["ec_level"], "H");
        assert_eq!(Manifest::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn manifest_rejects_inconsistent_total() {
        let text = r#"{"total":2,"serialization":"raw16","ec_level":"L","chunk_lengths":[4],"crc32":0}"#;
        assert!(matches!(Manifest::from_json(text), Err(PipelineError::OrderMismatch)));
    }

    #[test]
    fn empty_message_is_an_encoder_error() {
        let err = encrypt_to_symbols("", b"pw", &Options::default()).unwrap_err();
        assert!(matches!(err, PipelineError::Encode(EncodeError::EmptyInput)));
    }

    #[test]
    fn worked_example_single_symbol() {
        let set = encrypt_to_symbols("I love you ÿþý", b"Hello World", &Options::default()).unwrap();
        assert_eq!(set.manifest.total, 1);
        assert_eq!(set.symbols.len(), 1);
        let back = decrypt_from_symbols(&set.symbols, Some(&set.manifest), b"Hello World", Serialization::Entity);
        assert_eq!(back.unwrap(), "I love you ÿþý");
        let bare = decrypt_from_symbols(&set.symbols, None, b"Hello World", Serialization::Entity);
        assert_eq!(bare.unwrap(), "I love you ÿþý");
    }

    #[test]
    fn no_symbols() {
        assert!(matches!(decrypt_from_symbols(&[], None, b"x", Serialization::Entity), Err(PipelineError::NoSymbols)));
    }
}
