//! Password-keyed text cipher carried in QR Code symbols.
//!
//! - [`cipher`]: key derivation, the add/reverse/complement cipher and its
//!   ENTITY / RAW16 serializations.
//! - [`gf256`]: GF(256) arithmetic and Reed–Solomon encode/decode.
//! - [`qrencode`]: payload → module matrix (segments, blocks, masking).
//! - [`qrdecode`]: module matrix → payload.
//! - [`pipeline`]: message ↔ ordered symbol set with a JSON manifest.

pub mod cipher;
pub mod gf256;
pub mod pipeline;
pub mod qrdecode;
pub mod qrencode;

pub use cipher::{decrypt, derive_code, encrypt, CipherError, CipherWords, SecretCode, Serialization, Stage};
pub use pipeline::{decrypt_from_symbols, encrypt_to_symbols, Manifest, Options, PipelineError, SymbolSet};
pub use qrdecode::{decode_symbol, DecodeError, DecodedSymbol};
pub use qrencode::{
    encode_symbol, EcLevel, EncodeError, EncodedSymbol, MaskId, MaskPolicy, ModuleMatrix, QrVersion, VersionPolicy,
};
