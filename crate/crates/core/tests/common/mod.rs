//! Test-only oracles and input generators. The GF/RS oracles never call
//! into the crate under test; the generators only use it to size payloads.
#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use sdeqr_core::qrencode::{BlockStructure, Mode, Segment};
use sdeqr_core::{EcLevel, QrVersion};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Carry-less multiply reduced by 0x11D, bit by bit.
pub fn slow_mul(mut a: u8, mut b: u8) -> u8 {
    let mut p = 0u8;
    while b != 0 {
        if b & 1 != 0 {
            p ^= a;
        }
        let carry = a & 0x80 != 0;
        a <<= 1;
        if carry {
            a ^= 0x1D;
        }
        b >>= 1;
    }
    p
}

pub fn slow_pow(a: u8, e: usize) -> u8 {
    (0..e).fold(1, |acc, _| slow_mul(acc, a))
}

/// Polynomial product, highest degree first.
pub fn poly_mul(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] ^= slow_mul(x, y);
        }
    }
    out
}

/// ∏ (x + 2^j), j < n_ec.
pub fn slow_generator(n_ec: usize) -> Vec<u8> {
    (0..n_ec).fold(vec![1u8], |g, j| poly_mul(&g, &[1, slow_pow(2, j)]))
}

/// Every codeword of the (n, k) code, built as m(x)·g(x) for all messages.
/// Only sensible for k ≤ 2.
pub fn all_codewords(n: usize, k: usize) -> Vec<Vec<u8>> {
    let g = slow_generator(n - k);
    let count = 1usize << (8 * k);
    (0..count)
        .map(|idx| {
            let msg: Vec<u8> = (0..k).map(|i| (idx >> (8 * (k - 1 - i))) as u8).collect();
            poly_mul(&msg, &g)
        })
        .collect()
}

pub fn hamming(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Nearest codeword and its distance. Ties resolve to the first found;
/// callers only rely on uniqueness inside the correction radius.
pub fn nearest<'a>(codewords: &'a [Vec<u8>], received: &[u8]) -> (&'a [u8], usize) {
    codewords.iter().map(|c| (c.as_slice(), hamming(c, received))).min_by_key(|&(_, d)| d).expect("non-empty code")
}

/// Adds `count` nonzero errors at distinct random positions.
pub fn corrupt(block: &mut [u8], count: usize, rng: &mut StdRng) -> Vec<usize> {
    let mut positions: Vec<usize> = (0..block.len()).collect();
    for i in 0..count {
        let j = rng.gen_range(i..positions.len());
        positions.swap(i, j);
    }
    positions.truncate(count);
    for &p in &positions {
        block[p] ^= rng.gen_range(1..=255u8);
    }
    positions
}

pub fn random_bytes(len: usize, rng: &mut StdRng) -> Vec<u8> {
    (0..len).map(|_| rng.gen()).collect()
}

/// Random text of `len` scalars, none above `max_scalar` and no surrogates.
pub fn random_message(len: usize, max_scalar: u32, rng: &mut StdRng) -> String {
    (0..len)
        .map(|_| loop {
            // bias towards ASCII and Latin-1 so the common path is well covered
            let bound = *[0x7F, 0xFF, max_scalar].choose(rng).unwrap();
            if let Some(c) = char::from_u32(rng.gen_range(0..=bound.min(max_scalar))) {
                break c;
            }
        })
        .collect()
}

pub fn random_password(rng: &mut StdRng) -> Vec<u8> {
    let len = rng.gen_range(1..=64);
    random_bytes(len, rng)
}

const ALNUM: &[u8] = b"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ $%*+-./:";

/// Non-empty random payload in a random mode that fits `(version, ec)`.
/// A quarter of the draws fill the symbol exactly.
pub fn random_payload(version: QrVersion, ec: EcLevel, rng: &mut StdRng) -> Vec<u8> {
    let capacity = BlockStructure::new(version, ec).data_codewords() * 8;
    let mode = *[Mode::Numeric, Mode::Alphanumeric, Mode::Byte].choose(rng).unwrap();
    let draw = |rng: &mut StdRng| -> u8 {
        match mode {
            Mode::Numeric => b'0' + rng.gen_range(0..10),
            Mode::Alphanumeric => *ALNUM.choose(rng).unwrap(),
            _ => rng.gen(),
        }
    };
    let mut max = 1;
    while Segment::new(mode, vec![b'0'; max + 1]).unwrap().encoded_bits(version).is_some_and(|b| b <= capacity) {
        max += 1;
    }
    let len = if rng.gen_bool(0.25) { max } else { rng.gen_range(1..=max) };
    (0..len).map(|_| draw(rng)).collect()
}
