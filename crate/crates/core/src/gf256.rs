//! GF(2⁸) arithmetic over x⁸+x⁴+x³+x²+1 (0x11D) with generator α = 2, and
//! the Reed–Solomon code used for QR error correction.
//!
//! Codeword sequences are written highest-degree coefficient first, which is
//! the order they appear in a QR block: `data ‖ ec`.

use thiserror::Error;

/// Reduction polynomial, including the x⁸ term.
pub const PRIMITIVE_POLY: u16 = 0x11D;

/// Largest EC codeword count accepted by [`rs_generator`].
pub const MAX_EC_CODEWORDS: usize = 68;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RsError {
    #[error("EC codeword count {0} is outside 1..={MAX_EC_CODEWORDS}")]
    EcCountOutOfRange(usize),
    #[error("block of {len} codewords cannot carry {n_ec} EC codewords")]
    BlockLength { len: usize, n_ec: usize },
    #[error("too many errors to correct")]
    DecodeFailure,
}

struct Tables {
    exp: [u8; 512],
    log: [u8; 256],
}

const fn build_tables() -> Tables {
    let mut exp = [0u8; 512];
    let mut log = [0u8; 256];
    let mut x: u16 = 1;
    let mut i = 0;
    while i < 255 {
        exp[i] = x as u8;
        log[x as usize] = i as u8;
        x <<= 1;
        if x & 0x100 != 0 {
            x ^= PRIMITIVE_POLY;
        }
        i += 1;
    }
    // doubled so exp[log a + log b] needs no modulo
    while i < 512 {
        exp[i] = exp[i - 255];
        i += 1;
    }
    Tables { exp, log }
}

static TABLES: Tables = build_tables();

/// α^e for any exponent (period 255).
#[inline]
pub fn gf_exp(e: usize) -> u8 {
    TABLES.exp[e % 255]
}

/// Discrete log base α. `a` must be nonzero.
#[inline]
pub fn gf_log(a: u8) -> usize {
    debug_assert!(a != 0, "log of zero");
    TABLES.log[a as usize] as usize
}

#[inline]
pub fn gf_add(a: u8, b: u8) -> u8 {
    a ^ b
}

#[inline]
pub fn gf_mul(a: u8, b: u8) -> u8 {
    if a == 0 || b == 0 {
        0
    } else {
        TABLES.exp[gf_log(a) + gf_log(b)]
    }
}

/// Multiplicative inverse; `None` for zero.
pub fn gf_inv(a: u8) -> Option<u8> {
    (a != 0).then(|| TABLES.exp[255 - gf_log(a)])
}

pub fn gf_div(a: u8, b: u8) -> Option<u8> {
    gf_inv(b).map(|inv| gf_mul(a, inv))
}

pub fn gf_pow(a: u8, e: usize) -> u8 {
    if e == 0 {
        1
    } else if a == 0 {
        0
    } else {
        gf_exp(gf_log(a) * e)
    }
}

/// Polynomial over GF(256), highest-degree coefficient first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GfPoly {
    coeffs: Vec<u8>,
}

impl GfPoly {
    /// Builds a polynomial, stripping leading zeros.
    pub fn new(coeffs: &[u8]) -> Self {
        let first = coeffs.iter().position(|&c| c != 0).unwrap_or(coeffs.len());
        let coeffs = if first == coeffs.len() { vec![0] } else { coeffs[first..].to_vec() };
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs == [0]
    }

    /// Horner evaluation.
    pub fn eval(&self, x: u8) -> u8 {
        eval_poly(&self.coeffs, x)
    }

    pub fn mul(&self, other: &GfPoly) -> GfPoly {
        let mut out = vec![0u8; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] ^= gf_mul(a, b);
            }
        }
        GfPoly::new(&out)
    }
}

fn eval_poly(coeffs: &[u8], x: u8) -> u8 {
    coeffs.iter().fold(0, |acc, &c| gf_mul(acc, x) ^ c)
}

/// ∏ (x − αʲ) for j in 0..n_ec.
pub fn rs_generator(n_ec: usize) -> Result<GfPoly, RsError> {
    if !(1..=MAX_EC_CODEWORDS).contains(&n_ec) {
        return Err(RsError::EcCountOutOfRange(n_ec));
    }
    let mut g = GfPoly::new(&[1]);
    for j in 0..n_ec {
        g = g.mul(&GfPoly::new(&[1, gf_exp(j)]));
    }
    Ok(g)
}

/// EC codewords for `data`: the remainder of data·x^n_ec divided by the
/// generator polynomial.
pub fn rs_encode(data: &[u8], n_ec: usize) -> Result<Vec<u8>, RsError> {
    let generator = rs_generator(n_ec)?;
    let gen = &generator.coeffs()[1..];
    let mut rem = vec![0u8; n_ec];
    for &d in data {
        let factor = d ^ rem[0];
        rem.rotate_left(1);
        rem[n_ec - 1] = 0;
        if factor != 0 {
            for (r, &g) in rem.iter_mut().zip(gen) {
                *r ^= gf_mul(g, factor);
            }
        }
    }
    Ok(rem)
}

/// Sⱼ = r(αʲ) for j in 0..n_ec.
pub fn syndromes(received: &[u8], n_ec: usize) -> Vec<u8> {
    (0..n_ec).map(|j| eval_poly(received, gf_exp(j))).collect()
}

/// Corrects up to ⌊n_ec/2⌋ codeword errors in a `data ‖ ec` block.
///
/// Returns the corrected block and the number of codewords changed. Uses
/// Berlekamp–Massey for the error locator, Chien search for its roots and
/// Forney's formula for magnitudes; the result is re-checked against the
/// syndromes before being returned.
pub fn rs_decode(received: &[u8], n_ec: usize) -> Result<(Vec<u8>, usize), RsError> {
    if !(1..=MAX_EC_CODEWORDS).contains(&n_ec) {
        return Err(RsError::EcCountOutOfRange(n_ec));
    }
    let n = received.len();
    if n <= n_ec || n > 255 {
        return Err(RsError::BlockLength { len: n, n_ec });
    }

    let synd = syndromes(received, n_ec);
    if synd.iter().all(|&s| s == 0) {
        return Ok((received.to_vec(), 0));
    }

    let locator = berlekamp_massey(&synd);
    let n_errors = locator.len() - 1;
    if n_errors == 0 || 2 * n_errors > n_ec {
        return Err(RsError::DecodeFailure);
    }

    // Chien search. Locator is stored lowest degree first: Λ(x) = Σ λᵢ xⁱ.
    // Position p (counted from the end of the block) is in error iff Λ(α^-p) = 0.
    let positions: Vec<usize> = (0..n)
        .filter(|&p| {
            let x_inv = gf_exp(255 - p % 255);
            locator.iter().rev().fold(0, |acc, &c| gf_mul(acc, x_inv) ^ c) == 0
        })
        .collect();
    if positions.len() != n_errors {
        return Err(RsError::DecodeFailure);
    }

    // Ω(x) = S(x)Λ(x) mod x^n_ec, with S(x) = Σ Sⱼ xʲ.
    let mut omega = vec![0u8; n_ec];
    for (i, &l) in locator.iter().enumerate() {
        for (j, &s) in synd.iter().enumerate() {
            if i + j < n_ec {
                omega[i + j] ^= gf_mul(l, s);
            }
        }
    }

    let mut corrected = received.to_vec();
    for &p in &positions {
        let x_inv = gf_exp(255 - p % 255);
        let omega_val = omega.iter().rev().fold(0, |acc, &c| gf_mul(acc, x_inv) ^ c);
        // formal derivative: only odd-degree terms survive in characteristic 2
        let deriv_val =
            locator.iter().enumerate().skip(1).step_by(2).fold(0, |acc, (i, &c)| acc ^ gf_mul(c, gf_pow(x_inv, i - 1)));
        let magnitude = gf_div(omega_val, deriv_val).ok_or(RsError::DecodeFailure)?;
        // first consecutive root is α⁰, so e = X·Ω(X⁻¹)/Λ'(X⁻¹)
        let e = gf_mul(gf_exp(p), magnitude);
        if e == 0 {
            return Err(RsError::DecodeFailure);
        }
        corrected[n - 1 - p] ^= e;
    }

    if syndromes(&corrected, n_ec).iter().any(|&s| s != 0) {
        return Err(RsError::DecodeFailure);
    }
    Ok((corrected, positions.len()))
}

/// Shortest LFSR generating the syndrome sequence, lowest degree first,
/// trimmed to its true degree.
fn berlekamp_massey(synd: &[u8]) -> Vec<u8> {
    let mut c = vec![1u8];
    let mut b = vec![1u8];
    let mut len = 0usize;
    let mut shift = 1usize;
    let mut last_disc = 1u8;

    for k in 0..synd.len() {
        let disc = (0..=len.min(c.len() - 1)).fold(0, |acc, i| acc ^ gf_mul(c[i], synd[k - i]));
        if disc == 0 {
            shift += 1;
            continue;
        }
        let coef = gf_div(disc, last_disc).expect("nonzero discrepancy");
        let prev = c.clone();
        if c.len() < b.len() + shift {
            c.resize(b.len() + shift, 0);
        }
        for (i, &bi) in b.iter().enumerate() {
            c[i + shift] ^= gf_mul(coef, bi);
        }
        if 2 * len <= k {
            len = k + 1 - len;
            b = prev;
            last_disc = disc;
            shift = 1;
        } else {
            shift += 1;
        }
    }
    c.truncate(len + 1);
    c.resize(len + 1, 0);
    c
}
