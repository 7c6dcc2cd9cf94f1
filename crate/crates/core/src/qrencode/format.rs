//! BCH-protected format (15-bit) and version (18-bit) information.

use super::{EcLevel, MaskId, ModuleMatrix, QrVersion};

const FORMAT_GENERATOR: u32 = 0x537;
const VERSION_GENERATOR: u32 = 0x1F25;

/// XOR mask applied to every format word.
pub const FORMAT_MASK: u16 = 0x5412;

fn bch_remainder(data: u32, generator: u32, ec_bits: u32) -> u32 {
    let gen_degree = 31 - generator.leading_zeros();
    debug_assert_eq!(gen_degree, ec_bits);
    let mut rem = data << ec_bits;
    for shift in (0..32 - ec_bits).rev() {
        if rem & (1 << (shift + ec_bits)) != 0 {
            rem ^= generator << shift;
        }
    }
    rem
}

pub fn format_bits(ec: EcLevel, mask: MaskId) -> u16 {
    let data = (u32::from(ec.format_bits()) << 3) | u32::from(mask.value());
    (((data << 10) | bch_remainder(data, FORMAT_GENERATOR, 10)) as u16) ^ FORMAT_MASK
}

/// Version information word; `None` below version 7.
pub fn version_bits(version: QrVersion) -> Option<u32> {
    let v = u32::from(version.value());
    (v >= 7).then(|| (v << 12) | bch_remainder(v, VERSION_GENERATOR, 12))
}

/// Nearest valid format word, if within 3 bit errors.
/// Returns the decoded fields and the Hamming distance.
pub fn decode_format_bits(word: u16) -> Option<(EcLevel, MaskId, u32)> {
    EcLevel::ALL
        .iter()
        .flat_map(|&ec| MaskId::all().map(move |m| (ec, m)))
        .map(|(ec, m)| (ec, m, (format_bits(ec, m) ^ word).count_ones()))
        .min_by_key(|&(_, _, d)| d)
        .filter(|&(_, _, d)| d <= 3)
}

/// Nearest valid version word, if within 3 bit errors.
pub fn decode_version_bits(word: u32) -> Option<(QrVersion, u32)> {
    QrVersion::all()
        .filter_map(|v| version_bits(v).map(|bits| (v, (bits ^ word).count_ones())))
        .min_by_key(|&(_, d)| d)
        .filter(|&(_, d)| d <= 3)
}

/// Module coordinates of format bit `i` (LSB = 0) in both copies: around the
/// top-left finder, and split between the top-right and bottom-left finders.
pub(crate) fn format_positions(size: usize) -> [[(usize, usize); 15]; 2] {
    let mut first = [(0, 0); 15];
    let mut second = [(0, 0); 15];
    for i in 0..15 {
        first[i] = match i {
            0..=5 => (i, 8),
            6 => (7, 8),
            7 => (8, 8),
            8 => (8, 7),
            _ => (8, 14 - i),
        };
        second[i] = if i < 8 { (8, size - 1 - i) } else { (size - 15 + i, 8) };
    }
    [first, second]
}

/// Coordinates of version bit `i` in both 6×3 blocks (top-right, bottom-left).
pub(crate) fn version_positions(size: usize) -> [[(usize, usize); 18]; 2] {
    let mut top_right = [(0, 0); 18];
    let mut bottom_left = [(0, 0); 18];
    for i in 0..18 {
        let (a, b) = (size - 11 + i % 3, i / 3);
        top_right[i] = (b, a);
        bottom_left[i] = (a, b);
    }
    [top_right, bottom_left]
}

pub(crate) fn draw_format(matrix: &mut ModuleMatrix, ec: EcLevel, mask: MaskId) {
    let bits = format_bits(ec, mask);
    for copy in format_positions(matrix.size()) {
        for (i, (r, c)) in copy.into_iter().enumerate() {
            matrix.set(r, c, (bits >> i) & 1 == 1);
        }
    }
}

pub(crate) fn draw_version(matrix: &mut ModuleMatrix, version: QrVersion) {
    if let Some(bits) = version_bits(version) {
        for copy in version_positions(matrix.size()) {
            for (i, (r, c)) in copy.into_iter().enumerate() {
                matrix.set(r, c, (bits >> i) & 1 == 1);
            }
        }
    }
}
