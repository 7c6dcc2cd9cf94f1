use std::fmt;

use super::{EncodeError, ModuleMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MaskId(u8);

impl MaskId {
    pub fn new(id: u32) -> Result<Self, EncodeError> {
        if id < 8 {
            Ok(MaskId(id as u8))
        } else {
            Err(EncodeError::InvalidMask(id))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = MaskId> {
        (0..8).map(MaskId)
    }
}

impl fmt::Display for MaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Whether `mask` flips the module at `(row, col)`.
pub fn mask_bit(mask: MaskId, row: usize, col: usize) -> bool {
    let (i, j) = (row, col);
    match mask.0 {
        0 => (i + j) % 2 == 0,
        1 => i % 2 == 0,
        2 => j % 3 == 0,
        3 => (i + j) % 3 == 0,
        4 => (i / 2 + j / 3) % 2 == 0,
        5 => (i * j) % 2 + (i * j) % 3 == 0,
        6 => ((i * j) % 2 + (i * j) % 3) % 2 == 0,
        7 => ((i + j) % 2 + (i * j) % 3) % 2 == 0,
        _ => unreachable!(),
    }
}

/// XORs the mask pattern onto every data module. Applying the same mask
/// twice restores the input.
pub fn apply_mask(matrix: &ModuleMatrix, mask: MaskId) -> ModuleMatrix {
    let mut out = matrix.clone();
    let n = matrix.size();
    for r in 0..n {
        for c in 0..n {
            if !matrix.is_function(r, c) && mask_bit(mask, r, c) {
                out.toggle(r, c);
            }
        }
    }
    out
}

const RUN_PENALTY: usize = 3;
const BLOCK_PENALTY: usize = 3;
const FINDER_PENALTY: usize = 40;
const BALANCE_PENALTY: usize = 10;

const FINDER_LEFT: [bool; 11] = [true, false, true, true, true, false, true, false, false, false, false];
const FINDER_RIGHT: [bool; 11] = [false, false, false, false, true, false, true, true, true, false, true];

/// Sum of the four scanability rules over the whole matrix:
///
/// 1. each row/column run of ≥5 same-coloured modules scores 3 + (len − 5);
/// 2. each 2×2 single-colour square scores 3 (overlaps counted);
/// 3. each `1011101` with four light modules on either side scores 40;
/// 4. 10 for every full 5% the dark proportion deviates from 50%.
pub fn penalty_score(matrix: &ModuleMatrix) -> usize {
    let n = matrix.size();
    let rows: Vec<Vec<bool>> = (0..n).map(|r| (0..n).map(|c| matrix.get(r, c)).collect()).collect();
    let cols: Vec<Vec<bool>> = (0..n).map(|c| (0..n).map(|r| matrix.get(r, c)).collect()).collect();

    let mut score = 0;
    for line in rows.iter().chain(&cols) {
        score += run_penalty(line) + finder_penalty(line);
    }

    for r in 0..n.saturating_sub(1) {
        for c in 0..n - 1 {
            let v = rows[r][c];
            if rows[r][c + 1] == v && rows[r + 1][c] == v && rows[r + 1][c + 1] == v {
                score += BLOCK_PENALTY;
            }
        }
    }

    let total = n * n;
    if let Some(steps) = (20 * matrix.dark_count()).abs_diff(10 * total).checked_div(total) {
        score += steps * BALANCE_PENALTY;
    }
    score
}

fn run_penalty(line: &[bool]) -> usize {
    let mut score = 0;
    let mut i = 0;
    while i < line.len() {
        let mut j = i;
        while j < line.len() && line[j] == line[i] {
            j += 1;
        }
        let run = j - i;
        if run >= 5 {
            score += RUN_PENALTY + run - 5;
        }
        i = j;
    }
    score
}

fn finder_penalty(line: &[bool]) -> usize {
    line.windows(11).filter(|w| *w == FINDER_LEFT || *w == FINDER_RIGHT).count() * FINDER_PENALTY
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qrencode::{build_function_patterns, QrVersion};

    #[test]
    fn mask_range() {
        assert!(MaskId::new(7).is_ok());
        assert_eq!(MaskId::new(8), Err(EncodeError::InvalidMask(8)));
    }

    #[test]
    fn all_light_fixture() {
        // rule 1: 42 lines × (3 + 16) = 798
        // rule 2: 20 × 20 squares × 3 = 1200
        // rule 3: no dark modules, no matches
        // rule 4: 0% dark, ten 5% steps = 100
        let m = ModuleMatrix::blank(21);
        assert_eq!(penalty_score(&m), 798 + 1200 + 100);
        assert_eq!(penalty_score(&m), 2098);
    }

    #[test]
    fn checkerboard_has_no_runs_or_blocks() {
        let mut m = ModuleMatrix::blank(21);
        for r in 0..21 {
            for c in 0..21 {
                m.set(r, c, (r + c) % 2 == 0);
            }
        }
        // 221 dark of 441: |4420 - 4410| / 441 = 0 steps
        assert_eq!(penalty_score(&m), 0);
    }

    #[test]
    fn finder_like_run() {
        let line = [false, false, false, false, true, false, true, true, true, false, true];
        assert_eq!(finder_penalty(&line), 40);
        assert_eq!(run_penalty(&[true; 7]), 5);
        assert_eq!(run_penalty(&[true, true, true, true, false]), 0);
    }

    #[test]
    fn mask_zero_on_blank_data_area() {
        let t = build_function_patterns(QrVersion::new(1).unwrap());
        let mut blank = t.clone();
        for (r, c) in t.data_positions() {
            blank.set(r, c, false);
        }
        let masked = apply_mask(&blank, MaskId(0));
        for r in 0..21 {
            for c in 0..21 {
                if t.is_function(r, c) {
                    assert_eq!(masked.get(r, c), blank.get(r, c));
                } else {
                    assert_eq!(masked.get(r, c), (r + c) % 2 == 0);
                }
            }
        }
        assert_eq!(apply_mask(&masked, MaskId(0)), blank);
    }
}
