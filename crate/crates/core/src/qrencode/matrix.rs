use super::QrVersion;

/// Square grid of dark/light modules plus a mask of reserved function modules.
///
/// Coordinates are `(row, col)` with `(0, 0)` at the top-left corner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleMatrix {
    size: usize,
    dark: Vec<bool>,
    function: Vec<bool>,
}

impl ModuleMatrix {
    /// All-light matrix with no reserved modules.
    pub fn blank(size: usize) -> Self {
        Self { size, dark: vec![false; size * size], function: vec![false; size * size] }
    }

    /// Wraps sampled modules (row-major, `true` = dark).
    ///
    /// When `size` matches a QR version the function mask is rebuilt from
    /// that version's template; otherwise every module is treated as data.
    pub fn from_modules(size: usize, dark: Vec<bool>) -> Self {
        assert_eq!(dark.len(), size * size, "module count does not match size");
        let function = match QrVersion::from_size(size) {
            Some(v) => build_function_patterns(v).function,
            None => vec![false; size * size],
        };
        Self { size, dark, function }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn version(&self) -> Option<QrVersion> {
        QrVersion::from_size(self.size)
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.dark[row * self.size + col]
    }

    pub fn set(&mut self, row: usize, col: usize, dark: bool) {
        self.dark[row * self.size + col] = dark;
    }

    pub fn toggle(&mut self, row: usize, col: usize) {
        self.dark[row * self.size + col] ^= true;
    }

    pub fn is_function(&self, row: usize, col: usize) -> bool {
        self.function[row * self.size + col]
    }

    /// Row-major module colours.
    pub fn modules(&self) -> &[bool] {
        &self.dark
    }

    pub fn function_mask(&self) -> &[bool] {
        &self.function
    }

    pub fn dark_count(&self) -> usize {
        self.dark.iter().filter(|&&d| d).count()
    }

    pub fn data_module_count(&self) -> usize {
        self.function.iter().filter(|&&f| !f).count()
    }

    pub fn transpose(&self) -> Self {
        let n = self.size;
        let mut t = Self::blank(n);
        for r in 0..n {
            for c in 0..n {
                t.dark[c * n + r] = self.dark[r * n + c];
                t.function[c * n + r] = self.function[r * n + c];
            }
        }
        t
    }

    fn set_function(&mut self, row: usize, col: usize, dark: bool) {
        let i = row * self.size + col;
        self.dark[i] = dark;
        self.function[i] = true;
    }

    /// Data module coordinates in placement order: two-column strips from
    /// the right edge, alternating upward and downward, skipping column 6.
    pub fn data_positions(&self) -> Vec<(usize, usize)> {
        let n = self.size;
        let mut out = Vec::with_capacity(self.data_module_count());
        let mut right = n as isize - 1;
        while right >= 1 {
            if right == 6 {
                right = 5;
            }
            let right_u = right as usize;
            let upward = (right_u + 1) & 2 == 0;
            for vert in 0..n {
                let row = if upward { n - 1 - vert } else { vert };
                for col in [right_u, right_u - 1] {
                    if !self.is_function(row, col) {
                        out.push((row, col));
                    }
                }
            }
            right -= 2;
        }
        out
    }
}

/// Template for `version`: finder, separator, timing and alignment patterns
/// and the dark module drawn; format and version areas reserved but light.
pub fn build_function_patterns(version: QrVersion) -> ModuleMatrix {
    let n = version.size();
    let mut m = ModuleMatrix::blank(n);

    for i in 0..n {
        m.set_function(6, i, i % 2 == 0);
        m.set_function(i, 6, i % 2 == 0);
    }

    // finders with their separators
    for (r0, c0) in [(0, 0), (0, n - 7), (n - 7, 0)] {
        for dr in -1isize..=7 {
            for dc in -1isize..=7 {
                let (r, c) = (r0 as isize + dr, c0 as isize + dc);
                if r < 0 || c < 0 || r >= n as isize || c >= n as isize {
                    continue;
                }
                let ring = dr.min(dc).min(6 - dr).min(6 - dc);
                let dark = ring == 0 || ring >= 2;
                m.set_function(r as usize, c as usize, dark && ring >= 0);
            }
        }
    }

    let centres = version.alignment_positions();
    let last = centres.len().saturating_sub(1);
    for (i, &r) in centres.iter().enumerate() {
        for (j, &c) in centres.iter().enumerate() {
            // the three corners occupied by finders
            if (i == 0 && j == 0) || (i == 0 && j == last) || (i == last && j == 0) {
                continue;
            }
            for dr in -2isize..=2 {
                for dc in -2isize..=2 {
                    let dark = dr.abs().max(dc.abs()) != 1;
                    m.set_function((r as isize + dr) as usize, (c as isize + dc) as usize, dark);
                }
            }
        }
    }

    // format information areas
    for i in 0..9 {
        if i != 6 {
            m.set_function(8, i, false);
            m.set_function(i, 8, false);
        }
    }
    for i in 0..8 {
        m.set_function(8, n - 1 - i, false);
        m.set_function(n - 1 - i, 8, false);
    }
    m.set_function(n - 8, 8, true);

    if version.value() >= 7 {
        for i in 0..6 {
            for j in 0..3 {
                m.set_function(i, n - 11 + j, false);
                m.set_function(n - 11 + j, i, false);
            }
        }
    }
    m
}

/// Writes codewords MSB-first along the placement path. Remainder modules
/// stay light.
pub fn place_codewords(matrix: &mut ModuleMatrix, codewords: &[u8]) {
    let positions = matrix.data_positions();
    assert!(codewords.len() * 8 <= positions.len(), "too many codewords for the symbol");
    for (i, &(r, c)) in positions.iter().enumerate() {
        let dark = codewords.get(i / 8).is_some_and(|&cw| (cw >> (7 - i % 8)) & 1 == 1);
        matrix.set(r, c, dark);
    }
}
