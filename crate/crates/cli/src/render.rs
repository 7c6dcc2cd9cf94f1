//! Text renderings of a module matrix and the parsers that read them back.
//!
//! PBM, TXT and SVG carry a light quiet zone around the symbol; JSON holds
//! the bare matrix. SVG is output-only.

use std::fmt::Write as _;
use std::path::Path;

use clap::ValueEnum;
use sdeqr_core::ModuleMatrix;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RenderFormat {
    Pbm,
    Svg,
    Txt,
    Json,
}

impl RenderFormat {
    pub fn extension(self) -> &'static str {
        match self {
            RenderFormat::Pbm => "pbm",
            RenderFormat::Svg => "svg",
            RenderFormat::Txt => "txt",
            RenderFormat::Json => "json",
        }
    }

    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        [RenderFormat::Pbm, RenderFormat::Svg, RenderFormat::Txt, RenderFormat::Json]
            .into_iter()
            .find(|f| f.extension() == ext)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {col}: {msg}")]
    MalformedInput { line: usize, col: usize, msg: String },
    #[error("{0:?} input cannot be read back; use pbm, txt or json")]
    Unsupported(RenderFormat),
}

fn malformed(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError::MalformedInput { line, col, msg: msg.into() }
}

pub fn render(matrix: &ModuleMatrix, format: RenderFormat, quiet_zone: usize) -> Vec<u8> {
    match format {
        RenderFormat::Pbm => render_pbm(matrix, quiet_zone),
        RenderFormat::Svg => render_svg(matrix, quiet_zone),
        RenderFormat::Txt => render_txt(matrix, quiet_zone),
        RenderFormat::Json => render_json(matrix),
    }
    .into_bytes()
}

/// Module at padded coordinates, light inside the quiet zone.
fn padded(matrix: &ModuleMatrix, quiet_zone: usize, r: usize, c: usize) -> bool {
    let n = matrix.size();
    (quiet_zone..quiet_zone + n).contains(&r)
        && (quiet_zone..quiet_zone + n).contains(&c)
        && matrix.get(r - quiet_zone, c - quiet_zone)
}

fn render_pbm(matrix: &ModuleMatrix, quiet_zone: usize) -> String {
    let side = matrix.size() + 2 * quiet_zone;
    let mut out = format!("P1\n{side} {side}\n");
    for r in 0..side {
        let row: Vec<&str> = (0..side).map(|c| if padded(matrix, quiet_zone, r, c) { "1" } else { "0" }).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn render_txt(matrix: &ModuleMatrix, quiet_zone: usize) -> String {
    let side = matrix.size() + 2 * quiet_zone;
    let mut out = String::with_capacity(side * (side + 1));
    for r in 0..side {
        out.extend((0..side).map(|c| if padded(matrix, quiet_zone, r, c) { '#' } else { '.' }));
        out.push('\n');
    }
    out
}

fn render_svg(matrix: &ModuleMatrix, quiet_zone: usize) -> String {
    let side = matrix.size() + 2 * quiet_zone;
    let mut path = String::new();
    for r in 0..matrix.size() {
        let mut c = 0;
        while c < matrix.size() {
            if !matrix.get(r, c) {
                c += 1;
                continue;
            }
            let start = c;
            while c < matrix.size() && matrix.get(r, c) {
                c += 1;
            }
            let run = c - start;
            write!(path, "M{},{}h{run}v1h-{run}z", start + quiet_zone, r + quiet_zone).unwrap();
        }
    }
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 {side} {side}\" \
         width=\"{px}\" height=\"{px}\" shape-rendering=\"crispEdges\">\n\
         <rect width=\"{side}\" height=\"{side}\" fill=\"#ffffff\"/>\n\
         <path fill=\"#000000\" d=\"{path}\"/>\n\
         </svg>\n",
        px = side * 8,
    )
}

fn render_json(matrix: &ModuleMatrix) -> String {
    let version = matrix.version().map_or("null".to_string(), |v| v.to_string());
    let rows: Vec<String> = (0..matrix.size())
        .map(|r| {
            let bits: Vec<&str> = (0..matrix.size()).map(|c| if matrix.get(r, c) { "1" } else { "0" }).collect();
            format!("    [{}]", bits.join(","))
        })
        .collect();
    format!(
        "{{\n  \"version\": {version},\n  \"size\": {},\n  \"modules\": [\n{}\n  ]\n}}\n",
        matrix.size(),
        rows.join(",\n")
    )
}

/// Reads a rendering back into a matrix, stripping `quiet_zone` modules from
/// each edge of PBM and TXT input. The border must be light and the inner
/// side must be a valid symbol size.
pub fn parse_matrix(data: &[u8], format: RenderFormat, quiet_zone: usize) -> Result<ModuleMatrix, ParseError> {
    match format {
        RenderFormat::Pbm => parse_pbm(data, quiet_zone),
        RenderFormat::Txt => parse_txt(data, quiet_zone),
        RenderFormat::Json => parse_json(data),
        RenderFormat::Svg => Err(ParseError::Unsupported(format)),
    }
}

fn check_side(side: usize, quiet_zone: usize, line: usize, col: usize) -> Result<usize, ParseError> {
    side.checked_sub(2 * quiet_zone).filter(|&n| sdeqr_core::QrVersion::from_size(n).is_some()).ok_or_else(|| {
        malformed(
            line,
            col,
            format!("side {side} minus a {quiet_zone}-module quiet zone is not 4v+17 for any version 1-40"),
        )
    })
}

/// Strips the border; every module in it must be light.
fn strip_border(
    cells: &[bool],
    positions: &[(usize, usize)],
    side: usize,
    quiet_zone: usize,
) -> Result<ModuleMatrix, ParseError> {
    let n = side - 2 * quiet_zone;
    let inner = quiet_zone..quiet_zone + n;
    let mut modules = Vec::with_capacity(n * n);
    for (i, &dark) in cells.iter().enumerate() {
        let (r, c) = (i / side, i % side);
        if inner.contains(&r) && inner.contains(&c) {
            modules.push(dark);
        } else if dark {
            let (line, col) = positions[i];
            return Err(malformed(line, col, "dark module inside the quiet zone"));
        }
    }
    Ok(ModuleMatrix::from_modules(n, modules))
}

/// Character cursor that tracks 1-based line and column.
struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Self { chars: text.chars().peekable(), line: 1, col: 1 }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    /// Skips whitespace and `#` comments.
    fn skip_blank(&mut self) {
        while let Some(c) = self.peek() {
            if c == '#' {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.bump();
                }
            } else if c.is_ascii_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> Result<(usize, usize, usize), ParseError> {
        self.skip_blank();
        let (line, col) = (self.line, self.col);
        let mut digits = String::new();
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            digits.push(self.bump().unwrap());
        }
        let value = digits.parse().map_err(|_| malformed(line, col, "expected a decimal size"))?;
        Ok((value, line, col))
    }
}

fn as_text(data: &[u8]) -> Result<&str, ParseError> {
    std::str::from_utf8(data).map_err(|e| {
        let before = &data[..e.valid_up_to()];
        let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
        let col = before.iter().rev().take_while(|&&b| b != b'\n').count() + 1;
        malformed(line, col, "input is not valid UTF-8")
    })
}

fn parse_pbm(data: &[u8], quiet_zone: usize) -> Result<ModuleMatrix, ParseError> {
    let mut cur = Cursor::new(as_text(data)?);
    cur.skip_blank();
    let (line, col) = (cur.line, cur.col);
    if cur.bump() != Some('P') || cur.bump() != Some('1') {
        return Err(malformed(line, col, "expected the plain PBM magic number P1"));
    }
    let (width, wl, wc) = cur.number()?;
    let (height, ..) = cur.number()?;
    if width != height {
        return Err(malformed(wl, wc, format!("{width}x{height} is not square")));
    }
    check_side(width, quiet_zone, wl, wc)?;

    let mut cells = Vec::with_capacity(width * width);
    let mut positions = Vec::with_capacity(width * width);
    while cells.len() < width * width {
        cur.skip_blank();
        let (line, col) = (cur.line, cur.col);
        match cur.bump() {
            Some('0') => cells.push(false),
            Some('1') => cells.push(true),
            Some(other) => return Err(malformed(line, col, format!("unexpected {other:?} in pixel data"))),
            None => {
                return Err(malformed(line, col, format!("expected {} pixels, found {}", width * width, cells.len())))
            }
        }
        positions.push((line, col));
    }
    cur.skip_blank();
    if cur.peek().is_some() {
        return Err(malformed(cur.line, cur.col, "trailing data after the last pixel"));
    }
    strip_border(&cells, &positions, width, quiet_zone)
}

fn parse_txt(data: &[u8], quiet_zone: usize) -> Result<ModuleMatrix, ParseError> {
    let text = as_text(data)?;
    let rows: Vec<&str> = text.trim_end_matches(['\n', '\r']).split('\n').map(|r| r.trim_end_matches('\r')).collect();
    let side = rows.len();
    let mut cells = Vec::with_capacity(side * side);
    let mut positions = Vec::with_capacity(side * side);
    for (i, row) in rows.iter().enumerate() {
        let mut width = 0;
        for (j, ch) in row.chars().enumerate() {
            match ch {
                '#' => cells.push(true),
                '.' => cells.push(false),
                other => return Err(malformed(i + 1, j + 1, format!("unexpected {other:?}; use '#' or '.'"))),
            }
            positions.push((i + 1, j + 1));
            width += 1;
        }
        if width != side {
            return Err(malformed(i + 1, width + 1, format!("row has {width} modules but the grid has {side} rows")));
        }
    }
    check_side(side, quiet_zone, 1, 1)?;
    strip_border(&cells, &positions, side, quiet_zone)
}

/// A module value that must be exactly 0 or 1.
struct Bit(bool);

impl<'de> Deserialize<'de> for Bit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(Bit(false)),
            1 => Ok(Bit(true)),
            n => Err(serde::de::Error::custom(format!("module value {n} is not 0 or 1"))),
        }
    }
}

#[derive(Deserialize)]
struct JsonMatrix {
    version: Option<u8>,
    size: usize,
    modules: Vec<Vec<Bit>>,
}

fn parse_json(data: &[u8]) -> Result<ModuleMatrix, ParseError> {
    let m: JsonMatrix = serde_json::from_slice(data).map_err(|e| malformed(e.line(), e.column(), e.to_string()))?;
    let side = m.modules.len();
    if m.size != side {
        return Err(malformed(1, 1, format!("size is {} but there are {side} rows", m.size)));
    }
    if let Some(row) = m.modules.iter().position(|r| r.len() != side) {
        return Err(malformed(1, 1, format!("row {row} has {} modules, expected {side}", m.modules[row].len())));
    }
    let version = sdeqr_core::QrVersion::from_size(side)
        .ok_or_else(|| malformed(1, 1, format!("side {side} is not 4v+17 for any version 1-40")))?;
    if m.version.is_some_and(|v| v != version.value()) {
        return Err(malformed(1, 1, format!("version field disagrees with side {side}")));
    }
    Ok(ModuleMatrix::from_modules(side, m.modules.into_iter().flatten().map(|b| b.0).collect()))
}
