//! Data ingestion and serialization, the three-piece synthetic generator,
//! and flattening of hyperspectral cubes into point sets.
//!
//! Binary matrix layout (little-endian throughout):
//!
//! | bytes   | content                                |
//! |---------|----------------------------------------|
//! | 0..4    | ASCII `HSAP`                           |
//! | 4..8    | version, `u32` = 1                     |
//! | 8..16   | rows, `u64`                            |
//! | 16..24  | cols, `u64`                            |
//! | 24..    | `rows * cols` binary64 values, row-major |

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{HsapError, Result};
use crate::linalg::Matrix;

pub const MAGIC: &[u8; 4] = b"HSAP";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 24;

/// `T` points in `R^n` as rows, with optional integer labels per row.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    pub points: Matrix,
    pub labels: Option<Vec<i64>>,
}

impl DataMatrix {
    pub fn new(points: Matrix) -> Self {
        Self {
            points,
            labels: None,
        }
    }

    pub fn with_labels(points: Matrix, labels: Vec<i64>) -> Result<Self> {
        if labels.len() != points.rows() {
            return Err(HsapError::DimensionMismatch(format!(
                "{} labels for {} points",
                labels.len(),
                points.rows()
            )));
        }
        Ok(Self {
            points,
            labels: Some(labels),
        })
    }

    pub fn len(&self) -> usize {
        self.points.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.rows() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.cols()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Binary,
}

impl FromStr for MatrixFormat {
    type Err = HsapError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(MatrixFormat::Csv),
            "binary" | "bin" => Ok(MatrixFormat::Binary),
            other => Err(HsapError::InvalidParameter(format!(
                "unknown matrix format {other:?} (expected csv or binary)"
            ))),
        }
    }
}

impl std::fmt::Display for MatrixFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MatrixFormat::Csv => "csv",
            MatrixFormat::Binary => "binary",
        })
    }
}

impl MatrixFormat {
    pub fn extension(self) -> &'static str {
        match self {
            MatrixFormat::Csv => "csv",
            MatrixFormat::Binary => "bin",
        }
    }
}

pub fn load_matrix(path: impl AsRef<Path>, format: MatrixFormat) -> Result<DataMatrix> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| HsapError::io(path, e))?;
    let points = match format {
        MatrixFormat::Binary => decode_binary(&bytes)?,
        MatrixFormat::Csv => {
            let text = String::from_utf8(bytes).map_err(|e| {
                HsapError::io(
                    path,
                    std::io::Error::new(std::io::ErrorKind::InvalidData, e),
                )
            })?;
            parse_csv(&text, path)?
        }
    };
    Ok(DataMatrix::new(points))
}

/// Loads a matrix, choosing the binary decoder when the file starts with the
/// `HSAP` magic and CSV otherwise.
pub fn load_matrix_auto(path: impl AsRef<Path>) -> Result<DataMatrix> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| HsapError::io(path, e))?;
    let format = if bytes.starts_with(MAGIC) {
        MatrixFormat::Binary
    } else {
        MatrixFormat::Csv
    };
    drop(bytes);
    load_matrix(path, format)
}

pub fn save_matrix(m: &Matrix, path: impl AsRef<Path>, format: MatrixFormat) -> Result<()> {
    let bytes = match format {
        MatrixFormat::Csv => format_csv(m).into_bytes(),
        MatrixFormat::Binary => encode_binary(m),
    };
    write_atomic(path.as_ref(), &bytes)
}

/// Writes through a temporary file in the destination directory, then
/// renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| HsapError::io(&dir, e))?;
    tmp.write_all(bytes).map_err(|e| HsapError::io(path, e))?;
    tmp.persist(path)
        .map_err(|e| HsapError::io(path, e.error))?;
    Ok(())
}

/// Comma-separated rows with shortest round-trip formatting of every value.
pub fn format_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        for (j, x) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&x.to_string());
        }
        out.push('\n');
    }
    out
}

/// Parses CSV text; `origin` only feeds diagnostics. Blank lines are skipped.
pub fn parse_csv(text: &str, origin: &Path) -> Result<Matrix> {
    let mut data = Vec::new();
    let mut cols: Option<usize> = None;
    let mut rows = 0;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let before = data.len();
        for (field, token) in line.split(',').enumerate() {
            let token = token.trim();
            let value: f64 = token.parse().map_err(|_| HsapError::NonNumeric {
                path: origin.to_path_buf(),
                line: lineno + 1,
                field: field + 1,
                token: token.to_string(),
            })?;
            data.push(value);
        }
        let found = data.len() - before;
        match cols {
            None => cols = Some(found),
            Some(expected) if expected != found => {
                return Err(HsapError::RaggedRow {
                    path: origin.to_path_buf(),
                    line: lineno + 1,
                    expected,
                    found,
                })
            }
            _ => {}
        }
        rows += 1;
    }
    let cols =
        cols.ok_or_else(|| HsapError::EmptyInput(format!("{} has no rows", origin.display())))?;
    Matrix::new(rows, cols, data)
}

pub fn encode_binary(m: &Matrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * m.as_slice().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u64).to_le_bytes());
    for x in m.as_slice() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

pub fn decode_binary(bytes: &[u8]) -> Result<Matrix> {
    if bytes.len() < 4 {
        return Err(HsapError::Truncated {
            expected: HEADER_LEN as u64,
            found: bytes.len() as u64,
        });
    }
    let magic: [u8; 4] = bytes[0..4].try_into().expect("4 bytes");
    if &magic != MAGIC {
        return Err(HsapError::BadMagic { found: magic });
    }
    if bytes.len() < HEADER_LEN {
        return Err(HsapError::Truncated {
            expected: HEADER_LEN as u64,
            found: bytes.len() as u64,
        });
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    if version != FORMAT_VERSION {
        return Err(HsapError::UnsupportedVersion(version));
    }
    let rows = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    let cols = u64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes"));
    let expected = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(8))
        .and_then(|n| n.checked_add(HEADER_LEN as u64))
        .ok_or(HsapError::InvalidShape {
            rows: rows as usize,
            cols: cols as usize,
            len: 0,
        })?;
    let found = bytes.len() as u64;
    if found < expected {
        return Err(HsapError::Truncated { expected, found });
    }
    if found > expected {
        return Err(HsapError::TrailingBytes {
            extra: found - expected,
        });
    }
    let data = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Matrix::new(rows as usize, cols as usize, data)
}

/// Single-column label file, one integer per line.
pub fn load_labels(path: impl AsRef<Path>) -> Result<Vec<i64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| HsapError::io(path, e))?;
    let mut labels = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line.contains(',') {
            return Err(HsapError::RaggedRow {
                path: path.to_path_buf(),
                line: lineno + 1,
                expected: 1,
                found: line.split(',').count(),
            });
        }
        labels.push(line.parse().map_err(|_| HsapError::NonNumeric {
            path: path.to_path_buf(),
            line: lineno + 1,
            field: 1,
            token: line.to_string(),
        })?);
    }
    if labels.is_empty() {
        return Err(HsapError::EmptyInput(format!(
            "{} has no labels",
            path.display()
        )));
    }
    Ok(labels)
}

pub fn format_labels(labels: &[i64]) -> String {
    let mut out = String::with_capacity(labels.len() * 3);
    for l in labels {
        out.push_str(&l.to_string());
        out.push('\n');
    }
    out
}

pub fn save_labels(labels: &[i64], path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), format_labels(labels).as_bytes())
}

/// First line: `f1(t) = (t, -t, 1)`.
pub fn line_one(t: f64) -> [f64; 3] {
    [t, -t, 1.0]
}

/// Second line: `f2(t) = (t, t, 4)`.
pub fn line_two(t: f64) -> [f64; 3] {
    [t, t, 4.0]
}

/// The plane: `f3(t, s) = (t/2 - s, s, t - s - 3)`.
pub fn plane(t: f64, s: f64) -> [f64; 3] {
    [t / 2.0 - s, s, t - s - 3.0]
}

/// Parameters of the two-lines-plus-plane synthetic set.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub per_line: usize,
    pub plane: usize,
    pub t_range: (f64, f64),
    pub s_range: (f64, f64),
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            per_line: 100,
            plane: 500,
            t_range: (-5.0, 5.0),
            s_range: (-5.0, 5.0),
            seed: 0,
        }
    }
}

/// Samples `per_line` points from each line and `plane` points from the
/// plane, with parameters drawn i.i.d. uniform from the given intervals.
/// Labels are 1 and 2 for the lines and 3 for the plane.
pub fn gen_synthetic(params: &SynthParams) -> Result<DataMatrix> {
    for (lo, hi) in [params.t_range, params.s_range] {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(HsapError::InvalidParameter(format!(
                "invalid sampling interval [{lo}, {hi}]"
            )));
        }
    }
    if params.per_line == 0 && params.plane == 0 {
        return Err(HsapError::InvalidParameter(
            "synthetic set would be empty".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut draw = |(lo, hi): (f64, f64)| lo + (hi - lo) * rng.random::<f64>();
    let total = 2 * params.per_line + params.plane;
    let mut data = Vec::with_capacity(3 * total);
    for _ in 0..params.per_line {
        data.extend_from_slice(&line_one(draw(params.t_range)));
    }
    for _ in 0..params.per_line {
        data.extend_from_slice(&line_two(draw(params.t_range)));
    }
    for _ in 0..params.plane {
        let t = draw(params.t_range);
        let s = draw(params.s_range);
        data.extend_from_slice(&plane(t, s));
    }
    let mut labels = vec![1; params.per_line];
    labels.resize(2 * params.per_line, 2);
    labels.resize(total, 3);
    DataMatrix::with_labels(Matrix::new(total, 3, data)?, labels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CubeDescriptor {
    pub height: usize,
    pub width: usize,
    pub bands: usize,
}

impl CubeDescriptor {
    pub fn pixels(&self) -> usize {
        self.height * self.width
    }

    pub fn len(&self) -> usize {
        self.pixels() * self.bands
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl FromStr for CubeDescriptor {
    type Err = HsapError;

    /// Parses `HxWxB`, e.g. `145x145x200`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(['x', 'X', ','])
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| HsapError::InvalidParameter(format!("bad cube descriptor {s:?}")))?;
        match parts[..] {
            [height, width, bands] => Ok(CubeDescriptor {
                height,
                width,
                bands,
            }),
            _ => Err(HsapError::InvalidParameter(format!(
                "cube descriptor {s:?} must be HxWxB"
            ))),
        }
    }
}

impl std::fmt::Display for CubeDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}x{}", self.height, self.width, self.bands)
    }
}

/// Memory order of a raw cube payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interleave {
    /// Band-interleaved by pixel: all bands of a pixel are contiguous.
    #[default]
    Bip,
    /// Band-interleaved by line: one image row per band, bands alternate.
    Bil,
    /// Band-sequential: one full image per band.
    Bsq,
}

impl FromStr for Interleave {
    type Err = HsapError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bip" => Ok(Interleave::Bip),
            "bil" => Ok(Interleave::Bil),
            "bsq" => Ok(Interleave::Bsq),
            other => Err(HsapError::InvalidParameter(format!(
                "unknown interleave {other:?} (expected bip, bil or bsq)"
            ))),
        }
    }
}

impl std::fmt::Display for Interleave {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Interleave::Bip => "bip",
            Interleave::Bil => "bil",
            Interleave::Bsq => "bsq",
        })
    }
}

/// Turns a cube into a `(height * width) x bands` point matrix; row `r * width + c`
/// holds the spectrum of pixel `(r, c)`.
pub fn flatten_cube(raw: &[f64], desc: CubeDescriptor, layout: Interleave) -> Result<DataMatrix> {
    if desc.pixels() == 0 || desc.bands == 0 {
        return Err(HsapError::InvalidParameter(format!(
            "degenerate cube {desc}"
        )));
    }
    if raw.len() != desc.len() {
        return Err(HsapError::CubeLength {
            expected: desc.len(),
            found: raw.len(),
        });
    }
    let CubeDescriptor {
        height,
        width,
        bands,
    } = desc;
    let points = match layout {
        Interleave::Bip => raw.to_vec(),
        Interleave::Bil => {
            let mut out = vec![0.0; raw.len()];
            for r in 0..height {
                for b in 0..bands {
                    let src = &raw[(r * bands + b) * width..(r * bands + b + 1) * width];
                    for (c, &x) in src.iter().enumerate() {
                        out[(r * width + c) * bands + b] = x;
                    }
                }
            }
            out
        }
        Interleave::Bsq => {
            let pixels = desc.pixels();
            let mut out = vec![0.0; raw.len()];
            for b in 0..bands {
                for (p, &x) in raw[b * pixels..(b + 1) * pixels].iter().enumerate() {
                    out[p * bands + b] = x;
                }
            }
            out
        }
    };
    Ok(DataMatrix::new(Matrix::new(desc.pixels(), bands, points)?))
}
