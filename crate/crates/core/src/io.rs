//! Binary field and data files, slice export.
//!
//! Field files (`TTF1`):
//!
//! ```text
//! magic "TTF1" | version u32 | n u32 | extent f64 | components u32 | payload
//! ```
//!
//! with `components` 1 (scalar), 3 (vector) or 6 (tensor) and the payload as
//! little-endian `f64`, component fastest, then `x1`, `x2`, `x3`.
//!
//! Data files (`TTD1`):
//!
//! ```text
//! magic "TTD1" | version u32 | n_axes, n_angles, h, w, n_components u32
//!   | 3 axis vectors 9×f64 (unused slots zero) | angle range f64 | payload
//! ```
//!
//! with the payload in index order `[axis][angle][row][col][component]`.
//! The detector pitch is not stored; readers supply it.
//!
//! All writes go to a temporary file in the target directory that is renamed
//! into place.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use ndarray::{Array3, Array4, Array5};

use crate::error::{Error, Result};
use crate::geometry::{slab_to_grid, CoordAxis, ScalarField3, SymTensorField3, VectorField3, VoxelGrid3};
use crate::projector::{DetectorGeometry, TrtDataSet};

pub const FIELD_MAGIC: &[u8; 4] = b"TTF1";
pub const DATA_MAGIC: &[u8; 4] = b"TTD1";
pub const FORMAT_VERSION: u32 = 1;

const FIELD_HEADER_LEN: usize = 4 + 4 + 4 + 8 + 4;
const DATA_HEADER_LEN: usize = 4 + 4 + 5 * 4 + 9 * 8 + 8;

/// Any field stored in a `TTF1` file.
#[derive(Clone, Debug)]
pub enum FieldData {
    Scalar(ScalarField3),
    Vector(VectorField3),
    Tensor(SymTensorField3),
}

impl FieldData {
    pub fn grid(&self) -> VoxelGrid3 {
        match self {
            FieldData::Scalar(f) => f.grid,
            FieldData::Vector(f) => f.grid,
            FieldData::Tensor(f) => f.grid,
        }
    }

    pub fn components(&self) -> usize {
        match self {
            FieldData::Scalar(_) => 1,
            FieldData::Vector(_) => 3,
            FieldData::Tensor(_) => 6,
        }
    }

    /// Component `c` as a scalar field.
    pub fn component(&self, c: usize) -> Result<ScalarField3> {
        if c >= self.components() {
            return Err(Error::invalid(format!(
                "component {c} out of range for a field with {} components",
                self.components()
            )));
        }
        Ok(match self {
            FieldData::Scalar(f) => f.clone(),
            FieldData::Vector(f) => f.component(c),
            FieldData::Tensor(f) => f.component(c),
        })
    }

    fn values(&self) -> Vec<f64> {
        match self {
            FieldData::Scalar(f) => f.data.iter().copied().collect(),
            FieldData::Vector(f) => f.data.iter().copied().collect(),
            FieldData::Tensor(f) => f.data.iter().copied().collect(),
        }
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn read_all(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

fn to_u32(v: usize, what: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::invalid(format!("{what} {v} does not fit in 32 bits")))
}

/// Serialises a field to `TTF1` bytes.
pub fn encode_field(field: &FieldData) -> Result<Vec<u8>> {
    let grid = field.grid();
    let values = field.values();
    let mut out = Vec::with_capacity(FIELD_HEADER_LEN + 8 * values.len());
    out.extend_from_slice(FIELD_MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&to_u32(grid.n(), "grid size")?.to_le_bytes());
    out.extend_from_slice(&grid.extent().to_le_bytes());
    out.extend_from_slice(&(field.components() as u32).to_le_bytes());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

/// Sequential little-endian reader that reports byte offsets in errors.
struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Cursor { bytes, pos: 0 }
    }

    fn fail(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            offset: offset as u64,
            message: message.into(),
        }
    }

    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < len {
            return Err(self.fail(
                self.pos,
                format!(
                    "file ends inside {what}: need {len} bytes, {} left",
                    self.bytes.len() - self.pos
                ),
            ));
        }
        let s = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn magic(&mut self, expected: &[u8; 4]) -> Result<()> {
        let found = self.take(4, "magic")?;
        if found != expected {
            return Err(self.fail(
                0,
                format!(
                    "bad magic {:?} ({}), expected {:?}",
                    String::from_utf8_lossy(found),
                    found.iter().map(|b| format!("{b:02x}")).collect::<Vec<_>>().join(" "),
                    String::from_utf8_lossy(expected)
                ),
            ));
        }
        Ok(())
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().expect("4 bytes")))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().expect("8 bytes")))
    }

    fn version(&mut self) -> Result<()> {
        let at = self.pos;
        let v = self.u32("version")?;
        if v != FORMAT_VERSION {
            return Err(self.fail(at, format!("unsupported version {v}, expected {FORMAT_VERSION}")));
        }
        Ok(())
    }

    /// Reads exactly `count` f64 values that must end the file.
    fn payload(&mut self, count: usize) -> Result<Vec<f64>> {
        let expected = count.checked_mul(8).ok_or_else(|| self.fail(self.pos, "payload size overflows"))?;
        let actual = self.bytes.len() - self.pos;
        if actual != expected {
            return Err(self.fail(
                self.pos,
                format!("payload is {actual} bytes, expected {expected}"),
            ));
        }
        let values = self.bytes[self.pos..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        self.pos = self.bytes.len();
        Ok(values)
    }
}

/// Parses `TTF1` bytes.
pub fn decode_field(bytes: &[u8]) -> Result<FieldData> {
    let mut c = Cursor::new(bytes);
    c.magic(FIELD_MAGIC)?;
    c.version()?;
    let at = c.pos;
    let n = c.u32("grid size")? as usize;
    let extent = c.f64("extent")?;
    let grid = VoxelGrid3::new(n, extent).map_err(|e| c.fail(at, e.to_string()))?;
    let at = c.pos;
    let comps = c.u32("component count")? as usize;
    if ![1, 3, 6].contains(&comps) {
        return Err(c.fail(at, format!("component count must be 1, 3 or 6, got {comps}")));
    }
    let values = c.payload(n * n * n * comps)?;
    Ok(match comps {
        1 => FieldData::Scalar(ScalarField3 {
            grid,
            data: Array3::from_shape_vec((n, n, n), values).expect("length checked"),
        }),
        3 => FieldData::Vector(VectorField3 {
            grid,
            data: Array4::from_shape_vec((n, n, n, 3), values).expect("length checked"),
        }),
        _ => FieldData::Tensor(SymTensorField3 {
            grid,
            data: Array4::from_shape_vec((n, n, n, 6), values).expect("length checked"),
        }),
    })
}

pub fn write_field(path: &Path, field: &FieldData) -> Result<()> {
    write_atomic(path, &encode_field(field)?)
}

pub fn read_field(path: &Path) -> Result<FieldData> {
    decode_field(&read_all(path)?)
}

/// Reads a file that must hold a tensor field.
pub fn read_tensor_field(path: &Path) -> Result<SymTensorField3> {
    match read_field(path)? {
        FieldData::Tensor(f) => Ok(f),
        other => Err(Error::invalid(format!(
            "{}: expected a tensor field (6 components), found {}",
            path.display(),
            other.components()
        ))),
    }
}

/// Serialises a data set to `TTD1` bytes.
pub fn encode_data(data: &TrtDataSet) -> Result<Vec<u8>> {
    let (na, nt, h, w, nc) = data.data.dim();
    if na > 3 {
        return Err(Error::invalid("at most three rotation axes can be stored"));
    }
    let mut out = Vec::with_capacity(DATA_HEADER_LEN + 8 * data.data.len());
    out.extend_from_slice(DATA_MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    for (v, what) in [(na, "axes"), (nt, "angles"), (h, "rows"), (w, "cols"), (nc, "components")] {
        out.extend_from_slice(&to_u32(v, what)?.to_le_bytes());
    }
    for slot in 0..3 {
        let u = data.axes.get(slot).map_or([0.0; 3], |a| a.unit());
        for x in u {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out.extend_from_slice(&std::f64::consts::TAU.to_le_bytes());
    for v in data.data.iter() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

/// Parses `TTD1` bytes; `pitch` is the detector pixel spacing.
pub fn decode_data(bytes: &[u8], pitch: f64) -> Result<TrtDataSet> {
    if !(pitch > 0.0 && pitch.is_finite()) {
        return Err(Error::invalid(format!("detector pitch must be > 0, got {pitch}")));
    }
    let mut c = Cursor::new(bytes);
    c.magic(DATA_MAGIC)?;
    c.version()?;
    let at = c.pos;
    let mut dims = [0usize; 5];
    for (d, what) in dims.iter_mut().zip(["axis count", "angle count", "rows", "cols", "component count"]) {
        *d = c.u32(what)? as usize;
    }
    let [na, nt, h, w, nc] = dims;
    if !(1..=3).contains(&na) || nt == 0 || h == 0 || w == 0 || nc != 3 {
        return Err(c.fail(
            at,
            format!("bad dimensions axes={na} angles={nt} rows={h} cols={w} components={nc}"),
        ));
    }
    let mut axes = Vec::with_capacity(na);
    for slot in 0..3 {
        let at = c.pos;
        let mut u = [0.0; 3];
        for x in u.iter_mut() {
            *x = c.f64("axis vector")?;
        }
        if slot < na {
            let axis = CoordAxis::ALL
                .into_iter()
                .find(|a| a.unit() == u)
                .ok_or_else(|| c.fail(at, format!("axis {u:?} is not a coordinate unit vector")))?;
            if axes.contains(&axis) {
                return Err(c.fail(at, format!("axis {axis} listed twice")));
            }
            axes.push(axis);
        }
    }
    let at = c.pos;
    let range = c.f64("angle range")?;
    if (range - std::f64::consts::TAU).abs() > 1e-12 {
        return Err(c.fail(at, format!("angle range {range} is not a full turn")));
    }
    let payload_at = c.pos;
    let values = c.payload(na * nt * h * w * nc)?;
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(c.fail(payload_at + 8 * i, "non-finite value in payload"));
    }
    Ok(TrtDataSet {
        axes,
        n_angles: nt,
        detector: DetectorGeometry {
            rows: h,
            cols: w,
            pitch,
        },
        data: Array5::from_shape_vec((na, nt, h, w, nc), values).expect("length checked"),
    })
}

pub fn write_data(path: &Path, data: &TrtDataSet) -> Result<()> {
    write_atomic(path, &encode_data(data)?)
}

pub fn read_data(path: &Path, pitch: f64) -> Result<TrtDataSet> {
    decode_data(&read_all(path)?, pitch)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SliceFormat {
    Pgm,
    Csv,
}

/// Plane `index` of `field` normal to `axis`, as rows over the second
/// in-plane coordinate and columns over the first (for `e3`: rows `x2`,
/// columns `x1`).
pub fn extract_slice(field: &ScalarField3, axis: CoordAxis, index: usize) -> Result<Vec<Vec<f64>>> {
    let n = field.grid.n();
    if index >= n {
        return Err(Error::invalid(format!("plane index {index} out of range for n = {n}")));
    }
    Ok((0..n)
        .map(|ib| {
            (0..n)
                .map(|ia| {
                    let g = slab_to_grid(axis, index, ia, ib);
                    field.data[[g[2], g[1], g[0]]]
                })
                .collect()
        })
        .collect())
}

/// 8-bit grey level of `v` in the window `[lo, hi]`: `255 (v - lo) / (hi - lo)`
/// clamped to `[0, 255]` and rounded half away from zero, so the window
/// centre maps to 128.
pub fn grey_level(v: f64, lo: f64, hi: f64) -> u8 {
    let t = (v - lo) / (hi - lo) * 255.0;
    if t.is_nan() {
        return 0;
    }
    t.clamp(0.0, 255.0).round() as u8
}

/// Encodes a slice as binary PGM (`P5`, maxval 255), first row at the top.
pub fn encode_pgm(rows: &[Vec<f64>], window: (f64, f64)) -> Result<Vec<u8>> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::invalid(format!("window [{lo}, {hi}] must satisfy min < max")));
    }
    let h = rows.len();
    let w = rows.first().map_or(0, Vec::len);
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    for row in rows {
        out.extend(row.iter().map(|&v| grey_level(v, lo, hi)));
    }
    Ok(out)
}

/// Encodes a slice as CSV, one line per row, values in shortest round-trip form.
pub fn encode_csv(rows: &[Vec<f64>]) -> Vec<u8> {
    let mut s = String::new();
    for row in rows {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            write!(s, "{v:?}").expect("string write");
        }
        s.push('\n');
    }
    s.into_bytes()
}

/// Window of a slice when none is given: its value range, widened by one on
/// each side when the slice is constant.
pub fn auto_window(rows: &[Vec<f64>]) -> (f64, f64) {
    let (lo, hi) = rows
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !(lo < hi) {
        let c = if lo.is_finite() { lo } else { 0.0 };
        (c - 1.0, c + 1.0)
    } else {
        (lo, hi)
    }
}

/// Writes plane `index` normal to `axis` as PGM or CSV.
pub fn export_slice(
    field: &ScalarField3,
    axis: CoordAxis,
    index: usize,
    format: SliceFormat,
    window: Option<(f64, f64)>,
    path: &Path,
) -> Result<()> {
    let rows = extract_slice(field, axis, index)?;
    let bytes = match format {
        SliceFormat::Pgm => encode_pgm(&rows, window.unwrap_or_else(|| auto_window(&rows)))?,
        SliceFormat::Csv => {
            if let Some((lo, hi)) = window {
                if lo >= hi {
                    return Err(Error::invalid(format!("window [{lo}, {hi}] must satisfy min < max")));
                }
            }
            encode_csv(&rows)
        }
    };
    write_atomic(path, &bytes)
}
