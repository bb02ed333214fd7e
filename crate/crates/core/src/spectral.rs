//! Discrete Fourier machinery.
//!
//! All 3D transforms are unitary. Bin `k` of an axis with `n` samples of
//! spacing `h` carries angular frequency `2π k̃ / (n h)`, `k̃` being the signed
//! alias of `k` in `[-n/2, n/2)`. Since all filters here are Fourier
//! multipliers, the position of the grid origin only contributes a phase that
//! cancels between the forward and inverse transforms.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::{Array3, ArrayViewMut1, Axis};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::geometry::{CoordAxis, ScalarField3, VoxelGrid3};

/// Signed alias of bin `k` out of `n`.
pub fn signed_bin(k: usize, n: usize) -> isize {
    if k < n.div_ceil(2) {
        k as isize
    } else {
        k as isize - n as isize
    }
}

/// Angular frequency of bin `k` for `n` samples spaced `h`.
pub fn bin_frequency(k: usize, n: usize, h: f64) -> f64 {
    2.0 * PI * signed_bin(k, n) as f64 / (n as f64 * h)
}

/// Complex values on the 3D frequency lattice of a grid, indexed `[k3][k2][k1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    pub grid: VoxelGrid3,
    pub data: Array3<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: VoxelGrid3) -> Self {
        let n = grid.n();
        SpectralField {
            grid,
            data: Array3::zeros((n, n, n)),
        }
    }

    /// Angular frequency vector `(y1, y2, y3)` of bin `[k1, k2, k3]`.
    pub fn frequency(&self, k: [usize; 3]) -> [f64; 3] {
        let (n, h) = (self.grid.n(), self.grid.voxel_size());
        [
            bin_frequency(k[0], n, h),
            bin_frequency(k[1], n, h),
            bin_frequency(k[2], n, h),
        ]
    }

    /// Largest representable angular frequency, `π / h`.
    pub fn nyquist(&self) -> f64 {
        PI / self.grid.voxel_size()
    }

    pub fn get(&self, k: [usize; 3]) -> Complex64 {
        self.data[[k[2], k[1], k[0]]]
    }

    /// Applies `f(y, value)` at every bin in parallel.
    pub fn map_with_frequency(&mut self, f: impl Fn([f64; 3], Complex64) -> Complex64 + Sync) {
        let n = self.grid.n();
        let h = self.grid.voxel_size();
        let freqs: Vec<f64> = (0..n).map(|k| bin_frequency(k, n, h)).collect();
        self.data
            .axis_iter_mut(Axis(0))
            .into_par_iter()
            .enumerate()
            .for_each(|(k3, mut plane)| {
                for ((k2, k1), v) in plane.indexed_iter_mut() {
                    *v = f([freqs[k1], freqs[k2], freqs[k3]], *v);
                }
            });
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest `|F(k) - conj(F(-k))|`; zero for the transform of a real field.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n();
        let neg = |k: usize| (n - k) % n;
        self.data
            .indexed_iter()
            .map(|((k3, k2, k1), v)| (v - self.data[[neg(k3), neg(k2), neg(k1)]].conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&mut self, s: Complex64) {
        self.data.par_mapv_inplace(|v| v * s);
    }

    pub fn add_assign(&mut self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::mismatch("spectral fields live on different grids"));
        }
        self.data += &other.data;
        Ok(())
    }
}

fn fft_lanes(data: &mut Array3<Complex64>, axis: usize, fft: &Arc<dyn Fft<f64>>) {
    let n = data.len_of(Axis(axis));
    let run = |mut lane: ArrayViewMut1<Complex64>| {
        let mut buf: Vec<Complex64> = lane.iter().copied().collect();
        fft.process(&mut buf);
        for (d, s) in lane.iter_mut().zip(buf) {
            *d = s;
        }
    };
    if axis == 0 {
        // lanes along the slowest axis: parallelise over the fastest index
        data.axis_iter_mut(Axis(2))
            .into_par_iter()
            .for_each(|mut sheet| sheet.lanes_mut(Axis(0)).into_iter().for_each(run));
    } else {
        data.axis_iter_mut(Axis(0))
            .into_par_iter()
            .for_each(|mut sheet| sheet.lanes_mut(Axis(axis - 1)).into_iter().for_each(run));
    }
    debug_assert_eq!(n, fft.len());
}

fn transform3(data: &mut Array3<Complex64>, inverse: bool) {
    let n = data.len_of(Axis(0));
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    for axis in 0..3 {
        fft_lanes(data, axis, &fft);
    }
    let s = 1.0 / (n as f64).powf(1.5);
    data.par_mapv_inplace(|v| v * s);
}

/// Unitary forward 3D DFT of a scalar field.
pub fn dft3(field: &ScalarField3) -> SpectralField {
    let mut data = field.data.mapv(|v| Complex64::new(v, 0.0));
    transform3(&mut data, false);
    SpectralField {
        grid: field.grid,
        data,
    }
}

/// Unitary inverse 3D DFT; returns the real part and the largest `|imag|`.
pub fn idft3_with_residue(spec: &SpectralField) -> (ScalarField3, f64) {
    let mut data = spec.data.clone();
    transform3(&mut data, true);
    let residue = data.iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
    (
        ScalarField3 {
            grid: spec.grid,
            data: data.mapv(|v| v.re),
        },
        residue,
    )
}

/// Unitary inverse 3D DFT, real part.
pub fn idft3(spec: &SpectralField) -> ScalarField3 {
    idft3_with_residue(spec).0
}

/// `|Π_η y|`, the length of the frequency component orthogonal to `η`.
pub fn transverse_frequency(y: [f64; 3], axis: CoordAxis) -> f64 {
    let (a, b) = axis.in_plane();
    (y[a] * y[a] + y[b] * y[b]).sqrt()
}

/// Multiplies every bin by `|Π_η y|^power`, `power ∈ {1, 3}`.
pub fn ramp_multiplier(spec: &SpectralField, axis: CoordAxis, power: u32) -> Result<SpectralField> {
    if power != 1 && power != 3 {
        return Err(Error::invalid(format!("ramp power must be 1 or 3, got {power}")));
    }
    let mut out = spec.clone();
    out.map_with_frequency(|y, v| {
        let r = transverse_frequency(y, axis);
        v * r.powi(power as i32)
    });
    Ok(out)
}

/// Band-limited Ram-Lak kernel sampled at offset `j` for spacing `dp`.
///
/// This is the impulse response of `|ν|` (cycles per unit length) cut off at
/// `1 / (2 dp)`.
pub fn ram_lak_kernel(j: isize, dp: f64) -> f64 {
    if j == 0 {
        1.0 / (4.0 * dp * dp)
    } else if j % 2 == 0 {
        0.0
    } else {
        let jf = j as f64;
        -1.0 / (PI * PI * jf * jf * dp * dp)
    }
}

/// Impulse response of `|k|³` (angular frequency) cut off at `π / dp`,
/// sampled at offset `j`.
pub fn cubic_ramp_kernel(j: isize, dp: f64) -> f64 {
    let cut = PI / dp;
    if j == 0 {
        return cut.powi(4) / (4.0 * PI);
    }
    let x = j as f64 * dp;
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    (3.0 * cut * cut * sign / (x * x) + 6.0 * (1.0 - sign) / x.powi(4)) / PI
}

/// Ramp filter with Fourier multiplier `|k|` applied along the last axis.
///
/// Rows are zero padded to twice their length, so the result equals the
/// linear convolution with the sampled Ram-Lak kernel.
pub struct RampFilter {
    len: usize,
    padded: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    response: Vec<f64>,
}

impl RampFilter {
    pub fn new(len: usize, dp: f64) -> Self {
        // ×2π converts |ν| to |k|
        Self::from_kernel(len, dp, |j| 2.0 * PI * ram_lak_kernel(j, dp))
    }

    /// Filter with multiplier `|k|³`.
    pub fn cubic(len: usize, dp: f64) -> Self {
        Self::from_kernel(len, dp, |j| cubic_ramp_kernel(j, dp))
    }

    fn from_kernel(len: usize, dp: f64, kernel: impl Fn(isize) -> f64) -> Self {
        let padded = 2 * len.max(1);
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(padded);
        let inv = planner.plan_fft_inverse(padded);
        let mut taps: Vec<Complex64> = (0..padded)
            .map(|k| Complex64::new(dp * kernel(signed_bin(k, padded)), 0.0))
            .collect();
        fwd.process(&mut taps);
        let response = taps.iter().map(|c| c.re / padded as f64).collect();
        RampFilter {
            len,
            padded,
            fwd,
            inv,
            response,
        }
    }

    pub fn apply(&self, row: &mut [f64]) {
        assert_eq!(row.len(), self.len);
        let mut buf = vec![Complex64::new(0.0, 0.0); self.padded];
        for (b, &v) in buf.iter_mut().zip(row.iter()) {
            b.re = v;
        }
        self.fwd.process(&mut buf);
        for (b, &r) in buf.iter_mut().zip(&self.response) {
            *b *= r;
        }
        self.inv.process(&mut buf);
        for (v, b) in row.iter_mut().zip(&buf) {
            *v = b.re;
        }
    }
}

/// Ramp-filters every row of an `(angle, row, col)` sinogram stack along `col`.
pub fn ramp_filter_sinogram(data: &mut Array3<f64>, dp: f64) {
    let filter = RampFilter::new(data.len_of(Axis(2)), dp);
    filter_rows(data, |row| filter.apply(row));
}

/// `|k|³`-filters every row of an `(angle, row, col)` stack along `col`.
pub fn cubic_ramp_filter_sinogram(data: &mut Array3<f64>, dp: f64) {
    let filter = RampFilter::cubic(data.len_of(Axis(2)), dp);
    filter_rows(data, |row| filter.apply(row));
}

fn filter_rows(data: &mut Array3<f64>, f: impl Fn(&mut [f64]) + Sync) {
    data.axis_iter_mut(Axis(0))
        .into_par_iter()
        .for_each(|mut sheet| {
            for mut lane in sheet.lanes_mut(Axis(1)) {
                match lane.as_slice_mut() {
                    Some(s) => f(s),
                    None => {
                        let mut v = lane.to_vec();
                        f(&mut v);
                        lane.assign(&ndarray::ArrayView1::from(&v));
                    }
                }
            }
        });
}

/// Hamming window `0.54 - 0.46 cos(2π n / (N - 1))` on `n = 0..N-1`.
///
/// Evaluated as `0.08 + 0.46 (1 - cos)` with the phase written as
/// `π · (2n / (N-1))`, so the end and centre values are exactly `0.08` and `1`.
pub fn hamming_window(n: usize, len: usize) -> f64 {
    hamming_at(n as f64, len)
}

fn hamming_at(n: f64, len: usize) -> f64 {
    if len < 2 {
        return 1.0;
    }
    let r = (2.0 * n) / (len as f64 - 1.0);
    0.08 + 0.46 * (1.0 - (PI * r).cos())
}

/// Window weight of the bin with signed index `k̃`: the window laid out in
/// frequency order so that its peak sits at zero frequency.
pub fn hamming_bin_weight(signed: isize, len: usize) -> f64 {
    hamming_at(signed as f64 + 0.5 * (len as f64 - 1.0), len)
}

/// Response of the windowed derivative's window at angular frequency `k`,
/// clamped to the edge value past the band limit.
pub fn hamming_response(k: f64, len: usize, dp: f64) -> f64 {
    let half = 0.5 * (len as f64 - 1.0);
    let s = (k * len as f64 * dp / (2.0 * PI)).abs().min(half);
    hamming_at(s + half, len)
}

/// Hamming-windowed derivative along the last axis.
///
/// Bin `k̃` is multiplied by `i k w`, `k = 2π k̃ / (N dp)`, which is the
/// derivative `d/dp` damped towards the band edge. The Nyquist bin of an
/// even-length signal has no real derivative and is dropped.
pub struct HammingDerivative {
    len: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    multiplier: Vec<Complex64>,
}

impl HammingDerivative {
    pub fn new(len: usize, dp: f64) -> Result<Self> {
        if len < 2 {
            return Err(Error::invalid("derivative needs at least two samples"));
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(len);
        let inv = planner.plan_fft_inverse(len);
        let multiplier = (0..len)
            .map(|k| {
                let s = signed_bin(k, len);
                if len % 2 == 0 && s == -(len as isize / 2) {
                    return Complex64::new(0.0, 0.0);
                }
                let kk = bin_frequency(k, len, dp);
                Complex64::new(0.0, kk * hamming_bin_weight(s, len) / len as f64)
            })
            .collect();
        Ok(HammingDerivative {
            len,
            fwd,
            inv,
            multiplier,
        })
    }

    pub fn apply(&self, row: &mut [f64]) {
        assert_eq!(row.len(), self.len);
        let mut buf: Vec<Complex64> = row.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fwd.process(&mut buf);
        for (b, m) in buf.iter_mut().zip(&self.multiplier) {
            *b *= m;
        }
        self.inv.process(&mut buf);
        for (v, b) in row.iter_mut().zip(&buf) {
            *v = b.re;
        }
    }
}

/// Windowed `d/dp` of a single signal.
pub fn hamming_derivative(signal: &[f64], dp: f64) -> Result<Vec<f64>> {
    let d = HammingDerivative::new(signal.len(), dp)?;
    let mut out = signal.to_vec();
    d.apply(&mut out);
    Ok(out)
}

/// Windowed `d/dp` of every row of an `(angle, row, col)` stack.
pub fn hamming_derivative_sinogram(data: &mut Array3<f64>, dp: f64) -> Result<()> {
    let d = HammingDerivative::new(data.len_of(Axis(2)), dp)?;
    filter_rows(data, |row| d.apply(row));
    Ok(())
}
