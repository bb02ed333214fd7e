//! Inversion pipelines.
//!
//! * Diagonals `f_ii` by plane-wise scalar filtered back-projection of the
//!   axial component measured about `e_i`.
//! * Off-diagonals from `λ_i = <f̂ e_i, Π_i y>`, assembled from `J¹`, by a
//!   per-frequency solve.
//! * Alternative diagonals from `λ` and `μ_i`, assembled from `J²`.
//! * Potential fields from two axes by integrating the displacement.
//!
//! `λ` and `μ` are computed on a zero-padded grid so that the slowly decaying
//! back-projections are not truncated at the faces of the object grid.

pub mod solvers;

use ndarray::Array3;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::backprojection::{backproject_axis, backproject_axis_with, BackprojectionKind, PlaneBackprojector};
use crate::calculus::{cumulative_integral, derivative, remove_end_drift};
use crate::error::{Error, Result};
use crate::geometry::{component_index, CoordAxis, ScalarField3, SymTensorField3, VectorField3, VoxelGrid3};
use crate::metrics::DEFAULT_BAND;
use crate::projector::{DetectorGeometry, TrtDataSet, AXIAL, J1, J2};
use crate::spectral::{
    cubic_ramp_filter_sinogram, dft3, hamming_derivative_sinogram, hamming_response, idft3, idft3_with_residue, ramp_filter_sinogram,
    transverse_frequency, SpectralField,
};
use solvers::C3;

/// Treatment of frequencies on the coordinate planes, where the closed-form
/// solves divide by zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PlaneFill {
    /// Minimum-norm least squares of the rank-deficient system; the origin is
    /// the mean of its six neighbours.
    LeastSquares,
    /// Interpolation across the plane from the solved neighbours (planes,
    /// then axis lines, then the origin).
    Interpolate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReconstructionOptions {
    /// Voxels of zero padding on each side for the spectral stages; `None`
    /// pads by three quarters of the grid size.
    pub pad: Option<usize>,
    pub plane_fill: PlaneFill,
    /// Replace the per-axis derivative windows in `λ` (and scale `μ`) by
    /// their common minimum, so that all equations see the same filter.
    pub harmonize_windows: bool,
    /// Half-angle parameter of the cones around `y_i = 0` that are
    /// interpolated in the alternative diagonal recovery.
    pub diagonal_cone: f64,
}

pub const DEFAULT_DIAGONAL_CONE: f64 = 0.12;

impl Default for ReconstructionOptions {
    fn default() -> Self {
        ReconstructionOptions {
            pad: None,
            plane_fill: PlaneFill::Interpolate,
            harmonize_windows: true,
            diagonal_cone: DEFAULT_DIAGONAL_CONE,
        }
    }
}

impl ReconstructionOptions {
    fn padded_grid(&self, grid: VoxelGrid3) -> VoxelGrid3 {
        grid.padded(self.pad.unwrap_or(3 * grid.n() / 4))
    }
}

/// Object grid implied by the detector: one voxel per detector row.
pub fn reconstruction_grid(data: &TrtDataSet) -> Result<VoxelGrid3> {
    let d = data.detector;
    VoxelGrid3::new(d.rows, 0.5 * d.rows as f64 * d.pitch)
}

fn require_axes(data: &TrtDataSet, axes: &[CoordAxis]) -> Result<()> {
    for &a in axes {
        data.axis_slot(a)?;
    }
    Ok(())
}

/// `f_ii` for each listed axis by ramp filtering and back-projecting the
/// axial component, `f = ½ B(|k| φ)`.
pub fn recover_diagonals_for(data: &TrtDataSet, axes: &[CoordAxis]) -> Result<Vec<ScalarField3>> {
    require_axes(data, axes)?;
    let grid = reconstruction_grid(data)?;
    let bp = PlaneBackprojector::new(grid, data.detector, data.n_angles, BackprojectionKind::Linear);
    axes.iter()
        .map(|&axis| {
            let mut sino = data.component(axis, AXIAL)?.to_owned();
            ramp_filter_sinogram(&mut sino, data.detector.pitch);
            let mut f = backproject_axis_with(&bp, sino.view(), axis)?;
            f.data.mapv_inplace(|v| 0.5 * v);
            Ok(f)
        })
        .collect()
}

/// `(f11, f22, f33)` by plane-wise filtered back-projection.
pub fn recover_diagonals_fbp(data: &TrtDataSet) -> Result<[ScalarField3; 3]> {
    let v = recover_diagonals_for(data, &CoordAxis::ALL)?;
    Ok(v.try_into().expect("three axes"))
}

/// Zero-extends detector rows so that they cover every in-plane point of
/// `grid`; the filters' tails beyond the physical detector are then kept.
fn widen_rows(sino: Array3<f64>, det: DetectorGeometry, grid: VoxelGrid3) -> (Array3<f64>, DetectorGeometry) {
    let reach = (std::f64::consts::SQRT_2 * grid.n() as f64 * grid.voxel_size() / det.pitch).ceil() as usize + 2;
    if reach <= det.cols {
        return (sino, det);
    }
    let extra = (reach - det.cols).div_ceil(2);
    let (na, nr, nc) = sino.dim();
    let mut out = Array3::zeros((na, nr, nc + 2 * extra));
    out.slice_mut(ndarray::s![.., .., extra..extra + nc]).assign(&sino);
    let det = DetectorGeometry {
        cols: nc + 2 * extra,
        ..det
    };
    (out, det)
}

/// `λ_i = -(i/2) |Π_i y| F[B(∂_p J¹)]` on `grid`, with the windowed
/// derivative.
///
/// The multiplier `|Π_i y|` is applied as a ramp filter on the detector rows
/// before back-projection, which is the same operator in each plane but
/// avoids transforming the slowly decaying back-projection itself.
pub fn assemble_lambda(data: &TrtDataSet, axis: CoordAxis, grid: VoxelGrid3) -> Result<SpectralField> {
    let mut j1 = data.component(axis, J1)?.to_owned();
    hamming_derivative_sinogram(&mut j1, data.detector.pitch)?;
    let (mut j1, det) = widen_rows(j1, data.detector, grid);
    ramp_filter_sinogram(&mut j1, det.pitch);
    let b = backproject_axis(j1.view(), axis, grid, det)?;
    let mut s = dft3(&b);
    s.scale(Complex64::new(0.0, -0.5));
    Ok(s)
}

/// `μ_i = ½ |Π_i y|³ F[B J²]` on `grid`, with `|Π_i y|³` applied to the
/// detector rows.
pub fn assemble_mu(data: &TrtDataSet, axis: CoordAxis, grid: VoxelGrid3) -> Result<SpectralField> {
    let (mut j2, det) = widen_rows(data.component(axis, J2)?.to_owned(), data.detector, grid);
    cubic_ramp_filter_sinogram(&mut j2, det.pitch);
    let b = backproject_axis(j2.view(), axis, grid, det)?;
    let mut s = dft3(&b);
    s.scale(Complex64::new(0.5, 0.0));
    Ok(s)
}

/// `(λ1, λ2, λ3)` on a common lattice.
#[derive(Clone, Debug)]
pub struct LambdaTriple {
    pub lambda: [SpectralField; 3],
}

/// `(μ1, μ2, μ3)` on a common lattice.
#[derive(Clone, Debug)]
pub struct MuTriple {
    pub mu: [SpectralField; 3],
}

fn window_gain(data: &TrtDataSet, y: [f64; 3], axis: CoordAxis) -> f64 {
    hamming_response(transverse_frequency(y, axis), data.detector.cols, data.detector.pitch)
}

/// Common window over the three axes at `y`.
fn common_window(data: &TrtDataSet, y: [f64; 3]) -> f64 {
    CoordAxis::ALL
        .iter()
        .map(|&a| window_gain(data, y, a))
        .fold(f64::INFINITY, f64::min)
}

pub fn lambda_triple(data: &TrtDataSet, grid: VoxelGrid3, opts: &ReconstructionOptions) -> Result<LambdaTriple> {
    let mut lambda = Vec::with_capacity(3);
    for axis in CoordAxis::ALL {
        let mut l = assemble_lambda(data, axis, grid)?;
        if opts.harmonize_windows {
            l.map_with_frequency(|y, v| v * (common_window(data, y) / window_gain(data, y, axis)));
        }
        lambda.push(l);
    }
    Ok(LambdaTriple {
        lambda: lambda.try_into().expect("three axes"),
    })
}

pub fn mu_triple(data: &TrtDataSet, grid: VoxelGrid3, opts: &ReconstructionOptions) -> Result<MuTriple> {
    let mut mu = Vec::with_capacity(3);
    for axis in CoordAxis::ALL {
        let mut m = assemble_mu(data, axis, grid)?;
        if opts.harmonize_windows {
            m.map_with_frequency(|y, v| v * common_window(data, y));
        }
        mu.push(m);
    }
    Ok(MuTriple {
        mu: mu.try_into().expect("three axes"),
    })
}

/// Applies a per-frequency map to three fields on a common lattice.
fn map3(inputs: [&SpectralField; 3], f: impl Fn([f64; 3], C3) -> C3 + Sync) -> Result<[SpectralField; 3]> {
    let grid = inputs[0].grid;
    if inputs.iter().any(|s| s.grid != grid) {
        return Err(Error::mismatch("spectral fields live on different grids"));
    }
    map_n(grid, |y, k| f(y, inputs.map(|s| s.data[k])))
}

fn map_n(grid: VoxelGrid3, f: impl Fn([f64; 3], [usize; 3]) -> C3 + Sync) -> Result<[SpectralField; 3]> {
    let n = grid.n();
    let proto = SpectralField::zeros(grid);
    let values: Vec<C3> = (0..n * n * n)
        .into_par_iter()
        .map(|idx| {
            let (k3, k2, k1) = (idx / (n * n), (idx / n) % n, idx % n);
            f(proto.frequency([k1, k2, k3]), [k3, k2, k1])
        })
        .collect();
    let mut out = [proto.clone(), proto.clone(), proto];
    for (c, o) in out.iter_mut().enumerate() {
        o.data = Array3::from_shape_vec((n, n, n), values.iter().map(|v| v[c]).collect()).expect("n^3");
    }
    Ok(out)
}

/// Four-point interpolation weights at offset 0 from offsets -2, -1, 1, 2.
const STENCIL: [(isize, f64); 4] = [(-2, -1.0 / 6.0), (-1, 2.0 / 3.0), (1, 2.0 / 3.0), (2, -1.0 / 6.0)];

/// Fills the bins with some `y_d = 0` by interpolating along a zero axis.
///
/// Spectra of fields centred in the grid oscillate as `exp(i y_d c)` along
/// each axis, `c` the offset of the grid centre from voxel 0; that factor is
/// removed before interpolating.
pub fn fill_singular_by_interpolation(s: &mut SpectralField) {
    let n = s.grid.n();
    if n < 5 {
        return;
    }
    let h = s.grid.voxel_size();
    let c = 0.5 * (n as f64 - 1.0) * h;
    let wrap = |k: isize| ((k % n as isize + n as isize) % n as isize) as usize;
    let y_of = |k: usize| crate::spectral::bin_frequency(k, n, h);
    // pass 1: one zero coordinate, pass 2: two, pass 3: the origin
    for zeros in 1..=3usize {
        let snapshot = s.data.clone();
        s.data.indexed_iter_mut().for_each(|((k3, k2, k1), v)| {
            let k = [k1, k2, k3];
            let zero_axes: Vec<usize> = (0..3).filter(|&d| k[d] == 0).collect();
            if zero_axes.len() != zeros {
                return;
            }
            let d = zero_axes[0];
            let mut acc = Complex64::new(0.0, 0.0);
            for &(off, w) in &STENCIL {
                let mut q = k;
                q[d] = wrap(off);
                let phase = Complex64::from_polar(1.0, y_of(q[d]) * c);
                acc += w * snapshot[[q[2], q[1], q[0]]] * phase;
            }
            *v = acc;
        });
    }
}

/// Replaces the bins with `|y_d| < κ |y|` by interpolation along `y_d` from
/// the two nearest retained bins on either side of the cone.
pub fn fill_cone(s: &mut SpectralField, d: usize, kappa: f64) {
    let n = s.grid.n();
    if n < 6 {
        return;
    }
    let h = s.grid.voxel_size();
    let c = 0.5 * (n as f64 - 1.0) * h;
    let dy = 2.0 * PI / (n as f64 * h);
    let slope = kappa / (1.0 - kappa * kappa).sqrt();
    let half = (n as isize - 1) / 2;
    let ax = ndarray::Axis(2 - d);
    let (o1, o2) = ((d + 1) % 3, (d + 2) % 3);
    s.data.lanes_mut(ax).into_iter().enumerate().for_each(|(line, mut lane)| {
        // recover the transverse frequency of this lane
        let (a, b) = (line / n, line % n);
        let (ka, kb) = if 2 - o1 < 2 - o2 { (a, b) } else { (b, a) };
        let rho = crate::spectral::bin_frequency(ka, n, h).hypot(crate::spectral::bin_frequency(kb, n, h));
        let kt = ((slope * rho / dy).ceil() as isize).max(1);
        if kt + 1 > half {
            return;
        }
        let at = |k: isize| ((k + n as isize) % n as isize) as usize;
        let pts: Vec<(f64, Complex64)> = [-kt - 1, -kt, kt, kt + 1]
            .iter()
            .map(|&k| {
                let y = k as f64 * dy;
                (y, lane[at(k)] * Complex64::from_polar(1.0, y * c))
            })
            .collect();
        for k in (1 - kt)..kt {
            let y = k as f64 * dy;
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &(yi, vi)) in pts.iter().enumerate() {
                let mut w = 1.0;
                for (j, &(yj, _)) in pts.iter().enumerate() {
                    if i != j {
                        w *= (y - yj) / (yi - yj);
                    }
                }
                acc += w * vi;
            }
            lane[at(k)] = acc * Complex64::from_polar(1.0, -y * c);
        }
    });
}

/// Mean of the six lattice neighbours of the origin.
fn fill_origin_by_neighbours(s: &mut SpectralField) {
    let n = s.grid.n();
    if n < 2 {
        return;
    }
    let d = &s.data;
    let sum = d[[0, 0, 1]] + d[[0, 0, n - 1]] + d[[0, 1, 0]] + d[[0, n - 1, 0]] + d[[1, 0, 0]] + d[[n - 1, 0, 0]];
    s.data[[0, 0, 0]] = sum / 6.0;
}

fn finish_singular(fields: &mut [SpectralField; 3], fill: PlaneFill) {
    for f in fields.iter_mut() {
        match fill {
            PlaneFill::LeastSquares => fill_origin_by_neighbours(f),
            PlaneFill::Interpolate => fill_singular_by_interpolation(f),
        }
    }
}

/// `(f̂12, f̂13, f̂23)` from `λ`.
pub fn solve_offdiagonals(l: &LambdaTriple, fill: PlaneFill) -> Result<[SpectralField; 3]> {
    let [a, b, c] = &l.lambda;
    let mut out = map3([a, b, c], solvers::offdiagonals_at)?;
    finish_singular(&mut out, fill);

    Ok(out)
}

/// `(f̂11, f̂22, f̂33)` from `λ` and `μ`.
///
/// `f̂_ii` carries the factor `y_i²`, so it is poorly determined close to the
/// plane `y_i = 0`; bins with `|y_i| < cone |y|` are interpolated across
/// (see [`fill_cone`]). `cone = 0` keeps the pointwise solution everywhere.
pub fn recover_diagonals_alternative(
    l: &LambdaTriple,
    m: &MuTriple,
    fill: PlaneFill,
    cone: f64,
) -> Result<[SpectralField; 3]> {
    if !(0.0..1.0).contains(&cone) {
        return Err(Error::invalid(format!("cone must lie in [0, 1), got {cone}")));
    }
    let grid = l.lambda[0].grid;
    if l.lambda.iter().chain(m.mu.iter()).any(|s| s.grid != grid) {
        return Err(Error::mismatch("λ and μ live on different grids"));
    }
    let mut out = map_n(grid, |y, k| {
        solvers::diagonals_at(y, l.lambda.each_ref().map(|s| s.data[k]), m.mu.each_ref().map(|s| s.data[k]))
    })?;
    finish_singular(&mut out, fill);
    if cone > 0.0 {
        for (d, f) in out.iter_mut().enumerate() {
            fill_cone(f, d, cone);
        }
    }
    Ok(out)
}

fn to_spatial(spec: &SpectralField, grid: VoxelGrid3) -> Result<(ScalarField3, f64)> {
    let (f, residue) = idft3_with_residue(spec);
    Ok((f.crop_center(grid)?, residue))
}

/// Diagnostics of a reconstruction.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ReconstructionReport {
    /// Largest imaginary part left by the final inverse DFTs, relative to the
    /// largest real value.
    pub imaginary_residue: f64,
    pub warnings: Vec<String>,
}

/// Full tensor from three-axis data.
pub fn reconstruct_three_axis(
    data: &TrtDataSet,
    opts: &ReconstructionOptions,
) -> Result<(SymTensorField3, ReconstructionReport)> {
    require_axes(data, &CoordAxis::ALL)?;
    let grid = reconstruction_grid(data)?;
    let diag = recover_diagonals_fbp(data)?;
    let padded = opts.padded_grid(grid);
    let lambda = lambda_triple(data, padded, opts)?;
    let off = solve_offdiagonals(&lambda, opts.plane_fill)?;
    drop(lambda);
    let mut f = SymTensorField3::zeros(grid);
    for (i, d) in diag.iter().enumerate() {
        f.set_component(component_index(i, i), d);
    }
    let mut residue = 0.0f64;
    let mut scale = 0.0f64;
    for (spec, (i, j)) in off.iter().zip([(0, 1), (0, 2), (1, 2)]) {
        let (c, r) = to_spatial(spec, grid)?;
        residue = residue.max(r);
        scale = scale.max(c.data.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        f.set_component(component_index(i, j), &c);
    }
    let report = ReconstructionReport {
        imaginary_residue: if scale > 0.0 { residue / scale } else { 0.0 },
        warnings: Vec::new(),
    };
    Ok((f, report))
}

/// Diagonals from `λ` and `μ` on the object grid.
pub fn alternative_diagonals(data: &TrtDataSet, opts: &ReconstructionOptions) -> Result<[ScalarField3; 3]> {
    require_axes(data, &CoordAxis::ALL)?;
    let grid = reconstruction_grid(data)?;
    let padded = opts.padded_grid(grid);
    let lambda = lambda_triple(data, padded, opts)?;
    let mu = mu_triple(data, padded, opts)?;
    let diag = recover_diagonals_alternative(&lambda, &mu, opts.plane_fill, opts.diagonal_cone)?;
    let mut out = Vec::with_capacity(3);
    for s in &diag {
        out.push(to_spatial(s, grid)?.0);
    }
    Ok(out.try_into().expect("three"))
}

/// Displacement and strain from rotations about `e1` and `e2`.
#[derive(Clone, Debug)]
pub struct PotentialReconstruction {
    pub u: VectorField3,
    pub f: SymTensorField3,
    pub report: ReconstructionReport,
}

fn add(a: &ScalarField3, b: &ScalarField3) -> ScalarField3 {
    ScalarField3 {
        grid: a.grid,
        data: &a.data + &b.data,
    }
}

fn scaled(a: &ScalarField3, s: f64) -> ScalarField3 {
    ScalarField3 {
        grid: a.grid,
        data: a.data.mapv(|v| v * s),
    }
}

fn max_abs(a: &ScalarField3) -> f64 {
    a.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Largest value on the high face normal to `x_k`, relative to the field maximum.
fn high_face_level(a: &ScalarField3, k: usize) -> f64 {
    let n = a.grid.n();
    let face = a.data.index_axis(ndarray::Axis(2 - k), n - 1);
    let m = max_abs(a);
    if m == 0.0 {
        0.0
    } else {
        face.iter().fold(0.0f64, |acc, v| acc.max(v.abs())) / m
    }
}

/// Drift above this fraction of the field maximum is reported.
const DRIFT_WARNING_LEVEL: f64 = 0.1;

/// Integrates along `x_k` from the low face and removes the linear drift that
/// would leave a nonzero value at the high face.
fn integrate_to_zero(g: &ScalarField3, k: usize, name: &str, warnings: &mut Vec<String>) -> ScalarField3 {
    let mut u = cumulative_integral(g, k);
    let level = high_face_level(&u, k);
    if level > DRIFT_WARNING_LEVEL {
        warnings.push(format!(
            "{name} does not decay towards the high x{} face ({:.1}% of its maximum before drift removal)",
            k + 1,
            100.0 * level
        ));
    }
    remove_end_drift(&mut u, k);
    u
}

/// Reconstructs a potential field `f_ij = ∂u_i/∂x_j + ∂u_j/∂x_i` from the
/// axial and `J¹` data about `e1` and `e2`.
///
/// `u1`, `u2` integrate `f11 / 2`, `f22 / 2` from the low faces. Then
/// `y3 f̂13 = λ1 - y2 f̂12` gives `∂f13/∂x3`, which is integrated along `x3`;
/// `∂u3/∂x1 = f13 - ∂u1/∂x3` is integrated along `x1`. Every integral is
/// forced to vanish at the high face by removing a linear drift; drifts
/// larger than 10% of the result are reported. Other axes in `data` are
/// ignored with a warning.
pub fn reconstruct_two_axis_potential(
    data: &TrtDataSet,
    opts: &ReconstructionOptions,
) -> Result<PotentialReconstruction> {
    let axes = [CoordAxis::E1, CoordAxis::E2];
    require_axes(data, &axes)?;
    let mut warnings = Vec::new();
    let data = if data.axes.len() > 2 {
        warnings.push("using only the e1 and e2 rotation axes of the data set".to_string());
        data.restrict(&axes)?
    } else {
        data.clone()
    };
    let grid = reconstruction_grid(&data)?;
    let diag = recover_diagonals_for(&data, &axes)?;
    let (f11, f22) = (&diag[0], &diag[1]);
    let u1 = integrate_to_zero(&scaled(f11, 0.5), 0, "u1", &mut warnings);
    let u2 = integrate_to_zero(&scaled(f22, 0.5), 1, "u2", &mut warnings);
    let f12 = add(&derivative(&u1, 1), &derivative(&u2, 0));

    let padded = opts.padded_grid(grid);
    let mut d3f13 = assemble_lambda(&data, CoordAxis::E1, padded)?;
    let f12_hat = dft3(&f12.pad_to(padded)?);
    let (n, h) = (padded.n(), padded.voxel_size());
    let (cols, pitch) = (data.detector.cols, data.detector.pitch);
    let y = |k: usize| crate::spectral::bin_frequency(k, n, h);
    d3f13
        .data
        .indexed_iter_mut()
        .zip(f12_hat.data.iter())
        .for_each(|(((k3, k2, _), l), f)| {
            // λ1 carries the derivative window, so f̂12 gets it too
            let w = hamming_response(y(k2).hypot(y(k3)), cols, pitch);
            *l = Complex64::new(0.0, 1.0) * (*l - w * y(k2) * f);
        });
    let (d3f13, residue) = to_spatial(&d3f13, grid)?;
    let f13 = integrate_to_zero(&d3f13, 2, "f13", &mut warnings);
    let du3_dx1 = add(&f13, &scaled(&derivative(&u1, 2), -1.0));
    let u3 = integrate_to_zero(&du3_dx1, 0, "u3", &mut warnings);
    let f33 = scaled(&derivative(&u3, 2), 2.0);
    let f23 = add(&derivative(&u2, 2), &derivative(&u3, 1));

    let mut f = SymTensorField3::zeros(grid);
    for (c, comp) in [
        (component_index(0, 0), f11),
        (component_index(0, 1), &f12),
        (component_index(0, 2), &f13),
        (component_index(1, 1), f22),
        (component_index(1, 2), &f23),
        (component_index(2, 2), &f33),
    ] {
        f.set_component(c, comp);
    }
    let mut u = VectorField3::zeros(grid);
    u.set_component(0, &u1);
    u.set_component(1, &u2);
    u.set_component(2, &u3);
    let scale = max_abs(&d3f13);
    Ok(PotentialReconstruction {
        u,
        f,
        report: ReconstructionReport {
            imaginary_residue: if scale > 0.0 { residue / scale } else { 0.0 },
            warnings,
        },
    })
}

/// Agreement between two sets of diagonals.
#[derive(Clone, Debug, Serialize)]
pub struct ConsistencyReport {
    /// `‖P(a - b)‖ / max(‖Pa‖, ‖Pb‖)` per diagonal, `P` the band limit.
    pub per_component: [f64; 3],
    pub aggregate: f64,
}

/// Band-limited discrepancy between FBP diagonals and alternative diagonals.
pub fn consistency_residual(a: &[ScalarField3; 3], b: &[ScalarField3; 3]) -> Result<ConsistencyReport> {
    let mut per_component = [0.0; 3];
    let (mut num, mut den_a, mut den_b) = (0.0, 0.0, 0.0);
    for i in 0..3 {
        if a[i].grid != b[i].grid {
            return Err(Error::mismatch("diagonals live on different grids"));
        }
        let (sa, sb) = (dft3(&a[i]), dft3(&b[i]));
        let cut = DEFAULT_BAND * sa.nyquist();
        let (mut n_i, mut a_i, mut b_i) = (0.0, 0.0, 0.0);
        for ((k3, k2, k1), va) in sa.data.indexed_iter() {
            let y = sa.frequency([k1, k2, k3]);
            if (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt() <= cut {
                let vb = sb.data[[k3, k2, k1]];
                n_i += (va - vb).norm_sqr();
                a_i += va.norm_sqr();
                b_i += vb.norm_sqr();
            }
        }
        per_component[i] = rel(n_i, a_i.max(b_i));
        num += n_i;
        den_a += a_i;
        den_b += b_i;
    }
    Ok(ConsistencyReport {
        per_component,
        aggregate: rel(num, f64::max(den_a, den_b)),
    })
}

fn rel(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

/// Real part of the inverse DFT, cropped to `grid`.
pub fn spectral_to_field(spec: &SpectralField, grid: VoxelGrid3) -> Result<ScalarField3> {
    Ok(idft3(spec).crop_center(grid)?)
}
