//! Discrete transverse ray transform.
//!
//! Rays are traced through the voxel grid with Siddon's method: the ray is
//! cut at every voxel boundary it crosses and each voxel receives the length
//! of its chord. A measurement is the chord-length weighted sum of a per-voxel
//! integrand, so the system matrix is generated one row at a time and never
//! stored.
//!
//! For a rotation axis `η` and ray direction `ξ ∈ η⊥` three values are
//! recorded per ray, in this order:
//!
//! * axial: `<η, f η>`
//! * `J¹`: `<f η, ζ>` with `ζ = ξ × η`
//! * `J²`: `<ζ, f ζ>`

use ndarray::{Array3, Array5, ArrayView3, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    adjugate2, component_index, dot, slice_field, zeta_from_xi, AxisFrame, CoordAxis, Ray,
    SymTensorField3, VoxelGrid3, DIRECTION_TOL,
};

/// Index of the axial component in the last data dimension.
pub const AXIAL: usize = 0;
/// Index of `J¹ = <Jf η, ξ×η>`.
pub const J1: usize = 1;
/// Index of `J² = <ζ, Jf ζ>`.
pub const J2: usize = 2;

/// Voxel indices and chord lengths along a ray, ordered by increasing `t`.
pub type Trace = Vec<(usize, f64)>;

/// Siddon traversal of a `D`-dimensional cubic grid.
///
/// `flat` maps per-dimension voxel indices to the caller's numbering.
fn siddon<const D: usize>(
    n: usize,
    extent: f64,
    origin: [f64; D],
    dir: [f64; D],
    flat: impl Fn([usize; D]) -> usize,
    out: &mut Trace,
) {
    out.clear();
    let h = 2.0 * extent / n as f64;
    let boundary = |k: usize| -extent + k as f64 * h;
    let mut tmin = f64::NEG_INFINITY;
    let mut tmax = f64::INFINITY;
    for d in 0..D {
        if dir[d] == 0.0 {
            if origin[d] < -extent || origin[d] >= extent {
                return;
            }
        } else {
            let t0 = (-extent - origin[d]) / dir[d];
            let t1 = (extent - origin[d]) / dir[d];
            tmin = tmin.max(t0.min(t1));
            tmax = tmax.min(t0.max(t1));
        }
    }
    if !(tmax > tmin) || !tmin.is_finite() || !tmax.is_finite() {
        return;
    }

    // interior crossing parameters per dimension, ascending
    let mut crossings: [Vec<f64>; D] = std::array::from_fn(|_| Vec::new());
    for d in 0..D {
        if dir[d] == 0.0 {
            continue;
        }
        let list = &mut crossings[d];
        list.reserve(n);
        let mut push = |k: usize| {
            let t = (boundary(k) - origin[d]) / dir[d];
            if t > tmin && t < tmax {
                list.push(t);
            }
        };
        if dir[d] > 0.0 {
            (1..n).for_each(&mut push);
        } else {
            (1..n).rev().for_each(&mut push);
        }
    }

    let voxel = |d: usize, t: f64| -> usize {
        let x = origin[d] + t * dir[d];
        let i = ((x + extent) / h).floor();
        if i < 0.0 {
            0
        } else {
            (i as usize).min(n - 1)
        }
    };

    let mut cursor = [0usize; D];
    let mut t_prev = tmin;
    loop {
        let mut next = tmax;
        let mut which = None;
        for d in 0..D {
            if let Some(&t) = crossings[d].get(cursor[d]) {
                if t < next {
                    next = t;
                    which = Some(d);
                }
            }
        }
        let len = next - t_prev;
        if len > 0.0 {
            let mid = 0.5 * (t_prev + next);
            let idx: [usize; D] = std::array::from_fn(|d| voxel(d, mid));
            out.push((flat(idx), len));
        }
        match which {
            Some(d) => {
                cursor[d] += 1;
                t_prev = next;
            }
            None => break,
        }
    }
}

/// Traces a ray through the grid; voxel indices use [`VoxelGrid3::flat`].
///
/// A ray that misses the grid yields an empty trace.
pub fn trace_ray(grid: &VoxelGrid3, ray: &Ray) -> Trace {
    let mut out = Vec::new();
    siddon::<3>(
        grid.n(),
        grid.extent(),
        ray.base(),
        ray.direction(),
        |i| grid.flat(i),
        &mut out,
    );
    out
}

/// Traces a ray lying in an axis-normal plane through the `n x n` slab grid.
///
/// Coordinates are in the in-plane basis `(a, b)`; voxel index is `ib * n + ia`.
pub fn trace_in_plane(n: usize, extent: f64, origin: [f64; 2], dir: [f64; 2], out: &mut Trace) {
    siddon::<2>(n, extent, origin, dir, |[ia, ib]| ib * n + ia, out);
}

/// `g_a u_a + g_b u_b`.
#[inline]
pub(crate) fn linear_form(g: [f64; 2], u: [f64; 2]) -> f64 {
    g[0] * u[0] + g[1] * u[1]
}

/// `<m u, u>` for the 2x2 block `m = (m_aa, m_ab, m_bb)`.
#[inline]
pub(crate) fn quadratic_form(m: [f64; 3], u: [f64; 2]) -> f64 {
    (m[0] * (u[0] * u[0]) + m[2] * (u[1] * u[1])) + (2.0 * m[1]) * (u[0] * u[1])
}

/// Slot offsets of the entries needed for one rotation axis.
#[derive(Clone, Copy)]
struct AxisSlots {
    axial: usize,
    a_eta: usize,
    b_eta: usize,
    aa: usize,
    ab: usize,
    bb: usize,
}

impl AxisSlots {
    fn new(axis: CoordAxis) -> Self {
        let e = axis.index();
        let (a, b) = axis.in_plane();
        AxisSlots {
            axial: component_index(e, e),
            a_eta: component_index(a, e),
            b_eta: component_index(b, e),
            aa: component_index(a, a),
            ab: component_index(a, b),
            bb: component_index(b, b),
        }
    }

    /// The three per-voxel integrands for in-plane `ζ`.
    #[inline]
    fn integrands(&self, t: &[f64], zeta: [f64; 2]) -> [f64; 3] {
        [
            t[self.axial],
            linear_form([t[self.a_eta], t[self.b_eta]], zeta),
            quadratic_form([t[self.aa], t[self.ab], t[self.bb]], zeta),
        ]
    }
}

/// `(axial, J¹, J²)` for a single ray with direction in `η⊥`.
pub fn forward_trt_ray(f: &SymTensorField3, frame: &AxisFrame, ray: &Ray) -> Result<[f64; 3]> {
    let eta = frame.eta();
    let xi = ray.direction();
    if dot(xi, eta).abs() > DIRECTION_TOL {
        return Err(Error::invalid(format!(
            "ray direction {xi:?} is not orthogonal to the rotation axis {}",
            frame.axis
        )));
    }
    let (a, b) = frame.axis.in_plane();
    let zeta = zeta_from_xi([xi[a], xi[b]]);
    let slots = AxisSlots::new(frame.axis);
    let data = f.as_slice();
    let mut acc = [0.0; 3];
    for (v, w) in trace_ray(&f.grid, ray) {
        let vals = slots.integrands(&data[6 * v..6 * v + 6], zeta);
        for k in 0..3 {
            acc[k] += w * vals[k];
        }
    }
    Ok(acc)
}

/// In-plane vector field on one axis-normal plane, components in the `(a, b)` basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarVectorSlab {
    pub axis: CoordAxis,
    pub grid: VoxelGrid3,
    pub s_index: usize,
    /// `[i_b][i_a][k]`, `k` indexing `(a, b)`.
    pub data: Array3<f64>,
}

/// In-plane symmetric tensor field, entries `(aa, ab, bb)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarTensorSlab {
    pub axis: CoordAxis,
    pub grid: VoxelGrid3,
    pub s_index: usize,
    /// `[i_b][i_a][k]`, `k` indexing `(aa, ab, bb)`.
    pub data: Array3<f64>,
}

/// The slab of `η × f η` on plane `s_index`, seen as a field on the plane.
pub fn eta_cross_f_eta_slab(
    f: &SymTensorField3,
    axis: CoordAxis,
    s_index: usize,
) -> Result<PlanarVectorSlab> {
    let slab = slice_field(f, axis, s_index)?;
    let n = f.grid.n();
    let slots = AxisSlots::new(axis);
    let mut data = Array3::zeros((n, n, 2));
    for ib in 0..n {
        for ia in 0..n {
            // η × (f_aη a + f_bη b) = -f_bη a + f_aη b
            data[[ib, ia, 0]] = -slab.data[[ib, ia, slots.b_eta]];
            data[[ib, ia, 1]] = slab.data[[ib, ia, slots.a_eta]];
        }
    }
    Ok(PlanarVectorSlab {
        axis,
        grid: f.grid,
        s_index,
        data,
    })
}

/// The slab of the two dimensional adjugate of `f` restricted to the plane.
pub fn adjugate_slab(
    f: &SymTensorField3,
    axis: CoordAxis,
    s_index: usize,
) -> Result<PlanarTensorSlab> {
    let n = f.grid.n();
    let (a, b) = axis.in_plane();
    let mut data = Array3::zeros((n, n, 3));
    let slab = slice_field(f, axis, s_index)?;
    for ib in 0..n {
        for ia in 0..n {
            let mut t = [0.0; 6];
            for (c, v) in t.iter_mut().enumerate() {
                *v = slab.data[[ib, ia, c]];
            }
            let adj = adjugate2(&crate::geometry::SymTensor3(t), axis);
            data[[ib, ia, 0]] = adj.get(a, a);
            data[[ib, ia, 1]] = adj.get(a, b);
            data[[ib, ia, 2]] = adj.get(b, b);
        }
    }
    Ok(PlanarTensorSlab {
        axis,
        grid: f.grid,
        s_index,
        data,
    })
}

fn in_plane_ray(
    axis: CoordAxis,
    grid: &VoxelGrid3,
    s_index: usize,
    ray: &Ray,
) -> Result<([f64; 2], [f64; 2])> {
    let e = axis.index();
    let (a, b) = axis.in_plane();
    let dir = ray.direction();
    let base = ray.base();
    let s = grid.center(s_index);
    if dir[e].abs() > DIRECTION_TOL || (base[e] - s).abs() > DIRECTION_TOL * s.abs().max(1.0) {
        return Err(Error::invalid(format!(
            "ray does not lie in the plane <x, {axis}> = {s}"
        )));
    }
    Ok(([base[a], base[b]], [dir[a], dir[b]]))
}

/// Planar longitudinal ray transform of a vector slab: `Σ w <g, ξ>`.
pub fn lrt_plane_vector(slab: &PlanarVectorSlab, ray: &Ray) -> Result<f64> {
    let (origin, dir) = in_plane_ray(slab.axis, &slab.grid, slab.s_index, ray)?;
    let n = slab.grid.n();
    let mut trace = Vec::new();
    trace_in_plane(n, slab.grid.extent(), origin, dir, &mut trace);
    let data = slab.data.as_slice().expect("standard layout");
    Ok(trace.iter().fold(0.0, |acc, &(v, w)| {
        acc + w * linear_form([data[2 * v], data[2 * v + 1]], dir)
    }))
}

/// Planar longitudinal ray transform of a tensor slab: `Σ w <g ξ, ξ>`.
pub fn lrt_plane_tensor(slab: &PlanarTensorSlab, ray: &Ray) -> Result<f64> {
    let (origin, dir) = in_plane_ray(slab.axis, &slab.grid, slab.s_index, ray)?;
    let n = slab.grid.n();
    let mut trace = Vec::new();
    trace_in_plane(n, slab.grid.extent(), origin, dir, &mut trace);
    let data = slab.data.as_slice().expect("standard layout");
    Ok(trace.iter().fold(0.0, |acc, &(v, w)| {
        acc + w * quadratic_form([data[3 * v], data[3 * v + 1], data[3 * v + 2]], dir)
    }))
}

/// Parallel-beam detector: `rows` along the rotation axis, `cols` along `ζ`.
///
/// The detector is centred on the rotation axis; pixel centres sit at
/// `(r - (rows-1)/2) * pitch` and `(c - (cols-1)/2) * pitch`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorGeometry {
    pub rows: usize,
    pub cols: usize,
    pub pitch: f64,
}

impl DetectorGeometry {
    pub fn row_offset(&self, r: usize) -> f64 {
        (r as f64 - 0.5 * (self.rows as f64 - 1.0)) * self.pitch
    }

    pub fn col_offset(&self, c: usize) -> f64 {
        (c as f64 - 0.5 * (self.cols as f64 - 1.0)) * self.pitch
    }

    /// Plane index of each detector row on `grid`, `None` outside the grid.
    ///
    /// Rows must coincide with voxel-centre planes.
    pub fn row_planes(&self, grid: &VoxelGrid3) -> Result<Vec<Option<usize>>> {
        let h = grid.voxel_size();
        if (self.pitch - h).abs() > 1e-9 * h {
            return Err(Error::mismatch(format!(
                "detector pitch {} differs from voxel size {h}",
                self.pitch
            )));
        }
        let n = grid.n();
        if (n + self.rows) % 2 != 0 {
            return Err(Error::mismatch(format!(
                "{} detector rows do not align with the planes of a {n}^3 grid",
                self.rows
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                let i = r as isize + (n as isize - self.rows as isize) / 2;
                (0..n as isize).contains(&i).then_some(i as usize)
            })
            .collect())
    }
}

/// Angle of projection `j` out of `n_angles`, uniform over `[0, 2π)`.
pub fn angle(j: usize, n_angles: usize) -> f64 {
    2.0 * std::f64::consts::PI * j as f64 / n_angles as f64
}

/// In-plane traces for every `(angle, column)` of one detector on `grid`.
///
/// The in-plane geometry is the same for every plane and every rotation axis.
pub(crate) fn angle_traces(
    grid: &VoxelGrid3,
    detector: &DetectorGeometry,
    theta: f64,
) -> Vec<Trace> {
    let frame = AxisFrame::new(CoordAxis::E3, theta);
    let xi = frame.xi_in_plane();
    let zeta = frame.zeta_in_plane();
    (0..detector.cols)
        .map(|c| {
            let p = detector.col_offset(c);
            let mut t = Vec::new();
            trace_in_plane(
                grid.n(),
                grid.extent(),
                [p * zeta[0], p * zeta[1]],
                xi,
                &mut t,
            );
            t
        })
        .collect()
}

/// Strides of the in-plane and axial directions of a flat grid index.
pub(crate) fn axis_strides(n: usize, axis: CoordAxis) -> (usize, usize, usize) {
    let stride = |d: usize| n.pow(d as u32);
    let (a, b) = axis.in_plane();
    (stride(a), stride(b), stride(axis.index()))
}

/// Converts an in-plane trace to grid offsets of the plane with index 0.
pub(crate) fn trace_offsets(trace: &Trace, n: usize, axis: CoordAxis) -> Vec<(usize, f64)> {
    let (sa, sb, _) = axis_strides(n, axis);
    trace
        .iter()
        .map(|&(v, w)| ((v % n) * sa + (v / n) * sb, w))
        .collect()
}

/// Acquisition settings.
#[derive(Clone, Debug, PartialEq)]
pub struct AcquisitionConfig {
    pub axes: Vec<CoordAxis>,
    pub n_angles: usize,
    pub detector_h: usize,
    pub detector_w: usize,
    pub bin_factor: usize,
    /// Noise standard deviation as a fraction of `max |data|`.
    pub noise_pct: f64,
    pub seed: u64,
}

impl AcquisitionConfig {
    /// Three axes, `n` detector rows and roughly 4:3 width for a grid of `n` voxels.
    pub fn for_grid(n: usize, n_angles: usize) -> Self {
        let (detector_h, detector_w) = default_detector(n, 1);
        AcquisitionConfig {
            axes: CoordAxis::ALL.to_vec(),
            n_angles,
            detector_h,
            detector_w,
            bin_factor: 1,
            noise_pct: 0.0,
            seed: 0,
        }
    }

    /// Re-derives the default detector width for a new bin factor.
    pub fn with_binning(mut self, n: usize, bin_factor: usize) -> Self {
        let (h, w) = default_detector(n, bin_factor);
        self.detector_h = h;
        self.detector_w = w;
        self.bin_factor = bin_factor;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(Error::invalid("at least one rotation axis is required"));
        }
        let mut seen = self.axes.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.axes.len() {
            return Err(Error::invalid("rotation axes must be distinct"));
        }
        if self.n_angles == 0 {
            return Err(Error::invalid("n_angles must be >= 1"));
        }
        if self.detector_h == 0 || self.detector_w == 0 {
            return Err(Error::invalid("detector dimensions must be >= 1"));
        }
        if self.bin_factor == 0
            || self.detector_h % self.bin_factor != 0
            || self.detector_w % self.bin_factor != 0
        {
            return Err(Error::invalid(format!(
                "bin factor {} must divide the detector size {}x{}",
                self.bin_factor, self.detector_h, self.detector_w
            )));
        }
        if !(self.noise_pct >= 0.0 && self.noise_pct.is_finite()) {
            return Err(Error::invalid("noise level must be a finite value >= 0"));
        }
        Ok(())
    }
}

/// Default `(rows, cols)` for a grid of `n` voxels binned by `bin`.
///
/// Rows equal the grid height. The binned width is the smallest value at least
/// `4/3` of the binned height with the same parity as the binned grid, so that
/// detector columns pass through voxel centres before and after binning.
pub fn default_detector(n: usize, bin: usize) -> (usize, usize) {
    let bin = bin.max(1);
    let coarse = (n / bin).max(1);
    let mut w = (4 * coarse).div_ceil(3);
    if w % 2 != coarse % 2 {
        w += 1;
    }
    (n, w * bin)
}

/// Measured data, indexed `[axis][angle][row][col][component]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrtDataSet {
    pub axes: Vec<CoordAxis>,
    pub n_angles: usize,
    pub detector: DetectorGeometry,
    pub data: Array5<f64>,
}

impl TrtDataSet {
    pub fn zeros(axes: Vec<CoordAxis>, n_angles: usize, detector: DetectorGeometry) -> Self {
        let shape = (axes.len(), n_angles, detector.rows, detector.cols, 3);
        TrtDataSet {
            axes,
            n_angles,
            detector,
            data: Array5::zeros(shape),
        }
    }

    pub fn axis_slot(&self, axis: CoordAxis) -> Result<usize> {
        self.axes
            .iter()
            .position(|&a| a == axis)
            .ok_or_else(|| Error::invalid(format!("data set has no rotation axis {axis}")))
    }

    /// `(angle, row, col)` view of one component for one axis.
    pub fn component(&self, axis: CoordAxis, comp: usize) -> Result<ArrayView3<'_, f64>> {
        if comp > 2 {
            return Err(Error::invalid(format!("component {comp} out of range")));
        }
        let slot = self.axis_slot(axis)?;
        Ok(self
            .data
            .index_axis(Axis(0), slot)
            .index_axis_move(Axis(3), comp))
    }

    /// Keeps only the listed axes.
    pub fn restrict(&self, axes: &[CoordAxis]) -> Result<TrtDataSet> {
        let slots = axes
            .iter()
            .map(|&a| self.axis_slot(a))
            .collect::<Result<Vec<_>>>()?;
        let data = self.data.select(Axis(0), &slots);
        Ok(TrtDataSet {
            axes: axes.to_vec(),
            n_angles: self.n_angles,
            detector: self.detector,
            data,
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Forward projection of every `(angle, row, col)` for one rotation axis.
fn project_axis(
    f: &SymTensorField3,
    axis: CoordAxis,
    n_angles: usize,
    detector: &DetectorGeometry,
) -> Result<Array5<f64>> {
    let grid = f.grid;
    let n = grid.n();
    let planes = detector.row_planes(&grid)?;
    let (_, _, s_eta) = axis_strides(n, axis);
    let slots = AxisSlots::new(axis);
    let data = f.as_slice();

    let per_angle: Vec<Array3<f64>> = (0..n_angles)
        .into_par_iter()
        .map(|j| {
            let theta = angle(j, n_angles);
            let zeta = AxisFrame::new(axis, theta).zeta_in_plane();
            let traces: Vec<_> = angle_traces(&grid, detector, theta)
                .iter()
                .map(|t| trace_offsets(t, n, axis))
                .collect();
            let mut out = Array3::zeros((detector.rows, detector.cols, 3));
            for (r, plane) in planes.iter().enumerate() {
                let Some(plane) = plane else { continue };
                let base = plane * s_eta;
                for (c, trace) in traces.iter().enumerate() {
                    let mut acc = [0.0; 3];
                    for &(off, w) in trace {
                        let v = 6 * (base + off);
                        let vals = slots.integrands(&data[v..v + 6], zeta);
                        acc[0] += w * vals[0];
                        acc[1] += w * vals[1];
                        acc[2] += w * vals[2];
                    }
                    for k in 0..3 {
                        out[[r, c, k]] = acc[k];
                    }
                }
            }
            out
        })
        .collect();

    let mut out = Array5::zeros((1, n_angles, detector.rows, detector.cols, 3));
    for (j, a) in per_angle.into_iter().enumerate() {
        out.index_axis_mut(Axis(0), 0)
            .index_axis_mut(Axis(0), j)
            .assign(&a);
    }
    Ok(out)
}

/// Mean-pools `bin x bin` detector blocks.
fn bin_detector(data: &Array5<f64>, bin: usize) -> Array5<f64> {
    if bin == 1 {
        return data.clone();
    }
    let (na, nt, h, w, nc) = data.dim();
    let (hb, wb) = (h / bin, w / bin);
    let norm = 1.0 / (bin * bin) as f64;
    Array5::from_shape_fn((na, nt, hb, wb, nc), |(a, t, r, c, k)| {
        let mut s = 0.0;
        for dr in 0..bin {
            for dc in 0..bin {
                s += data[[a, t, r * bin + dr, c * bin + dc, k]];
            }
        }
        s * norm
    })
}

/// Simulates the full acquisition: forward projection, binning, then noise.
///
/// Rays are spaced by the voxel size of `f`. Noise has standard deviation
/// `noise_pct * max |data|` and is drawn from one ChaCha stream per
/// `(axis, angle)` block, so results do not depend on evaluation order.
pub fn simulate_acquisition(f: &SymTensorField3, cfg: &AcquisitionConfig) -> Result<TrtDataSet> {
    cfg.validate()?;
    let detector = DetectorGeometry {
        rows: cfg.detector_h,
        cols: cfg.detector_w,
        pitch: f.grid.voxel_size(),
    };
    let mut full = TrtDataSet::zeros(cfg.axes.clone(), cfg.n_angles, detector);
    for (slot, &axis) in cfg.axes.iter().enumerate() {
        let proj = project_axis(f, axis, cfg.n_angles, &detector)?;
        full.data
            .index_axis_mut(Axis(0), slot)
            .assign(&proj.index_axis(Axis(0), 0));
    }

    let bin = cfg.bin_factor;
    let mut out = TrtDataSet {
        axes: full.axes,
        n_angles: cfg.n_angles,
        detector: DetectorGeometry {
            rows: detector.rows / bin,
            cols: detector.cols / bin,
            pitch: detector.pitch * bin as f64,
        },
        data: bin_detector(&full.data, bin),
    };

    if cfg.noise_pct > 0.0 {
        let sigma = cfg.noise_pct * out.max_abs();
        add_noise(&mut out.data, sigma, cfg.seed);
    }
    Ok(out)
}

fn add_noise(data: &mut Array5<f64>, sigma: f64, seed: u64) {
    let n_angles = data.dim().1;
    for (a, mut per_axis) in data.axis_iter_mut(Axis(0)).enumerate() {
        per_axis
            .axis_iter_mut(Axis(0))
            .into_par_iter()
            .enumerate()
            .for_each(|(t, mut block)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream((a * n_angles + t) as u64);
                for v in block.iter_mut() {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    *v += sigma * z;
                }
            });
    }
}
