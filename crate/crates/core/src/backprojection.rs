//! Back-projection as the transpose of ray tracing.
//!
//! The discrete back-projection of a sinogram `φ(θ_j, p_c)` onto a plane is
//!
//! `Bφ(v) = Δp / (N_θ h²) Σ_j Σ_c w_jc(v) φ(θ_j, p_c)`
//!
//! where `w_jc(v)` is the chord length of ray `(j, c)` in pixel `v`. Since
//! `Σ_c w_jc(v) ≈ h² / Δp`, this is the mean over angles of the sinogram
//! sampled along each pixel's detector footprint, and it is the exact adjoint
//! of the projector for the inner products `(Δp Δs / N_θ) Σ d·φ` on data and
//! `h³ Σ f·g` on fields.

use ndarray::{Array2, Array3, ArrayView2, ArrayView3, Axis};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{AxisFrame, CoordAxis, ScalarField3, SymTensorField3, VoxelGrid3};
use crate::geometry::component_index;
use crate::projector::{angle, angle_traces, DetectorGeometry, Trace, TrtDataSet};

/// Discretisation of the back-projection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BackprojectionKind {
    /// Exact transpose of the ray tracer.
    Transpose,
    /// Pixel driven: the sinogram is linearly interpolated at each pixel
    /// centre's detector offset. Reproduces constants exactly.
    Linear,
}

/// Back-projector for one grid plane geometry, detector and angle count.
///
/// The in-plane geometry is shared by every plane and every rotation axis.
pub struct PlaneBackprojector {
    grid: VoxelGrid3,
    detector: DetectorGeometry,
    n_angles: usize,
    kind: BackprojectionKind,
    traces: Vec<Vec<Trace>>,
}

impl PlaneBackprojector {
    pub fn new(
        grid: VoxelGrid3,
        detector: DetectorGeometry,
        n_angles: usize,
        kind: BackprojectionKind,
    ) -> Self {
        let traces = match kind {
            BackprojectionKind::Transpose => (0..n_angles)
                .into_par_iter()
                .map(|j| angle_traces(&grid, &detector, angle(j, n_angles)))
                .collect(),
            BackprojectionKind::Linear => Vec::new(),
        };
        PlaneBackprojector {
            grid,
            detector,
            n_angles,
            kind,
            traces,
        }
    }

    pub fn grid(&self) -> VoxelGrid3 {
        self.grid
    }

    fn weight(&self) -> f64 {
        let h = self.grid.voxel_size();
        self.detector.pitch / (self.n_angles as f64 * h * h)
    }

    fn check(&self, dims: (usize, usize)) -> Result<()> {
        if dims != (self.n_angles, self.detector.cols) {
            return Err(Error::invalid(format!(
                "sinogram of shape {dims:?} does not match {} angles x {} columns",
                self.n_angles, self.detector.cols
            )));
        }
        Ok(())
    }

    /// Back-projects an `(angle, col)` sinogram; output indexed `[i_b][i_a]`.
    pub fn backproject(&self, sino: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check(sino.dim())?;
        match self.kind {
            BackprojectionKind::Transpose => Ok(self.transpose(sino)),
            BackprojectionKind::Linear => Ok(self.linear(sino)),
        }
    }

    fn transpose(&self, sino: ArrayView2<f64>) -> Array2<f64> {
        let n = self.grid.n();
        let mut out = vec![0.0; n * n];
        for (j, per_angle) in self.traces.iter().enumerate() {
            for (c, trace) in per_angle.iter().enumerate() {
                let v = sino[[j, c]];
                if v == 0.0 {
                    continue;
                }
                for &(pix, w) in trace {
                    out[pix] += w * v;
                }
            }
        }
        let s = self.weight();
        Array2::from_shape_vec((n, n), out.into_iter().map(|v| v * s).collect()).expect("n*n")
    }

    fn linear(&self, sino: ArrayView2<f64>) -> Array2<f64> {
        let n = self.grid.n();
        let cols = self.detector.cols;
        let centre = 0.5 * (cols as f64 - 1.0);
        let inv_dp = 1.0 / self.detector.pitch;
        let xs: Vec<f64> = (0..n).map(|i| self.grid.center(i)).collect();
        let mut out = Array2::zeros((n, n));
        for j in 0..self.n_angles {
            let z = AxisFrame::new(CoordAxis::E3, angle(j, self.n_angles)).zeta_in_plane();
            let row = sino.row(j);
            for ((ib, ia), o) in out.indexed_iter_mut() {
                let u = (xs[ia] * z[0] + xs[ib] * z[1]) * inv_dp + centre;
                let c0 = u.floor();
                let t = u - c0;
                let c0 = c0 as isize;
                let at = |c: isize| {
                    if c >= 0 && (c as usize) < cols {
                        row[c as usize]
                    } else {
                        0.0
                    }
                };
                *o += (1.0 - t) * at(c0) + t * at(c0 + 1);
            }
        }
        out.mapv_inplace(|v| v / self.n_angles as f64);
        out
    }
}

fn check_axis_data(
    data: &ArrayView3<f64>,
    n_angles: usize,
    detector: &DetectorGeometry,
) -> Result<()> {
    let (na, h, w) = data.dim();
    if na != n_angles || h != detector.rows || w != detector.cols {
        return Err(Error::invalid(format!(
            "data of shape {:?} does not match {n_angles} angles on a {}x{} detector",
            data.dim(),
            detector.rows,
            detector.cols
        )));
    }
    Ok(())
}

/// Back-projects one sinogram onto a single plane of `grid` by linear interpolation.
pub fn backproject_plane(
    sino: ArrayView2<f64>,
    grid: VoxelGrid3,
    detector: DetectorGeometry,
) -> Result<Array2<f64>> {
    PlaneBackprojector::new(grid, detector, sino.dim().0, BackprojectionKind::Linear).backproject(sino)
}

/// Slice-by-slice linear-interpolation back-projection of `(angle, row, col)`
/// data about `axis`.
///
/// Detector rows are matched with grid planes; planes without a row stay zero.
pub fn backproject_axis(
    data: ArrayView3<f64>,
    axis: CoordAxis,
    grid: VoxelGrid3,
    detector: DetectorGeometry,
) -> Result<ScalarField3> {
    let bp = PlaneBackprojector::new(grid, detector, data.dim().0, BackprojectionKind::Linear);
    backproject_axis_with(&bp, data, axis)
}

/// Slice-by-slice back-projection with a prepared plane back-projector.
pub fn backproject_axis_with(
    traces: &PlaneBackprojector,
    data: ArrayView3<f64>,
    axis: CoordAxis,
) -> Result<ScalarField3> {
    check_axis_data(&data, traces.n_angles, &traces.detector)?;
    let grid = traces.grid;
    let planes = traces.detector.row_planes(&grid)?;
    let slabs: Vec<(usize, Array2<f64>)> = planes
        .par_iter()
        .enumerate()
        .filter_map(|(r, p)| p.map(|p| (r, p)))
        .map(|(r, p)| {
            let sino = data.index_axis(Axis(1), r);
            traces.backproject(sino).map(|s| (p, s))
        })
        .collect::<Result<_>>()?;
    let mut out = ScalarField3::zeros(grid);
    let (a, b) = axis.in_plane();
    for (p, slab) in slabs {
        for ((ib, ia), &v) in slab.indexed_iter() {
            let mut idx = [0; 3];
            idx[axis.index()] = p;
            idx[a] = ia;
            idx[b] = ib;
            out.data[[idx[2], idx[1], idx[0]]] = v;
        }
    }
    Ok(out)
}

/// Adjoint of the full three-component acquisition (before binning and noise).
///
/// Each measurement is spread back with the tensor it measures against:
/// `η⊗η` for the axial component, `sym(ζ⊗η)` for `J¹` and `ζ⊗ζ` for `J²`, so
/// that `Σ_ij f_ij g_ij` pairs fields.
pub fn trt_adjoint(data: &TrtDataSet, grid: VoxelGrid3) -> Result<SymTensorField3> {
    let det = data.detector;
    let traces = PlaneBackprojector::new(grid, det, data.n_angles, BackprojectionKind::Transpose);
    let planes = det.row_planes(&grid)?;
    let n = grid.n();
    let s = traces.weight();
    let mut out = SymTensorField3::zeros(grid);
    for (slot, &axis) in data.axes.iter().enumerate() {
        let e = axis.index();
        let (a, b) = axis.in_plane();
        let per_axis = data.data.index_axis(Axis(0), slot);
        let slabs: Vec<(usize, Array3<f64>)> = planes
            .par_iter()
            .enumerate()
            .filter_map(|(r, p)| p.map(|p| (r, p)))
            .map(|(r, p)| {
                // accumulators: axial, J¹ along a and b, J² as aa, ab, bb
                let mut acc = Array3::<f64>::zeros((n * n, 6, 1));
                for j in 0..data.n_angles {
                    let z = AxisFrame::new(axis, angle(j, data.n_angles)).zeta_in_plane();
                    for (c, trace) in traces.traces[j].iter().enumerate() {
                        let m = per_axis.slice(ndarray::s![j, r, c, ..]);
                        let (m0, m1, m2) = (m[0], m[1], m[2]);
                        let k = [
                            m0,
                            0.5 * m1 * z[0],
                            0.5 * m1 * z[1],
                            m2 * z[0] * z[0],
                            m2 * z[0] * z[1],
                            m2 * z[1] * z[1],
                        ];
                        for &(pix, w) in trace {
                            for q in 0..6 {
                                acc[[pix, q, 0]] += w * k[q];
                            }
                        }
                    }
                }
                (p, acc)
            })
            .collect();
        let slots = [
            component_index(e, e),
            component_index(a, e),
            component_index(b, e),
            component_index(a, a),
            component_index(a, b),
            component_index(b, b),
        ];
        for (p, acc) in slabs {
            for pix in 0..n * n {
                let mut idx = [0; 3];
                idx[e] = p;
                idx[a] = pix % n;
                idx[b] = pix / n;
                for q in 0..6 {
                    out.data[[idx[2], idx[1], idx[0], slots[q]]] += s * acc[[pix, q, 0]];
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SymTensor3;
    use crate::projector::{simulate_acquisition, AcquisitionConfig, AXIAL};

    fn det(rows: usize, cols: usize, g: &VoxelGrid3) -> DetectorGeometry {
        DetectorGeometry {
            rows,
            cols,
            pitch: g.voxel_size(),
        }
    }

    fn interior_stats(g: &VoxelGrid3, bp: &Array2<f64>) -> (f64, f64) {
        let (mut worst, mut sum, mut count) = (0.0f64, 0.0, 0);
        for ib in 0..g.n() {
            for ia in 0..g.n() {
                let (x, y) = (g.center(ia), g.center(ib));
                if (x * x + y * y).sqrt() < 1.0 {
                    worst = worst.max((bp[[ib, ia]] - 1.0).abs());
                    sum += bp[[ib, ia]];
                    count += 1;
                }
            }
        }
        (worst, sum / count as f64)
    }

    #[test]
    fn constant_sinogram_gives_constant_interior() {
        let g = VoxelGrid3::new(32, 1.0).unwrap();
        let d = det(32, 48, &g);
        let sino = Array2::from_elem((36, 48), 1.0);
        // pixels inside the unit disk are seen by the detector at every angle
        let bp = backproject_plane(sino.view(), g, d).unwrap();
        let (worst, _) = interior_stats(&g, &bp);
        assert!(worst < 1e-12);

        // chord sums over a pixel are only a Riemann sum of its area
        let t = PlaneBackprojector::new(g, d, 36, BackprojectionKind::Transpose);
        let (worst, mean) = interior_stats(&g, &t.backproject(sino.view()).unwrap());
        assert!(worst < 0.08);
        assert!((mean - 1.0).abs() < 1e-3);
    }

    #[test]
    fn single_angle_spike_is_a_ridge() {
        let g = VoxelGrid3::new(8, 1.0).unwrap();
        let d = det(8, 12, &g);
        let mut sino = Array2::zeros((4, 12));
        // angle 0: rays along a, column 7 sits at p = 1.5 h, i.e. b = -1.5 h
        sino[[0, 7]] = 1.0;
        for kind in [BackprojectionKind::Linear, BackprojectionKind::Transpose] {
            let bp = PlaneBackprojector::new(g, d, 4, kind)
                .backproject(sino.view())
                .unwrap();
            for ib in 0..8 {
                for ia in 0..8 {
                    let expect = if ib == 2 { 0.25 } else { 0.0 };
                    assert!((bp[[ib, ia]] - expect).abs() < 1e-12, "{kind:?}");
                }
            }
        }
    }

    #[test]
    fn quarter_turn_equivariance() {
        let g = VoxelGrid3::new(10, 1.0).unwrap();
        let d = det(10, 14, &g);
        let sino = Array2::from_shape_fn((8, 14), |(j, c)| ((3 * j + c * c) % 11) as f64 - 4.0);
        let shifted = Array2::from_shape_fn((8, 14), |(j, c)| sino[[(j + 2) % 8, c]]);
        let a = backproject_plane(sino.view(), g, d).unwrap();
        let b = backproject_plane(shifted.view(), g, d).unwrap();
        // shifting data by +90° equals rotating the image by -90°
        for ib in 0..10 {
            for ia in 0..10 {
                assert!((b[[ib, ia]] - a[[ia, 9 - ib]]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn axis_backprojection_equals_plane_loop() {
        let g = VoxelGrid3::new(6, 1.0).unwrap();
        let d = det(6, 8, &g);
        let data = Array3::from_shape_fn((5, 6, 8), |(j, r, c)| (j * 7 + r * 3 + c) as f64 * 0.1);
        for axis in CoordAxis::ALL {
            let full = backproject_axis(data.view(), axis, g, d).unwrap();
            for r in 0..6 {
                let slab = backproject_plane(data.index_axis(Axis(1), r), g, d).unwrap();
                let (a, b) = axis.in_plane();
                for ib in 0..6 {
                    for ia in 0..6 {
                        let mut idx = [0; 3];
                        idx[axis.index()] = r;
                        idx[a] = ia;
                        idx[b] = ib;
                        assert_eq!(full.get(idx).to_bits(), slab[[ib, ia]].to_bits());
                    }
                }
            }
        }
    }

    #[test]
    fn zero_data_and_single_row_support() {
        let g = VoxelGrid3::new(6, 1.0).unwrap();
        let d = det(6, 8, &g);
        let zero = Array3::zeros((4, 6, 8));
        let f = backproject_axis(zero.view(), CoordAxis::E2, g, d).unwrap();
        assert!(f.data.iter().all(|&v| v == 0.0));
        let mut one = Array3::zeros((4, 6, 8));
        one.index_axis_mut(Axis(1), 4).fill(1.0);
        let f = backproject_axis(one.view(), CoordAxis::E2, g, d).unwrap();
        for ((i3, i2, i1), &v) in f.data.indexed_iter() {
            if i2 != 4 {
                assert_eq!(v, 0.0, "{i1} {i2} {i3}");
            }
        }
        assert!(backproject_axis(zero.view(), CoordAxis::E2, g, det(6, 9, &g)).is_err());
    }

    #[test]
    fn scalar_adjoint_pairing() {
        let g = VoxelGrid3::new(8, 1.0).unwrap();
        let cfg = AcquisitionConfig::for_grid(8, 6);
        let h = g.voxel_size();
        let scalar = ScalarField3::from_fn(g, |x| (3.0 * x[0] - x[1] * x[2]).sin());
        let f = SymTensorField3::from_fn(g, |x| {
            let mut t = SymTensor3::zero();
            t.set(2, 2, (3.0 * x[0] - x[1] * x[2]).sin());
            t
        });
        let data = simulate_acquisition(&f, &cfg).unwrap();
        let phi = Array3::from_shape_fn((6, 8, cfg.detector_w), |(j, r, c)| {
            ((j * 5 + r * 3 + c * 7) % 13) as f64 - 6.0
        });
        let lhs: f64 = data
            .component(CoordAxis::E3, AXIAL)
            .unwrap()
            .iter()
            .zip(phi.iter())
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * h
            * h
            / 6.0;
        let t = PlaneBackprojector::new(g, data.detector, 6, BackprojectionKind::Transpose);
        let bp = backproject_axis_with(&t, phi.view(), CoordAxis::E3).unwrap();
        let rhs: f64 = scalar.data.iter().zip(bp.data.iter()).map(|(a, b)| a * b).sum::<f64>()
            * h.powi(3);
        assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
    }
}
