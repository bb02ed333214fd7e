//! Plane-by-plane filtered back-projection of analytic parallel-beam sinograms.

use ndarray::{Array2, Array3};
use trt_core::backprojection::backproject_plane;
use trt_core::geometry::VoxelGrid3;
use trt_core::projector::{angle, DetectorGeometry};
use trt_core::spectral::ramp_filter_sinogram;

fn fbp(
    n: usize,
    n_angles: usize,
    cols: usize,
    projection: impl Fn(f64) -> f64,
) -> (VoxelGrid3, Array2<f64>) {
    let g = VoxelGrid3::new(n, 1.0).unwrap();
    let det = DetectorGeometry {
        rows: 1,
        cols,
        pitch: g.voxel_size(),
    };
    let mut sino = Array3::from_shape_fn((n_angles, 1, cols), |(_, _, c)| {
        projection(det.col_offset(c))
    });
    ramp_filter_sinogram(&mut sino, det.pitch);
    let slab = sino.index_axis(ndarray::Axis(1), 0).to_owned();
    let bp = backproject_plane(slab.view(), g, det).unwrap();
    assert!(angle(1, n_angles) > 0.0);
    (g, bp.mapv(|v| 0.5 * v))
}

#[test]
fn gaussian_is_recovered() {
    let a = 20.0;
    let (g, rec) = fbp(128, 240, 182, |p| (std::f64::consts::PI / a).sqrt() * (-a * p * p).exp());
    let (mut num, mut den) = (0.0, 0.0);
    for ((ib, ia), &v) in rec.indexed_iter() {
        let (x, y) = (g.center(ia), g.center(ib));
        let t = (-a * (x * x + y * y)).exp();
        num += (v - t) * (v - t);
        den += t * t;
    }
    let err = (num / den).sqrt();
    assert!(err < 0.03, "relative L2 error {err}");
}

#[test]
fn disk_interior_is_recovered() {
    let r = 0.6;
    let (g, rec) = fbp(256, 360, 342, |p: f64| {
        if p.abs() < r {
            2.0 * (r * r - p * p).sqrt()
        } else {
            0.0
        }
    });
    let (mut num, mut den) = (0.0, 0.0);
    for ((ib, ia), &v) in rec.indexed_iter() {
        let (x, y) = (g.center(ia), g.center(ib));
        if (x * x + y * y).sqrt() < 0.9 * r {
            num += (v - 1.0) * (v - 1.0);
            den += 1.0;
        }
    }
    let err = (num / den).sqrt();
    assert!(err < 0.05, "interior relative L2 error {err}");
}
