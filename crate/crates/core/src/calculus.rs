//! Finite differences and cumulative integrals on voxel-centre samples.

use ndarray::{Axis, Zip};

use crate::geometry::ScalarField3;

/// Array axis holding coordinate `x_{k+1}` (data are stored `[i3][i2][i1]`).
fn array_axis(k: usize) -> Axis {
    Axis(2 - k)
}

/// `∂f/∂x_k` by central differences, one-sided at the two faces.
pub fn derivative(f: &ScalarField3, k: usize) -> ScalarField3 {
    let h = f.grid.voxel_size();
    let n = f.grid.n();
    let mut out = ScalarField3::zeros(f.grid);
    if n < 2 {
        return out;
    }
    let ax = array_axis(k);
    Zip::from(out.data.lanes_mut(ax))
        .and(f.data.lanes(ax))
        .for_each(|mut o, v| {
            o[0] = (v[1] - v[0]) / h;
            o[n - 1] = (v[n - 1] - v[n - 2]) / h;
            for i in 1..n - 1 {
                o[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
            }
        });
    out
}

/// `∫ f dx_k` from the low face, trapezoid rule on voxel centres.
///
/// The integral is anchored at the low face of the grid with value zero; the
/// half voxel between the face and the first centre uses the first sample.
pub fn cumulative_integral(f: &ScalarField3, k: usize) -> ScalarField3 {
    let h = f.grid.voxel_size();
    let mut out = ScalarField3::zeros(f.grid);
    let ax = array_axis(k);
    Zip::from(out.data.lanes_mut(ax))
        .and(f.data.lanes(ax))
        .for_each(|mut o, v| {
            let mut acc = 0.5 * h * v[0];
            o[0] = acc;
            for i in 1..v.len() {
                acc += 0.5 * h * (v[i - 1] + v[i]);
                o[i] = acc;
            }
        });
    out
}

/// Subtracts from each line along `x_k` the linear ramp, zero at the low
/// face, that takes the last sample to zero.
pub fn remove_end_drift(f: &mut ScalarField3, k: usize) {
    let n = f.grid.n();
    if n == 0 {
        return;
    }
    let span = n as f64 - 0.5;
    for mut lane in f.data.lanes_mut(array_axis(k)) {
        let end = lane[n - 1];
        for (i, v) in lane.iter_mut().enumerate() {
            *v -= end * (i as f64 + 0.5) / span;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::VoxelGrid3;

    #[test]
    fn derivative_of_quadratic_is_exact_inside() {
        let g = VoxelGrid3::new(9, 1.0).unwrap();
        let f = ScalarField3::from_fn(g, |x| x[1] * x[1] + 3.0 * x[0]);
        let d = derivative(&f, 1);
        for i3 in 0..9 {
            for i2 in 1..8 {
                for i1 in 0..9 {
                    let x2 = g.center(i2);
                    assert!((d.data[[i3, i2, i1]] - 2.0 * x2).abs() < 1e-12);
                }
            }
        }
        let d0 = derivative(&f, 0);
        assert!(d0.data.iter().all(|v| (v - 3.0).abs() < 1e-12));
    }

    #[test]
    fn integral_of_compact_bump_converges_to_antiderivative() {
        // d/dx3 of exp(-20 x3^2) integrates back to the bump itself
        let err = |n: usize| {
            let g = VoxelGrid3::new(n, 1.0).unwrap();
            let f = ScalarField3::from_fn(g, |x| -40.0 * x[2] * (-20.0 * x[2] * x[2]).exp());
            let u = cumulative_integral(&f, 2);
            (0..n)
                .map(|i3| {
                    let x3 = g.center(i3);
                    (u.data[[i3, 1, 0]] - (-20.0 * x3 * x3).exp()).abs()
                })
                .fold(0.0f64, f64::max)
        };
        let (coarse, fine) = (err(32), err(64));
        assert!(fine < 5e-3, "{fine}");
        assert!(fine < coarse / 3.5, "{coarse} {fine}");
    }
}
