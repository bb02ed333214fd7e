//! Test fields: the smooth and sharp phantoms, potential (strain) fields and
//! fields in the null space of the one- and two-axis transforms.

use num_complex::Complex64;

use crate::calculus::derivative;
use crate::error::{Error, Result};
use crate::geometry::{component_index, ScalarField3, SymTensor3, SymTensorField3, VectorField3, VoxelGrid3};
use crate::spectral::{idft3_with_residue, SpectralField};

/// `α exp(-50 |x - a|²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianBump {
    pub alpha: f64,
    pub center: [f64; 3],
}

impl GaussianBump {
    pub const RATE: f64 = 50.0;

    pub fn eval(&self, x: [f64; 3]) -> f64 {
        let r2: f64 = (0..3).map(|k| (x[k] - self.center[k]).powi(2)).sum();
        self.alpha * (-Self::RATE * r2).exp()
    }
}

/// Axis-aligned box `I1 × I2 × I3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxSpec {
    pub intervals: [(f64, f64); 3],
}

impl BoxSpec {
    pub fn new(intervals: [(f64, f64); 3]) -> Result<Self> {
        for &(lo, hi) in &intervals {
            if !(lo < hi && lo >= -1.0 && hi <= 1.0) {
                return Err(Error::invalid(format!("interval [{lo}, {hi}] must be nonempty within [-1, 1]")));
            }
        }
        Ok(BoxSpec { intervals })
    }

    pub fn contains(&self, x: [f64; 3]) -> bool {
        (0..3).all(|k| x[k] >= self.intervals[k].0 && x[k] <= self.intervals[k].1)
    }

    pub fn volume(&self) -> f64 {
        self.intervals.iter().map(|(lo, hi)| hi - lo).product()
    }
}

/// Bumps of the smooth phantom, per stored component `(11, 12, 13, 22, 23, 33)`.
///
/// The two `f22` bumps at `(0.5, 0.5, 0.5)` with opposite signs are kept as
/// listed and cancel.
pub const SMOOTH_TABLE: [&[(f64, [f64; 3])]; 6] = [
    &[
        (-1.0, [-0.5, -0.5, -0.5]),
        (1.0, [-0.5, 0.5, -0.5]),
        (-1.0, [-0.5, 0.5, 0.5]),
    ],
    &[(1.0, [0.5, -0.5, 0.5]), (-1.0, [0.5, 0.5, -0.5])],
    &[
        (1.0, [-0.5, -0.5, -0.5]),
        (-1.0, [-0.5, -0.5, 0.5]),
        (1.0, [-0.5, 0.5, 0.5]),
    ],
    &[
        (-1.0, [0.5, -0.5, -0.5]),
        (1.0, [0.5, 0.5, 0.5]),
        (-1.0, [0.5, 0.5, 0.5]),
    ],
    &[(1.0, [-0.5, -0.5, 0.5]), (-1.0, [-0.5, 0.5, -0.5])],
    &[
        (1.0, [0.5, -0.5, -0.5]),
        (-1.0, [0.5, -0.5, 0.5]),
        (1.0, [0.5, 0.5, 0.5]),
    ],
];

/// Boxes of the sharp phantom, per stored component. The third interval of
/// `f11` is printed as `[-0,8,0.8]` in its source and read as `[-0.8, 0.8]`.
pub const SHARP_TABLE: [[(f64, f64); 3]; 6] = [
    [(-0.4, 0.4), (-0.6, 0.2), (-0.8, 0.8)],
    [(-0.4, 0.4), (-0.2, 0.6), (-0.8, 0.8)],
    [(-0.8, 0.8), (-0.4, 0.4), (-0.6, 0.2)],
    [(-0.8, 0.8), (-0.4, 0.4), (-0.2, 0.6)],
    [(-0.6, 0.2), (-0.8, 0.8), (-0.4, 0.4)],
    [(-0.2, 0.6), (-0.8, 0.8), (-0.4, 0.4)],
];

pub fn smooth_bumps() -> [Vec<GaussianBump>; 6] {
    std::array::from_fn(|c| {
        SMOOTH_TABLE[c]
            .iter()
            .map(|&(alpha, center)| GaussianBump { alpha, center })
            .collect()
    })
}

/// Sum of Gaussian bumps per component, evaluated at voxel centres.
pub fn smooth_phantom(grid: VoxelGrid3) -> SymTensorField3 {
    let bumps = smooth_bumps();
    SymTensorField3::from_fn(grid, |x| {
        SymTensor3(std::array::from_fn(|c| {
            bumps[c].iter().fold(0.0, |acc, b| acc + b.eval(x))
        }))
    })
}

/// Indicator of one box per component; a voxel is inside when its centre is.
pub fn sharp_phantom(grid: VoxelGrid3) -> SymTensorField3 {
    let boxes = SHARP_TABLE.map(|iv| BoxSpec { intervals: iv });
    SymTensorField3::from_fn(grid, |x| {
        SymTensor3(std::array::from_fn(|c| if boxes[c].contains(x) { 1.0 } else { 0.0 }))
    })
}

/// `f_ij = ∂u_i/∂x_j + ∂u_j/∂x_i` from the Jacobian `J[i][j] = ∂u_i/∂x_j`.
pub fn symmetric_gradient(jac: [[f64; 3]; 3]) -> SymTensor3 {
    let mut t = SymTensor3::zero();
    for i in 0..3 {
        for j in i..3 {
            t.set(i, j, jac[i][j] + jac[j][i]);
        }
    }
    t
}

/// Potential field of an analytic displacement given by its Jacobian.
pub fn potential_field(grid: VoxelGrid3, jacobian: impl Fn([f64; 3]) -> [[f64; 3]; 3]) -> SymTensorField3 {
    SymTensorField3::from_fn(grid, |x| symmetric_gradient(jacobian(x)))
}

/// Potential field of a sampled displacement, by finite differences.
pub fn potential_field_sampled(u: &VectorField3) -> SymTensorField3 {
    let comps: Vec<ScalarField3> = (0..3).map(|i| u.component(i)).collect();
    let d: Vec<Vec<ScalarField3>> = comps
        .iter()
        .map(|ui| (0..3).map(|j| derivative(ui, j)).collect())
        .collect();
    let mut f = SymTensorField3::zeros(u.grid);
    for i in 0..3 {
        for j in i..3 {
            let c = component_index(i, j);
            let sum = ScalarField3 {
                grid: u.grid,
                data: &d[i][j].data + &d[j][i].data,
            };
            f.set_component(c, &sum);
        }
    }
    f
}

/// Probabilists' Hermite polynomial `He_m`.
fn hermite(m: usize, t: f64) -> f64 {
    let (mut a, mut b) = (1.0, t);
    match m {
        0 => a,
        _ => {
            for k in 1..m {
                let c = t * b - k as f64 * a;
                a = b;
                b = c;
            }
            b
        }
    }
}

/// Isotropic Gaussian `amplitude · exp(-|x - c|² / (2 w²))` with closed-form
/// partial derivatives of any order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gaussian3 {
    pub amplitude: f64,
    pub center: [f64; 3],
    pub width: f64,
}

impl Gaussian3 {
    pub fn eval(&self, x: [f64; 3]) -> f64 {
        self.derivative(x, [0, 0, 0])
    }

    /// `∂^{m1}_1 ∂^{m2}_2 ∂^{m3}_3` at `x`.
    pub fn derivative(&self, x: [f64; 3], orders: [usize; 3]) -> f64 {
        let mut v = self.amplitude;
        for k in 0..3 {
            let t = (x[k] - self.center[k]) / self.width;
            let m = orders[k];
            v *= (-1.0 / self.width).powi(m as i32) * hermite(m, t) * (-0.5 * t * t).exp();
        }
        v
    }

    pub fn gradient(&self, x: [f64; 3]) -> [f64; 3] {
        [
            self.derivative(x, [1, 0, 0]),
            self.derivative(x, [0, 1, 0]),
            self.derivative(x, [0, 0, 1]),
        ]
    }
}

/// A displacement with a Gaussian per component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianDisplacement {
    pub components: [Gaussian3; 3],
}

impl GaussianDisplacement {
    /// Off-centre bumps of differing widths and signs.
    pub fn standard() -> Self {
        GaussianDisplacement {
            components: [
                Gaussian3 { amplitude: 0.05, center: [0.15, -0.1, 0.05], width: 0.18 },
                Gaussian3 { amplitude: -0.04, center: [-0.1, 0.12, 0.0], width: 0.2 },
                Gaussian3 { amplitude: 0.045, center: [0.05, 0.1, -0.12], width: 0.16 },
            ],
        }
    }

    pub fn value(&self, x: [f64; 3]) -> [f64; 3] {
        self.components.map(|g| g.eval(x))
    }

    pub fn jacobian(&self, x: [f64; 3]) -> [[f64; 3]; 3] {
        self.components.map(|g| g.gradient(x))
    }

    pub fn sample(&self, grid: VoxelGrid3) -> VectorField3 {
        VectorField3::from_fn(grid, |x| self.value(x))
    }

    pub fn field(&self, grid: VoxelGrid3) -> SymTensorField3 {
        potential_field(grid, |x| self.jacobian(x))
    }
}

fn max_abs(f: &SymTensorField3) -> f64 {
    f.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn normalized(mut f: SymTensorField3) -> SymTensorField3 {
    let m = max_abs(&f);
    if m > 0.0 {
        f.data.mapv_inplace(|v| v / m);
    }
    f
}

/// Rejects generators that are not negligible on the grid boundary.
fn check_decay(grid: VoxelGrid3, g: &Gaussian3) -> Result<()> {
    let e = grid.extent();
    let nearest = (0..3)
        .map(|k| (e - g.center[k].abs()) / g.width)
        .fold(f64::INFINITY, f64::min);
    if nearest < 5.0 {
        return Err(Error::invalid(format!(
            "generator reaches the grid boundary ({nearest:.2} widths from the nearest face)"
        )));
    }
    Ok(())
}

/// Potential field of `u = (0, ∂φ/∂x3, -∂φ/∂x2)`, scaled to `max |f| = 1`.
///
/// `u2 = ∂φ/∂x3` is the free component and `u3 = -∫ ∂u2/∂x2 dx3 = -∂φ/∂x2`,
/// so `u1 = 0` and `∂u2/∂x2 + ∂u3/∂x3 = 0` hold exactly and `u` has compact
/// numerical support. The result is invisible to rotations about `e1`.
pub fn one_axis_null_field(grid: VoxelGrid3, phi: &Gaussian3) -> Result<SymTensorField3> {
    check_decay(grid, phi)?;
    let f = potential_field(grid, |x| {
        let d = |o: [usize; 3]| phi.derivative(x, o);
        [
            [0.0; 3],
            [d([1, 0, 1]), d([0, 1, 1]), d([0, 0, 2])],
            [-d([1, 1, 0]), -d([0, 2, 0]), -d([0, 1, 1])],
        ]
    });
    Ok(normalized(f))
}

/// Null field for rotations about `e1` and `e2`, scaled to `max |f| = 1`.
///
/// With the seed spectrum `ĝ = y1² y2² ψ̂`, `ψ` a Gaussian, the field
/// `f̂33 = ĝ`, `f̂23 = -(y3 / 2y2) ĝ`, `f̂13 = -(y3 / 2y1) ĝ`,
/// `f̂12 = (y3² / 2y1y2) ĝ`, `f̂11 = f̂22 = 0` has polynomial spectra, so every
/// component is a fourth derivative of `ψ` and is evaluated in closed form.
pub fn two_axis_null_field(grid: VoxelGrid3, psi: &Gaussian3) -> Result<SymTensorField3> {
    check_decay(grid, psi)?;
    let f = SymTensorField3::from_fn(grid, |x| {
        let d = |o: [usize; 3]| psi.derivative(x, o);
        let mut t = SymTensor3::zero();
        t.set(2, 2, d([2, 2, 0]));
        t.set(1, 2, -0.5 * d([2, 1, 1]));
        t.set(0, 2, -0.5 * d([1, 2, 1]));
        t.set(0, 1, 0.5 * d([1, 1, 2]));
        t
    });
    Ok(normalized(f))
}

/// Two-axis null field from a seed spectrum `ĝ(y)` of a field centred at the
/// origin, built on the DFT lattice.
///
/// `ĝ` must vanish on the planes `y1 = 0` and `y2 = 0` and satisfy
/// `ĝ(-y) = conj ĝ(y)`. The Nyquist planes of even grids are dropped.
pub fn two_axis_null_field_from_spectrum(
    grid: VoxelGrid3,
    ghat: impl Fn([f64; 3]) -> Complex64 + Sync,
) -> Result<SymTensorField3> {
    let n = grid.n();
    let mut seed = SpectralField::zeros(grid);
    // centre the field: voxel 0 sits at x0 = -extent + h/2
    let x0 = grid.center(0);
    let nyq = |k: usize| n % 2 == 0 && k == n / 2;
    let mut on_plane = 0.0f64;
    for ((k3, k2, k1), v) in seed.data.indexed_iter_mut() {
        if nyq(k1) || nyq(k2) || nyq(k3) {
            continue;
        }
        let y = [
            crate::spectral::bin_frequency(k1, n, grid.voxel_size()),
            crate::spectral::bin_frequency(k2, n, grid.voxel_size()),
            crate::spectral::bin_frequency(k3, n, grid.voxel_size()),
        ];
        let g = ghat(y);
        if k1 == 0 || k2 == 0 {
            on_plane = on_plane.max(g.norm());
            continue;
        }
        let phase = Complex64::from_polar(1.0, x0 * (y[0] + y[1] + y[2]));
        *v = g * phase;
    }
    if on_plane > 0.0 {
        return Err(Error::invalid(format!(
            "seed spectrum is nonzero ({on_plane:e}) on the planes y1 = 0 or y2 = 0"
        )));
    }
    let mut f = SymTensorField3::zeros(grid);
    let parts: [(usize, fn([f64; 3]) -> f64); 4] = [
        (component_index(2, 2), |_| 1.0),
        (component_index(1, 2), |y| -y[2] / (2.0 * y[1])),
        (component_index(0, 2), |y| -y[2] / (2.0 * y[0])),
        (component_index(0, 1), |y| y[2] * y[2] / (2.0 * y[0] * y[1])),
    ];
    // continuous spectrum to DFT coefficients: n^{3/2} (Δy / 2π)^{3/2} = (n / 2π)^{3/2} Δy^{3/2}
    let dy = 2.0 * std::f64::consts::PI / (n as f64 * grid.voxel_size());
    let scale = (n as f64 * dy / (2.0 * std::f64::consts::PI)).powf(1.5);
    for (c, mult) in parts {
        let mut s = seed.clone();
        s.map_with_frequency(|y, v| if v == Complex64::new(0.0, 0.0) { v } else { v * mult(y) * scale });
        let (comp, residue) = idft3_with_residue(&s);
        let norm = comp.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if residue > 1e-8 * norm.max(f64::MIN_POSITIVE) {
            return Err(Error::invalid("seed spectrum is not Hermitian symmetric"));
        }
        f.set_component(c, &comp);
    }
    Ok(f)
}

/// Default generator of [`one_axis_null_field`].
pub fn default_null1_generator() -> Gaussian3 {
    Gaussian3 { amplitude: 1.0, center: [0.05, -0.05, 0.08], width: 0.16 }
}

/// Default Gaussian of [`two_axis_null_field`].
pub fn default_null2_generator() -> Gaussian3 {
    Gaussian3 { amplitude: 1.0, center: [-0.05, 0.05, 0.0], width: 0.16 }
}
