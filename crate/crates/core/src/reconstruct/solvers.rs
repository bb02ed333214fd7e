//! Per-frequency algebra relating `λ`, `μ` and the Fourier coefficients of `f`.
//!
//! With `y` the angular frequency, the off-diagonals satisfy
//!
//! ```text
//! | y2 y3  0 | |f̂12|   |λ1|
//! | y1  0 y3 | |f̂13| = |λ2|
//! |  0 y1 y2 | |f̂23|   |λ3|
//! ```
//!
//! and the diagonals
//!
//! ```text
//! |  0   y2² y3² | |f̂11|   |μ1 - 2 y2 y3 f̂23|
//! | y1²  0   y3² | |f̂22| = |μ2 - 2 y1 y3 f̂13|
//! | y1²  y2²  0  | |f̂33|   |μ3 - 2 y1 y2 f̂12|
//! ```
//!
//! Both matrices have nonzero determinant exactly when `y1 y2 y3 ≠ 0`. Off
//! that set the closed forms below are used; on it, the minimum-norm
//! least-squares solution.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

pub type C3 = [Complex64; 3];

/// Frequencies with `|y1 y2 y3|` at or below this (relative to `|y|³`) count as singular.
pub const SINGULAR_TOL: f64 = 1e-12;

pub fn is_singular(y: [f64; 3]) -> bool {
    let r = y.iter().map(|v| v.abs()).fold(0.0, f64::max);
    (y[0] * y[1] * y[2]).abs() <= SINGULAR_TOL * r * r * r
}

pub fn lambda_matrix(y: [f64; 3]) -> Matrix3<f64> {
    Matrix3::new(y[1], y[2], 0.0, y[0], 0.0, y[2], 0.0, y[0], y[1])
}

pub fn nu_matrix(y: [f64; 3]) -> Matrix3<f64> {
    let s = y.map(|v| v * v);
    Matrix3::new(0.0, s[1], s[2], s[0], 0.0, s[2], s[0], s[1], 0.0)
}

/// `(λ1, λ2, λ3)` of the off-diagonals `(f̂12, f̂13, f̂23)`.
pub fn lambda_of(y: [f64; 3], off: C3) -> C3 {
    [
        y[1] * off[0] + y[2] * off[1],
        y[0] * off[0] + y[2] * off[2],
        y[0] * off[1] + y[1] * off[2],
    ]
}

/// `(μ1, μ2, μ3)` of the diagonals `(f̂11, f̂22, f̂33)` and off-diagonals.
pub fn mu_of(y: [f64; 3], diag: C3, off: C3) -> C3 {
    let s = y.map(|v| v * v);
    [
        s[1] * diag[1] + s[2] * diag[2] + 2.0 * y[1] * y[2] * off[2],
        s[0] * diag[0] + s[2] * diag[2] + 2.0 * y[0] * y[2] * off[1],
        s[0] * diag[0] + s[1] * diag[1] + 2.0 * y[0] * y[1] * off[0],
    ]
}

/// Minimum-norm least-squares solution of `A x = b` for real `A`, complex `b`.
pub fn min_norm_solve(a: Matrix3<f64>, b: C3) -> C3 {
    let scale = a.abs().max();
    if scale == 0.0 {
        return [Complex64::new(0.0, 0.0); 3];
    }
    let pinv = (a / scale)
        .pseudo_inverse(1e-10)
        .expect("non-negative tolerance")
        / scale;
    let re = pinv * Vector3::new(b[0].re, b[1].re, b[2].re);
    let im = pinv * Vector3::new(b[0].im, b[1].im, b[2].im);
    std::array::from_fn(|i| Complex64::new(re[i], im[i]))
}

/// `(f̂12, f̂13, f̂23)` from `(λ1, λ2, λ3)` at frequency `y`.
pub fn offdiagonals_at(y: [f64; 3], l: C3) -> C3 {
    if is_singular(y) {
        return min_norm_solve(lambda_matrix(y), l);
    }
    let [y1, y2, y3] = y;
    [
        l[0] / (2.0 * y2) + l[1] / (2.0 * y1) - l[2] * y3 / (2.0 * y1 * y2),
        l[0] / (2.0 * y3) + l[2] / (2.0 * y1) - l[1] * y2 / (2.0 * y1 * y3),
        l[1] / (2.0 * y3) + l[2] / (2.0 * y2) - l[0] * y1 / (2.0 * y2 * y3),
    ]
}

/// `(f̂11, f̂22, f̂33)` from `λ` and `μ` at frequency `y`.
pub fn diagonals_at(y: [f64; 3], l: C3, m: C3) -> C3 {
    let [y1, y2, y3] = y;
    if is_singular(y) {
        let off = offdiagonals_at(y, l);
        let nu = [
            m[0] - 2.0 * y2 * y3 * off[2],
            m[1] - 2.0 * y1 * y3 * off[1],
            m[2] - 2.0 * y1 * y2 * off[0],
        ];
        return min_norm_solve(nu_matrix(y), nu);
    }
    [
        (m[1] + m[2] - m[0] + y2 * l[1] + y3 * l[2] - 3.0 * y1 * l[0]) / (2.0 * y1 * y1),
        (m[0] + m[2] - m[1] + y1 * l[0] + y3 * l[2] - 3.0 * y2 * l[1]) / (2.0 * y2 * y2),
        (m[1] + m[0] - m[2] + y2 * l[1] + y1 * l[0] - 3.0 * y3 * l[2]) / (2.0 * y3 * y3),
    ]
}
