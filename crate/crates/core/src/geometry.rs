//! Grids, symmetric tensors, rays and rotation frames.
//!
//! Every field in the crate lives on a cubic [`VoxelGrid3`] covering
//! `[-extent, extent]^3`. Field storage puts the tensor component index
//! fastest, then `x1`, `x2` and `x3`, so an `ndarray` view of the data has
//! shape `[n3][n2][n1][component]`.

use ndarray::{Array3, Array4, Axis};

use crate::error::{Error, Result};

/// Tolerance used for unit-norm and orthogonality checks on directions.
pub const DIRECTION_TOL: f64 = 1e-12;

/// Component order of a stored symmetric tensor.
pub const COMPONENTS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// Human readable labels in storage order.
pub const COMPONENT_LABELS: [&str; 6] = ["f11", "f12", "f13", "f22", "f23", "f33"];

/// Storage slot of the `(i, j)` entry, zero based.
pub const fn component_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    match (i, j) {
        (0, 0) => 0,
        (0, 1) => 1,
        (0, 2) => 2,
        (1, 1) => 3,
        (1, 2) => 4,
        _ => 5,
    }
}

/// One of the three coordinate axes, used as a rotation axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoordAxis {
    E1,
    E2,
    E3,
}

impl CoordAxis {
    pub const ALL: [CoordAxis; 3] = [CoordAxis::E1, CoordAxis::E2, CoordAxis::E3];

    pub fn index(self) -> usize {
        match self {
            CoordAxis::E1 => 0,
            CoordAxis::E2 => 1,
            CoordAxis::E3 => 2,
        }
    }

    pub fn from_index(i: usize) -> Result<Self> {
        match i {
            0 => Ok(CoordAxis::E1),
            1 => Ok(CoordAxis::E2),
            2 => Ok(CoordAxis::E3),
            _ => Err(Error::invalid(format!("axis index {i} out of range"))),
        }
    }

    /// Recognises `±e_k` given as a 3-vector.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        for axis in Self::ALL {
            let u = axis.unit();
            let dot = dot(u, v);
            let rest = norm(sub(v, scale(u, dot)));
            if (dot - 1.0).abs() <= DIRECTION_TOL && rest <= DIRECTION_TOL {
                return Ok(axis);
            }
        }
        Err(Error::invalid(format!(
            "rotation axis {v:?} is not a coordinate axis"
        )))
    }

    pub fn unit(self) -> [f64; 3] {
        let mut u = [0.0; 3];
        u[self.index()] = 1.0;
        u
    }

    /// Indices `(a, b)` of the in-plane basis with `e_a x e_b = η`.
    pub fn in_plane(self) -> (usize, usize) {
        match self {
            CoordAxis::E1 => (1, 2),
            CoordAxis::E2 => (2, 0),
            CoordAxis::E3 => (0, 1),
        }
    }
}

impl std::fmt::Display for CoordAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "e{}", self.index() + 1)
    }
}

pub fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn check_unit(v: [f64; 3], what: &str) -> Result<()> {
    let len = norm(v);
    if !len.is_finite() || (len - 1.0).abs() > DIRECTION_TOL {
        return Err(Error::invalid(format!(
            "{what} must be a unit vector, |v| = {len}"
        )));
    }
    Ok(())
}

/// Cubic voxel lattice on `[-extent, extent]^3` with `n` voxels per edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VoxelGrid3 {
    n: usize,
    extent: f64,
}

impl VoxelGrid3 {
    pub fn new(n: usize, extent: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("grid needs n >= 2, got {n}")));
        }
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(Error::invalid(format!("grid extent must be > 0, got {extent}")));
        }
        Ok(VoxelGrid3 { n, extent })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn voxel_size(&self) -> f64 {
        2.0 * self.extent / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of the centre of voxel `i` along any axis.
    pub fn center(&self, i: usize) -> f64 {
        -self.extent + (i as f64 + 0.5) * self.voxel_size()
    }

    /// Physical position of the voxel centre with indices `[i1, i2, i3]`.
    pub fn position(&self, idx: [usize; 3]) -> [f64; 3] {
        [self.center(idx[0]), self.center(idx[1]), self.center(idx[2])]
    }

    /// Flat voxel index, `x1` fastest.
    pub fn flat(&self, idx: [usize; 3]) -> usize {
        (idx[2] * self.n + idx[1]) * self.n + idx[0]
    }

    pub fn unflat(&self, flat: usize) -> [usize; 3] {
        let n = self.n;
        [flat % n, (flat / n) % n, flat / (n * n)]
    }

    /// A grid with the same voxel size and `pad` extra voxels on every side.
    pub fn padded(&self, pad: usize) -> VoxelGrid3 {
        let n = self.n + 2 * pad;
        VoxelGrid3 {
            n,
            extent: self.extent * n as f64 / self.n as f64,
        }
    }

    /// Same extent, `n / factor` voxels per edge.
    pub fn coarsened(&self, factor: usize) -> Result<VoxelGrid3> {
        if factor == 0 || self.n % factor != 0 {
            return Err(Error::invalid(format!(
                "factor {factor} does not divide grid size {}",
                self.n
            )));
        }
        VoxelGrid3::new(self.n / factor, self.extent)
    }
}

/// A symmetric 3x3 tensor stored as `(f11, f12, f13, f22, f23, f33)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SymTensor3(pub [f64; 6]);

impl SymTensor3 {
    pub fn zero() -> Self {
        SymTensor3([0.0; 6])
    }

    pub fn identity() -> Self {
        SymTensor3([1.0, 0.0, 0.0, 1.0, 0.0, 1.0])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[component_index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.0[component_index(i, j)] = v;
    }

    pub fn to_matrix(&self) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.get(i, j);
            }
        }
        m
    }

    /// Symmetric part of an arbitrary matrix.
    pub fn from_matrix(m: [[f64; 3]; 3]) -> Self {
        let mut t = SymTensor3::zero();
        for &(i, j) in COMPONENTS.iter() {
            t.set(i, j, 0.5 * (m[i][j] + m[j][i]));
        }
        t
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let m = self.to_matrix();
        [dot(m[0], v), dot(m[1], v), dot(m[2], v)]
    }

    /// `<a, t b>`.
    pub fn bilinear(&self, a: [f64; 3], b: [f64; 3]) -> f64 {
        dot(a, self.apply(b))
    }
}

/// `P_ξ t = Π t Π` with `Π = I - ξξᵀ`; the result annihilates `ξ`.
pub fn project_transverse(t: &SymTensor3, xi: [f64; 3]) -> Result<SymTensor3> {
    check_unit(xi, "ray direction")?;
    let m = t.to_matrix();
    let mut pi = [[0.0; 3]; 3];
    for (i, row) in pi.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = if i == j { 1.0 } else { 0.0 } - xi[i] * xi[j];
        }
    }
    let mut tp = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            tp[i][j] = (0..3).map(|k| m[i][k] * pi[k][j]).sum();
        }
    }
    let mut out = SymTensor3::zero();
    for &(i, j) in COMPONENTS.iter() {
        let v: f64 = (0..3).map(|k| pi[i][k] * tp[k][j]).sum();
        out.set(i, j, v);
    }
    Ok(out)
}

/// Two dimensional adjugate of the block of `t` acting on `η⊥`.
///
/// In the in-plane basis `(a, b)` the block `[[t_aa, t_ab], [t_ab, t_bb]]`
/// becomes `[[t_bb, -t_ab], [-t_ab, t_aa]]`; entries touching `η` are zero.
pub fn adjugate2(t: &SymTensor3, axis: CoordAxis) -> SymTensor3 {
    let (a, b) = axis.in_plane();
    let mut out = SymTensor3::zero();
    out.set(a, a, t.get(b, b));
    out.set(b, b, t.get(a, a));
    out.set(a, b, -t.get(a, b));
    out
}

/// Oriented line `{x + tξ}` with `|ξ| = 1` and `<ξ, x> = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray {
    direction: [f64; 3],
    base: [f64; 3],
}

impl Ray {
    pub fn new(direction: [f64; 3], base: [f64; 3]) -> Result<Self> {
        check_unit(direction, "ray direction")?;
        let d = dot(direction, base);
        if d.abs() > DIRECTION_TOL * norm(base).max(1.0) {
            return Err(Error::invalid(format!(
                "ray base point must be orthogonal to the direction, <ξ,x> = {d}"
            )));
        }
        Ok(Ray { direction, base })
    }

    /// Ray through an arbitrary point; the base is moved onto `ξ⊥`.
    pub fn through(direction: [f64; 3], point: [f64; 3]) -> Result<Self> {
        check_unit(direction, "ray direction")?;
        let base = sub(point, scale(direction, dot(direction, point)));
        Ok(Ray { direction, base })
    }

    pub fn direction(&self) -> [f64; 3] {
        self.direction
    }

    pub fn base(&self) -> [f64; 3] {
        self.base
    }

    pub fn at(&self, t: f64) -> [f64; 3] {
        add(self.base, scale(self.direction, t))
    }

    pub fn reversed(&self) -> Ray {
        Ray {
            direction: scale(self.direction, -1.0),
            base: self.base,
        }
    }
}

/// Rotation about a coordinate axis `η` by angle `θ`.
///
/// With in-plane basis `(a, b)`, `ξ = cosθ a + sinθ b` and `ζ = ξ × η`,
/// so `(η, ζ, ξ)` is a right-handed orthonormal triple.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisFrame {
    pub axis: CoordAxis,
    pub theta: f64,
}

impl AxisFrame {
    pub fn new(axis: CoordAxis, theta: f64) -> Self {
        AxisFrame { axis, theta }
    }

    pub fn eta(&self) -> [f64; 3] {
        self.axis.unit()
    }

    /// `(cosθ, sinθ)`, the ray direction in the `(a, b)` basis.
    pub fn xi_in_plane(&self) -> [f64; 2] {
        let (s, c) = self.theta.sin_cos();
        [c, s]
    }

    /// `ζ` in the `(a, b)` basis.
    pub fn zeta_in_plane(&self) -> [f64; 2] {
        zeta_from_xi(self.xi_in_plane())
    }

    pub fn xi(&self) -> [f64; 3] {
        self.embed(self.xi_in_plane())
    }

    pub fn zeta(&self) -> [f64; 3] {
        self.embed(self.zeta_in_plane())
    }

    fn embed(&self, v: [f64; 2]) -> [f64; 3] {
        let (a, b) = self.axis.in_plane();
        let mut out = [0.0; 3];
        out[a] = v[0];
        out[b] = v[1];
        out
    }

    /// The ray with axial coordinate `s = <x, η>` and detector offset `p` along `ζ`.
    pub fn ray(&self, s: f64, p: f64) -> Ray {
        let base = add(scale(self.eta(), s), scale(self.zeta(), p));
        Ray {
            direction: self.xi(),
            base,
        }
    }
}

/// In-plane `ζ = ξ × η` for `ξ` given in the `(a, b)` basis.
pub(crate) fn zeta_from_xi(xi: [f64; 2]) -> [f64; 2] {
    [xi[1], -xi[0]]
}

/// Dense scalar field on a grid, indexed `[i3][i2][i1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField3 {
    pub grid: VoxelGrid3,
    pub data: Array3<f64>,
}

impl ScalarField3 {
    pub fn zeros(grid: VoxelGrid3) -> Self {
        let n = grid.n();
        ScalarField3 {
            grid,
            data: Array3::zeros((n, n, n)),
        }
    }

    pub fn from_fn(grid: VoxelGrid3, f: impl Fn([f64; 3]) -> f64) -> Self {
        let n = grid.n();
        let data = Array3::from_shape_fn((n, n, n), |(i3, i2, i1)| f(grid.position([i1, i2, i3])));
        ScalarField3 { grid, data }
    }

    pub fn get(&self, idx: [usize; 3]) -> f64 {
        self.data[[idx[2], idx[1], idx[0]]]
    }

    /// Central `inner` voxels of a padded field.
    pub fn crop_center(&self, inner: VoxelGrid3) -> Result<ScalarField3> {
        let n = self.grid.n();
        let m = inner.n();
        if m > n || (n - m) % 2 != 0 {
            return Err(Error::mismatch(format!("cannot crop {n}^3 to {m}^3")));
        }
        let o = (n - m) / 2;
        let data = self
            .data
            .slice(ndarray::s![o..o + m, o..o + m, o..o + m])
            .to_owned();
        Ok(ScalarField3 { grid: inner, data })
    }

    /// Embeds this field in the centre of a larger zero field.
    pub fn pad_to(&self, outer: VoxelGrid3) -> Result<ScalarField3> {
        let n = self.grid.n();
        let m = outer.n();
        if m < n || (m - n) % 2 != 0 {
            return Err(Error::mismatch(format!("cannot pad {n}^3 to {m}^3")));
        }
        let o = (m - n) / 2;
        let mut out = ScalarField3::zeros(outer);
        out.data
            .slice_mut(ndarray::s![o..o + n, o..o + n, o..o + n])
            .assign(&self.data);
        Ok(out)
    }
}

/// Vector field with three components per voxel, indexed `[i3][i2][i1][k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField3 {
    pub grid: VoxelGrid3,
    pub data: Array4<f64>,
}

impl VectorField3 {
    pub fn zeros(grid: VoxelGrid3) -> Self {
        let n = grid.n();
        VectorField3 {
            grid,
            data: Array4::zeros((n, n, n, 3)),
        }
    }

    pub fn from_fn(grid: VoxelGrid3, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let mut out = VectorField3::zeros(grid);
        for ((i3, i2, i1, k), v) in out.data.indexed_iter_mut() {
            // evaluated three times per voxel; fine for phantom set-up
            *v = f(grid.position([i1, i2, i3]))[k];
        }
        out
    }

    pub fn component(&self, k: usize) -> ScalarField3 {
        ScalarField3 {
            grid: self.grid,
            data: self.data.index_axis(Axis(3), k).to_owned(),
        }
    }

    pub fn set_component(&mut self, k: usize, field: &ScalarField3) {
        self.data.index_axis_mut(Axis(3), k).assign(&field.data);
    }
}

/// Symmetric tensor field, six components per voxel, indexed `[i3][i2][i1][c]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensorField3 {
    pub grid: VoxelGrid3,
    pub data: Array4<f64>,
}

impl SymTensorField3 {
    pub fn zeros(grid: VoxelGrid3) -> Self {
        let n = grid.n();
        SymTensorField3 {
            grid,
            data: Array4::zeros((n, n, n, 6)),
        }
    }

    pub fn from_fn(grid: VoxelGrid3, f: impl Fn([f64; 3]) -> SymTensor3) -> Self {
        let mut out = SymTensorField3::zeros(grid);
        let n = grid.n();
        for i3 in 0..n {
            for i2 in 0..n {
                for i1 in 0..n {
                    let t = f(grid.position([i1, i2, i3]));
                    for c in 0..6 {
                        out.data[[i3, i2, i1, c]] = t.0[c];
                    }
                }
            }
        }
        out
    }

    pub fn from_components(components: [&ScalarField3; 6]) -> Result<Self> {
        let grid = components[0].grid;
        let mut out = SymTensorField3::zeros(grid);
        for (c, f) in components.iter().enumerate() {
            if f.grid != grid {
                return Err(Error::mismatch("tensor components on different grids"));
            }
            out.set_component(c, f);
        }
        Ok(out)
    }

    pub fn tensor(&self, idx: [usize; 3]) -> SymTensor3 {
        let mut t = [0.0; 6];
        for (c, v) in t.iter_mut().enumerate() {
            *v = self.data[[idx[2], idx[1], idx[0], c]];
        }
        SymTensor3(t)
    }

    pub fn set_tensor(&mut self, idx: [usize; 3], t: &SymTensor3) {
        for c in 0..6 {
            self.data[[idx[2], idx[1], idx[0], c]] = t.0[c];
        }
    }

    /// Storage slot `c` as a scalar field.
    pub fn component(&self, c: usize) -> ScalarField3 {
        ScalarField3 {
            grid: self.grid,
            data: self.data.index_axis(Axis(3), c).to_owned(),
        }
    }

    pub fn set_component(&mut self, c: usize, field: &ScalarField3) {
        self.data.index_axis_mut(Axis(3), c).assign(&field.data);
    }

    /// Raw payload in storage order.
    pub fn as_slice(&self) -> &[f64] {
        self.data
            .as_slice()
            .expect("tensor field storage is always standard layout")
    }
}

/// The `n x n x 6` slab of a tensor field on the plane `<x, η> = s`.
///
/// Slab indices are `[i_b][i_a][c]` in the in-plane basis of the axis.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorSlab {
    pub axis: CoordAxis,
    pub s_index: usize,
    pub data: Array3<f64>,
}

pub(crate) fn slab_to_grid(axis: CoordAxis, s: usize, ia: usize, ib: usize) -> [usize; 3] {
    let (a, b) = axis.in_plane();
    let mut idx = [0; 3];
    idx[axis.index()] = s;
    idx[a] = ia;
    idx[b] = ib;
    idx
}

pub fn slice_field(f: &SymTensorField3, axis: CoordAxis, s_index: usize) -> Result<TensorSlab> {
    let n = f.grid.n();
    if s_index >= n {
        return Err(Error::invalid(format!(
            "plane index {s_index} out of range for n = {n}"
        )));
    }
    let mut data = Array3::zeros((n, n, 6));
    for ib in 0..n {
        for ia in 0..n {
            let g = slab_to_grid(axis, s_index, ia, ib);
            for c in 0..6 {
                data[[ib, ia, c]] = f.data[[g[2], g[1], g[0], c]];
            }
        }
    }
    Ok(TensorSlab {
        axis,
        s_index,
        data,
    })
}

/// Reassembles a field from a full set of slabs along one axis.
pub fn stack_slices(grid: VoxelGrid3, slabs: &[TensorSlab]) -> Result<SymTensorField3> {
    let n = grid.n();
    if slabs.len() != n {
        return Err(Error::mismatch(format!(
            "need {n} slabs, got {}",
            slabs.len()
        )));
    }
    let mut out = SymTensorField3::zeros(grid);
    let mut seen = vec![false; n];
    for slab in slabs {
        if slab.data.dim() != (n, n, 6) || slab.s_index >= n || seen[slab.s_index] {
            return Err(Error::mismatch("slab set does not partition the grid"));
        }
        seen[slab.s_index] = true;
        for ib in 0..n {
            for ia in 0..n {
                let g = slab_to_grid(slab.axis, slab.s_index, ia, ib);
                for c in 0..6 {
                    out.data[[g[2], g[1], g[0], c]] = slab.data[[ib, ia, c]];
                }
            }
        }
    }
    Ok(out)
}
