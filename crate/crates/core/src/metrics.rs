//! Error measures between fields on a common grid.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{ScalarField3, SymTensorField3, VectorField3, COMPONENT_LABELS};
use crate::spectral::dft3;

/// Fraction of the Nyquist frequency kept by [`band_limited_relative_l2`].
pub const DEFAULT_BAND: f64 = 0.8;

fn same_grid(a: &ScalarField3, b: &ScalarField3) -> Result<()> {
    if a.grid != b.grid {
        return Err(Error::mismatch(format!(
            "fields on grids {:?} and {:?}",
            a.grid, b.grid
        )));
    }
    Ok(())
}

/// `‖a - b‖ / ‖b‖`; zero when both vanish, infinite when only `b` does.
pub fn relative_l2(a: &ScalarField3, b: &ScalarField3) -> Result<f64> {
    same_grid(a, b)?;
    let (mut num, mut den) = (0.0, 0.0);
    for (x, y) in a.data.iter().zip(b.data.iter()) {
        num += (x - y) * (x - y);
        den += y * y;
    }
    Ok(ratio(num, den))
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (num / den).sqrt()
    }
}

/// Relative L2 error restricted to frequencies `|y| <= band * π / h`.
pub fn band_limited_relative_l2(a: &ScalarField3, b: &ScalarField3, band: f64) -> Result<f64> {
    same_grid(a, b)?;
    let diff = ScalarField3 {
        grid: a.grid,
        data: &a.data - &b.data,
    };
    let (sd, sb) = (dft3(&diff), dft3(b));
    let cut = band * sd.nyquist();
    let (mut num, mut den) = (0.0, 0.0);
    for ((k3, k2, k1), d) in sd.data.indexed_iter() {
        let y = sd.frequency([k1, k2, k3]);
        if (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt() <= cut {
            num += d.norm_sqr();
            den += sb.data[[k3, k2, k1]].norm_sqr();
        }
    }
    Ok(ratio(num, den))
}

/// Per-component errors of a tensor field against a reference.
#[derive(Clone, Debug, Serialize)]
pub struct FieldComparison {
    pub components: Vec<ComponentError>,
    /// Error of the whole field, components weighted as stored.
    pub aggregate_relative_l2: f64,
    pub max_abs_difference: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentError {
    pub component: String,
    pub relative_l2: f64,
    pub band_limited_relative_l2: f64,
}

impl FieldComparison {
    pub fn worst_band_limited(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.band_limited_relative_l2)
            .fold(0.0, f64::max)
    }
}

pub fn compare_fields(a: &SymTensorField3, b: &SymTensorField3) -> Result<FieldComparison> {
    compare_components(
        &(0..6).map(|c| a.component(c)).collect::<Vec<_>>(),
        &(0..6).map(|c| b.component(c)).collect::<Vec<_>>(),
        &COMPONENT_LABELS,
    )
}

pub fn compare_vector_fields(a: &VectorField3, b: &VectorField3) -> Result<FieldComparison> {
    compare_components(
        &(0..3).map(|c| a.component(c)).collect::<Vec<_>>(),
        &(0..3).map(|c| b.component(c)).collect::<Vec<_>>(),
        &["u1", "u2", "u3"],
    )
}

pub fn compare_components(
    a: &[ScalarField3],
    b: &[ScalarField3],
    labels: &[&str],
) -> Result<FieldComparison> {
    if a.len() != b.len() || a.len() != labels.len() {
        return Err(Error::mismatch("component counts differ"));
    }
    let mut components = Vec::new();
    let (mut num, mut den, mut max_abs) = (0.0, 0.0, 0.0f64);
    for ((x, y), label) in a.iter().zip(b).zip(labels) {
        same_grid(x, y)?;
        for (p, q) in x.data.iter().zip(y.data.iter()) {
            num += (p - q) * (p - q);
            den += q * q;
            max_abs = max_abs.max((p - q).abs());
        }
        components.push(ComponentError {
            component: label.to_string(),
            relative_l2: relative_l2(x, y)?,
            band_limited_relative_l2: band_limited_relative_l2(x, y, DEFAULT_BAND)?,
        });
    }
    Ok(FieldComparison {
        components,
        aggregate_relative_l2: ratio(num, den),
        max_abs_difference: max_abs,
    })
}
