//! Reconstruction of symmetric second-rank tensor fields from transverse ray
//! transform data measured about the three coordinate axes.

pub mod error;
pub mod backprojection;
pub mod calculus;
pub mod geometry;
pub mod io;
pub mod metrics;
pub mod phantoms;
pub mod projector;
pub mod reconstruct;
pub mod spectral;

pub use error::{Error, Result};
