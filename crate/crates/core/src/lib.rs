//! Sampled-grid harmonic analysis on periodic boxes in dimensions 1 and 2:
//! amalgam and Fofana norms, maximal operators, Riesz transforms, Poisson and
//! heat extensions, and the harmonic and temperature Cauchy-Riemann systems.

pub mod cauchy_riemann;
pub mod error;
mod fft;
pub mod grid;
pub mod hardy_fofana;
pub mod kernels;
pub mod maximal;
pub mod norms;
pub mod transforms;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use cauchy_riemann::{CRSystem, ResidualReport, SystemKind};
pub use error::{Error, Result};
pub use grid::{make_grid, sample, ComplexGridFunction, GridFunction, GridSpec, Ladder, Scalar};
pub use hardy_fofana::{CharacterizationReport, Ladders};
pub use kernels::{KernelSample, MollifierShape};
pub use maximal::ConeSpec;
pub use norms::{amalgam_norm, dilate, fofana_norm, lp_norm, morrey_norm, Exponents, NormReport};
pub use transforms::{Slab, Symbol};
