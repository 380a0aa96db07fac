//! Uncertainty principles on Z_N^d and exact recovery of sparse signals from
//! partial Fourier data.
//!
//! * [`spectral`]: the transform (`n^(-d)` forward normalisation), band
//!   limiting and numerical supports.
//! * [`analytics`]: structure constants of sets (Fourier peak, Salem level,
//!   additive energy) and subgroup/annihilator constructions.
//! * [`bounds`]: restriction estimates, uncertainty-principle audits and
//!   the sufficient conditions for recovery.
//! * [`recovery`]: direct rounding, finite-alphabet rounding, uniqueness
//!   certificates and an exhaustive sparse-recovery oracle.
//! * [`io`]: the JSON file formats.

pub mod analytics;
pub mod bounds;
pub mod error;
pub mod grid;
pub mod io;
mod linalg;
pub mod recovery;
pub mod rng;
pub mod set;
pub mod signal;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::{GridParams, Point, DEFAULT_GRID_CAP};
pub use set::IndexSet;
pub use signal::{Domain, Signal};
