//! Polynomial de Rham complexes on simplices and their commuting
//! projection-based interpolation operators.
//!
//! The crate builds the spaces `W_{p+1} → Q_p → V_p → W_p` on the unit
//! tetrahedron (and the two-dimensional analogue on the unit triangle),
//! realizes the projection-based interpolants as staged constrained solves,
//! and provides the regularized Poincaré maps, discrete Sobolev norms and
//! convergence harness used to check them.

pub mod error;
pub mod linalg;
pub mod par;
pub mod calculus;
pub mod poincare;
pub mod projectors;
pub mod polyspace;
pub mod refsimplex;
pub mod report;
pub mod sobolev;
pub mod spectra;
pub mod studies;

pub use error::{Error, Result};
