//! Relativistic zero-range potentials for the Dirac equation.
//!
//! A configuration is a set of point centers, each carrying a Hermitian
//! 2x2 interaction matrix `K = varkappa I + kappa . sigma`. Bound states are
//! the roots of `det L(E) = 0` for the Hermitian matrix function `L(E)`
//! assembled in [`assembly`]; the eigenpairs of `L(E)` are the Sturmian
//! functions. Natural units are used throughout (hbar = c = m = 1).

pub mod analytic;
pub mod assembly;
pub mod cli;
pub mod error;
pub mod green;
pub mod model;
pub mod quadrature;
pub mod spectral;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
