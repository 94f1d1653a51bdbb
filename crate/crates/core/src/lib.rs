//! Maslov-index and eigenvalue-curve analysis of the spectral stability of
//! standing waves of one-dimensional nonlinear Schrödinger equations on a
//! bounded interval.

pub mod cli;
pub mod error;
pub mod grid;
pub mod hamflow;
pub mod maslov;
pub mod ode;
pub mod spectra;
pub mod stability;
pub mod waves;

pub use error::{Error, Result};
