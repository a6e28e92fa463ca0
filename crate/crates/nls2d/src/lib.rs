//! Pseudospectral simulator and diagnostics library for the 2D cubic
//! defocusing nonlinear Schrödinger equation `i u_t + Delta u = |u|^2 u` on a
//! periodic box.
//!
//! The crate provides:
//!
//! - spectral substrate: grids, transforms, Fourier multipliers, periodic
//!   convolution, dealiased products, norms, initial-data synthesis;
//! - a Strang-split time integrator with conserved-quantity tracking;
//! - the smoothing multiplier `I_N`, the modified energy `E(Iu)`, the
//!   commutator `I(|u|^2 u) - |Iu|^2 Iu`, cutoff sweeps, dyadic region
//!   certificates, and scaling-planner arithmetic;
//! - the interaction Morawetz weight, action, derivative decomposition, and
//!   inequality checks, all reduced to FFT convolutions;
//! - brute-force oracles that certify the fast paths at tiny grid sizes.

pub mod error;
mod fft;
pub mod field;
pub mod grid;
pub mod imethod;
pub mod morawetz;
pub mod norms;
pub mod oracle;
pub mod snapshot;
pub mod solver;
pub mod spectral;
pub mod synth;

pub use error::{Error, Result};
pub use field::{Field, Spectrum};
pub use grid::Grid;
