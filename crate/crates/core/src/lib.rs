//! Discrete-kinetic BGK relaxation solvers for (possibly degenerate)
//! advection-diffusion systems, integrated in time with projective forward
//! Euler and projective Runge-Kutta schemes.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] builds the kinetic velocity sets and Maxwellians and checks
//!   their monotonicity.
//! * [`grid`] holds uniform grids, macroscopic and kinetic fields and ghost
//!   cell handling.
//! * [`transport`] discretizes the advection of each kinetic component and
//!   assembles the semidiscrete operator.
//! * [`integrate`] contains the inner/outer time integrators.
//! * [`spectral`] provides Fourier symbols, spectra and amplification factors.
//! * [`problems`] is the catalog of test problems.
//! * [`harness`] drives convergence studies, benchmarks and snapshots.

pub mod grid;
pub mod harness;
pub mod integrate;
pub mod model;
pub mod problems;
pub mod spectral;
pub mod transport;

mod error;

pub use error::{Error, Result};
