//! Ultra-strong coupling cavity QED in the cavity–dresser–emitter geometry.
//!
//! Everything is expressed in units of the dresser frequency, with
//! `hbar = eps0 = c = 1`, so lengths are in units of `r0 = c / omega_d`.
//!
//! The crate is organised bottom-up:
//! - [`params`]: parameter model, unit conventions and config ingestion
//! - [`hopfield`]: two-mode polaritons and the three-mode eigenproblem
//! - [`vacuum`]: fluctuations and virtual populations of the dressed vacuum
//! - [`correlator`]: TM0 correlator, Fourier kernel and real-space potential
//! - [`emission`]: dressed linewidths and Purcell rates
//! - [`classical`]: dynamical matrix, transmission, permittivity
//! - [`tomography`]: reconstruction of the mixing angle from spectra

pub mod classical;
pub mod correlator;
pub mod emission;
mod error;
pub mod hopfield;
pub mod params;
pub mod tomography;
pub mod vacuum;

pub use error::{Error, ErrorKind, Result};
pub use hopfield::Branch;
pub use params::{CavityDispersion, SystemParams};
