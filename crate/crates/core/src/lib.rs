//! Littlewood-Paley wavenumber splitting for dissipative fluid equations
//! on the periodic torus.
//!
//! The crate is organized bottom-up:
//!
//! * [`spectral`]: grids, fields, Fourier multipliers, Leray projection, norms.
//! * [`lp`]: dyadic partition of unity, shell projections, Besov/Sobolev norms.
//! * [`paraproduct`]: Bony decomposition, transport and Hall commutators,
//!   cancellation identities.
//! * [`solver`]: pseudo-spectral integrators for NSE, SQG, MHD and Hall-MHD.
//! * [`diagnostics`]: dissipation wavenumber, Kolmogorov statistics and the
//!   regularity-criteria battery.
//! * [`verify`]: seeded randomized sweeps behind the property suites.

pub mod diagnostics;
pub mod error;
pub mod lp;
pub mod paraproduct;
pub mod solver;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use lp::{BumpProfile, DyadicPartition, ShellDecomposition};
pub use spectral::{DiffOp, Field, Grid, Rep};
