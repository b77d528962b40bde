//! Pseudo-spectral integrators for the dissipative systems on the torus.
//!
//! Each system is written as `∂ₜy = L y + N(y)` with a diagonal linear part
//! `L` (viscous or fractional dissipation) and a quadratic part `N` formed
//! in physical space. Time stepping is classical RK4 applied in the
//! integrating-factor variable `e^{-Lt} y`, so the dissipative factor is
//! exact and only `N` carries discretization error.

mod budget;
mod init;
mod integrator;
mod state;

pub use budget::{energy_budget, hall_power, BudgetReport, BudgetRow, EnergySample};
pub use init::InitialCondition;
pub use integrator::{cfl_limit, rhs, step, Integrator, Tendency};
pub use state::{Constants, SolverState, System};

/// Relative divergence allowed in a solver state.
pub const DIVERGENCE_TOL: f64 = 1e-8;

#[cfg(test)]
mod tests;
