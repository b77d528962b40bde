use crate::error::Result;
use crate::spectral::ops::fractional_symbol;
use crate::spectral::{gradient_norm_sq, inner_product, l2_norm_sq};

use super::integrator::hall_tendency;
use super::state::{SolverState, System};

/// Energy and dissipation rate of one state, both computed spectrally.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergySample {
    pub t: f64,
    /// `‖u‖₂² (+ ‖b‖₂²)`, or `‖θ‖₂²` for SQG.
    pub energy: f64,
    /// `ν‖∇u‖₂² (+ μ‖∇b‖₂²)`, or `κ‖Λ^{α/2}θ‖₂²` for SQG.
    pub dissipation: f64,
}

impl EnergySample {
    pub fn of(state: &SolverState) -> EnergySample {
        let c = state.constants;
        let (energy, dissipation) = match state.system {
            System::Sqg => {
                let theta = &state.primary;
                let half = theta.apply_multiplier(&fractional_symbol(state.grid(), 0.5 * c.alpha));
                (l2_norm_sq(theta), c.kappa * l2_norm_sq(&half))
            }
            _ => {
                let u = &state.primary;
                let mut e = l2_norm_sq(u);
                let mut d = c.nu * gradient_norm_sq(u);
                if let Some(b) = &state.magnetic {
                    e += l2_norm_sq(b);
                    d += c.mu * gradient_norm_sq(b);
                }
                (e, d)
            }
        };
        EnergySample {
            t: state.t,
            energy,
            dissipation,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BudgetRow {
    pub t: f64,
    pub energy: f64,
    /// `2∫₀ᵗ D ds` by the trapezoid rule.
    pub dissipated: f64,
    /// `E(t) + 2∫₀ᵗ D ds - E(0)`.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BudgetReport {
    pub rows: Vec<BudgetRow>,
    pub initial_energy: f64,
}

impl BudgetReport {
    fn relative(&self, x: f64) -> f64 {
        if self.initial_energy > 0.0 {
            x / self.initial_energy
        } else {
            x
        }
    }

    /// `max_t |residual(t)| / E(0)`.
    pub fn max_relative_residual(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| self.relative(r.residual.abs()))
            .fold(0.0, f64::max)
    }

    /// Largest relative increase of `E` between consecutive samples;
    /// non-positive when the energy never grows.
    pub fn max_relative_increase(&self) -> f64 {
        self.rows
            .windows(2)
            .map(|w| self.relative(w[1].energy - w[0].energy))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest relative deviation of `E(t)` from `E(0)`.
    pub fn max_relative_drift(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| self.relative((r.energy - self.initial_energy).abs()))
            .fold(0.0, f64::max)
    }
}

/// Discrete energy balance `E(t) + 2∫₀ᵗ D - E(0)` over a sampled history.
pub fn energy_budget(history: &[EnergySample]) -> BudgetReport {
    let Some(first) = history.first() else {
        return BudgetReport {
            rows: Vec::new(),
            initial_energy: 0.0,
        };
    };
    let mut integral = 0.0;
    let mut rows = Vec::with_capacity(history.len());
    for (i, s) in history.iter().enumerate() {
        if i > 0 {
            let p = &history[i - 1];
            integral += 0.5 * (s.t - p.t) * (s.dissipation + p.dissipation);
        }
        rows.push(BudgetRow {
            t: s.t,
            energy: s.energy,
            dissipated: 2.0 * integral,
            residual: s.energy + 2.0 * integral - first.energy,
        });
    }
    BudgetReport {
        rows,
        initial_energy: first.energy,
    }
}

/// `∫ H·b dx` for the Hall tendency `H`; zero up to roundoff. `None` for
/// systems without a Hall term.
pub fn hall_power(state: &SolverState) -> Result<Option<f64>> {
    match (&state.magnetic, state.system) {
        (Some(b), System::HallMhd) => Ok(Some(inner_product(&hall_tendency(b)?, b)?)),
        _ => Ok(None),
    }
}
