use crate::error::{Error, Result};
use crate::spectral::ops::fractional_symbol;
use crate::spectral::{
    advect, cross, dealias, differentiate, leray_project, lp_norm, DiffOp, Field,
};

use super::state::{sqg_velocity, SolverState, System};

/// Time derivative of a state, split like the state itself.
#[derive(Clone, Debug)]
pub struct Tendency {
    pub primary: Field,
    pub magnetic: Option<Field>,
}

fn vars(state: &SolverState) -> Vec<Field> {
    let mut v = vec![state.primary.clone()];
    if let Some(b) = &state.magnetic {
        v.push(b.clone());
    }
    v
}

/// Linear symbols `L(k)` per variable.
fn symbols(state: &SolverState) -> Vec<Vec<f64>> {
    let grid = state.grid();
    let c = state.constants;
    let k2 = fractional_symbol(grid, 2.0);
    let scaled = |s: &[f64], a: f64| s.iter().map(|x| -a * x).collect::<Vec<f64>>();
    match state.system {
        System::Sqg => vec![scaled(&fractional_symbol(grid, c.alpha), c.kappa)],
        System::Mhd | System::HallMhd => vec![scaled(&k2, c.nu), scaled(&k2, c.mu)],
        System::Nse2d | System::Nse3d => vec![scaled(&k2, c.nu)],
    }
}

fn mean_free(f: &Field) -> Field {
    let mut mask = vec![1.0; f.grid().len()];
    mask[0] = 0.0;
    f.apply_multiplier(&mask)
}

/// Quadratic part of the tendency.
fn nonlinear(system: System, y: &[Field]) -> Result<Vec<Field>> {
    match system {
        System::Nse2d | System::Nse3d => {
            let u = &y[0];
            Ok(vec![leray_project(&advect(u, u)?)?.scale(-1.0)])
        }
        System::Sqg => {
            let theta = &y[0];
            let u = sqg_velocity(theta);
            // u·∇θ = ∇·(uθ) has zero mean; drop the roundoff in it so the
            // mean of θ is conserved exactly.
            Ok(vec![mean_free(&advect(&u, theta)?).scale(-1.0)])
        }
        System::Mhd | System::HallMhd => {
            let (u, b) = (&y[0], &y[1]);
            let nu = advect(u, u)?.sub(&advect(b, b)?)?;
            let mut nb = advect(b, u)?.sub(&advect(u, b)?)?;
            if system == System::HallMhd {
                nb = nb.add(&hall_tendency(b)?)?;
            }
            Ok(vec![
                leray_project(&nu)?.scale(-1.0),
                leray_project(&nb)?,
            ])
        }
    }
}

/// Contribution of the Hall term `-∇×((∇×b)×b)` to `∂ₜb`. The term sits
/// on the left of the induction equation, so its tendency is
/// `+∇×((∇×b)×b)`.
pub(crate) fn hall_tendency(b: &Field) -> Result<Field> {
    let j = differentiate(b, DiffOp::Curl)?;
    differentiate(&cross(&j, b)?, DiffOp::Curl)
}

/// Full tendency `L y + N(y)` with pressure removed.
pub fn rhs(state: &SolverState) -> Result<Tendency> {
    let y = vars(state);
    let n = nonlinear(state.system, &y)?;
    check_finite(state.system, &n, state.t)?;
    let mut out = y
        .iter()
        .zip(symbols(state))
        .zip(n)
        .map(|((yi, l), ni)| yi.apply_multiplier(&l).add(&ni))
        .collect::<Result<Vec<_>>>()?;
    let magnetic = if out.len() == 2 { out.pop() } else { None };
    Ok(Tendency {
        primary: out.pop().unwrap(),
        magnetic,
    })
}

fn var_name(system: System, i: usize) -> &'static str {
    match (system, i) {
        (System::Sqg, _) => "theta",
        (_, 0) => "u",
        _ => "b",
    }
}

fn check_finite(system: System, y: &[Field], t: f64) -> Result<()> {
    for (i, f) in y.iter().enumerate() {
        if !f.is_finite() {
            return Err(Error::NonFinite {
                field: var_name(system, i).to_string(),
                t,
            });
        }
    }
    Ok(())
}

/// Advisory step bound `0.5·h/‖u‖_∞`; infinite for a motionless fluid.
pub fn cfl_limit(state: &SolverState) -> f64 {
    let umax = lp_norm(&state.velocity(), f64::INFINITY).unwrap_or(0.0);
    if umax == 0.0 {
        f64::INFINITY
    } else {
        0.5 * state.grid().spacing() / umax
    }
}

struct Factors {
    dt: f64,
    half: Vec<Vec<f64>>,
    full: Vec<Vec<f64>>,
}

/// Integrating-factor RK4 stepper. Caches `e^{L dt}` and `e^{L dt/2}` for
/// the last step size used.
pub struct Integrator {
    system: System,
    symbols: Vec<Vec<f64>>,
    factors: Option<Factors>,
}

impl Integrator {
    pub fn new(state: &SolverState) -> Integrator {
        Integrator {
            system: state.system,
            symbols: symbols(state),
            factors: None,
        }
    }

    fn factors(&mut self, dt: f64) -> &Factors {
        if self.factors.as_ref().is_none_or(|f| f.dt != dt) {
            let exp = |h: f64| {
                self.symbols
                    .iter()
                    .map(|l| l.iter().map(|x| (x * h).exp()).collect())
                    .collect()
            };
            self.factors = Some(Factors {
                dt,
                half: exp(0.5 * dt),
                full: exp(dt),
            });
        }
        self.factors.as_ref().unwrap()
    }

    /// Advances `state` by `dt`. The CFL bound is advisory and only logged.
    pub fn step(&mut self, state: &SolverState, dt: f64) -> Result<SolverState> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {dt}")));
        }
        if state.system != self.system {
            return Err(Error::SystemMismatch(format!(
                "integrator built for {}, state is {}",
                self.system, state.system
            )));
        }
        let cfl = cfl_limit(state);
        if dt > cfl {
            log::warn!("dt = {dt} exceeds the CFL limit {cfl:.3e} at t = {}", state.t);
        }
        let system = self.system;
        let t = state.t;
        let f = self.factors(dt);
        let e = |m: &[Vec<f64>], y: &[Field]| -> Vec<Field> {
            y.iter().zip(m).map(|(yi, mi)| yi.apply_multiplier(mi)).collect()
        };
        let axpy = |x: &[Field], a: f64, y: &[Field]| -> Result<Vec<Field>> {
            x.iter().zip(y).map(|(xi, yi)| xi.axpy(a, yi)).collect()
        };
        let nl = |y: &[Field]| -> Result<Vec<Field>> {
            let n = nonlinear(system, y)?;
            check_finite(system, &n, t)?;
            Ok(n)
        };

        let y = vars(state);
        let ey_half = e(&f.half, &y);
        let ey_full = e(&f.full, &y);

        let k1 = nl(&y)?;
        let k2 = nl(&e(&f.half, &axpy(&y, 0.5 * dt, &k1)?))?;
        let k3 = nl(&axpy(&ey_half, 0.5 * dt, &k2)?)?;
        let k4 = nl(&axpy(&ey_full, dt, &e(&f.half, &k3))?)?;

        let mid = e(&f.half, &axpy(&k2, 1.0, &k3)?);
        let mut incr = axpy(&e(&f.full, &k1), 2.0, &mid)?;
        incr = axpy(&incr, 1.0, &k4)?;
        let mut next = axpy(&ey_full, dt / 6.0, &incr)?;

        next = next
            .into_iter()
            .map(|v| {
                let v = dealias(&v);
                if system.is_scalar() {
                    Ok(v)
                } else {
                    leray_project(&v)
                }
            })
            .collect::<Result<_>>()?;
        check_finite(system, &next, t + dt)?;
        let magnetic = if next.len() == 2 { next.pop() } else { None };
        Ok(SolverState {
            system,
            constants: state.constants,
            t: t + dt,
            primary: next.pop().unwrap(),
            magnetic,
        })
    }
}

/// One step with a fresh [`Integrator`].
pub fn step(state: &SolverState, dt: f64) -> Result<SolverState> {
    Integrator::new(state).step(state, dt)
}
