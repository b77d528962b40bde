use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::spectral::{dealias, leray_project, riesz_perp, Field, Grid};

use super::DIVERGENCE_TOL;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum System {
    Nse2d,
    Nse3d,
    /// Surface quasi-geostrophic equation with dissipation `κΛ^α`.
    Sqg,
    Mhd,
    HallMhd,
}

impl System {
    pub const ALL: [System; 5] = [
        System::Nse2d,
        System::Nse3d,
        System::Sqg,
        System::Mhd,
        System::HallMhd,
    ];

    pub fn dim(self) -> usize {
        match self {
            System::Nse2d | System::Sqg => 2,
            System::Nse3d | System::Mhd | System::HallMhd => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            System::Nse2d => "nse2d",
            System::Nse3d => "nse3d",
            System::Sqg => "sqg",
            System::Mhd => "mhd",
            System::HallMhd => "hallmhd",
        }
    }

    /// Stable numeric tag used by the snapshot format.
    pub fn tag(self) -> u8 {
        match self {
            System::Nse2d => 0,
            System::Nse3d => 1,
            System::Sqg => 2,
            System::Mhd => 3,
            System::HallMhd => 4,
        }
    }

    pub fn from_tag(tag: u8) -> Option<System> {
        System::ALL.into_iter().find(|s| s.tag() == tag)
    }

    pub fn has_magnetic(self) -> bool {
        matches!(self, System::Mhd | System::HallMhd)
    }

    pub fn is_scalar(self) -> bool {
        self == System::Sqg
    }

    pub fn is_nse(self) -> bool {
        matches!(self, System::Nse2d | System::Nse3d)
    }

    /// Names of the stored physical components, in snapshot order.
    pub fn field_names(self) -> Vec<&'static str> {
        match self {
            System::Nse2d => vec!["u_x", "u_y"],
            System::Nse3d => vec!["u_x", "u_y", "u_z"],
            System::Sqg => vec!["theta"],
            System::Mhd | System::HallMhd => vec!["u_x", "u_y", "u_z", "b_x", "b_y", "b_z"],
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for System {
    type Err = Error;

    fn from_str(s: &str) -> Result<System> {
        System::ALL
            .into_iter()
            .find(|sys| sys.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown system `{s}`")))
    }
}

/// Physical constants. Unused ones are ignored by the system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constants {
    /// Kinematic viscosity `ν`.
    pub nu: f64,
    /// Magnetic resistivity `μ`.
    pub mu: f64,
    /// SQG dissipation coefficient `κ`.
    pub kappa: f64,
    /// SQG dissipation order `α`.
    pub alpha: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            nu: 0.0,
            mu: 0.0,
            kappa: 0.0,
            alpha: 0.5,
        }
    }
}

impl Constants {
    /// Returns the list of violated constraints, empty when valid.
    pub fn violations(&self, system: System) -> Vec<String> {
        let mut out = Vec::new();
        for (name, v) in [("nu", self.nu), ("mu", self.mu), ("kappa", self.kappa)] {
            if !(v >= 0.0 && v.is_finite()) {
                out.push(format!("{name} must be a finite non-negative number (got {v})"));
            }
        }
        if system.is_scalar() && !(self.alpha > 0.0 && self.alpha < 1.0) {
            out.push(format!("alpha must lie in (0, 1) for sqg (got {})", self.alpha));
        }
        out
    }

    pub fn validate(&self, system: System) -> Result<()> {
        let v = self.violations(system);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(v.join("; ")))
        }
    }

    /// The viscosity floor entering the smallness tests.
    pub fn floor(&self, system: System) -> f64 {
        match system {
            System::Sqg => self.kappa,
            System::HallMhd => self.nu.min(self.mu),
            _ => self.nu,
        }
    }
}

/// State of one integrator. `primary` is the velocity, or the scalar `θ`
/// for SQG; `magnetic` is present exactly for MHD and Hall-MHD. Both are
/// kept spectral, dealiased and (for vectors) divergence-free.
#[derive(Clone, Debug)]
pub struct SolverState {
    pub system: System,
    pub constants: Constants,
    pub t: f64,
    pub primary: Field,
    pub magnetic: Option<Field>,
}

fn check_vector(f: &Field, dim: usize) -> Result<()> {
    f.check_components(dim)?;
    let d = crate::spectral::relative_divergence(f)?;
    if d > DIVERGENCE_TOL {
        return Err(Error::NotSolenoidal(d));
    }
    Ok(())
}

impl SolverState {
    /// Validates shapes, constants and solenoidality, then stores the
    /// dealiased fields.
    pub fn new(
        system: System,
        constants: Constants,
        t: f64,
        primary: Field,
        magnetic: Option<Field>,
    ) -> Result<SolverState> {
        constants.validate(system)?;
        let dim = primary.grid().dim();
        if dim != system.dim() {
            return Err(Error::WrongDimension {
                expected: system.dim(),
                found: dim,
            });
        }
        if system.is_scalar() {
            primary.check_components(1)?;
        } else {
            check_vector(&primary, dim)?;
        }
        match (&magnetic, system.has_magnetic()) {
            (Some(b), true) => {
                primary.check_grid(b)?;
                check_vector(b, dim)?;
            }
            (None, false) => {}
            (Some(_), false) => {
                return Err(Error::SystemMismatch(format!("{system} carries no magnetic field")))
            }
            (None, true) => {
                return Err(Error::SystemMismatch(format!("{system} requires a magnetic field")))
            }
        }
        let primary = if system.is_scalar() {
            dealias(&primary)
        } else {
            leray_project(&dealias(&primary))?
        };
        let magnetic = match magnetic {
            Some(b) => Some(leray_project(&dealias(&b))?),
            None => None,
        };
        Ok(SolverState {
            system,
            constants,
            t,
            primary,
            magnetic,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.primary.grid()
    }

    /// Velocity field; for SQG this is `R^⊥θ` of the mean-free part of `θ`.
    pub fn velocity(&self) -> Field {
        if self.system.is_scalar() {
            sqg_velocity(&self.primary)
        } else {
            self.primary.clone()
        }
    }

    pub fn theta(&self) -> Option<&Field> {
        self.system.is_scalar().then_some(&self.primary)
    }

    pub fn magnetic(&self) -> Option<&Field> {
        self.magnetic.as_ref()
    }

    /// Physical samples in the order of [`System::field_names`].
    pub fn physical_components(&self) -> Vec<Vec<f64>> {
        let mut out = self.primary.to_physical().into_physical_data();
        if let Some(b) = &self.magnetic {
            out.extend(b.to_physical().into_physical_data());
        }
        out
    }

    /// Inverse of [`SolverState::physical_components`].
    pub fn from_physical_components(
        system: System,
        constants: Constants,
        grid: &Grid,
        t: f64,
        mut comps: Vec<Vec<f64>>,
    ) -> Result<SolverState> {
        let expected = system.field_names().len();
        if comps.len() != expected {
            return Err(Error::ComponentMismatch {
                expected,
                found: comps.len(),
            });
        }
        let magnetic = if system.has_magnetic() {
            let b = comps.split_off(3);
            Some(Field::from_physical(grid, b)?)
        } else {
            None
        };
        let primary = Field::from_physical(grid, comps)?;
        SolverState::new(system, constants, t, primary, magnetic)
    }

    pub fn is_finite(&self) -> bool {
        self.primary.is_finite() && self.magnetic.as_ref().is_none_or(Field::is_finite)
    }
}

/// `R^⊥` applied to `θ` with its mean removed.
pub(crate) fn sqg_velocity(theta: &Field) -> Field {
    let mut mask = vec![1.0; theta.grid().len()];
    mask[0] = 0.0;
    riesz_perp(&theta.apply_multiplier(&mask)).expect("mean-free 2D scalar")
}
