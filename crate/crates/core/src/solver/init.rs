use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectral::random::{normalize_rms, random_field, random_solenoidal, Envelope};
use crate::spectral::{Field, Grid};

use super::state::{Constants, SolverState, System};

/// Canonical initial data. Loading a stored snapshot is left to the
/// caller, which owns the file format.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialCondition {
    /// Taylor-Green vortex for the velocity; for SQG `θ = sin x sin y + cos y`;
    /// for the magnetic systems `b` is half of the ABC field with unit
    /// coefficients.
    TaylorGreen,
    /// `A e cos(k·x)` with `e ⊥ k` a unit vector, or `θ = A cos(k·x)`.
    /// The magnetic field, if any, starts at zero.
    SingleMode { k: [i32; 3], amplitude: f64 },
    /// Gaussian modes under the envelope `|k|^slope e^{-(|k|/k_peak)²}`,
    /// projected and normalized to the given grid rms. `b` uses `seed + 1`.
    RandomSpectrum {
        slope: f64,
        k_peak: f64,
        seed: u64,
        amplitude: f64,
    },
}

fn taylor_green(grid: &Grid, system: System) -> (Field, Option<Field>) {
    let primary = match system {
        System::Sqg => Field::scalar_fn(grid, |x| x[0].sin() * x[1].sin() + x[1].cos()),
        System::Nse2d => Field::vector_fn(grid, |x| {
            [x[0].sin() * x[1].cos(), -x[0].cos() * x[1].sin(), 0.0]
        }),
        _ => Field::vector_fn(grid, |x| {
            let cz = x[2].cos();
            [
                x[0].sin() * x[1].cos() * cz,
                -x[0].cos() * x[1].sin() * cz,
                0.0,
            ]
        }),
    };
    let magnetic = system.has_magnetic().then(|| {
        Field::vector_fn(grid, |x| {
            [
                0.5 * (x[2].sin() + x[1].cos()),
                0.5 * (x[0].sin() + x[2].cos()),
                0.5 * (x[1].sin() + x[0].cos()),
            ]
        })
    });
    (primary, magnetic)
}

/// A unit vector orthogonal to `k`.
fn transverse(k: [i32; 3], dim: usize) -> [f64; 3] {
    let kf = k.map(f64::from);
    let raw = if dim == 2 {
        [-kf[1], kf[0], 0.0]
    } else if k[0] == 0 && k[1] == 0 {
        [0.0, kf[2], 0.0]
    } else {
        [kf[1], -kf[0], 0.0]
    };
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    raw.map(|x| x / norm)
}

fn single_mode(grid: &Grid, system: System, k: [i32; 3], amp: f64) -> Result<(Field, Option<Field>)> {
    let dim = grid.dim();
    if k[dim..].iter().any(|&c| c != 0) || k.iter().all(|&c| c == 0) {
        return Err(Error::InvalidConfig(format!(
            "single_mode wavevector {k:?} must be nonzero with {dim} components"
        )));
    }
    let in_range = k.iter().all(|c| (c.unsigned_abs() as usize) < grid.n() / 2);
    if !in_range || !grid.is_retained(grid.index_of_wavevector(k)) {
        return Err(Error::InvalidConfig(format!(
            "single_mode wavevector {k:?} is removed by dealiasing at n = {}",
            grid.n()
        )));
    }
    let phase = move |x: [f64; 3]| (0..dim).map(|a| f64::from(k[a]) * x[a]).sum::<f64>().cos();
    let primary = if system.is_scalar() {
        Field::scalar_fn(grid, |x| amp * phase(x))
    } else {
        let e = transverse(k, dim);
        Field::vector_fn(grid, |x| e.map(|c| amp * c * phase(x)))
    };
    let magnetic = system
        .has_magnetic()
        .then(|| Field::zeros(grid, 3, crate::spectral::Rep::Spectral));
    Ok((primary, magnetic))
}

impl InitialCondition {
    pub fn build(
        &self,
        system: System,
        grid: &Grid,
        constants: Constants,
    ) -> Result<SolverState> {
        if grid.dim() != system.dim() {
            return Err(Error::WrongDimension {
                expected: system.dim(),
                found: grid.dim(),
            });
        }
        let (primary, magnetic) = match *self {
            InitialCondition::TaylorGreen => taylor_green(grid, system),
            InitialCondition::SingleMode { k, amplitude } => single_mode(grid, system, k, amplitude)?,
            InitialCondition::RandomSpectrum {
                slope,
                k_peak,
                seed,
                amplitude,
            } => {
                if !(k_peak > 0.0) || !slope.is_finite() || !(amplitude >= 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "random_spectrum needs finite slope, k_peak > 0, amplitude >= 0 \
                         (got {slope}, {k_peak}, {amplitude})"
                    )));
                }
                let env = Envelope { slope, k_peak };
                let draw = |seed: u64| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let f = if system.is_scalar() {
                        random_field(grid, 1, &env, &mut rng)
                    } else {
                        random_solenoidal(grid, &env, &mut rng)
                    };
                    normalize_rms(&f, amplitude)
                };
                let b = system.has_magnetic().then(|| draw(seed.wrapping_add(1)));
                (draw(seed), b)
            }
        };
        SolverState::new(system, constants, 0.0, primary, magnetic)
    }
}
