//! Seeded random fields with prescribed spectral envelopes.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::field::Field;
use super::grid::Grid;
use super::ops::{dealias, leray_project};

/// Radial amplitude envelope `|k|^slope · exp(-(|k|/k_peak)²)`, zero at `k = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Envelope {
    pub slope: f64,
    pub k_peak: f64,
}

impl Envelope {
    /// Flat spectrum up to the dealiasing cutoff.
    pub const WHITE: Envelope = Envelope {
        slope: 0.0,
        k_peak: f64::INFINITY,
    };

    pub fn amplitude(&self, k: f64) -> f64 {
        if k == 0.0 {
            return 0.0;
        }
        let gauss = if self.k_peak.is_infinite() {
            1.0
        } else {
            (-(k / self.k_peak).powi(2)).exp()
        };
        k.powf(self.slope) * gauss
    }
}

fn gaussian_component<R: Rng + ?Sized>(grid: &Grid, rng: &mut R, env: &Envelope) -> Vec<Complex64> {
    let km = grid.kmag();
    let raw: Vec<Complex64> = (0..grid.len())
        .map(|i| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * env.amplitude(km[i])
        })
        .collect();
    let conj = grid.conj_index();
    (0..grid.len())
        .map(|i| {
            if grid.is_nyquist(i) {
                Complex64::default()
            } else {
                0.5 * (raw[i] + raw[conj[i]].conj())
            }
        })
        .collect()
}

/// Zero-mean, dealiased random field with `components` independent
/// Gaussian components.
pub fn random_field<R: Rng + ?Sized>(grid: &Grid, components: usize, env: &Envelope, rng: &mut R) -> Field {
    let comps = (0..components)
        .map(|_| gaussian_component(grid, rng, env))
        .collect();
    dealias(&Field::from_spectral(grid, comps).expect("shape is correct by construction"))
}

/// Zero-mean, dealiased, divergence-free random vector field.
pub fn random_solenoidal<R: Rng + ?Sized>(grid: &Grid, env: &Envelope, rng: &mut R) -> Field {
    let v = random_field(grid, grid.dim(), env, rng);
    leray_project(&v).expect("vector field has dim components")
}

/// Rescales `f` so that the grid average of `|f|²` equals `rms²`.
pub fn normalize_rms(f: &Field, rms: f64) -> Field {
    let e = f.spectral_energy();
    if e == 0.0 {
        return f.clone();
    }
    f.scale(rms / e.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ops::{differentiate, lp_norm, DiffOp};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_fields_are_real_and_solenoidal() {
        let g = Grid::new(3, 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v = random_solenoidal(&g, &Envelope::WHITE, &mut rng);
        assert!(v.hermitian_defect() < 1e-15);
        let div = differentiate(&v, DiffOp::Divergence).unwrap();
        assert!(lp_norm(&div, 2.0).unwrap() < 1e-12 * lp_norm(&v, 2.0).unwrap());
        assert!(v.mean().iter().all(|m| m.abs() < 1e-15));
    }

    #[test]
    fn normalization_hits_target_rms() {
        let g = Grid::new(2, 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let env = Envelope {
            slope: 1.0,
            k_peak: 3.0,
        };
        let f = normalize_rms(&random_field(&g, 2, &env, &mut rng), 2.0);
        assert!((f.spectral_energy() - 4.0).abs() < 1e-12);
    }
}
