//! Dyadic partition of unity on the wavenumber lattice and the shell
//! projections, partial sums and shell-based norms built on it.
//!
//! With `λ_q = 2^q`, the radial bump `χ` equals 1 on `|ξ| ≤ 3/4` and 0 on
//! `|ξ| ≥ 1`; `φ(ξ) = χ(ξ/2) - χ(ξ)` and `φ_q(ξ) = φ(ξ/λ_q)` for `q ≥ 0`,
//! while shell `-1` uses `χ` itself. The family telescopes:
//! `χ + Σ_{q≤Q} φ_q = χ(·/λ_{Q+1})`, so it sums to one on every lattice
//! point with `|k| ≤ 3/2·λ_{q_max}`, which covers the dealiased lattice.

use rand::Rng;

use crate::error::{Error, Result};
use crate::spectral::random::{random_field, Envelope};
use crate::spectral::{lp_norm, Field, Grid};

/// Lowest shell index.
pub const Q_MIN: i32 = -1;

/// Dyadic wavenumber `λ_q = 2^q` (so `λ_{-1} = 1/2`).
pub fn lambda(q: i32) -> f64 {
    2f64.powi(q)
}

/// Shape of the transition of `χ` on `3/4 < |ξ| < 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BumpProfile {
    /// Normalized smooth step built from `s(t) = exp(-1/t)`:
    /// `χ = s(1-τ) / (s(1-τ) + s(τ))` with `τ = 4(|ξ| - 3/4)`.
    #[default]
    ExpSmoothStep,
}

impl BumpProfile {
    pub fn chi(&self, r: f64) -> f64 {
        match self {
            BumpProfile::ExpSmoothStep => {
                if r <= 0.75 {
                    1.0
                } else if r >= 1.0 {
                    0.0
                } else {
                    let tau = (r - 0.75) / 0.25;
                    let a = smooth_exp(1.0 - tau);
                    let b = smooth_exp(tau);
                    a / (a + b)
                }
            }
        }
    }
}

fn smooth_exp(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Tabulated `χ` and `φ_q`, `0 ≤ q ≤ q_max`, on a grid's lattice.
#[derive(Clone, Debug)]
pub struct DyadicPartition {
    grid: Grid,
    profile: BumpProfile,
    q_max: i32,
    chi: Vec<f64>,
    phi: Vec<Vec<f64>>,
}

impl DyadicPartition {
    pub fn new(grid: &Grid, profile: BumpProfile) -> DyadicPartition {
        let k_max = grid.k_max_retained();
        let q_max = k_max.log2().ceil() as i32;
        let km = grid.kmag();
        let chi = km.iter().map(|&k| profile.chi(k)).collect();
        let phi = (0..=q_max)
            .map(|q| {
                let l = lambda(q);
                km.iter()
                    .map(|&k| profile.chi(k / (2.0 * l)) - profile.chi(k / l))
                    .collect()
            })
            .collect();
        DyadicPartition {
            grid: grid.clone(),
            profile,
            q_max,
            chi,
            phi,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn profile(&self) -> BumpProfile {
        self.profile
    }

    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    /// Shell indices `-1..=q_max`.
    pub fn shells(&self) -> impl Iterator<Item = i32> {
        Q_MIN..=self.q_max
    }

    fn check_q(&self, q: i32) -> Result<()> {
        if q < Q_MIN || q > self.q_max {
            return Err(Error::ShellOutOfRange {
                q,
                min: Q_MIN,
                max: self.q_max,
            });
        }
        Ok(())
    }

    /// Multiplier of shell `q`: `χ` for `q = -1`, `φ_q` otherwise.
    pub fn multiplier(&self, q: i32) -> Result<&[f64]> {
        self.check_q(q)?;
        Ok(if q == Q_MIN {
            &self.chi
        } else {
            &self.phi[q as usize]
        })
    }

    /// Largest deviation of `χ + Σ φ_q` from one over the retained lattice.
    pub fn unity_defect(&self) -> f64 {
        (0..self.grid.len())
            .filter(|&i| self.grid.is_retained(i))
            .map(|i| {
                let s: f64 = self.chi[i] + self.phi.iter().map(|p| p[i]).sum::<f64>();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Shells whose multiplier is nonzero at `|ξ| = k`.
    pub fn shells_containing(&self, k: f64) -> Vec<i32> {
        let mut out = Vec::new();
        if self.profile.chi(k) != 0.0 {
            out.push(Q_MIN);
        }
        for q in 0..=self.q_max {
            let l = lambda(q);
            if self.profile.chi(k / (2.0 * l)) - self.profile.chi(k / l) != 0.0 {
                out.push(q);
            }
        }
        out
    }

    /// `Δ_q f`.
    pub fn project_shell(&self, f: &Field, q: i32) -> Result<Field> {
        self.check_grid(f)?;
        Ok(f.apply_multiplier(self.multiplier(q)?))
    }

    fn band_multiplier(&self, from: i32, to: i32) -> Vec<f64> {
        let mut m = vec![0.0; self.grid.len()];
        for q in from..=to {
            let s = if q == Q_MIN {
                &self.chi
            } else {
                &self.phi[q as usize]
            };
            for (a, b) in m.iter_mut().zip(s) {
                *a += b;
            }
        }
        m
    }

    /// `f_{≤Q} = Σ_{q=-1}^{Q} Δ_q f`.
    pub fn project_low(&self, f: &Field, q: i32) -> Result<Field> {
        self.check_grid(f)?;
        self.check_q(q)?;
        Ok(f.apply_multiplier(&self.band_multiplier(Q_MIN, q)))
    }

    /// `f_{(P,Q]} = Σ_{q=P+1}^{Q} Δ_q f`; `P = Q` gives zero.
    pub fn project_band(&self, f: &Field, p: i32, q: i32) -> Result<Field> {
        self.check_grid(f)?;
        if p > q {
            return Err(Error::InvalidBand { p, q });
        }
        self.check_q(q)?;
        if p < Q_MIN - 1 {
            return Err(Error::ShellOutOfRange {
                q: p,
                min: Q_MIN - 1,
                max: self.q_max,
            });
        }
        Ok(f.apply_multiplier(&self.band_multiplier(p + 1, q)))
    }

    pub fn decompose(&self, f: &Field) -> Result<ShellDecomposition> {
        self.check_grid(f)?;
        let shells = self
            .shells()
            .map(|q| self.project_shell(f, q))
            .collect::<Result<Vec<_>>>()?;
        Ok(ShellDecomposition {
            q_max: self.q_max,
            shells,
        })
    }

    /// `‖f‖_{B^s_{p,∞}} = max_q λ_q^s ‖Δ_q f‖_p`.
    pub fn besov_norm(&self, f: &Field, s: f64, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidExponent(p));
        }
        let mut best: f64 = 0.0;
        for q in self.shells() {
            let v = lambda(q).powf(s) * lp_norm(&self.project_shell(f, q)?, p)?;
            best = best.max(v);
        }
        Ok(best)
    }

    /// Squared `L²` mass of every shell, computed spectrally.
    pub fn shell_l2_sq(&self, f: &Field) -> Result<Vec<f64>> {
        self.check_grid(f)?;
        let spec = f.to_spectral();
        let data = spec.spectral().unwrap();
        let vol = self.grid.volume();
        self.shells()
            .map(|q| {
                let m = self.multiplier(q)?;
                Ok(data
                    .iter()
                    .flat_map(|c| c.iter().zip(m).map(|(z, w)| w * w * z.norm_sqr()))
                    .sum::<f64>()
                    * vol)
            })
            .collect()
    }

    /// Shell-sum `H^s` norm `(Σ_q λ_q^{2s} ‖Δ_q f‖₂²)^{1/2}`.
    pub fn sobolev_norm(&self, f: &Field, s: f64) -> Result<f64> {
        let masses = self.shell_l2_sq(f)?;
        Ok(self
            .shells()
            .zip(masses)
            .map(|(q, m)| lambda(q).powf(2.0 * s) * m)
            .sum::<f64>()
            .sqrt())
    }

    /// Measures `‖f_q‖_r / (λ_q^{n(1/r - 1/s)} ‖f_q‖_s)` for a field
    /// supported in shell `q`.
    pub fn bernstein_check(&self, f_q: &Field, q: i32, r: f64, s: f64) -> Result<BernsteinReport> {
        self.check_grid(f_q)?;
        let m = self.multiplier(q)?;
        let spec = f_q.to_spectral();
        let data = spec.spectral().unwrap();
        let peak = data.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        let leak = data
            .iter()
            .flat_map(|c| c.iter().zip(m).filter(|(_, &w)| w == 0.0).map(|(z, _)| z.norm()))
            .fold(0.0, f64::max);
        if leak > 1e-13 * peak {
            return Err(Error::NotShellLocalized(q));
        }
        let n = self.grid.dim() as f64;
        let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
        let exponent = n * (inv(r) - inv(s));
        let lhs = lp_norm(&spec, r)?;
        let norm_s = lp_norm(&spec, s)?;
        let rhs = lambda(q).powf(exponent) * norm_s;
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
        Ok(BernsteinReport {
            q,
            r,
            s,
            exponent,
            lhs,
            rhs,
            ratio,
        })
    }

    /// A white-noise field projected onto shell `q`.
    pub fn random_shell_field<R: Rng + ?Sized>(&self, q: i32, components: usize, rng: &mut R) -> Result<Field> {
        let f = random_field(&self.grid, components, &Envelope::WHITE, rng);
        self.project_shell(&f, q)
    }

    fn check_grid(&self, f: &Field) -> Result<()> {
        if *f.grid() != self.grid {
            return Err(Error::GridMismatch {
                left: self.grid.to_string(),
                right: f.grid().to_string(),
            });
        }
        Ok(())
    }
}

/// Outcome of one Bernstein measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct BernsteinReport {
    pub q: i32,
    pub r: f64,
    pub s: f64,
    pub exponent: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// The shells `Δ_q f`, `-1 ≤ q ≤ q_max`, of one field.
#[derive(Clone, Debug)]
pub struct ShellDecomposition {
    q_max: i32,
    shells: Vec<Field>,
}

impl ShellDecomposition {
    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    pub fn shell(&self, q: i32) -> Option<&Field> {
        if q < Q_MIN {
            return None;
        }
        self.shells.get((q - Q_MIN) as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, &Field)> {
        (Q_MIN..).zip(self.shells.iter())
    }

    /// `Σ_{q=-1}^{Q} shells[q]`; `Q < -1` gives zero.
    pub fn low(&self, q: i32) -> Field {
        let first = &self.shells[0];
        let mut acc = first.scale(0.0);
        for (p, s) in self.iter() {
            if p > q {
                break;
            }
            acc = acc.add(s).expect("shells share grid and components");
        }
        acc
    }

    /// `ũ_q = Σ_{|p-q|≤1} u_p`.
    pub fn neighborhood(&self, q: i32) -> Field {
        let mut acc = self.shells[0].scale(0.0);
        for (p, s) in self.iter() {
            if (p - q).abs() <= 1 {
                acc = acc.add(s).expect("shells share grid and components");
            }
        }
        acc
    }

    pub fn reconstruct(&self) -> Field {
        self.low(self.q_max)
    }
}
