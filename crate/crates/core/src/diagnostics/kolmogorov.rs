use crate::error::{Error, Result};

use super::record::DiagnosticsRecord;

/// Integral over `[a, b]` of the piecewise-linear interpolant through
/// `(t_i, y_i)`, clipped to the sampled range.
pub fn window_integral(t: &[f64], y: &[f64], a: f64, b: f64) -> f64 {
    debug_assert_eq!(t.len(), y.len());
    let mut sum = 0.0;
    for i in 1..t.len() {
        let (t0, t1) = (t[i - 1], t[i]);
        let lo = a.max(t0);
        let hi = b.min(t1);
        if !(lo < hi) {
            continue;
        }
        let at = |s: f64| {
            if t1 == t0 {
                y[i]
            } else {
                y[i - 1] + (y[i] - y[i - 1]) * (s - t0) / (t1 - t0)
            }
        };
        sum += 0.5 * (hi - lo) * (at(lo) + at(hi));
    }
    sum
}

/// Kolmogorov-scale statistics of one trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KolmogorovStats {
    /// `ε = (1/T)∫‖∇u‖₂² dt`.
    pub epsilon: f64,
    /// `κ_d = ε^{1/4} ν^{-3/4}`.
    pub kappa_d: f64,
    pub sigma: f64,
    /// `(ε/ν³)^{1/(4-σ)}`.
    pub kappa_d_sigma: f64,
    /// `⟨Λ⟩`, the time average of `Λ`.
    pub mean_lambda: f64,
    /// `⟨Λ⟩_U = (1/T)∫_U Λ dt` with `U = {Λ > 1}`.
    pub mean_lambda_u: f64,
}

pub fn kappa_d(epsilon: f64, nu: f64) -> f64 {
    epsilon.powf(0.25) * nu.powf(-0.75)
}

pub fn kappa_d_intermittent(epsilon: f64, nu: f64, sigma: f64) -> Result<f64> {
    if !(0.0..=3.0).contains(&sigma) {
        return Err(Error::InvalidSigma(sigma));
    }
    Ok((epsilon / nu.powi(3)).powf(1.0 / (4.0 - sigma)))
}

/// Statistics from raw columns: sample times, `‖∇u‖₂²` and `Λ`.
pub fn kolmogorov_from_series(
    t: &[f64],
    enstrophy: &[f64],
    lambda: &[f64],
    nu: f64,
    sigma: f64,
) -> Result<KolmogorovStats> {
    if t.len() < 2 {
        return Err(Error::SeriesTooShort(t.len()));
    }
    let (a, b) = (t[0], t[t.len() - 1]);
    let span = b - a;
    if !(span > 0.0) {
        return Err(Error::SeriesTooShort(t.len()));
    }
    let epsilon = window_integral(t, enstrophy, a, b) / span;
    let on_u: Vec<f64> = lambda.iter().map(|&l| if l > 1.0 { l } else { 0.0 }).collect();
    let off_u: Vec<f64> = lambda.iter().map(|&l| if l > 1.0 { 0.0 } else { 1.0 }).collect();
    let mean_lambda_u = window_integral(t, &on_u, a, b) / span;
    // Λ = Λ·1_U + 1_{U^c}, so ⟨Λ⟩ - 1 ≤ ⟨Λ⟩_U holds term by term.
    let mean_lambda = mean_lambda_u + (window_integral(t, &off_u, a, b) / span).min(1.0);
    Ok(KolmogorovStats {
        epsilon,
        kappa_d: kappa_d(epsilon, nu),
        sigma,
        kappa_d_sigma: kappa_d_intermittent(epsilon, nu, sigma)?,
        mean_lambda,
        mean_lambda_u,
    })
}

pub fn kolmogorov_stats(records: &[DiagnosticsRecord], nu: f64, sigma: f64) -> Result<KolmogorovStats> {
    let t: Vec<f64> = records.iter().map(|r| r.t).collect();
    let e: Vec<f64> = records.iter().map(|r| r.enstrophy).collect();
    let l: Vec<f64> = records.iter().map(|r| r.lambda.lambda).collect();
    kolmogorov_from_series(&t, &e, &l, nu, sigma)
}
