//! Seeded randomized sweeps behind the property suites.
//!
//! The sweep constants below were measured with [`REFERENCE_SEED`] and
//! frozen. Bernstein constants are the observed maxima rounded up in the
//! third significant digit; commutator constants carry a factor 2 over
//! the observed maxima. The second Hall commutator is not small for
//! constant `F` (its first term keeps `Δ_q∇×(F×G)`), so its constant is
//! grid dependent and only meaningful at the sweep resolution.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lp::{lambda, BumpProfile, DyadicPartition};
use crate::paraproduct::{
    bony_decompose, cancellation_suite, commutator_hall_cross, commutator_hall_curl,
    commutator_transport, jacobian_sup, transport_bound, CANCELLATION_TOL,
};
use crate::spectral::random::{random_field, random_solenoidal, Envelope};
use crate::spectral::{l2_norm_sq, lp_norm, multiply, Field, Grid};

pub const REFERENCE_SEED: u64 = 2024;

pub const SUITES: [&str; 7] = [
    "partition",
    "reconstruction",
    "bernstein",
    "commutator",
    "hall",
    "cancellation",
    "bony",
];

pub const UNITY_TOL: f64 = 1e-12;
pub const RECONSTRUCTION_TOL: f64 = 1e-10;
pub const DEGENERATE_TOL: f64 = 1e-11;

/// Bernstein sweep: `n = 32`, `d = 2`, shells `0..=q_max`.
pub const BERNSTEIN_GRID: (usize, usize) = (2, 32);
pub const BERNSTEIN_SAMPLES: usize = 1000;
/// `(r, s, frozen max ratio)`.
pub const BERNSTEIN_BOUNDS: [(f64, f64, f64); 3] = [
    (2.0, f64::INFINITY, 3.96),
    (2.0, 4.0, 2.32),
    (1.0, 2.0, 5.91),
];

/// Commutator sweeps: `n = 16`, `d = 3`.
pub const COMMUTATOR_GRID: (usize, usize) = (3, 16);
pub const COMMUTATOR_SAMPLES: usize = 500;
pub const TRANSPORT_BOUND: f64 = 1.09;
pub const HALL_CROSS_BOUND: f64 = 0.92;
pub const HALL_CURL_BOUND: f64 = 3.0;

pub const CANCELLATION_STATES: usize = 50;
pub const RECONSTRUCTION_FIELDS: usize = 100;
pub const BONY_PAIRS: usize = 50;

/// Hölder triple `(r₁, r₂, r₃)` of the transport sweep.
pub const TRANSPORT_EXPONENTS: (f64, f64, f64) = (2.0, 2.0, f64::INFINITY);

#[derive(Clone, Debug, PartialEq)]
pub struct Property {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub samples: usize,
}

impl Property {
    pub fn passed(&self) -> bool {
        self.measured <= self.bound
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub properties: Vec<Property>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(Property::passed)
    }

    pub fn render(&self) -> String {
        let mut s = format!("suite {} (seed {})\n", self.suite, self.seed);
        for p in &self.properties {
            let _ = writeln!(
                s,
                "  {} {:<34} measured={:.6e} bound={:.6e} samples={}",
                if p.passed() { "PASS" } else { "FAIL" },
                p.name,
                p.measured,
                p.bound,
                p.samples
            );
        }
        s
    }
}

fn partition(dim: usize, n: usize) -> Result<DyadicPartition> {
    Ok(DyadicPartition::new(&Grid::new(dim, n)?, BumpProfile::default()))
}

fn random_envelope<R: Rng>(rng: &mut R) -> Envelope {
    Envelope {
        slope: rng.random_range(-1.0..2.0),
        k_peak: rng.random_range(1.5..8.0),
    }
}

fn rel_l2(a: &Field, b: &Field) -> Result<f64> {
    let d = l2_norm_sq(&a.sub(b)?).sqrt();
    let s = l2_norm_sq(b).sqrt();
    Ok(if s == 0.0 { d } else { d / s })
}

/// Largest deviation of `χ + Σφ_q` from one for `n ∈ {32, 64, 128}`, `d ∈ {2, 3}`.
pub fn partition_defects() -> Result<Vec<((usize, usize), f64)>> {
    let mut out = Vec::new();
    for dim in [2, 3] {
        for n in [32, 64, 128] {
            out.push(((dim, n), partition(dim, n)?.unity_defect()));
        }
    }
    Ok(out)
}

/// Worst relative `‖f - Σ_q Δ_q f‖₂ / ‖f‖₂` over random fields,
/// alternating `32²` and `16³` grids.
pub fn reconstruction_sweep(seed: u64, fields: usize) -> Result<f64> {
    let lps = [partition(2, 32)?, partition(3, 16)?];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for i in 0..fields {
        let lp = &lps[i % 2];
        let comps = rng.random_range(1..=3);
        let env = random_envelope(&mut rng);
        let f = random_field(lp.grid(), comps, &env, &mut rng);
        let back = lp.decompose(&f)?.reconstruct();
        worst = worst.max(rel_l2(&back, &f)?);
    }
    Ok(worst)
}

/// Largest Bernstein ratio over random shell fields.
pub fn bernstein_sweep(seed: u64, r: f64, s: f64, samples: usize) -> Result<f64> {
    let (dim, n) = BERNSTEIN_GRID;
    let lp = partition(dim, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let q = rng.random_range(0..=lp.q_max());
        let comps = rng.random_range(1..=2);
        let f = lp.random_shell_field(q, comps, &mut rng)?;
        worst = worst.max(lp.bernstein_check(&f, q, r, s)?.ratio);
    }
    Ok(worst)
}

/// Largest ratio `‖[Δ_q, u_{≤p-2}·∇]v_p‖_{r₁} / (‖v_p‖_{r₂} Σ λ_{p'}‖u_{p'}‖_{r₃})`.
pub fn transport_commutator_sweep(seed: u64, samples: usize) -> Result<f64> {
    let (dim, n) = COMMUTATOR_GRID;
    let lp = partition(dim, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let u = random_solenoidal(lp.grid(), &random_envelope(&mut rng), &mut rng);
        let v = random_field(lp.grid(), rng.random_range(1..=3), &random_envelope(&mut rng), &mut rng);
        let p = rng.random_range(2..=lp.q_max());
        let q = rng.random_range((p - 2).max(-1)..=(p + 2).min(lp.q_max()));
        let (r1, r2, r3) = TRANSPORT_EXPONENTS;
        let c = commutator_transport(&lp, q, &u, p, &v)?;
        let den = transport_bound(&lp, &u, p, &v, r2, r3)?;
        let num = lp_norm(&c, r1)?;
        if den > 0.0 {
            worst = worst.max(num / den);
        }
    }
    Ok(worst)
}

/// Largest ratios `‖[Δ_q, F×∇×]G‖₂ / (‖∇F‖_∞‖G‖₂)` and the same for
/// `[Δ_q, (∇×F)×]G`.
pub fn hall_commutator_sweep(seed: u64, samples: usize) -> Result<(f64, f64)> {
    let (dim, n) = COMMUTATOR_GRID;
    let lp = partition(dim, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut cross, mut curl): (f64, f64) = (0.0, 0.0);
    for _ in 0..samples {
        let f = random_solenoidal(lp.grid(), &random_envelope(&mut rng), &mut rng);
        let g = random_field(lp.grid(), 3, &random_envelope(&mut rng), &mut rng);
        let q = rng.random_range(-1..=lp.q_max());
        let den = jacobian_sup(&f)? * lp_norm(&g, 2.0)?;
        if den == 0.0 {
            continue;
        }
        cross = cross.max(lp_norm(&commutator_hall_cross(&lp, q, &f, &g)?, 2.0)? / den);
        curl = curl.max(lp_norm(&commutator_hall_curl(&lp, q, &f, &g)?, 2.0)? / den);
    }
    Ok((cross, curl))
}

/// Degenerate cases: constant advector and constant `F`. Returns the
/// largest commutator norm relative to its field scale.
pub fn degenerate_commutators(seed: u64) -> Result<(f64, f64)> {
    let (dim, n) = COMMUTATOR_GRID;
    let lp = partition(dim, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut transport, mut cross): (f64, f64) = (0.0, 0.0);
    for _ in 0..10 {
        let a: [f64; 3] = [0, 1, 2].map(|_| rng.random_range(-2.0..2.0));
        let cst = Field::vector_fn(lp.grid(), |_| a);
        let v = random_field(lp.grid(), 3, &Envelope::WHITE, &mut rng);
        for p in 0..=lp.q_max() {
            for q in (p - 2).max(-1)..=(p + 2).min(lp.q_max()) {
                let c = commutator_transport(&lp, q, &cst, p, &v)?;
                let scale = lambda(p) * lp_norm(&lp.project_shell(&v, p)?, 2.0)?;
                if scale > 0.0 {
                    transport = transport.max(lp_norm(&c, 2.0)? / scale);
                }
            }
        }
        let scale = lp_norm(&crate::spectral::differentiate(&v, crate::spectral::DiffOp::Curl)?, 2.0)?;
        for q in lp.shells() {
            let c = commutator_hall_cross(&lp, q, &cst, &v)?;
            cross = cross.max(lp_norm(&c, 2.0)? / scale);
        }
    }
    Ok((transport, cross))
}

/// Worst normalized `I22` and `H12` over random solenoidal `(u, b)`.
pub fn cancellation_sweep(seed: u64, states: usize) -> Result<(f64, f64)> {
    let lp = partition(3, 16)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut i22, mut h12): (f64, f64) = (0.0, 0.0);
    for _ in 0..states {
        let u = random_solenoidal(lp.grid(), &random_envelope(&mut rng), &mut rng);
        let b = random_solenoidal(lp.grid(), &random_envelope(&mut rng), &mut rng);
        let amp = 10f64.powf(rng.random_range(-2.0..2.0));
        let rep = cancellation_suite(&lp, &u.scale(amp), Some(&b))?;
        i22 = i22.max(rep.max_i22());
        h12 = h12.max(rep.max_h12().unwrap_or(0.0));
    }
    Ok((i22, h12))
}

/// Worst relative mismatch between the Bony sum and the dealiased product.
pub fn bony_sweep(seed: u64, pairs: usize) -> Result<f64> {
    let lp = partition(2, 32)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let u = random_field(lp.grid(), 1, &random_envelope(&mut rng), &mut rng);
        let v = random_field(lp.grid(), 2, &random_envelope(&mut rng), &mut rng);
        let t = bony_decompose(&lp, &u, &v)?;
        worst = worst.max(rel_l2(&t.sum(), &multiply(&u, &v)?)?);
    }
    Ok(worst)
}

fn prop(name: impl Into<String>, measured: f64, bound: f64, samples: usize) -> Property {
    Property {
        name: name.into(),
        measured,
        bound,
        samples,
    }
}

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    let properties = match name {
        "partition" => partition_defects()?
            .into_iter()
            .map(|((dim, n), d)| prop(format!("unity defect n={n} d={dim}"), d, UNITY_TOL, 1))
            .collect(),
        "reconstruction" => vec![prop(
            "relative L2 reconstruction error",
            reconstruction_sweep(seed, RECONSTRUCTION_FIELDS)?,
            RECONSTRUCTION_TOL,
            RECONSTRUCTION_FIELDS,
        )],
        "bernstein" => BERNSTEIN_BOUNDS
            .iter()
            .enumerate()
            .map(|(i, &(r, s, bound))| {
                let m = bernstein_sweep(seed.wrapping_add(i as u64), r, s, BERNSTEIN_SAMPLES)?;
                Ok(prop(
                    format!("ratio r={} s={}", crate::diagnostics::r_label(r), crate::diagnostics::r_label(s)),
                    m,
                    bound,
                    BERNSTEIN_SAMPLES,
                ))
            })
            .collect::<Result<_>>()?,
        "commutator" => {
            let (t, _) = degenerate_commutators(seed)?;
            vec![
                prop(
                    "transport commutator ratio",
                    transport_commutator_sweep(seed, COMMUTATOR_SAMPLES)?,
                    TRANSPORT_BOUND,
                    COMMUTATOR_SAMPLES,
                ),
                prop("constant advector (relative)", t, DEGENERATE_TOL, 10),
            ]
        }
        "hall" => {
            let (cross, curl) = hall_commutator_sweep(seed, COMMUTATOR_SAMPLES)?;
            let (_, deg) = degenerate_commutators(seed)?;
            vec![
                prop("cross commutator ratio", cross, HALL_CROSS_BOUND, COMMUTATOR_SAMPLES),
                prop("curl commutator ratio", curl, HALL_CURL_BOUND, COMMUTATOR_SAMPLES),
                prop("constant F cross (relative)", deg, DEGENERATE_TOL, 10),
            ]
        }
        "cancellation" => {
            let (i22, h12) = cancellation_sweep(seed, CANCELLATION_STATES)?;
            vec![
                prop("|I22|/(lambda_q |u_q|_2^2)", i22, CANCELLATION_TOL, CANCELLATION_STATES),
                prop("|H12|/|curl b_q|_2^2", h12, CANCELLATION_TOL, CANCELLATION_STATES),
            ]
        }
        "bony" => vec![prop(
            "relative L2 mismatch of Bony sum",
            bony_sweep(seed, BONY_PAIRS)?,
            RECONSTRUCTION_TOL,
            BONY_PAIRS,
        )],
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown suite `{other}` (expected one of: {})",
                SUITES.join(", ")
            )))
        }
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        seed,
        properties,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_suite_passes() {
        let rep = run_suite("partition", REFERENCE_SEED).unwrap();
        assert_eq!(rep.properties.len(), 6);
        assert!(rep.passed(), "{}", rep.render());
    }

    #[test]
    fn unknown_suite_lists_choices() {
        let err = run_suite("spectra", 1).unwrap_err().to_string();
        assert!(err.contains("spectra") && err.contains("bernstein"));
    }

    #[test]
    fn bernstein_sweep_is_seeded() {
        let a = bernstein_sweep(7, 2.0, 4.0, 20).unwrap();
        assert_eq!(a, bernstein_sweep(7, 2.0, 4.0, 20).unwrap());
        assert_ne!(a, bernstein_sweep(8, 2.0, 4.0, 20).unwrap());
    }

    #[test]
    fn degenerate_cases_vanish() {
        let (t, c) = degenerate_commutators(REFERENCE_SEED).unwrap();
        assert!(t < DEGENERATE_TOL && c < DEGENERATE_TOL, "{t:e} {c:e}");
    }
}
