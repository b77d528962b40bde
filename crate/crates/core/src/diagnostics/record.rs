use crate::error::{Error, Result};
use crate::lp::{DyadicPartition, Q_MIN};
use crate::paraproduct::cancellation_suite;
use crate::solver::{hall_power, EnergySample, SolverState, System};
use crate::spectral::{differentiate, gradient_norm_sq, lp_norm, DiffOp, Field, Grid};

use super::wavenumber::{r_label, wavenumbers_from_norms, ShellNorms, Wavenumber, WavenumberConfig};

/// Everything the criteria battery needs from one sample time.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// `Λ`, or `Λ_u` for Hall-MHD.
    pub lambda: Wavenumber,
    /// `Λ_b` (Hall-MHD only).
    pub lambda_b: Option<Wavenumber>,
    /// `‖u‖₂² (+‖b‖₂²)`, or `‖θ‖₂²`.
    pub energy: f64,
    /// `‖∇u‖₂²`, or `‖∇θ‖₂²`.
    pub enstrophy: f64,
    /// Dissipation rate entering the energy balance.
    pub dissipation: f64,
    /// `‖∇×u‖_∞`, or `‖∇^⊥θ‖_∞`.
    pub curl_sup: f64,
    /// `‖∇×b‖_∞` (MHD, Hall-MHD).
    pub curl_b_sup: Option<f64>,
    /// `‖u_{≤Q}‖_{B¹_{∞,∞}}`.
    pub low_b1: f64,
    /// `‖(∇×u)_{≤Q}‖_{B⁰_{∞,∞}}`, or `‖∇θ_{≤Q}‖_{B⁰_{∞,∞}}`.
    pub low_b0: f64,
    /// `Λ_b ‖b_{≤Q_b}‖_{B⁰_{∞,∞}}` (Hall-MHD).
    pub hall_low: Option<f64>,
    /// `‖Δ_q(∇×u)‖_∞` (or `‖Δ_q∇θ‖_∞`) for `q = -1..=q_max`.
    pub curl_shells: Vec<f64>,
    /// Shell norms of the primary field.
    pub shells: ShellNorms,
    /// `‖b_q‖_∞` (Hall-MHD).
    pub shells_b: Option<ShellNorms>,
    /// `‖u_{≤Q}‖_{B^{-1+d/r+2/ℓ}_{r,∞}}`, one per configured pair.
    pub low_besov: Vec<f64>,
    /// Largest normalized `|I22(q)|`.
    pub i22_max: f64,
    /// Largest normalized `|H12(q)|` (systems with `b`).
    pub h12_max: Option<f64>,
    /// `∫ H·b` (Hall-MHD).
    pub hall_power: Option<f64>,
}

/// Column layout of a diagnostics series.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesLayout {
    pub system: System,
    pub dim: usize,
    pub q_max: i32,
    pub rs: Vec<f64>,
    pub pairs: Vec<(f64, f64)>,
}

fn q_label(q: i32) -> String {
    format!("q{q}")
}

fn parse_r(s: &str) -> Option<f64> {
    if s == "inf" {
        Some(f64::INFINITY)
    } else {
        s.replace('p', ".").parse().ok()
    }
}

impl SeriesLayout {
    pub fn new(system: System, q_max: i32, cfg: &WavenumberConfig) -> SeriesLayout {
        SeriesLayout {
            system,
            dim: system.dim(),
            q_max,
            rs: cfg.recorded_rs(),
            pairs: if system.is_nse() { cfg.pairs.clone() } else { Vec::new() },
        }
    }

    pub fn shells(&self) -> impl Iterator<Item = i32> {
        Q_MIN..=self.q_max
    }

    pub fn columns(&self) -> Vec<String> {
        let s = self.system;
        let mut c: Vec<String> = ["t", "lambda", "Q", "saturated"].map(String::from).to_vec();
        if s == System::HallMhd {
            c.extend(["lambda_b", "Q_b", "saturated_b"].map(String::from));
        }
        c.extend(["energy", "enstrophy", "dissipation", "curl_sup"].map(String::from));
        if s.has_magnetic() {
            c.push("curl_b_sup".into());
        }
        c.extend(["low_b1", "low_b0"].map(String::from));
        if s == System::HallMhd {
            c.push("hall_low".into());
        }
        for q in self.shells() {
            c.push(format!("curl_{}", q_label(q)));
        }
        for &r in &self.rs {
            for q in self.shells() {
                c.push(format!("shell_r{}_{}", r_label(r), q_label(q)));
            }
        }
        if s == System::HallMhd {
            for q in self.shells() {
                c.push(format!("shell_b_rinf_{}", q_label(q)));
            }
        }
        for &(r, l) in &self.pairs {
            c.push(format!("low_besov_r{}_l{}", r_label(r), r_label(l)));
        }
        c.push("i22_max".into());
        if s.has_magnetic() {
            c.push("h12_max".into());
        }
        if s == System::HallMhd {
            c.push("hall_power".into());
        }
        c
    }

    /// Recovers the layout from a header row, checking that every column
    /// the layout implies is present in order.
    pub fn from_header(system: System, header: &[String]) -> Result<SeriesLayout> {
        let mut q_max = None;
        let mut rs: Vec<f64> = Vec::new();
        let mut pairs = Vec::new();
        for h in header {
            if let Some(rest) = h.strip_prefix("shell_r") {
                let (r, q) = rest
                    .split_once("_q")
                    .ok_or_else(|| Error::MissingShells(format!("malformed column `{h}`")))?;
                let r = parse_r(r).ok_or_else(|| Error::MissingShells(format!("malformed column `{h}`")))?;
                let q: i32 = q
                    .parse()
                    .map_err(|_| Error::MissingShells(format!("malformed column `{h}`")))?;
                if !rs.contains(&r) {
                    rs.push(r);
                }
                q_max = Some(q_max.map_or(q, |m: i32| m.max(q)));
            } else if let Some(rest) = h.strip_prefix("low_besov_r") {
                let parsed = rest
                    .split_once("_l")
                    .and_then(|(r, l)| Some((parse_r(r)?, parse_r(l)?)));
                pairs.push(parsed.ok_or_else(|| Error::MissingShells(format!("malformed column `{h}`")))?);
            }
        }
        let q_max = q_max.ok_or_else(|| Error::MissingShells("no shell_r* columns".into()))?;
        let layout = SeriesLayout {
            system,
            dim: system.dim(),
            q_max,
            rs,
            pairs,
        };
        let expected = layout.columns();
        let missing: Vec<&String> = expected.iter().filter(|c| !header.contains(c)).collect();
        if !missing.is_empty() {
            let names: Vec<&str> = missing.iter().map(|s| s.as_str()).collect();
            return Err(Error::MissingShells(format!("missing columns: {}", names.join(", "))));
        }
        if expected.as_slice() != header {
            return Err(Error::MissingShells(
                "columns present but not in the expected order".into(),
            ));
        }
        Ok(layout)
    }

    pub fn row(&self, r: &DiagnosticsRecord) -> Vec<f64> {
        let flag = |b: bool| if b { 1.0 } else { 0.0 };
        let mut v = vec![r.t, r.lambda.lambda, r.lambda.q as f64, flag(r.lambda.saturated)];
        if let Some(b) = r.lambda_b {
            v.extend([b.lambda, b.q as f64, flag(b.saturated)]);
        }
        v.extend([r.energy, r.enstrophy, r.dissipation, r.curl_sup]);
        v.extend(r.curl_b_sup);
        v.extend([r.low_b1, r.low_b0]);
        v.extend(r.hall_low);
        v.extend(&r.curl_shells);
        for vals in &r.shells.values {
            v.extend(vals);
        }
        if let Some(b) = &r.shells_b {
            v.extend(&b.values[0]);
        }
        v.extend(&r.low_besov);
        v.push(r.i22_max);
        v.extend(r.h12_max);
        v.extend(r.hall_power);
        v
    }

    pub fn record(&self, row: &[f64]) -> Result<DiagnosticsRecord> {
        let ncol = self.columns().len();
        if row.len() != ncol {
            return Err(Error::MissingShells(format!(
                "row has {} values, layout has {ncol} columns",
                row.len()
            )));
        }
        let mut it = row.iter().copied();
        let mut next = || it.next().unwrap();
        let wn = |next: &mut dyn FnMut() -> f64| Wavenumber {
            lambda: next(),
            q: next() as i32,
            saturated: next() != 0.0,
        };
        let hall = self.system == System::HallMhd;
        let magnetic = self.system.has_magnetic();
        let nq = (self.q_max - Q_MIN + 1) as usize;
        let t = next();
        let lambda = wn(&mut next);
        let lambda_b = hall.then(|| wn(&mut next));
        let energy = next();
        let enstrophy = next();
        let dissipation = next();
        let curl_sup = next();
        let curl_b_sup = magnetic.then(&mut next);
        let low_b1 = next();
        let low_b0 = next();
        let hall_low = hall.then(&mut next);
        let curl_shells = (0..nq).map(|_| next()).collect();
        let values = self
            .rs
            .iter()
            .map(|_| (0..nq).map(|_| next()).collect())
            .collect();
        let shells = ShellNorms {
            q_max: self.q_max,
            rs: self.rs.clone(),
            values,
        };
        let shells_b = hall.then(|| ShellNorms {
            q_max: self.q_max,
            rs: vec![f64::INFINITY],
            values: vec![(0..nq).map(|_| next()).collect()],
        });
        let low_besov = self.pairs.iter().map(|_| next()).collect();
        let i22_max = next();
        let h12_max = magnetic.then(&mut next);
        let hall_power = hall.then(&mut next);
        Ok(DiagnosticsRecord {
            t,
            lambda,
            lambda_b,
            energy,
            enstrophy,
            dissipation,
            curl_sup,
            curl_b_sup,
            low_b1,
            low_b0,
            hall_low,
            curl_shells,
            shells,
            shells_b,
            low_besov,
            i22_max,
            h12_max,
            hall_power,
        })
    }
}

/// Turns solver states into [`DiagnosticsRecord`]s.
#[derive(Clone, Debug)]
pub struct Sampler {
    lp: DyadicPartition,
    cfg: WavenumberConfig,
    layout: SeriesLayout,
}

fn sup(f: &Field) -> f64 {
    lp_norm(f, f64::INFINITY).expect("r = inf is admissible")
}

impl Sampler {
    pub fn new(grid: &Grid, cfg: WavenumberConfig) -> Result<Sampler> {
        cfg.validate()?;
        if grid.dim() != cfg.system.dim() {
            return Err(Error::WrongDimension {
                expected: cfg.system.dim(),
                found: grid.dim(),
            });
        }
        let lp = DyadicPartition::new(grid, Default::default());
        let layout = SeriesLayout::new(cfg.system, lp.q_max(), &cfg);
        Ok(Sampler { lp, cfg, layout })
    }

    pub fn layout(&self) -> &SeriesLayout {
        &self.layout
    }

    pub fn partition(&self) -> &DyadicPartition {
        &self.lp
    }

    pub fn config(&self) -> &WavenumberConfig {
        &self.cfg
    }

    /// `‖f_{≤Q}‖_{B^s_{r,∞}}`; `Q` above the grid keeps every shell.
    fn low_besov(&self, f: &Field, q: i32, s: f64, r: f64) -> Result<f64> {
        let low = self.lp.project_low(f, q.min(self.lp.q_max()))?;
        self.lp.besov_norm(&low, s, r)
    }

    pub fn sample(&self, state: &SolverState) -> Result<DiagnosticsRecord> {
        if state.system != self.cfg.system {
            return Err(Error::SystemMismatch(format!(
                "sampler configured for {}, state is {}",
                self.cfg.system, state.system
            )));
        }
        let lp = &self.lp;
        let dim = state.grid().dim();
        let system = state.system;
        let shells = ShellNorms::compute(lp, &state.primary, &self.layout.rs)?;
        let shells_b = match (&state.magnetic, system) {
            (Some(b), System::HallMhd) => Some(ShellNorms::compute(lp, b, &[f64::INFINITY])?),
            _ => None,
        };
        let wn = wavenumbers_from_norms(&self.cfg, &state.constants, dim, &shells, shells_b.as_ref())?;
        let lambda = wn.primary.wavenumber;
        let lambda_b = wn.magnetic.as_ref().map(|m| m.wavenumber);
        let q = lambda.q;

        let energy = EnergySample::of(state);
        let u = state.velocity();
        // The vorticity-like field of each system: ∇×u, or ∇θ for SQG.
        let curl = if system.is_scalar() {
            differentiate(&state.primary, DiffOp::Gradient)?
        } else {
            differentiate(&u, DiffOp::Curl)?
        };
        let enstrophy = gradient_norm_sq(&state.primary);
        let curl_shells = ShellNorms::compute(lp, &curl, &[f64::INFINITY])?.values.remove(0);
        let curl_b_sup = match &state.magnetic {
            Some(b) => Some(sup(&differentiate(b, DiffOp::Curl)?)),
            None => None,
        };
        let low_b1 = if system.is_scalar() {
            self.low_besov(&u, q, 1.0, f64::INFINITY)?
        } else {
            self.low_besov(&state.primary, q, 1.0, f64::INFINITY)?
        };
        let low_b0 = if system.is_scalar() {
            let low = lp.project_low(&state.primary, q.min(lp.q_max()))?;
            lp.besov_norm(&differentiate(&low, DiffOp::Gradient)?, 0.0, f64::INFINITY)?
        } else {
            self.low_besov(&curl, q, 0.0, f64::INFINITY)?
        };
        let hall_low = match (lambda_b, &state.magnetic) {
            (Some(lb), Some(b)) => Some(lb.lambda * self.low_besov(b, lb.q, 0.0, f64::INFINITY)?),
            _ => None,
        };
        let low_besov = self
            .layout
            .pairs
            .iter()
            .map(|&(r, l)| {
                let s = if r.is_infinite() { -1.0 } else { -1.0 + dim as f64 / r } + 2.0 / l;
                self.low_besov(&state.primary, q, s, r)
            })
            .collect::<Result<Vec<_>>>()?;
        let canc = cancellation_suite(lp, &u, state.magnetic.as_ref())?;
        Ok(DiagnosticsRecord {
            t: state.t,
            lambda,
            lambda_b,
            energy: energy.energy,
            enstrophy,
            dissipation: energy.dissipation,
            curl_sup: sup(&curl),
            curl_b_sup,
            low_b1,
            low_b0,
            hall_low,
            curl_shells,
            shells,
            shells_b,
            low_besov,
            i22_max: canc.max_i22(),
            h12_max: canc.max_h12(),
            hall_power: hall_power(state)?,
        })
    }
}
