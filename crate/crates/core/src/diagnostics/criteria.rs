use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::lp::{lambda, DyadicPartition, Q_MIN};
use crate::solver::{Constants, System};
use crate::spectral::Field;

use super::kolmogorov::{kolmogorov_stats, window_integral, KolmogorovStats};
use super::record::DiagnosticsRecord;
use super::wavenumber::{r_label, WavenumberConfig};

/// Fraction of the window used for `lim_{ε→0}` and `limsup_{t→T}` surrogates.
pub const TAIL_FRACTION: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Satisfied,
    Violated,
    Indeterminate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Satisfied => "satisfied",
            Verdict::Violated => "violated",
            Verdict::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionRow {
    /// Short identifier, also the plot file stem.
    pub name: String,
    pub description: String,
    pub value: f64,
    /// `None` for integrals that only need to be finite.
    pub threshold: Option<f64>,
    pub threshold_expr: String,
    /// `true` when the threshold comparison is strict.
    pub strict: bool,
    pub verdict: Verdict,
}

/// One sample of `‖u(t) - u(T)‖_{B^{-1+d/r}_{r,∞}}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailSample {
    pub t: f64,
    pub r: f64,
    pub distance: f64,
}

/// Besov distances of stored late-time fields to the final field.
pub fn tail_distances(
    lp: &DyadicPartition,
    fields: &[(f64, Field)],
    last: &Field,
    rs: &[f64],
) -> Result<Vec<TailSample>> {
    let dim = lp.grid().dim() as f64;
    let mut out = Vec::new();
    for (t, f) in fields {
        let diff = f.sub(last)?;
        for &r in rs {
            let s = if r.is_infinite() { -1.0 } else { -1.0 + dim / r };
            out.push(TailSample {
                t: *t,
                r,
                distance: lp.besov_norm(&diff, s, r)?,
            });
        }
    }
    Ok(out)
}

/// Per-criterion time series for plotting.
#[derive(Clone, Debug, PartialEq)]
pub struct Integrand {
    pub name: String,
    pub t: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriteriaReport {
    pub system: System,
    pub t_start: f64,
    pub t_end: f64,
    pub q0: i32,
    pub q_max: i32,
    pub rows: Vec<CriterionRow>,
    /// `F(q) = ∫_{T/2}^T 1_{q≤Q(t)} λ_q ‖u_q‖_∞ dt`.
    pub f_q: Vec<(i32, f64)>,
    /// Entry times `T_q`.
    pub t_q: Vec<(i32, f64)>,
    pub kolmogorov: Option<KolmogorovStats>,
    pub integrands: Vec<Integrand>,
}

fn sig(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        format!("{x}")
    }
}

impl CriteriaReport {
    pub fn row(&self, name: &str) -> Option<&CriterionRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// Structured text with values to 12 significant digits.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "system: {}", self.system);
        let _ = writeln!(s, "window: [{}, {}]", sig(self.t_start), sig(self.t_end));
        let _ = writeln!(
            s,
            "tail surrogate: sup over {} <= q <= {} (limsup q -> inf)",
            self.q0, self.q_max
        );
        let _ = writeln!(s, "criteria:");
        for r in &self.rows {
            let th = r.threshold.map_or_else(|| "finite".to_string(), sig);
            let _ = writeln!(
                s,
                "  {:<16} {:<10} value={} threshold={} [{}] {}",
                r.name,
                r.verdict.to_string(),
                sig(r.value),
                th,
                r.threshold_expr,
                r.description
            );
        }
        if !self.f_q.is_empty() {
            let _ = writeln!(s, "F(q):");
            for (q, v) in &self.f_q {
                let _ = writeln!(s, "  q={q:<3} {}", sig(*v));
            }
        }
        if !self.t_q.is_empty() {
            let _ = writeln!(s, "T_q:");
            for (q, v) in &self.t_q {
                let _ = writeln!(s, "  q={q:<3} {}", sig(*v));
            }
        }
        if let Some(k) = &self.kolmogorov {
            let _ = writeln!(s, "kolmogorov:");
            let _ = writeln!(s, "  epsilon         {}", sig(k.epsilon));
            let _ = writeln!(s, "  kappa_d         {}", sig(k.kappa_d));
            let _ = writeln!(s, "  kappa_d(sigma)  {} (sigma={})", sig(k.kappa_d_sigma), k.sigma);
            let _ = writeln!(s, "  <Lambda>        {}", sig(k.mean_lambda));
            let _ = writeln!(s, "  <Lambda>_U      {}", sig(k.mean_lambda_u));
        }
        s
    }
}

struct Series<'a> {
    recs: &'a [DiagnosticsRecord],
    t: Vec<f64>,
    a: f64,
    b: f64,
}

impl Series<'_> {
    fn column(&self, f: impl Fn(&DiagnosticsRecord) -> f64) -> Vec<f64> {
        self.recs.iter().map(f).collect()
    }

    fn integral(&self, y: &[f64], from: f64) -> f64 {
        window_integral(&self.t, y, from, self.b)
    }

    fn half(&self) -> f64 {
        self.a + 0.5 * (self.b - self.a)
    }

    fn late(&self) -> f64 {
        self.b - TAIL_FRACTION * (self.b - self.a)
    }

    /// `T_q`: the first sample time in `[T/2, T]` at which `Q ≥ q`, or `T`.
    fn entry_time(&self, q: i32) -> f64 {
        let half = self.half();
        self.recs
            .iter()
            .find(|r| r.t >= half && r.lambda.q >= q)
            .map_or(self.b, |r| r.t)
    }
}

fn shell(q: i32) -> usize {
    (q - Q_MIN) as usize
}

fn integral_row(name: &str, description: &str, value: f64) -> CriterionRow {
    CriterionRow {
        name: name.to_string(),
        description: description.to_string(),
        value,
        threshold: None,
        threshold_expr: "< inf".to_string(),
        strict: true,
        verdict: if value.is_finite() {
            Verdict::Satisfied
        } else {
            Verdict::Violated
        },
    }
}

fn threshold_row(
    name: &str,
    description: &str,
    value: Option<f64>,
    threshold: f64,
    expr: &str,
    strict: bool,
) -> CriterionRow {
    let verdict = match value {
        Some(v) if v.is_nan() => Verdict::Indeterminate,
        None => Verdict::Indeterminate,
        Some(v) => {
            let ok = if strict { v < threshold } else { v <= threshold };
            if ok {
                Verdict::Satisfied
            } else {
                Verdict::Violated
            }
        }
    };
    CriterionRow {
        name: name.to_string(),
        description: description.to_string(),
        value: value.unwrap_or(f64::NAN),
        threshold: Some(threshold),
        threshold_expr: expr.to_string(),
        strict,
        verdict,
    }
}

fn tail_sup(values: impl Iterator<Item = f64>) -> Option<f64> {
    values.fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
}

/// Evaluates the regularity-criteria battery on a sampled trajectory.
/// `tail` supplies the late-time Besov distances; without it the
/// distance criterion is reported as indeterminate.
pub fn criteria_battery(
    records: &[DiagnosticsRecord],
    constants: &Constants,
    cfg: &WavenumberConfig,
    tail: Option<&[TailSample]>,
    sigma: f64,
) -> Result<CriteriaReport> {
    if records.len() < 4 {
        return Err(Error::SeriesTooShort(records.len()));
    }
    cfg.validate()?;
    let system = cfg.system;
    let q_max = records[0].shells.q_max;
    let q0 = cfg.tail_start(q_max);
    let s = Series {
        recs: records,
        t: records.iter().map(|r| r.t).collect(),
        a: records[0].t,
        b: records[records.len() - 1].t,
    };
    let c = cfg.c_default();
    let dim = system.dim() as f64;
    let mut rows = Vec::new();
    let mut integrands = Vec::new();
    let mut push_integrand = |name: &str, values: &[f64]| {
        integrands.push(Integrand {
            name: name.to_string(),
            t: s.t.clone(),
            values: values.to_vec(),
        })
    };

    // F(q) = ∫_{T/2}^T 1_{q≤Q} λ_q ‖u_q‖_∞ dt
    let f_q: Vec<(i32, f64)> = if system.is_scalar() || system == System::HallMhd {
        Vec::new()
    } else {
        (Q_MIN..=q_max)
            .map(|q| {
                let y = s.column(|r| {
                    if q <= r.lambda.q {
                        lambda(q) * r.shells.get(q, f64::INFINITY).unwrap_or(f64::NAN)
                    } else {
                        0.0
                    }
                });
                (q, s.integral(&y, s.half()))
            })
            .collect()
    };
    let t_q: Vec<(i32, f64)> = if system.is_nse() {
        (Q_MIN..=q_max).map(|q| (q, s.entry_time(q))).collect()
    } else {
        Vec::new()
    };

    match system {
        System::Nse2d | System::Nse3d | System::Mhd => {
            let bkm = s.column(|r| r.curl_sup + r.curl_b_sup.unwrap_or(0.0));
            let desc = if system == System::Mhd {
                "int_0^T |curl u|_inf + |curl b|_inf dt"
            } else {
                "int_0^T |curl u|_inf dt"
            };
            rows.push(integral_row("bkm", desc, s.integral(&bkm, s.a)));
            push_integrand("bkm", &bkm);
            let cs = s.column(|r| r.low_b0);
            rows.push(integral_row(
                "cs",
                "int_0^T |(curl u)_{<=Q}|_{B^0_inf,inf} dt",
                s.integral(&cs, s.a),
            ));
            push_integrand("cs", &cs);
            let tail = tail_sup(f_q.iter().filter(|(q, _)| *q >= q0).map(|p| p.1));
            rows.push(threshold_row(
                "cd_tail",
                "sup_{q>=q0} int_{T/2}^T 1_{q<=Q} lambda_q |u_q|_inf dt",
                tail,
                c,
                "< c",
                true,
            ));
            let cd_t: Vec<f64> = s.column(|r| {
                (q0..=q_max)
                    .filter(|&q| q <= r.lambda.q)
                    .map(|q| lambda(q) * r.shells.get(q, f64::INFINITY).unwrap_or(f64::NAN))
                    .fold(0.0, f64::max)
            });
            push_integrand("cd_tail", &cd_t);
        }
        System::HallMhd => {
            let bkm = s.column(|r| r.curl_sup + r.curl_b_sup.unwrap_or(0.0));
            rows.push(integral_row(
                "bkm",
                "int_0^T |curl u|_inf + |curl b|_inf dt",
                s.integral(&bkm, s.a),
            ));
            push_integrand("bkm", &bkm);
            let mmd = s.column(|r| r.low_b1 + r.hall_low.unwrap_or(f64::NAN));
            rows.push(integral_row(
                "mmd",
                "int_0^T |u_{<=Q_u}|_{B^1_inf,inf} + Lambda_b |b_{<=Q_b}|_{B^0_inf,inf} dt",
                s.integral(&mmd, s.a),
            ));
            push_integrand("mmd", &mmd);
        }
        System::Sqg => {
            let bkm = s.column(|r| r.curl_sup);
            rows.push(integral_row("bkm", "int_0^T |grad^perp theta|_inf dt", s.integral(&bkm, s.a)));
            push_integrand("bkm", &bkm);
            let md1 = s.column(|r| r.low_b0);
            rows.push(integral_row(
                "md1",
                "int_0^T |grad theta_{<=Q}|_{B^0_inf,inf} dt",
                s.integral(&md1, s.a),
            ));
            push_integrand("md1", &md1);
        }
    }

    if system.is_nse() {
        let nu = constants.nu;
        let curl_q = |q: i32| s.column(|r| r.curl_shells[shell(q)]);
        let tails = |from: &dyn Fn(i32) -> f64| {
            tail_sup((q0..=q_max).map(|q| s.integral(&curl_q(q), from(q))))
        };
        rows.push(threshold_row(
            "i",
            "sup_{q>=q0} int_{T_q}^T |Delta_q curl u|_inf dt",
            tails(&|q| s.entry_time(q)),
            c,
            "< c",
            true,
        ));
        rows.push(threshold_row(
            "ii",
            "sup_{q>=q0} int_{T-eps}^T |Delta_q curl u|_inf dt",
            tails(&|_| s.late()),
            c,
            "< c",
            true,
        ));
        let iii = s.column(|r| {
            (Q_MIN..=r.lambda.q.min(q_max))
                .map(|q| r.curl_shells[shell(q)])
                .fold(0.0, f64::max)
        });
        rows.push(integral_row(
            "iii",
            "int_0^T sup_{q<=Q} |Delta_q curl u|_inf dt",
            s.integral(&iii, s.a),
        ));
        push_integrand("iii", &iii);

        for (pi, &(r, l)) in cfg.pairs.iter().enumerate() {
            let cr = cfg.c_for(r);
            let th = nu.powf(l - 1.0) * cr.powf(l);
            let tag = format!("r{}_l{}", r_label(r), r_label(l));
            let expo = if r.is_infinite() { -1.0 } else { -1.0 + dim / r } + 2.0 / l;
            let term = |q: i32, gated: bool| {
                s.column(|rec| {
                    if gated && q > rec.lambda.q {
                        return 0.0;
                    }
                    let n = rec.shells.get(q, r).unwrap_or(f64::NAN);
                    (lambda(q).powf(expo) * n).powf(l)
                })
            };
            let expr = "< nu^(l-1) c_r^l";
            let iv = tail_sup((q0..=q_max).map(|q| s.integral(&term(q, true), s.a)));
            rows.push(threshold_row(
                &format!("iv_{tag}"),
                "sup_{q>=q0} int_0^T 1_{q<=Q} (lambda_q^(-1+d/r+2/l) |u_q|_r)^l dt",
                iv,
                th,
                expr,
                true,
            ));
            let v = tail_sup((q0..=q_max).map(|q| s.integral(&term(q, false), s.entry_time(q))));
            rows.push(threshold_row(
                &format!("v_{tag}"),
                "sup_{q>=q0} int_{T_q}^T (lambda_q^(-1+d/r+2/l) |u_q|_r)^l dt",
                v,
                th,
                expr,
                true,
            ));
            let vi = tail_sup((q0..=q_max).map(|q| s.integral(&term(q, false), s.late())));
            rows.push(threshold_row(
                &format!("vi_{tag}"),
                "sup_{q>=q0} int_{T-eps}^T (lambda_q^(-1+d/r+2/l) |u_q|_r)^l dt",
                vi,
                th,
                expr,
                true,
            ));
            let vii = s.column(|rec| rec.low_besov.get(pi).copied().unwrap_or(f64::NAN).powf(l));
            rows.push(threshold_row(
                &format!("vii_{tag}"),
                "int_0^T |u_{<=Q}|_{B^(-1+d/r+2/l)_r,inf}^l dt",
                Some(s.integral(&vii, s.a)),
                th,
                expr,
                true,
            ));
            push_integrand(&format!("vii_{tag}"), &vii);
        }
        let mut viii_rs: Vec<f64> = Vec::new();
        for &(r, _) in &cfg.pairs {
            if !viii_rs.contains(&r) {
                viii_rs.push(r);
            }
        }
        for r in viii_rs {
            let late = s.late();
            let value = tail.and_then(|samples| {
                tail_sup(
                    samples
                        .iter()
                        .filter(|x| x.r == r && x.t >= late - 1e-12 * s.b.abs().max(1.0))
                        .map(|x| x.distance),
                )
            });
            rows.push(threshold_row(
                &format!("viii_r{}", r_label(r)),
                "max_{t>=T-eps} |u(t)-u(T)|_{B^(-1+d/r)_r,inf}",
                value,
                0.5 * cfg.c_for(r),
                "<= c_r/2",
                false,
            ));
        }
    }

    let kolmogorov = if system.is_scalar() || constants.nu <= 0.0 {
        None
    } else {
        Some(kolmogorov_stats(records, constants.nu, sigma)?)
    };

    Ok(CriteriaReport {
        system,
        t_start: s.a,
        t_end: s.b,
        q0,
        q_max,
        rows,
        f_q,
        t_q,
        kolmogorov,
        integrands,
    })
}
