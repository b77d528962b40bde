use std::fmt;

use crate::error::{Error, Result};
use crate::lp::{lambda, DyadicPartition, Q_MIN};
use crate::solver::{Constants, SolverState, System};
use crate::spectral::ops::lp_of_magnitudes;
use crate::spectral::Field;

/// Default smallness constant for every exponent.
pub const DEFAULT_C: f64 = 0.1;
/// Default exponent of the Hall `Λ_b` factor `2^{δ(p-q)}`.
pub const DEFAULT_DELTA: f64 = 3.0;

/// Formats a Lebesgue exponent the way it appears in column names.
pub fn r_label(r: f64) -> String {
    if r.is_infinite() {
        "inf".to_string()
    } else if r.fract() == 0.0 {
        format!("{}", r as i64)
    } else {
        format!("{r}").replace('.', "p")
    }
}

/// Parameters of the dissipation wavenumber and of the criteria battery.
#[derive(Clone, Debug, PartialEq)]
pub struct WavenumberConfig {
    pub system: System,
    /// Finite subset of the admissible exponents. Λ over a subset is a
    /// lower bound for Λ over the full range.
    pub r_set: Vec<f64>,
    /// One constant per entry of `r_set`; a single entry is broadcast.
    pub c_r: Vec<f64>,
    /// Hall `Λ_b` factor exponent.
    pub delta: f64,
    /// First shell of the tail surrogate for `limsup_{q→∞}`; `None` means
    /// `q_max - 3`.
    pub q0: Option<i32>,
    /// `(r, ℓ)` pairs for the ℓ-power criteria (NSE only, finite ℓ).
    pub pairs: Vec<(f64, f64)>,
}

impl WavenumberConfig {
    pub fn default_for(system: System) -> WavenumberConfig {
        let inf = f64::INFINITY;
        let (r_set, pairs) = match system {
            System::Nse2d | System::Nse3d => {
                (vec![2.0, 3.0, 4.0, 6.0, 12.0, inf], vec![(2.0, 2.0), (inf, 1.0)])
            }
            System::Mhd => (vec![2.0, 3.0, 4.0, 6.0], Vec::new()),
            System::Sqg | System::HallMhd => (vec![inf], Vec::new()),
        };
        WavenumberConfig {
            system,
            r_set,
            c_r: vec![DEFAULT_C],
            delta: DEFAULT_DELTA,
            q0: None,
            pairs,
        }
    }

    /// Every violated constraint, empty when valid.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.r_set.is_empty() {
            out.push("r_set must not be empty".to_string());
        }
        let (lo, hi, what) = match self.system {
            System::Nse2d | System::Nse3d => (2.0, f64::INFINITY, "2 <= r <= inf"),
            System::Mhd => (2.0, 6.0, "2 <= r <= 6"),
            System::Sqg | System::HallMhd => (f64::INFINITY, f64::INFINITY, "r = inf"),
        };
        for &r in &self.r_set {
            if !(r >= lo && r <= hi) {
                out.push(format!("r_set entry {} outside {what} for {}", r_label(r), self.system));
            }
        }
        if self.c_r.len() != 1 && self.c_r.len() != self.r_set.len() {
            out.push(format!(
                "c_r has {} entries, expected 1 or {}",
                self.c_r.len(),
                self.r_set.len()
            ));
        }
        if self.c_r.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
            out.push("c_r entries must be positive and finite".to_string());
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            out.push(format!("delta must be non-negative (got {})", self.delta));
        }
        for &(r, l) in &self.pairs {
            if !(r >= 2.0) {
                out.push(format!("pair exponent r = {} must be >= 2", r_label(r)));
            }
            if !(l >= 1.0 && l.is_finite()) {
                out.push(format!("pair exponent l = {} must be finite and >= 1", r_label(l)));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.r_set.is_empty() {
            return Err(Error::EmptyRSet);
        }
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(v.join("; ")))
        }
    }

    /// `c_r` for an exponent; exponents outside `r_set` take the first
    /// constant.
    pub fn c_for(&self, r: f64) -> f64 {
        let i = self.r_set.iter().position(|&x| x == r).unwrap_or(0);
        if self.c_r.len() == 1 {
            self.c_r[0]
        } else {
            self.c_r.get(i).copied().unwrap_or(DEFAULT_C)
        }
    }

    /// Constant for thresholds not tied to an exponent: `c_∞` when `∞`
    /// is configured, otherwise the first constant.
    pub fn c_default(&self) -> f64 {
        self.c_for(f64::INFINITY)
    }

    /// Exponents whose shell norms are recorded: `r_set`, the pair
    /// exponents and always `∞`.
    pub fn recorded_rs(&self) -> Vec<f64> {
        let mut rs = self.r_set.clone();
        rs.extend(self.pairs.iter().map(|p| p.0));
        rs.push(f64::INFINITY);
        let mut out: Vec<f64> = Vec::new();
        for r in rs {
            if !out.contains(&r) {
                out.push(r);
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }

    pub fn tail_start(&self, q_max: i32) -> i32 {
        self.q0.unwrap_or(q_max - 3).clamp(0, q_max)
    }
}

/// `‖f_q‖_r` for every shell and every recorded exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct ShellNorms {
    pub q_max: i32,
    pub rs: Vec<f64>,
    /// `values[i][q + 1]` is `‖f_q‖_{rs[i]}`.
    pub values: Vec<Vec<f64>>,
}

impl ShellNorms {
    pub fn compute(lp: &DyadicPartition, f: &Field, rs: &[f64]) -> Result<ShellNorms> {
        let grid = lp.grid();
        let mut values = vec![Vec::new(); rs.len()];
        for q in lp.shells() {
            let comps = lp.project_shell(f, q)?.into_physical_data();
            let mag: Vec<f64> = (0..grid.len())
                .map(|i| comps.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
                .collect();
            for (v, &r) in values.iter_mut().zip(rs) {
                v.push(lp_of_magnitudes(&mag, r, grid.cell_volume()));
            }
        }
        Ok(ShellNorms {
            q_max: lp.q_max(),
            rs: rs.to_vec(),
            values,
        })
    }

    pub fn get(&self, q: i32, r: f64) -> Option<f64> {
        let i = self.rs.iter().position(|&x| x == r)?;
        self.values[i].get((q - Q_MIN) as usize).copied()
    }

    fn require(&self, q: i32, r: f64) -> Result<f64> {
        self.get(q, r).ok_or_else(|| {
            Error::MissingShells(format!("no norm for shell {q}, r = {}", r_label(r)))
        })
    }
}

/// Which smallness test defines the wavenumber.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SmallnessTest {
    /// `λ_p^{-1+d/r}‖u_p‖_r < c_r ν` (NSE, MHD).
    Velocity { dim: usize },
    /// `λ_p^{-1}‖u_p‖_∞ < c₀ min{ν, μ}` (Hall `Λ_u`).
    HallVelocity,
    /// `2^{δ(p-q)}‖b_p‖_∞ < c₀ min{ν, μ}` (Hall `Λ_b`).
    HallMagnetic { delta: f64 },
    /// `λ_p^{1-α}‖θ_p‖_∞ < c₀ κ` (SQG).
    Scalar { alpha: f64 },
}

impl SmallnessTest {
    fn weight(&self, q: i32, p: i32, r: f64) -> f64 {
        match *self {
            SmallnessTest::Velocity { dim } => {
                let e = if r.is_infinite() { -1.0 } else { -1.0 + dim as f64 / r };
                lambda(p).powf(e)
            }
            SmallnessTest::HallVelocity => 1.0 / lambda(p),
            SmallnessTest::HallMagnetic { delta } => 2f64.powf(delta * (p - q) as f64),
            SmallnessTest::Scalar { alpha } => lambda(p).powf(1.0 - alpha),
        }
    }
}

impl fmt::Display for SmallnessTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmallnessTest::Velocity { dim } => write!(f, "lambda_p^(-1+{dim}/r) |u_p|_r < c_r nu"),
            SmallnessTest::HallVelocity => write!(f, "lambda_p^-1 |u_p|_inf < c_0 min(nu, mu)"),
            SmallnessTest::HallMagnetic { delta } => {
                write!(f, "2^({delta}(p-q)) |b_p|_inf < c_0 min(nu, mu)")
            }
            SmallnessTest::Scalar { alpha } => {
                write!(f, "lambda_p^(1-{alpha}) |theta_p|_inf < c_0 kappa")
            }
        }
    }
}

/// One evaluated smallness test: candidate `q`, shell `p > q`, exponent `r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestRow {
    pub q: i32,
    pub p: i32,
    pub r: f64,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// `Λ = λ_Q`. When even the top resolved shell fails its test the
/// wavenumber is reported one octave above the grid and flagged.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wavenumber {
    pub lambda: f64,
    pub q: i32,
    pub saturated: bool,
}

impl Wavenumber {
    /// `Q(t) = log₂ Λ(t)`.
    pub fn log2(&self) -> i32 {
        self.q
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WavenumberReport {
    pub test: SmallnessTest,
    pub wavenumber: Wavenumber,
    /// Every `(q, p, r)` test for `0 ≤ q < p ≤ q_max`.
    pub table: Vec<TestRow>,
}

/// Evaluates the wavenumber from precomputed shell norms. `c_for` maps an
/// exponent to its constant and `floor` is the dissipation coefficient.
pub fn wavenumber_from_norms(
    test: SmallnessTest,
    norms: &ShellNorms,
    r_set: &[f64],
    c_for: impl Fn(f64) -> f64,
    floor: f64,
) -> Result<WavenumberReport> {
    if r_set.is_empty() {
        return Err(Error::EmptyRSet);
    }
    let q_max = norms.q_max;
    let mut table = Vec::new();
    let mut found = None;
    for q in 0..=q_max {
        let mut all = true;
        for p in (q + 1)..=q_max {
            for &r in r_set {
                let value = test.weight(q, p, r) * norms.require(p, r)?;
                let threshold = c_for(r) * floor;
                let pass = value < threshold;
                all &= pass;
                table.push(TestRow {
                    q,
                    p,
                    r,
                    value,
                    threshold,
                    pass,
                });
            }
        }
        if all && found.is_none() {
            found = Some(q);
        }
    }
    let q = found.expect("q = q_max passes vacuously");
    let wavenumber = if q == q_max {
        Wavenumber {
            lambda: lambda(q_max + 1),
            q: q_max + 1,
            saturated: true,
        }
    } else {
        Wavenumber {
            lambda: lambda(q),
            q,
            saturated: false,
        }
    };
    Ok(WavenumberReport {
        test,
        wavenumber,
        table,
    })
}

/// Wavenumbers of one state: `Λ` (or `Λ_u`), plus `Λ_b` for Hall-MHD.
#[derive(Clone, Debug, PartialEq)]
pub struct Wavenumbers {
    pub primary: WavenumberReport,
    pub magnetic: Option<WavenumberReport>,
}

pub(crate) fn primary_test(system: System, dim: usize, constants: &Constants) -> SmallnessTest {
    match system {
        System::Sqg => SmallnessTest::Scalar {
            alpha: constants.alpha,
        },
        System::HallMhd => SmallnessTest::HallVelocity,
        _ => SmallnessTest::Velocity { dim },
    }
}

/// Λ from shell norms of the primary field and, for Hall-MHD, of `b`.
pub fn wavenumbers_from_norms(
    cfg: &WavenumberConfig,
    constants: &Constants,
    dim: usize,
    primary: &ShellNorms,
    magnetic: Option<&ShellNorms>,
) -> Result<Wavenumbers> {
    cfg.validate()?;
    let floor = constants.floor(cfg.system);
    let test = primary_test(cfg.system, dim, constants);
    let p = wavenumber_from_norms(test, primary, &cfg.r_set, |r| cfg.c_for(r), floor)?;
    let m = match (cfg.system, magnetic) {
        (System::HallMhd, Some(b)) => Some(wavenumber_from_norms(
            SmallnessTest::HallMagnetic { delta: cfg.delta },
            b,
            &[f64::INFINITY],
            |_| cfg.c_default(),
            floor,
        )?),
        (System::HallMhd, None) => {
            return Err(Error::MissingShells("Hall-MHD needs magnetic shell norms".into()))
        }
        _ => None,
    };
    Ok(Wavenumbers {
        primary: p,
        magnetic: m,
    })
}

/// The dissipation wavenumber(s) of a solver state.
pub fn wavenumber(state: &SolverState, lp: &DyadicPartition, cfg: &WavenumberConfig) -> Result<Wavenumbers> {
    if cfg.system != state.system {
        return Err(Error::SystemMismatch(format!(
            "wavenumber configured for {}, state is {}",
            cfg.system, state.system
        )));
    }
    let primary = ShellNorms::compute(lp, &state.primary, &cfg.r_set)?;
    let magnetic = match (state.system, &state.magnetic) {
        (System::HallMhd, Some(b)) => Some(ShellNorms::compute(lp, b, &[f64::INFINITY])?),
        _ => None,
    };
    wavenumbers_from_norms(cfg, &state.constants, state.grid().dim(), &primary, magnetic.as_ref())
}
