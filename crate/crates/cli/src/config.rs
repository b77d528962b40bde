//! Run configuration. One flat TOML table plus the `[constants]`,
//! `[init]` and `[wavenumber]` sections.
//!
//! ```toml
//! system = "nse2d"
//! n = 128
//! dt = 0.005
//! t_end = 2.0
//! sample_stride = 10
//! snapshot_stride = 100
//! seed = 7
//! output = "runs/tg"
//!
//! [constants]
//! nu = 0.1
//!
//! [init]
//! kind = "random_spectrum"
//! slope = 2.0
//! k_peak = 4.0
//!
//! [wavenumber]
//! r_set = [2, 4, inf]
//! c_r = [0.1]
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use dyrl_core::diagnostics::WavenumberConfig;
use dyrl_core::solver::{Constants, System};
use dyrl_core::Grid;

use crate::error::CliError;

mod system_serde {
    use dyrl_core::solver::System;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: &System, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(s.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<System, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(with = "system_serde")]
    pub system: System,
    pub n: usize,
    pub dt: f64,
    /// Final time. Runs started from a snapshot integrate from the
    /// snapshot time up to `t_end`.
    pub t_end: f64,
    /// Steps between diagnostics records.
    #[serde(default = "one")]
    pub sample_stride: usize,
    /// Steps between snapshots.
    #[serde(default = "default_snapshot_stride")]
    pub snapshot_stride: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub constants: ConstantsSection,
    pub init: InitSection,
    #[serde(default)]
    pub wavenumber: WavenumberSection,
}

fn one() -> usize {
    1
}

fn default_snapshot_stride() -> usize {
    1000
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSection {
    #[serde(default)]
    pub nu: f64,
    #[serde(default)]
    pub mu: f64,
    #[serde(default)]
    pub kappa: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_alpha() -> f64 {
    Constants::default().alpha
}

impl Default for ConstantsSection {
    fn default() -> Self {
        let c = Constants::default();
        ConstantsSection {
            nu: c.nu,
            mu: c.mu,
            kappa: c.kappa,
            alpha: c.alpha,
        }
    }
}

impl From<ConstantsSection> for Constants {
    fn from(c: ConstantsSection) -> Constants {
        Constants {
            nu: c.nu,
            mu: c.mu,
            kappa: c.kappa,
            alpha: c.alpha,
        }
    }
}

fn one_f() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitSection {
    TaylorGreen,
    SingleMode {
        k: Vec<i32>,
        #[serde(default = "one_f")]
        amplitude: f64,
    },
    /// Seeded by the top-level `seed`.
    RandomSpectrum {
        slope: f64,
        k_peak: f64,
        #[serde(default = "one_f")]
        amplitude: f64,
    },
    FromSnapshot {
        path: PathBuf,
    },
}

/// Overrides of the per-system wavenumber defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WavenumberSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_set: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_r: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q0: Option<i32>,
    /// `[r, l]` pairs of the l-power criteria.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<[f64; 2]>>,
    /// Intermittency dimension for the corrected Kolmogorov wavenumber.
    #[serde(default)]
    pub sigma: f64,
}

impl WavenumberSection {
    pub fn resolve(&self, system: System) -> WavenumberConfig {
        let mut cfg = WavenumberConfig::default_for(system);
        if let Some(r) = &self.r_set {
            cfg.r_set = r.clone();
        }
        if let Some(c) = &self.c_r {
            cfg.c_r = c.clone();
        }
        if let Some(d) = self.delta {
            cfg.delta = d;
        }
        cfg.q0 = self.q0;
        if let Some(p) = &self.pairs {
            cfg.pairs = p.iter().map(|&[r, l]| (r, l)).collect();
        }
        cfg
    }

    pub fn violations(&self, system: System) -> Vec<String> {
        let mut out: Vec<String> = self
            .resolve(system)
            .violations()
            .into_iter()
            .map(|v| format!("wavenumber: {v}"))
            .collect();
        if !(0.0..=3.0).contains(&self.sigma) {
            out.push(format!("wavenumber.sigma must lie in [0, 3] (got {})", self.sigma));
        }
        out
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(vec![e.message().to_string()]))
    }

    /// Reads, parses and validates a config file, resolving relative
    /// paths against its directory.
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(CliError::io(format!("reading config {}", path.display())))?;
        let mut cfg = RunConfig::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.output = base.join(&cfg.output);
        if let InitSection::FromSnapshot { path } = &mut cfg.init {
            *path = base.join(&*path);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn constants(&self) -> Constants {
        self.constants.into()
    }

    pub fn wavenumber_config(&self) -> WavenumberConfig {
        self.wavenumber.resolve(self.system)
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        Grid::new(self.system.dim(), self.n).map_err(|e| CliError::Config(vec![format!("n: {e}")]))
    }

    /// Every violated constraint, each prefixed by the offending key.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Err(e) = Grid::new(self.system.dim(), self.n) {
            out.push(format!("n: {e}"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            out.push(format!("dt: must be positive and finite (got {})", self.dt));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            out.push(format!("t_end: must be positive and finite (got {})", self.t_end));
        }
        if self.sample_stride == 0 {
            out.push("sample_stride: must be at least 1".to_string());
        }
        if self.snapshot_stride == 0 {
            out.push("snapshot_stride: must be at least 1".to_string());
        }
        out.extend(
            self.constants()
                .violations(self.system)
                .into_iter()
                .map(|v| format!("constants.{v}")),
        );
        if !self.system.is_scalar() && self.constants.alpha != default_alpha() {
            out.push(format!("constants.alpha is only used by sqg (got {})", self.constants.alpha));
        }
        match &self.init {
            InitSection::SingleMode { k, amplitude } => {
                if k.len() != self.system.dim() {
                    out.push(format!(
                        "init.k: expected {} components for {} (got {})",
                        self.system.dim(),
                        self.system,
                        k.len()
                    ));
                }
                if !amplitude.is_finite() {
                    out.push(format!("init.amplitude: must be finite (got {amplitude})"));
                }
            }
            InitSection::RandomSpectrum {
                slope,
                k_peak,
                amplitude,
            } => {
                if !slope.is_finite() {
                    out.push(format!("init.slope: must be finite (got {slope})"));
                }
                if !(*k_peak > 0.0 && k_peak.is_finite()) {
                    out.push(format!("init.k_peak: must be positive (got {k_peak})"));
                }
                if !(*amplitude >= 0.0 && amplitude.is_finite()) {
                    out.push(format!("init.amplitude: must be non-negative (got {amplitude})"));
                }
            }
            InitSection::TaylorGreen | InitSection::FromSnapshot { .. } => {}
        }
        out.extend(self.wavenumber.violations(self.system));
        out
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(v))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"
system = "nse2d"
n = 32
dt = 1e-3
t_end = 1
sample_stride = 10
snapshot_stride = 500
seed = 3
output = "tg"

[constants]
nu = 0.1

[init]
kind = "single_mode"
k = [1, 2]
amplitude = 0.5

[wavenumber]
r_set = [2, 4, inf]
c_r = [0.2]
pairs = [[2, 2], [inf, 1]]
"#;

    #[test]
    fn parses_integers_and_inf_as_reals() {
        let cfg = RunConfig::from_toml(FULL).unwrap();
        assert_eq!(cfg.t_end, 1.0);
        let w = cfg.wavenumber_config();
        assert_eq!(w.r_set, vec![2.0, 4.0, f64::INFINITY]);
        assert_eq!(w.pairs, vec![(2.0, 2.0), (f64::INFINITY, 1.0)]);
        assert!(cfg.violations().is_empty(), "{:?}", cfg.violations());
    }

    #[test]
    fn round_trips() {
        let cfg = RunConfig::from_toml(FULL).unwrap();
        let back = RunConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
        for init in [
            InitSection::TaylorGreen,
            InitSection::RandomSpectrum {
                slope: 1.0,
                k_peak: 3.0,
                amplitude: 2.0,
            },
            InitSection::FromSnapshot {
                path: "a/b.dyrl".into(),
            },
        ] {
            let c = RunConfig { init, ..cfg.clone() };
            assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
        }
    }

    #[test]
    fn lists_every_violation() {
        let text = FULL
            .replace("dt = 1e-3", "dt = 0")
            .replace("sample_stride = 10", "sample_stride = 0")
            .replace("nu = 0.1", "nu = -1");
        let v = RunConfig::from_toml(&text).unwrap().violations();
        assert_eq!(v.len(), 3, "{v:?}");
        assert!(v[0].starts_with("dt"));
        assert!(v[1].starts_with("sample_stride"));
        assert!(v[2].starts_with("constants.nu"));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_alpha() {
        assert!(RunConfig::from_toml(&FULL.replace("seed = 3", "sed = 3")).is_err());
        let sqg = FULL
            .replace("nse2d", "sqg")
            .replace("nu = 0.1", "kappa = 1.0\nalpha = 1.5")
            .replace("r_set = [2, 4, inf]", "")
            .replace("pairs = [[2, 2], [inf, 1]]", "");
        let v = RunConfig::from_toml(&sqg).unwrap().violations();
        assert!(v.iter().any(|s| s.contains("alpha")), "{v:?}");
    }
}
