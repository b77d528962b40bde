//! One-shot wavenumber and shell-norm evaluation of a stored field.

use std::fmt::Write as _;
use std::path::Path;

use dyrl_core::diagnostics::{r_label, wavenumber, ShellNorms, WavenumberConfig, WavenumberReport, Wavenumbers};
use dyrl_core::solver::Constants;
use dyrl_core::{BumpProfile, DyadicPartition};

use crate::error::CliError;
use crate::snapshot::Snapshot;

#[derive(Clone, Debug)]
pub struct Analysis {
    pub snapshot: Snapshot,
    pub wavenumbers: Wavenumbers,
    pub shells: ShellNorms,
    /// `(r, ‖f‖_{B^{-1+d/r}_{r,∞}})` per recorded exponent.
    pub besov: Vec<(f64, f64)>,
}

pub fn analyze_snapshot(snap: Snapshot, constants: Constants, cfg: &WavenumberConfig) -> Result<Analysis, CliError> {
    if cfg.system != snap.system {
        return Err(CliError::Config(vec![format!(
            "snapshot holds {}, wavenumber settings are for {}",
            snap.system, cfg.system
        )]));
    }
    cfg.validate()?;
    let state = snap.to_state(constants)?;
    let lp = DyadicPartition::new(state.grid(), BumpProfile::default());
    let wavenumbers = wavenumber(&state, &lp, cfg)?;
    let rs = cfg.recorded_rs();
    let shells = ShellNorms::compute(&lp, &state.primary, &rs)?;
    let dim = state.grid().dim() as f64;
    let besov = rs
        .iter()
        .map(|&r| {
            let s = if r.is_infinite() { -1.0 } else { -1.0 + dim / r };
            Ok((r, lp.besov_norm(&state.primary, s, r)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Analysis {
        snapshot: snap,
        wavenumbers,
        shells,
        besov,
    })
}

pub fn analyze_path(path: &Path, constants: Constants, cfg: &WavenumberConfig) -> Result<Analysis, CliError> {
    analyze_snapshot(Snapshot::read(path)?, constants, cfg)
}

fn render_wavenumber(s: &mut String, label: &str, rep: &WavenumberReport) {
    let w = rep.wavenumber;
    let _ = writeln!(
        s,
        "{label}: {} (Q = {}){}",
        w.lambda,
        w.q,
        if w.saturated { " saturated: top resolved shell fails" } else { "" }
    );
    let _ = writeln!(s, "test: {}", rep.test);
    let _ = writeln!(s, "{:>4} {:>4} {:>5} {:>22} {:>22}", "q", "p", "r", "value", "threshold");
    for row in &rep.table {
        let _ = writeln!(
            s,
            "{:>4} {:>4} {:>5} {:>22.15e} {:>22.15e}{}",
            row.q,
            row.p,
            r_label(row.r),
            row.value,
            row.threshold,
            if row.pass { "" } else { "  FAIL" }
        );
    }
}

impl Analysis {
    pub fn render(&self) -> String {
        let snap = &self.snapshot;
        let mut s = String::new();
        let _ = writeln!(s, "system: {}  n = {}  t = {:.16e}", snap.system, snap.n, snap.t);
        let which = if snap.system.is_scalar() { "theta" } else { "u" };
        let _ = writeln!(s, "shell norms |{which}_q|_r:");
        let _ = write!(s, "{:>4}", "q");
        for &r in &self.shells.rs {
            let _ = write!(s, " {:>22}", format!("r={}", r_label(r)));
        }
        let _ = writeln!(s);
        for (i, q) in (-1..=self.shells.q_max).enumerate() {
            let _ = write!(s, "{q:>4}");
            for col in &self.shells.values {
                let _ = write!(s, " {:>22.15e}", col[i]);
            }
            let _ = writeln!(s);
        }
        let _ = writeln!(s, "besov norms |{which}|_B^(-1+d/r)_(r,inf):");
        for (r, v) in &self.besov {
            let _ = writeln!(s, "  r={:<4} {v:.15e}", r_label(*r));
        }
        let label = if snap.system == dyrl_core::solver::System::HallMhd {
            "Lambda_u"
        } else {
            "Lambda"
        };
        render_wavenumber(&mut s, label, &self.wavenumbers.primary);
        if let Some(m) = &self.wavenumbers.magnetic {
            render_wavenumber(&mut s, "Lambda_b", m);
        }
        s
    }
}
