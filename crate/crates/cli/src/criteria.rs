//! Criteria reports on stored series, with optional plots.

use std::path::{Path, PathBuf};

use dyrl_core::diagnostics::{criteria_battery, CriteriaReport, DiagnosticsRecord, TailSample};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::plot::{Chart, Line};
use crate::series::{read_series, read_tail, write_text, CONFIG_FILE, TAIL_FILE};

/// A series with the run config it was produced under.
#[derive(Clone, Debug)]
pub struct StoredRun {
    pub config: RunConfig,
    pub records: Vec<DiagnosticsRecord>,
    pub tail: Option<Vec<TailSample>>,
}

/// Loads `series` with its config, by default the `config.toml` beside it,
/// and the `tail.csv` beside it when present.
pub fn load_run(series: &Path, config: Option<&Path>) -> Result<StoredRun, CliError> {
    let dir = series.parent().unwrap_or(Path::new("."));
    let cfg_path = config.map_or_else(|| dir.join(CONFIG_FILE), Path::to_path_buf);
    let config = RunConfig::load(&cfg_path)?;
    let (_, records) = read_series(series, config.system)?;
    let tail_path = dir.join(TAIL_FILE);
    let tail = if tail_path.exists() {
        Some(read_tail(&tail_path)?)
    } else {
        None
    };
    Ok(StoredRun { config, records, tail })
}

impl StoredRun {
    pub fn report(&self) -> Result<CriteriaReport, CliError> {
        Ok(criteria_battery(
            &self.records,
            &self.config.constants(),
            &self.config.wavenumber_config(),
            self.tail.as_deref(),
            self.config.wavenumber.sigma,
        )?)
    }
}

/// Writes `{criterion}.svg` for every integrand, plus `lambda.svg`
/// (Λ(t) against κ_d) and, when available, `f_q.svg`.
pub fn write_plots(
    report: &CriteriaReport,
    records: &[DiagnosticsRecord],
    dir: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(CliError::io(format!("creating {}", dir.display())))?;
    let mut written = Vec::new();
    let mut emit = |name: &str, chart: Chart| -> Result<(), CliError> {
        let p = dir.join(format!("{name}.svg"));
        write_text(&p, &chart.render())?;
        written.push(p);
        Ok(())
    };
    for ig in &report.integrands {
        emit(
            &ig.name,
            Chart {
                title: format!("{} integrand", ig.name),
                x_label: "t".into(),
                y_label: ig.name.clone(),
                log_y: false,
                lines: vec![Line {
                    label: ig.name.clone(),
                    x: ig.t.clone(),
                    y: ig.values.clone(),
                    points: false,
                }],
            },
        )?;
    }
    let t: Vec<f64> = records.iter().map(|r| r.t).collect();
    let mut lines = vec![Line {
        label: "Lambda(t)".into(),
        x: t.clone(),
        y: records.iter().map(|r| r.lambda.lambda).collect(),
        points: false,
    }];
    if let Some(k) = &report.kolmogorov {
        lines.push(Line {
            label: "kappa_d".into(),
            x: vec![report.t_start, report.t_end],
            y: vec![k.kappa_d; 2],
            points: false,
        });
    }
    emit(
        "lambda",
        Chart {
            title: "dissipation wavenumber".into(),
            x_label: "t".into(),
            y_label: "wavenumber".into(),
            log_y: true,
            lines,
        },
    )?;
    if !report.f_q.is_empty() {
        emit(
            "f_q",
            Chart {
                title: "F(q) over [T/2, T]".into(),
                x_label: "q".into(),
                y_label: "F(q)".into(),
                log_y: true,
                lines: vec![Line {
                    label: "F(q)".into(),
                    x: report.f_q.iter().map(|p| p.0 as f64).collect(),
                    y: report.f_q.iter().map(|p| p.1).collect(),
                    points: true,
                }],
            },
        )?;
    }
    Ok(written)
}
