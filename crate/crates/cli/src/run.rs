//! Run orchestration.
//!
//! The integrator owns the state. At each sample time it sends a deep
//! copy over a bounded channel to a diagnostics thread, which computes the
//! record and appends it to the series. Nothing is shared mutably, so the
//! series order and content do not depend on thread timing.

use std::path::{Path, PathBuf};
use std::sync::mpsc;

use dyrl_core::diagnostics::{tail_distances, Sampler, TAIL_FRACTION};
use dyrl_core::solver::{InitialCondition, Integrator, SolverState};
use dyrl_core::{Error, Field};

use crate::config::{InitSection, RunConfig};
use crate::error::CliError;
use crate::series::{write_tail, write_text, SeriesWriter, CONFIG_FILE, SERIES_FILE, TAIL_FILE};
use crate::snapshot::Snapshot;

/// Marker left in the output directory when a run stops early.
pub const ABORT_MARKER: &str = "ABORTED";
pub const SNAPSHOT_DIR: &str = "snapshots";

#[derive(Clone, Debug, PartialEq)]
pub enum RunStatus {
    Completed,
    /// Non-finite values appeared; the series ends with the last finite sample.
    BlowUp { t: f64, message: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub rows: usize,
    pub steps: usize,
    pub t_final: f64,
    pub series: PathBuf,
    pub snapshots: Vec<PathBuf>,
}

pub fn snapshot_name(step: usize) -> String {
    format!("step_{step:08}.dyrl")
}

/// Initial state for a validated config.
pub fn initial_state(cfg: &RunConfig) -> Result<SolverState, CliError> {
    let grid = cfg.grid()?;
    let constants = cfg.constants();
    let ic = match &cfg.init {
        InitSection::TaylorGreen => InitialCondition::TaylorGreen,
        InitSection::SingleMode { k, amplitude } => {
            let mut kk = [0; 3];
            kk[..k.len().min(3)].copy_from_slice(&k[..k.len().min(3)]);
            InitialCondition::SingleMode {
                k: kk,
                amplitude: *amplitude,
            }
        }
        InitSection::RandomSpectrum {
            slope,
            k_peak,
            amplitude,
        } => InitialCondition::RandomSpectrum {
            slope: *slope,
            k_peak: *k_peak,
            seed: cfg.seed,
            amplitude: *amplitude,
        },
        InitSection::FromSnapshot { path } => {
            let snap = Snapshot::read(path)?;
            let mut bad = Vec::new();
            if snap.system != cfg.system {
                bad.push(format!(
                    "init.path: snapshot {} holds {}, config system is {}",
                    path.display(),
                    snap.system,
                    cfg.system
                ));
            }
            if snap.n != cfg.n {
                bad.push(format!(
                    "init.path: snapshot {} has n = {}, config n = {}",
                    path.display(),
                    snap.n,
                    cfg.n
                ));
            }
            if !bad.is_empty() {
                return Err(CliError::Config(bad));
            }
            return snap.to_state(constants);
        }
    };
    ic.build(cfg.system, &grid, constants).map_err(|e| match e {
        Error::InvalidConfig(m) => CliError::Config(vec![format!("init: {m}")]),
        e => e.into(),
    })
}

fn step_count(cfg: &RunConfig, t0: f64) -> Result<usize, CliError> {
    let span = cfg.t_end - t0;
    if !(span > 0.0) {
        return Err(CliError::Config(vec![format!(
            "t_end: {} is not after the initial time {t0}",
            cfg.t_end
        )]));
    }
    let steps = (span / cfg.dt).round();
    if ((steps * cfg.dt) - span).abs() > 1e-9 * span {
        log::warn!("t_end - t0 = {span} is not a multiple of dt; running {steps} steps");
    }
    Ok((steps as usize).max(1))
}

struct DiagnosticsOutput {
    rows: usize,
    /// Late-window samples of the primary field, for the distance criterion.
    late: Vec<(f64, Field)>,
}

fn diagnostics_worker(
    rx: mpsc::Receiver<SolverState>,
    sampler: &Sampler,
    mut writer: SeriesWriter,
    late_from: Option<f64>,
) -> Result<DiagnosticsOutput, CliError> {
    let mut late = Vec::new();
    for state in rx {
        let rec = sampler.sample(&state)?;
        writer.append(&rec)?;
        if late_from.is_some_and(|t| state.t >= t) {
            late.push((state.t, state.primary));
        }
    }
    Ok(DiagnosticsOutput {
        rows: writer.rows(),
        late,
    })
}

/// Integrates the configured system, writing `config.toml`, `series.csv`,
/// snapshots and (NSE with configured pairs) `tail.csv` into the output
/// directory.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    cfg.validate()?;
    let out = cfg.output.as_path();
    std::fs::create_dir_all(out.join(SNAPSHOT_DIR))
        .map_err(CliError::io(format!("creating {}", out.display())))?;
    write_text(&out.join(CONFIG_FILE), &cfg.to_toml())?;
    for stale in [ABORT_MARKER, TAIL_FILE] {
        let _ = std::fs::remove_file(out.join(stale));
    }

    let wcfg = cfg.wavenumber_config();
    let state = initial_state(cfg)?;
    let sampler = Sampler::new(state.grid(), wcfg.clone())?;
    let t0 = state.t;
    let steps = step_count(cfg, t0)?;
    let t_end = t0 + steps as f64 * cfg.dt;
    let wants_tail = cfg.system.is_nse() && !wcfg.pairs.is_empty();
    let late_from = wants_tail.then(|| t_end - TAIL_FRACTION * (t_end - t0) - 1e-9 * cfg.dt);
    let series_path = out.join(SERIES_FILE);
    let writer = SeriesWriter::create(&series_path, sampler.layout().clone())?;

    let (tx, rx) = mpsc::sync_channel::<SolverState>(4);
    let (integration, diagnostics) = std::thread::scope(|scope| {
        let worker = scope.spawn(|| diagnostics_worker(rx, &sampler, writer, late_from));
        let integration = integrate(cfg, state, steps, &tx, out);
        drop(tx);
        (integration, worker.join().expect("diagnostics thread panicked"))
    });

    let abort = |why: &str| {
        let _ = write_text(&out.join(ABORT_MARKER), why);
    };
    let diag = match diagnostics {
        Ok(d) => d,
        Err(e) => {
            abort(&format!("{e}\n"));
            return Err(e);
        }
    };
    let (status, done, t_final, snapshots, last) = match integration {
        Ok(x) => x,
        Err(e) => {
            abort(&format!("{e}\n"));
            return Err(e);
        }
    };
    if let RunStatus::BlowUp { message, .. } = &status {
        abort(&format!("{message}\n"));
    } else if let (true, Some(last)) = (wants_tail, last) {
        let mut rs: Vec<f64> = Vec::new();
        for &(r, _) in &wcfg.pairs {
            if !rs.contains(&r) {
                rs.push(r);
            }
        }
        let tail = tail_distances(sampler.partition(), &diag.late, &last.primary, &rs)?;
        write_tail(&out.join(TAIL_FILE), &tail)?;
    }
    Ok(RunOutcome {
        status,
        rows: diag.rows,
        steps: done,
        t_final,
        series: series_path,
        snapshots,
    })
}

type Integration = (RunStatus, usize, f64, Vec<PathBuf>, Option<SolverState>);

fn integrate(
    cfg: &RunConfig,
    mut state: SolverState,
    steps: usize,
    tx: &mpsc::SyncSender<SolverState>,
    out: &Path,
) -> Result<Integration, CliError> {
    let mut snapshots = Vec::new();
    let mut snapshot = |state: &SolverState, step: usize| -> Result<(), CliError> {
        let p = out.join(SNAPSHOT_DIR).join(snapshot_name(step));
        Snapshot::from_state(state).write(&p)?;
        snapshots.push(p);
        Ok(())
    };
    // A closed channel means the diagnostics thread failed; its error is
    // reported by the caller.
    let send = |state: &SolverState| tx.send(state.clone()).is_ok();

    snapshot(&state, 0)?;
    if !send(&state) {
        return Ok((RunStatus::Completed, 0, state.t, snapshots, None));
    }
    let t0 = state.t;
    let mut integrator = Integrator::new(&state);
    for step in 1..=steps {
        let mut next = match integrator.step(&state, cfg.dt) {
            Ok(s) => s,
            Err(e @ Error::NonFinite { .. }) => {
                let t = state.t;
                let message = format!("{e}; last finite state at t = {t}");
                return Ok((RunStatus::BlowUp { t, message }, step - 1, t, snapshots, None));
            }
            Err(e) => return Err(e.into()),
        };
        // Times are multiples of dt rather than accumulated sums.
        next.t = t0 + step as f64 * cfg.dt;
        state = next;
        if step % cfg.snapshot_stride == 0 {
            snapshot(&state, step)?;
        }
        if (step % cfg.sample_stride == 0 || step == steps) && !send(&state) {
            break;
        }
    }
    let t = state.t;
    Ok((RunStatus::Completed, steps, t, snapshots, Some(state)))
}
