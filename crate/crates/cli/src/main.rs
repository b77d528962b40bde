use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dyrl_cli::analyze::analyze_path;
use dyrl_cli::config::RunConfig;
use dyrl_cli::criteria::{load_run, write_plots};
use dyrl_cli::run::RunStatus;
use dyrl_cli::{init_threads, CliError, ExitStatus};
use dyrl_core::diagnostics::WavenumberConfig;
use dyrl_core::solver::{Constants, System};
use dyrl_core::verify::{run_suite, REFERENCE_SEED};

/// Littlewood-Paley diagnostics laboratory for dissipative PDEs on the torus.
#[derive(Parser)]
#[command(name = "dyrl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configured run, writing the series and snapshots.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the output directory of the config.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Wavenumber, shell norms and the smallness-test table of a snapshot.
    Analyze {
        snapshot: PathBuf,
        /// Run config supplying the constants and wavenumber settings.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated exponents, e.g. `2,4,inf`.
        #[arg(long, value_delimiter = ',')]
        r_set: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        c_r: Option<Vec<f64>>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        nu: f64,
        #[arg(long, default_value_t = 0.1)]
        mu: f64,
        #[arg(long, default_value_t = 0.1)]
        kappa: f64,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
    },
    /// Evaluate the regularity criteria on a series.
    Criteria {
        series: PathBuf,
        /// Run config; defaults to the config.toml next to the series.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory for SVG plots.
        #[arg(long)]
        plots: Option<PathBuf>,
    },
    /// Run a seeded property suite.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = REFERENCE_SEED)]
        seed: u64,
    },
}

fn execute(cmd: Command) -> Result<ExitStatus, CliError> {
    match cmd {
        Command::Run { config, output } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(o) = output {
                cfg.output = o;
            }
            let out = dyrl_cli::run(&cfg)?;
            println!("series: {} ({} rows, {} steps, t = {})", out.series.display(), out.rows, out.steps, out.t_final);
            match out.status {
                RunStatus::Completed => Ok(ExitStatus::Clean),
                RunStatus::BlowUp { message, .. } => {
                    eprintln!("blow-up: {message}");
                    Ok(ExitStatus::BlowUp)
                }
            }
        }
        Command::Analyze {
            snapshot,
            config,
            r_set,
            c_r,
            delta,
            nu,
            mu,
            kappa,
            alpha,
        } => {
            let (constants, mut wcfg) = match config {
                Some(p) => {
                    let cfg = RunConfig::load(&p)?;
                    (cfg.constants(), cfg.wavenumber_config())
                }
                None => {
                    let snap_system = dyrl_cli::Snapshot::read(&snapshot)?.system;
                    let alpha = if snap_system == System::Sqg { alpha } else { Constants::default().alpha };
                    (Constants { nu, mu, kappa, alpha }, WavenumberConfig::default_for(snap_system))
                }
            };
            if let Some(r) = r_set {
                wcfg.r_set = r;
            }
            if let Some(c) = c_r {
                wcfg.c_r = c;
            }
            if let Some(d) = delta {
                wcfg.delta = d;
            }
            print!("{}", analyze_path(&snapshot, constants, &wcfg)?.render());
            Ok(ExitStatus::Clean)
        }
        Command::Criteria { series, config, plots } => {
            let run = load_run(&series, config.as_deref())?;
            let report = run.report()?;
            print!("{}", report.render());
            if let Some(dir) = plots {
                for p in write_plots(&report, &run.records, &dir)? {
                    println!("plot: {}", p.display());
                }
            }
            Ok(ExitStatus::Clean)
        }
        Command::Verify { suite, seed } => {
            let rep = run_suite(&suite, seed).map_err(|e| CliError::Config(vec![e.to_string()]))?;
            print!("{}", rep.render());
            Ok(if rep.passed() { ExitStatus::Clean } else { ExitStatus::Failed })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let status = match init_threads().and_then(|_| execute(cli.command)) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            e.status()
        }
    };
    ExitCode::from(status as u8)
}
