use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lindsteady::check::run_checks;
use lindsteady::output::write_records;
use lindsteady::run::{ensure_dir, worker_count, WORKERS_ENV};
use lindsteady::{
    load_config, load_grid, preset, run_point, run_sweep, write_records_csv, HarnessError,
    PointOutput, ResultRecord, RunConfig, SweepGrid,
};

#[derive(Parser)]
#[command(name = "lindsteady", version, about = "Steady states of phase-modulated dissipative lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a single configuration.
    Point { config: PathBuf },
    /// Solve every point of a grid on top of a base configuration.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        grid: PathBuf,
    },
    /// Run the parameter set of one of the published figures.
    Preset {
        /// fig1 ... fig7
        name: String,
        /// Output directory (default: presets/<name>)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant and oracle suite.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

fn finish(cfg: &RunConfig, outputs: &[PointOutput]) -> Result<ExitCode, HarnessError> {
    ensure_dir(&cfg.output.dir)?;
    let records: Vec<ResultRecord> = outputs.iter().map(|o| o.record.clone()).collect();
    let path = cfg.output.dir.join("records.csv");
    write_records_csv(&records, &path)?;
    let failed = records.iter().filter(|r| !r.is_ok()).count();
    eprintln!("wrote {} rows to {}", records.len(), path.display());
    if failed > 0 {
        eprintln!("{failed} of {} points failed", records.len());
        for r in records.iter().filter(|r| !r.is_ok()) {
            eprintln!("  n={} alpha1={} nu={} beta={}: {}", r.n, r.alpha1, r.nu, r.beta, r.status);
        }
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn sweep(cfg: &RunConfig, grid: &SweepGrid) -> Result<ExitCode, HarnessError> {
    let workers = worker_count()?;
    eprintln!("{} points on {workers} workers ({WORKERS_ENV} overrides)", grid.point_count());
    let outputs = run_sweep(cfg, grid, workers)?;
    finish(cfg, &outputs)
}

fn run(cli: Cli) -> Result<ExitCode, HarnessError> {
    match cli.command {
        Command::Point { config } => {
            let cfg = load_config(&config)?;
            let out = run_point(&cfg)?;
            write_records(std::slice::from_ref(&out.record), std::io::stdout().lock())
                .map_err(|e| HarnessError::io("<stdout>", e.into()))?;
            finish(&cfg, std::slice::from_ref(&out))
        }
        Command::Sweep { config, grid } => {
            let cfg = load_config(&config)?;
            let grid = load_grid(&grid)?;
            sweep(&cfg, &grid)
        }
        Command::Preset { name, out } => {
            let mut p = preset(&name)?;
            if let Some(dir) = out {
                p.config.output.dir = dir;
            }
            let dir = p.config.output.dir.clone();
            ensure_dir(&dir)?;
            write_text(&dir.join("config.toml"), &p.config.to_toml()?)?;
            write_text(&dir.join("grid.toml"), &p.grid.to_toml()?)?;
            write_text(&dir.join("metadata.toml"), &p.metadata())?;
            sweep(&p.config, &p.grid)
        }
        Command::Check { seed } => {
            let outcomes = run_checks(seed);
            for o in &outcomes {
                println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
            }
            Ok(if outcomes.iter().all(|o| o.passed) { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
