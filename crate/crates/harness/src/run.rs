use std::path::Path;
use std::time::Instant;

use lindsteady_core::observables::{compute_observables, eigenbasis};
use lindsteady_core::solvers::steady_state;
use lindsteady_core::{Gauge, LindbladGenerator, ObservableSet, SteadyStateResult};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{HarnessError, Result};
use crate::grid::SweepGrid;
use crate::output::{write_matrix_dump, write_profile_dump, ResultRecord};

/// Overrides the sweep worker count.
pub const WORKERS_ENV: &str = "LINDSTEADY_WORKERS";

#[derive(Debug, Clone)]
pub struct PointOutput {
    pub record: ResultRecord,
    /// Absent when the solve failed.
    pub observables: Option<ObservableSet>,
    pub error: Option<lindsteady_core::Error>,
}

/// Worker count from [`WORKERS_ENV`], else the available parallelism.
pub fn worker_count() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(HarnessError::Config(format!("{WORKERS_ENV} must be a positive integer (got {s:?})"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Keeps every factorization and eigensolve on the calling thread, which
/// makes results independent of how many points run side by side.
pub fn use_sequential_kernels() {
    faer::set_global_parallelism(faer::Par::Seq);
}

fn basis_tag(gauge: Gauge) -> String {
    format!("eigen-{}", gauge.as_str())
}

fn solve(cfg: &RunConfig, keep_rho_pq: bool) -> lindsteady_core::Result<(SteadyStateResult, ObservableSet)> {
    let gen = LindbladGenerator::new(&cfg.lattice, &cfg.dissipation)?;
    let ss = steady_state(&gen, cfg.solver.method, &cfg.solver.evolution_config())?;
    let basis = eigenbasis(&gen.hamiltonian, cfg.observables.gauge)?;
    let obs = compute_observables(&ss.rho_ss, &basis, cfg.observables.log_base, keep_rho_pq)?;
    Ok((ss, obs))
}

/// Builds, solves and measures one configuration without touching the disk.
pub fn solve_point(cfg: &RunConfig, scan: &str, keep_rho_pq: bool) -> PointOutput {
    use_sequential_kernels();
    let start = Instant::now();
    let outcome = solve(cfg, keep_rho_pq);
    let mut record = ResultRecord {
        scan: scan.to_string(),
        n: cfg.lattice.n,
        t: cfg.lattice.t,
        lattice_boundary: cfg.lattice.boundary.to_string(),
        gamma: cfg.dissipation.gamma,
        alpha0: cfg.dissipation.alpha0,
        alpha1: cfg.dissipation.alpha1,
        beta: cfg.dissipation.beta,
        nu: cfg.dissipation.nu,
        dissipation_boundary: cfg.dissipation.boundary.to_string(),
        index_origin: cfg.dissipation.index_origin,
        method: cfg.solver.method.to_string(),
        gauge: cfg.observables.gauge.to_string(),
        log_base: cfg.observables.log_base.as_str().to_string(),
        status: "ok".into(),
        residual: f64::NAN,
        c_re: f64::NAN,
        purity: f64::NAN,
        pr: f64::NAN,
        min_eig_rho: f64::NAN,
        steps: 0,
        wall_time: 0.0,
    };
    let mut out = match outcome {
        Ok((ss, obs)) => {
            record.residual = ss.residual;
            record.c_re = obs.c_re;
            record.purity = obs.purity;
            record.pr = obs.pr;
            record.min_eig_rho = ss.min_eigenvalue;
            record.steps = ss.steps;
            PointOutput { record, observables: Some(obs), error: None }
        }
        Err(e) => {
            record.status = format!("failed: {e}");
            PointOutput { record, observables: None, error: Some(e) }
        }
    };
    out.record.wall_time = start.elapsed().as_secs_f64();
    out
}

fn write_dumps(cfg: &RunConfig, tag: &str, out: &PointOutput) -> Result<()> {
    let Some(obs) = &out.observables else { return Ok(()) };
    let flags = &cfg.observables;
    if !(flags.emit_rho_nn || flags.emit_rho_pq) {
        return Ok(());
    }
    let dir = &cfg.output.dir;
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    if flags.emit_rho_nn {
        write_profile_dump(&obs.rho_nn, "site", &dir.join(format!("rho_nn_{tag}.txt")))?;
        write_profile_dump(&obs.rho_pp, &basis_tag(flags.gauge), &dir.join(format!("rho_pp_{tag}.txt")))?;
    }
    if let (true, Some(rho_pq)) = (flags.emit_rho_pq, &obs.rho_pq) {
        write_matrix_dump(rho_pq.as_ref(), &basis_tag(flags.gauge), &dir.join(format!("rho_pq_{tag}.txt")))?;
    }
    Ok(())
}

/// Solves one point and writes any requested dumps to `cfg.output.dir`.
pub fn run_point(cfg: &RunConfig) -> Result<PointOutput> {
    cfg.validate()?;
    let out = solve_point(cfg, "point", cfg.observables.emit_rho_pq);
    write_dumps(cfg, "point", &out)?;
    Ok(out)
}

/// Solves every grid point on `workers` threads. Rows come back in grid order.
pub fn run_sweep(cfg: &RunConfig, grid: &SweepGrid, workers: usize) -> Result<Vec<PointOutput>> {
    cfg.validate()?;
    let points = grid.points(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot start {workers} workers: {e}")))?;
    let width = points.len().saturating_sub(1).to_string().len().max(4);
    pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                let out = solve_point(&p.config, &p.scan, p.config.observables.emit_rho_pq);
                write_dumps(&p.config, &format!("{i:0width$}"), &out)?;
                Ok(PointOutput {
                    observables: out.observables.map(|mut o| {
                        o.rho_pq = None;
                        o
                    }),
                    ..out
                })
            })
            .collect()
    })
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}
