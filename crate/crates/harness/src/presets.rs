//! Parameter sets of the published figures.

use std::path::PathBuf;

use crate::config::RunConfig;
use crate::error::{HarnessError, Result};
use crate::grid::{linspace, AxisSpec, Param, Scan, SweepGrid};

pub const PRESET_NAMES: [&str; 7] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7"];

/// Sizes of the system-size scans.
pub const SIZE_SCAN: [usize; 7] = [89, 100, 120, 144, 160, 180, 200];

/// Resolution of the α1 heatmap axis, which the figures do not state.
pub const ALPHA1_POINTS: usize = 61;
pub const ALPHA1_MAX: f64 = 6.0;

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub config: RunConfig,
    pub grid: SweepGrid,
    /// Choices made where the figure leaves a parameter open.
    pub notes: Vec<String>,
}

fn base(name: &str, n: usize, beta: Option<f64>) -> RunConfig {
    let mut cfg = RunConfig::with_size(n);
    cfg.output.dir = PathBuf::from("presets").join(name);
    if let Some(b) = beta {
        cfg.dissipation.beta = b;
    }
    cfg
}

fn alpha1_heatmap(name: &'static str, description: &'static str, n: usize, beta: Option<f64>) -> Preset {
    let mut config = base(name, n, beta);
    config.observables.emit_rho_nn = true;
    let grid = SweepGrid::single(
        Scan::labelled("alpha1")
            .with(Param::Nu, AxisSpec::List(vec![0.1, 0.6]))
            .with(Param::Alpha1, AxisSpec::Range { start: 0.0, stop: ALPHA1_MAX, count: ALPHA1_POINTS }),
    );
    let notes = vec![format!(
        "alpha1 axis: {ALPHA1_POINTS} points over [0, {ALPHA1_MAX}], includes alpha1 = 4 (step {})",
        linspace(0.0, ALPHA1_MAX, ALPHA1_POINTS)[1]
    )];
    Preset { name, description, config, grid, notes }
}

fn coherence_maps(name: &'static str, description: &'static str, n: usize, beta: Option<f64>) -> Preset {
    let mut config = base(name, n, beta);
    config.dissipation.alpha1 = 4.0;
    config.observables.emit_rho_pq = true;
    config.observables.emit_rho_nn = true;
    let grid = SweepGrid::single(Scan::labelled("nu").with(Param::Nu, AxisSpec::List(vec![0.1, 0.6])));
    Preset { name, description, config, grid, notes: Vec::new() }
}

fn scans(name: &'static str, description: &'static str, n: usize, beta: Option<f64>) -> Preset {
    let mut config = base(name, n, beta);
    config.dissipation.alpha1 = 4.0;
    let grid = SweepGrid {
        scans: vec![
            Scan::labelled("nu").with(Param::Nu, AxisSpec::List(vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6])),
            Scan::labelled("size")
                .with(Param::N, AxisSpec::List(SIZE_SCAN.iter().map(|&n| n as f64).collect())),
        ],
    };
    let notes = vec![format!("size scan at nu = {}", config.dissipation.nu)];
    Preset { name, description, config, grid, notes }
}

pub fn preset(name: &str) -> Result<Preset> {
    let p = match name {
        "fig1" => {
            let mut config = base("fig1", 144, None);
            config.observables.emit_rho_nn = true;
            config.observables.emit_rho_pq = true;
            Preset {
                name: "fig1",
                description: "uniform dissipation alpha0 = alpha1 = 0, N = 144",
                config,
                grid: SweepGrid::single(Scan::labelled("uniform")),
                notes: Vec::new(),
            }
        }
        "fig2" => alpha1_heatmap("fig2", "site populations over alpha1, incommensurate, N = 144", 144, None),
        "fig3" => coherence_maps("fig3", "eigenbasis density matrix at alpha1 = 4, incommensurate, N = 144", 144, None),
        "fig4" => scans("fig4", "nu scan and size scan at alpha1 = 4, incommensurate", 144, None),
        "fig5" => alpha1_heatmap("fig5", "site populations over alpha1, beta = 0.5, N = 150", 150, Some(0.5)),
        "fig6" => coherence_maps("fig6", "eigenbasis density matrix at alpha1 = 4, beta = 0.5, N = 150", 150, Some(0.5)),
        "fig7" => scans("fig7", "nu scan and size scan at alpha1 = 4, beta = 0.5", 150, Some(0.5)),
        other => {
            return Err(HarnessError::Config(format!(
                "unknown preset {other:?} (expected one of {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(p)
}

impl Preset {
    /// Human-readable metadata written next to the preset output.
    pub fn metadata(&self) -> String {
        let mut s = format!(
            "preset = {:?}\ndescription = {:?}\npoints = {}\ngauge = {:?}\nlog_base = {:?}\n",
            self.name,
            self.description,
            self.grid.point_count(),
            self.config.observables.gauge.as_str(),
            self.config.observables.log_base.as_str(),
        );
        s.push_str("notes = [\n");
        for n in &self.notes {
            s.push_str(&format!("  {n:?},\n"));
        }
        s.push_str("]\n");
        s
    }
}
