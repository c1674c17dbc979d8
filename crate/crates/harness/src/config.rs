//! Run configuration documents (TOML).
//!
//! ```toml
//! seed = 0
//!
//! [lattice]
//! n = 144
//! t = 1.0
//! boundary = "periodic"
//!
//! [dissipation]
//! gamma = 1.0
//! alpha0 = 0.0
//! alpha1 = 4.0
//! beta = 0.6180339887498949
//! nu = 0.1
//! boundary = "open"       # channel boundary; "periodic" adds the wraparound bond
//! index_origin = 0        # label of the first bond in the phase formula
//!
//! [solver]
//! method = "nullspace"    # or "evolution"
//! initial_state = "maximally_mixed"   # or "site:<index>"
//! rtol = 1e-8
//! atol = 1e-10
//! residual_tol = 1e-9
//! max_time = 1e6
//! resymmetrize_every = 100
//!
//! [observables]
//! emit_rho_pq = false
//! emit_rho_nn = false
//! log_base = "e"          # or "2"
//! gauge = "momentum"      # or "real_symmetric"; default follows the lattice boundary
//!
//! [output]
//! dir = "out"
//! dump_format = "text"
//! ```
//!
//! Only `lattice.n` is required. Unknown keys are rejected.

use std::path::PathBuf;

use lindsteady_core::{
    inverse_golden_ratio, Boundary, DissipationSpec, EvolutionConfig, Gauge, InitialState,
    LatticeSpec, LogBase, Method,
};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialChoice {
    MaximallyMixed,
    Site(usize),
}

impl InitialChoice {
    fn parse(s: &str) -> Option<Self> {
        if s == "maximally_mixed" {
            return Some(InitialChoice::MaximallyMixed);
        }
        s.strip_prefix("site:")?.parse().ok().map(InitialChoice::Site)
    }

    fn render(self) -> String {
        match self {
            InitialChoice::MaximallyMixed => "maximally_mixed".into(),
            InitialChoice::Site(i) => format!("site:{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    pub method: Method,
    pub initial_state: InitialChoice,
    pub rtol: f64,
    pub atol: f64,
    pub residual_tol: f64,
    pub max_time: f64,
    pub resymmetrize_every: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        let evo = EvolutionConfig::default();
        Self {
            method: Method::Nullspace,
            initial_state: InitialChoice::MaximallyMixed,
            rtol: evo.rtol,
            atol: evo.atol,
            residual_tol: evo.residual_tol,
            max_time: evo.max_time,
            resymmetrize_every: evo.resymmetrize_every,
        }
    }
}

impl SolverSettings {
    pub fn evolution_config(&self) -> EvolutionConfig {
        EvolutionConfig {
            initial_state: match self.initial_state {
                InitialChoice::MaximallyMixed => InitialState::MaximallyMixed,
                InitialChoice::Site(i) => InitialState::SiteLocalized(i),
            },
            rtol: self.rtol,
            atol: self.atol,
            residual_tol: self.residual_tol,
            max_time: self.max_time,
            resymmetrize_every: self.resymmetrize_every,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObservableFlags {
    pub emit_rho_pq: bool,
    pub emit_rho_nn: bool,
    pub log_base: LogBase,
    pub gauge: Gauge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DumpFormat {
    /// `N <n> <basis-tag>` header, then one `row col real imag` line per entry.
    #[default]
    Text,
}

impl DumpFormat {
    pub fn as_str(self) -> &'static str {
        "text"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSettings {
    pub dir: PathBuf,
    pub dump_format: DumpFormat,
}

/// A fully validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub lattice: LatticeSpec,
    pub dissipation: DissipationSpec,
    pub solver: SolverSettings,
    pub observables: ObservableFlags,
    pub output: OutputSettings,
    /// Seeds randomized cross-checks only; the model itself is deterministic.
    pub seed: u64,
}

impl RunConfig {
    /// Defaults for everything except the lattice size.
    pub fn with_size(n: usize) -> Self {
        Self {
            lattice: LatticeSpec::periodic(n),
            dissipation: DissipationSpec::default(),
            solver: SolverSettings::default(),
            observables: ObservableFlags {
                emit_rho_pq: false,
                emit_rho_nn: false,
                log_base: LogBase::E,
                gauge: Gauge::Momentum,
            },
            output: OutputSettings { dir: PathBuf::from("out"), dump_format: DumpFormat::Text },
            seed: 0,
        }
    }

    /// Every constraint violation, in document order.
    pub fn violations(&self) -> Vec<String> {
        let mut out = self.lattice.violations();
        out.extend(self.dissipation.violations());
        out.extend(self.solver.evolution_config().violations());
        if let InitialChoice::Site(i) = self.solver.initial_state {
            if i >= self.lattice.n {
                out.push(format!(
                    "solver.initial_state site {i} is outside 0..{}",
                    self.lattice.n
                ));
            }
        }
        if self.observables.gauge == Gauge::Momentum && self.lattice.boundary != Boundary::Periodic
        {
            out.push("observables.gauge = \"momentum\" requires lattice.boundary = \"periodic\"".into());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(HarnessError::Config(v.join("\n  ")))
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(&RawConfig::from(self)).map_err(|e| HarnessError::Config(e.to_string()))
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
    raw.resolve()
}

pub fn load_config(path: &std::path::Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_config(&text).map_err(|e| match e {
        HarnessError::Config(msg) => HarnessError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

// Serde mirror of the document. Enumerations stay strings here so that a bad
// value is reported together with every other violation.

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawConfig {
    seed: u64,
    lattice: RawLattice,
    dissipation: RawDissipation,
    solver: RawSolver,
    observables: RawObservables,
    output: RawOutput,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawLattice {
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    t: f64,
    boundary: String,
}

impl Default for RawLattice {
    fn default() -> Self {
        Self { n: None, t: 1.0, boundary: "periodic".into() }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawDissipation {
    gamma: f64,
    alpha0: f64,
    alpha1: f64,
    beta: f64,
    nu: f64,
    boundary: String,
    index_origin: u32,
}

impl Default for RawDissipation {
    fn default() -> Self {
        let d = DissipationSpec::default();
        Self {
            gamma: d.gamma,
            alpha0: d.alpha0,
            alpha1: d.alpha1,
            beta: inverse_golden_ratio(),
            nu: d.nu,
            boundary: d.boundary.as_str().into(),
            index_origin: d.index_origin,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawSolver {
    method: String,
    initial_state: String,
    rtol: f64,
    atol: f64,
    residual_tol: f64,
    max_time: f64,
    resymmetrize_every: usize,
}

impl Default for RawSolver {
    fn default() -> Self {
        let s = SolverSettings::default();
        Self {
            method: s.method.as_str().into(),
            initial_state: s.initial_state.render(),
            rtol: s.rtol,
            atol: s.atol,
            residual_tol: s.residual_tol,
            max_time: s.max_time,
            resymmetrize_every: s.resymmetrize_every,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawObservables {
    emit_rho_pq: bool,
    emit_rho_nn: bool,
    log_base: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    gauge: Option<String>,
}

impl Default for RawObservables {
    fn default() -> Self {
        Self { emit_rho_pq: false, emit_rho_nn: false, log_base: "e".into(), gauge: None }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawOutput {
    dir: PathBuf,
    dump_format: String,
}

impl Default for RawOutput {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), dump_format: "text".into() }
    }
}

fn parse_field<T: std::str::FromStr>(
    value: &str,
    field: &str,
    fallback: T,
    errors: &mut Vec<String>,
) -> T
where
    T::Err: std::fmt::Display,
{
    match value.parse() {
        Ok(v) => v,
        Err(e) => {
            errors.push(format!("{field}: {e}"));
            fallback
        }
    }
}

impl RawConfig {
    fn resolve(self) -> Result<RunConfig> {
        let mut errors = Vec::new();
        let n = self.lattice.n.unwrap_or_else(|| {
            errors.push("lattice.n is required".into());
            2
        });
        let lattice_boundary =
            parse_field(&self.lattice.boundary, "lattice.boundary", Boundary::Periodic, &mut errors);
        let dissipation_boundary = parse_field(
            &self.dissipation.boundary,
            "dissipation.boundary",
            Boundary::Open,
            &mut errors,
        );
        let method = parse_field(&self.solver.method, "solver.method", Method::Nullspace, &mut errors);
        let initial_state = InitialChoice::parse(&self.solver.initial_state).unwrap_or_else(|| {
            errors.push(format!(
                "solver.initial_state: expected \"maximally_mixed\" or \"site:<index>\" (got {:?})",
                self.solver.initial_state
            ));
            InitialChoice::MaximallyMixed
        });
        let log_base =
            parse_field(&self.observables.log_base, "observables.log_base", LogBase::E, &mut errors);
        let gauge = match &self.observables.gauge {
            Some(g) => parse_field(g, "observables.gauge", Gauge::Momentum, &mut errors),
            None if lattice_boundary == Boundary::Periodic => Gauge::Momentum,
            None => Gauge::RealSymmetric,
        };
        if self.output.dump_format != "text" {
            errors.push(format!(
                "output.dump_format: expected \"text\" (got {:?})",
                self.output.dump_format
            ));
        }

        let cfg = RunConfig {
            lattice: LatticeSpec { n, t: self.lattice.t, boundary: lattice_boundary },
            dissipation: DissipationSpec {
                gamma: self.dissipation.gamma,
                alpha0: self.dissipation.alpha0,
                alpha1: self.dissipation.alpha1,
                beta: self.dissipation.beta,
                nu: self.dissipation.nu,
                boundary: dissipation_boundary,
                index_origin: self.dissipation.index_origin,
            },
            solver: SolverSettings {
                method,
                initial_state,
                rtol: self.solver.rtol,
                atol: self.solver.atol,
                residual_tol: self.solver.residual_tol,
                max_time: self.solver.max_time,
                resymmetrize_every: self.solver.resymmetrize_every,
            },
            observables: ObservableFlags {
                emit_rho_pq: self.observables.emit_rho_pq,
                emit_rho_nn: self.observables.emit_rho_nn,
                log_base,
                gauge,
            },
            output: OutputSettings { dir: self.output.dir, dump_format: DumpFormat::Text },
            seed: self.seed,
        };
        if self.lattice.n.is_some() {
            errors.extend(cfg.violations());
        }
        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(HarnessError::Config(format!("invalid configuration:\n  {}", errors.join("\n  "))))
        }
    }
}

impl From<&RunConfig> for RawConfig {
    fn from(c: &RunConfig) -> Self {
        Self {
            seed: c.seed,
            lattice: RawLattice {
                n: Some(c.lattice.n),
                t: c.lattice.t,
                boundary: c.lattice.boundary.as_str().into(),
            },
            dissipation: RawDissipation {
                gamma: c.dissipation.gamma,
                alpha0: c.dissipation.alpha0,
                alpha1: c.dissipation.alpha1,
                beta: c.dissipation.beta,
                nu: c.dissipation.nu,
                boundary: c.dissipation.boundary.as_str().into(),
                index_origin: c.dissipation.index_origin,
            },
            solver: RawSolver {
                method: c.solver.method.as_str().into(),
                initial_state: c.solver.initial_state.render(),
                rtol: c.solver.rtol,
                atol: c.solver.atol,
                residual_tol: c.solver.residual_tol,
                max_time: c.solver.max_time,
                resymmetrize_every: c.solver.resymmetrize_every,
            },
            observables: RawObservables {
                emit_rho_pq: c.observables.emit_rho_pq,
                emit_rho_nn: c.observables.emit_rho_nn,
                log_base: c.observables.log_base.as_str().into(),
                gauge: Some(c.observables.gauge.as_str().into()),
            },
            output: RawOutput {
                dir: c.output.dir.clone(),
                dump_format: c.output.dump_format.as_str().into(),
            },
        }
    }
}
