//! Sweep grids.
//!
//! A grid is a sequence of scans; each scan is the Cartesian product of its
//! axes. A grid file either lists axes at the top level (one scan) or as
//! `[[scan]]` tables:
//!
//! ```toml
//! [[scan]]
//! label = "alpha1"
//! nu = [0.1, 0.6]
//! alpha1 = { start = 0.0, stop = 6.0, count = 61 }
//! ```
//!
//! Within a scan the axis order is fixed (`n`, `beta`, `nu`, `alpha0`,
//! `alpha1`) with the last axis varying fastest.

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    N,
    Beta,
    Nu,
    Alpha0,
    Alpha1,
}

impl Param {
    pub const ALL: [Param; 5] = [Param::N, Param::Beta, Param::Nu, Param::Alpha0, Param::Alpha1];

    pub fn as_str(self) -> &'static str {
        match self {
            Param::N => "n",
            Param::Beta => "beta",
            Param::Nu => "nu",
            Param::Alpha0 => "alpha0",
            Param::Alpha1 => "alpha1",
        }
    }

    fn apply(self, cfg: &mut RunConfig, value: f64) {
        match self {
            Param::N => cfg.lattice.n = value as usize,
            Param::Beta => cfg.dissipation.beta = value,
            Param::Nu => cfg.dissipation.nu = value,
            Param::Alpha0 => cfg.dissipation.alpha0 = value,
            Param::Alpha1 => cfg.dissipation.alpha1 = value,
        }
    }
}

/// Either explicit values or an inclusive linear range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisSpec {
    List(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl AxisSpec {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            AxisSpec::List(ref v) => v.clone(),
            AxisSpec::Range { start, stop, count } => linspace(start, stop, count),
        }
    }
}

/// `count` points from `start` to `stop` inclusive; both ends are exact.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let last = (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { stop } else { start + (stop - start) * (i as f64 / last) })
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scan {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<AxisSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<AxisSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<AxisSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha0: Option<AxisSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<AxisSpec>,
}

impl Scan {
    pub fn labelled(label: &str) -> Self {
        Self { label: label.into(), ..Self::default() }
    }

    pub fn with(mut self, param: Param, axis: AxisSpec) -> Self {
        *self.slot(param) = Some(axis);
        self
    }

    fn slot(&mut self, param: Param) -> &mut Option<AxisSpec> {
        match param {
            Param::N => &mut self.n,
            Param::Beta => &mut self.beta,
            Param::Nu => &mut self.nu,
            Param::Alpha0 => &mut self.alpha0,
            Param::Alpha1 => &mut self.alpha1,
        }
    }

    pub fn axes(&self) -> Vec<(Param, Vec<f64>)> {
        let slots = [&self.n, &self.beta, &self.nu, &self.alpha0, &self.alpha1];
        Param::ALL
            .iter()
            .zip(slots)
            .filter_map(|(&p, s)| s.as_ref().map(|a| (p, a.values())))
            .collect()
    }

    pub fn point_count(&self) -> usize {
        self.axes().iter().map(|(_, v)| v.len()).product()
    }

    fn violations(&self, index: usize) -> Vec<String> {
        let mut out = Vec::new();
        let name = if self.label.is_empty() { format!("scan {index}") } else { format!("scan {:?}", self.label) };
        for (param, values) in self.axes() {
            if values.is_empty() {
                out.push(format!("{name}: axis {} is empty", param.as_str()));
            }
            if let Some(v) = values.iter().find(|v| !v.is_finite()) {
                out.push(format!("{name}: axis {} has non-finite value {v}", param.as_str()));
            }
            if param == Param::N {
                if let Some(v) = values.iter().find(|v| v.fract() != 0.0 || **v < 2.0) {
                    out.push(format!("{name}: axis n needs integers >= 2 (got {v})"));
                }
            }
        }
        out
    }
}

/// One concrete point of a sweep.
#[derive(Debug, Clone)]
pub struct GridPoint {
    pub scan: String,
    pub config: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepGrid {
    pub scans: Vec<Scan>,
}

impl SweepGrid {
    pub fn single(scan: Scan) -> Self {
        Self { scans: vec![scan] }
    }

    pub fn point_count(&self) -> usize {
        self.scans.iter().map(Scan::point_count).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let mut v: Vec<String> = self.scans.iter().enumerate().flat_map(|(i, s)| s.violations(i)).collect();
        if self.scans.is_empty() {
            v.push("grid has no scans".into());
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(HarnessError::Config(format!("invalid grid:\n  {}", v.join("\n  "))))
        }
    }

    /// Every point in deterministic order, each validated against `base`.
    pub fn points(&self, base: &RunConfig) -> Result<Vec<GridPoint>> {
        self.validate()?;
        let mut out = Vec::with_capacity(self.point_count());
        for scan in &self.scans {
            let axes = scan.axes();
            for flat in 0..scan.point_count() {
                let mut cfg = base.clone();
                let mut rest = flat;
                for (param, values) in axes.iter().rev() {
                    param.apply(&mut cfg, values[rest % values.len()]);
                    rest /= values.len();
                }
                cfg.validate()?;
                out.push(GridPoint { scan: scan.label.clone(), config: cfg });
            }
        }
        Ok(out)
    }

    pub fn to_toml(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Doc<'a> {
            scan: &'a [Scan],
        }
        toml::to_string(&Doc { scan: &self.scans }).map_err(|e| HarnessError::Config(e.to_string()))
    }
}

// Top-level axes describe an implicit first scan. `flatten` cannot be combined
// with `deny_unknown_fields`, so the scan fields are repeated here.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    #[serde(default)]
    scan: Vec<Scan>,
    #[serde(default)]
    label: String,
    n: Option<AxisSpec>,
    beta: Option<AxisSpec>,
    nu: Option<AxisSpec>,
    alpha0: Option<AxisSpec>,
    alpha1: Option<AxisSpec>,
}

pub fn parse_grid(text: &str) -> Result<SweepGrid> {
    let raw: RawGrid = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
    let top = Scan {
        label: raw.label,
        n: raw.n,
        beta: raw.beta,
        nu: raw.nu,
        alpha0: raw.alpha0,
        alpha1: raw.alpha1,
    };
    let mut scans = Vec::new();
    if top != Scan::default() {
        scans.push(top);
    }
    scans.extend(raw.scan);
    let grid = SweepGrid { scans };
    grid.validate()?;
    Ok(grid)
}

pub fn load_grid(path: &std::path::Path) -> Result<SweepGrid> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_grid(&text).map_err(|e| match e {
        HarnessError::Config(msg) => HarnessError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}
