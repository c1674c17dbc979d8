//! Lattice Hamiltonian, dissipation phase profile and jump operators.
//!
//! Sites are stored 0-based (`0..N`). Bond `b` couples sites `b` and `b + 1`;
//! under a periodic dissipation boundary the last bond couples `N - 1` and `0`.
//!
//! Each channel is the rank-1 single-particle operator `M_b = u_b v_b†` with
//!
//! ```text
//! u_b = e_b + e^{iα_b} e_{b+1}      v_b = e_b − e^{iα_b} e_{b+1}
//! ```
//!
//! so `M_b` annihilates the local combination `e_b + e^{iα_b} e_{b+1}`, and the
//! phase follows `α_n = α0 + α1 cos(2π β n^ν)` evaluated at the bond label
//! `n = b + index_origin`.

use std::f64::consts::PI;

use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::C64;

/// Boundary condition for hopping or for the dissipation channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    Open,
}

impl Boundary {
    pub fn as_str(self) -> &'static str {
        match self {
            Boundary::Periodic => "periodic",
            Boundary::Open => "open",
        }
    }
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(Boundary::Periodic),
            "open" => Ok(Boundary::Open),
            other => Err(Error::InvalidParameter(format!(
                "unknown boundary {other:?} (expected \"periodic\" or \"open\")"
            ))),
        }
    }
}

/// `(√5 − 1) / 2` at full double precision.
pub fn inverse_golden_ratio() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// Number of dissipation channels on `n` sites.
pub fn channel_count(n: usize, boundary: Boundary) -> usize {
    match boundary {
        Boundary::Periodic => n,
        Boundary::Open => n.saturating_sub(1),
    }
}

/// Hopping lattice parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    pub n: usize,
    pub t: f64,
    pub boundary: Boundary,
}

impl LatticeSpec {
    pub fn new(n: usize, t: f64, boundary: Boundary) -> Result<Self> {
        let spec = Self { n, t, boundary };
        spec.validate()?;
        Ok(spec)
    }

    pub fn periodic(n: usize) -> Self {
        Self { n, t: 1.0, boundary: Boundary::Periodic }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.n < 2 {
            out.push(format!("lattice.n must be >= 2 (got {})", self.n));
        }
        if !self.t.is_finite() {
            out.push(format!("lattice.t must be finite (got {})", self.t));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        join_violations(self.violations())
    }
}

/// Parameters of the phase-modulated dissipation channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipationSpec {
    pub gamma: f64,
    pub alpha0: f64,
    pub alpha1: f64,
    pub beta: f64,
    pub nu: f64,
    pub boundary: Boundary,
    /// Label of the first bond in the phase formula (`n = b + index_origin`).
    pub index_origin: u32,
}

impl Default for DissipationSpec {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            alpha0: 0.0,
            alpha1: 0.0,
            beta: inverse_golden_ratio(),
            nu: 0.1,
            boundary: Boundary::Open,
            index_origin: 0,
        }
    }
}

impl DissipationSpec {
    /// Uniform phase `alpha0` on every channel.
    pub fn uniform(alpha0: f64, boundary: Boundary) -> Self {
        Self { alpha0, alpha1: 0.0, boundary, ..Self::default() }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, v) in [
            ("gamma", self.gamma),
            ("alpha0", self.alpha0),
            ("alpha1", self.alpha1),
            ("beta", self.beta),
            ("nu", self.nu),
        ] {
            if !v.is_finite() {
                out.push(format!("dissipation.{name} must be finite (got {v})"));
            }
        }
        if self.gamma < 0.0 {
            out.push(format!("dissipation.gamma must be >= 0 (got {})", self.gamma));
        }
        if self.nu < 0.0 {
            out.push(format!("dissipation.nu must be >= 0 (got {})", self.nu));
        }
        if self.index_origin > 1 {
            out.push(format!(
                "dissipation.index_origin must be 0 or 1 (got {})",
                self.index_origin
            ));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        join_violations(self.violations())
    }

    /// Phase on the bond labelled `label` (already offset by `index_origin`).
    pub fn phase_at(&self, label: f64) -> f64 {
        self.alpha0 + self.alpha1 * (2.0 * PI * self.beta * label.powf(self.nu)).cos()
    }
}

fn join_violations(v: Vec<String>) -> Result<()> {
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(v.join("; ")))
    }
}

/// Phases `α_b`, one per dissipation channel.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile {
    pub values: Vec<f64>,
}

impl PhaseProfile {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn build_phase_profile(dspec: &DissipationSpec, n: usize) -> Result<PhaseProfile> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be >= 2 (got {n})")));
    }
    dspec.validate()?;
    let origin = dspec.index_origin as usize;
    let values = (0..channel_count(n, dspec.boundary))
        .map(|b| dspec.phase_at((b + origin) as f64))
        .collect();
    Ok(PhaseProfile { values })
}

/// One dissipation channel `M = u v†` acting on the sites of a single bond.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpOperator {
    /// 0-based bond index.
    pub bond: usize,
    /// The two coupled sites `(b, b + 1 mod N)`.
    pub sites: (usize, usize),
    pub alpha: f64,
}

impl JumpOperator {
    #[inline]
    pub fn phase(&self) -> C64 {
        C64::new(self.alpha.cos(), self.alpha.sin())
    }

    /// Nonzero entries of the creation factor `u`.
    #[inline]
    pub fn u_entries(&self) -> [(usize, C64); 2] {
        [(self.sites.0, C64::new(1.0, 0.0)), (self.sites.1, self.phase())]
    }

    /// Nonzero entries of the annihilation factor `v` (the operator is `u v†`).
    #[inline]
    pub fn v_entries(&self) -> [(usize, C64); 2] {
        [(self.sites.0, C64::new(1.0, 0.0)), (self.sites.1, -self.phase())]
    }

    pub fn u_dense(&self, n: usize) -> Vec<C64> {
        scatter(&self.u_entries(), n)
    }

    pub fn v_dense(&self, n: usize) -> Vec<C64> {
        scatter(&self.v_entries(), n)
    }

    /// The local combination `e_b + e^{iα} e_{b+1}` annihilated by this channel.
    pub fn dark_vector(&self, n: usize) -> Vec<C64> {
        self.u_dense(n)
    }
}

fn scatter(entries: &[(usize, C64)], n: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); n];
    for &(i, z) in entries {
        out[i] += z;
    }
    out
}

pub fn build_jump_operators(
    profile: &PhaseProfile,
    n: usize,
    boundary: Boundary,
) -> Result<Vec<JumpOperator>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be >= 2 (got {n})")));
    }
    let expected = channel_count(n, boundary);
    if profile.len() != expected {
        return Err(Error::Structural(format!(
            "phase profile has {} entries but a {boundary} lattice of {n} sites has {expected} channels",
            profile.len()
        )));
    }
    Ok(profile
        .values
        .iter()
        .enumerate()
        .map(|(b, &alpha)| JumpOperator { bond: b, sites: (b, (b + 1) % n), alpha })
        .collect())
}

/// Dense `u v†`; meant for oracles and small systems.
pub fn jump_matrix(op: &JumpOperator, n: usize) -> Mat<C64> {
    let mut m = Mat::<C64>::zeros(n, n);
    for (a, ua) in op.u_entries() {
        for (b, vb) in op.v_entries() {
            m[(a, b)] += ua * vb.conj();
        }
    }
    m
}

/// Nearest-neighbour hopping matrix stored as its nonzero entries.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    pub spec: LatticeSpec,
    /// Off-diagonal nonzeros `(row, col, value)`, both triangles, duplicates merged.
    entries: Vec<(usize, usize, f64)>,
}

impl HamiltonianMatrix {
    pub fn dim(&self) -> usize {
        self.spec.n
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let n = self.dim();
        let mut m = Mat::<f64>::zeros(n, n);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    /// Eigenvalues from a dense symmetric eigensolve, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.to_dense()
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::EigenSolver(format!("{e:?}")))
    }
}

pub fn build_hamiltonian(spec: &LatticeSpec) -> Result<HamiltonianMatrix> {
    spec.validate()?;
    let n = spec.n;
    let bonds = channel_count(n, spec.boundary);
    let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * bonds);
    for b in 0..bonds {
        let (i, j) = (b, (b + 1) % n);
        for (r, c) in [(i, j), (j, i)] {
            // N = 2 with periodic hopping visits the same pair twice.
            match entries.iter_mut().find(|e| e.0 == r && e.1 == c) {
                Some(e) if n == 2 => e.2 += spec.t,
                _ => entries.push((r, c, spec.t)),
            }
        }
    }
    entries.sort_by_key(|&(r, c, _)| (r, c));
    Ok(HamiltonianMatrix { spec: *spec, entries })
}

/// Plane-wave band `2t cos(2πm/N)` over the N distinct momenta, ascending.
pub fn analytic_spectrum(spec: &LatticeSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    if spec.boundary != Boundary::Periodic {
        return Err(Error::InvalidParameter(
            "the plane-wave spectrum only applies to a periodic lattice".into(),
        ));
    }
    let mut e: Vec<f64> = momenta(spec.n).map(|k| 2.0 * spec.t * k.cos()).collect();
    e.sort_by(f64::total_cmp);
    Ok(e)
}

/// The N allowed momenta `2πm/N`, `m = −⌊(N−1)/2⌋ … ⌊N/2⌋`, ascending.
pub fn momenta(n: usize) -> impl Iterator<Item = f64> {
    let lo = -(((n - 1) / 2) as i64);
    let hi = (n / 2) as i64;
    (lo..=hi).map(move |m| 2.0 * PI * m as f64 / n as f64)
}
