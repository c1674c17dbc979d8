//! Steady states `L[ρ_ss] = 0`.
//!
//! Two independent routes:
//!
//! - [`steady_state_by_nullspace`]: one trace-constrained sparse LU solve of
//!   the assembled superoperator.
//! - [`steady_state_by_evolution`]: integrate `dρ/dt = L[ρ]` with an adaptive
//!   Dormand–Prince 5(4) pair until `‖L[ρ]‖_F` drops below a tolerance.
//!
//! [`check_uniqueness`] reports the eigenvalues of `L` closest to zero.

use std::time::Instant;

use faer::linalg::solvers::Solve;
use faer::sparse::SparseColMat;
use faer::{Mat, MatRef};

use crate::error::{Error, Result};
use crate::lindblad::{LindbladGenerator, SuperoperatorMatrix};
use crate::state::{devectorize, frobenius, trace, DensityMatrix};
use crate::C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Evolution,
    Nullspace,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Evolution => "evolution",
            Method::Nullspace => "nullspace",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "evolution" => Ok(Method::Evolution),
            "nullspace" => Ok(Method::Nullspace),
            other => Err(Error::InvalidParameter(format!(
                "unknown method {other:?} (expected \"nullspace\" or \"evolution\")"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum InitialState {
    MaximallyMixed,
    /// 0-based site index.
    SiteLocalized(usize),
    Custom(DensityMatrix),
}

impl InitialState {
    pub fn build(&self, n: usize) -> Result<DensityMatrix> {
        match self {
            InitialState::MaximallyMixed => Ok(DensityMatrix::maximally_mixed(n)),
            InitialState::SiteLocalized(site) => DensityMatrix::site_localized(n, *site),
            InitialState::Custom(rho) if rho.dim() == n => Ok(rho.clone()),
            InitialState::Custom(rho) => {
                Err(Error::DimensionMismatch { expected: n, found: rho.dim() })
            }
        }
    }
}

/// Time-integration settings.
#[derive(Debug, Clone)]
pub struct EvolutionConfig {
    pub initial_state: InitialState,
    pub rtol: f64,
    pub atol: f64,
    /// Stop once `‖L[ρ]‖_F` is at or below this value.
    pub residual_tol: f64,
    /// In units of `1/γ`.
    pub max_time: f64,
    /// Accepted steps between `ρ ← (ρ + ρ†)/2` projections.
    pub resymmetrize_every: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            initial_state: InitialState::MaximallyMixed,
            rtol: 1e-8,
            atol: 1e-10,
            residual_tol: 1e-9,
            max_time: 1e6,
            resymmetrize_every: 100,
        }
    }
}

impl EvolutionConfig {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, v) in [
            ("rtol", self.rtol),
            ("atol", self.atol),
            ("residual_tol", self.residual_tol),
            ("max_time", self.max_time),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                out.push(format!("solver.{name} must be finite and > 0 (got {v})"));
            }
        }
        if self.resymmetrize_every == 0 {
            out.push("solver.resymmetrize_every must be >= 1".into());
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SteadyStateResult {
    pub rho_ss: DensityMatrix,
    /// `‖L[ρ_ss]‖_F` against the unmodified generator.
    pub residual: f64,
    pub method: Method,
    /// Accepted integration steps, or 1 for a direct solve.
    pub steps: usize,
    pub min_eigenvalue: f64,
    pub wall_time: f64,
    /// Largest `|Tr ρ(t) − 1|` seen at an accepted step (0 for a direct solve).
    pub max_trace_drift: f64,
    /// Residuals at the last accepted steps, oldest first.
    pub residual_tail: Vec<f64>,
}

/// Solves `L x = 0` with one population row replaced by the trace condition.
pub fn steady_state_by_nullspace(superop: &SuperoperatorMatrix) -> Result<SteadyStateResult> {
    let start = Instant::now();
    let n = superop.n();
    let dim = superop.dim();

    // vec(I)† is the left null vector, so only a population row i(N+1) can be
    // traded for the trace condition without leaving the system singular.
    let diag = superop.diagonal();
    let replaced = (0..n)
        .map(|i| i * (n + 1))
        .min_by(|&a, &b| diag[a].norm().total_cmp(&diag[b].norm()))
        .expect("n >= 1");

    let mut trip = Vec::with_capacity(superop.nnz() + n);
    superop.for_each(|r, c, v| {
        if r != replaced {
            trip.push(faer::sparse::Triplet::new(r, c, v));
        }
    });
    for i in 0..n {
        trip.push(faer::sparse::Triplet::new(replaced, i * (n + 1), C64::new(1.0, 0.0)));
    }
    let constrained = SparseColMat::<usize, C64>::try_new_from_triplets(dim, dim, &trip)
        .map_err(|e| Error::Structural(format!("constrained system: {e:?}")))?;
    let lu = constrained
        .sp_lu()
        .map_err(|e| Error::DegenerateSteadyState(format!("sparse LU failed: {e:?}")))?;

    let mut rhs = Mat::<C64>::zeros(dim, 1);
    rhs[(replaced, 0)] = C64::new(1.0, 0.0);
    lu.solve_in_place(rhs.as_mut());

    let x: Vec<C64> = (0..dim).map(|i| rhs[(i, 0)]).collect();
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::DegenerateSteadyState("constrained system is singular".into()));
    }
    let raw = devectorize(&x)?;
    let rho = DensityMatrix::normalized(raw.as_ref())?;
    let lx = superop.apply(&rho.vectorize())?;
    let residual = lx.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    // A singular pivot that slipped through shows up as a solution that is
    // not stationary.
    if residual.is_nan() || residual > 1e-6 {
        return Err(Error::DegenerateSteadyState(format!(
            "solution residual {residual:.3e} after trace-constrained solve"
        )));
    }
    let min_eigenvalue = rho.min_eigenvalue()?;
    Ok(SteadyStateResult {
        rho_ss: rho,
        residual,
        method: Method::Nullspace,
        steps: 1,
        min_eigenvalue,
        wall_time: start.elapsed().as_secs_f64(),
        max_trace_drift: 0.0,
        residual_tail: vec![residual],
    })
}

// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b − b̂ (fifth minus fourth order weights).
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const TAIL_LEN: usize = 10;

/// `out = y + h Σ w_i k_i`.
fn combine(out: &mut Mat<C64>, y: &Mat<C64>, h: f64, terms: &[(f64, &Mat<C64>)]) {
    let n = y.nrows();
    for j in 0..n {
        for i in 0..n {
            let mut acc = ZERO;
            for &(w, k) in terms {
                acc += k[(i, j)] * w;
            }
            out[(i, j)] = y[(i, j)] + acc * h;
        }
    }
}

fn max_abs(m: MatRef<'_, C64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            best = best.max(m[(i, j)].norm());
        }
    }
    best
}

pub fn steady_state_by_evolution(
    gen: &LindbladGenerator,
    cfg: &EvolutionConfig,
) -> Result<SteadyStateResult> {
    let violations = cfg.violations();
    if !violations.is_empty() {
        return Err(Error::InvalidParameter(violations.join("; ")));
    }
    let start = Instant::now();
    let n = gen.dim();
    let rho0 = cfg.initial_state.build(n)?;

    let mut y = rho0.into_mat();
    let mut k1 = Mat::<C64>::zeros(n, n);
    gen.apply_into(y.as_ref(), k1.as_mut());
    let mut residual = frobenius(k1.as_ref());
    let mut tail = vec![residual];

    let mut k2 = Mat::<C64>::zeros(n, n);
    let mut k3 = Mat::<C64>::zeros(n, n);
    let mut k4 = Mat::<C64>::zeros(n, n);
    let mut k5 = Mat::<C64>::zeros(n, n);
    let mut k6 = Mat::<C64>::zeros(n, n);
    let mut k7 = Mat::<C64>::zeros(n, n);
    let mut tmp = Mat::<C64>::zeros(n, n);
    let mut y_new = Mat::<C64>::zeros(n, n);

    // At the stability limit the controller lets fast modes grow up to the
    // per-entry tolerance, which floors ‖L[ρ]‖_F near N·‖L‖·tol. Cap the
    // tolerance so that floor sits below the requested residual.
    let tol_cap = cfg.residual_tol / (8.0 * n as f64 * gen.norm_bound());

    let mut t = 0.0;
    let mut accepted = 0usize;
    let mut max_drift = 0.0f64;
    let mut h = {
        let scale = max_abs(k1.as_ref()).max(1e-12);
        (0.01 * max_abs(y.as_ref()) / scale).clamp(1e-6, 1.0)
    };

    while residual > cfg.residual_tol {
        if t >= cfg.max_time {
            return Err(Error::SlowGap { residual, time: t });
        }
        h = h.min(cfg.max_time - t).max(1e-14);

        combine(&mut tmp, &y, h, &[(A21, &k1)]);
        gen.apply_into(tmp.as_ref(), k2.as_mut());
        combine(&mut tmp, &y, h, &[(A31, &k1), (A32, &k2)]);
        gen.apply_into(tmp.as_ref(), k3.as_mut());
        combine(&mut tmp, &y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        gen.apply_into(tmp.as_ref(), k4.as_mut());
        combine(&mut tmp, &y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        gen.apply_into(tmp.as_ref(), k5.as_mut());
        combine(&mut tmp, &y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        gen.apply_into(tmp.as_ref(), k6.as_mut());
        combine(&mut y_new, &y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        gen.apply_into(y_new.as_ref(), k7.as_mut());

        // Scaled RMS of the embedded error estimate.
        let mut err2 = 0.0;
        for j in 0..n {
            for i in 0..n {
                let e = (k1[(i, j)] * E1
                    + k3[(i, j)] * E3
                    + k4[(i, j)] * E4
                    + k5[(i, j)] * E5
                    + k6[(i, j)] * E6
                    + k7[(i, j)] * E7)
                    * h;
                let sc = (cfg.atol + cfg.rtol * y[(i, j)].norm().max(y_new[(i, j)].norm()))
                    .min(tol_cap);
                err2 += (e / sc).norm_sqr();
            }
        }
        let err = (err2 / (n * n) as f64).sqrt();
        if !err.is_finite() {
            h *= 0.1;
            continue;
        }

        if err <= 1.0 {
            t += h;
            accepted += 1;
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);

            if accepted.is_multiple_of(cfg.resymmetrize_every) {
                y = DensityMatrix::normalized(y.as_ref())?.into_mat();
                gen.apply_into(y.as_ref(), k1.as_mut());
            }
            max_drift = max_drift.max((trace(y.as_ref()) - C64::new(1.0, 0.0)).norm());
            residual = frobenius(k1.as_ref());
            tail.push(residual);
            if tail.len() > TAIL_LEN {
                tail.remove(0);
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= if err <= 1.0 { factor } else { factor.min(1.0) };
    }

    let rho = DensityMatrix::normalized(y.as_ref())?;
    let residual = frobenius(gen.apply(rho.as_mat())?.as_ref());
    let min_eigenvalue = rho.min_eigenvalue()?;
    Ok(SteadyStateResult {
        rho_ss: rho,
        residual,
        method: Method::Evolution,
        steps: accepted,
        min_eigenvalue,
        wall_time: start.elapsed().as_secs_f64(),
        max_trace_drift: max_drift,
        residual_tail: tail,
    })
}

/// Dispatches to the requested solver.
pub fn steady_state(
    gen: &LindbladGenerator,
    method: Method,
    cfg: &EvolutionConfig,
) -> Result<SteadyStateResult> {
    match method {
        Method::Nullspace => steady_state_by_nullspace(&gen.superoperator()?),
        Method::Evolution => steady_state_by_evolution(gen, cfg),
    }
}

/// The `k` Liouvillian eigenvalues of smallest magnitude.
#[derive(Debug, Clone)]
pub struct UniquenessReport {
    /// Sorted by magnitude, ascending.
    pub eigenvalues: Vec<C64>,
    /// `|λ₁| − |λ₀|`.
    pub gap: f64,
    pub unique: bool,
}

impl UniquenessReport {
    fn from_eigenvalues(mut eigenvalues: Vec<C64>, k: usize) -> Self {
        eigenvalues.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        eigenvalues.truncate(k);
        let l0 = eigenvalues.first().map_or(f64::INFINITY, |z| z.norm());
        let l1 = eigenvalues.get(1).map_or(f64::INFINITY, |z| z.norm());
        Self {
            gap: l1 - l0,
            unique: l0 <= 1e-9 && l1 >= 10.0 * l0 + 1e-9,
            eigenvalues,
        }
    }
}

/// Largest lattice size diagonalised densely.
pub const DENSE_UNIQUENESS_MAX_N: usize = 30;

pub fn check_uniqueness(superop: &SuperoperatorMatrix, k: usize) -> Result<UniquenessReport> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    let k = k.min(superop.dim());
    if superop.n() <= DENSE_UNIQUENESS_MAX_N {
        let ev = superop
            .to_dense()
            .eigenvalues()
            .map_err(|e| Error::EigenSolver(format!("{e:?}")))?;
        Ok(UniquenessReport::from_eigenvalues(ev, k))
    } else {
        let ev = shift_invert_arnoldi(superop, k)?;
        Ok(UniquenessReport::from_eigenvalues(ev, k))
    }
}

/// Eigenvalues of `L` nearest a small positive shift σ via Arnoldi on
/// `(L − σI)⁻¹`. The whole Lindblad spectrum lies in Re λ ≤ 0, so the
/// eigenvalues nearest σ are the ones of smallest magnitude.
fn shift_invert_arnoldi(superop: &SuperoperatorMatrix, k: usize) -> Result<Vec<C64>> {
    let dim = superop.dim();
    let sigma = 1e-4;

    let mut trip = Vec::with_capacity(superop.nnz() + dim);
    superop.for_each(|r, c, v| trip.push(faer::sparse::Triplet::new(r, c, v)));
    for i in 0..dim {
        trip.push(faer::sparse::Triplet::new(i, i, C64::new(-sigma, 0.0)));
    }
    let shifted = SparseColMat::<usize, C64>::try_new_from_triplets(dim, dim, &trip)
        .map_err(|e| Error::Structural(format!("shifted operator: {e:?}")))?;
    let lu = shifted
        .sp_lu()
        .map_err(|e| Error::EigenSolver(format!("shifted LU failed: {e:?}")))?;

    let mut m = (4 * k).max(40).min(dim);
    loop {
        match arnoldi_ritz(&lu, dim, m, k)? {
            Some(thetas) => {
                return Ok(thetas.into_iter().map(|th| C64::new(sigma, 0.0) + th.inv()).collect());
            }
            None if m < dim && m < 400 => m = (2 * m).min(dim).min(400),
            None => {
                return Err(Error::EigenSolver(format!(
                    "shift-invert Arnoldi did not converge {k} Ritz values with {m} vectors"
                )))
            }
        }
    }
}

/// Returns the `k` dominant converged Ritz values, or `None` if any has a
/// residual estimate above tolerance.
fn arnoldi_ritz(
    lu: &faer::sparse::linalg::solvers::Lu<usize, C64>,
    dim: usize,
    m: usize,
    k: usize,
) -> Result<Option<Vec<C64>>> {
    let dot = |a: &[C64], b: &[C64]| -> C64 { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
    let norm = |a: &[C64]| -> f64 { a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt() };

    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m + 1);
    let v0: Vec<C64> = (0..dim).map(|i| C64::new(1.0 + 0.1 * ((i * 7919) % 17) as f64, 0.0)).collect();
    let s = norm(&v0);
    basis.push(v0.into_iter().map(|x| x / s).collect());
    let mut hess = Mat::<C64>::zeros(m + 1, m);
    let mut steps = m;

    for j in 0..m {
        let mut w = Mat::<C64>::from_fn(dim, 1, |i, _| basis[j][i]);
        lu.solve_in_place(w.as_mut());
        let mut w: Vec<C64> = (0..dim).map(|i| w[(i, 0)]).collect();
        // Classical Gram–Schmidt, applied twice.
        for _ in 0..2 {
            for (i, q) in basis.iter().enumerate() {
                let c = dot(q, &w);
                hess[(i, j)] += c;
                for (wx, qx) in w.iter_mut().zip(q) {
                    *wx -= c * qx;
                }
            }
        }
        let beta = norm(&w);
        hess[(j + 1, j)] = C64::new(beta, 0.0);
        if beta < 1e-12 {
            steps = j + 1;
            break;
        }
        basis.push(w.into_iter().map(|x| x / beta).collect());
    }

    let h = hess.as_ref().submatrix(0, 0, steps, steps).to_owned();
    let eig = h.eigen().map_err(|e| Error::EigenSolver(format!("Hessenberg eigen: {e:?}")))?;
    let s = eig.S().column_vector();
    let u = eig.U();
    let beta_last = if steps < m { 0.0 } else { hess[(steps, steps - 1)].norm() };

    let mut ritz: Vec<(C64, f64)> = (0..steps)
        .map(|i| {
            let y_norm = (0..steps).map(|r| u[(r, i)].norm_sqr()).sum::<f64>().sqrt();
            (s[i], beta_last * u[(steps - 1, i)].norm() / y_norm)
        })
        .collect();
    ritz.sort_by(|a, b| b.0.norm().total_cmp(&a.0.norm()));
    ritz.truncate(k);
    if ritz.iter().all(|(theta, res)| *res <= 1e-8 * theta.norm().max(1.0)) {
        Ok(Some(ritz.into_iter().map(|(theta, _)| theta).collect()))
    } else {
        Ok(None)
    }
}
