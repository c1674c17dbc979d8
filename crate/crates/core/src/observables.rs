//! Steady-state observables.
//!
//! Coherence is measured in the Hamiltonian eigenbasis; the participation
//! ratio in the site basis. Entropies are in nats unless [`LogBase::Two`] is
//! requested.

use std::f64::consts::LN_2;

use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};
use crate::model::{momenta, Boundary, HamiltonianMatrix};
use crate::state::{hermitian_eigenvalues, DensityMatrix};
use crate::C64;

/// Eigenvalues below this contribute nothing to an entropy.
pub const ENTROPY_CUTOFF: f64 = 1e-14;
/// Eigenvalues below this make an entropy evaluation fail.
pub const NEGATIVE_EIGENVALUE_LIMIT: f64 = -1e-8;

/// How degenerate eigenspaces of `H` are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gauge {
    /// Plane waves `e^{ik·s}/√N`, `s = 1…N`; periodic lattices only.
    Momentum,
    /// Numerical real eigenvectors with a deterministic order and sign.
    RealSymmetric,
}

impl Gauge {
    pub fn as_str(self) -> &'static str {
        match self {
            Gauge::Momentum => "momentum",
            Gauge::RealSymmetric => "real_symmetric",
        }
    }
}

impl std::fmt::Display for Gauge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Gauge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "momentum" => Ok(Gauge::Momentum),
            "real_symmetric" => Ok(Gauge::RealSymmetric),
            other => Err(Error::InvalidParameter(format!(
                "unknown gauge {other:?} (expected \"momentum\" or \"real_symmetric\")"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LogBase {
    #[default]
    E,
    Two,
}

impl LogBase {
    fn log(self, x: f64) -> f64 {
        match self {
            LogBase::E => x.ln(),
            LogBase::Two => x.ln() / LN_2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LogBase::E => "e",
            LogBase::Two => "2",
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" => Ok(LogBase::E),
            "2" => Ok(LogBase::Two),
            other => Err(Error::InvalidParameter(format!(
                "unknown log base {other:?} (expected \"e\" or \"2\")"
            ))),
        }
    }
}

/// Orthonormal eigenvectors of `H` as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    pub energies: Vec<f64>,
    pub vectors: Mat<C64>,
    pub gauge: Gauge,
}

impl EigenBasis {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Column `p` as a vector.
    pub fn vector(&self, p: usize) -> Vec<C64> {
        (0..self.dim()).map(|i| self.vectors[(i, p)]).collect()
    }
}

pub fn eigenbasis(h: &HamiltonianMatrix, gauge: Gauge) -> Result<EigenBasis> {
    match gauge {
        Gauge::Momentum => momentum_basis(h),
        Gauge::RealSymmetric => real_symmetric_basis(h),
    }
}

fn momentum_basis(h: &HamiltonianMatrix) -> Result<EigenBasis> {
    if h.spec.boundary != Boundary::Periodic {
        return Err(Error::InvalidParameter(
            "momentum gauge requires a periodic lattice".into(),
        ));
    }
    let n = h.dim();
    let t = h.spec.t;
    let mut modes: Vec<(f64, f64)> = momenta(n).map(|k| (2.0 * t * k.cos(), k)).collect();
    modes.sort_by(|a, b| {
        if (a.0 - b.0).abs() <= 1e-12 * t.abs().max(1.0) {
            a.1.total_cmp(&b.1)
        } else {
            a.0.total_cmp(&b.0)
        }
    });
    let norm = 1.0 / (n as f64).sqrt();
    let vectors = Mat::from_fn(n, n, |i, p| C64::from_polar(norm, modes[p].1 * (i + 1) as f64));
    Ok(EigenBasis { energies: modes.iter().map(|m| m.0).collect(), vectors, gauge: Gauge::Momentum })
}

fn real_symmetric_basis(h: &HamiltonianMatrix) -> Result<EigenBasis> {
    let n = h.dim();
    let eig = h
        .to_dense()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::EigenSolver(format!("{e:?}")))?;
    let energies: Vec<f64> = eig.S().column_vector().iter().copied().collect();
    let u = eig.U();

    let argmax = |p: usize| -> usize {
        let mut best = 0;
        for i in 1..n {
            if u[(i, p)].abs() > u[(best, p)].abs() + 1e-12 {
                best = i;
            }
        }
        best
    };

    let tol = 1e-9 * h.spec.t.abs().max(1.0);
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && energies[end] - energies[start] <= tol {
            end += 1;
        }
        let mut group: Vec<usize> = (start..end).collect();
        group.sort_by_key(|&p| (argmax(p), p));
        order.extend(group);
        start = end;
    }

    let mut vectors = Mat::<C64>::zeros(n, n);
    for (col, &p) in order.iter().enumerate() {
        let sign = if u[(argmax(p), p)] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            vectors[(i, col)] = C64::new(sign * u[(i, p)], 0.0);
        }
    }
    Ok(EigenBasis {
        energies: order.iter().map(|&p| energies[p]).collect(),
        vectors,
        gauge: Gauge::RealSymmetric,
    })
}

fn check_dims(rho: MatRef<'_, C64>, basis: &EigenBasis) -> Result<()> {
    if rho.nrows() != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), found: rho.nrows() });
    }
    Ok(())
}

/// `ρ_pq = ⟨p|ρ|q⟩`.
pub fn to_eigenbasis(rho: &DensityMatrix, basis: &EigenBasis) -> Result<Mat<C64>> {
    check_dims(rho.as_mat(), basis)?;
    Ok(basis.vectors.adjoint() * rho.as_mat() * &basis.vectors)
}

/// Inverse of [`to_eigenbasis`]: `Σ_pq |p⟩ ρ_pq ⟨q|`.
pub fn from_eigenbasis(rho_pq: MatRef<'_, C64>, basis: &EigenBasis) -> Result<Mat<C64>> {
    check_dims(rho_pq, basis)?;
    Ok(&basis.vectors * rho_pq * basis.vectors.adjoint())
}

fn entropy_of_spectrum(values: impl IntoIterator<Item = f64>, base: LogBase) -> Result<f64> {
    let mut s = 0.0;
    for lam in values {
        if lam < NEGATIVE_EIGENVALUE_LIMIT {
            return Err(Error::InvalidState(format!("eigenvalue {lam:.3e} is significantly negative")));
        }
        if lam >= ENTROPY_CUTOFF {
            s -= lam * base.log(lam);
        }
    }
    Ok(s)
}

/// `−Tr ρ log ρ`.
pub fn von_neumann_entropy(rho: MatRef<'_, C64>, base: LogBase) -> Result<f64> {
    entropy_of_spectrum(hermitian_eigenvalues(rho)?, base)
}

/// `S(diag ρ_pq) − S(ρ)` in the given eigenbasis.
pub fn relative_entropy_coherence(
    rho: &DensityMatrix,
    basis: &EigenBasis,
    base: LogBase,
) -> Result<f64> {
    let rho_pq = to_eigenbasis(rho, basis)?;
    coherence_from_eigenbasis(rho_pq.as_ref(), base)
}

fn coherence_from_eigenbasis(rho_pq: MatRef<'_, C64>, base: LogBase) -> Result<f64> {
    let diag = (0..rho_pq.nrows()).map(|p| rho_pq[(p, p)].re);
    Ok(entropy_of_spectrum(diag, base)? - von_neumann_entropy(rho_pq, base)?)
}

/// `Tr ρ²`, computed as `Σ |ρ_ij|²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    purity_of(rho.as_mat())
}

fn purity_of(m: MatRef<'_, C64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            acc += m[(i, j)].norm_sqr();
        }
    }
    acc
}

/// `1 / Σ_n ρ_nn²` in the site basis.
pub fn participation_ratio(rho: &DensityMatrix) -> f64 {
    let sum: f64 = site_populations(rho).iter().map(|p| p * p).sum();
    1.0 / sum
}

pub fn site_populations(rho: &DensityMatrix) -> Vec<f64> {
    let m = rho.as_mat();
    (0..rho.dim()).map(|i| m[(i, i)].re).collect()
}

pub fn eigen_populations(rho: &DensityMatrix, basis: &EigenBasis) -> Result<Vec<f64>> {
    let rho_pq = to_eigenbasis(rho, basis)?;
    Ok((0..rho.dim()).map(|p| rho_pq[(p, p)].re).collect())
}

/// `Σ_{p≠q} |ρ_pq| / Σ_{p,q} |ρ_pq|`.
pub fn off_diagonal_mass_fraction(rho_pq: MatRef<'_, C64>) -> f64 {
    let mut off = 0.0;
    let mut total = 0.0;
    for q in 0..rho_pq.ncols() {
        for p in 0..rho_pq.nrows() {
            let a = rho_pq[(p, q)].norm();
            total += a;
            if p != q {
                off += a;
            }
        }
    }
    off / total
}

#[derive(Debug, Clone)]
pub struct ObservableSet {
    pub c_re: f64,
    pub purity: f64,
    pub pr: f64,
    pub rho_nn: Vec<f64>,
    pub rho_pp: Vec<f64>,
    pub rho_pq: Option<Mat<C64>>,
}

/// Evaluates every observable with a single basis transform.
pub fn compute_observables(
    rho: &DensityMatrix,
    basis: &EigenBasis,
    base: LogBase,
    keep_rho_pq: bool,
) -> Result<ObservableSet> {
    let rho_pq = to_eigenbasis(rho, basis)?;
    let c_re = coherence_from_eigenbasis(rho_pq.as_ref(), base)?;
    let rho_pp = (0..rho.dim()).map(|p| rho_pq[(p, p)].re).collect();
    Ok(ObservableSet {
        c_re,
        purity: purity(rho),
        pr: participation_ratio(rho),
        rho_nn: site_populations(rho),
        rho_pp,
        rho_pq: keep_rho_pq.then_some(rho_pq),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_hamiltonian, LatticeSpec};
    use crate::state::frobenius_distance;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ring(n: usize) -> HamiltonianMatrix {
        build_hamiltonian(&LatticeSpec::periodic(n)).unwrap()
    }

    fn random_state(n: usize, seed: u64) -> DensityMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Mat::<C64>::from_fn(n, n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        DensityMatrix::normalized((&a * a.adjoint()).as_ref()).unwrap()
    }

    fn check_basis(h: &HamiltonianMatrix, basis: &EigenBasis) {
        let n = h.dim();
        let v = &basis.vectors;
        let gram = v.adjoint() * v;
        let hd = h.to_dense();
        for p in 0..n {
            for q in 0..n {
                let want = if p == q { 1.0 } else { 0.0 };
                assert!((gram[(p, q)] - C64::new(want, 0.0)).norm() <= 1e-10);
            }
            for i in 0..n {
                let mut hv = C64::new(0.0, 0.0);
                for j in 0..n {
                    hv += v[(j, p)] * hd[(i, j)];
                }
                assert!((hv - v[(i, p)] * basis.energies[p]).norm() <= 1e-10);
            }
        }
        assert!(basis.energies.windows(2).all(|w| w[0] <= w[1] + 1e-12));
    }

    #[test]
    fn momentum_basis_is_an_eigenbasis() {
        for n in [4, 7, 12] {
            let h = ring(n);
            check_basis(&h, &eigenbasis(&h, Gauge::Momentum).unwrap());
        }
        let b = eigenbasis(&ring(4), Gauge::Momentum).unwrap();
        for (got, want) in b.energies.iter().zip([-2.0, 0.0, 0.0, 2.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn real_symmetric_basis_is_an_eigenbasis() {
        for n in [4, 7, 12] {
            let h = ring(n);
            let b = eigenbasis(&h, Gauge::RealSymmetric).unwrap();
            check_basis(&h, &b);
            let again = eigenbasis(&h, Gauge::RealSymmetric).unwrap();
            assert_eq!(frobenius_distance(b.vectors.as_ref(), again.vectors.as_ref()), 0.0);
        }
        let open = build_hamiltonian(&LatticeSpec::new(9, 1.0, Boundary::Open).unwrap()).unwrap();
        check_basis(&open, &eigenbasis(&open, Gauge::RealSymmetric).unwrap());
        assert!(eigenbasis(&open, Gauge::Momentum).is_err());
    }

    #[test]
    fn zero_momentum_vector_is_uniform() {
        let n = 10;
        let b = eigenbasis(&ring(n), Gauge::Momentum).unwrap();
        let top = b.vector(n - 1);
        for z in top {
            assert!((z - C64::new(1.0 / (n as f64).sqrt(), 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_momentum_projector_populations() {
        let n = 144;
        let b = eigenbasis(&ring(n), Gauge::Momentum).unwrap();
        let rho = DensityMatrix::pure(&vec![C64::new(1.0, 0.0); n]).unwrap();
        let pp = eigen_populations(&rho, &b).unwrap();
        assert!((pp[n - 1] - 1.0).abs() < 1e-12);
        assert!((b.energies[n - 1] - 2.0).abs() < 1e-14);
        assert!(pp[..n - 1].iter().all(|p| p.abs() < 1e-12));
        for p in site_populations(&rho) {
            assert!((p - 1.0 / n as f64).abs() < 1e-14);
        }
        assert!((participation_ratio(&rho) - n as f64).abs() < 1e-9);
        assert!(relative_entropy_coherence(&rho, &b, LogBase::E).unwrap().abs() < 1e-9);
    }

    #[test]
    fn maximally_mixed_values() {
        let n = 6;
        let rho = DensityMatrix::maximally_mixed(n);
        let b = eigenbasis(&ring(n), Gauge::Momentum).unwrap();
        let rpq = to_eigenbasis(&rho, &b).unwrap();
        let eye = DensityMatrix::maximally_mixed(n);
        assert!(frobenius_distance(rpq.as_ref(), eye.as_mat()) < 1e-14);
        assert!((purity(&rho) - 1.0 / n as f64).abs() < 1e-15);
        assert!((von_neumann_entropy(rho.as_mat(), LogBase::E).unwrap() - (n as f64).ln()).abs() < 1e-12);
        assert!((von_neumann_entropy(rho.as_mat(), LogBase::Two).unwrap() - (n as f64).log2()).abs() < 1e-12);
        assert!((participation_ratio(&rho) - n as f64).abs() < 1e-12);
        for p in eigen_populations(&rho, &b).unwrap() {
            assert!((p - 1.0 / n as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn entropy_examples() {
        let pure = DensityMatrix::pure(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        assert!(von_neumann_entropy(pure.as_mat(), LogBase::E).unwrap().abs() < 1e-12);

        let mut half = Mat::<C64>::zeros(4, 4);
        half[(0, 0)] = C64::new(0.5, 0.0);
        half[(1, 1)] = C64::new(0.5, 0.0);
        assert!((von_neumann_entropy(half.as_ref(), LogBase::E).unwrap() - LN_2).abs() < 1e-14);

        let mut bad = Mat::<C64>::zeros(2, 2);
        bad[(0, 0)] = C64::new(1.1, 0.0);
        bad[(1, 1)] = C64::new(-0.1, 0.0);
        assert!(matches!(von_neumann_entropy(bad.as_ref(), LogBase::E), Err(Error::InvalidState(_))));

        let mut noisy = Mat::<C64>::zeros(2, 2);
        noisy[(0, 0)] = C64::new(1.0 + 1e-9, 0.0);
        noisy[(1, 1)] = C64::new(-1e-9, 0.0);
        assert!(von_neumann_entropy(noisy.as_ref(), LogBase::E).unwrap().abs() < 1e-7);
    }

    #[test]
    fn diagonal_in_eigenbasis_has_no_coherence() {
        let n = 8;
        let b = eigenbasis(&ring(n), Gauge::Momentum).unwrap();
        let mut d = Mat::<C64>::zeros(n, n);
        for p in 0..n {
            d[(p, p)] = C64::new((p + 1) as f64 / 36.0, 0.0);
        }
        let rho = DensityMatrix::from_matrix(from_eigenbasis(d.as_ref(), &b).unwrap()).unwrap();
        assert!(relative_entropy_coherence(&rho, &b, LogBase::E).unwrap().abs() < 1e-10);
    }

    #[test]
    fn transform_round_trip_and_invariance() {
        let n = 6;
        let rho = random_state(n, 5);
        for gauge in [Gauge::Momentum, Gauge::RealSymmetric] {
            let b = eigenbasis(&ring(n), gauge).unwrap();
            let rpq = to_eigenbasis(&rho, &b).unwrap();
            let back = from_eigenbasis(rpq.as_ref(), &b).unwrap();
            assert!(frobenius_distance(back.as_ref(), rho.as_mat()) < 1e-12);
            assert!((purity_of(rpq.as_ref()) - purity(&rho)).abs() < 1e-12);
            let s_site = von_neumann_entropy(rho.as_mat(), LogBase::E).unwrap();
            let s_eig = von_neumann_entropy(rpq.as_ref(), LogBase::E).unwrap();
            assert!((s_site - s_eig).abs() < 1e-11);
            let tr: f64 = eigen_populations(&rho, &b).unwrap().iter().sum();
            assert!((tr - 1.0).abs() < 1e-12);
            assert!(relative_entropy_coherence(&rho, &b, LogBase::E).unwrap() >= -1e-10);
        }
        let tr: f64 = site_populations(&rho).iter().sum();
        assert!((tr - 1.0).abs() < 1e-12);
    }

    #[test]
    fn localized_state_has_unit_participation() {
        let rho = DensityMatrix::site_localized(9, 4).unwrap();
        assert_eq!(participation_ratio(&rho), 1.0);
        assert_eq!(purity(&rho), 1.0);
    }

    #[test]
    fn observable_set_is_consistent() {
        let n = 7;
        let rho = random_state(n, 9);
        let b = eigenbasis(&ring(n), Gauge::Momentum).unwrap();
        let obs = compute_observables(&rho, &b, LogBase::E, true).unwrap();
        assert_eq!(obs.c_re, relative_entropy_coherence(&rho, &b, LogBase::E).unwrap());
        assert!(obs.purity >= 1.0 / n as f64 - 1e-10 && obs.purity <= 1.0 + 1e-10);
        assert!(obs.pr >= 1.0 - 1e-9 && obs.pr <= n as f64 + 1e-9);
        assert!(obs.rho_pq.is_some());
        let frac = off_diagonal_mass_fraction(obs.rho_pq.as_ref().unwrap().as_ref());
        assert!((0.0..=1.0).contains(&frac));
    }
}
