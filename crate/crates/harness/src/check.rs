//! Invariant and oracle suite behind `lindsteady check`.
//!
//! Every check compares against an independent construction or an exact
//! identity; none of them use published numbers.

use std::f64::consts::PI;

use faer::Mat;
use lindsteady_core::lindblad::LindbladGenerator;
use lindsteady_core::model::jump_matrix;
use lindsteady_core::observables::{compute_observables, eigenbasis, von_neumann_entropy};
use lindsteady_core::solvers::{steady_state_by_evolution, steady_state_by_nullspace};
use lindsteady_core::state::{frobenius, frobenius_distance, hermiticity_error, trace, vectorize};
use lindsteady_core::{
    build_hamiltonian, Boundary, DensityMatrix, DissipationSpec, EvolutionConfig, Gauge,
    LatticeSpec, LogBase, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn bound(name: &'static str, worst: f64, tol: f64) -> Self {
        Self { name, passed: worst <= tol, detail: format!("max error {worst:.3e} (tolerance {tol:.0e})") }
    }

    fn failed(name: &'static str, err: impl std::fmt::Display) -> Self {
        Self { name, passed: false, detail: err.to_string() }
    }
}

fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> Mat<C64> {
    Mat::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let a = random_matrix(n, rng);
    DensityMatrix::normalized((&a * a.adjoint()).as_ref()).expect("a a† has positive trace")
}

fn random_dissipation(rng: &mut ChaCha8Rng) -> DissipationSpec {
    DissipationSpec {
        gamma: rng.gen_range(0.2..2.0),
        alpha0: rng.gen_range(-PI..PI),
        alpha1: rng.gen_range(0.0..6.0),
        beta: rng.gen_range(0.0..1.0),
        nu: rng.gen_range(0.0..1.0),
        boundary: if rng.gen_bool(0.5) { Boundary::Open } else { Boundary::Periodic },
        index_origin: rng.gen_range(0..=1),
    }
}

/// `A ⊗ B` with the column-stacking convention `vec(B X Aᵀ) = (A ⊗ B) vec(X)`.
fn kron(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    let (p, q) = (b.nrows(), b.ncols());
    Mat::from_fn(a.nrows() * p, a.ncols() * q, |r, c| a[(r / p, c / q)] * b[(r % p, c % q)])
}

/// Dense superoperator built term by term from Kronecker products.
fn kronecker_superoperator(gen: &LindbladGenerator) -> Mat<C64> {
    let n = gen.dim();
    let eye = Mat::<C64>::identity(n, n);
    let h = gen.hamiltonian.to_dense();
    let h = Mat::<C64>::from_fn(n, n, |i, j| C64::new(h[(i, j)], 0.0));
    let mi = C64::new(0.0, -1.0);
    let mut l = faer::Scale(mi) * (kron(&eye, &h) - kron(&h.transpose().to_owned(), &eye));
    let g = C64::new(gen.gamma, 0.0);
    for op in &gen.jumps {
        let m = jump_matrix(op, n);
        let mdm = m.adjoint() * &m;
        let term = kron(&m.conjugate().to_owned(), &m)
            - faer::Scale(C64::new(0.5, 0.0)) * kron(&eye, &mdm)
            - faer::Scale(C64::new(0.5, 0.0)) * kron(&mdm.transpose().to_owned(), &eye);
        l += faer::Scale(g) * term;
    }
    l
}

fn generator_vs_kronecker(rng: &mut ChaCha8Rng) -> CheckOutcome {
    const NAME: &str = "generator matches dense Kronecker superoperator (N <= 10, 50 trials)";
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.gen_range(2..=10);
        let boundary = if rng.gen_bool(0.5) { Boundary::Open } else { Boundary::Periodic };
        let lattice = LatticeSpec { n, t: rng.gen_range(0.5..1.5), boundary };
        let gen = match LindbladGenerator::new(&lattice, &random_dissipation(rng)) {
            Ok(g) => g,
            Err(e) => return CheckOutcome::failed(NAME, e),
        };
        let l = kronecker_superoperator(&gen);
        let x = random_matrix(n, rng);
        let via_kron = &l * Mat::from_fn(n * n, 1, |k, _| x[(k % n, k / n)]);
        let direct = match gen.apply(x.as_ref()) {
            Ok(d) => vectorize(d.as_ref()),
            Err(e) => return CheckOutcome::failed(NAME, e),
        };
        let err: f64 = direct.iter().enumerate().map(|(k, z)| (z - via_kron[(k, 0)]).norm_sqr()).sum();
        worst = worst.max(err.sqrt());
    }
    CheckOutcome::bound(NAME, worst, 1e-11)
}

fn solvers_agree() -> CheckOutcome {
    const NAME: &str = "null-space and time-evolution steady states agree (N <= 12)";
    let cfg = EvolutionConfig { residual_tol: 1e-12, ..EvolutionConfig::default() };
    let mut worst: f64 = 0.0;
    for (n, beta, nu, alpha1) in [
        (4, 0.5, 0.1, 4.0),
        (6, (5f64.sqrt() - 1.0) / 2.0, 0.1, 4.0),
        (8, (5f64.sqrt() - 1.0) / 2.0, 0.6, 4.0),
        (10, 0.5, 0.3, 2.0),
        (12, (5f64.sqrt() - 1.0) / 2.0, 0.1, 4.0),
    ] {
        let dspec = DissipationSpec { alpha1, beta, nu, ..DissipationSpec::default() };
        let run = || -> lindsteady_core::Result<f64> {
            let gen = LindbladGenerator::new(&LatticeSpec::periodic(n), &dspec)?;
            let direct = steady_state_by_nullspace(&gen.superoperator()?)?;
            let evolved = steady_state_by_evolution(&gen, &cfg)?;
            Ok(frobenius_distance(direct.rho_ss.as_mat(), evolved.rho_ss.as_mat()))
        };
        match run() {
            Ok(d) => worst = worst.max(d),
            Err(e) => return CheckOutcome::failed(NAME, format!("N={n}: {e}")),
        }
    }
    CheckOutcome::bound(NAME, worst, 1e-8)
}

fn trace_and_hermiticity(rng: &mut ChaCha8Rng) -> CheckOutcome {
    const NAME: &str = "generator output is traceless and Hermitian on random states";
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.gen_range(2..=16);
        let rho = random_state(n, rng);
        let out = LindbladGenerator::new(&LatticeSpec::periodic(n), &random_dissipation(rng))
            .and_then(|g| g.apply(rho.as_mat()));
        match out {
            Ok(m) => {
                worst = worst.max(trace(m.as_ref()).norm()).max(hermiticity_error(m.as_ref()));
            }
            Err(e) => return CheckOutcome::failed(NAME, e),
        }
    }
    CheckOutcome::bound(NAME, worst, 1e-11)
}

fn dark_states() -> CheckOutcome {
    const NAME: &str = "plane wave k = alpha0 is annihilated by uniform dissipation";
    let mut worst: f64 = 0.0;
    for n in [3, 4, 7, 12, 21] {
        for m in 0..n {
            let k = 2.0 * PI * m as f64 / n as f64;
            for boundary in [Boundary::Open, Boundary::Periodic] {
                let psi: Vec<C64> = (1..=n).map(|s| C64::from_polar(1.0, k * s as f64)).collect();
                let out = DensityMatrix::pure(&psi).and_then(|rho| {
                    LindbladGenerator::new(&LatticeSpec::periodic(n), &DissipationSpec::uniform(k, boundary))?
                        .apply(rho.as_mat())
                });
                match out {
                    Ok(m) => worst = worst.max(frobenius(m.as_ref())),
                    Err(e) => return CheckOutcome::failed(NAME, e),
                }
            }
        }
    }
    CheckOutcome::bound(NAME, worst, 1e-12)
}

fn observable_identities(rng: &mut ChaCha8Rng) -> CheckOutcome {
    const NAME: &str = "observable bounds and identities";
    let run = |rng: &mut ChaCha8Rng| -> lindsteady_core::Result<f64> {
        let mut worst: f64 = 0.0;
        for n in [2, 5, 12, 33] {
            let nf = n as f64;
            let basis = eigenbasis(&build_hamiltonian(&LatticeSpec::periodic(n))?, Gauge::Momentum)?;
            let mixed = DensityMatrix::maximally_mixed(n);
            let obs = compute_observables(&mixed, &basis, LogBase::E, false)?;
            worst = worst
                .max((obs.purity - 1.0 / nf).abs())
                .max((obs.pr - nf).abs())
                .max(obs.c_re.abs())
                .max((von_neumann_entropy(mixed.as_mat(), LogBase::E)? - nf.ln()).abs());
            for _ in 0..10 {
                let rho = random_state(n, rng);
                let obs = compute_observables(&rho, &basis, LogBase::E, false)?;
                // Distance outside the admissible interval; zero when inside.
                let outside = |x: f64, lo: f64, hi: f64| (lo - x).max(x - hi).max(0.0);
                worst = worst
                    .max(outside(obs.purity, 1.0 / nf, 1.0))
                    .max(outside(obs.pr, 1.0, nf))
                    .max((-obs.c_re).max(0.0))
                    .max((obs.rho_nn.iter().sum::<f64>() - 1.0).abs())
                    .max((obs.rho_pp.iter().sum::<f64>() - 1.0).abs());
            }
        }
        Ok(worst)
    };
    match run(rng) {
        Ok(w) => CheckOutcome::bound(NAME, w, 1e-10),
        Err(e) => CheckOutcome::failed(NAME, e),
    }
}

/// Runs the whole suite with a fixed seed.
pub fn run_checks(seed: u64) -> Vec<CheckOutcome> {
    crate::run::use_sequential_kernels();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        generator_vs_kronecker(&mut rng),
        solvers_agree(),
        trace_and_hermiticity(&mut rng),
        dark_states(),
        observable_identities(&mut rng),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_matches_column_stacking() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (a, b, x) = (random_matrix(3, &mut rng), random_matrix(3, &mut rng), random_matrix(3, &mut rng));
        let lhs = vectorize((&b * &x * a.transpose()).as_ref());
        let k = kron(&a, &b);
        let rhs = &k * Mat::from_fn(9, 1, |i, _| x[(i % 3, i / 3)]);
        for i in 0..9 {
            assert!((lhs[i] - rhs[(i, 0)]).norm() < 1e-13);
        }
    }
}
