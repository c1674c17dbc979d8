use std::f64::consts::PI;

use faer::Mat;
use lindsteady_core::observables::{
    compute_observables, eigenbasis, off_diagonal_mass_fraction, participation_ratio, purity,
    to_eigenbasis, von_neumann_entropy,
};
use lindsteady_core::solvers::{steady_state_by_evolution, steady_state_by_nullspace};
use lindsteady_core::state::{frobenius, frobenius_distance, hermiticity_error, trace, vectorize};
use lindsteady_core::{
    Boundary, DensityMatrix, DissipationSpec, EvolutionConfig, Gauge, LatticeSpec,
    LindbladGenerator, LogBase, C64,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> Mat<C64> {
    Mat::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let a = random_matrix(n, rng);
    DensityMatrix::normalized((&a * a.adjoint()).as_ref()).unwrap()
}

fn boundary() -> impl Strategy<Value = Boundary> {
    prop_oneof![Just(Boundary::Periodic), Just(Boundary::Open)]
}

prop_compose! {
    fn dissipation()(
        gamma in 0.1f64..3.0,
        alpha0 in -PI..PI,
        alpha1 in 0.0f64..6.0,
        beta in 0.0f64..1.0,
        nu in 0.0f64..1.0,
        boundary in boundary(),
        index_origin in 0u32..=1,
    ) -> DissipationSpec {
        DissipationSpec { gamma, alpha0, alpha1, beta, nu, boundary, index_origin }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn generator_matches_superoperator(
        n in 2usize..=10,
        lattice_boundary in boundary(),
        dspec in dissipation(),
        seed in any::<u64>(),
    ) {
        let lattice = LatticeSpec::new(n, 1.0, lattice_boundary).unwrap();
        let gen = LindbladGenerator::new(&lattice, &dspec).unwrap();
        let sup = gen.superoperator().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_matrix(n, &mut rng);
        let direct = vectorize(gen.apply(x.as_ref()).unwrap().as_ref());
        let via = sup.apply(&vectorize(x.as_ref())).unwrap();
        let err = direct.iter().zip(&via).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(err <= 1e-11, "error {err:e}");
    }

    #[test]
    fn generator_preserves_trace_and_hermiticity(
        n in 2usize..=12,
        dspec in dissipation(),
        seed in any::<u64>(),
    ) {
        let gen = LindbladGenerator::new(&LatticeSpec::periodic(n), &dspec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_state(n, &mut rng);
        let out = gen.apply(rho.as_mat()).unwrap();
        prop_assert!(trace(out.as_ref()).norm() <= 1e-11);
        prop_assert!(hermiticity_error(out.as_ref()) <= 1e-11);
    }

    #[test]
    fn plane_wave_dark_states(n in 3usize..=24, m in 0usize..24, boundary in boundary()) {
        let m = m % n;
        let k = 2.0 * PI * m as f64 / n as f64;
        let gen = LindbladGenerator::new(
            &LatticeSpec::periodic(n),
            &DissipationSpec::uniform(k, boundary),
        ).unwrap();
        let psi: Vec<C64> = (1..=n).map(|s| C64::from_polar(1.0, k * s as f64)).collect();
        let rho = DensityMatrix::pure(&psi).unwrap();
        prop_assert!(frobenius(gen.apply(rho.as_mat()).unwrap().as_ref()) <= 1e-12);
    }

    #[test]
    fn observable_bounds(n in 2usize..=16, seed in any::<u64>(), gauge_momentum in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_state(n, &mut rng);
        let h = lindsteady_core::build_hamiltonian(&LatticeSpec::periodic(n)).unwrap();
        let gauge = if gauge_momentum { Gauge::Momentum } else { Gauge::RealSymmetric };
        let basis = eigenbasis(&h, gauge).unwrap();
        let obs = compute_observables(&rho, &basis, LogBase::E, true).unwrap();
        let nf = n as f64;
        prop_assert!(obs.c_re >= -1e-10);
        prop_assert!(obs.purity >= 1.0 / nf - 1e-10 && obs.purity <= 1.0 + 1e-10);
        prop_assert!(obs.pr >= 1.0 - 1e-9 && obs.pr <= nf + 1e-9);
        prop_assert!((obs.rho_nn.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        prop_assert!((obs.rho_pp.iter().sum::<f64>() - 1.0).abs() <= 1e-10);

        let rho_pq = obs.rho_pq.unwrap();
        let s_site = von_neumann_entropy(rho.as_mat(), LogBase::E).unwrap();
        let s_eig = von_neumann_entropy(rho_pq.as_ref(), LogBase::E).unwrap();
        prop_assert!((s_site - s_eig).abs() <= 1e-11);
        let f = off_diagonal_mass_fraction(rho_pq.as_ref());
        prop_assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn participation_ratio_ignores_site_labels(n in 2usize..=12, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_state(n, &mut rng);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let m = rho.as_mat();
        let permuted = DensityMatrix::from_matrix(Mat::from_fn(n, n, |i, j| m[(perm[i], perm[j])])).unwrap();
        prop_assert!((participation_ratio(&rho) - participation_ratio(&permuted)).abs() <= 1e-10);
        prop_assert!((purity(&rho) - purity(&permuted)).abs() <= 1e-12);
    }
}

#[test]
fn maximally_mixed_identities() {
    for n in [2, 5, 17, 144] {
        let rho = DensityMatrix::maximally_mixed(n);
        let nf = n as f64;
        let basis = eigenbasis(
            &lindsteady_core::build_hamiltonian(&LatticeSpec::periodic(n)).unwrap(),
            Gauge::Momentum,
        )
        .unwrap();
        let obs = compute_observables(&rho, &basis, LogBase::E, false).unwrap();
        assert!((obs.purity - 1.0 / nf).abs() <= 1e-10);
        assert!((obs.pr - nf).abs() <= 1e-10);
        assert!(obs.c_re.abs() <= 1e-10);
        assert!((von_neumann_entropy(rho.as_mat(), LogBase::E).unwrap() - nf.ln()).abs() <= 1e-10);
    }
}

#[test]
fn solvers_agree_on_small_lattices() {
    let cfg = EvolutionConfig { residual_tol: 1e-12, ..EvolutionConfig::default() };
    for (n, nu, beta) in [(6, 0.1, 0.618), (8, 0.6, 0.5), (12, 0.3, 0.618)] {
        let dspec = DissipationSpec { alpha1: 4.0, nu, beta, ..DissipationSpec::default() };
        let gen = LindbladGenerator::new(&LatticeSpec::periodic(n), &dspec).unwrap();
        let direct = steady_state_by_nullspace(&gen.superoperator().unwrap()).unwrap();
        let evolved = steady_state_by_evolution(&gen, &cfg).unwrap();
        let d = frobenius_distance(direct.rho_ss.as_mat(), evolved.rho_ss.as_mat());
        assert!(d <= 1e-8, "N={n}: distance {d:e}");
    }
}

#[test]
fn eigenbasis_transform_preserves_purity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let rho = random_state(9, &mut rng);
    let h = lindsteady_core::build_hamiltonian(&LatticeSpec::new(9, 0.7, Boundary::Open).unwrap()).unwrap();
    let basis = eigenbasis(&h, Gauge::RealSymmetric).unwrap();
    let rho_pq = to_eigenbasis(&rho, &basis).unwrap();
    let p = rho_pq.as_ref();
    let mut acc = 0.0;
    for j in 0..9 {
        for i in 0..9 {
            acc += p[(i, j)].norm_sqr();
        }
    }
    assert!((acc - purity(&rho)).abs() <= 1e-12);
}
