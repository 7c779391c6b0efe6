use envqdd::lindblad::{
    integrate, monodromy, state_defects, DissipationChannel, LindbladModel, PeriodicHamiltonian,
};
use envqdd::linalg::{eigenvalues, fro_norm};
use envqdd::random::{instance_rng, random_density, random_hermitian, random_matrix, uniform, Rand};
use proptest::prelude::*;

fn random_model(r: &mut Rand, d_t: usize, d_e: usize, driven: bool) -> LindbladModel {
    let d = d_t * d_e;
    let channels = (0..2).map(|_| DissipationChannel::new(uniform(r, 0.2, 1.5), random_matrix(r, d))).collect();
    let periodic = driven.then(|| {
        let a = random_matrix(r, d).scale(0.5);
        PeriodicHamiltonian { omega: uniform(r, 1.0, 4.0), modes: vec![(1, a.clone()), (-1, a.adjoint())] }
    });
    LindbladModel { d_t, d_e, h_static: random_hermitian(r, d), periodic, channels }
}

fn dims(k: usize) -> (usize, usize) {
    [(1, 2), (2, 2), (1, 3), (2, 3), (3, 2)][k % 5]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn integration_keeps_trace_and_positivity(seed in any::<u64>(), k in 0usize..5, driven in any::<bool>()) {
        let mut r = instance_rng(seed, "integrate", 0);
        let (d_t, d_e) = dims(k);
        let model = random_model(&mut r, d_t, d_e, driven);
        let rho0 = random_density(&mut r, d_t * d_e);
        let traj = integrate(&model, &rho0, 3.0, 1e-9).unwrap();
        let (min_eig, tr) = state_defects(&traj);
        prop_assert!(tr < 1e-8, "trace defect {tr}");
        prop_assert!(min_eig > -1e-7, "min eigenvalue {min_eig}");
    }

    #[test]
    fn monodromy_is_contractive(seed in any::<u64>(), k in 0usize..3) {
        let mut r = instance_rng(seed, "monodromy", 0);
        let (d_t, d_e) = dims(k);
        let model = random_model(&mut r, d_t, d_e, true);
        let phi = monodromy(&model).unwrap();
        let radius = eigenvalues(&phi.m).unwrap().iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(radius <= 1.0 + 1e-8, "{radius}");
    }

    #[test]
    fn tolerance_halving_converges(seed in any::<u64>(), k in 0usize..5) {
        let mut r = instance_rng(seed, "halving", 0);
        let (d_t, d_e) = dims(k);
        let model = random_model(&mut r, d_t, d_e, true);
        let rho0 = random_density(&mut r, d_t * d_e);
        let tol = 1e-8;
        let a = integrate(&model, &rho0, 2.0, tol).unwrap();
        let b = integrate(&model, &rho0, 2.0, tol / 2.0).unwrap();
        let diff = fro_norm(&(a.last().unwrap() - b.last().unwrap()));
        prop_assert!(diff < 10.0 * tol, "{diff}");
    }
}
