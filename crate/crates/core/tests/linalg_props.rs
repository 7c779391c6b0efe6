use envqdd::lindblad::DissipationChannel;
use envqdd::linalg::{
    build_dissipator, build_hamiltonian_superop, fro_norm, identity, shifted_solve, spectral_split, unvec,
    vec_op, Superop, C64, DEFAULT_KERNEL_TOL,
};
use envqdd::random::{instance_rng, random_hermitian, random_lindbladian, random_matrix, uniform};
use envqdd::stationary::EnvModel;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lindbladian_preserves_trace(seed in any::<u64>(), d in 2usize..6, k in 1usize..4) {
        let mut r = instance_rng(seed, "trace", 0);
        let mut l = build_hamiltonian_superop(&random_hermitian(&mut r, d)).unwrap();
        for _ in 0..k {
            l += &build_dissipator(&random_matrix(&mut r, d)).scale(C64::from(uniform(&mut r, 0.1, 3.0)));
        }
        let row = vec_op(&identity(d)).adjoint() * &l.m;
        let worst = row.iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-12 * l.norm(), "{worst}");
        prop_assert!(l.trace_defect() < 1e-12 * l.norm());
    }

    #[test]
    fn vectorization_round_trip(seed in any::<u64>(), d in 1usize..7) {
        let mut r = instance_rng(seed, "vec", 0);
        let a = random_matrix(&mut r, d);
        prop_assert_eq!(unvec(&vec_op(&a), d), a);
    }

    #[test]
    fn split_projector_properties(seed in any::<u64>(), d in 2usize..5) {
        let mut r = instance_rng(seed, "split", 0);
        let l = random_lindbladian(&mut r, d, 2);
        let split = spectral_split(&l, DEFAULT_KERNEL_TOL).unwrap();
        let rm = &split.projector.m;
        let scale = l.norm();
        prop_assert!(fro_norm(&(rm * rm - rm)) < 1e-9);
        prop_assert!(fro_norm(&(rm * &l.m)) < 1e-9 * scale);
        prop_assert!(fro_norm(&(&l.m * rm)) < 1e-9 * scale);
        prop_assert_eq!(split.dim(), 1);
        prop_assert!((split.kernel[0].trace() - 1.0).norm() < 1e-10);
    }

    #[test]
    fn shifted_solve_inverts_on_complement(seed in any::<u64>(), d in 2usize..5, re in -2.0f64..0.0, im in -3.0f64..3.0) {
        let mut r = instance_rng(seed, "solve", 0);
        let l = random_lindbladian(&mut r, d, 2);
        let split = spectral_split(&l, DEFAULT_KERNEL_TOL).unwrap();
        for shift in [C64::new(0.0, 0.0), C64::new(re, im)] {
            let y = random_matrix(&mut r, d);
            let y = &y - split.projector.apply(&y);
            let x = shifted_solve(&l, shift, &y, &split).unwrap();
            let back = l.apply(&x) - &x * shift;
            prop_assert!(fro_norm(&(&back - &y)) < 1e-10 * fro_norm(&y).max(1e-300));
        }
    }

    /// Hermitian jumps with no Hamiltonian: the cokernel must be the identity.
    #[test]
    fn unital_cokernel_is_identity(seed in any::<u64>(), d in 2usize..4) {
        let mut r = instance_rng(seed, "unital", 0);
        let channels = (0..3)
            .map(|_| DissipationChannel::new(uniform(&mut r, 0.5, 8.0), random_hermitian(&mut r, d)))
            .collect();
        let env = EnvModel::new(envqdd::linalg::Op::zeros(d, d), channels);
        let (split, rho) = env.split().unwrap();
        prop_assert!(fro_norm(&(rho - identity(d).scale(1.0 / d as f64))) < 1e-10);
        let expect = Superop::from_matrix(d, vec_op(&identity(d).scale(1.0 / d as f64)) * vec_op(&identity(d)).adjoint());
        prop_assert!(fro_norm(&(&split.projector.m - &expect.m)) < 1e-9);
    }
}
