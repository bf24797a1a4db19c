//! Property-based checks of the norm and sampling invariants, with inputs
//! generated through the crate's own seeded samplers so every case is finite
//! and replayable from the proptest seed.

use num_complex::Complex64;
use proptest::prelude::*;
use recoh::coherence::{
    pure_pair_coherence, qubit_coherence, recoverable_coherence, trace_norm,
};
use recoh::sampling::{
    haar_unitary, partial_trace, sample_complex_gaussian, sample_haar_pure,
    sample_induced_density, RngStream,
};
use recoh::ComplexMatrix;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trace_norm_is_absolutely_homogeneous(
        seed in any::<u64>(),
        scale in -8.0f64..8.0,
        dim in 1usize..=5,
    ) {
        let m = sample_complex_gaussian(dim, dim, RngStream::new(seed)).unwrap();
        let base = trace_norm(&m).unwrap();
        let scaled = trace_norm(&(&m * Complex64::new(scale, 0.0))).unwrap();
        prop_assert!((scaled - scale.abs() * base).abs() <= 1e-10 * (1.0 + base));
    }

    #[test]
    fn trace_norm_satisfies_triangle_inequality(
        seed_m in any::<u64>(),
        seed_n in any::<u64>(),
        dim in 1usize..=5,
    ) {
        let m = sample_complex_gaussian(dim, dim, RngStream::new(seed_m)).unwrap();
        let n = sample_complex_gaussian(dim, dim, RngStream::new(seed_n)).unwrap();
        let sum = trace_norm(&(&m + &n)).unwrap();
        let bound = trace_norm(&m).unwrap() + trace_norm(&n).unwrap();
        prop_assert!(sum <= bound + 1e-10 * (1.0 + bound));
    }

    #[test]
    fn trace_norm_is_unitarily_invariant(
        seed in any::<u64>(),
        seed_u in any::<u64>(),
        seed_v in any::<u64>(),
        dim in 1usize..=5,
    ) {
        let m = sample_complex_gaussian(dim, dim, RngStream::new(seed)).unwrap();
        let u = haar_unitary(dim, RngStream::new(seed_u)).unwrap();
        let v = haar_unitary(dim, RngStream::new(seed_v)).unwrap();
        let rotated = trace_norm(&(&u * &m * &v)).unwrap();
        let base = trace_norm(&m).unwrap();
        prop_assert!((rotated - base).abs() <= 1e-10 * (1.0 + base));
    }

    #[test]
    fn diagonal_absolute_sum_is_bounded_by_trace_norm(
        seed in any::<u64>(),
        dim in 1usize..=6,
    ) {
        let m = sample_complex_gaussian(dim, dim, RngStream::new(seed)).unwrap();
        let diag_sum: f64 = (0..dim).map(|i| m[(i, i)].norm()).sum();
        let bound = trace_norm(&m).unwrap();
        prop_assert!(diag_sum <= bound + 1e-10 * (1.0 + bound));
    }

    #[test]
    fn recoverable_coherence_stays_in_unit_interval(
        seed in any::<u64>(),
        a in 1usize..=6,
        k in 1usize..=6,
    ) {
        let rho = sample_induced_density(a, k, RngStream::new(seed)).unwrap();
        let c = recoverable_coherence(&rho, a).unwrap();
        prop_assert!(c >= 0.0);
        prop_assert!(c <= 1.0 + 1e-12);
    }

    #[test]
    fn pure_pair_coherence_matches_reduced_qubit(
        theta in 0.0f64..std::f64::consts::FRAC_PI_2,
        beta_phase in 0.0f64..std::f64::consts::TAU,
        overlap_mag in 0.0f64..1.0,
        overlap_phase in 0.0f64..std::f64::consts::TAU,
    ) {
        let alpha = Complex64::new(theta.cos(), 0.0);
        let beta = Complex64::from_polar(theta.sin(), beta_phase);
        let overlap = Complex64::from_polar(overlap_mag, overlap_phase);
        let direct = pure_pair_coherence(alpha, beta, overlap).unwrap();

        let mut rho = ComplexMatrix::zeros(2, 2);
        rho[(0, 0)] = Complex64::new(alpha.norm_sqr(), 0.0);
        rho[(1, 1)] = Complex64::new(beta.norm_sqr(), 0.0);
        rho[(0, 1)] = alpha * beta.conj() * overlap;
        rho[(1, 0)] = rho[(0, 1)].conj();
        let reduced = qubit_coherence(&rho).unwrap();
        prop_assert!((direct - reduced).abs() <= 1e-12);
    }

    #[test]
    fn distinct_substreams_give_distinct_draws(
        seed in any::<u64>(),
        i in 0u64..1000,
        j in 0u64..1000,
    ) {
        prop_assume!(i != j);
        let m = sample_complex_gaussian(2, 2, RngStream::substream(seed, i)).unwrap();
        let n = sample_complex_gaussian(2, 2, RngStream::substream(seed, j)).unwrap();
        prop_assert_ne!(m, n);
    }

    #[test]
    fn partial_trace_of_haar_state_is_a_valid_density(
        seed in any::<u64>(),
        keep in 2usize..=6,
        env in 2usize..=6,
    ) {
        let state = sample_haar_pure(keep * env, RngStream::new(seed)).unwrap();
        let rho = partial_trace(&state, keep).unwrap();
        prop_assert_eq!(rho.dim(), keep);
    }
}
