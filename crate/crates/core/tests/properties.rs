use cstomo::estimators::{eigen_soft_threshold, ls_pg_estimate, EstimatorOptions};
use cstomo::linalg::{
    frobenius_dist_sq, ginibre, herm_eig, psd_project, random_fixed_rank_state, trace_distance, HermitianMatrix,
};
use cstomo::measurement::io::{read_counts_csv, write_counts_csv};
use cstomo::measurement::{
    parity_sum, random_settings, sample_multinomial, simulate_records, DataVector, SamplingOperator,
};
use cstomo::rng::{derive_seed, rng_from_seed};
use cstomo::selection::{
    eigen_overlap, haar_threshold, mean_overlaps, rank_from_overlaps, threshold_spectrum, truncate_state,
};
use proptest::prelude::*;

fn random_hermitian(d: usize, seed: u64) -> HermitianMatrix {
    let g = ginibre(d, d, &mut rng_from_seed(seed));
    HermitianMatrix::symmetrized(&g + g.adjoint())
}

fn state(d: usize, rank: usize, seed: u64) -> HermitianMatrix {
    random_fixed_rank_state(d, rank.clamp(1, d), &mut rng_from_seed(seed)).unwrap()
}

fn operator(l: usize, n: usize, seed: u64) -> SamplingOperator {
    let n = n.clamp(1, 3usize.pow(l as u32));
    SamplingOperator::new(random_settings(l, n, &mut rng_from_seed(seed)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sampling_blocks_are_distributions(l in 1usize..=4, n in 1usize..20, rank in 1usize..4, seed in any::<u64>()) {
        let op = operator(l, n, seed);
        let p = op.apply(&state(op.dim(), rank, seed ^ 1)).unwrap();
        for block in p.blocks() {
            prop_assert!(block.iter().all(|&x| x >= -1e-12));
            prop_assert!((block.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(parity_sum(block).abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn fast_operator_matches_conjugation(l in 1usize..=3, n in 1usize..10, seed in any::<u64>()) {
        let op = operator(l, n, seed);
        let x = random_hermitian(op.dim(), seed ^ 2);
        let fast = op.apply(&x).unwrap();
        let slow = op.apply_by_conjugation(&x).unwrap();
        prop_assert!(fast.sub(&slow).norm_sq().sqrt() < 1e-11);
        let back = op.adjoint(&fast).unwrap();
        let back_slow = op.adjoint_by_conjugation(&fast).unwrap();
        prop_assert!((back.as_matrix() - back_slow.as_matrix()).norm() < 1e-10);
    }

    #[test]
    fn operator_is_linear(l in 1usize..=3, n in 1usize..10, a in -3.0f64..3.0, seed in any::<u64>()) {
        let op = operator(l, n, seed);
        let x = random_hermitian(op.dim(), seed ^ 3);
        let y = random_hermitian(op.dim(), seed ^ 4);
        let combo = HermitianMatrix::symmetrized(x.as_matrix() * num_complex::Complex64::new(a, 0.0) + y.as_matrix());
        let lhs = op.apply(&combo).unwrap();
        let ax = op.apply(&x).unwrap();
        let ay = op.apply(&y).unwrap();
        let rhs: Vec<f64> = ax.values().iter().zip(ay.values()).map(|(u, v)| a * u + v).collect();
        let rhs = DataVector::new(rhs, op.dim()).unwrap();
        prop_assert!(lhs.sub(&rhs).norm_sq().sqrt() < 1e-10);
    }

    #[test]
    fn psd_projection_is_nearest_psd(d in 2usize..9, seed in any::<u64>()) {
        let h = random_hermitian(d, seed);
        let p = psd_project(&h).unwrap();
        let eig = herm_eig(&p).unwrap().eigenvalues;
        prop_assert!(eig.iter().all(|&l| l >= -1e-12));
        let again = psd_project(&p).unwrap();
        prop_assert!((again.as_matrix() - p.as_matrix()).norm() < 1e-10);
        let other = state(d, 1 + (seed as usize) % d, seed ^ 5);
        prop_assert!(frobenius_dist_sq(&h, &p).unwrap() <= frobenius_dist_sq(&h, &other).unwrap() + 1e-10);
    }

    #[test]
    fn soft_threshold_shrinks_nuclear_norm(d in 2usize..9, t in 0.0f64..2.0, seed in any::<u64>()) {
        let h = random_hermitian(d, seed);
        let (out, nuclear) = eigen_soft_threshold(&h, t, false).unwrap();
        let before: f64 = herm_eig(&h).unwrap().eigenvalues.iter().map(|l| l.abs()).sum();
        prop_assert!(nuclear <= before + 1e-10);
        let after: f64 = herm_eig(&out).unwrap().eigenvalues.iter().map(|l| l.abs()).sum();
        prop_assert!((after - nuclear).abs() < 1e-9);
        let (pos, _) = eigen_soft_threshold(&h, t, true).unwrap();
        prop_assert!(herm_eig(&pos).unwrap().eigenvalues.iter().all(|&l| l >= -1e-12));
    }

    #[test]
    fn overlaps_are_probabilities(d in 2usize..9, seed in any::<u64>()) {
        let a = herm_eig(&state(d, d, seed)).unwrap();
        let b = herm_eig(&state(d, d, seed ^ 6)).unwrap();
        for j in 1..=d {
            let m = eigen_overlap(&a, &b, j).unwrap();
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&m));
            prop_assert!((eigen_overlap(&a, &a, j).unwrap() - 1.0).abs() < 1e-10);
        }
        let means = mean_overlaps(&[a.clone(), a.clone(), a]).unwrap();
        prop_assert_eq!(rank_from_overlaps(&means, d), d);
    }

    #[test]
    fn truncation_is_a_state(d in 2usize..9, k in 1usize..9, seed in any::<u64>()) {
        let k = k.min(d);
        let s = herm_eig(&state(d, d, seed)).unwrap();
        let rho_k = truncate_state(&s, k).unwrap();
        prop_assert!((rho_k.trace() - 1.0).abs() < 1e-12);
        let eig = herm_eig(&rho_k).unwrap();
        prop_assert!(eig.rank_above(1e-12) <= k);
        prop_assert!(eig.eigenvalues.iter().all(|&l| l >= -1e-12));
        prop_assert!(trace_distance(&rho_k, &s.reconstruct()).unwrap() <= 1.0 + 1e-12);
    }

    #[test]
    fn cut_spectrum_is_a_distribution(raw in prop::collection::vec(0.0f64..1.0, 2..17), cut in 0.0f64..0.3) {
        let total: f64 = raw.iter().sum();
        prop_assume!(total > 1e-6);
        let mut eig: Vec<f64> = raw.iter().map(|x| x / total).collect();
        eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
        if let Ok(out) = threshold_spectrum(&eig, cut) {
            prop_assert!(out.iter().all(|&l| l >= 0.0));
            prop_assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn threshold_sits_between_mean_and_one(d in 2usize..4096) {
        let e = haar_threshold(d);
        prop_assert!(e > 1.0 / d as f64 && e < 1.0);
        prop_assert!(haar_threshold(d + 1) < e);
    }

    #[test]
    fn multinomial_counts_sum_to_shots(raw in prop::collection::vec(0.0f64..1.0, 1..16), m in 0u64..10_000, seed in any::<u64>()) {
        let total: f64 = raw.iter().sum();
        prop_assume!(total > 1e-6);
        let p: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let counts = sample_multinomial(&p, m, &mut rng_from_seed(seed)).unwrap();
        prop_assert_eq!(counts.iter().sum::<u64>(), m);
        for (c, q) in counts.iter().zip(&p) {
            prop_assert!(*q > 0.0 || *c == 0);
        }
    }

    #[test]
    fn counts_csv_round_trip(l in 1usize..=3, n in 1usize..10, m in 1u64..500, seed in any::<u64>()) {
        let op = operator(l, n, seed);
        let recs = simulate_records(&state(op.dim(), 2, seed ^ 7), &op, m, derive_seed(seed, &[1])).unwrap();
        let mut buf = Vec::new();
        write_counts_csv(&recs, &mut buf).unwrap();
        prop_assert_eq!(read_counts_csv(buf.as_slice()).unwrap(), recs);
    }

    #[test]
    fn derived_seeds_are_stable(master in any::<u64>(), a in any::<u64>(), b in any::<u64>()) {
        prop_assert_eq!(derive_seed(master, &[a, b]), derive_seed(master, &[a, b]));
        prop_assume!(a != b);
        prop_assert_ne!(derive_seed(master, &[a]), derive_seed(master, &[b]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn least_squares_returns_a_state(l in 1usize..=3, n in 1usize..12, rank in 1usize..4, seed in any::<u64>()) {
        let op = operator(l, n, seed);
        let recs = simulate_records(&state(op.dim(), rank, seed ^ 8), &op, 50, seed).unwrap();
        let y = cstomo::measurement::frequencies_vector(&recs, op.ensemble()).unwrap();
        let res = ls_pg_estimate(&y, &op, &EstimatorOptions::default()).unwrap();
        prop_assert!((res.rho_hat.trace() - 1.0).abs() < 1e-10);
        prop_assert!(herm_eig(&res.rho_hat).unwrap().eigenvalues.iter().all(|&l| l >= -1e-10));
        prop_assert!(res.objective_trace.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-15));
    }
}
