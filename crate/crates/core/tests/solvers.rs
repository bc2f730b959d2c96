use optk::experiment::{gen_gaussian_matrix, gen_gaussian_vector, gen_sparse_vector};
use optk::linalg::{nnz, objective};
use optk::operators::hard_threshold;
use optk::solvers::{relative_error, relaxed_threshold_point};
use optk::{
    check_recovery, solve, AlgorithmId, DenseMatrix, MatrixScaling, ProblemInstance, SolverConfig,
    Termination,
};

fn planted(m: usize, n: usize, k: usize, seed: u64) -> (DenseMatrix, Vec<f64>, Vec<f64>) {
    let a = gen_gaussian_matrix(m, n, seed, MatrixScaling::InvSqrtM);
    let x = gen_sparse_vector(n, k, seed.wrapping_add(1_000_003));
    let y = a.mat_vec(&x).unwrap();
    (a, x, y)
}

fn success_count(
    algo: AlgorithmId,
    m: usize,
    n: usize,
    k: usize,
    seeds: std::ops::Range<u64>,
) -> usize {
    seeds
        .filter(|&s| {
            let (a, x, y) = planted(m, n, k, s);
            let p = ProblemInstance::new(a, y, k).unwrap();
            let r = solve(algo, &p, &SolverConfig::default()).unwrap();
            check_recovery(&r.final_x, &x, 1e-3)
        })
        .count()
}

#[test]
fn tiny_instance_recovered_by_exact_and_relaxed_thresholding() {
    let (a, x, y) = planted(8, 12, 2, 21);
    let p = ProblemInstance::with_q(a, y, 2, 4).unwrap();
    for algo in [AlgorithmId::Pgot, AlgorithmId::Pgrot, AlgorithmId::Pgrotp] {
        let r = solve(algo, &p, &SolverConfig::default()).unwrap();
        let err = relative_error(&r.final_x, &x);
        assert!(err <= 1e-3, "{algo}: relative error {err}");
    }
}

#[test]
fn pgrotp_recovers_most_desk_instances() {
    assert!(success_count(AlgorithmId::Pgrotp, 100, 200, 10, 0..20) >= 16);
}

#[test]
fn baselines_recover_low_sparsity_desk_instances() {
    assert!(success_count(AlgorithmId::Iht, 100, 200, 5, 0..10) > 5);
    assert_eq!(success_count(AlgorithmId::Omp, 100, 200, 5, 0..5), 5);
    assert_eq!(success_count(AlgorithmId::Sp, 100, 200, 10, 0..5), 5);
}

#[test]
fn pursuit_step_never_loses_to_plain_thresholding() {
    let cfg = SolverConfig {
        record_iterates: true,
        ..SolverConfig::default()
    };
    for seed in 0..6 {
        let (a, _, mut y) = planted(30, 60, 9, 300 + seed);
        for (yi, e) in y.iter_mut().zip(gen_gaussian_vector(30, seed)) {
            *yi += 0.05 * e;
        }
        let p = ProblemInstance::new(a, y, 9).unwrap();
        let r = solve(AlgorithmId::Pgrotp, &p, &cfg).unwrap();
        for pair in r.iterates.windows(2) {
            let (v, _) = relaxed_threshold_point(&p, &pair[0], p.lambda, &cfg).unwrap();
            let plain = objective(&p.a, &p.y, &hard_threshold(&v, p.k).unwrap()).unwrap();
            let pursued = objective(&p.a, &p.y, &pair[1]).unwrap();
            assert!(
                pursued.value <= plain.value + 1e-10,
                "{} > {}",
                pursued.value,
                plain.value
            );
        }
    }
}

#[test]
fn full_gradient_ids_reproduce_q_equal_n_bitwise() {
    let cfg = SolverConfig {
        record_iterates: true,
        max_iterations: 15,
        ..SolverConfig::default()
    };
    let pairs = [
        (AlgorithmId::Pgot, AlgorithmId::Ot),
        (AlgorithmId::Pgrot, AlgorithmId::RotAlg),
        (AlgorithmId::Pgrotp, AlgorithmId::Rotp),
    ];
    for seed in 0..4 {
        let (a, _, y) = planted(7, 12, 2, 900 + seed);
        let p = ProblemInstance::with_q(a, y, 2, 12).unwrap();
        for (partial, full) in pairs {
            let lhs = solve(partial, &p, &cfg).unwrap();
            let rhs = solve(full, &p, &cfg).unwrap();
            let bits = |v: &Vec<Vec<f64>>| -> Vec<Vec<u64>> {
                v.iter()
                    .map(|x| x.iter().map(|e| e.to_bits()).collect())
                    .collect()
            };
            assert_eq!(
                bits(&lhs.iterates),
                bits(&rhs.iterates),
                "{partial} vs {full}"
            );
            assert_eq!(lhs.termination, rhs.termination);
        }
    }
}

#[test]
fn every_output_is_k_sparse_and_reported_recovery_is_genuine() {
    for seed in 0..3 {
        let (a, x, y) = planted(20, 40, 6, 500 + seed);
        let p = ProblemInstance::new(a, y, 6)
            .unwrap()
            .planted(x.clone())
            .unwrap();
        for algo in AlgorithmId::ALL {
            if matches!(algo, AlgorithmId::Pgot | AlgorithmId::Ot) {
                continue;
            }
            let r = solve(algo, &p, &SolverConfig::default()).unwrap();
            assert!(nnz(&r.final_x) <= 6, "{algo}");
            assert_eq!(r.trace.len(), r.iterations + 1);
            if r.termination == Termination::RecoveryCriterionMet {
                assert!(check_recovery(&r.final_x, &x, 1e-3), "{algo}");
            }
        }
    }
}

#[test]
fn exact_thresholding_respects_the_enumeration_guard() {
    let (a, _, y) = planted(20, 40, 6, 7);
    let p = ProblemInstance::with_q(a, y, 6, 12).unwrap();
    let cfg = SolverConfig {
        exhaustive_limit: 10_000,
        ..SolverConfig::default()
    };
    let err = solve(AlgorithmId::Pgot, &p, &cfg).unwrap_err();
    assert!(
        err.to_string().contains("instance too large for exact OP"),
        "{err}"
    );
}

#[test]
fn normalized_step_keeps_iht_stable_on_unscaled_matrices() {
    let a = gen_gaussian_matrix(60, 120, 4, MatrixScaling::Raw);
    let x = gen_sparse_vector(120, 4, 5);
    let y = a.mat_vec(&x).unwrap();
    let p = ProblemInstance::new(a, y, 4).unwrap();
    let cfg = SolverConfig {
        normalize_step: true,
        max_iterations: 500,
        ..SolverConfig::default()
    };
    let r = solve(AlgorithmId::Iht, &p, &cfg).unwrap();
    assert!(r.final_objective().is_finite());
    assert!(r.final_objective() < r.trace[0].objective);
}
