use nalgebra::{DMatrix, DVector};
use oglp::sim::{init_graph, laplacian, laplacian_pinv, sample_signal, InitGraph, SignalConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const DRAWS: usize = 100_000;

fn graph(seed: u64) -> oglp::GraphVector {
    init_graph(
        &InitGraph::default(),
        5,
        &mut ChaCha8Rng::seed_from_u64(seed),
    )
    .unwrap()
}

#[test]
fn sample_covariance_matches_pseudo_inverse_plus_noise() {
    let w = graph(11);
    let cfg = SignalConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut cov = DMatrix::<f64>::zeros(5, 5);
    for _ in 0..DRAWS {
        let x = DVector::from_vec(sample_signal(&w, &cfg, &mut rng).unwrap());
        cov += &x * x.transpose();
    }
    cov /= DRAWS as f64;
    let expected = laplacian_pinv(&w, cfg.pseudo_inverse_tol)
        + DMatrix::identity(5, 5) * cfg.noise_sigma.powi(2);
    let rel = (&cov - &expected).norm() / expected.norm();
    assert!(rel <= 0.05, "relative Frobenius error {rel}");
}

#[test]
fn noiseless_signals_have_smoothness_equal_to_rank() {
    let w = graph(12);
    let cfg = SignalConfig {
        noise_sigma: 0.0,
        ..SignalConfig::default()
    };
    let l = laplacian(&w);
    let rank = l.rank(1e-9) as f64;
    assert_eq!(rank, 4.0);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut total = 0.0;
    for _ in 0..DRAWS {
        let x = DVector::from_vec(sample_signal(&w, &cfg, &mut rng).unwrap());
        total += (x.transpose() * &l * &x)[(0, 0)];
    }
    let mean = total / DRAWS as f64;
    assert!((mean - rank).abs() <= 0.1 * rank, "E[x'Lx] = {mean}");
}

#[test]
fn initial_graphs_are_connected() {
    for seed in 0..200 {
        assert!(graph(seed).is_connected(), "seed {seed}");
    }
}
