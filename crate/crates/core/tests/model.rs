use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specmel_core::dsp::SpectrogramKind;
use specmel_core::model::{gradient, objective, train, CellId, LinearParams, TrainConfig};

/// Central finite differences of the objective, h = 1e-5.
fn numeric_gradient(p: &LinearParams, xs: &[&[f64]], ys: &[bool], l2: f64) -> LinearParams {
    let h = 1e-5;
    let f = |q: &LinearParams| objective(q, xs, ys, l2).unwrap();
    let weights = (0..p.weights.len())
        .map(|j| {
            let (mut up, mut dn) = (p.clone(), p.clone());
            up.weights[j] += h;
            dn.weights[j] -= h;
            (f(&up) - f(&dn)) / (2.0 * h)
        })
        .collect();
    let (mut up, mut dn) = (p.clone(), p.clone());
    up.bias += h;
    dn.bias -= h;
    LinearParams { weights, bias: (f(&up) - f(&dn)) / (2.0 * h) }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-4 * a.abs().max(b.abs()).max(1e-3)
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for case in 0..100 {
        let dim = rng.random_range(1..8);
        let n = rng.random_range(1..20);
        let p = LinearParams {
            weights: (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect(),
            bias: rng.random_range(-1.0..1.0),
        };
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
        let xs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        let ys: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        let l2 = if case % 2 == 0 { 0.0 } else { rng.random_range(0.0..0.5) };
        let a = gradient(&p, &xs, &ys, l2).unwrap();
        let num = numeric_gradient(&p, &xs, &ys, l2);
        for (x, y) in a.weights.iter().zip(&num.weights) {
            assert!(close(*x, *y), "case {case}: {x} vs {y}");
        }
        assert!(close(a.bias, num.bias), "case {case}: bias {} vs {}", a.bias, num.bias);
    }
}

#[test]
fn full_batch_small_step_loss_does_not_increase() {
    let features: Vec<Vec<f64>> = (0..40)
        .map(|i| {
            let t = i as f64;
            vec![(t * 0.37).sin(), (t * 0.11).cos() * 2.0, t / 40.0]
        })
        .collect();
    let labels: Vec<bool> = (0..40).map(|i| ((i as f64) * 0.37).sin() + 0.2 > 0.0).collect();
    let config = TrainConfig { learning_rate: 1e-3, epochs: 300, batch_size: 40, l2: 1e-4, seed: 9 };
    let out = train(
        CellId::new("Rock", SpectrogramKind::Linear, "b32"),
        &features,
        &labels,
        &(0..40).collect::<Vec<_>>(),
        &config,
    )
    .unwrap();
    for w in out.loss_history.windows(2) {
        assert!(w[1] <= w[0] + 1e-9, "{} -> {}", w[0], w[1]);
    }
    assert!(out.loss_history.last().unwrap() < out.loss_history.first().unwrap());
}

proptest! {
    #[test]
    fn full_batch_gradient_is_order_free(
        rows in prop::collection::vec((prop::collection::vec(-3.0f64..3.0, 3), any::<bool>()), 1..30),
        seed in any::<u64>(),
    ) {
        let p = LinearParams { weights: vec![0.3, -1.1, 0.7], bias: 0.2 };
        let xs: Vec<&[f64]> = rows.iter().map(|(x, _)| x.as_slice()).collect();
        let ys: Vec<bool> = rows.iter().map(|(_, y)| *y).collect();
        let a = gradient(&p, &xs, &ys, 0.01).unwrap();

        let mut order: Vec<usize> = (0..rows.len()).collect();
        use rand::seq::SliceRandom;
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let xs2: Vec<&[f64]> = order.iter().map(|&i| xs[i]).collect();
        let ys2: Vec<bool> = order.iter().map(|&i| ys[i]).collect();
        let b = gradient(&p, &xs2, &ys2, 0.01).unwrap();
        for (u, v) in a.weights.iter().zip(&b.weights) {
            prop_assert!((u - v).abs() <= 1e-12);
        }
        prop_assert!((a.bias - b.bias).abs() <= 1e-12);
    }

    #[test]
    fn training_is_deterministic(seed in any::<u64>()) {
        let features: Vec<Vec<f64>> = (0..20).map(|i| vec![(i as f64).sqrt(), ((i * 7) % 5) as f64]).collect();
        let labels: Vec<bool> = (0..20).map(|i| i % 4 == 0).collect();
        let config = TrainConfig { epochs: 20, seed, ..TrainConfig::default() };
        let cell = CellId::new("Pop", SpectrogramKind::Mel, "b64");
        let subset: Vec<usize> = (0..20).collect();
        let a = train(cell.clone(), &features, &labels, &subset, &config).unwrap();
        let b = train(cell, &features, &labels, &subset, &config).unwrap();
        prop_assert_eq!(a, b);
    }
}
