//! Random instances for property tests, benchmarks and the CLI.

use rand::Rng;

use crate::game::{Belief, Game, InformationStructure, SenderPayoffs};

/// Point drawn uniformly from the simplex (normalized exponentials).
pub fn random_belief<R: Rng>(rng: &mut R, n: usize) -> Belief {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    Belief::from_approx(raw)
}

/// Interior point with every coordinate at least `floor`.
pub fn random_interior_belief<R: Rng>(rng: &mut R, n: usize, floor: f64) -> Belief {
    let b = random_belief(rng, n);
    let scale = 1.0 - n as f64 * floor;
    Belief::from_approx(b.coords().iter().map(|v| floor + scale * v).collect())
}

/// Matrix-mode game with receiver payoffs uniform in `[-1, 1]`, sender
/// payoffs uniform in `sender_range`, and a random interior prior.
pub fn random_game<R: Rng>(rng: &mut R, n: usize, m: usize, sender_range: (f64, f64)) -> Game {
    let receiver = (0..m)
        .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let sender = (0..m)
        .map(|_| (0..n).map(|_| rng.random_range(sender_range.0..sender_range.1)).collect())
        .collect();
    let prior = random_interior_belief(rng, n, 0.05);
    Game::new(
        (0..n).map(|i| format!("w{i}")).collect(),
        (0..m).map(|i| format!("a{i}")).collect(),
        receiver,
        SenderPayoffs::Matrix(sender),
        prior.coords().to_vec(),
    )
    .expect("random game is well formed")
}

/// Random Bayes-plausible structure with `size` beliefs: `size - 1` random
/// beliefs mixed into `c`, and a last belief on the far side of the prior.
pub fn random_structure<R: Rng>(rng: &mut R, prior: &Belief, size: usize) -> InformationStructure {
    let n = prior.dim();
    if size <= 1 {
        return InformationStructure::no_information(prior);
    }
    loop {
        let pts: Vec<Belief> = (0..size - 1).map(|_| random_belief(rng, n)).collect();
        let mix = random_belief(rng, size - 1);
        let mut c = vec![0.0; n];
        for (a, p) in mix.coords().iter().zip(&pts) {
            for (cj, pj) in c.iter_mut().zip(p.coords()) {
                *cj += a * pj;
            }
        }
        let dir: Vec<f64> = prior.coords().iter().zip(&c).map(|(p, q)| p - q).collect();
        let s_max = prior
            .coords()
            .iter()
            .zip(&dir)
            .filter(|(_, d)| **d < 0.0)
            .map(|(p, d)| -p / d)
            .fold(f64::INFINITY, f64::min);
        if !s_max.is_finite() || s_max <= 1e-6 {
            continue;
        }
        let s = s_max * rng.random_range(0.05..1.0);
        let tail = Belief::from_approx(prior.coords().iter().zip(&dir).map(|(p, d)| p + s * d).collect());
        let mut support = pts;
        let mut weights: Vec<f64> = mix.coords().iter().map(|a| a * s / (1.0 + s)).collect();
        support.push(tail);
        weights.push(1.0 / (1.0 + s));
        if weights.iter().all(|w| *w > 1e-9) {
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
            return InformationStructure { support, weights };
        }
    }
}
