//! Fixed instances shared by the benchmarks.

use persuade_core::sample::random_game;
use persuade_core::Game;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `count` random games with `n` states and `m` actions, reproducible from `seed`.
pub fn random_games(seed: u64, count: usize, n: usize, m: usize) -> Vec<Game> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_game(&mut rng, n, m, (0.1, 1.0))).collect()
}
