//! Naive verifiers that share no code with the solver or the partition
//! optimizer. Supports are built from explicit candidate points, so their
//! quality depends on `resolution`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::continuum::ContinuumProblem;
use crate::error::{Error, Result};
use crate::game::{Belief, Game, InformationStructure};

pub const MAX_STATES: usize = 4;
pub const MAX_SIGNALS: usize = 3;
pub const MAX_RESOLUTION: usize = 80;

const TIE: f64 = 1e-9;
const ON_SIMPLEX: f64 = 1e-10;

/// Receiver best response with sender-preferred ties, evaluated from scratch.
fn payoff_at(game: &Game, mu: &[f64]) -> f64 {
    let dot = |row: &[f64]| row.iter().zip(mu).map(|(a, b)| a * b).sum::<f64>();
    let r: Vec<f64> = game.receiver_payoffs().iter().map(|row| dot(row)).collect();
    let best = r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (0..game.n_actions())
        .filter(|&a| r[a] >= best - TIE)
        .map(|a| dot(game.sender_row(a)))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn receiver_set(game: &Game, mu: &[f64]) -> Vec<usize> {
    let r: Vec<f64> = game
        .receiver_payoffs()
        .iter()
        .map(|row| row.iter().zip(mu).map(|(a, b)| a * b).sum())
        .collect();
    let best = r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (0..r.len()).filter(|&a| r[a] >= best - TIE).collect()
}

/// `h . mu = 0` for every pair of actions and every coordinate face.
fn hyperplanes(game: &Game) -> Vec<Vec<f64>> {
    let n = game.n_states();
    let u = game.receiver_payoffs();
    let mut out = Vec::new();
    for a in 0..u.len() {
        for b in a + 1..u.len() {
            let h: Vec<f64> = u[a].iter().zip(&u[b]).map(|(x, y)| x - y).collect();
            let mean = h.iter().sum::<f64>() / n as f64;
            // constant on the simplex: never a boundary
            if h.iter().all(|v| (v - mean).abs() < 1e-12) {
                continue;
            }
            out.push(h);
        }
    }
    for j in 0..n {
        let mut h = vec![0.0; n];
        h[j] = 1.0;
        out.push(h);
    }
    out
}

fn in_simplex(mu: &[f64]) -> bool {
    mu.iter().all(|&v| v >= -ON_SIMPLEX) && (mu.iter().sum::<f64>() - 1.0).abs() < 1e-9
}

fn clean(mu: &[f64]) -> Vec<f64> {
    let v: Vec<f64> = mu.iter().map(|x| x.max(0.0)).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

/// Receiver indifference between two best actions, or a simplex face.
fn on_boundary(game: &Game, mu: &[f64]) -> bool {
    receiver_set(game, mu).len() > 1 || mu.iter().any(|&v| v <= ON_SIMPLEX)
}

fn all_compositions(n: usize, total: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in all_compositions(n - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Vertices of the arrangement: all `(n-1)`-subsets of hyperplanes plus the
/// simplex equation, solved by LU when nonsingular.
fn arrangement_vertices(game: &Game, planes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = game.n_states();
    let mut out = Vec::new();
    for idx in subsets(planes.len(), n - 1) {
        let mut m = DMatrix::zeros(n, n);
        let mut rhs = DVector::zeros(n);
        for (r, &i) in idx.iter().enumerate() {
            for c in 0..n {
                m[(r, c)] = planes[i][c];
            }
        }
        for c in 0..n {
            m[(n - 1, c)] = 1.0;
        }
        rhs[n - 1] = 1.0;
        if m.determinant().abs() < 1e-12 {
            continue;
        }
        if let Some(x) = m.lu().solve(&rhs) {
            let x: Vec<f64> = x.iter().cloned().collect();
            if in_simplex(&x) && on_boundary(game, &clean(&x)) {
                out.push(clean(&x));
            }
        }
    }
    out
}

/// Crossings of each hyperplane with the grid lines `g + t (e_a - e_b)`,
/// plus grid points lying on the simplex boundary.
fn grid_candidates(game: &Game, planes: &[Vec<f64>], resolution: usize) -> Vec<Vec<f64>> {
    let n = game.n_states();
    let step = 1.0 / resolution as f64;
    let mut out = Vec::new();
    for comp in all_compositions(n, resolution) {
        let g: Vec<f64> = comp.iter().map(|&c| c as f64 * step).collect();
        if comp.contains(&0) {
            out.push(g.clone());
        }
        for a in 0..n {
            for b in 0..n {
                if a == b || comp[b] == 0 {
                    continue;
                }
                for h in planes {
                    let slope = h[a] - h[b];
                    if slope.abs() < 1e-14 {
                        continue;
                    }
                    let t = -h.iter().zip(&g).map(|(x, y)| x * y).sum::<f64>() / slope;
                    if t > 0.0 && t < step {
                        let mut p = g.clone();
                        p[a] += t;
                        p[b] -= t;
                        if in_simplex(&p) && on_boundary(game, &p) {
                            out.push(clean(&p));
                        }
                    }
                }
            }
        }
    }
    out
}

fn dedup(mut pts: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() < 1e-12));
    pts
}

/// Candidate support points: arrangement vertices and boundary grid points.
pub fn candidate_points(game: &Game, resolution: usize) -> Vec<Vec<f64>> {
    let planes = hyperplanes(game);
    let mut pts = arrangement_vertices(game, &planes);
    pts.extend(grid_candidates(game, &planes, resolution));
    dedup(pts)
}

/// Points where the ray `from + s (through - from)`, `s > 1`, meets a
/// hyperplane or leaves the simplex.
fn ray_hits(planes: &[Vec<f64>], from: &[f64], through: &[f64]) -> Vec<(f64, Vec<f64>)> {
    let d: Vec<f64> = through.iter().zip(from).map(|(a, b)| a - b).collect();
    let mut out = Vec::new();
    for h in planes {
        let hd: f64 = h.iter().zip(&d).map(|(x, y)| x * y).sum();
        if hd.abs() < 1e-14 {
            continue;
        }
        let hf: f64 = h.iter().zip(from).map(|(x, y)| x * y).sum();
        let s = -hf / hd;
        if s > 1.0 + 1e-12 {
            let p: Vec<f64> = from.iter().zip(&d).map(|(f, di)| f + s * di).collect();
            if in_simplex(&p) {
                out.push((s, clean(&p)));
            }
        }
    }
    out
}

#[derive(Clone)]
struct Best {
    value: f64,
    support: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl Best {
    fn consider(&mut self, value: f64, support: Vec<Vec<f64>>, weights: Vec<f64>) {
        if value > self.value + TIE || (value > self.value - TIE && support.len() < self.support.len()) {
            *self = Best {
                value,
                support,
                weights,
            };
        }
    }

    fn merge(mut self, other: Best) -> Best {
        self.consider(other.value, other.support, other.weights);
        self
    }
}

/// Two-point structure `{p, q}` where `q` lies on the ray from `p` through
/// the prior at parameter `s`: weights `(1 - 1/s, 1/s)`.
fn ray_pairs(game: &Game, planes: &[Vec<f64>], p: &[f64], prior: &[f64], best: &mut Best) {
    for (s, q) in ray_hits(planes, p, prior) {
        let wq = 1.0 / s;
        let wp = 1.0 - wq;
        if wp <= 1e-12 {
            continue;
        }
        let v = wp * payoff_at(game, p) + wq * payoff_at(game, &q);
        best.consider(v, vec![p.to_vec(), q], vec![wp, wq]);
    }
}

/// Barycentric weights of `prior` over an affinely independent triple of
/// 3-state beliefs; `None` if singular or the prior lies outside.
fn triangle_weights(pts: [&[f64]; 3], prior: &[f64]) -> Option<Vec<f64>> {
    let m = DMatrix::from_fn(3, 3, |r, c| pts[c][r]);
    if m.determinant().abs() < 1e-12 {
        return None;
    }
    let w = m.lu().solve(&DVector::from_column_slice(prior))?;
    if w.iter().all(|&x| x > 1e-12) {
        Some(w.iter().cloned().collect())
    } else {
        None
    }
}

/// Exhaustive search over supports drawn from [`candidate_points`] (with
/// partners found on rays through the prior). Returns the best structure of
/// size at most `k`.
pub fn brute_force_solve(game: &Game, k: usize, resolution: usize) -> Result<(f64, InformationStructure)> {
    let n = game.n_states();
    if n > MAX_STATES || k > MAX_SIGNALS || resolution > MAX_RESOLUTION {
        return Err(Error::ScaleExceeded(format!(
            "oracle limited to n <= {MAX_STATES}, k <= {MAX_SIGNALS}, resolution <= {MAX_RESOLUTION}"
        )));
    }
    if k == 0 || resolution == 0 {
        return Err(Error::validation("k", "k and resolution must be positive"));
    }
    let prior = game.prior().coords().to_vec();
    let mut best = Best {
        value: payoff_at(game, &prior),
        support: vec![prior.clone()],
        weights: vec![1.0],
    };
    if k >= 2 {
        let planes = hyperplanes(game);
        let cands = candidate_points(game, resolution);
        let found = cands
            .par_iter()
            .fold(
                || best.clone(),
                |mut acc, p| {
                    ray_pairs(game, &planes, p, &prior, &mut acc);
                    acc
                },
            )
            .reduce(|| best.clone(), Best::merge);
        best = best.merge(found);
        if k >= 3 {
            let found = if n == 3 {
                triples(game, &cands, &prior, &best)
            } else {
                pair_rays(game, &planes, &cands, &prior, resolution, &best)
            };
            best = best.merge(found);
        }
    }
    let support = best.support.into_iter().map(Belief::from_approx).collect();
    let tau = InformationStructure::new(support, best.weights)?;
    Ok((best.value, tau))
}

fn triples(game: &Game, cands: &[Vec<f64>], prior: &[f64], seed: &Best) -> Best {
    let vals: Vec<f64> = cands.iter().map(|p| payoff_at(game, p)).collect();
    (0..cands.len())
        .into_par_iter()
        .fold(
            || seed.clone(),
            |mut acc, i| {
                for j in i + 1..cands.len() {
                    for l in j + 1..cands.len() {
                        if let Some(w) = triangle_weights([&cands[i], &cands[j], &cands[l]], prior) {
                            let v = w[0] * vals[i] + w[1] * vals[j] + w[2] * vals[l];
                            if v > acc.value + TIE {
                                acc.consider(v, vec![cands[i].clone(), cands[j].clone(), cands[l].clone()], w);
                            }
                        }
                    }
                }
                acc
            },
        )
        .reduce(|| seed.clone(), Best::merge)
}

/// Three-point structures for `n = 4`: a candidate pair mixed at `alpha` on a
/// grid, then a third point on the ray from the mixture through the prior.
fn pair_rays(
    game: &Game,
    planes: &[Vec<f64>],
    cands: &[Vec<f64>],
    prior: &[f64],
    resolution: usize,
    seed: &Best,
) -> Best {
    let vals: Vec<f64> = cands.iter().map(|p| payoff_at(game, p)).collect();
    (0..cands.len())
        .into_par_iter()
        .fold(
            || seed.clone(),
            |mut acc, i| {
                for j in i + 1..cands.len() {
                    for step in 1..resolution {
                        let alpha = step as f64 / resolution as f64;
                        let c: Vec<f64> = cands[i]
                            .iter()
                            .zip(&cands[j])
                            .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
                            .collect();
                        let base = alpha * vals[i] + (1.0 - alpha) * vals[j];
                        for (s, r) in ray_hits(planes, &c, prior) {
                            let wr = 1.0 / s;
                            let wc = 1.0 - wr;
                            let v = wc * base + wr * payoff_at(game, &r);
                            if v > acc.value + TIE {
                                acc.consider(
                                    v,
                                    vec![cands[i].clone(), cands[j].clone(), r],
                                    vec![wc * alpha, wc * (1.0 - alpha), wr],
                                );
                            }
                        }
                    }
                }
                acc
            },
        )
        .reduce(|| seed.clone(), Best::merge)
}

/// Discretization allowance for comparing against [`brute_force_solve`]: the
/// largest spread of a sender payoff row across states, times two support
/// points, times the grid spacing.
pub fn lipschitz_gap(game: &Game, resolution: usize) -> f64 {
    let spread = (0..game.n_actions())
        .map(|a| {
            let row = game.sender_row(a);
            let hi = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = row.iter().cloned().fold(f64::INFINITY, f64::min);
            hi - lo
        })
        .fold(0.0, f64::max);
    2.0 * spread / resolution as f64
}

/// Best value over partitions whose breakpoints lie on the grid `i /
/// resolution`, using at most `k` cells. Integrals of the CDF come from a
/// composite Simpson rule on each grid cell.
pub fn brute_force_partition(problem: &ContinuumProblem, k: usize, resolution: usize) -> Result<f64> {
    if k == 0 || k > MAX_SIGNALS {
        return Err(Error::ScaleExceeded(format!("partition oracle limited to 1 <= k <= {MAX_SIGNALS}")));
    }
    if resolution < 2 {
        return Err(Error::validation("resolution", "must be at least 2"));
    }
    let f = |x: f64| problem.prior.cdf(x);
    let xs: Vec<f64> = (0..=resolution).map(|i| i as f64 / resolution as f64).collect();
    let mut cum = vec![0.0; resolution + 1];
    const PANELS: usize = 64;
    for i in 0..resolution {
        let (a, b) = (xs[i], xs[i + 1]);
        let h = (b - a) / PANELS as f64;
        let mut s = f(a) + f(b);
        for p in 1..PANELS {
            s += f(a + p as f64 * h) * if p % 2 == 1 { 4.0 } else { 2.0 };
        }
        cum[i + 1] = cum[i] + s * h / 3.0;
    }
    let cell_value = |i: usize, j: usize| -> Option<f64> {
        let (fa, fb) = (f(xs[i]), f(xs[j]));
        let mass = fb - fa;
        if mass <= 1e-15 {
            return None;
        }
        let mean = (xs[j] * fb - xs[i] * fa - (cum[j] - cum[i])) / mass;
        let mut action = problem.cutoffs.iter().filter(|&&g| mean > g + TIE).count();
        if let Some(c) = problem.cutoffs.iter().position(|&g| (mean - g).abs() <= TIE) {
            action = if problem.utilities[c + 1] >= problem.utilities[c] { c + 1 } else { c };
        }
        Some(mass * problem.utilities[action])
    };
    let r = resolution;
    let mut best = cell_value(0, r).unwrap_or(f64::NEG_INFINITY);
    if k >= 2 {
        for i in 1..r {
            if let (Some(a), Some(b)) = (cell_value(0, i), cell_value(i, r)) {
                best = best.max(a + b);
            }
        }
    }
    if k >= 3 {
        let third = (1..r)
            .into_par_iter()
            .map(|i| {
                let mut local = f64::NEG_INFINITY;
                for j in i + 1..r {
                    if let (Some(a), Some(b), Some(c)) = (cell_value(0, i), cell_value(i, j), cell_value(j, r)) {
                        local = local.max(a + b + c);
                    }
                }
                local
            })
            .reduce(|| f64::NEG_INFINITY, f64::max);
        best = best.max(third);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuum::ContinuumPrior;
    use crate::game::{financial_game, sender_value, threshold_game};

    #[test]
    fn financial_pair() {
        let (v, tau) = brute_force_solve(&financial_game(), 2, 70).unwrap();
        assert!((0.29..=0.31).contains(&v), "{v}");
        assert!(tau.plausibility_residual(financial_game().prior()) < 1e-9);
    }

    #[test]
    fn threshold_pair() {
        let (v, _) = brute_force_solve(&threshold_game(0.8).unwrap(), 2, 60).unwrap();
        assert!((0.405..=0.42).contains(&v), "{v}");
    }

    #[test]
    fn single_signal_is_prior_value() {
        let g = financial_game();
        let (v, tau) = brute_force_solve(&g, 1, 10).unwrap();
        assert_eq!(v, sender_value(&g, g.prior()));
        assert_eq!(tau.len(), 1);
    }

    #[test]
    fn three_signals_reach_vertices() {
        let (v, _) = brute_force_solve(&financial_game(), 3, 10).unwrap();
        assert!((v - 0.42).abs() < 1e-9, "{v}");
    }

    #[test]
    fn scale_limits() {
        let g = financial_game();
        assert!(matches!(brute_force_solve(&g, 4, 10), Err(Error::ScaleExceeded(_))));
        assert!(matches!(brute_force_solve(&g, 2, 81), Err(Error::ScaleExceeded(_))));
    }

    #[test]
    fn partition_grid() {
        let p = ContinuumProblem::new(ContinuumPrior::Uniform, vec![0.6], vec![0.0, 1.0]).unwrap();
        let v = brute_force_partition(&p, 2, 200).unwrap();
        assert!((v - 0.8).abs() < 0.005, "{v}");
        assert_eq!(brute_force_partition(&p, 1, 200).unwrap(), 0.0);
        let q = ContinuumProblem::new(ContinuumPrior::Uniform, vec![0.5], vec![0.0, 1.0]).unwrap();
        assert_eq!(brute_force_partition(&q, 2, 50).unwrap(), 1.0);
        assert!(matches!(brute_force_partition(&p, 4, 50), Err(Error::ScaleExceeded(_))));
    }
}
