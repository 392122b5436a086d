use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::game::{
    expected_sender, sender_preferred_action, sender_value, Belief, Game, InformationStructure,
};
use crate::linalg::{affine_rank, null_vector};
use crate::regions::{build_regions, ActionRegion};
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightSolution {
    pub weights: Vec<f64>,
    /// Euclidean norm of `[support; 1] w - [prior; 1]`.
    pub residual: f64,
}

pub fn is_affinely_independent(support: &[Belief]) -> bool {
    match support.first() {
        None => false,
        Some(b) if support.len() > b.dim() => false,
        Some(_) => affine_rank(support, tol::AFFINE_RANK) == Some(support.len() - 1),
    }
}

/// Unique convex weights expressing `prior` over an affinely independent support.
pub fn choquet_weights(support: &[Belief], prior: &Belief) -> Result<WeightSolution> {
    if !is_affinely_independent(support) {
        return Err(Error::NotAffinelyIndependent);
    }
    let n = prior.dim();
    let k = support.len();
    let a = DMatrix::from_fn(n + 1, k, |r, c| if r < n { support[c].coords()[r] } else { 1.0 });
    let mut rhs: Vec<f64> = prior.coords().to_vec();
    rhs.push(1.0);
    let b = DVector::from_vec(rhs);
    let w = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::Infeasible(e.to_string()))?;
    let residual = (&a * &w - &b).norm();
    if residual >= tol::PLAUSIBILITY {
        return Err(Error::Infeasible(format!(
            "prior outside the affine hull of the support (residual {residual:.3e})"
        )));
    }
    if let Some(bad) = w.iter().find(|&&x| x < tol::NEGATIVE_WEIGHT) {
        return Err(Error::Infeasible(format!(
            "prior outside the convex hull of the support (weight {bad:.3e})"
        )));
    }
    Ok(WeightSolution {
        weights: w.iter().map(|&x| x.max(0.0)).collect(),
        residual,
    })
}

/// Pushes every support belief lying in the interior of its action region
/// along the ray from the prior until it reaches the region boundary (outward
/// or inward, whichever gives the larger expected sender value; ties favour
/// the point nearer the prior). Points are visited in support order.
///
/// If the inward move reaches the prior itself the structure collapses to the
/// uninformative one.
pub fn project_to_boundary(game: &Game, tau: &InformationStructure) -> Result<InformationStructure> {
    tau.check_plausible(game.prior())?;
    let regions = build_regions(game);
    let mut cur = tau.clone();
    let mu0 = game.prior().coords().to_vec();
    for k in 0..cur.len() {
        let belief = cur.support[k].clone();
        let a = sender_preferred_action(game, &belief);
        let region = &regions[a];
        if !strictly_inside(region, &belief) {
            continue;
        }
        let d: Vec<f64> = belief.coords().iter().zip(&mu0).map(|(x, y)| x - y).collect();
        if d.iter().all(|v| v.abs() <= tol::ZERO_WEIGHT) {
            continue;
        }
        let (t_lo, t_hi) = ray_range(region, &mu0, &d);
        let tk = cur.weights[k];
        let before = expected_sender(game, &cur);
        let mut best: Option<(f64, f64, InformationStructure)> = None;
        for t in [t_lo, t_hi] {
            let candidate = move_point(&cur, k, &mu0, &d, t, tk);
            let v = expected_sender(game, &candidate);
            let better = match &best {
                None => true,
                Some((bv, bt, _)) => {
                    v > bv + tol::VALUE_TIE || ((v - bv).abs() <= tol::VALUE_TIE && t.abs() < bt.abs())
                }
            };
            if better {
                best = Some((v, t, candidate));
            }
        }
        let (v, _, candidate) = best.expect("two candidates");
        if v >= before - tol::VALUE_TIE {
            cur = candidate;
            if cur.len() == 1 {
                break;
            }
        }
    }
    Ok(cur)
}

fn strictly_inside(region: &ActionRegion, belief: &Belief) -> bool {
    region.is_full_dimensional()
        && region
            .halfspaces()
            .iter()
            .all(|h| h.slack(belief.coords()) > tol::MEMBERSHIP)
}

/// Parameter interval `[t_lo, t_hi]` of `mu0 + t d` inside the region, with
/// `t_lo` clipped at zero (negative `t` would need negative weights).
fn ray_range(region: &ActionRegion, mu0: &[f64], d: &[f64]) -> (f64, f64) {
    let mut lo: f64 = 0.0;
    let mut hi = f64::INFINITY;
    for h in region.halfspaces() {
        let base = h.slack(mu0);
        let rate: f64 = h.normal.iter().zip(d).map(|(a, b)| a * b).sum();
        if rate.abs() <= 1e-15 {
            continue;
        }
        let t = -base / rate;
        if rate < 0.0 {
            hi = hi.min(t);
        } else {
            lo = lo.max(t);
        }
    }
    (lo, hi)
}

/// Replaces point `k` by `mu0 + t d` and rescales the others so the structure
/// stays plausible: `c = t / (t + tau_k (1 - t))`, new `tau_k = tau_k / (t + tau_k (1 - t))`.
fn move_point(
    tau: &InformationStructure,
    k: usize,
    mu0: &[f64],
    d: &[f64],
    t: f64,
    tk: f64,
) -> InformationStructure {
    let denom = t + tk * (1.0 - t);
    let c = t / denom;
    let new_k = tk / denom;
    if c <= tol::ZERO_WEIGHT {
        return InformationStructure {
            support: vec![Belief::from_approx(mu0.to_vec())],
            weights: vec![1.0],
        };
    }
    let point: Vec<f64> = mu0.iter().zip(d).map(|(m, di)| m + t * di).collect();
    let mut support = tau.support.clone();
    support[k] = Belief::from_approx(point);
    let weights = tau
        .weights
        .iter()
        .enumerate()
        .map(|(i, &w)| if i == k { new_k } else { c * w })
        .collect();
    InformationStructure { support, weights }
}

/// Removes beliefs until the support is affinely independent, each step
/// shifting weight along the affine dependence `lambda` so that exactly one
/// weight hits zero, in whichever direction does not lower the sender value.
pub fn reduce_affinely_dependent(
    game: &Game,
    tau: &InformationStructure,
) -> Result<InformationStructure> {
    tau.check_plausible(game.prior())?;
    let mut cur = merge_duplicates(tau);
    while !is_affinely_independent(&cur.support) {
        let n = game.n_states();
        let k = cur.len();
        let m = DMatrix::from_fn(n + 1, k, |r, c| if r < n { cur.support[c].coords()[r] } else { 1.0 });
        let lambda = null_vector(&m);
        let values: Vec<f64> = cur.support.iter().map(|b| sender_value(game, b)).collect();

        // theta > 0 drops p* (min tau/lambda over lambda > 0);
        // theta < 0 drops j* (max tau/lambda over lambda < 0)
        let mut pos: Option<(usize, f64)> = None;
        let mut neg: Option<(usize, f64)> = None;
        for (i, (&l, &w)) in lambda.iter().zip(&cur.weights).enumerate() {
            if l > 1e-12 {
                let r = w / l;
                if pos.is_none_or(|(_, best)| r < best) {
                    pos = Some((i, r));
                }
            } else if l < -1e-12 {
                let r = w / l;
                if neg.is_none_or(|(_, best)| r > best) {
                    neg = Some((i, r));
                }
            }
        }
        let slope: f64 = lambda.iter().zip(&values).map(|(l, v)| l * v).sum();
        let gain = |theta: f64| -theta * slope;
        let (drop, theta) = match (pos, neg) {
            (Some(p), Some(j)) => {
                if gain(j.1) > gain(p.1) + tol::VALUE_TIE {
                    j
                } else {
                    p
                }
            }
            (Some(p), None) => p,
            (None, Some(j)) => j,
            (None, None) => break,
        };
        let mut support = Vec::with_capacity(k - 1);
        let mut weights = Vec::with_capacity(k - 1);
        for (i, (b, l)) in cur.support.iter().zip(&lambda).enumerate() {
            if i == drop {
                continue;
            }
            let w = cur.weights[i] - theta * l;
            if w > tol::ZERO_WEIGHT {
                support.push(b.clone());
                weights.push(w);
            }
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        cur = InformationStructure { support, weights };
    }
    Ok(cur)
}

fn merge_duplicates(tau: &InformationStructure) -> InformationStructure {
    let mut support: Vec<Belief> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for (b, &w) in tau.support.iter().zip(&tau.weights) {
        match support.iter().position(|s| s.max_distance(b) <= tol::ZERO_WEIGHT) {
            Some(i) => weights[i] += w,
            None => {
                support.push(b.clone());
                weights.push(w);
            }
        }
    }
    InformationStructure { support, weights }
}

/// Replaces beliefs `i` and `j` by their weighted mixture, placed at the
/// lower of the two positions.
pub fn collapse_pair(tau: &InformationStructure, i: usize, j: usize) -> Result<InformationStructure> {
    if i == j || i >= tau.len() || j >= tau.len() {
        return Err(Error::validation(
            "indices",
            format!("need two distinct indices below {}, got {i} and {j}", tau.len()),
        ));
    }
    let (lo, hi) = (i.min(j), i.max(j));
    let (wi, wj) = (tau.weights[lo], tau.weights[hi]);
    let w = wi + wj;
    let mixed: Vec<f64> = tau.support[lo]
        .coords()
        .iter()
        .zip(tau.support[hi].coords())
        .map(|(a, b)| (wi * a + wj * b) / w)
        .collect();
    let mut support = tau.support.clone();
    let mut weights = tau.weights.clone();
    support[lo] = Belief::from_approx(mixed);
    weights[lo] = w;
    support.remove(hi);
    weights.remove(hi);
    Ok(InformationStructure { support, weights })
}
