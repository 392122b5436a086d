use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{Belief, Game};
use crate::solver::{solve_with_catalog, FacetCatalog, SolveOptions, SolveResult};
use crate::tol;

pub use crate::game::threshold_game;

#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionCurve {
    /// `V*(1), ..., V*(k_max)`.
    pub values: Vec<f64>,
    /// `V*(j+1) - V*(j)`.
    pub increments: Vec<f64>,
    pub results: Vec<SolveResult>,
}

impl PrecisionCurve {
    pub fn increments_increasing(&self) -> bool {
        self.increments.windows(2).all(|w| w[1] > w[0])
    }

    pub fn increments_decreasing(&self) -> bool {
        self.increments.windows(2).all(|w| w[1] < w[0])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdGameParams {
    pub pi_bar: f64,
}

impl ThresholdGameParams {
    pub fn new(pi_bar: f64) -> Result<Self> {
        if pi_bar > 1.0 / 3.0 && pi_bar < 1.0 {
            Ok(Self { pi_bar })
        } else {
            Err(Error::Domain(format!("pi_bar = {pi_bar} must lie in (1/3, 1)")))
        }
    }

    pub fn game(&self) -> Game {
        threshold_game(self.pi_bar).expect("validated on construction")
    }

    /// The extremal prior `(2 pi - 1, 1 - pi, 1 - pi)`.
    pub fn corner_prior(&self) -> Vec<f64> {
        let p = self.pi_bar;
        vec![2.0 * p - 1.0, 1.0 - p, 1.0 - p]
    }
}

/// Beliefs whose every coordinate strictly exceeds `1 - pi_bar`.
pub fn in_delta_c(pi_bar: f64, belief: &Belief) -> bool {
    belief.coords().iter().all(|&v| v > 1.0 - pi_bar + tol::BELIEF_SUM)
}

/// `(upper, lower) = ((2 pi - 1) / pi, 1 / (3 pi))`.
pub fn lemma7_bounds(pi_bar: f64) -> Result<(f64, f64)> {
    if !(pi_bar > 2.0 / 3.0 && pi_bar < 1.0) {
        return Err(Error::Domain(format!("pi_bar = {pi_bar} must lie in (2/3, 1)")));
    }
    Ok(((2.0 * pi_bar - 1.0) / pi_bar, 1.0 / (3.0 * pi_bar)))
}

pub fn value_curve(game: &Game, k_max: usize) -> Result<PrecisionCurve> {
    value_curve_with(game, k_max, &SolveOptions::default())
}

pub fn value_curve_with(game: &Game, k_max: usize, opts: &SolveOptions) -> Result<PrecisionCurve> {
    if k_max == 0 {
        return Err(Error::validation("kmax", "must be at least 1"));
    }
    let catalog = FacetCatalog::build(game);
    let results = (1..=k_max)
        .map(|k| solve_with_catalog(game, &catalog, k, opts))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = results.iter().map(|r| r.value).collect();
    let increments = values.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(PrecisionCurve {
        values,
        increments,
        results,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub holds: bool,
    /// `(2/k) V*(k) - (V*(k) - V*(k-1))`.
    pub slack: f64,
    pub value_k: f64,
    pub value_k_minus_1: f64,
}

/// Checks `V*(k) - V*(k-1) <= (2/k) V*(k)`, which needs strictly positive
/// sender payoffs.
pub fn check_theorem3_bound(game: &Game, k: usize) -> Result<BoundCheck> {
    if k < 3 {
        return Err(Error::Domain(format!("k = {k}; the bound is stated for k >= 3")));
    }
    let min = game.min_sender_payoff();
    if min <= 0.0 {
        return Err(Error::PreconditionUnmet(format!(
            "sender payoffs must be strictly positive (minimum {min})"
        )));
    }
    let catalog = FacetCatalog::build(game);
    let opts = SolveOptions::default();
    let vk = solve_with_catalog(game, &catalog, k, &opts)?.value;
    let vk1 = solve_with_catalog(game, &catalog, k - 1, &opts)?.value;
    let slack = 2.0 / k as f64 * vk - (vk - vk1);
    Ok(BoundCheck {
        holds: slack >= -tol::VALUE_TIE,
        slack,
        value_k: vk,
        value_k_minus_1: vk1,
    })
}

/// Interior points `(i, j, l) / grid` of the 2-simplex.
pub fn simplex_grid(grid: usize) -> Vec<Belief> {
    let mut out = Vec::new();
    for i in 1..grid {
        for j in 1..grid - i {
            let l = grid - i - j;
            let g = grid as f64;
            out.push(Belief::from_approx(vec![i as f64 / g, j as f64 / g, l as f64 / g]));
        }
    }
    out
}

/// `V*(k, mu)` at every interior grid prior of a three-state game.
pub fn value_surface(game: &Game, k: usize, grid: usize) -> Result<Vec<(Belief, f64)>> {
    if game.n_states() != 3 {
        return Err(Error::ScaleExceeded(format!(
            "surfaces need exactly 3 states, game has {}",
            game.n_states()
        )));
    }
    if grid < 3 {
        return Err(Error::validation("grid", "must be at least 3"));
    }
    let catalog = FacetCatalog::build(game);
    let opts = SolveOptions::default();
    simplex_grid(grid)
        .into_par_iter()
        .map(|mu| {
            let g = game.with_prior(mu.coords().to_vec())?;
            let v = solve_with_catalog(&g, &catalog, k, &opts)?.value;
            Ok((mu, v))
        })
        .collect()
}
