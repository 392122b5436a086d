use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

/// A point of the probability simplex over states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Belief(Vec<f64>);

impl Belief {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::validation("belief", "needs at least two states"));
        }
        if let Some(bad) = coords.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::validation("belief", format!("coordinate {bad} outside [0, 1]")));
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > tol::BELIEF_SUM {
            return Err(Error::validation("belief", format!("coordinates sum to {sum}")));
        }
        Ok(Belief(coords))
    }

    /// Clamps rounding noise (tiny negatives, sum drift) from computed points.
    pub fn from_approx(mut coords: Vec<f64>) -> Self {
        for v in coords.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let sum: f64 = coords.iter().sum();
        assert!(sum > 0.0, "belief with no mass");
        for v in coords.iter_mut() {
            *v /= sum;
        }
        Belief(coords)
    }

    pub fn uniform(n: usize) -> Self {
        Belief(vec![1.0 / n as f64; n])
    }

    pub fn vertex(n: usize, i: usize) -> Self {
        let mut c = vec![0.0; n];
        c[i] = 1.0;
        Belief(c)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_interior(&self) -> bool {
        self.0.iter().all(|&v| v > 0.0)
    }

    pub fn max_distance(&self, other: &Belief) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl AsRef<[f64]> for Belief {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SenderPayoffs {
    /// `m x n` table `u^S(a, w)`.
    Matrix(Vec<Vec<f64>>),
    /// Per action: `n` coefficients followed by a constant, evaluated as
    /// `coeffs . mu + constant`.
    Affine(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    states: Vec<String>,
    actions: Vec<String>,
    receiver: Vec<Vec<f64>>,
    sender: SenderPayoffs,
    /// Sender values folded into one linear row per action (affine constants
    /// absorbed using `sum mu = 1`).
    sender_rows: Vec<Vec<f64>>,
    prior: Belief,
}

impl Game {
    pub fn new(
        states: Vec<String>,
        actions: Vec<String>,
        receiver_payoffs: Vec<Vec<f64>>,
        sender_payoffs: SenderPayoffs,
        prior: Vec<f64>,
    ) -> Result<Self> {
        let n = states.len();
        let m = actions.len();
        if n < 2 {
            return Err(Error::validation("states", "at least two states required"));
        }
        if m < 2 {
            return Err(Error::validation("actions", "at least two actions required"));
        }
        check_matrix("receiver_payoffs", &receiver_payoffs, m, n)?;
        let sender_rows = match &sender_payoffs {
            SenderPayoffs::Matrix(rows) => {
                check_matrix("sender_payoffs", rows, m, n)?;
                rows.clone()
            }
            SenderPayoffs::Affine(rows) => {
                check_matrix("sender_affine", rows, m, n + 1)?;
                rows.iter()
                    .map(|r| r[..n].iter().map(|c| c + r[n]).collect())
                    .collect()
            }
        };
        if prior.len() != n {
            return Err(Error::validation(
                "prior",
                format!("expected {n} coordinates, got {}", prior.len()),
            ));
        }
        let prior = Belief::new(prior).map_err(|e| match e {
            Error::Validation { message, .. } => Error::validation("prior", message),
            other => other,
        })?;
        if !prior.is_interior() {
            return Err(Error::validation("prior", "must lie in the interior of the simplex"));
        }
        Ok(Game {
            states,
            actions,
            receiver: receiver_payoffs,
            sender: sender_payoffs,
            sender_rows,
            prior,
        })
    }

    /// Same game, different prior.
    pub fn with_prior(&self, prior: Vec<f64>) -> Result<Self> {
        Game::new(
            self.states.clone(),
            self.actions.clone(),
            self.receiver.clone(),
            self.sender.clone(),
            prior,
        )
    }

    /// Same game with a different sender specification.
    pub fn with_sender(&self, sender: SenderPayoffs) -> Result<Self> {
        Game::new(
            self.states.clone(),
            self.actions.clone(),
            self.receiver.clone(),
            sender,
            self.prior.coords().to_vec(),
        )
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn receiver_payoffs(&self) -> &[Vec<f64>] {
        &self.receiver
    }

    pub fn sender_payoffs(&self) -> &SenderPayoffs {
        &self.sender
    }

    /// Linear sender row for action `a`: its value at `mu` is `row . mu`.
    pub fn sender_row(&self, a: usize) -> &[f64] {
        &self.sender_rows[a]
    }

    pub fn prior(&self) -> &Belief {
        &self.prior
    }

    pub fn receiver_payoff(&self, a: usize, belief: &[f64]) -> f64 {
        dot(&self.receiver[a], belief)
    }

    pub fn sender_payoff(&self, a: usize, belief: &[f64]) -> f64 {
        dot(&self.sender_rows[a], belief)
    }

    /// Smallest sender payoff over all (action, state) pairs, or over all
    /// simplex vertices in affine mode.
    pub fn min_sender_payoff(&self) -> f64 {
        self.sender_rows
            .iter()
            .flat_map(|r| r.iter().copied())
            .fold(f64::INFINITY, f64::min)
    }
}

fn check_matrix(field: &str, rows: &[Vec<f64>], m: usize, n: usize) -> Result<()> {
    if rows.len() != m {
        return Err(Error::validation(field, format!("expected {m} rows, got {}", rows.len())));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(Error::validation(
                field,
                format!("row {i} has {} entries, expected {n}", r.len()),
            ));
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation(field, format!("row {i} has a non-finite entry")));
        }
    }
    Ok(())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InformationStructure {
    pub support: Vec<Belief>,
    pub weights: Vec<f64>,
}

impl InformationStructure {
    pub fn new(support: Vec<Belief>, weights: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != weights.len() {
            return Err(Error::validation(
                "information structure",
                "support and weights must be nonempty and of equal length",
            ));
        }
        let n = support[0].dim();
        if support.iter().any(|b| b.dim() != n) {
            return Err(Error::validation("information structure", "beliefs of mixed dimension"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::validation("weights", "must be strictly positive"));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > tol::WEIGHT_SUM {
            return Err(Error::validation("weights", format!("sum to {sum}")));
        }
        Ok(Self { support, weights })
    }

    /// The uninformative structure.
    pub fn no_information(prior: &Belief) -> Self {
        Self {
            support: vec![prior.clone()],
            weights: vec![1.0],
        }
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// `sum_i w_i mu_i`.
    pub fn barycenter(&self) -> Vec<f64> {
        let n = self.support[0].dim();
        let mut out = vec![0.0; n];
        for (b, w) in self.support.iter().zip(&self.weights) {
            for (o, v) in out.iter_mut().zip(b.coords()) {
                *o += w * v;
            }
        }
        out
    }

    /// Largest per-coordinate deviation of the barycenter from `prior`.
    pub fn plausibility_residual(&self, prior: &Belief) -> f64 {
        self.barycenter()
            .iter()
            .zip(prior.coords())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn check_plausible(&self, prior: &Belief) -> Result<()> {
        if self.support[0].dim() != prior.dim() {
            return Err(Error::BayesViolation { residual: f64::INFINITY });
        }
        let residual = self.plausibility_residual(prior);
        let wsum: f64 = self.weights.iter().sum();
        if residual > tol::PLAUSIBILITY
            || (wsum - 1.0).abs() > tol::WEIGHT_SUM
            || self.weights.iter().any(|w| *w < 0.0)
        {
            return Err(Error::BayesViolation { residual });
        }
        Ok(())
    }
}

/// `pi(s | w)`, one row per signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalKernel {
    pub table: Vec<Vec<f64>>,
}

impl SignalKernel {
    /// Bayesian update of `prior` through the kernel: the induced posteriors
    /// and their probabilities, one per signal with positive probability.
    pub fn posterior(&self, prior: &Belief) -> InformationStructure {
        let mut support = Vec::new();
        let mut weights = Vec::new();
        for row in &self.table {
            let joint: Vec<f64> = row.iter().zip(prior.coords()).map(|(p, q)| p * q).collect();
            let prob: f64 = joint.iter().sum();
            if prob > tol::ZERO_WEIGHT {
                support.push(Belief::from_approx(joint));
                weights.push(prob);
            }
        }
        InformationStructure { support, weights }
    }
}

pub fn optimal_action_set(game: &Game, belief: &Belief) -> Vec<usize> {
    let b = belief.coords();
    let payoffs: Vec<f64> = (0..game.n_actions()).map(|a| game.receiver_payoff(a, b)).collect();
    let best = payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (0..game.n_actions())
        .filter(|&a| payoffs[a] >= best - tol::INDIFFERENCE)
        .collect()
}

pub fn sender_preferred_action(game: &Game, belief: &Belief) -> usize {
    let b = belief.coords();
    let mut chosen = None;
    let mut best = f64::NEG_INFINITY;
    for a in optimal_action_set(game, belief) {
        let v = game.sender_payoff(a, b);
        // strict comparison keeps the lowest index among exact ties
        if v > best {
            best = v;
            chosen = Some(a);
        }
    }
    chosen.expect("optimal action set is never empty")
}

pub fn sender_value(game: &Game, belief: &Belief) -> f64 {
    game.sender_payoff(sender_preferred_action(game, belief), belief.coords())
}

pub fn receiver_value(game: &Game, belief: &Belief) -> f64 {
    game.receiver_payoff(sender_preferred_action(game, belief), belief.coords())
}

/// Expected (sender, receiver) utilities under a plausible structure.
pub fn expected_values(game: &Game, tau: &InformationStructure) -> Result<(f64, f64)> {
    tau.check_plausible(game.prior())?;
    Ok(expected_values_unchecked(game, tau))
}

pub(crate) fn expected_values_unchecked(game: &Game, tau: &InformationStructure) -> (f64, f64) {
    let mut s = 0.0;
    let mut r = 0.0;
    for (b, w) in tau.support.iter().zip(&tau.weights) {
        let a = sender_preferred_action(game, b);
        s += w * game.sender_payoff(a, b.coords());
        r += w * game.receiver_payoff(a, b.coords());
    }
    (s, r)
}

pub(crate) fn expected_sender(game: &Game, tau: &InformationStructure) -> f64 {
    expected_values_unchecked(game, tau).0
}

pub fn signal_kernel(game: &Game, tau: &InformationStructure) -> Result<SignalKernel> {
    tau.check_plausible(game.prior())?;
    let prior = game.prior().coords();
    let table = tau
        .support
        .iter()
        .zip(&tau.weights)
        .map(|(b, w)| {
            b.coords()
                .iter()
                .zip(prior)
                .map(|(mu, p)| (mu * w / p).clamp(0.0, 1.0))
                .collect()
        })
        .collect();
    Ok(SignalKernel { table })
}

fn labels(prefix: &str, count: usize) -> Vec<String> {
    (0..count).map(|i| format!("{prefix}{i}")).collect()
}

/// Three-state asset example: states (up, flat, down); the receiver goes long
/// or short when the belief gap clears the fee 0.3 and the sender extracts the
/// remaining surplus as commission.
pub fn financial_game() -> Game {
    let r = 0.3;
    Game::new(
        vec!["up".into(), "flat".into(), "down".into()],
        vec!["long".into(), "short".into(), "nothing".into()],
        vec![
            vec![1.0 - r, -r, -1.0 - r],
            vec![-1.0 - r, -r, 1.0 - r],
            vec![0.0, 0.0, 0.0],
        ],
        SenderPayoffs::Affine(vec![
            vec![1.0, 0.0, -1.0, -r],
            vec![-1.0, 0.0, 1.0, -r],
            vec![0.0, 0.0, 0.0, 0.0],
        ]),
        vec![0.3, 0.4, 0.3],
    )
    .expect("financial game is well formed")
}

/// Three states, default action `a0`, and action `a_i` receiver-optimal exactly
/// when `mu_i >= pi_bar`. The sender gets 1 for any non-default action.
pub fn threshold_game(pi_bar: f64) -> Result<Game> {
    if !(pi_bar > 1.0 / 3.0 && pi_bar < 1.0) {
        return Err(Error::Domain(format!("pi_bar = {pi_bar} must lie in (1/3, 1)")));
    }
    let hit = (1.0 - pi_bar) / pi_bar;
    let mut receiver = vec![vec![0.0; 3]];
    let mut sender = vec![vec![0.0; 3]];
    for i in 0..3 {
        let mut row = vec![-1.0; 3];
        row[i] = hit;
        receiver.push(row);
        sender.push(vec![1.0; 3]);
    }
    Game::new(
        labels("w", 3),
        labels("a", 4),
        receiver,
        SenderPayoffs::Matrix(sender),
        vec![1.0 / 3.0; 3],
    )
}

/// Five-action advice-seeking example on three states with a uniform prior.
pub fn example_4_2_game() -> Game {
    let t = 1.0 / 3.0;
    let receiver = vec![
        vec![-1.0, 12.0, 12.0],
        vec![10.0 * t, 10.0 * t, 10.0 * t],
        vec![-100.0 * t, 83.0 * t, -100.0 * t],
        vec![-100.0 * t, -100.0 * t, 83.0 * t],
        vec![-50.0 * t, 58.0 * t, 58.0 * t],
    ];
    let sender = [0.0, 1.0, 10.0, 10.0, 1.0]
        .iter()
        .map(|&v| vec![v; 3])
        .collect();
    Game::new(
        labels("w", 3),
        labels("a", 5),
        receiver,
        SenderPayoffs::Matrix(sender),
        vec![t, t, t],
    )
    .expect("advice game is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn b(v: &[f64]) -> Belief {
        Belief::new(v.to_vec()).unwrap()
    }

    fn indifferent(value: f64) -> Game {
        Game::new(
            labels("w", 3),
            labels("a", 3),
            vec![vec![value; 3]; 3],
            SenderPayoffs::Matrix(vec![vec![0.0; 3], vec![0.0; 3], vec![1.0; 3]]),
            vec![0.2, 0.3, 0.5],
        )
        .unwrap()
    }

    #[test]
    fn belief_validation() {
        assert!(Belief::new(vec![0.5, 0.4]).is_err());
        assert!(Belief::new(vec![1.1, -0.1]).is_err());
        assert!(Belief::new(vec![0.0, 4.0 / 7.0, 3.0 / 7.0]).is_ok());
    }

    #[test]
    fn prior_must_be_interior() {
        let g = financial_game();
        assert!(matches!(
            g.with_prior(vec![0.0, 0.5, 0.5]),
            Err(Error::Validation { field, .. }) if field == "prior"
        ));
        assert!(g.with_prior(vec![0.3, 0.3, 0.3]).is_err());
    }

    #[test]
    fn threshold_action_sets() {
        let g = threshold_game(0.8).unwrap();
        assert_eq!(optimal_action_set(&g, &b(&[1.0, 0.0, 0.0])), vec![1]);
        assert_eq!(optimal_action_set(&g, &b(&[0.8, 0.1, 0.1])), vec![0, 1]);
        assert_eq!(sender_preferred_action(&g, &b(&[0.8, 0.1, 0.1])), 1);
        assert_abs_diff_eq!(sender_value(&g, g.prior()), 0.0);
        assert_abs_diff_eq!(receiver_value(&g, &b(&[1.0, 0.0, 0.0])), 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(g.receiver_payoffs()[1][0], 0.25, epsilon = 1e-12);
        assert!(threshold_game(1.0 / 3.0).is_err());
        assert!(threshold_game(1.0).is_err());
    }

    #[test]
    fn indifferent_receiver() {
        let g = indifferent(5.0);
        let mu = b(&[0.1, 0.2, 0.7]);
        assert_eq!(optimal_action_set(&g, &mu), vec![0, 1, 2]);
        assert_abs_diff_eq!(receiver_value(&g, &mu), 5.0, epsilon = 1e-12);
        let flat = Game::new(
            labels("w", 2),
            labels("a", 2),
            vec![vec![1.0, 1.0]; 2],
            SenderPayoffs::Matrix(vec![vec![0.0, 0.0]; 2]),
            vec![0.5, 0.5],
        )
        .unwrap();
        assert_eq!(sender_preferred_action(&flat, flat.prior()), 0);
    }

    #[test]
    fn financial_values() {
        let g = financial_game();
        assert_abs_diff_eq!(sender_value(&g, &b(&[1.0, 0.0, 0.0])), 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(sender_value(&g, &b(&[0.0, 1.0, 0.0])), 0.0, epsilon = 1e-12);
        assert_eq!(sender_preferred_action(&g, &b(&[0.0, 4.0 / 7.0, 3.0 / 7.0])), 1);
        let tau = InformationStructure::new(
            vec![Belief::vertex(3, 0), Belief::vertex(3, 1), Belief::vertex(3, 2)],
            vec![0.3, 0.4, 0.3],
        )
        .unwrap();
        assert_abs_diff_eq!(expected_values(&g, &tau).unwrap().0, 0.42, epsilon = 1e-12);
        let tau2 = InformationStructure::new(
            vec![Belief::vertex(3, 0), b(&[0.0, 4.0 / 7.0, 3.0 / 7.0])],
            vec![0.3, 0.7],
        )
        .unwrap();
        assert_abs_diff_eq!(expected_values(&g, &tau2).unwrap().0, 0.30, epsilon = 1e-12);
        let none = InformationStructure::no_information(g.prior());
        let (s, r) = expected_values(&g, &none).unwrap();
        assert_abs_diff_eq!(s, sender_value(&g, g.prior()));
        assert_abs_diff_eq!(r, receiver_value(&g, g.prior()));
    }

    #[test]
    fn implausible_structure_rejected() {
        let g = financial_game();
        let tau = InformationStructure::new(
            vec![Belief::vertex(3, 0), Belief::vertex(3, 1)],
            vec![0.5, 0.5],
        )
        .unwrap();
        assert!(matches!(expected_values(&g, &tau), Err(Error::BayesViolation { .. })));
        assert!(signal_kernel(&g, &tau).is_err());
    }

    #[test]
    fn kernels() {
        let g = financial_game();
        let full = InformationStructure::new(
            (0..3).map(|i| Belief::vertex(3, i)).collect(),
            vec![0.3, 0.4, 0.3],
        )
        .unwrap();
        let k = signal_kernel(&g, &full).unwrap();
        for (i, row) in k.table.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_abs_diff_eq!(*v, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-12);
            }
        }
        let none = signal_kernel(&g, &InformationStructure::no_information(g.prior())).unwrap();
        assert!(none.table[0].iter().all(|v| (v - 1.0).abs() < 1e-12));

        let tau = InformationStructure::new(
            vec![Belief::vertex(3, 0), b(&[0.0, 4.0 / 7.0, 3.0 / 7.0])],
            vec![0.3, 0.7],
        )
        .unwrap();
        let k = signal_kernel(&g, &tau).unwrap();
        for w in 0..3 {
            let col: f64 = k.table.iter().map(|r| r[w]).sum();
            assert_abs_diff_eq!(col, 1.0, epsilon = 1e-10);
        }
        let back = k.posterior(g.prior());
        assert_abs_diff_eq!(back.weights[1], 0.7, epsilon = 1e-12);
        assert!(back.support[1].max_distance(&tau.support[1]) < 1e-12);
    }

    #[test]
    fn advice_game_entries() {
        let g = example_4_2_game();
        assert_abs_diff_eq!(g.receiver_payoffs()[2][1], 83.0 / 3.0, epsilon = 1e-12);
        assert_eq!(g.sender_row(3), &[10.0, 10.0, 10.0]);
        assert_abs_diff_eq!(receiver_value(&g, &b(&[1.0, 0.0, 0.0])), 10.0 / 3.0, epsilon = 1e-12);
    }
}
