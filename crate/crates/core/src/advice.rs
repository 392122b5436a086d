use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{expected_values, Belief, Game, InformationStructure, SenderPayoffs};
use crate::lp::{LinearProgram, Relation};
use crate::solver::{solve_with_catalog, FacetCatalog, SolveOptions, SolveResult};
use crate::tol;

pub use crate::game::example_4_2_game;

/// Acceptance threshold for the garbling feasibility residual.
pub const GARBLING_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct AdviceEntry {
    pub k: usize,
    pub result: SolveResult,
    pub sender_value: f64,
    pub receiver_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdviceEquilibrium {
    pub chosen_k: usize,
    pub per_k: Vec<AdviceEntry>,
}

/// The receiver picks `k` anticipating the sender's optimal `k`-signal
/// structure; ties go to the smaller `k`.
pub fn advice_equilibrium(game: &Game, k_max: usize) -> Result<AdviceEquilibrium> {
    if k_max == 0 {
        return Err(Error::validation("kmax", "must be at least 1"));
    }
    let catalog = FacetCatalog::build(game);
    let opts = SolveOptions::default();
    let per_k = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let result = solve_with_catalog(game, &catalog, k, &opts)?;
            let (s, r) = expected_values(game, &result.structure)?;
            Ok(AdviceEntry {
                k,
                result,
                sender_value: s,
                receiver_value: r,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut chosen = 0;
    for (i, e) in per_k.iter().enumerate() {
        if e.receiver_value > per_k[chosen].receiver_value + tol::VALUE_TIE {
            chosen = i;
        }
    }
    Ok(AdviceEquilibrium {
        chosen_k: per_k[chosen].k,
        per_k,
    })
}

/// The same game with the sender's payoffs replaced by the receiver's.
pub fn aligned_variant(game: &Game) -> Game {
    game.with_sender(SenderPayoffs::Matrix(game.receiver_payoffs().to_vec()))
        .expect("receiver payoffs are a valid sender matrix")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Informativeness {
    AMoreInformative,
    BMoreInformative,
    Equal,
    Incomparable,
}

/// Blackwell order through garbling feasibility in both directions.
pub fn blackwell_compare(
    tau_a: &InformationStructure,
    tau_b: &InformationStructure,
    prior: &Belief,
) -> Result<Informativeness> {
    tau_a.check_plausible(prior)?;
    tau_b.check_plausible(prior)?;
    let a_to_b = garbling_residual(tau_a, tau_b) <= GARBLING_TOL;
    let b_to_a = garbling_residual(tau_b, tau_a) <= GARBLING_TOL;
    Ok(match (a_to_b, b_to_a) {
        (true, true) => Informativeness::Equal,
        (true, false) => Informativeness::AMoreInformative,
        (false, true) => Informativeness::BMoreInformative,
        (false, false) => Informativeness::Incomparable,
    })
}

/// Phase-one residual of: `M >= 0` with `sum_j M_ij = tau_A(i)` and
/// `sum_i M_ij mu^A_i = tau_B(j) mu^B_j`. Zero iff `B` is a garbling of `A`
/// (each posterior of `B` a weighted average of posteriors of `A`).
pub fn garbling_residual(from: &InformationStructure, to: &InformationStructure) -> f64 {
    let (p, q) = (from.len(), to.len());
    let n = from.support[0].dim();
    let var = |i: usize, j: usize| i * q + j;
    let mut lp = LinearProgram::new(p * q);
    for i in 0..p {
        let entries: Vec<(usize, f64)> = (0..q).map(|j| (var(i, j), 1.0)).collect();
        lp.add_sparse_row(&entries, Relation::Eq, from.weights[i]);
    }
    for j in 0..q {
        for w in 0..n {
            let entries: Vec<(usize, f64)> = (0..p)
                .map(|i| (var(i, j), from.support[i].coords()[w]))
                .collect();
            lp.add_sparse_row(&entries, Relation::Eq, to.weights[j] * to.support[j].coords()[w]);
        }
    }
    lp.min_infeasibility()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(prior: &Belief) -> InformationStructure {
        let n = prior.dim();
        InformationStructure::new((0..n).map(|i| Belief::vertex(n, i)).collect(), prior.coords().to_vec())
            .unwrap()
    }

    #[test]
    fn blackwell_basics() {
        let prior = Belief::new(vec![0.3, 0.4, 0.3]).unwrap();
        let none = InformationStructure::no_information(&prior);
        let f = full(&prior);
        assert_eq!(blackwell_compare(&f, &none, &prior).unwrap(), Informativeness::AMoreInformative);
        assert_eq!(blackwell_compare(&none, &f, &prior).unwrap(), Informativeness::BMoreInformative);
        assert_eq!(blackwell_compare(&f, &f, &prior).unwrap(), Informativeness::Equal);
    }

    #[test]
    fn blackwell_rejects_implausible() {
        let prior = Belief::uniform(3);
        let bad = InformationStructure::no_information(&Belief::new(vec![0.5, 0.25, 0.25]).unwrap());
        assert!(matches!(
            blackwell_compare(&bad, &full(&prior), &prior),
            Err(Error::BayesViolation { .. })
        ));
    }

    #[test]
    fn single_signal_game() {
        let g = example_4_2_game();
        let eq = advice_equilibrium(&g, 1).unwrap();
        assert_eq!(eq.chosen_k, 1);
        assert_eq!(eq.per_k.len(), 1);
        assert_eq!(eq.per_k[0].result.structure.len(), 1);
    }
}
