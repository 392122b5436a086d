//! Sender-optimal information design when the signal space has at most `k`
//! elements.

pub mod advice;
pub mod combos;
pub mod continuum;
pub mod error;
pub mod game;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod oracle;
pub mod plausibility;
pub mod precision;
pub mod regions;
pub mod sample;
pub mod search;
pub mod solver;
pub mod tol;

pub use error::{Error, Result};
pub use game::{
    example_4_2_game, expected_values, financial_game, optimal_action_set, receiver_value,
    sender_preferred_action, sender_value, signal_kernel, threshold_game, Belief, Game,
    InformationStructure, SenderPayoffs, SignalKernel,
};
pub use regions::{
    build_region, build_regions, enumerate_facets, enumerate_vertices, membership,
    sender_subzones, ActionRegion, ConstraintKind, Facet, Halfspace, Membership, Polytope,
    SenderSubzone,
};
pub use plausibility::{
    choquet_weights, collapse_pair, is_affinely_independent, project_to_boundary,
    reduce_affinely_dependent, WeightSolution,
};
pub use solver::{
    enumerate_facet_collections, k_convex_hull_value, k_convex_hull_value_with,
    maximize_on_collection, solve, solve_with, solve_with_catalog, FacetCatalog, FacetCollection,
    InnerMethod, SolveOptions, SolveResult,
};
pub use precision::{
    check_theorem3_bound, in_delta_c, lemma7_bounds, simplex_grid, value_curve, value_curve_with,
    value_surface, BoundCheck, PrecisionCurve, ThresholdGameParams,
};
pub use advice::{
    advice_equilibrium, aligned_variant, blackwell_compare, garbling_residual, AdviceEntry,
    AdviceEquilibrium, Informativeness,
};
pub use continuum::{
    conditional_mean, envelopes, optimize_partition, sender_value_continuum, ContinuumPrior,
    ContinuumProblem, Envelopes, PartitionSignal,
};
pub use oracle::{brute_force_partition, brute_force_solve, lipschitz_gap};
pub use io::{load_game, save_game, GameDocument};
