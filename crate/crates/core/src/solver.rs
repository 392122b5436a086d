use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::combos::{Combinations, Multisets};
use crate::error::{Error, Result};
use crate::game::{expected_sender, sender_preferred_action, sender_value, Belief, Game, InformationStructure};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::plausibility::{is_affinely_independent, reduce_affinely_dependent};
use crate::regions::{build_regions, region_halfspaces, same_points, ActionRegion, ConstraintKind, Facet, Halfspace, Polytope};
use crate::search::nelder_mead;
use crate::tol;

pub const MAX_STATES: usize = 8;
pub const MAX_ACTIONS: usize = 8;
pub const MAX_SIGNALS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct FacetCollection {
    pub facets: Vec<Facet>,
}

impl FacetCollection {
    pub fn len(&self) -> usize {
        self.facets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerMethod {
    /// Exact: one linear program per assignment of actions to the facets.
    Exact,
    /// Multi-start Nelder-Mead over barycentric facet coordinates.
    DirectSearch { restarts: usize, iterations: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub method: InnerMethod,
    pub seed: u64,
    /// Values within this of the best are tied (then smaller support wins).
    pub value_tie: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            method: InnerMethod::Exact,
            seed: 0,
            value_tie: tol::VALUE_TIE,
        }
    }
}

impl SolveOptions {
    pub fn direct_search(seed: u64) -> Self {
        Self {
            method: InnerMethod::DirectSearch {
                restarts: 8,
                iterations: 400,
            },
            seed,
            value_tie: tol::VALUE_TIE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub value: f64,
    pub structure: InformationStructure,
    /// Facet holding each support belief, aligned with `structure.support`
    /// (empty for the uninformative structure).
    pub collection: FacetCollection,
    /// Sender-preferred receiver action at each support belief.
    pub actions: Vec<usize>,
    /// Simplex pivots (exact) or Nelder-Mead iterations (direct search).
    pub iterations: usize,
    pub restarts: usize,
    pub collections_evaluated: usize,
    pub oracle_gap: Option<f64>,
    pub warnings: Vec<String>,
}

/// The part of a facet on which a given action is receiver-optimal.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub facet: usize,
    pub action: usize,
    pub polytope: Polytope,
    /// Linear sender row of `action`.
    pub row: Vec<f64>,
    /// Sender value of `action` at each polytope vertex.
    pub values: Vec<f64>,
    pub bound: f64,
}

/// Facets of all full-dimensional regions (geometric duplicates merged) and
/// their action pieces. Depends on payoffs only, not on the prior.
#[derive(Debug, Clone, PartialEq)]
pub struct FacetCatalog {
    pub regions: Vec<ActionRegion>,
    pub facets: Vec<Facet>,
    pub pieces: Vec<Piece>,
    /// Pieces not contained in another piece of the same action.
    pub maximal: Vec<usize>,
}

impl FacetCatalog {
    pub fn build(game: &Game) -> Self {
        let regions = build_regions(game);
        let mut facets: Vec<Facet> = Vec::new();
        for r in regions.iter().filter(|r| r.is_full_dimensional()) {
            for f in &r.facets {
                if !facets.iter().any(|g| same_points(&g.vertices, &f.vertices)) {
                    facets.push(f.clone());
                }
            }
        }
        let mut pieces = Vec::new();
        for (fi, f) in facets.iter().enumerate() {
            for p in pieces_on_facet(game, &regions, f) {
                pieces.push(Piece { facet: fi, ..p });
            }
        }
        let maximal = (0..pieces.len())
            .filter(|&i| {
                !(0..pieces.len()).any(|j| {
                    j != i
                        && pieces[j].action == pieces[i].action
                        && contains_all(&pieces[j].polytope, &pieces[i].polytope)
                        && (j < i || !contains_all(&pieces[i].polytope, &pieces[j].polytope))
                })
            })
            .collect();
        FacetCatalog {
            regions,
            facets,
            pieces,
            maximal,
        }
    }
}

fn contains_all(outer: &Polytope, inner: &Polytope) -> bool {
    inner
        .vertices
        .iter()
        .all(|v| outer.contains(v.coords(), tol::MEMBERSHIP))
}

fn pieces_on_facet(game: &Game, regions: &[ActionRegion], facet: &Facet) -> Vec<Piece> {
    let n = game.n_states();
    let parent = &regions[facet.parent_action];
    let mut base: Vec<Halfspace> = parent.halfspaces().to_vec();
    base.push(Halfspace {
        normal: facet.hyperplane.normal.iter().map(|v| -v).collect(),
        offset: -facet.hyperplane.offset,
        kind: facet.hyperplane.kind,
    });
    let mut out = Vec::new();
    for b in 0..game.n_actions() {
        let (rb, infeasible) = region_halfspaces(game, b);
        let mut hs = base.clone();
        hs.extend(rb.into_iter().filter(|h| matches!(h.kind, ConstraintKind::Payoff { .. })));
        let polytope = Polytope::build(n, hs, infeasible);
        if polytope.is_empty() {
            continue;
        }
        let values: Vec<f64> = polytope
            .vertices
            .iter()
            .map(|v| game.sender_payoff(b, v.coords()))
            .collect();
        let bound = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        out.push(Piece {
            facet: 0,
            action: b,
            row: game.sender_row(b).to_vec(),
            polytope,
            values,
            bound,
        });
    }
    out
}

fn check_scope(game: &Game, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::validation("k", "at least one signal required"));
    }
    if game.n_states() > MAX_STATES || game.n_actions() > MAX_ACTIONS || k > MAX_SIGNALS {
        return Err(Error::ScaleExceeded(format!(
            "n = {}, m = {}, k = {k}; supported up to n, m <= {MAX_STATES} and k <= {MAX_SIGNALS}",
            game.n_states(),
            game.n_actions()
        )));
    }
    Ok(())
}

fn regime_warning(game: &Game, k: usize) -> Option<String> {
    let cap = game.n_states().min(game.n_actions());
    (k >= cap).then(|| format!("k = {k} is not below min(n, m) = {cap}; the signal constraint does not bind in the usual sense"))
}

/// All multisets of at most `k` catalog facets whose vertices surround the
/// prior (the prior lies in the convex hull of their union).
pub fn enumerate_facet_collections(game: &Game, k: usize) -> Vec<FacetCollection> {
    let catalog = FacetCatalog::build(game);
    let mut out = Vec::new();
    for size in 1..=k {
        for idx in Multisets::new(catalog.facets.len(), size) {
            let mut pts: Vec<&Belief> = Vec::new();
            for &i in &idx {
                pts.extend(catalog.facets[i].vertices.iter());
            }
            if hull_contains(&pts, game.prior()) {
                out.push(FacetCollection {
                    facets: idx.iter().map(|&i| catalog.facets[i].clone()).collect(),
                });
            }
        }
    }
    out
}

fn hull_contains(points: &[&Belief], target: &Belief) -> bool {
    let n = target.dim();
    let mut lp = LinearProgram::new(points.len());
    for j in 0..n {
        lp.add_row(points.iter().map(|p| p.coords()[j]).collect(), Relation::Eq, target.coords()[j]);
    }
    lp.is_feasible()
}

#[derive(Debug, Clone)]
struct Slot {
    piece: usize,
    weight: f64,
    belief: Vec<f64>,
}

#[derive(Debug, Clone)]
struct Candidate {
    value: f64,
    key: Vec<usize>,
    structure: InformationStructure,
    pieces: Vec<usize>,
}

impl Candidate {
    fn rank_key(&self) -> (usize, &[usize]) {
        (self.structure.len(), &self.key)
    }
}

/// Keeps every candidate within `tie` of the running maximum; the final pick
/// is independent of insertion order.
#[derive(Debug, Clone, Default)]
struct Best {
    tie: f64,
    top: f64,
    items: Vec<Candidate>,
    evaluated: usize,
    iterations: usize,
}

impl Best {
    fn new(tie: f64) -> Self {
        Best {
            tie,
            top: f64::NEG_INFINITY,
            ..Default::default()
        }
    }

    fn push(mut self, c: Candidate) -> Self {
        if c.value >= self.top - self.tie {
            if c.value > self.top {
                self.top = c.value;
                let floor = self.top - self.tie;
                self.items.retain(|x| x.value >= floor);
            }
            self.items.push(c);
        }
        self
    }

    fn merge(mut self, other: Best) -> Self {
        self.evaluated += other.evaluated;
        self.iterations += other.iterations;
        for c in other.items {
            self = self.push(c);
        }
        self
    }

    fn pick(&self) -> Option<&Candidate> {
        let floor = self.top - self.tie;
        self.items
            .iter()
            .filter(|c| c.value >= floor)
            .min_by(|a, b| a.rank_key().cmp(&b.rank_key()))
    }
}

/// Linear program over the cones of the chosen pieces: with `nu_i = tau_i mu_i`
/// written as nonnegative combinations of piece vertices, plausibility is
/// `sum nu_i = mu0` and the objective is linear.
fn lp_on_pieces(prior: &[f64], catalog_pieces: &[Piece], chosen: &[usize]) -> Option<(Vec<Slot>, usize)> {
    let n = prior.len();
    let sizes: Vec<usize> = chosen.iter().map(|&p| catalog_pieces[p].polytope.vertices.len()).collect();
    let total: usize = sizes.iter().sum();
    let mut lp = LinearProgram::new(total);
    let mut objective = Vec::with_capacity(total);
    let mut rows = vec![Vec::with_capacity(total); n];
    for &p in chosen {
        let piece = &catalog_pieces[p];
        for (v, val) in piece.polytope.vertices.iter().zip(&piece.values) {
            objective.push(*val);
            for (j, row) in rows.iter_mut().enumerate() {
                row.push(v.coords()[j]);
            }
        }
    }
    lp.set_objective(objective);
    for (j, row) in rows.into_iter().enumerate() {
        lp.add_row(row, Relation::Eq, prior[j]);
    }
    let sol = match lp.maximize() {
        LpOutcome::Optimal(s) => s,
        _ => return None,
    };
    let mut slots = Vec::new();
    let mut offset = 0;
    for (&p, &size) in chosen.iter().zip(&sizes) {
        let piece = &catalog_pieces[p];
        let lam = &sol.x[offset..offset + size];
        offset += size;
        let w: f64 = lam.iter().sum();
        if w <= tol::ZERO_WEIGHT {
            continue;
        }
        let mut belief = vec![0.0; n];
        for (l, v) in lam.iter().zip(&piece.polytope.vertices) {
            for (b, x) in belief.iter_mut().zip(v.coords()) {
                *b += l * x / w;
            }
        }
        slots.push(Slot {
            piece: p,
            weight: w,
            belief,
        });
    }
    Some((slots, sol.pivots))
}

/// Nelder-Mead over the first `k-1` beliefs (barycentric in their pieces) and
/// the mixing weights of their average `c`; the last belief is where the ray
/// from `c` through the prior meets the last facet's hyperplane.
fn direct_search_on_pieces(
    prior: &[f64],
    catalog: &FacetCatalog,
    chosen: &[usize],
    restarts: usize,
    iterations: usize,
    seed: u64,
) -> (Option<Vec<Slot>>, usize) {
    let k = chosen.len();
    let pieces: Vec<&Piece> = chosen.iter().map(|&p| &catalog.pieces[p]).collect();
    let last = pieces[k - 1];
    let plane = &catalog.facets[last.facet].hyperplane;
    let dims: Vec<usize> = pieces[..k - 1].iter().map(|p| p.polytope.vertices.len()).collect();
    let d: usize = dims.iter().sum::<usize>() + (k - 1);

    let decode = |x: &[f64]| -> Option<(Vec<Slot>, f64)> {
        let mut off = 0;
        let mut beliefs = Vec::with_capacity(k);
        for (i, &m) in dims.iter().enumerate() {
            let raw: Vec<f64> = x[off..off + m].iter().map(|v| v.abs()).collect();
            off += m;
            let s: f64 = raw.iter().sum();
            let mut b = vec![0.0; prior.len()];
            for (r, v) in raw.iter().zip(&pieces[i].polytope.vertices) {
                let w = if s > 0.0 { r / s } else { 1.0 / m as f64 };
                for (bj, vj) in b.iter_mut().zip(v.coords()) {
                    *bj += w * vj;
                }
            }
            beliefs.push(b);
        }
        let mix_raw: Vec<f64> = x[off..off + k - 1].iter().map(|v| v.abs()).collect();
        let ms: f64 = mix_raw.iter().sum();
        let mix: Vec<f64> = mix_raw
            .iter()
            .map(|v| if ms > 0.0 { v / ms } else { 1.0 / (k - 1) as f64 })
            .collect();
        let mut c = vec![0.0; prior.len()];
        for (a, b) in mix.iter().zip(&beliefs) {
            for (cj, bj) in c.iter_mut().zip(b) {
                *cj += a * bj;
            }
        }
        let dir: Vec<f64> = prior.iter().zip(&c).map(|(p, q)| p - q).collect();
        let rate: f64 = plane.normal.iter().zip(&dir).map(|(a, b)| a * b).sum();
        if rate.abs() < 1e-14 {
            return None;
        }
        let s = -plane.slack(prior) / rate;
        if s <= 0.0 || !s.is_finite() {
            return None;
        }
        let tail: Vec<f64> = prior.iter().zip(&dir).map(|(p, q)| p + s * q).collect();
        let violation = last
            .polytope
            .halfspaces
            .iter()
            .map(|h| -h.slack(&tail))
            .chain(tail.iter().map(|v| -v))
            .fold(0.0, f64::max);
        beliefs.push(tail);
        let mut slots: Vec<Slot> = Vec::with_capacity(k);
        let wk = 1.0 / (1.0 + s);
        for i in 0..k {
            let weight = if i + 1 == k { wk } else { mix[i] * s / (1.0 + s) };
            slots.push(Slot {
                piece: chosen[i],
                weight,
                belief: beliefs[i].clone(),
            });
        }
        Some((slots, violation))
    };
    let objective = |x: &[f64]| -> f64 {
        match decode(x) {
            None => 1e6,
            Some((slots, violation)) => {
                let value: f64 = slots
                    .iter()
                    .map(|s| s.weight * crate::game::dot(&catalog.pieces[s.piece].row, &s.belief))
                    .sum();
                if violation > tol::MEMBERSHIP {
                    1e3 * (1.0 + violation)
                } else {
                    -value
                }
            }
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<Slot>)> = None;
    let mut iters = 0;
    for _ in 0..restarts.max(1) {
        let x0: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..1.0)).collect();
        let m = nelder_mead(objective, &x0, 0.25, iterations, 1e-13);
        iters += m.iterations;
        if m.value < 1e2 {
            if let Some((slots, violation)) = decode(&m.x) {
                if violation <= tol::MEMBERSHIP && best.as_ref().is_none_or(|(v, _)| -m.value > *v) {
                    best = Some((-m.value, slots));
                }
            }
        }
    }
    (best.map(|(_, s)| s), iters)
}

/// Turns raw slots into a final candidate: merge coincident beliefs, reduce
/// affinely dependent supports, and value with the true sender-preferred
/// utility.
fn finalize(game: &Game, mut slots: Vec<Slot>, key: Vec<usize>) -> Option<Candidate> {
    slots.retain(|s| s.weight > tol::ZERO_WEIGHT);
    if slots.is_empty() {
        return None;
    }
    let mut merged: Vec<Slot> = Vec::new();
    for s in slots {
        match merged.iter_mut().find(|m| max_dist(&m.belief, &s.belief) <= tol::PLAUSIBILITY) {
            Some(m) => m.weight += s.weight,
            None => merged.push(s),
        }
    }
    let total: f64 = merged.iter().map(|s| s.weight).sum();
    let support: Vec<Belief> = merged.iter().map(|s| Belief::from_approx(s.belief.clone())).collect();
    let weights: Vec<f64> = merged.iter().map(|s| s.weight / total).collect();
    let mut structure = InformationStructure { support, weights };
    if structure.plausibility_residual(game.prior()) > tol::PLAUSIBILITY {
        return None;
    }
    if !is_affinely_independent(&structure.support) {
        structure = reduce_affinely_dependent(game, &structure).ok()?;
    }
    let pieces = structure
        .support
        .iter()
        .map(|b| {
            merged
                .iter()
                .find(|s| max_dist(&s.belief, b.coords()) <= 1e-7)
                .map(|s| s.piece)
                .unwrap_or(merged[0].piece)
        })
        .collect();
    Some(Candidate {
        value: expected_sender(game, &structure),
        key,
        structure,
        pieces,
    })
}

fn max_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Best structure whose beliefs lie on the given facets (one belief per facet).
pub fn maximize_on_collection(
    game: &Game,
    collection: &FacetCollection,
    k: usize,
) -> Result<(f64, InformationStructure)> {
    check_scope(game, k)?;
    if collection.is_empty() || collection.len() > k {
        return Err(Error::validation(
            "collection",
            format!("needs between 1 and k = {k} facets, got {}", collection.len()),
        ));
    }
    let regions = build_regions(game);
    let mut pieces: Vec<Piece> = Vec::new();
    let mut per_slot: Vec<Vec<usize>> = Vec::new();
    for (fi, f) in collection.facets.iter().enumerate() {
        let mut ids = Vec::new();
        for p in pieces_on_facet(game, &regions, f) {
            ids.push(pieces.len());
            pieces.push(Piece { facet: fi, ..p });
        }
        per_slot.push(ids);
    }
    let mut best = Best::new(tol::VALUE_TIE);
    let mut choice = vec![0usize; per_slot.len()];
    if per_slot.iter().any(|s| s.is_empty()) {
        return Err(Error::Infeasible("a facet carries no receiver-optimal action".into()));
    }
    loop {
        let chosen: Vec<usize> = choice.iter().enumerate().map(|(i, &c)| per_slot[i][c]).collect();
        if let Some((slots, _)) = lp_on_pieces(game.prior().coords(), &pieces, &chosen) {
            if let Some(c) = finalize(game, slots, chosen.clone()) {
                best = best.push(c);
            }
        }
        // odometer over action assignments
        let mut pos = 0;
        while pos < choice.len() {
            choice[pos] += 1;
            if choice[pos] < per_slot[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
        if pos == choice.len() {
            break;
        }
    }
    match best.pick() {
        Some(c) => Ok((c.value, c.structure.clone())),
        None => Err(Error::Infeasible(
            "no Bayes-plausible support on the given facets".into(),
        )),
    }
}

pub fn solve(game: &Game, k: usize) -> Result<SolveResult> {
    solve_with(game, k, &SolveOptions::default())
}

pub fn solve_with(game: &Game, k: usize, opts: &SolveOptions) -> Result<SolveResult> {
    check_scope(game, k)?;
    let catalog = FacetCatalog::build(game);
    solve_with_catalog(game, &catalog, k, opts)
}

/// Solve reusing a catalog built for a game with the same payoffs (only the
/// prior may differ).
pub fn solve_with_catalog(
    game: &Game,
    catalog: &FacetCatalog,
    k: usize,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    check_scope(game, k)?;
    let mut warnings: Vec<String> = regime_warning(game, k).into_iter().collect();
    let prior = game.prior().coords();
    let uninformative = Candidate {
        value: sender_value(game, game.prior()),
        key: Vec::new(),
        structure: InformationStructure::no_information(game.prior()),
        pieces: Vec::new(),
    };
    let mut best = Best::new(opts.value_tie).push(uninformative);
    let live: Vec<usize> = catalog.maximal.clone();
    // a support never needs more than n beliefs
    let top_level = k.min(game.n_states());
    let mut restarts = 0;
    for level in 2..=top_level {
        let floor = best.top + opts.value_tie;
        let level_best = Combinations::new(live.len(), level)
            .par_bridge()
            .fold(
                || Best::new(opts.value_tie),
                |acc, idx| {
                    let chosen: Vec<usize> = idx.iter().map(|&i| live[i]).collect();
                    let bound = chosen
                        .iter()
                        .map(|&p| catalog.pieces[p].bound)
                        .fold(f64::NEG_INFINITY, f64::max);
                    if bound <= floor {
                        return acc;
                    }
                    let mut acc = acc;
                    acc.evaluated += 1;
                    let slots = match opts.method {
                        InnerMethod::Exact => lp_on_pieces(prior, &catalog.pieces, &chosen).map(|(s, pivots)| {
                            acc.iterations += pivots;
                            s
                        }),
                        InnerMethod::DirectSearch { restarts, iterations } => {
                            let seed = opts.seed ^ hash_key(&chosen);
                            let (s, it) = direct_search_on_pieces(prior, catalog, &chosen, restarts, iterations, seed);
                            acc.iterations += it;
                            s
                        }
                    };
                    match slots.and_then(|s| finalize(game, s, chosen)) {
                        Some(c) => acc.push(c),
                        None => acc,
                    }
                },
            )
            .reduce(|| Best::new(opts.value_tie), Best::merge);
        if let InnerMethod::DirectSearch { restarts: r, .. } = opts.method {
            restarts += r * level_best.evaluated;
        }
        best = best.merge(level_best);
    }
    let pick = best.pick().expect("uninformative candidate always present").clone();
    if pick.value < sender_value(game, game.prior()) - tol::VALUE_TIE {
        warnings.push("search fell below the uninformative value".into());
    }
    let collection = FacetCollection {
        facets: pick
            .pieces
            .iter()
            .map(|&p| catalog.facets[catalog.pieces[p].facet].clone())
            .collect(),
    };
    let actions = pick
        .structure
        .support
        .iter()
        .map(|b| sender_preferred_action(game, b))
        .collect();
    Ok(SolveResult {
        value: pick.value,
        structure: pick.structure,
        collection,
        actions,
        iterations: best.iterations,
        restarts,
        collections_evaluated: best.evaluated,
        oracle_gap: None,
        warnings,
    })
}

fn hash_key(key: &[usize]) -> u64 {
    // FNV-1a; only needs to be stable across runs
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &k in key {
        h ^= k as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Stochastic lower bound on `V*(k)`: random `k`-point supports built from
/// region vertices, facet points and grid points, with the last point placed
/// on the ray from the mixture of the others through the prior.
pub fn k_convex_hull_value(game: &Game, k: usize, budget: usize) -> f64 {
    k_convex_hull_value_with(game, k, budget, 0, &[])
}

pub fn k_convex_hull_value_with(
    game: &Game,
    k: usize,
    budget: usize,
    seed: u64,
    injected: &[InformationStructure],
) -> f64 {
    let prior = game.prior();
    let mut best = sender_value(game, prior);
    for tau in injected {
        if tau.len() <= k && tau.check_plausible(prior).is_ok() {
            best = best.max(expected_sender(game, tau));
        }
    }
    if k < 2 {
        return best;
    }
    let n = game.n_states();
    let regions = build_regions(game);
    let mut pool: Vec<Vec<f64>> = Vec::new();
    let mut planes: Vec<Halfspace> = Vec::new();
    for r in &regions {
        pool.extend(r.vertices().iter().map(|v| v.coords().to_vec()));
        for h in r.halfspaces() {
            planes.push(h.clone());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let facet_vertices: Vec<Vec<Belief>> = regions
        .iter()
        .flat_map(|r| r.facets.iter().map(|f| f.vertices.clone()))
        .collect();
    for _ in 0..budget {
        let mut c = vec![0.0; n];
        let mut points: Vec<Vec<f64>> = Vec::with_capacity(k);
        let raw: Vec<f64> = (0..k - 1).map(|_| -rng.random::<f64>().max(1e-12).ln()).collect();
        let total: f64 = raw.iter().sum();
        let mix: Vec<f64> = raw.iter().map(|r| r / total).collect();
        for _ in 0..k - 1 {
            let p = match rng.random_range(0..3) {
                0 if !pool.is_empty() => pool[rng.random_range(0..pool.len())].clone(),
                1 if !facet_vertices.is_empty() => {
                    let f = &facet_vertices[rng.random_range(0..facet_vertices.len())];
                    random_in_hull(&mut rng, f)
                }
                _ => random_simplex_point(&mut rng, n),
            };
            points.push(p);
        }
        for (a, p) in mix.iter().zip(&points) {
            for (cj, pj) in c.iter_mut().zip(p) {
                *cj += a * pj;
            }
        }
        let dir: Vec<f64> = prior.coords().iter().zip(&c).map(|(p, q)| p - q).collect();
        if dir.iter().all(|d| d.abs() < 1e-12) {
            continue;
        }
        // exit parameter of the simplex along mu0 + s dir
        let s_max = prior
            .coords()
            .iter()
            .zip(&dir)
            .filter(|(_, d)| **d < 0.0)
            .map(|(p, d)| -p / d)
            .fold(f64::INFINITY, f64::min);
        let mut params: Vec<f64> = planes
            .iter()
            .filter_map(|h| {
                let rate: f64 = h.normal.iter().zip(&dir).map(|(a, b)| a * b).sum();
                (rate.abs() > 1e-14).then(|| -h.slack(prior.coords()) / rate)
            })
            .filter(|&s| s > 0.0 && s <= s_max)
            .collect();
        params.push(s_max);
        for s in params {
            let tail = Belief::from_approx(prior.coords().iter().zip(&dir).map(|(p, d)| p + s * d).collect());
            let mut v = sender_value(game, &tail) / (1.0 + s);
            for (a, p) in mix.iter().zip(&points) {
                v += a * s / (1.0 + s) * sender_value(game, &Belief::from_approx(p.clone()));
            }
            best = best.max(v);
        }
    }
    best
}

fn random_simplex_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-12).ln()).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|r| r / s).collect()
}

fn random_in_hull(rng: &mut ChaCha8Rng, pts: &[Belief]) -> Vec<f64> {
    let w = random_simplex_point(rng, pts.len());
    let mut out = vec![0.0; pts[0].dim()];
    for (wi, p) in w.iter().zip(pts) {
        for (o, x) in out.iter_mut().zip(p.coords()) {
            *o += wi * x;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{financial_game, threshold_game};
    use crate::regions::{membership, Membership};
    use approx::assert_abs_diff_eq;

    fn near(a: &Belief, b: &[f64], tol: f64) -> bool {
        a.coords().iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn financial_two_signals() {
        let g = financial_game();
        let r = solve(&g, 2).unwrap();
        assert_abs_diff_eq!(r.value, 0.3, epsilon = 1e-9);
        let s = &r.structure.support;
        let has = |p: &[f64]| s.iter().any(|b| near(b, p, 1e-6));
        assert!(has(&[1.0, 0.0, 0.0]) || has(&[0.0, 0.0, 1.0]));
        assert!(has(&[0.0, 4.0 / 7.0, 3.0 / 7.0]) || has(&[3.0 / 7.0, 4.0 / 7.0, 0.0]));
        assert!(is_affinely_independent(s));
        assert_eq!(r.collection.len(), 2);
    }

    #[test]
    fn financial_three_signals_use_vertices() {
        let r = solve(&financial_game(), 3).unwrap();
        assert_abs_diff_eq!(r.value, 0.42, epsilon = 1e-9);
        for b in &r.structure.support {
            assert!(b.coords().iter().any(|&v| (v - 1.0).abs() < 1e-9));
        }
    }

    #[test]
    fn single_signal() {
        let g = financial_game();
        let r = solve(&g, 1).unwrap();
        assert_eq!(r.structure.len(), 1);
        assert_eq!(r.value, sender_value(&g, g.prior()));
        assert_eq!(k_convex_hull_value(&g, 1, 10), r.value);
    }

    #[test]
    fn threshold_barycenter() {
        let r = solve(&threshold_game(0.8).unwrap(), 2).unwrap();
        assert_abs_diff_eq!(r.value, 5.0 / 12.0, epsilon = 1e-9);
    }

    #[test]
    fn scope_and_warnings() {
        let g = financial_game();
        assert!(matches!(solve(&g, 0), Err(Error::Validation { .. })));
        assert!(matches!(solve(&g, MAX_SIGNALS + 1), Err(Error::ScaleExceeded(_))));
        assert!(solve(&g, 2).unwrap().warnings.is_empty());
        assert!(!solve(&g, 3).unwrap().warnings.is_empty());
    }

    #[test]
    fn supports_on_boundaries() {
        let g = financial_game();
        let catalog = FacetCatalog::build(&g);
        for k in 2..=3 {
            let r = solve_with_catalog(&g, &catalog, k, &SolveOptions::default()).unwrap();
            for (b, &a) in r.structure.support.iter().zip(&r.actions) {
                let m = membership(&catalog.regions[a], b, tol::MEMBERSHIP);
                assert!(matches!(m, Membership::Boundary(_)), "{b:?} {m:?}");
            }
        }
    }

    #[test]
    fn direct_search_agrees() {
        let g = financial_game();
        let r = solve_with(&g, 2, &SolveOptions::direct_search(7)).unwrap();
        assert_abs_diff_eq!(r.value, 0.3, epsilon = 1e-6);
        assert!(r.restarts > 0);
    }

    #[test]
    fn collections_filtered() {
        let g = threshold_game(0.8).unwrap();
        let all = enumerate_facet_collections(&g, 2);
        assert!(!all.is_empty());
        let catalog = FacetCatalog::build(&g);
        assert_eq!(catalog.facets.len(), 12);
        // both beliefs in R_1 cannot average to the barycenter
        let r1 = &catalog.regions[1];
        assert!(!all.iter().any(|c| c.facets.iter().all(|f| f.parent_action == 1 && r1.facets.contains(f))));
        assert!(enumerate_facet_collections(&g, 1).is_empty());
    }

    #[test]
    fn collection_maximum() {
        let g = financial_game();
        let catalog = FacetCatalog::build(&g);
        let r = solve(&g, 2).unwrap();
        let (v, _) = maximize_on_collection(&g, &r.collection, 2).unwrap();
        assert_abs_diff_eq!(v, 0.3, epsilon = 1e-9);
        // two facets of the long region, both with mu_up >= mu_down + 0.3
        let long: Vec<Facet> = catalog.regions[0].facets.iter().take(2).cloned().collect();
        let res = maximize_on_collection(&g, &FacetCollection { facets: long }, 2);
        assert!(matches!(res, Err(Error::Infeasible(_))));
    }

    #[test]
    fn injected_support() {
        let g = financial_game();
        let tau = InformationStructure::new(
            vec![
                Belief::new(vec![1.0, 0.0, 0.0]).unwrap(),
                Belief::from_approx(vec![0.0, 4.0 / 7.0, 3.0 / 7.0]),
            ],
            vec![0.3, 0.7],
        )
        .unwrap();
        assert_abs_diff_eq!(k_convex_hull_value_with(&g, 2, 1, 0, &[tau]), 0.3, epsilon = 1e-9);
        let v = k_convex_hull_value(&g, 3, 4000);
        assert!(v <= 0.42 + 1e-9 && v > 0.3, "{v}");
    }

    #[test]
    fn deterministic() {
        let g = threshold_game(0.8).unwrap().with_prior(vec![0.5, 0.3, 0.2]).unwrap();
        let a = solve(&g, 2).unwrap();
        for _ in 0..5 {
            assert_eq!(solve(&g, 2).unwrap(), a);
        }
    }
}
