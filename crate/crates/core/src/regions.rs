use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::game::{dot, optimal_action_set, sender_preferred_action, Belief, Game};
use crate::linalg::{affine_rank, rows_matrix, solve_square};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintKind {
    /// Receiver weakly prefers the region's action over `rival`.
    Payoff { rival: usize },
    /// `mu_state >= 0`.
    Simplex { state: usize },
    /// Sender weakly prefers the subzone's action over `rival`.
    Sender { rival: usize },
}

/// `normal . mu >= offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub kind: ConstraintKind,
}

impl Halfspace {
    pub fn slack(&self, mu: &[f64]) -> f64 {
        dot(&self.normal, mu) - self.offset
    }

    fn simplex(n: usize, state: usize) -> Self {
        let mut normal = vec![0.0; n];
        normal[state] = 1.0;
        Halfspace {
            normal,
            offset: 0.0,
            kind: ConstraintKind::Simplex { state },
        }
    }

    /// `diff . mu >= 0` restricted to the simplex. The component of `diff`
    /// along the all-ones direction is constant there and moves into the
    /// offset; what remains is scaled to unit length. Returns `Err(feasible)`
    /// when the constraint is constant on the simplex.
    pub(crate) fn on_simplex(diff: &[f64], kind: ConstraintKind) -> std::result::Result<Self, bool> {
        let n = diff.len() as f64;
        let mean = diff.iter().sum::<f64>() / n;
        let tangent: Vec<f64> = diff.iter().map(|d| d - mean).collect();
        let norm = tangent.iter().map(|t| t * t).sum::<f64>().sqrt();
        if norm <= tol::INDIFFERENCE {
            return Err(mean >= -tol::INDIFFERENCE);
        }
        Ok(Halfspace {
            normal: tangent.iter().map(|t| t / norm).collect(),
            offset: -mean / norm,
            kind,
        })
    }
}

/// Convex polytope inside the simplex, in half-space and vertex form.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    pub n: usize,
    pub halfspaces: Vec<Halfspace>,
    pub vertices: Vec<Belief>,
    /// Affine dimension; `None` when empty.
    pub dimension: Option<usize>,
}

impl Polytope {
    /// `infeasible` marks a constraint that is constant and violated on the
    /// whole simplex.
    pub(crate) fn build(n: usize, halfspaces: Vec<Halfspace>, infeasible: bool) -> Self {
        let vertices = if infeasible {
            Vec::new()
        } else {
            vertices_of(n, &halfspaces)
        };
        let dimension = affine_rank(&vertices, tol::AFFINE_RANK);
        Polytope {
            n,
            halfspaces,
            vertices,
            dimension,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, mu: &[f64], slack: f64) -> bool {
        !self.is_empty() && self.halfspaces.iter().all(|h| h.slack(mu) >= -slack)
    }
}

/// Brute-force vertex enumeration: intersect every `(n-1)`-subset of the
/// hyperplanes with `sum mu = 1`, keep feasible points, deduplicate.
fn vertices_of(n: usize, halfspaces: &[Halfspace]) -> Vec<Belief> {
    let mut out: Vec<Belief> = Vec::new();
    let h = halfspaces.len();
    if h < n - 1 {
        return out;
    }
    let mut idx: Vec<usize> = (0..n - 1).collect();
    let mut rhs = vec![0.0; n];
    rhs[n - 1] = 1.0;
    loop {
        let rows: Vec<Vec<f64>> = idx
            .iter()
            .map(|&i| halfspaces[i].normal.clone())
            .chain(std::iter::once(vec![1.0; n]))
            .collect();
        for (r, &i) in idx.iter().enumerate() {
            rhs[r] = halfspaces[i].offset;
        }
        if let Some(x) = solve_square(&rows_matrix(&rows), &rhs, 1e-10) {
            let feasible = x.iter().all(|&v| v >= -tol::MEMBERSHIP)
                && halfspaces.iter().all(|hs| hs.slack(&x) >= -tol::MEMBERSHIP);
            if feasible {
                let b = Belief::from_approx(x);
                if !out.iter().any(|o| o.max_distance(&b) <= tol::VERTEX_DEDUP) {
                    out.push(b);
                }
            }
        }
        // next combination in lexicographic order
        let k = n - 1;
        let mut pos = k;
        while pos > 0 && idx[pos - 1] == h - k + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
        idx[pos - 1] += 1;
        for j in pos..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out.sort_by(|a, b| {
        a.coords()
            .iter()
            .zip(b.coords())
            .map(|(x, y)| y.total_cmp(x))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub parent_action: usize,
    /// Index into the parent region's `halfspaces`.
    pub tight_constraint: usize,
    pub hyperplane: Halfspace,
    pub vertices: Vec<Belief>,
}

impl Facet {
    pub fn contains(&self, mu: &[f64], slack: f64) -> bool {
        self.hyperplane.slack(mu).abs() <= slack
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionRegion {
    pub action: usize,
    pub polytope: Polytope,
    pub facets: Vec<Facet>,
}

impl ActionRegion {
    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.polytope.halfspaces
    }

    pub fn vertices(&self) -> &[Belief] {
        &self.polytope.vertices
    }

    pub fn dimension(&self) -> Option<usize> {
        self.polytope.dimension
    }

    pub fn is_empty(&self) -> bool {
        self.polytope.is_empty()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.polytope.dimension == Some(self.polytope.n - 1)
    }

    pub fn contains(&self, mu: &[f64]) -> bool {
        self.polytope.contains(mu, tol::MEMBERSHIP)
    }

    pub fn degeneracy(&self) -> Option<Error> {
        (!self.is_full_dimensional()).then_some(Error::DegenerateRegion {
            action: self.action,
            dimension: self.polytope.dimension,
        })
    }
}

pub(crate) fn region_halfspaces(game: &Game, a: usize) -> (Vec<Halfspace>, bool) {
    let n = game.n_states();
    let ur = game.receiver_payoffs();
    let mut hs = Vec::new();
    let mut infeasible = false;
    for b in 0..game.n_actions() {
        if b == a {
            continue;
        }
        let diff: Vec<f64> = ur[a].iter().zip(&ur[b]).map(|(x, y)| x - y).collect();
        match Halfspace::on_simplex(&diff, ConstraintKind::Payoff { rival: b }) {
            Ok(h) => hs.push(h),
            Err(feasible) => infeasible |= !feasible,
        }
    }
    hs.extend((0..n).map(|j| Halfspace::simplex(n, j)));
    (hs, infeasible)
}

pub fn build_region(game: &Game, action: usize) -> ActionRegion {
    let (hs, infeasible) = region_halfspaces(game, action);
    let polytope = Polytope::build(game.n_states(), hs, infeasible);
    let mut region = ActionRegion {
        action,
        polytope,
        facets: Vec::new(),
    };
    if let Ok(f) = enumerate_facets(&region) {
        region.facets = f;
    }
    region
}

/// One region per action, in action order. Empty and lower-dimensional
/// regions are kept (see `ActionRegion::degeneracy`).
pub fn build_regions(game: &Game) -> Vec<ActionRegion> {
    (0..game.n_actions()).map(|a| build_region(game, a)).collect()
}

/// Vertex set recomputed from the region's half-spaces.
pub fn enumerate_vertices(region: &ActionRegion) -> Vec<Belief> {
    vertices_of(region.polytope.n, &region.polytope.halfspaces)
}

pub fn enumerate_facets(region: &ActionRegion) -> Result<Vec<Facet>> {
    if let Some(e) = region.degeneracy() {
        return Err(e);
    }
    let dim = region.polytope.n - 1;
    let mut facets: Vec<Facet> = Vec::new();
    for (i, h) in region.polytope.halfspaces.iter().enumerate() {
        let tight: Vec<Belief> = region
            .polytope
            .vertices
            .iter()
            .filter(|v| h.slack(v.coords()).abs() <= tol::MEMBERSHIP)
            .cloned()
            .collect();
        if affine_rank(&tight, tol::AFFINE_RANK) != Some(dim - 1) {
            continue;
        }
        // parallel duplicate constraints describe the same facet
        if facets.iter().any(|f| same_points(&f.vertices, &tight)) {
            continue;
        }
        facets.push(Facet {
            parent_action: region.action,
            tight_constraint: i,
            hyperplane: h.clone(),
            vertices: tight,
        });
    }
    Ok(facets)
}

pub(crate) fn same_points(a: &[Belief], b: &[Belief]) -> bool {
    a.len() == b.len()
        && a.iter()
            .all(|p| b.iter().any(|q| p.max_distance(q) <= tol::VERTEX_DEDUP))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Interior,
    /// Indices into the region's `facets` whose hyperplane holds the belief.
    Boundary(Vec<usize>),
    Outside,
}

pub fn membership(region: &ActionRegion, belief: &Belief, slack: f64) -> Membership {
    let mu = belief.coords();
    if region.is_empty() {
        return Membership::Outside;
    }
    let mut any_tight = false;
    for h in &region.polytope.halfspaces {
        let s = h.slack(mu);
        if s < -slack {
            return Membership::Outside;
        }
        any_tight |= s <= slack;
    }
    if !any_tight && region.is_full_dimensional() {
        return Membership::Interior;
    }
    Membership::Boundary(
        region
            .facets
            .iter()
            .enumerate()
            .filter(|(_, f)| f.contains(mu, slack))
            .map(|(i, _)| i)
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct SenderSubzone {
    pub parent_action: usize,
    pub chosen_action: usize,
    pub polytope: Polytope,
}

impl SenderSubzone {
    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.polytope.halfspaces
    }

    pub fn vertices(&self) -> &[Belief] {
        &self.polytope.vertices
    }
}

/// Pieces of `region` on which one action is the sender-preferred choice.
///
/// The piece for `b` is `R_a ∩ R_b` cut by `s_b >= s_c` for every action `c`
/// tied with `b` on that whole intersection. Actions tied only on a lower
/// face are ignored, so pieces are exact up to their own relative boundary.
pub fn sender_subzones(game: &Game, region: &ActionRegion) -> Vec<SenderSubzone> {
    let n = game.n_states();
    let m = game.n_actions();
    let mut out: Vec<SenderSubzone> = Vec::new();
    if region.is_empty() {
        return out;
    }
    let a = region.action;
    for b in 0..m {
        let mut hs = region.polytope.halfspaces.clone();
        let (rb, mut infeasible) = region_halfspaces(game, b);
        if b != a {
            hs.extend(rb.into_iter().filter(|h| !matches!(h.kind, ConstraintKind::Simplex { .. })));
        }
        let face = Polytope::build(n, hs.clone(), infeasible);
        if face.is_empty() {
            continue;
        }
        let tied: Vec<usize> = optimal_action_set(game, &centroid(&face.vertices))
            .into_iter()
            .filter(|&c| c != b && face.vertices.iter().all(|v| ties(game, b, c, v)))
            .collect();
        for c in tied {
            let diff: Vec<f64> = game
                .sender_row(b)
                .iter()
                .zip(game.sender_row(c))
                .map(|(x, y)| x - y)
                .collect();
            match Halfspace::on_simplex(&diff, ConstraintKind::Sender { rival: c }) {
                Ok(h) => hs.push(h),
                // equal sender value everywhere: the lower index wins
                Err(true) if c < b => {
                    let exact = diff.iter().all(|d| d.abs() <= tol::INDIFFERENCE);
                    infeasible |= exact;
                }
                Err(feasible) => infeasible |= !feasible,
            }
        }
        let polytope = Polytope::build(n, hs, infeasible);
        if polytope.is_empty() {
            continue;
        }
        // a piece that coincides with an earlier one adds nothing
        if out.iter().any(|z| same_points(&z.polytope.vertices, &polytope.vertices)) {
            continue;
        }
        out.push(SenderSubzone {
            parent_action: a,
            chosen_action: b,
            polytope,
        });
    }
    out
}

fn ties(game: &Game, b: usize, c: usize, v: &Belief) -> bool {
    (game.receiver_payoff(b, v.coords()) - game.receiver_payoff(c, v.coords())).abs()
        <= tol::INDIFFERENCE
}

pub(crate) fn centroid(points: &[Belief]) -> Belief {
    let n = points[0].dim();
    let mut c = vec![0.0; n];
    for p in points {
        for (ci, v) in c.iter_mut().zip(p.coords()) {
            *ci += v / points.len() as f64;
        }
    }
    Belief::from_approx(c)
}

/// Sender-preferred action at the centroid of a subzone; used by tests and
/// diagnostics to confirm the labelling.
pub fn subzone_action_at_centroid(game: &Game, zone: &SenderSubzone) -> usize {
    sender_preferred_action(game, &centroid(&zone.polytope.vertices))
}

/// CSV dump (`action,kind,index,mu_0..mu_{n-1}`) of region and facet vertices.
pub fn regions_csv(regions: &[ActionRegion]) -> String {
    let mut s = String::new();
    let n = regions.first().map_or(0, |r| r.polytope.n);
    s.push_str("action,kind,index");
    for j in 0..n {
        let _ = write!(s, ",mu_{j}");
    }
    s.push('\n');
    let row = |s: &mut String, a: usize, kind: &str, idx: usize, v: &Belief| {
        let _ = write!(s, "{a},{kind},{idx}");
        for x in v.coords() {
            let _ = write!(s, ",{x}");
        }
        s.push('\n');
    };
    for r in regions {
        for v in r.vertices() {
            row(&mut s, r.action, "vertex", 0, v);
        }
        for (i, f) in r.facets.iter().enumerate() {
            for v in &f.vertices {
                row(&mut s, r.action, "facet", i, v);
            }
        }
    }
    s
}
