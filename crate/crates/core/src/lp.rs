//! Dense two-phase simplex for the small linear programs that appear
//! throughout the crate (facet-collection subproblems, hull membership,
//! garbling feasibility). Every variable is implicitly non-negative.
//!
//! Problems here have at most a few dozen variables and constraints, so a
//! dense tableau is both adequate and easy to audit.

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
struct Row {
    coeffs: Vec<f64>,
    relation: Relation,
    rhs: f64,
}

/// `maximize c·x` subject to linear rows and `x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    n_vars: usize,
    objective: Vec<f64>,
    rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    /// Phase one could not drive the artificial variables below tolerance;
    /// carries the residual infeasibility.
    Infeasible(f64),
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

impl LinearProgram {
    pub fn new(n_vars: usize) -> Self {
        Self {
            n_vars,
            objective: vec![0.0; n_vars],
            rows: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn set_objective(&mut self, objective: Vec<f64>) {
        assert_eq!(objective.len(), self.n_vars);
        self.objective = objective;
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        assert_eq!(coeffs.len(), self.n_vars);
        self.rows.push(Row {
            coeffs,
            relation,
            rhs,
        });
    }

    /// Adds a row given as sparse `(column, coefficient)` pairs.
    pub fn add_sparse_row(&mut self, entries: &[(usize, f64)], relation: Relation, rhs: f64) {
        let mut coeffs = vec![0.0; self.n_vars];
        for &(j, v) in entries {
            coeffs[j] += v;
        }
        self.add_row(coeffs, relation, rhs);
    }

    pub fn maximize(&self) -> LpOutcome {
        let mut tab = Tableau::build(self);
        let infeasibility = tab.phase_one();
        if infeasibility > crate::tol::LP_FEASIBILITY {
            return LpOutcome::Infeasible(infeasibility);
        }
        tab.drop_artificials();
        match tab.phase_two(&self.objective) {
            Some(objective) => {
                let mut x = vec![0.0; self.n_vars];
                for (i, &b) in tab.basis.iter().enumerate() {
                    if b < self.n_vars {
                        x[b] = tab.rhs(i).max(0.0);
                    }
                }
                LpOutcome::Optimal(LpSolution {
                    x,
                    objective,
                    pivots: tab.pivots,
                })
            }
            None => LpOutcome::Unbounded,
        }
    }

    /// Total residual of the best phase-one point, measured on rows scaled to
    /// unit max-coefficient: zero (to rounding) iff the constraints are feasible.
    pub fn min_infeasibility(&self) -> f64 {
        Tableau::build(self).phase_one()
    }

    pub fn is_feasible(&self) -> bool {
        self.min_infeasibility() <= crate::tol::LP_FEASIBILITY
    }
}

struct Tableau {
    /// `m` rows of `width + 1` entries (last is the right-hand side).
    data: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
    n_struct: usize,
    /// Columns at or above this index are artificial.
    art_start: usize,
    active: Vec<bool>,
    pivots: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.n_vars;
        let mut rows: Vec<Row> = lp
            .rows
            .iter()
            .map(|r| {
                let scale = r
                    .coeffs
                    .iter()
                    .fold(r.rhs.abs(), |acc, v| acc.max(v.abs()))
                    .max(1e-300);
                let mut row = Row {
                    coeffs: r.coeffs.iter().map(|v| v / scale).collect(),
                    relation: r.relation,
                    rhs: r.rhs / scale,
                };
                if row.rhs < 0.0 {
                    row.coeffs.iter_mut().for_each(|v| *v = -*v);
                    row.rhs = -row.rhs;
                    row.relation = match row.relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                }
                row
            })
            .collect();
        let m = rows.len();
        let n_slack = rows.iter().filter(|r| r.relation != Relation::Eq).count();
        let n_art = rows.iter().filter(|r| r.relation != Relation::Le).count();
        let art_start = n + n_slack;
        let width = art_start + n_art;
        let mut data = vec![vec![0.0; width + 1]; m];
        let mut basis = vec![0; m];
        let (mut slack, mut art) = (n, art_start);
        for (i, row) in rows.iter_mut().enumerate() {
            data[i][..n].copy_from_slice(&row.coeffs);
            data[i][width] = row.rhs;
            match row.relation {
                Relation::Le => {
                    data[i][slack] = 1.0;
                    basis[i] = slack;
                    slack += 1;
                }
                Relation::Ge => {
                    data[i][slack] = -1.0;
                    slack += 1;
                    data[i][art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
                Relation::Eq => {
                    data[i][art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
            }
        }
        Self {
            data,
            basis,
            width,
            n_struct: n,
            art_start,
            active: vec![true; width],
            pivots: 0,
        }
    }

    fn rhs(&self, i: usize) -> f64 {
        self.data[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.data[r][c];
        for v in self.data[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.data[r].clone();
        for (i, row) in self.data.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for j in 0..=w {
                    row[j] -= f * pivot_row[j];
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Runs the simplex loop maximizing `cost·x`; returns the optimal value or
    /// `None` if unbounded.
    fn optimize(&mut self, cost: &[f64]) -> Option<f64> {
        let m = self.data.len();
        let w = self.width;
        let bland_after = 50 * (m + w).max(1);
        let mut iter = 0usize;
        loop {
            iter += 1;
            // reduced costs d_j = c_j - c_B · column_j; enter on d_j > 0
            let mut enter = None;
            let mut best = COST_EPS;
            for j in 0..w {
                if !self.active[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut d = cost[j];
                for i in 0..m {
                    d -= cost[self.basis[i]] * self.data[i][j];
                }
                if d > best {
                    enter = Some(j);
                    if iter > bland_after {
                        break;
                    }
                    best = d;
                }
            }
            let Some(c) = enter else {
                let value = (0..m).map(|i| cost[self.basis[i]] * self.rhs(i)).sum();
                return Some(value);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.data[i][c];
                if a > PIVOT_EPS {
                    let ratio = self.rhs(i) / a;
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - 1e-14 || (ratio <= lr + 1e-14 && self.basis[i] < self.basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let (r, _) = leave?;
            self.pivot(r, c);
            if iter > 100 * bland_after {
                // numerical stalling; report what we have
                let value = (0..m).map(|i| cost[self.basis[i]] * self.rhs(i)).sum();
                return Some(value);
            }
        }
    }

    fn phase_one(&mut self) -> f64 {
        if self.art_start == self.width {
            return 0.0;
        }
        let cost: Vec<f64> = (0..self.width)
            .map(|j| if j >= self.art_start { -1.0 } else { 0.0 })
            .collect();
        let v = self.optimize(&cost).unwrap_or(f64::NEG_INFINITY);
        (-v).max(0.0)
    }

    fn drop_artificials(&mut self) {
        let mut i = 0;
        while i < self.data.len() {
            if self.basis[i] >= self.art_start {
                let col = (0..self.art_start).find(|&j| {
                    self.data[i][j].abs() > 1e-9 && !self.basis.contains(&j)
                });
                match col {
                    Some(j) => {
                        self.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        // redundant row
                        self.data.remove(i);
                        self.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
        for j in self.art_start..self.width {
            self.active[j] = false;
        }
    }

    fn phase_two(&mut self, objective: &[f64]) -> Option<f64> {
        let mut cost = vec![0.0; self.width];
        cost[..self.n_struct].copy_from_slice(objective);
        self.optimize(&cost)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(o: LpOutcome) -> LpSolution {
        match o {
            LpOutcome::Optimal(s) => s,
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = LinearProgram::new(2);
        lp.set_objective(vec![3.0, 5.0]);
        lp.add_row(vec![1.0, 0.0], Relation::Le, 4.0);
        lp.add_row(vec![0.0, 2.0], Relation::Le, 12.0);
        lp.add_row(vec![3.0, 2.0], Relation::Le, 18.0);
        let s = optimal(lp.maximize());
        assert!((s.objective - 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_ge_rows() {
        // max -x - y s.t. x + y = 1, x >= 0.3 -> value -1
        let mut lp = LinearProgram::new(2);
        lp.set_objective(vec![-1.0, -2.0]);
        lp.add_row(vec![1.0, 1.0], Relation::Eq, 1.0);
        lp.add_row(vec![1.0, 0.0], Relation::Ge, 0.3);
        let s = optimal(lp.maximize());
        assert!((s.objective + 1.0).abs() < 1e-9);
        assert!((s.x[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasibility() {
        let mut lp = LinearProgram::new(1);
        lp.add_row(vec![1.0], Relation::Ge, 2.0);
        lp.add_row(vec![1.0], Relation::Le, 1.0);
        assert!(matches!(lp.maximize(), LpOutcome::Infeasible(r) if r > 0.1));
        assert!(!lp.is_feasible());
    }

    #[test]
    fn detects_unboundedness() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(vec![1.0, 0.0]);
        lp.add_row(vec![1.0, -1.0], Relation::Le, 1.0);
        assert_eq!(lp.maximize(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_equalities_are_tolerated() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(vec![1.0, 1.0]);
        lp.add_row(vec![1.0, 1.0], Relation::Eq, 1.0);
        lp.add_row(vec![2.0, 2.0], Relation::Eq, 2.0);
        let s = optimal(lp.maximize());
        assert!((s.objective - 1.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_vertex_terminates() {
        // classic degenerate example (Beale-like); must terminate with correct value
        let mut lp = LinearProgram::new(4);
        lp.set_objective(vec![0.75, -150.0, 0.02, -6.0]);
        lp.add_row(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0);
        lp.add_row(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0);
        lp.add_row(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        let s = optimal(lp.maximize());
        assert!((s.objective - 0.05).abs() < 1e-9, "{}", s.objective);
    }
}
