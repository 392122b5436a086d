use std::fmt;
use std::sync::Arc;

use crate::combos::Combinations;
use crate::error::{Error, Result};
use crate::tol;

const QUAD_TOL: f64 = 1e-10;

/// Prior distribution on `[0, 1]` given by its CDF.
#[derive(Clone)]
pub enum ContinuumPrior {
    Uniform,
    /// `F(x) = x^p`, `p > 0`.
    Power(f64),
    /// Linear interpolation of `(x, F(x))` knots from `(0, 0)` to `(1, 1)`.
    PiecewiseLinear(Vec<(f64, f64)>),
    /// Arbitrary continuous CDF; integrals by adaptive Simpson.
    Tabulated(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for ContinuumPrior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform => write!(f, "Uniform"),
            Self::Power(p) => write!(f, "Power({p})"),
            Self::PiecewiseLinear(k) => write!(f, "PiecewiseLinear({k:?})"),
            Self::Tabulated(_) => write!(f, "Tabulated(..)"),
        }
    }
}

impl ContinuumPrior {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Uniform => Ok(()),
            Self::Power(p) if *p > 0.0 && p.is_finite() => Ok(()),
            Self::Power(p) => Err(Error::validation("prior", format!("power {p} must be positive"))),
            Self::PiecewiseLinear(k) => {
                let ok = k.len() >= 2
                    && k[0] == (0.0, 0.0)
                    && k[k.len() - 1] == (1.0, 1.0)
                    && k.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1);
                if ok {
                    Ok(())
                } else {
                    Err(Error::validation(
                        "prior",
                        "knots must run from (0,0) to (1,1), strictly increasing in both coordinates",
                    ))
                }
            }
            Self::Tabulated(f) => {
                let ok = (f(0.0)).abs() < 1e-12
                    && (f(1.0) - 1.0).abs() < 1e-12
                    && (1..=100).all(|i| f(i as f64 / 100.0) >= f((i - 1) as f64 / 100.0));
                if ok {
                    Ok(())
                } else {
                    Err(Error::validation("prior", "CDF must be monotone with F(0) = 0 and F(1) = 1"))
                }
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match self {
            Self::Uniform => x,
            Self::Power(p) => x.powf(*p),
            Self::PiecewiseLinear(k) => {
                let i = k.partition_point(|&(kx, _)| kx <= x).clamp(1, k.len() - 1);
                let (x0, f0) = k[i - 1];
                let (x1, f1) = k[i];
                f0 + (f1 - f0) * (x - x0) / (x1 - x0)
            }
            Self::Tabulated(f) => f(x),
        }
    }

    /// `int_a^b F(t) dt`.
    pub fn cdf_integral(&self, a: f64, b: f64) -> f64 {
        let (a, b) = (a.clamp(0.0, 1.0), b.clamp(0.0, 1.0));
        match self {
            Self::Uniform => (b * b - a * a) / 2.0,
            Self::Power(p) => (b.powf(p + 1.0) - a.powf(p + 1.0)) / (p + 1.0),
            Self::PiecewiseLinear(k) => {
                let mut total = 0.0;
                for w in k.windows(2) {
                    let lo = w[0].0.max(a);
                    let hi = w[1].0.min(b);
                    if hi > lo {
                        total += (hi - lo) * (self.cdf(lo) + self.cdf(hi)) / 2.0;
                    }
                }
                total
            }
            Self::Tabulated(f) => adaptive_simpson(&|x| f(x), a, b, QUAD_TOL),
        }
    }

    pub fn mean(&self) -> f64 {
        1.0 - self.cdf_integral(0.0, 1.0)
    }
}

pub(crate) fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    recurse(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), eps, 40)
}

#[derive(Debug, Clone)]
pub struct ContinuumProblem {
    pub prior: ContinuumPrior,
    /// Strictly increasing, inside `(0, 1)`.
    pub cutoffs: Vec<f64>,
    /// One more than `cutoffs`; action `i` is taken for posterior means in
    /// `[gamma_{i-1}, gamma_i)`.
    pub utilities: Vec<f64>,
}

impl ContinuumProblem {
    pub fn new(prior: ContinuumPrior, cutoffs: Vec<f64>, utilities: Vec<f64>) -> Result<Self> {
        prior.validate()?;
        if cutoffs.is_empty() {
            return Err(Error::validation("cutoffs", "at least one cutoff required"));
        }
        if cutoffs.iter().any(|&c| !(c > 0.0 && c < 1.0)) || cutoffs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::validation("cutoffs", "must be strictly increasing inside (0, 1)"));
        }
        if utilities.len() != cutoffs.len() + 1 {
            return Err(Error::validation(
                "utilities",
                format!("expected {} values, got {}", cutoffs.len() + 1, utilities.len()),
            ));
        }
        if utilities.iter().any(|u| !u.is_finite()) {
            return Err(Error::validation("utilities", "must be finite"));
        }
        Ok(Self {
            prior,
            cutoffs,
            utilities,
        })
    }

    pub fn prior_mean(&self) -> f64 {
        self.prior.mean()
    }

    /// Action taken at a posterior mean; a mean on a cutoff takes the better
    /// (for the sender) of the two adjacent actions.
    pub fn action_at(&self, mean: f64) -> usize {
        let above = self.cutoffs.iter().filter(|&&g| mean >= g + tol::INDIFFERENCE).count();
        match self.cutoffs.iter().position(|&g| (mean - g).abs() < tol::INDIFFERENCE) {
            Some(j) if self.utilities[j + 1] > self.utilities[j] => j + 1,
            Some(j) => j,
            None => above,
        }
    }
}

pub fn conditional_mean(problem: &ContinuumProblem, a: f64, b: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&a) || !(b > a && b <= 1.0) {
        return Err(Error::Domain(format!("need 0 <= a < b <= 1, got ({a}, {b})")));
    }
    let p = &problem.prior;
    let (fa, fb) = (p.cdf(a), p.cdf(b));
    let mass = fb - fa;
    if mass <= 1e-15 {
        return Err(Error::EmptyInterval { a, b });
    }
    // integration by parts: int x dF = b F(b) - a F(a) - int F
    Ok((b * fb - a * fa - p.cdf_integral(a, b)) / mass)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionSignal {
    /// `0 = x_0 < x_1 < ... < x_K = 1`.
    pub breakpoints: Vec<f64>,
    pub interval_means: Vec<f64>,
    pub interval_masses: Vec<f64>,
}

impl PartitionSignal {
    pub fn from_breakpoints(problem: &ContinuumProblem, breakpoints: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2
            || breakpoints[0] != 0.0
            || *breakpoints.last().unwrap() != 1.0
            || breakpoints.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::validation(
                "breakpoints",
                "must increase strictly from 0 to 1",
            ));
        }
        let mut means = Vec::new();
        let mut masses = Vec::new();
        for w in breakpoints.windows(2) {
            means.push(conditional_mean(problem, w[0], w[1])?);
            masses.push(problem.prior.cdf(w[1]) - problem.prior.cdf(w[0]));
        }
        Ok(Self {
            breakpoints,
            interval_means: means,
            interval_masses: masses,
        })
    }

    pub fn uninformative(problem: &ContinuumProblem) -> Self {
        Self::from_breakpoints(problem, vec![0.0, 1.0]).expect("full support prior")
    }

    pub fn cells(&self) -> usize {
        self.interval_means.len()
    }

    /// `c_G(x) = int_0^x G = sum_i mass_i max(0, x - mean_i)`.
    pub fn integral(&self, x: f64) -> f64 {
        self.interval_means
            .iter()
            .zip(&self.interval_masses)
            .map(|(m, w)| w * (x - m).max(0.0))
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct Envelopes {
    prior: ContinuumPrior,
    prior_mean: f64,
}

impl Envelopes {
    /// Uninformative signal: `max(0, x - m0)`.
    pub fn c0(&self, x: f64) -> f64 {
        (x - self.prior_mean).max(0.0)
    }

    /// Fully revealing signal: `int_0^x F`.
    pub fn c1(&self, x: f64) -> f64 {
        self.prior.cdf_integral(0.0, x)
    }

    pub fn prior_mean(&self) -> f64 {
        self.prior_mean
    }
}

pub fn envelopes(problem: &ContinuumProblem) -> Envelopes {
    Envelopes {
        prior: problem.prior.clone(),
        prior_mean: problem.prior_mean(),
    }
}

pub fn sender_value_continuum(problem: &ContinuumProblem, signal: &PartitionSignal) -> f64 {
    signal
        .interval_means
        .iter()
        .zip(&signal.interval_masses)
        .map(|(&m, &w)| w * problem.utilities[problem.action_at(m)])
        .sum()
}

fn value_at(problem: &ContinuumProblem, inner: &[f64]) -> Option<(PartitionSignal, f64)> {
    let mut bp = Vec::with_capacity(inner.len() + 2);
    bp.push(0.0);
    bp.extend_from_slice(inner);
    bp.push(1.0);
    let signal = PartitionSignal::from_breakpoints(problem, bp).ok()?;
    let v = sender_value_continuum(problem, &signal);
    Some((signal, v))
}

/// Best monotone partition with at most `k` cells: exhaustive grid over
/// interior breakpoints, then per-breakpoint golden-section search and
/// snapping of breakpoints so that a neighbouring cell mean lands exactly on a
/// cutoff.
pub fn optimize_partition(problem: &ContinuumProblem, k: usize, grid: usize) -> Result<(PartitionSignal, f64)> {
    if k == 0 {
        return Err(Error::validation("k", "at least one cell required"));
    }
    if grid < 10 {
        return Err(Error::validation("grid", "must be at least 10"));
    }
    let mut best = {
        let s = PartitionSignal::uninformative(problem);
        let v = sender_value_continuum(problem, &s);
        (s, v)
    };
    let points: Vec<f64> = (1..grid).map(|i| i as f64 / grid as f64).collect();
    for cuts in 1..k {
        let mut level: Option<(PartitionSignal, f64)> = None;
        for idx in Combinations::new(points.len(), cuts) {
            let inner: Vec<f64> = idx.iter().map(|&i| points[i]).collect();
            if let Some((s, v)) = value_at(problem, &inner) {
                if level.as_ref().is_none_or(|l| v > l.1 + tol::VALUE_TIE) {
                    level = Some((s, v));
                }
            }
        }
        if let Some(start) = level {
            let refined = refine(problem, start, 1.0 / grid as f64);
            if refined.1 > best.1 + tol::VALUE_TIE {
                best = refined;
            }
        }
    }
    Ok(best)
}

fn inner_of(signal: &PartitionSignal) -> Vec<f64> {
    signal.breakpoints[1..signal.breakpoints.len() - 1].to_vec()
}

fn refine(problem: &ContinuumProblem, mut best: (PartitionSignal, f64), h: f64) -> (PartitionSignal, f64) {
    for _round in 0..4 {
        let before = best.1;
        for i in 0..best.0.cells() - 1 {
            let inner = inner_of(&best.0);
            let lo = if i == 0 { 0.0 } else { inner[i - 1] };
            let hi = if i + 1 == inner.len() { 1.0 } else { inner[i + 1] };
            let mut candidates = snap_targets(problem, lo, hi);
            let (a, b) = ((inner[i] - h).max(lo + 1e-12), (inner[i] + h).min(hi - 1e-12));
            if b > a {
                candidates.push(golden_section(
                    |x| {
                        let mut trial = inner.clone();
                        trial[i] = x;
                        value_at(problem, &trial).map_or(f64::NEG_INFINITY, |(_, v)| v)
                    },
                    a,
                    b,
                ));
            }
            for x in candidates {
                if !(x > lo && x < hi) {
                    continue;
                }
                let mut trial = inner.clone();
                trial[i] = x;
                if let Some((s, v)) = value_at(problem, &trial) {
                    if v > best.1 + tol::VALUE_TIE {
                        best = (s, v);
                    }
                }
            }
        }
        if best.1 <= before + tol::VALUE_TIE {
            break;
        }
    }
    best
}

/// Positions of a breakpoint in `(lo, hi)` at which the cell to its left or
/// right has mean exactly on some cutoff (cell means move monotonically with
/// the breakpoint, so bisection applies).
fn snap_targets(problem: &ContinuumProblem, lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for &g in &problem.cutoffs {
        // left cell (lo, x]: mean increases with x
        if let Some(x) = bisect(|x| conditional_mean(problem, lo, x).unwrap_or(f64::NAN) - g, lo + 1e-12, hi - 1e-12) {
            out.push(x);
        }
        // right cell (x, hi]: mean increases with x
        if let Some(x) = bisect(|x| conditional_mean(problem, x, hi).unwrap_or(f64::NAN) - g, lo + 1e-12, hi - 1e-12) {
            out.push(x);
        }
    }
    out
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> Option<f64> {
    let (mut fa, fb) = (f(a), f(b));
    if !(fa.is_finite() && fb.is_finite()) || fa * fb > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 || (b - a) < 1e-15 {
            return Some(m);
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    // land on the side where the mean reaches the cutoff
    Some(if fa >= 0.0 { a } else { b })
}

/// Maximizer of `f` on `[a, b]` by golden-section search, returning the best
/// point evaluated (the objective may be discontinuous).
fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut best = (a, f(a));
    let fb = f(b);
    if fb > best.1 {
        best = (b, fb);
    }
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        for (x, v) in [(c, fc), (d, fd)] {
            if v > best.1 {
                best = (x, v);
            }
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    best.0
}
