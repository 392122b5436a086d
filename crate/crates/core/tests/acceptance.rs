//! One PASS/FAIL line per acceptance criterion; the process fails if any
//! criterion does.

use std::panic;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use persuade_core::sample::{random_belief, random_game, random_structure};
use persuade_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    name: &'static str,
    ok: bool,
    detail: String,
}

fn report(name: &'static str, ok: bool, detail: String) -> Outcome {
    Outcome { name, ok, detail }
}

fn near(b: &Belief, target: &[f64], tol: f64) -> bool {
    b.coords().iter().zip(target).all(|(x, y)| (x - y).abs() <= tol)
}

fn matches_support(support: &[Belief], targets: &[Vec<f64>], tol: f64) -> bool {
    support.len() == targets.len()
        && targets.iter().all(|t| support.iter().any(|b| near(b, t, tol)))
}

fn criterion_1_financial_example() -> Outcome {
    let start = Instant::now();
    let g = financial_game();
    let two = solve(&g, 2).unwrap();
    let three = solve(&g, 3).unwrap();
    let elapsed = start.elapsed();
    let pair = vec![vec![1.0, 0.0, 0.0], vec![0.0, 4.0 / 7.0, 3.0 / 7.0]];
    let mirrored = vec![vec![0.0, 0.0, 1.0], vec![3.0 / 7.0, 4.0 / 7.0, 0.0]];
    let two_ok = (two.value - 0.30).abs() <= 0.005
        && (matches_support(&two.structure.support, &pair, 0.02)
            || matches_support(&two.structure.support, &mirrored, 0.02));
    let vertices: Vec<Vec<f64>> = (0..3).map(|i| Belief::vertex(3, i).coords().to_vec()).collect();
    let mut weights_ok = matches_support(&three.structure.support, &vertices, 1e-9);
    for (b, w) in three.structure.support.iter().zip(&three.structure.weights) {
        let i = b.coords().iter().position(|&v| v > 0.5).unwrap_or(0);
        weights_ok &= (w - [0.3, 0.4, 0.3][i]).abs() <= 0.01;
    }
    let three_ok = (three.value - 0.42).abs() <= 0.005 && weights_ok;
    report(
        "financial example",
        two_ok && three_ok && elapsed < Duration::from_secs(10),
        format!(
            "V(2) = {:.6} support {:?}, V(3) = {:.6} weights {:?}, {:.2?}",
            two.value, two.structure.support, three.value, three.structure.weights, elapsed
        ),
    )
}

fn criterion_2_where_two_signals_lose() -> Outcome {
    let start = Instant::now();
    let mut worst_gap = f64::NEG_INFINITY;
    for pi in [0.60, 2.0 / 3.0] {
        let g = threshold_game(pi).unwrap();
        let v2 = value_surface(&g, 2, 60).unwrap();
        let v3 = value_surface(&g, 3, 60).unwrap();
        for ((_, a), (_, b)) in v2.iter().zip(&v3) {
            worst_gap = worst_gap.max(b - a);
        }
    }
    let g = threshold_game(0.8).unwrap();
    let short = value_surface(&g, 2, 60)
        .unwrap()
        .into_iter()
        .filter(|(mu, v)| in_delta_c(0.8, mu) && *v <= 1.0 - 1e-3)
        .count();
    let elapsed = start.elapsed();
    report(
        "two signals fall short only when pi_bar >= 2/3",
        worst_gap < 1e-3 && short >= 1 && elapsed < Duration::from_secs(300),
        format!(
            "max V(3) - V(2) for pi_bar in {{0.6, 2/3}} = {worst_gap:.2e}; {short} grid priors in the central zone below 1 at pi_bar 0.8; {elapsed:.2?}"
        ),
    )
}

fn permutations3(v: &[f64]) -> Vec<Vec<f64>> {
    let p = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    p.iter().map(|ix| ix.iter().map(|&i| v[i]).collect()).collect()
}

fn criterion_3_central_zone_bounds() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut bounds_ok = true;
    let mut corner_ok = true;
    let mut center_ok = true;
    let mut lines = Vec::new();
    for pi in [0.7, 0.8, 0.9] {
        let g = threshold_game(pi).unwrap();
        let catalog = FacetCatalog::build(&g);
        let opts = SolveOptions::default();
        let (upper, lower) = lemma7_bounds(pi).unwrap();
        let v2 = |prior: Vec<f64>| {
            let gp = g.with_prior(prior).unwrap();
            solve_with_catalog(&gp, &catalog, 2, &opts).unwrap().value
        };
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for _ in 0..100 {
            // uniform on the central zone, a shrunken copy of the simplex
            let b = random_belief(&mut rng, 3);
            let side = 3.0 * pi - 2.0;
            let mu: Vec<f64> = b.coords().iter().map(|x| 1.0 - pi + side * x).collect();
            let v = v2(mu);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        bounds_ok &= lo >= lower - 1e-3 && hi <= upper + 1e-3;
        let corner = ThresholdGameParams::new(pi).unwrap().corner_prior();
        let corner_values: Vec<f64> = permutations3(&corner).into_iter().map(&v2).collect();
        corner_ok &= corner_values.iter().all(|v| (v - upper).abs() <= 0.005);
        let center = v2(vec![1.0 / 3.0; 3]);
        center_ok &= (center - lower).abs() <= 0.005;
        lines.push(format!(
            "pi_bar {pi}: sampled V(2) in [{lo:.4}, {hi:.4}] vs bounds [{lower:.4}, {upper:.4}], corner values {corner_values:.4?} vs {upper:.4}, barycenter {center:.4} vs {lower:.4}"
        ));
    }
    let elapsed = start.elapsed();
    report(
        "two-signal bounds in the central zone",
        bounds_ok && corner_ok && center_ok && elapsed < Duration::from_secs(600),
        format!(
            "samples within bounds: {bounds_ok}; corners: {corner_ok}; barycenter: {center_ok}; {}; {elapsed:.2?}",
            lines.join("; ")
        ),
    )
}

fn criterion_4_increments_change_order() -> Outcome {
    let g = threshold_game(0.8).unwrap();
    let center = value_curve(&g, 3).unwrap();
    let skewed = value_curve(&g.with_prior(vec![0.6, 0.2, 0.2]).unwrap(), 3).unwrap();
    report(
        "value of precision non-monotone",
        center.increments_increasing() && skewed.increments_decreasing(),
        format!(
            "barycenter values {:.4?} increments {:.4?}; (0.6,0.2,0.2) values {:.4?} increments {:.4?}",
            center.values, center.increments, skewed.values, skewed.increments
        ),
    )
}

fn criterion_5_precision_bound() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let games: Vec<Game> = (0..100).map(|_| random_game(&mut rng, 4, 4, (0.1, 1.0))).collect();
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    for g in &games {
        let check = check_theorem3_bound(g, 3).unwrap();
        worst = worst.min(check.slack);
        if check.slack < -1e-6 {
            failures += 1;
        }
    }
    let elapsed = start.elapsed();
    report(
        "third signal worth at most 2/k of the value",
        failures == 0 && elapsed < Duration::from_secs(900),
        format!("100 games, {failures} violations, smallest slack {worst:.4e}, {elapsed:.2?}"),
    )
}

fn criterion_6_solver_matches_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_excess = f64::NEG_INFINITY;
    let mut hull_violations = 0;
    let mut failures = 0;
    for i in 0..50 {
        let m = if i % 2 == 0 { 3 } else { 4 };
        let g = random_game(&mut rng, 3, m, (-1.0, 1.0));
        let solved = solve(&g, 2).unwrap().value;
        let (oracle, _) = brute_force_solve(&g, 2, 50).unwrap();
        let allowance = lipschitz_gap(&g, 50).max(0.01);
        let diff = (solved - oracle).abs();
        worst_excess = worst_excess.max(diff - allowance);
        if diff > allowance {
            failures += 1;
        }
        if k_convex_hull_value_with(&g, 2, 2000, i, &[]) > solved + 1e-6 {
            hull_violations += 1;
        }
    }
    report(
        "solver agrees with brute force",
        failures == 0 && hull_violations == 0,
        format!(
            "50 games: {failures} outside allowance (worst excess {worst_excess:.3e}), {hull_violations} hull values above the solver"
        ),
    )
}

fn criterion_7_advice_seeking() -> Outcome {
    let g = example_4_2_game();
    let eq = advice_equilibrium(&g, 3).unwrap();
    let two = &eq.per_k[1].result.structure;
    let three = &eq.per_k[2].result.structure;
    let order = blackwell_compare(two, three, g.prior()).unwrap();
    let aligned = advice_equilibrium(&aligned_variant(&g), 3).unwrap();
    let receiver: Vec<f64> = eq.per_k.iter().map(|e| e.receiver_value).collect();
    let sender: Vec<f64> = eq.per_k.iter().map(|e| e.sender_value).collect();
    report(
        "receiver asks for coarse advice",
        eq.chosen_k == 2 && order == Informativeness::Incomparable && aligned.chosen_k == 3,
        format!(
            "chosen k = {} (receiver values {receiver:.4?}, sender values {sender:.4?}); k=2 vs k=3 optimum: {order:?}; aligned chosen k = {}",
            eq.chosen_k, aligned.chosen_k
        ),
    )
}

fn criterion_8_improvement_steps() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_drop = f64::NEG_INFINITY;
    let mut worst_residual: f64 = 0.0;
    let mut dependent_outputs = 0;
    let mut count = 0;
    for _ in 0..50 {
        let n = rng.random_range(2..=5);
        let m = rng.random_range(2..=5);
        let g = random_game(&mut rng, n, m, (-1.0, 1.0));
        for _ in 0..10 {
            let size = rng.random_range(1..=n + 2);
            let tau = random_structure(&mut rng, g.prior(), size);
            let (before, _) = expected_values(&g, &tau).unwrap();
            let projected = project_to_boundary(&g, &tau).unwrap();
            let reduced = reduce_affinely_dependent(&g, &tau).unwrap();
            for out in [&projected, &reduced] {
                let (after, _) = expected_values(&g, out).unwrap();
                worst_drop = worst_drop.max(before - after);
                worst_residual = worst_residual.max(out.plausibility_residual(g.prior()));
            }
            if !is_affinely_independent(&reduced.support) {
                dependent_outputs += 1;
            }
            count += 1;
        }
    }
    report(
        "boundary projection and reduction",
        count == 500 && worst_drop <= 1e-9 && worst_residual <= 1e-9 && dependent_outputs == 0,
        format!(
            "{count} structures: largest value drop {worst_drop:.2e}, largest plausibility residual {worst_residual:.2e}, {dependent_outputs} dependent reductions"
        ),
    )
}

fn criterion_9_continuum_partition() -> Outcome {
    let start = Instant::now();
    let p = ContinuumProblem::new(ContinuumPrior::Uniform, vec![0.6], vec![0.0, 1.0]).unwrap();
    let runs: Vec<(PartitionSignal, f64)> = (1..=3).map(|k| optimize_partition(&p, k, 200).unwrap()).collect();
    let (two, v2) = &runs[1];
    let monotone = runs.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-9);
    let env = envelopes(&p);
    let mut inside = true;
    for (signal, _) in &runs {
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            let c = signal.integral(x);
            inside &= c >= env.c0(x) - 1e-9 && c <= env.c1(x) + 1e-9;
        }
    }
    let elapsed = start.elapsed();
    let breakpoint = two.breakpoints.get(1).copied().unwrap_or(f64::NAN);
    report(
        "continuum partition",
        (v2 - 0.8).abs() <= 0.005
            && two.cells() == 2
            && (breakpoint - 0.2).abs() <= 0.01
            && monotone
            && inside
            && elapsed < Duration::from_secs(30),
        format!(
            "k=2 value {v2:.6} breakpoint {breakpoint:.6}; values by k {:?}; envelopes respected: {inside}; {elapsed:.2?}",
            runs.iter().map(|r| r.1).collect::<Vec<_>>()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [fn() -> Outcome; 9] = [
        criterion_1_financial_example,
        criterion_2_where_two_signals_lose,
        criterion_3_central_zone_bounds,
        criterion_4_increments_change_order,
        criterion_5_precision_bound,
        criterion_6_solver_matches_oracle,
        criterion_7_advice_seeking,
        criterion_8_improvement_steps,
        criterion_9_continuum_partition,
    ];
    let mut failed = 0;
    for (i, run) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(run).unwrap_or_else(|e| Outcome {
            name: "panicked",
            ok: false,
            detail: e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default(),
        });
        let verdict = if outcome.ok { "PASS" } else { "FAIL" };
        println!("criterion {} [{}] {verdict}: {}", i + 1, outcome.name, outcome.detail);
        if !outcome.ok {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
