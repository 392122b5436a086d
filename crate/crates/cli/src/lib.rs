use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use persuade_core::regions::regions_csv;
use persuade_core::*;

pub const SEED_ENV: &str = "PERSUADE_SEED";

#[derive(Debug, Parser)]
#[command(name = "persuade", version, about = "Bayesian persuasion with a limited number of signals")]
pub struct Cli {
    /// Seed for randomized search; PERSUADE_SEED takes precedence.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Values closer than this are treated as equal when ranking structures.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tie: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Direct,
}

#[derive(Debug, Args)]
pub struct GameArgs {
    /// JSON game file, or one of: financial, threshold:PI, advice42.
    #[arg(long, default_value = "financial")]
    pub game: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal structure with at most K signals.
    Solve {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, short = 'k')]
        signals: usize,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 400)]
        iterations: usize,
        /// CSV with one row per induced posterior.
        #[arg(long)]
        output: Option<PathBuf>,
        /// CSV of region vertices and facets.
        #[arg(long)]
        regions: Option<PathBuf>,
    },
    /// V*(1..=KMAX) and its increments.
    Precision {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value_t = 3)]
        kmax: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Two- and three-signal values of the threshold game over a prior grid.
    Threshold {
        #[arg(long)]
        pi: f64,
        #[arg(long, default_value_t = 30)]
        grid: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Receiver's choice of signal count.
    Advice {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value_t = 3)]
        kmax: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Monotone partition of a continuum of states.
    Continuum {
        /// uniform, power:P, or piecewise:X=F,X=F (interior CDF knots).
        #[arg(long, default_value = "uniform")]
        prior: String,
        #[arg(long, value_delimiter = ',', required = true)]
        cutoffs: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        utilities: Vec<f64>,
        #[arg(long, short = 'k', default_value_t = 2)]
        signals: usize,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Solver against the brute-force oracle.
    Verify {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, short = 'k', default_value_t = 2)]
        signals: usize,
        #[arg(long, default_value_t = 40)]
        resolution: usize,
    },
    /// V*(K, mu) over a barycentric grid of priors (three-state games).
    Surface {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, short = 'k', default_value_t = 2)]
        signals: usize,
        #[arg(long, default_value_t = 40)]
        grid: usize,
        #[arg(long)]
        output: PathBuf,
    },
}

/// Settings shared by every subcommand after validation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: &'static str,
    pub game: Option<String>,
    pub k: Option<usize>,
    pub seed: u64,
    pub value_tie: f64,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli, env_seed: Option<&str>) -> Result<Self> {
        let seed = match env_seed {
            Some(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::validation("seed", format!("{SEED_ENV}={s:?} is not an unsigned integer")))?,
            None => cli.seed,
        };
        if !(cli.tie >= 0.0 && cli.tie < 1e-3) {
            return Err(Error::validation("tie", "must lie in [0, 1e-3)"));
        }
        let (command, game, k, output) = match &cli.command {
            Command::Solve { game, signals, output, .. } => ("solve", Some(&game.game), Some(*signals), output.clone()),
            Command::Precision { game, kmax, output } => ("precision", Some(&game.game), Some(*kmax), output.clone()),
            Command::Threshold { output, .. } => ("threshold", None, None, output.clone()),
            Command::Advice { game, kmax, output } => ("advice", Some(&game.game), Some(*kmax), output.clone()),
            Command::Continuum { signals, output, .. } => ("continuum", None, Some(*signals), output.clone()),
            Command::Verify { game, signals, .. } => ("verify", Some(&game.game), Some(*signals), None),
            Command::Surface { game, signals, output, .. } => {
                ("surface", Some(&game.game), Some(*signals), Some(output.clone()))
            }
        };
        if k == Some(0) {
            return Err(Error::validation("k", "must be at least 1"));
        }
        Ok(Self {
            command,
            game: game.cloned(),
            k,
            seed,
            value_tie: cli.tie,
            output,
        })
    }

    fn load(&self) -> Result<Game> {
        load_game(self.game.as_deref().unwrap_or("financial"))
    }

    fn options(&self) -> SolveOptions {
        SolveOptions {
            seed: self.seed,
            value_tie: self.value_tie,
            ..SolveOptions::default()
        }
    }
}

/// 0 ok, 2 invalid input, 3 beyond supported scale, 4 infeasible.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::ScaleExceeded(_) => 3,
        Error::Infeasible(_) => 4,
        _ => 2,
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{}: {e}", path.display()))
}

fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

fn belief_columns(game: &Game) -> Vec<String> {
    game.states().iter().map(|s| format!("mu_{s}")).collect()
}

/// CSV of `(mu_1, mu_2, mu_3, value)` over the interior grid of priors.
pub fn emit_surface(game: &Game, k: usize, grid: usize, out: &Path) -> Result<usize> {
    let surface = value_surface(game, k, grid)?;
    let mut header = belief_columns(game);
    header.push("value".into());
    let rows: Vec<Vec<String>> = surface
        .iter()
        .map(|(mu, v)| {
            let mut r: Vec<String> = mu.coords().iter().map(|x| x.to_string()).collect();
            r.push(v.to_string());
            r
        })
        .collect();
    write_csv(out, &header, &rows)?;
    Ok(rows.len())
}

pub fn parse_prior(spec: &str) -> Result<ContinuumPrior> {
    let prior = if spec == "uniform" {
        ContinuumPrior::Uniform
    } else if let Some(p) = spec.strip_prefix("power:") {
        ContinuumPrior::Power(
            p.parse()
                .map_err(|_| Error::validation("prior", format!("bad exponent {p:?}")))?,
        )
    } else if let Some(knots) = spec.strip_prefix("piecewise:") {
        let mut pts = vec![(0.0, 0.0)];
        for pair in knots.split(',').filter(|s| !s.is_empty()) {
            let (x, f) = pair
                .split_once('=')
                .ok_or_else(|| Error::validation("prior", format!("knot {pair:?} is not X=F")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::validation("prior", format!("bad number {s:?}")))
            };
            pts.push((parse(x)?, parse(f)?));
        }
        pts.push((1.0, 1.0));
        ContinuumPrior::PiecewiseLinear(pts)
    } else {
        return Err(Error::validation("prior", format!("unknown prior {spec:?}")));
    };
    prior.validate()?;
    Ok(prior)
}

pub fn run(cli: &Cli, env_seed: Option<&str>, out: &mut dyn Write) -> Result<()> {
    let cfg = RunConfig::from_cli(cli, env_seed)?;
    let say = |out: &mut dyn Write, line: String| {
        let _ = writeln!(out, "{line}");
    };
    match &cli.command {
        Command::Solve {
            signals,
            method,
            restarts,
            iterations,
            regions,
            ..
        } => {
            let game = cfg.load()?;
            let mut opts = cfg.options();
            if *method == Method::Direct {
                opts.method = InnerMethod::DirectSearch {
                    restarts: *restarts,
                    iterations: *iterations,
                };
            }
            let res = solve_with(&game, *signals, &opts)?;
            for w in &res.warnings {
                say(out, format!("warning: {w}"));
            }
            say(out, format!("value {:.9}", res.value));
            let mut rows = Vec::new();
            for (i, (b, w)) in res.structure.support.iter().zip(&res.structure.weights).enumerate() {
                let action = &game.actions()[res.actions[i]];
                say(out, format!("signal {i}: probability {w:.6} belief {:.6?} action {action}", b.coords()));
                let mut r = vec![i.to_string(), w.to_string(), action.clone()];
                r.extend(b.coords().iter().map(|x| x.to_string()));
                rows.push(r);
            }
            say(
                out,
                format!("collections evaluated {}, iterations {}", res.collections_evaluated, res.iterations),
            );
            if let Some(path) = &cfg.output {
                let mut header = vec!["signal".to_string(), "probability".into(), "action".into()];
                header.extend(belief_columns(&game));
                write_csv(path, &header, &rows)?;
            }
            if let Some(path) = regions {
                fs::write(path, regions_csv(&build_regions(&game))).map_err(|e| io_err(path, e))?;
            }
        }
        Command::Precision { kmax, .. } => {
            let game = cfg.load()?;
            let curve = value_curve_with(&game, *kmax, &cfg.options())?;
            let mut rows = Vec::new();
            for (i, v) in curve.values.iter().enumerate() {
                let inc = if i == 0 { f64::NAN } else { curve.increments[i - 1] };
                say(out, format!("k {} value {v:.9} increment {inc:.9}", i + 1));
                rows.push(vec![(i + 1).to_string(), v.to_string(), if i == 0 { String::new() } else { inc.to_string() }]);
            }
            if let Some(path) = &cfg.output {
                write_csv(path, &["k".into(), "value".into(), "increment".into()], &rows)?;
            }
        }
        Command::Threshold { pi, grid, .. } => {
            let params = ThresholdGameParams::new(*pi)?;
            let game = params.game();
            if let Ok((upper, lower)) = lemma7_bounds(*pi) {
                say(out, format!("central zone bounds on V(2): lower {lower:.9} upper {upper:.9}"));
            } else {
                say(out, "central zone is empty for pi_bar <= 2/3".into());
            }
            let v2 = value_surface(&game, 2, *grid)?;
            let v3 = value_surface(&game, 3, *grid)?;
            let mut rows = Vec::new();
            let mut short = 0;
            for ((mu, a), (_, b)) in v2.iter().zip(&v3) {
                let inside = in_delta_c(*pi, mu);
                if *b - *a > 1e-3 {
                    short += 1;
                }
                let mut r: Vec<String> = mu.coords().iter().map(|x| x.to_string()).collect();
                r.extend([inside.to_string(), a.to_string(), b.to_string()]);
                rows.push(r);
            }
            say(out, format!("{short} of {} grid priors have V(2) < V(3)", rows.len()));
            if let Some(path) = &cfg.output {
                let header: Vec<String> = ["mu_0", "mu_1", "mu_2", "in_central_zone", "v2", "v3"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect();
                write_csv(path, &header, &rows)?;
            }
        }
        Command::Advice { kmax, .. } => {
            let game = cfg.load()?;
            let eq = advice_equilibrium(&game, *kmax)?;
            let mut rows = Vec::new();
            for e in &eq.per_k {
                say(
                    out,
                    format!("k {} sender {:.6} receiver {:.6}", e.k, e.sender_value, e.receiver_value),
                );
                rows.push(vec![
                    e.k.to_string(),
                    e.sender_value.to_string(),
                    e.receiver_value.to_string(),
                    (e.k == eq.chosen_k).to_string(),
                ]);
            }
            say(out, format!("receiver chooses k = {}", eq.chosen_k));
            for w in eq.per_k.windows(2) {
                let order = blackwell_compare(&w[0].result.structure, &w[1].result.structure, game.prior())?;
                say(out, format!("k {} vs k {}: {order:?}", w[0].k, w[1].k));
            }
            if let Some(path) = &cfg.output {
                let header: Vec<String> = ["k", "sender_value", "receiver_value", "chosen"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect();
                write_csv(path, &header, &rows)?;
            }
        }
        Command::Continuum {
            prior,
            cutoffs,
            utilities,
            signals,
            grid,
            ..
        } => {
            let problem = ContinuumProblem::new(parse_prior(prior)?, cutoffs.clone(), utilities.clone())?;
            let (signal, value) = optimize_partition(&problem, *signals, *grid)?;
            say(out, format!("value {value:.9}"));
            let mut rows = Vec::new();
            for i in 0..signal.cells() {
                let (lo, hi) = (signal.breakpoints[i], signal.breakpoints[i + 1]);
                let (mass, mean) = (signal.interval_masses[i], signal.interval_means[i]);
                let action = problem.action_at(mean);
                say(out, format!("cell ({lo:.6}, {hi:.6}] mass {mass:.6} mean {mean:.6} action {action}"));
                rows.push(vec![
                    i.to_string(),
                    lo.to_string(),
                    hi.to_string(),
                    mass.to_string(),
                    mean.to_string(),
                    action.to_string(),
                ]);
            }
            if let Some(path) = &cfg.output {
                let header: Vec<String> = ["cell", "lower", "upper", "mass", "mean", "action"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect();
                write_csv(path, &header, &rows)?;
            }
        }
        Command::Verify { signals, resolution, .. } => {
            let game = cfg.load()?;
            let solved = solve_with(&game, *signals, &cfg.options())?.value;
            let (oracle, _) = brute_force_solve(&game, *signals, *resolution)?;
            let allowance = lipschitz_gap(&game, *resolution);
            say(out, format!("solver {solved:.9}"));
            say(out, format!("oracle {oracle:.9}"));
            say(out, format!("gap {:.3e} (allowance {allowance:.3e})", solved - oracle));
            if oracle > solved + 1e-6 {
                say(out, "oracle exceeds solver".into());
            }
        }
        Command::Surface { signals, grid, output, .. } => {
            let game = cfg.load()?;
            let count = emit_surface(&game, *signals, *grid, output)?;
            say(out, format!("wrote {count} rows to {}", output.display()));
        }
    }
    Ok(())
}
