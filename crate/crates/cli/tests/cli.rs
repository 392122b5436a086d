use std::process::{Command, Output};

use clap::Parser;
use persuade_cli::{emit_surface, parse_prior, Cli, RunConfig};
use persuade_core::{financial_game, save_game, Error};

fn persuade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_persuade"))
        .args(args)
        .env_remove("PERSUADE_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn solve_financial() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("solve.csv");
    let o = persuade(&["solve", "--game", "financial", "-k", "2", "--output", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("value 0.300000000"));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    let total: f64 = rdr
        .records()
        .map(|r| r.unwrap()[1].parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    assert_eq!(persuade(&["solve", "-k", "0"]).status.code(), Some(2));
    assert_eq!(persuade(&["solve", "-k", "9"]).status.code(), Some(3));
    assert_eq!(persuade(&["verify", "--resolution", "500"]).status.code(), Some(3));
    assert_eq!(persuade(&["solve", "--game", "threshold:2", "-k", "2"]).status.code(), Some(2));
    assert_eq!(persuade(&["solve", "--game", "/no/such/file.json", "-k", "2"]).status.code(), Some(2));
    assert_eq!(persuade(&["bogus"]).status.code(), Some(2));
}

#[test]
fn malformed_prior_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"states":["a","b","c"],"actions":["x","y"],"receiver_payoffs":[[1,0,0],[0,1,0]],
           "sender_payoffs":[[1,1,1],[0,0,0]],"prior":[0.3,0.3,0.3]}"#,
    )
    .unwrap();
    let o = persuade(&["solve", "--game", path.to_str().unwrap(), "-k", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("prior"));
}

#[test]
fn game_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fin.json");
    save_game(&financial_game(), &path).unwrap();
    let o = persuade(&["solve", "--game", path.to_str().unwrap(), "-k", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("value 0.420000000"));
}

#[test]
fn seed_from_environment() {
    let cli = Cli::try_parse_from(["persuade", "--seed", "5", "solve", "-k", "2"]).unwrap();
    assert_eq!(RunConfig::from_cli(&cli, None).unwrap().seed, 5);
    assert_eq!(RunConfig::from_cli(&cli, Some("17")).unwrap().seed, 17);
    assert!(matches!(RunConfig::from_cli(&cli, Some("x")), Err(Error::Validation { .. })));
    let o = Command::new(env!("CARGO_BIN_EXE_persuade"))
        .args(["solve", "-k", "2", "--method", "direct"])
        .env("PERSUADE_SEED", "3")
        .output()
        .unwrap();
    assert!(o.status.success());
}

#[test]
fn surface_rows_validate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("surface.csv");
    let rows = emit_surface(&financial_game(), 2, 40, &out).unwrap();
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    let mut seen = 0;
    let mut at_prior = None;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let v: Vec<f64> = rec.iter().map(|x| x.parse().unwrap()).collect();
        assert!((v[0] + v[1] + v[2] - 1.0).abs() < 1e-12);
        assert!(v[3].is_finite());
        if (v[0] - 0.3).abs() < 1e-9 && (v[1] - 0.4).abs() < 1e-9 {
            at_prior = Some(v[3]);
        }
        seen += 1;
    }
    assert_eq!(seen, rows);
    assert!((at_prior.unwrap() - 0.30).abs() < 1e-3);
}

#[test]
fn surface_needs_three_states() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("two.json");
    std::fs::write(
        &path,
        r#"{"states":["a","b"],"actions":["x","y"],"receiver_payoffs":[[1,-1],[0,0]],
           "sender_payoffs":[[1,1],[0,0]],"prior":[0.4,0.6]}"#,
    )
    .unwrap();
    let out = dir.path().join("s.csv");
    let o = persuade(&["surface", "--game", path.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn other_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();

    let o = persuade(&["precision", "--game", "threshold:0.8", "--kmax", "3", "--output", &csv_path("p.csv")]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("k 3 value 1.0"));

    let o = persuade(&["threshold", "--pi", "0.8", "--grid", "12", "--output", &csv_path("t.csv")]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("lower 0.416666667"));

    let o = persuade(&["advice", "--game", "advice42", "--output", &csv_path("a.csv")]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("receiver chooses k ="));

    let o = persuade(&[
        "continuum", "--prior", "uniform", "--cutoffs", "0.6", "--utilities", "0,1", "--signals", "2", "--grid", "200",
        "--output", &csv_path("c.csv"),
    ]);
    assert!(o.status.success());
    let rows = csv::Reader::from_path(dir.path().join("c.csv")).unwrap().records().count();
    assert_eq!(rows, 2);

    let o = persuade(&["verify", "--game", "financial", "-k", "2", "--resolution", "40"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("oracle 0.3"));
}

#[test]
fn continuum_priors() {
    assert!(parse_prior("power:2").is_ok());
    assert!(parse_prior("piecewise:0.5=0.25").is_ok());
    assert!(matches!(parse_prior("piecewise:0.5=0.9,0.6=0.5"), Err(Error::Validation { .. })));
    assert!(matches!(parse_prior("beta"), Err(Error::Validation { .. })));
}
