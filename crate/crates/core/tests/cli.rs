use std::path::Path;
use std::process::{Command, Output};

use afrelay::cli::{parse_config, Cli, CommandConfig};
use clap::Parser;

fn afrelay(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_afrelay")).args(args).output().expect("binary runs")
}

fn config(args: &[&str]) -> afrelay::Result<afrelay::cli::RunConfig> {
    let argv = std::iter::once("afrelay").chain(args.iter().copied());
    parse_config(Cli::try_parse_from(argv).expect("flags parse"))
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn minimal_rates_flags_resolve() {
    let cfg = config(&["rates", "--k", "2", "--m", "2", "--snr-db", "20", "--samples", "10000", "--seed", "7"]).unwrap();
    assert_eq!(cfg.seed, 7);
    assert_eq!(cfg.samples, 10_000);
    match cfg.command {
        CommandConfig::Rates { k, m, ref snr_db, .. } => {
            assert_eq!((k, m), (2, 2));
            assert_eq!(snr_db, &[20.0]);
        }
        ref other => panic!("wrong command {other:?}"),
    }
}

#[test]
fn zero_k_names_the_key() {
    let err = config(&["rates", "--k", "0"]).unwrap_err();
    assert!(err.is_validation());
    assert!(err.to_string().starts_with("k:"), "{err}");

    let out = afrelay(&["rates", "--k", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("k:"));
}

#[test]
fn flags_override_file_values() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "samples = 1000\nseed = 3\nk = 3\n").unwrap();
    let p = path.to_str().unwrap();

    let cfg = config(&["rates", "--config", p, "--samples", "5000"]).unwrap();
    assert_eq!(cfg.samples, 5000);
    assert_eq!(cfg.seed, 3);
    assert!(matches!(cfg.command, CommandConfig::Rates { k: 3, .. }));

    let cfg = config(&["rates", "--config", p]).unwrap();
    assert_eq!(cfg.samples, 1000);
}

#[test]
fn unknown_and_mistyped_file_keys_are_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");

    std::fs::write(&path, "kk = 2\n").unwrap();
    let err = config(&["rates", "--config", path.to_str().unwrap()]).unwrap_err();
    assert!(err.to_string().contains("kk"), "{err}");

    std::fs::write(&path, "n_b = \"many\"\n").unwrap();
    let err = config(&["simulate", "--config", path.to_str().unwrap()]).unwrap_err();
    assert!(err.to_string().starts_with("n_b"), "{err}");
}

#[test]
fn single_antenna_preset_for_three_pairs() {
    let out = afrelay(&["dof", "--preset", "theorem1", "--k", "3", "--layers", "3,3,3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["labels"], serde_json::json!(["d1", "d2", "d3"]));
    assert_eq!(v["inequalities"].as_array().unwrap().len(), 4);
    assert_eq!(
        v["inequalities"][3],
        serde_json::json!({"coeffs": [1, 1, 1], "rhs": 3})
    );
    assert_eq!(v["corners"], serde_json::json!([[1, 1, 1]]));
}

#[test]
fn sweep_is_bit_identical_on_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let args = |sub: &str| {
        let out = dir.path().join(sub);
        let out = out.to_str().unwrap().to_string();
        afrelay(&[
            "sweep", "--k", "2", "--m", "2", "--snr-db", "0:40:10", "--samples", "20000", "--seed", "7", "--out", &out,
        ])
    };
    let a = args("a");
    let b = args("b");
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(b.status.code(), Some(0));
    let csv_a = read(&dir.path().join("a"), "sweep.csv");
    let csv_b = read(&dir.path().join("b"), "sweep.csv");
    assert_eq!(csv_a, csv_b);
    let lines: Vec<&str> = csv_a.lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(
        lines[0],
        "snr_db,k,m,scheme,achievable_sum_bits,cutset_sum_bits,gap_bits,stderr,samples,seed"
    );
    assert!(lines[1].starts_with("0.0,2,2,two-hop,"));
    assert!(lines[5].starts_with("40.0,2,2,two-hop,"));

    let meta: serde_json::Value = serde_json::from_str(&read(&dir.path().join("a"), "sweep.csv.meta.json")).unwrap();
    assert_eq!(meta["seed"], 7);
    assert_eq!(meta["config"]["samples"], 20000);
    assert_eq!(meta["config"]["command"]["name"], "sweep");
    // no temporaries left behind
    let mut names: Vec<String> =
        std::fs::read_dir(dir.path().join("a")).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["sweep.csv", "sweep.csv.meta.json"]);
}

#[test]
fn simulate_rejects_short_block_for_three_hops() {
    let out = afrelay(&["simulate", "--m", "3", "--sub-blocks", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("B"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn simulate_writes_one_row_per_pair_and_seed() {
    let out = afrelay(&["simulate", "--k", "1", "--n-b", "500", "--replicas", "2", "--seed", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "seed,pair,rate_bits,mean_sinr_db,e1,e2,utilization");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("4,1,"));
    assert!(lines[2].starts_with("5,1,"));
}

#[test]
fn plot_data_and_slice_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = afrelay(&["sweep", "--samples", "200", "--snr-db", "10,20", "--plot-data", "--out", d]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["sweep_achievable.dat", "sweep_cutset.dat", "sweep_gap.dat"] {
        let text = read(dir.path(), name);
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().all(|l| l.split(' ').count() == 2));
    }

    let out = afrelay(&["dof", "--k", "2", "--layers", "2,2,2", "--slice", "1,2", "--out", d]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let slice = read(dir.path(), "dof_slice.csv");
    assert_eq!(slice, "x,y\n0,0\n1,0\n1,1\n0,1\n0,0\n");

    let out = afrelay(&["rates", "--plot-data"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn pairing_check_reports_small_residuals() {
    let out = afrelay(&["pairing-check", "--k", "3", "--m", "3", "--samples", "50", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert!(rows.len() >= 45);
    for r in rows {
        assert!(r["residual"].as_f64().unwrap() < 1e-8);
        assert!(r["logpdf_gap"].as_f64().unwrap() < 1e-10);
    }
}

#[test]
fn help_exits_zero() {
    let help = afrelay(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("pairing-check"));
    assert_eq!(afrelay(&["frobnicate"]).status.code(), Some(1));
}
