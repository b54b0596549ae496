// Driving the command-line front end from code: a config file overridden by flags,
// resolved, executed into a scratch directory.

use afrelay::cli::{execute, parse_config, Cli};
use clap::Parser;

pub fn run_example() -> Vec<(String, String)> {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.toml");
    std::fs::write(&config, "samples = 500\nseed = 9\nk = 2\nm = 3\nsnr_db = [10.0, 30.0]\n").unwrap();

    let out = dir.path().join("out");
    let argv = ["afrelay", "sweep", "--config", config.to_str().unwrap(), "--samples", "800", "--out", out.to_str().unwrap()];
    let run = parse_config(Cli::try_parse_from(argv).unwrap()).unwrap();
    execute(&run).unwrap();

    let mut files: Vec<(String, String)> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), std::fs::read_to_string(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[allow(dead_code)]
fn main() {
    for (name, text) in run_example() {
        println!("== {name}");
        print!("{text}");
    }
}
