use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::channel::ChannelDistribution;

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Parser)]
#[command(name = "afrelay", version, about = "Amplify-and-forward relaying: rates, cut-set bounds, simulation and DoF regions")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Output format of the main artifact.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Flags shared by every subcommand. All of them may also come from the config file.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommonArgs {
    /// Master seed.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Monte Carlo samples (channel draws).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Output directory; results go to standard output when absent.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// TOML file with the same keys as the flags (underscores for dashes); flags win.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ergodic per-pair and sum rates of the pairing scheme.
    Rates(RatesArgs),
    /// Cut-set sum-rate upper bound.
    Cutset(CutsetArgs),
    /// Achievable sum rate against the cut-set bound over an SNR grid.
    Sweep(SweepArgs),
    /// Sub-block relaying simulation.
    Simulate(SimulateArgs),
    /// DoF region inequalities and corner points.
    Dof(DofArgs),
    /// Pairing-map identities on random draws.
    PairingCheck(PairingCheckArgs),
}

/// SNR list in dB: a single value, `start:stop:step`, or a comma-separated list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SnrSpec {
    Value(f64),
    List(Vec<f64>),
    Text(String),
}

impl FromStr for SnrSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(SnrSpec::Text(s.to_string()))
    }
}

impl SnrSpec {
    pub fn values(&self) -> Result<Vec<f64>, String> {
        let parse = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
        let out = match self {
            SnrSpec::Value(v) => vec![*v],
            SnrSpec::List(v) => v.clone(),
            SnrSpec::Text(s) if s.contains(':') => {
                let parts: Vec<&str> = s.split(':').collect();
                let [a, b, step] = parts.as_slice() else {
                    return Err(format!("range `{s}` must be start:stop:step"));
                };
                let (a, b, step) = (parse(a)?, parse(b)?, parse(step)?);
                if !(step > 0.0 && b >= a) {
                    return Err(format!("range `{s}` needs stop >= start and a positive step"));
                }
                let n = ((b - a) / step + 1e-9).floor() as usize;
                (0..=n).map(|i| a + i as f64 * step).collect()
            }
            SnrSpec::Text(s) => s.split(',').map(parse).collect::<Result<_, _>>()?,
        };
        if out.is_empty() || out.iter().any(|v| !v.is_finite()) {
            return Err("need at least one finite value".into());
        }
        Ok(out)
    }
}

fn parse_dist(s: &str) -> Result<ChannelDistribution, String> {
    match s {
        "gaussian" => Ok(ChannelDistribution::Gaussian),
        "radial-exponential" => Ok(ChannelDistribution::RadialExponential),
        _ => Err(format!("unknown distribution `{s}` (gaussian, radial-exponential)")),
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesArgs {
    /// Number of S-D pairs.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Number of hops; more than 3 is relayed segment by segment.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[arg(long = "snr-db")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<SnrSpec>,
    #[arg(long, value_parser = parse_dist)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist: Option<ChannelDistribution>,
    /// Also write two-column plot files (needs --out).
    #[arg(long = "plot-data")]
    #[serde(default, skip_serializing_if = "is_false")]
    pub plot_data: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutsetArgs {
    /// Transmit and receive dimension unless --k-rx is given.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[arg(long = "k-rx")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_rx: Option<usize>,
    #[arg(long = "snr-db")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<SnrSpec>,
    #[arg(long, value_parser = parse_dist)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist: Option<ChannelDistribution>,
    #[arg(long = "plot-data")]
    #[serde(default, skip_serializing_if = "is_false")]
    pub plot_data: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// 2 or 3.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[arg(long = "snr-db")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<SnrSpec>,
    #[arg(long, value_parser = parse_dist)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist: Option<ChannelDistribution>,
    #[arg(long = "plot-data")]
    #[serde(default, skip_serializing_if = "is_false")]
    pub plot_data: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// 2 or 3.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Per-node SNR in dB (single value).
    #[arg(long = "snr-db")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<SnrSpec>,
    /// Sub-block length n_B.
    #[arg(long = "n-b")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_b: Option<u64>,
    /// Number of sub-blocks B.
    #[arg(long = "sub-blocks", short = 'B')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sub_blocks: Option<u64>,
    /// Quantization interval; defaults to the n_B scaling.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Number of replicas, seeded seed, seed+1, ...
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicas: Option<u64>,
    #[arg(long = "calibration-samples")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration_samples: Option<u64>,
    #[arg(long, value_parser = parse_dist)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist: Option<ChannelDistribution>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Single-antenna nodes, one message per pair.
    Theorem1,
    /// Antenna arrays and an explicit message set.
    Theorem2,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DofArgs {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    /// Nodes per layer when --layers is absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Hops when --layers is absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Layer sizes, e.g. 3,2,3.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layers: Option<String>,
    /// Antennas per node, layers separated by `;`, e.g. "2,2;1,3;2,2".
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub antennas: Option<String>,
    /// Messages as destination:source pairs, e.g. "1:1,2:1".
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub messages: Option<String>,
    /// Two 1-based coordinates; writes the 2D cross-section polygon (needs --out).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slice: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairingCheckArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// 2 or 3.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[arg(long, value_parser = parse_dist)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist: Option<ChannelDistribution>,
}
