use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::args::*;
use crate::afsim::{default_scaling, SimConfig};
use crate::channel::{ChannelDistribution, Topology};
use crate::dofregion::{Message, MessageSet};
use crate::pairing::QuantizerSpec;
use crate::{Error, Result, Scheme};

const COMMON_KEYS: [&str; 4] = ["seed", "samples", "out", "format"];

/// Fully resolved and validated invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub samples: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub command: CommandConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum CommandConfig {
    Rates { dist: ChannelDistribution, k: usize, m: usize, snr_db: Vec<f64>, plot_data: bool },
    Cutset { dist: ChannelDistribution, k_tx: usize, k_rx: usize, snr_db: Vec<f64>, plot_data: bool },
    Sweep { dist: ChannelDistribution, k: usize, m: usize, snr_db: Vec<f64>, plot_data: bool },
    Simulate { snr_db: f64, seeds: Vec<u64>, sim: SimConfig },
    Dof { preset: Preset, topology: Topology, messages: Option<MessageSet>, slice: Option<(usize, usize)> },
    PairingCheck { dist: ChannelDistribution, k: usize, scheme: Scheme },
}

impl CommandConfig {
    pub fn name(&self) -> &'static str {
        match self {
            CommandConfig::Rates { .. } => "rates",
            CommandConfig::Cutset { .. } => "cutset",
            CommandConfig::Sweep { .. } => "sweep",
            CommandConfig::Simulate { .. } => "simulate",
            CommandConfig::Dof { .. } => "dof",
            CommandConfig::PairingCheck { .. } => "pairing-check",
        }
    }
}

fn read_table(path: &Path) -> Result<toml::Table> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
    text.parse::<toml::Table>().map_err(|e| Error::config("config", format!("{}: {e}", path.display())))
}

/// Overlays the flags on the file values and deserialises the result, reporting the
/// offending key path on failure.
fn merge<T: Serialize + DeserializeOwned>(mut file: toml::Table, flags: &T) -> Result<T> {
    let flags = toml::Table::try_from(flags).map_err(|e| Error::config("arguments", e.to_string()))?;
    file.extend(flags);
    serde_path_to_error::deserialize(file).map_err(|e| {
        let key = e.path().to_string();
        Error::config(if key == "." { "config".to_string() } else { key }, e.into_inner().to_string())
    })
}

fn positive(key: &str, v: usize) -> Result<usize> {
    if v >= 1 {
        Ok(v)
    } else {
        Err(Error::config(key, format!("must be at least 1, got {v}")))
    }
}

fn hops(key: &str, m: usize, max: Option<usize>) -> Result<usize> {
    if m < 2 || max.is_some_and(|x| m > x) {
        let range = max.map_or("at least 2".to_string(), |x| format!("between 2 and {x}"));
        return Err(Error::config(key, format!("must be {range}, got {m}")));
    }
    Ok(m)
}

fn snr_list(spec: Option<SnrSpec>, default: &str) -> Result<Vec<f64>> {
    spec.unwrap_or(SnrSpec::Text(default.into())).values().map_err(|e| Error::config("snr_db", e))
}

fn int_list(key: &str, s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|_| Error::config(key, format!("`{t}` is not a non-negative integer"))))
        .collect()
}

fn parse_messages(s: &str) -> Result<MessageSet> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (j, i) = item
            .split_once(':')
            .ok_or_else(|| Error::config("messages", format!("`{item}` must be destination:source")))?;
        let num = |t: &str| {
            t.trim().parse::<usize>().map_err(|_| Error::config("messages", format!("`{item}` must be destination:source")))
        };
        out.push(Message::new(num(j)?, num(i)?));
    }
    Ok(MessageSet::new(out))
}

fn dof_topology(args: &DofArgs) -> Result<Topology> {
    let sizes: Vec<usize> = match (&args.layers, args.k) {
        (Some(l), k) => {
            let sizes: Vec<usize> = int_list("layers", l)?.into_iter().map(|x| x as usize).collect();
            if let Some(k) = k {
                if sizes.first() != Some(&k) {
                    return Err(Error::config("k", format!("{k} disagrees with the first layer size in `{l}`")));
                }
            }
            sizes
        }
        (None, Some(k)) => vec![positive("k", k)?; hops("m", args.m.unwrap_or(2), None)? + 1],
        (None, None) => match &args.antennas {
            Some(a) => a.split(';').map(|layer| layer.split(',').count()).collect(),
            None => return Err(Error::config("layers", "give --layers, --k or --antennas")),
        },
    };
    if sizes.contains(&0) {
        return Err(Error::config("layers", "layer sizes must be at least 1"));
    }
    if sizes.len() < 3 {
        return Err(Error::config("layers", "at least three layers are required"));
    }
    let topology = Topology::new(sizes)?;
    match &args.antennas {
        None => Ok(topology),
        Some(a) => {
            let layers = a
                .split(';')
                .map(|layer| Ok(int_list("antennas", layer)?.into_iter().map(|x| x as u32).collect()))
                .collect::<Result<Vec<Vec<u32>>>>()?;
            topology.with_antennas(layers)
        }
    }
}

fn parse_slice(s: &str, dim: usize) -> Result<(usize, usize)> {
    let v = int_list("slice", s)?;
    match v.as_slice() {
        [a, b] if *a >= 1 && *b >= 1 && a != b && (*a as usize) <= dim && (*b as usize) <= dim => {
            Ok((*a as usize - 1, *b as usize - 1))
        }
        _ => Err(Error::config("slice", format!("need two distinct coordinates in 1..={dim}, got `{s}`"))),
    }
}

/// Resolves parsed arguments (plus the optional config file) into a validated [`RunConfig`].
pub fn parse_config(cli: Cli) -> Result<RunConfig> {
    let mut file = match &cli.common.config {
        Some(path) => read_table(path)?,
        None => toml::Table::new(),
    };
    let mut common_file = toml::Table::new();
    for key in COMMON_KEYS {
        if let Some(v) = file.remove(key) {
            common_file.insert(key.to_string(), v);
        }
    }
    let common: CommonArgs = merge(common_file, &cli.common)?;
    let seed = common.seed.unwrap_or(0);
    let default_samples = if matches!(cli.command, Command::PairingCheck(_)) { 1000 } else { 10_000 };
    let samples = positive("samples", common.samples.unwrap_or(default_samples))?;
    let format = common.format.unwrap_or_default();
    let out = common.out;

    let command = match &cli.command {
        Command::Rates(flags) => {
            let a: RatesArgs = merge(file, flags)?;
            CommandConfig::Rates {
                dist: a.dist.unwrap_or_default(),
                k: positive("k", a.k.unwrap_or(2))?,
                m: hops("m", a.m.unwrap_or(2), None)?,
                snr_db: snr_list(a.snr_db, "20")?,
                plot_data: a.plot_data,
            }
        }
        Command::Cutset(flags) => {
            let a: CutsetArgs = merge(file, flags)?;
            let k = positive("k", a.k.unwrap_or(2))?;
            CommandConfig::Cutset {
                dist: a.dist.unwrap_or_default(),
                k_tx: k,
                k_rx: positive("k_rx", a.k_rx.unwrap_or(k))?,
                snr_db: snr_list(a.snr_db, "20")?,
                plot_data: a.plot_data,
            }
        }
        Command::Sweep(flags) => {
            let a: SweepArgs = merge(file, flags)?;
            CommandConfig::Sweep {
                dist: a.dist.unwrap_or_default(),
                k: positive("k", a.k.unwrap_or(2))?,
                m: hops("m", a.m.unwrap_or(2), Some(3))?,
                snr_db: snr_list(a.snr_db, "0:40:10")?,
                plot_data: a.plot_data,
            }
        }
        Command::Simulate(flags) => {
            let a: SimulateArgs = merge(file, flags)?;
            let k = positive("k", a.k.unwrap_or(2))?;
            let m = hops("m", a.m.unwrap_or(2), Some(3))?;
            let snr = snr_list(a.snr_db, "20")?;
            let [snr_db] = snr.as_slice() else {
                return Err(Error::config("snr_db", "simulate takes a single SNR"));
            };
            let n_b = a.n_b.unwrap_or(1000);
            let scaled = if a.delta.is_none() || a.q.is_none() || a.epsilon.is_none() {
                Some(default_scaling(n_b, k).map_err(|e| Error::config("n_b", e.to_string()))?)
            } else {
                None
            };
            let pick = |v: Option<f64>, f: fn(&crate::afsim::Scaling) -> f64| v.unwrap_or_else(|| f(scaled.as_ref().unwrap()));
            let delta = pick(a.delta, |s| s.delta);
            let epsilon = pick(a.epsilon, |s| s.epsilon);
            let q = a.q.unwrap_or_else(|| scaled.as_ref().unwrap().q);
            let replicas = a.replicas.unwrap_or(1);
            if replicas == 0 {
                return Err(Error::config("replicas", "must be at least 1"));
            }
            let sim = SimConfig {
                topology: Topology::uniform(k, m)?,
                dist: a.dist.unwrap_or_default(),
                power: crate::rates::db_to_linear(*snr_db),
                n_b,
                sub_blocks: a.sub_blocks.unwrap_or(m as u64 + 2),
                quantizer: QuantizerSpec::new(delta, q, k)?,
                epsilon,
                seed,
                calibration_samples: a.calibration_samples,
                sample_noise: false,
            };
            sim.validate()?;
            CommandConfig::Simulate { snr_db: *snr_db, seeds: (0..replicas).map(|r| seed.wrapping_add(r)).collect(), sim }
        }
        Command::Dof(flags) => {
            let a: DofArgs = merge(file, flags)?;
            let preset = a.preset.unwrap_or(if a.antennas.is_some() || a.messages.is_some() {
                Preset::Theorem2
            } else {
                Preset::Theorem1
            });
            let topology = dof_topology(&a)?;
            let messages = match preset {
                Preset::Theorem1 => {
                    if a.messages.is_some() {
                        return Err(Error::config("messages", "theorem1 fixes one message per pair"));
                    }
                    None
                }
                Preset::Theorem2 => Some(match &a.messages {
                    Some(s) => parse_messages(s)?,
                    None => {
                        let k = topology.layer_sizes()[0].min(*topology.layer_sizes().last().unwrap());
                        MessageSet::diagonal(k)
                    }
                }),
            };
            let dim = messages.as_ref().map_or(topology.layer_sizes()[0], MessageSet::len);
            let slice = a.slice.as_deref().map(|s| parse_slice(s, dim)).transpose()?;
            if slice.is_some() && out.is_none() {
                return Err(Error::config("slice", "needs --out"));
            }
            CommandConfig::Dof { preset, topology, messages, slice }
        }
        Command::PairingCheck(flags) => {
            let a: PairingCheckArgs = merge(file, flags)?;
            let m = hops("m", a.m.unwrap_or(2), Some(3))?;
            CommandConfig::PairingCheck {
                dist: a.dist.unwrap_or_default(),
                k: positive("k", a.k.unwrap_or(2))?,
                scheme: Scheme::from_hops(m).unwrap(),
            }
        }
    };
    let plot = matches!(
        command,
        CommandConfig::Rates { plot_data: true, .. }
            | CommandConfig::Cutset { plot_data: true, .. }
            | CommandConfig::Sweep { plot_data: true, .. }
    );
    if plot && out.is_none() {
        return Err(Error::config("plot_data", "needs --out"));
    }
    Ok(RunConfig { seed, samples, out, format, command })
}
