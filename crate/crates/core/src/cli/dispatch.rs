use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::args::{Format, Preset};
use super::config::{CommandConfig, RunConfig};
use crate::afsim::{run_seeds, SimConfig};
use crate::channel::{has_distinct_eigs, is_full_rank, log_pdf_matrix, sample_hop_matrix, ChannelDistribution};
use crate::dofregion::{corner_points, region_basic, region_general, slice_2d, DofPolytope};
use crate::mc::stream_rng;
use crate::pairing::{map_for, RANK_TOL};
use crate::rates::{cutset_sum_upper, db_to_linear, gap_table, rate_curve, rate_multi_hop_mc};
use crate::{Error, Result, Scheme};

/// Row shared by `rates`, `cutset` and `sweep`; absent quantities are left blank.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub snr_db: f64,
    pub k: usize,
    pub m: Option<usize>,
    pub scheme: String,
    pub achievable_sum_bits: Option<f64>,
    pub cutset_sum_bits: Option<f64>,
    pub gap_bits: Option<f64>,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimRow {
    pub seed: u64,
    pub pair: usize,
    pub rate_bits: f64,
    pub mean_sinr_db: f64,
    pub e1: u64,
    pub e2: u64,
    pub utilization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingRow {
    pub k: usize,
    pub scheme: Scheme,
    pub c: f64,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    /// `||product - c I||_F / (c sqrt(k))`.
    pub residual: f64,
    /// Largest `|log p(target) - log p(H)|` over the targets.
    pub logpdf_gap: f64,
}

/// Polytope with its corners, in the `dof` output schema.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolytopeOutput<'a> {
    pub labels: &'a [String],
    pub inequalities: &'a [crate::dofregion::Inequality],
    pub corners: Vec<Vec<i64>>,
}

struct Artifact {
    csv: Vec<u8>,
    json: Vec<u8>,
    /// Extra files: `(file name, contents)`.
    extras: Vec<(String, String)>,
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    v.push(b'\n');
    Ok(v)
}

fn plot_file(rows: &[(f64, f64)]) -> String {
    rows.iter().map(|(x, y)| format!("{x} {y}\n")).collect()
}

fn rates_artifact(
    dist: ChannelDistribution,
    k: usize,
    m: usize,
    snr_db: &[f64],
    plot: bool,
    cfg: &RunConfig,
) -> Result<Artifact> {
    let ps: Vec<f64> = snr_db.iter().map(|&d| db_to_linear(d)).collect();
    let results = match Scheme::from_hops(m) {
        Some(scheme) => rate_curve(scheme, dist, k, &ps, cfg.samples, cfg.seed)?,
        None => ps.iter().map(|&p| rate_multi_hop_mc(dist, k, m, p, cfg.samples, cfg.seed)).collect::<Result<_>>()?,
    };
    let rows: Vec<RateRow> = snr_db
        .iter()
        .zip(&results)
        .map(|(&db, r)| RateRow {
            snr_db: db,
            k,
            m: Some(m),
            scheme: r.label.clone(),
            achievable_sum_bits: Some(r.sum.mean),
            cutset_sum_bits: None,
            gap_bits: None,
            stderr: r.sum.stderr,
            samples: r.samples,
            seed: cfg.seed,
        })
        .collect();
    let extras = if plot {
        vec![("rates_achievable.dat".into(), plot_file(&rows.iter().map(|r| (r.snr_db, r.achievable_sum_bits.unwrap())).collect::<Vec<_>>()))]
    } else {
        Vec::new()
    };
    Ok(Artifact { csv: to_csv(&rows)?, json: to_json(&results)?, extras })
}

fn cutset_artifact(
    dist: ChannelDistribution,
    k_tx: usize,
    k_rx: usize,
    snr_db: &[f64],
    plot: bool,
    cfg: &RunConfig,
) -> Result<Artifact> {
    let results = snr_db
        .iter()
        .map(|&db| cutset_sum_upper(dist, k_tx, k_rx, db_to_linear(db), cfg.samples, cfg.seed))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<RateRow> = snr_db
        .iter()
        .zip(&results)
        .map(|(&db, r)| RateRow {
            snr_db: db,
            k: k_tx,
            m: None,
            scheme: r.label.clone(),
            achievable_sum_bits: None,
            cutset_sum_bits: Some(r.sum.mean),
            gap_bits: None,
            stderr: r.sum.stderr,
            samples: r.samples,
            seed: cfg.seed,
        })
        .collect();
    let extras = if plot {
        vec![("cutset_cutset.dat".into(), plot_file(&rows.iter().map(|r| (r.snr_db, r.cutset_sum_bits.unwrap())).collect::<Vec<_>>()))]
    } else {
        Vec::new()
    };
    Ok(Artifact { csv: to_csv(&rows)?, json: to_json(&results)?, extras })
}

fn sweep_artifact(
    dist: ChannelDistribution,
    k: usize,
    m: usize,
    snr_db: &[f64],
    plot: bool,
    cfg: &RunConfig,
) -> Result<Artifact> {
    let table = gap_table(dist, k, m, snr_db, cfg.samples, cfg.seed)?;
    let rows: Vec<RateRow> = table
        .iter()
        .map(|r| RateRow {
            snr_db: r.snr_db,
            k,
            m: Some(m),
            scheme: r.scheme.label().into(),
            achievable_sum_bits: Some(r.achievable_sum),
            cutset_sum_bits: Some(r.cutset_sum),
            gap_bits: Some(r.gap),
            stderr: r.stderr,
            samples: r.samples,
            seed: r.seed,
        })
        .collect();
    let mut extras = Vec::new();
    if plot {
        for (name, f) in [
            ("achievable", (|r: &crate::rates::SweepRow| r.achievable_sum) as fn(&crate::rates::SweepRow) -> f64),
            ("cutset", |r| r.cutset_sum),
            ("gap", |r| r.gap),
        ] {
            let pts: Vec<(f64, f64)> = table.iter().map(|r| (r.snr_db, f(r))).collect();
            extras.push((format!("sweep_{name}.dat"), plot_file(&pts)));
        }
    }
    Ok(Artifact { csv: to_csv(&rows)?, json: to_json(&table)?, extras })
}

fn simulate_artifact(sim: &SimConfig, seeds: &[u64]) -> Result<Artifact> {
    let reports = run_seeds(sim, seeds)?;
    let mut rows = Vec::new();
    for r in &reports {
        for (i, (&rate, db)) in r.rate_bits.iter().zip(r.mean_sinr_db()).enumerate() {
            rows.push(SimRow {
                seed: r.seed,
                pair: i + 1,
                rate_bits: rate,
                mean_sinr_db: db,
                e1: r.e1,
                e2: r.e2,
                utilization: r.slot_utilization,
            });
        }
    }
    Ok(Artifact { csv: to_csv(&rows)?, json: to_json(&reports)?, extras: Vec::new() })
}

fn dof_artifact(
    preset: Preset,
    topology: &crate::channel::Topology,
    messages: Option<&crate::dofregion::MessageSet>,
    slice: Option<(usize, usize)>,
) -> Result<Artifact> {
    let poly: DofPolytope = match (preset, messages) {
        (Preset::Theorem1, _) => region_basic(topology)?,
        (Preset::Theorem2, Some(m)) => region_general(topology, m)?,
        (Preset::Theorem2, None) => return Err(Error::Precondition("theorem2 needs a message set".into())),
    };
    let corners = corner_points(&poly, topology)?;
    let out = PolytopeOutput { labels: &poly.labels, inequalities: &poly.inequalities, corners };

    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    let mut header = vec!["kind".to_string()];
    header.extend(poly.labels.iter().cloned());
    header.push("rhs".into());
    w.write_record(&header).map_err(csv_err)?;
    for q in &poly.inequalities {
        let mut rec = vec!["inequality".to_string()];
        rec.extend(q.coeffs.iter().map(i64::to_string));
        rec.push(q.rhs.to_string());
        w.write_record(&rec).map_err(csv_err)?;
    }
    for c in &out.corners {
        let mut rec = vec!["corner".to_string()];
        rec.extend(c.iter().map(i64::to_string));
        rec.push(String::new());
        w.write_record(&rec).map_err(csv_err)?;
    }
    let csv = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;

    let mut extras = Vec::new();
    if let Some((x, y)) = slice {
        let mut pts = slice_2d(&poly, x, y, &vec![0.0; poly.dim()])?;
        if let Some(&first) = pts.first() {
            pts.push(first);
        }
        let body: String = pts.iter().map(|(a, b)| format!("{a},{b}\n")).collect();
        extras.push(("dof_slice.csv".into(), format!("x,y\n{body}")));
    }
    Ok(Artifact { csv, json: to_json(&out)?, extras })
}

fn pairing_artifact(dist: ChannelDistribution, k: usize, scheme: Scheme, cfg: &RunConfig) -> Result<Artifact> {
    let mut rows = Vec::new();
    let mut skipped = 0u64;
    for n in 0..cfg.samples {
        let h = sample_hop_matrix(dist, k, k, &mut stream_rng(cfg.seed, n as u64));
        let regular = match scheme {
            Scheme::TwoHop => is_full_rank(&h, RANK_TOL),
            Scheme::ThreeHop => is_full_rank(&h, RANK_TOL) && has_distinct_eigs(&h, RANK_TOL)?,
        };
        if !regular {
            skipped += 1;
            continue;
        }
        let map = map_for(scheme, dist, &h)?;
        let base = log_pdf_matrix(dist, &h)?;
        let mut gap: f64 = 0.0;
        for t in &map.targets {
            gap = gap.max((log_pdf_matrix(dist, t)? - base).abs());
        }
        let c = map.scale_product();
        rows.push(PairingRow {
            k,
            scheme,
            c,
            c1: (scheme == Scheme::ThreeHop).then(|| map.scales[0]),
            c2: (scheme == Scheme::ThreeHop).then(|| map.scales[1]),
            residual: map.identity_error() / (c * (k as f64).sqrt()),
            logpdf_gap: gap,
        });
    }
    if skipped > 0 {
        eprintln!("pairing-check: skipped {skipped} irregular draws");
    }
    Ok(Artifact { csv: to_csv(&rows)?, json: to_json(&rows)?, extras: Vec::new() })
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(dir.join(name)).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[derive(Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    artifact: &'a str,
    seed: u64,
    config: &'a RunConfig,
}

/// Runs `cfg` and returns the process exit status, reporting failures on standard error.
pub fn dispatch(cfg: &RunConfig) -> i32 {
    match execute(cfg) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            super::exit_code(&e)
        }
    }
}

/// Runs the configured command and writes its artifacts.
pub fn execute(cfg: &RunConfig) -> Result<()> {
    let art = match &cfg.command {
        CommandConfig::Rates { dist, k, m, snr_db, plot_data } => rates_artifact(*dist, *k, *m, snr_db, *plot_data, cfg)?,
        CommandConfig::Cutset { dist, k_tx, k_rx, snr_db, plot_data } => {
            cutset_artifact(*dist, *k_tx, *k_rx, snr_db, *plot_data, cfg)?
        }
        CommandConfig::Sweep { dist, k, m, snr_db, plot_data } => sweep_artifact(*dist, *k, *m, snr_db, *plot_data, cfg)?,
        CommandConfig::Simulate { sim, seeds, .. } => simulate_artifact(sim, seeds)?,
        CommandConfig::Dof { preset, topology, messages, slice } => dof_artifact(*preset, topology, messages.as_ref(), *slice)?,
        CommandConfig::PairingCheck { dist, k, scheme } => pairing_artifact(*dist, *k, *scheme, cfg)?,
    };
    let body = match cfg.format {
        Format::Csv => art.csv,
        Format::Json => art.json,
    };
    let Some(dir) = &cfg.out else {
        std::io::stdout().lock().write_all(&body)?;
        return Ok(());
    };
    std::fs::create_dir_all(dir)?;
    let name = cfg.command.name();
    let ext = match cfg.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let main = format!("{name}.{ext}");
    let mut files = vec![(main.clone(), body)];
    files.extend(art.extras.into_iter().map(|(n, s)| (n, s.into_bytes())));
    for (file, bytes) in &files {
        write_atomic(dir, file, bytes)?;
        let meta = Meta { tool: "afrelay", version: env!("CARGO_PKG_VERSION"), artifact: file, seed: cfg.seed, config: cfg };
        write_atomic(dir, &format!("{file}.meta.json"), &to_json(&meta)?)?;
    }
    Ok(())
}
