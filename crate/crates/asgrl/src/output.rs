//! Result files under an output directory:
//!
//! ```text
//! DIR/summary.csv                          domain,method,mean_success,stderr,seeds
//! DIR/curves/<domain>__<method>__seed<N>.csv   one row per evaluation
//! DIR/aggregate/<domain>__<method>.csv     per-checkpoint mean and stderr
//! DIR/runs/<domain>__<method>.json         per-seed finals and first successes
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::harness::SeedRun;
use crate::summary::{aggregate_curves, mean_stderr};

pub const SNAPSHOT_FORMAT: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub seed: u64,
    pub episode: usize,
    pub eval_success: f64,
    pub steps: u64,
    /// Skills per landmark slot, `;`-separated; empty for flat methods.
    pub k_per_landmark: String,
    pub min_skill_eps: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub domain: String,
    pub method: String,
    pub mean_success: f64,
    pub stderr: f64,
    pub seeds: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct AggregateRow {
    episode: usize,
    mean_steps: f64,
    mean_success: f64,
    stderr: f64,
    seeds: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub final_success: f64,
    /// First evaluated episode with nonzero success.
    pub first_success: Option<usize>,
    pub total_steps: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub format: u32,
    pub domain: String,
    pub method: String,
    pub episodes: usize,
    pub k: usize,
    pub mean_success: f64,
    pub stderr: f64,
    /// Mean episodes-to-first-success over the seeds that succeeded.
    pub mean_first_success: Option<f64>,
    pub seeds_never_succeeded: usize,
    pub per_seed: Vec<SeedSummary>,
}

pub fn stem(domain: &str, method: &str) -> String {
    format!("{domain}__{method}")
}

pub fn curve_path(out: &Path, domain: &str, method: &str, seed: u64) -> PathBuf {
    out.join("curves")
        .join(format!("{}__seed{seed}.csv", stem(domain, method)))
}

pub fn summary_path(out: &Path) -> PathBuf {
    out.join("summary.csv")
}

pub fn curve_rows(run: &SeedRun) -> Vec<CurveRow> {
    run.log
        .records
        .iter()
        .map(|r| CurveRow {
            seed: run.seed,
            episode: r.episode,
            eval_success: r.eval_success,
            steps: r.steps,
            k_per_landmark: r
                .k_per_landmark
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(";"),
            min_skill_eps: r.min_skill_eps,
        })
        .collect()
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .with_context(|| format!("writing {}", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path, header: &[&str]) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let found: Vec<&str> = r.headers()?.iter().collect();
    if found != header {
        bail!("{}: expected header {:?}, found {:?}", path.display(), header, found);
    }
    let mut rows = Vec::new();
    for (i, rec) in r.deserialize().enumerate() {
        rows.push(rec.with_context(|| format!("{}: row {}", path.display(), i + 1))?);
    }
    Ok(rows)
}

pub const CURVE_HEADER: [&str; 6] = [
    "seed",
    "episode",
    "eval_success",
    "steps",
    "k_per_landmark",
    "min_skill_eps",
];
pub const SUMMARY_HEADER: [&str; 5] = ["domain", "method", "mean_success", "stderr", "seeds"];
const AGGREGATE_HEADER: [&str; 5] = ["episode", "mean_steps", "mean_success", "stderr", "seeds"];

pub fn write_curve(path: &Path, rows: &[CurveRow]) -> Result<()> {
    write_csv(path, rows, &CURVE_HEADER)
}

pub fn read_curve(path: &Path) -> Result<Vec<CurveRow>> {
    read_csv(path, &CURVE_HEADER)
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    read_csv(path, &SUMMARY_HEADER)
}

/// Inserts or replaces the `(domain, method)` row, keeping rows sorted.
pub fn merge_summary(path: &Path, row: SummaryRow) -> Result<()> {
    let mut rows = if path.exists() {
        read_summary(path)?
    } else {
        Vec::new()
    };
    rows.retain(|r| (r.domain.as_str(), r.method.as_str()) != (&row.domain, &row.method));
    rows.push(row);
    rows.sort_by(|a, b| (&a.domain, &a.method).cmp(&(&b.domain, &b.method)));
    write_csv(path, &rows, &SUMMARY_HEADER)
}

/// Per-seed curve files already present for a `(domain, method)` pair,
/// sorted by path.
pub fn existing_curves(out: &Path, domain: &str, method: &str) -> Result<Vec<PathBuf>> {
    let dir = out.join("curves");
    if !dir.exists() {
        return Ok(Vec::new());
    }
    let prefix = format!("{}__seed", stem(domain, method));
    let mut paths = Vec::new();
    for entry in fs::read_dir(&dir)? {
        let path = entry?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if let Some(rest) = name.strip_prefix(&prefix) {
            if rest.strip_suffix(".csv").is_some_and(|n| n.parse::<u64>().is_ok()) {
                paths.push(path);
            }
        }
    }
    paths.sort();
    Ok(paths)
}

pub fn snapshot(cfg: &ExperimentConfig, runs: &[SeedRun]) -> Snapshot {
    let finals: Vec<f64> = runs.iter().map(|r| r.log.final_success()).collect();
    let (mean_success, stderr) = mean_stderr(&finals);
    let firsts: Vec<f64> = runs
        .iter()
        .filter_map(|r| r.log.first_success())
        .map(|e| e as f64)
        .collect();
    Snapshot {
        format: SNAPSHOT_FORMAT,
        domain: cfg.domain.name().into(),
        method: cfg.spec.method.name().into(),
        episodes: cfg.spec.episodes,
        k: cfg.spec.k,
        mean_success,
        stderr,
        mean_first_success: (!firsts.is_empty()).then(|| mean_stderr(&firsts).0),
        seeds_never_succeeded: runs.len() - firsts.len(),
        per_seed: runs
            .iter()
            .map(|r| SeedSummary {
                seed: r.seed,
                final_success: r.log.final_success(),
                first_success: r.log.first_success(),
                total_steps: r.log.records.last().map_or(0, |x| x.steps),
            })
            .collect(),
    }
}

pub fn write_results(cfg: &ExperimentConfig, runs: &[SeedRun]) -> Result<Snapshot> {
    let out = &cfg.out;
    let (domain, method) = (cfg.domain.name(), cfg.spec.method.name());
    for dir in ["curves", "aggregate", "runs"] {
        fs::create_dir_all(out.join(dir))?;
    }
    // Stale seeds from an earlier, larger run would break the summary check.
    for old in existing_curves(out, domain, method)? {
        fs::remove_file(old)?;
    }

    let mut series = Vec::with_capacity(runs.len());
    for run in runs {
        write_curve(&curve_path(out, domain, method, run.seed), &curve_rows(run))?;
        series.push(
            run.log
                .records
                .iter()
                .map(|r| (r.episode, r.steps, r.eval_success))
                .collect::<Vec<_>>(),
        );
    }
    let agg: Vec<AggregateRow> = aggregate_curves(&series)
        .into_iter()
        .map(|p| AggregateRow {
            episode: p.episode,
            mean_steps: p.mean_steps,
            mean_success: p.mean_success,
            stderr: p.stderr,
            seeds: p.seeds,
        })
        .collect();
    let stem = stem(domain, method);
    write_csv(&out.join("aggregate").join(format!("{stem}.csv")), &agg, &AGGREGATE_HEADER)?;

    let snap = snapshot(cfg, runs);
    let json = serde_json::to_string_pretty(&snap)?;
    fs::write(out.join("runs").join(format!("{stem}.json")), json + "\n")?;

    merge_summary(
        &summary_path(out),
        SummaryRow {
            domain: domain.into(),
            method: method.into(),
            mean_success: snap.mean_success,
            stderr: snap.stderr,
            seeds: runs.len(),
        },
    )?;
    Ok(snap)
}
