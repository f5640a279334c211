//! Many scenarios times many seeds, in parallel, reduced to a summary table.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use handover_core::sim::{run, Metrics, Mode, Scenario};
use rayon::prelude::*;
use serde::Serialize;

use crate::scenario_file;
use crate::trace_io;

/// One finished (or failed) run.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub scenario: String,
    pub mode: Mode,
    pub seed: u64,
    pub metrics: Option<Metrics>,
    pub digest: Option<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub scenario: String,
    pub mode: String,
    pub seeds: usize,
    pub success_rate: f64,
    /// Over successful runs; absent when none succeeded.
    pub mean_time: Option<f64>,
    pub std_time: Option<f64>,
    pub mean_attempts: Option<f64>,
}

/// `*.toml` files in `dir`, sorted by name.
pub fn scenario_files(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot list {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no scenario files in {}", dir.display());
    }
    Ok(files)
}

/// Runs every scenario once per seed on `threads` workers (0 = rayon's
/// default). Results come back in (scenario, seed) order regardless of the
/// thread count.
pub fn run_all(scenarios: &[Scenario], seeds: &[u64], threads: usize) -> anyhow::Result<Vec<RunResult>> {
    let jobs: Vec<(&Scenario, u64)> = scenarios.iter().flat_map(|s| seeds.iter().map(move |&seed| (s, seed))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    Ok(pool.install(|| {
        jobs.par_iter()
            .map(|&(s, seed)| {
                let mut s = s.clone();
                s.seed = seed;
                let (metrics, digest, error) = match run(&s) {
                    Ok(out) => (Some(out.metrics.clone()), Some(trace_io::digest(&out)), None),
                    Err(e) => (None, None, Some(e.to_string())),
                };
                RunResult { scenario: s.name, mode: s.mode, seed, metrics, digest, error }
            })
            .collect()
    }))
}

/// Groups results by scenario (in first-seen order) and aggregates them.
pub fn summarize(results: &[RunResult]) -> Vec<SummaryRow> {
    let mut keys: Vec<(&str, Mode)> = Vec::new();
    for r in results {
        if !keys.contains(&(r.scenario.as_str(), r.mode)) {
            keys.push((r.scenario.as_str(), r.mode));
        }
    }
    keys.into_iter()
        .map(|(name, mode)| {
            let runs: Vec<&RunResult> = results.iter().filter(|r| r.scenario == name && r.mode == mode).collect();
            let wins: Vec<&Metrics> = runs.iter().filter_map(|r| r.metrics.as_ref()).filter(|m| m.success).collect();
            let times: Vec<f64> = wins.iter().map(|m| m.time_to_success).collect();
            let attempts: Vec<f64> = wins.iter().map(|m| m.attempts as f64).collect();
            SummaryRow {
                scenario: name.to_owned(),
                mode: mode.as_str().to_owned(),
                seeds: runs.len(),
                success_rate: wins.len() as f64 / runs.len() as f64,
                mean_time: mean(&times),
                std_time: std_dev(&times),
                mean_attempts: mean(&attempts),
            }
        })
        .collect()
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Sample standard deviation; 0 for a single value.
fn std_dev(xs: &[f64]) -> Option<f64> {
    let m = mean(xs)?;
    if xs.len() < 2 {
        return Some(0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    Some((ss / (xs.len() - 1) as f64).sqrt())
}

pub fn write_summary<W: Write>(w: W, rows: &[SummaryRow]) -> anyhow::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

/// Loads every scenario in `dir`, applying `mode` when given. Files that fail
/// to parse are reported and skipped; an error only when nothing loads.
pub fn load_dir(dir: &Path, mode: Option<Mode>) -> anyhow::Result<(Vec<Scenario>, Vec<String>)> {
    let mut scenarios = Vec::new();
    let mut failures = Vec::new();
    for path in scenario_files(dir)? {
        match scenario_file::load(&path) {
            Ok(mut s) => {
                if let Some(m) = mode {
                    s.mode = m;
                }
                scenarios.push(s);
            }
            Err(e) => failures.push(e.to_string()),
        }
    }
    if scenarios.is_empty() {
        bail!("no scenario in {} could be loaded", dir.display());
    }
    Ok((scenarios, failures))
}
