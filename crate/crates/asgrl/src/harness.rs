//! Runs every seed of an experiment, in parallel, and writes the results.

use std::fs;

use anyhow::{Context, Result};
use asgrl_core::domains::{run_seed, Task};
use asgrl_core::meta::TrainLog;
use asgrl_core::symbolic::{load_model, ParseOptions};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::output::{self, Snapshot};

#[derive(Clone, Debug, PartialEq)]
pub struct SeedRun {
    pub seed: u64,
    pub log: TrainLog,
}

/// The bundled task of the configured domain, with the `[model]` file
/// overrides applied.
pub fn load_task(cfg: &ExperimentConfig) -> Result<Task> {
    let mut task = Task::bundled(cfg.domain)?;
    if let Some((d, p)) = &cfg.model {
        let domain = fs::read_to_string(d).with_context(|| format!("reading {}", d.display()))?;
        let problem = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        let opts = if cfg.strict {
            ParseOptions::STRICT
        } else {
            ParseOptions::LENIENT
        };
        task.model = load_model(&domain, &problem, opts)?;
    }
    if let Some(l) = &cfg.layout {
        task.layout = fs::read_to_string(l).with_context(|| format!("reading {}", l.display()))?;
    }
    Ok(task)
}

/// Trains every seed and returns the logs ordered by seed. Each seed owns
/// its RNG streams, so the result does not depend on the worker count.
pub fn run_seeds(cfg: &ExperimentConfig) -> Result<Vec<SeedRun>> {
    cfg.validate()?;
    let task = load_task(cfg)?;
    let seeds: Vec<u64> = (0..cfg.seeds as u64).map(|i| cfg.first_seed + i).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()?;
    let runs = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| {
                let log = run_seed(&task, &cfg.spec, seed)?;
                Ok(SeedRun { seed, log })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(runs)
}

/// Runs the experiment and writes per-seed curves, the aggregate curve,
/// the JSON snapshot and the merged summary row under `cfg.out`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Snapshot> {
    let runs = run_seeds(cfg)?;
    output::write_results(cfg, &runs)
}
