//! Experiment configuration: a TOML file whose keys mirror the `run` flags,
//! with `[eval]`, `[hyper]`, `[meta]` and `[model]` sections. Every key is
//! optional; missing keys fall back to the per-domain defaults. See
//! `docs/config.md` for the schema.

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use asgrl_core::baselines::Potential;
use asgrl_core::domains::{DomainId, Method, RunSpec};
use asgrl_core::meta::{MetaStateMode, MAX_SKILLS};
use serde::Deserialize;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub domain: Option<String>,
    pub method: Option<String>,
    pub seeds: Option<usize>,
    pub first_seed: Option<u64>,
    pub episodes: Option<usize>,
    pub k: Option<usize>,
    pub max_steps: Option<usize>,
    pub meta_state: Option<String>,
    pub potential: Option<String>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    #[serde(default)]
    pub eval: EvalSection,
    #[serde(default)]
    pub hyper: HyperSection,
    #[serde(default)]
    pub meta: MetaSection,
    #[serde(default)]
    pub model: ModelSection,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSection {
    pub every: Option<usize>,
    pub runs: Option<usize>,
    pub eps: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperSection {
    pub gamma: Option<f64>,
    pub r_landmark: Option<f64>,
    pub alpha_h: Option<f64>,
    pub alpha_l: Option<f64>,
    pub rd_clip: Option<f64>,
    pub eps_start: Option<f64>,
    pub eps_floor: Option<f64>,
    pub eps_decay: Option<f64>,
    pub lr_start: Option<f64>,
    pub lr_floor: Option<f64>,
    pub lr_decay: Option<f64>,
    pub replay_capacity: Option<usize>,
    pub replay_batch: Option<usize>,
    pub window: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaSection {
    pub r_goal: Option<f64>,
    pub r_subgoal: Option<f64>,
    pub eps2_start: Option<f64>,
    pub eps2_floor: Option<f64>,
    pub eps2_decay: Option<f64>,
    pub curriculum_threshold: Option<f64>,
    /// Terminal observations kept by the online K-Means; 0 disables
    /// clustering.
    pub cluster_buffer: Option<usize>,
}

/// Replacement model or layout files for the named domain's world.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub domain: Option<PathBuf>,
    pub problem: Option<PathBuf>,
    #[serde(default)]
    pub strict: bool,
    pub layout: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub domain: Option<String>,
    pub method: Option<String>,
    pub seeds: Option<usize>,
    pub first_seed: Option<u64>,
    pub episodes: Option<usize>,
    pub k: Option<usize>,
    pub meta_state: Option<String>,
    pub potential: Option<String>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub domain: DomainId,
    pub seeds: usize,
    pub first_seed: u64,
    pub spec: RunSpec,
    pub out: PathBuf,
    /// Worker threads; 0 uses one per core.
    pub workers: usize,
    pub model: Option<(PathBuf, PathBuf)>,
    pub strict: bool,
    pub layout: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Defaults for a domain and method, with one seed.
    pub fn new(domain: DomainId, method: Method) -> Self {
        Self {
            domain,
            seeds: 1,
            first_seed: 0,
            spec: RunSpec::defaults(domain, method),
            out: PathBuf::from("results"),
            workers: 0,
            model: None,
            strict: false,
            layout: None,
        }
    }

    pub fn resolve(file: ConfigFile, cli: Overrides) -> Result<Self> {
        let Some(domain) = cli.domain.or(file.domain) else {
            bail!("no domain given");
        };
        let Some(method) = cli.method.or(file.method) else {
            bail!("no method given");
        };
        let domain: DomainId = domain.parse().context("domain")?;
        let method: Method = method.parse().context("method")?;
        let mut cfg = Self::new(domain, method);
        let spec = &mut cfg.spec;

        if let Some(v) = cli.seeds.or(file.seeds) {
            cfg.seeds = v;
        }
        if let Some(v) = cli.first_seed.or(file.first_seed) {
            cfg.first_seed = v;
        }
        if let Some(v) = cli.episodes.or(file.episodes) {
            spec.episodes = v;
        }
        if let Some(v) = cli.k.or(file.k) {
            spec.k = v;
        }
        if let Some(v) = file.max_steps {
            spec.agent.max_steps = v;
        }
        if let Some(v) = cli.meta_state.or(file.meta_state) {
            spec.agent.meta_state = parse_meta_state(&v)?;
        }
        if let Some(v) = cli.potential.or(file.potential) {
            spec.potential = parse_potential(&v)?;
        }
        if let Some(v) = cli.out.or(file.out) {
            cfg.out = v;
        }
        if let Some(v) = cli.workers.or(file.workers) {
            cfg.workers = v;
        }

        let e = file.eval;
        set(&mut spec.schedule.every, e.every);
        set(&mut spec.schedule.runs, e.runs);
        set(&mut spec.schedule.eps, e.eps);

        let h = file.hyper;
        let hp = &mut spec.agent.hp;
        set(&mut hp.gamma, h.gamma);
        set(&mut hp.r_landmark, h.r_landmark);
        set(&mut hp.alpha_h, h.alpha_h);
        set(&mut hp.alpha_l, h.alpha_l);
        set(&mut hp.rd_clip, h.rd_clip);
        set(&mut hp.eps_start, h.eps_start);
        set(&mut hp.eps_floor, h.eps_floor);
        set(&mut hp.eps_decay, h.eps_decay);
        set(&mut hp.lr_start, h.lr_start);
        set(&mut hp.lr_floor, h.lr_floor);
        set(&mut hp.lr_decay, h.lr_decay);
        set(&mut hp.replay_capacity, h.replay_capacity);
        set(&mut hp.replay_batch, h.replay_batch);
        set(&mut hp.window, h.window);

        let m = file.meta;
        let agent = &mut spec.agent;
        set(&mut agent.r_goal, m.r_goal);
        set(&mut agent.r_subgoal, m.r_subgoal);
        set(&mut agent.eps2_start, m.eps2_start);
        set(&mut agent.eps2_floor, m.eps2_floor);
        set(&mut agent.eps2_decay, m.eps2_decay);
        set(&mut agent.curriculum_threshold, m.curriculum_threshold);
        if let Some(b) = m.cluster_buffer {
            agent.cluster_buffer = (b > 0).then_some(b);
        }

        cfg.model = match (file.model.domain, file.model.problem) {
            (Some(d), Some(p)) => Some((d, p)),
            (None, None) => None,
            _ => bail!("[model] needs both `domain` and `problem`"),
        };
        cfg.strict = file.model.strict;
        cfg.layout = file.model.layout;

        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.seeds >= 1, "seeds must be at least 1");
        let s = &self.spec;
        ensure!(s.schedule.every >= 1, "eval.every must be at least 1");
        ensure!(s.schedule.runs >= 1, "eval.runs must be at least 1");
        ensure!(
            (0.0..=1.0).contains(&s.schedule.eps),
            "eval.eps must lie in [0, 1]"
        );
        ensure!(
            (1..=MAX_SKILLS).contains(&s.k),
            "k must be between 1 and {MAX_SKILLS}"
        );
        ensure!(s.agent.max_steps >= 1, "max_steps must be at least 1");
        s.agent.hp.validate()?;
        let a = &s.agent;
        ensure!(
            0.0 < a.eps2_floor && a.eps2_floor <= a.eps2_start && a.eps2_start <= 1.0,
            "meta exploration must satisfy 0 < eps2_floor <= eps2_start <= 1"
        );
        ensure!(
            0.0 < a.eps2_decay && a.eps2_decay <= 1.0,
            "meta.eps2_decay must lie in (0, 1]"
        );
        Ok(())
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

pub fn parse_meta_state(s: &str) -> Result<MetaStateMode> {
    match s {
        "history" => Ok(MetaStateMode::History),
        "mdp" => Ok(MetaStateMode::Mdp),
        _ => bail!("unknown meta-state `{s}` (expected history or mdp)"),
    }
}

pub fn parse_potential(s: &str) -> Result<Potential> {
    match s {
        "currently-true" => Ok(Potential::CurrentlyTrue),
        "ever-true" => Ok(Potential::EverTrue),
        _ => bail!("unknown potential `{s}` (expected currently-true or ever-true)"),
    }
}
