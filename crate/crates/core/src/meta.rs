//! The meta-controller: chains one skill per landmark along a sampled
//! linearization and learns which skill to pick from the skills executed so
//! far in the episode.

use alloc::vec::Vec;

use rand::Rng;
use thiserror::Error;

use crate::clustering::KMeansState;
use crate::gridworld::{Detector, DetectorError, Environment, StateKey};
use crate::landmarks::{LandmarkError, LandmarkGraph, Linearizer};
use crate::rng;
use crate::skills::{
    Estimator, HyperParamError, HyperParams, Labeler, RolloutMode, SkillPool, SubgoalCondition,
};
use crate::symbolic::{Fluent, FluentSet, SymbolicModel};
use crate::FxHashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SkillCount {
    Fixed(usize),
    /// Start with one skill per landmark and grow up to `k_max`.
    Curriculum { k_max: usize },
}

/// What the meta-controller conditions on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetaStateMode {
    /// The skills executed so far in the episode.
    History,
    /// The environment state in which the previous skill terminated.
    Mdp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgentConfig {
    pub hp: HyperParams,
    pub skills: SkillCount,
    pub meta_state: MetaStateMode,
    /// Meta reward when the goal fluents hold.
    pub r_goal: f64,
    /// Meta reward for every subgoal reached.
    pub r_subgoal: f64,
    pub eps2_start: f64,
    pub eps2_floor: f64,
    pub eps2_decay: f64,
    /// The newest skill's ε must drop below this before the pool grows.
    pub curriculum_threshold: f64,
    /// Primitive-step budget of one skill rollout.
    pub max_steps: usize,
    /// Cluster terminal observations (buffer size) instead of using exact
    /// state keys.
    pub cluster_buffer: Option<usize>,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            hp: HyperParams::default(),
            skills: SkillCount::Fixed(8),
            meta_state: MetaStateMode::History,
            r_goal: 10.0,
            r_subgoal: 1.0,
            eps2_start: 1.0,
            eps2_floor: 0.05,
            eps2_decay: 0.9,
            curriculum_threshold: 0.3,
            max_steps: 100,
            cluster_buffer: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AgentError {
    #[error(transparent)]
    Landmarks(#[from] LandmarkError),
    #[error(transparent)]
    Detector(#[from] DetectorError),
    #[error(transparent)]
    HyperParams(#[from] HyperParamError),
    #[error("the number of skills per landmark must be between 1 and {MAX_SKILLS}")]
    SkillCount,
    #[error("the environment renders no pixels to cluster")]
    NoPixels,
    #[error("the model has no valid plan")]
    NoPlan,
}

/// Upper bound on skills per landmark.
pub const MAX_SKILLS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SkillId {
    pub slot: usize,
    pub z: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MetaKey {
    History(Vec<SkillId>),
    State(StateKey),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetaController {
    pub q: FxHashMap<(MetaKey, SkillId), f64>,
    pub eps: f64,
}

impl MetaController {
    pub fn new(eps: f64) -> Self {
        Self {
            q: FxHashMap::default(),
            eps,
        }
    }

    pub fn value(&self, s: &MetaKey, o: SkillId) -> f64 {
        self.q.get(&(s.clone(), o)).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, s: &MetaKey, o: SkillId, v: f64) {
        self.q.insert((s.clone(), o), v);
    }

    /// Largest value over the `k` skills of `slot`.
    pub fn best_value(&self, s: &MetaKey, slot: usize, k: usize) -> f64 {
        (0..k)
            .map(|z| self.value(s, SkillId { slot, z }))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// ε-greedy over the `k` skills of `slot`; ties go to the lowest index.
    pub fn select<R: Rng + ?Sized>(
        &self,
        s: &MetaKey,
        slot: usize,
        k: usize,
        eps: f64,
        rng: &mut R,
    ) -> SkillId {
        if rng.random::<f64>() < eps {
            return SkillId {
                slot,
                z: rng.random_range(0..k),
            };
        }
        let mut best = 0;
        let mut best_v = self.value(s, SkillId { slot, z: 0 });
        for z in 1..k {
            let v = self.value(s, SkillId { slot, z });
            if v > best_v {
                best = z;
                best_v = v;
            }
        }
        SkillId { slot, z: best }
    }
}

/// One evaluation point of a training run.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalRecord {
    /// Training episodes completed before the evaluation.
    pub episode: usize,
    pub eval_success: f64,
    /// Primitive environment steps taken in training so far.
    pub steps: u64,
    pub k_per_landmark: Vec<usize>,
    pub min_skill_eps: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainLog {
    pub records: Vec<EvalRecord>,
}

impl TrainLog {
    pub fn final_success(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.eval_success)
    }

    /// First evaluated episode with a nonzero success rate.
    pub fn first_success(&self) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.eval_success > 0.0)
            .map(|r| r.episode)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalSchedule {
    pub every: usize,
    pub runs: usize,
    pub eps: f64,
}

impl Default for EvalSchedule {
    fn default() -> Self {
        Self {
            every: 5,
            runs: 10,
            eps: 0.05,
        }
    }
}

/// A method that can be trained episode by episode and evaluated.
pub trait Learner<E: Environment> {
    /// Runs one training episode and returns the primitive steps taken.
    fn train_episode(&mut self, env: &E, rng: &mut rng::Rng) -> u64;
    /// Success rate over `runs` episodes acting with exploration `eps`.
    fn evaluate(&mut self, env: &E, runs: usize, eps: f64, rng: &mut rng::Rng) -> f64;
    fn k_per_landmark(&self) -> Vec<usize>;
    fn min_skill_eps(&self) -> f64;
}

/// Trains for `episodes` episodes, evaluating before the first episode,
/// every `schedule.every` episodes, and after the last one.
///
/// Training draws from the `("train", 0)` stream of `seed`; the evaluation
/// after episode `e` draws from `("eval", e)`.
pub fn train_and_log<E: Environment, L: Learner<E>>(
    learner: &mut L,
    env: &E,
    episodes: usize,
    schedule: EvalSchedule,
    seed: u64,
) -> TrainLog {
    assert!(schedule.every >= 1 && schedule.runs >= 1);
    let mut rng = rng::stream(seed, "train", 0);
    let mut log = TrainLog::default();
    let mut steps = 0u64;
    let record = |learner: &mut L, episode: usize, steps: u64, log: &mut TrainLog| {
        let mut eval_rng = rng::stream(seed, "eval", episode as u64);
        let eval_success = learner.evaluate(env, schedule.runs, schedule.eps, &mut eval_rng);
        log.records.push(EvalRecord {
            episode,
            eval_success,
            steps,
            k_per_landmark: learner.k_per_landmark(),
            min_skill_eps: learner.min_skill_eps(),
        });
    };
    record(learner, 0, 0, &mut log);
    for e in 1..=episodes {
        steps += learner.train_episode(env, &mut rng);
        if e % schedule.every == 0 || e == episodes {
            record(learner, e, steps, &mut log);
        }
    }
    log
}

/// The hierarchical agent: one skill pool per landmark fact and a
/// meta-controller over them.
#[derive(Clone, Debug)]
pub struct Asgrl {
    pub cfg: AgentConfig,
    /// Landmark fact of each pool.
    pub slots: Vec<Fluent>,
    pub pools: Vec<SkillPool>,
    pub meta: MetaController,
    pub goal: FluentSet,
    linearizer: Linearizer,
    detector: Detector,
}

/// Outcome of one episode.
#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeOutcome {
    pub success: bool,
    pub steps: u64,
    pub history: Vec<SkillId>,
}

impl Asgrl {
    pub fn new<E: Environment>(
        env: &E,
        model: &SymbolicModel,
        lg: &LandmarkGraph,
        cfg: AgentConfig,
    ) -> Result<Self, AgentError> {
        cfg.hp.validate()?;
        let (k, estimator) = match cfg.skills {
            SkillCount::Fixed(k) => (k, Estimator::Uniform),
            SkillCount::Curriculum { k_max } => {
                if k_max == 0 || k_max > MAX_SKILLS {
                    return Err(AgentError::SkillCount);
                }
                (1, Estimator::Bayes)
            }
        };
        if k == 0 || k > MAX_SKILLS {
            return Err(AgentError::SkillCount);
        }
        if cfg.cluster_buffer.is_some() && env.pixels(&env.reset()).is_none() {
            return Err(AgentError::NoPixels);
        }
        let detector = Detector::bind(env, model)?;
        let linearizer = Linearizer::new(lg)?;
        let slots: Vec<Fluent> = lg.facts.iter().collect();
        let pools = slots
            .iter()
            .map(|&f| {
                let labeler = match cfg.cluster_buffer {
                    Some(m) => Labeler::Clustered(KMeansState::new(k, m)),
                    None => Labeler::Exact,
                };
                SkillPool::new(
                    SubgoalCondition::fluent(f),
                    k,
                    env.actions().len(),
                    &cfg.hp,
                    estimator,
                    labeler,
                )
            })
            .collect();
        Ok(Self {
            meta: MetaController::new(cfg.eps2_start),
            cfg,
            slots,
            pools,
            goal: lg.goal,
            linearizer,
            detector,
        })
    }

    fn slot_of(&self, f: Fluent) -> usize {
        self.slots.iter().position(|&g| g == f).expect("linearization uses landmark facts")
    }

    fn meta_key<E: Environment>(&self, env: &E, s: &E::State, history: &[SkillId]) -> MetaKey {
        match self.cfg.meta_state {
            MetaStateMode::History => MetaKey::History(history.to_vec()),
            MetaStateMode::Mdp => MetaKey::State(env.encode(s)),
        }
    }

    /// One episode along a freshly sampled linearization. Training mode
    /// updates skills and meta values; evaluation mode picks skills
    /// greedily, runs them with the given `eps`, and learns nothing.
    ///
    /// A successful skill is valued at its meta reward plus the best value
    /// recorded for any skill of any landmark from the resulting meta
    /// state; a failed one is set to 0 and ends the episode.
    pub fn episode<E: Environment, R: Rng + ?Sized>(
        &mut self,
        env: &E,
        mode: RolloutMode,
        rng: &mut R,
    ) -> EpisodeOutcome {
        let train = mode == RolloutMode::Train;
        let order = self.linearizer.sample(rng);
        let mut s = env.reset();
        let mut history = Vec::with_capacity(order.len());
        let mut steps = 0u64;
        let mut success = false;
        for (i, &f) in order.iter().enumerate() {
            let slot = self.slot_of(f);
            let key = self.meta_key(env, &s, &history);
            let k = self.pools[slot].k();
            let eps2 = match mode {
                RolloutMode::Train => self.meta.eps,
                RolloutMode::Eval { .. } => 0.0,
            };
            let o = self.meta.select(&key, slot, k, eps2, rng);
            let out = self.pools[slot].rollout(
                env,
                &self.detector,
                o.z,
                &s,
                self.cfg.max_steps,
                &self.cfg.hp,
                mode,
                rng,
            );
            steps += out.steps as u64;
            if !out.reached {
                if train {
                    self.meta.set(&key, o, 0.0);
                }
                break;
            }
            s = out.end_state;
            history.push(o);
            let at_goal = self.goal.is_subset(self.detector.eval(env, &s));
            if train {
                let mut r = self.cfg.r_subgoal;
                if at_goal {
                    r += self.cfg.r_goal;
                }
                let future = if at_goal || i + 1 == order.len() {
                    0.0
                } else {
                    let next_key = self.meta_key(env, &s, &history);
                    self.pools
                        .iter()
                        .enumerate()
                        .map(|(slot, p)| self.meta.best_value(&next_key, slot, p.k()))
                        .fold(0.0, f64::max)
                };
                self.meta.set(&key, o, r + future);
            }
            if env.is_goal(&s) {
                success = true;
                break;
            }
        }
        if train {
            if success {
                self.meta.eps = (self.meta.eps * self.cfg.eps2_decay).max(self.cfg.eps2_floor);
            }
            if let SkillCount::Curriculum { k_max } = self.cfg.skills {
                for pool in &mut self.pools {
                    curriculum_advance(pool, k_max, self.cfg.curriculum_threshold, &self.cfg.hp);
                }
            }
        }
        EpisodeOutcome {
            success,
            steps,
            history,
        }
    }

    pub fn detector(&self) -> &Detector {
        &self.detector
    }
}

/// Adds a fresh skill once the newest one has converged (ε below
/// `threshold`) and found a terminal state. The pool stops growing for good
/// when the newest skill settles on a terminal state another skill already
/// favours.
pub fn curriculum_advance(pool: &mut SkillPool, k_max: usize, threshold: f64, hp: &HyperParams) {
    let k = pool.k();
    if pool.saturated || k >= k_max {
        return;
    }
    let newest = k - 1;
    if pool.skills[newest].eps >= threshold {
        return;
    }
    let Some(mode) = pool.counts.modal_terminal(newest) else {
        return;
    };
    if (0..newest).any(|z| pool.counts.modal_terminal(z) == Some(mode)) {
        pool.saturated = true;
        return;
    }
    pool.add_skill(hp);
}

impl<E: Environment> Learner<E> for Asgrl {
    fn train_episode(&mut self, env: &E, rng: &mut rng::Rng) -> u64 {
        self.episode(env, RolloutMode::Train, rng).steps
    }

    fn evaluate(&mut self, env: &E, runs: usize, eps: f64, rng: &mut rng::Rng) -> f64 {
        let wins = (0..runs)
            .filter(|_| self.episode(env, RolloutMode::Eval { eps }, rng).success)
            .count();
        wins as f64 / runs as f64
    }

    fn k_per_landmark(&self) -> Vec<usize> {
        self.pools.iter().map(SkillPool::k).collect()
    }

    fn min_skill_eps(&self) -> f64 {
        self.pools
            .iter()
            .flat_map(|p| p.skills.iter().map(|s| s.eps))
            .fold(f64::INFINITY, f64::min)
    }
}
