//! Comparison methods: operator policies along a fixed plan, one policy per
//! landmark without diversity, and flat Q-learning with or without
//! landmark-potential shaping.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::gridworld::{Detector, Environment};
use crate::landmarks::LandmarkGraph;
use crate::meta::{AgentConfig, AgentError, Asgrl, Learner, SkillCount};
use crate::rng;
use crate::skills::{
    select_action, Estimator, HyperParams, Labeler, QTable, RolloutMode, SkillPool,
    SubgoalCondition, Transition,
};
use crate::symbolic::{find_plan, FluentSet, SymbolicModel};

/// One policy per landmark, no diversity term.
pub fn landmark_hrl<E: Environment>(
    env: &E,
    model: &SymbolicModel,
    lg: &LandmarkGraph,
    cfg: AgentConfig,
) -> Result<Asgrl, AgentError> {
    Asgrl::new(env, model, lg, landmark_hrl_config(cfg))
}

/// The ASGRL configuration that Landmark-HRL reduces to.
pub fn landmark_hrl_config(cfg: AgentConfig) -> AgentConfig {
    AgentConfig {
        skills: SkillCount::Fixed(1),
        hp: HyperParams {
            alpha_h: 0.0,
            ..cfg.hp
        },
        cluster_buffer: None,
        ..cfg
    }
}

/// A policy per operator of the shortest plan, executed in plan order. An
/// operator terminates when its add effects hold and its delete effects do
/// not.
#[derive(Clone, Debug)]
pub struct PlanHrl {
    pub plan: Vec<String>,
    pub operators: Vec<SkillPool>,
    hp: HyperParams,
    max_steps: usize,
    detector: Detector,
}

impl PlanHrl {
    pub fn new<E: Environment>(
        env: &E,
        model: &SymbolicModel,
        hp: HyperParams,
        max_steps: usize,
    ) -> Result<Self, AgentError> {
        let hp = HyperParams { alpha_h: 0.0, ..hp };
        hp.validate()?;
        let detector = Detector::bind(env, model)?;
        let plan = find_plan(model).ok_or(AgentError::NoPlan)?;
        let operators = plan
            .iter()
            .map(|a| {
                let act = &model.actions[a.0];
                let cond = SubgoalCondition {
                    required: act.add,
                    forbidden: act.del,
                };
                SkillPool::new(cond, 1, env.actions().len(), &hp, Estimator::Uniform, Labeler::Exact)
            })
            .collect();
        Ok(Self {
            plan: plan.iter().map(|a| model.actions[a.0].name.clone()).collect(),
            operators,
            hp,
            max_steps,
            detector,
        })
    }

    fn episode<E: Environment, R: Rng + ?Sized>(
        &mut self,
        env: &E,
        mode: RolloutMode,
        rng: &mut R,
    ) -> (bool, u64) {
        let mut s = env.reset();
        let mut steps = 0u64;
        for op in &mut self.operators {
            let out = op.rollout(env, &self.detector, 0, &s, self.max_steps, &self.hp, mode, rng);
            steps += out.steps as u64;
            if !out.reached {
                return (false, steps);
            }
            s = out.end_state;
            if env.is_goal(&s) {
                return (true, steps);
            }
        }
        (env.is_goal(&s), steps)
    }
}

impl<E: Environment> Learner<E> for PlanHrl {
    fn train_episode(&mut self, env: &E, rng: &mut rng::Rng) -> u64 {
        self.episode(env, RolloutMode::Train, rng).1
    }

    fn evaluate(&mut self, env: &E, runs: usize, eps: f64, rng: &mut rng::Rng) -> f64 {
        let wins = (0..runs)
            .filter(|_| self.episode(env, RolloutMode::Eval { eps }, rng).0)
            .count();
        wins as f64 / runs as f64
    }

    fn k_per_landmark(&self) -> Vec<usize> {
        alloc::vec![1; self.operators.len()]
    }

    fn min_skill_eps(&self) -> f64 {
        self.operators
            .iter()
            .map(|o| o.skills[0].eps)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Potential used by Landmark-Shaping.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Potential {
    /// Landmark facts true in the current state.
    CurrentlyTrue,
    /// Landmark facts true at some point of the episode so far.
    EverTrue,
}

/// Single tabular Q-learner over primitive actions with a sparse goal
/// reward, optionally shaped by `γΦ(s') − Φ(s)`.
#[derive(Clone, Debug)]
pub struct FlatAgent {
    pub q: QTable,
    pub eps: f64,
    pub lr: f64,
    hp: HyperParams,
    /// Per-episode decay of ε and the learning rate.
    pub decay: f64,
    max_steps: usize,
    shaping: Option<(Detector, FluentSet, Potential)>,
}

/// Per-episode annealing factor of the flat methods.
pub const FLAT_DECAY: f64 = 0.995;

impl FlatAgent {
    pub fn goal_q<E: Environment>(env: &E, hp: HyperParams, max_steps: usize) -> Self {
        Self {
            q: QTable::new(env.actions().len()),
            eps: hp.eps_start,
            lr: hp.lr_start,
            hp,
            decay: FLAT_DECAY,
            max_steps,
            shaping: None,
        }
    }

    pub fn landmark_shaping<E: Environment>(
        env: &E,
        model: &SymbolicModel,
        lg: &LandmarkGraph,
        potential: Potential,
        hp: HyperParams,
        max_steps: usize,
    ) -> Result<Self, AgentError> {
        let detector = Detector::bind(env, model)?;
        let mut agent = Self::goal_q(env, hp, max_steps);
        agent.shaping = Some((detector, lg.facts, potential));
        Ok(agent)
    }

    /// `Φ` of a state given the landmark facts already seen this episode.
    pub fn potential<E: Environment>(&self, env: &E, s: &E::State, seen: FluentSet) -> f64 {
        match &self.shaping {
            None => 0.0,
            Some((d, facts, p)) => {
                let now = d.eval(env, s).intersection(*facts);
                match p {
                    Potential::CurrentlyTrue => now.len() as f64,
                    Potential::EverTrue => now.union(seen).len() as f64,
                }
            }
        }
    }

    fn landmarks_true<E: Environment>(&self, env: &E, s: &E::State) -> FluentSet {
        match &self.shaping {
            None => FluentSet::EMPTY,
            Some((d, facts, _)) => d.eval(env, s).intersection(*facts),
        }
    }

    fn episode<E: Environment, R: Rng + ?Sized>(
        &mut self,
        env: &E,
        eval_eps: Option<f64>,
        rng: &mut R,
    ) -> (bool, u64) {
        let mut s = env.reset();
        let mut seen = self.landmarks_true(env, &s);
        let eps = eval_eps.unwrap_or(self.eps);
        let mut steps = 0u64;
        while steps < self.max_steps as u64 && !env.is_goal(&s) {
            let key = env.encode(&s);
            let a = select_action(&self.q, key, eps, rng);
            let next = env.step(&s, a);
            steps += 1;
            let done = env.is_goal(&next);
            if eval_eps.is_none() {
                let phi = self.potential(env, &s, seen);
                let seen_next = seen.union(self.landmarks_true(env, &next));
                let phi_next = self.potential(env, &next, seen_next);
                let r = if done { 1.0 } else { 0.0 } + self.hp.gamma * phi_next - phi;
                let t = Transition {
                    state: key,
                    action: a as u8,
                    reward: r,
                    next: env.encode(&next),
                    terminal: done,
                };
                self.q.update(&t, self.hp.gamma, self.lr);
                seen = seen_next;
            }
            s = next;
        }
        if eval_eps.is_none() {
            self.eps = (self.eps * self.decay).max(self.hp.eps_floor);
            self.lr = (self.lr * self.decay).max(self.hp.lr_floor);
        }
        (env.is_goal(&s), steps)
    }
}

impl<E: Environment> Learner<E> for FlatAgent {
    fn train_episode(&mut self, env: &E, rng: &mut rng::Rng) -> u64 {
        self.episode(env, None, rng).1
    }

    fn evaluate(&mut self, env: &E, runs: usize, eps: f64, rng: &mut rng::Rng) -> f64 {
        let wins = (0..runs).filter(|_| self.episode(env, Some(eps), rng).0).count();
        wins as f64 / runs as f64
    }

    fn k_per_landmark(&self) -> Vec<usize> {
        Vec::new()
    }

    fn min_skill_eps(&self) -> f64 {
        self.eps
    }
}
