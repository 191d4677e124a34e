//! Diverse tabular skills for a single landmark.
//!
//! A skill terminates as soon as its subgoal condition holds. On success it
//! receives `R_L + α_H·R_d`, where `R_d = max(ln p(z|s), clip)` rewards
//! terminating in states the other skills of the pool do not visit.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use rand::Rng;
use thiserror::Error;

use crate::clustering::KMeansState;
use crate::gridworld::{Detector, Environment, StateKey, MAX_ACTIONS};
use crate::symbolic::FluentSet;
use crate::FxHashMap;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperParams {
    pub gamma: f64,
    pub r_landmark: f64,
    pub alpha_h: f64,
    pub alpha_l: f64,
    pub rd_clip: f64,
    pub eps_start: f64,
    pub eps_floor: f64,
    pub eps_decay: f64,
    pub lr_start: f64,
    pub lr_floor: f64,
    pub lr_decay: f64,
    /// Successful trajectories kept per skill.
    pub replay_capacity: usize,
    /// Transitions replayed after each rollout.
    pub replay_batch: usize,
    /// Terminal visits per skill used to estimate `p(s|z)`.
    pub window: usize,
}

impl Default for HyperParams {
    fn default() -> Self {
        Self {
            gamma: 0.95,
            r_landmark: 1.0,
            alpha_h: 0.1,
            alpha_l: 0.01,
            rd_clip: -9.9,
            eps_start: 1.0,
            eps_floor: 0.05,
            eps_decay: 0.95,
            lr_start: 1.0,
            lr_floor: 0.1,
            lr_decay: 0.95,
            replay_capacity: 16,
            replay_batch: 32,
            window: 50,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum HyperParamError {
    #[error("gamma must lie in (0, 1)")]
    Gamma,
    #[error("alpha_h * rd_clip must lie in (-1, 0]")]
    DiversityScale,
    #[error("alpha_l must be positive")]
    Smoothing,
    #[error("{0} schedule must satisfy 0 < floor <= start <= 1 and 0 < decay <= 1")]
    Schedule(&'static str),
    #[error("replay capacity, batch and window must be positive")]
    Sizes,
}

impl HyperParams {
    pub fn validate(&self) -> Result<(), HyperParamError> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(HyperParamError::Gamma);
        }
        let worst = self.alpha_h * self.rd_clip;
        if !(worst > -1.0 && worst <= 0.0) {
            return Err(HyperParamError::DiversityScale);
        }
        if self.alpha_l <= 0.0 {
            return Err(HyperParamError::Smoothing);
        }
        let sched_ok = |floor: f64, start: f64, decay: f64| {
            floor > 0.0 && floor <= start && start <= 1.0 && decay > 0.0 && decay <= 1.0
        };
        if !sched_ok(self.eps_floor, self.eps_start, self.eps_decay) {
            return Err(HyperParamError::Schedule("epsilon"));
        }
        if !sched_ok(self.lr_floor, self.lr_start, self.lr_decay) {
            return Err(HyperParamError::Schedule("learning-rate"));
        }
        if self.replay_capacity == 0 || self.replay_batch == 0 || self.window == 0 {
            return Err(HyperParamError::Sizes);
        }
        Ok(())
    }
}

/// Sparse action-value table; missing entries read as 0.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QTable {
    n_actions: usize,
    rows: FxHashMap<StateKey, [f64; MAX_ACTIONS]>,
}

impl QTable {
    pub fn new(n_actions: usize) -> Self {
        assert!(n_actions > 0 && n_actions <= MAX_ACTIONS);
        Self {
            n_actions,
            rows: FxHashMap::default(),
        }
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, s: StateKey, a: usize) -> f64 {
        self.rows.get(&s).map_or(0.0, |r| r[a])
    }

    pub fn set(&mut self, s: StateKey, a: usize, v: f64) {
        self.rows.entry(s).or_insert([0.0; MAX_ACTIONS])[a] = v;
    }

    pub fn max(&self, s: StateKey) -> f64 {
        match self.rows.get(&s) {
            Some(r) => r[..self.n_actions].iter().copied().fold(f64::NEG_INFINITY, f64::max),
            None => 0.0,
        }
    }

    /// Greedy action; ties go to the lowest index.
    pub fn argmax(&self, s: StateKey) -> usize {
        let Some(r) = self.rows.get(&s) else {
            return 0;
        };
        let mut best = 0;
        for a in 1..self.n_actions {
            if r[a] > r[best] {
                best = a;
            }
        }
        best
    }

    /// `Q(s,a) ← Q(s,a) + lr·(r + γ·max Q(s') ·(1 − terminal) − Q(s,a))`.
    pub fn update(&mut self, t: &Transition, gamma: f64, lr: f64) {
        let future = if t.terminal { 0.0 } else { gamma * self.max(t.next) };
        let old = self.get(t.state, t.action as usize);
        self.set(t.state, t.action as usize, old + lr * (t.reward + future - old));
    }

    pub fn entries(&self) -> impl Iterator<Item = (StateKey, &[f64])> {
        self.rows.iter().map(|(k, v)| (*k, &v[..self.n_actions]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub state: StateKey,
    pub action: u8,
    pub reward: f64,
    pub next: StateKey,
    pub terminal: bool,
}

/// ε-greedy: uniform random with probability `eps`, else greedy.
pub fn select_action<R: Rng + ?Sized>(q: &QTable, s: StateKey, eps: f64, rng: &mut R) -> usize {
    if rng.random::<f64>() < eps {
        return rng.random_range(0..q.n_actions());
    }
    q.argmax(s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Skill {
    pub q: QTable,
    pub eps: f64,
    pub lr: f64,
    pub replay: VecDeque<Vec<Transition>>,
}

impl Skill {
    pub fn new(n_actions: usize, hp: &HyperParams) -> Self {
        Self {
            q: QTable::new(n_actions),
            eps: hp.eps_start,
            lr: hp.lr_start,
            replay: VecDeque::new(),
        }
    }

    /// Multiplicative decay of ε and the learning rate after a success.
    pub fn anneal(&mut self, hp: &HyperParams) {
        self.eps = (self.eps * hp.eps_decay).max(hp.eps_floor);
        self.lr = (self.lr * hp.lr_decay).max(hp.lr_floor);
    }

    pub fn remember(&mut self, trajectory: Vec<Transition>, hp: &HyperParams) {
        self.replay.push_back(trajectory);
        while self.replay.len() > hp.replay_capacity {
            self.replay.pop_front();
        }
    }

    /// Q-updates on `replay_batch` transitions drawn uniformly from the
    /// stored successful trajectories.
    pub fn replay_update<R: Rng + ?Sized>(&mut self, hp: &HyperParams, rng: &mut R) {
        let total: usize = self.replay.iter().map(Vec::len).sum();
        if total == 0 {
            return;
        }
        for _ in 0..hp.replay_batch {
            let mut i = rng.random_range(0..total);
            let mut picked = None;
            for traj in &self.replay {
                if i < traj.len() {
                    picked = Some(traj[i]);
                    break;
                }
                i -= traj.len();
            }
            let t = picked.expect("index within total");
            self.q.update(&t, hp.gamma, self.lr);
        }
    }
}

/// Terminal-state statistics of a skill pool.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiversityCounts {
    /// `count(s, z)`, indexed by terminal label then skill.
    pub counts: FxHashMap<StateKey, Vec<u32>>,
    /// Rollouts started per skill.
    pub rollouts: Vec<u64>,
    /// Most recent terminal labels per skill, oldest first.
    pub windows: Vec<VecDeque<StateKey>>,
    pub window: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EstimatorError {
    #[error("state has no recorded visits")]
    UnseenState,
    #[error("skill has no terminal visits in its window")]
    NoTerminalVisits,
}

impl DiversityCounts {
    pub fn new(skills: usize, window: usize) -> Self {
        Self {
            counts: FxHashMap::default(),
            rollouts: alloc::vec![0; skills],
            windows: alloc::vec![VecDeque::new(); skills],
            window,
        }
    }

    pub fn skills(&self) -> usize {
        self.rollouts.len()
    }

    pub fn add_skill(&mut self) {
        self.rollouts.push(0);
        self.windows.push(VecDeque::new());
    }

    pub fn count(&self, s: StateKey, z: usize) -> u32 {
        self.counts.get(&s).and_then(|r| r.get(z)).copied().unwrap_or(0)
    }

    pub fn record_rollout(&mut self, z: usize) {
        self.rollouts[z] += 1;
    }

    pub fn record_terminal(&mut self, z: usize, s: StateKey) {
        let n = self.skills();
        let row = self.counts.entry(s).or_insert_with(|| alloc::vec![0; n]);
        if row.len() <= z {
            row.resize(z + 1, 0);
        }
        row[z] += 1;
        self.push_window(z, s);
    }

    pub(crate) fn push_window(&mut self, z: usize, s: StateKey) {
        let w = &mut self.windows[z];
        w.push_back(s);
        while w.len() > self.window {
            w.pop_front();
        }
    }

    /// Terminal states skill `z` has reached, in key order.
    pub fn terminal_states(&self, z: usize) -> Vec<StateKey> {
        let mut out: Vec<StateKey> = self
            .counts
            .iter()
            .filter(|(_, r)| r.get(z).copied().unwrap_or(0) > 0)
            .map(|(k, _)| *k)
            .collect();
        out.sort();
        out
    }

    /// Most frequent terminal label in `z`'s window; ties go to the smallest
    /// key.
    pub fn modal_terminal(&self, z: usize) -> Option<StateKey> {
        let mut freq: FxHashMap<StateKey, usize> = FxHashMap::default();
        for s in &self.windows[z] {
            *freq.entry(*s).or_default() += 1;
        }
        freq.into_iter()
            .max_by(|(ka, a), (kb, b)| a.cmp(b).then(kb.cmp(ka)))
            .map(|(k, _)| k)
    }

    /// Number of distinct terminal labels over all skills.
    pub fn distinct_terminals(&self) -> usize {
        self.counts.values().filter(|r| r.iter().any(|&c| c > 0)).count()
    }
}

/// `p(z|s) = count(s,z) / Σ_j count(s,j)`.
pub fn p_z_given_s_uniform(c: &DiversityCounts, s: StateKey) -> Result<Vec<f64>, EstimatorError> {
    let n = c.skills();
    let row: Vec<u32> = (0..n).map(|z| c.count(s, z)).collect();
    let total: u64 = row.iter().map(|&x| x as u64).sum();
    if total == 0 {
        return Err(EstimatorError::UnseenState);
    }
    Ok(row.iter().map(|&x| x as f64 / total as f64).collect())
}

/// `p(s|z)` over the last `window` terminal visits of `z`.
pub fn p_s_given_z(c: &DiversityCounts, z: usize) -> Result<Vec<(StateKey, f64)>, EstimatorError> {
    let w = &c.windows[z];
    if w.is_empty() {
        return Err(EstimatorError::NoTerminalVisits);
    }
    let mut freq: FxHashMap<StateKey, usize> = FxHashMap::default();
    for s in w {
        *freq.entry(*s).or_default() += 1;
    }
    let mut out: Vec<(StateKey, f64)> = freq
        .into_iter()
        .map(|(s, n)| (s, n as f64 / w.len() as f64))
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

fn p_s_given_z_at(c: &DiversityCounts, z: usize, s: StateKey) -> f64 {
    let w = &c.windows[z];
    if w.is_empty() {
        return 0.0;
    }
    w.iter().filter(|x| **x == s).count() as f64 / w.len() as f64
}

/// Bayes estimate with Laplace smoothing:
/// `p(z|s) = (p(s|z)p(z) + α) / (Σ_j p(s|z_j)p(z_j) + |Z|·α)`,
/// with priors `p(z)` proportional to rollouts.
pub fn p_z_given_s_bayes(c: &DiversityCounts, s: StateKey, alpha: f64) -> Vec<f64> {
    let n = c.skills();
    let total: u64 = c.rollouts.iter().sum();
    let prior = |z: usize| {
        if total == 0 {
            1.0 / n as f64
        } else {
            c.rollouts[z] as f64 / total as f64
        }
    };
    let joint: Vec<f64> = (0..n).map(|z| p_s_given_z_at(c, z, s) * prior(z)).collect();
    let denom: f64 = joint.iter().sum::<f64>() + n as f64 * alpha;
    joint.iter().map(|j| (j + alpha) / denom).collect()
}

/// `R_d = max(ln p, clip)`.
pub fn diversity_reward(p: f64, clip: f64) -> f64 {
    if p <= 0.0 {
        return clip;
    }
    libm::log(p).max(clip)
}

/// `R_L + α_H·R_d` when the landmark holds, else 0.
pub fn skill_reward(satisfied: bool, hp: &HyperParams, rd: f64) -> f64 {
    if satisfied {
        hp.r_landmark + hp.alpha_h * rd
    } else {
        0.0
    }
}

/// Which estimator turns counts into `p(z|s)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Estimator {
    /// Visit counts; used with a fixed number of skills.
    Uniform,
    /// Bayes over windowed `p(s|z)`; used when the pool grows.
    Bayes,
}

/// How terminal states are grouped before counting.
#[derive(Clone, Debug, PartialEq)]
pub enum Labeler {
    /// Each state key is its own label.
    Exact,
    /// Labels are K-Means clusters of the rendered observation.
    Clustered(KMeansState),
}

/// Fluents that must hold and fluents that must not hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SubgoalCondition {
    pub required: FluentSet,
    pub forbidden: FluentSet,
}

impl SubgoalCondition {
    pub fn fluent(f: crate::symbolic::Fluent) -> Self {
        Self {
            required: FluentSet::EMPTY.with(f),
            forbidden: FluentSet::EMPTY,
        }
    }

    pub fn holds<E: Environment>(&self, env: &E, d: &Detector, s: &E::State) -> bool {
        d.satisfies(env, s, self.required, self.forbidden)
    }
}

/// The skills of one landmark plus their shared diversity statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct SkillPool {
    pub condition: SubgoalCondition,
    pub skills: Vec<Skill>,
    pub counts: DiversityCounts,
    pub estimator: Estimator,
    pub labeler: Labeler,
    /// Set once growing the pool stops producing new terminal states.
    pub saturated: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SkillOutcome<S> {
    pub reached: bool,
    pub end_state: S,
    pub terminal_label: Option<StateKey>,
    pub trace: Vec<Transition>,
    pub steps: usize,
}

/// Whether a rollout learns or only acts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RolloutMode {
    Train,
    Eval { eps: f64 },
}

impl SkillPool {
    pub fn new(
        condition: SubgoalCondition,
        k: usize,
        n_actions: usize,
        hp: &HyperParams,
        estimator: Estimator,
        labeler: Labeler,
    ) -> Self {
        Self {
            condition,
            skills: (0..k).map(|_| Skill::new(n_actions, hp)).collect(),
            counts: DiversityCounts::new(k, hp.window),
            estimator,
            labeler,
            saturated: false,
        }
    }

    pub fn k(&self) -> usize {
        self.skills.len()
    }

    pub fn add_skill(&mut self, hp: &HyperParams) {
        let n = self.skills[0].q.n_actions();
        self.skills.push(Skill::new(n, hp));
        self.counts.add_skill();
        if let Labeler::Clustered(km) = &mut self.labeler {
            km.k = self.skills.len();
        }
    }

    /// Records a terminal visit of skill `z` and returns the state's label.
    fn record_terminal<E: Environment>(&mut self, env: &E, s: &E::State, z: usize) -> StateKey {
        match &mut self.labeler {
            Labeler::Exact => {
                let key = env.encode(s);
                self.counts.record_terminal(z, key);
                key
            }
            Labeler::Clustered(km) => {
                let obs = env
                    .pixels(s)
                    .expect("clustered labels need an environment with pixels");
                let (cluster, _) = km.observe(&obs.data, z);
                self.counts.counts = km.relabel_counts(self.skills.len());
                let label = StateKey(cluster as u128);
                self.counts.push_window(z, label);
                label
            }
        }
    }

    /// `p(z|s)` for the executing skill under the pool's estimator.
    pub fn p_z(&self, label: StateKey, z: usize, alpha_l: f64) -> f64 {
        match self.estimator {
            Estimator::Uniform => p_z_given_s_uniform(&self.counts, label).map_or(0.0, |p| p[z]),
            Estimator::Bayes => p_z_given_s_bayes(&self.counts, label, alpha_l)[z],
        }
    }

    /// Runs skill `z` from `start` until its condition holds or `max_steps`
    /// primitive steps have been taken. In training mode the skill learns
    /// from the rollout: the terminal transition carries the diversity
    /// reward, Q-updates sweep the trace backwards, a replay batch follows,
    /// and ε and the learning rate anneal after a success.
    #[allow(clippy::too_many_arguments)]
    pub fn rollout<E: Environment, R: Rng + ?Sized>(
        &mut self,
        env: &E,
        detector: &Detector,
        z: usize,
        start: &E::State,
        max_steps: usize,
        hp: &HyperParams,
        mode: RolloutMode,
        rng: &mut R,
    ) -> SkillOutcome<E::State> {
        let train = mode == RolloutMode::Train;
        if train {
            self.counts.record_rollout(z);
        }
        let eps = match mode {
            RolloutMode::Train => self.skills[z].eps,
            RolloutMode::Eval { eps } => eps,
        };
        let mut s = start.clone();
        let mut reached = self.condition.holds(env, detector, &s);
        let mut trace = Vec::new();
        let mut key = env.encode(&s);
        while !reached && trace.len() < max_steps {
            let a = select_action(&self.skills[z].q, key, eps, rng);
            let next = env.step(&s, a);
            let next_key = env.encode(&next);
            reached = self.condition.holds(env, detector, &next);
            trace.push(Transition {
                state: key,
                action: a as u8,
                reward: 0.0,
                next: next_key,
                terminal: reached,
            });
            let stuck = env.is_goal(&next) && !reached;
            s = next;
            key = next_key;
            if stuck {
                break;
            }
        }
        let steps = trace.len();
        let mut terminal_label = None;
        if train {
            if reached {
                let label = self.record_terminal(env, &s, z);
                terminal_label = Some(label);
                let rd = diversity_reward(self.p_z(label, z, hp.alpha_l), hp.rd_clip);
                if let Some(last) = trace.last_mut() {
                    last.reward = skill_reward(true, hp, rd);
                }
            }
            let skill = &mut self.skills[z];
            for t in trace.iter().rev() {
                skill.q.update(t, hp.gamma, skill.lr);
            }
            if reached && !trace.is_empty() {
                skill.remember(trace.clone(), hp);
            }
            skill.replay_update(hp, rng);
            if reached && !trace.is_empty() {
                skill.anneal(hp);
            }
        } else if reached {
            terminal_label = Some(env.encode(&s));
        }
        SkillOutcome {
            reached,
            end_state: s,
            terminal_label,
            trace,
            steps,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(table: &[(u128, &[u32])]) -> DiversityCounts {
        let n = table[0].1.len();
        let mut c = DiversityCounts::new(n, 50);
        for (s, row) in table {
            c.counts.insert(StateKey(*s), row.to_vec());
        }
        c
    }

    #[test]
    fn uniform_estimator_examples() {
        let c = counts(&[(1, &[3, 1])]);
        assert_eq!(p_z_given_s_uniform(&c, StateKey(1)).unwrap(), [0.75, 0.25]);
        let c = counts(&[(1, &[5, 0])]);
        assert_eq!(p_z_given_s_uniform(&c, StateKey(1)).unwrap(), [1.0, 0.0]);
        assert_eq!(
            p_z_given_s_uniform(&c, StateKey(9)),
            Err(EstimatorError::UnseenState)
        );
    }

    #[test]
    fn window_slides() {
        let mut c = DiversityCounts::new(1, 3);
        for s in [1, 1, 2, 2, 2] {
            c.record_terminal(0, StateKey(s));
        }
        assert_eq!(p_s_given_z(&c, 0).unwrap(), [(StateKey(2), 1.0)]);
        assert_eq!(c.count(StateKey(1), 0), 2);
    }

    #[test]
    fn bayes_examples() {
        let mut c = DiversityCounts::new(2, 50);
        c.rollouts = alloc::vec![1, 1];
        c.record_terminal(0, StateKey(7));
        c.record_terminal(1, StateKey(8));
        let p = p_z_given_s_bayes(&c, StateKey(7), 0.01);
        assert!((p[0] - 0.51 / 0.52).abs() < 1e-12);
        let p = p_z_given_s_bayes(&c, StateKey(99), 0.01);
        assert_eq!(p, [0.5, 0.5]);
    }

    #[test]
    fn reward_examples() {
        let hp = HyperParams::default();
        assert_eq!(diversity_reward(1.0, -9.9), 0.0);
        assert!((diversity_reward(0.5, -9.9) + core::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(diversity_reward(1e-9, -9.9), -9.9);
        assert_eq!(skill_reward(true, &hp, 0.0), 1.0);
        assert_eq!(skill_reward(false, &hp, 0.0), 0.0);
        assert!((skill_reward(true, &hp, -9.9) - 0.01).abs() < 1e-12);
    }

    #[test]
    fn anneal_schedule() {
        let hp = HyperParams::default();
        let mut s = Skill::new(4, &hp);
        s.anneal(&hp);
        assert!((s.eps - 0.95).abs() < 1e-12);
        s.eps = 0.051;
        s.lr = 0.1;
        s.anneal(&hp);
        assert_eq!((s.eps, s.lr), (0.05, 0.1));
    }

    #[test]
    fn q_update_examples() {
        let mut q = QTable::new(2);
        let t = Transition {
            state: StateKey(0),
            action: 1,
            reward: 1.0,
            next: StateKey(1),
            terminal: true,
        };
        q.update(&t, 0.95, 1.0);
        assert_eq!(q.get(StateKey(0), 1), 1.0);
        let t = Transition { reward: 0.0, state: StateKey(5), ..t };
        q.update(&t, 0.95, 1.0);
        assert_eq!(q.get(StateKey(5), 1), 0.0);
        assert_eq!(QTable::new(3).argmax(StateKey(42)), 0);
    }

    #[test]
    fn replay_is_bounded() {
        let hp = HyperParams::default();
        let mut s = Skill::new(2, &hp);
        for i in 0..20u128 {
            let t = Transition {
                state: StateKey(i),
                action: 0,
                reward: 0.0,
                next: StateKey(i),
                terminal: false,
            };
            s.remember(alloc::vec![t], &hp);
        }
        assert_eq!(s.replay.len(), 16);
        assert_eq!(s.replay[0][0].state, StateKey(4));
    }

    #[test]
    fn default_hyperparams_validate() {
        assert_eq!(HyperParams::default().validate(), Ok(()));
        let bad = HyperParams {
            alpha_h: 0.2,
            ..Default::default()
        };
        assert_eq!(bad.validate(), Err(HyperParamError::DiversityScale));
    }
}
