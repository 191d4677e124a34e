use asgrl_core::baselines::{FlatAgent, PlanHrl, Potential};
use asgrl_core::domains::{run_seed, DomainId, Method, RunSpec, Task};
use asgrl_core::gridworld::{reachable_states, Detector, Environment, Household, Probe, StateKey};
use asgrl_core::landmarks::extract_landmarks;
use asgrl_core::meta::{
    curriculum_advance, train_and_log, AgentConfig, Asgrl, EvalSchedule, Learner, MetaController,
    MetaKey, MetaStateMode, SkillCount, SkillId,
};
use asgrl_core::rng;
use asgrl_core::skills::{
    Estimator, HyperParams, Labeler, RolloutMode, SkillPool, SubgoalCondition,
};
use asgrl_core::symbolic::{load_model, Fluent, FluentSet, ParseOptions, SymbolicModel};
use rand::Rng;

/// Cells 0..=4, start at 0, goal at 4.
struct Corridor;

impl Environment for Corridor {
    type State = u8;

    fn name(&self) -> &'static str {
        "corridor"
    }
    fn actions(&self) -> &'static [&'static str] {
        &["left", "right"]
    }
    fn reset(&self) -> u8 {
        0
    }
    fn step(&self, s: &u8, a: usize) -> u8 {
        match (*s, a) {
            (4, _) => 4,
            (s, 0) => s.saturating_sub(1),
            (s, _) => s + 1,
        }
    }
    fn is_goal(&self, s: &u8) -> bool {
        *s == 4
    }
    fn encode(&self, s: &u8) -> StateKey {
        StateKey(*s as u128)
    }
    fn probes(&self) -> &'static [&'static str] {
        &["halfway", "at-end"]
    }
    fn test(&self, s: &u8, p: Probe) -> bool {
        match p.0 {
            0 => *s >= 2,
            _ => *s == 4,
        }
    }
}

const CORRIDOR_ONE: &str = "(define (domain corridor) (:predicates (at-end))
  (:action walk :parameters () :precondition (and) :effect (and (at-end))))";

const CORRIDOR_TWO: &str = "(define (domain corridor) (:predicates (halfway) (at-end))
  (:action walk_half :parameters () :precondition (and) :effect (and (halfway)))
  (:action walk_end :parameters () :precondition (and (halfway)) :effect (and (at-end))))";

const CORRIDOR_PROBLEM: &str =
    "(define (problem p) (:domain corridor) (:init) (:goal (and (at-end))))";

fn corridor(domain: &str) -> SymbolicModel {
    load_model(domain, CORRIDOR_PROBLEM, ParseOptions::default()).unwrap()
}

fn corridor_agent(domain: &str, k: usize) -> Asgrl {
    let m = corridor(domain);
    let lg = extract_landmarks(&m).unwrap();
    let cfg = AgentConfig {
        skills: SkillCount::Fixed(k),
        max_steps: 20,
        ..AgentConfig::default()
    };
    Asgrl::new(&Corridor, &m, &lg, cfg).unwrap()
}

#[test]
fn single_landmark_meta_value_is_the_meta_reward() {
    let mut agent = corridor_agent(CORRIDOR_ONE, 2);
    let mut r = rng::stream(0, "train", 0);
    for _ in 0..50 {
        agent.episode(&Corridor, RolloutMode::Train, &mut r);
    }
    let root = MetaKey::History(vec![]);
    let values: Vec<f64> = (0..2).map(|z| agent.meta.value(&root, SkillId { slot: 0, z })).collect();
    assert!(values.iter().all(|&v| v == 0.0 || v == 11.0), "{values:?}");
    assert!(values.contains(&11.0));
    // A further success writes the same value again.
    agent.meta.eps = 0.0;
    let before = agent.meta.q.clone();
    let out = agent.episode(&Corridor, RolloutMode::Train, &mut r);
    assert!(out.success);
    assert_eq!(agent.meta.q, before);
}

#[test]
fn chained_meta_values_add_the_successor_value() {
    let mut agent = corridor_agent(CORRIDOR_TWO, 1);
    let mut r = rng::stream(1, "train", 0);
    for _ in 0..100 {
        agent.episode(&Corridor, RolloutMode::Train, &mut r);
    }
    let f = corridor(CORRIDOR_TWO).fluent("halfway").unwrap();
    let halfway = agent.slots.iter().position(|&g| g == f).unwrap();
    let end = 1 - halfway;
    let first = SkillId { slot: halfway, z: 0 };
    let second = SkillId { slot: end, z: 0 };
    let after = MetaKey::History(vec![first]);
    assert_eq!(agent.meta.value(&after, second), 11.0);
    assert_eq!(agent.meta.value(&MetaKey::History(vec![]), first), 12.0);
    let out = agent.episode(&Corridor, RolloutMode::Eval { eps: 0.0 }, &mut r);
    assert!(out.success);
    assert_eq!(out.history, [first, second]);
}

#[test]
fn evaluation_learns_nothing() {
    let task = Task::bundled(DomainId::HouseholdV1).unwrap();
    let env = Household::from_layout(&task.layout).unwrap();
    let lg = extract_landmarks(&task.model).unwrap();
    let mut agent = Asgrl::new(&env, &task.model, &lg, AgentConfig::default()).unwrap();
    let mut r = rng::stream(2, "train", 0);
    for _ in 0..50 {
        agent.episode(&env, RolloutMode::Train, &mut r);
    }
    let (meta, pools) = (agent.meta.clone(), agent.pools.clone());
    Learner::evaluate(&mut agent, &env, 10, 0.05, &mut r);
    assert_eq!(agent.meta, meta);
    assert_eq!(agent.pools, pools);
}

#[test]
fn histories_never_repeat_a_landmark() {
    let task = Task::bundled(DomainId::HouseholdV1).unwrap();
    let env = Household::from_layout(&task.layout).unwrap();
    let lg = extract_landmarks(&task.model).unwrap();
    for meta_state in [MetaStateMode::History, MetaStateMode::Mdp] {
        let cfg = AgentConfig { meta_state, ..AgentConfig::default() };
        let mut agent = Asgrl::new(&env, &task.model, &lg, cfg).unwrap();
        let mut r = rng::stream(3, "train", 0);
        for _ in 0..300 {
            let out = agent.episode(&env, RolloutMode::Train, &mut r);
            assert!(out.history.len() <= agent.slots.len());
            let mut slots: Vec<usize> = out.history.iter().map(|o| o.slot).collect();
            slots.sort();
            slots.dedup();
            assert_eq!(slots.len(), out.history.len());
            if out.success {
                assert_eq!(out.history.len(), agent.slots.len());
            }
        }
    }
}

#[test]
fn meta_selection() {
    let mut r = rng::stream(4, "meta", 0);
    let fresh = MetaController::new(0.0);
    let root = MetaKey::History(vec![]);
    assert_eq!(fresh.select(&root, 2, 5, 0.0, &mut r), SkillId { slot: 2, z: 0 });

    let mut m = MetaController::new(0.0);
    m.set(&root, SkillId { slot: 0, z: 3 }, 2.0);
    m.set(&root, SkillId { slot: 0, z: 1 }, 2.0);
    assert_eq!(m.select(&root, 0, 5, 0.0, &mut r).z, 1);

    let n = 10_000;
    let mut hits = [0usize; 4];
    for _ in 0..n {
        hits[m.select(&root, 0, 4, 1.0, &mut r).z] += 1;
    }
    let sigma = (n as f64 * 0.25 * 0.75).sqrt();
    for h in hits {
        assert!((h as f64 - n as f64 / 4.0).abs() < 3.0 * sigma, "{hits:?}");
    }
}

fn pool(k: usize, hp: &HyperParams) -> SkillPool {
    SkillPool::new(SubgoalCondition::fluent(Fluent(0)), k, 4, hp, Estimator::Bayes, Labeler::Exact)
}

#[test]
fn curriculum_growth_examples() {
    let hp = HyperParams::default();

    let mut p = pool(1, &hp);
    p.skills[0].eps = 0.25;
    p.counts.record_terminal(0, StateKey(5));
    curriculum_advance(&mut p, 4, 0.3, &hp);
    assert_eq!(p.k(), 2);
    assert_eq!(p.counts.skills(), 2);

    // The new skill has not converged yet.
    curriculum_advance(&mut p, 4, 0.3, &hp);
    assert_eq!(p.k(), 2);

    // Converged on a terminal state nobody else favours.
    p.skills[1].eps = 0.1;
    p.counts.record_terminal(1, StateKey(6));
    curriculum_advance(&mut p, 4, 0.3, &hp);
    assert_eq!(p.k(), 3);

    // Converged onto skill 0's terminal state: the pool stops for good.
    p.skills[2].eps = 0.1;
    p.counts.record_terminal(2, StateKey(5));
    curriculum_advance(&mut p, 4, 0.3, &hp);
    assert_eq!(p.k(), 3);
    assert!(p.saturated);

    // At the cap nothing is added.
    let mut p = pool(2, &hp);
    p.skills[1].eps = 0.0;
    p.counts.record_terminal(1, StateKey(1));
    curriculum_advance(&mut p, 2, 0.3, &hp);
    assert_eq!(p.k(), 2);

    // Converged but never reached the landmark.
    let mut p = pool(1, &hp);
    p.skills[0].eps = 0.0;
    curriculum_advance(&mut p, 4, 0.3, &hp);
    assert_eq!(p.k(), 1);
}

#[test]
fn failed_rollouts_do_not_anneal() {
    let task = Task::bundled(DomainId::HouseholdV1).unwrap();
    let env = Household::from_layout(&task.layout).unwrap();
    let d = Detector::bind(&env, &task.model).unwrap();
    let hp = HyperParams::default();
    let dest = task.model.fluent("at-destination").unwrap();
    let mut p = SkillPool::new(SubgoalCondition::fluent(dest), 2, env.actions().len(), &hp, Estimator::Uniform, Labeler::Exact);
    let mut r = rng::stream(5, "train", 0);
    let out = p.rollout(&env, &d, 1, &env.reset(), 0, &hp, RolloutMode::Train, &mut r);
    assert!(!out.reached && out.trace.is_empty());
    let out = p.rollout(&env, &d, 1, &env.reset(), 3, &hp, RolloutMode::Train, &mut r);
    assert!(!out.reached);
    assert_eq!(out.steps, 3);
    assert_eq!(p.skills[1].eps, hp.eps_start);
    assert_eq!(p.counts.distinct_terminals(), 0);
}

#[test]
fn two_skills_find_both_door_states() {
    let task = Task::bundled(DomainId::HouseholdV1).unwrap();
    let env = Household::from_layout(&task.layout).unwrap();
    let d = Detector::bind(&env, &task.model).unwrap();
    let door = task.model.fluent("door-open").unwrap();
    let graph = reachable_states(&env).unwrap();
    // Door-open states where the door is first opened, split by battery.
    let mut low = Vec::new();
    let mut high = Vec::new();
    for s in graph.states.iter().filter(|s| d.eval(&env, s).contains(door)) {
        if s.battery == 0 { low.push(env.encode(s)) } else { high.push(env.encode(s)) }
    }
    assert!(!low.is_empty() && !high.is_empty());

    let hp = HyperParams::default();
    let mut p = SkillPool::new(SubgoalCondition::fluent(door), 2, env.actions().len(), &hp, Estimator::Uniform, Labeler::Exact);
    let mut r = rng::stream(6, "train", 0);
    for _ in 0..2000 {
        let z = r.random_range(0..2);
        p.rollout(&env, &d, z, &env.reset(), 100, &hp, RolloutMode::Train, &mut r);
    }
    let visited: Vec<StateKey> = (0..2).flat_map(|z| p.counts.terminal_states(z)).collect();
    assert!(visited.iter().any(|k| low.contains(k)), "no uncharged door state");
    assert!(visited.iter().any(|k| high.contains(k)), "no charged door state");
}

#[test]
fn training_is_deterministic_per_seed() {
    for (id, method) in [
        (DomainId::HouseholdV1, Method::Asgrl),
        (DomainId::HouseholdV2, Method::AsgrlCurriculum),
        (DomainId::MineCraft, Method::LandmarkShaping),
        (DomainId::PixelMario, Method::Asgrl),
    ] {
        let task = Task::bundled(id).unwrap();
        let spec = RunSpec { episodes: 40, ..RunSpec::defaults(id, method) };
        assert_eq!(run_seed(&task, &spec, 11).unwrap(), run_seed(&task, &spec, 11).unwrap(), "{id}");
    }
}

#[test]
fn untrained_agents_do_not_succeed() {
    for method in Method::ALL {
        let task = Task::bundled(DomainId::Mario).unwrap();
        let spec = RunSpec { episodes: 0, ..RunSpec::defaults(DomainId::Mario, method) };
        let log = run_seed(&task, &spec, 0).unwrap();
        assert_eq!(log.records.len(), 1);
        assert_eq!(log.final_success(), 0.0, "{method}");
    }
}

#[test]
#[should_panic]
fn zero_evaluation_runs_are_rejected() {
    let mut agent = FlatAgent::goal_q(&Corridor, HyperParams::default(), 20);
    let schedule = EvalSchedule { runs: 0, ..EvalSchedule::default() };
    train_and_log(&mut agent, &Corridor, 5, schedule, 0);
}

#[test]
fn landmark_hrl_is_asgrl_with_one_plain_skill() {
    let id = DomainId::HouseholdV1;
    let task = Task::bundled(id).unwrap();
    let base = RunSpec { episodes: 150, ..RunSpec::defaults(id, Method::LandmarkHrl) };
    let mut plain = RunSpec { method: Method::Asgrl, k: 1, ..base.clone() };
    plain.agent.hp.alpha_h = 0.0;
    assert_eq!(run_seed(&task, &base, 4).unwrap(), run_seed(&task, &plain, 4).unwrap());
}

#[test]
fn goal_q_solves_the_corridor() {
    let mut agent = FlatAgent::goal_q(&Corridor, HyperParams::default(), 20);
    let log = train_and_log(&mut agent, &Corridor, 500, EvalSchedule::default(), 0);
    assert_eq!(log.final_success(), 1.0);
}

#[test]
fn plan_hrl_needs_a_plan() {
    let unsolvable = "(define (domain corridor) (:predicates (halfway) (at-end))
      (:action walk_end :parameters () :precondition (and (halfway)) :effect (and (at-end))))";
    let m = corridor(unsolvable);
    assert!(PlanHrl::new(&Corridor, &m, HyperParams::default(), 20).is_err());
    let plan = PlanHrl::new(&Corridor, &corridor(CORRIDOR_TWO), HyperParams::default(), 20).unwrap();
    assert_eq!(plan.plan, ["walk_half", "walk_end"]);
}

#[test]
fn household_plan_has_an_unreachable_operator() {
    let task = Task::bundled(DomainId::HouseholdV1).unwrap();
    let env = Household::from_layout(&task.layout).unwrap();
    let d = Detector::bind(&env, &task.model).unwrap();
    let plan = PlanHrl::new(&env, &task.model, HyperParams::default(), 100).unwrap();
    let graph = reachable_states(&env).unwrap();
    let dead: Vec<&str> = plan
        .plan
        .iter()
        .zip(&plan.operators)
        .filter(|(_, op)| !graph.states.iter().any(|s| op.condition.holds(&env, &d, s)))
        .map(|(name, _)| name.as_str())
        .collect();
    assert!(!dead.is_empty(), "{:?}", plan.plan);
}

fn shaping(potential: Potential) -> (Household, SymbolicModel, FlatAgent, FluentSet) {
    let task = Task::bundled(DomainId::HouseholdV1).unwrap();
    let env = Household::from_layout(&task.layout).unwrap();
    let lg = extract_landmarks(&task.model).unwrap();
    let agent =
        FlatAgent::landmark_shaping(&env, &task.model, &lg, potential, HyperParams::default(), 100).unwrap();
    (env, task.model, agent, lg.facts)
}

#[test]
fn shaping_telescopes_on_random_trajectories() {
    let gamma = HyperParams::default().gamma;
    for potential in [Potential::CurrentlyTrue, Potential::EverTrue] {
        let (env, model, agent, facts) = shaping(potential);
        let d = Detector::bind(&env, &model).unwrap();
        let n = env.actions().len();
        for seed in 0..200 {
            let mut r = rng::stream(seed, "trajectory", 0);
            let mut s = env.reset();
            let mut seen = d.eval(&env, &s).intersection(facts);
            let phi0 = agent.potential(&env, &s, seen);
            assert_eq!(phi0, 0.0);
            let (mut total, mut discount, mut phi) = (0.0, 1.0, phi0);
            for _ in 0..r.random_range(1..80) {
                let next = env.step(&s, r.random_range(0..n));
                seen = seen.union(d.eval(&env, &next).intersection(facts));
                let phi_next = agent.potential(&env, &next, seen);
                total += discount * (gamma * phi_next - phi);
                discount *= gamma;
                phi = phi_next;
                s = next;
            }
            assert!((total - (discount * phi - phi0)).abs() < 1e-9);
        }
    }
}

#[test]
fn potentials_along_the_reference_trace() {
    for potential in [Potential::CurrentlyTrue, Potential::EverTrue] {
        let (env, model, agent, facts) = shaping(potential);
        let d = Detector::bind(&env, &model).unwrap();
        let mut s = env.reset();
        let mut seen = FluentSet::EMPTY;
        let mut prev = agent.potential(&env, &s, seen);
        for &a in env.reference() {
            s = env.step(&s, a);
            let now = d.eval(&env, &s).intersection(facts);
            let new_landmark = !now.difference(seen).is_empty();
            seen = seen.union(now);
            let phi = agent.potential(&env, &s, seen);
            if new_landmark || potential == Potential::EverTrue {
                assert!(phi >= prev, "{potential:?}");
            }
            prev = phi;
        }
        if potential == Potential::EverTrue {
            assert_eq!(prev, facts.len() as f64);
        }
    }
}
