mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use asgrl_core::assets::{self, ALL_MODELS, APPROXIMATE_MODELS};
use asgrl_core::domains::DomainId;
use asgrl_core::gridworld::{Detector, Environment};
use asgrl_core::landmarks::{extract_landmarks, verify_landmarks, Linearizer};
use asgrl_core::rng;
use asgrl_core::symbolic::{find_plan, orderings_hold};
use common::{named, pairs, set, with_env};

#[test]
fn fidelity_on_the_four_models() {
    let start = Instant::now();
    let expect = [
        (
            assets::HOUSEHOLD_V1,
            set(&["has-key", "charged", "door-open", "at-final-room", "at-destination"]),
            pairs(&[
                ("has-key", "door-open"),
                ("has-key", "charged"),
                ("door-open", "at-final-room"),
                ("charged", "at-final-room"),
                ("at-final-room", "at-destination"),
            ]),
        ),
        (
            assets::HOUSEHOLD_V2,
            set(&["at-final-room", "at-destination"]),
            pairs(&[("at-final-room", "at-destination")]),
        ),
        (
            assets::MINECRAFT,
            set(&["wood-processed", "plank_made", "stick_made", "ladder_made"]),
            pairs(&[
                ("wood-processed", "plank_made"),
                ("wood-processed", "stick_made"),
                ("plank_made", "ladder_made"),
                ("stick_made", "ladder_made"),
            ]),
        ),
        (
            assets::MARIO,
            set(&[
                "at-upper-platform",
                "at-bottom",
                "has-key",
                "at-upper-platform-with-key",
                "door-open",
            ]),
            pairs(&[
                ("at-upper-platform", "at-bottom"),
                ("at-bottom", "has-key"),
                ("has-key", "at-upper-platform-with-key"),
                ("at-upper-platform-with-key", "door-open"),
            ]),
        ),
    ];
    for (asset, facts, ords) in expect {
        let m = asset.load().unwrap();
        let lg = extract_landmarks(&m).unwrap();
        assert_eq!(named(&m, &lg), (facts, ords), "{}", asset.name);
    }
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn soundness_oracle_on_every_model() {
    for asset in ALL_MODELS {
        let m = asset.load().unwrap();
        let lg = extract_landmarks(&m).unwrap();
        let shortest = find_plan(&m).unwrap().len();
        let r = verify_landmarks(&m, &lg, shortest + 2).unwrap();
        assert!(r.plans_checked > 0, "{}", asset.name);
        assert!(r.is_sound(), "{}: {:?}", asset.name, r);
    }
}

#[test]
fn graph_invariants() {
    for asset in ALL_MODELS {
        let m = asset.load().unwrap();
        let lg = extract_landmarks(&m).unwrap();
        assert!(m.goal.is_subset(lg.facts), "{}", asset.name);
        let preconditions = m.actions.iter().fold(m.goal, |acc, a| acc.union(a.prec));
        assert!(lg.facts.is_subset(preconditions), "{}", asset.name);
        for &(a, b) in &lg.orderings {
            assert!(!lg.orderings.contains(&(b, a)), "{}", asset.name);
            assert!(lg.facts.contains(a) && lg.facts.contains(b));
        }
        Linearizer::new(&lg).expect("acyclic");
    }
}

#[test]
fn linearizations_are_topological_for_1000_seeds() {
    for asset in APPROXIMATE_MODELS {
        let m = asset.load().unwrap();
        let lg = extract_landmarks(&m).unwrap();
        let lin = Linearizer::new(&lg).unwrap();
        let mut seen = BTreeSet::new();
        for seed in 0..1000 {
            let order = lin.sample(&mut rng::stream(seed, "linearize", 0));
            assert_eq!(order.len(), lg.facts.len());
            let pos = |f| order.iter().position(|&g| g == f).unwrap();
            for &(a, b) in &lg.orderings {
                assert!(pos(a) < pos(b), "{} seed {seed}", asset.name);
            }
            let first_goal = order.iter().position(|f| lg.goal.contains(*f)).unwrap();
            assert!(order[first_goal..].iter().all(|f| lg.goal.contains(*f)));
            seen.insert(order);
        }
        assert_eq!(seen.len() as u128, lin.total(), "{}", asset.name);
    }
}

#[test]
fn linearization_is_uniform_and_seed_stable() {
    let m = assets::HOUSEHOLD_V1.load().unwrap();
    let lg = extract_landmarks(&m).unwrap();
    let lin = Linearizer::new(&lg).unwrap();
    assert_eq!(lin.total(), 2);
    let charged = m.fluent("charged").unwrap();
    let n = 10_000;
    let mut r = rng::stream(3, "linearize", 0);
    let charged_second = (0..n).filter(|_| lin.sample(&mut r)[1] == charged).count();
    // Binomial(n, 1/2): 4σ band.
    let sigma = (n as f64 * 0.25).sqrt();
    assert!((charged_second as f64 - n as f64 / 2.0).abs() < 4.0 * sigma);

    let a = lin.sample(&mut rng::stream(9, "linearize", 0));
    let b = lin.sample(&mut rng::stream(9, "linearize", 0));
    assert_eq!(a, b);

    let mario = assets::MARIO.load().unwrap();
    let lg = extract_landmarks(&mario).unwrap();
    assert_eq!(Linearizer::new(&lg).unwrap().total(), 1);
}

#[test]
fn reference_traces_reflect_landmark_orderings() {
    for id in DomainId::ALL {
        with_env!(id, |task, env| {
            let lg = extract_landmarks(&task.model).unwrap();
            let d = Detector::bind(&env, &task.model).unwrap();
            let mut s = env.reset();
            let mut rows = vec![d.eval(&env, &s)];
            for &a in env.reference() {
                s = env.step(&s, a);
                rows.push(d.eval(&env, &s));
            }
            assert!(env.is_goal(&s), "{id}");
            assert!(orderings_hold(&rows, &lg.orderings), "{id}");
        });
    }
}
