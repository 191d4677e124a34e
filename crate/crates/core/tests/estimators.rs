//! Property checks of the diversity estimators, the skill reward and the
//! tabular Q-learning update.

use asgrl_core::gridworld::StateKey;
use asgrl_core::rng;
use asgrl_core::skills::{
    diversity_reward, p_z_given_s_bayes, p_z_given_s_uniform, select_action, skill_reward,
    DiversityCounts, HyperParams, QTable, Transition,
};
use proptest::prelude::*;

/// `table[s][z]` visit counts turned into a `DiversityCounts` whose windows
/// hold every visit.
fn counts_from(table: &[Vec<u32>]) -> DiversityCounts {
    let k = table[0].len();
    let total: u32 = table.iter().flatten().sum();
    let mut c = DiversityCounts::new(k, total.max(1) as usize);
    for (s, row) in table.iter().enumerate() {
        for (z, &n) in row.iter().enumerate() {
            for _ in 0..n {
                c.record_terminal(z, StateKey(s as u128));
            }
        }
    }
    c
}

fn table(max_k: usize, max_s: usize) -> impl Strategy<Value = Vec<Vec<u32>>> {
    (1..=max_k, 1..=max_s).prop_flat_map(|(k, s)| {
        prop::collection::vec(prop::collection::vec(0u32..20, k), s)
    })
}

/// Expected diversity reward of skill `z` under the count estimator.
fn expected_rd(c: &DiversityCounts, z: usize, states: usize, clip: f64) -> f64 {
    let n: u32 = (0..states).map(|s| c.count(StateKey(s as u128), z)).sum();
    (0..states)
        .map(|s| {
            let key = StateKey(s as u128);
            let visits = c.count(key, z);
            if visits == 0 {
                return 0.0;
            }
            let p = p_z_given_s_uniform(c, key).unwrap()[z];
            visits as f64 / n as f64 * diversity_reward(p, clip)
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn count_estimator_normalizes(t in table(8, 6)) {
        let c = counts_from(&t);
        for (s, row) in t.iter().enumerate() {
            let key = StateKey(s as u128);
            match p_z_given_s_uniform(&c, key) {
                Ok(p) => {
                    prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                    prop_assert!(p.iter().all(|x| (0.0..=1.0).contains(x)));
                }
                Err(_) => prop_assert_eq!(row.iter().sum::<u32>(), 0),
            }
        }
    }

    #[test]
    fn bayes_estimator_normalizes(
        t in table(8, 6),
        rollouts in prop::collection::vec(0u64..50, 8),
        alpha in 1e-6f64..1.0,
    ) {
        let mut c = counts_from(&t);
        for z in 0..c.skills() {
            for _ in 0..rollouts[z] {
                c.record_rollout(z);
            }
        }
        for s in 0..=t.len() {
            let p = p_z_given_s_bayes(&c, StateKey(s as u128), alpha);
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(p.iter().all(|x| *x > 0.0));
        }
        // Unseen by every skill: smoothing alone, uniform.
        let p = p_z_given_s_bayes(&c, StateKey(999), alpha);
        for x in &p {
            prop_assert!((x - 1.0 / p.len() as f64).abs() < 1e-9);
        }
    }

    /// With equal visit totals per skill, uniform priors and no smoothing,
    /// the Bayes estimate equals the count estimate.
    #[test]
    fn bayes_limit_matches_counts(
        k in 1usize..6,
        states in 1usize..6,
        per_skill in 1u32..30,
        seed in any::<u64>(),
    ) {
        use rand::Rng;
        let mut r = rng::stream(seed, "table", 0);
        let mut t = vec![vec![0u32; k]; states];
        for z in 0..k {
            for _ in 0..per_skill {
                t[r.random_range(0..states)][z] += 1;
            }
        }
        let mut c = counts_from(&t);
        for z in 0..k {
            c.record_rollout(z);
        }
        for s in 0..states {
            let key = StateKey(s as u128);
            if let Ok(eq4) = p_z_given_s_uniform(&c, key) {
                let eq5 = p_z_given_s_bayes(&c, key, 0.0);
                for (a, b) in eq4.iter().zip(&eq5) {
                    prop_assert!((a - b).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn skill_reward_bounds(
        alpha_h in 0.0f64..0.5,
        clip_frac in 0.0f64..0.999,
        rd_frac in 0.0f64..=1.0,
        r_landmark in 0.5f64..5.0,
    ) {
        // α_H·clip ∈ (−1, 0].
        let clip = if alpha_h == 0.0 { -9.9 } else { -clip_frac / alpha_h };
        let hp = HyperParams { alpha_h, rd_clip: clip, r_landmark, ..HyperParams::default() };
        prop_assert!(hp.validate().is_ok());
        let rd = clip * rd_frac;
        let r = skill_reward(true, &hp, rd);
        prop_assert!(r > r_landmark - 1.0 && r <= r_landmark);
        prop_assert_eq!(skill_reward(false, &hp, rd), 0.0);
    }

    /// A goal-reaching trace always has a larger discounted return than one
    /// that never reaches the landmark, whatever the diversity term.
    #[test]
    fn reaching_beats_not_reaching(t0 in 0i32..1000, rd_frac in 0.0f64..=1.0) {
        let hp = HyperParams::default();
        let rd = hp.rd_clip * rd_frac;
        let ret = hp.gamma.powi(t0) * skill_reward(true, &hp, rd);
        prop_assert!(ret > 0.0);
    }

    /// Moving one of two overlapping skills onto a fresh terminal state
    /// raises both skills' expected diversity reward and lowers no other.
    #[test]
    fn disjoint_terminals_raise_diversity(
        t in table(6, 5),
        shared_a in 1u32..20,
        shared_b in 1u32..20,
    ) {
        let k = t[0].len().max(2);
        let states = t.len() + 1;
        let mut before: Vec<Vec<u32>> = t.iter().map(|r| {
            let mut r = r.clone();
            r.resize(k, 0);
            r
        }).collect();
        // State 0 is shared by skills 0 and 1.
        before[0][0] += shared_a;
        before[0][1] += shared_b;
        before.push(vec![0; k]);
        let mut after = before.clone();
        let moved = after[0][1];
        after[0][1] = 0;
        after[states - 1][1] = moved;

        let clip = HyperParams::default().rd_clip;
        let (cb, ca) = (counts_from(&before), counts_from(&after));
        for z in 0..k {
            let (b, a) = (expected_rd(&cb, z, states, clip), expected_rd(&ca, z, states, clip));
            if z < 2 {
                prop_assert!(a > b, "skill {z}: {b} -> {a}");
            } else {
                prop_assert!(a >= b - 1e-12, "skill {z}: {b} -> {a}");
            }
        }
    }
}

#[test]
fn estimator_examples() {
    let c = counts_from(&[vec![3, 1]]);
    assert_eq!(p_z_given_s_uniform(&c, StateKey(0)).unwrap(), [0.75, 0.25]);

    // p(s|z1) = 1, p(s|z2) = 0, equal priors, α = 0.01.
    let mut c = counts_from(&[vec![1, 0], vec![0, 1]]);
    c.record_rollout(0);
    c.record_rollout(1);
    let p = p_z_given_s_bayes(&c, StateKey(0), 0.01);
    assert!((p[0] - 0.51 / 0.52).abs() < 1e-12);
    assert!((p[0] - 0.9808).abs() < 1e-4);

    assert_eq!(diversity_reward(1.0, -9.9), 0.0);
    assert!((diversity_reward(0.5, -9.9) + 0.6931).abs() < 1e-4);
    assert_eq!(diversity_reward(1e-9, -9.9), -9.9);
    let hp = HyperParams::default();
    assert!((skill_reward(true, &hp, -9.9) - 0.01).abs() < 1e-12);
}

#[test]
fn uniform_exploration_is_uniform() {
    let q = QTable::new(6);
    let mut r = rng::stream(0, "explore", 0);
    let n = 10_000;
    let mut hits = [0usize; 6];
    for _ in 0..n {
        hits[select_action(&q, StateKey(1), 1.0, &mut r)] += 1;
    }
    let p = 1.0 / 6.0;
    let sigma = (n as f64 * p * (1.0 - p)).sqrt();
    for h in hits {
        assert!((h as f64 - n as f64 * p).abs() < 3.0 * sigma, "{hits:?}");
    }
    let mut greedy = QTable::new(6);
    assert_eq!(select_action(&greedy, StateKey(1), 0.0, &mut r), 0);
    greedy.set(StateKey(1), 4, 0.3);
    greedy.set(StateKey(1), 2, 0.1);
    assert_eq!(select_action(&greedy, StateKey(1), 0.0, &mut r), 4);
}

/// Deterministic chain 0..=4; `right` from 3 enters the terminal state 4
/// with reward 1, every other move pays 0, `left` at 0 stays put.
fn chain_step(s: usize, a: usize) -> (usize, f64, bool) {
    let next = if a == 0 { s.saturating_sub(1) } else { s + 1 };
    let done = next == 4;
    (next, if done { 1.0 } else { 0.0 }, done)
}

#[test]
fn q_learning_matches_value_iteration_on_a_chain() {
    let gamma = 0.95;
    // Oracle: value iteration on the same chain.
    let mut v = [[0.0f64; 2]; 5];
    for _ in 0..1000 {
        let prev = v;
        for s in 0..4 {
            for a in 0..2 {
                let (n, r, done) = chain_step(s, a);
                let future = if done { 0.0 } else { prev[n][0].max(prev[n][1]) };
                v[s][a] = r + gamma * future;
            }
        }
    }
    let mut q = QTable::new(2);
    for _ in 0..1000 {
        for s in 0..4 {
            for a in 0..2 {
                let (n, r, done) = chain_step(s, a);
                let t = Transition {
                    state: StateKey(s as u128),
                    action: a as u8,
                    reward: r,
                    next: StateKey(n as u128),
                    terminal: done,
                };
                q.update(&t, gamma, 0.5);
            }
        }
    }
    let mut worst = 0.0f64;
    for s in 0..4 {
        for a in 0..2 {
            worst = worst.max((q.get(StateKey(s as u128), a) - v[s][a]).abs());
        }
        assert_eq!(q.argmax(StateKey(s as u128)), 1);
    }
    assert!(worst < 1e-3, "max |Q - Q*| = {worst}");
    assert!((q.get(StateKey(3), 1) - 1.0).abs() < 1e-9);
    assert!((q.get(StateKey(2), 1) - gamma).abs() < 1e-9);
}
