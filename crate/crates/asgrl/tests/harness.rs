use std::fs;

use asgrl::config::ExperimentConfig;
use asgrl::output::{curve_path, read_curve, read_summary, summary_path, Snapshot};
use asgrl::{run_experiment, run_seeds, verify_dir};
use asgrl_core::domains::{DomainId, Method};

fn cfg(dir: &std::path::Path, domain: DomainId, method: Method, seeds: usize, episodes: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(domain, method);
    c.seeds = seeds;
    c.spec.episodes = episodes;
    c.out = dir.to_path_buf();
    c
}

#[test]
fn zero_episodes_gives_one_row_and_zero_success() {
    let dir = tempfile::tempdir().unwrap();
    let c = cfg(dir.path(), DomainId::Mario, Method::Asgrl, 1, 0);
    let snap = run_experiment(&c).unwrap();
    assert_eq!(snap.mean_success, 0.0);
    let rows = read_curve(&curve_path(dir.path(), "mario", "asgrl", 0)).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].episode, 0);
    let summary = read_summary(&summary_path(dir.path())).unwrap();
    assert_eq!(summary.len(), 1);
    assert_eq!(summary[0].mean_success, 0.0);
    assert_eq!(summary[0].seeds, 1);
}

#[test]
fn reruns_are_byte_identical_across_worker_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut ca = cfg(a.path(), DomainId::HouseholdV1, Method::Asgrl, 3, 60);
    ca.workers = 1;
    let mut cb = cfg(b.path(), DomainId::HouseholdV1, Method::Asgrl, 3, 60);
    cb.workers = 3;
    run_experiment(&ca).unwrap();
    run_experiment(&cb).unwrap();
    for seed in 0..3 {
        let pa = curve_path(a.path(), "household-v1", "asgrl", seed);
        let pb = curve_path(b.path(), "household-v1", "asgrl", seed);
        assert_eq!(fs::read(&pa).unwrap(), fs::read(&pb).unwrap());
    }
    assert_eq!(
        fs::read(summary_path(a.path())).unwrap(),
        fs::read(summary_path(b.path())).unwrap()
    );
    let before = fs::read(curve_path(a.path(), "household-v1", "asgrl", 1)).unwrap();
    run_experiment(&ca).unwrap();
    assert_eq!(before, fs::read(curve_path(a.path(), "household-v1", "asgrl", 1)).unwrap());
}

#[test]
fn seeds_are_ordered_and_offset() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = cfg(dir.path(), DomainId::MineCraft, Method::GoalQ, 4, 10);
    c.first_seed = 7;
    let runs = run_seeds(&c).unwrap();
    let seeds: Vec<u64> = runs.iter().map(|r| r.seed).collect();
    assert_eq!(seeds, [7, 8, 9, 10]);
}

#[test]
fn verify_accepts_fresh_output_and_catches_tampering() {
    let dir = tempfile::tempdir().unwrap();
    run_experiment(&cfg(dir.path(), DomainId::HouseholdV2, Method::PlanHrl, 2, 20)).unwrap();
    run_experiment(&cfg(dir.path(), DomainId::Mario, Method::LandmarkShaping, 3, 20)).unwrap();
    let report = verify_dir(dir.path()).unwrap();
    assert!(report.ok(), "{:?}", report.problems);
    assert_eq!(report.rows_checked, 2);
    assert_eq!(report.curves_checked, 5);

    let path = summary_path(dir.path());
    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let row = lines.iter_mut().find(|l| l.starts_with("mario,")).unwrap();
    let mut fields: Vec<String> = row.split(',').map(String::from).collect();
    let mean: f64 = fields[2].parse().unwrap();
    fields[2] = (mean + 0.5).to_string();
    *row = fields.join(",");
    let tampered = lines.join("\n") + "\n";
    fs::write(&path, tampered).unwrap();
    let report = verify_dir(dir.path()).unwrap();
    assert!(!report.ok());

    fs::write(&path, text).unwrap();
    fs::remove_file(curve_path(dir.path(), "mario", "landmark-shaping", 1)).unwrap();
    let report = verify_dir(dir.path()).unwrap();
    assert!(report.problems.iter().any(|p| p.contains("3 seeds")));
}

#[test]
fn summary_rows_merge_and_stale_seeds_are_removed() {
    let dir = tempfile::tempdir().unwrap();
    run_experiment(&cfg(dir.path(), DomainId::Mario, Method::GoalQ, 3, 5)).unwrap();
    run_experiment(&cfg(dir.path(), DomainId::HouseholdV1, Method::GoalQ, 1, 5)).unwrap();
    run_experiment(&cfg(dir.path(), DomainId::Mario, Method::GoalQ, 2, 5)).unwrap();
    let rows = read_summary(&summary_path(dir.path())).unwrap();
    let keys: Vec<_> = rows.iter().map(|r| (r.domain.as_str(), r.method.as_str(), r.seeds)).collect();
    assert_eq!(keys, [("household-v1", "goal-q", 1), ("mario", "goal-q", 2)]);
    assert!(!curve_path(dir.path(), "mario", "goal-q", 2).exists());
    assert!(verify_dir(dir.path()).unwrap().ok());
}

#[test]
fn snapshot_matches_curves() {
    let dir = tempfile::tempdir().unwrap();
    let snap = run_experiment(&cfg(dir.path(), DomainId::HouseholdV1, Method::Asgrl, 2, 100)).unwrap();
    let json = fs::read_to_string(dir.path().join("runs/household-v1__asgrl.json")).unwrap();
    let parsed: Snapshot = serde_json::from_str(&json).unwrap();
    assert_eq!(parsed, snap);
    for s in &snap.per_seed {
        let rows = read_curve(&curve_path(dir.path(), "household-v1", "asgrl", s.seed)).unwrap();
        assert_eq!(rows.last().unwrap().eval_success, s.final_success);
        assert_eq!(
            rows.iter().find(|r| r.eval_success > 0.0).map(|r| r.episode),
            s.first_success
        );
        assert!(rows.iter().all(|r| r.seed == s.seed));
        assert!(rows.windows(2).all(|w| w[0].episode < w[1].episode));
    }
}

#[test]
fn model_override_is_loaded() {
    let dir = tempfile::tempdir().unwrap();
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../assets/models/mario-accurate");
    let mut c = cfg(dir.path(), DomainId::Mario, Method::PlanHrl, 1, 0);
    c.model = Some((root.join("domain.pddl"), root.join("problem.pddl")));
    let task = asgrl::load_task(&c).unwrap();
    assert!(task.model.action("collect_both_keys").is_some());
    c.model = Some((root.join("missing.pddl"), root.join("problem.pddl")));
    assert!(asgrl::load_task(&c).is_err());
}
