use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use asgrl::config::{ConfigFile, ExperimentConfig, Overrides};
use asgrl::{harness, verify_dir};
use asgrl_core::assets::ALL_MODELS;
use asgrl_core::domains::{DomainId, Task, World};
use asgrl_core::gridworld::{
    validate_layout, Environment, Household, LayoutReport, Mario, MineCraft, PixelMario,
};
use asgrl_core::landmarks::{extract_landmarks, verify_landmarks};
use asgrl_core::symbolic::{find_plan, load_model, ParseOptions, SymbolicModel, MAX_ENUMERATION_DEPTH};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "asgrl", version, about = "Landmark-guided diverse-skill RL experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Train a method on a domain over several seeds and write CSV results.
    Run(RunArgs),
    /// Print a shortest plan of a model, one action per line.
    Plan(ModelArgs),
    /// Print the landmark facts and orderings of a model.
    Landmarks {
        #[command(flatten)]
        model: ModelArgs,
        /// Check every plan up to --max-len against the landmarks.
        #[arg(long)]
        verify: bool,
        /// Longest plan enumerated by --verify (default: shortest + 2).
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// Check a bundled layout against its model and print the report.
    ValidateEnv {
        #[arg(long)]
        domain: String,
        /// Layout file to check instead of the bundled one.
        #[arg(long)]
        layout: Option<PathBuf>,
    },
    /// Recompute summary.csv from the per-seed curves in DIR.
    Verify {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    domain: Option<String>,
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    first_seed: Option<u64>,
    #[arg(long)]
    episodes: Option<usize>,
    /// Skills per landmark (k_max for the curriculum).
    #[arg(long)]
    k: Option<usize>,
    /// history or mdp.
    #[arg(long)]
    meta_state: Option<String>,
    /// currently-true or ever-true (landmark-shaping only).
    #[arg(long)]
    potential: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0: one per core).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ModelArgs {
    /// Domain file, or the name of a bundled model when --problem is absent.
    #[arg(long)]
    domain: String,
    #[arg(long)]
    problem: Option<PathBuf>,
    /// Reject predicates that are used but not declared.
    #[arg(long)]
    strict: bool,
}

impl ModelArgs {
    fn load(&self) -> Result<SymbolicModel> {
        let opts = if self.strict {
            ParseOptions::STRICT
        } else {
            ParseOptions::LENIENT
        };
        match &self.problem {
            Some(p) => {
                let domain = std::fs::read_to_string(&self.domain)
                    .with_context(|| format!("reading {}", self.domain))?;
                let problem =
                    std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                Ok(load_model(&domain, &problem, opts)?)
            }
            None => {
                let Some(a) = ALL_MODELS.iter().find(|a| a.name == self.domain) else {
                    let names: Vec<_> = ALL_MODELS.iter().map(|a| a.name).collect();
                    bail!(
                        "`{}` is not a bundled model ({}); pass --problem to read files",
                        self.domain,
                        names.join(", ")
                    );
                };
                Ok(load_model(a.domain, a.problem, opts)?)
            }
        }
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<ExitCode> {
    match Cli::parse().cmd {
        Cmd::Run(a) => run(a),
        Cmd::Plan(m) => {
            let model = m.load()?;
            match find_plan(&model) {
                Some(plan) => {
                    for a in plan {
                        println!("{}", model.actions[a.0].name);
                    }
                }
                None => println!("NO PLAN"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Landmarks {
            model,
            verify,
            max_len,
        } => landmarks(&model.load()?, verify, max_len),
        Cmd::ValidateEnv { domain, layout } => validate_env(&domain, layout),
        Cmd::Verify { out } => {
            let report = verify_dir(&out)?;
            println!(
                "checked {} summary rows, {} curve files",
                report.rows_checked, report.curves_checked
            );
            for p in &report.problems {
                println!("MISMATCH {p}");
            }
            Ok(if report.ok() {
                println!("ok");
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn run(a: RunArgs) -> Result<ExitCode> {
    let file = match &a.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let cli = Overrides {
        domain: a.domain,
        method: a.method,
        seeds: a.seeds,
        first_seed: a.first_seed,
        episodes: a.episodes,
        k: a.k,
        meta_state: a.meta_state,
        potential: a.potential,
        out: a.out,
        workers: a.workers,
    };
    let cfg = ExperimentConfig::resolve(file, cli)?;
    let snap = harness::run_experiment(&cfg)?;
    for s in &snap.per_seed {
        let first = s.first_success.map_or("-".to_string(), |e| e.to_string());
        println!(
            "seed {:>4}  final {:.2}  first-success {first}",
            s.seed, s.final_success
        );
    }
    println!(
        "{} {}: mean {:.3} stderr {:.3} over {} seeds -> {}",
        snap.domain,
        snap.method,
        snap.mean_success,
        snap.stderr,
        snap.per_seed.len(),
        cfg.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn landmarks(model: &SymbolicModel, verify: bool, max_len: Option<usize>) -> Result<ExitCode> {
    let lg = extract_landmarks(model)?;
    println!("facts ({}):", lg.facts.len());
    for f in lg.facts.iter() {
        let goal = if lg.goal.contains(f) { "  [goal]" } else { "" };
        println!("  {}{goal}", model.fluent_name(f));
    }
    let mut orderings: Vec<_> = lg.orderings.iter().collect();
    orderings.sort_by_key(|(a, b)| (model.fluent_name(*a), model.fluent_name(*b)));
    println!("orderings ({}):", orderings.len());
    for (a, b) in orderings {
        println!("  {} < {}", model.fluent_name(*a), model.fluent_name(*b));
    }
    if !verify {
        return Ok(ExitCode::SUCCESS);
    }
    let shortest = find_plan(model).map_or(0, |p| p.len());
    let max_len = max_len.unwrap_or((shortest + 2).min(MAX_ENUMERATION_DEPTH));
    let report = verify_landmarks(model, &lg, max_len)?;
    println!(
        "verification: {} plans of length <= {max_len}, {} violated orderings, {} missing facts",
        report.plans_checked,
        report.violated_orderings.len(),
        report.missing_facts.len()
    );
    for (plan, (a, b)) in &report.violated_orderings {
        println!(
            "  plan {plan}: {} < {} violated",
            model.fluent_name(*a),
            model.fluent_name(*b)
        );
    }
    for (plan, f) in &report.missing_facts {
        println!("  plan {plan}: {} never true", model.fluent_name(*f));
    }
    Ok(if report.is_sound() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn validate_env(domain: &str, layout: Option<PathBuf>) -> Result<ExitCode> {
    let id: DomainId = domain.parse()?;
    let mut task = Task::bundled(id)?;
    if let Some(p) = layout {
        task.layout = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
    }
    let report = match task.world {
        World::Household => check(&Household::from_layout(&task.layout)?, &task.model)?,
        World::MineCraft => check(&MineCraft::from_layout(&task.layout)?, &task.model)?,
        World::Mario => check(&Mario::from_layout(&task.layout)?, &task.model)?,
        World::PixelMario => check(
            &PixelMario::new(Mario::from_layout(&task.layout)?),
            &task.model,
        )?,
    };
    let flag = |ok: bool| if ok { "ok" } else { "FAIL" };
    println!("domain: {}", id.name());
    println!("goal fluents only on goals: {}", flag(report.mvtr_condition1_ok));
    println!("reference instantiates a plan: {}", flag(report.mvtr_condition2_ok));
    println!("goal alignment: {}", flag(report.goal_alignment_ok));
    println!("encoding injective: {}", flag(report.encoding_injective));
    for t in &report.trap_properties_ok {
        println!("trap {}: {}", t.name, flag(t.ok));
    }
    match report.shortest_goal_steps {
        Some(n) => println!("shortest goal path: {n} steps"),
        None => println!("shortest goal path: unreachable"),
    }
    println!("reachable states: {}", report.reachable_states);
    if let Some(w) = &report.witness_plan {
        println!("witness plan: {}", w.join(" "));
    }
    Ok(if report.all_ok() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {}", report.failures().join(", "));
        ExitCode::FAILURE
    })
}

fn check<E: Environment>(env: &E, model: &SymbolicModel) -> Result<LayoutReport> {
    Ok(validate_layout(env, model)?)
}
