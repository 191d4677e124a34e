//! Named tasks (model + layout) and the method dispatch used by the harness.

use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::assets::{self, ModelAsset};
use crate::baselines::{landmark_hrl_config, FlatAgent, PlanHrl, Potential};
use crate::gridworld::{Environment, Household, LayoutError, Mario, MineCraft, PixelMario};
use crate::landmarks::{extract_landmarks, LandmarkError};
use crate::meta::{
    train_and_log, AgentConfig, AgentError, Asgrl, EvalSchedule, SkillCount, TrainLog,
};
use crate::symbolic::{ModelError, SymbolicModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum World {
    Household,
    MineCraft,
    Mario,
    PixelMario,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DomainId {
    HouseholdV1,
    HouseholdV2,
    MineCraft,
    Mario,
    PixelMario,
    HouseholdAccurate,
    MineCraftAccurate,
    MarioAccurate,
}

/// Per-domain defaults.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DomainDefaults {
    pub episodes: usize,
    pub max_steps: usize,
    /// Skills per landmark in fixed-k mode, and `k_max` for the curriculum.
    pub k: usize,
    /// Observation buffer of the online K-Means, if the domain clusters.
    pub cluster_buffer: Option<usize>,
}

impl DomainId {
    pub const ALL: [DomainId; 8] = [
        DomainId::HouseholdV1,
        DomainId::HouseholdV2,
        DomainId::MineCraft,
        DomainId::Mario,
        DomainId::PixelMario,
        DomainId::HouseholdAccurate,
        DomainId::MineCraftAccurate,
        DomainId::MarioAccurate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DomainId::HouseholdV1 => "household-v1",
            DomainId::HouseholdV2 => "household-v2",
            DomainId::MineCraft => "minecraft",
            DomainId::Mario => "mario",
            DomainId::PixelMario => "pixel-mario",
            DomainId::HouseholdAccurate => "household-accurate",
            DomainId::MineCraftAccurate => "minecraft-accurate",
            DomainId::MarioAccurate => "mario-accurate",
        }
    }

    pub fn world(self) -> World {
        match self {
            DomainId::HouseholdV1 | DomainId::HouseholdV2 | DomainId::HouseholdAccurate => {
                World::Household
            }
            DomainId::MineCraft | DomainId::MineCraftAccurate => World::MineCraft,
            DomainId::Mario | DomainId::MarioAccurate => World::Mario,
            DomainId::PixelMario => World::PixelMario,
        }
    }

    pub fn model(self) -> ModelAsset {
        match self {
            DomainId::HouseholdV1 => assets::HOUSEHOLD_V1,
            DomainId::HouseholdV2 => assets::HOUSEHOLD_V2,
            DomainId::MineCraft => assets::MINECRAFT,
            DomainId::Mario | DomainId::PixelMario => assets::MARIO,
            DomainId::HouseholdAccurate => assets::HOUSEHOLD_ACCURATE,
            DomainId::MineCraftAccurate => assets::MINECRAFT_ACCURATE,
            DomainId::MarioAccurate => assets::MARIO_ACCURATE,
        }
    }

    pub fn layout(self) -> &'static str {
        match self.world() {
            World::Household => assets::HOUSEHOLD_LAYOUT,
            World::MineCraft => assets::MINECRAFT_LAYOUT,
            World::Mario | World::PixelMario => assets::MARIO_LAYOUT,
        }
    }

    pub fn defaults(self) -> DomainDefaults {
        let (episodes, max_steps, k) = match self {
            DomainId::HouseholdV1 | DomainId::HouseholdV2 | DomainId::HouseholdAccurate => {
                (3000, 100, 8)
            }
            DomainId::MineCraft | DomainId::MineCraftAccurate => (3000, 100, 8),
            DomainId::Mario | DomainId::MarioAccurate => (5000, 150, 8),
            DomainId::PixelMario => (8000, 150, 8),
        };
        DomainDefaults {
            episodes,
            max_steps,
            k,
            cluster_buffer: (self == DomainId::PixelMario).then_some(512),
        }
    }
}

impl fmt::Display for DomainId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown name `{0}`")]
pub struct UnknownName(pub String);

impl FromStr for DomainId {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| UnknownName(s.into()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Asgrl,
    AsgrlCurriculum,
    PlanHrl,
    LandmarkHrl,
    LandmarkShaping,
    GoalQ,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Asgrl,
        Method::AsgrlCurriculum,
        Method::PlanHrl,
        Method::LandmarkHrl,
        Method::LandmarkShaping,
        Method::GoalQ,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Asgrl => "asgrl",
            Method::AsgrlCurriculum => "asgrl-curriculum",
            Method::PlanHrl => "plan-hrl",
            Method::LandmarkHrl => "landmark-hrl",
            Method::LandmarkShaping => "landmark-shaping",
            Method::GoalQ => "goal-q",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| UnknownName(s.into()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("model: {0}")]
    Model(#[from] ModelError),
    #[error("layout: {0}")]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Landmarks(#[from] LandmarkError),
    #[error(transparent)]
    Agent(#[from] AgentError),
}

/// A loaded task: which world to build, its symbolic model, and the layout
/// text.
#[derive(Clone, Debug)]
pub struct Task {
    pub world: World,
    pub model: SymbolicModel,
    pub layout: String,
}

impl Task {
    pub fn bundled(id: DomainId) -> Result<Self, RunError> {
        Ok(Self {
            world: id.world(),
            model: id.model().load()?,
            layout: id.layout().into(),
        })
    }
}

/// Everything a single seeded run needs besides the task.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSpec {
    pub method: Method,
    /// Skill settings; `skills` is overridden per method (`Fixed(k)` for
    /// ASGRL, `Curriculum { k_max: k }` for the curriculum variant).
    pub agent: AgentConfig,
    pub k: usize,
    pub episodes: usize,
    pub schedule: EvalSchedule,
    pub potential: Potential,
}

impl RunSpec {
    pub fn defaults(id: DomainId, method: Method) -> Self {
        let d = id.defaults();
        Self {
            method,
            agent: AgentConfig {
                max_steps: d.max_steps,
                cluster_buffer: d.cluster_buffer,
                ..AgentConfig::default()
            },
            k: d.k,
            episodes: d.episodes,
            schedule: EvalSchedule::default(),
            potential: Potential::CurrentlyTrue,
        }
    }
}

/// Trains one seed and returns its evaluation log.
pub fn run_seed(task: &Task, spec: &RunSpec, seed: u64) -> Result<TrainLog, RunError> {
    match task.world {
        World::Household => run_env(&Household::from_layout(&task.layout)?, &task.model, spec, seed),
        World::MineCraft => run_env(&MineCraft::from_layout(&task.layout)?, &task.model, spec, seed),
        World::Mario => run_env(&Mario::from_layout(&task.layout)?, &task.model, spec, seed),
        World::PixelMario => run_env(
            &PixelMario::new(Mario::from_layout(&task.layout)?),
            &task.model,
            spec,
            seed,
        ),
    }
}

pub fn run_env<E: Environment>(
    env: &E,
    model: &SymbolicModel,
    spec: &RunSpec,
    seed: u64,
) -> Result<TrainLog, RunError> {
    let hp = spec.agent.hp;
    let max_steps = spec.agent.max_steps;
    let (n, sched) = (spec.episodes, spec.schedule);
    let log = match spec.method {
        Method::Asgrl | Method::AsgrlCurriculum | Method::LandmarkHrl => {
            let lg = extract_landmarks(model)?;
            let mut cfg = spec.agent.clone();
            cfg.skills = match spec.method {
                Method::Asgrl => SkillCount::Fixed(spec.k),
                _ => SkillCount::Curriculum { k_max: spec.k },
            };
            if spec.method == Method::LandmarkHrl {
                cfg = landmark_hrl_config(cfg);
            }
            let mut agent = Asgrl::new(env, model, &lg, cfg)?;
            train_and_log(&mut agent, env, n, sched, seed)
        }
        Method::PlanHrl => {
            let mut agent = PlanHrl::new(env, model, hp, max_steps)?;
            train_and_log(&mut agent, env, n, sched, seed)
        }
        Method::LandmarkShaping => {
            let lg = extract_landmarks(model)?;
            let mut agent =
                FlatAgent::landmark_shaping(env, model, &lg, spec.potential, hp, max_steps)?;
            train_and_log(&mut agent, env, n, sched, seed)
        }
        Method::GoalQ => {
            let mut agent = FlatAgent::goal_q(env, hp, max_steps);
            train_and_log(&mut agent, env, n, sched, seed)
        }
    };
    Ok(log)
}
