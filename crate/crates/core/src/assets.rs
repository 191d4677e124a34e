//! Symbolic models and layouts bundled with the crate.

use crate::symbolic::{load_model, ModelError, ParseOptions, SymbolicModel};

/// A domain/problem text pair.
#[derive(Clone, Copy, Debug)]
pub struct ModelAsset {
    pub name: &'static str,
    pub domain: &'static str,
    pub problem: &'static str,
}

impl ModelAsset {
    /// Parses (lenient mode) and grounds the model.
    pub fn load(&self) -> Result<SymbolicModel, ModelError> {
        load_model(self.domain, self.problem, ParseOptions::LENIENT)
    }
}

macro_rules! model {
    ($name:literal) => {
        ModelAsset {
            name: $name,
            domain: include_str!(concat!("../../../assets/models/", $name, "/domain.pddl")),
            problem: include_str!(concat!("../../../assets/models/", $name, "/problem.pddl")),
        }
    };
}

pub const HOUSEHOLD_V1: ModelAsset = model!("household-v1");
pub const HOUSEHOLD_V2: ModelAsset = model!("household-v2");
pub const MINECRAFT: ModelAsset = model!("minecraft");
pub const MARIO: ModelAsset = model!("mario");
pub const HOUSEHOLD_ACCURATE: ModelAsset = model!("household-accurate");
pub const MINECRAFT_ACCURATE: ModelAsset = model!("minecraft-accurate");
pub const MARIO_ACCURATE: ModelAsset = model!("mario-accurate");

/// The four approximate models.
pub const APPROXIMATE_MODELS: [ModelAsset; 4] = [HOUSEHOLD_V1, HOUSEHOLD_V2, MINECRAFT, MARIO];

pub const ALL_MODELS: [ModelAsset; 7] = [
    HOUSEHOLD_V1,
    HOUSEHOLD_V2,
    MINECRAFT,
    MARIO,
    HOUSEHOLD_ACCURATE,
    MINECRAFT_ACCURATE,
    MARIO_ACCURATE,
];

pub const HOUSEHOLD_LAYOUT: &str = include_str!("../../../assets/layouts/household.txt");
pub const MINECRAFT_LAYOUT: &str = include_str!("../../../assets/layouts/minecraft.txt");
pub const MARIO_LAYOUT: &str = include_str!("../../../assets/layouts/mario.txt");
