//! Priced game structures, configurations and the one-step semantics.

mod amount;
pub mod file;
pub mod fixtures;
mod game;
mod validate;

pub use amount::{offset_availability, Amount, Availability, MoneyVector, ResourceDelta};
pub use game::{
    AgentId, Configuration, GameBuilder, Location, LocationId, PriceFunction, PricedGameStructure, TeamChoice,
};
pub use validate::{ValidationReport, Violation};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown location {0}")]
    UnknownLocation(LocationId),
    #[error("unknown agent #{}", .0 .0)]
    UnknownAgent(AgentId),
    #[error("action {action} out of range for agent #{} at {location}", agent.0)]
    ActionOutOfRange { location: LocationId, agent: AgentId, action: u32 },
    #[error("action profile has {found} entries, expected {expected}")]
    ProfileArity { expected: usize, found: usize },
    #[error("no transition for profile {profile:?} at {location}")]
    MissingTransition { location: LocationId, profile: Vec<u32> },
    #[error("structure has no locations")]
    NoLocations,
    #[error("invalid structure: {0}")]
    Invalid(String),
    #[error("{0}")]
    Format(String),
}
