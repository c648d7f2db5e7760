//! Core of a deterministic two-stock market simulation.
//!
//! Money is fixed-point, every random draw comes from a stream derived
//! from the run seed, and the exchange, credit calendar and agent policies
//! are plain state machines driven by the runner.

pub mod agent;
pub mod agents;
pub mod calendar;
pub mod config;
pub mod exchange;
pub mod money;
pub mod par;
pub mod rng;
pub mod types;
pub mod valuation;

pub use agent::{init_agents, AgentState};
pub use config::{load_config, ConfigError, DecisionTiming, Preset, SimConfig};
pub use money::{Money, Rate};
pub use rng::{seeded_rng, RngStream};
pub use types::{AblationFlag, AblationSet, AgentBackend, AgentId, Day, PerStock, Personality, SessionId, Side, StockId};
