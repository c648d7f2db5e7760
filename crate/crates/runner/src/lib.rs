//! Simulation runner: the day loop, run logs and summary metrics.

pub mod cli;
pub mod log;
pub mod metrics;
pub mod sim;

pub use log::RunLog;
pub use sim::{run_simulation, run_with_agents, SimError};
