use serde::{Deserialize, Serialize};

use super::ExchangeError;
use crate::rng::RngStream;
use crate::types::AgentId;

/// Order in which alive agents are asked for, and applied, decisions in one
/// session.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionSequence {
    pub permutation: Vec<AgentId>,
}

/// Uniform random permutation of `alive`. Uses exactly `len - 1` bounded
/// draws from `rng`.
pub fn generate_sequence(rng: &mut RngStream, alive: &[AgentId]) -> Result<SessionSequence, ExchangeError> {
    if alive.is_empty() {
        return Err(ExchangeError::EmptySequence);
    }
    let mut permutation = alive.to_vec();
    rng.shuffle(&mut permutation);
    Ok(SessionSequence { permutation })
}
