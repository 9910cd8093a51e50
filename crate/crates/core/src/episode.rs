//! Per-step episode records shared by all controllers.

use serde::{Deserialize, Serialize};

use crate::world::{Action, Position};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRow {
    pub k: usize,
    pub position: Position,
    pub buffer: f64,
    /// Rate measured at `position` during step `k` (Mbit/s).
    pub rate: f64,
    pub action: Action,
    pub reward: f64,
    /// Number of samples held by the estimator after step `k`'s update.
    pub estimator_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    /// Buffer emptied (transmission problem).
    Emptied,
    /// Goal reached with an empty buffer (navigation problem).
    ReachedGoal,
    /// Step cap hit before termination.
    Capped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub seed: u64,
    pub rows: Vec<EpisodeRow>,
    pub outcome: Outcome,
    pub collisions: usize,
    pub final_position: Position,
    pub final_buffer: f64,
    /// Step index at which the buffer first reached zero, if it did.
    pub emptied_at: Option<usize>,
}

impl EpisodeLog {
    /// Number of control steps executed.
    pub fn steps(&self) -> usize {
        self.rows.len()
    }

    pub fn terminated(&self) -> bool {
        self.outcome != Outcome::Capped
    }

    pub fn collided(&self) -> bool {
        self.collisions > 0
    }

    /// Sum of the step rewards.
    pub fn total_reward(&self) -> f64 {
        self.rows.iter().map(|r| r.reward).sum()
    }
}
