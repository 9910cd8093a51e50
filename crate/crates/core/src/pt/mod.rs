//! Transmission problem: empty the buffer in minimum time with a free final
//! position, avoiding obstacles.
//!
//! The value function is represented on a multilinear grid over
//! `(p1, p2, b)` and improved by approximate value iteration. The model-based
//! controller runs value iteration over the whole grid with the true rate;
//! the learning controller estimates the rate online with LLR and only runs
//! a few local sweeps around the current state before acting greedily.

use serde::{Deserialize, Serialize};

mod dp;
mod episode;

pub use dp::{dp_full, dp_sweep_local, greedy_action, optimistic_init, reward, DpReport};
pub use episode::{evaluate_return, model_based_values, pt_grid, run_pt_episode, PtMode};

/// How the optimistic initial values are scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Optimism {
    /// `−b / (T_s · R̄)`: the fewest steps in which `b` can be transmitted.
    StepScaled,
    /// `−b / R̄`, without the sampling period.
    Literal,
}

/// Which obstacles the controller is told about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObstacleKnowledge {
    FullMap,
    /// Only obstacles meeting the region reachable from the swept subgrid,
    /// as a short-range sensor would report them.
    Sensed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DpConfig {
    /// Grid points per state dimension `(p1, p2, b)`.
    pub grid_points: Vec<usize>,
    /// Subgrid radius `r_DP`.
    pub radius: usize,
    /// Local sweeps per step `ℓ_DP`.
    pub sweeps: usize,
    /// Stopping threshold on `‖θ_{ℓ+1} − θ_ℓ‖_∞` for full value iteration.
    pub tolerance: f64,
    /// Known upper bound on the rate, used for optimistic initialization.
    pub rate_max: Option<f64>,
    /// Known lower bound on the rate, used to cap value iteration.
    pub rate_min: Option<f64>,
    pub max_iterations: Option<usize>,
    pub optimism: Optimism,
    pub obstacles: ObstacleKnowledge,
}

impl Default for DpConfig {
    fn default() -> Self {
        DpConfig {
            grid_points: vec![31, 31, 31],
            radius: 4,
            sweeps: 10,
            tolerance: 1e-6,
            rate_max: None,
            rate_min: None,
            max_iterations: None,
            optimism: Optimism::StepScaled,
            obstacles: ObstacleKnowledge::FullMap,
        }
    }
}

impl DpConfig {
    pub fn iteration_cap(&self, buffer_max: f64, sample_period: f64) -> usize {
        if let Some(n) = self.max_iterations {
            return n;
        }
        match self.rate_min {
            Some(r) if r > 0.0 => 10 * (buffer_max / (sample_period * r)).ceil() as usize,
            _ => 2000,
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if self.radius == 0 {
            return Err(crate::Error::config("DP radius must be at least 1"));
        }
        if self.grid_points.len() != 3 || self.grid_points.iter().any(|n| *n < 2) {
            return Err(crate::Error::config("grid needs 3 dimensions with at least 2 points each"));
        }
        if !(self.tolerance > 0.0) {
            return Err(crate::Error::config("DP tolerance must be positive"));
        }
        if matches!(self.rate_max, Some(r) if !(r > 0.0)) {
            return Err(crate::Error::config("rate_max must be positive"));
        }
        Ok(())
    }
}
