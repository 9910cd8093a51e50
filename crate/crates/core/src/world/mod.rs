//! The simulated world: robot motion, the data buffer, the wireless channel
//! and obstacles. Controllers interact with the environment only through the
//! types in this module.

mod channel;
mod geometry;
mod obstacle;
mod scenario;

pub use channel::{bessel_i0e, compute_ez, rice_density, sample_fading, Antenna, FadingModel, RateModel, SnrTable};
pub use geometry::{angular_distance, wrap_angle, Domain, Position};
pub use obstacle::{Obstacle, Orientation};
pub use scenario::{builtin_names, Dynamics, Scenario, ScenarioFile};

use serde::{Deserialize, Serialize};

/// Full robot state: position, optional extra motion states and the buffer
/// (Mbit) still to transmit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub position: Position,
    #[serde(default)]
    pub extra: Vec<f64>,
    pub buffer: f64,
}

impl RobotState {
    pub fn new(position: Position, buffer: f64) -> Self {
        RobotState { position, extra: Vec::new(), buffer }
    }

    /// `[p1, p2, extra.., b]`, the layout used by value grids.
    pub fn to_vector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(3 + self.extra.len());
        v.push(self.position.x);
        v.push(self.position.y);
        v.extend_from_slice(&self.extra);
        v.push(self.buffer);
        v
    }
}

/// A motion command: speed (m/s) along a heading (rad, in `[0, 2π)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub velocity: f64,
    pub heading: f64,
}

impl Action {
    pub fn new(velocity: f64, heading: f64) -> Self {
        Action { velocity, heading: wrap_angle(heading) }
    }

    pub fn stop() -> Self {
        Action::new(0.0, 0.0)
    }

    /// Same command, allowing for round-off; all zero-velocity actions match.
    pub fn matches(&self, other: &Action) -> bool {
        const TOL: f64 = 1e-9;
        if (self.velocity - other.velocity).abs() > TOL {
            return false;
        }
        self.velocity == 0.0 || angular_distance(self.heading, other.heading) <= TOL
    }
}

/// `max(0, b − T_s · r)`.
pub fn buffer_step(buffer: f64, rate: f64, sample_period: f64) -> f64 {
    (buffer - sample_period * rate).max(0.0)
}
