//! Scenario description and its TOML file format.
//!
//! ```toml
//! name = "example"
//! sample_period = 4.0          # s
//! dynamics = "unicycle"        # or "integrator"
//! buffer_max = 1000.0          # Mbit
//! obstacle_penalty = 100.0
//! max_steps = 1000
//! goal = [170.0, 140.0]        # optional; present for navigation scenarios
//!
//! [domain]
//! x = [0.0, 200.0]
//! y = [0.0, 200.0]
//!
//! [actions]                    # one of: headings (count), headings_deg, list
//! speed = 1.0
//! headings = 8
//! stop = true
//!
//! [initial]
//! position = [40.0, 150.0]
//! buffer = 1000.0
//!
//! [fading]                     # optional; absent means z = 1
//! rice_v = 15.0
//!
//! [[antennas]]                 # parametric rate model ...
//! position = [100.0, 170.0]
//! k = 1e4
//! h = 1.0
//! gamma = 2.0
//! r0 = 0.753
//!
//! # ... or a tabulated one:
//! # [snr_table]
//! # x = [...]; y = [...]; values = [[...], ...]; r0 = 1.0; bandwidth_mhz = 20.0
//!
//! [[obstacles]]
//! center = [100.0, 100.0]
//! length = 42.0
//! width = 2.0
//! orientation = "horizontal"
//! enlarged_length = 50.0
//! enlarged_width = 10.0
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Action, Antenna, Domain, FadingModel, Obstacle, Position, RateModel, RobotState, SnrTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dynamics {
    /// `p' = p + T_s · u` with `u = v (cos h, sin h)`.
    Integrator,
    /// `p' = p + T_s · v · (cos h, sin h)`, with velocity and heading as inputs.
    Unicycle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub domain: Domain,
    pub sample_period: f64,
    pub dynamics: Dynamics,
    pub actions: Vec<Action>,
    pub rate: RateModel,
    pub fading: Option<FadingModel>,
    pub obstacles: Vec<Obstacle>,
    pub obstacle_penalty: f64,
    pub buffer_max: f64,
    pub initial: RobotState,
    pub goal: Option<Position>,
    pub max_steps: usize,
}

const BUILTIN: [(&str, &str); 4] = [
    ("pt-obstacles", include_str!("../../scenarios/pt_obstacles.toml")),
    ("pt-free", include_str!("../../scenarios/pt_free.toml")),
    ("pn-single", include_str!("../../scenarios/pn_single.toml")),
    ("drone-map", include_str!("../../scenarios/drone_map.toml")),
];

pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUILTIN.iter().map(|(n, _)| *n)
}

impl Scenario {
    pub fn builtin(name: &str) -> Result<Scenario> {
        let (_, text) = BUILTIN
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::config(format!("unknown built-in scenario '{name}'")))?;
        Scenario::from_toml_str(text)
    }

    /// Loads a built-in scenario by name, or a scenario file by path.
    pub fn load(name_or_path: &str) -> Result<Scenario> {
        if builtin_names().any(|n| n == name_or_path) {
            return Scenario::builtin(name_or_path);
        }
        Scenario::from_path(Path::new(name_or_path))
    }

    pub fn from_path(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read scenario '{}': {e}", path.display())))?;
        Scenario::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Scenario> {
        let file: ScenarioFile =
            toml::from_str(text).map_err(|e| Error::Parse { what: "scenario".into(), message: e.to_string() })?;
        file.into_scenario()
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&ScenarioFile::from(self)).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64| v.is_finite();
        if !(self.sample_period > 0.0 && finite(self.sample_period)) {
            return Err(Error::config("sample_period must be positive"));
        }
        if !(self.domain.x[0] < self.domain.x[1] && self.domain.y[0] < self.domain.y[1]) {
            return Err(Error::config("domain bounds must be increasing"));
        }
        if !(self.obstacle_penalty > 0.0) {
            return Err(Error::config("obstacle_penalty must be positive"));
        }
        if !(self.buffer_max > 0.0 && finite(self.buffer_max)) {
            return Err(Error::config("buffer_max must be positive"));
        }
        if !(self.initial.buffer >= 0.0 && self.initial.buffer <= self.buffer_max) {
            return Err(Error::config("initial buffer must lie in [0, buffer_max]"));
        }
        if !self.domain.contains(self.initial.position) {
            return Err(Error::config("initial position lies outside the domain"));
        }
        if let Some(g) = self.goal {
            if !self.domain.contains(g) {
                return Err(Error::config("goal lies outside the domain"));
            }
        }
        if self.actions.is_empty() {
            return Err(Error::config("action set is empty"));
        }
        if self.actions.iter().any(|a| !(a.velocity >= 0.0 && a.velocity.is_finite())) {
            return Err(Error::config("action velocities must be finite and nonnegative"));
        }
        if self.max_steps == 0 {
            return Err(Error::config("max_steps must be at least 1"));
        }
        if !self.initial.extra.is_empty() {
            return Err(Error::config("extra motion states are not supported by the built-in dynamics"));
        }
        self.rate.validate()?;
        if let RateModel::Tabulated(t) = &self.rate {
            let covers = t.x[0] <= self.domain.x[0]
                && t.x[t.x.len() - 1] >= self.domain.x[1]
                && t.y[0] <= self.domain.y[0]
                && t.y[t.y.len() - 1] >= self.domain.y[1];
            if !covers {
                return Err(Error::config("SNR table does not cover the domain"));
            }
        }
        self.obstacles.iter().try_for_each(Obstacle::validate)
    }

    pub fn is_navigation(&self) -> bool {
        self.goal.is_some()
    }

    pub fn action_index(&self, action: &Action) -> Option<usize> {
        self.actions.iter().position(|a| a.matches(action))
    }

    pub fn max_speed(&self) -> f64 {
        self.actions.iter().map(|a| a.velocity).fold(0.0, f64::max)
    }

    /// Moves `p` along `heading` at `velocity` for one sampling period and
    /// saturates into the domain. No action-set check is made.
    pub fn move_along(&self, p: Position, velocity: f64, heading: f64) -> Position {
        let step = self.sample_period * velocity;
        self.domain.saturate(Position::new(p.x + step * heading.cos(), p.y + step * heading.sin()))
    }

    /// One step of the motion dynamics; the buffer is carried over unchanged.
    pub fn motion_step(&self, state: &RobotState, action: &Action) -> Result<RobotState> {
        if self.action_index(action).is_none() {
            return Err(Error::InvalidAction(*action));
        }
        Ok(RobotState {
            position: self.move_along(state.position, action.velocity, action.heading),
            extra: state.extra.clone(),
            buffer: state.buffer,
        })
    }

    pub fn in_obstacle(&self, p: Position) -> bool {
        self.obstacles.iter().any(|o| o.contains(p))
    }

    pub fn sample_rate(&self, p: Position, z: f64) -> f64 {
        self.rate.sample_rate(p, z)
    }

    pub fn with_initial(mut self, position: Position, buffer: f64) -> Self {
        self.initial = RobotState::new(position, buffer);
        self
    }

    pub fn with_fading(mut self, rice_v: Option<f64>) -> Result<Self> {
        self.fading = rice_v.map(FadingModel::new).transpose()?;
        Ok(self)
    }

    pub fn without_obstacles(mut self) -> Self {
        self.obstacles.clear();
        self
    }
}

/// On-disk form of a [`Scenario`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub name: String,
    pub sample_period: f64,
    pub dynamics: Dynamics,
    pub buffer_max: f64,
    pub obstacle_penalty: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal: Option<Position>,
    pub domain: Domain,
    pub actions: ActionsFile,
    pub initial: InitialFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fading: Option<FadingFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub antennas: Vec<Antenna>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_table: Option<SnrTable>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub obstacles: Vec<Obstacle>,
}

fn default_max_steps() -> usize {
    1000
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionsFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed: Option<f64>,
    /// Number of evenly spaced headings starting at 0 rad.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub headings: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub headings_deg: Option<Vec<f64>>,
    /// Explicit `[velocity, heading_rad]` pairs, in order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub list: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub stop: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialFile {
    pub position: Position,
    pub buffer: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingFile {
    pub rice_v: f64,
}

impl ActionsFile {
    fn expand(&self) -> Result<Vec<Action>> {
        let mut actions = Vec::new();
        let forms = [self.headings.is_some(), self.headings_deg.is_some(), self.list.is_some()];
        if forms.iter().filter(|f| **f).count() != 1 {
            return Err(Error::config("actions need exactly one of headings, headings_deg or list"));
        }
        if let Some(list) = &self.list {
            actions.extend(list.iter().map(|[v, h]| Action::new(*v, *h)));
        } else {
            let speed = self.speed.ok_or_else(|| Error::config("actions.speed is required with headings"))?;
            if let Some(n) = self.headings {
                if n == 0 {
                    return Err(Error::config("actions.headings must be positive"));
                }
                let step = std::f64::consts::TAU / n as f64;
                actions.extend((0..n).map(|i| Action::new(speed, i as f64 * step)));
            }
            if let Some(deg) = &self.headings_deg {
                actions.extend(deg.iter().map(|d| Action::new(speed, d.to_radians())));
            }
        }
        if self.stop {
            actions.push(Action::stop());
        }
        Ok(actions)
    }
}

impl ScenarioFile {
    pub fn into_scenario(self) -> Result<Scenario> {
        let rate = match (self.antennas.is_empty(), self.snr_table) {
            (false, None) => RateModel::Parametric { antennas: self.antennas },
            (true, Some(t)) => RateModel::Tabulated(t),
            _ => return Err(Error::config("give either [[antennas]] or [snr_table], not both or neither")),
        };
        let fading = self.fading.map(|f| FadingModel::new(f.rice_v)).transpose()?;
        let scenario = Scenario {
            name: self.name,
            domain: self.domain,
            sample_period: self.sample_period,
            dynamics: self.dynamics,
            actions: self.actions.expand()?,
            rate,
            fading,
            obstacles: self.obstacles,
            obstacle_penalty: self.obstacle_penalty,
            buffer_max: self.buffer_max,
            initial: RobotState::new(self.initial.position, self.initial.buffer),
            goal: self.goal,
            max_steps: self.max_steps,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        let (antennas, snr_table) = match &s.rate {
            RateModel::Parametric { antennas } => (antennas.clone(), None),
            RateModel::Tabulated(t) => (Vec::new(), Some(t.clone())),
        };
        ScenarioFile {
            name: s.name.clone(),
            sample_period: s.sample_period,
            dynamics: s.dynamics,
            buffer_max: s.buffer_max,
            obstacle_penalty: s.obstacle_penalty,
            max_steps: s.max_steps,
            goal: s.goal,
            domain: s.domain,
            actions: ActionsFile {
                list: Some(s.actions.iter().map(|a| [a.velocity, a.heading]).collect()),
                ..ActionsFile::default()
            },
            initial: InitialFile { position: s.initial.position, buffer: s.initial.buffer },
            fading: s.fading.map(|f| FadingFile { rice_v: f.rice_v }),
            antennas,
            snr_table,
            obstacles: s.obstacles.clone(),
        }
    }
}
