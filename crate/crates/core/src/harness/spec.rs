use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pn::KnownParams;
use crate::pt::{ObstacleKnowledge, Optimism};
use crate::rng::{aux_rng, derive_seed};
use crate::world::{Position, RobotState, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Controller {
    ModelBasedPt,
    LearningPt,
    ModelBasedPn,
    LearningPn,
    Gradient,
}

impl Controller {
    pub fn name(self) -> &'static str {
        match self {
            Controller::ModelBasedPt => "model-based-pt",
            Controller::LearningPt => "learning-pt",
            Controller::ModelBasedPn => "model-based-pn",
            Controller::LearningPn => "learning-pn",
            Controller::Gradient => "gradient",
        }
    }

    fn uses_radius(self) -> bool {
        self == Controller::LearningPt
    }

    fn uses_neighbors(self) -> bool {
        matches!(self, Controller::LearningPt | Controller::Gradient)
    }

    fn uses_sweeps(self) -> bool {
        self == Controller::LearningPt
    }
}

/// Values swept by an experiment; every combination is one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamGrid {
    /// Subgrid radius `r_DP`.
    pub radius: Vec<usize>,
    /// LLR neighbors `N`.
    pub neighbors: Vec<usize>,
    /// Local sweeps per step `ℓ_DP`.
    pub sweeps: Vec<usize>,
    /// Rice parameters; empty keeps the scenario's fading.
    pub rice_v: Vec<f64>,
    /// Turns fading off (ignored when `rice_v` is given).
    pub fading_off: bool,
    /// Initial states `[p1, p2, b]`.
    pub starts: Vec<[f64; 3]>,
    /// Additional starts drawn uniformly over the free part of the domain.
    pub random_starts: usize,
    /// Buffer of the random starts; defaults to the scenario's.
    pub random_buffer: Option<f64>,
}

impl Default for ParamGrid {
    fn default() -> Self {
        ParamGrid {
            radius: vec![4],
            neighbors: vec![1],
            sweeps: vec![10],
            rice_v: Vec::new(),
            fading_off: false,
            starts: Vec::new(),
            random_starts: 0,
            random_buffer: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PtOptions {
    pub grid_points: [usize; 3],
    /// Known rate upper bound for optimistic initialization.
    pub rate_max: Option<f64>,
    pub optimism: Optimism,
    pub obstacles: ObstacleKnowledge,
    /// Stopping threshold of model-based value iteration.
    pub tolerance: f64,
}

impl Default for PtOptions {
    fn default() -> Self {
        PtOptions {
            grid_points: [31, 31, 31],
            rate_max: None,
            optimism: Optimism::StepScaled,
            obstacles: ObstacleKnowledge::FullMap,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PnOptions {
    pub exploit_only: bool,
    /// Planner waypoints; 0 plans with a single bend. The default is 8 for
    /// the model-based controller and 0 for learning.
    pub waypoints: Option<usize>,
    pub known: KnownParams,
}

impl Default for PnOptions {
    fn default() -> Self {
        PnOptions { exploit_only: false, waypoints: None, known: KnownParams::POSITION_AND_OFFSET }
    }
}

/// A batch of episodes, read from TOML.
///
/// ```toml
/// name = "tuning"
/// scenario = "pt-obstacles"      # built-in name or path to a scenario file
/// controller = "learning-pt"     # model-based-pt | learning-pt | model-based-pn | learning-pn | gradient
/// runs = 1
/// seed = 42
///
/// [grid]
/// radius = [1, 2, 3, 4, 5, 6]
/// neighbors = [1, 3]
/// starts = [[10.0, 170.0, 1000.0]]
///
/// [pt]
/// rate_max = 10.2
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub scenario: String,
    pub controller: Controller,
    #[serde(default = "one")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    /// Output directory; the command line may override it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub grid: ParamGrid,
    #[serde(default)]
    pub pt: PtOptions,
    #[serde(default)]
    pub pn: PnOptions,
}

fn one() -> usize {
    1
}

/// One point of the parameter grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub index: usize,
    pub radius: usize,
    pub neighbors: usize,
    pub sweeps: usize,
    /// `Some(None)` turns fading off, `None` keeps the scenario's.
    pub rice_v: Option<Option<f64>>,
    pub start: RobotState,
}

impl ExperimentSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = toml::from_str(text)
            .map_err(|e| Error::Parse { what: "experiment spec".into(), message: e.to_string() })?;
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read experiment spec '{}': {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("experiment specs serialize")
    }

    pub fn load_scenario(&self) -> Result<Scenario> {
        Scenario::load(&self.scenario)
    }

    /// Checks this experiment against its scenario; every problem is reported.
    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        let mut bad = Vec::new();
        let c = self.controller;
        let g = &self.grid;
        if self.runs == 0 {
            bad.push("runs must be at least 1".to_string());
        }
        for (field, values, used) in [
            ("grid.radius", &g.radius, c.uses_radius()),
            ("grid.neighbors", &g.neighbors, c.uses_neighbors()),
            ("grid.sweeps", &g.sweeps, c.uses_sweeps()),
        ] {
            if values.is_empty() {
                bad.push(format!("{field} is empty"));
            }
            if !used && values.len() > 1 {
                bad.push(format!("{field} has several values but {} ignores it", c.name()));
            }
            if used && values.contains(&0) {
                bad.push(format!("{field} values must be at least 1"));
            }
        }
        if c == Controller::Gradient && g.neighbors.iter().any(|&n| n < 3) {
            bad.push("grid.neighbors must be at least 3 for the gradient baseline".into());
        }
        if g.rice_v.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            bad.push("grid.rice_v values must be finite and nonnegative".into());
        }
        let navigation = matches!(c, Controller::ModelBasedPn | Controller::LearningPn);
        if navigation && !scenario.is_navigation() {
            bad.push(format!("{} needs a scenario with a goal", c.name()));
        }
        if !navigation && scenario.is_navigation() && c != Controller::Gradient {
            bad.push(format!("{} needs a scenario without a goal", c.name()));
        }
        if c == Controller::Gradient && !scenario.obstacles.is_empty() {
            bad.push("the gradient baseline needs an obstacle-free scenario".into());
        }
        for s in &g.starts {
            let p = Position::new(s[0], s[1]);
            if !scenario.domain.contains(p) || !(s[2] >= 0.0 && s[2] <= scenario.buffer_max) {
                bad.push(format!("grid.starts entry {s:?} is outside the state space"));
            }
        }
        if let Some(b) = g.random_buffer {
            if !(b >= 0.0 && b <= scenario.buffer_max) {
                bad.push("grid.random_buffer is outside [0, buffer_max]".into());
            }
        }
        if matches!(self.controller, Controller::ModelBasedPt | Controller::LearningPt) {
            if self.pt.grid_points.iter().any(|&n| n < 2) {
                bad.push("pt.grid_points entries must be at least 2".into());
            }
            if self.pt.rate_max.is_some_and(|r| !(r > 0.0)) {
                bad.push("pt.rate_max must be positive".into());
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::config(bad.join("; ")))
        }
    }

    /// Initial states: the listed ones, then the random draws, or the
    /// scenario's own start when neither is given.
    pub fn initial_states(&self, scenario: &Scenario) -> Vec<RobotState> {
        let mut out: Vec<RobotState> =
            self.grid.starts.iter().map(|s| RobotState::new(Position::new(s[0], s[1]), s[2])).collect();
        let mut rng = aux_rng(derive_seed(self.seed, u64::MAX, 0));
        let d = scenario.domain;
        let buffer = self.grid.random_buffer.unwrap_or(scenario.initial.buffer);
        while out.len() < self.grid.starts.len() + self.grid.random_starts {
            let p = Position::new(rng.random_range(d.x[0]..=d.x[1]), rng.random_range(d.y[0]..=d.y[1]));
            if !scenario.in_obstacle(p) {
                out.push(RobotState::new(p, buffer));
            }
        }
        if out.is_empty() {
            out.push(scenario.initial.clone());
        }
        out
    }

    /// All configurations in output order: start, then fading, then radius,
    /// neighbors and sweeps.
    pub fn configurations(&self, scenario: &Scenario) -> Vec<Configuration> {
        let g = &self.grid;
        let fading: Vec<Option<Option<f64>>> = if !g.rice_v.is_empty() {
            g.rice_v.iter().map(|v| Some(Some(*v))).collect()
        } else if g.fading_off {
            vec![Some(None)]
        } else {
            vec![None]
        };
        let mut out = Vec::new();
        for start in self.initial_states(scenario) {
            for f in &fading {
                for &radius in &g.radius {
                    for &neighbors in &g.neighbors {
                        for &sweeps in &g.sweeps {
                            out.push(Configuration {
                                index: out.len(),
                                radius,
                                neighbors,
                                sweeps,
                                rice_v: *f,
                                start: start.clone(),
                            });
                        }
                    }
                }
            }
        }
        out
    }
}
