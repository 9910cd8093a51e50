//! Built-in experiment batches.

use super::spec::{Controller, ExperimentSpec, ParamGrid, PnOptions, PtOptions};
use crate::error::{Error, Result};

pub const SWEEP_NAMES: [&str; 5] = ["pt-tuning", "pt-baselines", "pt-random", "pn-variance", "pn-baseline"];

/// Upper bound on the expected rate of the two-transmitter scenarios
/// (peak of the strong transmitter plus the weak one's contribution there).
pub const PT_RATE_MAX: f64 = 10.2;

fn spec(name: &str, scenario: &str, controller: Controller, runs: usize, seed: u64, grid: ParamGrid) -> ExperimentSpec {
    ExperimentSpec {
        name: name.to_string(),
        scenario: scenario.to_string(),
        controller,
        runs,
        seed,
        out: None,
        grid,
        pt: PtOptions { rate_max: Some(PT_RATE_MAX), ..PtOptions::default() },
        pn: PnOptions::default(),
    }
}

/// Specs of a named sweep, each written to its own subdirectory.
///
/// - `pt-tuning`: learning transmission from (10, 170), `r_DP` 1..6 against
///   `N` in {1, 3, 4, 5, 6}.
/// - `pt-baselines`: model-based and learning transmission from 18 random
///   starts; then, without obstacles, model-based, learning and gradient
///   ascent from starts on the line between the transmitters.
/// - `pt-random`: learning transmission under fading `v = 15`, `r_DP` 1..6,
///   20 runs each.
/// - `pn-variance`: learning navigation for `v` in {0, 5, 10, 15, 20, 30}
///   from (30, 140) with buffers 1000 and 250, 30 runs each.
/// - `pn-baseline`: learning navigation against gradient ascent from 10
///   random starts with buffer 250, `v = 15`, 30 runs each.
pub fn builtin_sweep(name: &str, seed: u64) -> Result<Vec<ExperimentSpec>> {
    let full = |starts: Vec<[f64; 3]>| ParamGrid { starts, ..ParamGrid::default() };
    let line: Vec<[f64; 3]> = (1..=19).map(|i| [100.0, 10.0 * i as f64, 1000.0]).collect();
    Ok(match name {
        "pt-tuning" => vec![spec(
            "pt-tuning",
            "pt-obstacles",
            Controller::LearningPt,
            1,
            seed,
            ParamGrid {
                radius: (1..=6).collect(),
                neighbors: vec![1, 3, 4, 5, 6],
                ..full(vec![[10.0, 170.0, 1000.0]])
            },
        )],
        "pt-baselines" => {
            let random = ParamGrid { random_starts: 18, ..ParamGrid::default() };
            vec![
                spec("model-based", "pt-obstacles", Controller::ModelBasedPt, 1, seed, random.clone()),
                spec("learning", "pt-obstacles", Controller::LearningPt, 1, seed, random),
                spec("free-model-based", "pt-free", Controller::ModelBasedPt, 1, seed, full(line.clone())),
                spec("free-learning", "pt-free", Controller::LearningPt, 1, seed, full(line.clone())),
                spec(
                    "free-gradient",
                    "pt-free",
                    Controller::Gradient,
                    1,
                    seed,
                    ParamGrid { neighbors: vec![3], ..full(line) },
                ),
            ]
        }
        "pt-random" => vec![spec(
            "pt-random",
            "pt-obstacles",
            Controller::LearningPt,
            20,
            seed,
            ParamGrid { radius: (1..=6).collect(), rice_v: vec![15.0], ..full(vec![[10.0, 170.0, 1000.0]]) },
        )],
        "pn-variance" => vec![spec(
            "pn-variance",
            "pn-single",
            Controller::LearningPn,
            30,
            seed,
            ParamGrid {
                rice_v: vec![0.0, 5.0, 10.0, 15.0, 20.0, 30.0],
                ..full(vec![[30.0, 140.0, 1000.0], [30.0, 140.0, 250.0]])
            },
        )],
        "pn-baseline" => {
            let random =
                ParamGrid { random_starts: 10, random_buffer: Some(250.0), rice_v: vec![15.0], ..ParamGrid::default() };
            vec![
                spec("learning", "pn-single", Controller::LearningPn, 30, seed, random.clone()),
                spec(
                    "gradient",
                    "pn-single",
                    Controller::Gradient,
                    30,
                    seed,
                    ParamGrid { neighbors: vec![3], ..random },
                ),
            ]
        }
        other => {
            return Err(Error::config(format!("unknown sweep '{other}'; expected one of {}", SWEEP_NAMES.join(", "))))
        }
    })
}
