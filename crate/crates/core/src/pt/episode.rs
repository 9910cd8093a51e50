use super::dp::{dp_full, dp_sweep_local, greedy_action_with, optimistic_init, reward, DpReport};
use super::DpConfig;
use crate::episode::{EpisodeLog, EpisodeRow, Outcome};
use crate::error::{Error, Result};
use crate::gridfn::ValueGrid;
use crate::llr::{LlrConfig, SampleStore};
use crate::rng::fading_rng;
use crate::world::{buffer_step, Scenario};

/// Where the controller's rate knowledge comes from.
#[derive(Debug, Clone, Copy)]
pub enum PtMode<'a> {
    /// Greedy control on a value function computed offline with the true
    /// rate (see [`model_based_values`]).
    ModelBased(&'a ValueGrid),
    /// Online learning: LLR rate estimate plus local DP sweeps.
    Learning(LlrConfig),
}

/// Grid over `P × [0, b̄]` with `config.grid_points` nodes per dimension.
pub fn pt_grid(scenario: &Scenario, config: &DpConfig) -> Result<ValueGrid> {
    config.validate()?;
    let d = &scenario.domain;
    ValueGrid::new(vec![
        ValueGrid::linspace(d.x[0], d.x[1], config.grid_points[0]),
        ValueGrid::linspace(d.y[0], d.y[1], config.grid_points[1]),
        ValueGrid::linspace(0.0, scenario.buffer_max, config.grid_points[2]),
    ])
}

/// Value iteration from zero with the deterministic (fading-free) rate.
pub fn model_based_values(scenario: &Scenario, config: &DpConfig) -> Result<(ValueGrid, DpReport)> {
    let mut grid = pt_grid(scenario, config)?;
    let report = dp_full(&mut grid, scenario, |p| scenario.rate.expected_rate(p), config)?;
    Ok((grid, report))
}

/// Runs one transmission episode from `scenario.initial`.
///
/// Each step samples the rate at the current position (with fading when the
/// scenario enables it), updates the estimator and runs the local sweeps in
/// learning mode, then applies the greedy action computed with the measured
/// rate. Stops when the buffer is empty or after `scenario.max_steps`.
pub fn run_pt_episode(scenario: &Scenario, config: &DpConfig, mode: PtMode<'_>, seed: u64) -> Result<EpisodeLog> {
    scenario.validate()?;
    if scenario.initial.buffer > scenario.buffer_max {
        return Err(Error::config("initial buffer exceeds buffer_max"));
    }
    let mut fading = fading_rng(seed);
    let mut learned = match mode {
        PtMode::ModelBased(_) => None,
        PtMode::Learning(llr) => {
            let mut grid = pt_grid(scenario, config)?;
            grid.theta = optimistic_init(&grid, scenario, config);
            Some((grid, SampleStore::new(), llr))
        }
    };

    let mut state = scenario.initial.clone();
    let mut rows = Vec::new();
    let mut collisions = 0;
    let mut emptied_at = (state.buffer == 0.0).then_some(0);
    while state.buffer > 0.0 && rows.len() < scenario.max_steps {
        let k = rows.len();
        let z = scenario.fading.map_or(1.0, |f| f.sample(&mut fading));
        let rate = scenario.sample_rate(state.position, z);

        let (grid, samples): (&ValueGrid, usize) = match (&mut learned, mode) {
            (Some((grid, store, llr)), _) => {
                store.add_sample(state.position, rate, llr);
                let sub = grid.select_subgrid(&state.to_vector(), config.radius);
                let store_ref = &*store;
                let llr = *llr;
                dp_sweep_local(
                    grid,
                    &sub,
                    scenario,
                    |p| store_ref.estimate(p, &llr).unwrap_or(f64::NAN),
                    config.sweeps,
                    config.obstacles,
                )?;
                (&*grid, store.len())
            }
            (None, PtMode::ModelBased(grid)) => (grid, 0),
            (None, PtMode::Learning(_)) => unreachable!(),
        };

        let a = greedy_action_with(grid, &state, rate, scenario, config.obstacles)?;
        let action = scenario.actions[a];
        let next_position = scenario.move_along(state.position, action.velocity, action.heading);
        let r = reward(state.buffer, next_position, scenario);
        if scenario.in_obstacle(next_position) {
            collisions += 1;
        }
        rows.push(EpisodeRow {
            k,
            position: state.position,
            buffer: state.buffer,
            rate,
            action,
            reward: r,
            estimator_samples: samples,
        });
        state.position = next_position;
        state.buffer = buffer_step(state.buffer, rate, scenario.sample_period);
        if state.buffer == 0.0 && emptied_at.is_none() {
            emptied_at = Some(k + 1);
        }
    }

    Ok(EpisodeLog {
        seed,
        rows,
        outcome: if state.buffer == 0.0 { Outcome::Emptied } else { Outcome::Capped },
        collisions,
        final_position: state.position,
        final_buffer: state.buffer,
        emptied_at,
    })
}

/// Return of an episode: the sum of its stage rewards.
pub fn evaluate_return(log: &EpisodeLog) -> f64 {
    log.total_reward()
}
