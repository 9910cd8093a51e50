use super::learn::{
    choose_exploit, choose_next, exploration_scores, fit_snr, reachable_set, FitSettings, KnownParams, SnrParams,
    Target,
};
use super::planner::{plan_time_optimal, PlanCase, PlannerSettings, RadialModel};
use crate::episode::{EpisodeLog, EpisodeRow, Outcome};
use crate::error::{Error, Result};
use crate::rng::fading_rng;
use crate::world::{buffer_step, Action, Antenna, Dynamics, Position, Scenario};

/// Which navigation controller drives the robot.
#[derive(Debug, Clone, PartialEq)]
pub enum PnController {
    /// Replans with the true deterministic SNR each step and moves exactly
    /// along the planned heading.
    ModelBased,
    /// Same planner, but the move is the action of the scenario's set whose
    /// bearing is closest to the plan.
    ModelBasedDiscrete,
    /// Regression of the SNR parameters plus exploration-weighted choice
    /// among the scenario's actions.
    Learning {
        known: KnownParams,
        /// Pick the action closest to the plan instead of weighting by
        /// informativeness.
        exploit_only: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PnSettings {
    pub controller: PnController,
    pub planner: PlannerSettings,
    pub fit: FitSettings,
}

impl PnSettings {
    pub fn model_based() -> Self {
        PnSettings {
            controller: PnController::ModelBased,
            planner: PlannerSettings::default(),
            fit: FitSettings::default(),
        }
    }

    /// Learning with unknown antenna position and offset `h`. Replanning
    /// happens with a fresh estimate every step, so the one-bend plan is used:
    /// the polyline refinement shortens paths by well under 1% at roughly a
    /// hundred times the cost.
    pub fn learning() -> Self {
        PnSettings {
            controller: PnController::Learning { known: KnownParams::POSITION_AND_OFFSET, exploit_only: false },
            planner: PlannerSettings::single_bend(),
            fit: FitSettings::default(),
        }
    }
}

fn check_scenario(scenario: &Scenario) -> Result<(Position, Antenna)> {
    scenario.validate()?;
    let goal = scenario.goal.ok_or_else(|| Error::config("navigation needs a goal position"))?;
    let antenna = *scenario
        .rate
        .single_antenna()
        .ok_or_else(|| Error::config("navigation needs exactly one parametric antenna"))?;
    if scenario.dynamics != Dynamics::Integrator || !scenario.initial.extra.is_empty() {
        return Err(Error::config("navigation needs first-order integrator dynamics"));
    }
    if scenario.max_speed() <= 0.0 {
        return Err(Error::config("navigation needs a moving action"));
    }
    Ok((goal, antenna))
}

/// Heading the plan asks for at `(p, b)`, or hold.
pub fn closed_loop_heading(
    p: Position,
    b: f64,
    goal: Position,
    model: &RadialModel,
    planner: &PlannerSettings,
) -> Result<Target> {
    if b == 0.0 {
        return Ok(if p == goal { Target::Hold } else { Target::Heading(p.bearing_to(goal)) });
    }
    let plan = plan_time_optimal(p, b, goal, model, planner)?;
    Ok(plan.heading.map_or(Target::Hold, Target::Heading))
}

/// Runs one navigation episode from `scenario.initial` to `scenario.goal`.
///
/// Each step reads the (possibly faded) SNR at the current position and
/// transmits at the matching rate. While data remains the robot follows the
/// controller; once the buffer is empty it heads straight to the goal at full
/// speed, landing on it exactly. The episode ends at the goal with an empty
/// buffer or after `scenario.max_steps` steps.
pub fn run_pn_episode(scenario: &Scenario, settings: &PnSettings, seed: u64) -> Result<EpisodeLog> {
    let (goal, truth) = check_scenario(scenario)?;
    if scenario.initial.buffer > scenario.buffer_max {
        return Err(Error::config("initial buffer exceeds buffer_max"));
    }
    let speed = scenario.max_speed();
    let reach = speed * scenario.sample_period;
    let true_model = RadialModel::new(truth, speed)?;
    let mut fading = fading_rng(seed);

    let mut params = match &settings.controller {
        PnController::Learning { known, .. } => Some(SnrParams::initial_guess(&truth, *known)),
        _ => None,
    };
    let mut samples: Vec<(Position, f64)> = Vec::new();
    let mut state = scenario.initial.clone();
    let mut rows = Vec::new();
    let mut emptied_at = (state.buffer == 0.0).then_some(0);

    while !(state.buffer == 0.0 && state.position == goal) && rows.len() < scenario.max_steps {
        let k = rows.len();
        let z = scenario.fading.map_or(1.0, |f| f.sample(&mut fading));
        let rate = scenario.sample_rate(state.position, z);
        let p = state.position;

        if let Some(prev) = params.as_mut() {
            samples.push((p, scenario.rate.measure_snr(p, z)?));
            *prev = fit_snr(&samples, prev, &scenario.domain, &settings.fit);
        }

        let next = if state.buffer == 0.0 {
            p.step_toward(goal, reach)
        } else {
            match (&settings.controller, params) {
                (PnController::ModelBased, _) => {
                    let plan = plan_time_optimal(p, state.buffer, goal, &true_model, &settings.planner)?;
                    match plan.heading {
                        None => p,
                        Some(_) => {
                            let waypoint = plan.path[1];
                            let landing = plan.case == PlanCase::Large || waypoint == goal;
                            if landing {
                                p.step_toward(waypoint, reach)
                            } else {
                                scenario.domain.saturate(p.step_toward(waypoint, reach))
                            }
                        }
                    }
                }
                (PnController::ModelBasedDiscrete, _) => {
                    let target = closed_loop_heading(p, state.buffer, goal, &true_model, &settings.planner)?;
                    let candidates = reachable_set(&state, scenario)?;
                    let positions: Vec<Position> = candidates.iter().map(|c| c.1).collect();
                    let scores = exploration_scores(
                        p,
                        &positions,
                        &[],
                        &SnrParams::from_antenna(&truth, KnownParams::ALL),
                        target,
                    );
                    positions[choose_exploit(&scores)]
                }
                (PnController::Learning { exploit_only, .. }, Some(est)) => {
                    let model = RadialModel::new(est.to_antenna(truth.r0), speed)?;
                    let target = closed_loop_heading(p, state.buffer, goal, &model, &settings.planner)?;
                    let candidates = reachable_set(&state, scenario)?;
                    let positions: Vec<Position> = candidates.iter().map(|c| c.1).collect();
                    let scores = exploration_scores(p, &positions, &samples, &est, target);
                    let pick = if *exploit_only { choose_exploit(&scores) } else { choose_next(&scores) };
                    positions[pick]
                }
                (PnController::Learning { .. }, None) => unreachable!("learning keeps an estimate"),
            }
        };

        let moved = p.distance(next);
        let action =
            if moved == 0.0 { Action::stop() } else { Action::new(moved / scenario.sample_period, p.bearing_to(next)) };
        rows.push(EpisodeRow {
            k,
            position: p,
            buffer: state.buffer,
            rate,
            action,
            reward: -1.0,
            estimator_samples: samples.len(),
        });
        state.position = next;
        state.buffer = buffer_step(state.buffer, rate, scenario.sample_period);
        if state.buffer == 0.0 && emptied_at.is_none() {
            emptied_at = Some(k + 1);
        }
    }

    let done = state.buffer == 0.0 && state.position == goal;
    Ok(EpisodeLog {
        seed,
        rows,
        outcome: if done { Outcome::ReachedGoal } else { Outcome::Capped },
        collisions: 0,
        final_position: state.position,
        final_buffer: state.buffer,
        emptied_at,
    })
}
