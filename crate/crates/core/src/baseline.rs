//! Myopic gradient-ascent baseline that needs no rate model.
//!
//! The rate is estimated by LLR with at least three neighbors and the robot
//! moves at full speed along the estimated gradient. When the neighbors do
//! not span a plane (or the plane is flat) it turns a quarter circle per
//! step instead, which spreads the next samples out. With a goal, the robot
//! ignores it until the buffer is empty and then drives straight there.

use crate::episode::{EpisodeLog, EpisodeRow, Outcome};
use crate::error::{Error, Result};
use crate::llr::{LlrConfig, SampleStore};
use crate::rng::fading_rng;
use crate::world::{buffer_step, Action, Position, Scenario};

/// Heading of the ascent direction at `p` after `k` steps.
pub fn gradient_heading(store: &SampleStore, p: Position, llr: &LlrConfig, k: usize) -> f64 {
    match store.estimate_gradient(p, llr) {
        Ok(Some([gx, gy])) if gx != 0.0 || gy != 0.0 => crate::world::wrap_angle(gy.atan2(gx)),
        _ => (k % 4) as f64 * std::f64::consts::FRAC_PI_2,
    }
}

/// Full-speed action along [`gradient_heading`]. The heading is exact, so
/// the action need not belong to the scenario's set.
pub fn gradient_action(store: &SampleStore, p: Position, scenario: &Scenario, llr: &LlrConfig, k: usize) -> Action {
    Action::new(scenario.max_speed(), gradient_heading(store, p, llr, k))
}

/// Runs the baseline from `scenario.initial`. Without a goal the episode
/// ends when the buffer is empty; with one, when the robot reaches it with
/// an empty buffer.
pub fn run_gradient_episode(scenario: &Scenario, llr: &LlrConfig, seed: u64) -> Result<EpisodeLog> {
    scenario.validate()?;
    if !scenario.obstacles.is_empty() {
        return Err(Error::config("the gradient baseline cannot avoid obstacles"));
    }
    if llr.neighbors < 3 {
        return Err(Error::config("the gradient baseline needs at least 3 LLR neighbors"));
    }
    if scenario.initial.buffer > scenario.buffer_max {
        return Err(Error::config("initial buffer exceeds buffer_max"));
    }
    let reach = scenario.max_speed() * scenario.sample_period;
    let goal = scenario.goal;
    let finished = |p: Position, b: f64| b == 0.0 && goal.is_none_or(|g| p == g);

    let mut fading = fading_rng(seed);
    let mut store = SampleStore::new();
    let mut state = scenario.initial.clone();
    let mut rows = Vec::new();
    let mut emptied_at = (state.buffer == 0.0).then_some(0);
    while !finished(state.position, state.buffer) && rows.len() < scenario.max_steps {
        let k = rows.len();
        let p = state.position;
        let z = scenario.fading.map_or(1.0, |f| f.sample(&mut fading));
        let rate = scenario.sample_rate(p, z);

        let (next, action) = match goal {
            Some(g) if state.buffer == 0.0 => {
                let next = p.step_toward(g, reach);
                let moved = p.distance(next);
                (next, Action::new(moved / scenario.sample_period, p.bearing_to(next)))
            }
            _ => {
                store.add_sample(p, rate, llr);
                let a = gradient_action(&store, p, scenario, llr, k);
                (scenario.move_along(p, a.velocity, a.heading), a)
            }
        };
        rows.push(EpisodeRow {
            k,
            position: p,
            buffer: state.buffer,
            rate,
            action,
            reward: if state.buffer > 0.0 || goal.is_some() { -1.0 } else { 0.0 },
            estimator_samples: store.len(),
        });
        state.position = next;
        state.buffer = buffer_step(state.buffer, rate, scenario.sample_period);
        if state.buffer == 0.0 && emptied_at.is_none() {
            emptied_at = Some(k + 1);
        }
    }

    let outcome = match (finished(state.position, state.buffer), goal) {
        (false, _) => Outcome::Capped,
        (true, Some(_)) => Outcome::ReachedGoal,
        (true, None) => Outcome::Emptied,
    };
    Ok(EpisodeLog {
        seed,
        rows,
        outcome,
        collisions: 0,
        final_position: state.position,
        final_buffer: state.buffer,
        emptied_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn affine_field_gives_exact_heading() {
        let llr = LlrConfig::new(3);
        let mut store = SampleStore::new();
        for (x, y) in [(0.0, 0.0), (4.0, 1.0), (1.0, 5.0)] {
            store.add_sample(Position::new(x, y), 2.0 * x + 3.0 * y + 1.0, &llr);
        }
        let h = gradient_heading(&store, Position::new(1.0, 1.0), &llr, 0);
        assert!((h - 3f64.atan2(2.0)).abs() < 1e-9);
    }

    #[test]
    fn collinear_samples_rotate_with_the_step() {
        let llr = LlrConfig::new(3);
        let mut store = SampleStore::new();
        for x in [0.0, 1.0, 2.0] {
            store.add_sample(Position::new(x, 0.0), x, &llr);
        }
        let p = Position::new(0.0, 0.0);
        assert_eq!(gradient_heading(&store, p, &llr, 1), FRAC_PI_2);
        assert_eq!(gradient_heading(&store, p, &llr, 4), 0.0);
        assert_eq!(gradient_heading(&store, p, &llr, 0), 0.0);
    }

    #[test]
    fn flat_plane_falls_back_to_rotation() {
        let llr = LlrConfig::new(3);
        let mut store = SampleStore::new();
        for (x, y) in [(0.0, 0.0), (4.0, 1.0), (1.0, 5.0)] {
            store.add_sample(Position::new(x, y), 7.0, &llr);
        }
        assert_eq!(gradient_heading(&store, Position::new(1.0, 1.0), &llr, 3), 3.0 * FRAC_PI_2);
    }

    #[test]
    fn obstacles_are_rejected() {
        let sc = Scenario::builtin("pt-obstacles").unwrap();
        assert!(matches!(run_gradient_episode(&sc, &LlrConfig::new(3), 0), Err(Error::Config(_))));
    }

    #[test]
    fn too_few_neighbors_are_rejected() {
        let sc = Scenario::builtin("pt-free").unwrap();
        assert!(run_gradient_episode(&sc, &LlrConfig::new(1), 0).is_err());
    }

    #[test]
    fn empty_buffer_with_goal_goes_straight() {
        let sc = Scenario::builtin("pn-single").unwrap();
        let goal = sc.goal.unwrap();
        let sc = sc.with_initial(Position::new(30.0, 140.0), 0.0);
        let log = run_gradient_episode(&sc, &LlrConfig::new(3), 0).unwrap();
        assert_eq!(log.outcome, Outcome::ReachedGoal);
        assert_eq!(log.final_position, goal);
        let expected = (Position::new(30.0, 140.0).distance(goal) / 4.0).ceil() as usize;
        assert_eq!(log.steps(), expected);
    }

    #[test]
    fn is_repeatable() {
        let sc = Scenario::builtin("pt-free").unwrap();
        let a = run_gradient_episode(&sc, &LlrConfig::new(3), 9).unwrap();
        let b = run_gradient_episode(&sc, &LlrConfig::new(3), 9).unwrap();
        assert_eq!(a, b);
    }
}
