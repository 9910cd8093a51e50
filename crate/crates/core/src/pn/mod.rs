//! Navigation-and-transmission problem: reach a goal in minimum time with
//! the buffer empty on arrival.
//!
//! The rate around the single antenna is radial and decreasing, so the
//! known-rate optimum has three regimes: go straight when the buffer is
//! small, visit the antenna and wait when it is large, and bend toward the
//! antenna in between. The closed loop replans from the current state every
//! step and applies the first heading. The learning controller fits the SNR
//! parameters by least squares after each measurement and trades the planned
//! heading off against the informativeness of the reachable positions.

mod episode;
mod learn;
mod planner;

pub use episode::{closed_loop_heading, run_pn_episode, PnController, PnSettings};
pub use learn::{
    choose_exploit, choose_next, exploration_scores, fit_snr, reachable_set, snr_loss, ExplorationScores, FitSettings,
    KnownParams, SnrParams, Target, EPS_ANGLE,
};
pub use planner::{path_length, plan_time_optimal, segment_buffer, PlanCase, PlanResult, PlannerSettings, RadialModel};
