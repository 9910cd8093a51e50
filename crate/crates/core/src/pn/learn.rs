//! SNR regression and exploration scoring for the learning navigator.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numopt::{nelder_mead, NelderMeadSettings};
use crate::world::{angular_distance, Antenna, Domain, Position, RobotState, Scenario};

/// Which SNR parameters are known to the controller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownParams {
    pub antenna: bool,
    pub k: bool,
    pub h: bool,
    pub gamma: bool,
}

impl KnownParams {
    /// Antenna position and `h` unknown; `K` and `γ` known.
    pub const POSITION_AND_OFFSET: KnownParams = KnownParams { antenna: false, k: true, h: false, gamma: true };
    pub const ALL: KnownParams = KnownParams { antenna: true, k: true, h: true, gamma: true };
    pub const NONE: KnownParams = KnownParams { antenna: false, k: false, h: false, gamma: false };
}

/// Estimated parameters of `Ŝ(p) = K̂ / (‖p − p̂_ant‖ + ĥ)^γ̂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrParams {
    pub antenna: Position,
    pub k: f64,
    pub h: f64,
    pub gamma: f64,
    pub known: KnownParams,
}

impl SnrParams {
    pub fn snr(&self, p: Position) -> f64 {
        self.k / (p.distance(self.antenna) + self.h).powf(self.gamma)
    }

    /// Parameters copied from a true antenna, with the given knowledge flags.
    pub fn from_antenna(antenna: &Antenna, known: KnownParams) -> Self {
        SnrParams { antenna: antenna.position, k: antenna.k, h: antenna.h, gamma: antenna.gamma, known }
    }

    /// The customary first guess: antenna at the origin, `ĥ = 5`, with the
    /// known entries taken from `truth`.
    pub fn initial_guess(truth: &Antenna, known: KnownParams) -> Self {
        let mut p = Self::from_antenna(truth, known);
        if !known.antenna {
            p.antenna = Position::new(0.0, 0.0);
        }
        if !known.h {
            p.h = 5.0;
        }
        if !known.k {
            p.k = 1.0;
        }
        if !known.gamma {
            p.gamma = 1.0;
        }
        p
    }

    /// Antenna with these parameters and the rate scale `r0`.
    pub fn to_antenna(&self, r0: f64) -> Antenna {
        Antenna { position: self.antenna, k: self.k, h: self.h, gamma: self.gamma, r0 }
    }

    fn unknowns(&self) -> Vec<f64> {
        let mut w = Vec::new();
        if !self.known.antenna {
            w.extend([self.antenna.x, self.antenna.y]);
        }
        if !self.known.k {
            w.push(self.k);
        }
        if !self.known.h {
            w.push(self.h);
        }
        if !self.known.gamma {
            w.push(self.gamma);
        }
        w
    }

    fn with_unknowns(&self, w: &[f64]) -> Self {
        let mut p = *self;
        let mut it = w.iter().copied();
        let mut next = || it.next().expect("one value per unknown");
        if !self.known.antenna {
            p.antenna = Position::new(next(), next());
        }
        if !self.known.k {
            p.k = next();
        }
        if !self.known.h {
            p.h = next();
        }
        if !self.known.gamma {
            p.gamma = next();
        }
        p
    }
}

/// Bounds and stopping rules of the SNR regression.
#[derive(Debug, Clone, PartialEq)]
pub struct FitSettings {
    pub h_max: f64,
    pub k_range: [f64; 2],
    pub gamma_range: [f64; 2],
    pub f_tol: f64,
    pub x_tol: f64,
    pub max_iter: usize,
    pub max_evals: usize,
    /// Extra Nelder-Mead runs restarted from the previous optimum while the
    /// loss keeps dropping. Clamping can flatten the simplex onto a bound; a
    /// restart rebuilds a full-dimensional one.
    pub restarts: usize,
}

impl Default for FitSettings {
    fn default() -> Self {
        let nm = NelderMeadSettings::unbounded(0);
        FitSettings {
            h_max: 100.0,
            k_range: [1e-6, 1e9],
            gamma_range: [0.1, 10.0],
            f_tol: nm.f_tol,
            x_tol: nm.x_tol,
            max_iter: nm.max_iter,
            max_evals: nm.max_evals,
            restarts: 0,
        }
    }
}

impl FitSettings {
    pub fn tight() -> Self {
        FitSettings {
            f_tol: 1e-12,
            x_tol: 1e-10,
            max_iter: 50_000,
            max_evals: 100_000,
            restarts: 50,
            ..Self::default()
        }
    }

    fn bounds(&self, known: KnownParams, domain: &Domain) -> (Vec<f64>, Vec<f64>) {
        let (mut lo, mut hi) = (Vec::new(), Vec::new());
        if !known.antenna {
            lo.extend([domain.x[0], domain.y[0]]);
            hi.extend([domain.x[1], domain.y[1]]);
        }
        if !known.k {
            lo.push(self.k_range[0]);
            hi.push(self.k_range[1]);
        }
        if !known.h {
            lo.push(1e-6);
            hi.push(self.h_max);
        }
        if !known.gamma {
            lo.push(self.gamma_range[0]);
            hi.push(self.gamma_range[1]);
        }
        (lo, hi)
    }
}

/// Mean squared SNR residual over the samples.
pub fn snr_loss(samples: &[(Position, f64)], params: &SnrParams) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let sum: f64 = samples.iter().map(|(p, s)| (params.snr(*p) - s).powi(2)).sum();
    sum / samples.len() as f64
}

/// Initial simplex sizes, as fractions of each bound width, cycled over restarts.
const RESTART_SCALES: [f64; 3] = [0.05, 0.25, 0.5];

/// Least-squares fit of the unknown SNR parameters, started from `prev`.
///
/// Known parameters are never changed. If the optimizer fails or ends with
/// a worse loss than `prev`, `prev` is returned.
pub fn fit_snr(samples: &[(Position, f64)], prev: &SnrParams, domain: &Domain, settings: &FitSettings) -> SnrParams {
    let start = prev.unknowns();
    if start.is_empty() || samples.is_empty() {
        return *prev;
    }
    let (lower, upper) = settings.bounds(prev.known, domain);
    let mut nm = NelderMeadSettings::new(lower, upper).with_tolerances(settings.f_tol, settings.x_tol);
    nm.max_iter = settings.max_iter;
    nm.max_evals = settings.max_evals;
    let objective = |w: &[f64]| snr_loss(samples, &prev.with_unknowns(w));
    let mut best = *prev;
    let mut best_loss = snr_loss(samples, prev);
    let mut point = start;
    let widths: Vec<f64> = nm.upper.iter().zip(&nm.lower).map(|(u, l)| u - l).collect();
    let mut stale = 0;
    for round in 0..=settings.restarts {
        let scale = RESTART_SCALES[round % RESTART_SCALES.len()];
        nm.initial_step = Some(widths.iter().map(|w| scale * w).collect());
        match nelder_mead(objective, &point, &nm) {
            Ok(min) if min.value.is_finite() && min.value < best_loss => {
                best = prev.with_unknowns(&min.point);
                best_loss = min.value;
                point = min.point;
                stale = 0;
            }
            Ok(_) => {
                stale += 1;
                if stale == RESTART_SCALES.len() {
                    break;
                }
            }
            Err(_) => break,
        }
    }
    best
}

/// Distinct positions reachable in one step, in action order.
pub fn reachable_set(state: &RobotState, scenario: &Scenario) -> Result<Vec<(usize, Position)>> {
    let mut out: Vec<(usize, Position)> = Vec::with_capacity(scenario.actions.len());
    for (i, a) in scenario.actions.iter().enumerate() {
        let p = scenario.motion_step(state, a)?.position;
        if !out.iter().any(|(_, q)| q.distance(p) < 1e-9) {
            out.push((i, p));
        }
    }
    Ok(out)
}

/// What the planner asks the robot to do next.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Heading(f64),
    Hold,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplorationScores {
    pub d_inf: Vec<f64>,
    pub d_ctl: Vec<f64>,
}

/// Informativeness and control deviation of each candidate.
///
/// `d_inf(p⁺) = min_j ‖p_j − p⁺‖ · |S_j − Ŝ(p⁺)|`; `d_ctl` is the shortest
/// arc between the planned heading and the bearing of `p⁺`. A candidate equal
/// to the current position has no bearing: its `d_ctl` is 0 when the target
/// is to hold and π otherwise, and moving candidates get π when holding.
pub fn exploration_scores(
    from: Position,
    candidates: &[Position],
    samples: &[(Position, f64)],
    params: &SnrParams,
    target: Target,
) -> ExplorationScores {
    let mut d_inf = Vec::with_capacity(candidates.len());
    let mut d_ctl = Vec::with_capacity(candidates.len());
    for &c in candidates {
        let predicted = params.snr(c);
        let inf = samples.iter().map(|(p, s)| p.distance(c) * (s - predicted).abs()).fold(f64::INFINITY, f64::min);
        d_inf.push(if inf.is_finite() { inf } else { 0.0 });
        let stays = c.distance(from) < 1e-12;
        d_ctl.push(match (target, stays) {
            (Target::Hold, true) => 0.0,
            (Target::Hold, false) | (Target::Heading(_), true) => std::f64::consts::PI,
            (Target::Heading(alpha), false) => angular_distance(alpha, from.bearing_to(c)),
        });
    }
    ExplorationScores { d_inf, d_ctl }
}

/// Floor on `d_ctl` in the exploration ratio.
pub const EPS_ANGLE: f64 = 1e-3;

/// Index maximizing `d_inf / max(d_ctl, ε)`; ties go to the smaller `d_ctl`,
/// then to the earlier candidate.
pub fn choose_next(scores: &ExplorationScores) -> usize {
    let mut best = 0;
    let mut best_key = (f64::NEG_INFINITY, f64::INFINITY);
    for (i, (inf, ctl)) in scores.d_inf.iter().zip(&scores.d_ctl).enumerate() {
        let ratio = inf / ctl.max(EPS_ANGLE);
        if ratio > best_key.0 || (ratio == best_key.0 && *ctl < best_key.1) {
            best = i;
            best_key = (ratio, *ctl);
        }
    }
    best
}

/// Index of the candidate closest in direction to the plan.
pub fn choose_exploit(scores: &ExplorationScores) -> usize {
    let mut best = 0;
    for (i, ctl) in scores.d_ctl.iter().enumerate() {
        if *ctl < scores.d_ctl[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn truth() -> Antenna {
        Antenna { position: Position::new(100.0, 30.0), k: 1e4, h: 1.0, gamma: 2.0, r0: 0.753 }
    }

    fn domain() -> Domain {
        Domain::new([0.0, 200.0], [0.0, 200.0])
    }

    #[test]
    fn known_parameters_are_left_alone() {
        let p = SnrParams::from_antenna(&truth(), KnownParams::ALL);
        let samples = vec![(Position::new(1.0, 2.0), 3.0)];
        assert_eq!(fit_snr(&samples, &p, &domain(), &FitSettings::default()), p);
    }

    #[test]
    fn single_sample_is_interpolated() {
        let p = SnrParams::initial_guess(&truth(), KnownParams::NONE);
        let samples = vec![(Position::new(50.0, 50.0), 20.0)];
        let fit = fit_snr(&samples, &p, &domain(), &FitSettings::tight());
        assert!(snr_loss(&samples, &fit) < 1e-8);
    }

    #[test]
    fn refit_does_not_increase_loss() {
        let t = truth();
        let samples: Vec<_> = [(10.0, 20.0), (60.0, 80.0), (150.0, 40.0)]
            .iter()
            .map(|&(x, y)| {
                let p = Position::new(x, y);
                (p, 1.1 * t.snr(p))
            })
            .collect();
        let first = fit_snr(
            &samples,
            &SnrParams::initial_guess(&t, KnownParams::POSITION_AND_OFFSET),
            &domain(),
            &FitSettings::default(),
        );
        let second = fit_snr(&samples, &first, &domain(), &FitSettings::default());
        assert!(snr_loss(&samples, &second) <= snr_loss(&samples, &first));
    }

    #[test]
    fn wraparound_control_distance() {
        let from = Position::new(0.0, 0.0);
        let c = Position::new((7.0 * PI / 4.0).cos(), (7.0 * PI / 4.0).sin());
        let p = SnrParams::from_antenna(&truth(), KnownParams::ALL);
        let s = exploration_scores(from, &[c], &[(from, 1.0)], &p, Target::Heading(0.0));
        assert!((s.d_ctl[0] - PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn single_sample_informativeness() {
        let p = SnrParams::from_antenna(&truth(), KnownParams::ALL);
        let (p1, s1) = (Position::new(10.0, 10.0), 7.0);
        let c = Position::new(13.0, 14.0);
        let s = exploration_scores(p1, &[c, p1], &[(p1, s1)], &p, Target::Heading(0.0));
        assert!((s.d_inf[0] - 5.0 * (s1 - p.snr(c)).abs()).abs() < 1e-12);
        assert_eq!(s.d_inf[1], 0.0);
    }

    #[test]
    fn choice_rules() {
        let one = ExplorationScores { d_inf: vec![0.0], d_ctl: vec![1.0] };
        assert_eq!(choose_next(&one), 0);
        let aligned = ExplorationScores { d_inf: vec![1.0, 1.0, 1.0], d_ctl: vec![0.5, 0.0, 0.2] };
        assert_eq!(choose_next(&aligned), 1);
        let equal = ExplorationScores { d_inf: vec![2.0, 2.0, 2.0], d_ctl: vec![0.7, 0.3, 0.5] };
        assert_eq!(choose_next(&equal), 1);
        let zeros = ExplorationScores { d_inf: vec![0.0, 0.0], d_ctl: vec![0.7, 0.3] };
        assert_eq!(choose_next(&zeros), 1);
        assert_eq!(choose_exploit(&equal), 1);
    }
}
