//! Known-rate minimum-time planner for reaching a goal with an empty buffer.
//!
//! Time is measured at the maximal speed, so a path of length `L` takes
//! `L / speed` seconds and transmits `∫ R ds / speed` Mbit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numopt::{bisect, integrate_01, nelder_mead, NelderMeadSettings};
use crate::world::{Antenna, Position};

const QUAD_TOL: f64 = 1e-10;

/// Radial rate law around one antenna, as seen by a robot moving at `speed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialModel {
    pub antenna: Antenna,
    pub speed: f64,
}

impl RadialModel {
    pub fn new(antenna: Antenna, speed: f64) -> Result<Self> {
        if !(speed > 0.0 && speed.is_finite()) {
            return Err(Error::config("planner speed must be positive"));
        }
        Ok(RadialModel { antenna, speed })
    }

    /// Rate in Mbit/s at distance `d` from the antenna.
    pub fn rate(&self, d: f64) -> f64 {
        self.antenna.rate_at_distance(d)
    }

    /// Buffer transmitted per unit of path length at distance `d`.
    pub fn per_length(&self, d: f64) -> f64 {
        self.rate(d) / self.speed
    }

    /// Buffer transmitted while traversing `q0 → q1` at full speed.
    pub fn segment(&self, q0: Position, q1: Position) -> f64 {
        let ant = self.antenna.position;
        segment_buffer(q0, q1, |d| self.per_length(d), ant)
    }

    /// Buffer transmitted along a polyline.
    pub fn polyline(&self, points: &[Position]) -> f64 {
        points.windows(2).map(|w| self.segment(w[0], w[1])).sum()
    }
}

/// `‖q1 − q0‖ · ∫₀¹ c(‖q0 − p_ant + s (q1 − q0)‖) ds`.
///
/// `c` maps a distance to the antenna to buffer per unit length.
pub fn segment_buffer(q0: Position, q1: Position, c: impl Fn(f64) -> f64, antenna: Position) -> f64 {
    let len = q0.distance(q1);
    if len == 0.0 {
        return 0.0;
    }
    let delta = q1 - q0;
    let rel = q0 - antenna;
    // the integrand is smooth, finite and nonnegative; integration cannot fail
    let integral = integrate_01(|s| c((rel + delta * s).norm()), QUAD_TOL).unwrap_or(f64::NAN);
    len * integral
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanCase {
    /// The straight path already transmits the buffer.
    Small,
    /// Go to the antenna, wait, then go to the goal.
    Large,
    /// A detour bending toward the antenna without reaching it.
    Intermediate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub case: PlanCase,
    /// Minimal time in seconds.
    pub time: f64,
    /// Initial heading; `None` when the robot should hold its position
    /// (it sits on the antenna and must wait, or it is already at the goal).
    pub heading: Option<f64>,
    /// Wait at the antenna in seconds (large case only, else 0).
    pub wait: f64,
    /// Path vertices from the start to the goal.
    pub path: Vec<Position>,
}

impl PlanResult {
    pub fn length(&self) -> f64 {
        path_length(&self.path)
    }
}

/// How the intermediate case is solved.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannerSettings {
    /// Interior waypoints of the refined polyline; 0 keeps the one-bend path.
    pub waypoints: usize,
    /// Penalty weight on the transmission deficit, in units of the distance
    /// needed to transmit it at the antenna.
    pub penalty: f64,
    pub optimizer: NelderMeadSettings,
}

impl Default for PlannerSettings {
    fn default() -> Self {
        let m = 8;
        PlannerSettings {
            waypoints: m,
            penalty: 10.0,
            optimizer: NelderMeadSettings::new(vec![0.0; 2 * m], vec![1.0; 2 * m]).with_tolerances(1e-6, 1e-6),
        }
    }
}

impl PlannerSettings {
    /// The one-bend path only; fast and exactly monotone in the buffer.
    pub fn single_bend() -> Self {
        PlannerSettings { waypoints: 0, ..Self::default() }
    }
}

pub fn path_length(points: &[Position]) -> f64 {
    points.windows(2).map(|w| w[0].distance(w[1])).sum()
}

/// Minimum-time plan from `p0` with buffer `b0` to `goal`.
///
/// Thresholds: with `b0 ≤ B(p0, p*)` the straight line suffices; with
/// `b0 ≥ B(p0, p_ant) + B(p_ant, p*)` the robot visits the antenna and waits
/// for the deficit divided by the peak rate. In between, the bend point
/// `q(λ) = f + λ (p_ant − f)`, with `f` the point of segment `p0 p*` closest
/// to the antenna, is moved toward the antenna until the path `p0 → q → p*`
/// transmits `b0`; that one-bend path can then be refined by
/// [`nelder_mead`] over waypoints inside the triangle `(p0, p_ant, p*)`.
pub fn plan_time_optimal(
    p0: Position,
    b0: f64,
    goal: Position,
    model: &RadialModel,
    settings: &PlannerSettings,
) -> Result<PlanResult> {
    if !(b0 >= 0.0) || !b0.is_finite() {
        return Err(Error::config(format!("initial buffer must be finite and nonnegative, got {b0}")));
    }
    if !p0.is_finite() || !goal.is_finite() {
        return Err(Error::NonFiniteStart);
    }
    let ant = model.antenna.position;
    let v = model.speed;
    let straight = model.segment(p0, goal);
    if b0 <= straight {
        return Ok(PlanResult {
            case: PlanCase::Small,
            time: p0.distance(goal) / v,
            heading: heading(p0, goal),
            wait: 0.0,
            path: vec![p0, goal],
        });
    }
    let via = model.segment(p0, ant) + model.segment(ant, goal);
    if b0 >= via {
        let wait = (b0 - via) / model.rate(0.0);
        let first = if p0 == ant { goal } else { ant };
        let heading = if wait > 0.0 && p0 == ant { None } else { heading(p0, first) };
        return Ok(PlanResult {
            case: PlanCase::Large,
            time: (p0.distance(ant) + ant.distance(goal)) / v + wait,
            heading,
            wait,
            path: vec![p0, ant, goal],
        });
    }

    let foot = closest_on_segment(p0, goal, ant);
    let bend = |lambda: f64| foot + (ant - foot) * lambda;
    let sent = |lambda: f64| {
        let q = bend(lambda);
        model.segment(p0, q) + model.segment(q, goal)
    };
    let lambda = first_crossing(|l| sent(l) - b0)?;
    let mut path = vec![p0, bend(lambda), goal];
    // a bend on the segment itself means the path is the straight line
    path.dedup_by(|a, b| a.distance(*b) < 1e-12);

    if settings.waypoints > 0 {
        if let Some(refined) = refine(&path, b0, p0, ant, goal, model, settings) {
            if path_length(&refined) < path_length(&path) {
                path = refined;
            }
        }
    }
    let first = path.iter().copied().find(|q| q.distance(p0) > 1e-12).unwrap_or(goal);
    Ok(PlanResult {
        case: PlanCase::Intermediate,
        time: path_length(&path) / v,
        heading: heading(p0, first),
        wait: 0.0,
        path,
    })
}

fn heading(from: Position, to: Position) -> Option<f64> {
    (from != to).then(|| from.bearing_to(to))
}

pub(crate) fn closest_on_segment(a: Position, b: Position, p: Position) -> Position {
    let d = b - a;
    let len2 = d.dot(d);
    if len2 == 0.0 {
        return a;
    }
    a + d * ((p - a).dot(d) / len2).clamp(0.0, 1.0)
}

/// Smallest `λ ∈ [0, 1]` with `g(λ) ≥ 0`, given `g(0) < 0 ≤ g(1)`: scan a
/// uniform grid for the first sign change, then bisect inside it.
fn first_crossing(g: impl Fn(f64) -> f64) -> Result<f64> {
    const SCAN: usize = 32;
    let mut lo = 0.0;
    for i in 1..=SCAN {
        let hi = i as f64 / SCAN as f64;
        if g(hi) >= 0.0 {
            return bisect(&g, lo, hi, 1e-13);
        }
        lo = hi;
    }
    // g(1) ≥ 0 up to quadrature noise
    Ok(1.0)
}

/// Point of the triangle `(a, apex, c)` for box coordinates `(u, w)`: `u`
/// slides along the base `a → c`, `w` moves from the base toward the apex.
fn triangle_point(a: Position, apex: Position, c: Position, u: f64, w: f64) -> Position {
    let base = a.lerp(c, u);
    base.lerp(apex, w)
}

/// Inverse of [`triangle_point`] for points inside a nondegenerate triangle.
fn triangle_coords(a: Position, apex: Position, c: Position, q: Position) -> Option<(f64, f64)> {
    let e1 = c - a;
    let e2 = apex - a;
    let det = e1.x * e2.y - e1.y * e2.x;
    if det.abs() < 1e-9 * e1.norm().max(1e-300) * e2.norm().max(1e-300) {
        return None;
    }
    let r = q - a;
    // q = a + β_c e1 + β_apex e2
    let beta_c = (r.x * e2.y - r.y * e2.x) / det;
    let beta_apex = (e1.x * r.y - e1.y * r.x) / det;
    let w = beta_apex.clamp(0.0, 1.0);
    let u = if w < 1.0 { (beta_c / (1.0 - w)).clamp(0.0, 1.0) } else { 0.5 };
    Some((u, w))
}

fn point_along(path: &[Position], t: f64) -> Position {
    let total = path_length(path);
    let mut remaining = t * total;
    for w in path.windows(2) {
        let len = w[0].distance(w[1]);
        if remaining <= len && len > 0.0 {
            return w[0].lerp(w[1], remaining / len);
        }
        remaining -= len;
    }
    *path.last().expect("nonempty path")
}

/// Shortens a feasible polyline with waypoints restricted to the triangle,
/// then restores feasibility by blending back toward the starting path.
fn refine(
    start: &[Position],
    b0: f64,
    p0: Position,
    ant: Position,
    goal: Position,
    model: &RadialModel,
    settings: &PlannerSettings,
) -> Option<Vec<Position>> {
    let m = settings.waypoints;
    let seed: Vec<Position> = (1..=m).map(|i| point_along(start, i as f64 / (m + 1) as f64)).collect();
    let mut x0 = Vec::with_capacity(2 * m);
    for q in &seed {
        let (u, w) = triangle_coords(p0, ant, goal, *q)?;
        x0.push(u);
        x0.push(w);
    }
    let decode = |x: &[f64]| -> Vec<Position> {
        let mut pts = Vec::with_capacity(m + 2);
        pts.push(p0);
        pts.extend(x.chunks(2).map(|c| triangle_point(p0, ant, goal, c[0], c[1])));
        pts.push(goal);
        pts
    };
    let peak = model.per_length(0.0);
    let objective = |x: &[f64]| {
        let pts = decode(x);
        let deficit = (b0 - model.polyline(&pts)).max(0.0);
        path_length(&pts) + settings.penalty * deficit / peak
    };
    let mut opt = settings.optimizer.clone();
    opt.lower = vec![0.0; 2 * m];
    opt.upper = vec![1.0; 2 * m];
    let best = nelder_mead(objective, &x0, &opt).ok()?;
    let refined = decode(&best.point);
    let base = decode(&x0);
    let blend = |t: f64| -> Vec<Position> { base.iter().zip(&refined).map(|(a, b)| a.lerp(*b, t)).collect() };
    let slack = |t: f64| model.polyline(&blend(t)) - b0;
    if slack(1.0) >= 0.0 {
        return Some(refined);
    }
    if slack(0.0) < 0.0 {
        return None;
    }
    // largest feasible blend: slack(0) ≥ 0 > slack(1)
    let t = bisect(|t| -slack(t), 0.0, 1.0, 1e-12).ok()?;
    let mut t = t;
    while t > 0.0 && slack(t) < 0.0 {
        t = (t - 1e-9).max(0.0);
    }
    Some(blend(t))
}
