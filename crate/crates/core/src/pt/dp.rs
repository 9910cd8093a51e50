use rayon::prelude::*;

use super::{DpConfig, ObstacleKnowledge, Optimism};
use crate::error::{Error, Result};
use crate::gridfn::{Subgrid, ValueGrid};
use crate::world::{Obstacle, Position, RobotState, Scenario};

/// Stage reward: `−o` if the next position is inside an (enlarged)
/// obstacle, otherwise `−1` while the current buffer is nonempty and `0`
/// once it is empty.
pub fn reward(buffer: f64, next: Position, scenario: &Scenario) -> f64 {
    reward_with(buffer, next, &scenario.obstacles, scenario.obstacle_penalty)
}

fn reward_with(buffer: f64, next: Position, obstacles: &[Obstacle], penalty: f64) -> f64 {
    if obstacles.iter().any(|o| o.contains(next)) {
        -penalty
    } else if buffer > 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Initial parameters that do not underestimate the optimal values.
///
/// With a known maximal rate `R̄`, node `i` starts at `−b_i / (T_s R̄)` (or
/// `−b_i / R̄` under [`Optimism::Literal`]); otherwise at zero.
pub fn optimistic_init(grid: &ValueGrid, scenario: &Scenario, config: &DpConfig) -> Vec<f64> {
    let Some(rate_max) = config.rate_max else {
        return vec![0.0; grid.len()];
    };
    let scale = match config.optimism {
        Optimism::StepScaled => scenario.sample_period * rate_max,
        Optimism::Literal => rate_max,
    };
    let buffers = grid.axes().last().expect("grid has a buffer axis");
    (0..grid.len())
        .map(|i| {
            let b = buffers[i % buffers.len()];
            if b == 0.0 {
                0.0
            } else {
                -b / scale
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpReport {
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Bellman backups on a `(p1, p2, b)` grid.
struct Sweeper<'a> {
    grid: &'a ValueGrid,
    scenario: &'a Scenario,
    moves: Vec<(f64, f64)>,
    obstacles: Vec<Obstacle>,
}

impl<'a> Sweeper<'a> {
    fn new(grid: &'a ValueGrid, scenario: &'a Scenario) -> Result<Self> {
        if grid.dims() != 3 {
            return Err(Error::config("transmission grids have exactly three dimensions (p1, p2, b)"));
        }
        let ts = scenario.sample_period;
        let moves = scenario
            .actions
            .iter()
            .map(|a| (ts * a.velocity * a.heading.cos(), ts * a.velocity * a.heading.sin()))
            .collect();
        Ok(Sweeper { grid, scenario, moves, obstacles: scenario.obstacles.clone() })
    }

    /// Restricts the obstacle list to those meeting the box reachable from
    /// the given position range.
    fn sense(&mut self, lo: Position, hi: Position) {
        let reach = self.moves.iter().map(|(dx, dy)| dx.hypot(*dy)).fold(0.0, f64::max);
        let lo = lo - Position::new(reach, reach);
        let hi = hi + Position::new(reach, reach);
        self.obstacles = self.scenario.obstacles.iter().filter(|o| o.intersects_box(lo, hi)).copied().collect();
    }

    fn next_position(&self, p: Position, m: usize) -> Position {
        let (dx, dy) = self.moves[m];
        self.scenario.domain.saturate(Position::new(p.x + dx, p.y + dy))
    }

    /// `(best value, first maximizing action)` of the one-step lookahead.
    fn lookahead(&self, theta: &[f64], p: Position, b: f64, rate: f64) -> (f64, usize) {
        let next_b = (b - self.scenario.sample_period * rate).max(0.0);
        let mut best = (f64::NEG_INFINITY, 0);
        for m in 0..self.moves.len() {
            let q = self.next_position(p, m);
            let rho = reward_with(b, q, &self.obstacles, self.scenario.obstacle_penalty);
            let v = rho + self.grid.interpolate_with(theta, &[q.x, q.y, next_b]);
            if v > best.0 {
                best = (v, m);
            }
        }
        best
    }

    /// One Jacobi sweep over `nodes`; `rates[j]` is the rate at the position
    /// of `nodes[j]`. Returns the largest parameter change.
    fn sweep(&self, theta: &mut [f64], nodes: &[usize], rates: &[f64]) -> f64 {
        let axes = self.grid.axes();
        let (ny, nb) = (axes[1].len(), axes[2].len());
        let old: &[f64] = theta;
        let updated: Vec<f64> = nodes
            .par_iter()
            .zip(rates)
            .map(|(&i, &r)| {
                let ib = i % nb;
                let iy = (i / nb) % ny;
                let ix = i / (nb * ny);
                let p = Position::new(axes[0][ix], axes[1][iy]);
                self.lookahead(old, p, axes[2][ib], r).0
            })
            .collect();
        let mut residual: f64 = 0.0;
        for (&i, v) in nodes.iter().zip(updated) {
            residual = residual.max((v - theta[i]).abs());
            theta[i] = v;
        }
        residual
    }

    /// Rate at each node's position, evaluated once per distinct position.
    fn node_rates<F: Fn(Position) -> f64>(&self, nodes: &[usize], rate_fn: F) -> Result<Vec<f64>> {
        let axes = self.grid.axes();
        let (ny, nb) = (axes[1].len(), axes[2].len());
        let mut cache: Vec<Option<f64>> = vec![None; axes[0].len() * ny];
        nodes
            .iter()
            .map(|&i| {
                let pn = i / nb;
                if let Some(r) = cache[pn] {
                    return Ok(r);
                }
                let p = Position::new(axes[0][pn / ny], axes[1][pn % ny]);
                let r = rate_fn(p);
                if !r.is_finite() {
                    return Err(Error::Model { x: p.x, y: p.y });
                }
                cache[pn] = Some(r);
                Ok(r)
            })
            .collect()
    }
}

/// Approximate value iteration over every grid node until the parameter
/// change drops to `config.tolerance` or the iteration cap is reached.
/// Starts from the parameters already stored in `grid`.
pub fn dp_full<F>(grid: &mut ValueGrid, scenario: &Scenario, rate_fn: F, config: &DpConfig) -> Result<DpReport>
where
    F: Fn(Position) -> f64,
{
    let cap = config.iteration_cap(scenario.buffer_max, scenario.sample_period);
    let nodes: Vec<usize> = (0..grid.len()).collect();
    let mut theta = std::mem::take(&mut grid.theta);
    let result = (|| {
        let sweeper = Sweeper::new(grid, scenario)?;
        let rates = sweeper.node_rates(&nodes, &rate_fn)?;
        let mut report = DpReport { iterations: 0, residual: f64::INFINITY, converged: false };
        while report.iterations < cap {
            report.residual = sweeper.sweep(&mut theta, &nodes, &rates);
            report.iterations += 1;
            if report.residual <= config.tolerance {
                report.converged = true;
                break;
            }
        }
        Ok(report)
    })();
    grid.theta = theta;
    result
}

/// Applies `sweeps` Jacobi backups at the nodes of `subgrid` only; all other
/// parameters are left untouched.
pub fn dp_sweep_local<F>(
    grid: &mut ValueGrid,
    subgrid: &Subgrid,
    scenario: &Scenario,
    rate_fn: F,
    sweeps: usize,
    knowledge: ObstacleKnowledge,
) -> Result<()>
where
    F: Fn(Position) -> f64,
{
    if sweeps == 0 {
        return Ok(());
    }
    let nodes = grid.subgrid_nodes(subgrid);
    let mut theta = std::mem::take(&mut grid.theta);
    let result = (|| {
        let mut sweeper = Sweeper::new(grid, scenario)?;
        if knowledge == ObstacleKnowledge::Sensed {
            let axes = grid.axes();
            let (rx, ry) = (subgrid.ranges[0], subgrid.ranges[1]);
            sweeper.sense(Position::new(axes[0][rx.0], axes[1][ry.0]), Position::new(axes[0][rx.1], axes[1][ry.1]));
        }
        let rates = sweeper.node_rates(&nodes, &rate_fn)?;
        for _ in 0..sweeps {
            sweeper.sweep(&mut theta, &nodes, &rates);
        }
        Ok(())
    })();
    grid.theta = theta;
    result
}

/// Greedy action for `state` given the rate used for the buffer update.
/// Returns the index into the scenario's action set; ties go to the first
/// action in declaration order.
pub fn greedy_action(grid: &ValueGrid, state: &RobotState, rate: f64, scenario: &Scenario) -> Result<usize> {
    greedy_action_with(grid, state, rate, scenario, ObstacleKnowledge::FullMap)
}

pub(crate) fn greedy_action_with(
    grid: &ValueGrid,
    state: &RobotState,
    rate: f64,
    scenario: &Scenario,
    knowledge: ObstacleKnowledge,
) -> Result<usize> {
    let mut sweeper = Sweeper::new(grid, scenario)?;
    if knowledge == ObstacleKnowledge::Sensed {
        sweeper.sense(state.position, state.position);
    }
    Ok(sweeper.lookahead(&grid.theta, state.position, state.buffer, rate).1)
}
