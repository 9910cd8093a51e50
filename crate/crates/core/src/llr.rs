//! Sample memory and local linear regression (LLR) of a scalar field over
//! the plane.
//!
//! For a query `p`, the `N` nearest stored samples are fitted with an affine
//! model `αᵀp + β` by least squares. When the neighbor positions are affinely
//! dependent (collinear or coincident) no plane can be fitted and the value
//! of the first nearest neighbor is returned instead.

use crate::error::{Error, Result};
use crate::world::Position;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LlrConfig {
    pub neighbors: usize,
    /// Positions closer than this are treated as the same sample.
    pub dedupe_tol: f64,
    /// Relative singular-value threshold for affine independence.
    pub rank_tol: f64,
}

impl LlrConfig {
    pub fn new(neighbors: usize) -> Self {
        LlrConfig { neighbors: neighbors.max(1), dedupe_tol: 1e-9, rank_tol: 1e-8 }
    }
}

impl Default for LlrConfig {
    fn default() -> Self {
        LlrConfig::new(1)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SampleStore {
    samples: Vec<(Position, f64)>,
}

/// Outcome of a local fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LocalFit {
    Plane {
        gradient: [f64; 2],
        value: f64,
    },
    /// Neighbors were affinely dependent; carries the first neighbor's value.
    Nearest(f64),
}

impl LocalFit {
    pub fn value(&self) -> f64 {
        match *self {
            LocalFit::Plane { value, .. } | LocalFit::Nearest(value) => value,
        }
    }
}

impl SampleStore {
    pub fn new() -> Self {
        SampleStore::default()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[(Position, f64)] {
        &self.samples
    }

    /// Stores a sample, or overwrites the value of an existing sample at
    /// (nearly) the same position.
    pub fn add_sample(&mut self, position: Position, value: f64, config: &LlrConfig) {
        match self.samples.iter_mut().find(|(p, _)| p.distance(position) < config.dedupe_tol) {
            Some(existing) => existing.1 = value,
            None => self.samples.push((position, value)),
        }
    }

    /// Indices of the `n` nearest samples, ties broken by insertion order.
    pub fn nearest(&self, query: Position, n: usize) -> Vec<usize> {
        let mut order: Vec<(f64, usize)> =
            self.samples.iter().enumerate().map(|(i, (p, _))| (p.distance(query), i)).collect();
        let n = n.min(order.len());
        if n == 0 {
            return Vec::new();
        }
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if n < order.len() {
            order.select_nth_unstable_by(n - 1, cmp);
            order.truncate(n);
        }
        order.sort_by(cmp);
        order.into_iter().map(|(_, i)| i).collect()
    }

    pub fn fit(&self, query: Position, config: &LlrConfig) -> Result<LocalFit> {
        if self.samples.is_empty() {
            return Err(Error::EstimatorNotReady);
        }
        let idx = self.nearest(query, config.neighbors);
        let first = self.samples[idx[0]].1;
        if idx.len() < 3 {
            return Ok(LocalFit::Nearest(first));
        }
        let pts: Vec<(Position, f64)> = idx.iter().map(|&i| self.samples[i]).collect();
        if affine_rank(&pts, config.rank_tol) == 2 {
            return Ok(plane_fit(&pts, query));
        }
        // Keep neighbors that raise the affine rank, nearest first. A set
        // whose span is deficient never reaches full rank through a subset,
        // so this only succeeds when the full set was already full rank; it
        // is kept for parity with the documented selection rule.
        let mut kept: Vec<(Position, f64)> = Vec::with_capacity(3);
        for p in &pts {
            let mut trial = kept.clone();
            trial.push(*p);
            if affine_rank(&trial, config.rank_tol) > affine_rank(&kept, config.rank_tol) || kept.is_empty() {
                kept = trial;
            }
            if kept.len() == 3 {
                break;
            }
        }
        if kept.len() == 3 && affine_rank(&kept, config.rank_tol) == 2 {
            return Ok(plane_fit(&kept, query));
        }
        Ok(LocalFit::Nearest(first))
    }

    /// LLR estimate at `query`.
    pub fn estimate(&self, query: Position, config: &LlrConfig) -> Result<f64> {
        self.fit(query, config).map(|f| f.value())
    }

    /// Slope `α` of the local plane, or `None` when no plane can be fitted.
    pub fn estimate_gradient(&self, query: Position, config: &LlrConfig) -> Result<Option<[f64; 2]>> {
        Ok(match self.fit(query, config)? {
            LocalFit::Plane { gradient, .. } => Some(gradient),
            LocalFit::Nearest(_) => None,
        })
    }
}

/// Centered scatter matrix `[sxx, sxy, syy]` and centroid.
fn scatter(pts: &[(Position, f64)]) -> ([f64; 3], Position, f64) {
    let n = pts.len() as f64;
    let (mut cx, mut cy, mut cv) = (0.0, 0.0, 0.0);
    for (p, v) in pts {
        cx += p.x;
        cy += p.y;
        cv += v;
    }
    let c = Position::new(cx / n, cy / n);
    let mut s = [0.0; 3];
    for (p, _) in pts {
        let d = *p - c;
        s[0] += d.x * d.x;
        s[1] += d.x * d.y;
        s[2] += d.y * d.y;
    }
    (s, c, cv / n)
}

/// Affine rank (0, 1 or 2) of a planar point set, from the singular values
/// of the centered coordinate matrix.
fn affine_rank(pts: &[(Position, f64)], rel_tol: f64) -> usize {
    if pts.len() < 2 {
        return 0;
    }
    let (s, _, _) = scatter(pts);
    let tr = s[0] + s[2];
    let det = s[0] * s[2] - s[1] * s[1];
    let disc = (0.25 * (s[0] - s[2]).powi(2) + s[1] * s[1]).sqrt();
    let l_max = 0.5 * tr + disc;
    if !(l_max > 0.0) {
        return 0;
    }
    // smallest eigenvalue computed as det / l_max to avoid cancellation
    let l_min = (det / l_max).max(0.0);
    let (s_max, s_min) = (l_max.sqrt(), l_min.sqrt());
    let scale = pts.iter().map(|(p, _)| p.norm()).fold(0.0, f64::max).max(1.0);
    if s_max <= 1e-12 * scale {
        0
    } else if s_min <= rel_tol * s_max {
        1
    } else {
        2
    }
}

fn plane_fit(pts: &[(Position, f64)], query: Position) -> LocalFit {
    let (s, c, mean_v) = scatter(pts);
    let (mut bx, mut by) = (0.0, 0.0);
    for (p, v) in pts {
        let d = *p - c;
        bx += d.x * (v - mean_v);
        by += d.y * (v - mean_v);
    }
    let det = s[0] * s[2] - s[1] * s[1];
    let gx = (s[2] * bx - s[1] * by) / det;
    let gy = (s[0] * by - s[1] * bx) / det;
    let d = query - c;
    LocalFit::Plane { gradient: [gx, gy], value: mean_v + gx * d.x + gy * d.y }
}
