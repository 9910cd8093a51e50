//! Multilinear (finite-element) interpolation of a value function over a
//! rectangular grid, `V̂(x; θ) = φ(x)ᵀθ`, plus the local subgrids used by the
//! online DP sweeps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-dimension sorted grid points and one parameter per grid node.
///
/// Nodes are stored in row-major order with the last dimension varying
/// fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueGrid {
    axes: Vec<Vec<f64>>,
    strides: Vec<usize>,
    pub theta: Vec<f64>,
}

/// Inclusive per-dimension index ranges of a local subgrid (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgrid {
    pub ranges: Vec<(usize, usize)>,
}

impl Subgrid {
    pub fn len(&self) -> usize {
        self.ranges.iter().map(|(lo, hi)| hi - lo + 1).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl ValueGrid {
    pub fn new(axes: Vec<Vec<f64>>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::config("value grid needs at least one dimension"));
        }
        for axis in &axes {
            if axis.is_empty() || !axis.windows(2).all(|w| w[0] < w[1]) || axis.iter().any(|v| !v.is_finite()) {
                return Err(Error::config("grid axes must be nonempty, finite and strictly increasing"));
            }
        }
        let mut strides = vec![1; axes.len()];
        for m in (0..axes.len() - 1).rev() {
            strides[m] = strides[m + 1] * axes[m + 1].len();
        }
        let n = strides[0] * axes[0].len();
        Ok(ValueGrid { axes, strides, theta: vec![0.0; n] })
    }

    /// Evenly spaced axis with `n` points on `[lo, hi]`.
    pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![lo];
        }
        (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect()
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn flat_index(&self, index: &[usize]) -> usize {
        index.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        self.strides
            .iter()
            .map(|s| {
                let i = flat / s;
                flat %= s;
                i
            })
            .collect()
    }

    /// Coordinates of node `flat`.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat).into_iter().zip(&self.axes).map(|(i, axis)| axis[i]).collect()
    }

    /// Lower cell index and weight of the upper neighbor along one axis,
    /// after clamping `v` into the axis range.
    fn locate(axis: &[f64], v: f64) -> (usize, f64) {
        let last = axis.len() - 1;
        if last == 0 || v <= axis[0] {
            return (0, 0.0);
        }
        if v >= axis[last] {
            return (last - 1, 1.0);
        }
        let i = axis.partition_point(|a| *a <= v) - 1;
        (i, (v - axis[i]) / (axis[i + 1] - axis[i]))
    }

    /// Nonzero interpolation weights `φ_i(x)` as `(node, weight)` pairs.
    ///
    /// At most `2^d` entries; weights are nonnegative and sum to one.
    pub fn weights(&self, x: &[f64]) -> Vec<(usize, f64)> {
        let mut out = Vec::with_capacity(1 << self.dims());
        self.for_each_weight(x, |i, w| out.push((i, w)));
        out
    }

    fn for_each_weight<F: FnMut(usize, f64)>(&self, x: &[f64], mut visit: F) {
        debug_assert_eq!(x.len(), self.dims());
        let mut base = 0;
        let mut fracs = [0.0f64; 8];
        let mut steps = [0usize; 8];
        let mut n_live = 0;
        for (m, (axis, &xm)) in self.axes.iter().zip(x).enumerate() {
            let (i, t) = Self::locate(axis, xm);
            base += i * self.strides[m];
            if t > 0.0 {
                if t >= 1.0 {
                    base += self.strides[m];
                } else {
                    if n_live == 8 {
                        unreachable!("more than 8 fractional dimensions");
                    }
                    fracs[n_live] = t;
                    steps[n_live] = self.strides[m];
                    n_live += 1;
                }
            }
        }
        for corner in 0..(1usize << n_live) {
            let mut w = 1.0;
            let mut idx = base;
            for k in 0..n_live {
                if corner >> k & 1 == 1 {
                    w *= fracs[k];
                    idx += steps[k];
                } else {
                    w *= 1.0 - fracs[k];
                }
            }
            if w > 0.0 {
                visit(idx, w);
            }
        }
    }

    /// `V̂(x; θ)` with the query clamped into the grid box.
    pub fn interpolate(&self, x: &[f64]) -> f64 {
        self.interpolate_with(&self.theta, x)
    }

    /// Interpolates an arbitrary parameter vector laid out on this grid.
    pub fn interpolate_with(&self, theta: &[f64], x: &[f64]) -> f64 {
        let mut v = 0.0;
        self.for_each_weight(x, |i, w| v += w * theta[i]);
        v
    }

    /// Subgrid of `radius` nodes to either side of the node just below `x`.
    ///
    /// The center on each axis is the largest index `i` with `axis[i] ≤ x`
    /// (the first node when `x` is below the axis).
    pub fn select_subgrid(&self, x: &[f64], radius: usize) -> Subgrid {
        let ranges = self
            .axes
            .iter()
            .zip(x)
            .map(|(axis, v)| {
                let center = axis.partition_point(|a| *a <= *v).saturating_sub(1);
                let lo = center.saturating_sub(radius);
                let hi = (center + radius).min(axis.len() - 1);
                (lo, hi)
            })
            .collect();
        Subgrid { ranges }
    }

    /// Flat indices of all nodes in `sub`, in row-major order.
    pub fn subgrid_nodes(&self, sub: &Subgrid) -> Vec<usize> {
        let mut nodes = Vec::with_capacity(sub.len());
        let mut index: Vec<usize> = sub.ranges.iter().map(|r| r.0).collect();
        if sub.ranges.iter().any(|(lo, hi)| lo > hi) {
            return nodes;
        }
        loop {
            nodes.push(self.flat_index(&index));
            let mut m = index.len();
            loop {
                if m == 0 {
                    return nodes;
                }
                m -= 1;
                if index[m] < sub.ranges[m].1 {
                    index[m] += 1;
                    break;
                }
                index[m] = sub.ranges[m].0;
            }
        }
    }

    /// The whole grid as a subgrid.
    pub fn full_subgrid(&self) -> Subgrid {
        Subgrid { ranges: self.axes.iter().map(|a| (0, a.len() - 1)).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid3() -> ValueGrid {
        ValueGrid::new(vec![
            ValueGrid::linspace(0.0, 10.0, 6),
            ValueGrid::linspace(0.0, 4.0, 3),
            ValueGrid::linspace(0.0, 1.0, 4),
        ])
        .unwrap()
    }

    #[test]
    fn node_values_are_reproduced() {
        let mut g = grid3();
        for (i, t) in g.theta.iter_mut().enumerate() {
            *t = i as f64 * 0.5 - 3.0;
        }
        for i in 0..g.len() {
            assert_eq!(g.interpolate(&g.point(i)), g.theta[i]);
        }
    }

    #[test]
    fn midpoint_in_one_dimension() {
        let mut g = ValueGrid::new(vec![vec![0.0, 1.0]]).unwrap();
        g.theta = vec![2.0, 4.0];
        assert_eq!(g.interpolate(&[0.5]), 3.0);
    }

    #[test]
    fn constant_is_reproduced() {
        let mut g = grid3();
        g.theta.iter_mut().for_each(|t| *t = 7.25);
        for x in [[0.3, 1.7, 0.2], [9.9, 0.0, 1.0], [-5.0, 8.0, 0.5]] {
            assert!((g.interpolate(&x) - 7.25).abs() < 1e-12);
        }
    }

    #[test]
    fn subgrid_rule_examples() {
        let axis = ValueGrid::linspace(0.0, 30.0, 31);
        let g = ValueGrid::new(vec![axis]).unwrap();
        // between points 3 and 4 (1-based) -> indices 1..5 (1-based)
        assert_eq!(g.select_subgrid(&[2.5], 2).ranges, vec![(0, 4)]);
        assert_eq!(g.select_subgrid(&[-1.0], 2).ranges, vec![(0, 2)]);
        assert_eq!(g.select_subgrid(&[30.0], 2).ranges, vec![(28, 30)]);
        assert_eq!(g.select_subgrid(&[99.0], 2).ranges, vec![(28, 30)]);
    }

    #[test]
    fn subgrid_enumeration_matches_cardinality() {
        let g = grid3();
        let sub = g.select_subgrid(&[5.0, 2.0, 0.5], 1);
        let nodes = g.subgrid_nodes(&sub);
        assert_eq!(nodes.len(), sub.len());
        let full = g.subgrid_nodes(&g.full_subgrid());
        assert_eq!(full, (0..g.len()).collect::<Vec<_>>());
    }
}
