use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Sample mean and the half-width of its two-sided 95% Student-t interval.
///
/// The half-width is 0 for a single sample or identical samples.
pub fn confidence_interval(samples: &[f64]) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::config("confidence interval of an empty sample"));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() == 1 || samples.iter().all(|&x| x == samples[0]) {
        return Ok((mean, 0.0));
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let t = StudentsT::new(0.0, 1.0, n - 1.0).map_err(|e| Error::config(e.to_string()))?.inverse_cdf(0.975);
    Ok((mean, t * (var / n).sqrt()))
}

/// Steps statistics of one configuration.
///
/// Means are taken over runs that terminated; capped runs are only counted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub runs: usize,
    pub completed: usize,
    pub capped: usize,
    /// Runs with at least one collision.
    pub collided: usize,
    pub mean_steps: Option<f64>,
    pub ci_half_width: Option<f64>,
}

impl StatsSummary {
    /// `steps` of every run together with whether it terminated and whether
    /// it collided.
    pub fn from_runs(runs: &[(usize, bool, bool)]) -> Result<Self> {
        let done: Vec<f64> = runs.iter().filter(|r| r.1).map(|r| r.0 as f64).collect();
        let (mean, half) = if done.is_empty() {
            (None, None)
        } else {
            let (m, h) = confidence_interval(&done)?;
            (Some(m), Some(h))
        };
        Ok(StatsSummary {
            runs: runs.len(),
            completed: done.len(),
            capped: runs.len() - done.len(),
            collided: runs.iter().filter(|r| r.2).count(),
            mean_steps: mean,
            ci_half_width: half,
        })
    }
}
