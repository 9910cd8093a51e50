use crate::error::{Error, Result};

/// Stopping rules and box constraints for [`nelder_mead`].
///
/// The defaults are `f_tol = 0.1`, `max_iter = 5000`, `max_evals = 10000`
/// with `x_tol = 1e-4`; a run stops once both the function-value spread and
/// the vertex spread of the simplex fall below their tolerances.
#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadSettings {
    pub f_tol: f64,
    pub x_tol: f64,
    pub max_iter: usize,
    pub max_evals: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Per-coordinate offsets of the initial simplex vertices. When absent,
    /// 5% of the box width is used for bounded coordinates, otherwise 5% of
    /// the start value (0.00025 for zero entries).
    pub initial_step: Option<Vec<f64>>,
}

impl NelderMeadSettings {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        NelderMeadSettings {
            f_tol: 0.1,
            x_tol: 1e-4,
            max_iter: 5000,
            max_evals: 10_000,
            lower,
            upper,
            initial_step: None,
        }
    }

    pub fn unbounded(dim: usize) -> Self {
        Self::new(vec![f64::NEG_INFINITY; dim], vec![f64::INFINITY; dim])
    }

    pub fn with_tolerances(mut self, f_tol: f64, x_tol: f64) -> Self {
        self.f_tol = f_tol;
        self.x_tol = x_tol;
        self
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if self.lower.len() != dim || self.upper.len() != dim {
            return Err(Error::config(format!(
                "bounds have length {}/{} but the start point has {dim} entries",
                self.lower.len(),
                self.upper.len()
            )));
        }
        if self.lower.iter().zip(&self.upper).any(|(lo, hi)| lo > hi) {
            return Err(Error::config("lower bound exceeds upper bound"));
        }
        if !(self.f_tol > 0.0) {
            return Err(Error::config("function tolerance must be positive"));
        }
        Ok(())
    }

    fn clamp(&self, x: &mut [f64]) {
        for ((v, lo), hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(*lo, *hi);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimizes `objective` with the Nelder-Mead simplex method.
///
/// Every trial point is clamped to the box `[lower, upper]`, so the result is
/// always feasible. The start point is a vertex of the initial simplex and the
/// best vertex is returned, hence the returned value never exceeds
/// `objective(start)`. Non-finite values away from the start are treated as
/// `+inf`.
pub fn nelder_mead<F>(mut objective: F, start: &[f64], settings: &NelderMeadSettings) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    settings.validate(n)?;
    let mut x0 = start.to_vec();
    settings.clamp(&mut x0);
    let f0 = objective(&x0);
    if !f0.is_finite() {
        return Err(Error::NonFiniteStart);
    }
    let mut evals = 1usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = objective(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.clone(), f0));
    for i in 0..n {
        let mut step = match &settings.initial_step {
            Some(steps) => steps[i],
            None => {
                let width = settings.upper[i] - settings.lower[i];
                if width.is_finite() {
                    0.05 * width
                } else if x0[i] != 0.0 {
                    0.05 * x0[i]
                } else {
                    0.00025
                }
            }
        };
        if x0[i] + step > settings.upper[i] {
            step = -step;
        }
        let mut x = x0.clone();
        x[i] += step;
        settings.clamp(&mut x);
        let f = eval(&x, &mut evals);
        simplex.push((x, f));
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iterations = 0;
    let mut converged = false;
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &simplex[0];
        let f_spread = simplex.iter().map(|v| (v.1 - best.1).abs()).fold(0.0, f64::max);
        let x_spread =
            simplex.iter().flat_map(|v| v.0.iter().zip(&best.0).map(|(a, b)| (a - b).abs())).fold(0.0, f64::max);
        if f_spread <= settings.f_tol && x_spread <= settings.x_tol {
            converged = true;
            break;
        }
        if iterations >= settings.max_iter || evals >= settings.max_evals {
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let worst_f = simplex[n].1;
        let second_worst_f = simplex[n - 1].1;
        let best_f = simplex[0].1;

        let along = |coef: f64, out: &mut Vec<f64>, worst: &[f64]| {
            for i in 0..n {
                out[i] = centroid[i] + coef * (centroid[i] - worst[i]);
            }
            settings.clamp(out);
        };

        along(alpha, &mut trial, &simplex[n].0);
        let reflected = trial.clone();
        let fr = eval(&reflected, &mut evals);

        if fr < best_f {
            along(gamma, &mut trial, &simplex[n].0);
            let fe = eval(&trial, &mut evals);
            simplex[n] = if fe < fr { (trial.clone(), fe) } else { (reflected, fr) };
            continue;
        }
        if fr < second_worst_f {
            simplex[n] = (reflected, fr);
            continue;
        }
        // contraction, outside when the reflection improved on the worst point
        let outside = fr < worst_f;
        along(if outside { rho } else { -rho }, &mut trial, &simplex[n].0);
        let fc = eval(&trial, &mut evals);
        if (outside && fc <= fr) || (!outside && fc < worst_f) {
            simplex[n] = (trial.clone(), fc);
            continue;
        }
        let x_best = simplex[0].0.clone();
        for v in simplex.iter_mut().skip(1) {
            for (vi, bi) in v.0.iter_mut().zip(&x_best) {
                *vi = bi + sigma * (*vi - bi);
            }
            settings.clamp(&mut v.0);
            v.1 = eval(&v.0, &mut evals);
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (point, value) = simplex.swap_remove(0);
    Ok(Minimum { point, value, iterations, evaluations: evals, converged })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tight(lo: f64, hi: f64) -> NelderMeadSettings {
        NelderMeadSettings::new(vec![lo; 2], vec![hi; 2]).with_tolerances(1e-12, 1e-9)
    }

    #[test]
    fn quadratic_minimum() {
        let f = |w: &[f64]| (w[0] - 3.0).powi(2) + (w[1] - 4.0).powi(2);
        let m = nelder_mead(f, &[0.0, 0.0], &tight(-10.0, 10.0)).unwrap();
        assert!((m.point[0] - 3.0).abs() < 1e-3 && (m.point[1] - 4.0).abs() < 1e-3, "{m:?}");
        assert!(m.converged);
    }

    #[test]
    fn start_at_minimum_does_not_increase() {
        let f = |w: &[f64]| (w[0] - 3.0).powi(2) + (w[1] - 4.0).powi(2);
        let m = nelder_mead(f, &[3.0, 4.0], &tight(-10.0, 10.0)).unwrap();
        assert!(m.value <= 0.0);
    }

    #[test]
    fn minimum_outside_box_lands_on_boundary() {
        let f = |w: &[f64]| (w[0] - 20.0).powi(2) + w[1].powi(2);
        let m = nelder_mead(f, &[0.0, 0.0], &tight(-10.0, 10.0)).unwrap();
        assert!((m.point[0] - 10.0).abs() < 1e-3, "{m:?}");
        assert!(m.point.iter().all(|v| (-10.0..=10.0).contains(v)));
    }

    #[test]
    fn non_finite_start_is_rejected() {
        let r = nelder_mead(|_| f64::NAN, &[1.0], &NelderMeadSettings::unbounded(1));
        assert!(matches!(r, Err(Error::NonFiniteStart)));
    }

    #[test]
    fn rosenbrock_unbounded() {
        let f = |w: &[f64]| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2);
        let s = NelderMeadSettings::unbounded(2).with_tolerances(1e-14, 1e-10);
        let m = nelder_mead(f, &[-1.2, 1.0], &s).unwrap();
        assert!((m.point[0] - 1.0).abs() < 1e-4 && (m.point[1] - 1.0).abs() < 1e-4, "{m:?}");
    }
}
