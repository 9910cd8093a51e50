//! Wireless channel: path-loss SNR, Rician fading and the log-law rate.
//!
//! The expected SNR of a single antenna decays radially,
//! `S(p) = K / (‖p − p_ant‖ + h)^γ`, and the rate is
//! `R0 · log2(1 + z · S(p))`, where `z` is a unit-mean Rice variable. With
//! several antennas the per-antenna rates are summed.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::Position;
use crate::error::{Error, Result};
use crate::numopt;

/// One transmitter with a radial path-loss SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Antenna {
    pub position: Position,
    pub k: f64,
    pub h: f64,
    pub gamma: f64,
    pub r0: f64,
}

impl Antenna {
    pub fn snr(&self, p: Position) -> f64 {
        self.snr_at_distance(p.distance(self.position))
    }

    pub fn snr_at_distance(&self, d: f64) -> f64 {
        self.k / (d + self.h).powf(self.gamma)
    }

    pub fn rate(&self, p: Position, z: f64) -> f64 {
        self.r0 * (z * self.snr(p)).ln_1p() / std::f64::consts::LN_2
    }

    /// Deterministic rate as a function of the distance to the antenna.
    pub fn rate_at_distance(&self, d: f64) -> f64 {
        self.r0 * self.snr_at_distance(d).ln_1p() / std::f64::consts::LN_2
    }

    fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.h > 0.0 && self.gamma > 0.0 && self.r0 > 0.0) {
            return Err(Error::config("antenna parameters K, h, gamma and R0 must be positive"));
        }
        if !self.position.is_finite() {
            return Err(Error::config("antenna position must be finite"));
        }
        Ok(())
    }
}

/// Measured SNR values on a rectangular lattice, bilinearly interpolated.
///
/// `values[j][i]` is the SNR at `(x[i], y[j])`. The rate scale is
/// `r0 · bandwidth_mhz` Mbit/s per unit of `log2(1 + SNR)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrTable {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    #[serde(default = "one")]
    pub r0: f64,
    #[serde(default = "one")]
    pub bandwidth_mhz: f64,
}

fn one() -> f64 {
    1.0
}

impl SnrTable {
    /// Bilinear interpolation; queries outside the lattice clamp to the edge.
    pub fn snr(&self, p: Position) -> f64 {
        let (i, tx) = cell(&self.x, p.x);
        let (j, ty) = cell(&self.y, p.y);
        let v = |jj: usize, ii: usize| self.values[jj][ii];
        let i1 = (i + 1).min(self.x.len() - 1);
        let j1 = (j + 1).min(self.y.len() - 1);
        (1.0 - ty) * ((1.0 - tx) * v(j, i) + tx * v(j, i1)) + ty * ((1.0 - tx) * v(j1, i) + tx * v(j1, i1))
    }

    pub fn rate(&self, p: Position, z: f64) -> f64 {
        self.r0 * self.bandwidth_mhz * (z * self.snr(p)).ln_1p() / std::f64::consts::LN_2
    }

    fn validate(&self) -> Result<()> {
        let increasing = |v: &[f64]| v.len() >= 2 && v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&self.x) || !increasing(&self.y) {
            return Err(Error::config("SNR table axes must be strictly increasing with at least 2 points"));
        }
        if self.values.len() != self.y.len() || self.values.iter().any(|row| row.len() != self.x.len()) {
            return Err(Error::config("SNR table shape does not match its axes"));
        }
        if self.values.iter().flatten().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::config("SNR table values must be finite and nonnegative"));
        }
        if !(self.r0 > 0.0 && self.bandwidth_mhz > 0.0) {
            return Err(Error::config("SNR table rate scale must be positive"));
        }
        Ok(())
    }
}

/// Cell index and fractional offset, clamped to the axis.
fn cell(axis: &[f64], v: f64) -> (usize, f64) {
    let last = axis.len() - 1;
    if v <= axis[0] {
        return (0, 0.0);
    }
    if v >= axis[last] {
        return (last, 0.0);
    }
    let i = axis.partition_point(|a| *a <= v) - 1;
    (i, (v - axis[i]) / (axis[i + 1] - axis[i]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateModel {
    Parametric { antennas: Vec<Antenna> },
    Tabulated(SnrTable),
}

impl RateModel {
    /// Rate in Mbit/s at `p` for the fading factor `z` (1 when fading is off).
    pub fn sample_rate(&self, p: Position, z: f64) -> f64 {
        match self {
            RateModel::Parametric { antennas } => antennas.iter().map(|a| a.rate(p, z)).sum(),
            RateModel::Tabulated(table) => table.rate(p, z),
        }
    }

    pub fn expected_rate(&self, p: Position) -> f64 {
        self.sample_rate(p, 1.0)
    }

    /// The single antenna of a one-transmitter parametric model.
    pub fn single_antenna(&self) -> Option<&Antenna> {
        match self {
            RateModel::Parametric { antennas } if antennas.len() == 1 => antennas.first(),
            _ => None,
        }
    }

    /// SNR reading `z · S(p)`; only defined for a single parametric antenna.
    pub fn measure_snr(&self, p: Position, z: f64) -> Result<f64> {
        self.single_antenna()
            .map(|a| z * a.snr(p))
            .ok_or_else(|| Error::config("SNR measurements need a single parametric antenna"))
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match self {
            RateModel::Parametric { antennas } => {
                if antennas.is_empty() {
                    return Err(Error::config("rate model needs at least one antenna"));
                }
                antennas.iter().try_for_each(Antenna::validate)
            }
            RateModel::Tabulated(t) => t.validate(),
        }
    }
}

/// Multiplicative Rician fading of the SNR.
///
/// `z = |(z' + v, z'')| / E_z` with `z', z''` standard normal; `E_z` is the
/// mean of the unnormalized Rice variable, so `E[z] = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingModel {
    pub rice_v: f64,
    pub ez: f64,
}

impl FadingModel {
    pub fn new(rice_v: f64) -> Result<Self> {
        if !(rice_v >= 0.0 && rice_v.is_finite()) {
            return Err(Error::config("Rice parameter v must be finite and nonnegative"));
        }
        Ok(FadingModel { rice_v, ez: compute_ez(rice_v)? })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        sample_fading(self.rice_v, self.ez, rng)
    }
}

pub fn sample_fading<R: Rng + ?Sized>(rice_v: f64, ez: f64, rng: &mut R) -> f64 {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    (a + rice_v).hypot(b) / ez
}

/// Mean of the Rice distribution with noncentrality `v` and unit scale,
/// by adaptive quadrature of `x · f(x)` against the density itself.
pub fn compute_ez(v: f64) -> Result<f64> {
    if !(v >= 0.0) {
        return Err(Error::config("Rice parameter v must be nonnegative"));
    }
    // density is negligible (< 1e-40) beyond 14 standard deviations
    let lo = (v - 14.0).max(0.0);
    let hi = v + 14.0;
    let tol = 1e-12;
    let mass = numopt::integrate(|x| rice_density(x, v), lo, hi, tol)?;
    let first = numopt::integrate(|x| x * rice_density(x, v), lo, hi, tol)?;
    Ok(first / mass)
}

/// Rice density with unit scale, written with the scaled Bessel function so
/// that large `x · v` does not overflow.
pub fn rice_density(x: f64, v: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    x * (-0.5 * (x - v) * (x - v)).exp() * bessel_i0e(x * v)
}

/// `exp(-t) · I0(t)` for `t ≥ 0`.
pub fn bessel_i0e(t: f64) -> f64 {
    let t = t.abs();
    if t <= 30.0 {
        let q = 0.25 * t * t;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > 1e-17 * sum {
            term *= q / (k * k);
            sum += term;
            k += 1.0;
        }
        sum * (-t).exp()
    } else {
        // asymptotic series: (2k-1)!!^2 / (k! 8^k t^k)
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..60 {
            let kf = k as f64;
            let next = term * (2.0 * kf - 1.0).powi(2) / (8.0 * kf * t);
            if next > term || next < 1e-17 * sum {
                break;
            }
            term = next;
            sum += term;
        }
        sum / (std::f64::consts::TAU * t).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn antenna(r0: f64) -> Antenna {
        Antenna { position: Position::new(100.0, 170.0), k: 1e4, h: 1.0, gamma: 2.0, r0 }
    }

    #[test]
    fn peak_rates_of_the_two_transmitters() {
        let strong = antenna(0.753);
        let weak = antenna(0.188);
        let p = strong.position;
        assert!((strong.rate(p, 1.0) - 10.0).abs() < 0.01 * 10.0);
        assert!((weak.rate(p, 1.0) - 2.5).abs() < 0.01 * 2.5);
    }

    #[test]
    fn unit_snr_distance() {
        let a = antenna(0.753);
        let p = a.position + Position::new(99.0, 0.0);
        assert!((a.snr(p) - 1.0).abs() < 1e-12);
        assert!((a.rate(p, 1.0) - 0.753).abs() < 1e-12);
    }

    #[test]
    fn rayleigh_mean_closed_form() {
        let ez = compute_ez(0.0).unwrap();
        let exact = (std::f64::consts::PI / 2.0).sqrt();
        assert!((ez - exact).abs() <= 1e-8 * exact, "{ez} vs {exact}");
    }

    #[test]
    fn rice_mean_matches_laguerre_form() {
        // E = sqrt(pi/2) e^{-a} [(1 + 2a) I0(a) + 2a I1(a)], a = v^2/4
        fn i_series(nu: i32, t: f64) -> f64 {
            let q = 0.25 * t * t;
            let mut term = (0.5 * t).powi(nu) / (1..=nu).map(f64::from).product::<f64>();
            let mut sum = term;
            for k in 1..200 {
                let kf = f64::from(k);
                term *= q / (kf * (kf + f64::from(nu)));
                sum += term;
            }
            sum
        }
        for v in [0.5f64, 1.0, 2.0, 3.0, 5.0] {
            let a: f64 = v * v / 4.0;
            let exact = (std::f64::consts::PI / 2.0).sqrt()
                * (-a).exp()
                * ((1.0 + 2.0 * a) * i_series(0, a) + 2.0 * a * i_series(1, a));
            let ez = compute_ez(v).unwrap();
            assert!((ez - exact).abs() <= 1e-8 * exact, "v={v}: {ez} vs {exact}");
        }
    }

    #[test]
    fn large_v_asymptote() {
        let ez = compute_ez(1000.0).unwrap();
        assert!((ez - 1000.0).abs() < 1e-3 * 1000.0);
    }

    #[test]
    fn i0e_branches_agree_at_switch() {
        let below = bessel_i0e(30.0);
        let above = bessel_i0e(30.0 + 1e-9);
        // high-precision references for exp(-t) I0(t)
        assert!((below - 0.073_145_946_482_237_3).abs() < 1e-15);
        assert!((above - 0.073_145_946_481_007_68).abs() < 1e-15);
    }

    #[test]
    fn fading_mean_v15() {
        let f = FadingModel::new(15.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 200_000;
        let mean = (0..n).map(|_| f.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.005, "{mean}");
    }

    #[test]
    fn table_interpolates_and_clamps() {
        let t = SnrTable {
            x: vec![0.0, 1.0],
            y: vec![0.0, 1.0],
            values: vec![vec![0.0, 2.0], vec![4.0, 6.0]],
            r0: 1.0,
            bandwidth_mhz: 20.0,
        };
        assert!((t.snr(Position::new(0.5, 0.5)) - 3.0).abs() < 1e-12);
        assert_eq!(t.snr(Position::new(-5.0, -5.0)), 0.0);
        assert_eq!(t.snr(Position::new(5.0, 5.0)), 6.0);
        assert!((t.rate(Position::new(1.0, 0.0), 1.0) - 20.0 * 3f64.log2()).abs() < 1e-12);
    }
}
