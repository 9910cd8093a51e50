use crate::error::{Error, Result};

/// Finds a root of `g` in `[lo, hi]` to within `tol`.
///
/// The endpoints must bracket a root (`g(lo) * g(hi) <= 0`).
pub fn bisect<G: FnMut(f64) -> f64>(g: G, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    bisect_counted(g, lo, hi, tol).map(|(root, _)| root)
}

/// Like [`bisect`], also returning the number of halvings performed.
pub fn bisect_counted<G: FnMut(f64) -> f64>(mut g: G, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, usize)> {
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let glo = g(lo);
    if glo == 0.0 {
        return Ok((lo, 0));
    }
    let ghi = g(hi);
    if ghi == 0.0 {
        return Ok((hi, 0));
    }
    if !(glo.signum() != ghi.signum()) || glo.is_nan() || ghi.is_nan() {
        return Err(Error::Bracketing { lo, hi, glo, ghi });
    }
    let lo_negative = glo < 0.0;
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        iterations += 1;
        if gm == 0.0 {
            return Ok((mid, iterations));
        }
        if (gm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), iterations))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_root() {
        let r = bisect(|t| t - 1.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((r - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn sqrt_two() {
        let tol = 1e-10;
        let r = bisect(|t| t * t - 2.0, 0.0, 2.0, tol).unwrap();
        assert!((r - 2f64.sqrt()).abs() <= tol);
    }

    #[test]
    fn root_at_lower_endpoint() {
        assert_eq!(bisect(|t| t, 0.0, 3.0, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn same_sign_endpoints_fail() {
        assert!(matches!(bisect(|t| t * t + 1.0, -1.0, 1.0, 1e-9), Err(Error::Bracketing { .. })));
    }

    #[test]
    fn iteration_bound() {
        let (lo, hi, tol) = (0.0, 7.0, 1e-9);
        let (_, n) = bisect_counted(|t| t.powi(3) - 5.0, lo, hi, tol).unwrap();
        let bound = ((hi - lo) / tol).log2().ceil() as usize;
        assert!(n <= bound, "{n} > {bound}");
    }
}
