use crate::error::{Error, Result};

use super::special::ITERATION_BUDGET;

const RELATIVE_WIDTH: f64 = 1e-12;
const CDF_TOLERANCE: f64 = 1e-10;

/// Solve `cdf(x) = p` for `x > 0`, where `cdf` is nondecreasing on `(0, ∞)`.
///
/// The bracket starts at `[1, 1]` and is widened geometrically (halving the
/// lower end, doubling the upper end), then bisected until its width is below
/// `1e-12` relative to the endpoints.
pub(crate) fn positive_root<F>(cdf: F, p: f64, routine: &'static str) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let fail = || Error::NonConvergence {
        routine,
        budget: ITERATION_BUDGET,
    };
    let mut evaluations = 0usize;
    let mut eval = |x: f64| -> Result<f64> {
        evaluations += 1;
        if evaluations > ITERATION_BUDGET {
            return Err(fail());
        }
        cdf(x)
    };

    let mut lo = 1.0f64;
    let mut hi = 1.0f64;
    while eval(lo)? > p {
        lo *= 0.5;
        if lo < f64::MIN_POSITIVE {
            return Err(fail());
        }
    }
    while eval(hi)? < p {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(fail());
        }
    }
    if lo == hi {
        // cdf(1) == p exactly
        return Ok(1.0);
    }

    while hi - lo > RELATIVE_WIDTH * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if eval(mid)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    if (cdf(root)? - p).abs() > CDF_TOLERANCE {
        return Err(fail());
    }
    Ok(root)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_simple_monotone_functions() {
        let r = positive_root(|x| Ok(1.0 - (-x).exp()), 0.5, "exp").unwrap();
        assert!((r - std::f64::consts::LN_2).abs() < 1e-11);
        let r = positive_root(|x| Ok(x / (1.0 + x)), 1e-6, "ratio").unwrap();
        assert!((r - 1e-6 / (1.0 - 1e-6)).abs() < 1e-16);
        let r = positive_root(|x| Ok(x / (1.0 + x)), 0.999_999, "ratio").unwrap();
        assert!((r - 999_999.0).abs() < 1e-4);
    }

    #[test]
    fn unreachable_target_is_an_error() {
        // bounded above by 0.5: the upper bracket never closes
        let err = positive_root(|x| Ok(0.5 * x / (1.0 + x)), 0.9, "bounded").unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }
}
