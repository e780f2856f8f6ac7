use crate::error::{Error, Result};

use super::quantile::positive_root;
use super::special::{beta_prefactor, inc_beta_complemented, ln_gamma, ITERATION_BUDGET};
use super::{check_probability, Dof, Noncentrality};

/// Truncation threshold on the residual Poisson mass of the mixture.
const POISSON_TAIL: f64 = 1e-14;

fn check_x(x: f64) -> Result<()> {
    if x.is_nan() {
        Err(Error::domain("F statistic is NaN"))
    } else {
        Ok(())
    }
}

/// `(x, 1 - x)` for the beta variable `df1 f / (df1 f + df2)`.
fn beta_argument(f: f64, df1: f64, df2: f64) -> (f64, f64) {
    let num = df1 * f;
    let denom = num + df2;
    (num / denom, df2 / denom)
}

/// Central F CDF.
pub fn f_cdf(x: f64, df1: Dof, df2: Dof) -> Result<f64> {
    check_x(x)?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let (bx, by) = beta_argument(x, df1.get(), df2.get());
    inc_beta_complemented(bx, by, 0.5 * df1.get(), 0.5 * df2.get())
}

/// Inverse of [`f_cdf`] for `0 < p < 1`.
pub fn f_quantile(p: f64, df1: Dof, df2: Dof) -> Result<f64> {
    check_probability(p)?;
    positive_root(|x| f_cdf(x, df1, df2), p, "F quantile bisection")
}

/// Noncentral F CDF as a Poisson(λ/2) mixture of central beta CDFs:
/// `Σ_j Pois(j; λ/2) I_x(df1/2 + j, df2/2)`.
///
/// The sum starts at the Poisson mode and walks outward; each side stops once
/// a geometric bound on its remaining Poisson mass drops below `1e-14`.
pub fn ncf_cdf(x: f64, df1: Dof, df2: Dof, lambda: Noncentrality) -> Result<f64> {
    check_x(x)?;
    let lambda = lambda.get();
    if lambda < 0.0 {
        return Err(Error::domain(format!("F noncentrality must be >= 0, got {lambda}")));
    }
    if lambda == 0.0 {
        return f_cdf(x, df1, df2);
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }

    let (bx, by) = beta_argument(x, df1.get(), df2.get());
    let b = 0.5 * df2.get();
    let mean = 0.5 * lambda;
    let mode = mean.floor();
    let weight_mode = (-mean + mode * mean.ln() - ln_gamma(mode + 1.0)).exp();
    let a0 = 0.5 * df1.get() + mode;
    let i_mode = inc_beta_complemented(bx, by, a0, b)?;

    let mut sum = 0.0;

    let mut a = a0;
    let mut ix = i_mode;
    let mut d = beta_prefactor(bx, by, a, b) / a;
    let mut w = weight_mode;
    let mut j = mode;
    let mut converged = false;
    for _ in 0..ITERATION_BUDGET {
        sum += w * ix;
        ix = (ix - d).max(0.0);
        d *= bx * (a + b) / (a + 1.0);
        a += 1.0;
        w *= mean / (j + 1.0);
        j += 1.0;
        let ratio = mean / (j + 1.0);
        if ratio < 1.0 && w / (1.0 - ratio) < POISSON_TAIL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            routine: "noncentral F Poisson mixture",
            budget: ITERATION_BUDGET,
        });
    }

    if mode >= 1.0 {
        let mut a = a0;
        let mut ix = i_mode;
        // a0 - 1 > 0 because mode >= 1
        let mut d = beta_prefactor(bx, by, a - 1.0, b) / (a - 1.0);
        let mut w = weight_mode;
        let mut j = mode;
        while j >= 1.0 {
            w *= j / mean;
            ix = (ix + d).min(1.0);
            a -= 1.0;
            if a > 1.0 {
                d *= a / ((a - 1.0 + b) * bx);
            }
            j -= 1.0;
            sum += w * ix;
            let ratio = j / mean;
            if w * ratio / (1.0 - ratio) < POISSON_TAIL {
                break;
            }
        }
    }

    Ok(sum.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dof(v: f64) -> Dof {
        Dof::new(v).unwrap()
    }

    #[test]
    fn f_median_of_equal_dofs_is_one() {
        assert!((f_cdf(1.0, dof(9.0), dof(9.0)).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn f_cdf_monotone_on_grid() {
        let mut prev = -1.0;
        for i in 0..=20 {
            let v = f_cdf(0.5 * i as f64, dof(2.0), dof(45.0)).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn f_with_two_numerator_dof_closed_form() {
        // F(2, d2): CDF = 1 - (1 + 2x/d2)^(-d2/2)
        for &x in &[0.1, 1.0, 3.2, 9.0] {
            let exact = 1.0 - f64::powf(1.0 + 2.0 * x / 45.0, -22.5);
            assert!((f_cdf(x, dof(2.0), dof(45.0)).unwrap() - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn f_quantile_round_trip() {
        for &(d1, d2) in &[(1.0, 5.0), (2.0, 45.0), (25.0, 1875.0), (1.686, 42.148)] {
            for &p in &[1e-4, 0.1, 0.5, 0.95, 0.999] {
                let q = f_quantile(p, dof(d1), dof(d2)).unwrap();
                assert!((f_cdf(q, dof(d1), dof(d2)).unwrap() - p).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn ncf_zero_lambda_is_central() {
        let c = ncf_cdf(3.2, dof(2.0), dof(45.0), Noncentrality::nonnegative(0.0).unwrap()).unwrap();
        assert!((c - f_cdf(3.2, dof(2.0), dof(45.0)).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn ncf_matches_direct_poisson_sum() {
        // reference: every mixture term evaluated independently
        let (d1, d2, lambda, x) = (3.0, 30.0, 17.5, 4.1);
        let (bx, _) = beta_argument(x, d1, d2);
        let mean = lambda / 2.0;
        let mut reference = 0.0;
        for j in 0..200 {
            let jf = j as f64;
            let w = (-mean + jf * f64::ln(mean) - ln_gamma(jf + 1.0)).exp();
            reference += w * crate::distributions::reg_inc_beta(bx, d1 / 2.0 + jf, d2 / 2.0).unwrap();
        }
        let v = ncf_cdf(x, dof(d1), dof(d2), Noncentrality::nonnegative(lambda).unwrap()).unwrap();
        assert!((v - reference).abs() < 1e-13, "{v} vs {reference}");
    }

    #[test]
    fn ncf_large_lambda_converges() {
        let v = ncf_cdf(20.0, dof(5.0), dof(60.0), Noncentrality::nonnegative(1000.0).unwrap()).unwrap();
        assert!(v < 1e-6);
        let v = ncf_cdf(1000.0, dof(5.0), dof(60.0), Noncentrality::nonnegative(1000.0).unwrap()).unwrap();
        assert!(v > 0.999_999);
    }
}
