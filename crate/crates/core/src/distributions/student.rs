use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};

use super::quantile::positive_root;
use super::special::{beta_prefactor, inc_beta_complemented, ln_gamma, normal_cdf, ITERATION_BUDGET};
use super::{check_probability, Dof, Noncentrality};

const SERIES_TOLERANCE: f64 = 1e-15;

fn check_finite(x: f64) -> Result<()> {
    if x.is_nan() {
        Err(Error::domain("t statistic is NaN"))
    } else {
        Ok(())
    }
}

/// Central Student t CDF.
pub fn t_cdf(x: f64, df: Dof) -> Result<f64> {
    check_finite(x)?;
    if x.is_infinite() {
        return Ok(if x > 0.0 { 1.0 } else { 0.0 });
    }
    let nu = df.get();
    let denom = nu + x * x;
    // P(|T| > |x|) = I_{ν/(ν+x²)}(ν/2, 1/2)
    let two_sided = inc_beta_complemented(nu / denom, x * x / denom, 0.5 * nu, 0.5)?;
    let tail = 0.5 * two_sided;
    Ok(if x > 0.0 { 1.0 - tail } else { tail })
}

/// Inverse of [`t_cdf`] for `0 < p < 1`.
pub fn t_quantile(p: f64, df: Dof) -> Result<f64> {
    check_probability(p)?;
    if p == 0.5 {
        return Ok(0.0);
    }
    if p > 0.5 {
        positive_root(|x| t_cdf(x, df), p, "t quantile bisection")
    } else {
        // cdf(-y) is decreasing in y; negate to search an increasing function
        let y = positive_root(|y| t_cdf(-y, df).map(|c| -c), -p, "t quantile bisection")?;
        Ok(-y)
    }
}

/// Noncentral t CDF `P(T <= x)` with `T = (Z + delta) / sqrt(V / df)`.
pub fn nct_cdf(x: f64, df: Dof, delta: Noncentrality) -> Result<f64> {
    check_finite(x)?;
    let delta = delta.get();
    if delta == 0.0 {
        return t_cdf(x, df);
    }
    if x.is_infinite() {
        return Ok(if x > 0.0 { 1.0 } else { 0.0 });
    }
    if x >= 0.0 {
        nct_lower_nonnegative(x, df.get(), delta)
    } else {
        Ok((1.0 - nct_lower_nonnegative(-x, df.get(), -delta)?).clamp(0.0, 1.0))
    }
}

/// `P(T <= t)` for `t >= 0` as the mixture
/// `Φ(-δ) + ½ Σ_j [P_j I_x(j + ½, ν/2) + (δ/√2) Q_j I_x(j + 1, ν/2)]`
/// with Poisson-like weights `P_j = e^{-λ} λ^j / j!`, `Q_j = e^{-λ} λ^j / Γ(j + 3/2)`,
/// `λ = δ²/2`, `x = t²/(t² + ν)`. Summation starts at the weight mode and runs
/// outward in both directions, updating the incomplete beta terms by recurrence.
fn nct_lower_nonnegative(t: f64, nu: f64, delta: f64) -> Result<f64> {
    let base = normal_cdf(-delta)?;
    if t == 0.0 {
        return Ok(base);
    }
    let denom = t * t + nu;
    let x = t * t / denom;
    let y = nu / denom;
    let b = 0.5 * nu;
    let lambda = 0.5 * delta * delta;
    let scale = delta / SQRT_2;
    let ln_lambda = lambda.ln();

    let mode = lambda.floor();
    let p_mode = (-lambda + mode * ln_lambda - ln_gamma(mode + 1.0)).exp();
    let q_mode = (-lambda + mode * ln_lambda - ln_gamma(mode + 1.5)).exp();

    let ap0 = mode + 0.5;
    let aq0 = mode + 1.0;
    let ip_mode = inc_beta_complemented(x, y, ap0, b)?;
    let iq_mode = inc_beta_complemented(x, y, aq0, b)?;

    let mut sum = 0.0;

    // forward: I_x(a+1, b) = I_x(a, b) - x^a y^b / (a B(a, b))
    {
        let (mut ap, mut aq) = (ap0, aq0);
        let (mut ip, mut iq) = (ip_mode, iq_mode);
        let mut dp = beta_prefactor(x, y, ap, b) / ap;
        let mut dq = beta_prefactor(x, y, aq, b) / aq;
        let (mut pj, mut qj) = (p_mode, q_mode);
        let mut j = mode;
        let mut converged = false;
        for _ in 0..ITERATION_BUDGET {
            sum += pj * ip + scale * qj * iq;
            ip = (ip - dp).max(0.0);
            iq = (iq - dq).max(0.0);
            dp *= x * (ap + b) / (ap + 1.0);
            dq *= x * (aq + b) / (aq + 1.0);
            ap += 1.0;
            aq += 1.0;
            pj *= lambda / (j + 1.0);
            qj *= lambda / (j + 1.5);
            j += 1.0;
            // weights past j decay at least geometrically with these ratios
            let rp = lambda / (j + 1.0);
            let rq = lambda / (j + 1.5);
            let tail = pj / (1.0 - rp) * ip + scale.abs() * qj / (1.0 - rq) * iq;
            if rp < 1.0 && rq < 1.0 && 0.5 * tail < SERIES_TOLERANCE {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence {
                routine: "noncentral t series",
                budget: ITERATION_BUDGET,
            });
        }
    }

    // backward: I_x(a-1, b) = I_x(a, b) + x^{a-1} y^b / ((a-1) B(a-1, b))
    if mode >= 1.0 {
        let (mut ap, mut aq) = (ap0, aq0);
        let (mut ip, mut iq) = (ip_mode, iq_mode);
        let mut dp = beta_prefactor(x, y, ap - 1.0, b) / (ap - 1.0);
        let mut dq = beta_prefactor(x, y, aq - 1.0, b) / (aq - 1.0);
        let (mut pj, mut qj) = (p_mode, q_mode);
        let mut j = mode;
        while j >= 1.0 {
            pj *= j / lambda;
            qj *= (j + 0.5) / lambda;
            ip = (ip + dp).min(1.0);
            iq = (iq + dq).min(1.0);
            ap -= 1.0;
            aq -= 1.0;
            dp = if ap > 1.0 { beta_step_down(dp, ap, b, x) } else { dp };
            dq = if aq > 1.0 { beta_step_down(dq, aq, b, x) } else { dq };
            j -= 1.0;
            sum += pj * ip + scale * qj * iq;
            let rp = j / lambda;
            let rq = (j + 0.5) / lambda;
            let tail = pj * rp / (1.0 - rp) + scale.abs() * qj * rq / (1.0 - rq);
            if 0.5 * tail < SERIES_TOLERANCE {
                break;
            }
        }
    }

    Ok((base + 0.5 * sum).clamp(0.0, 1.0))
}

/// Given `d(a) = x^a y^b / (a B(a, b))` return `d(a - 1)`.
fn beta_step_down(d: f64, a: f64, b: f64, x: f64) -> f64 {
    d * a / ((a - 1.0 + b) * x)
}
