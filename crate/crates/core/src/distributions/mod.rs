//! Central and noncentral t and F distributions.
//!
//! Everything reduces to the regularized incomplete beta function. Quantiles
//! are found by bracketing and bisection only, so they cannot diverge.

mod fisher;
mod quantile;
mod special;
mod student;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fisher::{f_cdf, f_quantile, ncf_cdf};
pub use special::{ln_beta, ln_gamma, reg_inc_beta, ITERATION_BUDGET};
pub use student::{nct_cdf, t_cdf, t_quantile};

/// Degrees of freedom. Real-valued: sphericity corrections produce fractional values.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Dof(f64);

impl Dof {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value.is_finite() {
            Ok(Dof(value))
        } else {
            Err(Error::domain(format!(
                "degrees of freedom must be positive and finite, got {value}"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Noncentrality of a t (any sign) or F (nonnegative) statistic.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Noncentrality(f64);

impl Noncentrality {
    /// Noncentrality of a t statistic.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(Noncentrality(value))
        } else {
            Err(Error::domain(format!("noncentrality must be finite, got {value}")))
        }
    }

    /// Noncentrality of an F statistic.
    pub fn nonnegative(value: f64) -> Result<Self> {
        if value >= 0.0 && value.is_finite() {
            Ok(Noncentrality(value))
        } else {
            Err(Error::domain(format!(
                "F noncentrality must be finite and >= 0, got {value}"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "probability must lie strictly inside (0, 1), got {p}"
        )))
    }
}
