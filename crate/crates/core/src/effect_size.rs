//! Standardized effect sizes from published summary statistics.
//!
//! Values are kept at full precision; rounding is a rendering concern.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean, SD and size of one group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub mean: f64,
    pub sd: f64,
    pub n: u64,
}

impl GroupSummary {
    pub fn new(mean: f64, sd: f64, n: u64) -> Result<Self> {
        let g = GroupSummary { mean, sd, n };
        g.validate()?;
        Ok(g)
    }

    /// Checks the invariants; needed for values built by deserialization.
    pub fn validate(&self) -> Result<()> {
        if !self.mean.is_finite() {
            return Err(Error::domain(format!("group mean must be finite, got {}", self.mean)));
        }
        if !(self.sd > 0.0 && self.sd.is_finite()) {
            return Err(Error::domain(format!("group sd must be positive, got {}", self.sd)));
        }
        if self.n < 2 {
            return Err(Error::domain(format!("group size must be at least 2, got {}", self.n)));
        }
        Ok(())
    }
}

/// Mean and SD of within-pair differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedDiffSummary {
    pub mean_diff: f64,
    pub sd_diff: f64,
    pub n: u64,
}

impl PairedDiffSummary {
    pub fn new(mean_diff: f64, sd_diff: f64, n: u64) -> Result<Self> {
        let p = PairedDiffSummary { mean_diff, sd_diff, n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mean_diff.is_finite() {
            return Err(Error::domain(format!(
                "mean difference must be finite, got {}",
                self.mean_diff
            )));
        }
        if !(self.sd_diff > 0.0 && self.sd_diff.is_finite()) {
            return Err(Error::domain(format!(
                "sd of differences must be positive, got {}",
                self.sd_diff
            )));
        }
        if self.n < 2 {
            return Err(Error::domain(format!(
                "number of pairs must be at least 2, got {}",
                self.n
            )));
        }
        Ok(())
    }
}

/// Effect and error sums of squares from a repeated-measures ANOVA table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceComponents {
    pub ss_effect: f64,
    pub ss_error: f64,
}

impl VarianceComponents {
    pub fn new(ss_effect: f64, ss_error: f64) -> Result<Self> {
        let v = VarianceComponents { ss_effect, ss_error };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ss_effect >= 0.0 && self.ss_effect.is_finite()) {
            return Err(Error::domain(format!(
                "effect sum of squares must be >= 0, got {}",
                self.ss_effect
            )));
        }
        if !(self.ss_error > 0.0 && self.ss_error.is_finite()) {
            return Err(Error::domain(format!(
                "error sum of squares must be positive, got {}",
                self.ss_error
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectKind {
    D,
    Dz,
    F,
    FSquared,
}

impl EffectKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EffectKind::D => "d",
            EffectKind::Dz => "dz",
            EffectKind::F => "f",
            EffectKind::FSquared => "f_squared",
        }
    }
}

impl fmt::Display for EffectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How an effect size was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Derivation {
    /// Entered directly by the user.
    Supplied,
    /// |m1 - m2| over the pooled SD. `unequal_n` marks the (n-1)-weighted pooling.
    TwoGroupMeans { pooled_sd: f64, unequal_n: bool },
    /// |mean difference| over SD of differences.
    PairedDifferences,
    /// Spread of n-weighted group means over the within-group SD.
    GroupMeans { sigma_m: f64, sd_within: f64 },
    /// Effect sum of squares over error sum of squares.
    VarianceRatio,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectSize {
    kind: EffectKind,
    value: f64,
    derivation: Derivation,
}

impl EffectSize {
    /// A user-supplied magnitude.
    pub fn new(kind: EffectKind, value: f64) -> Result<Self> {
        Self::derived(kind, value, Derivation::Supplied)
    }

    fn derived(kind: EffectKind, value: f64, derivation: Derivation) -> Result<Self> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::domain(format!(
                "effect size {kind} must be finite and >= 0, got {value}"
            )));
        }
        Ok(EffectSize {
            kind,
            value,
            derivation,
        })
    }

    pub fn kind(&self) -> EffectKind {
        self.kind
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn derivation(&self) -> &Derivation {
        &self.derivation
    }

    pub fn warnings(&self) -> Vec<String> {
        match self.derivation {
            Derivation::TwoGroupMeans { unequal_n: true, .. } => {
                vec!["unequal group sizes: d uses the (n-1)-weighted pooled SD".to_string()]
            }
            _ => Vec::new(),
        }
    }

    pub(crate) fn expect_kind(&self, kind: EffectKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::domain(format!("expected effect size {kind}, got {}", self.kind)))
        }
    }
}

/// Invert `SE = SD / sqrt(n)`.
pub fn sd_from_se(se: f64, n: u64) -> Result<f64> {
    if !(se > 0.0 && se.is_finite()) {
        return Err(Error::domain(format!("standard error must be positive, got {se}")));
    }
    if n < 1 {
        return Err(Error::domain("sample size must be at least 1"));
    }
    Ok(se * (n as f64).sqrt())
}

/// Cohen's d for two independent groups.
///
/// Equal sizes use `sqrt((sd1² + sd2²) / 2)`; unequal sizes fall back to the
/// (n-1)-weighted pooled SD and carry a warning.
pub fn cohen_d(g1: &GroupSummary, g2: &GroupSummary) -> Result<EffectSize> {
    g1.validate()?;
    g2.validate()?;
    let unequal_n = g1.n != g2.n;
    let pooled_sd = if unequal_n {
        pooled_sd(&[*g1, *g2])?
    } else {
        ((g1.sd * g1.sd + g2.sd * g2.sd) / 2.0).sqrt()
    };
    let d = (g1.mean - g2.mean).abs() / pooled_sd;
    EffectSize::derived(EffectKind::D, d, Derivation::TwoGroupMeans { pooled_sd, unequal_n })
}

/// Cohen's dz for paired differences.
pub fn cohen_dz(p: &PairedDiffSummary) -> Result<EffectSize> {
    p.validate()?;
    EffectSize::derived(
        EffectKind::Dz,
        p.mean_diff.abs() / p.sd_diff,
        Derivation::PairedDifferences,
    )
}

/// `sqrt(Σ (n_i - 1) s_i² / (N - k))`.
pub fn pooled_sd(groups: &[GroupSummary]) -> Result<f64> {
    if groups.len() < 2 {
        return Err(Error::domain(format!(
            "pooling needs at least 2 groups, got {}",
            groups.len()
        )));
    }
    let mut ss = 0.0;
    let mut dof = 0.0;
    for g in groups {
        g.validate()?;
        let w = (g.n - 1) as f64;
        ss += w * g.sd * g.sd;
        dof += w;
    }
    Ok((ss / dof).sqrt())
}

/// Cohen's f from group means: `σ_m / sd_within`, where `σ_m` is the
/// n-weighted SD of the group means around the n-weighted grand mean.
pub fn cohen_f_from_means(groups: &[GroupSummary], sd_within: f64) -> Result<EffectSize> {
    if groups.len() < 2 {
        return Err(Error::domain(format!(
            "effect size f needs at least 2 groups, got {}",
            groups.len()
        )));
    }
    if !(sd_within > 0.0 && sd_within.is_finite()) {
        return Err(Error::domain(format!(
            "within-group sd must be positive, got {sd_within}"
        )));
    }
    for g in groups {
        g.validate()?;
    }
    let total: f64 = groups.iter().map(|g| g.n as f64).sum();
    let grand = groups.iter().map(|g| g.n as f64 * g.mean).sum::<f64>() / total;
    let var_m = groups
        .iter()
        .map(|g| g.n as f64 * (g.mean - grand).powi(2))
        .sum::<f64>()
        / total;
    let sigma_m = var_m.sqrt();
    EffectSize::derived(
        EffectKind::F,
        sigma_m / sd_within,
        Derivation::GroupMeans { sigma_m, sd_within },
    )
}

/// `f² = SS_effect / SS_error`.
pub fn f_squared_from_variances(v: &VarianceComponents) -> Result<EffectSize> {
    v.validate()?;
    EffectSize::derived(
        EffectKind::FSquared,
        v.ss_effect / v.ss_error,
        Derivation::VarianceRatio,
    )
}
