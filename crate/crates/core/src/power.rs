//! Post-hoc power, a-priori minimum sample size, attrition inflation and the
//! p-value / power curve for the four supported designs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distributions::{f_quantile, ncf_cdf, nct_cdf, t_cdf, t_quantile, Dof, Noncentrality};
use crate::effect_size::{cohen_dz, EffectKind, EffectSize, PairedDiffSummary};
use crate::error::{Error, Result};
use crate::exec::{map_ordered, Execution};

/// Largest sample size `solve_min_n` will consider, in the result's own unit.
pub const SEARCH_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tails {
    One,
    #[default]
    Two,
}

impl fmt::Display for Tails {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tails::One => "one",
            Tails::Two => "two",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    IndependentT,
    PairedT,
    #[serde(rename = "oneway_anova")]
    OneWayAnova,
    RmWithin,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::IndependentT => "independent_t",
            Family::PairedT => "paired_t",
            Family::OneWayAnova => "oneway_anova",
            Family::RmWithin => "rm_within",
        }
    }

    pub fn effect_kind(self) -> EffectKind {
        match self {
            Family::IndependentT => EffectKind::D,
            Family::PairedT => EffectKind::Dz,
            Family::OneWayAnova => EffectKind::F,
            Family::RmWithin => EffectKind::FSquared,
        }
    }

    pub fn granularity(self) -> Granularity {
        match self {
            Family::IndependentT => Granularity::PerGroup,
            Family::PairedT => Granularity::Pairs,
            Family::OneWayAnova | Family::RmWithin => Granularity::Total,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Unit in which a sample size is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    PerGroup,
    Pairs,
    Total,
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Granularity::PerGroup => "per_group",
            Granularity::Pairs => "pairs",
            Granularity::Total => "total",
        })
    }
}

/// Test design with its sample sizes. For `solve_min_n` the sizes are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Design {
    IndependentT {
        effect: EffectSize,
        n1: u64,
        n2: u64,
    },
    PairedT {
        effect: EffectSize,
        n_pairs: u64,
    },
    #[serde(rename = "oneway_anova")]
    OneWayAnova {
        effect: EffectSize,
        k: u64,
        total_n: u64,
    },
    RmWithin {
        effect: EffectSize,
        k: u64,
        m: u64,
        total_n: u64,
        epsilon: f64,
    },
}

impl Design {
    pub fn family(&self) -> Family {
        match self {
            Design::IndependentT { .. } => Family::IndependentT,
            Design::PairedT { .. } => Family::PairedT,
            Design::OneWayAnova { .. } => Family::OneWayAnova,
            Design::RmWithin { .. } => Family::RmWithin,
        }
    }

    pub fn effect(&self) -> &EffectSize {
        match self {
            Design::IndependentT { effect, .. }
            | Design::PairedT { effect, .. }
            | Design::OneWayAnova { effect, .. }
            | Design::RmWithin { effect, .. } => effect,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub design: Design,
    pub alpha: f64,
    /// Ignored by the F families.
    pub tails: Tails,
}

impl DesignSpec {
    pub fn new(design: Design, alpha: f64, tails: Tails) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(DesignSpec { design, alpha, tails })
    }

    /// Post-hoc power at the sizes stored in the design.
    pub fn power(&self) -> Result<PowerResult> {
        match &self.design {
            Design::IndependentT { effect, n1, n2 } => power_independent_t(effect, *n1, *n2, self.alpha, self.tails),
            Design::PairedT { effect, n_pairs } => power_paired_t(effect, *n_pairs, self.alpha, self.tails),
            Design::OneWayAnova { effect, k, total_n } => power_oneway_anova(effect, *k, *total_n, self.alpha),
            Design::RmWithin {
                effect,
                k,
                m,
                total_n,
                epsilon,
            } => power_rm_within(effect, *k, *m, *total_n, *epsilon, self.alpha),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerResult {
    pub effect: EffectSize,
    pub noncentrality: f64,
    pub df1: Dof,
    /// Denominator degrees of freedom; F families only.
    pub df2: Option<Dof>,
    pub critical_value: f64,
    pub power: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSizeResult {
    pub min_n: u64,
    pub granularity: Granularity,
    pub achieved_power: f64,
    pub target_power: f64,
    pub drop_rate: f64,
    pub final_n: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub n: u64,
    pub t_stat: f64,
    pub p_value: f64,
    pub power: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// Rejection probability of a t test whose statistic is noncentral t(df, delta).
/// Returns `(critical value, power)`.
fn t_test_power(delta: f64, df: Dof, alpha: f64, tails: Tails) -> Result<(f64, f64)> {
    let nc = Noncentrality::new(delta)?;
    match tails {
        Tails::Two => {
            let crit = t_quantile(1.0 - alpha / 2.0, df)?;
            let upper = 1.0 - nct_cdf(crit, df, nc)?;
            let lower = nct_cdf(-crit, df, nc)?;
            Ok((crit, (upper + lower).clamp(0.0, 1.0)))
        }
        Tails::One => {
            let crit = t_quantile(1.0 - alpha, df)?;
            Ok((crit, (1.0 - nct_cdf(crit, df, nc)?).clamp(0.0, 1.0)))
        }
    }
}

fn f_test_power(lambda: f64, df1: Dof, df2: Dof, alpha: f64) -> Result<(f64, f64)> {
    let crit = f_quantile(1.0 - alpha, df1, df2)?;
    let cdf = ncf_cdf(crit, df1, df2, Noncentrality::nonnegative(lambda)?)?;
    Ok((crit, (1.0 - cdf).clamp(0.0, 1.0)))
}

/// Two independent means: `df = n1 + n2 - 2`, `δ = d·sqrt(n1 n2 / (n1 + n2))`.
pub fn power_independent_t(d: &EffectSize, n1: u64, n2: u64, alpha: f64, tails: Tails) -> Result<PowerResult> {
    d.expect_kind(EffectKind::D)?;
    check_alpha(alpha)?;
    if n1 < 2 || n2 < 2 {
        return Err(Error::domain(format!(
            "group sizes must be at least 2, got {n1} and {n2}"
        )));
    }
    let (a, b) = (n1 as f64, n2 as f64);
    let df = Dof::new(a + b - 2.0)?;
    let delta = d.value() * (a * b / (a + b)).sqrt();
    let (critical_value, power) = t_test_power(delta, df, alpha, tails)?;
    Ok(PowerResult {
        effect: d.clone(),
        noncentrality: delta,
        df1: df,
        df2: None,
        critical_value,
        power,
    })
}

/// Paired differences: `df = N - 1`, `δ = dz·sqrt(N)`.
pub fn power_paired_t(dz: &EffectSize, n_pairs: u64, alpha: f64, tails: Tails) -> Result<PowerResult> {
    dz.expect_kind(EffectKind::Dz)?;
    check_alpha(alpha)?;
    if n_pairs < 2 {
        return Err(Error::domain(format!(
            "number of pairs must be at least 2, got {n_pairs}"
        )));
    }
    let n = n_pairs as f64;
    let df = Dof::new(n - 1.0)?;
    let delta = dz.value() * n.sqrt();
    let (critical_value, power) = t_test_power(delta, df, alpha, tails)?;
    Ok(PowerResult {
        effect: dz.clone(),
        noncentrality: delta,
        df1: df,
        df2: None,
        critical_value,
        power,
    })
}

/// Fixed-effects one-way ANOVA: `df = (k - 1, N - k)`, `λ = f²·N`.
pub fn power_oneway_anova(f: &EffectSize, k: u64, total_n: u64, alpha: f64) -> Result<PowerResult> {
    f.expect_kind(EffectKind::F)?;
    check_alpha(alpha)?;
    if k < 2 {
        return Err(Error::domain(format!("one-way ANOVA needs at least 2 groups, got {k}")));
    }
    if total_n <= k {
        return Err(Error::domain(format!(
            "total N ({total_n}) must exceed the number of groups ({k})"
        )));
    }
    let df1 = Dof::new((k - 1) as f64)?;
    let df2 = Dof::new((total_n - k) as f64)?;
    let lambda = f.value().powi(2) * total_n as f64;
    let (critical_value, power) = f_test_power(lambda, df1, df2, alpha)?;
    Ok(PowerResult {
        effect: f.clone(),
        noncentrality: lambda,
        df1,
        df2: Some(df2),
        critical_value,
        power,
    })
}

/// Repeated measures, within factors:
/// `df = ((m - 1)ε, (N - k)(m - 1)ε)`, `λ = f²·N·ε`.
///
/// `k`, `m` and `N` are taken literally. Note that the worked clinical example
/// this was calibrated on enters the time points as `k` and the subjects per
/// time point as `m`, the reverse of the usual reading.
pub fn power_rm_within(f2: &EffectSize, k: u64, m: u64, total_n: u64, epsilon: f64, alpha: f64) -> Result<PowerResult> {
    f2.expect_kind(EffectKind::FSquared)?;
    check_alpha(alpha)?;
    if k < 1 {
        return Err(Error::domain("repeated-measures design needs at least 1 group"));
    }
    if m < 2 {
        return Err(Error::domain(format!("need at least 2 measurements, got {m}")));
    }
    if total_n <= k {
        return Err(Error::domain(format!(
            "total N ({total_n}) must exceed the number of groups ({k})"
        )));
    }
    let lower = 1.0 / (m - 1) as f64;
    // small slack so that ε = 1/(m-1) typed as a rounded decimal is accepted
    if !(epsilon >= lower - 1e-12 && epsilon <= 1.0) {
        return Err(Error::domain(format!(
            "nonsphericity epsilon must lie in [{lower}, 1], got {epsilon}"
        )));
    }
    let m1 = (m - 1) as f64;
    let df1 = Dof::new(m1 * epsilon)?;
    let df2 = Dof::new((total_n - k) as f64 * m1 * epsilon)?;
    let lambda = f2.value() * total_n as f64 * epsilon;
    let (critical_value, power) = f_test_power(lambda, df1, df2, alpha)?;
    Ok(PowerResult {
        effect: f2.clone(),
        noncentrality: lambda,
        df1,
        df2: Some(df2),
        critical_value,
        power,
    })
}

/// `ceil(min_n / (1 - drop_rate))`.
///
/// Quotients within a relative 1e-9 of an integer are treated as that integer,
/// so a drop rate entered as `0.10` gives `ceil(10 n / 9)` exactly even though
/// `0.9` has no exact binary representation.
pub fn apply_drop_rate(min_n: u64, drop_rate: f64) -> Result<u64> {
    if min_n < 1 {
        return Err(Error::domain("sample size must be at least 1"));
    }
    if !(0.0..1.0).contains(&drop_rate) {
        return Err(Error::domain(format!("drop rate must lie in [0, 1), got {drop_rate}")));
    }
    let inflated = min_n as f64 / (1.0 - drop_rate);
    let nearest = inflated.round();
    if (inflated - nearest).abs() <= 1e-9 * inflated {
        Ok(nearest as u64)
    } else {
        Ok(inflated.ceil() as u64)
    }
}

/// Power as a function of the search unit for the design family of `spec`.
struct PowerCurve<'a> {
    spec: &'a DesignSpec,
    /// Smallest admissible unit.
    first: u64,
    /// Sample size counted per unit (k for ANOVA families, else 1).
    step: u64,
}

impl PowerCurve<'_> {
    fn new(spec: &DesignSpec) -> Result<PowerCurve<'_>> {
        let (first, step) = match &spec.design {
            Design::IndependentT { .. } | Design::PairedT { .. } => (2, 1),
            Design::OneWayAnova { k, .. } => {
                if *k < 2 {
                    return Err(Error::domain(format!("one-way ANOVA needs at least 2 groups, got {k}")));
                }
                (2, *k)
            }
            Design::RmWithin { k, .. } => {
                if *k < 1 {
                    return Err(Error::domain("repeated-measures design needs at least 1 group"));
                }
                (2, *k)
            }
        };
        Ok(PowerCurve { spec, first, step })
    }

    fn sample_size(&self, unit: u64) -> u64 {
        unit * self.step
    }

    fn power(&self, unit: u64) -> Result<f64> {
        let n = self.sample_size(unit);
        let s = self.spec;
        let r = match &s.design {
            Design::IndependentT { effect, .. } => power_independent_t(effect, n, n, s.alpha, s.tails)?,
            Design::PairedT { effect, .. } => power_paired_t(effect, n, s.alpha, s.tails)?,
            Design::OneWayAnova { effect, k, .. } => power_oneway_anova(effect, *k, n, s.alpha)?,
            Design::RmWithin {
                effect, k, m, epsilon, ..
            } => power_rm_within(effect, *k, *m, n, *epsilon, s.alpha)?,
        };
        Ok(r.power)
    }
}

/// Smallest sample size whose power reaches `target_power`, then inflated for attrition.
///
/// t tests search the per-group (or pair) count with `n1 = n2`. The ANOVA
/// families search total N in multiples of `k`, i.e. equal group sizes.
/// A doubling bracket is followed by binary search, relying on power being
/// nondecreasing in N.
pub fn solve_min_n(spec: &DesignSpec, target_power: f64, drop_rate: f64) -> Result<SampleSizeResult> {
    check_alpha(spec.alpha)?;
    if !(target_power > 0.0 && target_power < 1.0) {
        return Err(Error::domain(format!(
            "target power must lie in (0, 1), got {target_power}"
        )));
    }
    if target_power <= spec.alpha {
        return Err(Error::domain(format!(
            "target power {target_power} must exceed alpha {}",
            spec.alpha
        )));
    }
    if !(0.0..1.0).contains(&drop_rate) {
        return Err(Error::domain(format!("drop rate must lie in [0, 1), got {drop_rate}")));
    }
    let effect = spec.design.effect();
    effect.expect_kind(spec.design.family().effect_kind())?;
    if effect.value() == 0.0 {
        return Err(Error::Unreachable {
            target: target_power,
            reason: "effect size is zero, so power stays at alpha for every N".into(),
        });
    }

    let curve = PowerCurve::new(spec)?;
    let last_unit = SEARCH_CAP / curve.step;

    let mut fail = curve.first - 1;
    let mut hi = curve.first;
    let mut hi_power = curve.power(hi)?;
    while hi_power < target_power {
        if hi >= last_unit {
            return Err(Error::Unreachable {
                target: target_power,
                reason: format!(
                    "power at the search cap of {SEARCH_CAP} ({}) is {hi_power:.4}",
                    spec.design.family().granularity()
                ),
            });
        }
        fail = hi;
        hi = (hi * 2).min(last_unit);
        hi_power = curve.power(hi)?;
    }
    while hi - fail > 1 {
        let mid = fail + (hi - fail) / 2;
        let p = curve.power(mid)?;
        if p >= target_power {
            hi = mid;
            hi_power = p;
        } else {
            fail = mid;
        }
    }

    let min_n = curve.sample_size(hi);
    Ok(SampleSizeResult {
        min_n,
        granularity: spec.design.family().granularity(),
        achieved_power: hi_power,
        target_power,
        drop_rate,
        final_n: apply_drop_rate(min_n, drop_rate)?,
    })
}

/// Observed-t p-value and design power for every N in `n_min..=n_max`,
/// holding the paired summary (mean, SD of differences) fixed.
///
/// One-tailed p-values take the tail in the direction of the observed mean difference.
pub fn pvalue_power_curve(
    summary: &PairedDiffSummary,
    n_min: u64,
    n_max: u64,
    alpha: f64,
    tails: Tails,
) -> Result<Vec<CurvePoint>> {
    pvalue_power_curve_with(summary, n_min, n_max, alpha, tails, Execution::default())
}

pub fn pvalue_power_curve_with(
    summary: &PairedDiffSummary,
    n_min: u64,
    n_max: u64,
    alpha: f64,
    tails: Tails,
    exec: Execution,
) -> Result<Vec<CurvePoint>> {
    summary.validate()?;
    check_alpha(alpha)?;
    if n_min < 2 || n_min > n_max {
        return Err(Error::domain(format!(
            "curve range must satisfy 2 <= n_min <= n_max, got {n_min}..{n_max}"
        )));
    }
    if n_max > SEARCH_CAP {
        return Err(Error::domain(format!("curve range exceeds {SEARCH_CAP}")));
    }
    let dz = cohen_dz(summary)?;
    let ns: Vec<u64> = (n_min..=n_max).collect();
    map_ordered(&ns, exec, |&n| curve_point(summary, &dz, n, alpha, tails))
        .into_iter()
        .collect()
}

fn curve_point(summary: &PairedDiffSummary, dz: &EffectSize, n: u64, alpha: f64, tails: Tails) -> Result<CurvePoint> {
    let sqrt_n = (n as f64).sqrt();
    let t_stat = summary.mean_diff / (summary.sd_diff / sqrt_n);
    let df = Dof::new((n - 1) as f64)?;
    let tail = t_cdf(-t_stat.abs(), df)?;
    let p_value = match tails {
        Tails::Two => (2.0 * tail).min(1.0),
        Tails::One => tail,
    };
    let power = power_paired_t(dz, n, alpha, tails)?.power;
    Ok(CurvePoint {
        n,
        t_stat,
        p_value,
        power,
    })
}
