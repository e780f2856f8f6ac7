//! Request/response types shared by the command line and the HTTP service.
//!
//! A request names the analysis, the test family and exactly one payload
//! form: raw summaries or a pre-computed effect size. [`analyze`] is a pure
//! function of the request.

use powerkit::effect_size::{
    cohen_d, cohen_dz, cohen_f_from_means, f_squared_from_variances, pooled_sd, EffectKind, EffectSize, GroupSummary,
    PairedDiffSummary, VarianceComponents,
};
use powerkit::power::{
    pvalue_power_curve, solve_min_n, CurvePoint, Design, DesignSpec, Family, PowerResult, SampleSizeResult, Tails,
};
use powerkit::{Error, ENGINE_VERSION};
use serde::{Deserialize, Serialize};

pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_TARGET_POWER: f64 = 0.8;
pub const DEFAULT_DROP_RATE: f64 = 0.10;

fn default_target_power() -> f64 {
    DEFAULT_TARGET_POWER
}

fn default_drop_rate() -> f64 {
    DEFAULT_DROP_RATE
}

fn default_epsilon() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    PostHoc,
    APriori,
    Curve,
}

/// Raw summaries or a pre-computed effect size; exactly one may be present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Payload<S, E> {
    Summaries(S),
    EffectSize(E),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoGroups {
    pub group1: GroupSummary,
    pub group2: GroupSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DInput {
    pub d: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n1: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n2: Option<u64>,
}

/// Paired differences; `n` is needed for post-hoc power only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairedInput {
    pub mean_diff: f64,
    pub sd_diff: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DzInput {
    pub dz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
}

/// Group summaries; `sd_within` overrides the pooled SD when present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnovaGroups {
    pub groups: Vec<GroupSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sd_within: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FInput {
    pub f: f64,
    pub k: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_n: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RmSums {
    pub ss_effect: f64,
    pub ss_error: f64,
    pub k: u64,
    pub m: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_n: Option<u64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct F2Input {
    pub f_squared: f64,
    pub k: u64,
    pub m: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_n: Option<u64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Study {
    IndependentT {
        payload: Payload<TwoGroups, DInput>,
    },
    PairedT {
        payload: Payload<PairedInput, DzInput>,
    },
    #[serde(rename = "oneway_anova")]
    OneWayAnova {
        payload: Payload<AnovaGroups, FInput>,
    },
    RmWithin {
        payload: Payload<RmSums, F2Input>,
    },
}

impl Study {
    pub fn family(&self) -> Family {
        match self {
            Study::IndependentT { .. } => Family::IndependentT,
            Study::PairedT { .. } => Family::PairedT,
            Study::OneWayAnova { .. } => Family::OneWayAnova,
            Study::RmWithin { .. } => Family::RmWithin,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeRequest {
    pub analysis: Analysis,
    #[serde(flatten)]
    pub study: Study,
    pub alpha: f64,
    #[serde(default)]
    pub tails: Tails,
    /// A-priori only.
    #[serde(default = "default_target_power")]
    pub target_power: f64,
    #[serde(default = "default_drop_rate")]
    pub drop_rate: f64,
    /// Curve only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_min: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyzeResponse {
    pub engine_version: &'static str,
    pub request: AnalyzeRequest,
    pub effect: EffectSize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power: Option<PowerResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_size: Option<SampleSizeResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<Vec<CurvePoint>>,
    pub warnings: Vec<String>,
}

fn require(v: Option<u64>, what: &str, analysis: Analysis) -> Result<u64, Error> {
    match (v, analysis) {
        (Some(n), _) => Ok(n),
        (None, Analysis::PostHoc) => Err(Error::Domain(format!("post-hoc power needs {what}"))),
        // the a-priori search and the curve range supply their own sizes
        (None, _) => Ok(0),
    }
}

fn supplied(kind: EffectKind, value: f64) -> Result<EffectSize, Error> {
    if value < 0.0 {
        return Err(Error::Domain(format!("effect size {kind} must be >= 0, got {value}")));
    }
    EffectSize::new(kind, value)
}

/// Turn the payload into an engine design.
pub fn design(req: &AnalyzeRequest) -> Result<Design, Error> {
    let a = req.analysis;
    Ok(match &req.study {
        Study::IndependentT { payload } => match payload {
            Payload::Summaries(TwoGroups { group1, group2 }) => Design::IndependentT {
                effect: cohen_d(group1, group2)?,
                n1: group1.n,
                n2: group2.n,
            },
            Payload::EffectSize(e) => Design::IndependentT {
                effect: supplied(EffectKind::D, e.d)?,
                n1: require(e.n1, "n1", a)?,
                n2: require(e.n2, "n2", a)?,
            },
        },
        Study::PairedT { payload } => match payload {
            Payload::Summaries(p) => {
                let n = require(p.n, "n (number of pairs)", a)?;
                let summary = PairedDiffSummary {
                    mean_diff: p.mean_diff,
                    sd_diff: p.sd_diff,
                    n: n.max(2),
                };
                Design::PairedT {
                    effect: cohen_dz(&summary)?,
                    n_pairs: n,
                }
            }
            Payload::EffectSize(e) => Design::PairedT {
                effect: supplied(EffectKind::Dz, e.dz)?,
                n_pairs: require(e.n, "n (number of pairs)", a)?,
            },
        },
        Study::OneWayAnova { payload } => match payload {
            Payload::Summaries(g) => {
                let sd = match g.sd_within {
                    Some(sd) => sd,
                    None => pooled_sd(&g.groups)?,
                };
                Design::OneWayAnova {
                    effect: cohen_f_from_means(&g.groups, sd)?,
                    k: g.groups.len() as u64,
                    total_n: g.groups.iter().map(|g| g.n).sum(),
                }
            }
            Payload::EffectSize(e) => Design::OneWayAnova {
                effect: supplied(EffectKind::F, e.f)?,
                k: e.k,
                total_n: require(e.total_n, "total_n", a)?,
            },
        },
        Study::RmWithin { payload } => match payload {
            Payload::Summaries(s) => Design::RmWithin {
                effect: f_squared_from_variances(&VarianceComponents::new(s.ss_effect, s.ss_error)?)?,
                k: s.k,
                m: s.m,
                total_n: require(s.total_n, "total_n", a)?,
                epsilon: s.epsilon,
            },
            Payload::EffectSize(e) => Design::RmWithin {
                effect: supplied(EffectKind::FSquared, e.f_squared)?,
                k: e.k,
                m: e.m,
                total_n: require(e.total_n, "total_n", a)?,
                epsilon: e.epsilon,
            },
        },
    })
}

fn curve(req: &AnalyzeRequest) -> Result<Vec<CurvePoint>, Error> {
    let (n_min, n_max) = match (req.n_min, req.n_max) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => return Err(Error::Domain("curve needs n_min and n_max".into())),
    };
    let summary = match &req.study {
        Study::PairedT {
            payload: Payload::Summaries(p),
        } => PairedDiffSummary {
            mean_diff: p.mean_diff,
            sd_diff: p.sd_diff,
            n: n_min,
        },
        // a standardized difference is a mean difference in SD units
        Study::PairedT {
            payload: Payload::EffectSize(e),
        } => PairedDiffSummary {
            mean_diff: e.dz,
            sd_diff: 1.0,
            n: n_min,
        },
        other => {
            return Err(Error::Domain(format!(
                "curves are defined for paired_t only, got {}",
                other.family()
            )))
        }
    };
    pvalue_power_curve(&summary, n_min, n_max, req.alpha, req.tails)
}

/// Run one request through the engine.
pub fn analyze(req: &AnalyzeRequest) -> Result<AnalyzeResponse, Error> {
    let design = design(req)?;
    let effect = design.effect().clone();
    let warnings = effect.warnings();
    let spec = DesignSpec::new(design, req.alpha, req.tails)?;
    let mut response = AnalyzeResponse {
        engine_version: ENGINE_VERSION,
        request: req.clone(),
        effect,
        power: None,
        sample_size: None,
        curve: None,
        warnings,
    };
    match req.analysis {
        Analysis::PostHoc => response.power = Some(spec.power()?),
        Analysis::APriori => response.sample_size = Some(solve_min_n(&spec, req.target_power, req.drop_rate)?),
        Analysis::Curve => response.curve = Some(curve(req)?),
    }
    Ok(response)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn parse(v: serde_json::Value) -> Result<AnalyzeRequest, serde_json::Error> {
        serde_json::from_value(v)
    }

    #[test]
    fn defaults_fill_optional_fields() {
        let req = parse(json!({
            "analysis": "a_priori", "family": "paired_t", "alpha": 0.05,
            "payload": {"summaries": {"mean_diff": -0.29, "sd_diff": 0.64}}
        }))
        .unwrap();
        assert_eq!(req.tails, Tails::Two);
        assert_eq!(req.target_power, 0.8);
        assert_eq!(req.drop_rate, 0.1);
        let s = analyze(&req).unwrap().sample_size.unwrap();
        assert_eq!((s.min_n, s.final_n), (41, 46));
    }

    #[test]
    fn missing_alpha_is_named() {
        let err = parse(json!({
            "analysis": "post_hoc", "family": "paired_t",
            "payload": {"effect_size": {"dz": 0.5, "n": 20}}
        }))
        .unwrap_err();
        assert!(err.to_string().contains("alpha"), "{err}");
    }

    #[test]
    fn two_payload_forms_are_rejected() {
        let err = parse(json!({
            "analysis": "post_hoc", "family": "paired_t", "alpha": 0.05,
            "payload": {"summaries": {"mean_diff": 1, "sd_diff": 2, "n": 9}, "effect_size": {"dz": 0.5, "n": 9}}
        }));
        assert!(err.is_err());
    }

    #[test]
    fn post_hoc_needs_sizes() {
        let req = parse(json!({
            "analysis": "post_hoc", "family": "independent_t", "alpha": 0.05,
            "payload": {"effect_size": {"d": 0.5, "n1": 10}}
        }))
        .unwrap();
        assert!(matches!(analyze(&req), Err(Error::Domain(m)) if m.contains("n2")));
    }

    #[test]
    fn curve_rejects_other_families() {
        let req = parse(json!({
            "analysis": "curve", "family": "oneway_anova", "alpha": 0.05, "n_min": 3, "n_max": 5,
            "payload": {"effect_size": {"f": 0.3, "k": 3}}
        }))
        .unwrap();
        assert!(analyze(&req).is_err());
    }

    #[test]
    fn effect_payload_curve_matches_summaries() {
        let by_summary = parse(json!({
            "analysis": "curve", "family": "paired_t", "alpha": 0.05, "n_min": 3, "n_max": 41,
            "payload": {"summaries": {"mean_diff": 0.29, "sd_diff": 0.64}}
        }))
        .unwrap();
        let by_effect = parse(json!({
            "analysis": "curve", "family": "paired_t", "alpha": 0.05, "n_min": 3, "n_max": 41,
            "payload": {"effect_size": {"dz": 0.29 / 0.64}}
        }))
        .unwrap();
        let a = analyze(&by_summary).unwrap().curve.unwrap();
        let b = analyze(&by_effect).unwrap().curve.unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.p_value - y.p_value).abs() < 1e-12);
            assert_eq!(x.power, y.power);
        }
    }

    #[test]
    fn rm_sums_reproduce_power() {
        let req = parse(json!({
            "analysis": "post_hoc", "family": "rm_within", "alpha": 0.05,
            "payload": {"summaries": {"ss_effect": 2.331, "ss_error": 30.059, "k": 3, "m": 26, "total_n": 78}}
        }))
        .unwrap();
        let p = analyze(&req).unwrap().power.unwrap().power;
        assert!((p - 0.2076).abs() < 2e-3);
    }

    #[test]
    fn negative_supplied_effect_is_a_domain_error() {
        let req = parse(json!({
            "analysis": "a_priori", "family": "paired_t", "alpha": 0.05,
            "payload": {"effect_size": {"dz": -0.4}}
        }))
        .unwrap();
        assert!(matches!(analyze(&req), Err(Error::Domain(_))));
    }
}
