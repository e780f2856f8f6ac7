//! Regenerate the Power / Min N / Final N columns of published summary tables.
//!
//! Input is one CSV per test family. Schemas (header names are exact, a
//! trailing `p` column with the published p-value is optional everywhere,
//! and `#` lines are comments):
//!
//! | family         | header                                                         |
//! |----------------|----------------------------------------------------------------|
//! | `independent_t`| `label,mean1,sd1,n1,mean2,sd2,n2` (`se1`/`se2` instead of SDs) |
//! | `paired_t`     | `label,mean_diff,sd_diff,n`                                    |
//! | `oneway_anova` | `label,mean1,sd1,n1,...,meanK,sdK,nK[,sd_within]`              |
//! | `rm_within`    | `label,ss_effect,ss_error,k,m,n_total,epsilon`                 |
//!
//! Empty `ss_effect`/`ss_error` cells mark a repeated-measures row whose
//! variance components were never published; such rows are reported as not
//! reproducible instead of being estimated.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::effect_size::{
    cohen_d, cohen_dz, cohen_f_from_means, f_squared_from_variances, pooled_sd, sd_from_se, EffectSize, GroupSummary,
    PairedDiffSummary, VarianceComponents,
};
use crate::error::{Error, Result};
use crate::exec::{map_ordered, Execution};
use crate::power::{
    power_independent_t, power_oneway_anova, power_paired_t, power_rm_within, solve_min_n, Design, DesignSpec, Family,
    Granularity, Tails,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum StudyPayload {
    IndependentT {
        group1: GroupSummary,
        group2: GroupSummary,
    },
    PairedT {
        summary: PairedDiffSummary,
    },
    #[serde(rename = "oneway_anova")]
    OneWayAnova {
        groups: Vec<GroupSummary>,
        /// Overrides the pooled estimate when present.
        sd_within: Option<f64>,
    },
    RmWithin {
        variances: Option<VarianceComponents>,
        k: u64,
        m: u64,
        n_total: u64,
        epsilon: f64,
    },
}

impl StudyPayload {
    pub fn family(&self) -> Family {
        match self {
            StudyPayload::IndependentT { .. } => Family::IndependentT,
            StudyPayload::PairedT { .. } => Family::PairedT,
            StudyPayload::OneWayAnova { .. } => Family::OneWayAnova,
            StudyPayload::RmWithin { .. } => Family::RmWithin,
        }
    }
}

/// One row of a published table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub label: String,
    pub payload: StudyPayload,
    /// Published p-value, passed through verbatim.
    pub reported_p: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub alpha: f64,
    pub tails: Tails,
    pub target_power: f64,
    pub drop_rate: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            alpha: 0.05,
            tails: Tails::Two,
            target_power: 0.8,
            drop_rate: 0.10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "detail", rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    /// Power was computed but the target cannot be reached (zero effect, search cap).
    Unreachable(String),
    /// Inputs needed for the computation are missing from the source table.
    NotReproducible(String),
    /// A computation error on this row; the rest of the audit is unaffected.
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub label: String,
    pub family: Family,
    pub effect: Option<EffectSize>,
    pub power: Option<f64>,
    pub min_n: Option<u64>,
    pub achieved_power: Option<f64>,
    pub final_n: Option<u64>,
    pub granularity: Granularity,
    pub reported_p: Option<String>,
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub config: AuditConfig,
    pub rows: Vec<AuditRow>,
}

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

/// Which column layout a header selects.
#[derive(Debug, Clone, PartialEq)]
enum Layout {
    IndependentT { se: [bool; 2] },
    PairedT,
    OneWayAnova { groups: usize, sd_within: bool },
    RmWithin,
}

struct Schema {
    layout: Layout,
    has_p: bool,
}

fn header_error(column: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        line: 1,
        column: column.to_string(),
        message: message.into(),
    }
}

fn expect_columns(headers: &[&str], expected: &[&str]) -> Result<()> {
    if headers.len() < expected.len() {
        let missing = expected[headers.len()];
        return Err(header_error(
            missing,
            format!("missing column, expected header {}", expected.join(",")),
        ));
    }
    for (got, want) in headers.iter().zip(expected) {
        if got != want {
            return Err(header_error(got, format!("unknown column, expected `{want}`")));
        }
    }
    Ok(())
}

fn parse_schema(headers: &[&str], family: Family) -> Result<Schema> {
    let (body, has_p) = match headers.split_last() {
        Some((&"p", rest)) => (rest, true),
        _ => (headers, false),
    };
    let layout = match family {
        Family::PairedT => {
            expect_columns(body, &["label", "mean_diff", "sd_diff", "n"])?;
            Layout::PairedT
        }
        Family::RmWithin => {
            expect_columns(
                body,
                &["label", "ss_effect", "ss_error", "k", "m", "n_total", "epsilon"],
            )?;
            Layout::RmWithin
        }
        Family::IndependentT => {
            let spread = |i: usize| -> Result<bool> {
                let idx = 3 * (i - 1) + 2;
                match body.get(idx) {
                    Some(c) if *c == format!("sd{i}") => Ok(false),
                    Some(c) if *c == format!("se{i}") => Ok(true),
                    Some(c) => Err(header_error(c, format!("unknown column, expected `sd{i}` or `se{i}`"))),
                    None => Err(header_error(&format!("sd{i}"), "missing column")),
                }
            };
            let se = [spread(1)?, spread(2)?];
            let c1 = if se[0] { "se1" } else { "sd1" };
            let c2 = if se[1] { "se2" } else { "sd2" };
            expect_columns(body, &["label", "mean1", c1, "n1", "mean2", c2, "n2"])?;
            Layout::IndependentT { se }
        }
        Family::OneWayAnova => {
            let (triplets, sd_within) = match body.split_last() {
                Some((&"sd_within", rest)) => (rest, true),
                _ => (body, false),
            };
            if triplets.first() != Some(&"label") {
                return Err(header_error(
                    triplets.first().unwrap_or(&""),
                    "unknown column, expected `label`",
                ));
            }
            let cells = &triplets[1..];
            if cells.len() % 3 != 0 || cells.len() < 6 {
                return Err(header_error(
                    cells.last().unwrap_or(&"label"),
                    "expected at least two mean/sd/n group triplets",
                ));
            }
            let groups = cells.len() / 3;
            let mut expected = vec!["label".to_string()];
            for i in 1..=groups {
                expected.extend([format!("mean{i}"), format!("sd{i}"), format!("n{i}")]);
            }
            let expected: Vec<&str> = expected.iter().map(String::as_str).collect();
            expect_columns(triplets, &expected)?;
            Layout::OneWayAnova { groups, sd_within }
        }
    };
    if body.len() != expected_width(&layout) {
        let extra = body[expected_width(&layout).min(body.len())..]
            .first()
            .copied()
            .unwrap_or("");
        return Err(header_error(extra, "unknown column"));
    }
    Ok(Schema { layout, has_p })
}

fn expected_width(layout: &Layout) -> usize {
    match layout {
        Layout::IndependentT { .. } => 7,
        Layout::PairedT => 4,
        Layout::OneWayAnova { groups, sd_within } => 1 + 3 * groups + usize::from(*sd_within),
        Layout::RmWithin => 7,
    }
}

/// Guess the family from a header row.
pub fn detect_family(header: &str) -> Option<Family> {
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    [
        Family::IndependentT,
        Family::PairedT,
        Family::OneWayAnova,
        Family::RmWithin,
    ]
    .into_iter()
    .find(|f| parse_schema(&cols, *f).is_ok())
}

struct Cells<'a> {
    record: &'a csv::StringRecord,
    headers: &'a [String],
    line: u64,
}

impl Cells<'_> {
    fn error(&self, idx: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.headers.get(idx).cloned().unwrap_or_default(),
            message: message.into(),
        }
    }

    fn raw(&self, idx: usize) -> &str {
        self.record.get(idx).unwrap_or("")
    }

    fn real(&self, idx: usize) -> Result<f64> {
        let cell = self.raw(idx);
        match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.error(idx, format!("expected a number, found `{cell}`"))),
        }
    }

    fn optional_real(&self, idx: usize) -> Result<Option<f64>> {
        if self.raw(idx).is_empty() {
            Ok(None)
        } else {
            self.real(idx).map(Some)
        }
    }

    fn positive(&self, idx: usize) -> Result<f64> {
        let v = self.real(idx)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(self.error(idx, format!("must be positive, found {v}")))
        }
    }

    fn count(&self, idx: usize, min: u64) -> Result<u64> {
        let cell = self.raw(idx);
        match cell.parse::<u64>() {
            Ok(v) if v >= min => Ok(v),
            Ok(v) => Err(self.error(idx, format!("must be at least {min}, found {v}"))),
            Err(_) => Err(self.error(idx, format!("expected a whole number, found `{cell}`"))),
        }
    }

    fn group(&self, first: usize, se: bool) -> Result<GroupSummary> {
        let mean = self.real(first)?;
        let spread = self.positive(first + 1)?;
        let n = self.count(first + 2, 2)?;
        let sd = if se {
            sd_from_se(spread, n).map_err(|e| self.error(first + 1, e.to_string()))?
        } else {
            spread
        };
        GroupSummary::new(mean, sd, n).map_err(|e| self.error(first, e.to_string()))
    }
}

fn parse_row(cells: &Cells<'_>, schema: &Schema) -> Result<StudyRow> {
    let label = cells.raw(0).to_string();
    let payload = match &schema.layout {
        Layout::IndependentT { se } => StudyPayload::IndependentT {
            group1: cells.group(1, se[0])?,
            group2: cells.group(4, se[1])?,
        },
        Layout::PairedT => {
            let mean_diff = cells.real(1)?;
            let sd_diff = cells.positive(2)?;
            let n = cells.count(3, 2)?;
            StudyPayload::PairedT {
                summary: PairedDiffSummary::new(mean_diff, sd_diff, n).map_err(|e| cells.error(1, e.to_string()))?,
            }
        }
        Layout::OneWayAnova { groups, sd_within } => {
            let parsed = (0..*groups)
                .map(|i| cells.group(1 + 3 * i, false))
                .collect::<Result<Vec<_>>>()?;
            let sd_within = if *sd_within {
                let idx = 1 + 3 * groups;
                match cells.optional_real(idx)? {
                    Some(v) if v <= 0.0 => return Err(cells.error(idx, format!("must be positive, found {v}"))),
                    other => other,
                }
            } else {
                None
            };
            StudyPayload::OneWayAnova {
                groups: parsed,
                sd_within,
            }
        }
        Layout::RmWithin => {
            let ss_effect = cells.optional_real(1)?;
            let ss_error = cells.optional_real(2)?;
            let variances = match (ss_effect, ss_error) {
                (Some(effect), Some(error)) => {
                    if effect < 0.0 {
                        return Err(cells.error(1, format!("must be >= 0, found {effect}")));
                    }
                    if error <= 0.0 {
                        return Err(cells.error(2, format!("must be positive, found {error}")));
                    }
                    Some(VarianceComponents::new(effect, error).map_err(|e| cells.error(1, e.to_string()))?)
                }
                (None, None) => None,
                (Some(_), None) => return Err(cells.error(2, "ss_error missing while ss_effect is given")),
                (None, Some(_)) => return Err(cells.error(1, "ss_effect missing while ss_error is given")),
            };
            let k = cells.count(3, 1)?;
            let m = cells.count(4, 2)?;
            let n_total = cells.count(5, 2)?;
            if n_total <= k {
                return Err(cells.error(5, format!("n_total must exceed k={k}")));
            }
            let epsilon = cells.real(6)?;
            let lower = 1.0 / (m - 1) as f64;
            if !(epsilon >= lower - 1e-12 && epsilon <= 1.0) {
                return Err(cells.error(6, format!("epsilon must lie in [{lower}, 1], found {epsilon}")));
            }
            StudyPayload::RmWithin {
                variances,
                k,
                m,
                n_total,
                epsilon,
            }
        }
    };
    let reported_p = if schema.has_p {
        Some(cells.raw(expected_width(&schema.layout)).to_string()).filter(|p| !p.is_empty())
    } else {
        None
    };
    Ok(StudyRow {
        label,
        payload,
        reported_p,
    })
}

/// Parse a study table for `family`. SE columns are converted to SDs on load.
pub fn parse_study_csv<R: Read>(mut content: R, family: Family) -> Result<Vec<StudyRow>> {
    let mut text = String::new();
    content.read_to_string(&mut text).map_err(|e| Error::Parse {
        line: 0,
        column: String::new(),
        message: format!("input is not readable UTF-8: {e}"),
    })?;
    // Drop comment lines ourselves so reported line numbers stay physical.
    let mut physical_lines = Vec::new();
    let mut kept = String::with_capacity(text.len());
    for (i, line) in text.lines().enumerate() {
        if !line.trim_start().starts_with('#') {
            physical_lines.push(i as u64 + 1);
            kept.push_str(line);
            kept.push('\n');
        }
    }
    let physical = |line: u64| -> u64 {
        physical_lines
            .get((line as usize).wrapping_sub(1))
            .copied()
            .unwrap_or(line)
    };

    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(kept.as_bytes());
    let csv_error = |e: csv::Error| Error::Parse {
        line: physical(e.position().map_or(0, |p| p.line())),
        column: String::new(),
        message: e.to_string(),
    };
    let headers: Vec<String> = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_string)
        .collect();
    let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();
    let schema = parse_schema(&header_refs, family).map_err(|e| match e {
        Error::Parse { column, message, .. } => Error::Parse {
            line: physical(1),
            column,
            message,
        },
        other => other,
    })?;

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = physical(record.position().map_or(0, |p| p.line()));
        let cells = Cells {
            record: &record,
            headers: &headers,
            line,
        };
        if record.len() != headers.len() {
            return Err(cells.error(
                record.len().min(headers.len().saturating_sub(1)),
                format!("expected {} fields, found {}", headers.len(), record.len()),
            ));
        }
        rows.push(parse_row(&cells, &schema)?);
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// auditing
// ---------------------------------------------------------------------------

/// Regenerate power, minimum N and final N for every row, preserving order.
pub fn audit(rows: &[StudyRow], config: &AuditConfig) -> Result<AuditReport> {
    audit_with(rows, config, Execution::default())
}

pub fn audit_with(rows: &[StudyRow], config: &AuditConfig, exec: Execution) -> Result<AuditReport> {
    if rows.is_empty() {
        return Err(Error::domain("audit needs at least one row"));
    }
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1), got {}", config.alpha)));
    }
    if !(0.0..1.0).contains(&config.drop_rate) {
        return Err(Error::domain(format!(
            "drop rate must lie in [0, 1), got {}",
            config.drop_rate
        )));
    }
    if !(config.target_power > config.alpha && config.target_power < 1.0) {
        return Err(Error::domain(format!(
            "target power must lie in (alpha, 1), got {}",
            config.target_power
        )));
    }
    let rows = map_ordered(rows, exec, |row| audit_row(row, config));
    Ok(AuditReport { config: *config, rows })
}

/// Effect size and design at the published sample size, or `None` when the
/// table lacks the inputs.
pub fn row_design(row: &StudyRow, config: &AuditConfig) -> Result<Option<DesignSpec>> {
    let design = match &row.payload {
        StudyPayload::IndependentT { group1, group2 } => Design::IndependentT {
            effect: cohen_d(group1, group2)?,
            n1: group1.n,
            n2: group2.n,
        },
        StudyPayload::PairedT { summary } => Design::PairedT {
            effect: cohen_dz(summary)?,
            n_pairs: summary.n,
        },
        StudyPayload::OneWayAnova { groups, sd_within } => {
            let sd = match sd_within {
                Some(sd) => *sd,
                None => pooled_sd(groups)?,
            };
            Design::OneWayAnova {
                effect: cohen_f_from_means(groups, sd)?,
                k: groups.len() as u64,
                total_n: groups.iter().map(|g| g.n).sum(),
            }
        }
        StudyPayload::RmWithin { variances: None, .. } => return Ok(None),
        StudyPayload::RmWithin {
            variances: Some(v),
            k,
            m,
            n_total,
            epsilon,
        } => Design::RmWithin {
            effect: f_squared_from_variances(v)?,
            k: *k,
            m: *m,
            total_n: *n_total,
            epsilon: *epsilon,
        },
    };
    DesignSpec::new(design, config.alpha, config.tails).map(Some)
}

fn audit_row(row: &StudyRow, config: &AuditConfig) -> AuditRow {
    let family = row.payload.family();
    let mut out = AuditRow {
        label: row.label.clone(),
        family,
        effect: None,
        power: None,
        min_n: None,
        achieved_power: None,
        final_n: None,
        granularity: family.granularity(),
        reported_p: row.reported_p.clone(),
        status: RowStatus::Ok,
    };
    let spec = match row_design(row, config) {
        Ok(Some(spec)) => spec,
        Ok(None) => {
            out.status = RowStatus::NotReproducible("missing variance components".into());
            return out;
        }
        Err(e) => {
            out.status = RowStatus::Failed(e.to_string());
            return out;
        }
    };
    out.effect = Some(spec.design.effect().clone());
    let power = match &spec.design {
        Design::IndependentT { effect, n1, n2 } => power_independent_t(effect, *n1, *n2, spec.alpha, spec.tails),
        Design::PairedT { effect, n_pairs } => power_paired_t(effect, *n_pairs, spec.alpha, spec.tails),
        Design::OneWayAnova { effect, k, total_n } => power_oneway_anova(effect, *k, *total_n, spec.alpha),
        Design::RmWithin {
            effect,
            k,
            m,
            total_n,
            epsilon,
        } => power_rm_within(effect, *k, *m, *total_n, *epsilon, spec.alpha),
    };
    match power {
        Ok(p) => out.power = Some(p.power),
        Err(e) => {
            out.status = RowStatus::Failed(e.to_string());
            return out;
        }
    }
    match solve_min_n(&spec, config.target_power, config.drop_rate) {
        Ok(s) => {
            out.min_n = Some(s.min_n);
            out.achieved_power = Some(s.achieved_power);
            out.final_n = Some(s.final_n);
        }
        Err(Error::Unreachable { reason, .. }) => out.status = RowStatus::Unreachable(reason),
        Err(e) => out.status = RowStatus::Failed(e.to_string()),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAIRED: &str = "label,mean_diff,sd_diff,n,p\nArea,-0.29,0.64,27,0.029\nNull,0,1,10,\n";

    #[test]
    fn parses_paired_rows_with_p() {
        let rows = parse_study_csv(PAIRED.as_bytes(), Family::PairedT).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].reported_p.as_deref(), Some("0.029"));
        assert_eq!(rows[1].reported_p, None);
        match &rows[0].payload {
            StudyPayload::PairedT { summary } => assert_eq!(summary.n, 27),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_data_section() {
        let rows = parse_study_csv("label,mean_diff,sd_diff,n\n".as_bytes(), Family::PairedT).unwrap();
        assert!(rows.is_empty());
    }

    #[test]
    fn se_columns_are_converted() {
        let csv = "label,mean1,se1,n1,mean2,se2,n2\nRelaxing,0.49,0.05,8,0.42,0.07,8\n";
        let rows = parse_study_csv(csv.as_bytes(), Family::IndependentT).unwrap();
        match &rows[0].payload {
            StudyPayload::IndependentT { group1, group2 } => {
                assert_eq!(format!("{:.4}", group1.sd), "0.1414");
                assert_eq!(format!("{:.4}", group2.sd), "0.1980");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nonpositive_sd_names_line_and_column() {
        let csv = "label,mean_diff,sd_diff,n\nok,1,2,10\n# comment\nbad,1,0,10\n";
        match parse_study_csv(csv.as_bytes(), Family::PairedT) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 4);
                assert_eq!(column, "sd_diff");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_numeric_cell() {
        let csv = "label,mean_diff,sd_diff,n\nx,abc,2,10\n";
        match parse_study_csv(csv.as_bytes(), Family::PairedT) {
            Err(Error::Parse {
                line: 2,
                column,
                message,
            }) => {
                assert_eq!(column, "mean_diff");
                assert!(message.contains("abc"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_header() {
        let csv = "label,mean_diff,sd,n\n";
        match parse_study_csv(csv.as_bytes(), Family::PairedT) {
            Err(Error::Parse { line: 1, column, .. }) => assert_eq!(column, "sd"),
            other => panic!("{other:?}"),
        }
        let csv = "label,mean_diff,sd_diff,n,extra\n";
        assert!(parse_study_csv(csv.as_bytes(), Family::PairedT).is_err());
    }

    #[test]
    fn anova_header_variants() {
        let csv = "label,mean1,sd1,n1,mean2,sd2,n2,mean3,sd3,n3,sd_within,p\nSN,74.70,3.70,16,76.87,3.13,17,74.66,3.46,15,3.43,.082\n";
        let rows = parse_study_csv(csv.as_bytes(), Family::OneWayAnova).unwrap();
        match &rows[0].payload {
            StudyPayload::OneWayAnova { groups, sd_within } => {
                assert_eq!(groups.len(), 3);
                assert_eq!(*sd_within, Some(3.43));
            }
            other => panic!("{other:?}"),
        }
        let one_group = "label,mean1,sd1,n1\n";
        assert!(parse_study_csv(one_group.as_bytes(), Family::OneWayAnova).is_err());
        let gap = "label,mean1,sd1,n1,mean3,sd3,n3\n";
        assert!(parse_study_csv(gap.as_bytes(), Family::OneWayAnova).is_err());
    }

    #[test]
    fn rm_missing_components_are_allowed_but_flagged() {
        let csv = "label,ss_effect,ss_error,k,m,n_total,epsilon\nsup,2.331,30.059,3,26,78,1\nant,,,3,26,78,1\n";
        let rows = parse_study_csv(csv.as_bytes(), Family::RmWithin).unwrap();
        let report = audit(&rows, &AuditConfig::default()).unwrap();
        assert_eq!(report.rows[0].status, RowStatus::Ok);
        assert!(matches!(report.rows[1].status, RowStatus::NotReproducible(_)));
        assert!(report.rows[1].power.is_none());
        let half = "label,ss_effect,ss_error,k,m,n_total,epsilon\nx,2.0,,3,26,78,1\n";
        assert!(parse_study_csv(half.as_bytes(), Family::RmWithin).is_err());
    }

    #[test]
    fn header_errors_point_past_comments() {
        let csv = "# note\n# more\nlabel,mean_diff,sd_dif,n\nA,1,2,10\n";
        match parse_study_csv(csv.as_bytes(), Family::PairedT) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column.as_str()), (3, "sd_dif")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn detect_family_from_header() {
        assert_eq!(detect_family("label,mean_diff,sd_diff,n"), Some(Family::PairedT));
        assert_eq!(
            detect_family("label,mean1,se1,n1,mean2,se2,n2,p"),
            Some(Family::IndependentT)
        );
        assert_eq!(
            detect_family("label,mean1,sd1,n1,mean2,sd2,n2,mean3,sd3,n3"),
            Some(Family::OneWayAnova)
        );
        assert_eq!(
            detect_family("label,ss_effect,ss_error,k,m,n_total,epsilon"),
            Some(Family::RmWithin)
        );
        assert_eq!(detect_family("what,ever"), None);
    }

    #[test]
    fn zero_effect_row_gets_alpha_and_marker() {
        let rows = parse_study_csv(PAIRED.as_bytes(), Family::PairedT).unwrap();
        let report = audit(&rows, &AuditConfig::default()).unwrap();
        let null = &report.rows[1];
        assert!((null.power.unwrap() - 0.05).abs() < 1e-9);
        assert!(matches!(null.status, RowStatus::Unreachable(_)));
        assert_eq!(null.min_n, None);
        assert_eq!(report.rows[0].min_n, Some(41));
        assert_eq!(report.rows[0].final_n, Some(46));
    }

    #[test]
    fn empty_audit_is_rejected() {
        assert!(audit(&[], &AuditConfig::default()).is_err());
    }
}
