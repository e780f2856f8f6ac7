//! End-to-end regeneration of the shipped study tables.

use std::fs::File;
use std::path::PathBuf;

use powerkit::audit::{audit, audit_with, parse_study_csv, AuditConfig, AuditReport, RowStatus, StudyPayload};
use powerkit::effect_size::{cohen_d, GroupSummary};
use powerkit::power::{power_independent_t, Family, Granularity, Tails};
use powerkit::report::{audit_csv, audit_text};
use powerkit::Execution;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(name: &str, family: Family) -> AuditReport {
    let rows = parse_study_csv(File::open(data(name)).unwrap(), family).unwrap();
    audit(&rows, &AuditConfig::default()).unwrap()
}

fn assert_powers(report: &AuditReport, expected: &[f64], tol: f64) {
    assert_eq!(report.rows.len(), expected.len());
    for (row, want) in report.rows.iter().zip(expected) {
        let got = row.power.unwrap();
        assert!((got - want).abs() <= tol, "{}: power {got:.5} vs {want}", row.label);
    }
}

fn min_ns(report: &AuditReport) -> Vec<u64> {
    report.rows.iter().map(|r| r.min_n.unwrap()).collect()
}

fn final_ns(report: &AuditReport) -> Vec<u64> {
    report.rows.iter().map(|r| r.final_n.unwrap()).collect()
}

#[test]
fn independent_t_table() {
    let r = run("table1_independent_t.csv", Family::IndependentT);
    assert_powers(&r, &[0.1182, 0.2589, 0.3688, 0.1171, 0.0627, 0.0504], 1e-3);
    assert_eq!(min_ns(&r), vec![96, 33, 22, 98, 497, 15701]);
    assert_eq!(final_ns(&r), vec![107, 37, 25, 109, 553, 17446]);
    assert!(r.rows.iter().all(|row| row.granularity == Granularity::PerGroup));
    assert_eq!(r.rows[0].reported_p.as_deref(), Some("ns"));
}

#[test]
fn independent_t_table_from_standard_errors() {
    let rows = parse_study_csv(
        File::open(data("table1_independent_t_se.csv")).unwrap(),
        Family::IndependentT,
    )
    .unwrap();
    let printed = ["0.1414", "0.1414", "0.1414", "0.1414", "0.2263", "0.1414"];
    let printed2 = ["0.1980", "0.3111", "0.1980", "0.3960", "0.5940", "0.4243"];
    assert_eq!(rows.len(), 6);
    for ((row, s1), s2) in rows.iter().zip(printed).zip(printed2) {
        match &row.payload {
            StudyPayload::IndependentT { group1, group2 } => {
                assert_eq!(format!("{:.4}", group1.sd), s1);
                assert_eq!(format!("{:.4}", group2.sd), s2);
            }
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn paired_t_table() {
    let r = run("table2_paired_t.csv", Family::PairedT);
    assert_powers(&r, &[0.6206, 0.9094, 0.9517, 0.3009], 1e-3);
    assert_eq!(min_ns(&r), vec![41, 21, 12, 98]);
    assert_eq!(final_ns(&r), vec![46, 24, 14, 109]);
    assert_eq!(r.rows[3].label, "L1%");
}

#[test]
fn oneway_anova_table() {
    let r = run("table4_oneway_anova.csv", Family::OneWayAnova);
    assert_powers(&r, &[0.4323, 0.5709, 0.5395, 0.9999, 0.8309, 0.1836], 2e-3);
    assert_eq!(min_ns(&r), vec![108, 78, 84, 15, 45, 282]);
    assert_eq!(final_ns(&r), vec![120, 87, 94, 17, 50, 314]);
}

#[test]
fn rm_within_table() {
    let r = run("table5_rm_within.csv", Family::RmWithin);
    let superior = &r.rows[3];
    assert_eq!(superior.status, RowStatus::Ok);
    assert!((superior.power.unwrap() - 0.2076).abs() <= 2e-3);
    assert_eq!(superior.min_n, Some(297));
    for (i, row) in r.rows.iter().enumerate() {
        if i != 3 {
            assert_eq!(
                row.status,
                RowStatus::NotReproducible("missing variance components".into())
            );
        }
    }
}

#[test]
fn single_row_audit_equals_engine_composition() {
    let r = run("table1_independent_t.csv", Family::IndependentT);
    let g1 = GroupSummary::new(0.66, 0.1414, 8).unwrap();
    let g2 = GroupSummary::new(0.49, 0.3111, 8).unwrap();
    let d = cohen_d(&g1, &g2).unwrap();
    let direct = power_independent_t(&d, 8, 8, 0.05, Tails::Two).unwrap();
    assert_eq!(r.rows[1].power, Some(direct.power));
    assert_eq!(r.rows[1].effect.as_ref().unwrap().value(), d.value());
}

#[test]
fn audit_is_deterministic_across_execution_modes() {
    for (name, family) in [
        ("table1_independent_t.csv", Family::IndependentT),
        ("table2_paired_t.csv", Family::PairedT),
        ("table4_oneway_anova.csv", Family::OneWayAnova),
        ("table5_rm_within.csv", Family::RmWithin),
    ] {
        let rows = parse_study_csv(File::open(data(name)).unwrap(), family).unwrap();
        let cfg = AuditConfig::default();
        let par = audit_with(&rows, &cfg, Execution::Parallel).unwrap();
        let seq = audit_with(&rows, &cfg, Execution::Sequential).unwrap();
        assert_eq!(par, seq);
        assert_eq!(audit_csv(&par), audit_csv(&seq));
        assert_eq!(audit_text(&par), audit_text(&run(name, family)));
    }
}

#[test]
fn pooled_estimate_reproduces_printed_sd_column() {
    let rows = parse_study_csv(
        File::open(data("table4_oneway_anova.csv")).unwrap(),
        Family::OneWayAnova,
    )
    .unwrap();
    let printed = [3.43, 3.04, 3.52, 6.89, 4.28, 2.53];
    for (row, sd) in rows.iter().zip(printed) {
        match &row.payload {
            StudyPayload::OneWayAnova { groups, sd_within } => {
                assert_eq!(*sd_within, Some(sd));
                let pooled = powerkit::effect_size::pooled_sd(groups).unwrap();
                assert!((pooled - sd).abs() <= 0.005 + 1e-12, "{}: {pooled}", row.label);
            }
            other => panic!("{other:?}"),
        }
    }
}
