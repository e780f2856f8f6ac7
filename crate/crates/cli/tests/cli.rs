use std::path::PathBuf;
use std::process::{Command, Output};

fn powerkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_powerkit"))
        .args(args)
        .output()
        .unwrap()
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(name)
        .display()
        .to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn audit_detects_family_from_header() {
    let o = powerkit(&["audit", &data("table2_paired_t.csv"), "--format", "csv"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("# alpha=0.05 tails=two target_power=0.8 drop_rate=0.1\n"));
    assert!(out.contains("Area,paired_t,dz,0.4531,0.6206,41,46,pairs"), "{out}");
    assert!(out.contains("L1%,"));
}

#[test]
fn audit_respects_settings() {
    let o = powerkit(&[
        "audit",
        &data("table1_independent_t_se.csv"),
        "--power",
        "0.9",
        "--drop-rate",
        "0",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(
        out.starts_with("alpha=0.05 tails=two target_power=0.9 drop_rate=0"),
        "{out}"
    );
}

#[test]
fn rm_audit_flags_missing_components() {
    let o = powerkit(&["audit", &data("table5_rm_within.csv")]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o)
            .matches("not reproducible: missing variance components")
            .count(),
        4
    );
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["posthoc", "paired-t", "--dz", "0.3"],
        vec!["posthoc", "paired-t", "--dz", "0.3", "--n", "10", "--m1", "2"],
        vec!["curve", "independent-t", "--d", "0.5", "--n-min", "3", "--n-max", "5"],
        vec!["apriori", "paired-t", "--mean-diff", "1"],
        vec!["audit", "/nonexistent/file.csv"],
        vec!["posthoc", "no-such-family"],
        vec!["apriori", "oneway-anova", "--group", "1,2"],
    ] {
        let o = powerkit(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn computation_errors_exit_1_with_one_line() {
    for args in [
        vec!["apriori", "paired-t", "--dz", "0"],
        vec![
            "posthoc",
            "independent-t",
            "--d",
            "0.5",
            "--n1",
            "8",
            "--n2",
            "8",
            "--alpha",
            "2",
        ],
        vec![
            "posthoc",
            "rm-within",
            "--f2",
            "0.1",
            "--k",
            "3",
            "--m",
            "26",
            "--n",
            "78",
            "--epsilon",
            "0.01",
        ],
    ] {
        let o = powerkit(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    }
}

#[test]
fn effect_size_and_summaries_agree() {
    let a = stdout(&powerkit(&[
        "posthoc",
        "paired-t",
        "--mean-diff",
        "-0.29",
        "--sd-diff",
        "0.64",
        "--n",
        "27",
    ]));
    let b = stdout(&powerkit(&[
        "posthoc",
        "paired-t",
        "--dz",
        &(0.29f64 / 0.64).to_string(),
        "--n",
        "27",
    ]));
    assert!(a.contains("power: 0.6206"), "{a}");
    assert_eq!(a.lines().last(), b.lines().last());
}

#[test]
fn anova_groups_on_the_command_line() {
    let o = powerkit(&[
        "apriori",
        "oneway-anova",
        "--group",
        "74.70,3.70,16",
        "--group",
        "76.87,3.13,17",
        "--group",
        "74.66,3.46,15",
        "--sd-within",
        "3.43",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(
        out.contains("min N: 108 (total)") && out.contains("final N: 120 (total)"),
        "{out}"
    );
}
