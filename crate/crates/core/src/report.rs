//! Text and CSV rendering. Power and effect sizes are printed to 4 decimals,
//! sample sizes as integers; everything upstream stays at full precision.

use std::fmt::Write as _;

use crate::audit::{AuditReport, AuditRow, RowStatus};
use crate::power::{CurvePoint, PowerResult, SampleSizeResult};

pub fn fixed4(v: f64) -> String {
    format!("{v:.4}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn status_cell(status: &RowStatus) -> String {
    match status {
        RowStatus::Ok => "ok".into(),
        RowStatus::Unreachable(why) => format!("unreachable: {why}"),
        RowStatus::NotReproducible(why) => format!("not reproducible: {why}"),
        RowStatus::Failed(why) => format!("error: {why}"),
    }
}

const AUDIT_COLUMNS: [&str; 10] = [
    "label",
    "family",
    "effect_kind",
    "effect_size",
    "power",
    "min_n",
    "final_n",
    "granularity",
    "reported_p",
    "status",
];

fn audit_cells(row: &AuditRow) -> [String; 10] {
    [
        row.label.clone(),
        row.family.to_string(),
        row.effect.as_ref().map(|e| e.kind().to_string()).unwrap_or_default(),
        row.effect.as_ref().map(|e| fixed4(e.value())).unwrap_or_default(),
        row.power.map(fixed4).unwrap_or_default(),
        opt(row.min_n),
        opt(row.final_n),
        row.granularity.to_string(),
        row.reported_p.clone().unwrap_or_default(),
        status_cell(&row.status),
    ]
}

fn config_line(report: &AuditReport) -> String {
    let c = &report.config;
    format!(
        "alpha={} tails={} target_power={} drop_rate={}",
        c.alpha, c.tails, c.target_power, c.drop_rate
    )
}

/// Audit report as CSV, preceded by a `#` line echoing the configuration.
pub fn audit_csv(report: &AuditReport) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    // writing to a Vec cannot fail
    w.write_record(AUDIT_COLUMNS).expect("in-memory csv");
    for row in &report.rows {
        w.write_record(audit_cells(row)).expect("in-memory csv");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv");
    format!("# {}\n{body}", config_line(report))
}

/// Audit report as an aligned text table.
pub fn audit_text(report: &AuditReport) -> String {
    let rows: Vec<[String; 10]> = report.rows.iter().map(audit_cells).collect();
    let mut widths = AUDIT_COLUMNS.map(str::len);
    for r in &rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, "{}", config_line(report));
    let line = |cells: &[&str]| -> String {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
            if i + 1 == cells.len() {
                s.push_str(cell);
            } else {
                let _ = write!(s, "{cell:<w$}  ");
            }
        }
        s.trim_end().to_string()
    };
    let _ = writeln!(out, "{}", line(&AUDIT_COLUMNS));
    for r in &rows {
        let cells: Vec<&str> = r.iter().map(String::as_str).collect();
        let _ = writeln!(out, "{}", line(&cells));
    }
    out
}

/// Text block for a post-hoc result.
pub fn power_text(r: &PowerResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "effect size {}: {}", r.effect.kind(), fixed4(r.effect.value()));
    let _ = writeln!(out, "noncentrality: {}", fixed4(r.noncentrality));
    match r.df2 {
        Some(df2) => {
            let _ = writeln!(out, "df: {}, {}", fixed4(r.df1.get()), fixed4(df2.get()));
        }
        None => {
            let _ = writeln!(out, "df: {}", fixed4(r.df1.get()));
        }
    }
    let _ = writeln!(out, "critical value: {}", fixed4(r.critical_value));
    let _ = writeln!(out, "power: {}", fixed4(r.power));
    out
}

/// Text block for an a-priori result.
pub fn sample_size_text(s: &SampleSizeResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "min N: {} ({})", s.min_n, s.granularity);
    let _ = writeln!(out, "achieved power: {}", fixed4(s.achieved_power));
    let _ = writeln!(out, "drop rate: {}", s.drop_rate);
    let _ = writeln!(out, "final N: {} ({})", s.final_n, s.granularity);
    out
}

/// Curve points as CSV with a header line.
pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("n,t_stat,p_value,power\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            p.n,
            fixed4(p.t_stat),
            fixed4(p.p_value),
            fixed4(p.power)
        );
    }
    out
}
