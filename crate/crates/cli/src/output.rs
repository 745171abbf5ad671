use std::fs;
use std::io::Write;
use std::path::Path;

use fockforge::Report;
use serde::Serialize;

use crate::config::ConfigError;
use crate::suite::SuiteOutcome;
use crate::sweep::{SweepRow, SweepSpec};

pub fn json<T: Serialize>(body: &T) -> String {
    let mut s = serde_json::to_string_pretty(body).expect("plain data serializes");
    s.push('\n');
    s
}

fn csv_body(header: Vec<String>, records: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    for r in records {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn join_params(report: &Report) -> String {
    report
        .params
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

/// One row per entry: `section,name,params,n_max,margin,max_residual,min_fidelity,warnings,passed`.
pub fn suite_csv(outcome: &SuiteOutcome) -> String {
    let header = [
        "section",
        "name",
        "params",
        "n_max",
        "margin",
        "max_residual",
        "min_fidelity",
        "warnings",
        "passed",
    ];
    csv_body(
        header.iter().map(|s| s.to_string()).collect(),
        outcome.entries.iter().map(|e| {
            vec![
                e.section.to_string(),
                e.report.name.clone(),
                join_params(&e.report),
                e.report.n_max.to_string(),
                e.report.margin.to_string(),
                e.report.max_residual().to_string(),
                e.report.min_fidelity().to_string(),
                e.warnings.len().to_string(),
                e.passed.to_string(),
            ]
        }),
    )
}

/// Long format `name,metric,value` for a single protocol run.
pub fn metrics_csv(report: &Report, extra: &[(String, f64)], passed: bool) -> String {
    let name = &report.name;
    let mut rows: Vec<Vec<String>> = Vec::new();
    for (k, v) in &report.fidelities {
        rows.push(vec![name.clone(), format!("fidelity_{k}"), v.to_string()]);
    }
    for (k, v) in &report.residuals {
        rows.push(vec![name.clone(), format!("residual_{k}"), v.to_string()]);
    }
    for (k, v) in extra {
        rows.push(vec![name.clone(), k.clone(), v.to_string()]);
    }
    rows.push(vec![
        name.clone(),
        "warnings".into(),
        report.warnings.len().to_string(),
    ]);
    rows.push(vec![name.clone(), "passed".into(), passed.to_string()]);
    csv_body(vec!["name".into(), "metric".into(), "value".into()], rows)
}

pub fn sweep_csv(spec: &SweepSpec, rows: &[SweepRow]) -> String {
    csv_body(spec.header(), rows.iter().map(|r| spec.record(r)))
}

/// Writes the body to `path`, or to `stdout` when no path is given.
pub fn emit(body: &str, path: Option<&Path>, stdout: &mut dyn Write) -> Result<(), ConfigError> {
    match path {
        Some(p) => fs::write(p, body)?,
        None => stdout.write_all(body.as_bytes())?,
    }
    Ok(())
}
