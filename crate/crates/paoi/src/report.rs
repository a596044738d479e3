//! Sweep report CSV.
//!
//! ```text
//! lambda,sim_paoi_mean,sim_paoi_ci95,method,bound_paoi,rel_error
//! 0.05,20.99...,0.03...,kingman,30.5...,0.45...
//! ...
//! method,error_percent
//! kingman,35.3...
//! ```
//!
//! Numbers carry 12 significant digits; empty cells mark bounds that could
//! not be evaluated.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use paoi_core::bounds::Method;

use crate::number::{format_sig, parse_number};
use crate::sweep::{MethodSummary, SweepReport, SweepRow};
use crate::{Error, Result};

pub const ROW_HEADER: [&str; 6] = [
    "lambda",
    "sim_paoi_mean",
    "sim_paoi_ci95",
    "method",
    "bound_paoi",
    "rel_error",
];
pub const SUMMARY_HEADER: [&str; 2] = ["method", "error_percent"];

fn cell(x: Option<f64>) -> String {
    x.map(format_sig).unwrap_or_default()
}

pub fn write_report<W: Write>(report: &SweepReport, out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    w.write_record(ROW_HEADER)?;
    for r in &report.rows {
        w.write_record([
            format_sig(r.lambda),
            format_sig(r.sim_paoi_mean),
            format_sig(r.sim_paoi_ci95),
            r.method.map(|m| m.name().to_string()).unwrap_or_default(),
            cell(r.bound_paoi),
            cell(r.rel_error),
        ])?;
    }
    w.write_record(SUMMARY_HEADER)?;
    for s in &report.summary {
        w.write_record([s.method.name().to_string(), cell(s.error_percent)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn report_to_string(report: &SweepReport) -> String {
    let mut buf = Vec::new();
    write_report(report, &mut buf).expect("in-memory write");
    String::from_utf8(buf).expect("ascii output")
}

fn number(field: &str, what: &str, line: u64) -> std::result::Result<f64, String> {
    parse_number(field).ok_or_else(|| format!("line {line}: bad {what} `{field}`"))
}

fn optional(field: &str, what: &str, line: u64) -> std::result::Result<Option<f64>, String> {
    if field.is_empty() {
        Ok(None)
    } else {
        number(field, what, line).map(Some)
    }
}

fn method(field: &str, line: u64) -> std::result::Result<Method, String> {
    field
        .parse()
        .map_err(|_| format!("line {line}: unknown method `{field}`"))
}

/// Parses what [`write_report`] produces. Issues and extrapolation notes
/// are not part of the file and come back empty.
pub fn read_report<R: Read>(input: R) -> std::result::Result<SweepReport, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut report = SweepReport::default();
    let mut in_summary = false;
    let mut seen_header = false;
    for rec in reader.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let line = rec.position().map_or(0, |p| p.line());
        let fields: Vec<&str> = rec.iter().collect();
        if !seen_header {
            if fields != ROW_HEADER {
                return Err(format!(
                    "line {line}: expected header {}",
                    ROW_HEADER.join(",")
                ));
            }
            seen_header = true;
            continue;
        }
        if !in_summary && fields == SUMMARY_HEADER {
            in_summary = true;
            continue;
        }
        if in_summary {
            let [m, e] = fields[..] else {
                return Err(format!("line {line}: expected 2 summary fields"));
            };
            report.summary.push(MethodSummary {
                method: method(m, line)?,
                error_percent: optional(e, "error_percent", line)?,
            });
        } else {
            let [l, mean, ci, m, b, rel] = fields[..] else {
                return Err(format!("line {line}: expected 6 row fields"));
            };
            report.rows.push(SweepRow {
                lambda: number(l, "lambda", line)?,
                sim_paoi_mean: number(mean, "sim_paoi_mean", line)?,
                sim_paoi_ci95: number(ci, "sim_paoi_ci95", line)?,
                method: if m.is_empty() {
                    None
                } else {
                    Some(method(m, line)?)
                },
                bound_paoi: optional(b, "bound_paoi", line)?,
                rel_error: optional(rel, "rel_error", line)?,
            });
        }
    }
    if !seen_header {
        return Err("empty report".into());
    }
    if !in_summary {
        return Err("missing summary block".into());
    }
    Ok(report)
}

pub fn save_report(report: &SweepReport, path: &Path) -> Result<()> {
    std::fs::write(path, report_to_string(report)).map_err(|e| Error::io(path, e))
}

pub fn load_report(path: &Path) -> Result<SweepReport> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_report(file).map_err(|m| Error::parse(path, m))
}

/// Plain-text table of per-method error percents.
pub fn render_summary(report: &SweepReport) -> String {
    let mut out = String::new();
    let mut lambdas: Vec<f64> = report.rows.iter().map(|r| r.lambda).collect();
    lambdas.dedup();
    if let (Some(lo), Some(hi)) = (lambdas.first(), lambdas.last()) {
        let _ = writeln!(
            out,
            "{} grid points, lambda {} .. {}",
            lambdas.len(),
            format_sig(*lo),
            format_sig(*hi)
        );
    }
    if report.summary.is_empty() {
        out.push_str("no bounds evaluated\n");
        return out;
    }
    let _ = writeln!(
        out,
        "{:<14} {:>14} {:>8}",
        "method", "error_percent", "points"
    );
    for s in &report.summary {
        let points = report
            .rows
            .iter()
            .filter(|r| r.method == Some(s.method) && r.bound_paoi.is_some())
            .count();
        let err = s
            .error_percent
            .map_or_else(|| "n/a".to_string(), |e| format!("{e:.2}%"));
        let _ = writeln!(out, "{:<14} {:>14} {:>8}", s.method.name(), err, points);
    }
    out
}
