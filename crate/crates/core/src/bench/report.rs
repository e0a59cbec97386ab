use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::run::{CellResult, ExperimentReport};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 9] = ["classifier", "feature", "dim_h", "dim_w", "corruption", "fraction", "trial", "rate", "wall_ms"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
            ReportFormat::Markdown => "md",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::Config(format!("unknown report format {other:?} (csv, json, markdown)"))),
        }
    }
}

pub fn render_csv(report: &ExperimentReport) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in &report.rows {
        w.write_record([
            r.classifier.clone(),
            r.feature.clone(),
            r.dim_h.to_string(),
            r.dim_w.to_string(),
            r.corruption.clone(),
            r.fraction.to_string(),
            r.trial.to_string(),
            r.rate.to_string(),
            r.wall_ms.map(|v| v.to_string()).unwrap_or_default(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn render_json(report: &ExperimentReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn level_label(kind: &str, fraction: f64) -> String {
    if kind == "none" {
        return "none".into();
    }
    let pct = fraction * 100.0;
    if (pct - pct.round()).abs() < 1e-9 {
        format!("{kind} {:.0}%", pct)
    } else {
        format!("{kind} {:.1}%", pct)
    }
}

fn dim_label(r: &CellResult) -> String {
    if r.dim_w == 1 && !r.feature.starts_with("downsample") {
        r.dim_h.to_string()
    } else {
        format!("{}x{}", r.dim_h, r.dim_w)
    }
}

/// Recognition rates in percent, averaged over trials: one row per method and
/// feature, one column per corruption level, in configuration order.
pub fn render_markdown(report: &ExperimentReport) -> String {
    let mut levels: Vec<(String, String)> = Vec::new();
    let mut lines: Vec<(String, String, String)> = Vec::new();
    for r in &report.rows {
        let level = (r.corruption.clone(), level_label(&r.corruption, r.fraction));
        if !levels.contains(&level) {
            levels.push(level);
        }
        let line = (r.classifier.clone(), r.feature.clone(), dim_label(r));
        if !lines.contains(&line) {
            lines.push(line);
        }
    }
    let trials = report.config.trials;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Recognition rate (%), mean over {trials} trial{}.\n",
        if trials == 1 { "" } else { "s" }
    );
    out.push_str("| Method | Feature | Dim |");
    for (_, label) in &levels {
        let _ = write!(out, " {label} |");
    }
    out.push_str("\n|:--|:--|:--|");
    for _ in &levels {
        out.push_str("--:|");
    }
    out.push('\n');
    for (clf, feature, dim) in &lines {
        let base = feature.split('_').next().unwrap_or(feature);
        let _ = write!(out, "| {clf} | {base} | {dim} |");
        for (_, label) in &levels {
            let rates: Vec<f64> = report
                .rows
                .iter()
                .filter(|r| {
                    &r.classifier == clf && &r.feature == feature && &level_label(&r.corruption, r.fraction) == label
                })
                .map(|r| r.rate)
                .collect();
            let mean = rates.iter().sum::<f64>() / rates.len() as f64;
            if rates.is_empty() || !mean.is_finite() {
                out.push_str(" n/a |");
            } else {
                let _ = write!(out, " {:.2} |", 100.0 * mean);
            }
        }
        out.push('\n');
    }
    out
}

pub fn render(report: &ExperimentReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => render_csv(report),
        ReportFormat::Json => render_json(report),
        ReportFormat::Markdown => render_markdown(report),
    }
}

pub fn emit_report(report: &ExperimentReport, format: ReportFormat, path: &Path) -> Result<()> {
    fs::write(path, render(report, format)).map_err(|e| Error::io(path, e))
}
