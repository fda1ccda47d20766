//! Table writers. Numbers are written in the shortest form that parses back
//! to the same `f64`.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use specreg::{ExperimentSummary, Rule};

use crate::args::Format;

pub fn num(v: f64) -> String {
    format!("{v:?}")
}

pub const ERRORS_HEADER: [&str; 4] = ["delta", "rule", "mean_error", "std_error"];
pub const KS_HEADER: [&str; 4] = ["delta", "rule", "mean_k", "std_k"];
pub const BOXPLOT_HEADER: [&str; 7] = [
    "delta",
    "median",
    "q25",
    "q75",
    "whisker_lo",
    "whisker_hi",
    "n_outliers",
];
pub const OUTLIERS_HEADER: [&str; 2] = ["delta", "k_es"];

#[derive(Debug, Serialize)]
struct ErrorRow {
    delta: f64,
    rule: Rule,
    mean_error: f64,
    std_error: f64,
}

#[derive(Debug, Serialize)]
struct KRow {
    delta: f64,
    rule: Rule,
    mean_k: f64,
    std_k: f64,
}

#[derive(Debug, Serialize)]
struct BoxRow {
    delta: f64,
    median: f64,
    q25: f64,
    q75: f64,
    whisker_lo: f64,
    whisker_hi: f64,
    n_outliers: usize,
    n_outside_box: usize,
    outliers: Vec<f64>,
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))
}

pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// Writes the error, truncation-level and boxplot tables into `dir`.
pub fn write_summary(
    dir: &Path,
    summary: &ExperimentSummary,
    format: Format,
) -> Result<Vec<String>> {
    let errors: Vec<ErrorRow> = summary
        .stats
        .iter()
        .map(|s| ErrorRow {
            delta: s.delta,
            rule: s.rule,
            mean_error: s.mean_error,
            std_error: s.std_error,
        })
        .collect();
    let ks: Vec<KRow> = summary
        .stats
        .iter()
        .map(|s| KRow {
            delta: s.delta,
            rule: s.rule,
            mean_k: s.mean_k,
            std_k: s.std_k,
        })
        .collect();
    let boxes: Vec<BoxRow> = summary
        .boxplots
        .iter()
        .map(|b| BoxRow {
            delta: b.delta,
            median: b.stats.median,
            q25: b.stats.q25,
            q75: b.stats.q75,
            whisker_lo: b.stats.whisker_lo,
            whisker_hi: b.stats.whisker_hi,
            n_outliers: b.stats.outliers.len(),
            n_outside_box: b.stats.n_outside_box,
            outliers: b.stats.outliers.clone(),
        })
        .collect();
    match format {
        Format::Csv => {
            write_csv(
                &dir.join("errors.csv"),
                &ERRORS_HEADER,
                errors.iter().map(|r| {
                    vec![
                        num(r.delta),
                        r.rule.to_string(),
                        num(r.mean_error),
                        num(r.std_error),
                    ]
                }),
            )?;
            write_csv(
                &dir.join("ks.csv"),
                &KS_HEADER,
                ks.iter().map(|r| {
                    vec![
                        num(r.delta),
                        r.rule.to_string(),
                        num(r.mean_k),
                        num(r.std_k),
                    ]
                }),
            )?;
            write_csv(
                &dir.join("boxplot.csv"),
                &BOXPLOT_HEADER,
                boxes.iter().map(|b| {
                    vec![
                        num(b.delta),
                        num(b.median),
                        num(b.q25),
                        num(b.q75),
                        num(b.whisker_lo),
                        num(b.whisker_hi),
                        b.n_outliers.to_string(),
                    ]
                }),
            )?;
            write_csv(
                &dir.join("boxplot_outliers.csv"),
                &OUTLIERS_HEADER,
                boxes
                    .iter()
                    .flat_map(|b| b.outliers.iter().map(move |o| vec![num(b.delta), num(*o)])),
            )?;
            Ok(vec![
                "errors.csv".into(),
                "ks.csv".into(),
                "boxplot.csv".into(),
                "boxplot_outliers.csv".into(),
            ])
        }
        Format::Json => {
            write_json(&dir.join("errors.json"), &errors)?;
            write_json(&dir.join("ks.json"), &ks)?;
            write_json(&dir.join("boxplot.json"), &boxes)?;
            Ok(vec![
                "errors.json".into(),
                "ks.json".into(),
                "boxplot.json".into(),
            ])
        }
    }
}
