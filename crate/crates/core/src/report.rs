//! Measure timing and report emission.
//!
//! A [`Report`] is a `meta` block plus flat rows of
//! `(dataset, measure, value, seconds)`. It renders as JSON (stable key
//! order), CSV (`dataset,measure,value,seconds`, four decimals) or an aligned
//! text table with one column per measure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::data::ResponseMatrix;
use crate::error::{Error, Result};
use crate::measures::{evaluate, Measure, MeasureParams, MeasureValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    Json,
    Csv,
    #[default]
    Table,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "table" => Ok(OutputFormat::Table),
            other => Err(Error::InvalidParameter(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub dataset: String,
    pub measure: String,
    /// `None` when the measure failed; `note` then says why.
    pub value: Option<f64>,
    pub seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMeta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub parameters: BTreeMap<String, String>,
}

impl ReportMeta {
    pub fn new(command: &str, seed: u64, parameters: BTreeMap<String, String>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            parameters,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub meta: ReportMeta,
    pub rows: Vec<ReportRow>,
}

impl Report {
    /// Copy with every timing field zeroed, for byte-level comparisons.
    pub fn without_timing(&self) -> Self {
        let mut out = self.clone();
        out.rows.iter_mut().for_each(|r| r.seconds = 0.0);
        out
    }
}

/// A measure outcome with its wall-clock cost.
#[derive(Debug)]
pub struct TimedMeasure {
    pub measure: Measure,
    pub outcome: Result<MeasureValue>,
    pub seconds: f64,
}

impl TimedMeasure {
    pub fn into_row(self, dataset: &str) -> ReportRow {
        let (value, note) = match self.outcome {
            Ok(v) => (Some(v.value), v.notes),
            Err(e) => (None, Some(format!("{}: {e}", e.code()))),
        };
        ReportRow {
            dataset: dataset.to_string(),
            measure: self.measure.name().to_string(),
            value,
            seconds: self.seconds,
            note,
        }
    }
}

/// Evaluates each measure in order, timing each on the monotonic clock.
pub fn time_measures(
    m: &ResponseMatrix,
    measures: &[Measure],
    params: &MeasureParams,
) -> Vec<TimedMeasure> {
    measures
        .iter()
        .map(|&measure| {
            let clock = Instant::now();
            let outcome = evaluate(m, measure, params);
            TimedMeasure {
                measure,
                outcome,
                seconds: clock.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

pub fn emit_report(report: &Report, format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
            out.push(b'\n');
            out
        }
        OutputFormat::Csv => emit_csv(&report.rows).into_bytes(),
        OutputFormat::Table => emit_table(&report.rows).into_bytes(),
    }
}

fn fmt_value(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| format!("{v:.4}"))
}

fn emit_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from("dataset,measure,value,seconds\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:.4}",
            r.dataset,
            r.measure,
            fmt_value(r.value),
            r.seconds
        );
    }
    out
}

fn emit_table(rows: &[ReportRow]) -> String {
    let mut datasets: Vec<&str> = Vec::new();
    let mut measures: Vec<&str> = Vec::new();
    let mut cells: BTreeMap<(&str, &str), String> = BTreeMap::new();
    for r in rows {
        if !datasets.contains(&r.dataset.as_str()) {
            datasets.push(&r.dataset);
        }
        if !measures.contains(&r.measure.as_str()) {
            measures.push(&r.measure);
        }
        let cell = r.value.map_or_else(|| "NA".to_string(), |v| format!("{v:.4}"));
        cells.insert((&r.dataset, &r.measure), cell);
    }

    let first_width = datasets.iter().map(|d| d.len()).chain([7]).max().unwrap_or(7);
    let widths: Vec<usize> = measures.iter().map(|m| m.len().max(6)).collect();
    let mut out = format!("{:<first_width$}", "dataset");
    for (m, w) in measures.iter().zip(&widths) {
        let _ = write!(out, "  {m:>w$}");
    }
    out.push('\n');
    for d in &datasets {
        let _ = write!(out, "{d:<first_width$}");
        for (m, w) in measures.iter().zip(&widths) {
            let cell = cells.get(&(*d, *m)).map_or("", String::as_str);
            let _ = write!(out, "  {cell:>w$}");
        }
        out.push('\n');
    }
    out
}

/// Reads back the CSV emitted by [`emit_report`].
pub fn parse_csv_rows(text: &str) -> Result<Vec<ReportRow>> {
    let mut lines = text.lines();
    if lines.next() != Some("dataset,measure,value,seconds") {
        return Err(Error::Csv("missing report header".into()));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(Error::RaggedRow {
                    row: i + 1,
                    found: fields.len(),
                    expected: 4,
                });
            }
            let num = |s: &str| {
                s.parse::<f64>().map_err(|_| Error::NonNumericCell {
                    row: i + 1,
                    column: "value".into(),
                    value: s.into(),
                })
            };
            Ok(ReportRow {
                dataset: fields[0].to_string(),
                measure: fields[1].to_string(),
                value: if fields[2].is_empty() { None } else { Some(num(fields[2])?) },
                seconds: num(fields[3])?,
                note: None,
            })
        })
        .collect()
}
