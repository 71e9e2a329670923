//! Response matrices: validation, CSV ingestion and moment summaries.
//!
//! A [`ResponseMatrix`] holds one row per respondent and one column per item.
//! Every downstream measure reads it; nothing mutates it after construction.

use std::collections::HashSet;
use std::io::Read;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalization used for variances and covariances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarianceMode {
    /// Divisor `N - 1`.
    #[default]
    Sample,
    /// Divisor `N`.
    Population,
}

impl VarianceMode {
    pub fn divisor(self, n: usize) -> f64 {
        match self {
            VarianceMode::Sample => (n - 1) as f64,
            VarianceMode::Population => n as f64,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VarianceMode::Sample => "sample",
            VarianceMode::Population => "population",
        }
    }
}

impl std::str::FromStr for VarianceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sample" => Ok(VarianceMode::Sample),
            "population" => Ok(VarianceMode::Population),
            other => Err(Error::InvalidParameter(format!(
                "variance mode must be sample or population, got {other:?}"
            ))),
        }
    }
}

/// An N x K table of finite responses with distinct item labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMatrix {
    n_respondents: usize,
    n_items: usize,
    /// Row-major, `values[j * n_items + l]`.
    values: Vec<f64>,
    labels: Vec<String>,
}

impl ResponseMatrix {
    /// Builds a matrix from row-major values, checking every invariant.
    pub fn new(n_respondents: usize, labels: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let n_items = labels.len();
        if n_items == 0 {
            return Err(Error::NoItems);
        }
        if n_respondents < 2 {
            return Err(Error::TooFewRespondents(n_respondents));
        }
        if values.len() != n_respondents * n_items {
            return Err(Error::Shape(format!(
                "{} values for a {}x{} matrix",
                values.len(),
                n_respondents,
                n_items
            )));
        }
        let mut seen = HashSet::with_capacity(n_items);
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonNumericCell {
                row: pos / n_items + 1,
                column: labels[pos % n_items].clone(),
                value: values[pos].to_string(),
            });
        }
        Ok(Self {
            n_respondents,
            n_items,
            values,
            labels,
        })
    }

    /// Builds a matrix from rows, labelling items `item1..itemK`.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let k = rows.first().map_or(0, |r| r.as_ref().len());
        let labels = (1..=k).map(|i| format!("item{i}")).collect();
        Self::with_labels(rows, labels)
    }

    pub fn with_labels<R: AsRef<[f64]>>(rows: &[R], labels: Vec<String>) -> Result<Self> {
        let k = labels.len();
        let mut values = Vec::with_capacity(rows.len() * k);
        for (j, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != k {
                return Err(Error::RaggedRow {
                    row: j + 1,
                    found: row.len(),
                    expected: k,
                });
            }
            values.extend_from_slice(row);
        }
        Self::new(rows.len(), labels, values)
    }

    /// Builds a matrix from item columns of equal length.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C], labels: Vec<String>) -> Result<Self> {
        if columns.len() != labels.len() {
            return Err(Error::Shape(format!(
                "{} columns but {} labels",
                columns.len(),
                labels.len()
            )));
        }
        let n = columns.first().map_or(0, |c| c.as_ref().len());
        if columns.iter().any(|c| c.as_ref().len() != n) {
            return Err(Error::Shape("columns differ in length".into()));
        }
        let k = columns.len();
        let mut values = vec![0.0; n * k];
        for (l, col) in columns.iter().enumerate() {
            for (j, &v) in col.as_ref().iter().enumerate() {
                values[j * k + l] = v;
            }
        }
        Self::new(n, labels, values)
    }

    pub fn n_respondents(&self) -> usize {
        self.n_respondents
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, respondent: usize, item: usize) -> f64 {
        self.values[respondent * self.n_items + item]
    }

    #[inline]
    pub fn row(&self, respondent: usize) -> &[f64] {
        let start = respondent * self.n_items;
        &self.values[start..start + self.n_items]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.n_items)
    }

    pub fn column(&self, item: usize) -> Vec<f64> {
        self.rows().map(|r| r[item]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.n_items).map(|l| self.column(l)).collect()
    }

    /// Mean response of each respondent across items.
    pub fn respondent_means(&self) -> Vec<f64> {
        let k = self.n_items as f64;
        self.rows().map(|r| r.iter().sum::<f64>() / k).collect()
    }

    /// Applies `f(item, value)` to every entry.
    pub fn map_items(&self, f: impl Fn(usize, f64) -> f64) -> Result<Self> {
        let k = self.n_items;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f(i % k, v))
            .collect();
        Self::new(self.n_respondents, self.labels.clone(), values)
    }

    /// Rows reordered so that output row `i` is input row `order[i]`.
    pub fn select_rows(&self, order: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(order.len() * self.n_items);
        for &j in order {
            if j >= self.n_respondents {
                return Err(Error::Shape(format!("row index {j} out of range")));
            }
            values.extend_from_slice(self.row(j));
        }
        Self::new(order.len(), self.labels.clone(), values)
    }

    /// Columns reordered (or subset) so that output item `i` is input item `order[i]`.
    pub fn select_columns(&self, order: &[usize]) -> Result<Self> {
        if let Some(&bad) = order.iter().find(|&&l| l >= self.n_items) {
            return Err(Error::Shape(format!("column index {bad} out of range")));
        }
        let labels = order.iter().map(|&l| self.labels[l].clone()).collect();
        let values = self
            .rows()
            .flat_map(|r| order.iter().map(move |&l| r[l]))
            .collect();
        Self::new(self.n_respondents, labels, values)
    }

    /// Appends columns on the right, keeping existing entries untouched.
    pub fn append_columns(&self, columns: &[Vec<f64>], labels: Vec<String>) -> Result<Self> {
        if columns.len() != labels.len() {
            return Err(Error::Shape("column/label count mismatch".into()));
        }
        if columns.iter().any(|c| c.len() != self.n_respondents) {
            return Err(Error::Shape("appended column has wrong length".into()));
        }
        let k = self.n_items + columns.len();
        let mut all_labels = self.labels.clone();
        all_labels.extend(labels);
        let mut values = Vec::with_capacity(self.n_respondents * k);
        for (j, row) in self.rows().enumerate() {
            values.extend_from_slice(row);
            values.extend(columns.iter().map(|c| c[j]));
        }
        Self::new(self.n_respondents, all_labels, values)
    }

    /// The full item set repeated `times` times; copies get a `_rep<i>` suffix.
    pub fn replicate_items(&self, times: usize) -> Result<Self> {
        if times == 0 {
            return Err(Error::InvalidParameter("replication factor must be >= 1".into()));
        }
        let mut labels = self.labels.clone();
        for rep in 1..times {
            labels.extend(self.labels.iter().map(|l| format!("{l}_rep{rep}")));
        }
        let values = self
            .rows()
            .flat_map(|r| std::iter::repeat_n(r, times).flatten().copied())
            .collect();
        Self::new(self.n_respondents, labels, values)
    }

    /// Writes the matrix in the ingestion CSV format.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", self.labels.join(","))?;
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Reads a header row of item labels followed by one numeric row per respondent.
pub fn load_csv<R: Read>(source: R) -> Result<ResponseMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let labels: Vec<String> = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_owned)
        .collect();
    if labels.is_empty() || (labels.len() == 1 && labels[0].is_empty()) {
        return Err(Error::NoItems);
    }
    let k = labels.len();
    let mut values = Vec::new();
    let mut n = 0;
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        n += 1;
        if record.len() != k {
            return Err(Error::RaggedRow {
                row: n,
                found: record.len(),
                expected: k,
            });
        }
        for (l, cell) in record.iter().enumerate() {
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    return Err(Error::NonNumericCell {
                        row: n,
                        column: labels[l].clone(),
                        value: cell.to_owned(),
                    })
                }
            }
        }
    }
    ResponseMatrix::new(n, labels, values)
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        csv::ErrorKind::Utf8 { pos, err } => Error::Csv(format!(
            "invalid UTF-8 at record {}: {err}",
            pos.map_or(0, |p| p.record())
        )),
        other => Error::Csv(format!("{other:?}")),
    }
}

/// Totals, item variances and the item covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats {
    pub total_scores: Vec<f64>,
    pub item_variances: Vec<f64>,
    pub total_variance: f64,
    pub covariance: DMatrix<f64>,
}

pub fn summarize(m: &ResponseMatrix, mode: VarianceMode) -> SummaryStats {
    let n = m.n_respondents();
    let k = m.n_items();
    let div = mode.divisor(n);

    let total_scores: Vec<f64> = m.rows().map(|r| r.iter().sum()).collect();
    let means: Vec<f64> = (0..k)
        .map(|l| m.rows().map(|r| r[l]).sum::<f64>() / n as f64)
        .collect();

    let mut covariance = DMatrix::zeros(k, k);
    for a in 0..k {
        for b in a..k {
            let s: f64 = m
                .rows()
                .map(|r| (r[a] - means[a]) * (r[b] - means[b]))
                .sum();
            covariance[(a, b)] = s / div;
            covariance[(b, a)] = s / div;
        }
    }
    let item_variances = (0..k).map(|l| covariance[(l, l)]).collect();
    let total_variance = variance(&total_scores, mode);

    SummaryStats {
        total_scores,
        item_variances,
        total_variance,
        covariance,
    }
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub(crate) fn variance(xs: &[f64], mode: VarianceMode) -> f64 {
    let mu = mean(xs);
    xs.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / mode.divisor(xs.len())
}
