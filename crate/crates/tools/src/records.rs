//! Sweep records and their CSV / JSON files.
//!
//! A CSV table has one row per cell with the columns
//! `<coords…>, theory_train, theory_test, emp_train_mean, emp_train_std,
//! emp_test_mean, emp_test_std, trials, status`. Numbers carry 9 significant
//! digits; empirical fields are empty when no trials ran, and a failed cell
//! has `status = "failed: <reason>"`.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use mapridge_core::stats::Summary;
use serde::Serialize;

use crate::error::{Result, RunError};

pub const RISK_COLUMNS: [&str; 8] = [
    "theory_train",
    "theory_test",
    "emp_train_mean",
    "emp_train_std",
    "emp_test_mean",
    "emp_test_std",
    "trials",
    "status",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Coord {
    Num(f64),
    Text(String),
}

impl From<f64> for Coord {
    fn from(v: f64) -> Self {
        Self::Num(v)
    }
}

impl From<&str> for Coord {
    fn from(v: &str) -> Self {
        Self::Text(v.to_owned())
    }
}

impl Coord {
    fn render(&self) -> String {
        match self {
            Self::Num(v) => fmt_sig9(*v),
            Self::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Self::Num(v) => Some(*v),
            Self::Text(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Empirical {
    pub train_mean: f64,
    pub train_std: f64,
    pub test_mean: f64,
    pub test_std: f64,
}

impl Empirical {
    pub fn new(train: Summary, test: Summary) -> Self {
        Self { train_mean: train.mean, train_std: train.std, test_mean: test.mean, test_std: test.std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub coords: Vec<Coord>,
    pub theory_train: Option<f64>,
    pub theory_test: Option<f64>,
    pub empirical: Option<Empirical>,
    pub trials: usize,
    /// `None` for a successful cell.
    pub error: Option<String>,
    pub wall_time_s: f64,
}

impl SweepRecord {
    pub fn ok(&self) -> bool {
        self.error.is_none()
    }

    pub fn status(&self) -> String {
        match &self.error {
            None => "ok".into(),
            Some(e) => format!("failed: {e}"),
        }
    }

    /// Numeric coordinate `i`.
    pub fn coord(&self, i: usize) -> Option<f64> {
        self.coords.get(i).and_then(Coord::as_f64)
    }

    pub fn label(&self, i: usize) -> Option<&str> {
        match self.coords.get(i) {
            Some(Coord::Text(s)) => Some(s),
            _ => None,
        }
    }
}

/// Records sharing one set of coordinate columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub coord_names: Vec<String>,
    pub records: Vec<SweepRecord>,
}

impl Table {
    pub fn new(name: &str, coord_names: &[&str]) -> Self {
        Self {
            name: name.into(),
            coord_names: coord_names.iter().map(|s| s.to_string()).collect(),
            records: Vec::new(),
        }
    }

    pub fn failed(&self) -> usize {
        self.records.iter().filter(|r| !r.ok()).count()
    }

    pub fn header(&self) -> Vec<String> {
        self.coord_names.iter().cloned().chain(RISK_COLUMNS.iter().map(|s| s.to_string())).collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = Vec<String>> + '_ {
        self.records.iter().map(|r| {
            let opt = |v: Option<f64>| v.map(fmt_sig9).unwrap_or_default();
            let mut row: Vec<String> = r.coords.iter().map(Coord::render).collect();
            row.push(opt(r.theory_train));
            row.push(opt(r.theory_test));
            match &r.empirical {
                Some(e) => {
                    row.push(fmt_sig9(e.train_mean));
                    row.push(fmt_sig9(e.train_std));
                    row.push(fmt_sig9(e.test_mean));
                    row.push(fmt_sig9(e.test_std));
                }
                None => row.extend(std::iter::repeat_n(String::new(), 4)),
            }
            row.push(r.trials.to_string());
            row.push(r.status());
            row
        })
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_rows(path, self.header(), self.rows())
    }
}

/// A table whose columns are all its own, for outputs that are not risk
/// curves (estimator runs, argmin traces).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Coord>>,
}

impl FlatTable {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Coord>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_rows(path, self.columns.clone(), self.rows.iter().map(|r| r.iter().map(Coord::render).collect()))
    }
}

fn write_rows(path: &Path, header: Vec<String>, rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let io = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(err) => RunError::io(path, err),
        other => RunError::io(path, std::io::Error::other(format!("{other:?}"))),
    };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(&header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| RunError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = File::create(path).map_err(|e| RunError::io(path, e))?;
    serde_json::to_writer_pretty(&mut f, value).map_err(|e| RunError::io(path, e.into()))?;
    f.write_all(b"\n").map_err(|e| RunError::io(path, e))
}

/// `%.9g`-style formatting: 9 significant digits, trailing zeros dropped,
/// exponent form outside `[1e-5, 1e9)`.
pub fn fmt_sig9(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_owned()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}
