//! Verification rows, tolerance budgets and artifact writers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::HarnessError;

/// Fixed 12-significant-digit float formatting for artifacts.
pub fn fmt(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

/// Where the tolerance of a row is spent, each relative to the compared value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Budget {
    pub solver_residual: f64,
    pub quadrature: f64,
    pub bracket_width: f64,
}

impl Budget {
    pub fn max(self, o: Budget) -> Budget {
        Budget {
            solver_residual: self.solver_residual.max(o.solver_residual),
            quadrature: self.quadrature.max(o.quadrature),
            bracket_width: self.bracket_width.max(o.bracket_width),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationRow {
    pub body_id: String,
    pub statistic: String,
    /// Parameters of the instance, e.g. `phi=s^2;omega=1;u=3`.
    pub case: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub backend: String,
    pub error: Option<String>,
    pub budget: Budget,
}

impl VerificationRow {
    pub fn new(body_id: &str, statistic: &str, case: String, lhs: f64, rhs: f64, slack: f64, tolerance: f64) -> Self {
        Self {
            body_id: body_id.into(),
            statistic: statistic.into(),
            case,
            lhs,
            rhs,
            slack,
            tolerance,
            pass: slack >= -tolerance,
            backend: String::new(),
            error: None,
            budget: Budget::default(),
        }
    }

    /// A row whose computation raised; it never passes.
    pub fn failed(body_id: &str, statistic: &str, case: String, err: impl ToString) -> Self {
        Self {
            error: Some(err.to_string()),
            pass: false,
            ..Self::new(body_id, statistic, case, f64::NAN, f64::NAN, f64::NAN, 0.0)
        }
    }

    pub fn with_backend(mut self, backend: impl ToString) -> Self {
        self.backend = backend.to_string();
        self
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }
}

/// Stable sort by body id; campaign order is kept within a body.
pub fn sort_rows(rows: &mut [VerificationRow]) {
    rows.sort_by(|a, b| a.body_id.cmp(&b.body_id));
}

pub fn all_pass(rows: &[VerificationRow]) -> bool {
    rows.iter().all(|r| r.pass)
}

/// Per-statistic counts, worst slack and budget maxima.
pub fn budget_summary(rows: &[VerificationRow]) -> String {
    #[derive(Default)]
    struct Acc {
        rows: usize,
        failed: usize,
        min_slack: f64,
        errors: usize,
        budget: Budget,
    }
    let mut by: BTreeMap<&str, Acc> = BTreeMap::new();
    for r in rows {
        let a = by.entry(&r.statistic).or_insert_with(|| Acc { min_slack: f64::INFINITY, ..Acc::default() });
        a.rows += 1;
        a.failed += usize::from(!r.pass);
        a.errors += usize::from(r.error.is_some());
        if !r.slack.is_nan() {
            a.min_slack = a.min_slack.min(r.slack);
        }
        a.budget = a.budget.max(r.budget);
    }
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<24} {:>6} {:>6} {:>6} {:>18} {:>18} {:>18} {:>18}",
        "statistic", "rows", "failed", "errors", "min_slack", "solver_residual", "quadrature", "bracket_width"
    );
    for (k, a) in by {
        let _ = writeln!(
            s,
            "{:<24} {:>6} {:>6} {:>6} {:>18} {:>18} {:>18} {:>18}",
            k,
            a.rows,
            a.failed,
            a.errors,
            fmt(a.min_slack),
            fmt(a.budget.solver_residual),
            fmt(a.budget.quadrature),
            fmt(a.budget.bracket_width)
        );
    }
    s
}

/// Identifies the run in the first line of every artifact.
#[derive(Clone, Debug)]
pub struct Provenance {
    pub experiment: String,
    pub command: String,
    pub seed: u64,
    pub schema_version: u32,
}

impl Provenance {
    pub fn comment(&self) -> String {
        format!(
            "# experiment={} command={} seed={} schema_version={}",
            self.experiment, self.command, self.seed, self.schema_version
        )
    }

    pub fn json(&self) -> serde_json::Value {
        serde_json::json!({
            "experiment": self.experiment,
            "command": self.command,
            "seed": self.seed,
            "schema_version": self.schema_version,
        })
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, HarnessError> {
    File::create(path).map(BufWriter::new).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
}

fn io(path: &Path) -> impl Fn(std::io::Error) -> HarnessError + '_ {
    move |e| HarnessError::Io(format!("{}: {e}", path.display()))
}

/// CSV with a provenance comment line, then a header and the records.
pub fn write_table(path: &Path, prov: &Provenance, header: &[&str], records: &[Vec<String>]) -> Result<PathBuf, HarnessError> {
    let mut f = create(path)?;
    writeln!(f, "{}", prov.comment()).map_err(io(path))?;
    {
        let mut w = csv::Writer::from_writer(&mut f);
        let csv_err = |e: csv::Error| HarnessError::Io(format!("{}: {e}", path.display()));
        w.write_record(header).map_err(csv_err)?;
        for r in records {
            w.write_record(r).map_err(csv_err)?;
        }
        w.flush().map_err(io(path))?;
    }
    f.flush().map_err(io(path))?;
    Ok(path.to_path_buf())
}

pub const ROW_HEADER: [&str; 13] = [
    "body_id", "statistic", "case", "lhs", "rhs", "slack", "tolerance", "pass", "backend", "error", "solver_residual",
    "quadrature", "bracket_width",
];

pub fn row_record(r: &VerificationRow) -> Vec<String> {
    vec![
        r.body_id.clone(),
        r.statistic.clone(),
        r.case.clone(),
        fmt(r.lhs),
        fmt(r.rhs),
        fmt(r.slack),
        fmt(r.tolerance),
        r.pass.to_string(),
        r.backend.clone(),
        r.error.clone().unwrap_or_default(),
        fmt(r.budget.solver_residual),
        fmt(r.budget.quadrature),
        fmt(r.budget.bracket_width),
    ]
}

pub fn write_rows(path: &Path, prov: &Provenance, rows: &[VerificationRow]) -> Result<PathBuf, HarnessError> {
    let records: Vec<Vec<String>> = rows.iter().map(row_record).collect();
    write_table(path, prov, &ROW_HEADER, &records)
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<PathBuf, HarnessError> {
    let mut f = create(path)?;
    let text = serde_json::to_string_pretty(value).map_err(|e| HarnessError::Io(e.to_string()))?;
    writeln!(f, "{text}").map_err(io(path))?;
    f.flush().map_err(io(path))?;
    Ok(path.to_path_buf())
}

pub fn write_lines(path: &Path, lines: &[String]) -> Result<PathBuf, HarnessError> {
    let mut f = create(path)?;
    for l in lines {
        writeln!(f, "{l}").map_err(io(path))?;
    }
    f.flush().map_err(io(path))?;
    Ok(path.to_path_buf())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_follows_slack() {
        let ok = VerificationRow::new("a", "s", String::new(), 1.0, 1.0, -1e-7, 1e-6);
        let bad = VerificationRow::new("a", "s", String::new(), 1.0, 1.0, -2e-6, 1e-6);
        assert!(ok.pass && !bad.pass);
        assert!(!VerificationRow::failed("a", "s", String::new(), "boom").pass);
    }

    #[test]
    fn floats_have_twelve_digits() {
        assert_eq!(fmt(0.5), "5.00000000000e-1");
        assert_eq!(fmt(4.0 / (3.0 * std::f64::consts::PI)), "4.24413181578e-1");
    }

    #[test]
    fn summary_lists_each_statistic() {
        let rows = vec![
            VerificationRow::new("a", "x", String::new(), 0.0, 0.0, 0.5, 0.0),
            VerificationRow::new("b", "y", String::new(), 0.0, 0.0, -1.0, 0.0),
        ];
        let s = budget_summary(&rows);
        assert_eq!(s.lines().count(), 3);
        assert!(s.lines().nth(2).unwrap().starts_with('y'));
    }
}
