//! JSON and CSV serialisation of reports.
//!
//! Floats are written with 17 significant digits so that a rerun with the
//! same configuration reproduces every file byte for byte. Non-finite values
//! become `null` in JSON and are written verbatim in CSV.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::Value;

use crate::error::Result;
use crate::verify::{DecayTable, EquivTable, IdentityReport, McReport, MomentRow};

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Num(v)
    }
}

impl From<usize> for Field {
    fn from(v: usize) -> Self {
        Field::Int(v as u64)
    }
}

impl From<u64> for Field {
    fn from(v: u64) -> Self {
        Field::Int(v)
    }
}

impl From<bool> for Field {
    fn from(v: bool) -> Self {
        Field::Bool(v)
    }
}

impl From<&str> for Field {
    fn from(v: &str) -> Self {
        Field::Text(v.to_string())
    }
}

impl From<String> for Field {
    fn from(v: String) -> Self {
        Field::Text(v)
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

impl Field {
    fn json(&self) -> String {
        match self {
            Field::Num(v) if v.is_finite() => num(*v),
            Field::Num(_) => "null".into(),
            Field::Int(v) => v.to_string(),
            Field::Text(s) => Value::String(s.clone()).to_string(),
            Field::Bool(b) => b.to_string(),
        }
    }

    fn csv(&self) -> String {
        match self {
            Field::Num(v) if v.is_finite() => num(*v),
            Field::Num(v) => v.to_string(),
            Field::Int(v) => v.to_string(),
            Field::Bool(b) => b.to_string(),
            Field::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Field::Text(s) => s.clone(),
        }
    }
}

/// Rows sharing one set of named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Field>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// A single row becomes one object; anything else an array of objects.
    Json,
    Csv,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Field>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match the header");
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: Table) {
        assert_eq!(self.columns, other.columns);
        self.rows.extend(other.rows);
    }

    fn object(&self, row: &[Field]) -> String {
        let body: Vec<String> = self
            .columns
            .iter()
            .zip(row)
            .map(|(c, f)| format!("\"{c}\": {}", f.json()))
            .collect();
        format!("{{{}}}", body.join(", "))
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json if self.rows.len() == 1 => format!("{}\n", self.object(&self.rows[0])),
            Format::Json => {
                let mut s = String::from("[");
                for (i, row) in self.rows.iter().enumerate() {
                    s.push_str(if i == 0 { "\n  " } else { ",\n  " });
                    s.push_str(&self.object(row));
                }
                s.push_str(if self.rows.is_empty() { "]\n" } else { "\n]\n" });
                s
            }
            Format::Csv => {
                let mut s = self.columns.join(",");
                s.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Field::csv).collect();
                    let _ = writeln!(s, "{}", cells.join(","));
                }
                s
            }
        }
    }
}

/// Writes `table` to `path`, creating parent directories as needed.
pub fn write_report(table: &Table, format: Format, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, table.render(format))?;
    Ok(())
}

pub const MC_COLUMNS: [&str; 16] = [
    "label", "lhs", "rhs", "se_lhs", "se_rhs", "se_diff", "z", "passed", "n_paths", "failures",
    "steps", "eps_end", "refinement", "seed", "wall_time", "geometry",
];

/// Monte Carlo comparisons, one row each.
pub fn mc_table(geometry: &str, reports: &[McReport]) -> Table {
    let mut t = Table::new(MC_COLUMNS);
    for r in reports {
        t.push(vec![
            r.label.clone().into(),
            r.lhs.into(),
            r.rhs.into(),
            r.se_lhs.into(),
            r.se_rhs.into(),
            r.se_diff.into(),
            r.z.into(),
            r.passed().into(),
            r.n_paths.into(),
            r.failures.into(),
            r.grid.steps.into(),
            r.grid.eps_end.into(),
            r.grid.refinement.clone().into(),
            r.seed.into(),
            r.wall_time.into(),
            geometry.into(),
        ]);
    }
    t
}

pub fn decay_table(tables: &[DecayTable]) -> Table {
    let mut t = Table::new(["direction", "t", "t_node", "m", "se", "n_paths", "seed"]);
    for d in tables {
        for r in &d.rows {
            t.push(vec![
                d.direction.clone().into(),
                r.t.into(),
                r.t_node.into(),
                r.m.into(),
                r.se.into(),
                d.n_paths.into(),
                d.seed.into(),
            ]);
        }
    }
    t
}

pub fn equiv_table(tables: &[EquivTable]) -> Table {
    let mut t = Table::new([
        "direction", "steps", "mean_gap", "se", "mean_boundary", "mean_residual", "se_residual",
        "n_paths", "seed",
    ]);
    for e in tables {
        for r in &e.rows {
            t.push(vec![
                e.direction.clone().into(),
                r.steps.into(),
                r.mean_gap.into(),
                r.se.into(),
                r.mean_boundary.into(),
                r.mean_residual.into(),
                r.se_residual.into(),
                e.n_paths.into(),
                e.seed.into(),
            ]);
        }
    }
    t
}

pub fn identity_table(report: &IdentityReport) -> Table {
    let mut t = Table::new([
        "geometry", "check", "tau", "r", "value", "reference", "rel_err", "tol", "passed",
    ]);
    for r in &report.rows {
        t.push(vec![
            report.geometry.clone().into(),
            r.check.into(),
            r.tau.into(),
            r.r.into(),
            r.value.into(),
            r.reference.into(),
            r.rel_err.into(),
            r.tol.into(),
            r.passed.into(),
        ]);
    }
    t
}

pub fn moment_table(rows: &[MomentRow]) -> Table {
    let mut t = Table::new(["t", "estimate", "se"]);
    for r in rows {
        t.push(vec![r.t.into(), r.estimate.into(), r.se.into()]);
    }
    t
}
