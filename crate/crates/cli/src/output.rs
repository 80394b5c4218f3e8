//! Result tables, manifests and summaries.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use geostein::bounds::{write_reports_csv, BoundReport, Verdict};
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Plain table for verbs that do not produce bound reports.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let obj: serde_json::Map<String, Value> = self
                    .header
                    .iter()
                    .zip(r)
                    .map(|(h, v)| {
                        let val = v
                            .parse::<f64>()
                            .ok()
                            .and_then(serde_json::Number::from_f64)
                            .map(Value::Number)
                            .unwrap_or_else(|| Value::String(v.clone()));
                        (h.clone(), val)
                    })
                    .collect();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

pub enum Results {
    Reports(Vec<BoundReport>),
    Table {
        table: Table,
        /// Summary lines; `Some(ok)` marks a hard check.
        checks: Vec<(String, Option<bool>)>,
    },
}

impl Results {
    pub fn hard_failures(&self) -> usize {
        match self {
            Results::Reports(r) => r.iter().filter(|x| x.failed()).count(),
            Results::Table { checks, .. } => checks.iter().filter(|c| c.1 == Some(false)).count(),
        }
    }

    fn rows(&self) -> usize {
        match self {
            Results::Reports(r) => r.len(),
            Results::Table { table, .. } => table.rows.len(),
        }
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        match self {
            Results::Reports(reports) => {
                for r in reports {
                    let params: Vec<String> =
                        r.params.iter().map(|p| format!("{}={}", p.name, p.value)).collect();
                    let _ = write!(
                        s,
                        "{:<4} {} [{}] {} lhs={:.6e} slack={:.1e}",
                        r.verdict.as_str(),
                        r.theorem_tag,
                        params.join(" "),
                        r.lhs_metric.as_str(),
                        r.lhs_value,
                        r.slack
                    );
                    if r.rhs_value.is_finite() {
                        let _ = write!(s, " rhs={:.6e}", r.rhs_value);
                        if r.rhs_std_error > 0.0 {
                            let _ = write!(s, " stderr={:.1e}", r.rhs_std_error);
                        }
                    }
                    if let Some(c) = r.empirical_c {
                        let _ = write!(s, " C={c:.6}");
                    }
                    s.push('\n');
                }
                let count = |v: Verdict| reports.iter().filter(|r| r.verdict == v).count();
                let _ = writeln!(
                    s,
                    "rows {}: pass {}, fail {}, flag {}, soft {}",
                    reports.len(),
                    count(Verdict::Pass),
                    count(Verdict::Fail),
                    count(Verdict::Flag),
                    count(Verdict::Soft)
                );
            }
            Results::Table { checks, .. } => {
                for (line, ok) in checks {
                    let tag = match ok {
                        Some(true) => "PASS",
                        Some(false) => "FAIL",
                        None => "INFO",
                    };
                    let _ = writeln!(s, "{tag:<4} {line}");
                }
                let _ = writeln!(s, "rows {}", self.rows());
            }
        }
        s
    }
}

#[derive(Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub library_version: &'static str,
    pub experiment: String,
    pub seed: u64,
    pub trunc_eps: f64,
    pub support_cap: usize,
    pub reps: usize,
    pub shards: usize,
    pub format: Format,
    pub params: BTreeMap<String, Value>,
    pub results_file: String,
    pub rows: usize,
    pub hard_failures: usize,
}

/// Writes `<name>.{csv,json}`, `<name>.manifest.json` and `<name>.summary.txt`.
pub fn write_artifacts(
    dir: &Path,
    name: &str,
    format: Format,
    results: &Results,
    mut manifest: Manifest,
) -> Result<Vec<PathBuf>, String> {
    fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let results_path = dir.join(format!("{name}.{ext}"));
    let io = |e: std::io::Error| format!("{}: {e}", results_path.display());
    let file = BufWriter::new(File::create(&results_path).map_err(io)?);
    match (results, format) {
        (Results::Reports(r), Format::Csv) => {
            write_reports_csv(r, file).map_err(|e| e.to_string())?
        }
        (Results::Reports(r), Format::Json) => {
            serde_json::to_writer_pretty(file, r).map_err(|e| e.to_string())?
        }
        (Results::Table { table, .. }, Format::Csv) => {
            let mut w = csv::Writer::from_writer(file);
            w.write_record(&table.header).map_err(|e| e.to_string())?;
            for row in &table.rows {
                w.write_record(row).map_err(|e| e.to_string())?;
            }
            w.flush().map_err(io)?;
        }
        (Results::Table { table, .. }, Format::Json) => {
            serde_json::to_writer_pretty(file, &table.to_json()).map_err(|e| e.to_string())?
        }
    }

    manifest.results_file = results_path
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_default();
    manifest.rows = results.rows();
    manifest.hard_failures = results.hard_failures();
    let manifest_path = dir.join(format!("{name}.manifest.json"));
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| e.to_string())?;
    text.push('\n');
    fs::write(&manifest_path, text).map_err(|e| format!("{}: {e}", manifest_path.display()))?;

    let summary_path = dir.join(format!("{name}.summary.txt"));
    fs::write(&summary_path, results.summary())
        .map_err(|e| format!("{}: {e}", summary_path.display()))?;
    Ok(vec![results_path, manifest_path, summary_path])
}
