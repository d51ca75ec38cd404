//! Benchmark rows, CSV/JSON emission, and the rendered comparison table.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{AlgoName, BenchConfig};
use crate::error::BenchError;

/// One solver run on one scenario. Rows are ordered by (cell, seed,
/// algorithm); the seed is implied by position within its cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub k: usize,
    pub algo: AlgoName,
    /// Relative objective excess over the best compared solution on the same
    /// scenario; `None` for unsolved runs (rendered as `--`).
    pub f_gap: Option<f64>,
    pub iterations: usize,
    pub time_seconds: f64,
    pub solved: bool,
}

/// Per-cell aggregate over the solved runs of one algorithm.
#[derive(Clone, Debug, Serialize)]
pub struct CellSummary {
    pub n: usize,
    pub k: usize,
    pub algo: AlgoName,
    pub runs: usize,
    pub solved: usize,
    pub mean_f_gap: Option<f64>,
    pub mean_iterations: Option<f64>,
    pub mean_time_seconds: Option<f64>,
}

/// Groups rows into per-cell summaries, preserving first-appearance order of
/// cells and algorithms.
pub fn summarize(rows: &[BenchRow]) -> Vec<CellSummary> {
    let mut order: Vec<(usize, usize, AlgoName)> = Vec::new();
    let mut buckets: BTreeMap<(usize, usize, String), Vec<&BenchRow>> = BTreeMap::new();
    for row in rows {
        let key = (row.n, row.k, row.algo.as_str().to_string());
        if !buckets.contains_key(&key) {
            order.push((row.n, row.k, row.algo));
        }
        buckets.entry(key).or_default().push(row);
    }
    order
        .into_iter()
        .map(|(n, k, algo)| {
            let bucket = &buckets[&(n, k, algo.as_str().to_string())];
            let solved: Vec<&&BenchRow> = bucket.iter().filter(|r| r.solved).collect();
            let mean = |f: &dyn Fn(&BenchRow) -> f64| {
                if solved.is_empty() {
                    None
                } else {
                    Some(solved.iter().map(|r| f(r)).sum::<f64>() / solved.len() as f64)
                }
            };
            CellSummary {
                n,
                k,
                algo,
                runs: bucket.len(),
                solved: solved.len(),
                mean_f_gap: mean(&|r: &BenchRow| r.f_gap.unwrap_or(0.0)),
                mean_iterations: mean(&|r: &BenchRow| r.iterations as f64),
                mean_time_seconds: mean(&|r: &BenchRow| r.time_seconds),
            }
        })
        .collect()
}

/// CSV with header `n,k,algo,f_gap,iterations,time_seconds,solved`; unsolved
/// rows leave the `f_gap` field empty.
pub fn to_csv_string(rows: &[BenchRow]) -> Result<String, BenchError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| BenchError::Report(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| BenchError::Report(e.to_string()))
}

pub fn parse_csv_str(text: &str) -> Result<Vec<BenchRow>, BenchError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.deserialize() {
        rows.push(record?);
    }
    Ok(rows)
}

pub fn write_csv(rows: &[BenchRow], path: &Path) -> Result<(), BenchError> {
    if rows.is_empty() {
        return Err(BenchError::Report("no rows to emit".into()));
    }
    let text = to_csv_string(rows)?;
    fs::write(path, text).map_err(|e| BenchError::io(format!("writing {}", path.display()), e))
}

/// Full JSON report: config echo, per-run rows, and per-cell aggregates.
#[derive(Serialize)]
struct JsonReport<'a> {
    config: &'a BenchConfig,
    rows: &'a [BenchRow],
    cells: Vec<CellSummary>,
}

pub fn write_json(config: &BenchConfig, rows: &[BenchRow], path: &Path) -> Result<(), BenchError> {
    if rows.is_empty() {
        return Err(BenchError::Report("no rows to emit".into()));
    }
    let report = JsonReport {
        config,
        rows,
        cells: summarize(rows),
    };
    let text = serde_json::to_string_pretty(&report)?;
    fs::write(path, text).map_err(|e| BenchError::io(format!("writing {}", path.display()), e))
}

fn fmt_opt(value: Option<f64>, precision: usize) -> String {
    match value {
        Some(v) => format!("{v:.precision$e}"),
        None => "--".to_string(),
    }
}

/// Human summary mirroring the f-gap | iter | time column structure, one
/// line per cell, `--` for algorithms that solved none of the cell's seeds.
pub fn render_table(rows: &[BenchRow]) -> String {
    let cells = summarize(rows);
    let mut algos: Vec<AlgoName> = Vec::new();
    for c in &cells {
        if !algos.contains(&c.algo) {
            algos.push(c.algo);
        }
    }
    let mut grid: Vec<(usize, usize)> = Vec::new();
    for c in &cells {
        if !grid.contains(&(c.n, c.k)) {
            grid.push((c.n, c.k));
        }
    }

    let mut out = String::new();
    out.push_str(&format!("{:>4} {:>4}", "N", "K"));
    for section in ["f-gap", "iter", "time"] {
        for algo in &algos {
            out.push_str(&format!(" {:>12}", format!("{section}:{algo}")));
        }
    }
    out.push('\n');

    for (n, k) in grid {
        out.push_str(&format!("{n:>4} {k:>4}"));
        let find = |algo: AlgoName| cells.iter().find(|c| c.n == n && c.k == k && c.algo == algo);
        for algo in &algos {
            let v = find(*algo).and_then(|c| c.mean_f_gap);
            out.push_str(&format!(" {:>12}", fmt_opt(v, 1)));
        }
        for algo in &algos {
            let v = find(*algo).and_then(|c| c.mean_iterations);
            out.push_str(&format!(
                " {:>12}",
                v.map(|x| format!("{x:.0}")).unwrap_or_else(|| "--".into())
            ));
        }
        for algo in &algos {
            let v = find(*algo).and_then(|c| c.mean_time_seconds);
            out.push_str(&format!(
                " {:>12}",
                v.map(|x| format!("{x:.3}")).unwrap_or_else(|| "--".into())
            ));
        }
        out.push('\n');
    }
    out
}
