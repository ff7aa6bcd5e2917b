//! Statistics across repetitions, efficiency ratios and file output.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::Method;
use crate::error::{Error, Result};
use crate::harness::experiment::RunRecord;

pub const RECORDS_HEADER: [&str; 9] = [
    "method",
    "N",
    "M",
    "rep",
    "price",
    "rel_stderr_pct",
    "psi",
    "cpu_seconds",
    "degenerate",
];

pub const SUMMARY_HEADER: [&str; 7] = ["N", "mc_price", "mc_stderr_pct", "smc_price", "smc_stderr_pct", "kappa", "psi"];

/// How `*_stderr_pct` columns are defined.
pub const STDERR_CONVENTION: &str =
    "relative standard error of the mean over repetitions: sd(price) / (mean(price) * sqrt(reps)) * 100";

pub const TIMING_NOTE: &str = "cpu_seconds, alpha and kappa are wall-clock based and machine dependent";

/// Statistics of one (method, N) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub method: Method,
    #[serde(rename = "N")]
    pub steps: usize,
    pub reps: usize,
    pub mean_price: f64,
    /// Sample standard deviation of the run prices.
    pub sd_price: f64,
    /// `sd / (mean sqrt(reps))` in percent: the error of `mean_price`.
    pub stderr_pct: Option<f64>,
    /// `sd / mean` in percent: the error of a single run.
    pub run_stderr_pct: Option<f64>,
    pub mean_seconds: f64,
    pub total_seconds: f64,
    /// `(sd / mean)^2 * mean_seconds`, the work-normalised variance of one run.
    pub alpha: Option<f64>,
    pub psi: Option<f64>,
    pub degenerate: usize,
}

impl CellStats {
    fn from_runs(method: Method, steps: usize, runs: &[&RunRecord]) -> Result<Self> {
        let reps = runs.len();
        if reps < 2 {
            return Err(Error::InsufficientReps {
                method: method.to_string(),
                steps,
                reps,
            });
        }
        let r = reps as f64;
        let mean = runs.iter().map(|x| x.price).sum::<f64>() / r;
        let var = runs.iter().map(|x| (x.price - mean).powi(2)).sum::<f64>() / (r - 1.0);
        let sd = var.sqrt();
        let total_seconds: f64 = runs.iter().map(|x| x.cpu_seconds).sum();
        let mean_seconds = total_seconds / r;
        let rel = (mean != 0.0).then(|| sd / mean.abs());
        let psis: Vec<f64> = runs.iter().filter_map(|x| x.psi).collect();
        let psi = (psis.len() == reps).then(|| psis.iter().sum::<f64>() / r);
        Ok(CellStats {
            method,
            steps,
            reps,
            mean_price: mean,
            sd_price: sd,
            stderr_pct: rel.map(|s| 100.0 * s / r.sqrt()),
            run_stderr_pct: rel.map(|s| 100.0 * s),
            mean_seconds,
            total_seconds,
            alpha: rel.map(|s| s * s * mean_seconds),
            psi,
            degenerate: runs.iter().filter(|x| x.degenerate).count(),
        })
    }
}

/// One line of a comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    #[serde(rename = "N")]
    pub steps: usize,
    pub mc: Option<CellStats>,
    pub smc: Option<CellStats>,
    /// `alpha_mc / alpha_smc`; above 1 means the particle method reaches a
    /// given accuracy in less time.
    pub kappa: Option<f64>,
    /// Survival probability: the particle estimate when it has one, otherwise
    /// the plain Monte Carlo share of surviving paths.
    pub psi: Option<f64>,
}

/// Plain Monte Carlo against one particle method, one row per step count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodComparison {
    /// The particle method, or `mc` when no particle method was run.
    pub method: Method,
    pub rows: Vec<SummaryRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub stderr_convention: String,
    pub timing_note: String,
    pub cells: Vec<CellStats>,
    pub comparisons: Vec<MethodComparison>,
}

impl EfficiencyReport {
    pub fn cell(&self, method: Method, steps: usize) -> Option<&CellStats> {
        self.cells.iter().find(|c| c.method == method && c.steps == steps)
    }

    pub fn comparison(&self, method: Method) -> Option<&MethodComparison> {
        self.comparisons.iter().find(|c| c.method == method)
    }
}

/// `alpha_mc / alpha_smc`.
pub fn kappa(mc: &CellStats, smc: &CellStats) -> Option<f64> {
    match (mc.alpha, smc.alpha) {
        (Some(a), Some(b)) if b > 0.0 => Some(a / b),
        _ => None,
    }
}

/// Groups records by (method, N) and compares each particle method with plain
/// Monte Carlo at every step count. Fails if a cell has fewer than 2 runs.
pub fn summarize(records: &[RunRecord]) -> Result<EfficiencyReport> {
    let mut groups: BTreeMap<(Method, usize), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.method, r.steps)).or_default().push(r);
    }
    let cells = groups
        .iter()
        .map(|(&(m, n), runs)| CellStats::from_runs(m, n, runs))
        .collect::<Result<Vec<_>>>()?;

    let mut steps: Vec<usize> = cells.iter().map(|c| c.steps).collect();
    steps.sort_unstable();
    steps.dedup();
    let mut methods: Vec<Method> = cells.iter().map(|c| c.method).filter(Method::is_particle).collect();
    methods.dedup();
    if methods.is_empty() && !cells.is_empty() {
        methods.push(Method::Mc);
    }
    let find = |m: Method, n: usize| cells.iter().find(|c| c.method == m && c.steps == n).cloned();
    let comparisons = methods
        .iter()
        .map(|&method| MethodComparison {
            method,
            rows: steps
                .iter()
                .map(|&n| {
                    let mc = find(Method::Mc, n);
                    let smc = if method.is_particle() { find(method, n) } else { None };
                    let kappa = mc.as_ref().zip(smc.as_ref()).and_then(|(a, b)| kappa(a, b));
                    let psi = smc.as_ref().and_then(|c| c.psi).or(mc.as_ref().and_then(|c| c.psi));
                    SummaryRow {
                        steps: n,
                        mc,
                        smc,
                        kappa,
                        psi,
                    }
                })
                .collect(),
        })
        .collect();
    Ok(EfficiencyReport {
        stderr_convention: STDERR_CONVENTION.to_string(),
        timing_note: TIMING_NOTE.to_string(),
        cells,
        comparisons,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::config("format", format!("unknown format `{s}` (expected csv or json)"))),
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Format {
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    }
}

/// Writes records to `path` as CSV with [`RECORDS_HEADER`]. An empty set
/// gives a header-only file.
pub fn write_records_csv(records: &[RunRecord], path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    w.write_record(RECORDS_HEADER).map_err(|e| csv_error(path, e))?;
    for r in records {
        w.write_record([
            r.method.to_string(),
            r.steps.to_string(),
            r.particles.to_string(),
            r.rep.to_string(),
            r.price.to_string(),
            opt(r.rel_stderr_pct),
            opt(r.psi),
            r.cpu_seconds.to_string(),
            r.degenerate.to_string(),
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a file written by [`write_records_csv`].
pub fn read_records_csv(path: &Path) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = r.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.iter().ne(RECORDS_HEADER) {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()),
        });
    }
    let bad = |line: usize, what: &str| Error::Format {
        path: path.to_path_buf(),
        message: format!("line {line}: bad {what}"),
    };
    let mut out = Vec::new();
    for (i, row) in r.records().enumerate() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let line = i + 2;
        let num = |k: usize| row[k].parse::<f64>().map_err(|_| bad(line, RECORDS_HEADER[k]));
        let int = |k: usize| row[k].parse::<usize>().map_err(|_| bad(line, RECORDS_HEADER[k]));
        let maybe = |k: usize| if row[k].is_empty() { Ok(None) } else { num(k).map(Some) };
        out.push(RunRecord {
            method: row[0].parse().map_err(|_| bad(line, "method"))?,
            steps: int(1)?,
            particles: int(2)?,
            rep: int(3)?,
            price: num(4)?,
            rel_stderr_pct: maybe(5)?,
            psi: maybe(6)?,
            cpu_seconds: num(7)?,
            degenerate: row[8].parse().map_err(|_| bad(line, "degenerate"))?,
        });
    }
    Ok(out)
}

/// Writes one comparison table as CSV with [`SUMMARY_HEADER`].
pub fn write_summary_csv(cmp: &MethodComparison, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(SUMMARY_HEADER).map_err(|e| csv_error(path, e))?;
    for row in &cmp.rows {
        let price = |c: &Option<CellStats>| opt(c.as_ref().map(|c| c.mean_price));
        let err = |c: &Option<CellStats>| opt(c.as_ref().and_then(|c| c.stderr_pct));
        w.write_record([
            row.steps.to_string(),
            price(&row.mc),
            err(&row.mc),
            price(&row.smc),
            err(&row.smc),
            opt(row.kappa),
            opt(row.psi),
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes `records` and one summary per comparison into `dir` (created if
/// needed): `records.csv` and `summary_<method>.csv`, or `records.json` and
/// `summary.json`. Returns the paths written.
pub fn emit(report: &EfficiencyReport, records: &[RunRecord], format: OutputFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    match format {
        OutputFormat::Csv => {
            let path = dir.join("records.csv");
            write_records_csv(records, &path)?;
            written.push(path);
            for cmp in &report.comparisons {
                let path = dir.join(format!("summary_{}.csv", cmp.method));
                write_summary_csv(cmp, &path)?;
                written.push(path);
            }
        }
        OutputFormat::Json => {
            let path = dir.join("records.json");
            write_json(&records, &path)?;
            written.push(path);
            let path = dir.join("summary.json");
            write_json(report, &path)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Plain-text rendering of one comparison table.
pub fn format_table(cmp: &MethodComparison) -> String {
    let f = |v: Option<f64>, prec: usize| v.map(|x| format!("{x:.prec$}")).unwrap_or_else(|| "-".into());
    let mut out = format!(
        "{:>5} {:>12} {:>9} {:>12} {:>9} {:>8} {:>7}\n",
        "N", "mc", "(se%)", cmp.method, "(se%)", "kappa", "psi"
    );
    for row in &cmp.rows {
        let price = |c: &Option<CellStats>| f(c.as_ref().map(|c| c.mean_price), 6);
        let err = |c: &Option<CellStats>| f(c.as_ref().and_then(|c| c.stderr_pct), 2);
        out.push_str(&format!(
            "{:>5} {:>12} {:>9} {:>12} {:>9} {:>8} {:>7}\n",
            row.steps,
            price(&row.mc),
            err(&row.mc),
            price(&row.smc),
            err(&row.smc),
            f(row.kappa, 2),
            f(row.psi, 3)
        ));
    }
    out
}
