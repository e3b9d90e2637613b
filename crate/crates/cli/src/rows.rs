//! Results CSV.
//!
//! The first line is the version marker `# fpp-results v1`, then a header row
//! with the fixed columns
//! `experiment,model,d,r,alpha,xi,n,estimator,p_hat,stderr,log_p,bound,seed,walltime_ms`.
//! Empty cells stand for "not applicable". For time-constant rows `p_hat`
//! holds the estimate `E T(0,n e_1)/n` rather than a probability.

use std::io::{BufRead, Write};
use std::path::Path;

use fpp_core::EdgeWeightModel;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const VERSION_LINE: &str = "# fpp-results v1";
pub const COLUMNS: [&str; 14] = [
    "experiment",
    "model",
    "d",
    "r",
    "alpha",
    "xi",
    "n",
    "estimator",
    "p_hat",
    "stderr",
    "log_p",
    "bound",
    "seed",
    "walltime_ms",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub model: String,
    pub d: usize,
    pub r: Option<f64>,
    pub alpha: Option<f64>,
    pub xi: Option<f64>,
    pub n: u32,
    pub estimator: String,
    pub p_hat: f64,
    pub stderr: f64,
    pub log_p: f64,
    pub bound: Option<f64>,
    pub seed: u64,
    pub walltime_ms: u64,
}

/// Short label like `weibull alpha=1 r=0.5`.
pub fn model_label(model: &EdgeWeightModel) -> String {
    match model {
        EdgeWeightModel::Weibull(m) => format!("weibull alpha={} r={}", m.alpha(), m.r()),
        EdgeWeightModel::Anomalous(m) => {
            format!("anomalous alpha1={} alpha2={}", m.alpha1(), m.alpha2())
        }
        EdgeWeightModel::LogPerturbed(m) => format!(
            "logperturbed alpha={} r={} gamma={}",
            m.alpha(),
            m.r(),
            m.gamma()
        ),
        EdgeWeightModel::Degenerate(m) => format!("degenerate value={}", m.value()),
    }
}

/// The `alpha` column: the tail rate, `alpha1` for the anomalous law.
pub fn model_alpha(model: &EdgeWeightModel) -> Option<f64> {
    match model {
        EdgeWeightModel::Weibull(m) => Some(m.alpha()),
        EdgeWeightModel::Anomalous(m) => Some(m.alpha1()),
        EdgeWeightModel::LogPerturbed(m) => Some(m.alpha()),
        EdgeWeightModel::Degenerate(_) => None,
    }
}

pub fn write_rows<W: Write>(out: W, rows: &[ResultRow]) -> Result<()> {
    let mut out = out;
    writeln!(out, "{VERSION_LINE}").map_err(|e| CliError::io("<csv>", e))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(COLUMNS)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::io("<csv>", e))?;
    Ok(())
}

pub fn write_csv(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    write_rows(std::io::BufWriter::new(file), rows)
}

/// Parses a results file, checking the version line and header.
pub fn read_rows<R: BufRead>(mut input: R) -> Result<Vec<ResultRow>> {
    let mut first = String::new();
    input
        .read_line(&mut first)
        .map_err(|e| CliError::io("<csv>", e))?;
    if first.trim_end() != VERSION_LINE {
        return Err(CliError::Runtime(format!(
            "not an fpp results file: expected `{VERSION_LINE}`, found `{}`",
            first.trim_end()
        )));
    }
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let headers = r
        .headers()
        .map_err(|e| CliError::Runtime(e.to_string()))?
        .clone();
    if headers.iter().ne(COLUMNS.iter().copied()) {
        return Err(CliError::Runtime(format!(
            "schema mismatch: header is `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    r.deserialize()
        .map(|row| row.map_err(|e| CliError::Runtime(format!("bad row: {e}"))))
        .collect()
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read_rows(std::io::BufReader::new(file))
}
