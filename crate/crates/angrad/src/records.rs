//! Run records, summaries and their CSV forms.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{BenchError, Result};

pub const RUNS_HEADER: [&str; 11] =
    ["problem", "method", "seed", "eps", "iters", "fval", "gnorm", "converged", "fevals", "gevals", "time_ms"];

pub const SUMMARY_HEADER: [&str; 8] =
    ["group", "method", "eps", "runs", "converged", "mean_iters", "mean_fval", "mean_gnorm"];

/// One solver run. `gnorm` is `‖g‖₂` on quadratic suites and `‖ḡ‖∞` on the
/// general ones.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub problem: String,
    pub method: String,
    pub seed: u64,
    pub eps: f64,
    pub iters: usize,
    pub fval: f64,
    pub gnorm: f64,
    pub converged: bool,
    pub fevals: usize,
    pub gevals: usize,
    pub time_ms: f64,
}

/// Round-trip float formatting with 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, name: &str) -> Result<T> {
    let raw = rec.get(i).ok_or_else(|| BenchError::Parse(format!("missing column {name}")))?;
    raw.trim().parse().map_err(|_| BenchError::Parse(format!("bad {name} value `{raw}`")))
}

fn check_header(rdr: &mut csv::Reader<impl Read>, expected: &[&str]) -> Result<()> {
    let h = rdr.headers()?;
    if h.iter().ne(expected.iter().copied()) {
        return Err(BenchError::Parse(format!("expected header `{}`", expected.join(","))));
    }
    Ok(())
}

pub fn write_runs<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RUNS_HEADER)?;
    for r in records {
        w.write_record([
            r.problem.clone(),
            r.method.clone(),
            r.seed.to_string(),
            fmt_float(r.eps),
            r.iters.to_string(),
            fmt_float(r.fval),
            fmt_float(r.gnorm),
            r.converged.to_string(),
            r.fevals.to_string(),
            r.gevals.to_string(),
            fmt_float(r.time_ms),
        ])?;
    }
    w.flush().map_err(|e| BenchError::io("<runs>", e))?;
    Ok(())
}

pub fn read_runs<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    check_header(&mut rdr, &RUNS_HEADER)?;
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        out.push(RunRecord {
            problem: field(&row, 0, "problem")?,
            method: field(&row, 1, "method")?,
            seed: field(&row, 2, "seed")?,
            eps: field(&row, 3, "eps")?,
            iters: field(&row, 4, "iters")?,
            fval: field(&row, 5, "fval")?,
            gnorm: field(&row, 6, "gnorm")?,
            converged: field(&row, 7, "converged")?,
            fevals: field(&row, 8, "fevals")?,
            gevals: field(&row, 9, "gevals")?,
            time_ms: field(&row, 10, "time_ms")?,
        });
    }
    Ok(out)
}

/// Averages over the instances of one `(group, method, eps)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub group: String,
    pub method: String,
    pub eps: f64,
    pub runs: usize,
    pub converged: usize,
    pub mean_iters: f64,
    pub mean_fval: f64,
    pub mean_gnorm: f64,
}

/// Groups records by `(group_of(record), method, eps)`, keeping the order in
/// which cells first appear.
pub fn summarize(records: &[RunRecord], group_of: impl Fn(&RunRecord) -> String) -> Vec<SummaryRow> {
    let mut order: Vec<(String, String, u64)> = Vec::new();
    let mut cells: BTreeMap<(String, String, u64), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        let key = (group_of(r), r.method.clone(), r.eps.to_bits());
        cells
            .entry(key.clone())
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let rs = &cells[&key];
            let m = rs.len() as f64;
            SummaryRow {
                group: key.0.clone(),
                method: key.1.clone(),
                eps: f64::from_bits(key.2),
                runs: rs.len(),
                converged: rs.iter().filter(|r| r.converged).count(),
                mean_iters: rs.iter().map(|r| r.iters as f64).sum::<f64>() / m,
                mean_fval: rs.iter().map(|r| r.fval).sum::<f64>() / m,
                mean_gnorm: rs.iter().map(|r| r.gnorm).sum::<f64>() / m,
            }
        })
        .collect()
}

pub fn write_summary<W: Write>(out: W, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record([
            r.group.clone(),
            r.method.clone(),
            fmt_float(r.eps),
            r.runs.to_string(),
            r.converged.to_string(),
            fmt_float(r.mean_iters),
            fmt_float(r.mean_fval),
            fmt_float(r.mean_gnorm),
        ])?;
    }
    w.flush().map_err(|e| BenchError::io("<summary>", e))?;
    Ok(())
}

pub fn read_summary<R: Read>(input: R) -> Result<Vec<SummaryRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    check_header(&mut rdr, &SUMMARY_HEADER)?;
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        out.push(SummaryRow {
            group: field(&row, 0, "group")?,
            method: field(&row, 1, "method")?,
            eps: field(&row, 2, "eps")?,
            runs: field(&row, 3, "runs")?,
            converged: field(&row, 4, "converged")?,
            mean_iters: field(&row, 5, "mean_iters")?,
            mean_fval: field(&row, 6, "mean_fval")?,
            mean_gnorm: field(&row, 7, "mean_gnorm")?,
        });
    }
    Ok(out)
}

pub(crate) fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| BenchError::io(path, e))
}

pub(crate) fn create(path: &Path) -> Result<std::fs::File> {
    std::fs::File::create(path).map_err(|e| BenchError::io(path, e))
}
