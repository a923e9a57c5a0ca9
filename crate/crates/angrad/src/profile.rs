//! Performance profiles over run records.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::str::FromStr;

use crate::error::{BenchError, Result};
use crate::records::{fmt_float, RunRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Iters,
    Time,
}

impl FromStr for Metric {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iters" | "iterations" => Ok(Metric::Iters),
            "time" | "time_ms" => Ok(Metric::Time),
            _ => Err(BenchError::InvalidArgument(format!("unknown metric `{s}`"))),
        }
    }
}

impl Metric {
    /// Unsolved runs cost `+∞`.
    fn cost(self, r: &RunRecord) -> f64 {
        if !r.converged {
            return f64::INFINITY;
        }
        match self {
            Metric::Iters => r.iters as f64,
            Metric::Time => r.time_ms,
        }
    }
}

/// `ρ_m(τ)` sampled at every breakpoint of the step functions.
#[derive(Debug, Clone, PartialEq)]
pub struct PerfProfile {
    pub methods: Vec<String>,
    /// Sorted breakpoints, starting at 1.
    pub taus: Vec<f64>,
    /// `rho[m][t]` for method `m` at `taus[t]`.
    pub rho: Vec<Vec<f64>>,
    pub problems: usize,
    ratios: Vec<Vec<f64>>,
}

impl PerfProfile {
    /// `ρ_m(τ)` for any `τ ≥ 1`.
    pub fn rho_at(&self, method: usize, tau: f64) -> f64 {
        let hits = self.ratios[method].iter().filter(|r| **r <= tau).count();
        hits as f64 / self.problems as f64
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["method", "tau", "rho"])?;
        for (m, name) in self.methods.iter().enumerate() {
            for (t, tau) in self.taus.iter().enumerate() {
                w.write_record([name.clone(), fmt_float(*tau), fmt_float(self.rho[m][t])])?;
            }
        }
        w.flush().map_err(|e| BenchError::io("<profile>", e))?;
        Ok(())
    }
}

/// A problem instance is a distinct `(problem, seed, eps)`; a method with no
/// record for an instance counts as failing it.
pub fn perf_profile(records: &[RunRecord], metric: Metric) -> Result<PerfProfile> {
    if records.is_empty() {
        return Err(BenchError::InvalidArgument("no records to profile".into()));
    }
    let mut methods: Vec<String> = Vec::new();
    let mut method_ix: HashMap<&str, usize> = HashMap::new();
    let mut costs: BTreeMap<(&str, u64, u64), HashMap<usize, f64>> = BTreeMap::new();
    for r in records {
        let m = *method_ix.entry(r.method.as_str()).or_insert_with(|| {
            methods.push(r.method.clone());
            methods.len() - 1
        });
        let inst = costs.entry((r.problem.as_str(), r.seed, r.eps.to_bits())).or_default();
        if inst.insert(m, metric.cost(r)).is_some() {
            return Err(BenchError::InvalidArgument(format!(
                "duplicate record for {} / {} / seed {}",
                r.problem, r.method, r.seed
            )));
        }
    }
    let mut ratios = vec![Vec::with_capacity(costs.len()); methods.len()];
    for inst in costs.values() {
        let best = inst.values().cloned().fold(f64::INFINITY, f64::min);
        for (m, ratio) in ratios.iter_mut().enumerate() {
            let c = inst.get(&m).copied().unwrap_or(f64::INFINITY);
            let r = if !best.is_finite() || !c.is_finite() {
                f64::INFINITY
            } else if c == best {
                1.0
            } else {
                c / best
            };
            ratio.push(r);
        }
    }
    let mut taus: Vec<f64> = ratios.iter().flatten().copied().filter(|r| r.is_finite()).collect();
    taus.push(1.0);
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    let problems = costs.len();
    let mut prof = PerfProfile { methods, taus, rho: Vec::new(), problems, ratios };
    prof.rho = (0..prof.methods.len()).map(|m| prof.taus.iter().map(|t| prof.rho_at(m, *t)).collect()).collect();
    Ok(prof)
}
