//! Expands a configuration into runs and executes them on a worker pool.

use std::path::{Path, PathBuf};
use std::time::Instant;

use angrad_core::general::{solve_general, GenRunConfig, Termination};
use angrad_core::problems::{
    gen_laplace, gen_nonrand_quad, gen_random_quad, gen_uncon_suite, uniform_start, LaplaceSpec, LaplaceVariant,
    SpectrumSpec, UnconFunction,
};
use angrad_core::quad::{
    injected_tilde_bb1, run_quadratic, run_quadratic_with, IterView, QuadRunConfig, QuadTrace, PROBE_INJECT_AT,
    PROBE_ITERS,
};
use angrad_core::rng::Rng;
use angrad_core::{BoxBounds, DiagonalQuadratic, QuadraticModel};
use rayon::prelude::*;

use crate::config::{Method, Start, Suite, SuiteConfig};
use crate::error::{BenchError, Result};
use crate::profile::{perf_profile, Metric, PerfProfile};
use crate::records::{create, summarize, write_runs, write_summary, RunRecord, SummaryRow};

pub const THREADS_ENV: &str = "ANGRAD_THREADS";

#[derive(Debug, Clone, Copy, PartialEq)]
enum Instance {
    Random { set: u8, kappa: f64 },
    Pro2 { kappa: f64 },
    Laplace { nn: usize, variant: LaplaceVariant },
    General { index: usize, boxed: bool },
    Termination { lambda: f64, inject: bool },
}

#[derive(Debug, Clone)]
struct Job {
    problem: String,
    group: String,
    seed: u64,
    eps: f64,
    method: Method,
    label: String,
    instance: Instance,
}

/// Everything a finished suite produced.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub records: Vec<RunRecord>,
    pub summary: Vec<SummaryRow>,
    pub profile: PerfProfile,
    /// Runs that stopped on a numerical error, with the message.
    pub failures: Vec<String>,
    pub runs_path: PathBuf,
    pub summary_path: PathBuf,
    pub profile_path: PathBuf,
}

impl SuiteOutcome {
    /// Exit status contract: success iff no run hit a numerical error.
    pub fn all_completed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn kappa_tag(k: f64) -> String {
    format!("{k:e}")
}

fn expand(cfg: &SuiteConfig) -> Result<Vec<Job>> {
    let methods = cfg.resolved_methods()?;
    let mut instances: Vec<(String, String, Instance)> = Vec::new();
    match cfg.suite {
        Suite::QuadRandom => {
            let sets = cfg.sets.clone().unwrap_or_else(|| vec![1, 2, 3, 4, 5]);
            for set in sets {
                for kappa in cfg.kappas() {
                    let p = format!("set{set}-k{}", kappa_tag(kappa));
                    instances.push((p, format!("set{set}"), Instance::Random { set, kappa }));
                }
            }
        }
        Suite::Pro2 => {
            for kappa in cfg.kappas() {
                let g = format!("pro2-k{}", kappa_tag(kappa));
                instances.push((format!("pro2-n{}-k{}", cfg.dimension(), kappa_tag(kappa)), g, Instance::Pro2 { kappa }));
            }
        }
        Suite::Laplace => {
            let variants = cfg.variants.clone().unwrap_or_else(|| vec!["a".into()]);
            for v in variants {
                let variant = if v.eq_ignore_ascii_case("a") { LaplaceVariant::A } else { LaplaceVariant::B };
                for nn in cfg.grid.as_ref().map(|g| g.to_vec()).unwrap_or_default() {
                    let p = format!("laplace-{}-N{nn}", v.to_ascii_lowercase());
                    instances.push((p.clone(), p, Instance::Laplace { nn, variant }));
                }
            }
        }
        Suite::Uncon | Suite::Box => {
            let boxed = cfg.suite == Suite::Box;
            for (index, f) in UnconFunction::ALL.iter().enumerate() {
                let p = format!("{}-{}", cfg.suite.name(), f.name());
                instances.push((p.clone(), p, Instance::General { index, boxed }));
            }
        }
        Suite::Termination => {
            for lambda in cfg.kappas() {
                let p = format!("termination-l{}", kappa_tag(lambda));
                instances.push((p.clone(), p, Instance::Termination { lambda, inject: false }));
            }
        }
    }
    let eps_list = if cfg.suite == Suite::Termination { vec![0.0] } else { cfg.tolerances() };
    let mut jobs = Vec::new();
    for (problem, group, instance) in &instances {
        for &eps in &eps_list {
            for seed in cfg.seed_list() {
                for method in &methods {
                    let mut push = |instance: Instance, label: String| {
                        jobs.push(Job {
                            problem: problem.clone(),
                            group: group.clone(),
                            seed,
                            eps,
                            method: method.clone(),
                            label,
                            instance,
                        })
                    };
                    push(*instance, method.id.clone());
                    if let Instance::Termination { lambda, .. } = instance {
                        push(Instance::Termination { lambda: *lambda, inject: true }, format!("{}+tilde", method.id));
                    }
                }
            }
        }
    }
    Ok(jobs)
}

fn quad_record(job: &Job, trace: &QuadTrace, start: Instant) -> RunRecord {
    RunRecord {
        problem: job.problem.clone(),
        method: job.label.clone(),
        seed: job.seed,
        eps: job.eps,
        iters: trace.iterations,
        fval: trace.f,
        gnorm: trace.gnorm,
        converged: trace.converged,
        fevals: trace.matvecs,
        gevals: trace.matvecs,
        time_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

fn failed_record(job: &Job, start: Instant) -> RunRecord {
    RunRecord {
        problem: job.problem.clone(),
        method: job.label.clone(),
        seed: job.seed,
        eps: job.eps,
        iters: 0,
        fval: f64::NAN,
        gnorm: f64::NAN,
        converged: false,
        fevals: 0,
        gevals: 0,
        time_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

fn run_quad<M: QuadraticModel + ?Sized>(job: &Job, model: &M, x0: Vec<f64>, max_iter: usize) -> angrad_core::Result<QuadTrace> {
    let cfg = QuadRunConfig::new(job.method.rule, x0, job.eps, max_iter)?;
    run_quadratic(model, &cfg)
}

fn run_termination(job: &Job, lambda: f64, inject: bool) -> angrad_core::Result<QuadTrace> {
    let model = DiagonalQuadratic::homogeneous(vec![1.0, lambda])?;
    let mut rng = Rng::new(job.seed);
    let x0 = vec![rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)];
    let cfg = QuadRunConfig::new(job.method.rule, x0, f64::MIN_POSITIVE, PROBE_ITERS)?;
    run_quadratic_with(&model, &cfg, &mut |v: &IterView<'_>| {
        if inject && v.k == PROBE_INJECT_AT {
            injected_tilde_bb1(&model, v)
        } else {
            None
        }
    })
}

/// Runs one job; the error string is set when the solver hit a numerical failure.
fn run_job(job: &Job, cfg: &SuiteConfig) -> (RunRecord, Option<String>) {
    let start = Instant::now();
    let n = cfg.dimension();
    let quad = match job.instance {
        Instance::Random { set, kappa } => gen_random_quad(&SpectrumSpec { set_id: set, n, kappa, seed: job.seed })
            .and_then(|q| run_quad(job, &q.model, q.x0.clone(), cfg.max_iter)),
        Instance::Pro2 { kappa } => gen_nonrand_quad(n, kappa.log10()).and_then(|m| {
            let x0 = match cfg.start() {
                Start::Tens => vec![10.0; n],
                Start::Uniform => uniform_start(n, job.seed),
            };
            run_quad(job, &m, x0, cfg.max_iter)
        }),
        Instance::Laplace { nn, variant } => gen_laplace(&LaplaceSpec::variant(nn, variant))
            .and_then(|(op, x0, _)| run_quad(job, &op, x0, cfg.max_iter)),
        Instance::Termination { lambda, inject } => run_termination(job, lambda, inject),
        Instance::General { index, boxed } => return run_general(job, cfg, index, boxed, start),
    };
    match quad {
        Ok(trace) => (quad_record(job, &trace, start), None),
        Err(e) => (failed_record(job, start), Some(format!("{} {} seed {}: {e}", job.problem, job.label, job.seed))),
    }
}

fn run_general(job: &Job, cfg: &SuiteConfig, index: usize, boxed: bool, start: Instant) -> (RunRecord, Option<String>) {
    let n = cfg.dimension();
    let fail = |e: angrad_core::Error| {
        (failed_record(job, start), Some(format!("{} {} seed {}: {e}", job.problem, job.label, job.seed)))
    };
    let problem = match gen_uncon_suite(n, boxed) {
        Ok(mut suite) => suite.swap_remove(index),
        Err(e) => return fail(e),
    };
    let bounds = problem.bounds.clone().unwrap_or_else(|| BoxBounds::unconstrained(n));
    let mut gcfg = match GenRunConfig::new(job.method.rule, problem.x0.clone()) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    gcfg.eps = job.eps;
    gcfg.max_iter = cfg.max_iter;
    let trace = match solve_general(&problem.objective, &bounds, &gcfg) {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    let record = RunRecord {
        problem: job.problem.clone(),
        method: job.label.clone(),
        seed: job.seed,
        eps: job.eps,
        iters: trace.iterations,
        fval: trace.f,
        gnorm: trace.pg_inf,
        converged: trace.converged(),
        fevals: trace.fevals,
        gevals: trace.gevals,
        time_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    let err = match &trace.termination {
        Termination::Failed(e) => Some(format!("{} {} seed {}: {e}", job.problem, job.label, job.seed)),
        _ => None,
    };
    (record, err)
}

/// Worker count from `ANGRAD_THREADS`, or `None` for the rayon default.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(Some(t)),
            _ => Err(BenchError::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(None),
    }
}

/// Runs every job and returns the records in job order.
pub fn execute(cfg: &SuiteConfig, threads: Option<usize>) -> Result<(Vec<RunRecord>, Vec<String>)> {
    let jobs = expand(cfg)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| BenchError::Config(format!("thread pool: {e}")))?;
    let results: Vec<(RunRecord, Option<String>)> = pool.install(|| jobs.par_iter().map(|j| run_job(j, cfg)).collect());
    let groups: std::collections::HashMap<&str, &str> =
        jobs.iter().map(|j| (j.problem.as_str(), j.group.as_str())).collect();
    debug_assert_eq!(groups.len(), jobs.iter().map(|j| &j.problem).collect::<std::collections::HashSet<_>>().len());
    let mut records = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (r, e) in results {
        records.push(r);
        failures.extend(e);
    }
    Ok((records, failures))
}

/// Group label used by the summary for a problem id produced by this module.
pub fn group_of(problem: &str) -> String {
    if let Some(rest) = problem.strip_prefix("set") {
        if let Some((set, _)) = rest.split_once("-k") {
            return format!("set{set}");
        }
    }
    if let Some(rest) = problem.strip_prefix("pro2-n") {
        if let Some((_, k)) = rest.split_once("-k") {
            return format!("pro2-k{k}");
        }
    }
    problem.to_string()
}

/// Executes the suite and writes `runs.csv`, `summary.csv` and `profile.csv`
/// into the configured output directory.
pub fn run_suite(cfg: &SuiteConfig, threads: Option<usize>) -> Result<SuiteOutcome> {
    let (records, failures) = execute(cfg, threads)?;
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    let summary = summarize(&records, |r| group_of(&r.problem));
    let profile = perf_profile(&records, Metric::Iters)?;
    let runs_path = dir.join("runs.csv");
    let summary_path = dir.join("summary.csv");
    let profile_path = dir.join("profile.csv");
    write_runs(create(&runs_path)?, &records)?;
    write_summary(create(&summary_path)?, &summary)?;
    profile.write_csv(create(&profile_path)?)?;
    Ok(SuiteOutcome { records, summary, profile, failures, runs_path, summary_path, profile_path })
}

/// Loads the configuration at `path` and runs it with the pool size from
/// the environment.
pub fn run_suite_path(path: &Path) -> Result<SuiteOutcome> {
    let cfg = SuiteConfig::load(path)?;
    run_suite(&cfg, threads_from_env()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(json: &str) -> SuiteConfig {
        SuiteConfig::from_json(json).unwrap()
    }

    #[test]
    fn group_labels() {
        assert_eq!(group_of("set3-k1e5"), "set3");
        assert_eq!(group_of("pro2-n10000-k1e4"), "pro2-k1e4");
        assert_eq!(group_of("laplace-a-N60"), "laplace-a-N60");
        assert_eq!(group_of("uncon-raydan1"), "uncon-raydan1");
    }

    #[test]
    fn expansion_counts() {
        let c = cfg(
            r#"{"suite":"quad-random","methods":[{"kind":"BB1"},{"kind":"ANGR2","tau1":0.2,"tau2":1}],
                "kappa":[1e4,1e5],"sets":[1,2],"eps":[1e-6,1e-9],"seeds":[1,2,3],"max_iter":10,"output_dir":"o"}"#,
        );
        assert_eq!(expand(&c).unwrap().len(), 2 * 2 * 2 * 3 * 2);
        let t = cfg(r#"{"suite":"termination","methods":[{"kind":"BB1"}],"kappa":[10,100],"seeds":[0,1],"max_iter":5,"output_dir":"o"}"#);
        let jobs = expand(&t).unwrap();
        assert_eq!(jobs.len(), 8);
        assert_eq!(jobs[1].label, "BB1+tilde");
    }

    #[test]
    fn pro2_tens_run() {
        let c = cfg(
            r#"{"suite":"pro2","methods":[{"kind":"BB1"}],"n":10,"kappa":1e3,"eps":[1e-6],"start":"tens",
                "max_iter":10000,"output_dir":"o"}"#,
        );
        let (records, failures) = execute(&c, Some(1)).unwrap();
        assert!(failures.is_empty());
        assert_eq!(records.len(), 1);
        assert!(records[0].converged);
        assert!((168..=280).contains(&records[0].iters));
    }

    #[test]
    fn termination_rows() {
        let c = cfg(r#"{"suite":"termination","methods":[{"kind":"BB1"}],"kappa":[10],"seeds":[0,1,2],"max_iter":5,"output_dir":"o"}"#);
        let (records, _) = execute(&c, Some(2)).unwrap();
        let plain: Vec<_> = records.iter().filter(|r| r.method == "BB1").collect();
        let inj: Vec<_> = records.iter().filter(|r| r.method == "BB1+tilde").collect();
        assert_eq!((plain.len(), inj.len()), (3, 3));
        assert!(inj.iter().all(|r| r.gnorm <= 1e-10));
        assert!(plain.iter().map(|r| r.gnorm).sum::<f64>() / 3.0 >= 1e-2);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let c = cfg(
            r#"{"suite":"quad-random","methods":[{"kind":"BB1"},{"kind":"ANGR1","tau1":0.2,"tau2":1}],
                "n":60,"kappa":[1e4],"eps":[1e-6],"seeds":[1,2],"max_iter":5000,"output_dir":"o"}"#,
        );
        let (a, _) = execute(&c, Some(1)).unwrap();
        let (b, _) = execute(&c, Some(4)).unwrap();
        let strip = |v: Vec<RunRecord>| v.into_iter().map(|r| RunRecord { time_ms: 0.0, ..r }).collect::<Vec<_>>();
        assert_eq!(strip(a), strip(b));
    }
}
