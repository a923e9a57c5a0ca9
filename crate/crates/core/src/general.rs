//! Nonmonotone projected gradient method with retard steps for smooth
//! objectives over boxes.
//!
//! Each iteration moves along `d_k = P(x_k − α_k g_k) − x_k`, picks `λ_k` by
//! the adaptive nonmonotone line search and forms the next stepsize from the
//! barred BB quantities (`ȳ_i = 0` wherever `s_i = 0`).

use alloc::vec;
use alloc::vec::Vec;

use crate::bounds::residual_into;
use crate::linalg::{check_len, dot, norm2, norm_inf};
use crate::linesearch::{dz_search, dz_update, DZParams, DZState};
use crate::stepsize::{bb1, bb2, Branch, RuleKind, Selection, StepHistory, StepsizeRule};
use crate::{BoxBounds, Error, Result, SmoothObjective};

pub use crate::quad::TraceLevel;
pub use crate::stepsize::bound_select;

/// `ȳ_i = g_curr_i − g_prev_i`, or 0 where `s_i = 0`.
pub fn bar_y(s: &[f64], g_curr: &[f64], g_prev: &[f64]) -> Result<Vec<f64>> {
    check_len(s.len(), g_curr.len())?;
    check_len(s.len(), g_prev.len())?;
    Ok(s.iter()
        .zip(g_curr.iter().zip(g_prev))
        .map(|(si, (gc, gp))| if *si == 0.0 { 0.0 } else { gc - gp })
        .collect())
}

/// `(bar-α^{BB1}, bar-α^{BB2})`, or a curvature failure when `sᵀȳ <= 0`.
pub fn bar_bb_steps(s: &[f64], ybar: &[f64]) -> Result<(f64, f64)> {
    Ok((bb1(s, ybar)?, bb2(s, ybar)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenRunConfig {
    /// Tolerance on `‖ḡ_k‖∞`.
    pub eps: f64,
    pub max_iter: usize,
    pub rule: StepsizeRule,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub line_search: DZParams,
    pub x0: Vec<f64>,
    pub trace_level: TraceLevel,
}

impl GenRunConfig {
    /// Defaults: `eps = 1e-6`, 200 000 iterations, `α ∈ [1e-30, 1e30]`,
    /// `M = 8`, `σ = 1e-4`, `L = 3`.
    pub fn new(rule: StepsizeRule, x0: Vec<f64>) -> Result<Self> {
        let cfg = Self {
            eps: 1e-6,
            max_iter: 200_000,
            rule,
            alpha_min: 1e-30,
            alpha_max: 1e30,
            line_search: DZParams::default(),
            x0,
            trace_level: TraceLevel::Summary,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !matches!(self.rule.kind(), RuleKind::Angr1 | RuleKind::Angr2 | RuleKind::Bb1DzBaseline | RuleKind::Bb1) {
            return Err(Error::UnsupportedRule(self.rule.kind()));
        }
        if !(self.eps > 0.0) {
            return Err(Error::InvalidArgument("eps must be positive"));
        }
        if !(self.alpha_min > 0.0 && self.alpha_min <= self.alpha_max) {
            return Err(Error::InvalidArgument("need 0 < alpha_min <= alpha_max"));
        }
        self.line_search.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenIter {
    pub k: usize,
    pub f: f64,
    /// `‖ḡ_k‖∞`
    pub pg_inf: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub branch: Branch,
    pub fevals: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Converged,
    MaxIter,
    /// The run stopped early; the trace holds the last accepted iterate.
    Failed(Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenTrace {
    pub iters: Vec<GenIter>,
    pub iterations: usize,
    pub fevals: usize,
    pub gevals: usize,
    pub termination: Termination,
    pub f: f64,
    /// `‖ḡ‖∞` at the final iterate.
    pub pg_inf: f64,
    pub x: Vec<f64>,
    pub g: Vec<f64>,
    /// Iterations whose unit step passed the reference test.
    pub unit_steps: usize,
    /// Largest bound violation over all iterates.
    pub max_violation: f64,
}

impl GenTrace {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }
}

fn clamp_alpha(a: f64, cfg: &GenRunConfig) -> f64 {
    if a.is_nan() {
        cfg.alpha_max
    } else {
        a.clamp(cfg.alpha_min, cfg.alpha_max)
    }
}

/// Safeguarded restart stepsize `1/‖ḡ‖∞`.
fn restart_alpha(pg_inf: f64, cfg: &GenRunConfig) -> f64 {
    clamp_alpha(1.0 / pg_inf, cfg)
}

pub fn solve_general<O: SmoothObjective + ?Sized>(obj: &O, bounds: &BoxBounds, cfg: &GenRunConfig) -> Result<GenTrace> {
    cfg.validate()?;
    let n = obj.dim();
    check_len(n, cfg.x0.len())?;
    check_len(n, bounds.dim())?;
    let full = cfg.trace_level == TraceLevel::Full;

    let mut x = vec![0.0; n];
    bounds.project_into(&cfg.x0, &mut x);
    let mut g = vec![0.0; n];
    let mut f = obj.eval_into(&x, &mut g);
    let (mut fevals, mut gevals) = (1, 1);
    if !f.is_finite() || !g.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("objective at the starting point"));
    }
    let mut pg = vec![0.0; n];
    residual_into(&x, &g, bounds, &mut pg);
    let mut pg_inf = norm_inf(&pg);

    let mut history = StepHistory::new();
    history.push(&x, &g, f, norm2(&pg))?;
    let mut ls = DZState::new(f, cfg.line_search)?;
    let mut alpha = restart_alpha(norm_inf(&g), cfg);
    let mut branch = Branch::Warmup;

    let mut d = vec![0.0; n];
    let mut x_trial = vec![0.0; n];
    let mut g_trial = vec![0.0; n];
    let mut iters = Vec::new();
    let mut unit_steps = 0;
    let mut max_violation = 0.0f64;
    let mut k = 0;

    let termination = loop {
        if pg_inf <= cfg.eps {
            break Termination::Converged;
        }
        if k == cfg.max_iter {
            break Termination::MaxIter;
        }
        for i in 0..n {
            d[i] = bounds.clamp(i, x[i] - alpha * g[i]) - x[i];
        }
        let gd = dot(&g, &d);
        if !(gd < 0.0) {
            break Termination::Failed(Error::NotDescentDirection);
        }
        let step = dz_search(
            &ls,
            f,
            |t| {
                for i in 0..n {
                    x_trial[i] = bounds.clamp(i, x[i] + t * d[i]);
                }
                obj.eval_into(&x_trial, &mut g_trial)
            },
            gd,
        );
        let step = match step {
            Ok(s) => s,
            Err(e) => {
                let evals = match e {
                    Error::LineSearchFailure { trials } => trials + 1,
                    _ => 0,
                };
                fevals += evals;
                gevals += evals;
                break Termination::Failed(e);
            }
        };
        fevals += step.evals;
        gevals += step.evals;
        if !g_trial.iter().all(|v| v.is_finite()) {
            break Termination::Failed(Error::NonFinite("gradient"));
        }
        if step.unit_accepted {
            unit_steps += 1;
        }
        if full {
            iters.push(GenIter { k, f, pg_inf, alpha, lambda: step.lambda, branch, fevals: step.evals });
        }

        dz_update(&mut ls, step.f)?;
        history.set_step(alpha, step.lambda)?;
        core::mem::swap(&mut x, &mut x_trial);
        core::mem::swap(&mut g, &mut g_trial);
        f = step.f;
        max_violation = max_violation.max(bounds.violation(&x));
        residual_into(&x, &g, bounds, &mut pg);
        pg_inf = norm_inf(&pg);
        let rec = history.push(&x, &g, f, norm2(&pg))?;
        k += 1;

        let sel = if rec.bb1.is_some() {
            bound_select(&history, &cfg.rule).ok()
        } else {
            None
        };
        (alpha, branch) = match sel {
            Some(Selection { alpha: a, branch: b }) if a > 0.0 && a.is_finite() => (clamp_alpha(a, cfg), b),
            _ => (restart_alpha(pg_inf, cfg), Branch::Safeguard),
        };
    };

    Ok(GenTrace {
        iters,
        iterations: k,
        fevals,
        gevals,
        termination,
        f,
        pg_inf,
        x,
        g,
        unit_steps,
        max_violation,
    })
}
