//! Exact-step gradient method `x_{k+1} = x_k − α_k g_k` for strongly convex
//! quadratics, with one operator application per iteration.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{check_len, dot, norm2, norm_inf};
use crate::objective::{quadratic_eval_into, QuadraticModel};
use crate::rng::Rng;
use crate::stepsize::{
    dy_select, exact_q, sd_from_product, select_rule, tilde_bb1, yuan_step, Branch, DyStep,
    RuleKind, Selection, StepHistory, StepsizeRule,
};
use crate::{DiagonalQuadratic, Error, Result};

/// The gradient is recomputed from `x` this often to bound drift of the
/// recursive update `g_{k+1} = g_k − α_k A g_k`.
pub const GRADIENT_REFRESH: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceLevel {
    #[default]
    Summary,
    Full,
}

/// Stepsize used at `k = 0`, before any rule has history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialStep {
    /// Exact line search `g₀ᵀg₀ / g₀ᵀAg₀`.
    Sd,
    /// `1 / ‖g₀‖∞`
    InvInfNorm,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadRunConfig {
    pub eps: f64,
    pub max_iter: usize,
    pub rule: StepsizeRule,
    pub x0: Vec<f64>,
    pub trace_level: TraceLevel,
    pub initial_step: InitialStep,
}

impl QuadRunConfig {
    pub fn new(rule: StepsizeRule, x0: Vec<f64>, eps: f64, max_iter: usize) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument("eps must be positive"));
        }
        if max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1"));
        }
        Ok(Self {
            eps,
            max_iter,
            rule,
            x0,
            trace_level: TraceLevel::Summary,
            initial_step: InitialStep::Sd,
        })
    }

    pub fn with_trace(mut self, level: TraceLevel) -> Self {
        self.trace_level = level;
        self
    }

    pub fn with_initial_step(mut self, step: InitialStep) -> Self {
        self.initial_step = step;
        self
    }
}

/// One row of a full trace: the state at `x_k` and the step taken from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterRecord {
    pub k: usize,
    pub f: f64,
    pub gnorm: f64,
    pub alpha: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadTrace {
    /// Empty unless [`TraceLevel::Full`].
    pub iters: Vec<IterRecord>,
    pub iterations: usize,
    pub converged: bool,
    pub f: f64,
    pub gnorm: f64,
    pub gnorm0: f64,
    pub x: Vec<f64>,
    /// Operator applications, including the initial gradient and refreshes.
    pub matvecs: usize,
    /// Whether `f` never increased (up to rounding).
    pub monotone: bool,
    /// Steps per gate case `[1, 2, 3]` for adaptive rules.
    pub case_counts: [usize; 3],
}

/// What a [`StepHook`] sees before the step from `x_k` is taken.
pub struct IterView<'a> {
    pub k: usize,
    pub x: &'a [f64],
    pub g: &'a [f64],
    /// `A g_k`
    pub ag: &'a [f64],
    pub history: &'a StepHistory,
    /// What the rule chose.
    pub selection: Selection,
}

/// Observes each iteration and may replace the rule's stepsize.
pub trait StepHook {
    fn step(&mut self, view: &IterView<'_>) -> Option<f64>;
}

impl<F: FnMut(&IterView<'_>) -> Option<f64>> StepHook for F {
    fn step(&mut self, view: &IterView<'_>) -> Option<f64> {
        self(view)
    }
}

struct NoHook;

impl StepHook for NoHook {
    fn step(&mut self, _: &IterView<'_>) -> Option<f64> {
        None
    }
}

pub fn run_quadratic<M: QuadraticModel + ?Sized>(model: &M, cfg: &QuadRunConfig) -> Result<QuadTrace> {
    run_quadratic_with(model, cfg, &mut NoHook)
}

/// DY: SD and Yuan steps alternating in pairs.
pub fn run_dy<M: QuadraticModel + ?Sized>(model: &M, cfg: &QuadRunConfig) -> Result<QuadTrace> {
    let mut cfg = cfg.clone();
    cfg.rule = StepsizeRule::plain(RuleKind::Dy);
    run_quadratic(model, &cfg)
}

/// Cauchy steps and gradient norms of the last two iterations.
#[derive(Default)]
struct DyState {
    sd_prev: Option<(f64, f64)>,
}

pub fn run_quadratic_with<M, H>(model: &M, cfg: &QuadRunConfig, hook: &mut H) -> Result<QuadTrace>
where
    M: QuadraticModel + ?Sized,
    H: StepHook + ?Sized,
{
    let n = model.dim();
    check_len(n, cfg.x0.len())?;
    if model.rhs().len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: model.rhs().len() });
    }
    let kind = cfg.rule.kind();
    if kind == RuleKind::Bb1DzBaseline {
        return Err(Error::UnsupportedRule(kind));
    }

    let mut x = cfg.x0.clone();
    let mut g = vec![0.0; n];
    let mut ag = vec![0.0; n];
    let mut f = quadratic_eval_into(model, &x, &mut g);
    let mut matvecs = 1;
    let gnorm0 = norm2(&g);
    let tol = cfg.eps * gnorm0;
    let full = cfg.trace_level == TraceLevel::Full;

    let mut history = StepHistory::new();
    history.push(&x, &g, f, gnorm0)?;
    let mut iters = Vec::new();
    let mut case_counts = [0usize; 3];
    let mut monotone = true;
    let mut dy = DyState::default();
    let mut gnorm = gnorm0;
    let mut k = 0;

    let converged = loop {
        if !gnorm.is_finite() || !f.is_finite() {
            return Err(Error::NonFinite("gradient"));
        }
        if gnorm <= tol {
            break true;
        }
        if k == cfg.max_iter {
            break false;
        }
        model.apply(&g, &mut ag);
        matvecs += 1;

        let sel = if kind == RuleKind::Dy {
            dy_step(&mut dy, k, &g, &ag, gnorm)?
        } else if k == 0 {
            initial_selection(cfg.initial_step, &g, &ag)?
        } else {
            match select_rule(&history, &cfg.rule, Some(&ag)) {
                Ok(s) => s,
                Err(Error::CurvatureFailure) | Err(Error::Degenerate(_)) => {
                    Selection { alpha: f64::NAN, branch: Branch::Safeguard }
                }
                Err(e) => return Err(e),
            }
        };
        let view = IterView { k, x: &x, g: &g, ag: &ag, history: &history, selection: sel };
        let mut sel = match hook.step(&view) {
            Some(alpha) => Selection { alpha, branch: Branch::Injected },
            None => sel,
        };
        if !(sel.alpha > 0.0 && sel.alpha.is_finite()) {
            sel = Selection { alpha: 1.0 / norm_inf(&g), branch: Branch::Safeguard };
        }
        if let Some(c) = sel.branch.case() {
            case_counts[c as usize - 1] += 1;
        }
        if full {
            iters.push(IterRecord { k, f, gnorm, alpha: sel.alpha, branch: sel.branch });
        }
        history.set_step(sel.alpha, 1.0)?;

        let alpha = sel.alpha;
        for i in 0..n {
            x[i] -= alpha * g[i];
            g[i] -= alpha * ag[i];
        }
        k += 1;
        if k % GRADIENT_REFRESH == 0 {
            quadratic_eval_into(model, &x, &mut g);
            matvecs += 1;
        }
        let f_new = energy(model, &x, &g);
        let slack = 1e-12 * (f.abs() + model.offset().abs() + dot(model.rhs(), &x).abs());
        if f_new > f + slack {
            monotone = false;
        }
        f = f_new;
        gnorm = norm2(&g);
        history.push(&x, &g, f, gnorm)?;
    };

    Ok(QuadTrace {
        iters,
        iterations: k,
        converged,
        f,
        gnorm,
        gnorm0,
        x,
        matvecs,
        monotone,
        case_counts,
    })
}

/// `f = ½ xᵀ(g − b) + c`, valid whenever `g = Ax − b`.
fn energy<M: QuadraticModel + ?Sized>(model: &M, x: &[f64], g: &[f64]) -> f64 {
    let b = model.rhs();
    let mut s = 0.0;
    for i in 0..x.len() {
        s += x[i] * (g[i] - b[i]);
    }
    0.5 * s + model.offset()
}

fn initial_selection(step: InitialStep, g: &[f64], ag: &[f64]) -> Result<Selection> {
    let alpha = match step {
        InitialStep::Sd => sd_from_product(g, ag)?,
        InitialStep::InvInfNorm => 1.0 / norm_inf(g),
        InitialStep::Fixed(a) => a,
    };
    Ok(Selection { alpha, branch: Branch::Warmup })
}

fn dy_step(st: &mut DyState, k: usize, g: &[f64], ag: &[f64], gnorm: f64) -> Result<Selection> {
    let sd = sd_from_product(g, ag)?;
    let prev = st.sd_prev.replace((sd, gnorm));
    Ok(match (dy_select(k), prev) {
        (DyStep::Yuan, Some((sd_prev, gnorm_prev))) => Selection {
            alpha: yuan_step(sd_prev, sd, gnorm_prev, gnorm)?,
            branch: Branch::Yuan,
        },
        _ => Selection { alpha: sd, branch: Branch::Plain },
    })
}

/// Share of `Σ|g_i|` carried by the two largest-magnitude components.
pub fn upsilon(g: &[f64]) -> Result<f64> {
    if g.len() < 2 {
        return Err(Error::InvalidArgument("upsilon needs at least two components"));
    }
    let (mut a, mut b, mut total) = (0.0f64, 0.0f64, 0.0);
    for v in g {
        let m = v.abs();
        total += m;
        if m > a {
            b = a;
            a = m;
        } else if m > b {
            b = m;
        }
    }
    if total == 0.0 {
        return Err(Error::InvalidArgument("upsilon of the zero vector"));
    }
    Ok((a + b) / total)
}

/// Averaged terminal quantities of one variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeStats {
    pub mean_gnorm: f64,
    pub mean_f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeResult {
    pub lambda: f64,
    pub plain: ProbeStats,
    pub injected: ProbeStats,
}

/// Iterations run by the finite-termination probe.
pub const PROBE_ITERS: usize = 5;
/// Iteration at which the monotone step replaces BB1.
pub const PROBE_INJECT_AT: usize = 2;

/// BB1 on `A = diag{1, λ}`, `b = 0`, from `n_starts` uniform starts in
/// `[−10, 10]²`, with and without `tilde-α_2^{BB1}` (exact `q`), reporting
/// the mean of `‖g₅‖` and `f(x₅)`.
pub fn run_finite_termination_probe(lambda: f64, n_starts: usize, seed: u64) -> Result<ProbeResult> {
    if !(lambda > 1.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument("lambda must exceed 1"));
    }
    if n_starts == 0 {
        return Err(Error::InvalidArgument("need at least one start"));
    }
    let model = DiagonalQuadratic::homogeneous(vec![1.0, lambda])?;
    let mut rng = Rng::new(seed);
    let starts: Vec<Vec<f64>> = (0..n_starts)
        .map(|_| vec![rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)])
        .collect();
    let plain = probe_variant(&model, &starts, false)?;
    let injected = probe_variant(&model, &starts, true)?;
    Ok(ProbeResult { lambda, plain, injected })
}

fn probe_variant(model: &DiagonalQuadratic, starts: &[Vec<f64>], inject: bool) -> Result<ProbeStats> {
    let (mut gs, mut fs) = (0.0, 0.0);
    for x0 in starts {
        // run to exactly five iterations unless the start is already optimal
        let cfg = QuadRunConfig::new(StepsizeRule::plain(RuleKind::Bb1), x0.clone(), f64::MIN_POSITIVE, PROBE_ITERS)?;
        let trace = if inject {
            run_quadratic_with(model, &cfg, &mut |v: &IterView<'_>| {
                if v.k == PROBE_INJECT_AT {
                    injected_tilde_bb1(model, v)
                } else {
                    None
                }
            })?
        } else {
            run_quadratic(model, &cfg)?
        };
        gs += trace.gnorm;
        fs += trace.f;
    }
    let m = starts.len() as f64;
    Ok(ProbeStats { mean_gnorm: gs / m, mean_f: fs / m })
}

/// `tilde-α_k^{BB1}` at the viewed iteration with `q_{k−1}` solved exactly
/// from the diagonal spectrum.
pub fn injected_tilde_bb1(model: &DiagonalQuadratic, v: &IterView<'_>) -> Option<f64> {
    if v.k < 2 {
        return None;
    }
    let r = v.history.get(v.k - 2).ok()?;
    let q = exact_q(&r.g, r.effective_step(), model.diag()).ok()?;
    tilde_bb1(&q, v.g, model).ok()
}
