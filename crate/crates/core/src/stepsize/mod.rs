//! Stepsize rules for gradient iterations `x_{k+1} = x_k − α_k g_k`.
//!
//! The free functions are pure formulas. [`StepHistory`] keeps the last few
//! iterations and derives the per-iteration quantities (BB steps, the
//! auxiliary vector `q_k`, `hat-α_k`), and the `select_*` functions combine
//! them into the adaptive rules.
//!
//! Naming: `q_k` solves `(I − α_{k−1}A) q_k = g_{k−1}`; `hat-α_k` is the
//! minimal-gradient step along `q_k`; `Γ_k` couples `q_{k−1}` and `g_k`. The
//! monotone steps `tilde_bb1`/`tilde_bb2` are the smaller root of the 2×2
//! eigenvalue problem built on `span{q_{k−1}, g_k}`.

mod adaptive;
mod history;

pub use adaptive::{
    bound_select, gate, select_angm, select_angr1, select_angr2, select_rule, GateInputs, Selection,
};
pub use history::{StepHistory, StepRecord, HISTORY_DEPTH};

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{check_len, dot};
use crate::math::sqrt;
use crate::objective::QuadraticModel;
use crate::{Error, Result};

/// Components of `g_k` smaller than this are treated as zero by [`compute_q`].
pub const Q_ZERO_GUARD: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    Sd,
    Mg,
    Bb1,
    Bb2,
    Dy,
    Angm,
    Angr1,
    Angr2,
    /// BB1 stepsize with the nonmonotone line search; the projected baseline.
    Bb1DzBaseline,
}

impl RuleKind {
    pub const ALL: [RuleKind; 9] = [
        RuleKind::Sd,
        RuleKind::Mg,
        RuleKind::Bb1,
        RuleKind::Bb2,
        RuleKind::Dy,
        RuleKind::Angm,
        RuleKind::Angr1,
        RuleKind::Angr2,
        RuleKind::Bb1DzBaseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleKind::Sd => "SD",
            RuleKind::Mg => "MG",
            RuleKind::Bb1 => "BB1",
            RuleKind::Bb2 => "BB2",
            RuleKind::Dy => "DY",
            RuleKind::Angm => "ANGM",
            RuleKind::Angr1 => "ANGR1",
            RuleKind::Angr2 => "ANGR2",
            RuleKind::Bb1DzBaseline => "BB1-DZ",
        }
    }

    /// Accepts the display name, case-insensitively, with `-`/`_` interchangeable.
    pub fn parse(s: &str) -> Option<Self> {
        let norm = |c: char| if c == '_' { '-' } else { c.to_ascii_uppercase() };
        Self::ALL.into_iter().find(|k| {
            k.name().len() == s.len() && k.name().chars().zip(s.chars()).all(|(a, b)| a == norm(b))
        })
    }

    /// Rules whose formulas need the Hessian operator.
    pub fn requires_quadratic(self) -> bool {
        matches!(self, RuleKind::Sd | RuleKind::Mg | RuleKind::Dy | RuleKind::Angm)
    }

    pub fn is_adaptive(self) -> bool {
        matches!(self, RuleKind::Angm | RuleKind::Angr1 | RuleKind::Angr2)
    }
}

/// A stepsize policy with its gate thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepsizeRule {
    kind: RuleKind,
    tau1: f64,
    tau2: f64,
}

impl StepsizeRule {
    /// `tau1 ∈ (0,1)`, `tau2 ≥ 1`.
    pub fn new(kind: RuleKind, tau1: f64, tau2: f64) -> Result<Self> {
        if !(tau1 > 0.0 && tau1 < 1.0) {
            return Err(Error::InvalidArgument("tau1 must lie in (0, 1)"));
        }
        if !(tau2 >= 1.0 && tau2.is_finite()) {
            return Err(Error::InvalidArgument("tau2 must be >= 1"));
        }
        Ok(Self { kind, tau1, tau2 })
    }

    /// A rule without gate parameters (the thresholds are unused).
    pub fn plain(kind: RuleKind) -> Self {
        Self { kind, tau1: 0.5, tau2: 1.0 }
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }
    pub fn tau1(&self) -> f64 {
        self.tau1
    }
    pub fn tau2(&self) -> f64 {
        self.tau2
    }
}

/// Which case of a rule produced the step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Non-adaptive rule (SD, MG, BB1, BB2, the SD half of DY).
    Plain,
    /// Yuan step inside the DY schedule.
    Yuan,
    /// Not enough history; BB1 or the initial step was used.
    Warmup,
    /// Gate case 1: `min(α_k^{BB2}, α_{k−1}^{BB2})`.
    MinShort,
    /// Gate case 2: the monotone (tilde or hat) step.
    Monotone,
    /// Gate case 2 fired but its retard quantities were unavailable, so the
    /// case-1 value was used.
    MonotoneFallback,
    /// Gate case 3: `α_k^{BB1}`.
    Long,
    /// Degenerate formula; `1/‖g_k‖∞` was substituted.
    Safeguard,
    /// Supplied by a caller hook instead of the rule.
    Injected,
}

impl Branch {
    /// Gate case number (1, 2, 3) for the adaptive rules.
    pub fn case(self) -> Option<u8> {
        match self {
            Branch::MinShort => Some(1),
            Branch::Monotone | Branch::MonotoneFallback => Some(2),
            Branch::Long => Some(3),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::Plain => "plain",
            Branch::Yuan => "yuan",
            Branch::Warmup => "warmup",
            Branch::MinShort => "min-short",
            Branch::Monotone => "monotone",
            Branch::MonotoneFallback => "monotone-fallback",
            Branch::Long => "long",
            Branch::Safeguard => "safeguard",
            Branch::Injected => "injected",
        }
    }
}

/// Long BB step `sᵀs / sᵀy`.
pub fn bb1(s: &[f64], y: &[f64]) -> Result<f64> {
    check_len(s.len(), y.len())?;
    let sy = dot(s, y);
    if !(sy > 0.0) {
        return Err(Error::CurvatureFailure);
    }
    Ok(dot(s, s) / sy)
}

/// Short BB step `sᵀy / yᵀy`.
pub fn bb2(s: &[f64], y: &[f64]) -> Result<f64> {
    check_len(s.len(), y.len())?;
    let sy = dot(s, y);
    if !(sy > 0.0) {
        return Err(Error::CurvatureFailure);
    }
    Ok(sy / dot(y, y))
}

/// Exact line-search (Cauchy) step `gᵀg / gᵀAg`.
pub fn sd_step<M: QuadraticModel + ?Sized>(g: &[f64], model: &M) -> Result<f64> {
    check_len(model.dim(), g.len())?;
    let mut ag = vec![0.0; g.len()];
    model.apply(g, &mut ag);
    sd_from_product(g, &ag)
}

/// Minimal-gradient step `gᵀAg / (Ag)ᵀ(Ag)`.
pub fn mg_step<M: QuadraticModel + ?Sized>(g: &[f64], model: &M) -> Result<f64> {
    check_len(model.dim(), g.len())?;
    let mut ag = vec![0.0; g.len()];
    model.apply(g, &mut ag);
    mg_from_product(g, &ag)
}

/// [`sd_step`] given the cached product `ag = A g`.
pub fn sd_from_product(g: &[f64], ag: &[f64]) -> Result<f64> {
    let gg = dot(g, g);
    if gg == 0.0 {
        return Err(Error::AlreadyConverged);
    }
    Ok(gg / dot(g, ag))
}

/// [`mg_step`] given the cached product `ag = A g`.
pub fn mg_from_product(g: &[f64], ag: &[f64]) -> Result<f64> {
    let aa = dot(ag, ag);
    if aa == 0.0 {
        return Err(Error::AlreadyConverged);
    }
    Ok(dot(g, ag) / aa)
}

/// Long step of the DY schedule, built from two consecutive Cauchy steps.
pub fn yuan_step(alpha_sd_prev: f64, alpha_sd_curr: f64, gnorm_prev: f64, gnorm_curr: f64) -> Result<f64> {
    if !(alpha_sd_prev > 0.0 && alpha_sd_curr > 0.0 && gnorm_prev > 0.0) {
        return Err(Error::InvalidArgument("yuan step needs positive stepsizes and norms"));
    }
    if !(gnorm_curr >= 0.0) {
        return Err(Error::InvalidArgument("gradient norm must be nonnegative"));
    }
    let (a, b) = (1.0 / alpha_sd_prev, 1.0 / alpha_sd_curr);
    let c = gnorm_curr / (alpha_sd_prev * gnorm_prev);
    Ok(smaller_root(a, b, 4.0 * c * c))
}

/// `2 / (a + b + sqrt((a − b)² + c))`: the reciprocal of the larger eigenvalue
/// of `[[a, h], [h, b]]` with `c = 4h²`.
#[inline]
fn smaller_root(a: f64, b: f64, c: f64) -> f64 {
    let d = a - b;
    2.0 / (a + b + sqrt(d * d + c))
}

/// Half of the DY schedule that applies at iteration `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DyStep {
    Sd,
    Yuan,
}

pub fn dy_select(k: usize) -> DyStep {
    if k % 4 < 2 {
        DyStep::Sd
    } else {
        DyStep::Yuan
    }
}

/// Diagonal approximation of `q_k`: `q_i = g_prev_i² / g_curr_i`, zero where
/// `|g_curr_i| < 1e-300`.
pub fn compute_q(g_prev: &[f64], g_curr: &[f64]) -> Result<Vec<f64>> {
    check_len(g_prev.len(), g_curr.len())?;
    let mut q = vec![0.0; g_prev.len()];
    compute_q_into(g_prev, g_curr, None, &mut q);
    Ok(q)
}

/// As [`compute_q`], additionally zeroing components where `s_i = 0`.
pub(crate) fn compute_q_into(g_prev: &[f64], g_curr: &[f64], s: Option<&[f64]>, q: &mut [f64]) {
    for (i, (qi, (gp, gc))) in q.iter_mut().zip(g_prev.iter().zip(g_curr)).enumerate() {
        let frozen = s.is_some_and(|s| s[i] == 0.0);
        *qi = if frozen || gc.abs() < Q_ZERO_GUARD { 0.0 } else { gp * gp / gc };
    }
}

/// Exact `q_k` for a diagonal Hessian: `q_i = g_prev_i / (1 − α_prev λ_i)`.
/// Test oracle for [`compute_q`] and the orthogonality properties.
pub fn exact_q(g_prev: &[f64], alpha_prev: f64, spectrum: &[f64]) -> Result<Vec<f64>> {
    check_len(spectrum.len(), g_prev.len())?;
    g_prev
        .iter()
        .zip(spectrum)
        .enumerate()
        .map(|(i, (g, lam))| {
            let d = 1.0 - alpha_prev * lam;
            if d.abs() < 1e-14 {
                Err(Error::SingularResolvent { index: i })
            } else {
                Ok(g / d)
            }
        })
        .collect()
}

/// Matrix-free `hat-α_k = α_{k−1} qᵀ(q − g_{k−1}) / ‖q − g_{k−1}‖²`, using
/// `A q_k = (q_k − g_{k−1}) / α_{k−1}`.
pub fn hat_alpha(q: &[f64], g_prev: &[f64], alpha_prev: f64) -> Result<f64> {
    check_len(q.len(), g_prev.len())?;
    let r: Vec<f64> = q.iter().zip(g_prev).map(|(a, b)| a - b).collect();
    hat_from_residual(q, &r, alpha_prev)
}

/// `hat-α` from `r = q − g_{k−1}` (restricted to moved coordinates).
pub(crate) fn hat_from_residual(q: &[f64], r: &[f64], alpha_prev: f64) -> Result<f64> {
    let den = dot(r, r);
    if den == 0.0 {
        return Err(Error::Degenerate("hat-alpha"));
    }
    Ok(alpha_prev * dot(q, r) / den)
}

/// `hat-α = qᵀAq / qᵀA²q` evaluated with the operator.
pub fn hat_alpha_from_operator<M: QuadraticModel + ?Sized>(q: &[f64], model: &M) -> Result<f64> {
    check_len(model.dim(), q.len())?;
    let mut aq = vec![0.0; q.len()];
    model.apply(q, &mut aq);
    let den = dot(&aq, &aq);
    if den == 0.0 {
        return Err(Error::Degenerate("hat-alpha"));
    }
    Ok(dot(q, &aq) / den)
}

/// Retarded `Γ_{k−1}` from stored gradients only:
///
/// `4((q_{k−2}−g_{k−3})ᵀ(g_{k−1}−g_k))² / (α_{k−3} α_{k−1} ((q_{k−2}−g_{k−3})ᵀq_{k−2}) (g_{k−1}ᵀ(g_{k−1}−g_k)))`
pub fn gamma_retard(
    q_km2: &[f64],
    g_km3: &[f64],
    g_km1: &[f64],
    g_k: &[f64],
    alpha_km3: f64,
    alpha_km1: f64,
) -> Result<f64> {
    let n = q_km2.len();
    check_len(n, g_km3.len())?;
    check_len(n, g_km1.len())?;
    check_len(n, g_k.len())?;
    let r: Vec<f64> = q_km2.iter().zip(g_km3).map(|(a, b)| a - b).collect();
    gamma_retard_residual(q_km2, &r, g_km1, g_k, alpha_km3, alpha_km1)
}

/// [`gamma_retard`] given `r = q_{k−2} − g_{k−3}`.
pub(crate) fn gamma_retard_residual(
    q_km2: &[f64],
    r: &[f64],
    g_km1: &[f64],
    g_k: &[f64],
    alpha_km3: f64,
    alpha_km1: f64,
) -> Result<f64> {
    let (mut cross, mut gg) = (0.0, 0.0);
    for i in 0..r.len() {
        let dg = g_km1[i] - g_k[i];
        cross += r[i] * dg;
        gg += g_km1[i] * dg;
    }
    let den = alpha_km3 * alpha_km1 * dot(r, q_km2) * gg;
    if den == 0.0 || !den.is_finite() {
        return Err(Error::GammaUnavailable);
    }
    Ok(4.0 * cross * cross / den)
}

/// Current-iteration `Γ_k` using the cached product `ag_k = A g_k` and
/// `A q_{k−1} = (q_{k−1} − g_{k−2}) / α_{k−2}`; no extra operator application.
pub fn gamma_current(q_km1: &[f64], g_km2: &[f64], g_k: &[f64], ag_k: &[f64], alpha_km2: f64) -> Result<f64> {
    let n = q_km1.len();
    check_len(n, g_km2.len())?;
    check_len(n, g_k.len())?;
    check_len(n, ag_k.len())?;
    let r: Vec<f64> = q_km1.iter().zip(g_km2).map(|(a, b)| a - b).collect();
    gamma_current_residual(q_km1, &r, g_k, ag_k, alpha_km2)
}

/// [`gamma_current`] given `r = q_{k−1} − g_{k−2}`.
pub(crate) fn gamma_current_residual(q_km1: &[f64], r: &[f64], g_k: &[f64], ag_k: &[f64], alpha_km2: f64) -> Result<f64> {
    let cross = dot(r, ag_k);
    let den = alpha_km2 * dot(r, q_km1) * dot(g_k, ag_k);
    if den == 0.0 || !den.is_finite() {
        return Err(Error::GammaUnavailable);
    }
    Ok(4.0 * cross * cross / den)
}

/// `Γ = 4(qᵀA²g)² / (qᵀAq · gᵀAg)` evaluated with the operator.
pub fn gamma_from_operator<M: QuadraticModel + ?Sized>(q: &[f64], g: &[f64], model: &M) -> Result<f64> {
    check_len(model.dim(), q.len())?;
    check_len(q.len(), g.len())?;
    let n = q.len();
    let mut aq = vec![0.0; n];
    let mut ag = vec![0.0; n];
    model.apply(q, &mut aq);
    model.apply(g, &mut ag);
    let den = dot(q, &aq) * dot(g, &ag);
    if den == 0.0 {
        return Err(Error::GammaUnavailable);
    }
    let c = dot(&aq, &ag);
    Ok(4.0 * c * c / den)
}

/// Monotone step on `span{q_{k−1}, g_k}` with the Euclidean metric; at most
/// `min(α_k^{SD}, ‖q‖²/qᵀAq)`.
pub fn tilde_bb1<M: QuadraticModel + ?Sized>(q: &[f64], g: &[f64], model: &M) -> Result<f64> {
    check_len(model.dim(), q.len())?;
    check_len(q.len(), g.len())?;
    let (qq, gg) = (dot(q, q), dot(g, g));
    if qq == 0.0 || gg == 0.0 {
        return Err(Error::InvalidArgument("tilde-bb1 needs nonzero q and g"));
    }
    let n = q.len();
    let mut aq = vec![0.0; n];
    let mut ag = vec![0.0; n];
    model.apply(q, &mut aq);
    model.apply(g, &mut ag);
    let rq = dot(q, &aq) / qq;
    let inv_sd = dot(g, &ag) / gg;
    let qag = dot(q, &ag);
    Ok(smaller_root(rq, inv_sd, 4.0 * qag * qag / (qq * gg)))
}

/// Monotone step on `span{A^{1/2}q_{k−1}, A^{1/2}g_k}`; at most
/// `min(α^{MG}, hat-α)`.
pub fn tilde_bb2(hat_alpha_prev: f64, alpha_mg: f64, gamma: f64) -> Result<f64> {
    if !(hat_alpha_prev > 0.0 && alpha_mg > 0.0) {
        return Err(Error::InvalidArgument("tilde-bb2 needs positive stepsizes"));
    }
    if !(gamma >= 0.0) {
        return Err(Error::InvalidArgument("gamma must be nonnegative"));
    }
    Ok(smaller_root(1.0 / hat_alpha_prev, 1.0 / alpha_mg, gamma))
}

#[cfg(test)]
mod tests;
