//! Adaptive selection between long BB, short BB and monotone steps.

use super::{
    gamma_current_residual, gamma_retard_residual, mg_from_product, sd_from_product, tilde_bb2, Branch, RuleKind,
    StepHistory, StepRecord, StepsizeRule,
};
use crate::{Error, Result};

/// Scalars the gate looks at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateInputs {
    pub bb1: f64,
    pub bb2: f64,
    pub gnorm_prev: f64,
    pub gnorm: f64,
}

/// Case selection shared by ANGM, ANGR1, ANGR2 and their box variants.
///
/// Both comparisons are strict, so `α^{BB2} = τ₁α^{BB1}` takes the long step.
pub fn gate(inputs: &GateInputs, tau1: f64, tau2: f64) -> Branch {
    if inputs.bb2 < tau1 * inputs.bb1 {
        if inputs.gnorm_prev < tau2 * inputs.gnorm {
            Branch::MinShort
        } else {
            Branch::Monotone
        }
    } else {
        Branch::Long
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub alpha: f64,
    pub branch: Branch,
}

impl Selection {
    fn new(alpha: f64, branch: Branch) -> Self {
        Self { alpha, branch }
    }
}

/// Gate inputs plus `α_{k−1}^{BB2}` for the newest record.
struct Gated<'a> {
    cur: &'a StepRecord,
    inputs: GateInputs,
    bb2_prev: f64,
}

fn gated(history: &StepHistory) -> Result<Gated<'_>> {
    let cur = history.latest().ok_or(Error::Warmup)?;
    if cur.k < 2 {
        return Err(Error::Warmup);
    }
    let prev = history.get(cur.k - 1)?;
    let (bb1, bb2) = match (cur.bb1, cur.bb2) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::CurvatureFailure),
    };
    let bb2_prev = prev.bb2.ok_or(Error::Warmup)?;
    Ok(Gated {
        cur,
        inputs: GateInputs {
            bb1,
            bb2,
            gnorm_prev: prev.gate_norm,
            gnorm: cur.gate_norm,
        },
        bb2_prev,
    })
}

fn check_kind(rule: &StepsizeRule, expected: RuleKind) -> Result<()> {
    if rule.kind() == expected {
        Ok(())
    } else {
        Err(Error::UnsupportedRule(rule.kind()))
    }
}

fn positive(v: f64) -> Option<f64> {
    (v > 0.0 && v.is_finite()).then_some(v)
}

/// Shared skeleton: evaluate the gate and defer case 2 to `monotone`, which
/// returns `None` when its inputs are unavailable.
fn select_with(
    history: &StepHistory,
    rule: &StepsizeRule,
    monotone: impl FnOnce(&StepHistory, &Gated<'_>) -> Option<f64>,
) -> Result<Selection> {
    let gt = gated(history)?;
    let min_short = f64::min(gt.inputs.bb2, gt.bb2_prev);
    Ok(match gate(&gt.inputs, rule.tau1(), rule.tau2()) {
        Branch::Long => Selection::new(gt.inputs.bb1, Branch::Long),
        Branch::MinShort => Selection::new(min_short, Branch::MinShort),
        _ => match monotone(history, &gt) {
            Some(a) => Selection::new(a, Branch::Monotone),
            None => Selection::new(min_short, Branch::MonotoneFallback),
        },
    })
}

/// ANGM: case 2 takes `tilde-α_k^{BB2}` from `hat-α_{k−1}`, `α_k^{MG}` and
/// `Γ_k`. `ag_k` is the product `A g_k` the quadratic driver computes anyway.
pub fn select_angm(history: &StepHistory, rule: &StepsizeRule, ag_k: &[f64]) -> Result<Selection> {
    check_kind(rule, RuleKind::Angm)?;
    select_with(history, rule, |h, gt| {
        let k = gt.cur.k;
        let prev = h.get(k - 1).ok()?;
        let prev2 = h.get(k - 2).ok()?;
        let hat = prev.hat_alpha?;
        let mg = positive(mg_from_product(&gt.cur.g, ag_k).ok()?)?;
        let gamma =
            gamma_current_residual(prev.q.as_deref()?, prev.r.as_deref()?, &gt.cur.g, ag_k, prev2.effective_step())
                .ok()?;
        positive(tilde_bb2(hat, mg, gamma).ok()?)
    })
}

/// Retarded `tilde-α_{k−1}^{BB2}` built from stored gradients, with
/// `α_k^{BB2}` standing in for `α_{k−1}^{MG}`.
pub(crate) fn retarded_tilde_bb2(h: &StepHistory, cur: &StepRecord, bb2: f64) -> Option<f64> {
    let k = cur.k;
    if k < 3 {
        return None;
    }
    let r1 = h.get(k - 1).ok()?;
    let r2 = h.get(k - 2).ok()?;
    let r3 = h.get(k - 3).ok()?;
    let hat = r2.hat_alpha?;
    let gamma = gamma_retard_residual(
        r2.q.as_deref()?,
        r2.r.as_deref()?,
        &r1.g,
        &cur.g,
        r3.effective_step(),
        r1.effective_step(),
    )
    .ok()?;
    if !gamma.is_finite() || gamma < 0.0 {
        return None;
    }
    positive(tilde_bb2(hat, bb2, gamma).ok()?)
}

/// `hat-α_{k−2}`, when available and positive.
pub(crate) fn retarded_hat(h: &StepHistory, cur: &StepRecord) -> Option<f64> {
    if cur.k < 2 {
        return None;
    }
    h.get(cur.k - 2).ok()?.hat_alpha
}

/// ANGR1: case 2 takes the retarded `tilde-α_{k−1}^{BB2}`.
pub fn select_angr1(history: &StepHistory, rule: &StepsizeRule) -> Result<Selection> {
    check_kind(rule, RuleKind::Angr1)?;
    select_with(history, rule, |h, gt| retarded_tilde_bb2(h, gt.cur, gt.inputs.bb2))
}

/// ANGR2: case 2 takes `min(α_k^{BB2}, hat-α_{k−2})`.
pub fn select_angr2(history: &StepHistory, rule: &StepsizeRule) -> Result<Selection> {
    check_kind(rule, RuleKind::Angr2)?;
    select_with(history, rule, |h, gt| {
        retarded_hat(h, gt.cur).map(|hat| f64::min(gt.inputs.bb2, hat))
    })
}

/// Stepsize for the newest record (`k >= 1`) under `rule`.
///
/// `ag_k = A g_k` is required by SD, MG and ANGM. Adaptive rules in warmup
/// fall back to BB1. DY needs the previous Cauchy step and is driven by the
/// quadratic solver directly.
pub fn select_rule(history: &StepHistory, rule: &StepsizeRule, ag_k: Option<&[f64]>) -> Result<Selection> {
    let cur = history.latest().ok_or(Error::Warmup)?;
    let need_ag = || ag_k.ok_or(Error::UnsupportedRule(rule.kind()));
    let bb1 = || cur.bb1.ok_or(Error::CurvatureFailure);
    let adaptive = |r: Result<Selection>| match r {
        Err(Error::Warmup) => bb1().map(|a| Selection::new(a, Branch::Warmup)),
        other => other,
    };
    match rule.kind() {
        RuleKind::Sd => Ok(Selection::new(sd_from_product(&cur.g, need_ag()?)?, Branch::Plain)),
        RuleKind::Mg => Ok(Selection::new(mg_from_product(&cur.g, need_ag()?)?, Branch::Plain)),
        RuleKind::Bb1 | RuleKind::Bb1DzBaseline => Ok(Selection::new(bb1()?, Branch::Plain)),
        RuleKind::Bb2 => cur
            .bb2
            .map(|a| Selection::new(a, Branch::Plain))
            .ok_or(Error::CurvatureFailure),
        RuleKind::Angm => adaptive(select_angm(history, rule, need_ag()?)),
        RuleKind::Angr1 => adaptive(select_angr1(history, rule)),
        RuleKind::Angr2 => adaptive(select_angr2(history, rule)),
        RuleKind::Dy => Err(Error::UnsupportedRule(RuleKind::Dy)),
    }
}

/// Stepsize for the box-constrained method from barred BB quantities.
///
/// The history must be fed `ȳ` (its `push` does this) and projected residual
/// norms as gate norms. ANGR1 caps its monotone step by `bar-α_k^{BB2}`; BB1
/// and the baseline return `bar-α_k^{BB1}`. Warmup returns `bar-α_k^{BB1}`.
pub fn bound_select(history: &StepHistory, rule: &StepsizeRule) -> Result<Selection> {
    let cur = history.latest().ok_or(Error::Warmup)?;
    let bb1 = cur.bb1.ok_or(Error::CurvatureFailure)?;
    let r = match rule.kind() {
        RuleKind::Bb1 | RuleKind::Bb1DzBaseline => return Ok(Selection::new(bb1, Branch::Plain)),
        RuleKind::Angr1 => select_with(history, rule, |h, gt| {
            retarded_tilde_bb2(h, gt.cur, gt.inputs.bb2).map(|t| t.min(gt.inputs.bb2))
        }),
        RuleKind::Angr2 => select_angr2(history, rule),
        other => return Err(Error::UnsupportedRule(other)),
    };
    match r {
        Err(Error::Warmup) => Ok(Selection::new(bb1, Branch::Warmup)),
        other => other,
    }
}
