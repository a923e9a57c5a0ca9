use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::{bb1, bb2, compute_q_into, hat_from_residual};
use crate::linalg::{check_len, norm2};
use crate::{Error, Result};

/// Records kept by [`StepHistory`]. `Γ_{k−1}` needs `g_{k−3}`, `q_{k−2}` and
/// `α_{k−3}`, so four iterations suffice.
pub const HISTORY_DEPTH: usize = 4;

/// Everything known about iteration `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub k: usize,
    pub x: Vec<f64>,
    pub g: Vec<f64>,
    pub f: f64,
    /// `‖g_k‖₂`
    pub gnorm: f64,
    /// Norm compared in the adaptive gate: `‖g_k‖₂` unconstrained, the
    /// projected residual norm `‖ḡ_k‖₂` with bounds.
    pub gate_norm: f64,
    /// Stepsize `α_k` chosen for this iteration (NaN until set).
    pub alpha: f64,
    /// Line-search step length `λ_k` (1 for exact-step runs).
    pub step_length: f64,
    /// `α_k^{BB1}` from `(s_{k−1}, ȳ_{k−1})`; `None` at `k = 0` or when
    /// `sᵀȳ <= 0`.
    pub bb1: Option<f64>,
    pub bb2: Option<f64>,
    /// Approximate `q_k` from `(g_{k−1}, g_k)`; `None` at `k = 0`.
    pub q: Option<Vec<f64>>,
    /// `q_k − g_{k−1}` on coordinates that moved (zero elsewhere); equals
    /// `α_{k−1} A q_k` on quadratics.
    pub r: Option<Vec<f64>>,
    /// `hat-α_k` from `(q_k, g_{k−1}, α_{k−1}λ_{k−1})`; `None` when the
    /// formula is degenerate, nonpositive or non-finite.
    pub hat_alpha: Option<f64>,
}

impl StepRecord {
    /// The step actually taken along `−g_k`: `λ_k α_k`.
    pub fn effective_step(&self) -> f64 {
        self.alpha * self.step_length
    }
}

/// Ring buffer of the most recent iterations, indexed by true iteration
/// number. Single writer: the owning solver.
#[derive(Debug, Clone)]
pub struct StepHistory {
    depth: usize,
    records: VecDeque<StepRecord>,
    scratch_s: Vec<f64>,
    scratch_y: Vec<f64>,
}

impl Default for StepHistory {
    fn default() -> Self {
        Self::new()
    }
}

impl StepHistory {
    pub fn new() -> Self {
        Self::with_depth(HISTORY_DEPTH).expect("default depth is valid")
    }

    pub fn with_depth(depth: usize) -> Result<Self> {
        if depth < HISTORY_DEPTH {
            return Err(Error::InvalidArgument("history depth must be at least 4"));
        }
        Ok(Self {
            depth,
            records: VecDeque::with_capacity(depth),
            scratch_s: Vec::new(),
            scratch_y: Vec::new(),
        })
    }

    pub fn clear(&mut self) {
        self.records.clear();
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Index of the newest record.
    pub fn current_k(&self) -> Option<usize> {
        self.records.back().map(|r| r.k)
    }

    pub fn latest(&self) -> Option<&StepRecord> {
        self.records.back()
    }

    /// Record of iteration `k`, or an error if it was never pushed or has been
    /// evicted.
    pub fn get(&self, k: usize) -> Result<&StepRecord> {
        let front = self.records.front().ok_or(Error::Warmup)?;
        let back = self.records.back().map(|r| r.k).unwrap_or(0);
        if k < front.k {
            return Err(Error::HistoryEvicted { requested: k, oldest: front.k });
        }
        if k > back {
            return Err(Error::Warmup);
        }
        Ok(&self.records[k - front.k])
    }

    /// Appends iteration `k + 1` and derives its BB steps, `q` and `hat-α`
    /// from the previous record. Components with `s_i = 0` are dropped from
    /// `ȳ` and `q`, which leaves unconstrained runs unchanged.
    ///
    /// The previous record must have its stepsize set.
    pub fn push(&mut self, x: &[f64], g: &[f64], f: f64, gate_norm: f64) -> Result<&StepRecord> {
        check_len(x.len(), g.len())?;
        let k = match self.records.back() {
            None => 0,
            Some(prev) => {
                check_len(prev.x.len(), x.len())?;
                if !prev.alpha.is_finite() {
                    return Err(Error::InvalidState("previous stepsize was never set"));
                }
                prev.k + 1
            }
        };

        let mut rec = if self.records.len() == self.depth {
            self.records.pop_front().expect("full buffer")
        } else {
            StepRecord {
                k: 0,
                x: Vec::new(),
                g: Vec::new(),
                f: 0.0,
                gnorm: 0.0,
                gate_norm: 0.0,
                alpha: f64::NAN,
                step_length: 1.0,
                bb1: None,
                bb2: None,
                q: None,
                r: None,
                hat_alpha: None,
            }
        };
        rec.k = k;
        rec.x.clear();
        rec.x.extend_from_slice(x);
        rec.g.clear();
        rec.g.extend_from_slice(g);
        rec.f = f;
        rec.gnorm = norm2(g);
        rec.gate_norm = gate_norm;
        rec.alpha = f64::NAN;
        rec.step_length = 1.0;
        rec.bb1 = None;
        rec.bb2 = None;
        rec.hat_alpha = None;

        match self.records.back() {
            None => {
                rec.q = None;
                rec.r = None;
            }
            Some(prev) => {
                let n = x.len();
                self.scratch_s.resize(n, 0.0);
                self.scratch_y.resize(n, 0.0);
                for i in 0..n {
                    let s = x[i] - prev.x[i];
                    self.scratch_s[i] = s;
                    self.scratch_y[i] = if s == 0.0 { 0.0 } else { g[i] - prev.g[i] };
                }
                rec.bb1 = bb1(&self.scratch_s, &self.scratch_y).ok();
                rec.bb2 = bb2(&self.scratch_s, &self.scratch_y).ok();

                let mut q = rec.q.take().unwrap_or_default();
                q.resize(n, 0.0);
                compute_q_into(&prev.g, g, Some(&self.scratch_s), &mut q);
                let mut r = rec.r.take().unwrap_or_default();
                r.resize(n, 0.0);
                for i in 0..n {
                    r[i] = if self.scratch_s[i] == 0.0 { 0.0 } else { q[i] - prev.g[i] };
                }
                rec.hat_alpha = hat_from_residual(&q, &r, prev.effective_step())
                    .ok()
                    .filter(|h| *h > 0.0 && h.is_finite());
                rec.q = Some(q);
                rec.r = Some(r);
            }
        }
        self.records.push_back(rec);
        Ok(self.records.back().expect("just pushed"))
    }

    /// Sets `α_k` and `λ_k` on the newest record.
    pub fn set_step(&mut self, alpha: f64, step_length: f64) -> Result<()> {
        let rec = self.records.back_mut().ok_or(Error::Warmup)?;
        rec.alpha = alpha;
        rec.step_length = step_length;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = &StepRecord> {
        self.records.iter()
    }
}
