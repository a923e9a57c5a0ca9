//! Objective functions: the general smooth contract and matrix-free quadratics.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{check_len, dot};
use crate::{Error, Result};

/// A continuously differentiable `f: R^n -> R`.
///
/// Implementations must be deterministic: evaluating twice at the same point
/// gives bit-identical results.
pub trait SmoothObjective {
    fn dim(&self) -> usize;

    /// Writes `∇f(x)` into `grad` and returns `f(x)`.
    fn eval_into(&self, x: &[f64], grad: &mut [f64]) -> f64;

    fn eval(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let mut g = vec![0.0; self.dim()];
        let f = self.eval_into(x, &mut g);
        (f, g)
    }
}

impl<T: SmoothObjective + ?Sized> SmoothObjective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval_into(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        (**self).eval_into(x, grad)
    }
}

/// `f(x) = ½ xᵀAx − bᵀx + c` with `A` symmetric positive definite, accessed
/// only through the product `A·v`.
pub trait QuadraticModel {
    fn dim(&self) -> usize;

    /// `out = A v`
    fn apply(&self, v: &[f64], out: &mut [f64]);

    fn rhs(&self) -> &[f64];

    /// Constant term `c`. Lets generators reproduce printed objective values
    /// (e.g. `(x−x*)ᵀV(x−x*)`) without changing gradients.
    fn offset(&self) -> f64 {
        0.0
    }

    /// Eigenvalues aligned with the coordinate axes; only diagonal models
    /// provide this.
    fn spectrum_hint(&self) -> Option<&[f64]> {
        None
    }
}

impl<T: QuadraticModel + ?Sized> QuadraticModel for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply(&self, v: &[f64], out: &mut [f64]) {
        (**self).apply(v, out)
    }
    fn rhs(&self) -> &[f64] {
        (**self).rhs()
    }
    fn offset(&self) -> f64 {
        (**self).offset()
    }
    fn spectrum_hint(&self) -> Option<&[f64]> {
        (**self).spectrum_hint()
    }
}

/// Evaluates `f` and `g = Ax − b` with exactly one operator application.
pub fn quadratic_eval<M: QuadraticModel + ?Sized>(model: &M, x: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_len(model.dim(), x.len())?;
    let mut g = vec![0.0; x.len()];
    let f = quadratic_eval_into(model, x, &mut g);
    Ok((f, g))
}

pub(crate) fn quadratic_eval_into<M: QuadraticModel + ?Sized>(
    model: &M,
    x: &[f64],
    g: &mut [f64],
) -> f64 {
    model.apply(x, g);
    let b = model.rhs();
    // f = ½ xᵀ(Ax) − bᵀx
    let mut f = 0.0;
    for ((gi, xi), bi) in g.iter_mut().zip(x).zip(b) {
        f += xi * (0.5 * *gi - bi);
        *gi -= bi;
    }
    f + model.offset()
}

/// Adapter exposing a quadratic model through [`SmoothObjective`].
#[derive(Debug, Clone, Copy)]
pub struct QuadObjective<'a, M: ?Sized>(pub &'a M);

impl<M: QuadraticModel + ?Sized> SmoothObjective for QuadObjective<'_, M> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval_into(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        quadratic_eval_into(self.0, x, grad)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalQuadratic {
    diag: Vec<f64>,
    b: Vec<f64>,
    offset: f64,
}

impl DiagonalQuadratic {
    pub fn new(diag: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        Self::with_offset(diag, b, 0.0)
    }

    pub fn with_offset(diag: Vec<f64>, b: Vec<f64>, offset: f64) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidArgument("empty diagonal"));
        }
        check_len(diag.len(), b.len())?;
        if diag.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
            return Err(Error::InvalidArgument("diagonal must be positive and finite"));
        }
        Ok(Self { diag, b, offset })
    }

    /// `b = 0`
    pub fn homogeneous(diag: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        Self::new(diag, vec![0.0; n])
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }
}

impl QuadraticModel for DiagonalQuadratic {
    fn dim(&self) -> usize {
        self.diag.len()
    }
    fn apply(&self, v: &[f64], out: &mut [f64]) {
        for ((o, d), vi) in out.iter_mut().zip(&self.diag).zip(v) {
            *o = d * vi;
        }
    }
    fn rhs(&self) -> &[f64] {
        &self.b
    }
    fn offset(&self) -> f64 {
        self.offset
    }
    fn spectrum_hint(&self) -> Option<&[f64]> {
        Some(&self.diag)
    }
}

/// Small dense symmetric positive definite model, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseQuadratic {
    n: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl DenseQuadratic {
    pub fn new(n: usize, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("empty matrix"));
        }
        check_len(n * n, a.len())?;
        check_len(n, b.len())?;
        for i in 0..n {
            for j in 0..i {
                let (x, y) = (a[i * n + j], a[j * n + i]);
                if (x - y).abs() > 1e-12 * (x.abs() + y.abs() + 1.0) {
                    return Err(Error::InvalidArgument("matrix is not symmetric"));
                }
            }
        }
        Ok(Self { n, a, b })
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }
}

impl QuadraticModel for DenseQuadratic {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(&self.a[i * self.n..(i + 1) * self.n], v);
        }
    }
    fn rhs(&self) -> &[f64] {
        &self.b
    }
}

/// Symmetry probe: `|uᵀAv − vᵀAu| <= 1e-10 (|uᵀAv| + |vᵀAu| + 1)`.
pub fn is_symmetric_on<M: QuadraticModel + ?Sized>(model: &M, u: &[f64], v: &[f64]) -> bool {
    let n = model.dim();
    let mut au = vec![0.0; n];
    let mut av = vec![0.0; n];
    model.apply(u, &mut au);
    model.apply(v, &mut av);
    let (uav, vau) = (dot(u, &av), dot(v, &au));
    (uav - vau).abs() <= 1e-10 * (uav.abs() + vau.abs() + 1.0)
}

/// Positive-definiteness probe: `vᵀAv > 0`.
pub fn is_positive_on<M: QuadraticModel + ?Sized>(model: &M, v: &[f64]) -> bool {
    let mut av = vec![0.0; model.dim()];
    model.apply(v, &mut av);
    dot(v, &av) > 0.0
}
