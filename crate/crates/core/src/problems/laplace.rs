use alloc::vec;
use alloc::vec::Vec;

use crate::math::exp;
use crate::{Error, QuadraticModel, Result};

/// Default memory ceiling for generated Laplace problems (2 GiB).
pub const DEFAULT_MEMORY_CAP: usize = 2 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplaceVariant {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceSpec {
    /// Interior nodes per axis; `n = N³`.
    pub n_per_axis: usize,
    pub sigma: f64,
    pub center: (f64, f64, f64),
    /// Bytes the generator may allocate for the operator data and `b`.
    pub memory_cap: usize,
}

impl LaplaceSpec {
    pub fn variant(n_per_axis: usize, variant: LaplaceVariant) -> Self {
        let (sigma, center) = match variant {
            LaplaceVariant::A => (20.0, (0.5, 0.5, 0.5)),
            LaplaceVariant::B => (50.0, (0.4, 0.7, 0.5)),
        };
        Self { n_per_axis, sigma, center, memory_cap: DEFAULT_MEMORY_CAP }
    }

    pub fn dim(&self) -> usize {
        self.n_per_axis.pow(3)
    }

    /// Estimated bytes for `b` plus the solution, starting point and the
    /// solver's working vectors.
    pub fn memory_estimate(&self) -> usize {
        self.dim().saturating_mul(8 * 8)
    }

    /// Discrete solution: a Gaussian bump times `x(x−1)y(y−1)z(z−1)` on the
    /// interior grid with spacing `1/(N+1)`.
    pub fn solution(&self) -> Vec<f64> {
        let nn = self.n_per_axis;
        let h = 1.0 / (nn + 1) as f64;
        let (a, b, c) = self.center;
        let mut u = Vec::with_capacity(self.dim());
        for k in 1..=nn {
            let z = k as f64 * h;
            for j in 1..=nn {
                let y = j as f64 * h;
                for i in 1..=nn {
                    let x = i as f64 * h;
                    let r2 = (x - a) * (x - a) + (y - b) * (y - b) + (z - c) * (z - c);
                    let poly = x * (x - 1.0) * y * (y - 1.0) * z * (z - 1.0);
                    u.push(exp(-self.sigma * r2) * poly);
                }
            }
        }
        u
    }
}

/// 7-point Laplacian `6v_{ijk} − Σ neighbours` with zero Dirichlet data;
/// never forms a matrix. Index order is `i + N(j + N k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceOperator {
    nn: usize,
    b: Vec<f64>,
}

impl LaplaceOperator {
    pub fn n_per_axis(&self) -> usize {
        self.nn
    }
}

impl QuadraticModel for LaplaceOperator {
    fn dim(&self) -> usize {
        self.nn * self.nn * self.nn
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        let nn = self.nn;
        let plane = nn * nn;
        for k in 0..nn {
            for j in 0..nn {
                let row = nn * (j + nn * k);
                for i in 0..nn {
                    let p = row + i;
                    let mut s = 6.0 * v[p];
                    if i > 0 {
                        s -= v[p - 1];
                    }
                    if i + 1 < nn {
                        s -= v[p + 1];
                    }
                    if j > 0 {
                        s -= v[p - nn];
                    }
                    if j + 1 < nn {
                        s -= v[p + nn];
                    }
                    if k > 0 {
                        s -= v[p - plane];
                    }
                    if k + 1 < nn {
                        s -= v[p + plane];
                    }
                    out[p] = s;
                }
            }
        }
    }

    fn rhs(&self) -> &[f64] {
        &self.b
    }
}

/// Operator with `b = A·u` for the discrete solution `u`, plus `x₀ = 0` and `u`.
pub fn gen_laplace(spec: &LaplaceSpec) -> Result<(LaplaceOperator, Vec<f64>, Vec<f64>)> {
    if spec.n_per_axis < 2 {
        return Err(Error::InvalidArgument("need at least 2 interior nodes per axis"));
    }
    let bytes = spec.memory_estimate();
    if bytes > spec.memory_cap || spec.n_per_axis > 1 << 20 {
        return Err(Error::TooLarge { bytes, cap: spec.memory_cap });
    }
    let u = spec.solution();
    let mut op = LaplaceOperator { nn: spec.n_per_axis, b: vec![0.0; u.len()] };
    let mut b = vec![0.0; u.len()];
    op.apply(&u, &mut b);
    op.b = b;
    let x0 = vec![0.0; u.len()];
    Ok((op, x0, u))
}
