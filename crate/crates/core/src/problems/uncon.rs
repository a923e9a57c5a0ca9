use alloc::vec;
use alloc::vec::Vec;

use crate::math::{exp, sqrt};
use crate::{BoxBounds, Error, Result, SmoothObjective};

/// Classical unconstrained test functions with analytic gradients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnconFunction {
    ExtFreudensteinRoth,
    ExtBeale,
    PerturbedQuadratic,
    Raydan1,
    Raydan2,
    Diagonal1,
    Hager,
    ExtTridiagonal1,
    Tridia,
    Liarwhd,
}

impl UnconFunction {
    pub const ALL: [UnconFunction; 10] = [
        UnconFunction::ExtFreudensteinRoth,
        UnconFunction::ExtBeale,
        UnconFunction::PerturbedQuadratic,
        UnconFunction::Raydan1,
        UnconFunction::Raydan2,
        UnconFunction::Diagonal1,
        UnconFunction::Hager,
        UnconFunction::ExtTridiagonal1,
        UnconFunction::Tridia,
        UnconFunction::Liarwhd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UnconFunction::ExtFreudensteinRoth => "ext-freudenstein-roth",
            UnconFunction::ExtBeale => "ext-beale",
            UnconFunction::PerturbedQuadratic => "perturbed-quadratic",
            UnconFunction::Raydan1 => "raydan1",
            UnconFunction::Raydan2 => "raydan2",
            UnconFunction::Diagonal1 => "diagonal1",
            UnconFunction::Hager => "hager",
            UnconFunction::ExtTridiagonal1 => "ext-tridiagonal1",
            UnconFunction::Tridia => "tridia",
            UnconFunction::Liarwhd => "liarwhd",
        }
    }

    /// Whether the function is defined on pairs `(x_{2i−1}, x_{2i})`.
    pub fn paired(self) -> bool {
        matches!(
            self,
            UnconFunction::ExtFreudensteinRoth | UnconFunction::ExtBeale | UnconFunction::ExtTridiagonal1
        )
    }

    /// Standard starting point.
    pub fn start(self, n: usize) -> Vec<f64> {
        match self {
            UnconFunction::ExtFreudensteinRoth => (0..n).map(|i| if i % 2 == 0 { 0.5 } else { -2.0 }).collect(),
            UnconFunction::ExtBeale => (0..n).map(|i| if i % 2 == 0 { 1.0 } else { 0.8 }).collect(),
            UnconFunction::PerturbedQuadratic => vec![0.5; n],
            UnconFunction::Diagonal1 => vec![1.0 / n as f64; n],
            UnconFunction::ExtTridiagonal1 => vec![2.0; n],
            UnconFunction::Liarwhd => vec![4.0; n],
            UnconFunction::Raydan1 | UnconFunction::Raydan2 | UnconFunction::Hager | UnconFunction::Tridia => {
                vec![1.0; n]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    pub kind: UnconFunction,
    n: usize,
}

impl TestFunction {
    pub fn new(kind: UnconFunction, n: usize) -> Result<Self> {
        if n < 2 || (kind.paired() && !n.is_multiple_of(2)) {
            return Err(Error::InvalidArgument("dimension must be even and at least 2"));
        }
        Ok(Self { kind, n })
    }
}

impl SmoothObjective for TestFunction {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval_into(&self, x: &[f64], g: &mut [f64]) -> f64 {
        let n = self.n;
        let mut f = 0.0;
        match self.kind {
            UnconFunction::ExtFreudensteinRoth => {
                for p in 0..n / 2 {
                    let (a, b) = (x[2 * p], x[2 * p + 1]);
                    let r1 = -13.0 + a + ((5.0 - b) * b - 2.0) * b;
                    let r2 = -29.0 + a + ((b + 1.0) * b - 14.0) * b;
                    f += r1 * r1 + r2 * r2;
                    g[2 * p] = 2.0 * (r1 + r2);
                    g[2 * p + 1] = 2.0 * r1 * (10.0 * b - 3.0 * b * b - 2.0) + 2.0 * r2 * (3.0 * b * b + 2.0 * b - 14.0);
                }
            }
            UnconFunction::ExtBeale => {
                const C: [f64; 3] = [1.5, 2.25, 2.625];
                for p in 0..n / 2 {
                    let (a, b) = (x[2 * p], x[2 * p + 1]);
                    let (mut ga, mut gb) = (0.0, 0.0);
                    let mut bj = 1.0;
                    for (j, c) in C.iter().enumerate() {
                        // bj = b^j before the update, b^{j+1} after
                        let dbj = (j + 1) as f64 * bj;
                        bj *= b;
                        let t = c - a * (1.0 - bj);
                        f += t * t;
                        ga += -2.0 * t * (1.0 - bj);
                        gb += 2.0 * t * a * dbj;
                    }
                    g[2 * p] = ga;
                    g[2 * p + 1] = gb;
                }
            }
            UnconFunction::PerturbedQuadratic => {
                let s: f64 = x.iter().sum();
                for i in 0..n {
                    let w = (i + 1) as f64;
                    f += w * x[i] * x[i];
                    g[i] = 2.0 * w * x[i] + s / 50.0;
                }
                f += s * s / 100.0;
            }
            UnconFunction::Raydan1 => {
                for i in 0..n {
                    let w = (i + 1) as f64 / 10.0;
                    let e = exp(x[i]);
                    f += w * (e - x[i]);
                    g[i] = w * (e - 1.0);
                }
            }
            UnconFunction::Raydan2 => {
                for i in 0..n {
                    let e = exp(x[i]);
                    f += e - x[i];
                    g[i] = e - 1.0;
                }
            }
            UnconFunction::Diagonal1 => {
                for i in 0..n {
                    let w = (i + 1) as f64;
                    let e = exp(x[i]);
                    f += e - w * x[i];
                    g[i] = e - w;
                }
            }
            UnconFunction::Hager => {
                for i in 0..n {
                    let w = sqrt((i + 1) as f64);
                    let e = exp(x[i]);
                    f += e - w * x[i];
                    g[i] = e - w;
                }
            }
            UnconFunction::ExtTridiagonal1 => {
                for p in 0..n / 2 {
                    let (a, b) = (x[2 * p], x[2 * p + 1]);
                    let u = a + b - 3.0;
                    let v = a - b + 1.0;
                    let v3 = v * v * v;
                    f += u * u + v3 * v;
                    g[2 * p] = 2.0 * u + 4.0 * v3;
                    g[2 * p + 1] = 2.0 * u - 4.0 * v3;
                }
            }
            UnconFunction::Tridia => {
                let r0 = x[0] - 1.0;
                f += r0 * r0;
                g.iter_mut().for_each(|v| *v = 0.0);
                g[0] = 2.0 * r0;
                for i in 1..n {
                    let w = (i + 1) as f64;
                    let r = 2.0 * x[i] - x[i - 1];
                    f += w * r * r;
                    g[i] += 4.0 * w * r;
                    g[i - 1] -= 2.0 * w * r;
                }
            }
            UnconFunction::Liarwhd => {
                let mut g0 = 0.0;
                for i in 0..n {
                    let r = x[i] * x[i] - x[0];
                    let t = x[i] - 1.0;
                    f += 4.0 * r * r + t * t;
                    g[i] = 16.0 * r * x[i] + 2.0 * t;
                    g0 -= 8.0 * r;
                }
                g[0] += g0;
            }
        }
        f
    }
}

/// A suite entry; `bounds` is set for the box-constrained variant.
#[derive(Debug, Clone, PartialEq)]
pub struct UnconProblem {
    pub name: &'static str,
    pub objective: TestFunction,
    pub x0: Vec<f64>,
    pub bounds: Option<BoxBounds>,
}

/// The ten functions at dimension `n` with standard starts. With `boxed`,
/// odd coordinates (1-based) get `l = 0`, `u = +∞`.
pub fn gen_uncon_suite(n: usize, boxed: bool) -> Result<Vec<UnconProblem>> {
    UnconFunction::ALL
        .iter()
        .map(|&kind| {
            let objective = TestFunction::new(kind, n)?;
            let bounds = if boxed {
                let lower = (0..n).map(|i| if i % 2 == 0 { 0.0 } else { f64::NEG_INFINITY }).collect();
                Some(BoxBounds::new(lower, vec![f64::INFINITY; n])?)
            } else {
                None
            };
            Ok(UnconProblem { name: kind.name(), objective, x0: kind.start(n), bounds })
        })
        .collect()
}
