use alloc::vec;
use alloc::vec::Vec;

use crate::math::powf;
use crate::rng::Rng;
use crate::{DiagonalQuadratic, Error, Result};

/// One of the five spectral distributions for random diagonal quadratics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSpec {
    pub set_id: u8,
    pub n: usize,
    pub kappa: f64,
    pub seed: u64,
}

/// `f(x) = (x − x*)ᵀV(x − x*)` in normal form `A = 2V`, `b = 2Vx*`,
/// offset `x*ᵀVx*`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomQuad {
    pub model: DiagonalQuadratic,
    /// Diagonal of `V`.
    pub v: Vec<f64>,
    pub x_star: Vec<f64>,
    pub x0: Vec<f64>,
}

/// A sub-interval of `(1, κ)` covering 1-based indices `from..=to`.
struct Segment {
    from: usize,
    to: usize,
    lo: f64,
    hi: f64,
}

impl SpectrumSpec {
    fn segments(&self) -> Result<Vec<Segment>> {
        let (n, k) = (self.n, self.kappa);
        let (n5, n2, n45) = (n / 5, n / 2, 4 * n / 5);
        let seg = |from, to, lo, hi| Segment { from, to, lo, hi };
        let segs = match self.set_id {
            1 => vec![seg(2, n - 1, 1.0, k)],
            2 => vec![seg(2, n5, 1.0, 100.0), seg(n5 + 1, n - 1, k / 2.0, k)],
            3 => vec![seg(2, n2, 1.0, 100.0), seg(n2 + 1, n - 1, k / 2.0, k)],
            4 => vec![seg(2, n45, 1.0, 100.0), seg(n45 + 1, n - 1, k / 2.0, k)],
            5 => vec![
                seg(2, n5, 1.0, 100.0),
                seg(n5 + 1, n45, 100.0, k / 2.0),
                seg(n45 + 1, n - 1, k / 2.0, k),
            ],
            _ => return Err(Error::InvalidArgument("spectrum set must be 1..=5")),
        };
        if self.set_id > 1 {
            if n < 10 {
                return Err(Error::InvalidArgument("sets 2-5 need n >= 10"));
            }
            if !(k > 200.0) {
                return Err(Error::InvalidArgument("sets 2-5 need kappa > 200"));
            }
        }
        Ok(segs)
    }

    /// Diagonal `v` with `v₁ = 1`, `v_n = κ` and interior values drawn
    /// uniformly from the set's open sub-intervals.
    pub fn spectrum(&self, rng: &mut Rng) -> Result<Vec<f64>> {
        if self.n < 3 {
            return Err(Error::InvalidArgument("random quadratics need n >= 3"));
        }
        if !(self.kappa > 1.0 && self.kappa.is_finite()) {
            return Err(Error::InvalidArgument("kappa must exceed 1"));
        }
        let mut v = vec![0.0; self.n];
        v[0] = 1.0;
        v[self.n - 1] = self.kappa;
        for s in self.segments()? {
            for j in s.from..=s.to {
                v[j - 1] = rng.uniform(s.lo, s.hi);
            }
        }
        Ok(v)
    }
}

pub fn gen_random_quad(spec: &SpectrumSpec) -> Result<RandomQuad> {
    let mut rng = Rng::new(spec.seed);
    let v = spec.spectrum(&mut rng)?;
    let x_star: Vec<f64> = (0..spec.n).map(|_| rng.uniform(-10.0, 10.0)).collect();
    let a: Vec<f64> = v.iter().map(|vi| 2.0 * vi).collect();
    let b: Vec<f64> = a.iter().zip(&x_star).map(|(ai, xi)| ai * xi).collect();
    let offset: f64 = v.iter().zip(&x_star).map(|(vi, xi)| vi * xi * xi).sum();
    let model = DiagonalQuadratic::with_offset(a, b, offset)?;
    Ok(RandomQuad { model, v, x_star, x0: vec![0.0; spec.n] })
}

/// `A_jj = 10^{ncond (n − j)/(n − 1)}`, `b = 0`.
pub fn gen_nonrand_quad(n: usize, ncond: f64) -> Result<DiagonalQuadratic> {
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2"));
    }
    if !(ncond >= 0.0 && ncond.is_finite()) {
        return Err(Error::InvalidArgument("ncond must be nonnegative"));
    }
    let d = (1..=n)
        .map(|j| powf(10.0, ncond * (n - j) as f64 / (n - 1) as f64))
        .collect();
    DiagonalQuadratic::homogeneous(d)
}

/// Starting point with entries uniform in `[−10, 10]`.
pub fn uniform_start(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = Rng::new(seed);
    (0..n).map(|_| rng.uniform(-10.0, 10.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{quadratic_eval, QuadraticModel};

    fn spec(set_id: u8, n: usize, kappa: f64) -> SpectrumSpec {
        SpectrumSpec { set_id, n, kappa, seed: 42 }
    }

    #[test]
    fn set_two_layout() {
        let q = gen_random_quad(&spec(2, 1000, 1e4)).unwrap();
        // 1-based indices 2..=200 in (1, 100), 201..=999 in (5000, 10000)
        assert!(q.v[1..200].iter().all(|&v| v > 1.0 && v < 100.0));
        assert!(q.v[200..999].iter().all(|&v| v > 5000.0 && v < 1e4));
    }

    #[test]
    fn set_five_layout() {
        let q = gen_random_quad(&spec(5, 100, 1e5)).unwrap();
        assert!(q.v[1..20].iter().all(|&v| v > 1.0 && v < 100.0));
        assert!(q.v[20..80].iter().all(|&v| v > 100.0 && v < 5e4));
        assert!(q.v[80..99].iter().all(|&v| v > 5e4 && v < 1e5));
    }

    #[test]
    fn pinned_extremes_every_set() {
        for set in 1..=5 {
            let q = gen_random_quad(&spec(set, 50, 1e6)).unwrap();
            let min = q.v.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = q.v.iter().cloned().fold(0.0, f64::max);
            assert_eq!((min, max), (1.0, 1e6));
            assert!(q.x_star.iter().all(|x| x.abs() < 10.0));
        }
    }

    #[test]
    fn minimizer_and_objective_value() {
        let q = gen_random_quad(&spec(1, 20, 1e3)).unwrap();
        let (f, g) = quadratic_eval(&q.model, &q.x_star).unwrap();
        let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(gmax <= 1e-9);
        assert!(f.abs() <= 1e-7 * q.model.offset());
        // f(0) = x*ᵀVx*
        let (f0, _) = quadratic_eval(&q.model, &q.x0).unwrap();
        assert_eq!(f0, q.model.offset());
    }

    #[test]
    fn reproducible() {
        let a = gen_random_quad(&spec(3, 30, 1e4)).unwrap();
        let b = gen_random_quad(&spec(3, 30, 1e4)).unwrap();
        assert_eq!(a, b);
        let c = gen_random_quad(&SpectrumSpec { seed: 43, ..spec(3, 30, 1e4) }).unwrap();
        assert_ne!(a.x_star, c.x_star);
    }

    #[test]
    fn infeasible_specs() {
        assert!(gen_random_quad(&spec(2, 5, 1e4)).is_err());
        assert!(gen_random_quad(&spec(5, 100, 150.0)).is_err());
        assert!(gen_random_quad(&spec(6, 100, 1e4)).is_err());
        assert!(gen_random_quad(&spec(1, 2, 1e4)).is_err());
    }

    #[test]
    fn nonrand_examples() {
        let m = gen_nonrand_quad(10, 3.0).unwrap();
        assert_eq!(m.diag()[0], 1000.0);
        assert_eq!(m.diag()[9], 1.0);
        assert!(m.diag().windows(2).all(|w| w[0] > w[1]));
        assert!(m.rhs().iter().all(|b| *b == 0.0));
        let m = gen_nonrand_quad(1000, 4.0).unwrap();
        assert!((m.diag()[0] / m.diag()[999] - 1e4).abs() <= 1e-8);
    }
}
