//! Box constraints `l <= x <= u` and the Euclidean projection onto them.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::check_len;
use crate::{Error, Result};

/// Componentwise bounds; infinite entries encode missing bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxBounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxBounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_len(lower.len(), upper.len())?;
        for (l, u) in lower.iter().zip(&upper) {
            if l.is_nan() || u.is_nan() || l > u {
                return Err(Error::InvalidArgument("bounds must satisfy l <= u"));
            }
            if *l == f64::INFINITY || *u == f64::NEG_INFINITY {
                return Err(Error::InvalidArgument("empty feasible interval"));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn unconstrained(n: usize) -> Self {
        Self {
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn is_unconstrained(&self) -> bool {
        self.lower.iter().all(|l| l.is_infinite()) && self.upper.iter().all(|u| u.is_infinite())
    }

    /// Largest violation of the bounds by `x` (0 when feasible).
    pub fn violation(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .fold(0.0, |m, (xi, (l, u))| f64::max(m, f64::max(l - xi, xi - u)))
    }

    #[inline]
    pub(crate) fn clamp(&self, i: usize, v: f64) -> f64 {
        // max/min keep the infinite bounds transparent
        v.max(self.lower[i]).min(self.upper[i])
    }

    /// Writes `P(x)` into `out`.
    pub(crate) fn project_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, (o, xi)) in out.iter_mut().zip(x).enumerate() {
            *o = self.clamp(i, *xi);
        }
    }
}

/// `P(x)_i = median(l_i, x_i, u_i)`.
pub fn project_box(x: &[f64], bounds: &BoxBounds) -> Result<Vec<f64>> {
    check_len(bounds.dim(), x.len())?;
    let mut out = vec![0.0; x.len()];
    bounds.project_into(x, &mut out);
    Ok(out)
}

/// Projected gradient residual `P(x − g) − x`; zero exactly at first-order
/// stationary points of the box problem.
pub fn projected_gradient_residual(x: &[f64], g: &[f64], bounds: &BoxBounds) -> Result<Vec<f64>> {
    check_len(bounds.dim(), x.len())?;
    check_len(x.len(), g.len())?;
    if bounds.violation(x) > 1e-12 {
        return Err(Error::InvalidState("point lies outside the box"));
    }
    let mut out = vec![0.0; x.len()];
    residual_into(x, g, bounds, &mut out);
    Ok(out)
}

pub(crate) fn residual_into(x: &[f64], g: &[f64], bounds: &BoxBounds, out: &mut [f64]) {
    for (i, ((o, xi), gi)) in out.iter_mut().zip(x).zip(g).enumerate() {
        *o = bounds.clamp(i, xi - gi) - xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{norm2, norm_inf};
    use proptest::prelude::*;

    const INF: f64 = f64::INFINITY;

    fn bb(l: &[f64], u: &[f64]) -> BoxBounds {
        BoxBounds::new(l.to_vec(), u.to_vec()).unwrap()
    }

    #[test]
    fn projection_examples() {
        assert_eq!(project_box(&[5.0, -3.0], &bb(&[0.0, 0.0], &[4.0, 4.0])).unwrap(), vec![4.0, 0.0]);
        assert_eq!(
            project_box(&[1.0, 2.0], &BoxBounds::unconstrained(2)).unwrap(),
            vec![1.0, 2.0]
        );
        assert_eq!(project_box(&[0.5], &bb(&[0.0], &[1.0])).unwrap(), vec![0.5]);
    }

    #[test]
    fn projection_dimension_mismatch() {
        assert!(matches!(
            project_box(&[1.0], &BoxBounds::unconstrained(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn invalid_bounds() {
        assert!(BoxBounds::new(vec![1.0], vec![0.0]).is_err());
        assert!(BoxBounds::new(vec![INF], vec![INF]).is_err());
        assert!(BoxBounds::new(vec![0.0, 0.0], vec![1.0]).is_err());
        assert!(BoxBounds::unconstrained(3).is_unconstrained());
    }

    #[test]
    fn residual_examples() {
        let b = bb(&[0.0], &[1.0]);
        assert_eq!(projected_gradient_residual(&[0.0], &[3.0], &b).unwrap(), vec![0.0]);
        let r = projected_gradient_residual(&[0.5], &[0.2], &b).unwrap();
        assert!((r[0] + 0.2).abs() < 1e-15);
        let b2 = bb(&[0.0, 0.0], &[1.0, 1.0]);
        assert_eq!(
            projected_gradient_residual(&[1.0, 1.0], &[-1.0, 2.0], &b2).unwrap(),
            vec![0.0, -1.0]
        );
    }

    #[test]
    fn residual_rejects_infeasible_point() {
        let b = bb(&[0.0], &[1.0]);
        assert_eq!(
            projected_gradient_residual(&[1.5], &[0.0], &b),
            Err(Error::InvalidState("point lies outside the box"))
        );
    }

    fn bounds_and_points(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
        (
            prop::collection::vec((-5.0..5.0f64, 0.0..5.0f64, any::<bool>(), any::<bool>()), n),
            prop::collection::vec(-20.0..20.0f64, n),
            prop::collection::vec(-20.0..20.0f64, n),
        )
            .prop_map(|(spec, x, y)| {
                let l = spec.iter().map(|(c, _, lo, _)| if *lo { *c } else { -INF }).collect();
                let u = spec
                    .iter()
                    .map(|(c, w, _, hi)| if *hi { c + w } else { INF })
                    .collect();
                (l, u, x, y)
            })
    }

    proptest! {
        #[test]
        fn projection_is_feasible_idempotent_nonexpansive((l, u, x, y) in bounds_and_points(6)) {
            let b = BoxBounds::new(l, u).unwrap();
            let px = project_box(&x, &b).unwrap();
            let py = project_box(&y, &b).unwrap();
            prop_assert_eq!(b.violation(&px), 0.0);
            prop_assert_eq!(project_box(&px, &b).unwrap(), px.clone());
            let dp: Vec<f64> = px.iter().zip(&py).map(|(a, c)| a - c).collect();
            let d: Vec<f64> = x.iter().zip(&y).map(|(a, c)| a - c).collect();
            prop_assert!(norm2(&dp) <= norm2(&d) + 1e-12);
        }

        #[test]
        fn residual_equals_negative_gradient_without_bounds(
            x in prop::collection::vec(-10.0..10.0f64, 5),
            g in prop::collection::vec(-10.0..10.0f64, 5),
        ) {
            let b = BoxBounds::unconstrained(5);
            let r = projected_gradient_residual(&x, &g, &b).unwrap();
            prop_assert!((norm_inf(&r) - norm_inf(&g)).abs() <= 1e-12 * (1.0 + norm_inf(&g)));
        }
    }
}
