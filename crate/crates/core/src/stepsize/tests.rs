use super::*;
use crate::objective::{DenseQuadratic, DiagonalQuadratic};
use proptest::prelude::*;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

fn diag(d: &[f64]) -> DiagonalQuadratic {
    DiagonalQuadratic::homogeneous(d.to_vec()).unwrap()
}

/// Plain BB1 gradient recursion on a diagonal quadratic, independent of
/// `StepHistory`: returns the gradients and the stepsizes used.
fn bb1_gradients(lam: &[f64], g0: &[f64], iters: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut gs = vec![g0.to_vec()];
    let mut alphas = Vec::new();
    let rq = |g: &[f64]| {
        let gg: f64 = g.iter().map(|v| v * v).sum();
        let gag: f64 = g.iter().zip(lam).map(|(v, l)| v * v * l).sum();
        gg / gag
    };
    for k in 0..iters {
        // α_0 = SD, then α_k = SD of g_{k−1}
        let a = if k == 0 { rq(&gs[0]) } else { rq(&gs[k - 1]) };
        let next: Vec<f64> = gs[k].iter().zip(lam).map(|(g, l)| (1.0 - a * l) * g).collect();
        alphas.push(a);
        gs.push(next);
    }
    (gs, alphas)
}

#[test]
fn bb_examples() {
    assert!(close(bb1(&[1.0, 1.0], &[1.0, 2.0]).unwrap(), 2.0 / 3.0, 1e-15));
    assert_eq!(bb1(&[3.0, 4.0], &[3.0, 4.0]).unwrap(), 1.0);
    assert!(close(bb2(&[1.0, 1.0], &[1.0, 2.0]).unwrap(), 0.6, 1e-15));
    assert_eq!(bb2(&[3.0, 4.0], &[3.0, 4.0]).unwrap(), 1.0);
    assert_eq!(bb1(&[1.0, 0.0], &[-1.0, 0.0]), Err(Error::CurvatureFailure));
    assert_eq!(bb2(&[1.0, 0.0], &[0.0, 1.0]), Err(Error::CurvatureFailure));
}

#[test]
fn sd_mg_examples() {
    let a = diag(&[1.0, 10.0]);
    assert_eq!(sd_step(&[1.0, 0.0], &a).unwrap(), 1.0);
    assert!(close(sd_step(&[0.0, 1.0], &a).unwrap(), 0.1, 1e-15));
    assert!(close(sd_step(&[1.0, 1.0], &a).unwrap(), 2.0 / 11.0, 1e-15));
    assert!(close(mg_step(&[1.0, 1.0], &a).unwrap(), 11.0 / 101.0, 1e-15));
    assert!(close(mg_step(&[0.0, 3.0], &a).unwrap(), 0.1, 1e-15));
    assert_eq!(sd_step(&[0.0, 0.0], &a), Err(Error::AlreadyConverged));
    assert_eq!(mg_step(&[0.0, 0.0], &a), Err(Error::AlreadyConverged));
}

#[test]
fn yuan_examples() {
    assert_eq!(yuan_step(2.0, 1.0, 1.0, 0.0).unwrap(), 1.0);
    assert_eq!(yuan_step(0.25, 0.25, 3.0, 0.0).unwrap(), 0.25);
    let y = yuan_step(0.3, 0.7, 2.0, 1.5).unwrap();
    assert!(y <= 0.3);
    assert!(yuan_step(0.0, 1.0, 1.0, 1.0).is_err());
    assert!(yuan_step(1.0, -1.0, 1.0, 1.0).is_err());
}

#[test]
fn dy_schedule() {
    assert_eq!(dy_select(0), DyStep::Sd);
    assert_eq!(dy_select(1), DyStep::Sd);
    assert_eq!(dy_select(2), DyStep::Yuan);
    assert_eq!(dy_select(3), DyStep::Yuan);
    assert_eq!(dy_select(4), DyStep::Sd);
}

#[test]
fn q_examples() {
    assert_eq!(compute_q(&[2.0, 3.0], &[4.0, 1.0]).unwrap(), vec![1.0, 9.0]);
    assert_eq!(compute_q(&[2.0, 3.0], &[4.0, 0.0]).unwrap(), vec![1.0, 0.0]);
    // below the guard counts as zero
    assert_eq!(compute_q(&[1.0], &[1e-310]).unwrap(), vec![0.0]);
    let q = exact_q(&[1.0, 1.0], 0.5, &[1.0, 10.0]).unwrap();
    assert_eq!(q, vec![2.0, -0.25]);
    assert_eq!(exact_q(&[1.0, 1.0], 0.1, &[1.0, 10.0]), Err(Error::SingularResolvent { index: 1 }));
}

#[test]
fn approximate_q_is_exact_on_diagonal_runs() {
    let lam = [1.0, 3.0, 7.0, 20.0];
    let (gs, alphas) = bb1_gradients(&lam, &[1.0, -2.0, 0.5, 1.5], 6);
    for k in 1..6 {
        let approx = compute_q(&gs[k - 1], &gs[k]).unwrap();
        let exact = exact_q(&gs[k - 1], alphas[k - 1], &lam).unwrap();
        for (a, e) in approx.iter().zip(&exact) {
            assert!(close(*a, *e, 1e-10), "k={k}: {a} vs {e}");
        }
    }
}

#[test]
fn hat_alpha_eigenvector_and_dual_forms() {
    // q eigenvector of λ = 4 with α_prev = 0.1: g_prev = (1 − 0.4) q
    let q = [0.0, 2.0, 0.0];
    let g_prev = [0.0, 1.2, 0.0];
    assert!(close(hat_alpha(&q, &g_prev, 0.1).unwrap(), 0.25, 1e-14));
    assert!(close(hat_alpha_from_operator(&q, &diag(&[1.0, 4.0, 9.0])).unwrap(), 0.25, 1e-15));

    // A = diag{2,5}, q = (1,0) exact for α_prev = 0.1 ⇒ g_prev = (0.8, 0)
    let a = diag(&[2.0, 5.0]);
    assert!(close(hat_alpha_from_operator(&[1.0, 0.0], &a).unwrap(), 0.5, 1e-15));
    assert!(close(hat_alpha(&[1.0, 0.0], &[0.8, 0.0], 0.1).unwrap(), 0.5, 1e-14));

    assert_eq!(hat_alpha(&[1.0, 2.0], &[1.0, 2.0], 0.3), Err(Error::Degenerate("hat-alpha")));
}

#[test]
fn hat_alpha_and_gamma_dual_routes_agree_on_runs() {
    let lam: Vec<f64> = (0..12).map(|i| 1.0 + 9.0 * i as f64).collect();
    let a = diag(&lam);
    let g0: Vec<f64> = (0..12).map(|i| 1.0 + 0.1 * i as f64).collect();
    let (gs, alphas) = bb1_gradients(&lam, &g0, 40);
    for k in 3..40 {
        let q = exact_q(&gs[k - 1], alphas[k - 1], &lam).unwrap();
        let h_op = hat_alpha_from_operator(&q, &a).unwrap();
        let h_mf = hat_alpha(&q, &gs[k - 1], alphas[k - 1]).unwrap();
        assert!(close(h_op, h_mf, 1e-10), "k={k}: {h_op} vs {h_mf}");

        // Γ_{k−1} couples q_{k−2} and g_{k−1}
        let q2 = exact_q(&gs[k - 3], alphas[k - 3], &lam).unwrap();
        let g_op = gamma_from_operator(&q2, &gs[k - 1], &a).unwrap();
        let g_rt = gamma_retard(&q2, &gs[k - 3], &gs[k - 1], &gs[k], alphas[k - 3], alphas[k - 1]).unwrap();
        assert!(close(g_op, g_rt, 1e-8), "k={k}: {g_op} vs {g_rt}");

        // current Γ_k through the cached product A g_k
        let q1 = exact_q(&gs[k - 2], alphas[k - 2], &lam).unwrap();
        let ag: Vec<f64> = gs[k].iter().zip(&lam).map(|(g, l)| g * l).collect();
        let g_cur = gamma_current(&q1, &gs[k - 2], &gs[k], &ag, alphas[k - 2]).unwrap();
        let g_op2 = gamma_from_operator(&q1, &gs[k], &a).unwrap();
        assert!(close(g_cur, g_op2, 1e-8), "k={k}: {g_cur} vs {g_op2}");
    }
}

#[test]
fn gamma_degenerate_cases() {
    let q = [1.0, 2.0];
    let g3 = [0.5, 0.5];
    // no gradient change ⇒ zero numerator, but the denominator also vanishes
    assert_eq!(
        gamma_retard(&q, &g3, &[1.0, 1.0], &[1.0, 1.0], 0.1, 0.2),
        Err(Error::GammaUnavailable)
    );
    // (q − g3) = (0.5, 1.5) ⊥ (g1 − g) = (3, −1)
    let g1 = [4.0, 1.0];
    let g = [1.0, 2.0];
    assert_eq!(gamma_retard(&q, &g3, &g1, &g, 0.1, 0.2).unwrap(), 0.0);
}

#[test]
fn gamma_zero_when_gradient_unchanged_but_curvature_defined() {
    // g_{k−1}·(g_{k−1} − g_k) ≠ 0 requires a change; tiny but nonzero cross term
    let q = [1.0, 0.0];
    let g3 = [0.0, 1.0];
    let g1 = [0.0, 2.0];
    let g = [0.0, 1.0];
    // (q − g3) = (1, −1), (g1 − g) = (0, 1), q·(q − g3) = 1, g1·(g1 − g) = 2
    assert_eq!(gamma_retard(&q, &g3, &g1, &g, 1.0, 1.0).unwrap(), 4.0 / 2.0);
}

#[test]
fn tilde_bb1_finds_largest_eigenvalue_in_2d() {
    let lam = [1.0, 10.0];
    let a = diag(&lam);
    let (gs, alphas) = bb1_gradients(&lam, &[3.0, -2.0], 3);
    let q1 = exact_q(&gs[0], alphas[0], &lam).unwrap();
    let t = tilde_bb1(&q1, &gs[2], &a).unwrap();
    assert!(close(t, 0.1, 1e-10), "{t}");
    assert!(t <= sd_step(&gs[2], &a).unwrap());

    // q ⊥ g, eigenvectors of 1 and 10
    assert!(close(tilde_bb1(&[1.0, 0.0], &[0.0, 2.0], &a).unwrap(), 0.1, 1e-15));
    // q ∥ g: the span is one-dimensional and the formula halves 1/λ
    assert!(close(tilde_bb1(&[0.0, 1.0], &[0.0, 2.0], &a).unwrap(), 0.05, 1e-15));
    assert!(tilde_bb1(&[0.0, 0.0], &[1.0, 1.0], &a).is_err());
}

/// Symmetric 2×2 matrix `R(θ) diag(l1, l2) R(θ)ᵀ`.
fn rotated(l1: f64, l2: f64, theta: f64) -> DenseQuadratic {
    let (c, s) = (theta.cos(), theta.sin());
    let a00 = c * c * l1 + s * s * l2;
    let a11 = s * s * l1 + c * c * l2;
    let a01 = c * s * (l1 - l2);
    DenseQuadratic::new(2, vec![a00, a01, a01, a11], vec![0.0, 0.0]).unwrap()
}

/// Solve `(I − αA) q = g` for a dense 2×2 `A`.
fn resolvent2(a: &DenseQuadratic, alpha: f64, g: &[f64]) -> Vec<f64> {
    let m00 = 1.0 - alpha * a.entry(0, 0);
    let m01 = -alpha * a.entry(0, 1);
    let m11 = 1.0 - alpha * a.entry(1, 1);
    let det = m00 * m11 - m01 * m01;
    vec![(m11 * g[0] - m01 * g[1]) / det, (m00 * g[1] - m01 * g[0]) / det]
}

proptest! {
    #[test]
    fn bb2_never_exceeds_bb1(
        s in prop::collection::vec(-5.0..5.0f64, 4),
        y in prop::collection::vec(-5.0..5.0f64, 4),
    ) {
        if let (Ok(l), Ok(sh)) = (bb1(&s, &y), bb2(&s, &y)) {
            prop_assert!(sh <= l * (1.0 + 1e-12));
        }
    }

    #[test]
    fn mg_never_exceeds_sd(
        d in prop::collection::vec(0.1..100.0f64, 5),
        g in prop::collection::vec(-5.0..5.0f64, 5),
    ) {
        prop_assume!(g.iter().any(|v| v.abs() > 1e-3));
        let a = diag(&d);
        prop_assert!(mg_step(&g, &a).unwrap() <= sd_step(&g, &a).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn yuan_bounded_by_both_cauchy_steps(
        a in 1e-3..10.0f64, b in 1e-3..10.0f64, gp in 1e-3..10.0f64, gc in 0.0..10.0f64,
    ) {
        let y = yuan_step(a, b, gp, gc).unwrap();
        prop_assert!(y <= a.min(b) * (1.0 + 1e-12));
        prop_assert!(y > 0.0);
    }

    #[test]
    fn q_satisfies_secant_equation(
        gp in prop::collection::vec(-5.0..5.0f64, 6),
        gc in prop::collection::vec(0.1..5.0f64, 6),
        signs in prop::collection::vec(any::<bool>(), 6),
    ) {
        let gc: Vec<f64> = gc.iter().zip(&signs).map(|(v, s)| if *s { *v } else { -*v }).collect();
        let q = compute_q(&gp, &gc).unwrap();
        let lhs = crate::linalg::dot(&q, &gc);
        let rhs = crate::linalg::dot(&gp, &gp);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
    }

    #[test]
    fn tilde_bb2_bounded(h in 1e-3..10.0f64, mg in 1e-3..10.0f64, gamma in 0.0..100.0f64) {
        let t = tilde_bb2(h, mg, gamma).unwrap();
        prop_assert!(t <= h.min(mg) * (1.0 + 1e-12));
    }

    #[test]
    fn tilde_bb1_on_random_2d_spd(
        l1 in 1.0..50.0f64, ratio in 1.5..1e3f64, theta in 0.0..std::f64::consts::PI,
        g0 in prop::collection::vec(-10.0..10.0f64, 2),
    ) {
        prop_assume!(g0[0].abs() > 0.5 && g0[1].abs() > 0.5);
        let l2 = l1 * ratio;
        let a = rotated(l1, l2, theta);
        // two BB1-type steps: α_0 = SD(g_0), α_1 = SD(g_0)
        let mut gs = vec![g0.clone()];
        let mut alphas = vec![];
        for k in 0..2usize {
            let al = sd_step(&gs[k.saturating_sub(1)], &a).unwrap();
            let mut ag = vec![0.0; 2];
            a.apply(&gs[k], &mut ag);
            gs.push(vec![gs[k][0] - al * ag[0], gs[k][1] - al * ag[1]]);
            alphas.push(al);
        }
        let q1 = resolvent2(&a, alphas[0], &gs[0]);
        prop_assume!(crate::linalg::norm2(&gs[2]) > 1e-8);
        let t = tilde_bb1(&q1, &gs[2], &a).unwrap();
        prop_assert!((t * l2 - 1.0).abs() <= 1e-8, "t*lmax = {}", t * l2);
    }
}

#[test]
fn tilde_bb2_examples() {
    assert_eq!(tilde_bb2(0.5, 0.2, 0.0).unwrap(), 0.2);
    assert_eq!(tilde_bb2(0.7, 0.7, 0.0).unwrap(), 0.7);
    assert_eq!(tilde_bb2(1.0, 1.0, 4.0).unwrap(), 0.5);
    assert!(tilde_bb2(0.0, 1.0, 1.0).is_err());
    assert!(tilde_bb2(1.0, 1.0, -1.0).is_err());
}

#[test]
fn gate_examples() {
    let g = |bb1, bb2, gp, gc| GateInputs { bb1, bb2, gnorm_prev: gp, gnorm: gc };
    assert_eq!(gate(&g(1.0, 0.9, 1.0, 1.0), 0.5, 1.3), Branch::Long);
    assert_eq!(gate(&g(1.0, 0.3, 1.0, 1.0), 0.5, 1.3), Branch::MinShort);
    assert_eq!(gate(&g(1.0, 0.3, 2.0, 1.0), 0.5, 1.3), Branch::Monotone);
    // ratio exactly τ₁ selects the long step
    assert_eq!(gate(&g(1.0, 0.5, 1.0, 1.0), 0.5, 1.3), Branch::Long);
    // ‖g_{k−1}‖ = τ₂‖g_k‖ selects the monotone step
    assert_eq!(gate(&g(1.0, 0.3, 1.3, 1.0), 0.5, 1.3), Branch::Monotone);
}

#[test]
fn rule_validation() {
    assert!(StepsizeRule::new(RuleKind::Angr1, 0.0, 1.0).is_err());
    assert!(StepsizeRule::new(RuleKind::Angr1, 1.0, 1.0).is_err());
    assert!(StepsizeRule::new(RuleKind::Angr1, 0.5, 0.99).is_err());
    assert!(StepsizeRule::new(RuleKind::Angr1, 0.5, 1.0).is_ok());
    assert!(RuleKind::Angm.requires_quadratic());
    assert!(!RuleKind::Angr2.requires_quadratic());
    assert_eq!(RuleKind::parse("angr2"), Some(RuleKind::Angr2));
    assert_eq!(RuleKind::parse("bb1_dz"), Some(RuleKind::Bb1DzBaseline));
    assert_eq!(RuleKind::parse("nope"), None);
}

/// History built from a scripted sequence where every derived quantity is
/// controlled by hand: 1-D iterates let `bb1 = bb2 = s/y`.
fn scripted_history(points: &[(f64, f64)], alphas: &[f64]) -> StepHistory {
    let mut h = StepHistory::new();
    for (i, (x, g)) in points.iter().enumerate() {
        h.push(&[*x], &[*g], 0.0, g.abs()).unwrap();
        if i < alphas.len() {
            h.set_step(alphas[i], 1.0).unwrap();
        }
    }
    h
}

#[test]
fn selectors_warm_up_and_check_kind() {
    let h = scripted_history(&[(1.0, 1.0), (0.5, 0.5)], &[0.5]);
    let r1 = StepsizeRule::new(RuleKind::Angr1, 0.5, 1.0).unwrap();
    assert_eq!(select_angr1(&h, &r1), Err(Error::Warmup));
    let sel = select_rule(&h, &r1, None).unwrap();
    assert_eq!(sel.branch, Branch::Warmup);
    assert_eq!(sel.alpha, 1.0);
    let r2 = StepsizeRule::new(RuleKind::Angr2, 0.5, 1.0).unwrap();
    assert_eq!(select_angr1(&h, &r2), Err(Error::UnsupportedRule(RuleKind::Angr2)));
    assert_eq!(
        select_rule(&h, &StepsizeRule::plain(RuleKind::Angm), None),
        Err(Error::UnsupportedRule(RuleKind::Angm))
    );
}

#[test]
fn one_dimensional_histories_take_the_long_step() {
    // In 1-D bb1 == bb2, so the ratio test never fires.
    let h = scripted_history(&[(4.0, 4.0), (2.0, 2.0), (1.0, 1.0)], &[0.5, 0.5]);
    let r = StepsizeRule::new(RuleKind::Angr2, 0.9, 1.0).unwrap();
    let sel = select_angr2(&h, &r).unwrap();
    assert_eq!(sel.branch, Branch::Long);
    assert_eq!(sel.alpha, 1.0);
}
