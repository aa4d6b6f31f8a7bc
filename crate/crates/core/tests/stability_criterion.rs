mod common;

use std::f64::consts::PI;

use common::*;
use proptest::prelude::*;
use wavestab_core::minimizer::{minimize_constrained, MinimizerConfig};
use wavestab_core::models::*;
use wavestab_core::spectral::functional_m;
use wavestab_core::stability::*;
use wavestab_core::PeriodicField;

fn corollary(w: &WaveSolution) -> (f64, f64) {
    (-w.omega / w.gap(), 1.0)
}

#[test]
fn s_is_positive_on_the_dnoidal_family() {
    for omega in [0.5, 1.0, 2.0, 5.0] {
        let s = compute_s(&fifth_wave(omega, 256)).unwrap();
        assert!(s > 0.0, "ω = {omega}: s = {s}");
    }
}

#[test]
fn minimizer_obeys_the_lower_bound() {
    let gamma = rbo_3_256().field.cube_integral();
    let cfg = MinimizerConfig::new(ModelSpec::rbo(), 3.0, gamma, 256, 4.0 * PI);
    let w = minimize_constrained(&cfg, None).unwrap().wave;
    let s = compute_s(&w).unwrap();
    assert!(s > gamma / 2.0 - 2.0 * 4.0 * PI, "s = {s}");
}

#[test]
fn linear_solve_route() {
    let w = fifth_2_256();
    let vd = variational_derivatives(w, DerivativeRoute::LinearSolve).unwrap();
    assert!(rel(vd.f_a, vd.m_omega) < 1e-8);
    assert!(vd.eta.odd_part().max_abs() == 0.0 && vd.beta.odd_part().max_abs() == 0.0);
    assert_eq!(vd.route, DerivativeRoute::LinearSolve);
}

#[test]
fn finite_differences_are_second_order() {
    let w = fifth_2_256();
    let ls = variational_derivatives(w, DerivativeRoute::LinearSolve).unwrap();
    let err = |h: f64| (central_difference_derivatives(w, h).unwrap().m_omega - ls.m_omega).abs();
    let (e1, e2) = (err(0.04), err(0.02));
    let order = (e1 / e2).log2();
    eprintln!("M_omega fd errors {e1:.3e}, {e2:.3e}: order {order:.3}");
    assert!(order >= 1.9);
    let fd = variational_derivatives(w, DerivativeRoute::FiniteDifference).unwrap();
    assert!(rel(fd.m_omega, ls.m_omega) < 1e-6 && rel(fd.m_a, ls.m_a) < 1e-6);
}

#[test]
fn chain_rule_along_the_explicit_family() {
    let omega = 2.0;
    let w = fifth_2_256();
    let vd = variational_derivatives(w, DerivativeRoute::LinearSolve).unwrap();
    let coef = |om: f64| FifthOrderCoefficients::new(om).unwrap();
    let h = 1e-3;
    let da0 = (coef(omega + h).a0 - coef(omega - h).a0) / (2.0 * h);
    let da = (coef(omega + h).a - coef(omega - h).a) / (2.0 * h);
    let along = vd.m_omega + da0 * vd.m_a;
    assert!(rel(along, 2.0 * PI * da) < 1e-6, "{along} vs {}", 2.0 * PI * da);
}

#[test]
fn delta_routes_agree() {
    let w = fifth_2_256();
    let vd = variational_derivatives(w, DerivativeRoute::LinearSolve).unwrap();
    let zero = compute_delta(w, &vd, 0.0, 0.0).unwrap();
    assert_eq!((zero.quadratic, zero.direct), (0.0, 0.0));
    let (x0, y0) = corollary(w);
    let d = compute_delta(w, &vd, x0, y0).unwrap();
    assert!(rel(d.quadratic, d.direct) < 1e-8);
    let from_s = y0 * y0 / w.gap().powi(2) * compute_s(w).unwrap();
    assert!(rel(d.quadratic, from_s) < 1e-6);
}

#[test]
fn identities_hold_and_detect_corruption() {
    for w in [fifth_2_256(), rbo_3_256()] {
        let mut vd = variational_derivatives(w, DerivativeRoute::LinearSolve).unwrap();
        let r = identity_checks(w, &vd).unwrap();
        assert!(r.max() < 1e-7, "{r:?}");
        vd.m_omega *= 1.01;
        let bad = identity_checks(w, &vd).unwrap();
        eprintln!("corrupted M_omega: eq11 residual {:.4e}", bad.eq11);
        assert!(bad.eq11 > 1e-3 && bad.eq11 < 2e-2);
    }
}

#[test]
fn lyapunov_values_examples() {
    let w = fifth_2_256();
    let (x0, y0) = corollary(w);
    let at = lyapunov_values(&w.field, w, x0, y0, 1.0).unwrap();
    assert_eq!(at.v, 0.0);
    assert!(rel(at.g, functional_g(&w.field, w).unwrap()) < 1e-15);
    assert!(rel(at.q, functional_q(&w.field, w, x0, y0).unwrap()) < 1e-15);
    let shifted = lyapunov_values(&w.field.translate(1.1), w, x0, y0, 1.0).unwrap();
    assert!(rel(shifted.g, at.g) < 1e-12 && rel(shifted.q, at.q) < 1e-12);
    assert!(shifted.v.abs() < 1e-12 * at.g.abs());

    // v ∈ even fields ⊥ Q′(φ) (hence also ⊥ φ′, which is odd).
    let grid = *w.grid();
    let q = wavestab_core::spectral::apply_symbol(&w.field, w.model.symbol())
        .unwrap()
        .lin_comb(x0, &w.field, x0)
        .add_constant(y0);
    let raw = PeriodicField::from_fn(grid, |x| x.cos() + 0.3 * (2.0 * x).cos());
    let v = raw.lin_comb(1.0, &q, -raw.inner(&q) / q.inner(&q));
    let v = v.scale(1.0 / v.norm_l2());
    let eps = 1e-3;
    let u = w.field.lin_comb(1.0, &v, eps);
    let val = lyapunov_values(&u, w, x0, y0, 1.0).unwrap().v;
    let quad = 0.5 * apply_linearized(w, &v).unwrap().inner(&v) * eps * eps;
    assert!(val >= 0.0 && (val / quad - 1.0).abs() < 0.2, "V = {val:e}, ½⟨Lv,v⟩ε² = {quad:e}");
}

#[test]
fn verdicts() {
    let r = stability_verdict(fifth_2_256()).unwrap();
    assert_eq!(r.verdict, Verdict::Stable, "{}", r.reason);
    assert_eq!(r.schema, 1);
    assert!(r.hypothesis_h.projected_min.unwrap() > 0.0);

    let w = rbo_3_256();
    assert!(wavestab_core::minimizer::gamma_threshold_check(w.field.cube_integral(), 3.0, 4.0 * PI));
    assert_eq!(stability_verdict(w).unwrap().verdict, Verdict::Stable);
    let json = serde_json::to_value(&r).unwrap();
    assert_eq!(json["verdict"], "STABLE");
    assert_eq!(json["schema"], 1);
}

proptest! {
    #![proptest_config(cases(20))]

    #[test]
    fn delta_routes_agree_on_both_families(omega in 0.5..5.0_f64, rbo_omega in 2.5..8.0_f64, scale in 0.1..10.0_f64) {
        for w in [fifth_wave(omega, 64), rbo_wave(rbo_omega, 128).unwrap()] {
            prop_assume!(w.gap().abs() > 1e-3);
            let vd = variational_derivatives(&w, DerivativeRoute::LinearSolve).unwrap();
            let (x0, y0) = corollary(&w);
            let d = compute_delta(&w, &vd, x0, y0).unwrap();
            let from_s = y0 * y0 / w.gap().powi(2) * compute_s(&w).unwrap();
            prop_assert!(rel(d.quadratic, d.direct) < 1e-6);
            prop_assert!(rel(d.quadratic, from_s) < 1e-6);
            prop_assert!(rel(d.direct, from_s) < 1e-6);
            // ⟨LΦ, Φ⟩ = −direct carries the opposite sign of Δ, also along rescaled (x, y).
            let ds = compute_delta(&w, &vd, scale * x0, scale * y0).unwrap();
            prop_assert_eq!((-ds.direct).signum(), -ds.quadratic.signum());
            prop_assert_eq!((-d.direct).signum(), -d.quadratic.signum());
        }
    }

    #[test]
    fn s_is_grid_converged(omega in 0.5..10.0_f64, rbo_omega in 2.5..8.0_f64) {
        let a = compute_s(&fifth_wave(omega, 64)).unwrap();
        let b = compute_s(&fifth_wave(omega, 128)).unwrap();
        prop_assert!(rel(a, b) < 1e-8);
        let a = compute_s(&rbo_wave(rbo_omega, 128).unwrap()).unwrap();
        let b = compute_s(&rbo_wave(rbo_omega, 256).unwrap()).unwrap();
        prop_assert!(rel(a, b) < 1e-8);
        prop_assert!(rel(functional_m(&rbo_wave(rbo_omega, 128).unwrap().field), 4.0 * PI * rbo_omega) < 1e-10);
    }

    #[test]
    fn verdict_is_grid_and_route_invariant(omega in 0.5..5.0_f64) {
        let coarse = stability_verdict(&fifth_wave(omega, 64)).unwrap();
        let fine = stability_verdict(&fifth_wave(omega, 128)).unwrap();
        prop_assert_eq!(coarse.verdict, fine.verdict);
        let (dv, dfd) = (coarse.delta_variational.unwrap(), coarse.delta_fd.unwrap());
        prop_assert_eq!(dv.signum(), dfd.signum());
        prop_assert!(rel(dv, dfd) < 1e-5);
    }
}
