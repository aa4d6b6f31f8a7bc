mod common;

use std::f64::consts::PI;

use common::*;
use nalgebra::DVector;
use proptest::prelude::*;
use wavestab_core::minimizer::{minimize_constrained, MinimizerConfig};
use wavestab_core::models::*;
use wavestab_core::solver::continue_patch;
use wavestab_core::spectrum::*;
use wavestab_core::stability::apply_linearized;
use wavestab_core::{PeriodicField, PeriodicGrid};

fn gap_pair(w: &WaveSolution) -> (f64, f64) {
    (-w.omega / w.gap(), 1.0)
}

/// `|a − b| ≤ tol·max(|a|, |b|, σ)`: relative agreement, with `σ` guarding eigenvalues at zero.
fn agree(a: &[f64], b: &[f64], sigma: f64, tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * x.abs().max(y.abs()).max(sigma))
}

#[test]
fn free_operator() {
    let grid = PeriodicGrid::new(2.0 * PI, 32).unwrap();
    let w = WaveSolution::new(PeriodicField::zeros(grid), 2.0, -0.5, ModelSpec::bbm()).unwrap();
    let l = assemble_l(&w).unwrap();
    for (i, n) in l.modes.iter().enumerate() {
        assert!(rel(l.matrix[(i, i)], 2.0 * (*n as f64).powi(2) + 1.0) < 1e-14);
    }
    assert_eq!(l.matrix.lower_triangle().sum(), l.matrix.diagonal().sum());
    let r = check_hypothesis_h(&w, None).unwrap();
    assert_eq!(r.n_negative, 0);
    assert!(r.zero_candidates.is_empty());
    assert_eq!(r.verdict, HypothesisVerdict::Fail);
}

#[test]
fn derivative_spans_the_kernel() {
    for w in [fifth_2_256(), rbo_3_256()] {
        let l = assemble_l(w).unwrap();
        assert!(l.asymmetry < 1e-12 * w.field.max_abs());
        let d = l.odd_vector(&w.field.derivative());
        let norm_l = eigensystem(&l).values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!((&l.matrix * &d).norm() <= 1e-8 * norm_l * d.norm());
    }
}

#[test]
fn matrix_action_matches_grid_evaluation() {
    let w = fifth_2_256();
    let l = assemble_l(w).unwrap();
    let grid = *w.grid();
    for seed in 0..4 {
        let data: Vec<f64> = (0..61).map(|i| ((i * 7 + seed * 13) as f64).sin()).collect();
        let v = field_from(grid, &data);
        let lv = apply_linearized(w, &v).unwrap();
        let re = &l.matrix * l.even_vector(&v);
        let im = &l.matrix * l.odd_vector(&v);
        let (er, ei) = (l.even_vector(&lv), l.odd_vector(&lv));
        assert!((re - &er).amax() <= 1e-10 * er.amax().max(ei.amax()));
        assert!((im - &ei).amax() <= 1e-10 * er.amax().max(ei.amax()));
    }
}

#[test]
fn hypothesis_holds_for_both_applications() {
    for w in [fifth_2_256(), rbo_3_256()] {
        let r = check_hypothesis_h(w, None).unwrap();
        assert_eq!(r.verdict, HypothesisVerdict::Pass, "{}", r.reason);
        assert_eq!(r.n_negative, 1);
        assert_eq!(r.zero_candidates.len(), 1);
        assert!(r.kernel_alignment > 1.0 - 1e-6);
        assert_eq!(r.n_negative + r.zero_candidates.len() + r.n_positive, r.eigenvalues.len());
        assert!(r.eigenvalues.windows(2).all(|p| p[0] <= p[1]));
    }
}

#[test]
fn constrained_positivity() {
    for w in [fifth_2_256(), rbo_3_256()] {
        let (x0, y0) = gap_pair(w);
        let p = projected_positivity(w, x0, y0).unwrap();
        assert!(p > 0.0, "projected min {p}");
        let l = assemble_l(w).unwrap();
        let only_kernel = projected_min_eigenvalue(&l.matrix, &[l.odd_vector(&w.field.derivative())]).unwrap();
        assert!(only_kernel < 0.0);
    }
    let w = rbo_3_256();
    let l = assemble_l(w).unwrap();
    assert!(projected_min_eigenvalue(&l.matrix, &[DVector::zeros(l.dim())]).is_err());
}

#[test]
fn pf2_screens() {
    let gauss: Vec<f64> = (0..=10).map(|n| (-(n as f64).powi(2)).exp()).collect();
    assert!(pf2_logconcavity_check(&gauss, (0, 10)).unwrap().pass);
    assert!(!pf2_logconcavity_check(&[1.0; 11], (0, 10)).unwrap().pass);

    let w = fifth_2_256();
    let mu = pf2_shift(&w.field);
    assert!(w.field.add_constant(mu).min() > 0.0);
    let mut seq = fifth_order_fourier_coefficients(2.0, 20).unwrap().derived;
    seq[0] += mu;
    let r = pf2_logconcavity_check(&seq, (0, 20)).unwrap();
    assert!(r.pass, "violations {} min log minor {:e}", r.violations, r.min_log_minor);
    let d2 = log_second_derivative(&w.field, mu).unwrap();
    assert!(d2.is_finite());
}

proptest! {
    #![proptest_config(cases(20))]

    #[test]
    fn low_spectrum_is_grid_converged(omega in 0.5..5.0_f64, rbo_omega in 2.5..8.0_f64) {
        let pairs = [
            (fifth_wave(omega, 64), fifth_wave(omega, 128)),
            (rbo_wave(rbo_omega, 128).unwrap(), rbo_wave(rbo_omega, 256).unwrap()),
        ];
        for (a, b) in pairs {
            let ea = eigensystem(&assemble_l(&a).unwrap()).values;
            let eb = eigensystem(&assemble_l(&b).unwrap()).values;
            prop_assert!(agree(&ea[..5], &eb[..5], spectral_scale(&a), 1e-6), "{:?} vs {:?}", &ea[..5], &eb[..5]);
        }
    }

    #[test]
    fn minimizer_signs(omega in 2.5..6.0_f64) {
        let explicit = rbo_wave(omega, 128).unwrap();
        let cfg = MinimizerConfig::new(ModelSpec::rbo(), omega, explicit.field.cube_integral(), 128, 4.0 * PI);
        let w = minimize_constrained(&cfg, None).unwrap().wave;
        let dphi = w.field.derivative();
        let norm_l = spectral_scale(&w) + omega;
        prop_assert!(apply_linearized(&w, &dphi).unwrap().inner(&dphi).abs() <= 1e-10 * norm_l * dphi.inner(&dphi));
        let lphi = apply_linearized(&w, &w.field).unwrap().inner(&w.field);
        prop_assert!(lphi < 0.0);
    }

    #[test]
    fn negative_count_is_constant_on_patches(omega in 0.5..5.0_f64) {
        let w = fifth_wave(omega, 64);
        let patch = continue_patch(&w.model, &w, 1e-3, 1e-3).unwrap();
        let base = check_hypothesis_h(&w, None).unwrap().n_negative;
        for row in &patch.waves {
            for n in row {
                prop_assert_eq!(check_hypothesis_h(n, None).unwrap().n_negative, base);
            }
        }
    }
}
