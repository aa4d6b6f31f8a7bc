//! Acceptance report: one PASS/FAIL line per criterion, non-zero exit on any binding failure.

mod common;

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use common::*;
use wavestab_core::config;
use wavestab_core::evolution::*;
use wavestab_core::minimizer::*;
use wavestab_core::models::*;
use wavestab_core::solver::{newton_solve, NewtonConfig};
use wavestab_core::spectral::{functional_m, orbital_distance};
use wavestab_core::spectrum::*;
use wavestab_core::stability::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn c1_residuals() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for omega in [2.5, 3.0, 5.0] {
        let t = Instant::now();
        let w = rbo_wave(omega, 256).unwrap();
        let r = ode_residual(&w).unwrap().max_abs() / w.field.max_abs();
        let secs = t.elapsed().as_secs_f64();
        ok &= r < 1e-10 && secs < 1.0;
        notes.push(format!("rbo({omega}) {r:.1e}"));
    }
    for omega in [0.5, 2.0, 10.0] {
        let t = Instant::now();
        let w = fifth_order_wave(omega, 256).unwrap();
        let scale = w.field.max_abs();
        let direct = w.residual_sup / scale;
        if direct < 1e-10 {
            notes.push(format!("fifth({omega}) {direct:.1e}"));
        } else {
            let p = newton_solve(&w.model, omega, w.a, &w.field, &NewtonConfig::default()).unwrap();
            let corr = (&p.field - &w.field).norm_l2() / w.field.norm_l2();
            ok &= corr < 1e-3 && p.residual_sup < 1e-10 * scale;
            notes.push(format!("fifth({omega}) sampled {direct:.1e} -> polished {:.1e}, correction {corr:.1e}", p.residual_sup / scale));
        }
        ok &= t.elapsed().as_secs_f64() < 1.0;
    }
    outcome(ok, notes.join("; "))
}

fn c2_rbo_mass() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for omega in [2.5, 3.0, 10.0] {
        let w = rbo_wave(omega, 256).unwrap();
        let m = rel(functional_m(&w.field), 4.0 * PI * omega);
        let b = poincare_bound_check(&w).unwrap();
        ok &= m < 1e-10 && b.holds;
        notes.push(format!("ω={omega}: mass err {m:.1e}, ∫φ³/bound {:.4}", b.ratio));
    }
    outcome(ok, notes.join("; "))
}

fn c3_hypothesis() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let cases: [(&str, Box<dyn Fn(usize) -> WaveSolution>); 2] = [
        ("fifth ω=2", Box::new(|n| fifth_wave(2.0, n))),
        ("rbo ω=3", Box::new(|n| rbo_wave(3.0, n).unwrap())),
    ];
    for (name, make) in cases {
        let t = Instant::now();
        let w = make(256);
        let r = check_hypothesis_h(&w, None).unwrap();
        let fine = check_hypothesis_h(&make(512), None).unwrap();
        let sigma = spectral_scale(&w);
        let worst = r.eigenvalues[..5]
            .iter()
            .zip(&fine.eigenvalues[..5])
            .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(sigma))
            .fold(0.0, f64::max);
        let secs = t.elapsed().as_secs_f64();
        ok &= r.n_negative == 1
            && r.zero_candidates.len() == 1
            && r.kernel_alignment > 1.0 - 1e-6
            && worst < 1e-6
            && secs < 30.0;
        notes.push(format!(
            "{name}: λ₁={:.4}, λ₂={:.1e}, alignment 1−{:.1e}, N-refinement {worst:.1e}, {secs:.2}s",
            r.eigenvalues[0],
            r.eigenvalues[1],
            1.0 - r.kernel_alignment
        ));
    }
    outcome(ok, notes.join("; "))
}

fn c4_consistency() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, w) in [("fifth ω=2", fifth_2_256()), ("rbo ω=3", rbo_3_256())] {
        let vd = variational_derivatives(w, DerivativeRoute::LinearSolve).unwrap();
        let (x0, y0) = (-w.omega / w.gap(), 1.0);
        let d = compute_delta(w, &vd, x0, y0).unwrap();
        let from_s = y0 * y0 / w.gap().powi(2) * compute_s(w).unwrap();
        let worst = rel(d.quadratic, d.direct).max(rel(d.quadratic, from_s)).max(rel(d.direct, from_s));
        let id = identity_checks(w, &vd).unwrap();
        ok &= worst < 1e-6 && id.max() < 1e-7;
        notes.push(format!("{name}: Δ={:.10e}, route spread {worst:.1e}, identities {:.1e}", d.quadratic, id.max()));
    }
    outcome(ok, notes.join("; "))
}

fn c5_leading_constant() -> Outcome {
    let s = |omega: f64| compute_s(&fifth_wave(omega, 256)).unwrap();
    let at100 = s(100.0) / 1e6;
    let reference_ok = rel(at100, 5277.03) < 0.01;
    let positive: Vec<(f64, f64)> = [0.5, 1.0, 2.0, 5.0, 100.0].iter().map(|&w| (w, s(w))).collect();
    let all_positive = positive.iter().all(|(_, v)| *v > 0.0);
    // s = c₃ω³ + c₂ω² + c₁ω through ω ∈ {50, 100, 200}.
    let xs: [f64; 3] = [50.0, 100.0, 200.0];
    let m = nalgebra::Matrix3::from_fn(|i, j| xs[i].powi(3 - j as i32));
    let rhs = nalgebra::Vector3::from_fn(|i, _| s(xs[i]));
    let coef = m.lu().solve(&rhs).unwrap();
    let chain = c4_consistency().pass;
    let detail = format!(
        "s/ω³ at ω=100: {at100:.4} vs reference 5277.03 → 1% check {}; fitted cubic coefficient {:.4} (c₂={:.2e}, c₁={:.2e}); s>0 on {{0.5,1,2,5,100}}: {all_positive}; consistency chain: {chain}",
        if reference_ok { "PASS" } else { "FAIL (informational)" },
        coef[0],
        coef[1],
        coef[2]
    );
    outcome(all_positive && chain, detail)
}

fn c6_root() -> Outcome {
    let gap = |omega: f64| {
        let c = FifthOrderCoefficients::new(omega).unwrap();
        omega - 1.0 - 2.0 * c.integration_constant(IntegrationConstant::Doubled)
    };
    let (mut lo, mut hi) = (1e-6, 1.0);
    if gap(lo).signum() == gap(hi).signum() {
        return outcome(false, "no sign change of ω − 1 − 2A₀ on (0, 1]");
    }
    let mut steps = 0;
    while hi - lo > 1e-10 * hi.max(1e-300) || steps < 40 {
        let mid = 0.5 * (lo + hi);
        if gap(mid).signum() == gap(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        steps += 1;
        if hi - lo < 1e-15 {
            break;
        }
    }
    let root = 0.5 * (lo + hi);
    let mut ok = hi - lo <= 1e-10;
    let opts = VerdictOptions { finite_differences: false, tol_zero: None };
    let verdict_at = |omega: f64| {
        let w = fifth_order_wave_with(omega, 256, IntegrationConstant::Doubled).unwrap();
        stability_verdict_with(&w, &opts).unwrap()
    };
    let at_root = verdict_at(root);
    ok &= at_root.verdict == Verdict::NotDecided && at_root.reason.starts_with("omega_gap≈0");
    // Half-width of the band where |gap| ≤ 1e-8·max(1, ω).
    let h = 1e-7;
    let slope = (gap(root + h) - gap(root - h)) / (2.0 * h);
    let band = 1e-8 / slope.abs();
    let neighbours: Vec<String> = [root - 5e-7, root + 5e-7]
        .iter()
        .map(|&w| format!("{:?} (gap {:.1e})", verdict_at(w).verdict, gap(w)))
        .collect();
    let consistent_gap = |w: f64| w - 1.0 - 2.0 * FifthOrderCoefficients::new(w).unwrap().a0;
    let consistent_sign_change = (1..=1000).any(|i| consistent_gap(i as f64 * 1e-3).signum() != consistent_gap(1e-3).signum());
    outcome(
        ok,
        format!(
            "bisection root {root:.12} (bracket {:.1e}) vs reference 0.0513569; verdict at root {:?} ({}); NOT-DECIDED band ±{band:.1e}, so root∓5e-7 give {}; consistent-constant gap changes sign on (0,1]: {consistent_sign_change}",
            hi - lo,
            at_root.verdict,
            at_root.reason,
            neighbours.join(", ")
        ),
    )
}

fn c7_minimizer() -> Outcome {
    let t = Instant::now();
    let phi = rbo_3_256();
    let cfg = MinimizerConfig::new(ModelSpec::rbo(), 3.0, phi.field.cube_integral(), 256, 4.0 * PI);
    let res = minimize_constrained(&cfg, None).unwrap();
    let (d, _) = orbital_distance(&res.wave.field, &phi.field, 0.0).unwrap();
    let d = d / phi.field.norm_l2();
    let monotone = res.history.windows(2).all(|p| p[1].b <= p[0].b);
    let el = ode_residual(&res.wave).unwrap().max_abs() / res.wave.field.max_abs();
    let secs = t.elapsed().as_secs_f64();
    outcome(
        d < 1e-6 && monotone && el < 1e-8 && secs < 60.0,
        format!(
            "{:?} after {} iterations, C={:.10}, distance {d:.1e}·‖φ‖, B monotone {monotone}, E-L residual {el:.1e}, {secs:.2}s",
            res.termination,
            res.history.len() - 1,
            res.multiplier
        ),
    )
}

fn c8_evolution() -> Outcome {
    let w = fifth_2_256();
    let s = w.model.symbol();
    let (st, _) = evolve(&w.field, s, &EvolveConfig::new(1e-3, 50.0, 100)).unwrap();
    let run = |dt: f64| evolve(&w.field, s, &EvolveConfig::new(dt, 1.0, usize::MAX)).unwrap().1;
    let reference = run(0.01 / 8.0);
    let e1 = (&run(0.01) - &reference).norm_l2();
    let e2 = (&run(0.005) - &reference).norm_l2();
    let order = (e1 / e2).log2();
    let d = w.field.derivative();
    let frame = (&rhs(&w.field, s).unwrap() + &(w.omega * &d)).max_abs() / d.max_abs();
    outcome(
        st.drift_m.abs() < 1e-13 && st.drift_f < 1e-8 && st.drift_p < 1e-8 && order >= 3.8 && frame < 1e-8,
        format!(
            "drift_M {:.1e}, drift_F {:.1e}, drift_P {:.1e}, observed order {order:.3}, traveling frame {frame:.1e}·max|φ′|",
            st.drift_m, st.drift_f, st.drift_p
        ),
    )
}

fn c9_dynamics() -> Outcome {
    let t = Instant::now();
    let w = fifth_2_256();
    let p = random_perturbation(*w.grid(), config::DEFAULT_SEED, 8);
    let st = stability_experiment(w, 1e-3, &EvolveConfig::new(5e-4, 100.0, 200), &p).unwrap();
    let amp = st.amplification();
    let vvar = st.v_variation().unwrap();
    let secs = t.elapsed().as_secs_f64();
    outcome(
        amp <= 10.0 && vvar < 1e-6 && secs < 120.0,
        format!(
            "ρ(0)={:.3e}, max ρ/ρ(0)={amp:.4}, V(0)={:.4e}, V variation {vvar:.1e}, {} samples, {secs:.2}s",
            st.rho_series[0],
            st.v_series.as_ref().unwrap()[0],
            st.times.len()
        ),
    )
}

const SUITES: [(&str, &str); 8] = [
    ("spectral_core", include_str!("spectral_core.rs")),
    ("elliptic_functions", include_str!("elliptic_functions.rs")),
    ("models", include_str!("models.rs")),
    ("wave_solver", include_str!("wave_solver.rs")),
    ("spectral_analysis", include_str!("spectral_analysis.rs")),
    ("stability_criterion", include_str!("stability_criterion.rs")),
    ("minimizer", include_str!("minimizer.rs")),
    ("evolution", include_str!("evolution.rs")),
];

/// `(property count, minimum case count)` of the `proptest!` block in a suite source.
fn property_census(src: &str) -> Option<(usize, u32)> {
    let block = &src[src.find("proptest! {")?..];
    let n = block.split("cases(").nth(1)?.split(')').next()?.parse().ok()?;
    Some((block.matches("#[test]").count(), n))
}

/// Most recently built test executable `<name>-<hash>` next to this binary.
fn suite_binary(name: &str) -> Option<PathBuf> {
    let dir = std::env::current_exe().ok()?.parent()?.to_path_buf();
    std::fs::read_dir(dir)
        .ok()?
        .filter_map(|e| e.ok())
        .filter(|e| {
            let f = e.file_name().to_string_lossy().into_owned();
            f.strip_prefix(name).and_then(|r| r.strip_prefix('-')).is_some_and(|h| !h.contains('.') && !h.contains('-'))
        })
        .filter_map(|e| Some((e.metadata().ok()?.modified().ok()?, e.path())))
        .max()
        .map(|(_, p)| p)
}

fn c10_invariant_suites() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let mut properties = 0;
    for (name, src) in SUITES {
        match property_census(src) {
            Some((count, n)) if count > 0 && n >= 20 => properties += count,
            _ => {
                ok = false;
                notes.push(format!("{name}: no property block with ≥ 20 cases"));
            }
        }
        match suite_binary(name) {
            None => {
                ok = false;
                notes.push(format!("{name}: not built"));
            }
            Some(path) => {
                let out = Command::new(&path).arg("--quiet").output();
                match out {
                    Ok(o) => {
                        let text = String::from_utf8_lossy(&o.stdout);
                        let summary = text.lines().find(|l| l.starts_with("test result")).unwrap_or("no summary");
                        let passed = summary.split_whitespace().nth(3).unwrap_or("?");
                        ok &= o.status.success();
                        notes.push(format!("{name}: {} ({passed} passed)", if o.status.success() { "ok" } else { "FAILED" }));
                    }
                    Err(e) => {
                        ok = false;
                        notes.push(format!("{name}: {e}"));
                    }
                }
            }
        }
    }
    outcome(ok, format!("{properties} properties at ≥ 20 cases each; {}", notes.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("explicit-solution residuals", c1_residuals),
        ("rBO mass and cubic lower bound", c2_rbo_mass),
        ("spectral hypothesis", c3_hypothesis),
        ("stability-criterion self-consistency", c4_consistency),
        ("leading constant of s", c5_leading_constant),
        ("root of the gap", c6_root),
        ("constrained minimizer", c7_minimizer),
        ("evolution", c8_evolution),
        ("dynamical stability", c9_dynamics),
        ("invariant property suites", c10_invariant_suites),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        failures += usize::from(!o.pass);
        println!(
            "criterion {:>2} [{}] {name}: {} ({:.2}s)",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
