//! The stability quantity `s(φ)`, parameter derivatives of the wave surface,
//! the form `Δ(x, y)`, the Lyapunov functionals and the final verdict.

use log::{info, warn};
use serde::Serialize;

use crate::config;
use crate::error::{Result, WaveError};
use crate::models::WaveSolution;
use crate::solver::{continue_patch, solve_linearized_even};
use crate::spectral::{
    apply_symbol, functional_f, functional_m, functional_p, orbital_distance, quadratic_form, PeriodicField,
};
use crate::spectrum::{check_hypothesis_h, projected_positivity, HypothesisVerdict, SpectralReport};

/// `s(φ) = (2ω(ω−1) + 2A + 1)M(φ) + ω∫φMφ + (2A(ω+1) − ω + 1)L₀`.
pub fn compute_s(w: &WaveSolution) -> Result<f64> {
    let (om, a) = (w.omega, w.a);
    let mass = functional_m(&w.field);
    let quad = quadratic_form(&w.field, w.model.symbol())?;
    let l0 = w.grid().period();
    Ok((2.0 * om * (om - 1.0) + 2.0 * a + 1.0) * mass + om * quad + (2.0 * a * (om + 1.0) - om + 1.0) * l0)
}

/// `s` split into its three terms (mass, dispersion, period), for inspection.
pub fn s_terms(w: &WaveSolution) -> Result<[f64; 3]> {
    let (om, a) = (w.omega, w.a);
    let mass = functional_m(&w.field);
    let quad = quadratic_form(&w.field, w.model.symbol())?;
    let l0 = w.grid().period();
    Ok([
        (2.0 * om * (om - 1.0) + 2.0 * a + 1.0) * mass,
        om * quad,
        (2.0 * a * (om + 1.0) - om + 1.0) * l0,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeRoute {
    LinearSolve,
    FiniteDifference,
}

/// `η = ∂φ/∂ω`, `β = ∂φ/∂A` and the four scalar derivatives.
#[derive(Debug, Clone)]
pub struct VariationalDerivatives {
    pub eta: PeriodicField,
    pub beta: PeriodicField,
    pub m_omega: f64,
    pub m_a: f64,
    pub f_omega: f64,
    pub f_a: f64,
    pub route: DerivativeRoute,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DerivativeSummary {
    pub m_omega: f64,
    pub m_a: f64,
    pub f_omega: f64,
    pub f_a: f64,
    pub route: DerivativeRoute,
}

impl VariationalDerivatives {
    fn from_fields(w: &WaveSolution, eta: PeriodicField, beta: PeriodicField, route: DerivativeRoute) -> Result<Self> {
        let g = apply_symbol(&w.field, w.model.symbol())?.lin_comb(1.0, &w.field, 1.0);
        Ok(Self {
            m_omega: eta.integral(),
            m_a: beta.integral(),
            f_omega: g.inner(&eta),
            f_a: g.inner(&beta),
            eta,
            beta,
            route,
        })
    }

    pub fn summary(&self) -> DerivativeSummary {
        DerivativeSummary {
            m_omega: self.m_omega,
            m_a: self.m_a,
            f_omega: self.f_omega,
            f_a: self.f_a,
            route: self.route,
        }
    }
}

/// Default finite-difference step `1e−3·max(1, |ω|)`.
pub fn default_fd_step(w: &WaveSolution) -> f64 {
    config::FD_STEP * w.omega.abs().max(1.0)
}

pub fn variational_derivatives(w: &WaveSolution, route: DerivativeRoute) -> Result<VariationalDerivatives> {
    match route {
        DerivativeRoute::LinearSolve => {
            let g = apply_symbol(&w.field, w.model.symbol())?.lin_comb(-1.0, &w.field, -1.0);
            let eta = solve_linearized_even(w, &g)?;
            let beta = solve_linearized_even(w, &PeriodicField::constant(*w.grid(), -1.0))?;
            VariationalDerivatives::from_fields(w, eta, beta, route)
        }
        DerivativeRoute::FiniteDifference => variational_derivatives_fd(w, default_fd_step(w)),
    }
}

/// Central differences on stencils of step `h` and `h/2`, combined by one Richardson step.
pub fn variational_derivatives_fd(w: &WaveSolution, h: f64) -> Result<VariationalDerivatives> {
    let central = |h: f64| -> Result<(PeriodicField, PeriodicField, f64, f64)> {
        let p = continue_patch(&w.model, w, h, h)?;
        let (dw, da) = p.steps;
        let eta = (&p.at(1, 0).field - &p.at(-1, 0).field).scale(0.5 / dw);
        let beta = (&p.at(0, 1).field - &p.at(0, -1).field).scale(0.5 / da);
        Ok((eta, beta, dw, da))
    };
    let (e1, b1, w1, a1) = central(h)?;
    let (e2, b2, w2, a2) = central(0.5 * h)?;
    let rich = |coarse: &PeriodicField, fine: &PeriodicField, hc: f64, hf: f64| {
        let r2 = (hc / hf).powi(2);
        coarse.lin_comb(-1.0 / (r2 - 1.0), fine, r2 / (r2 - 1.0))
    };
    let eta = rich(&e1, &e2, w1, w2);
    let beta = rich(&b1, &b2, a1, a2);
    VariationalDerivatives::from_fields(w, eta, beta, DerivativeRoute::FiniteDifference)
}

/// Plain central-difference derivatives (no extrapolation) at step `h`; used for order studies.
pub fn central_difference_derivatives(w: &WaveSolution, h: f64) -> Result<VariationalDerivatives> {
    let p = continue_patch(&w.model, w, h, h)?;
    let (dw, da) = p.steps;
    let eta = (&p.at(1, 0).field - &p.at(-1, 0).field).scale(0.5 / dw);
    let beta = (&p.at(0, 1).field - &p.at(0, -1).field).scale(0.5 / da);
    VariationalDerivatives::from_fields(w, eta, beta, DerivativeRoute::FiniteDifference)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DeltaValues {
    /// `x²F_ω + xy(M_ω + F_A) + y²M_A`.
    pub quadratic: f64,
    /// `−⟨LΦ, Φ⟩` with `Φ = xη + yβ`.
    pub direct: f64,
}

pub fn compute_delta(w: &WaveSolution, vd: &VariationalDerivatives, x: f64, y: f64) -> Result<DeltaValues> {
    let quadratic = x * x * vd.f_omega + x * y * (vd.m_omega + vd.f_a) + y * y * vd.m_a;
    let phi_dir = vd.eta.lin_comb(x, &vd.beta, y);
    let l_phi = apply_linearized(w, &phi_dir)?;
    Ok(DeltaValues { quadratic, direct: -l_phi.inner(&phi_dir) })
}

/// `Lv = ωMv + (ω−1)v − φv`.
pub fn apply_linearized(w: &WaveSolution, v: &PeriodicField) -> Result<PeriodicField> {
    let mv = apply_symbol(v, w.model.symbol())?;
    Ok(mv.lin_comb(w.omega, v, w.omega - 1.0).lin_comb(1.0, &w.field.product(v), -1.0))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IdentityResiduals {
    /// `F_A = M_ω`.
    pub eq9: f64,
    /// `M + 2F + (ω−1−2A)M_ω = ωF_ω`.
    pub eq10: f64,
    /// `L₀ + (ω−1−2A)M_A + M = ωM_ω`.
    pub eq11: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.eq9.max(self.eq10).max(self.eq11)
    }
}

fn rel(lhs: f64, rhs: f64, terms: &[f64]) -> f64 {
    let scale = terms.iter().fold(lhs.abs().max(rhs.abs()), |m, t| m.max(t.abs()));
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / scale
    }
}

/// Relative residuals of the three identities linking the derivatives.
pub fn identity_checks(w: &WaveSolution, vd: &VariationalDerivatives) -> Result<IdentityResiduals> {
    let mass = functional_m(&w.field);
    let f = functional_f(&w.field, w.model.symbol())?;
    let gap = w.gap();
    let l0 = w.grid().period();
    let eq9 = rel(vd.f_a, vd.m_omega, &[]);
    let t10 = [mass, 2.0 * f, gap * vd.m_omega];
    let eq10 = rel(t10.iter().sum(), w.omega * vd.f_omega, &t10);
    let t11 = [l0, gap * vd.m_a, mass];
    let eq11 = rel(t11.iter().sum(), w.omega * vd.m_omega, &t11);
    Ok(IdentityResiduals { eq9, eq10, eq11 })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LyapunovValues {
    /// `G(u) = P(u) + (ω−1)F(u) + A·M(u)`.
    pub g: f64,
    /// `Q(u) = x₀F(u) + y₀M(u)`.
    pub q: f64,
    /// `V(u) = G(u) − G(φ) + N(Q(u) − Q(φ))²`.
    pub v: f64,
}

pub fn functional_g(u: &PeriodicField, w: &WaveSolution) -> Result<f64> {
    let s = w.model.symbol();
    Ok(functional_p(u, s)? + (w.omega - 1.0) * functional_f(u, s)? + w.a * functional_m(u))
}

pub fn functional_q(u: &PeriodicField, w: &WaveSolution, x0: f64, y0: f64) -> Result<f64> {
    Ok(x0 * functional_f(u, w.model.symbol())? + y0 * functional_m(u))
}

/// `(G(u), Q(u), V(u))`.
///
/// `V` is evaluated through the exact expansion about the nearest translate
/// `φ_y` of the wave, `G(φ_y + z) − G(φ_y) = ⟨G′(φ_y), z⟩ + ½⟨Lz, z⟩ − ∫z³/6`
/// (and the analogous quadratic expansion of `Q`), which avoids cancelling
/// two `O(1)` numbers when `u` is close to the orbit.
pub fn lyapunov_values(u: &PeriodicField, w: &WaveSolution, x0: f64, y0: f64, n_coef: f64) -> Result<LyapunovValues> {
    u.same_grid(&w.field)?;
    let g = functional_g(u, w)?;
    let q = functional_q(u, w, x0, y0)?;
    let (_, y) = orbital_distance(u, &w.field, 0.0)?;
    let phi_y = w.field.translate(y);
    let shifted = WaveSolution { field: phi_y.clone(), ..w.clone() };
    let z = u - &phi_y;
    let s = w.model.symbol();

    let grad_g = crate::models::wave_residual(&phi_y, s, w.omega, w.a)?;
    let lz = apply_linearized(&shifted, &z)?;
    let dg = grad_g.inner(&z) + 0.5 * lz.inner(&z) - z.cube_integral() / 6.0;

    let mphi = apply_symbol(&phi_y, s)?.lin_comb(1.0, &phi_y, 1.0);
    let mz = apply_symbol(&z, s)?.lin_comb(1.0, &z, 1.0);
    let dq = x0 * (mphi.inner(&z) + 0.5 * mz.inner(&z)) + y0 * z.integral();

    Ok(LyapunovValues { g, q, v: dg + n_coef * dq * dq })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Verdict {
    Stable,
    NotDecided,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub schema: u32,
    pub model: String,
    pub omega: f64,
    pub a: f64,
    pub period: f64,
    pub points: usize,
    pub residual_sup: f64,
    pub s_phi: f64,
    pub omega_gap: f64,
    pub x0: f64,
    pub y0: f64,
    pub delta_variational: Option<f64>,
    pub delta_direct: Option<f64>,
    pub delta_fd: Option<f64>,
    pub delta_from_s: Option<f64>,
    pub derivatives: Option<DerivativeSummary>,
    pub derivatives_fd: Option<DerivativeSummary>,
    pub identity_residuals: Option<IdentityResiduals>,
    pub hypothesis_h: SpectralReport,
    pub verdict: Verdict,
    pub reason: String,
}

/// Options for [`stability_verdict_with`].
#[derive(Debug, Clone, Copy)]
pub struct VerdictOptions {
    /// Also evaluate the finite-difference route (nine-point stencils).
    pub finite_differences: bool,
    pub tol_zero: Option<f64>,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        Self { finite_differences: true, tol_zero: None }
    }
}

pub fn stability_verdict(w: &WaveSolution) -> Result<StabilityReport> {
    stability_verdict_with(w, &VerdictOptions::default())
}

pub fn stability_verdict_with(w: &WaveSolution, opts: &VerdictOptions) -> Result<StabilityReport> {
    let mut spectral = check_hypothesis_h(w, opts.tol_zero)?;
    let s_phi = compute_s(w)?;
    let gap = w.gap();
    let gap_ok = gap.abs() > config::GAP_TOL * w.omega.abs().max(1.0);
    let (x0, y0) = if gap_ok { (-w.omega / gap, 1.0) } else { (f64::NAN, 1.0) };

    let mut report = StabilityReport {
        schema: 1,
        model: w.model.to_string(),
        omega: w.omega,
        a: w.a,
        period: w.grid().period(),
        points: w.grid().len(),
        residual_sup: w.residual_sup,
        s_phi,
        omega_gap: gap,
        x0,
        y0,
        delta_variational: None,
        delta_direct: None,
        delta_fd: None,
        delta_from_s: None,
        derivatives: None,
        derivatives_fd: None,
        identity_residuals: None,
        hypothesis_h: spectral.clone(),
        verdict: Verdict::NotDecided,
        reason: String::new(),
    };

    if gap_ok {
        report.delta_from_s = Some(y0 * y0 / (gap * gap) * s_phi);
        match variational_derivatives(w, DerivativeRoute::LinearSolve) {
            Ok(vd) => {
                let d = compute_delta(w, &vd, x0, y0)?;
                report.delta_variational = Some(d.quadratic);
                report.delta_direct = Some(d.direct);
                report.identity_residuals = Some(identity_checks(w, &vd)?);
                report.derivatives = Some(vd.summary());
            }
            Err(e @ WaveError::FoldPoint { .. }) => warn!("linear-solve derivatives unavailable: {e}"),
            Err(e) => return Err(e),
        }
        if opts.finite_differences {
            match variational_derivatives(w, DerivativeRoute::FiniteDifference) {
                Ok(vd) => {
                    report.delta_fd = Some(compute_delta(w, &vd, x0, y0)?.quadratic);
                    report.derivatives_fd = Some(vd.summary());
                }
                Err(e) => warn!("finite-difference derivatives unavailable: {e}"),
            }
        }
        if spectral.verdict == HypothesisVerdict::Pass {
            match projected_positivity(w, x0, y0) {
                Ok(p) => spectral.projected_min = Some(p),
                Err(e) => warn!("projected positivity unavailable: {e}"),
            }
        }
    }
    report.hypothesis_h = spectral;

    let h_pass = report.hypothesis_h.verdict == HypothesisVerdict::Pass;
    let (verdict, reason) = if !h_pass {
        let tag = match report.hypothesis_h.verdict {
            HypothesisVerdict::Inconclusive => "spectral hypothesis inconclusive",
            _ => "spectral hypothesis fails",
        };
        (Verdict::NotDecided, format!("{tag}: {}", report.hypothesis_h.reason))
    } else if !gap_ok {
        (Verdict::NotDecided, format!("omega_gap≈0 ({gap:.3e})"))
    } else if !(s_phi > 0.0) {
        (Verdict::NotDecided, format!("s(phi) = {s_phi:.6e} is not positive"))
    } else {
        (Verdict::Stable, "hypothesis holds, gap nonzero, s(phi) > 0".to_string())
    };
    info!("{} omega={} A={}: {:?} ({reason})", report.model, w.omega, w.a, verdict);
    report.verdict = verdict;
    report.reason = reason;
    Ok(report)
}
