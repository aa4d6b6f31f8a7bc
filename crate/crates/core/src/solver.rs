//! Newton iteration for even traveling waves and continuation in `(ω, A)`.

use log::{debug, warn};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::config;
use crate::error::{Result, WaveError};
use crate::models::{ModelSpec, WaveSolution};
use crate::spectral::{symbol_values, PeriodicField};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NewtonConfig {
    /// Stop when `sup|residual| ≤ tol_residual·max(1, max|φ|)`.
    pub tol_residual: f64,
    pub max_iter: usize,
    /// Initial step fraction; halved on residual increase.
    pub damping: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self { tol_residual: config::NEWTON_TOL, max_iter: config::NEWTON_MAX_ITER, damping: 1.0 }
    }
}

impl NewtonConfig {
    fn validate(&self) -> Result<()> {
        if !(self.tol_residual > 0.0) {
            return Err(WaveError::InvalidConfig("tol_residual must be positive".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(WaveError::InvalidConfig("damping must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// Iteration history of one solve.
#[derive(Debug, Clone, Serialize)]
pub struct NewtonTrace {
    /// `‖δφ‖_{L²}` of each accepted correction.
    pub corrections: Vec<f64>,
    /// `sup|residual|` before each iteration and after the last one.
    pub residuals: Vec<f64>,
    /// `|c_{N/2}| / max|c_n|` of the converged wave.
    pub tail_ratio: f64,
}

impl NewtonTrace {
    pub fn iterations(&self) -> usize {
        self.corrections.len()
    }
}

/// Cosine-basis weights that make the Jacobian self-adjoint (see [`cosine_jacobian`]).
fn cosine_weights(h: usize) -> Vec<f64> {
    let mut w = vec![2.0; h + 1];
    w[0] = 1.0;
    w[h] = 0.5;
    w
}

/// Jacobian of `x ↦ cosine coefficients of ωMφ + (ω−1)φ − φ²/2 + A` at the
/// cosine coefficients `x = (c_0, …, c_{N/2})`, with `diag = ωθ_j + ω − 1`.
///
/// The square is de-aliased with the Nyquist coefficient split evenly over
/// `±N/2`, so the two-sided data seen by the product is `φ̃_{±N/2} = c_{N/2}/2`.
pub fn cosine_jacobian(x: &[f64], diag: &[f64]) -> DMatrix<f64> {
    let h = x.len() - 1;
    let hi = h as i64;
    let phit = |m: i64| -> f64 {
        let a = m.abs();
        if a < hi {
            x[a as usize]
        } else if a == hi {
            0.5 * x[h]
        } else {
            0.0
        }
    };
    DMatrix::from_fn(h + 1, h + 1, |j, k| {
        let (jj, kk) = (j as i64, k as i64);
        let dp = if k == 0 {
            2.0 * phit(jj)
        } else if k < h {
            2.0 * (phit(jj - kk) + phit(jj + kk))
        } else {
            phit(jj - hi) + phit(jj + hi)
        };
        let dout = if j == h { 2.0 * dp } else { dp };
        let d = if j == k { diag[j] } else { 0.0 };
        d - 0.5 * dout
    })
}

/// Symmetric eigen-decomposition of `W^{1/2} J W^{-1/2}`.
struct SymmetrizedJacobian {
    sqrt_w: Vec<f64>,
    eig: nalgebra::SymmetricEigen<f64, nalgebra::Dyn>,
}

impl SymmetrizedJacobian {
    fn new(j: &DMatrix<f64>) -> Self {
        let n = j.nrows();
        let sqrt_w: Vec<f64> = cosine_weights(n - 1).iter().map(|w| w.sqrt()).collect();
        let s = DMatrix::from_fn(n, n, |a, b| sqrt_w[a] * j[(a, b)] / sqrt_w[b]);
        let s = (&s + s.transpose()) * 0.5;
        Self { sqrt_w, eig: s.symmetric_eigen() }
    }

    fn check_fold(&self) -> Result<()> {
        let ev = &self.eig.eigenvalues;
        let norm = ev.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let smallest = ev.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        if !(smallest >= 1e-12 * norm) {
            return Err(WaveError::FoldPoint { smallest, norm });
        }
        Ok(())
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let b = DVector::from_fn(n, |i, _| self.sqrt_w[i] * rhs[i]);
        let q = &self.eig.eigenvectors;
        let mut y = q.transpose() * b;
        for (yi, li) in y.iter_mut().zip(self.eig.eigenvalues.iter()) {
            *yi /= li;
        }
        let z = q * y;
        (0..n).map(|i| z[i] / self.sqrt_w[i]).collect()
    }
}

fn eval_residual(
    x: &[f64],
    wave: &WaveSolution,
    omega: f64,
    a: f64,
) -> Result<(PeriodicField, PeriodicField)> {
    let phi = PeriodicField::from_cosine_coeffs(*wave.grid(), x)?;
    let r = crate::models::wave_residual(&phi, wave.model.symbol(), omega, a)?;
    Ok((phi, r))
}

/// Solves `Lv = rhs` for even `rhs` in the even subspace, `L = ωM + ω − 1 − φ`.
pub fn solve_linearized_even(w: &WaveSolution, rhs: &PeriodicField) -> Result<PeriodicField> {
    w.field.same_grid(rhs)?;
    let grid = *w.grid();
    let theta = symbol_values(&w.field, w.model.symbol())?;
    let diag: Vec<f64> = theta[..=grid.nyquist()].iter().map(|t| w.omega * t + w.omega - 1.0).collect();
    let j = cosine_jacobian(&w.field.cosine_coeffs(), &diag);
    let jac = SymmetrizedJacobian::new(&j);
    jac.check_fold()?;
    let b = DVector::from_vec(rhs.cosine_coeffs());
    let mut x = DVector::from_vec(jac.solve(b.as_slice()));
    // Iterative refinement: the eigen-solve error scales with the condition number.
    for _ in 0..2 {
        let r = &b - &j * &x;
        x += DVector::from_vec(jac.solve(r.as_slice()));
    }
    PeriodicField::from_cosine_coeffs(grid, x.as_slice())
}

/// Solves `ωMφ + (ω−1)φ − φ²/2 + A = 0` in the even subspace from `seed`.
pub fn newton_solve(
    model: &ModelSpec,
    omega: f64,
    a: f64,
    seed: &PeriodicField,
    cfg: &NewtonConfig,
) -> Result<WaveSolution> {
    newton_solve_traced(model, omega, a, seed, cfg).map(|(w, _)| w)
}

pub fn newton_solve_traced(
    model: &ModelSpec,
    omega: f64,
    a: f64,
    seed: &PeriodicField,
    cfg: &NewtonConfig,
) -> Result<(WaveSolution, NewtonTrace)> {
    cfg.validate()?;
    if !(omega.is_finite() && omega != 0.0 && a.is_finite()) {
        return Err(WaveError::InvalidConfig(format!("need finite omega != 0 and finite A, got ({omega}, {a})")));
    }
    if !seed.is_finite() {
        return Err(WaveError::BadSeed("seed has non-finite values".into()));
    }
    let odd = seed.odd_part().max_abs();
    if odd > 1e-8 * seed.max_abs().max(1.0) {
        return Err(WaveError::BadSeed(format!("seed is not even (odd part {odd:.3e})")));
    }

    let grid = *seed.grid();
    let theta = symbol_values(seed, model.symbol())?;
    let diag: Vec<f64> = theta[..=grid.nyquist()].iter().map(|t| omega * t + omega - 1.0).collect();

    // Placeholder wave carrying grid and model for residual evaluation.
    let shell = WaveSolution {
        field: seed.even_part(),
        omega,
        a,
        model: model.clone(),
        residual_sup: f64::NAN,
    };
    let mut x = shell.field.cosine_coeffs();
    let (mut phi, mut r) = eval_residual(&x, &shell, omega, a)?;
    let mut res = r.max_abs();
    let mut trace = NewtonTrace { corrections: Vec::new(), residuals: vec![res], tail_ratio: 0.0 };

    let mut iter = 0;
    while res > cfg.tol_residual * phi.max_abs().max(1.0) {
        if iter == cfg.max_iter || !res.is_finite() {
            return Err(WaveError::Divergence { iterations: iter, residual: res });
        }
        iter += 1;
        let jac = SymmetrizedJacobian::new(&cosine_jacobian(&x, &diag));
        jac.check_fold()?;
        let rhs: Vec<f64> = r.cosine_coeffs().iter().map(|v| -v).collect();
        let delta = jac.solve(&rhs);

        let mut tau = cfg.damping;
        let mut halvings = 0;
        let (x_new, phi_new, r_new, res_new) = loop {
            let xt: Vec<f64> = x.iter().zip(&delta).map(|(xi, di)| xi + tau * di).collect();
            let (pt, rt) = eval_residual(&xt, &shell, omega, a)?;
            let rs = rt.max_abs();
            if (rs < res && rs.is_finite()) || halvings == config::NEWTON_MAX_HALVINGS {
                break (xt, pt, rt, rs);
            }
            tau *= 0.5;
            halvings += 1;
        };
        let step = PeriodicField::from_cosine_coeffs(grid, &delta)?.norm_l2() * tau;
        debug!("newton {iter}: residual {res:.3e} -> {res_new:.3e}, |step| {step:.3e}, tau {tau}");
        trace.corrections.push(step);
        trace.residuals.push(res_new);
        x = x_new;
        phi = phi_new;
        r = r_new;
        res = res_new;
    }

    let cmax = x.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    trace.tail_ratio = if cmax > 0.0 { x[grid.nyquist()].abs() / cmax } else { 0.0 };
    if trace.tail_ratio >= 1e-10 {
        warn!(
            "spectral tail |c_N/2|/max|c_n| = {:.2e}; refine the grid (N = {})",
            trace.tail_ratio,
            grid.len()
        );
    }
    let wave = WaveSolution { field: phi, omega, a, model: model.clone(), residual_sup: res };
    Ok((wave, trace))
}

/// Nine waves on the stencil `(ω₀ + iδω, A₀ + jδA)`, `i, j ∈ {−1, 0, 1}`.
#[derive(Debug, Clone)]
pub struct SurfacePatch {
    pub center: (f64, f64),
    pub steps: (f64, f64),
    /// `waves[i + 1][j + 1]`.
    pub waves: [[WaveSolution; 3]; 3],
}

impl SurfacePatch {
    pub fn at(&self, i: i32, j: i32) -> &WaveSolution {
        &self.waves[(i + 1) as usize][(j + 1) as usize]
    }
}

/// Solves the 3×3 stencil around `w`, halving both steps (at most 8 times) on failure.
pub fn continue_patch(model: &ModelSpec, w: &WaveSolution, d_omega: f64, d_a: f64) -> Result<SurfacePatch> {
    continue_patch_with(model, w, d_omega, d_a, &NewtonConfig::default())
}

pub fn continue_patch_with(
    model: &ModelSpec,
    w: &WaveSolution,
    d_omega: f64,
    d_a: f64,
    cfg: &NewtonConfig,
) -> Result<SurfacePatch> {
    let (mut dw, mut da) = (d_omega, d_a);
    let mut halvings = 0;
    loop {
        match try_patch(model, w, dw, da, cfg) {
            Ok(waves) => {
                return Ok(SurfacePatch { center: (w.omega, w.a), steps: (dw, da), waves });
            }
            Err(e) if halvings < config::CONTINUATION_MAX_HALVINGS => {
                debug!("stencil failed ({e}); halving steps");
                dw *= 0.5;
                da *= 0.5;
                halvings += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

fn try_patch(
    model: &ModelSpec,
    w: &WaveSolution,
    dw: f64,
    da: f64,
    cfg: &NewtonConfig,
) -> Result<[[WaveSolution; 3]; 3]> {
    let solve = |i: i32, j: i32| -> Result<WaveSolution> {
        if i == 0 && j == 0 {
            return Ok(w.clone());
        }
        let (om, aa) = (w.omega + i as f64 * dw, w.a + j as f64 * da);
        newton_solve(model, om, aa, &w.field, cfg)
            .map_err(|e| WaveError::Continuation { i, j, source: Box::new(e) })
    };
    let row = |i: i32| -> Result<[WaveSolution; 3]> { Ok([solve(i, -1)?, solve(i, 0)?, solve(i, 1)?]) };
    Ok([row(-1)?, row(0)?, row(1)?])
}

/// Natural-parameter continuation from `w` to `(omega, a)` along a straight
/// path in `stages` equal stages, halving the stage length on failure.
pub fn continue_to(
    model: &ModelSpec,
    w: &WaveSolution,
    omega: f64,
    a: f64,
    stages: usize,
    cfg: &NewtonConfig,
) -> Result<WaveSolution> {
    let stages = stages.max(1);
    let mut current = w.clone();
    let (w0, a0) = (w.omega, w.a);
    let mut s = 0.0_f64;
    let mut ds = 1.0 / stages as f64;
    let mut halvings = 0;
    while s < 1.0 {
        let t = (s + ds).min(1.0);
        let (om, aa) = (w0 + t * (omega - w0), a0 + t * (a - a0));
        match newton_solve(model, om, aa, &current.field, cfg) {
            Ok(next) => {
                current = next;
                s = t;
            }
            Err(e) => {
                if halvings >= config::CONTINUATION_MAX_HALVINGS {
                    return Err(e);
                }
                ds *= 0.5;
                halvings += 1;
            }
        }
    }
    Ok(current)
}
