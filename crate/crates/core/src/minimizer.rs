//! Constrained minimization of `B(u) = ½∫(ω₀uMu + (ω₀−1)u²)` on `{∫u³ = γ}`.

use std::f64::consts::PI;

use log::{debug, info};
use serde::Serialize;

use crate::config;
use crate::error::{Result, WaveError};
use crate::models::{ModelKind, ModelSpec, WaveSolution};
use crate::solver::{newton_solve, NewtonConfig};
use crate::spectral::{orbital_distance, symbol_values, PeriodicField, PeriodicGrid};

#[derive(Debug, Clone, Serialize)]
pub struct MinimizerConfig {
    pub model: ModelSpec,
    pub omega0: f64,
    pub gamma: f64,
    pub points: usize,
    pub period: f64,
    pub max_iter: usize,
    /// Stop when `‖projected gradient‖ ≤ grad_tol·‖B′(u)‖`.
    pub grad_tol: f64,
    /// Measure gradients in the metric induced by `B` itself (spectrally
    /// preconditioned descent) instead of `L²`.
    pub preconditioned: bool,
}

impl MinimizerConfig {
    pub fn new(model: ModelSpec, omega0: f64, gamma: f64, points: usize, period: f64) -> Self {
        Self {
            model,
            omega0,
            gamma,
            points,
            period,
            max_iter: config::MINIMIZER_MAX_ITER,
            grad_tol: config::MINIMIZER_GRAD_TOL,
            preconditioned: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.omega0 > 1.0 && self.omega0.is_finite()) {
            return Err(WaveError::InvalidConfig(format!("omega0 must exceed 1, got {}", self.omega0)));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(WaveError::InvalidConfig(format!("gamma must be positive, got {}", self.gamma)));
        }
        if !(self.grad_tol > 0.0) {
            return Err(WaveError::InvalidConfig("grad_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    /// `B` decreased by less than `1e−16·|B|` for 50 consecutive iterations.
    Stagnated,
    MaxIterations,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IterateRecord {
    pub iteration: usize,
    pub b: f64,
    pub constraint_residual: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone)]
pub struct MinimizerResult {
    /// Newton-polished wave at `(ω₀, A = 0)`.
    pub wave: WaveSolution,
    /// Descent limit on `{∫u³ = γ}`.
    pub raw: PeriodicField,
    /// Euler–Lagrange multiplier `C` of `B′(u) = C·u²` at the descent limit.
    pub multiplier: f64,
    pub history: Vec<IterateRecord>,
    pub termination: Termination,
    /// `ρ(2C·u, polished)/‖polished‖`.
    pub polish_distance: f64,
}

/// `B(u) = ½∫(ω₀uMu + (ω₀−1)u²)`.
pub fn functional_b(u: &PeriodicField, model: &ModelSpec, omega0: f64) -> Result<f64> {
    let theta = symbol_values(u, model.symbol())?;
    let s: f64 = u
        .coeffs()
        .iter()
        .zip(&theta)
        .map(|(c, t)| (omega0 * t + omega0 - 1.0) * c.norm_sqr())
        .sum();
    Ok(0.5 * u.grid().period() * s)
}

/// `1 + cos(2πx/L₀)`.
pub fn default_seed(grid: PeriodicGrid) -> PeriodicField {
    let k = 2.0 * PI / grid.period();
    PeriodicField::from_fn(grid, |x| 1.0 + (k * x).cos())
}

fn rescale(u: &PeriodicField, gamma: f64) -> Result<PeriodicField> {
    let c = u.cube_integral();
    if !(c > 0.0) {
        return Err(WaveError::BadSeed(format!("cubic integral {c:.3e} is not positive")));
    }
    Ok(u.scale((gamma / c).cbrt()))
}

/// Projected descent on `B` with post-step cubic rescaling, then a Newton polish.
pub fn minimize_constrained(cfg: &MinimizerConfig, seed: Option<&PeriodicField>) -> Result<MinimizerResult> {
    cfg.validate()?;
    let grid = PeriodicGrid::new(cfg.period, cfg.points)?;
    let seed = match seed {
        Some(s) => {
            if *s.grid() != grid {
                return Err(WaveError::GridMismatch);
            }
            s.clone()
        }
        None => default_seed(grid),
    };
    if !seed.is_finite() {
        return Err(WaveError::BadSeed("non-finite seed".into()));
    }
    let om = cfg.omega0;
    let theta = symbol_values(&seed, cfg.model.symbol())?;
    let weight: Vec<f64> = theta.iter().map(|t| om * t + om - 1.0).collect();
    let theta_max = theta.iter().fold(0.0_f64, |m, t| m.max(*t));

    // B′(u) = ω₀Mu + (ω₀−1)u; preconditioner P = (ω₀θ + ω₀ − 1)^{-1}.
    let grad_b = |u: &PeriodicField| u.map_coeffs(|n, _, c| c * weight[grid.slot_of(n).unwrap()]);
    let precond = |u: &PeriodicField| u.map_coeffs(|n, _, c| c / weight[grid.slot_of(n).unwrap()]);

    let mut u = rescale(&seed.even_part(), cfg.gamma)?;
    let mut b = functional_b(&u, &cfg.model, om)?;
    let base_step = if cfg.preconditioned { 1.0 } else { 1.0 / (om * (1.0 + theta_max)) };
    let mut history = Vec::new();
    let mut termination = Termination::MaxIterations;
    let mut flat = 0;

    for iter in 0..=cfg.max_iter {
        let g = grad_b(&u);
        let u2 = u.square();
        // Tangent projection: remove the component along ∇∫u³ ∝ u².
        let (dir, grad_norm) = if cfg.preconditioned {
            let pu2 = precond(&u2);
            let mu = g.inner(&pu2) / u2.inner(&pu2);
            let gp = g.lin_comb(1.0, &u2, -mu);
            let d = precond(&gp);
            (d.scale(-1.0), gp.norm_l2() / g.norm_l2())
        } else {
            let mu = g.inner(&u2) / u2.inner(&u2);
            let gp = g.lin_comb(1.0, &u2, -mu);
            (gp.scale(-1.0), gp.norm_l2() / g.norm_l2())
        };
        history.push(IterateRecord {
            iteration: iter,
            b,
            constraint_residual: (u.cube_integral() - cfg.gamma).abs() / cfg.gamma,
            grad_norm,
        });
        if grad_norm <= cfg.grad_tol {
            termination = Termination::Converged;
            break;
        }
        if iter == cfg.max_iter {
            break;
        }

        let mut tau = base_step;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = u.lin_comb(1.0, &dir, tau).even_part();
            if let Ok(trial) = rescale(&trial, cfg.gamma) {
                let bt = functional_b(&trial, &cfg.model, om)?;
                if bt <= b {
                    accepted = Some((trial, bt));
                    break;
                }
            }
            tau *= 0.5;
        }
        let Some((next, bn)) = accepted else {
            termination = Termination::Stagnated;
            break;
        };
        if b - bn < 1e-16 * b.abs() {
            flat += 1;
        } else {
            flat = 0;
        }
        u = next;
        b = bn;
        if flat >= config::MINIMIZER_STAGNATION_WINDOW {
            termination = Termination::Stagnated;
            break;
        }
    }
    debug!("descent finished after {} iterations: {:?}", history.len() - 1, termination);

    // B′(u) = C u² ⇒ φ = 2C·u solves the A = 0 profile equation.
    let g = grad_b(&u);
    let u2 = u.square();
    let multiplier = g.inner(&u2) / u2.inner(&u2);
    let seed_wave = u.scale(2.0 * multiplier);
    let wave = newton_solve(&cfg.model, om, 0.0, &seed_wave, &NewtonConfig::default())?;
    let (dist, _) = orbital_distance(&seed_wave, &wave.field, 0.0)?;
    let polish_distance = dist / wave.field.norm_l2();
    info!(
        "minimizer: {:?} after {} iterations, C = {multiplier:.6}, polish distance {polish_distance:.3e}",
        termination,
        history.len() - 1
    );
    Ok(MinimizerResult { wave, raw: u, multiplier, history, termination, polish_distance })
}

/// `γ > 2(ω₀−1)L₀`.
pub fn gamma_threshold_check(gamma: f64, omega0: f64, period: f64) -> bool {
    gamma > 2.0 * (omega0 - 1.0) * period
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PoincareCheck {
    /// `∫φ³`.
    pub lhs: f64,
    /// `16πω₀(ω₀−1)²`.
    pub rhs: f64,
    pub holds: bool,
    pub ratio: f64,
}

/// Lower bound `∫φ³ ≥ 16πω₀(ω₀−1)²` for `|ξ|`-model waves with `L₀ = 4π`, `A = 0`.
pub fn poincare_bound_check(w: &WaveSolution) -> Result<PoincareCheck> {
    if w.model.kind() != ModelKind::Rbo || (w.grid().period() - 4.0 * PI).abs() > 1e-12 || w.a != 0.0 {
        return Err(WaveError::Domain("bound applies to rbo waves with L0 = 4*pi and A = 0".into()));
    }
    let lhs = w.field.cube_integral();
    let om = w.omega;
    let rhs = 16.0 * PI * om * (om - 1.0).powi(2);
    Ok(PoincareCheck { lhs, rhs, holds: lhs >= rhs, ratio: lhs / rhs })
}
