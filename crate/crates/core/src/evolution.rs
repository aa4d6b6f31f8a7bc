//! RK4 time stepping of `u_t = −(1 + θ)^{-1}∂ₓ(u + u²/2)` and perturbation experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::config;
use crate::error::{Result, WaveError};
use crate::models::WaveSolution;
use crate::spectral::fft;
use crate::spectral::{
    functional_f, functional_m, functional_p, orbital_distance, symbol_values, FourierSymbol, PeriodicField,
    PeriodicGrid,
};
use crate::stability::lyapunov_values;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EvolveConfig {
    pub dt: f64,
    pub t_final: f64,
    /// Monitor every `record_every` steps (the initial and final states are always recorded).
    pub record_every: usize,
}

impl EvolveConfig {
    pub fn new(dt: f64, t_final: f64, record_every: usize) -> Self {
        Self { dt, t_final, record_every }
    }

    fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }
}

/// `0.5 / max_n |ξ_n|(1 + max|u₀|)/(1 + θ(ξ_n))`.
pub fn dt_max(u0: &PeriodicField, s: &FourierSymbol) -> Result<f64> {
    let theta = symbol_values(u0, s)?;
    let amp = 1.0 + u0.max_abs();
    let rate = u0
        .grid()
        .frequencies()
        .iter()
        .zip(&theta)
        .map(|(xi, t)| xi.abs() * amp / (1.0 + t))
        .fold(0.0_f64, f64::max);
    Ok(if rate > 0.0 { 0.5 / rate } else { f64::INFINITY })
}

/// The right-hand side in coefficient space: `ĉ_n ↦ −iξ_n(c_n + (u²/2)_n)/(1 + θ_n)`.
#[derive(Debug, Clone)]
pub struct Dynamics {
    grid: PeriodicGrid,
    factor: Vec<Complex64>,
}

impl Dynamics {
    pub fn new(grid: PeriodicGrid, s: &FourierSymbol) -> Result<Self> {
        let probe = PeriodicField::zeros(grid);
        let theta = symbol_values(&probe, s)?;
        let half = grid.nyquist();
        let factor = (0..grid.len())
            .map(|k| {
                if k == half {
                    Complex64::new(0.0, 0.0)
                } else {
                    let xi = grid.frequency(grid.mode_of(k));
                    Complex64::new(0.0, -xi / (1.0 + theta[k]))
                }
            })
            .collect();
        Ok(Self { grid, factor })
    }

    pub fn eval(&self, c: &[Complex64]) -> Vec<Complex64> {
        let n = c.len();
        let m = 2 * n;
        let v = fft::inverse_real(&fft::pad(c, m));
        let sq: Vec<f64> = v.iter().map(|x| 0.5 * x * x).collect();
        let sq = fft::truncate(&fft::forward_real(&sq), n);
        (0..n).map(|k| self.factor[k] * (c[k] + sq[k])).collect()
    }
}

/// `u_t` for the field `u`.
pub fn rhs(u: &PeriodicField, s: &FourierSymbol) -> Result<PeriodicField> {
    let d = Dynamics::new(*u.grid(), s)?;
    PeriodicField::from_coeffs(*u.grid(), d.eval(u.coeffs()))
}

/// Classical RK4 on the coefficient vector.
#[derive(Debug, Clone)]
pub struct Integrator {
    dynamics: Dynamics,
    coeffs: Vec<Complex64>,
    time: f64,
}

impl Integrator {
    pub fn new(u0: &PeriodicField, s: &FourierSymbol) -> Result<Self> {
        Ok(Self { dynamics: Dynamics::new(*u0.grid(), s)?, coeffs: u0.coeffs().to_vec(), time: 0.0 })
    }

    /// One step of size `dt` (negative `dt` integrates backwards).
    pub fn step(&mut self, dt: f64) {
        let c = &self.coeffs;
        let axpy = |a: &[Complex64], b: &[Complex64], h: f64| -> Vec<Complex64> {
            a.iter().zip(b).map(|(x, y)| x + y * h).collect()
        };
        let k1 = self.dynamics.eval(c);
        let k2 = self.dynamics.eval(&axpy(c, &k1, 0.5 * dt));
        let k3 = self.dynamics.eval(&axpy(c, &k2, 0.5 * dt));
        let k4 = self.dynamics.eval(&axpy(c, &k3, dt));
        let h6 = dt / 6.0;
        for i in 0..c.len() {
            self.coeffs[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * h6;
        }
        self.time += dt;
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn field(&self) -> PeriodicField {
        PeriodicField::from_coeffs(self.dynamics.grid, self.coeffs.clone()).expect("grid-sized coefficients")
    }
}

/// What to monitor besides the conserved functionals.
#[derive(Debug, Clone)]
pub struct Reference<'a> {
    pub wave: &'a WaveSolution,
    /// Sobolev index of the orbital distance (usually `m₁/2`).
    pub sobolev_s: f64,
    /// `(x₀, y₀, N)` for the Lyapunov functional, if wanted.
    pub lyapunov: Option<(f64, f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryStats {
    pub times: Vec<f64>,
    pub p_series: Vec<f64>,
    pub f_series: Vec<f64>,
    pub m_series: Vec<f64>,
    /// Maximum relative deviations from the initial values.
    pub drift_p: f64,
    pub drift_f: f64,
    pub drift_m: f64,
    pub rho_series: Vec<f64>,
    pub v_series: Option<Vec<f64>>,
}

impl TrajectoryStats {
    pub fn max_rho(&self) -> f64 {
        self.rho_series.iter().copied().fold(0.0, f64::max)
    }

    /// `max ρ / ρ(0)`.
    pub fn amplification(&self) -> f64 {
        self.rho_series.first().map_or(f64::NAN, |r0| self.max_rho() / r0)
    }

    /// `max|V(t) − V(0)| / |V(0)|`.
    pub fn v_variation(&self) -> Option<f64> {
        let v = self.v_series.as_ref()?;
        let v0 = *v.first()?;
        Some(v.iter().map(|x| (x - v0).abs()).fold(0.0, f64::max) / v0.abs())
    }
}

fn drift(series: &[f64]) -> f64 {
    let x0 = series[0];
    let dev = series.iter().map(|x| (x - x0).abs()).fold(0.0, f64::max);
    if x0 != 0.0 {
        dev / x0.abs()
    } else {
        dev
    }
}

pub fn evolve(u0: &PeriodicField, s: &FourierSymbol, cfg: &EvolveConfig) -> Result<(TrajectoryStats, PeriodicField)> {
    evolve_monitored(u0, s, cfg, None)
}

pub fn evolve_monitored(
    u0: &PeriodicField,
    s: &FourierSymbol,
    cfg: &EvolveConfig,
    reference: Option<&Reference<'_>>,
) -> Result<(TrajectoryStats, PeriodicField)> {
    if !(cfg.dt > 0.0 && cfg.t_final > 0.0 && cfg.record_every > 0) {
        return Err(WaveError::InvalidConfig("dt, T and record_every must be positive".into()));
    }
    let bound = dt_max(u0, s)?;
    if cfg.dt > bound {
        return Err(WaveError::InvalidConfig(format!("dt = {} exceeds the stability bound {bound:.4e}", cfg.dt)));
    }
    if let Some(r) = reference {
        u0.same_grid(&r.wave.field)?;
    }
    let mut stats = TrajectoryStats {
        times: Vec::new(),
        p_series: Vec::new(),
        f_series: Vec::new(),
        m_series: Vec::new(),
        drift_p: 0.0,
        drift_f: 0.0,
        drift_m: 0.0,
        rho_series: Vec::new(),
        v_series: reference.and_then(|r| r.lyapunov).map(|_| Vec::new()),
    };
    let record = |stats: &mut TrajectoryStats, t: f64, u: &PeriodicField| -> Result<()> {
        stats.times.push(t);
        stats.p_series.push(functional_p(u, s)?);
        stats.f_series.push(functional_f(u, s)?);
        stats.m_series.push(functional_m(u));
        if let Some(r) = reference {
            stats.rho_series.push(orbital_distance(u, &r.wave.field, r.sobolev_s)?.0);
            if let (Some((x0, y0, n)), Some(vs)) = (r.lyapunov, stats.v_series.as_mut()) {
                vs.push(lyapunov_values(u, r.wave, x0, y0, n)?.v);
            }
        }
        Ok(())
    };

    let mut integ = Integrator::new(u0, s)?;
    record(&mut stats, 0.0, u0)?;
    let steps = cfg.steps();
    for k in 1..=steps {
        integ.step(cfg.dt);
        if k % cfg.record_every == 0 || k == steps {
            if !integ.is_finite() {
                return Err(WaveError::BlowUp { time: integ.time() });
            }
            let u = integ.field();
            record(&mut stats, k as f64 * cfg.dt, &u)?;
        }
    }
    if !integ.is_finite() {
        return Err(WaveError::BlowUp { time: integ.time() });
    }
    stats.drift_p = drift(&stats.p_series);
    stats.drift_f = drift(&stats.f_series);
    stats.drift_m = drift(&stats.m_series);
    Ok((stats, integ.field()))
}

/// Evolves `φ + eps·perturbation` (with `‖perturbation‖_{L²} = 1`) and tracks
/// `ρ(u(t), φ)` in `H^{m₁/2}` together with the Lyapunov functional.
pub fn stability_experiment(
    w: &WaveSolution,
    eps: f64,
    cfg: &EvolveConfig,
    perturbation: &PeriodicField,
) -> Result<TrajectoryStats> {
    if !(eps >= 0.0) {
        return Err(WaveError::InvalidConfig(format!("eps must be non-negative, got {eps}")));
    }
    let norm = perturbation.norm_l2();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(WaveError::InvalidConfig(format!("perturbation must have unit norm, got {norm}")));
    }
    let gap = w.gap();
    let lyapunov = if gap.abs() > config::GAP_TOL * w.omega.abs().max(1.0) {
        Some((-w.omega / gap, 1.0, config::LYAPUNOV_N))
    } else {
        None
    };
    let reference = Reference { wave: w, sobolev_s: 0.5 * w.model.symbol().m1(), lyapunov };
    let u0 = w.field.lin_comb(1.0, perturbation, eps);
    evolve_monitored(&u0, w.model.symbol(), cfg, Some(&reference)).map(|(s, _)| s)
}

/// Smooth random perturbation with unit `L²` norm: modes `1..=modes`, independent
/// cosine and sine amplitudes uniform in `[−1, 1]` damped by `1/n²`.
pub fn random_perturbation(grid: PeriodicGrid, seed: u64, modes: usize) -> PeriodicField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.len();
    let kmax = modes.min(grid.nyquist() - 1).max(1);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for k in 1..=kmax {
        let damp = 1.0 / (k * k) as f64;
        let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * damp;
        coeffs[k] = c;
        coeffs[n - k] = c.conj();
    }
    let f = PeriodicField::from_coeffs(grid, coeffs).expect("grid-sized coefficients");
    let norm = f.norm_l2();
    f.scale(1.0 / norm)
}
