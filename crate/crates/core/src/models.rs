//! Model catalog, the two closed-form wave families and the traveling-wave residual.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::elliptic::{complete_e, complete_k, JacobiEvaluator};
use crate::error::{Result, WaveError};
use crate::spectral::{apply_symbol, FourierSymbol, PeriodicField, PeriodicGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "alpha", rename_all = "snake_case")]
pub enum ModelKind {
    Bbm,
    Rbo,
    FifthOrder,
    Fractional(f64),
}

/// A member of the model family: a named kind plus its dispersion symbol.
#[derive(Debug, Clone, Serialize)]
pub struct ModelSpec {
    kind: ModelKind,
    symbol: FourierSymbol,
}

impl ModelSpec {
    pub fn new(kind: ModelKind) -> Result<Self> {
        let symbol = match kind {
            ModelKind::Bbm => FourierSymbol::bbm(),
            ModelKind::Rbo => FourierSymbol::rbo(),
            ModelKind::FifthOrder => FourierSymbol::fifth(),
            ModelKind::Fractional(alpha) => FourierSymbol::fractional(alpha)?,
        };
        Ok(Self { kind, symbol })
    }

    pub fn bbm() -> Self {
        Self::new(ModelKind::Bbm).expect("catalog symbol")
    }

    pub fn rbo() -> Self {
        Self::new(ModelKind::Rbo).expect("catalog symbol")
    }

    pub fn fifth() -> Self {
        Self::new(ModelKind::FifthOrder).expect("catalog symbol")
    }

    pub fn fractional(alpha: f64) -> Result<Self> {
        Self::new(ModelKind::Fractional(alpha))
    }

    /// A model with an arbitrary symbol, reported under the power-law kind of its growth order.
    pub fn with_symbol(symbol: FourierSymbol) -> Self {
        Self { kind: ModelKind::Fractional(symbol.m1()), symbol }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn symbol(&self) -> &FourierSymbol {
        &self.symbol
    }

    /// Period used by the closed-form family of this model (2π unless rBO).
    pub fn default_period(&self) -> f64 {
        match self.kind {
            ModelKind::Rbo => 4.0 * PI,
            _ => 2.0 * PI,
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ModelKind::Bbm => f.write_str("bbm"),
            ModelKind::Rbo => f.write_str("rbo"),
            ModelKind::FifthOrder => f.write_str("fifth"),
            ModelKind::Fractional(a) => write!(f, "frac:{a}"),
        }
    }
}

impl FromStr for ModelSpec {
    type Err = WaveError;

    /// Accepts `bbm`, `rbo`, `fifth` and `frac:<alpha>`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "bbm" => Ok(Self::bbm()),
            "rbo" => Ok(Self::rbo()),
            "fifth" => Ok(Self::fifth()),
            other => {
                let alpha = other
                    .strip_prefix("frac:")
                    .and_then(|a| a.parse::<f64>().ok())
                    .ok_or_else(|| {
                        WaveError::InvalidConfig(format!(
                            "unknown model `{other}` (expected bbm | rbo | fifth | frac:<alpha>)"
                        ))
                    })?;
                Self::fractional(alpha)
            }
        }
    }
}

/// A traveling wave `φ` with its parameters and residual certificate.
#[derive(Debug, Clone)]
pub struct WaveSolution {
    pub field: PeriodicField,
    pub omega: f64,
    pub a: f64,
    pub model: ModelSpec,
    pub residual_sup: f64,
}

impl WaveSolution {
    /// Wraps a profile and records `sup|ωMφ + (ω−1)φ − φ²/2 + A|`.
    pub fn new(field: PeriodicField, omega: f64, a: f64, model: ModelSpec) -> Result<Self> {
        let r = wave_residual(&field, model.symbol(), omega, a)?;
        Ok(Self { residual_sup: r.max_abs(), field, omega, a, model })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.field.grid()
    }

    /// `ω − 1 − 2A`.
    pub fn gap(&self) -> f64 {
        self.omega - 1.0 - 2.0 * self.a
    }
}

/// `ωMφ + (ω−1)φ − φ²/2 + A`, with a de-aliased square.
pub fn wave_residual(phi: &PeriodicField, symbol: &FourierSymbol, omega: f64, a: f64) -> Result<PeriodicField> {
    let m_phi = apply_symbol(phi, symbol)?;
    let sq = phi.square();
    Ok(m_phi.lin_comb(omega, phi, omega - 1.0).lin_comb(1.0, &sq, -0.5).add_constant(a))
}

pub fn ode_residual(w: &WaveSolution) -> Result<PeriodicField> {
    wave_residual(&w.field, w.model.symbol(), w.omega, w.a)
}

/// Roots `c` of `(ω−1)c − c²/2 + A = 0`, i.e. the constant waves; `None` if complex.
pub fn constant_branch(omega: f64, a: f64) -> Option<(f64, f64)> {
    let disc = (omega - 1.0).powi(2) + 2.0 * a;
    if disc < 0.0 {
        return None;
    }
    let r = disc.sqrt();
    Some((omega - 1.0 - r, omega - 1.0 + r))
}

// ---------------------------------------------------------------------------
// symbol admissibility

#[derive(Debug, Clone, Serialize)]
pub struct SymbolReport {
    pub even: bool,
    pub zero_at_origin: bool,
    pub bounds_ok: bool,
    /// Extremes of `θ(ξ)/|ξ|^{m₁}` over nonzero grid frequencies.
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Ratio normalised to the violated (or nearest) envelope constant; 1 is on the boundary.
    pub worst_ratio: f64,
    pub pass: bool,
}

pub fn validate_symbol(s: &FourierSymbol, grid: &PeriodicGrid) -> SymbolReport {
    const REL: f64 = 1e-12;
    let zero_at_origin = s.evaluate(0.0) == 0.0;
    let mut even = true;
    let (mut min_ratio, mut max_ratio) = (f64::INFINITY, 0.0_f64);
    for n in 1..=grid.nyquist() as i64 {
        let xi = grid.frequency(n);
        let (tp, tm) = (s.evaluate(xi), s.evaluate(-xi));
        if !(tp.is_finite() && tm.is_finite()) || (tp - tm).abs() > REL * tp.abs().max(tm.abs()) {
            even = false;
        }
        let ratio = tp / xi.abs().powf(s.m1());
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
    }
    let lo = min_ratio / s.upsilon1();
    let hi = max_ratio / s.upsilon2();
    let bounds_ok = lo >= 1.0 - REL && hi <= 1.0 + REL;
    let worst_ratio = if 1.0 / lo >= hi { lo } else { hi };
    SymbolReport {
        even,
        zero_at_origin,
        bounds_ok,
        min_ratio,
        max_ratio,
        worst_ratio,
        pass: even && zero_at_origin && bounds_ok,
    }
}

// ---------------------------------------------------------------------------
// fifth-order dnoidal family (L0 = 2π)

/// Which integration constant accompanies the dnoidal profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum IntegrationConstant {
    /// The value that makes the profile an exact solution.
    #[default]
    Consistent,
    /// `(23184ω²K⁸ − π⁸(ω−1)²)/π⁸`, twice the consistent value.
    Doubled,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FifthOrderCoefficients {
    pub omega: f64,
    pub k0: f64,
    pub big_k: f64,
    pub big_e: f64,
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub a0_doubled: f64,
    pub a0: f64,
}

impl FifthOrderCoefficients {
    pub fn new(omega: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(WaveError::Domain(format!("fifth-order wave needs omega > 0, got {omega}")));
        }
        let k0 = std::f64::consts::FRAC_1_SQRT_2;
        let big_k = complete_k(k0)?;
        let big_e = complete_e(k0)?;
        let (p4, k4) = (PI.powi(4), big_k.powi(4));
        let a = (-28.0 * k4 * omega + p4 * (omega - 1.0)) / p4;
        let b = -1680.0 * omega * k4 / p4;
        let d = -b;
        let a0_doubled = (23184.0 * omega * omega * k4 * k4 - p4 * p4 * (omega - 1.0).powi(2)) / (p4 * p4);
        Ok(Self { omega, k0, big_k, big_e, a, b, d, a0_doubled, a0: 0.5 * a0_doubled })
    }

    pub fn integration_constant(&self, which: IntegrationConstant) -> f64 {
        match which {
            IntegrationConstant::Consistent => self.a0,
            IntegrationConstant::Doubled => self.a0_doubled,
        }
    }

    /// Profile value at `x`.
    pub fn profile(&self, jac: &JacobiEvaluator, x: f64) -> f64 {
        let k2 = self.k0 * self.k0;
        let ek = self.big_e / self.big_k;
        let dn2 = jac.dn(self.big_k * x / PI).powi(2);
        self.a
            + self.b * (dn2 - ek)
            + self.d * (dn2 * dn2 - (2.0 - k2) * 2.0 * ek / 3.0 + (1.0 - k2) / 3.0)
    }
}

/// Dnoidal wave of the `θ = ξ⁴` model on `[0, 2π)` with the consistent constant.
pub fn fifth_order_wave(omega: f64, n: usize) -> Result<WaveSolution> {
    fifth_order_wave_with(omega, n, IntegrationConstant::Consistent)
}

pub fn fifth_order_wave_with(omega: f64, n: usize, which: IntegrationConstant) -> Result<WaveSolution> {
    let coef = FifthOrderCoefficients::new(omega)?;
    let grid = PeriodicGrid::new(2.0 * PI, n)?;
    let jac = JacobiEvaluator::new(coef.k0)?;
    let field = PeriodicField::from_fn(grid, |x| coef.profile(&jac, x));
    WaveSolution::new(field, omega, coef.integration_constant(which), ModelSpec::fifth())
}

/// Three views of the cosine coefficients `c_0..=c_{n_max}` of the dnoidal wave.
#[derive(Debug, Clone, Serialize)]
pub struct FifthOrderSpectrum {
    /// `c_0 = a`, `c_n = (γ(n)/2)·n·csch(nπ)`, `γ(n) = 560ωKn² + 1680ωK²/π²`.
    pub gamma_form: Vec<f64>,
    /// `c_0 = a`, `c_n = 140ω·n³·csch(nπ)` (exact two-sided coefficients).
    pub derived: Vec<f64>,
    /// Discrete transform of the sampled profile.
    pub transform: Vec<f64>,
    pub gamma_form_deviation: f64,
    pub derived_deviation: f64,
}

pub fn fifth_order_fourier_coefficients(omega: f64, n_max: usize) -> Result<FifthOrderSpectrum> {
    if n_max < 1 {
        return Err(WaveError::InvalidConfig("n_max must be at least 1".into()));
    }
    let coef = FifthOrderCoefficients::new(omega)?;
    let points = (4 * n_max).next_power_of_two().max(256);
    let w = fifth_order_wave(omega, points)?;
    let transform: Vec<f64> = (0..=n_max as i64).map(|n| w.field.coeff(n).re).collect();
    let csch = |x: f64| 1.0 / x.sinh();
    let k = coef.big_k;
    let mut gamma_form = vec![coef.a];
    let mut derived = vec![coef.a];
    for n in 1..=n_max {
        let nf = n as f64;
        let gamma = 560.0 * omega * k * nf * nf + 1680.0 * omega * k * k / (PI * PI);
        gamma_form.push(0.5 * gamma * nf * csch(nf * PI));
        derived.push(140.0 * omega * nf.powi(3) * csch(nf * PI));
    }
    let dev = |v: &[f64]| v.iter().zip(&transform).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(FifthOrderSpectrum {
        gamma_form_deviation: dev(&gamma_form),
        derived_deviation: dev(&derived),
        gamma_form,
        derived,
        transform,
    })
}

// ---------------------------------------------------------------------------
// regularized Benjamin–Ono family (L0 = 4π)

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RboParameters {
    pub omega0: f64,
    pub eta: f64,
}

impl RboParameters {
    pub fn new(omega0: f64) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > 2.0 + 1e-8) {
            return Err(WaveError::Domain(format!("rBO wave needs omega > 2, got {omega0}")));
        }
        let eta = (omega0 / (2.0 * (omega0 - 1.0))).atanh();
        Ok(Self { omega0, eta })
    }

    /// Geometric decay `c_{n+1}/c_n = e^{−η}`.
    pub fn decay_ratio(&self) -> f64 {
        (-self.eta).exp()
    }

    pub fn profile(&self, x: f64) -> f64 {
        self.omega0 * self.eta.sinh() / (self.eta.cosh() - (0.5 * x).cos())
    }

    /// `max φ = φ(0)`.
    pub fn peak(&self) -> f64 {
        self.omega0 * self.eta.sinh() / (self.eta.cosh() - 1.0)
    }

    /// Exact two-sided coefficient `c_n = ω e^{−|n|η}`.
    pub fn coefficient(&self, n: i64) -> f64 {
        self.omega0 * (-(n.unsigned_abs() as f64) * self.eta).exp()
    }
}

/// Explicit `|ξ|`-model wave on `[0, 4π)` with `A = 0`.
pub fn rbo_wave(omega0: f64, n: usize) -> Result<WaveSolution> {
    let p = RboParameters::new(omega0)?;
    let grid = PeriodicGrid::new(4.0 * PI, n)?;
    let field = PeriodicField::from_fn(grid, |x| p.profile(x));
    WaveSolution::new(field, omega0, 0.0, ModelSpec::rbo())
}
