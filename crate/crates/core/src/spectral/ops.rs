use rustfft::num_complex::Complex64;

use super::fft;
use super::field::PeriodicField;
use super::symbol::FourierSymbol;
use crate::error::{Result, WaveError};

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Symbol values `θ(ξ_n)` in FFT slot order, rejecting non-finite entries.
pub fn symbol_values(f: &PeriodicField, s: &FourierSymbol) -> Result<Vec<f64>> {
    let grid = f.grid();
    (0..grid.len())
        .map(|k| {
            let xi = grid.frequency(grid.mode_of(k));
            let t = s.evaluate(xi);
            if t.is_finite() {
                Ok(t)
            } else {
                Err(WaveError::InvalidSymbol {
                    name: s.name().to_string(),
                    reason: format!("non-finite value {t} at frequency {xi}"),
                })
            }
        })
        .collect()
}

/// `Mf`, i.e. coefficients `θ(ξ_n)·c_n`.
pub fn apply_symbol(f: &PeriodicField, s: &FourierSymbol) -> Result<PeriodicField> {
    let theta = symbol_values(f, s)?;
    let coeffs = f.coeffs().iter().zip(&theta).map(|(c, t)| c * *t).collect();
    PeriodicField::from_coeffs(*f.grid(), coeffs)
}

/// `(L0·Σ (1 + ξ_n²)^s |c_n|²)^{1/2}`.
pub fn sobolev_norm(f: &PeriodicField, s: f64) -> f64 {
    let grid = f.grid();
    let sum: f64 = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let xi = grid.frequency(grid.mode_of(k));
            sobolev_weight(xi, s) * c.norm_sqr()
        })
        .sum();
    (grid.period() * sum).sqrt()
}

#[inline]
fn sobolev_weight(xi: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else {
        (1.0 + xi * xi).powf(s)
    }
}

/// `∫ f·Mf dx`.
pub fn quadratic_form(f: &PeriodicField, s: &FourierSymbol) -> Result<f64> {
    let theta = symbol_values(f, s)?;
    let sum: f64 = f.coeffs().iter().zip(&theta).map(|(c, t)| t * c.norm_sqr()).sum();
    Ok(f.grid().period() * sum)
}

/// `P(f) = ½∫(fMf − f³/3)`.
pub fn functional_p(f: &PeriodicField, s: &FourierSymbol) -> Result<f64> {
    Ok(0.5 * (quadratic_form(f, s)? - f.cube_integral() / 3.0))
}

/// `F(f) = ½∫(fMf + f²)`.
pub fn functional_f(f: &PeriodicField, s: &FourierSymbol) -> Result<f64> {
    Ok(0.5 * (quadratic_form(f, s)? + f.inner(f)))
}

/// `M(f) = ∫f`.
pub fn functional_m(f: &PeriodicField) -> f64 {
    f.integral()
}

/// Shift-scan oversampling factor: the fastest mode gets `2·SHIFT_OVERSAMPLING` samples per period.
const SHIFT_OVERSAMPLING: usize = 8;
/// Competing wells of `ρ²(y)` refined before taking the best.
const SHIFT_CANDIDATES: usize = 4;

/// Translation-minimised distance `min_y ‖u − v(·+y)‖_{H^s}`.
///
/// Returns `(ρ, y*)` with `y* ∈ [0, L0)`. The cross-correlation is scanned on an
/// oversampled shift grid; the best few local minima of `ρ²` are refined by
/// golden section on the adjacent cells and polished with safeguarded Newton
/// steps on `d/dy ρ²`.
pub fn orbital_distance(u: &PeriodicField, v: &PeriodicField, s: f64) -> Result<(f64, f64)> {
    u.same_grid(v)?;
    let grid = *u.grid();
    let n = grid.len();
    let period = grid.period();
    let half = grid.nyquist();

    let weights: Vec<f64> = grid.frequencies().iter().map(|&xi| sobolev_weight(xi, s)).collect();
    let xis = grid.frequencies();
    let uc = u.coeffs();
    let vc = v.coeffs();

    // Cross term g(y) = Σ w conj(u_n) v_n e^{iξ_n y} at y_j = j·L0/m via one padded inverse FFT.
    let m = SHIFT_OVERSAMPLING * n;
    let cross: Vec<Complex64> = (0..n).map(|k| uc[k].conj() * vc[k] * weights[k]).collect();
    let g = fft::inverse_real(&fft::pad(&cross, m));
    let mut peaks: Vec<usize> = (0..m).filter(|&j| g[j] >= g[(j + m - 1) % m] && g[j] >= g[(j + 1) % m]).collect();
    peaks.sort_by(|&a, &b| g[b].total_cmp(&g[a]));
    peaks.truncate(SHIFT_CANDIDATES);

    let dist2 = |y: f64| -> f64 {
        let mut acc = 0.0;
        for k in 0..n {
            let shifted = if k == half {
                vc[k] * (xis[k] * y).cos()
            } else {
                vc[k] * Complex64::from_polar(1.0, xis[k] * y)
            };
            acc += weights[k] * (uc[k] - shifted).norm_sqr();
        }
        period * acc
    };

    let h = period / m as f64;
    let tol = 1e-12 * period;
    let refine = |y0: f64| -> (f64, f64) {
        let (mut a, mut b) = (y0 - h, y0 + h);
        let mut c = b - GOLDEN * (b - a);
        let mut d = a + GOLDEN * (b - a);
        let (mut fc, mut fd) = (dist2(c), dist2(d));
        while (b - a).abs() > tol {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - GOLDEN * (b - a);
                fc = dist2(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + GOLDEN * (b - a);
                fd = dist2(d);
            }
        }
        let mut y = 0.5 * (a + b);
        let mut fy = dist2(y);
        let f0 = dist2(y0);
        if f0 < fy {
            y = y0;
            fy = f0;
        }

        // Newton polish: ρ²(y) = L0 Σ w |u_n − v_n e^{iξy}|².
        for _ in 0..4 {
            let (mut d1, mut d2) = (0.0, 0.0);
            for k in 0..n {
                if k == half {
                    continue;
                }
                let e = vc[k] * Complex64::from_polar(1.0, xis[k] * y);
                let r = uc[k] - e;
                let de = e * Complex64::new(0.0, xis[k]);
                let dde = -e * (xis[k] * xis[k]);
                d1 += -2.0 * weights[k] * (r.conj() * de).re;
                d2 += 2.0 * weights[k] * (de.norm_sqr() - (r.conj() * dde).re);
            }
            if !(d2 > 0.0) {
                break;
            }
            let step = d1 / d2;
            if !step.is_finite() || step.abs() > h {
                break;
            }
            let yn = y - step;
            let fn_ = dist2(yn);
            if fn_ <= fy {
                y = yn;
                fy = fn_;
            } else {
                break;
            }
        }
        (y, fy)
    };

    let (y, fy) = peaks
        .iter()
        .map(|&j| refine(j as f64 * h))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("a periodic sequence has a maximum");

    let y_star = y.rem_euclid(period);
    let y_star = if y_star >= period { 0.0 } else { y_star };
    Ok((fy.max(0.0).sqrt(), y_star))
}
