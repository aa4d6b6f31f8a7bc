use std::cell::RefCell;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Discrete transform with the `c_n = (1/N) Σ_j f_j e^{-2πi jn/N}` normalization.
pub(crate) fn forward_real(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n).process(&mut buf));
    let scale = 1.0 / n as f64;
    for c in &mut buf {
        *c *= scale;
    }
    buf
}

/// Synthesis `f_j = Σ_n c_n e^{2πi jn/N}`; returns the real part.
pub(crate) fn inverse_real(coeffs: &[Complex64]) -> Vec<f64> {
    let n = coeffs.len();
    let mut buf = coeffs.to_vec();
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n).process(&mut buf));
    buf.into_iter().map(|c| c.re).collect()
}

/// Signed mode number of FFT slot `k` on an `n`-point grid (range −n/2+1..=n/2).
#[inline]
pub(crate) fn mode_of(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Zero-pads `coeffs` (length n) to length `m`, splitting the Nyquist coefficient.
pub(crate) fn pad(coeffs: &[Complex64], m: usize) -> Vec<Complex64> {
    let n = coeffs.len();
    let half = n / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    out[0] = coeffs[0];
    for k in 1..half {
        out[k] = coeffs[k];
        out[m - k] = coeffs[n - k];
    }
    let nyq = coeffs[half] * 0.5;
    out[half] += nyq;
    out[m - half] += nyq;
    out
}

/// Inverse of [`pad`]: keeps |mode| < n/2 and folds the two ±n/2 modes together.
pub(crate) fn truncate(padded: &[Complex64], n: usize) -> Vec<Complex64> {
    let m = padded.len();
    let half = n / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    out[0] = padded[0];
    for k in 1..half {
        out[k] = padded[k];
        out[n - k] = padded[m - k];
    }
    out[half] = padded[half] + padded[m - half];
    out
}
