use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Result, WaveError};

/// Uniform collocation grid on one period `[0, L0)`.
///
/// Nodes are `x_j = j·L0/N`; the represented Fourier modes are
/// `n = −N/2+1 ..= N/2` with physical frequencies `ξ_n = 2πn/L0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodicGrid {
    period: f64,
    points: usize,
}

impl PeriodicGrid {
    pub fn new(period: f64, points: usize) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(WaveError::InvalidGrid(format!("period must be positive, got {period}")));
        }
        if points < 8 || points % 2 != 0 {
            return Err(WaveError::InvalidGrid(format!(
                "point count must be even and at least 8, got {points}"
            )));
        }
        Ok(Self { period, points })
    }

    #[inline]
    pub fn period(&self) -> f64 {
        self.period
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Highest represented mode, `N/2`.
    #[inline]
    pub fn nyquist(&self) -> usize {
        self.points / 2
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.period / self.points as f64
    }

    #[inline]
    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.node(j)).collect()
    }

    /// Signed mode number stored in FFT slot `k`.
    #[inline]
    pub fn mode_of(&self, k: usize) -> i64 {
        super::fft::mode_of(k, self.points)
    }

    /// FFT slot holding mode `n`, if it is represented.
    pub fn slot_of(&self, n: i64) -> Option<usize> {
        let half = self.nyquist() as i64;
        if n > half || n <= -half {
            None
        } else if n >= 0 {
            Some(n as usize)
        } else {
            Some((self.points as i64 + n) as usize)
        }
    }

    /// Physical frequency `ξ_n = 2πn/L0`.
    #[inline]
    pub fn frequency(&self, n: i64) -> f64 {
        2.0 * PI * n as f64 / self.period
    }

    /// Frequencies in FFT slot order.
    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.frequency(self.mode_of(k))).collect()
    }

    /// Same period with a different point count.
    pub fn with_points(&self, points: usize) -> Result<Self> {
        Self::new(self.period, points)
    }
}
