use std::ops::{Add, Mul, Neg, Sub};

use rustfft::num_complex::Complex64;

use super::fft;
use super::grid::PeriodicGrid;
use crate::error::{Result, WaveError};

/// A real `L0`-periodic function held both as collocation values and as
/// two-sided Fourier coefficients `c_n = (1/L0)∫ f e^{−iξ_n x} dx`.
///
/// Coefficients are stored in FFT slot order (see [`PeriodicGrid::mode_of`]).
/// Every constructor keeps the two representations consistent and the
/// coefficients conjugate-symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicField {
    grid: PeriodicGrid,
    values: Vec<f64>,
    coeffs: Vec<Complex64>,
}

impl PeriodicField {
    pub fn from_values(grid: PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(WaveError::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        let coeffs = fft::forward_real(&values);
        let mut field = Self { grid, values, coeffs };
        field.enforce_hermitian();
        Ok(field)
    }

    pub fn from_fn(grid: PeriodicGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().into_iter().map(f).collect();
        Self::from_values(grid, values).expect("length matches grid")
    }

    /// Builds a real field from coefficients; the non-Hermitian part is discarded.
    pub fn from_coeffs(grid: PeriodicGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(WaveError::InvalidGrid(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        let mut field = Self { grid, values: Vec::new(), coeffs };
        field.enforce_hermitian();
        field.values = fft::inverse_real(&field.coeffs);
        Ok(field)
    }

    pub fn constant(grid: PeriodicGrid, c: f64) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
        coeffs[0] = Complex64::new(c, 0.0);
        Self { grid, values: vec![c; grid.len()], coeffs }
    }

    pub fn zeros(grid: PeriodicGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    /// Even field from one-sided cosine data: `c_n = c_{−n} = cos[n]` for `n = 0..=N/2`.
    pub fn from_cosine_coeffs(grid: PeriodicGrid, cos: &[f64]) -> Result<Self> {
        let half = grid.nyquist();
        if cos.len() != half + 1 {
            return Err(WaveError::InvalidGrid(format!(
                "expected {} cosine coefficients, got {}",
                half + 1,
                cos.len()
            )));
        }
        let n = grid.len();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        coeffs[0] = Complex64::new(cos[0], 0.0);
        for k in 1..half {
            coeffs[k] = Complex64::new(cos[k], 0.0);
            coeffs[n - k] = Complex64::new(cos[k], 0.0);
        }
        coeffs[half] = Complex64::new(cos[half], 0.0);
        Self::from_coeffs(grid, coeffs)
    }

    /// Real parts of `c_0 ..= c_{N/2}`; the full data of an even field.
    pub fn cosine_coeffs(&self) -> Vec<f64> {
        self.coeffs[..=self.grid.nyquist()].iter().map(|c| c.re).collect()
    }

    fn enforce_hermitian(&mut self) {
        let n = self.grid.len();
        let half = n / 2;
        self.coeffs[0].im = 0.0;
        self.coeffs[half].im = 0.0;
        for k in 1..half {
            let a = self.coeffs[k];
            let b = self.coeffs[n - k].conj();
            let m = (a + b) * 0.5;
            self.coeffs[k] = m;
            self.coeffs[n - k] = m.conj();
        }
    }

    #[inline]
    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of mode `n`; zero outside the represented range.
    pub fn coeff(&self, n: i64) -> Complex64 {
        self.grid
            .slot_of(n)
            .map_or(Complex64::new(0.0, 0.0), |k| self.coeffs[k])
    }

    pub fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(WaveError::GridMismatch)
        }
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// `∫₀^{L0} f dx`.
    pub fn integral(&self) -> f64 {
        self.grid.period() * self.coeffs[0].re
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Applies `g(n, ξ_n, c_n)` to every coefficient.
    pub fn map_coeffs(&self, g: impl Fn(i64, f64, Complex64) -> Complex64) -> Self {
        let coeffs = (0..self.grid.len())
            .map(|k| {
                let n = self.grid.mode_of(k);
                g(n, self.grid.frequency(n), self.coeffs[k])
            })
            .collect();
        Self::from_coeffs(self.grid, coeffs).expect("length matches grid")
    }

    /// `f′`, with the unpaired Nyquist mode dropped.
    pub fn derivative(&self) -> Self {
        let half = self.grid.nyquist() as i64;
        self.map_coeffs(|n, xi, c| {
            if n == half {
                Complex64::new(0.0, 0.0)
            } else {
                c * Complex64::new(0.0, xi)
            }
        })
    }

    /// `f(· + y)`. The Nyquist mode keeps only its grid-visible cosine part.
    pub fn translate(&self, y: f64) -> Self {
        let half = self.grid.nyquist() as i64;
        self.map_coeffs(|n, xi, c| {
            if n == half {
                c * (xi * y).cos()
            } else {
                c * Complex64::from_polar(1.0, xi * y)
            }
        })
    }

    /// `(f(x) + f(−x))/2`.
    pub fn even_part(&self) -> Self {
        self.map_coeffs(|_, _, c| Complex64::new(c.re, 0.0))
    }

    /// `(f(x) − f(−x))/2`.
    pub fn odd_part(&self) -> Self {
        self.map_coeffs(|_, _, c| Complex64::new(0.0, c.im))
    }

    /// Evenness defect `max_j |f(x_j) − f(x_{N−j})| / max(1e−300, max|f|)`.
    pub fn evenness_defect(&self) -> f64 {
        let n = self.grid.len();
        let scale = self.max_abs().max(1e-300);
        (1..n)
            .map(|j| (self.values[j] - self.values[n - j]).abs())
            .fold(0.0, f64::max)
            / scale
    }

    /// `L²` inner product `∫ f g dx`, exact for band-limited data.
    pub fn inner(&self, other: &Self) -> f64 {
        assert_eq!(self.grid, other.grid, "inner product across grids");
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum();
        self.grid.period() * s
    }

    pub fn norm_l2(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }

    /// Product evaluated on a 2×-padded grid and projected back.
    pub fn product(&self, other: &Self) -> Self {
        assert_eq!(self.grid, other.grid, "product across grids");
        let n = self.grid.len();
        let m = 2 * n;
        let a = fft::inverse_real(&fft::pad(&self.coeffs, m));
        let b = fft::inverse_real(&fft::pad(&other.coeffs, m));
        let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        let coeffs = fft::truncate(&fft::forward_real(&prod), n);
        Self::from_coeffs(self.grid, coeffs).expect("length matches grid")
    }

    pub fn square(&self) -> Self {
        self.product(self)
    }

    /// `∫ f³ dx`, exact for band-limited `f` (2× padding resolves the cube's mean).
    pub fn cube_integral(&self) -> f64 {
        let m = 2 * self.grid.len();
        let v = fft::inverse_real(&fft::pad(&self.coeffs, m));
        let s: f64 = v.iter().map(|x| x * x * x).sum();
        self.grid.period() * s / m as f64
    }

    /// Spectral interpolation onto a grid with the same period and `points` nodes.
    pub fn resample(&self, points: usize) -> Result<Self> {
        let grid = self.grid.with_points(points)?;
        let coeffs = if points >= self.grid.len() {
            fft::pad(&self.coeffs, points)
        } else {
            fft::truncate(&self.coeffs, points)
        };
        Self::from_coeffs(grid, coeffs)
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| a * v).collect(),
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    /// `a·self + b·other`.
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Self {
        assert_eq!(self.grid, other.grid, "linear combination across grids");
        Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(x, y)| x * a + y * b)
                .collect(),
        }
    }

    pub fn add_constant(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v += c);
        out.coeffs[0].re += c;
        out
    }
}

impl Add for &PeriodicField {
    type Output = PeriodicField;
    fn add(self, rhs: Self) -> PeriodicField {
        self.lin_comb(1.0, rhs, 1.0)
    }
}

impl Sub for &PeriodicField {
    type Output = PeriodicField;
    fn sub(self, rhs: Self) -> PeriodicField {
        self.lin_comb(1.0, rhs, -1.0)
    }
}

impl Neg for &PeriodicField {
    type Output = PeriodicField;
    fn neg(self) -> PeriodicField {
        self.scale(-1.0)
    }
}

impl Mul<&PeriodicField> for f64 {
    type Output = PeriodicField;
    fn mul(self, rhs: &PeriodicField) -> PeriodicField {
        rhs.scale(self)
    }
}
