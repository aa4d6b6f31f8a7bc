//! Shared fixtures for the integration suites.
#![allow(dead_code)]

use std::sync::OnceLock;

use proptest::prelude::*;
use rustfft::num_complex::Complex64;
use wavestab_core::models::{fifth_order_wave, rbo_wave, WaveSolution};
use wavestab_core::solver::{newton_solve, NewtonConfig};
use wavestab_core::{PeriodicField, PeriodicGrid};

/// Fifth-order wave polished by Newton from the sampled closed form.
pub fn fifth_wave(omega: f64, n: usize) -> WaveSolution {
    let seed = fifth_order_wave(omega, n).unwrap();
    newton_solve(&seed.model, seed.omega, seed.a, &seed.field, &NewtonConfig::default()).unwrap()
}

pub fn fifth_2_256() -> &'static WaveSolution {
    static W: OnceLock<WaveSolution> = OnceLock::new();
    W.get_or_init(|| fifth_wave(2.0, 256))
}

pub fn rbo_3_256() -> &'static WaveSolution {
    static W: OnceLock<WaveSolution> = OnceLock::new();
    W.get_or_init(|| rbo_wave(3.0, 256).unwrap())
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Random real field with modes `|n| ≤ modes`, amplitudes damped like `1/(1 + n²)`.
pub fn field_from(grid: PeriodicGrid, data: &[f64]) -> PeriodicField {
    let n = grid.len();
    let modes = (data.len() - 1) / 2;
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    c[0] = Complex64::new(data[0], 0.0);
    for k in 1..=modes {
        let d = 1.0 / (1.0 + (k * k) as f64);
        let z = Complex64::new(data[2 * k - 1], data[2 * k]) * d;
        c[k] = z;
        c[n - k] = z.conj();
    }
    PeriodicField::from_coeffs(grid, c).unwrap()
}

pub fn field_strategy(grid: PeriodicGrid, modes: usize) -> impl Strategy<Value = PeriodicField> {
    prop::collection::vec(-1.0..1.0_f64, 2 * modes + 1).prop_map(move |d| field_from(grid, &d))
}

pub fn cases(n: u32) -> ProptestConfig {
    ProptestConfig { cases: n, failure_persistence: None, ..ProptestConfig::default() }
}
