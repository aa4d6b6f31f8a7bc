//! Complete elliptic integrals and Jacobi elliptic functions via the
//! arithmetic–geometric mean.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Result, WaveError};

const MAX_DEPTH: usize = 32;

/// Elliptic modulus `k ∈ [0, 1)` with its complement `k′ = √(1 − k²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipticModulus {
    k: f64,
    kp: f64,
}

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&k) {
            return Err(WaveError::Domain(format!("elliptic modulus must lie in [0, 1), got {k}")));
        }
        Ok(Self { k, kp: ((1.0 - k) * (1.0 + k)).sqrt() })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn complement(&self) -> f64 {
        self.kp
    }
}

/// AGM ladder `(a_n, c_n)` started from `(1, k′, k)`.
fn agm_ladder(m: EllipticModulus) -> (Vec<f64>, Vec<f64>) {
    let (mut a, mut b, mut c) = (1.0_f64, m.kp, m.k);
    let mut aa = vec![a];
    let mut cc = vec![c];
    for _ in 0..MAX_DEPTH {
        if (a - b).abs() < f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        c = 0.5 * (a - b);
        a = an;
        b = bn;
        aa.push(a);
        cc.push(c);
    }
    (aa, cc)
}

/// Complete elliptic integral of the first kind `K(k)`.
pub fn complete_k(k: f64) -> Result<f64> {
    let (a, _) = agm_ladder(EllipticModulus::new(k)?);
    Ok(FRAC_PI_2 / a[a.len() - 1])
}

/// Complete elliptic integral of the second kind `E(k)`.
pub fn complete_e(k: f64) -> Result<f64> {
    let (a, c) = agm_ladder(EllipticModulus::new(k)?);
    let kk = FRAC_PI_2 / a[a.len() - 1];
    let mut sum = 0.0;
    let mut pow = 0.5;
    for cn in &c {
        sum += pow * cn * cn;
        pow *= 2.0;
    }
    Ok(kk * (1.0 - sum))
}

/// `(sn, cn, dn)(u, k)`.
pub fn jacobi(u: f64, k: f64) -> Result<(f64, f64, f64)> {
    Ok(JacobiEvaluator::new(k)?.eval(u))
}

/// Precomputed descending-Landen ladder for repeated evaluation at one modulus.
#[derive(Debug, Clone)]
pub struct JacobiEvaluator {
    modulus: EllipticModulus,
    a: Vec<f64>,
    c: Vec<f64>,
    quarter: f64,
}

impl JacobiEvaluator {
    pub fn new(k: f64) -> Result<Self> {
        let modulus = EllipticModulus::new(k)?;
        let (a, c) = agm_ladder(modulus);
        let quarter = FRAC_PI_2 / a[a.len() - 1];
        Ok(Self { modulus, a, c, quarter })
    }

    pub fn modulus(&self) -> EllipticModulus {
        self.modulus
    }

    /// `K(k)`.
    pub fn quarter_period(&self) -> f64 {
        self.quarter
    }

    pub fn eval(&self, u: f64) -> (f64, f64, f64) {
        if self.modulus.k == 0.0 {
            return (u.sin(), u.cos(), 1.0);
        }
        // sn, cn have period 4K; reduce to [−2K, 2K).
        let p = 4.0 * self.quarter;
        let u = u - p * (u / p).round();
        let n = self.a.len() - 1;
        let mut phi = 2f64.powi(n as i32) * self.a[n] * u;
        for j in (1..=n).rev() {
            let s = (self.c[j] / self.a[j] * phi.sin()).clamp(-1.0, 1.0);
            phi = 0.5 * (phi + s.asin());
        }
        let (sn, cn) = phi.sin_cos();
        // dn² = k′² + k²cn² is a sum of non-negative terms: no cancellation.
        let (k, kp) = (self.modulus.k, self.modulus.kp);
        let dn = (kp * kp + k * k * cn * cn).sqrt();
        (sn, cn, dn)
    }

    pub fn dn(&self, u: f64) -> f64 {
        self.eval(u).2
    }
}

/// Power series `K(k) = (π/2)Σ ((2n−1)!!/(2n)!!)² k^{2n}` truncated at `terms`.
pub fn complete_k_series(k: f64, terms: usize) -> f64 {
    let mut coef = 1.0;
    let mut sum = 1.0;
    let k2 = k * k;
    let mut pow = 1.0;
    for n in 1..terms {
        let r = (2 * n - 1) as f64 / (2 * n) as f64;
        coef *= r * r;
        pow *= k2;
        sum += coef * pow;
    }
    0.5 * PI * sum
}
