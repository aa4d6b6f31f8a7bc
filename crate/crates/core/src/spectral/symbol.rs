use std::fmt;
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Result, WaveError};

type SymbolFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Law {
    Power(f64),
    Custom(SymbolFn),
}

/// Dispersion symbol `θ(ξ)` together with its growth envelope
/// `υ₁|ξ|^{m₁} ≤ θ(ξ) ≤ υ₂|ξ|^{m₁}`.
#[derive(Clone)]
pub struct FourierSymbol {
    name: String,
    law: Law,
    m1: f64,
    upsilon1: f64,
    upsilon2: f64,
}

impl FourierSymbol {
    fn checked(name: String, law: Law, m1: f64, upsilon1: f64, upsilon2: f64) -> Result<Self> {
        let bad = |reason: String| WaveError::InvalidSymbol { name: name.clone(), reason };
        if !(m1.is_finite() && m1 > 1.0 / 3.0) {
            return Err(bad(format!("growth order m1 = {m1} must exceed 1/3")));
        }
        if !(upsilon1 > 0.0 && upsilon2.is_finite() && upsilon1 <= upsilon2) {
            return Err(bad(format!(
                "envelope constants must satisfy 0 < upsilon1 <= upsilon2, got {upsilon1}, {upsilon2}"
            )));
        }
        Ok(Self { name, law, m1, upsilon1, upsilon2 })
    }

    /// `θ(ξ) = |ξ|^p`, envelope constants 1.
    pub fn power(name: impl Into<String>, p: f64) -> Result<Self> {
        Self::checked(name.into(), Law::Power(p), p, 1.0, 1.0)
    }

    /// `θ = ξ²`.
    pub fn bbm() -> Self {
        Self::power("bbm", 2.0).expect("valid exponent")
    }

    /// `θ = |ξ|` (symbol of `H∂ₓ`).
    pub fn rbo() -> Self {
        Self::power("rbo", 1.0).expect("valid exponent")
    }

    /// `θ = ξ⁴`.
    pub fn fifth() -> Self {
        Self::power("fifth", 4.0).expect("valid exponent")
    }

    /// `θ = |ξ|^α`, `α > 1/3`.
    pub fn fractional(alpha: f64) -> Result<Self> {
        Self::power(format!("frac:{alpha}"), alpha)
    }

    /// Arbitrary even symbol with a user-supplied envelope.
    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        m1: f64,
        upsilon1: f64,
        upsilon2: f64,
    ) -> Result<Self> {
        Self::checked(name.into(), Law::Custom(Arc::new(f)), m1, upsilon1, upsilon2)
    }

    pub fn evaluate(&self, xi: f64) -> f64 {
        match &self.law {
            Law::Power(p) => {
                let a = xi.abs();
                if *p == 1.0 {
                    a
                } else if *p == 2.0 {
                    xi * xi
                } else if *p == 4.0 {
                    let s = xi * xi;
                    s * s
                } else if a == 0.0 {
                    0.0
                } else {
                    a.powf(*p)
                }
            }
            Law::Custom(f) => f(xi),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn m1(&self) -> f64 {
        self.m1
    }

    pub fn upsilon1(&self) -> f64 {
        self.upsilon1
    }

    pub fn upsilon2(&self) -> f64 {
        self.upsilon2
    }

    /// `Some(p)` for pure power laws.
    pub fn power_exponent(&self) -> Option<f64> {
        match self.law {
            Law::Power(p) => Some(p),
            Law::Custom(_) => None,
        }
    }
}

impl fmt::Debug for FourierSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierSymbol")
            .field("name", &self.name)
            .field("m1", &self.m1)
            .field("upsilon1", &self.upsilon1)
            .field("upsilon2", &self.upsilon2)
            .finish()
    }
}

impl Serialize for FourierSymbol {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FourierSymbol", 4)?;
        st.serialize_field("name", &self.name)?;
        st.serialize_field("m1", &self.m1)?;
        st.serialize_field("upsilon1", &self.upsilon1)?;
        st.serialize_field("upsilon2", &self.upsilon2)?;
        st.end()
    }
}
