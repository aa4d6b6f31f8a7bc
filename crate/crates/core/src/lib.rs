//! Periodic traveling waves of regularized dispersive equations
//! `u_t + u_x + u u_x + (Mu)_t = 0` and their orbital stability.

pub mod config;
pub mod elliptic;
pub mod evolution;
pub mod error;
pub mod minimizer;
pub mod models;
pub mod solver;
pub mod spectral;
pub mod spectrum;
pub mod stability;

pub use error::{Result, WaveError};
pub use spectral::{FourierSymbol, PeriodicField, PeriodicGrid};
