//! Periodic grids, Fourier representation, multipliers, norms and the
//! conserved functionals.

pub(crate) mod fft;
mod field;
mod grid;
mod ops;
mod symbol;

pub use field::PeriodicField;
pub use grid::PeriodicGrid;
pub use ops::{
    apply_symbol, functional_f, functional_m, functional_p, orbital_distance, quadratic_form,
    sobolev_norm, symbol_values,
};
pub use symbol::FourierSymbol;
