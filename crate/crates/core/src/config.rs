//! Default parameters shared by the library, the CLI and the test suites.

/// Collocation points used when a caller does not specify `N`.
pub const DEFAULT_N: usize = 256;

/// Relative sup-norm residual accepted by the Newton solver.
pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 50;
/// Maximum number of step halvings inside one Newton step.
pub const NEWTON_MAX_HALVINGS: usize = 8;

/// Maximum number of step halvings when a continuation stencil fails.
pub const CONTINUATION_MAX_HALVINGS: usize = 8;

/// Scale factor of the zero-eigenvalue tolerance (see [`crate::spectrum::default_tol_zero`]).
pub const TOL_ZERO_FACTOR: f64 = 1e-6;
/// Kernel eigenvector must align with φ′ to within this much.
pub const KERNEL_ALIGNMENT_TOL: f64 = 1e-6;

/// Golden-section tolerance for translation refinement, relative to L₀.
pub const SHIFT_TOL: f64 = 1e-12;

/// Gap |ω − 1 − 2A| below `GAP_TOL · max(1, |ω|)` is treated as zero.
pub const GAP_TOL: f64 = 1e-8;

/// Relative finite-difference step for parameter derivatives.
pub const FD_STEP: f64 = 1e-3;

/// Default constant N of the Lyapunov functional V.
pub const LYAPUNOV_N: f64 = 1.0;

pub const MINIMIZER_MAX_ITER: usize = 5000;
pub const MINIMIZER_GRAD_TOL: f64 = 1e-10;
/// Iterations without meaningful decrease of B before the descent stops.
pub const MINIMIZER_STAGNATION_WINDOW: usize = 50;

/// Fixed seed for random perturbations unless overridden.
pub const DEFAULT_SEED: u64 = 20_190_611;
