//! Pseudo-spectral simulation of the structurally damped σ-evolution equation
//!
//! ```text
//! u_tt + (-Δ)^σ u + u_t + (-Δ)^σ u_t = I_α(|u|^p),   u(0) = 0,  u_t(0) = u₁
//! ```
//!
//! on a periodic box standing in for ℝⁿ. The linear flow is solved exactly per
//! Fourier mode; the nonlocal nonlinearity enters through a second-order
//! exponential integrator built on the same closed-form kernels.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command-line
//! driver and parallel sweeps live in the `rieszflow` companion crate.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod decay;
pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod norms;
pub mod ode_oracle;
pub mod params;
pub mod picard;
pub mod propagator;
pub mod quadrature;
pub mod riesz_oracle;
pub mod solver;
pub mod symbol;
pub mod theory;

pub use error::{Error, Result};
pub use field::{
    transform_forward, transform_inverse, RealField, SpectralField, SpectralTransform,
};
pub use grid::{build_grid, Grid, GridSpec};
pub use params::ModelParams;
pub use propagator::{decay_exponent, kernels, propagate_linear, PropagatorKernels};
pub use solver::{DataProfile, NormRecord, Outcome, SolverConfig, Trajectory};

pub use num_complex::Complex64;
