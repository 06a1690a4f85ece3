//! Spectral-Galerkin / exponential-Euler solver for the stochastic
//! Cahn-Hilliard-type equation
//!
//! ```text
//!     du = (-Laplacian^2 u - G(u)) dt + sigma dW
//! ```
//!
//! on the two-dimensional unit torus, driven by space-time white noise and
//! posed in the mean-zero frame. The crate provides:
//!
//! - [`torus_spectral`]: frequency-lattice bookkeeping, FFT transforms
//!   between mode space and an oversampled physical grid, projections and
//!   the biharmonic semigroup multipliers;
//! - [`noise`]: exact Ornstein-Uhlenbeck sampling of the truncated
//!   stochastic convolution with deterministic, splittable seeding and
//!   exact coupling across refinement levels;
//! - [`nonlinearity`]: a catalogue of bounded Lipschitz nonlinearities with
//!   pseudo-spectral evaluation;
//! - [`scheme`]: the per-mode exponential Euler stepper;
//! - [`analysis`]: L2 / Besov norms via dyadic blocks, error metrics and
//!   log-log rate fitting;
//! - [`harness`]: coupled-noise convergence studies, CSV reports and the
//!   command-line front end.
//!
//! See the `examples/` directory for one runnable example per capability.

pub mod analysis;
pub mod error;
pub mod harness;
pub mod noise;
pub mod nonlinearity;
pub mod scheme;
pub mod torus_spectral;

#[cfg(test)]
pub(crate) mod test_util;

pub use error::{Error, Result};
