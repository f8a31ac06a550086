//! Diffraction of the plastic-number inflation tiling.
//!
//! - [`algebra`]: exact ℤ[β] arithmetic, embeddings, wave numbers.
//! - [`inflation`]: the substitution a ↦ b ↦ c ↦ ab and its patches.
//! - [`cocycle`]: Fourier-matrix cocycle, amplitudes and peak lists.
//! - [`windows`]: Rauzy-fractal windows and their Fourier transforms.
//! - [`finite`]: exponential sums over finite patches.

pub mod algebra;
pub mod cocycle;
pub mod error;
pub mod finite;
pub mod inflation;
pub mod windows;

pub use algebra::{BetaInt, Miller, Point, WaveNumber};
pub use cocycle::{PeakQuery, PeakRecord, Weights};
pub use error::{AlgebraError, CocycleError, Error, Result};
pub use inflation::{ControlPoint, Letter, Patch};

/// Library version, recorded in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
