//! Resonance fluorescence of a single driven two-level atom.
//!
//! The crate covers the full chain from atomic dynamics to fitted numbers:
//!
//! - [`dynamics`]: optical Bloch equations, steady state, the Mollow triplet
//!   (closed form and via the quantum regression theorem), and g²(τ).
//! - [`instrument`]: Fabry-Pérot filter response, spectrum convolution,
//!   laser-reflection background, peak ratios and linewidth deconvolution.
//! - [`montecarlo`]: quantum-jump photon streams, Hanbury Brown–Twiss splitting,
//!   coincidence histograms and the time-tag file format.
//! - [`filtered`]: frequency-filtered sideband correlations from a weakly
//!   coupled two-sensor master equation.
//! - [`fit`]: damped least squares and the model-specific fits built on it.
//!
//! All frequencies are angular (rad/s) internally; [`units`] converts to and
//! from MHz at I/O boundaries.

pub mod dynamics;
pub mod error;
pub mod filtered;
pub mod fit;
pub mod instrument;
pub mod lindblad;
pub mod montecarlo;
pub mod numerics;
pub mod units;

pub use dynamics::{AtomParams, BlochState, SaturationModel, Spectrum};
pub use error::{Error, Result};
