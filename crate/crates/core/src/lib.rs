//! Directional-modulation wiretap link with finite-resolution analog phase
//! shifters.
//!
//! Alice steers a single data stream with a phase-only analog beamformer whose
//! phases come from an `L`-bit codebook. Bob runs full duplex and radiates
//! artificial noise toward Eve while receiving. The crate provides the
//! closed-form SINR and secrecy-rate penalties of phase quantization, a
//! Monte Carlo QPSK link simulator that checks them, and sweep drivers that
//! write CSV tables.
//!
//! Module map:
//!
//! - [`array_geometry`]: ULA phase profiles and steering vectors.
//! - [`phase_quantizer`]: phase codebooks, nearest-codeword quantization,
//!   and the uniform quantization-error model.
//! - [`channel_model`]: path loss, LOS channels, self-interference and noise.
//! - [`beamforming`]: analog beamformers and the max-secrecy-rate AN beamformer.
//! - [`metrics`]: SINR, loss ratio, rates and secrecy rates.
//! - [`link_sim`]: QPSK Monte Carlo engine with counter-based seeding.
//! - [`experiments`]: configuration, sweep drivers and CSV output.

pub mod array_geometry;
pub mod beamforming;
pub mod channel_model;
pub mod error;
pub mod experiments;
pub mod link_sim;
pub mod metrics;
pub mod phase_quantizer;

pub use num_complex::Complex64;

pub use array_geometry::{ArrayGeometry, SteeringVector};
pub use beamforming::BeamformerPair;
pub use channel_model::{ChannelSet, Scenario};
pub use error::{Error, Result};
pub use phase_quantizer::{PhaseCodebook, QuantizationError};
