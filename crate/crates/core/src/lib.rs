//! ADC bit allocation for beamspace mmWave massive-MIMO uplink receivers.
//!
//! A base station with `N` antennas projects the received uplink signal onto
//! the beamspace with a unitary DFT beamformer, then digitizes each branch
//! with a pair of low-resolution ADCs. Because mmWave channels are nearly
//! sparse in beamspace, spending the same total ADC power non-uniformly —
//! more bits on strong branches, none on empty ones — reduces the total mean
//! square quantization error (MSQE) and improves link-level EVM.
//!
//! The crate provides:
//!
//! - [`channel`] — geometric cluster channel draws over a uniform linear array
//! - [`beamspace`] — the DFT beamforming matrix, projections, per-branch SNR
//! - [`quantization`] — the additive quantization noise model (AQNM) and an
//!   actual Lloyd-Max scalar MMSE quantizer
//! - [`allocation`] — the closed-form relaxed bit allocation, its KKT
//!   diagnostics, the integer mapping algorithm, and independent oracles
//!   (bisection solver, exhaustive search)
//! - [`link`] — one uplink transmission trial: QPSK, channel, quantizer,
//!   zero-forcing equalizer, EVM
//! - [`harness`] — Monte-Carlo sweeps, aggregation, CSV output and the CLI
//!
//! The `beamba` binary runs the sweep harness; see the README for usage.

pub mod allocation;
pub mod beamspace;
pub mod channel;
mod error;
pub mod harness;
pub mod link;
pub mod quantization;

pub use error::{Error, Result};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Dense complex matrix used for channels and beamformers.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex vector used for signals.
pub type CVector = DVector<Complex64>;

pub(crate) fn standard_normal<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    rand_distr::Distribution::sample(&rand_distr::StandardNormal, rng)
}
