//! Models for a dispersively read, strongly driven charge qubit.
//!
//! A double quantum dot with tunnel coupling `Δc` is swept periodically
//! through its anticrossing while an rf tank circuit watches its differential
//! capacitance. This crate holds the numerical core:
//!
//! - [`two_level`]: static two-level energies, occupation, Landau-Zener
//!   probability and gate/detuning calibrations.
//! - [`steady_state`]: the closed-form multi-photon steady state (Bessel
//!   ladder of Lorentzian resonances) and its detuning derivative.
//! - [`dispersive`]: quantum and tunnelling capacitance, and the resonator
//!   phase shift they produce.
//! - [`bloch`]: a fixed-step RK4 integrator of the driven, damped Bloch
//!   equations used as an independent oracle for the closed form.
//! - [`spectral`]: 2D Fourier analysis of phase maps and coherence-time
//!   extraction.
//! - [`estimation`]: inverse problems (lineshape fit, `T₁` fit, lever-arm
//!   calibration) built on the damped least-squares solver in [`lsq`].
//!
//! Everything is `no_std` and only needs `alloc`. Units are fixed crate-wide:
//! energy in µeV, time in ps, frequency in GHz, capacitance in aF, voltage in V
//! (see [`units`]).
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bessel;
pub mod bloch;
pub mod dispersive;
mod error;
pub mod estimation;
pub mod lsq;
mod math;
pub mod params;
pub mod simulate;
pub mod spectral;
pub mod steady_state;
pub mod two_level;
pub mod units;

pub use error::{Error, Result};
pub use params::{DecoherenceParams, DriveParams, QubitParams};
