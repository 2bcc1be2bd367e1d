//! Parameter records for the qubit, the microwave drive and decoherence.

use crate::error::{finite, non_negative, positive, Error, Result};
use crate::units::photon_energy;

/// The static two-level system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitParams {
    /// Tunnel coupling `Δc`, µeV.
    pub delta_c: f64,
    /// Lever-arm asymmetry `α`, dimensionless.
    pub alpha: f64,
    /// Geometric capacitance, aF.
    pub c_geom: f64,
    /// Gate voltage of maximal signal, V.
    pub v_g0: f64,
}

impl QubitParams {
    pub fn new(delta_c: f64, alpha: f64, c_geom: f64, v_g0: f64) -> Result<Self> {
        let q = Self { delta_c, alpha, c_geom, v_g0 };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        positive("delta_c", self.delta_c)?;
        finite("alpha", self.alpha)?;
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::OutOfRange { name: "alpha", value: self.alpha, expected: "in (0, 1]" });
        }
        non_negative("c_geom", self.c_geom)?;
        finite("v_g0", self.v_g0)?;
        Ok(())
    }
}

impl Default for QubitParams {
    fn default() -> Self {
        Self { delta_c: 98.0, alpha: 0.25, c_geom: 0.0, v_g0: 0.0 }
    }
}

/// Default source-voltage-to-energy conversion, meV/V.
pub const DEFAULT_KAPPA_MEV_PER_V: f64 = 0.46;

/// Microwave drive `ε(t) = ε₀ + A·cos(2π f t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    /// Drive frequency, GHz.
    pub f_mw: f64,
    /// Drive amplitude, µeV.
    pub a_mw: f64,
    /// Source-voltage-to-energy conversion, meV/V.
    pub kappa: f64,
}

impl DriveParams {
    pub fn new(f_mw: f64, a_mw: f64) -> Result<Self> {
        let d = Self { f_mw, a_mw, kappa: DEFAULT_KAPPA_MEV_PER_V };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        positive("f_mw", self.f_mw)?;
        non_negative("a_mw", self.a_mw)?;
        positive("kappa", self.kappa)?;
        Ok(())
    }

    /// Same drive at a different amplitude.
    pub fn with_amplitude(self, a_mw: f64) -> Self {
        Self { a_mw, ..self }
    }

    /// Photon energy `h·f_mw`, µeV.
    pub fn photon_energy(&self) -> f64 {
        photon_energy(self.f_mw)
    }

    /// Bessel argument `A/(h·f)`.
    pub fn bessel_argument(&self) -> f64 {
        self.a_mw / self.photon_energy()
    }

    /// Drive period, ps.
    pub fn period(&self) -> f64 {
        1e3 / self.f_mw
    }
}

impl Default for DriveParams {
    fn default() -> Self {
        Self { f_mw: 34.0, a_mw: 0.0, kappa: DEFAULT_KAPPA_MEV_PER_V }
    }
}

/// Relaxation and coherence times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceParams {
    /// Relaxation time `T₁`, ps.
    pub t1: f64,
    /// Coherence time `T₂`, ps.
    pub t2: f64,
}

impl DecoherenceParams {
    pub fn new(t1: f64, t2: f64) -> Result<Self> {
        let d = Self { t1, t2 };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        positive("t1", self.t1)?;
        positive("t2", self.t2)?;
        // Bloch-equation physicality
        if self.t2 > 2.0 * self.t1 {
            return Err(Error::OutOfRange { name: "t2", value: self.t2, expected: "<= 2*t1" });
        }
        Ok(())
    }
}

impl Default for DecoherenceParams {
    fn default() -> Self {
        Self { t1: 100.0, t2: 100.0 }
    }
}
