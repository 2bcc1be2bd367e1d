//! Differential capacitance of the double dot and the resonator phase shift
//! it produces.
//!
//! The dot seen from the gate is `C_diff = C_geom + C_Q + C_T` with
//!
//! ```text
//! C_Q = (eα)²/2 · Δc²/ΔE³ · Z          (band curvature)
//! C_T = (eα)²/2 · ε/ΔE · ∂Z/∂ε         (population redistribution)
//! ```
//!
//! which is the same thing as `C_geom + (eα)²·∂⟨n⟩/∂ε`. A small excess
//! capacitance `ΔC = C_diff − C_geom` on the tank shifts the reflected phase
//! by `ΔΦ ≈ −2QΔC/C_p`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{finite, positive, Error, Result};
use crate::math;
use crate::params::QubitParams;
use crate::steady_state::OccupationResult;
use crate::two_level::{detuning_from_gate, energy_gap};
use crate::units::E2_PER_UEV_AF;

/// Lumped tank circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonatorParams {
    /// Inductance, nH.
    pub l: f64,
    /// Parasitic capacitance to ground, fF.
    pub c_p: f64,
    /// Loaded quality factor.
    pub q: f64,
    /// Resonant frequency, MHz.
    pub f_rf: f64,
}

impl Default for ResonatorParams {
    fn default() -> Self {
        Self { l: 390.0, c_p: 515.0, q: 42.0, f_rf: 355.0 }
    }
}

impl ResonatorParams {
    pub fn validate(&self) -> Result<()> {
        positive("l", self.l)?;
        positive("c_p", self.c_p)?;
        positive("q", self.q)?;
        positive("f_rf", self.f_rf)?;
        Ok(())
    }

    /// Relative mismatch between `f_rf` and `1/(2π√(L·C_p))`.
    pub fn frequency_mismatch(&self) -> f64 {
        let lc = resonant_frequency(self.l, self.c_p);
        (self.f_rf - lc).abs() / self.f_rf
    }

    /// `f_rf` agrees with `L` and `C_p` to 2%.
    pub fn is_consistent(&self) -> bool {
        self.frequency_mismatch() <= 0.02
    }
}

/// `1/(2π√(L·C))` in MHz for `L` in nH and `C` in fF.
pub fn resonant_frequency(l: f64, c_p: f64) -> f64 {
    // nH·fF = 1e-24 s², so the square root is in ps
    1e6 / (2.0 * PI * math::sqrt(l * c_p))
}

/// `(eα)²/2` in aF·µeV.
fn half_charge_sq(qubit: &QubitParams) -> f64 {
    0.5 * qubit.alpha * qubit.alpha * E2_PER_UEV_AF
}

/// Quantum capacitance `C_Q`, aF.
pub fn quantum_capacitance(eps: f64, qubit: &QubitParams, z: f64) -> Result<f64> {
    finite("z", z)?;
    if !(-1.0..=1.0).contains(&z) {
        return Err(Error::OutOfRange { name: "z", value: z, expected: "in [-1, 1]" });
    }
    let gap = energy_gap(eps, qubit.delta_c)?;
    Ok(half_charge_sq(qubit) * qubit.delta_c * qubit.delta_c / (gap * gap * gap) * z)
}

/// Tunnelling capacitance `C_T`, aF.
pub fn tunneling_capacitance(eps: f64, qubit: &QubitParams, dz_deps: f64) -> Result<f64> {
    finite("dz_deps", dz_deps)?;
    let gap = energy_gap(eps, qubit.delta_c)?;
    Ok(half_charge_sq(qubit) * eps / gap * dz_deps)
}

/// Contributions to the differential capacitance, aF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacitanceBreakdown {
    pub c_geom: f64,
    pub c_q: f64,
    pub c_t: f64,
    /// `c_geom + c_q + c_t`.
    pub c_diff: f64,
}

impl CapacitanceBreakdown {
    /// Parametric part `C_diff − C_geom`, what the resonator phase sees.
    pub fn excess(&self) -> f64 {
        self.c_q + self.c_t
    }
}

/// Breakdown at detuning `eps` for a given steady state.
/// Pass [`OccupationResult::ADIABATIC`] for the adiabatic limit.
pub fn differential_capacitance(
    eps: f64,
    qubit: &QubitParams,
    occupation: &OccupationResult,
) -> Result<CapacitanceBreakdown> {
    let c_q = quantum_capacitance(eps, qubit, occupation.z)?;
    let c_t = tunneling_capacitance(eps, qubit, occupation.dz_deps)?;
    Ok(CapacitanceBreakdown { c_geom: qubit.c_geom, c_q, c_t, c_diff: qubit.c_geom + c_q + c_t })
}

/// Full width at half maximum of the adiabatic `C_Q` peak, µeV.
pub fn adiabatic_fwhm(delta_c: f64) -> f64 {
    2.0 * delta_c * math::sqrt(math::cbrt(4.0) - 1.0)
}

/// Adiabatic (`Z ≡ 1`) quantum capacitance along a gate-voltage sweep, aF.
pub fn adiabatic_lineshape(v_g_axis: &[f64], qubit: &QubitParams) -> Result<Vec<f64>> {
    qubit.validate()?;
    let increasing = v_g_axis.windows(2).all(|w| w[1] > w[0]);
    let decreasing = v_g_axis.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(Error::NonUniformAxis("v_g"));
    }
    v_g_axis
        .iter()
        .map(|&v| {
            finite("v_g", v)?;
            quantum_capacitance(detuning_from_gate(v, qubit), qubit, 1.0)
        })
        .collect()
}

/// `ΔΦ = −2Q·ΔC/C_p` as `(radians, degrees)` for an excess capacitance in aF.
pub fn phase_shift(delta_c_diff: f64, res: &ResonatorParams) -> (f64, f64) {
    let rad = -2.0 * res.q * delta_c_diff / (res.c_p * 1e3);
    (rad, rad.to_degrees())
}
