//! The static two-level system: energies, charge occupation, Landau-Zener
//! passage probability and the gate-voltage/amplitude calibrations.

use core::f64::consts::PI;

use crate::error::{finite, non_negative, positive, Error, Result};
use crate::math;
use crate::params::{DriveParams, QubitParams};
use crate::units::{BOLTZMANN_UEV_PER_K, PLANCK_UEV_PER_GHZ};

/// Ground and excited energies `E∓ = ∓½√(ε²+Δc²)`, µeV.
pub fn energy_levels(eps: f64, delta_c: f64) -> Result<(f64, f64)> {
    let gap = energy_gap(eps, delta_c)?;
    Ok((-0.5 * gap, 0.5 * gap))
}

/// Level splitting `ΔE = √(ε²+Δc²)`, µeV.
pub fn energy_gap(eps: f64, delta_c: f64) -> Result<f64> {
    finite("eps", eps)?;
    positive("delta_c", delta_c)?;
    Ok(math::hypot(eps, delta_c))
}

/// Average right-dot occupation `½(1 + ε/ΔE·Z)`.
///
/// `z` is the ground minus excited population, `P₋ − P₊`.
pub fn avg_occupation(eps: f64, delta_c: f64, z: f64) -> Result<f64> {
    finite("z", z)?;
    if !(-1.0..=1.0).contains(&z) {
        return Err(Error::OutOfRange { name: "z", value: z, expected: "in [-1, 1]" });
    }
    let gap = energy_gap(eps, delta_c)?;
    Ok(0.5 * (1.0 + eps / gap * z))
}

/// Single-passage Landau-Zener transition probability
/// `exp(−πΔc²/(2·A·h·f))`.
pub fn landau_zener_probability(qubit: &QubitParams, drive: &DriveParams) -> Result<f64> {
    positive("delta_c", qubit.delta_c)?;
    positive("f_mw", drive.f_mw)?;
    finite("a_mw", drive.a_mw)?;
    if drive.a_mw <= 0.0 {
        return Err(Error::OutOfRange {
            name: "a_mw",
            value: drive.a_mw,
            expected: "> 0 (an undriven qubit never reaches the anticrossing)",
        });
    }
    let exponent = -PI * qubit.delta_c * qubit.delta_c / (2.0 * drive.a_mw * drive.photon_energy());
    Ok(math::exp(exponent))
}

/// Detuning `ε = eα(V_G − V_G0)` in µeV for a gate voltage in V.
pub fn detuning_from_gate(v_g: f64, qubit: &QubitParams) -> f64 {
    1e6 * qubit.alpha * (v_g - qubit.v_g0)
}

/// Inverse of [`detuning_from_gate`].
pub fn gate_from_detuning(eps: f64, qubit: &QubitParams) -> f64 {
    qubit.v_g0 + eps / (1e6 * qubit.alpha)
}

/// Drive amplitude `A = κ·V_mw` in µeV for a source voltage in V.
pub fn amplitude_from_source_voltage(v_mw: f64, drive: &DriveParams) -> Result<f64> {
    non_negative("v_mw", v_mw)?;
    Ok(drive.kappa * 1e3 * v_mw)
}

/// Default threshold on `Δc/(k_B T_e)` and `Δc/(h f_rf)`.
pub const DEFAULT_ADIABATIC_THRESHOLD: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticReport {
    /// `Δc/(k_B·T_e)`.
    pub thermal_ratio: f64,
    /// `Δc/(h·f_rf)`.
    pub probe_ratio: f64,
    pub threshold: f64,
    pub adiabatic: bool,
}

/// Check `Δc ≫ k_B T_e, h f_rf` with the given threshold.
///
/// `t_e` in K, `f_rf` in MHz.
pub fn check_adiabatic_regime(
    qubit: &QubitParams,
    t_e: f64,
    f_rf: f64,
    threshold: f64,
) -> Result<AdiabaticReport> {
    positive("t_e", t_e)?;
    positive("f_rf", f_rf)?;
    positive("delta_c", qubit.delta_c)?;
    let thermal_ratio = qubit.delta_c / (BOLTZMANN_UEV_PER_K * t_e);
    let probe_ratio = qubit.delta_c / (PLANCK_UEV_PER_GHZ * f_rf * 1e-3);
    Ok(AdiabaticReport {
        thermal_ratio,
        probe_ratio,
        threshold,
        adiabatic: thermal_ratio > threshold && probe_ratio > threshold,
    })
}
