//! Physical constants in the crate's canonical unit system.
//!
//! Energy is in µeV, time in ps, frequency in GHz, capacitance in aF and
//! voltage in V. In these units `h·f` for `f` in GHz is an order-one number
//! of µeV and capacitances of a single charge transition are tens of aF.

use core::f64::consts::PI;

/// Planck constant, µeV·ps.
pub const PLANCK_UEV_PS: f64 = 4135.667696;

/// Reduced Planck constant `h/2π`, µeV·ps.
pub const HBAR_UEV_PS: f64 = PLANCK_UEV_PS / (2.0 * PI);

/// Planck constant expressed so that `h·f` is in µeV for `f` in GHz.
pub const PLANCK_UEV_PER_GHZ: f64 = PLANCK_UEV_PS * 1e-3;

/// Elementary charge, C.
pub const ELEMENTARY_CHARGE_C: f64 = 1.602176634e-19;

/// Boltzmann constant, µeV/K.
pub const BOLTZMANN_UEV_PER_K: f64 = 86.17333;

/// `e²` divided by one µeV, in aF.
///
/// A capacitance written as `(eα)²·X` with `X` in 1/µeV is
/// `α²·X·E2_PER_UEV_AF` aF.
pub const E2_PER_UEV_AF: f64 = ELEMENTARY_CHARGE_C / 1e-6 * 1e18;

/// The constants entering the model, bundled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Planck constant, µeV·ps.
    pub h: f64,
    /// Reduced Planck constant, µeV·ps.
    pub hbar: f64,
    /// Elementary charge, C.
    pub e: f64,
}

impl PhysicalConstants {
    pub const CANONICAL: PhysicalConstants = PhysicalConstants {
        h: PLANCK_UEV_PS,
        hbar: HBAR_UEV_PS,
        e: ELEMENTARY_CHARGE_C,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CANONICAL
    }
}

/// Photon energy `h·f` in µeV for a frequency in GHz.
#[inline]
pub fn photon_energy(f_ghz: f64) -> f64 {
    PLANCK_UEV_PER_GHZ * f_ghz
}
