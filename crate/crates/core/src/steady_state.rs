//! Closed-form steady state of a strongly driven, damped two-level system.
//!
//! Under the drive `ε₀ + A·cos(2πft)` the excited-state population is a
//! ladder of Lorentzians centred on `|ε₀| = n·h·f`, one per photon number,
//! each with an effective gap `Δc,n = Δc·Jₙ(A/hf)`:
//!
//! ```text
//! P₊ = ½ Σₙ Δc,n² / (Δc,n² + (T₂/T₁)(|ε| − n·hf)² + ħ²/(T₁T₂))
//! ```
//!
//! Because only `|ε|` enters, the sum runs over `n ≥ 0`. `Jₙ(x)` falls off
//! super-exponentially once `n > x`, so `n ≤ ⌈x⌉ + 10` is enough as long as
//! the resonance nearest `|ε|` is also inside the ladder; the default cut-off
//! covers both.

use alloc::vec::Vec;

use crate::bessel::{bessel_j, bessel_j_orders};
use crate::error::{finite, Result};
use crate::math;
use crate::params::{DecoherenceParams, DriveParams, QubitParams};
use crate::units::HBAR_UEV_PS;

/// Orders kept above `⌈A/hf⌉` by default.
pub const TRUNCATION_MARGIN: usize = 10;

/// Largest relative weight the last kept term may carry before the
/// truncation is flagged.
pub const TRUNCATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccupationResult {
    /// Excited-state probability `P₊`, in `[0, ½]`.
    pub p_plus: f64,
    /// `Z = P₋ − P₊ = 1 − 2P₊`.
    pub z: f64,
    /// `∂Z/∂ε`, 1/µeV.
    pub dz_deps: f64,
    /// Number of photon terms summed (`n = 0..n_terms_used`).
    pub n_terms_used: usize,
    /// The raw sum exceeded ½ (overlapping resonances) and was clamped.
    pub clamped: bool,
    /// The last kept term contributed more than [`TRUNCATION_TOLERANCE`].
    pub truncation_warning: bool,
}

impl OccupationResult {
    /// Ground state held adiabatically: `Z ≡ 1`, `∂Z/∂ε = 0`.
    pub const ADIABATIC: OccupationResult = OccupationResult {
        p_plus: 0.0,
        z: 1.0,
        dz_deps: 0.0,
        n_terms_used: 0,
        clamped: false,
        truncation_warning: false,
    };
}

/// Default photon cut-off `⌈A/hf⌉ + 10`.
pub fn auto_n_max(drive: &DriveParams) -> usize {
    math::ceil(drive.bessel_argument()) as usize + TRUNCATION_MARGIN
}

/// Cut-off `max(⌈A/hf⌉, ⌈|ε|max/hf⌉) + 10` for detunings up to `eps_abs_max`.
pub fn covering_n_max(drive: &DriveParams, eps_abs_max: f64) -> usize {
    let reach = math::ceil(math::abs(eps_abs_max) / drive.photon_energy()) as usize;
    auto_n_max(drive).max(reach + TRUNCATION_MARGIN)
}

/// Effective `n`-photon gap `Δc·Jₙ(A/hf)`, µeV. May be negative.
pub fn effective_gap(n: i32, qubit: &QubitParams, drive: &DriveParams) -> Result<f64> {
    drive.validate()?;
    Ok(qubit.delta_c * bessel_j(n, drive.bessel_argument()))
}

/// Squared effective gaps for one drive amplitude, reusable across detunings.
#[derive(Debug, Clone)]
pub struct PhotonLadder {
    gaps_sq: Vec<f64>,
    photon: f64,
}

impl PhotonLadder {
    /// Ladder with the amplitude-only cut-off [`auto_n_max`].
    pub fn new(qubit: &QubitParams, drive: &DriveParams) -> Result<Self> {
        Self::with_n_max(qubit, drive, auto_n_max(drive))
    }

    /// Ladder converged for all `|ε| ≤ eps_abs_max`.
    pub fn covering(qubit: &QubitParams, drive: &DriveParams, eps_abs_max: f64) -> Result<Self> {
        finite("eps_abs_max", eps_abs_max)?;
        drive.validate()?;
        Self::with_n_max(qubit, drive, covering_n_max(drive, eps_abs_max))
    }

    /// Ladder summing `n = 0..=n_max`.
    pub fn with_n_max(qubit: &QubitParams, drive: &DriveParams, n_max: usize) -> Result<Self> {
        qubit.validate()?;
        drive.validate()?;
        let dc2 = qubit.delta_c * qubit.delta_c;
        let gaps_sq = bessel_j_orders(n_max, drive.bessel_argument())
            .into_iter()
            .map(|j| dc2 * j * j)
            .collect();
        Ok(Self { gaps_sq, photon: drive.photon_energy() })
    }

    pub fn n_max(&self) -> usize {
        self.gaps_sq.len() - 1
    }

    /// `Δc,n²`, µeV².
    pub fn gap_sq(&self, n: usize) -> f64 {
        self.gaps_sq[n]
    }

    /// Contribution of the `n`-photon Lorentzian to `P₊` (no clamping).
    pub fn resonance_term(&self, n: usize, eps: f64, dec: &DecoherenceParams) -> f64 {
        let (ratio, width_sq) = rates(dec);
        let g2 = self.gaps_sq[n];
        let off = math::abs(eps) - n as f64 * self.photon;
        0.5 * g2 / (g2 + ratio * off * off + width_sq)
    }

    /// Steady-state occupation at detuning `eps`.
    pub fn occupation(&self, eps: f64, dec: &DecoherenceParams) -> OccupationResult {
        let (ratio, width_sq) = rates(dec);
        let abs_eps = math::abs(eps);
        let sign = math::signum(eps);
        let mut p = 0.0;
        let mut dp = 0.0;
        let mut last = 0.0;
        for (n, &g2) in self.gaps_sq.iter().enumerate() {
            let off = abs_eps - n as f64 * self.photon;
            let den = g2 + ratio * off * off + width_sq;
            let term = 0.5 * g2 / den;
            p += term;
            // ∂/∂ε of the term; sign(ε) from |ε|, zero at ε = 0
            dp -= g2 * ratio * off * sign / (den * den);
            last = term;
        }
        let truncation_warning = p > 0.0 && last / p > TRUNCATION_TOLERANCE;
        let clamped = p > 0.5;
        let (p_plus, dz_deps) = if clamped { (0.5, 0.0) } else { (p.max(0.0), -2.0 * dp) };
        OccupationResult {
            p_plus,
            z: 1.0 - 2.0 * p_plus,
            dz_deps,
            n_terms_used: self.gaps_sq.len(),
            clamped,
            truncation_warning,
        }
    }
}

fn rates(dec: &DecoherenceParams) -> (f64, f64) {
    (dec.t2 / dec.t1, HBAR_UEV_PS * HBAR_UEV_PS / (dec.t1 * dec.t2))
}

/// Time-averaged steady state at detuning `eps`, cut off by [`covering_n_max`].
pub fn upper_occupation(
    eps: f64,
    qubit: &QubitParams,
    drive: &DriveParams,
    dec: &DecoherenceParams,
) -> Result<OccupationResult> {
    finite("eps", eps)?;
    dec.validate()?;
    Ok(PhotonLadder::covering(qubit, drive, eps)?.occupation(eps, dec))
}

/// `∂Z/∂ε`, 1/µeV. Zero at `ε = 0` where `Z` is even.
pub fn z_derivative(
    eps: f64,
    qubit: &QubitParams,
    drive: &DriveParams,
    dec: &DecoherenceParams,
) -> Result<f64> {
    Ok(upper_occupation(eps, qubit, drive, dec)?.dz_deps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(a: f64) -> (QubitParams, DriveParams, DecoherenceParams) {
        (QubitParams::default(), DriveParams::new(34.0, a).unwrap(), DecoherenceParams::default())
    }

    #[test]
    fn effective_gap_examples() {
        let (q, _, _) = setup(0.0);
        assert_eq!(effective_gap(0, &q, &DriveParams::new(34.0, 0.0).unwrap()).unwrap(), 98.0);
        assert_eq!(effective_gap(1, &q, &DriveParams::new(34.0, 0.0).unwrap()).unwrap(), 0.0);
        let g = effective_gap(1, &q, &DriveParams::new(34.0, 258.9).unwrap()).unwrap();
        assert!((g - 57.0).abs() < 0.05, "{g}");
    }

    #[test]
    fn effective_gap_vanishes_at_bessel_zero() {
        let (q, d, _) = setup(0.0);
        let a = 2.404_825_557_695_773 * d.photon_energy();
        let g = effective_gap(0, &q, &d.with_amplitude(a)).unwrap();
        assert!(g.abs() <= 1e-8 * q.delta_c);
    }

    #[test]
    fn single_resonance_at_one_photon() {
        // one-photon Lorentzian alone: ½·3249/(3249+43.3)
        let (q, d, dec) = setup(258.9);
        let ladder = PhotonLadder::new(&q, &d).unwrap();
        let term = ladder.resonance_term(1, 140.61, &dec);
        assert!((term - 0.4934).abs() < 1e-3, "{term}");
        // neighbouring resonances overlap at this amplitude, so the full sum
        // saturates and is clamped
        let full = ladder.occupation(140.61, &dec);
        assert!(full.clamped);
        assert_eq!(full.p_plus, 0.5);
        assert_eq!(full.z, 0.0);
    }

    #[test]
    fn undriven_reduces_to_single_lorentzian() {
        let (q, d, dec) = setup(0.0);
        let r = upper_occupation(1000.0, &q, &d, &dec).unwrap();
        let width_sq = HBAR_UEV_PS * HBAR_UEV_PS / 1e4;
        let expect = 0.5 * 98.0 * 98.0 / (98.0 * 98.0 + 1e6 + width_sq);
        assert!((r.p_plus - expect).abs() < 1e-15);
        assert!((r.p_plus - 4.756e-3).abs() < 1e-6);
        assert!(!r.clamped);
    }

    #[test]
    fn far_detuned_limit() {
        let (q, d, dec) = setup(300.0);
        let r = upper_occupation(1e7, &q, &d, &dec).unwrap();
        assert!(r.p_plus < 1e-9);
        assert!((r.z - 1.0).abs() < 1e-9);
    }

    #[test]
    fn derivative_zero_at_origin_and_resonance_centre() {
        let (q, d, dec) = setup(258.9);
        assert_eq!(z_derivative(0.0, &q, &d, &dec).unwrap(), 0.0);
        let ladder = PhotonLadder::with_n_max(&q, &d.with_amplitude(50.0), 3).unwrap();
        // isolated 2-photon line: derivative of its own term vanishes at centre
        let h = 1e-4;
        let c = 2.0 * d.photon_energy();
        let slope = (ladder.resonance_term(2, c + h, &dec) - ladder.resonance_term(2, c - h, &dec)) / (2.0 * h);
        assert!(slope.abs() < 1e-9);
    }

    #[test]
    fn truncation_flags() {
        let (q, d, dec) = setup(258.9);
        let ok = upper_occupation(700.0, &q, &d, &dec).unwrap();
        assert!(!ok.truncation_warning);
        assert_eq!(ok.n_terms_used, covering_n_max(&d, 700.0) + 1);
        assert_eq!(covering_n_max(&d, 0.0), auto_n_max(&d));
        let cut = PhotonLadder::with_n_max(&q, &d, 1).unwrap().occupation(700.0, &dec);
        assert!(cut.truncation_warning);
    }
}
