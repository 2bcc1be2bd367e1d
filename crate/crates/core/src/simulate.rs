//! Forward models on a grid: closed-form steady state → capacitance → phase.

use alloc::vec::Vec;

use crate::bloch::{integrate, Damping, IntegrationConfig};
use crate::dispersive::{differential_capacitance, phase_shift, ResonatorParams};
use crate::error::{finite, Error, Result};
use crate::params::{DecoherenceParams, DriveParams, QubitParams, DEFAULT_KAPPA_MEV_PER_V};
use crate::spectral::{linspace, MapSource, Model, PhaseMap};
use crate::steady_state::{OccupationResult, PhotonLadder};

/// Everything except the grid that a simulated map depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationParams {
    pub qubit: QubitParams,
    pub dec: DecoherenceParams,
    pub resonator: ResonatorParams,
    /// GHz.
    pub f_mw: f64,
    /// meV/V.
    pub kappa: f64,
}

impl Default for SimulationParams {
    fn default() -> Self {
        Self {
            qubit: QubitParams::default(),
            dec: DecoherenceParams::default(),
            resonator: ResonatorParams::default(),
            f_mw: 34.0,
            kappa: DEFAULT_KAPPA_MEV_PER_V,
        }
    }
}

impl SimulationParams {
    pub fn validate(&self) -> Result<()> {
        self.qubit.validate()?;
        self.dec.validate()?;
        self.resonator.validate()?;
        self.drive(0.0).validate()
    }

    pub fn drive(&self, a_mw: f64) -> DriveParams {
        DriveParams { f_mw: self.f_mw, a_mw, kappa: self.kappa }
    }
}

/// Detuning × amplitude grid, µeV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub eps_min: f64,
    pub eps_max: f64,
    pub n_eps: usize,
    pub amp_min: f64,
    pub amp_max: f64,
    pub n_amp: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { eps_min: -1000.0, eps_max: 1000.0, n_eps: 401, amp_min: 0.0, amp_max: 1000.0, n_amp: 201 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eps_min", self.eps_min),
            ("eps_max", self.eps_max),
            ("amp_min", self.amp_min),
            ("amp_max", self.amp_max),
        ] {
            finite(name, v)?;
        }
        if self.n_eps < 2 || self.n_amp < 2 {
            return Err(Error::BadShape(alloc::format!(
                "grid needs n_eps, n_amp >= 2, got {}x{}",
                self.n_eps,
                self.n_amp
            )));
        }
        if self.eps_min >= self.eps_max {
            return Err(Error::OutOfRange { name: "eps_max", value: self.eps_max, expected: "> eps_min" });
        }
        if self.amp_min >= self.amp_max {
            return Err(Error::OutOfRange { name: "amp_max", value: self.amp_max, expected: "> amp_min" });
        }
        if self.amp_min < 0.0 {
            return Err(Error::OutOfRange { name: "amp_min", value: self.amp_min, expected: ">= 0" });
        }
        Ok(())
    }

    pub fn eps_axis(&self) -> Vec<f64> {
        linspace(self.eps_min, self.eps_max, self.n_eps)
    }

    pub fn amp_axis(&self) -> Vec<f64> {
        linspace(self.amp_min, self.amp_max, self.n_amp)
    }
}

/// Phase in degrees for a steady state at `eps`.
pub fn phase_from_occupation(
    eps: f64,
    params: &SimulationParams,
    occ: &OccupationResult,
) -> Result<f64> {
    let c = differential_capacitance(eps, &params.qubit, occ)?;
    Ok(phase_shift(c.excess(), &params.resonator).1)
}

/// Closed-form phase along one amplitude row, degrees.
pub fn closed_form_row(eps_axis: &[f64], a_mw: f64, params: &SimulationParams) -> Result<Vec<f64>> {
    let reach = eps_axis.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let ladder = PhotonLadder::covering(&params.qubit, &params.drive(a_mw), reach)?;
    closed_form_row_with(eps_axis, &ladder, params)
}

/// Same as [`closed_form_row`] with an explicit ladder (e.g. a truncated one).
pub fn closed_form_row_with(
    eps_axis: &[f64],
    ladder: &PhotonLadder,
    params: &SimulationParams,
) -> Result<Vec<f64>> {
    eps_axis
        .iter()
        .map(|&e| phase_from_occupation(e, params, &ladder.occupation(e, &params.dec)))
        .collect()
}

/// Closed-form phase map, rows evaluated in order.
pub fn closed_form_map(grid: &GridSpec, params: &SimulationParams) -> Result<PhaseMap> {
    grid.validate()?;
    params.validate()?;
    let eps = grid.eps_axis();
    let amp = grid.amp_axis();
    let mut values = Vec::with_capacity(eps.len() * amp.len());
    for &a in &amp {
        values.extend(closed_form_row(&eps, a, params)?);
    }
    PhaseMap::new(eps, amp, values, MapSource::Simulated { model: Model::ClosedForm, params: *params })
}

/// `P₊` from the Bloch oracle at one grid point.
pub fn oracle_upper_occupation(
    eps: f64,
    a_mw: f64,
    params: &SimulationParams,
    cfg: &IntegrationConfig,
) -> Result<f64> {
    let run = integrate(eps, &params.qubit, &params.drive(a_mw), Damping::from(&params.dec), cfg)?;
    Ok(run.p_plus)
}

/// Phase row from the Bloch oracle. `∂Z/∂ε` comes from the central
/// difference of neighbouring grid points (one-sided at the edges).
pub fn oracle_row(
    eps_axis: &[f64],
    a_mw: f64,
    params: &SimulationParams,
    cfg: &IntegrationConfig,
) -> Result<Vec<f64>> {
    let z: Vec<f64> = eps_axis
        .iter()
        .map(|&e| oracle_upper_occupation(e, a_mw, params, cfg).map(|p| 1.0 - 2.0 * p))
        .collect::<Result<_>>()?;
    let n = eps_axis.len();
    (0..n)
        .map(|i| {
            let (lo, hi) = (i.saturating_sub(1), (i + 1).min(n - 1));
            let dz = (z[hi] - z[lo]) / (eps_axis[hi] - eps_axis[lo]);
            let occ = OccupationResult {
                p_plus: 0.5 * (1.0 - z[i]),
                z: z[i].clamp(-1.0, 1.0),
                dz_deps: dz,
                n_terms_used: 0,
                clamped: false,
                truncation_warning: false,
            };
            phase_from_occupation(eps_axis[i], params, &occ)
        })
        .collect()
}
