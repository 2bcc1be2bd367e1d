//! Run configuration. Every physical key carries its unit in the name;
//! unknown keys are rejected.

use std::path::Path;

use lzsm_core::bloch::{IntegrationConfig, Readout, RelaxationBasis, MIN_AVERAGE_PERIODS, MIN_STEPS_PER_PERIOD};
use lzsm_core::dispersive::ResonatorParams;
use lzsm_core::estimation::log_grid;
use lzsm_core::simulate::{GridSpec, SimulationParams};
use lzsm_core::spectral::{DecayFitOptions, DftMethod, PIPELINE_NOISE_FLOOR, PIPELINE_WINDOW_PS};
use lzsm_core::{DecoherenceParams, QubitParams};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Largest grid `compare-oracle` accepts.
pub const ORACLE_MAX_EPS: usize = 64;
pub const ORACLE_MAX_AMP: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub qubit: QubitSection,
    pub drive: DriveSection,
    pub decoherence: DecoherenceSection,
    pub resonator: ResonatorSection,
    pub grid: GridSection,
    pub model: ModelKind,
    pub seed: u64,
    /// Gaussian noise added to simulated maps, degrees (1σ).
    #[serde(rename = "noise_deg")]
    pub noise: f64,
    pub lineshape: LineshapeSection,
    pub fft: FftSection,
    pub fit: FitSection,
    pub oracle: OracleSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            qubit: QubitSection::default(),
            drive: DriveSection::default(),
            decoherence: DecoherenceSection::default(),
            resonator: ResonatorSection::default(),
            grid: GridSection::default(),
            model: ModelKind::ClosedForm,
            seed: 0,
            noise: 0.0,
            lineshape: LineshapeSection::default(),
            fft: FftSection::default(),
            fit: FitSection::default(),
            oracle: OracleSection::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QubitSection {
    #[serde(rename = "delta_c_ueV")]
    pub delta_c: f64,
    pub alpha: f64,
    #[serde(rename = "c_geom_aF")]
    pub c_geom: f64,
    #[serde(rename = "v_g0_V")]
    pub v_g0: f64,
}

impl Default for QubitSection {
    fn default() -> Self {
        let q = QubitParams::default();
        Self { delta_c: q.delta_c, alpha: q.alpha, c_geom: q.c_geom, v_g0: q.v_g0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriveSection {
    #[serde(rename = "f_mw_GHz")]
    pub f_mw: f64,
    #[serde(rename = "kappa_meV_per_V")]
    pub kappa: f64,
}

impl Default for DriveSection {
    fn default() -> Self {
        let p = SimulationParams::default();
        Self { f_mw: p.f_mw, kappa: p.kappa }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecoherenceSection {
    #[serde(rename = "t1_ps")]
    pub t1: f64,
    #[serde(rename = "t2_ps")]
    pub t2: f64,
}

impl Default for DecoherenceSection {
    fn default() -> Self {
        let d = DecoherenceParams::default();
        Self { t1: d.t1, t2: d.t2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResonatorSection {
    #[serde(rename = "l_nH")]
    pub l: f64,
    #[serde(rename = "c_p_fF")]
    pub c_p: f64,
    pub q: f64,
    #[serde(rename = "f_rf_MHz")]
    pub f_rf: f64,
}

impl Default for ResonatorSection {
    fn default() -> Self {
        let r = ResonatorParams::default();
        Self { l: r.l, c_p: r.c_p, q: r.q, f_rf: r.f_rf }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    #[serde(rename = "eps_min_ueV")]
    pub eps_min: f64,
    #[serde(rename = "eps_max_ueV")]
    pub eps_max: f64,
    pub n_eps: usize,
    #[serde(rename = "amp_min_ueV")]
    pub amp_min: f64,
    #[serde(rename = "amp_max_ueV")]
    pub amp_max: f64,
    pub n_amp: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        let g = GridSpec::default();
        Self {
            eps_min: g.eps_min,
            eps_max: g.eps_max,
            n_eps: g.n_eps,
            amp_min: g.amp_min,
            amp_max: g.amp_max,
            n_amp: g.n_amp,
        }
    }
}

impl GridSection {
    pub fn spec(&self) -> GridSpec {
        GridSpec {
            eps_min: self.eps_min,
            eps_max: self.eps_max,
            n_eps: self.n_eps,
            amp_min: self.amp_min,
            amp_max: self.amp_max,
            n_amp: self.n_amp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    ClosedForm,
    BlochOracle,
}

/// Synthetic adiabatic lineshape for `simulate --lineshape`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LineshapeSection {
    #[serde(rename = "v_min_V")]
    pub v_min: f64,
    #[serde(rename = "v_max_V")]
    pub v_max: f64,
    pub n_points: usize,
    /// Gaussian noise, as a fraction of the peak |phase|.
    pub noise_fraction: f64,
}

impl Default for LineshapeSection {
    fn default() -> Self {
        Self { v_min: -2e-3, v_max: 2e-3, n_points: 201, noise_fraction: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DftKind {
    Direct,
    Radix2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FftSection {
    #[serde(rename = "window_min_ps")]
    pub window_min: f64,
    #[serde(rename = "window_max_ps")]
    pub window_max: f64,
    /// Trace points below this fraction of the peak are dropped.
    pub noise_floor: f64,
    pub method: DftKind,
}

impl Default for FftSection {
    fn default() -> Self {
        Self {
            window_min: PIPELINE_WINDOW_PS.0,
            window_max: PIPELINE_WINDOW_PS.1,
            noise_floor: PIPELINE_NOISE_FLOOR,
            method: DftKind::Direct,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitSection {
    #[serde(rename = "t1_grid_min_ps")]
    pub t1_min: f64,
    #[serde(rename = "t1_grid_max_ps")]
    pub t1_max: f64,
    pub t1_grid_points: usize,
    pub max_iter: usize,
    /// Lineshape starting point; estimated from the data when absent.
    #[serde(rename = "init_delta_c_ueV")]
    pub init_delta_c: Option<f64>,
    #[serde(rename = "init_v_g0_V")]
    pub init_v_g0: Option<f64>,
    pub init_scale: f64,
}

impl Default for FitSection {
    fn default() -> Self {
        Self {
            t1_min: 10.0,
            t1_max: 1000.0,
            t1_grid_points: 21,
            max_iter: 200,
            init_delta_c: None,
            init_v_g0: None,
            init_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadoutKind {
    Diabatic,
    StaticEigenbasis,
    Instantaneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelaxationKind {
    Diabatic,
    Instantaneous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSection {
    #[serde(rename = "eps_min_ueV")]
    pub eps_min: f64,
    #[serde(rename = "eps_max_ueV")]
    pub eps_max: f64,
    pub n_eps: usize,
    #[serde(rename = "amp_min_ueV")]
    pub amp_min: f64,
    #[serde(rename = "amp_max_ueV")]
    pub amp_max: f64,
    pub n_amp: usize,
    /// Photon orders whose resonance centres `ε = n·hf` are checked.
    pub resonance_orders: Vec<u32>,
    pub amp_over_hf_min: f64,
    pub amp_over_hf_max: f64,
    pub amp_over_hf_points: usize,
    /// Largest relative deviation allowed at a resonance centre.
    pub tolerance: f64,
    pub steps_per_period: usize,
    pub average_periods: usize,
    pub transient_periods: Option<usize>,
    pub readout: ReadoutKind,
    pub relaxation: RelaxationKind,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            eps_min: -500.0,
            eps_max: 500.0,
            n_eps: ORACLE_MAX_EPS,
            amp_min: 0.0,
            amp_max: 500.0,
            n_amp: ORACLE_MAX_AMP,
            resonance_orders: vec![1, 2, 3],
            amp_over_hf_min: 1.0,
            amp_over_hf_max: 3.0,
            amp_over_hf_points: 9,
            tolerance: 0.15,
            steps_per_period: MIN_STEPS_PER_PERIOD,
            average_periods: MIN_AVERAGE_PERIODS,
            transient_periods: None,
            readout: ReadoutKind::Diabatic,
            relaxation: RelaxationKind::Diabatic,
        }
    }
}

impl OracleSection {
    pub fn grid(&self) -> GridSpec {
        GridSpec {
            eps_min: self.eps_min,
            eps_max: self.eps_max,
            n_eps: self.n_eps,
            amp_min: self.amp_min,
            amp_max: self.amp_max,
            n_amp: self.n_amp,
        }
    }

    pub fn integration(&self) -> IntegrationConfig {
        IntegrationConfig {
            steps_per_period: self.steps_per_period,
            transient_periods: self.transient_periods,
            average_periods: self.average_periods,
            readout: match self.readout {
                ReadoutKind::Diabatic => Readout::Diabatic,
                ReadoutKind::StaticEigenbasis => Readout::StaticEigenbasis,
                ReadoutKind::Instantaneous => Readout::Instantaneous,
            },
            relaxation: match self.relaxation {
                RelaxationKind::Diabatic => RelaxationBasis::Diabatic,
                RelaxationKind::Instantaneous => RelaxationBasis::Instantaneous,
            },
            ..IntegrationConfig::default()
        }
    }
}

impl RunConfig {
    /// Parse a JSON document and check it.
    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(CliError::config)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read a config file; `None` gives the defaults.
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                Self::from_json(&text).map_err(|e| match e {
                    CliError::Config(m) => CliError::Config(format!("{}: {m}", p.display())),
                    other => other,
                })
            }
        }
    }

    pub fn simulation(&self) -> SimulationParams {
        SimulationParams {
            qubit: QubitParams {
                delta_c: self.qubit.delta_c,
                alpha: self.qubit.alpha,
                c_geom: self.qubit.c_geom,
                v_g0: self.qubit.v_g0,
            },
            dec: DecoherenceParams { t1: self.decoherence.t1, t2: self.decoherence.t2 },
            resonator: ResonatorParams {
                l: self.resonator.l,
                c_p: self.resonator.c_p,
                q: self.resonator.q,
                f_rf: self.resonator.f_rf,
            },
            f_mw: self.drive.f_mw,
            kappa: self.drive.kappa,
        }
    }

    pub fn decay_options(&self) -> DecayFitOptions {
        DecayFitOptions { window: (self.fft.window_min, self.fft.window_max), noise_floor: self.fft.noise_floor }
    }

    pub fn dft_method(&self) -> DftMethod {
        match self.fft.method {
            DftKind::Direct => DftMethod::Direct,
            DftKind::Radix2 => DftMethod::Radix2,
        }
    }

    pub fn t1_grid(&self) -> Vec<f64> {
        log_grid(self.fit.t1_min, self.fit.t1_max, self.fit.t1_grid_points)
    }

    pub fn validate(&self) -> CliResult<()> {
        self.simulation().validate().map_err(CliError::config)?;
        self.grid.spec().validate().map_err(CliError::config)?;
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return bad("noise_deg must be finite and >= 0");
        }
        let ls = &self.lineshape;
        if !(ls.v_min.is_finite() && ls.v_max.is_finite() && ls.v_min < ls.v_max) {
            return bad("lineshape: need finite v_min_V < v_max_V");
        }
        if ls.n_points < 2 {
            return bad("lineshape: n_points must be >= 2");
        }
        if !(ls.noise_fraction >= 0.0 && ls.noise_fraction.is_finite()) {
            return bad("lineshape: noise_fraction must be finite and >= 0");
        }
        let ft = &self.fft;
        if !(ft.window_min >= 0.0 && ft.window_min < ft.window_max) {
            return bad("fft: need 0 <= window_min_ps < window_max_ps");
        }
        if !(ft.noise_floor >= 0.0 && ft.noise_floor < 1.0) {
            return bad("fft: noise_floor must be in [0, 1)");
        }
        let fit = &self.fit;
        if !(fit.t1_min > 0.0 && fit.t1_min < fit.t1_max && fit.t1_max.is_finite()) {
            return bad("fit: need 0 < t1_grid_min_ps < t1_grid_max_ps");
        }
        if fit.t1_grid_points < 3 {
            return bad("fit: t1_grid_points must be >= 3");
        }
        if fit.max_iter == 0 {
            return bad("fit: max_iter must be >= 1");
        }
        if fit.init_delta_c.is_some_and(|v| !(v > 0.0 && v.is_finite())) {
            return bad("fit: init_delta_c_ueV must be > 0");
        }
        if fit.init_v_g0.is_some_and(|v| !v.is_finite()) || !fit.init_scale.is_finite() {
            return bad("fit: initial values must be finite");
        }
        let o = &self.oracle;
        o.grid().validate().map_err(|e| CliError::Config(format!("oracle: {e}")))?;
        if o.n_eps > ORACLE_MAX_EPS || o.n_amp > ORACLE_MAX_AMP {
            return Err(CliError::Config(format!(
                "oracle: grid {}x{} exceeds {ORACLE_MAX_EPS}x{ORACLE_MAX_AMP}",
                o.n_eps, o.n_amp
            )));
        }
        if !(o.amp_over_hf_min >= 0.0 && o.amp_over_hf_min <= o.amp_over_hf_max && o.amp_over_hf_max.is_finite()) {
            return bad("oracle: need 0 <= amp_over_hf_min <= amp_over_hf_max");
        }
        if o.amp_over_hf_points == 0 {
            return bad("oracle: amp_over_hf_points must be >= 1");
        }
        if !(o.tolerance > 0.0) {
            return bad("oracle: tolerance must be > 0");
        }
        o.integration().validate().map_err(|e| CliError::Config(format!("oracle: {e}")))?;
        Ok(())
    }

    /// Canonical serialization: struct field order, shortest round-trip floats.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// SHA-256 of [`Self::canonical_json`], lowercase hex.
    pub fn hash(&self) -> String {
        sha256_hex(self.canonical_json().as_bytes())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
