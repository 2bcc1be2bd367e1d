//! Time-domain oracle: the driven, damped Bloch equations integrated with
//! fixed-step RK4.
//!
//! `H = ½(ε(t)σz + Δc σx)` with `ε(t) = ε₀ + A·cos(2πft)`. The state is the
//! ground-aligned Bloch vector `r` (`r = +n̂` is the ground state of a field
//! along `n̂`), which precesses as `ṙ = (1/ħ)·B × r` with `B = (Δc, 0, ε(t))`.
//! Dephasing acts at `1/T₂` transverse to the relaxation target and
//! relaxation at `1/T₁` along it.
//!
//! The relaxation target defaults to the diabatic state that is the ground
//! state at large `|ε|` on the side of `ε₀`, i.e. `(0, 0, sgn ε₀)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{finite, Error, Result};
use crate::math;
use crate::params::{DecoherenceParams, DriveParams, QubitParams};
use crate::units::HBAR_UEV_PS;

/// Ground-aligned Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochState {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.dot(self))
    }

    pub fn dot(&self, o: &BlochState) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    fn cross(&self, o: &BlochState) -> BlochState {
        BlochState::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    fn axpy(&self, a: f64, o: &BlochState) -> BlochState {
        BlochState::new(self.x + a * o.x, self.y + a * o.y, self.z + a * o.z)
    }

    fn scale(&self, a: f64) -> BlochState {
        BlochState::new(a * self.x, a * self.y, a * self.z)
    }
}

/// Decay rates, 1/ps. Zero switches a channel off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Damping {
    pub gamma1: f64,
    pub gamma2: f64,
}

impl Damping {
    pub const NONE: Damping = Damping { gamma1: 0.0, gamma2: 0.0 };
}

impl From<&DecoherenceParams> for Damping {
    fn from(d: &DecoherenceParams) -> Self {
        Self { gamma1: 1.0 / d.t1, gamma2: 1.0 / d.t2 }
    }
}

/// What `T₁` relaxes towards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RelaxationBasis {
    /// Large-`|ε|` ground state on the side of `ε₀`, `(0, 0, sgn ε₀)`.
    #[default]
    Diabatic,
    /// Instantaneous ground state `B(t)/|B(t)|`.
    Instantaneous,
}

/// How `P₊` is read off the Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Readout {
    /// Population of the diabatic state opposite to the relaxation target:
    /// `½(1 − sgn(ε₀)·z)`.
    #[default]
    Diabatic,
    /// Excited population of the undriven Hamiltonian at `ε₀`: `½(1 − r·n̂₀)`.
    StaticEigenbasis,
    /// Excited population along the instantaneous field: `½(1 − r·n̂(t))`.
    Instantaneous,
}

/// Starting point of the integration.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum InitialState {
    /// The relaxation target at `t = 0`.
    #[default]
    Relaxed,
    /// Ground state of the undriven Hamiltonian at `ε₀`.
    StaticGround,
    Custom(BlochState),
}

pub const MIN_STEPS_PER_PERIOD: usize = 512;
pub const MIN_AVERAGE_PERIODS: usize = 20;
/// Largest step as a fraction of the fastest precession period `h/ΔE_max`.
pub const MAX_STEP_FRACTION: f64 = 0.02;
/// Default largest precession angle per step, rad. RK4 shrinks a pure
/// rotation by about `θ⁶/144` per step, so this keeps the norm drift
/// below 1e-9 per drive period for gaps up to a few meV.
pub const DEFAULT_MAX_PHASE_PER_STEP: f64 = 0.015;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationConfig {
    /// Lower bound on RK4 steps per drive period; raised automatically when
    /// the precession at the largest gap would be under-resolved.
    pub steps_per_period: usize,
    /// `None`: `⌈50·max(T₁,T₂)·f⌉`.
    pub transient_periods: Option<usize>,
    pub average_periods: usize,
    /// Largest `ΔE_max·dt/ħ`, rad; at most `2π·MAX_STEP_FRACTION`.
    pub max_phase_per_step: f64,
    pub relaxation: RelaxationBasis,
    pub readout: Readout,
    pub initial: InitialState,
    /// Steady-state criterion on the change of consecutive period averages.
    pub steady_tol: f64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            steps_per_period: MIN_STEPS_PER_PERIOD,
            transient_periods: None,
            average_periods: MIN_AVERAGE_PERIODS,
            max_phase_per_step: DEFAULT_MAX_PHASE_PER_STEP,
            relaxation: RelaxationBasis::default(),
            readout: Readout::default(),
            initial: InitialState::default(),
            steady_tol: 1e-6,
        }
    }
}

impl IntegrationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps_per_period < MIN_STEPS_PER_PERIOD {
            return Err(Error::OutOfRange {
                name: "steps_per_period",
                value: self.steps_per_period as f64,
                expected: ">= 512",
            });
        }
        if self.average_periods < MIN_AVERAGE_PERIODS {
            return Err(Error::OutOfRange {
                name: "average_periods",
                value: self.average_periods as f64,
                expected: ">= 20",
            });
        }
        let bound = 2.0 * PI * MAX_STEP_FRACTION;
        if !(self.max_phase_per_step > 0.0 && self.max_phase_per_step <= bound) {
            return Err(Error::OutOfRange {
                name: "max_phase_per_step",
                value: self.max_phase_per_step,
                expected: "in (0, 0.1257]",
            });
        }
        Ok(())
    }

    pub fn transient_for(&self, drive: &DriveParams, damping: &Damping) -> usize {
        if let Some(n) = self.transient_periods {
            return n;
        }
        let slowest = [damping.gamma1, damping.gamma2]
            .into_iter()
            .filter(|&g| g > 0.0)
            .map(|g| 1.0 / g)
            .fold(0.0, f64::max);
        math::ceil(50.0 * slowest * drive.f_mw * 1e-3) as usize
    }

    /// Steps per period actually used: at least `steps_per_period`, and
    /// enough that `ΔE_max·dt/ħ ≤ max_phase_per_step` (which implies
    /// `dt ≤ 0.02·h/ΔE_max`).
    pub fn steps_for(&self, eps0: f64, qubit: &QubitParams, drive: &DriveParams) -> usize {
        let gap_max = math::hypot(math::abs(eps0) + drive.a_mw, qubit.delta_c);
        let dt_max = self.max_phase_per_step * HBAR_UEV_PS / gap_max;
        let needed = math::ceil(drive.period() / dt_max) as usize;
        let n = self.steps_per_period.max(needed);
        // even keeps the half-step table aligned with whole periods
        n + (n & 1)
    }
}

/// Right-hand side of the Bloch equations for one operating point.
#[derive(Debug, Clone, Copy)]
pub struct BlochModel {
    pub eps0: f64,
    pub delta_c: f64,
    pub amplitude: f64,
    /// Angular drive frequency, rad/ps.
    pub omega: f64,
    pub damping: Damping,
    pub relaxation: RelaxationBasis,
}

impl BlochModel {
    pub fn new(
        eps0: f64,
        qubit: &QubitParams,
        drive: &DriveParams,
        damping: Damping,
        relaxation: RelaxationBasis,
    ) -> Result<Self> {
        finite("eps0", eps0)?;
        drive.validate()?;
        Ok(Self {
            eps0,
            delta_c: qubit.delta_c,
            amplitude: drive.a_mw,
            omega: 2.0 * PI * drive.f_mw * 1e-3,
            damping,
            relaxation,
        })
    }

    /// `sgn ε₀`, with `ε₀ = 0` counted as positive.
    pub fn side(&self) -> f64 {
        if self.eps0 < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn detuning(&self, t: f64) -> f64 {
        self.eps0 + self.amplitude * math::cos(self.omega * t)
    }

    /// Unit ground axis of the field `(Δc, 0, ε)`. The `x`-axis when the
    /// field vanishes.
    pub fn field_axis(&self, eps: f64) -> BlochState {
        let n = math::hypot(self.delta_c, eps);
        if n == 0.0 {
            return BlochState::new(1.0, 0.0, 0.0);
        }
        BlochState::new(self.delta_c / n, 0.0, eps / n)
    }

    pub fn relaxation_target(&self, eps: f64) -> BlochState {
        match self.relaxation {
            RelaxationBasis::Diabatic => BlochState::new(0.0, 0.0, self.side()),
            RelaxationBasis::Instantaneous => self.field_axis(eps),
        }
    }

    /// `ṙ` at instantaneous detuning `eps`.
    pub fn rate_at(&self, r: &BlochState, eps: f64) -> BlochState {
        let b = BlochState::new(self.delta_c, 0.0, eps);
        let mut d = b.cross(r).scale(1.0 / HBAR_UEV_PS);
        let Damping { gamma1, gamma2 } = self.damping;
        if gamma1 != 0.0 || gamma2 != 0.0 {
            let target = self.relaxation_target(eps);
            let par = r.dot(&target);
            let perp = r.axpy(-par, &target);
            d = d.axpy(-gamma2, &perp).axpy(-gamma1 * (par - 1.0), &target);
        }
        d
    }

    pub fn upper_population(&self, r: &BlochState, eps: f64, readout: Readout) -> f64 {
        let proj = match readout {
            Readout::Diabatic => self.side() * r.z,
            Readout::StaticEigenbasis => r.dot(&self.field_axis(self.eps0)),
            Readout::Instantaneous => r.dot(&self.field_axis(eps)),
        };
        0.5 * (1.0 - proj)
    }

    fn initial_state(&self, init: InitialState) -> BlochState {
        match init {
            InitialState::Relaxed => self.relaxation_target(self.detuning(0.0)),
            InitialState::StaticGround => self.field_axis(self.eps0),
            InitialState::Custom(s) => s,
        }
    }
}

/// `ṙ` at time `t` with diabatic relaxation.
pub fn bloch_derivative(
    state: BlochState,
    t: f64,
    eps0: f64,
    qubit: &QubitParams,
    drive: &DriveParams,
    dec: &DecoherenceParams,
) -> Result<BlochState> {
    let m = BlochModel::new(eps0, qubit, drive, Damping::from(dec), RelaxationBasis::Diabatic)?;
    Ok(m.rate_at(&state, m.detuning(t)))
}

/// Outcome of one integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// State at the start of every period, `samples[0]` being `t = 0`.
    pub samples: Vec<BlochState>,
    /// Period-averaged state over each averaging period.
    pub period_averages: Vec<BlochState>,
    /// `P₊` averaged over all averaging periods.
    pub p_plus: f64,
    /// Largest change between consecutive period averages (max-norm).
    pub residual: f64,
    pub steady: bool,
    /// Largest `|r|` met at any step.
    pub max_norm: f64,
    pub steps_per_period: usize,
    pub transient_periods: usize,
}

/// Integrate through the transient and the averaging window.
pub fn integrate(
    eps0: f64,
    qubit: &QubitParams,
    drive: &DriveParams,
    damping: Damping,
    cfg: &IntegrationConfig,
) -> Result<Trajectory> {
    qubit.validate()?;
    cfg.validate()?;
    let model = BlochModel::new(eps0, qubit, drive, damping, cfg.relaxation)?;
    let spp = cfg.steps_for(eps0, qubit, drive);
    let transient = cfg.transient_for(drive, &damping);
    let dt = drive.period() / spp as f64;

    // detuning at every half step of one period
    let eps_table: Vec<f64> =
        (0..2 * spp).map(|k| model.detuning(0.5 * dt * k as f64)).collect();
    let eps_at = |k: usize| eps_table[k % (2 * spp)];

    let mut r = model.initial_state(cfg.initial);
    let mut max_norm = r.norm();
    let mut samples = Vec::with_capacity(transient + cfg.average_periods + 1);
    let mut period_averages = Vec::with_capacity(cfg.average_periods);
    let mut p_sum = 0.0;
    let inv = 1.0 / spp as f64;

    for period in 0..transient + cfg.average_periods {
        samples.push(r);
        let averaging = period >= transient;
        let mut acc = BlochState::default();
        for s in 0..spp {
            let e0 = eps_at(2 * s);
            if averaging {
                acc = acc.axpy(inv, &r);
                p_sum += model.upper_population(&r, e0, cfg.readout);
            }
            let eh = eps_at(2 * s + 1);
            let e1 = eps_at(2 * s + 2);
            let k1 = model.rate_at(&r, e0);
            let k2 = model.rate_at(&r.axpy(0.5 * dt, &k1), eh);
            let k3 = model.rate_at(&r.axpy(0.5 * dt, &k2), eh);
            let k4 = model.rate_at(&r.axpy(dt, &k3), e1);
            r = r
                .axpy(dt / 6.0, &k1)
                .axpy(dt / 3.0, &k2)
                .axpy(dt / 3.0, &k3)
                .axpy(dt / 6.0, &k4);
            max_norm = max_norm.max(r.norm());
        }
        if averaging {
            period_averages.push(acc);
        }
    }
    samples.push(r);

    let residual = period_averages
        .windows(2)
        .map(|w| {
            let d = w[1].axpy(-1.0, &w[0]);
            math::abs(d.x).max(math::abs(d.y)).max(math::abs(d.z))
        })
        .fold(0.0, f64::max);
    Ok(Trajectory {
        samples,
        p_plus: p_sum / (spp * cfg.average_periods) as f64,
        steady: residual < cfg.steady_tol,
        residual,
        max_norm,
        steps_per_period: spp,
        transient_periods: transient,
        period_averages,
    })
}

/// Period-averaged `P₊` in the driven steady state.
pub fn time_averaged_upper_occupation(
    eps0: f64,
    qubit: &QubitParams,
    drive: &DriveParams,
    dec: &DecoherenceParams,
    cfg: &IntegrationConfig,
) -> Result<f64> {
    dec.validate()?;
    let run = integrate(eps0, qubit, drive, Damping::from(dec), cfg)?;
    if !run.steady {
        return Err(Error::DegenerateData(alloc::format!(
            "steady state not reached, residual {:e}",
            run.residual
        )));
    }
    Ok(run.p_plus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::PLANCK_UEV_PS;

    fn q(dc: f64) -> QubitParams {
        QubitParams { delta_c: dc, ..QubitParams::default() }
    }

    #[test]
    fn larmor_precession() {
        // Δc = 0, A = 0: precession about z at ε₀/ħ
        let drive = DriveParams::new(34.0, 0.0).unwrap();
        let model =
            BlochModel::new(50.0, &q(1e-300), &drive, Damping::NONE, RelaxationBasis::Diabatic)
                .unwrap();
        let r = BlochState::new(1.0, 0.0, 0.0);
        let d = model.rate_at(&r, 50.0);
        // ṙ = (0,0,ε)×(1,0,0)/ħ = (0, ε, 0)/ħ
        assert!(d.x.abs() < 1e-12 && d.z.abs() < 1e-12);
        assert!((d.y - 50.0 / HBAR_UEV_PS).abs() < 1e-12);

        let cfg = IntegrationConfig { transient_periods: Some(3), ..Default::default() };
        let run = integrate(50.0, &q(1e-300), &drive, Damping::NONE, &cfg).unwrap();
        // the default start (0,0,1) is parallel to the field and stays put
        assert!((run.samples[3].z - 1.0).abs() < 1e-12);
        let t = 3.0 * drive.period();
        let phase = 50.0 * t / HBAR_UEV_PS;
        let cfg = IntegrationConfig {
            transient_periods: Some(3),
            initial: InitialState::Custom(BlochState::new(1.0, 0.0, 0.0)),
            ..Default::default()
        };
        let run = integrate(50.0, &q(1e-300), &drive, Damping::NONE, &cfg).unwrap();
        let s = run.samples[3];
        assert!((s.x - math::cos(phase)).abs() < 1e-9, "{s:?}");
        assert!((s.y - math::sin(phase)).abs() < 1e-9);
    }

    #[test]
    fn field_eigenstate_is_stationary() {
        let drive = DriveParams::new(34.0, 0.0).unwrap();
        let m = BlochModel::new(0.0, &q(98.0), &drive, Damping::NONE, RelaxationBasis::Diabatic)
            .unwrap();
        let d = m.rate_at(&BlochState::new(1.0, 0.0, 0.0), 0.0);
        assert_eq!(d, BlochState::default());
    }

    #[test]
    fn pure_dephasing() {
        let drive = DriveParams::new(34.0, 0.0).unwrap();
        let damping = Damping { gamma1: 0.0, gamma2: 1.0 / 100.0 };
        let cfg = IntegrationConfig {
            transient_periods: Some(5),
            initial: InitialState::Custom(BlochState::new(1.0, 0.0, 0.0)),
            ..Default::default()
        };
        let run = integrate(0.0, &q(1e-300), &drive, damping, &cfg).unwrap();
        for (p, s) in run.samples.iter().enumerate().take(6) {
            let t = p as f64 * drive.period();
            assert!((s.x - math::exp(-t / 100.0)).abs() < 1e-10, "{p}: {s:?}");
        }
    }

    #[test]
    fn frozen_without_dynamics() {
        let drive = DriveParams::new(34.0, 0.0).unwrap();
        let start = BlochState::new(0.3, -0.4, 0.5);
        let cfg = IntegrationConfig {
            transient_periods: Some(2),
            initial: InitialState::Custom(start),
            ..Default::default()
        };
        let run = integrate(0.0, &q(1e-300), &drive, Damping::NONE, &cfg).unwrap();
        for s in &run.samples {
            assert!((s.x - start.x).abs() < 1e-12);
            assert!((s.y - start.y).abs() < 1e-12);
            assert!((s.z - start.z).abs() < 1e-12);
        }
    }

    #[test]
    fn undriven_ground_stays_ground() {
        let drive = DriveParams::new(34.0, 0.0).unwrap();
        for readout in [Readout::StaticEigenbasis, Readout::Instantaneous] {
            let cfg = IntegrationConfig {
                transient_periods: Some(2),
                initial: InitialState::StaticGround,
                readout,
                ..Default::default()
            };
            let run = integrate(60.0, &q(98.0), &drive, Damping::NONE, &cfg).unwrap();
            assert!(run.p_plus.abs() < 1e-12, "{readout:?}: {}", run.p_plus);
        }
    }

    #[test]
    fn step_count_resolves_precession() {
        let cfg = IntegrationConfig::default();
        let drive = DriveParams::new(34.0, 100.0).unwrap();
        let n = cfg.steps_for(5000.0, &q(98.0), &drive);
        let dt = drive.period() / n as f64;
        let gap = math::hypot(5100.0, 98.0);
        assert!(dt <= MAX_STEP_FRACTION * PLANCK_UEV_PS / gap);
        let slow = DriveParams::new(34.0, 0.0).unwrap();
        assert_eq!(cfg.steps_for(0.0, &QubitParams { delta_c: 20.0, ..q(98.0) }, &slow), 512);
    }

    #[test]
    fn default_transient_length() {
        let cfg = IntegrationConfig::default();
        let drive = DriveParams::new(34.0, 0.0).unwrap();
        let d = Damping::from(&DecoherenceParams::new(100.0, 100.0).unwrap());
        assert_eq!(cfg.transient_for(&drive, &d), 170);
        assert_eq!(cfg.transient_for(&drive, &Damping::NONE), 0);
    }

    #[test]
    fn config_bounds() {
        let bad = IntegrationConfig { steps_per_period: 100, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = IntegrationConfig { average_periods: 5, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = IntegrationConfig { max_phase_per_step: 0.2, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
