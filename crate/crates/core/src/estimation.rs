//! Inverse problems: lineshape fit, `T₁` fit and lever-arm calibration.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dispersive::{phase_shift, quantum_capacitance, ResonatorParams};
use crate::error::{finite, positive, Error, Result};
use crate::lsq::{jacobian, levenberg_marquardt, LsqOptions};
use crate::math;
use crate::params::{DecoherenceParams, QubitParams};
use crate::simulate::{closed_form_row_with, SimulationParams};
use crate::spectral::PhaseMap;
use crate::steady_state::PhotonLadder;
use crate::units::photon_energy;

/// One fitted quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub name: &'static str,
    pub unit: &'static str,
    pub value: f64,
    /// One sigma from the linearized covariance.
    pub uncertainty: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: Vec<Estimate>,
    /// RMS misfit in data units.
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub warnings: Vec<String>,
    /// `(parameter, rms misfit)` pairs for scan-based fits.
    pub misfit_curve: Vec<(f64, f64)>,
}

impl FitResult {
    pub fn get(&self, name: &str) -> Option<&Estimate> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn value(&self, name: &str) -> f64 {
        self.get(name).map_or(f64::NAN, |p| p.value)
    }

    pub fn uncertainty(&self, name: &str) -> f64 {
        self.get(name).map_or(f64::NAN, |p| p.uncertainty)
    }
}

/// Starting point for [`fit_lineshape`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineshapeInit {
    /// µeV.
    pub delta_c: f64,
    /// V.
    pub v_g0: f64,
    pub scale: f64,
}

pub const MIN_LINESHAPE_POINTS: usize = 10;

/// Adiabatic phase lineshape in degrees, before the free scale.
pub fn lineshape_model(
    v_g: f64,
    delta_c: f64,
    v_g0: f64,
    alpha: f64,
    res: &ResonatorParams,
) -> Result<f64> {
    let q = QubitParams { delta_c, alpha, c_geom: 0.0, v_g0 };
    let eps = 1e6 * alpha * (v_g - v_g0);
    Ok(phase_shift(quantum_capacitance(eps, &q, 1.0)?, res).1)
}

/// Fit `Δc`, `V_G0` and an overall scale to an adiabatic phase lineshape.
pub fn fit_lineshape(
    v_g: &[f64],
    phase: &[f64],
    init: &LineshapeInit,
    alpha: f64,
    res: &ResonatorParams,
    opts: &LsqOptions,
) -> Result<FitResult> {
    if v_g.len() != phase.len() {
        return Err(Error::BadShape(format!("{} voltages, {} phases", v_g.len(), phase.len())));
    }
    if v_g.len() < MIN_LINESHAPE_POINTS {
        return Err(Error::BadShape(format!(
            "{} points, a lineshape fit needs at least {MIN_LINESHAPE_POINTS}",
            v_g.len()
        )));
    }
    for (&v, &p) in v_g.iter().zip(phase) {
        finite("v_g", v)?;
        finite("phase", p)?;
    }
    positive("alpha", alpha)?;
    positive("delta_c", init.delta_c)?;
    res.validate()?;
    let lo = phase.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = phase.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 0.0 {
        return Err(Error::DegenerateData(format!("flat phase trace")));
    }

    let residual = |p: &[f64], r: &mut [f64]| -> Result<()> {
        // keep Δc on the physical side during trial steps
        let dc = math::abs(p[0]).max(1e-9);
        for i in 0..v_g.len() {
            r[i] = p[2] * lineshape_model(v_g[i], dc, p[1], alpha, res)? - phase[i];
        }
        Ok(())
    };
    let width_v = init.delta_c / (1e6 * alpha);
    let typical = [init.delta_c, width_v, 1.0];
    let out = levenberg_marquardt(
        residual,
        &[init.delta_c, init.v_g0, init.scale],
        &typical,
        v_g.len(),
        opts,
    )?;
    let u = out.uncertainties();
    let mut warnings = Vec::new();
    if !out.converged {
        warnings.push(format!(
            "not converged after {} iterations (gradient cosine {:e}); best-so-far reported",
            out.iterations, out.gradient_cosine
        ));
    }
    Ok(FitResult {
        params: vec![
            Estimate { name: "delta_c", unit: "ueV", value: math::abs(out.x[0]), uncertainty: u[0] },
            Estimate { name: "v_g0", unit: "V", value: out.x[1], uncertainty: u[1] },
            Estimate { name: "scale", unit: "", value: out.x[2], uncertainty: u[2] },
        ],
        residual_norm: out.rms(),
        iterations: out.iterations,
        converged: out.converged,
        warnings,
        misfit_curve: Vec::new(),
    })
}

/// Closed-form map at the given `T₁` on the axes of `map`. `T₂` comes from
/// `params.dec.t2`. The formula is evaluated even where `T₂ > 2T₁`.
pub fn forward_map_values(map: &PhaseMap, params: &SimulationParams, t1: f64) -> Result<Vec<f64>> {
    positive("t1", t1)?;
    let p = SimulationParams { dec: DecoherenceParams { t1, t2: params.dec.t2 }, ..*params };
    let reach = map.eps_axis.iter().fold(0.0f64, |m, e| m.max(math::abs(*e)));
    let mut out = Vec::with_capacity(map.values.len());
    for &a in &map.amp_axis {
        let ladder = PhotonLadder::covering(&p.qubit, &p.drive(a), reach)?;
        out.extend(closed_form_row_with(&map.eps_axis, &ladder, &p)?);
    }
    Ok(out)
}

/// RMS difference between `map` and the closed form at `T₁`, degrees.
pub fn t1_misfit(map: &PhaseMap, params: &SimulationParams, t1: f64) -> Result<f64> {
    let model = forward_map_values(map, params, t1)?;
    let ss: f64 = model.iter().zip(&map.values).map(|(m, d)| (m - d) * (m - d)).sum();
    Ok(math::sqrt(ss / model.len() as f64))
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;
/// Relative width at which the golden-section search stops.
pub const T1_REFINE_TOL: f64 = 1e-5;

/// Refine a `T₁` grid scan with golden-section search (in `ln T₁`) around
/// the best grid point. `scan` holds `(t1, misfit)` sorted by `t1`.
pub fn refine_t1<F>(scan: &[(f64, f64)], mut misfit: F) -> Result<(f64, f64, usize, Vec<String>)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if scan.len() < 3 {
        return Err(Error::BadShape(format!("T1 grid needs at least 3 points, got {}", scan.len())));
    }
    if scan.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::NonUniformAxis("t1_grid"));
    }
    let (best, _) = scan
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |b, (i, p)| if p.1 < b.1 { (i, p.1) } else { b });
    let mut warnings = Vec::new();
    if best == 0 || best == scan.len() - 1 {
        warnings.push(format!(
            "best T1 at grid boundary ({} ps); extend grid",
            scan[best].0
        ));
    }
    let lo_i = best.saturating_sub(1);
    let hi_i = (best + 1).min(scan.len() - 1);
    let (mut a, mut b) = (math::ln(scan[lo_i].0), math::ln(scan[hi_i].0));
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = misfit(math::exp(c))?;
    let mut fd = misfit(math::exp(d))?;
    let mut evals = 2;
    while (b - a) > T1_REFINE_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = misfit(math::exp(c))?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = misfit(math::exp(d))?;
        }
        evals += 1;
    }
    let (mut t1, mut f) = if fc < fd { (math::exp(c), fc) } else { (math::exp(d), fd) };
    // never report worse than the grid itself
    if scan[best].1 < f {
        t1 = scan[best].0;
        f = scan[best].1;
    }
    Ok((t1, f, evals, warnings))
}

/// One-sigma `T₁` uncertainty from the linearized model at `t1`.
fn t1_uncertainty(map: &PhaseMap, params: &SimulationParams, t1: f64) -> Result<f64> {
    let m = map.values.len();
    let mut resid = |p: &[f64], r: &mut [f64]| -> Result<()> {
        let v = forward_map_values(map, params, p[0])?;
        for i in 0..m {
            r[i] = v[i] - map.values[i];
        }
        Ok(())
    };
    let jac = jacobian(&mut resid, &[t1], &[t1], m, 1e-6)?;
    let mut r = vec![0.0; m];
    resid(&[t1], &mut r)?;
    let ssr: f64 = r.iter().map(|v| v * v).sum();
    let jtj: f64 = jac.iter().map(|v| v * v).sum();
    if jtj == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(math::sqrt(ssr / (m as f64 - 1.0) / jtj))
}

/// Fit `T₁` to a phase map with `T₂` held at `params.dec.t2`: misfit scan on
/// `t1_grid` followed by golden-section refinement.
pub fn fit_t1(map: &PhaseMap, params: &SimulationParams, t1_grid: &[f64]) -> Result<FitResult> {
    map.validate()?;
    let scan: Vec<(f64, f64)> = t1_grid
        .iter()
        .map(|&t1| t1_misfit(map, params, t1).map(|m| (t1, m)))
        .collect::<Result<_>>()?;
    fit_t1_from_scan(map, params, scan)
}

/// [`fit_t1`] after the grid scan, for callers that evaluate the grid
/// themselves (e.g. in parallel).
pub fn fit_t1_from_scan(
    map: &PhaseMap,
    params: &SimulationParams,
    scan: Vec<(f64, f64)>,
) -> Result<FitResult> {
    positive("t2", params.dec.t2)?;
    let (t1, misfit, evals, warnings) = refine_t1(&scan, |t| t1_misfit(map, params, t))?;
    let sigma = t1_uncertainty(map, params, t1)?;
    Ok(FitResult {
        params: vec![
            Estimate { name: "t1", unit: "ps", value: t1, uncertainty: sigma },
            Estimate { name: "t2", unit: "ps", value: params.dec.t2, uncertainty: 0.0 },
        ],
        residual_norm: misfit,
        iterations: evals,
        converged: misfit.is_finite(),
        warnings,
        misfit_curve: scan,
    })
}

/// Log-spaced `T₁` grid, ps.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (math::ln(lo), math::ln(hi));
    (0..n).map(|i| math::exp(a + (b - a) * i as f64 / (n - 1) as f64)).collect()
}

/// Lever arm from the gate spacing of adjacent photon resonances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaCalibration {
    pub alpha: f64,
    /// Standard deviation of the per-spacing estimates.
    pub spread: f64,
}

/// `α = h·f/(e·ΔV_G)` averaged over the given spacings (V).
pub fn calibrate_alpha(spacings: &[f64], f_mw: f64) -> Result<AlphaCalibration> {
    positive("f_mw", f_mw)?;
    if spacings.is_empty() {
        return Err(Error::BadShape(format!("no resonance spacings given")));
    }
    let hf = photon_energy(f_mw);
    let each: Vec<f64> = spacings
        .iter()
        .map(|&dv| positive("spacing", dv).map(|dv| hf / (1e6 * dv)))
        .collect::<Result<_>>()?;
    let n = each.len() as f64;
    let alpha = each.iter().sum::<f64>() / n;
    let var = each.iter().map(|a| (a - alpha) * (a - alpha)).sum::<f64>() / n;
    Ok(AlphaCalibration { alpha, spread: math::sqrt(var) })
}
