//! Fourier analysis of phase maps.
//!
//! Multi-photon resonances sit every `hf` in detuning, so along `ε` an
//! interferogram is a comb whose Fourier transform peaks at multiples of the
//! drive period when the conjugate variable is measured in time,
//! `k_ε = j·h/(N·Δε)`. Dephasing broadens the resonances and makes the
//! `k_A = 0` cut of the spectrum fall off as `exp(−k_ε/T₂)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{finite, positive, Error, Result};
use crate::math;
use crate::simulate::SimulationParams;
use crate::units::PLANCK_UEV_PS;

/// Relative tolerance on axis spacing.
pub const AXIS_TOLERANCE: f64 = 1e-9;
/// Smallest grid accepted by [`dft2`] along either axis.
pub const MIN_DFT_POINTS: usize = 32;

/// Which forward model produced a simulated map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    ClosedForm,
    BlochOracle,
}

/// Where a map came from.
#[derive(Debug, Clone, PartialEq)]
pub enum MapSource {
    Measured,
    Simulated { model: Model, params: SimulationParams },
}

/// Phase response on a regular `(ε, A)` grid, degrees, row-major `[amp][eps]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMap {
    pub eps_axis: Vec<f64>,
    pub amp_axis: Vec<f64>,
    pub values: Vec<f64>,
    pub source: MapSource,
}

/// Spacing of a strictly increasing, uniform axis.
pub fn uniform_step(name: &'static str, axis: &[f64]) -> Result<f64> {
    if axis.len() < 2 {
        return Err(Error::BadShape(format!("axis {name} needs at least 2 points")));
    }
    for &v in axis {
        finite(name, v)?;
    }
    let n = axis.len();
    let step = (axis[n - 1] - axis[0]) / (n - 1) as f64;
    if step <= 0.0 {
        return Err(Error::NonUniformAxis(name));
    }
    for w in axis.windows(2) {
        let d = w[1] - w[0];
        if d <= 0.0 || math::abs(d - step) > AXIS_TOLERANCE * step {
            return Err(Error::NonUniformAxis(name));
        }
    }
    Ok(step)
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { hi } else { lo + step * i as f64 }).collect()
}

impl PhaseMap {
    pub fn new(
        eps_axis: Vec<f64>,
        amp_axis: Vec<f64>,
        values: Vec<f64>,
        source: MapSource,
    ) -> Result<Self> {
        let m = Self { eps_axis, amp_axis, values, source };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        uniform_step("eps", &self.eps_axis)?;
        uniform_step("amp", &self.amp_axis)?;
        if self.values.len() != self.n_eps() * self.n_amp() {
            return Err(Error::BadShape(format!(
                "{} values for a {}x{} grid",
                self.values.len(),
                self.n_amp(),
                self.n_eps()
            )));
        }
        for &v in &self.values {
            finite("phase", v)?;
        }
        Ok(())
    }

    pub fn n_eps(&self) -> usize {
        self.eps_axis.len()
    }

    pub fn n_amp(&self) -> usize {
        self.amp_axis.len()
    }

    pub fn row(&self, i_amp: usize) -> &[f64] {
        let n = self.n_eps();
        &self.values[i_amp * n..(i_amp + 1) * n]
    }

    pub fn get(&self, i_amp: usize, i_eps: usize) -> f64 {
        self.values[i_amp * self.n_eps() + i_eps]
    }

    /// Every value identical.
    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|&v| v == self.values[0])
    }

    pub fn eps_step(&self) -> f64 {
        (self.eps_axis[self.n_eps() - 1] - self.eps_axis[0]) / (self.n_eps() - 1) as f64
    }

    pub fn amp_step(&self) -> f64 {
        (self.amp_axis[self.n_amp() - 1] - self.amp_axis[0]) / (self.n_amp() - 1) as f64
    }
}

/// Magnitude of the 2D transform, both axes in ascending order with the
/// zero frequency at index `⌊N/2⌋`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2D {
    /// ps.
    pub k_eps_axis: Vec<f64>,
    /// 1/µeV.
    pub k_amp_axis: Vec<f64>,
    /// Row-major `[k_amp][k_eps]`.
    pub magnitude: Vec<f64>,
}

impl Spectrum2D {
    pub fn n_k_eps(&self) -> usize {
        self.k_eps_axis.len()
    }

    pub fn n_k_amp(&self) -> usize {
        self.k_amp_axis.len()
    }

    pub fn get(&self, i_amp: usize, i_eps: usize) -> f64 {
        self.magnitude[i_amp * self.n_k_eps() + i_eps]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DftMethod {
    /// Direct `O(N²)` sum with a twiddle table; any length.
    #[default]
    Direct,
    /// Iterative Cooley-Tukey; lengths must be powers of two.
    Radix2,
}

fn twiddles(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            let a = -2.0 * PI * k as f64 / n as f64;
            Complex64::new(math::cos(a), math::sin(a))
        })
        .collect()
}

fn dft_direct(buf: &mut [Complex64], tw: &[Complex64], scratch: &mut Vec<Complex64>) {
    let n = buf.len();
    scratch.clear();
    for j in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut idx = 0;
        for x in buf.iter() {
            acc += x * tw[idx];
            idx += j;
            if idx >= n {
                idx -= n;
            }
        }
        scratch.push(acc);
    }
    buf.copy_from_slice(scratch);
}

fn fft_radix2(buf: &mut [Complex64], tw: &[Complex64]) {
    let n = buf.len();
    let bits = n.trailing_zeros();
    if n <= 1 {
        return;
    }
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let w = tw[k * stride];
                let a = buf[start + k];
                let b = buf[start + k + len / 2] * w;
                buf[start + k] = a + b;
                buf[start + k + len / 2] = a - b;
            }
        }
        len <<= 1;
    }
}

struct Plan {
    method: DftMethod,
    tw: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Plan {
    fn new(n: usize, method: DftMethod) -> Result<Self> {
        if method == DftMethod::Radix2 && !n.is_power_of_two() {
            return Err(Error::BadShape(format!("radix-2 transform needs a power of two, got {n}")));
        }
        Ok(Self { method, tw: twiddles(n), scratch: Vec::with_capacity(n) })
    }

    fn run(&mut self, buf: &mut [Complex64]) {
        match self.method {
            DftMethod::Direct => dft_direct(buf, &self.tw, &mut self.scratch),
            DftMethod::Radix2 => fft_radix2(buf, &self.tw),
        }
    }
}

/// Unnormalized forward DFT of a complex sequence.
pub fn dft(input: &[Complex64], method: DftMethod) -> Result<Vec<Complex64>> {
    let mut buf = input.to_vec();
    Plan::new(buf.len(), method)?.run(&mut buf);
    Ok(buf)
}

/// Ascending frequency axis for `n` samples of spacing `step`, scaled by
/// `scale`, with zero at index `⌊n/2⌋`.
fn centred_axis(n: usize, step: f64, scale: f64) -> Vec<f64> {
    let half = (n / 2) as isize;
    (0..n as isize).map(|p| (p - half) as f64 * scale / (n as f64 * step)).collect()
}

fn centred_source(p: usize, n: usize) -> usize {
    (p + n - n / 2) % n
}

/// Full complex transform of the mean-subtracted map, natural order.
pub fn dft2_complex(map: &PhaseMap, method: DftMethod) -> Result<Vec<Complex64>> {
    map.validate()?;
    let (ne, na) = (map.n_eps(), map.n_amp());
    if ne < MIN_DFT_POINTS || na < MIN_DFT_POINTS {
        return Err(Error::BadShape(format!("grid {na}x{ne} smaller than 32x32")));
    }
    let mean = map.values.iter().sum::<f64>() / map.values.len() as f64;
    let mut data: Vec<Complex64> =
        map.values.iter().map(|&v| Complex64::new(v - mean, 0.0)).collect();

    let mut rows = Plan::new(ne, method)?;
    for row in data.chunks_mut(ne) {
        rows.run(row);
    }
    let mut cols = Plan::new(na, method)?;
    let mut col = vec![Complex64::new(0.0, 0.0); na];
    for j in 0..ne {
        for i in 0..na {
            col[i] = data[i * ne + j];
        }
        cols.run(&mut col);
        for i in 0..na {
            data[i * ne + j] = col[i];
        }
    }
    Ok(data)
}

/// Magnitude spectrum with the direct transform.
pub fn dft2(map: &PhaseMap) -> Result<Spectrum2D> {
    dft2_with(map, DftMethod::Direct)
}

pub fn dft2_with(map: &PhaseMap, method: DftMethod) -> Result<Spectrum2D> {
    let data = dft2_complex(map, method)?;
    let (ne, na) = (map.n_eps(), map.n_amp());
    let mut magnitude = Vec::with_capacity(ne * na);
    for p in 0..na {
        let i = centred_source(p, na);
        for q in 0..ne {
            magnitude.push(data[i * ne + centred_source(q, ne)].norm());
        }
    }
    Ok(Spectrum2D {
        k_eps_axis: centred_axis(ne, map.eps_step(), PLANCK_UEV_PS),
        k_amp_axis: centred_axis(na, map.amp_step(), 1.0),
        magnitude,
    })
}

/// Magnitude along `k_ε ≥ 0` at fixed `k_A`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    /// ps.
    pub k: Vec<f64>,
    pub magnitude: Vec<f64>,
}

/// The `k_A = 0` row restricted to `k_ε ≥ 0`.
pub fn extract_axis_trace(spec: &Spectrum2D) -> Result<Trace> {
    let row = spec
        .k_amp_axis
        .iter()
        .position(|&k| k == 0.0)
        .ok_or_else(|| Error::BadShape(format!("spectrum has no k_amp = 0 row")))?;
    let start = spec.n_k_eps() / 2;
    let ne = spec.n_k_eps();
    Ok(Trace {
        k: spec.k_eps_axis[start..].to_vec(),
        magnitude: spec.magnitude[row * ne + start..(row + 1) * ne].to_vec(),
    })
}

/// Result of the log-linear decay fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// ps.
    pub t2: f64,
    /// One standard error, ps.
    pub t2_uncertainty: f64,
    /// `[k_min, k_max]` of the points actually used, ps.
    pub fit_window: (f64, f64),
    pub r_squared: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFitOptions {
    /// Inclusive `k_ε` range, ps.
    pub window: (f64, f64),
    /// Bins below this fraction of the trace maximum are dropped.
    pub noise_floor: f64,
}

impl Default for DecayFitOptions {
    fn default() -> Self {
        Self { window: (0.0, f64::INFINITY), noise_floor: 0.01 }
    }
}

/// Window used by [`estimate_t2`], ps. Starts past the first comb tooth so
/// the low-`k` envelope of individual lines is excluded.
pub const PIPELINE_WINDOW_PS: (f64, f64) = (20.0, 300.0);
/// Noise floor used by [`estimate_t2`], fraction of the trace maximum.
pub const PIPELINE_NOISE_FLOOR: f64 = 0.1;
pub const MIN_DECAY_POINTS: usize = 8;

/// Fit `ln|F(k)| = c − k/T₂` by least squares over the window.
pub fn fit_exponential_decay(trace: &Trace, opts: &DecayFitOptions) -> Result<DecayFit> {
    if trace.k.len() != trace.magnitude.len() {
        return Err(Error::BadShape(format!(
            "{} k values, {} magnitudes",
            trace.k.len(),
            trace.magnitude.len()
        )));
    }
    let peak = trace.magnitude.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0) {
        // nothing to decay from, e.g. a constant map after mean removal
        return Err(Error::NoDecay);
    }
    let floor = opts.noise_floor * peak;
    let (lo, hi) = opts.window;
    let pts: Vec<(f64, f64)> = trace
        .k
        .iter()
        .zip(&trace.magnitude)
        .filter(|&(&k, &m)| k > 0.0 && k >= lo && k <= hi && m > 0.0 && m > floor)
        .map(|(&k, &m)| (k, math::ln(m)))
        .collect();
    if pts.len() < MIN_DECAY_POINTS {
        return Err(Error::BadShape(format!(
            "{} usable points in the decay window, need {MIN_DECAY_POINTS}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mk = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mk) * (p.0 - mk)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mk) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    if !(slope < 0.0) {
        return Err(Error::NoDecay);
    }
    let intercept = my - slope * mk;
    let ssr: f64 = pts
        .iter()
        .map(|p| {
            let r = p.1 - (intercept + slope * p.0);
            r * r
        })
        .sum();
    let se = math::sqrt(ssr / (n - 2.0) / sxx);
    let r_squared = if syy > 0.0 { (1.0 - ssr / syy).clamp(0.0, 1.0) } else { 1.0 };
    Ok(DecayFit {
        t2: -1.0 / slope,
        t2_uncertainty: se / (slope * slope),
        fit_window: (pts[0].0, pts[pts.len() - 1].0),
        r_squared,
        n_points: pts.len(),
    })
}

/// Spectrum, `k_A = 0` trace and decay fit with the pipeline defaults.
pub fn estimate_t2(map: &PhaseMap) -> Result<(Spectrum2D, Trace, DecayFit)> {
    let spec = dft2(map)?;
    if map.is_constant() {
        // round-off in the mean would otherwise leave a spectrum of noise
        return Err(Error::NoDecay);
    }
    let trace = extract_axis_trace(&spec)?;
    let opts = DecayFitOptions { window: PIPELINE_WINDOW_PS, noise_floor: PIPELINE_NOISE_FLOOR };
    let fit = fit_exponential_decay(&trace, &opts)?;
    Ok((spec, trace, fit))
}

/// Driving regime from the number of drive periods per coherence time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Coherent,
    Intermediate,
    Incoherent,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Coherent => "coherent",
            Regime::Intermediate => "intermediate",
            Regime::Incoherent => "incoherent",
        }
    }
}

pub const COHERENT_MIN_PRODUCT: f64 = 3.0;
pub const INCOHERENT_MAX_PRODUCT: f64 = 1.5;

/// Classify on `f[GHz]·T₂[ps]/1000`, the number of passages within `T₂`.
pub fn classify_regime(f_mw: f64, t2: f64) -> Result<Regime> {
    positive("f_mw", f_mw)?;
    positive("t2", t2)?;
    let product = f_mw * t2 / 1000.0;
    Ok(if product >= COHERENT_MIN_PRODUCT {
        Regime::Coherent
    } else if product <= INCOHERENT_MAX_PRODUCT {
        Regime::Incoherent
    } else {
        Regime::Intermediate
    })
}
