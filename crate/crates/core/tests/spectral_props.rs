use lzsm_core::simulate::{closed_form_map, GridSpec, SimulationParams};
use lzsm_core::spectral::{
    dft2, dft2_with, estimate_t2, extract_axis_trace, fit_exponential_decay, linspace,
    DecayFitOptions, DftMethod, MapSource, PhaseMap, Trace,
};
use lzsm_core::units::photon_energy;
use lzsm_core::DecoherenceParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn random_map(ne: usize, na: usize, seed: u64) -> PhaseMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..ne * na).map(|_| rng.random_range(-1.0..1.0)).collect();
    PhaseMap::new(linspace(-300.0, 300.0, ne), linspace(0.0, 500.0, na), values, MapSource::Measured)
        .unwrap()
}

#[test]
fn parseval() {
    for (ne, na, seed) in [(32, 32, 1), (45, 37, 2), (64, 40, 3)] {
        let m = random_map(ne, na, seed);
        let mean = m.values.iter().sum::<f64>() / m.values.len() as f64;
        let energy: f64 = m.values.iter().map(|v| (v - mean) * (v - mean)).sum();
        let s = dft2(&m).unwrap();
        let spectral: f64 = s.magnitude.iter().map(|v| v * v).sum::<f64>() / (ne * na) as f64;
        assert!((energy - spectral).abs() / energy < 1e-9, "{energy} vs {spectral}");
    }
}

#[test]
fn linearity_in_amplitude() {
    let m = random_map(40, 32, 7);
    let scaled = PhaseMap { values: m.values.iter().map(|v| 2.5 * v).collect(), ..m.clone() };
    let a = dft2(&m).unwrap();
    let b = dft2(&scaled).unwrap();
    for (x, y) in a.magnitude.iter().zip(&b.magnitude) {
        assert!((2.5 * x - y).abs() <= 1e-12 * (1.0 + y));
    }
}

#[test]
fn point_symmetry_of_real_input() {
    let m = random_map(33, 32, 11);
    let s = dft2(&m).unwrap();
    // odd ε length: full ±k pairs; even amp length: skip the unpaired Nyquist row
    let (ca, ce) = (s.n_k_amp() / 2, s.n_k_eps() / 2);
    for i in 1..s.n_k_amp() {
        for j in 0..s.n_k_eps() {
            let (mi, mj) = (2 * ca - i, 2 * ce - j);
            if mi < s.n_k_amp() && mj < s.n_k_eps() {
                assert!((s.get(i, j) - s.get(mi, mj)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn radix2_path_matches_direct() {
    let m = random_map(64, 64, 5);
    let a = dft2_with(&m, DftMethod::Direct).unwrap();
    let b = dft2_with(&m, DftMethod::Radix2).unwrap();
    for (x, y) in a.magnitude.iter().zip(&b.magnitude) {
        assert!((x - y).abs() < 1e-9);
    }
}

#[test]
fn resonance_comb_peaks_at_drive_period() {
    // Lorentzian lines every hf in detuning
    let hf = photon_energy(34.0);
    let eps = linspace(-1000.0, 1000.0, 401);
    let amp = linspace(0.0, 1000.0, 64);
    let mut values = Vec::new();
    for _ in &amp {
        for &e in &eps {
            let mut v = 0.0;
            for n in -8i32..=8 {
                let d = e - n as f64 * hf;
                v += 1.0 / (1.0 + d * d / 100.0);
            }
            values.push(v);
        }
    }
    let m = PhaseMap::new(eps, amp, values, MapSource::Measured).unwrap();
    let t = extract_axis_trace(&dft2(&m).unwrap()).unwrap();
    let (imax, _) = t.magnitude.iter().enumerate().skip(1).fold((0, 0.0), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
    let bin = t.k[1] - t.k[0];
    let period = 1e3 / 34.0;
    assert!((t.k[imax] - period).abs() <= bin, "{} vs {period}", t.k[imax]);
}

#[test]
fn decay_fit_with_multiplicative_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let noise = Normal::new(0.0, 0.05).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let k: Vec<f64> = (0..120).map(|i| i as f64 * 2.5).collect();
        let magnitude = k.iter().map(|&k| (-k / 100.0f64).exp() * (1.0 + noise.sample(&mut rng))).collect();
        let fit = fit_exponential_decay(&Trace { k, magnitude }, &DecayFitOptions::default()).unwrap();
        worst = worst.max((fit.t2 - 100.0).abs() / 100.0);
    }
    assert!(worst < 0.10, "{worst}");
}

#[test]
fn simulated_interferogram_decays() {
    let map = closed_form_map(&GridSpec::default(), &SimulationParams::default()).unwrap();
    let (_, trace, fit) = estimate_t2(&map).unwrap();
    assert!(trace.magnitude[5] > trace.magnitude[100]);
    assert!((fit.t2 - 100.0).abs() < 20.0, "{fit:?}");
    eprintln!("{fit:?}");
}

#[test]
fn recovered_t2_follows_input() {
    let mut prev = 0.0;
    for t2 in [50.0, 100.0, 200.0] {
        let p = SimulationParams { dec: DecoherenceParams::new(t2, t2).unwrap(), ..Default::default() };
        let map = closed_form_map(&GridSpec::default(), &p).unwrap();
        let t = estimate_t2(&map).unwrap().2.t2;
        assert!(t > prev, "T2={t2} gave {t}");
        prev = t;
    }
}
