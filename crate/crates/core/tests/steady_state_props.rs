use lzsm_core::steady_state::{covering_n_max, upper_occupation, PhotonLadder};
use lzsm_core::{DecoherenceParams, DriveParams, QubitParams};
use proptest::prelude::*;

const FD_STEP: f64 = 1e-3;

fn z_at(eps: f64, q: &QubitParams, d: &DriveParams, dec: &DecoherenceParams) -> (f64, bool) {
    let r = upper_occupation(eps, q, d, dec).unwrap();
    (r.z, r.clamped)
}

/// Central difference of `Z`, or `None` if the stencil straddles the clamp.
fn fd_slope(eps: f64, q: &QubitParams, d: &DriveParams, dec: &DecoherenceParams) -> Option<f64> {
    let (zp, cp) = z_at(eps + FD_STEP, q, d, dec);
    let (zm, cm) = z_at(eps - FD_STEP, q, d, dec);
    let (_, c0) = z_at(eps, q, d, dec);
    if cp || cm || c0 {
        return None;
    }
    Some((zp - zm) / (2.0 * FD_STEP))
}

fn params() -> impl Strategy<Value = (QubitParams, DriveParams, DecoherenceParams)> {
    (20.0..150.0f64, 0.0..1000.0f64, 10.0..40.0f64, 20.0..400.0f64, 0.05..2.0f64).prop_map(
        |(dc, a, f, t1, t2_frac)| {
            (
                QubitParams::new(dc, 0.25, 0.0, 0.0).unwrap(),
                DriveParams::new(f, a).unwrap(),
                DecoherenceParams::new(t1, t1 * t2_frac).unwrap(),
            )
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn occupation_bounded((q, d, dec) in params(), eps in -2000.0..2000.0f64) {
        let r = upper_occupation(eps, &q, &d, &dec).unwrap();
        prop_assert!((0.0..=0.5).contains(&r.p_plus));
        prop_assert!((0.0..=1.0).contains(&r.z));
        prop_assert_eq!(r.z, 1.0 - 2.0 * r.p_plus);
    }

    #[test]
    fn even_occupation_odd_slope((q, d, dec) in params(), eps in 0.0..2000.0f64) {
        let a = upper_occupation(eps, &q, &d, &dec).unwrap();
        let b = upper_occupation(-eps, &q, &d, &dec).unwrap();
        prop_assert_eq!(a.z, b.z);
        prop_assert_eq!(a.dz_deps, -b.dz_deps);
    }

    #[test]
    fn analytic_slope_matches_finite_difference(
        (q, d, dec) in params(),
        mag in 1.0..2000.0f64,
        negative in any::<bool>(),
    ) {
        let eps = if negative { -mag } else { mag };
        let analytic = upper_occupation(eps, &q, &d, &dec).unwrap().dz_deps;
        if let Some(fd) = fd_slope(eps, &q, &d, &dec) {
            // 1e-6 relative; the absolute floor only covers float round-off
            // in the difference quotient (~1e-16/FD_STEP)
            let tol = 1e-6 * fd.abs() + 1e-11;
            prop_assert!((analytic - fd).abs() <= tol,
                "eps={eps} analytic={analytic:e} fd={fd:e}");
        }
    }

    #[test]
    fn truncation_converged((q, d, dec) in params(), eps in -2000.0..2000.0f64) {
        let base = upper_occupation(eps, &q, &d, &dec).unwrap();
        let wide = PhotonLadder::with_n_max(&q, &d, covering_n_max(&d, eps) + 30).unwrap().occupation(eps, &dec);
        prop_assert!((base.p_plus - wide.p_plus).abs() < 1e-9);
    }

    #[test]
    fn undriven_is_single_lorentzian((q, _d, dec) in params(), eps in -2000.0..2000.0f64) {
        let d = DriveParams::new(34.0, 0.0).unwrap();
        let ladder = PhotonLadder::new(&q, &d).unwrap();
        let r = ladder.occupation(eps, &dec);
        prop_assert_eq!(r.p_plus, ladder.resonance_term(0, eps, &dec));
    }
}

#[test]
fn slope_near_one_photon_line_matches_finite_difference() {
    let q = QubitParams::default();
    let d = DriveParams::new(34.0, 258.9).unwrap();
    let dec = DecoherenceParams::default();

    // At ε = 150 the overlapping 0-, 1- and 2-photon lines push the raw sum
    // past ½: clamped, flat, and the difference quotient agrees.
    let r = upper_occupation(150.0, &q, &d, &dec).unwrap();
    assert!(r.clamped);
    assert_eq!(r.dz_deps, 0.0);
    assert_eq!(fd_slope_raw(150.0, &q, &d, &dec), 0.0);

    // Outer flank of the same line, unclamped.
    let mut checked = 0;
    for eps in [200.0, 220.0, 240.0, 260.0, -230.0] {
        let r = upper_occupation(eps, &q, &d, &dec).unwrap();
        if r.clamped {
            continue;
        }
        let fd = fd_slope(eps, &q, &d, &dec).unwrap();
        assert!(((r.dz_deps - fd) / fd).abs() < 1e-6, "eps={eps}: {} vs {fd}", r.dz_deps);
        checked += 1;
    }
    assert!(checked >= 3);
}

fn fd_slope_raw(eps: f64, q: &QubitParams, d: &DriveParams, dec: &DecoherenceParams) -> f64 {
    (z_at(eps + FD_STEP, q, d, dec).0 - z_at(eps - FD_STEP, q, d, dec).0) / (2.0 * FD_STEP)
}
