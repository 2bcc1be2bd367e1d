//! The command-line contract, driven through the same entry points as the
//! binary: files written, exit codes, reproducibility.

use std::path::{Path, PathBuf};

use clap::Parser;
use serde_json::Value;

use crate::cli::{dispatch, run, Cli};
use crate::commands::run_simulate;
use crate::error::CliError;
use crate::formats::{read_grid, GridKind};
use crate::render::pgm_pixels;
use crate::RunConfig;

/// Arguments starting with `@` are file names inside `dir`.
fn args(dir: &Path, a: &[&str]) -> Vec<String> {
    std::iter::once("lzsm".to_string())
        .chain(a.iter().map(|s| match s.strip_prefix('@') {
            Some(name) => dir.join(name).to_string_lossy().into_owned(),
            None => s.to_string(),
        }))
        .collect()
}

/// Exit code the binary would return.
fn code(dir: &Path, a: &[&str]) -> u8 {
    run(args(dir, a))
}

/// The error behind a failing command.
fn failure(dir: &Path, a: &[&str]) -> CliError {
    let cli = Cli::try_parse_from(args(dir, a)).expect("arguments parse");
    dispatch(&cli).expect_err("command should fail")
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SMALL: &str = r#"{"grid": {"eps_min_ueV": -600, "eps_max_ueV": 600, "n_eps": 121, "amp_max_ueV": 600, "n_amp": 61}}"#;

#[test]
fn simulate_writes_grid_and_sidecar() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(d.path(), &["simulate", "--out", "@map.csv"]), 0);
    let text = std::fs::read_to_string(d.path().join("map.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# lzsm-grid v1");
    assert!(lines[1].starts_with("# eps_ueV: -1.0000000000000000e3,"));
    assert!(lines[2].starts_with("# amp_ueV: 0.0000000000000000e0,"));
    assert_eq!(lines.len(), 3 + 201);
    assert_eq!(lines[3].split(',').count(), 401);
    let side = json(d.path().join("map.csv.json"));
    assert_eq!(side["config_hash"], RunConfig::default().hash());
    assert_eq!(side["model"], "closed_form");
    assert_eq!(side["n_eps"], 401);
}

#[test]
fn csv_round_trip_is_exact() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "c.json", SMALL);
    assert_eq!(code(d.path(), &["simulate", "--config", "@c.json", "--out", "@m.csv"]), 0);
    let g = read_grid(&d.path().join("m.csv")).unwrap();
    let direct = run_simulate(&RunConfig::from_json(SMALL).unwrap()).unwrap();
    assert_eq!(g.kind, GridKind::Map);
    assert_eq!(g.x, direct.eps_axis);
    assert_eq!(g.y, direct.amp_axis);
    assert!(g.values.iter().zip(&direct.values).all(|(a, b)| a.to_bits() == b.to_bits()));
}

#[test]
fn seeds_drive_noise_reproducibly() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "c.json", r#"{"noise_deg": 0.01, "grid": {"n_eps": 41, "n_amp": 11}}"#);
    let sim = |seed: &str, out: &str| {
        let target = format!("@{out}");
        assert_eq!(code(d.path(), &["simulate", "--config", "@c.json", "--seed", seed, "--out", &target]), 0);
        std::fs::read(d.path().join(out)).unwrap()
    };
    let a = sim("7", "a.csv");
    let b = sim("7", "b.csv");
    let other = sim("8", "c.csv");
    assert_eq!(a, b);
    assert_ne!(a, other);
    // the seed is part of the hashed config
    assert_ne!(json(d.path().join("a.csv.json"))["config_hash"], json(d.path().join("c.csv.json"))["config_hash"]);
}

#[test]
fn config_errors_exit_1() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "bad.json", r#"{"qubit": {"delta_c": 98}}"#);
    let e = failure(d.path(), &["simulate", "--config", "@bad.json", "--out", "@m.csv"]);
    assert_eq!(e.exit_code(), 1);
    assert!(e.to_string().contains("unknown field `delta_c`"), "{e}");
    write(d.path(), "bad2.json", r#"{"grid": {"n_eps": 1}}"#);
    assert_eq!(code(d.path(), &["simulate", "--config", "@bad2.json", "--out", "@m.csv"]), 1);
    assert_eq!(code(d.path(), &["simulate", "--config", "@missing.json", "--out", "@m.csv"]), 1);
    assert_eq!(code(d.path(), &["simulate"]), 1, "--out is required");
    assert_eq!(code(d.path(), &["simulate", "--out", "@no/such/dir/m.csv"]), 1);
    assert_eq!(code(d.path(), &["frobnicate"]), 1);
    assert_eq!(code(d.path(), &["fit", "@x.csv", "--mode", "t3"]), 1);
    assert_eq!(code(d.path(), &["simulate", "--seed", "minus-one", "--out", "@m.csv"]), 1);
    assert_eq!(code(d.path(), &["--help"]), 0);
    assert_eq!(code(d.path(), &["--version"]), 0);
}

#[test]
fn malformed_csv_exits_2_with_line_number() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "m.csv", "# lzsm-grid v1\n# eps_ueV: 0,1,2\n# amp_ueV: 0,1\n1,2,3\n4,five,6\n");
    let e = failure(d.path(), &["fft", "@m.csv", "--out", "@s.csv"]);
    assert_eq!(e.exit_code(), 2);
    assert!(e.to_string().contains("m.csv:5:"), "{e}");
    assert_eq!(code(d.path(), &["render", "@missing.csv", "--out", "@x.pgm"]), 2);
    // a spectrum where a map is expected
    write(d.path(), "s.csv", "# lzsm-grid v1\n# k_eps_ps: 0,1\n# k_amp_per_ueV: 0,1\n1,2\n3,4\n");
    assert_eq!(code(d.path(), &["fit", "@s.csv", "--mode", "t1"]), 2);
}

#[test]
fn fft_reports_t2_and_writes_spectrum() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(d.path(), &["simulate", "--out", "@m.csv"]), 0);
    assert_eq!(code(d.path(), &["fft", "@m.csv", "--out", "@s.csv"]), 0);
    let g = read_grid(&d.path().join("s.csv")).unwrap();
    assert_eq!(g.kind, GridKind::Spectrum);
    assert_eq!((g.x.len(), g.y.len()), (401, 201));
    let r = json(d.path().join("s.csv.json"));
    let t2 = r["t2_ps"].as_f64().unwrap();
    assert!((t2 - 100.0).abs() <= 20.0, "{t2}");
    assert_eq!(r["config_hash"], RunConfig::default().hash());
}

#[test]
fn constant_map_has_no_decay() {
    let d = tempfile::tempdir().unwrap();
    let row = vec!["2.5"; 64].join(",");
    let axis: Vec<String> = (0..64).map(|i| i.to_string()).collect();
    let mut text = format!("# lzsm-grid v1\n# eps_ueV: {}\n# amp_ueV: {}\n", axis.join(","), axis.join(","));
    for _ in 0..64 {
        text.push_str(&row);
        text.push('\n');
    }
    write(d.path(), "c.csv", &text);
    let e = failure(d.path(), &["fft", "@c.csv", "--out", "@s.csv"]);
    assert_eq!(e.exit_code(), 3);
    assert!(e.to_string().contains("no decay detected"), "{e}");
}

#[test]
fn lineshape_fit_via_files() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(d.path(), &["simulate", "--lineshape", "--out", "@l.csv"]), 0);
    assert_eq!(code(d.path(), &["fit", "@l.csv", "--mode", "lineshape", "--out", "@r.json"]), 0);
    let r = json(d.path().join("r.json"));
    let dc = r["params"]["delta_c"]["value"].as_f64().unwrap();
    assert!((dc - 98.0).abs() < 0.098, "{dc}");
    for key in ["params", "uncertainties", "residual_norm", "iterations", "converged", "config_hash"] {
        assert!(!r[key].is_null(), "{key}");
    }
    assert_eq!(r["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn truncated_lineshape_is_a_precondition_error() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "l.csv", "# lzsm-lineshape v1\nv_g_V,phase_deg\n-1e-3,-0.1\n0,-2\n1e-3,-0.1\n");
    let e = failure(d.path(), &["fit", "@l.csv", "--mode", "lineshape", "--out", "@r.json"]);
    assert_eq!(e.exit_code(), 2);
    assert!(e.to_string().contains("at least 10"), "{e}");
}

#[test]
fn non_convergence_exits_3_with_best_so_far() {
    let d = tempfile::tempdir().unwrap();
    write(
        d.path(),
        "c.json",
        r#"{"fit": {"max_iter": 1, "init_delta_c_ueV": 40, "init_v_g0_V": 3e-4}, "lineshape": {"noise_fraction": 0.02}}"#,
    );
    assert_eq!(code(d.path(), &["simulate", "--lineshape", "--config", "@c.json", "--out", "@l.csv"]), 0);
    let fit = ["fit", "@l.csv", "--mode", "lineshape", "--config", "@c.json", "--out", "@r.json"];
    assert_eq!(code(d.path(), &fit), 3);
    let r = json(d.path().join("r.json"));
    assert_eq!(r["converged"], false);
    assert!(r["params"]["delta_c"]["value"].as_f64().unwrap().is_finite());
}

#[test]
fn t1_boundary_optimum_warns_and_exits_0() {
    let d = tempfile::tempdir().unwrap();
    write(
        d.path(),
        "c.json",
        r#"{"grid": {"n_eps": 101, "n_amp": 41}, "fit": {"t1_grid_min_ps": 10, "t1_grid_max_ps": 50, "t1_grid_points": 5}}"#,
    );
    assert_eq!(code(d.path(), &["simulate", "--config", "@c.json", "--out", "@m.csv"]), 0);
    assert_eq!(code(d.path(), &["fit", "@m.csv", "--mode", "t1", "--config", "@c.json", "--out", "@r.json"]), 0);
    let r = json(d.path().join("r.json"));
    let w = r["warnings"].as_array().unwrap();
    assert!(w.iter().any(|w| w.as_str().unwrap().contains("extend grid")), "{w:?}");
    assert_eq!(r["misfit_curve"].as_array().unwrap().len(), 5);
}

#[test]
fn render_levels() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "two.csv", "# lzsm-grid v1\n# eps_ueV: 0,1,2\n# amp_ueV: 0,1\n0,1,0\n1,0,1\n");
    write(d.path(), "flat.csv", "# lzsm-grid v1\n# eps_ueV: 0,1,2\n# amp_ueV: 0,1\n-3,-3,-3\n-3,-3,-3\n");
    assert_eq!(code(d.path(), &["render", "@two.csv", "--out", "@two.pgm"]), 0);
    assert_eq!(code(d.path(), &["render", "@flat.csv", "--out", "@flat.pgm"]), 0);
    let two = std::fs::read(d.path().join("two.pgm")).unwrap();
    let (w, h, px) = pgm_pixels(&two).unwrap();
    assert_eq!((w, h), (3, 2));
    assert_eq!(px, &[255, 0, 255, 0, 255, 0]);
    let flat = std::fs::read(d.path().join("flat.pgm")).unwrap();
    assert!(pgm_pixels(&flat).unwrap().2.iter().all(|&p| p == 128));
    let side = json(d.path().join("two.pgm.json"));
    assert_eq!((side["min"].as_f64(), side["max"].as_f64()), (Some(0.0), Some(1.0)));
    assert_eq!(json(d.path().join("flat.pgm.json"))["degenerate"], true);
}

#[test]
fn default_interferogram_renders_fan_stripes() {
    // along the top image row (largest amplitude) the gray level crosses
    // mid-gray on both sides of every photon line with |ε| < A_max
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(d.path(), &["simulate", "--out", "@m.csv"]), 0);
    assert_eq!(code(d.path(), &["render", "@m.csv", "--out", "@m.pgm"]), 0);
    let img = std::fs::read(d.path().join("m.pgm")).unwrap();
    let (w, h, px) = pgm_pixels(&img).unwrap();
    assert_eq!((w, h), (401, 201));
    let side = json(d.path().join("m.pgm.json"));
    let (lo, hi) = (side["min"].as_f64().unwrap(), side["max"].as_f64().unwrap());
    assert!(lo < 0.0 && hi > 0.0);
    let zero = crate::render::gray(0.0, lo, hi);
    let top = &px[..w];
    let bands = top.windows(2).filter(|p| (p[0] > zero) != (p[1] > zero)).count();
    assert!(bands >= 2 * 7, "{bands} crossings");
}

#[test]
fn classify_examples() {
    let d = tempfile::tempdir().unwrap();
    for (f, want) in [("34", "coherent"), ("26", "intermediate"), ("14", "incoherent")] {
        assert_eq!(code(d.path(), &["classify", "--f-mw", f, "--t2", "100", "--out", "@r.json"]), 0);
        assert_eq!(json(d.path().join("r.json"))["regime"], want, "{f} GHz");
    }
    assert_eq!(code(d.path(), &["classify", "--f-mw=-3", "--out", "@r.json"]), 1);
}

#[test]
fn compare_oracle_rejects_large_grids() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "c.json", r#"{"oracle": {"n_eps": 65}}"#);
    assert_eq!(code(d.path(), &["compare-oracle", "--config", "@c.json", "--out", "@r.json"]), 1);
}

#[test]
fn compare_oracle_far_from_resonance() {
    let d = tempfile::tempdir().unwrap();
    write(
        d.path(),
        "c.json",
        r#"{"oracle": {"n_eps": 4, "n_amp": 2, "eps_min_ueV": 2000, "eps_max_ueV": 3000, "resonance_orders": [1], "amp_over_hf_points": 1}}"#,
    );
    assert_eq!(code(d.path(), &["compare-oracle", "--config", "@c.json", "--out", "@r.json"]), 0);
    let r = json(d.path().join("r.json"));
    // far from every resonance both models are essentially unexcited
    for p in r["grid"].as_array().unwrap() {
        assert!(p["p_closed"].as_f64().unwrap() < 2e-3);
        assert!(p["p_oracle"].as_f64().unwrap() < 2e-3);
    }
    assert_eq!(r["centres"].as_array().unwrap().len(), 1);
}
