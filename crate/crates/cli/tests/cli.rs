use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn esdlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_esdlab"))
        .args(args)
        .env_remove("ESDLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = esdlab(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(rows: &[Vec<String>], i: usize) -> Vec<f64> {
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn adiabatic_curve_starts_at_initial_concurrence() {
    let text = ok(&["concurrence", "--channel", "adiabatic", "--preset", "fig1a", "--a2", "0.5"]);
    let (header, rows) = parse_csv(&text);
    assert_eq!(header, ["omega_t", "concurrence"]);
    assert_eq!(rows.len(), 501);
    let c = column(&rows, 1);
    // 2r|ab| − (1 − r)/2 at r = 0.9, |a|² = 1/2
    assert!((c[0] - 0.85).abs() < 1e-12);
    assert!(c.windows(2).all(|w| w[1] <= w[0] + 1e-15));
}

#[test]
fn interplay_bell_crossing_near_fig3_value() {
    let text = ok(&["concurrence", "--channel", "interplay", "--preset", "fig3", "--flavor", "phi"]);
    let (_, rows) = parse_csv(&text);
    let (t, c) = (column(&rows, 0), column(&rows, 1));
    let k = c.iter().position(|&v| v <= std::f64::consts::FRAC_1_SQRT_2).unwrap();
    // r = 0.95 crosses before the quoted 2.38e3, which matches r = 1
    assert!(t[k] > 1.5e3 && t[k] < 2.5e3, "{}", t[k]);
}

#[test]
fn empty_noise_gives_constant_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("quiet.json");
    std::fs::write(
        &cfg,
        r#"{"qubit_a": {"sigma_rad_s": 0.0}, "quantum": {"enabled": false}, "sim": {"samples": 11}}"#,
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    for channel in ["adiabatic", "interplay"] {
        let (_, rows) = parse_csv(&ok(&["concurrence", "--channel", channel, "--config", cfg]));
        let c = column(&rows, 1);
        assert_eq!(c.len(), 11);
        assert!(c.iter().all(|&v| (v - c[0]).abs() < 1e-15), "{channel}: {c:?}");
    }
    let (header, rows) = parse_csv(&ok(&[
        "concurrence", "--channel", "montecarlo", "--config", cfg, "--trajectories", "4",
    ]));
    assert_eq!(header, ["omega_t", "concurrence", "stderr"]);
    let c = column(&rows, 1);
    assert!(c.iter().all(|&v| (v - c[0]).abs() < 1e-12), "{c:?}");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"state": {"r": 0.5}, "quantum": {"enabled": false}}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let first = |extra: &[&str]| {
        let mut args = vec!["concurrence", "--channel", "adiabatic", "--config", cfg, "--samples", "2"];
        args.extend_from_slice(extra);
        column(&parse_csv(&ok(&args)).1, 1)[0]
    };
    assert!((first(&[]) - 0.25).abs() < 1e-12);
    assert!((first(&["--r", "1"]) - 1.0).abs() < 1e-12);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"state": {"purity": 0.9}}"#).unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["concurrence", "--channel", "adiabatic", "--config", bad.to_str().unwrap()],
        vec!["concurrence", "--channel", "adiabatic", "--r", "1.5"],
        vec!["concurrence", "--channel", "adiabatic", "--preset", "fig9"],
        vec!["concurrence", "--channel", "montecarlo"],
        vec!["concurrence", "--channel", "interplay", "--g", "1e9"],
        vec!["figure", "fig5", "--out-dir", "unused"],
    ];
    for args in cases {
        let out = esdlab(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("out.csv");
    let out = esdlab(&["concurrence", "--channel", "adiabatic", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write"));
}

#[test]
fn esd_table_matches_fig2_point_and_threshold() {
    let (header, rows) = parse_csv(&ok(&[
        "esd", "--sweep", "r", "--from", "0.31", "--to", "0.91", "--points", "4", "--preset", "fig2",
    ]));
    assert_eq!(
        header,
        ["sweep_value", "omega_t_esd_phi", "omega_t_esd_psi", "omega_t_esd_adiabatic", "omega_t_esd_quantum"]
    );
    assert_eq!(column(&rows, 0), [0.31, 0.51, 0.71, 0.91]);
    // below r* = 1/3 there is nothing to lose
    assert!(rows[0][1..].iter().all(|v| v == "0"));
    let last = &rows[3];
    let (phi, psi): (f64, f64) = (last[1].parse().unwrap(), last[2].parse().unwrap());
    assert!((phi / 18e3 - 1.0).abs() < 0.1, "{phi}");
    assert!((psi / 14e3 - 1.0).abs() < 0.1, "{psi}");
    assert!(phi >= psi);
}

#[test]
fn pure_state_adiabatic_esd_is_inf() {
    let (_, rows) = parse_csv(&ok(&[
        "esd", "--sweep", "r", "--from", "1", "--to", "1", "--points", "1", "--preset", "fig2",
    ]));
    assert_eq!(rows[0][3], "inf");
    assert_ne!(rows[0][2], "inf");
}

#[test]
fn csv_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    ok(&[
        "concurrence", "--channel", "interplay", "--preset", "fig3", "--out", path.to_str().unwrap(),
    ]);
    let text = read(&path);
    assert!(!text.contains('\r'));
    let (_, rows) = parse_csv(&text);
    for row in &rows {
        for cell in row {
            let v: f64 = cell.parse().unwrap();
            let shortest = if v == 0.0 || (1e-4..1e16).contains(&v.abs()) {
                format!("{v}")
            } else {
                format!("{v:e}")
            };
            assert_eq!(&shortest, cell);
        }
    }
}

#[test]
fn seed_determines_monte_carlo_output() {
    let run = |seed: &str, threads: &str| {
        ok(&[
            "concurrence", "--channel", "montecarlo", "--preset", "fig4a", "--trajectories", "40",
            "--fluctuators", "20", "--samples", "11", "--seed", seed, "--threads", threads,
        ])
    };
    let a = run("5", "1");
    assert_eq!(a, run("5", "3"));
    assert_ne!(a, run("6", "1"));
}

#[test]
fn figure_writes_csvs_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig1a");
    ok(&["figure", "fig1a", "--out-dir", out.to_str().unwrap(), "--gnuplot"]);
    let manifest: Value = serde_json::from_str(&read(&out.join("manifest.json"))).unwrap();
    assert_eq!(manifest["figure"], "fig1a");
    assert_eq!(manifest["config"]["state"]["r"], 0.9);
    assert_eq!(manifest["config"]["qubit_b"]["omega_rad_s"], 1e11);
    assert!(manifest["version"].as_str().unwrap().starts_with(env!("CARGO_PKG_VERSION")));
    let files: Vec<&str> = manifest["files"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    assert_eq!(files, ["fig1a.csv", "fig1a.gp"]);
    let (header, rows) = parse_csv(&read(&out.join("fig1a.csv")));
    assert_eq!(header.len(), 10);
    assert_eq!(header[5], "a2_0.5");
    // symmetric about |a|² = 1/2
    for (lo, hi) in column(&rows, 1).into_iter().zip(column(&rows, 9)) {
        assert!((lo - hi).abs() < 1e-12);
    }
}

#[test]
fn fig4b_has_three_curves_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        ok(&[
            "figure", "fig4b", "--out-dir", out.to_str().unwrap(), "--trajectories", "40",
            "--fluctuators", "20", "--samples", "11",
        ]);
        out
    };
    let (a, b) = (run("a"), run("b"));
    assert_eq!(read(&a.join("fig4b.csv")), read(&b.join("fig4b.csv")));
    assert_eq!(read(&a.join("manifest.json")), read(&b.join("manifest.json")));
    let (header, rows) = parse_csv(&read(&a.join("fig4b.csv")));
    assert_eq!(
        header,
        [
            "omega_t",
            "coupled_detuned",
            "stderr_coupled_detuned",
            "uncoupled_detuned",
            "stderr_uncoupled_detuned",
            "uncoupled_resonant",
            "stderr_uncoupled_resonant"
        ]
    );
    assert_eq!(rows.len(), 11);
}

#[test]
fn psd_tracks_target_and_scales_with_sigma() {
    let run = |sigma: &str| {
        let text = ok(&[
            "psd", "--realizations", "100", "--grid-points", "16384", "--record-seconds", "0.1",
            "--sigma", sigma, "--seed", "3",
        ]);
        let (header, rows) = parse_csv(&text);
        assert_eq!(header, ["omega_rad_s", "s_estimated", "s_target"]);
        (column(&rows, 1), column(&rows, 2))
    };
    let (s1, t1) = run("2e9");
    let (s2, t2) = run("4e9");
    for k in 0..s1.len() {
        assert!((s2[k] / s1[k] - 4.0).abs() < 1e-9);
        assert!((t2[k] / t1[k] - 4.0).abs() < 1e-9);
    }
}

#[test]
fn thread_env_must_be_positive() {
    let out = Command::new(env!("CARGO_BIN_EXE_esdlab"))
        .args(["concurrence", "--channel", "adiabatic", "--samples", "2"])
        .env("ESDLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
