use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bicons(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bicons"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn flat_torus_passes_membership_and_flatness() {
    let dir = tempfile::tempdir().unwrap();
    let out = bicons(
        &[
            "verify",
            "--family",
            "torus",
            "--params",
            "a=2,b=2",
            "--checks",
            "membership,slice_flatness",
            "--out",
            "report.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let r = read_json(&dir.path().join("report.json"));
    assert_eq!(r["schema"], 1);
    assert_eq!(r["pass"], true);
    assert_eq!(r["reports"].as_array().unwrap().len(), 2);
}

#[test]
fn a_equals_s_control_fails_biconservativity() {
    let dir = tempfile::tempdir().unwrap();
    let out = bicons(
        &[
            "verify",
            "--family",
            "family3-a-equals-s",
            "--checks",
            "biconservative",
            "--tol",
            "biconservative=1e-6",
            "--range",
            "s:2:2",
            "--grid",
            "1x4x4",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["pass"], false);
    let max = r["reports"][0]["max_residual"].as_f64().unwrap();
    assert!((max - 1.0 / 24.0).abs() < 1e-6, "{max}");
}

#[test]
fn ode1_family3_passes_full_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out = bicons(
        &[
            "verify", "--family", "family3-ode1", "--grid", "4x3x3", "--checks",
            "membership,biconservative,trace_rule,codazzi,gauss,connection_forms,transverse,slice_flatness,frenet,gauss36",
        ],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = json(&out);
    // gauss36 is reported but not a pass/fail check
    assert!(r["gauss36"].is_array());
    assert_eq!(r["reports"].as_array().unwrap().len(), 10);
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"schema": 1, "family": "bh3", "params": {"a": 0.7, "b": 1.3},
            "grid": [1, 10, 10], "checks": ["membership", "slice_flatness"]}"#,
    )
    .unwrap();
    let out = bicons(&["verify", "--config", "cfg.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["grid"]["counts"][1], 10);
    let out = bicons(
        &["verify", "--config", "cfg.json", "--grid", "5x5"],
        dir.path(),
    );
    assert_eq!(json(&out)["grid"]["counts"][1], 5);
}

#[test]
fn configuration_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("bad.json"),
        r#"{"schema": 1, "famly": "torus"}"#,
    )
    .unwrap();
    let cases: &[&[&str]] = &[
        &["verify", "--config", "bad.json"],
        &["verify", "--config", "missing.json"],
        &["verify", "--family", "no-such-family"],
        &["verify", "--family", "torus", "--checks", "codazzi"],
        &["verify", "--family", "torus", "--params", "a=0.5,b=0.5"],
        &["verify", "--family", "equator", "--grid", "1x3x3"],
        &["verify", "--family", "equator", "--range", "t:-10:0"],
        &["verify", "--family", "torus", "--tol", "bogus=1"],
        &["verify", "--family", "s4", "--profile", "missing.csv"],
        &["ode", "--which", "3"],
        &["ode", "--which", "1", "--init", "0,1,0"],
    ];
    for args in cases {
        let out = bicons(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn ode2_from_identity_data_reproduces_identity() {
    let dir = tempfile::tempdir().unwrap();
    let out = bicons(
        &[
            "ode", "--which", "2", "--init", "1,1,1", "--span", "1,3", "--out", "a.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let s = json(&out);
    assert_eq!(s["termination"]["reason"], "span_complete");
    let rows = csv_rows(&dir.path().join("a.csv"));
    assert!(rows.len() > 10);
    assert_eq!(rows.last().unwrap()[0], 3.0);
    let worst = rows.iter().map(|r| (r[1] - r[0]).abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-9, "{worst}");
}

#[test]
fn constant_curvature_circle_closes() {
    let dir = tempfile::tempdir().unwrap();
    let span = format!("0,{}", 2.0 * std::f64::consts::PI / 2f64.sqrt());
    let out = bicons(
        &[
            "profile",
            "--surface",
            "s2",
            "--kappa",
            "const:1",
            "--span",
            &span,
            "--out",
            "c.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let s = json(&out);
    assert!(s["closing_gap"].as_f64().unwrap() <= 1e-6);
    assert!(s["max_drift"].as_f64().unwrap() <= 1e-9);
    let rows = csv_rows(&dir.path().join("c.csv"));
    assert_eq!(rows[0].len(), 13);
    let gap = (0..3)
        .map(|k| (rows[0][1 + k] - rows.last().unwrap()[1 + k]).powi(2))
        .sum::<f64>()
        .sqrt();
    assert!(gap <= 1e-6);

    // the same period requested by name
    let out = bicons(
        &[
            "profile",
            "--surface",
            "s2",
            "--kappa",
            "const:1",
            "--span",
            "0,period",
        ],
        dir.path(),
    );
    assert!(json(&out)["closing_gap"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn generate_torus_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = bicons(
        &[
            "generate", "--family", "torus", "--params", "a=2,b=2", "--grid", "32x32", "--out",
            "t.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "s,t,u,x1,x2,x3,x4,x5");
    let rows = csv_rows(&dir.path().join("t.csv"));
    assert_eq!(rows.len(), 1024);
    for r in &rows {
        let x = &r[3..];
        let q: f64 = x.iter().map(|v| v * v).sum();
        assert!((q - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn generated_hyperbolic_points_lie_on_h4() {
    let dir = tempfile::tempdir().unwrap();
    let out = bicons(
        &[
            "generate",
            "--family",
            "h4-family2-closure",
            "--grid",
            "3x6x6",
            "--out",
            "h.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("h.csv"));
    assert_eq!(rows.len(), 108);
    for r in &rows {
        let x = &r[3..];
        let q = -x[0] * x[0] + x[1..].iter().map(|v| v * v).sum::<f64>();
        assert!((q + 1.0).abs() <= 1e-10, "{q}");
    }
}

#[test]
fn obj_patches_are_grid_disks() {
    let dir = tempfile::tempdir().unwrap();
    let out = bicons(
        &[
            "generate",
            "--family",
            "s4-closure",
            "--grid",
            "2x7x5",
            "--format",
            "obj",
            "--out",
            "m.obj",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("m.obj")).unwrap();
    let v = text.lines().filter(|l| l.starts_with("v ")).count();
    let faces: Vec<Vec<usize>> = text
        .lines()
        .filter(|l| l.starts_with("f "))
        .map(|l| {
            l[2..]
                .split_whitespace()
                .map(|i| i.parse().unwrap())
                .collect()
        })
        .collect();
    let mut edges = std::collections::HashSet::new();
    for f in &faces {
        assert_eq!(f.len(), 4);
        for k in 0..4 {
            let (a, b) = (f[k], f[(k + 1) % 4]);
            assert!(a >= 1 && a <= v);
            edges.insert((a.min(b), a.max(b)));
        }
    }
    // two disjoint disks
    let euler = v as i64 - edges.len() as i64 + faces.len() as i64;
    assert_eq!(euler, 2);
    assert_eq!(v, 70);
}

#[test]
fn frenet_report_next_to_prediction() {
    let dir = tempfile::tempdir().unwrap();
    let out = bicons(
        &["profile", "--kappa", "closure:s4", "--out", "run1.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let out = bicons(
        &[
            "frenet",
            "--family",
            "s4",
            "--profile",
            "run1.csv",
            "--at",
            "0.5",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let f = json(&out);
    let k = f["kappa"].as_f64().unwrap();
    let kp = f["predicted"]["kappa"].as_f64().unwrap();
    let t = f["tau"].as_f64().unwrap();
    let tp = f["predicted"]["tau_abs"].as_f64().unwrap();
    assert!((k - kp).abs() <= 1e-5);
    assert!((t.abs() - tp).abs() <= 1e-4);
    let h = f["h"].as_f64().unwrap();
    assert!((kp - (1.0 + 2.25 * h * h).sqrt()).abs() < 1e-14);
}

#[test]
fn worker_count_does_not_change_reports() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "verify",
        "--family",
        "random",
        "--params",
        "seed=3",
        "--checks",
        "codazzi,gauss",
        "--grid",
        "3x3x3",
    ];
    let one = bicons(&[&["--workers", "1"], &args[..]].concat(), dir.path());
    let many = bicons(&[&["--workers", "4"], &args[..]].concat(), dir.path());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);
}
