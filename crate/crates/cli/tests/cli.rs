use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn scover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scover"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn all_hold(r: &Value) -> bool {
    r["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .all(|v| v["holds"] == true)
}

/// Hexagon as the 2-fold lift of a triangle: flip one edge's sheets.
fn cycle_cover(dir: &Path) -> (PathBuf, PathBuf) {
    let base = write(dir, "c3.json", r#"{"facets": [[1, 2], [2, 3], [1, 3]]}"#);
    let volt = write(
        dir,
        "v.json",
        r#"{"k": 2, "edges": [{"edge": [1, 2], "perm": [2, 1]}]}"#,
    );
    (base, volt)
}

#[test]
fn filled_triangle_spectra() {
    let dir = TempDir::new().unwrap();
    let tri = write(dir.path(), "tri.json", r#"{"facets": [[1, 2, 3]]}"#);
    let out = scover(&[
        "spectrum",
        "--complex",
        s(&tri),
        "--dim",
        "1",
        "--kind",
        "up",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let values: Vec<f64> =
        serde_json::from_value(report(&out)["results"]["values"].clone()).unwrap();
    assert_eq!(values.len(), 3);
    for (v, e) in values.iter().zip([0.0, 0.0, 3.0]) {
        assert!((v - e).abs() < 1e-12, "{values:?}");
    }
    // With the empty face, L_0 = J + graph Laplacian = 3I.
    let out = scover(&[
        "spectrum",
        "--complex",
        s(&tri),
        "--dim",
        "0",
        "--kind",
        "full",
    ]);
    let values: Vec<f64> =
        serde_json::from_value(report(&out)["results"]["values"].clone()).unwrap();
    assert!(values.iter().all(|v| (v - 3.0).abs() < 1e-12), "{values:?}");
}

#[test]
fn hexagon_over_triangle() {
    let dir = TempDir::new().unwrap();
    let (base, volt) = cycle_cover(dir.path());
    let out = scover(&["cover", "build", "--base", s(&base), "--voltage", s(&volt)]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["connected"], true);
    assert_eq!(r["results"]["face_counts"]["1"], 6);
    for cmd in ["union", "inclusion", "abelian", "betti"] {
        let out = scover(&["verify", cmd, "--base", s(&base), "--voltage", s(&volt)]);
        assert_eq!(out.status.code(), Some(0), "verify {cmd}");
        assert!(all_hold(&report(&out)));
    }
}

#[test]
fn built_cover_round_trips_through_verify() {
    let dir = TempDir::new().unwrap();
    let (base, volt) = cycle_cover(dir.path());
    let cover = dir.path().join("k.json");
    let map = dir.path().join("phi.json");
    let out = scover(&[
        "cover",
        "build",
        "--base",
        s(&base),
        "--voltage",
        s(&volt),
        "--out-cover",
        s(&cover),
        "--out-map",
        s(&map),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = scover(&[
        "cover",
        "verify",
        "--base",
        s(&base),
        "--cover",
        s(&cover),
        "--map",
        s(&map),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["degree"], 2);
    let out = scover(&[
        "decompose",
        "--base",
        s(&base),
        "--cover",
        s(&cover),
        "--map",
        s(&map),
        "--dim",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        report(&out)["results"]["block_sizes"],
        serde_json::json!([1, 1])
    );
}

#[test]
fn fixture_betti_equality() {
    let dir = TempDir::new().unwrap();
    let fx = dir.path().join("fx");
    let out = scover(&["fixture", "search-fig1", "--out-dir", s(&fx)]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["isomorphism_classes"], 2);
    let out = scover(&[
        "verify",
        "betti",
        "--base",
        s(&fx.join("base.json")),
        "--cover",
        s(&fx.join("cover.json")),
        "--map",
        s(&fx.join("map.json")),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let checks = report(&out)["results"]["checks"]
        .as_array()
        .unwrap()
        .clone();
    assert_eq!(checks.len(), 6);
    assert!(checks.iter().all(|c| c["equality"] == true));
    let b1 = checks.iter().find(|c| c["dim"] == 1).unwrap();
    assert_eq!(b1["beta_base"], 1);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let tri = write(dir.path(), "tri.json", r#"{"facets": [[1, 2, 3]]}"#);
    let two = write(
        dir.path(),
        "two.json",
        r#"{"facets": [[1, 2, 3], [4, 5, 6]]}"#,
    );
    let map = write(
        dir.path(),
        "m.json",
        r#"{"vertex_map": [[1, 1], [2, 2], [3, 3], [4, 1], [5, 2], [6, 3]]}"#,
    );
    let bad = write(dir.path(), "bad.json", r#"{"facets": [[1, 1]]}"#);
    let junk = write(dir.path(), "junk.json", "not json");

    // Disconnected cover: a failed verdict, with a witness.
    let out = scover(&[
        "cover",
        "verify",
        "--base",
        s(&tri),
        "--cover",
        s(&two),
        "--map",
        s(&map),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert!(r["verdicts"][0]["witness"]
        .as_str()
        .unwrap()
        .contains("not connected"));

    let missing = dir.path().join("missing.json");
    for f in [&bad, &junk, &missing] {
        let out = scover(&["spectrum", "--complex", s(f), "--dim", "0", "--kind", "up"]);
        assert_eq!(out.status.code(), Some(2), "{}", f.display());
        assert_eq!(report(&out)["error"]["kind"], "parse");
    }

    let out = scover(&[
        "spectrum",
        "--complex",
        s(&tri),
        "--dim",
        "4",
        "--kind",
        "up",
    ]);
    assert_eq!(out.status.code(), Some(3));

    let z3 = write(
        dir.path(),
        "z3.json",
        r#"{"k": 3, "edges": [{"edge": [1, 2], "perm": [2, 3, 1]}]}"#,
    );
    let c3 = write(
        dir.path(),
        "c3.json",
        r#"{"facets": [[1, 2], [2, 3], [1, 3]]}"#,
    );
    let out = scover(&["verify", "union", "--base", s(&c3), "--voltage", s(&z3)]);
    assert_eq!(out.status.code(), Some(3));
    let out = scover(&["verify", "abelian", "--base", s(&c3), "--voltage", s(&z3)]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn signing_dimension_must_match() {
    let dir = TempDir::new().unwrap();
    let tri = write(dir.path(), "tri.json", r#"{"facets": [[1, 2, 3]]}"#);
    let sign = write(
        dir.path(),
        "s.json",
        r#"{"dim_pair": [0, 1], "flips": [{"face": [1], "cofacet": [1, 2]}]}"#,
    );
    let out = scover(&[
        "spectrum",
        "--complex",
        s(&tri),
        "--dim",
        "0",
        "--kind",
        "up",
        "--signing",
        s(&sign),
    ]);
    assert_eq!(out.status.code(), Some(0));
    // Unbalanced signed triangle: no harmonic 0-cochain.
    let values: Vec<f64> =
        serde_json::from_value(report(&out)["results"]["values"].clone()).unwrap();
    assert!(values[0] > 1e-6, "{values:?}");
    let out = scover(&[
        "spectrum",
        "--complex",
        s(&tri),
        "--dim",
        "1",
        "--kind",
        "up",
        "--signing",
        s(&sign),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (base, volt) = cycle_cover(dir.path());
    for args in [
        vec![
            "decompose",
            "--base",
            s(&base),
            "--voltage",
            s(&volt),
            "--dim",
            "0",
            "--seed",
            "7",
        ],
        vec![
            "verify",
            "inclusion",
            "--base",
            s(&base),
            "--voltage",
            s(&volt),
        ],
    ] {
        let a = scover(&args);
        let b = scover(&args);
        assert_eq!(a.stdout, b.stdout);
    }
}
