use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SQUARE: &str = r#"{"dim": 2, "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]}"#;
const CUBE: &str = r#"{"dim": 3, "halfspaces": [
    {"gradient": [1, 0, 0], "offset": 1}, {"gradient": [-1, 0, 0], "offset": 1},
    {"gradient": [0, 1, 0], "offset": 1}, {"gradient": [0, -1, 0], "offset": 1},
    {"gradient": [0, 0, 1], "offset": 1}, {"gradient": [0, 0, -1], "offset": 1}]}"#;

fn pentagon() -> String {
    let v: Vec<String> = (0..5)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / 5.0;
            format!("[{}, {}]", a.cos(), a.sin())
        })
        .collect();
    format!(r#"{{"dim": 2, "vertices": [{}]}}"#, v.join(", "))
}

fn fixture(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn hilbert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hilbert")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn field(text: &str, key: &str) -> String {
    let line = text.lines().find(|l| l.starts_with(&format!("{key} "))).unwrap();
    line[key.len() + 1..].to_string()
}

#[test]
fn log_three_on_the_unit_square() {
    let dir = TempDir::new().unwrap();
    let sq = fixture(&dir, "square.json", SQUARE);
    let o = hilbert(&["distance", "--in", s(&sq), "--p", "0.25,0.5", "--q", "0.75,0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let d: f64 = field(&out, "distance").parse().unwrap();
    assert!((d - 3f64.ln()).abs() <= 1e-12);
    assert_eq!(field(&out, "chord_a"), "0,0.5");
    assert_eq!(field(&out, "chord_b"), "1,0.5");
}

#[test]
fn check_passes_on_the_pentagon() {
    let dir = TempDir::new().unwrap();
    let pent = fixture(&dir, "pentagon.json", &pentagon());
    let o = hilbert(&["check", "--in", s(&pent), "--pairs", "500", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    for name in ["crossratio-birkhoff", "embedding-birkhoff", "alexander-birkhoff"] {
        let row = out.lines().find(|l| l.starts_with(name)).unwrap();
        assert!(row.ends_with("ok"), "{row}");
    }
}

#[test]
fn check_reports_a_breach() {
    let dir = TempDir::new().unwrap();
    let pent = fixture(&dir, "pentagon.json", &pentagon());
    let o = hilbert(&["check", "--in", s(&pent), "--pairs", "50", "--tol", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[DistanceFormulaAgreement]"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = hilbert(&["distance", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage:"));
    assert_eq!(hilbert(&["nosuchcommand"]).status.code(), Some(2));
}

#[test]
fn bad_point_literal_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let sq = fixture(&dir, "square.json", SQUARE);
    let o = hilbert(&["distance", "--in", s(&sq), "--p", "0.5,abc", "--q", "0.5,0.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_polytope_file_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let bad = fixture(&dir, "bad.json", r#"{"dim": 2, "vertices": [[0, 0], [1"#);
    let o = hilbert(&["lift", "--in", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage:"));
    let missing = dir.path().join("missing.json");
    assert_eq!(hilbert(&["lift", "--in", s(&missing)]).status.code(), Some(2));
}

#[test]
fn domain_errors_name_the_invariant() {
    let dir = TempDir::new().unwrap();
    let sq = fixture(&dir, "square.json", SQUARE);
    let cases: [(&[&str], &str); 4] = [
        (&["distance", "--in", s(&sq), "--p", "2,0.5", "--q", "0.5,0.5"], "PointOutside"),
        (&["distance", "--in", s(&sq), "--p", "0.5,0.5,0.5", "--q", "0.5,0.5"], "WrongDimension"),
        (&["ball", "--in", s(&sq), "--center", "1.5,0.5", "--radius", "1"], "PointOutside"),
        (&["raylimit", "--in", s(&sq), "--v1", "0.5,0", "--v2", "1,1"], "InvalidVertex"),
    ];
    for (args, invariant) in cases {
        let o = hilbert(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(stderr(&o).starts_with(&format!("error[{invariant}]")), "{}", stderr(&o));
    }
    let flat = fixture(&dir, "flat.json", r#"{"dim": 2, "vertices": [[0, 0], [1, 0], [2, 0]]}"#);
    let o = hilbert(&["lift", "--in", s(&flat)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[DegenerateInput]"));
}

#[test]
fn svg_is_refused_above_two_dimensions() {
    let dir = TempDir::new().unwrap();
    let cube = fixture(&dir, "cube.json", CUBE);
    let svg = dir.path().join("b.svg");
    let o = hilbert(&["ball", "--in", s(&cube), "--radius", "1", "--svg", s(&svg)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[WrongDimension]"));
    assert!(!svg.exists());
}

#[test]
fn outputs_carry_headers_and_rerun_identically() {
    let dir = TempDir::new().unwrap();
    let sq = fixture(&dir, "square.json", SQUARE);
    let run = |tag: &str| {
        let files = ["csv", "json", "svg"].map(|ext| dir.path().join(format!("{tag}.{ext}")));
        let o = hilbert(&[
            "ball", "--in", s(&sq), "--radius", "1.5", "--volume", "--samples", "5000", "--seed", "11",
            "--csv", s(&files[0]), "--json", s(&files[1]), "--svg", s(&files[2]),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        (files.map(|f| fs::read(f).unwrap()), o.stdout)
    };
    let (first, out1) = run("a");
    let (second, out2) = run("b");
    assert_eq!(first, second);
    assert_eq!(out1, out2);

    let csv = String::from_utf8(first[0].clone()).unwrap();
    assert!(csv.starts_with("# version: hilbert "));
    assert!(csv.contains("# seed: 11\n") && csv.contains("# budget: 5000\n") && csv.contains("# input-sha256: "));
    assert!(!csv.contains('\r'));
    let json: serde_json::Value = serde_json::from_slice(&first[1]).unwrap();
    assert_eq!(json["provenance"]["seed"], 11);
    assert!(String::from_utf8(first[1].clone()).unwrap().starts_with("{\n  \"provenance\""));
    let svg = String::from_utf8(first[2].clone()).unwrap();
    assert!(svg.starts_with("<!--\n  version: hilbert "));
}

#[test]
fn growth_emits_a_fit() {
    let dir = TempDir::new().unwrap();
    let sq = fixture(&dir, "square.json", SQUARE);
    let json = dir.path().join("g.json");
    let o = hilbert(&["growth", "--in", s(&sq), "--samples", "4000", "--seed", "2", "--json", s(&json)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&fs::read(json).unwrap()).unwrap();
    let slope = v["data"]["fit"]["slope"].as_f64().unwrap();
    assert!((slope - 2.0).abs() < 0.2, "{slope}");
    // radii must reach 10
    let o = hilbert(&["growth", "--in", s(&sq), "--radii", "1,2,3", "--samples", "4000"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[DegenerateInput]"));
}

#[test]
fn embed_lift_and_bernig_round_trip() {
    let dir = TempDir::new().unwrap();
    let pent = fixture(&dir, "pentagon.json", &pentagon());
    let o = hilbert(&["embed", "--in", s(&pent), "--p", "0.1,0.2", "--q", "-0.3,0.1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let e: f64 = field(&out, "norm_distance").parse().unwrap();
    let d: f64 = field(&out, "hilbert_distance").parse().unwrap();
    assert!((e - d).abs() <= 1e-12);

    let lift = dir.path().join("lift.json");
    assert_eq!(hilbert(&["lift", "--in", s(&pent), "--json", s(&lift)]).status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&fs::read(lift).unwrap()).unwrap();
    assert_eq!(v["data"]["target_dim"], 4);

    let o = hilbert(&["bernig", "--in", s(&pent), "--p", "0.1,-0.2"]);
    let image = field(&stdout(&o), "image");
    let o = hilbert(&["bernig", "--in", s(&pent), "--inverse", &image]);
    assert_eq!(o.status.code(), Some(0));
    let x: Vec<f64> = field(&stdout(&o), "preimage").split(',').map(|t| t.parse().unwrap()).collect();
    assert!((x[0] - 0.1).abs() < 1e-9 && (x[1] + 0.2).abs() < 1e-9, "{x:?}");
    assert_eq!(hilbert(&["bernig", "--in", s(&pent)]).status.code(), Some(2));
}

#[test]
fn compare_needs_a_shared_simplex() {
    let dir = TempDir::new().unwrap();
    let sq = fixture(&dir, "square.json", SQUARE);
    let house = fixture(&dir, "house.json", r#"{"dim": 2, "vertices": [[0, 0], [1, 0], [1, 1], [0, 1], [-0.5, 0.5]]}"#);
    let tri = fixture(&dir, "tri.json", r#"{"dim": 2, "vertices": [[0, 0], [1, 0], [0, 1]]}"#);
    let o = hilbert(&["compare", "--a", s(&sq), "--b", s(&house), "--simplex", s(&tri), "--points", "10", "--directions", "60"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = hilbert(&["compare", "--a", s(&sq), "--b", s(&house), "--simplex", s(&sq)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[InvalidNeighborhood]"));
}
