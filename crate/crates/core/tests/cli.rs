use std::fs;
use std::io::BufReader;

use oscsurf::cli::run_cli_with;
use oscsurf::mesh::{closed_euler_characteristic, read_obj};
use oscsurf::CurveSpec;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli_with(
        std::iter::once("oscsurf").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn verify_helix_passes_with_verdicts() {
    let (code, out, err) = run(&["verify", "--curve", "builtin:helix", "--n-s", "20", "--n-u", "20"]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["version"], 1);
    assert_eq!(v["pass"], true);
    assert_eq!(v["adjudications"].as_array().unwrap().len(), 3);
    assert_eq!(v["reports"][0]["pass"], true);
    assert!(v["reports"][0].get("points").is_none());
}

#[test]
fn verify_failure_exits_two() {
    let (code, out, _) = run(&[
        "verify",
        "--curve",
        "builtin:cubic",
        "--n-s",
        "8",
        "--n-u",
        "8",
        "--tol-report",
        "1e-15",
    ]);
    assert_eq!(code, 2);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["pass"], false);
}

#[test]
fn verify_per_point_and_explicit_grid() {
    let (code, out, _) = run(&[
        "verify",
        "--curve",
        "builtin:cubic",
        "--s-min",
        "-1",
        "--s-max",
        "1",
        "--n-s",
        "4",
        "--u-min",
        "1",
        "--u-max",
        "5",
        "--n-u",
        "3",
        "--per-point",
    ]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0]["points"].as_array().unwrap().len(), 12);
}

#[test]
fn classify_cubic_is_not_weingarten() {
    let (code, out, _) = run(&["classify", "--curve", "builtin:cubic"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["weingarten"]["verdict"], false);
    assert_eq!(v["linear_weingarten"], Value::Null);
    let pos = |k: &str| out.find(&format!("\n  \"{k}\":")).unwrap();
    let order = [
        "version",
        "curve",
        "grid",
        "tolerances",
        "planar_generator",
        "weingarten",
        "topology",
    ];
    assert!(order.windows(2).all(|w| pos(w[0]) < pos(w[1])));
}

#[test]
fn classify_rejects_bad_tolerance() {
    let (code, _, err) = run(&["classify", "--curve", "builtin:helix", "--tol", "bogus=1"]);
    assert_eq!(code, 1);
    assert!(err.contains("unknown tolerance"));
}

#[test]
fn torus_mesh_is_closed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.obj");
    let p = path.to_str().unwrap();
    let (code, out, err) = run(&[
        "mesh",
        "--curve",
        "builtin:torus_loop",
        "--wrap-s",
        "--wrap-u",
        "--out",
        p,
    ]);
    assert_eq!(code, 0, "{err}");
    let summary: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(summary["euler_characteristic"], 0);
    assert_eq!(summary["closed"], true);
    let mesh = read_obj(BufReader::new(fs::File::open(&path).unwrap())).unwrap();
    assert_eq!(mesh.vertices.len(), 2500);
    assert_eq!(closed_euler_characteristic(&mesh).unwrap(), 0);
}

#[test]
fn helix_mesh_counts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.obj");
    let (code, _, _) = run(&[
        "mesh",
        "--curve",
        "builtin:helix",
        "--n-s",
        "100",
        "--n-u",
        "100",
        "--with-normals",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 10_000);
    assert_eq!(text.lines().filter(|l| l.starts_with("vn ")).count(), 10_000);
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 99 * 99);
    let mesh = read_obj(text.as_bytes()).unwrap();
    assert!(mesh.faces.iter().flatten().all(|&i| i < 10_000));
}

#[test]
fn degenerate_grid_is_rejected() {
    let (code, _, err) = run(&["mesh", "--curve", "builtin:helix", "--n-s", "1"]);
    assert_eq!(code, 1);
    assert!(err.contains("invalid grid"), "{err}");
    let (code, _, _) = run(&["mesh", "--curve", "builtin:helix", "--wrap-s"]);
    assert_eq!(code, 1);
}

#[test]
fn curvature_csv_and_json() {
    let (code, out, _) = run(&["curvature", "--curve", "builtin:helix", "--n-s", "10", "--n-u", "10"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 101);
    assert!(out.starts_with("s,u,E,F,G,e,f,g,K,H,k1,k2,umb,kn,kg,regular\n"));

    let (code, out, _) = run(&[
        "curvature",
        "--curve",
        "builtin:cubic",
        "--n-s",
        "2",
        "--u-min",
        "0",
        "--u-max",
        "3.14",
        "--n-u",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let rows: Value = serde_json::from_str(&out).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0]["regular"], 0);
    assert_eq!(rows[0]["K"], Value::Null);
    assert_eq!(rows[1]["regular"], 1);
    assert!(rows[1]["K"].is_f64());
}

#[test]
fn frenet_from_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec_path = dir.path().join("helix.json");
    let spec = CurveSpec::helix(2.0, 1.0, [0.0, 10.0]).unwrap();
    fs::write(&spec_path, spec.to_json()).unwrap();
    let out_path = dir.path().join("frenet.csv");
    let (code, _, err) = run(&[
        "frenet",
        "--curve",
        spec_path.to_str().unwrap(),
        "--samples",
        "20",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let mut rdr = csv::Reader::from_path(&out_path).unwrap();
    let n = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            let kappa: f64 = r[1].parse().unwrap();
            let tau: f64 = r[2].parse().unwrap();
            assert!((kappa - 0.4).abs() < 1e-12 && (tau - 0.2).abs() < 1e-12);
        })
        .count();
    assert_eq!(n, 20);

    let (code, out, _) = run(&[
        "frenet",
        "--curve",
        "builtin:helix",
        "--samples",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
}

#[test]
fn missing_spec_file_is_a_validation_error() {
    let (code, _, err) = run(&["frenet", "--curve", "/nonexistent/curve.json"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error:"));
}
