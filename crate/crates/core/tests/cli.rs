use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ni(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ni")).current_dir(dir).args(args).output().expect("ni runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path).unwrap().lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn design_ellipse_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = ni(dir.path(), &["design", "--shape", "ellipse:1.25,0.75", "--mode", "closed_form", "--out", "d"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&dir.path().join("d/parameters.json"));
    assert!((v["parameter"]["gamma0"].as_f64().unwrap() - 17.0 / 15.0).abs() < 1e-15);
    assert!((v["parameter"]["gamma2"].as_f64().unwrap() + 8.0 / 15.0).abs() < 1e-15);
    assert_eq!(v["parameter"]["provenance"], "closed_form");
    let rows = csv_rows(&dir.path().join("d/beta.csv"));
    assert_eq!(rows.len(), 512);
    for r in rows {
        let (t, b): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        let jac = (1.0 - 0.25 * num_complex::Complex64::from_polar(1.0, -2.0 * t)).norm();
        assert!((b - (17.0 / 15.0 - 16.0 / 15.0 * (2.0 * t).cos()) / jac).abs() < 1e-14);
    }
}

#[test]
fn design_circle_is_constant_one() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ni(dir.path(), &["design", "--shape", "disk", "--mode", "closed_form", "--out", "d"]).status.success());
    for r in csv_rows(&dir.path().join("d/beta.csv")) {
        assert_eq!(r[1].parse::<f64>().unwrap(), 1.0);
    }
}

#[test]
fn design_rejects_large_b_in_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("shape.toml"), "kind = \"laurent\"\ntail = [[0.3, 0.0]]\n").unwrap();
    let out = ni(dir.path(), &["design", "--shape", "laurent:shape.toml", "--mode", "closed_form"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--mode calibrated"));
    let out = ni(dir.path(), &["design", "--shape", "laurent:shape.toml", "--mode", "calibrated"]);
    assert!(!out.status.success());
    fs::write(dir.path().join("shape.toml"), "kind = \"laurent\"\ntail = [[0.28, 0.0]]\n").unwrap();
    let out = ni(dir.path(), &["design", "--shape", "laurent:shape.toml", "--mode", "calibrated", "--out", "c"]);
    assert!(out.status.success());
    let v = json(&dir.path().join("c/parameters.json"));
    assert!(v["parameter"]["gamma0"].as_f64().unwrap() >= 2.0 * v["parameter"]["gamma2"].as_f64().unwrap().abs());
}

#[test]
fn pt_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = ni(dir.path(), &["pt", "--shape", "disk", "--mode", "constant", "--beta0", "1", "--n", "128", "--out", "p"]);
    assert!(out.status.success());
    let v = json(&dir.path().join("p/pt.json"));
    for key in ["spectral", "bem"] {
        for e in ["T11", "T12", "T21", "T22"] {
            assert!(v[key][e].as_f64().unwrap().abs() < 1e-12, "{key} {e}");
        }
    }
    assert_eq!(v["bem"]["provenance"], "bem");

    let out = ni(dir.path(), &["pt", "--out", "e"]);
    assert!(out.status.success());
    let v = json(&dir.path().join("e/pt.json"));
    assert!((v["spectral_disk"]["T11"].as_f64().unwrap() - 2.0 * PI * 0.25).abs() < 1e-9);
    assert!((v["spectral_disk"]["T22"].as_f64().unwrap() + 2.0 * PI * 0.25).abs() < 1e-9);
    assert!(v["ratio"].as_f64().unwrap() < 0.02);
    assert!(v["difference"].as_f64().unwrap() < 1e-10);
}

#[test]
fn compare_grids() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["compare", "--shape", "disk", "--mode", "constant", "--n", "128", "--grid", "-3,3,-3,3,21", "--out", "c"];
    assert!(ni(dir.path(), &args).status.success());
    for name in ["perfect_a1", "perfect_a2", "imperfect_a1", "imperfect_a2"] {
        let text = fs::read_to_string(dir.path().join(format!("c/{name}.csv"))).unwrap();
        assert!(text.starts_with("x,y,u,pert,masked\n"));
        let rows = csv_rows(&dir.path().join(format!("c/{name}.csv")));
        assert_eq!(rows.len(), 21 * 21);
        for r in &rows {
            if r[4] == "1" {
                assert!(r[2].is_empty() && r[3].is_empty());
            } else if name.starts_with("imperfect") {
                assert!(r[3].parse::<f64>().unwrap().abs() < 1e-9);
            }
        }
        assert!(rows.iter().any(|r| r[4] == "1"));
    }
    let decay = json(&dir.path().join("c/decay.json"));
    assert_eq!(decay["imperfect_decay"]["below_floor"], true);

    assert!(ni(dir.path(), &["compare", "--grid", "-4,4,-4,4,21", "--out", "e"]).status.success());
    let decay = json(&dir.path().join("e/decay.json"));
    let edge = |i: usize| decay["grids"][i]["edge_max_perturbation"].as_f64().unwrap();
    assert!(edge(2) < 0.05 * edge(0));
    assert!(edge(3) < 0.05 * edge(1));
}

#[test]
fn droplet_grids_mask_the_corner() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["compare", "--shape", "droplet", "--n", "256", "--grid", "-2,0,-1,1,41", "--out", "c"];
    assert!(ni(dir.path(), &args).status.success());
    for r in csv_rows(&dir.path().join("c/imperfect_a1.csv")) {
        let (x, y): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        if (x + 1.5).hypot(y) < 0.25 {
            assert_eq!(r[4], "1");
        }
    }
}

#[test]
fn check_geometry() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ni(dir.path(), &["check-geometry", "--shape", "ellipse:2,1", "--out", "g"]).status.success());
    let v = json(&dir.path().join("g/geometry.json"));
    assert_eq!(v["verdict"], "ellipse");
    assert!(v["residual"].as_f64().unwrap() < 1e-10);

    assert!(ni(dir.path(), &["check-geometry", "--shape", "droplet", "--out", "g"]).status.success());
    let v = json(&dir.path().join("g/geometry.json"));
    assert_eq!(v["verdict"], "not an ellipse");

    fs::write(dir.path().join("sphere.toml"), "kind = \"ellipsoid\"\naxes = [1.0, 1.0, 1.0]\n").unwrap();
    assert!(ni(dir.path(), &["check-geometry", "--surface", "sphere.toml", "--out", "g"]).status.success());
    let v = json(&dir.path().join("g/geometry.json"));
    assert_eq!(v["dimension"], 3);
    assert!(v["residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn verify_flags_under_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let out = ni(dir.path(), &["verify", "--n", "32", "--out", "v"]);
    assert!(!out.status.success());
    let v = json(&dir.path().join("v/verify.json"));
    assert_eq!(v["passed"], false);
    let failed: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["gating"] == true && c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["mesh_resolution"]);
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.toml"), "kind = \"ellipse\"\na = 1.25\nb = 0.75\nmode = \"closed_form\"\nnodes = 256\nout = \"from_file\"\n").unwrap();
    assert!(ni(dir.path(), &["design", "--config", "run.toml"]).status.success());
    let v = json(&dir.path().join("from_file/parameters.json"));
    assert!((v["admissibility"]["b_abs"].as_f64().unwrap() - 0.25).abs() < 1e-15);
        assert!(ni(dir.path(), &["design", "--config", "run.toml", "--mode", "calibrated", "--out", "x"]).status.success());
    assert_eq!(json(&dir.path().join("x/parameters.json"))["samples"], 256);
    assert!(!ni(dir.path(), &["pt", "--n", "64"]).status.success());
}
