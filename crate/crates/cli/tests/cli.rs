use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn plastic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plastic")).args(args).output().unwrap()
}

fn plastic_in(dir: &TempDir, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plastic")).current_dir(dir.path()).args(args).output().unwrap()
}

fn read_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn meta(path: &Path) -> serde_json::Value {
    let mut p = path.as_os_str().to_owned();
    p.push(".meta.json");
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn info_reports_constants() {
    let out = plastic(&["info"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("beta             = 1.32471795724474"));
    assert!(text.contains("dens(L) = 2/√23  = 0.41702882811414"));
    assert!(text.contains("vol(W_a,W_b,W_c) = (0.42445224584391"));
    assert!(text.contains("0.74486176661974"));
}

#[test]
fn info_json_matches_library() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("info.json");
    assert!(plastic(&["info", "--out", out.to_str().unwrap()]).status.success());
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let vols: Vec<f64> = serde_json::from_value(report["exact_volumes"].clone()).unwrap();
    assert_eq!(vols, plastic_core::windows::exact_volumes().to_vec());
    assert_eq!(meta(&out)["command"], "info");
}

#[test]
fn peaks_include_1_2_2() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("peaks.csv");
    let run = plastic(&["peaks", "--kmax", "2.5", "--imin", "1e-6", "--weights", "1,1,1", "--out", out.to_str().unwrap()]);
    assert!(run.status.success(), "{}", stderr(&run));
    let rows = read_rows(&out);
    let row = rows.iter().find(|r| r[..3] == ["1", "2", "2"]).expect("row (1,2,2)");
    let k: f64 = row[3].parse().unwrap();
    assert!((k - 1.267_240_014).abs() < 1e-8);
    let m = meta(&out);
    assert_eq!(m["command"], "peaks");
    assert_eq!(m["parameters"]["query"]["kmax"], 2.5);
    assert!(m["version"].is_string());
    assert!(m["constants"]["beta"].as_f64().unwrap() > 1.3247);
}

#[test]
fn peaks_at_kmax_zero_is_single_row() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("p.json");
    let run = plastic(&["peaks", "--kmax", "0", "--format", "json", "--out", out.to_str().unwrap()]);
    assert!(run.status.success(), "{}", stderr(&run));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0]["n0"].as_i64(), rows[0]["n1"].as_i64(), rows[0]["n2"].as_i64()), (Some(0), Some(0), Some(0)));
}

#[test]
fn complex_weights_are_accepted() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("p.csv");
    let run = plastic(&["peaks", "--kmax", "0.5", "--weights", "1,0,-1,0.5,0,2", "--out", out.to_str().unwrap()]);
    assert!(run.status.success(), "{}", stderr(&run));
    assert!(!read_rows(&out).is_empty());
}

#[test]
fn finite_scan_logs_patch_size() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s.csv");
    let run = plastic(&["finite-scan", "--m", "18", "--k-from", "0", "--k-to", "2.5", "--samples", "200", "--out", out.to_str().unwrap()]);
    assert!(run.status.success());
    assert!(stderr(&run).contains("has 114 points"));
    assert_eq!(read_rows(&out).len(), 200);
    assert_eq!(meta(&out)["results"]["points"], 114);
}

#[test]
fn finite_scan_depth_zero_is_constant() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s.csv");
    let run = plastic(&["finite-scan", "--m", "0", "--k-from", "0", "--k-to", "3", "--samples", "31", "--out", out.to_str().unwrap()]);
    assert!(run.status.success());
    for row in read_rows(&out) {
        assert_eq!(row[1], "1");
        assert_eq!(row[2], "0");
    }
}

#[test]
fn finite_scan_resolves_1_2_2_at_depth_42() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s.csv");
    let run = plastic(&[
        "finite-scan", "--m", "42", "--k-from", "1.2672395", "--k-to", "1.2672405", "--samples", "201", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success());
    let rows = read_rows(&out);
    let k: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    let i: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    let target = plastic_core::algebra::wave_number(plastic_core::Miller::new(1, 2, 2)).k;
    // the finite-size peak is ~1/L ≈ 7e-6 wide, so the window only shows its crest;
    // require the crest within a tenth of the window of the Bragg position
    let maxima: Vec<usize> = (1..i.len() - 1).filter(|&j| i[j] > i[j - 1] && i[j] > i[j + 1]).collect();
    assert!(maxima.iter().any(|&j| (k[j] - target).abs() < 1e-7), "{maxima:?}");
}

#[test]
fn finite_scan_rejects_reversed_window() {
    let out = plastic(&["finite-scan", "--m", "5", "--k-from", "2", "--k-to", "1", "--out", "/dev/null"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn peak_compare_table() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("c.csv");
    let run = plastic(&["peak-compare", "--miller", "1,2,2", "--m-list", "18,24,30,36,42", "--out", out.to_str().unwrap()]);
    assert!(run.status.success(), "{}", stderr(&run));
    let rows = read_rows(&out);
    assert_eq!(rows.len(), 5);
    let d: Vec<f64> = rows.iter().map(|r| r[6].parse().unwrap()).collect();
    assert!(d[4] < d[0]);
}

#[test]
fn peak_compare_zero_approaches_density() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("c.csv");
    let run = plastic(&["peak-compare", "--miller", "(0,0,0)", "--m-list", "10,20", "--out", out.to_str().unwrap()]);
    assert!(run.status.success(), "{}", stderr(&run));
    let rows = read_rows(&out);
    let dens = plastic_core::algebra::point_density();
    let err: Vec<f64> = rows.iter().map(|r| (r[2].parse::<f64>().unwrap() - dens).abs()).collect();
    assert!(err[1] < err[0]);
    assert!(err[1] < 1e-2);
}

#[test]
fn peak_compare_needs_depths() {
    let run = plastic(&["peak-compare", "--miller", "1,2,2", "--m-list", "--out", "/dev/null"]);
    assert_eq!(run.status.code(), Some(1));
    let run = plastic(&["peak-compare", "--miller", "1,2,2", "--out", "/dev/null"]);
    assert_eq!(run.status.code(), Some(1));
}

#[test]
fn negative_miller_indices_parse() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("c.csv");
    let run = plastic(&["peak-compare", "--miller", "-1,-2,-2", "--m-list", "12", "--out", out.to_str().unwrap()]);
    assert!(run.status.success(), "{}", stderr(&run));
}

#[test]
fn window_depth_one() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("w.csv");
    let run = plastic(&["window", "--depth", "1", "--letter", "all", "--out", out.to_str().unwrap()]);
    assert!(run.status.success());
    let rows = read_rows(&out);
    assert_eq!(rows.len(), 4);
    let b: Vec<_> = rows.iter().filter(|r| r[2] == "b").map(|r| (r[0].clone(), r[1].clone())).collect();
    assert_eq!(b, vec![("0".into(), "0".into()), ("1".into(), "0".into())]);
}

#[test]
fn window_logs_box_counts() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("w.csv");
    let run = plastic(&["window", "--depth", "20", "--letter", "b", "--out", out.to_str().unwrap()]);
    assert!(run.status.success());
    let log = stderr(&run);
    assert!(log.contains("box-count volume"));
    assert_eq!(read_rows(&out).len() as u64, plastic_core::windows::cloud_counts(20)[1]);
    assert!(meta(&out)["results"]["box_count"]["volumes"].is_array());
}

#[test]
fn window_rejects_bad_letter() {
    assert_eq!(plastic(&["window", "--depth", "1", "--letter", "d", "--out", "/dev/null"]).status.code(), Some(1));
}

#[test]
fn window_too_deep_is_resource_error() {
    let run = plastic(&["window", "--depth", "90", "--out", "/dev/null"]);
    assert_eq!(run.status.code(), Some(3));
}

#[test]
fn ft_grid_two_by_two() {
    let dir = TempDir::new().unwrap();
    let run = plastic_in(&dir, &["ft-grid", "--letter", "b", "--box", "-4,4,-4,4", "--samples", "2", "--out-prefix", "g"]);
    assert!(run.status.success(), "{}", stderr(&run));
    let rows = read_rows(&dir.path().join("g.csv"));
    assert_eq!(rows.len(), 4);
    let z = |r: &Vec<String>| (r[2].parse::<f64>().unwrap(), r[3].parse::<f64>().unwrap());
    let (a, d) = (z(&rows[0]), z(&rows[3]));
    assert!((a.0 - d.0).abs() < 1e-9 && (a.1 + d.1).abs() < 1e-9);
    let (b, c) = (z(&rows[1]), z(&rows[2]));
    assert!((b.0 - c.0).abs() < 1e-9 && (b.1 + c.1).abs() < 1e-9);
    for name in ["g_abs.pgm", "g_arg.pgm"] {
        let bytes = std::fs::read(dir.path().join(name)).unwrap();
        assert!(bytes.starts_with(b"P5\n2 2\n255\n"));
        assert_eq!(bytes.len(), 11 + 4);
    }
    assert_eq!(meta(&dir.path().join("g.csv"))["command"], "ft-grid");
}

fn grid_abs(dir: &TempDir, samples: usize) -> Vec<(f64, f64, f64)> {
    let n = samples.to_string();
    let run = plastic_in(dir, &["ft-grid", "--letter", "b", "--box", "-4,4,-4,4", "--samples", &n, "--out-prefix", "g"]);
    assert!(run.status.success(), "{}", stderr(&run));
    read_rows(&dir.path().join("g.csv"))
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap(), r[4].parse().unwrap()))
        .collect()
}

fn argmax(rows: &[(f64, f64, f64)]) -> (f64, f64, f64) {
    rows.iter().copied().fold((0.0, 0.0, f64::NEG_INFINITY), |a, r| if r.2 > a.2 { r } else { a })
}

#[test]
fn ft_grid_maximum_sits_at_center() {
    let dir = TempDir::new().unwrap();
    let vol = plastic_core::windows::exact_volumes()[1];

    // an odd sample count puts a node on the origin
    let rows = grid_abs(&dir, 513);
    assert_eq!(rows.len(), 513 * 513);
    assert!(rows.iter().all(|r| r.2 <= vol + 1e-9));
    let (x, y, a) = argmax(&rows);
    assert_eq!((x, y), (0.0, 0.0));
    assert!((a - vol).abs() < 1e-9);

    // with 512 samples the four nodes nearest the origin are half a step away
    let rows = grid_abs(&dir, 512);
    assert_eq!(rows.len(), 512 * 512);
    assert!(rows.iter().all(|r| r.2 <= vol + 1e-9));
    let half = 4.0 / 511.0;
    let (x, y, a) = argmax(&rows);
    assert!((x.abs() - half).abs() < 1e-12 && (y.abs() - half).abs() < 1e-12, "{x} {y}");
    assert!(a < vol && vol - a < 1e-3);
}

#[test]
fn ft_grid_rejects_malformed_box() {
    let run = plastic(&["ft-grid", "--box", "1,0,0,1", "--out-prefix", "/dev/null"]);
    assert_eq!(run.status.code(), Some(1));
}

#[test]
fn help_and_version_succeed() {
    assert!(plastic(&["--help"]).status.success());
    assert!(plastic(&["--version"]).status.success());
    assert_eq!(plastic(&["no-such-command"]).status.code(), Some(1));
}
