use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use semiconf::closed_forms::coeff_q0;
use semiconf::{BiSeries, CScalar, Mode, SeriesFile};
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semiconf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const HOPF: &str = r#"{"q": 1, "order": 10, "data": [["1", "0"], ["0", "-2"], ["-2", "0"]]}"#;

fn solve_hopf(dir: &TempDir) -> PathBuf {
    let input = write(dir, "hopf.json", HOPF);
    let out = dir.path().join("hopf_coeffs.json");
    let res = run(&["solve", "--input", s(&input), "--out", s(&out)]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    out
}

fn series(path: &Path) -> BiSeries {
    let file: SeriesFile = serde_json::from_value(json(path)).unwrap();
    BiSeries::from_json(&file).unwrap()
}

#[test]
fn hopf_solve_has_four_nonzero_entries() {
    let dir = TempDir::new().unwrap();
    let psi = series(&solve_hopf(&dir));
    assert_eq!(psi.nnz(), 4);
    assert_eq!(psi.get(0, 0), CScalar::gaussian(1, 1, 0, 1));
    assert_eq!(psi.get(0, 1), CScalar::gaussian(0, 1, -2, 1));
    assert_eq!(psi.get(0, 2), CScalar::gaussian(-1, 1, 0, 1));
    assert_eq!(psi.get(1, 0), CScalar::gaussian(-2, 1, 0, 1));
    let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 2, "no temporary files left behind: {names:?}");
}

#[test]
fn solve_prints_triangle_summary() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "hopf.json", HOPF);
    let out = dir.path().join("c.json");
    let res = run(&["solve", "--input", s(&input), "--out", s(&out), "--order", "4"]);
    let text = String::from_utf8(res.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows, ["0 ***..", "1 *...", "2 ...", "3 ..", "4 ."]);
}

#[test]
fn q0_solve_matches_closed_coefficients() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "q0.json", r#"{"q": 0, "order": 12, "data": [["1", "0"], ["1", "0"]]}"#);
    let out = dir.path().join("q0_coeffs.json");
    assert_eq!(code(&run(&["solve", "--input", s(&input), "--out", s(&out)])), 0);
    let psi = series(&out);
    let c = CScalar::from_int(1, Mode::Exact);
    for k in 0..=12 {
        for l in 0..=12 - k {
            assert_eq!(psi.get(k, l), coeff_q0(&c, k, l), "({k}, {l})");
        }
    }
}

#[test]
fn degenerate_data_exits_2() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "bad.json", r#"{"q": 0, "order": 6, "data": [["1", "0"], ["0", "0"]]}"#);
    let out = dir.path().join("x.json");
    assert_eq!(code(&run(&["solve", "--input", s(&input), "--out", s(&out)])), 2);
    assert!(!out.exists());
}

#[test]
fn parse_errors_exit_3() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.json");
    let garbled = write(&dir, "garbled.json", "{\"q\": 0, \"order\": 6, \"data\": [");
    assert_eq!(code(&run(&["solve", "--input", s(&garbled), "--out", s(&out)])), 3);
    let badnum = write(&dir, "badnum.json", r#"{"q": 0, "order": 6, "data": [["1", "0"], ["x", "0"]]}"#);
    assert_eq!(code(&run(&["solve", "--input", s(&badnum), "--out", s(&out)])), 3);
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&run(&["solve", "--input", s(&missing), "--out", s(&out)])), 3);
    let low = write(&dir, "low.json", r#"{"q": 0, "order": 1, "data": [["1", "0"], ["1", "0"]]}"#);
    assert_eq!(code(&run(&["solve", "--input", s(&low), "--out", s(&out)])), 3);
    assert_eq!(code(&run(&["solve", "--bogus"])), 3);
    assert_eq!(code(&run(&["radius", "--family", "q7", "--c", "1,0"])), 3);
    assert_eq!(code(&run(&["radius", "--family", "q0", "--c", "1"])), 3);
}

#[test]
fn empty_grid_exits_3() {
    let dir = TempDir::new().unwrap();
    let coeffs = solve_hopf(&dir);
    let grid = write(&dir, "empty.csv", "x,y,z\n");
    assert_eq!(code(&run(&["verify", "--input", s(&coeffs), "--grid", s(&grid)])), 3);
}

#[test]
fn on_axis_point_in_q1_grid_exits_2() {
    let dir = TempDir::new().unwrap();
    let coeffs = solve_hopf(&dir);
    let grid = write(&dir, "axis.csv", "x,y,z\n0.3,0.1,0.0\n0,0,0.5\n");
    assert_eq!(code(&run(&["verify", "--input", s(&coeffs), "--grid", s(&grid)])), 2);
    assert_eq!(code(&run(&["eval", "--input", s(&coeffs), "--grid", s(&grid)])), 2);
}

#[test]
fn hopf_verify_round_trips_and_is_semiconformal() {
    let dir = TempDir::new().unwrap();
    let coeffs = solve_hopf(&dir);
    let grid = write(
        &dir,
        "grid.csv",
        "x,y,z\n0.3,0.1,0.2\n-0.2,0.4,-0.5\n1.0,-0.7,0.9\n0.05,0.02,-1.5\n",
    );
    let report = dir.path().join("report.json");
    let res = run(&["verify", "--input", s(&coeffs), "--grid", s(&grid), "--out", s(&report)]);
    assert_eq!(code(&res), 0);
    let r = json(&report);
    assert_eq!(r["coefficients_roundtrip"], true);
    assert_eq!(r["points"].as_array().unwrap().len(), 4);
    assert!(r["semiconformality"]["max"].as_f64().unwrap() < 1e-12);
    assert_eq!(r["within_tol"], true);

    let file: SeriesFile = serde_json::from_value(json(&coeffs)).unwrap();
    assert_eq!(BiSeries::from_json(&file).unwrap().to_json(), file);
}

#[test]
fn entire_q0_solution_is_semiconformal_but_not_harmonic() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "q0i.json", r#"{"q": 0, "order": 30, "data": [["1", "0"], ["0", "1"]]}"#);
    let coeffs = dir.path().join("q0i_coeffs.json");
    assert_eq!(code(&run(&["solve", "--input", s(&input), "--out", s(&coeffs)])), 0);
    let grid = write(&dir, "grid.csv", "x,y,z\n0.2,0.2,0.1\n0.1,-0.2,-0.1\n0.3,0.0,0.05\n");
    let res = run(&["verify", "--input", s(&coeffs), "--grid", s(&grid)]);
    assert_eq!(code(&res), 0);
    let r = stdout_json(&res);
    assert!(r["semiconformality"]["max"].as_f64().unwrap() < 1e-8, "{r}");
    assert!(r["harmonicity"]["max"].as_f64().unwrap() > 1e-3, "{r}");
}

#[test]
fn eval_writes_phi_csv() {
    let dir = TempDir::new().unwrap();
    let coeffs = solve_hopf(&dir);
    let grid = write(&dir, "grid.csv", "x,y,z\n1,0,0\n");
    let out = dir.path().join("phi.csv");
    assert_eq!(code(&run(&["eval", "--input", s(&coeffs), "--grid", s(&grid), "--out", s(&out)])), 0);
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,z,re,im"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    // u = 1/2, z = 0: phi = psi / u = 0.
    assert_eq!(&row[..3], &[1.0, 0.0, 0.0]);
    assert!(row[3].abs() < 1e-15 && row[4].abs() < 1e-15, "{row:?}");
}

#[test]
fn identities_pass_by_default() {
    let res = run(&["identities"]);
    assert_eq!(code(&res), 0);
    let reports = stdout_json(&res);
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), semiconf::identities::CHECK_NAMES.len());
    assert!(reports.iter().all(|r| r["status"] == "pass" && r["first_failure"].is_null()));
}

#[test]
fn identities_pass_at_kmax_50() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("ids.json");
    let res = run(&["identities", "--kmax", "50", "--out", s(&out)]);
    assert_eq!(code(&res), 0);
    let r = json(&out);
    let sk = r.as_array().unwrap().iter().find(|r| r["name"] == "s_k").unwrap();
    assert_eq!(sk["status"], "pass");
    assert!(sk["range"].as_str().unwrap().contains("50"));
}

#[test]
fn injected_fault_exits_1_with_first_failure() {
    let res = run(&["identities", "--inject-fault", "f_q1_recurrence"]);
    assert_eq!(code(&res), 1);
    let reports = stdout_json(&res);
    let bad: Vec<_> = reports.as_array().unwrap().iter().filter(|r| r["status"] == "fail").collect();
    assert_eq!(bad.len(), 1);
    assert_eq!(bad[0]["name"], "f_q1_recurrence");
    assert!(bad[0]["first_failure"]["index"].is_array());
    assert_eq!(code(&run(&["identities", "--inject-fault", "nope"])), 3);
}

#[test]
fn radius_q0_is_one_sixth() {
    let res = run(&["radius", "--family", "q0", "--c", "1,0"]);
    assert_eq!(code(&res), 0);
    let r = stdout_json(&res);
    let emp = r["empirical"].as_f64().unwrap();
    assert!((emp * 6.0 - 1.0).abs() < 0.05, "{r}");
    assert!((r["theoretical"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-15);
    assert!(r["relative_gap"].as_f64().unwrap().abs() < 0.05);
    assert_eq!(r["method"], "ratio");
    assert!(r["terms_used"].as_u64().unwrap() >= 50);
}

#[test]
fn radius_reads_family_file() {
    let dir = TempDir::new().unwrap();
    let fam = write(&dir, "fam.json", r#"{"family": "two_param", "alpha": ["1", "0"], "beta": ["1/2", "0"]}"#);
    let res = run(&["radius", "--input", s(&fam), "--method", "root"]);
    assert_eq!(code(&res), 0);
    let r = stdout_json(&res);
    assert_eq!(r["family"], "two_param");
    assert!(r["empirical"].as_f64().unwrap() >= 0.95 * r["theoretical"].as_f64().unwrap(), "{r}");
}

#[test]
fn reports_use_seventeen_significant_digits() {
    let res = run(&["radius", "--family", "q0", "--c", "1,0"]);
    let text = String::from_utf8(res.stdout).unwrap();
    let line = text.lines().find(|l| l.contains("\"theoretical\"")).unwrap();
    assert!(line.contains("1.6666666666666666e-1"), "{line}");
}

#[test]
fn fibres_unit_circle() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("fibre.csv");
    let header = dir.path().join("fibre.json");
    let res = run(&[
        "fibres", "--alpha", "0,-1", "--eta", "0,0", "--samples", "64", "--out", s(&out), "--header", s(&header),
    ]);
    assert_eq!(code(&res), 0);
    let h = json(&header);
    assert!((h["radius"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    for (i, want) in [0.0, 0.0, 1.0].iter().enumerate() {
        assert!(h["center"][i].as_f64().unwrap().abs() < 1e-9);
        assert!((h["normal"][i].as_f64().unwrap().abs() - want).abs() < 1e-9);
    }
    assert!(h["phi_spread"].as_f64().unwrap() < 1e-10);
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,z,theta"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 64);
    for r in rows {
        assert!((r[0].hypot(r[1]) - 1.0).abs() < 1e-12 && r[2].abs() < 1e-12, "{r:?}");
    }
}

#[test]
fn fibre_through_axis_reports_no_spread() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("fibre.csv");
    let res = run(&["fibres", "--alpha", "2,0", "--eta", "0,1", "--samples", "64", "--out", s(&out)]);
    assert_eq!(code(&res), 0);
    let h = stdout_json(&res);
    assert!(h["phi_spread"].is_null());
    assert!(h["quadric_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn degenerate_fibre_exits_2() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("fibre.csv");
    assert_eq!(code(&run(&["fibres", "--alpha", "0,0", "--eta", "0,0", "--out", s(&out)])), 3);
    assert_eq!(code(&run(&["fibres", "--alpha", "1,0", "--eta", "0,0", "--out", s(&out)])), 2);
}

#[test]
fn compare_q1_series_with_closed_form() {
    let near = run(&["compare", "--family", "q1", "--c", "1,0", "--order", "30", "--umax", "0.1"]);
    assert_eq!(code(&near), 0);
    assert!(stdout_json(&near)["max_gap"].as_f64().unwrap() < 1e-10);
    let full = run(&["compare", "--family", "q1", "--c", "1,0", "--order", "60", "--mode", "float"]);
    let r = stdout_json(&full);
    assert_eq!(r["points"], 441);
    assert!(r["max_gap"].as_f64().unwrap() < 1e-10, "{r}");
}

#[test]
fn compare_without_closed_form_exits_2() {
    let res = run(&["compare", "--family", "two_param", "--alpha", "1,0", "--beta", "1/2,0"]);
    assert_eq!(code(&res), 2);
}
