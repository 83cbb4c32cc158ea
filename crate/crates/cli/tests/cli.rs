use std::path::Path;
use std::process::{Command, Output};

fn ncqm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncqm"))
        .args(args)
        .env_remove("NCQM_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn ec_spectrum_has_twenty_rows_with_small_residuals() {
    let o = ncqm(&["spectrum", "--mechanism", "ec", "--n", "0..4", "--mphi", "0..3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["mechanism", "n", "m_phi", "n_alpha", "n_beta", "energy", "method", "residual"]);
    assert_eq!(rows.len(), 20);
    for row in &rows {
        assert_eq!(row[0], "ec");
        let n: u32 = row[1].parse().unwrap();
        let m: u32 = row[2].parse().unwrap();
        assert_eq!(row[3].parse::<u32>().unwrap(), n + m);
        assert_eq!(row[4].parse::<u32>().unwrap(), n);
        assert!(row[7].parse::<f64>().unwrap() <= 1e-9);
    }
}

#[test]
fn output_is_deterministic() {
    let a = ncqm(&["spectrum", "--n", "0..6", "--mphi", "0..6"]);
    let b = ncqm(&["spectrum", "--n", "0..6", "--mphi", "0..6"]);
    assert_eq!(a.stdout, b.stdout);
    let (_, rows) = csv_rows(&stdout(&a));
    let order: Vec<(u32, u32)> = rows.iter().map(|r| (r[1].parse().unwrap(), r[2].parse().unwrap())).collect();
    let mut sorted = order.clone();
    sorted.sort();
    assert_eq!(order, sorted);
}

#[test]
fn sqf_spectrum_commutative_limit() {
    let o = ncqm(&["spectrum", "--mechanism", "sqf", "--eta0", "0", "--theta0", "0", "--n", "0..2", "--mphi", "0..2"]);
    assert!(o.status.success());
    for row in csv_rows(&stdout(&o)).1 {
        let n: f64 = row[1].parse().unwrap();
        let m: f64 = row[2].parse().unwrap();
        assert_eq!(row[5].parse::<f64>().unwrap(), 2.0 * n + m + 1.0);
    }
}

#[test]
fn energy_operator_spectrum_is_rejected() {
    let o = ncqm(&["spectrum", "--mechanism", "eo_ii"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn commutator_residuals_are_tiny() {
    let o = ncqm(&["commutators", "--theta", "0.1", "--eta", "0.05"]);
    assert!(o.status.success());
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let list = json.as_array().unwrap();
    assert_eq!(list.len(), 5);
    for entry in list {
        assert!(entry["max_residual"].as_f64().unwrap() < 1e-10);
        assert!(entry["target"]["im"].is_number());
        assert!(entry["commutator"].is_string());
    }
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    std::fs::write(
        &path,
        r#"{"eta0": 0.0, "theta0": 0.0, "alpha": 1.0, "beta": 1.0, "e_ref": 10.0, "mechanism": "sqf",
            "hbar": 1.0, "mass": 1.0, "charge": 1.0, "spring_k": 4.0}"#,
    )
    .unwrap();
    let config = path.to_str().unwrap();
    let o = ncqm(&["--config", config, "spectrum", "--n", "0", "--mphi", "0"]);
    let (_, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows[0][0], "sqf");
    assert_eq!(rows[0][5].parse::<f64>().unwrap(), 2.0);
    let o = ncqm(&["--config", config, "--spring-k", "9", "spectrum", "--n", "0", "--mphi", "0"]);
    assert_eq!(csv_rows(&stdout(&o)).1[0][5].parse::<f64>().unwrap(), 3.0);

    let env = Command::new(env!("CARGO_BIN_EXE_ncqm"))
        .args(["spectrum", "--n", "0", "--mphi", "0"])
        .env("NCQM_CONFIG", config)
        .output()
        .unwrap();
    assert_eq!(csv_rows(&String::from_utf8(env.stdout).unwrap()).1[0][0], "sqf");
}

#[test]
fn bad_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"eta0": 0.1}"#).unwrap();
    let o = ncqm(&["--config", path.to_str().unwrap(), "verify"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    assert_eq!(ncqm(&["--mass", "-1", "spectrum"]).status.code(), Some(2));
    assert_eq!(ncqm(&["--config", "/nonexistent/p.json", "spectrum"]).status.code(), Some(2));
}

#[test]
fn verify_commutative_exits_zero() {
    let o = ncqm(&["--eta0", "0", "--theta0", "0", "verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["failed"], 0);
}

#[test]
fn verify_lists_expected_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = ncqm(&["verify", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let entries = json["entries"].as_array().unwrap();
    let bogoliubov = entries.iter().find(|e| e["name"] == "spectrum.bogoliubov_vs_matrix").unwrap();
    assert_eq!(bogoliubov["status"], "expected_divergence");
    let row = &json["comparisons"][0];
    for key in ["params", "level_index", "oracle_a", "oracle_b", "closed_form", "max_rel_diff"] {
        assert!(!row[key].is_null(), "{key}");
    }
}

#[test]
fn wavefunction_csv() {
    let o = ncqm(&["wavefunction", "--n", "1", "--mphi", "2", "--points", "50"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["r", "xi", "R_value", "density"]);
    assert_eq!(rows.len(), 50);
    for row in rows {
        let v: f64 = row[2].parse().unwrap();
        assert!((row[3].parse::<f64>().unwrap() - v * v).abs() <= 1e-15 * v * v + 1e-300);
    }
}

#[test]
fn fractional_csv_columns_agree() {
    let o = ncqm(&["fractional", "--order", "0.5", "--x-max", "4", "--points", "8"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["x", "caputo_exp", "caputo_exp_series", "liouville_exp", "grunwald_letnikov_exp"]);
    for row in rows {
        let closed: f64 = row[1].parse().unwrap();
        let series: f64 = row[2].parse().unwrap();
        let gl: f64 = row[4].parse().unwrap();
        assert!((closed - series).abs() <= 1e-10 * closed);
        assert!((closed - gl).abs() <= 1e-5 * closed);
    }
}

#[test]
fn ring_sweep_csv() {
    let o = ncqm(&["ring", "--points", "5", "--l=-1..1", "--eta", "0"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["phi_over_phi0", "l", "energy", "current"]);
    assert_eq!(rows.len(), 15);
    let zero_flux: Vec<&Vec<String>> = rows.iter().filter(|r| r[0].parse::<f64>().unwrap() == 0.0).collect();
    for r in zero_flux {
        let l: f64 = r[1].parse().unwrap();
        assert!((r[2].parse::<f64>().unwrap() - 0.5 * l * l).abs() < 1e-15);
    }
}

#[test]
fn writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    assert!(ncqm(&["spectrum", "--n", "0", "--mphi", "0", "-o", out.to_str().unwrap()]).status.success());
    assert!(Path::new(&out).exists());
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("mechanism,"));
}
