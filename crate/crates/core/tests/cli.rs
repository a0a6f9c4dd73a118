use std::process::Command;

use nanotube_bands::cli::{self, CliError, Parsed, SCHEMA};
use serde_json::Value;

fn run(args: &[&str]) -> Result<String, CliError> {
    let mut full = vec!["nanotube-bands"];
    full.extend_from_slice(args);
    match cli::parse(full)? {
        Parsed::Info(text) => Ok(text),
        Parsed::Run(command) => cli::execute(&command, None).map(|o| o.text),
    }
}

fn command(args: &[&str]) -> cli::Command {
    match cli::parse(args).unwrap() {
        Parsed::Run(c) => *c,
        Parsed::Info(t) => panic!("{t}"),
    }
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&run(args).unwrap()).unwrap()
}

fn degenerate_flags(v: &Value) -> Vec<bool> {
    v["result"]["edges"]["gaps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| g["degenerate"].as_bool().unwrap())
        .collect()
}

#[test]
fn unit_c_closes_even_gaps() {
    let v = json(&["bands", "--a", "0", "--q", "zero", "--n-max", "5"]);
    assert_eq!(v["schema"], SCHEMA);
    assert_eq!(v["config"]["n_max"], 5);
    assert_eq!(degenerate_flags(&v), vec![false, true, false, true, false]);
}

#[test]
#[allow(clippy::approx_constant)]
fn half_c_closes_odd_gaps() {
    let v = json(&["bands", "--a", "1.0471975", "--q", "zero", "--n-max", "5"]);
    assert_eq!(degenerate_flags(&v), vec![true, false, true, false, true]);
    let a = v["config"]["resolved"]["a"].as_f64().unwrap();
    assert_eq!(a, 1.0471975);
}

#[test]
fn field_input_is_converted_and_echoed() {
    let v = json(&[
        "bands", "--B", "1.0", "--N", "5", "--j", "1", "--n-max", "3",
    ]);
    let r = &v["config"]["resolved"];
    let expect = 3.0 / 16.0 / (std::f64::consts::PI / 10.0).tan();
    assert!((r["a"].as_f64().unwrap() - expect).abs() < 1e-15);
    assert_eq!(r["sector"], 1);
    assert_eq!(v["config"]["magnetic"]["kind"], "field");
}

#[test]
fn exit_codes() {
    let bin = env!("CARGO_BIN_EXE_nanotube-bands");
    let out = Command::new(bin)
        .env_remove(cli::OUT_DIR_ENV)
        .args(["bands", "--a", "0.1", "--B", "1", "--N", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(bin)
        .env_remove(cli::OUT_DIR_ENV)
        .args(["bands", "--q", "zero"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(bin)
        .env_remove(cli::OUT_DIR_ENV)
        .args(["bands", "--a", "0", "--q", "nonsense"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // c = cos(π/2) is in the pure-point regime: no band structure exists
    let out = Command::new(bin)
        .env_remove(cli::OUT_DIR_ENV)
        .args(["bands", "--a", "1.5707963267948966"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(bin)
        .env_remove(cli::OUT_DIR_ENV)
        .args(["bands", "--a", "0.4", "--n-max", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains(SCHEMA));
}

#[test]
fn output_is_deterministic() {
    for cmd in ["bands", "masses", "verify"] {
        let args = [cmd, "--q", "two-step", "--a", "0.9", "--n-max", "10"];
        assert_eq!(run(&args).unwrap(), run(&args).unwrap(), "{cmd}");
    }
}

#[test]
fn dispersion_row_count() {
    let v = json(&[
        "dispersion",
        "--q",
        "zero",
        "--a",
        "0",
        "--grid",
        "0:40:400",
    ]);
    let rows = v["result"].as_array().unwrap();
    assert_eq!(rows.len(), 400);
    assert_eq!(rows[0]["k"]["region"], "band");
    let csv = run(&[
        "dispersion",
        "--q",
        "zero",
        "--a",
        "0",
        "--grid",
        "0:40:400",
        "--format",
        "csv",
    ])
    .unwrap();
    let data: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "lambda,re_k,im_k");
    assert_eq!(data.len(), 401);
}

#[test]
fn verify_text_report() {
    let text = run(&[
        "verify", "--q", "two-step", "--a", "0.9", "--n-max", "50", "--format", "text",
    ])
    .unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("schema="));
    assert!(lines.next().unwrap().starts_with("config="));
    let summary = lines.next().unwrap();
    assert!(summary.starts_with("trace_residual="), "{summary}");
    assert!(summary.contains("failures=0"), "{summary}");
    let checks: Vec<&str> = lines.collect();
    assert!(checks.len() > 500);
    assert!(checks.iter().all(|l| l.ends_with("pass=true")));
}

#[test]
fn flat_bands_in_pure_point_regime() {
    let v = json(&[
        "flatbands",
        "--q",
        "zero",
        "--a",
        "1.5707963267948966",
        "--n-max",
        "5",
    ]);
    assert_eq!(v["result"]["pure_point"], true);
    let extra = v["result"]["f_minus_one"].as_array().unwrap();
    assert!(!extra.is_empty());
    for l in extra {
        let z = l.as_f64().unwrap().sqrt();
        assert!(((2.0 * z).cos() + 7.0 / 9.0).abs() < 1e-9);
    }
    let d = v["result"]["dirichlet"].as_array().unwrap();
    let pi2 = std::f64::consts::PI.powi(2);
    assert!((d[0].as_f64().unwrap() - pi2).abs() < 1e-9);
}

#[test]
fn oracle_in_a_magnetic_sector() {
    let v = json(&[
        "oracle", "--q", "two-step", "--B", "0.8", "--N", "5", "--j", "1", "--grid", "0:40:200",
    ]);
    assert!(v["summary"]["max_deviation"].as_f64().unwrap() < 1e-7);
    assert_eq!(v["summary"]["mismatches"], 0);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        "q = \"two-step\"\na = 0.9\nn_max = 4\nformat = \"csv\"\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let csv = run(&["bands", "--config", p]).unwrap();
    assert!(csv.contains("\"name\":\"two-step\""));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 6);
    let v = json(&[
        "bands", "--config", p, "--format", "json", "--n-max", "2", "--q", "zero",
    ]);
    assert_eq!(v["config"]["n_max"], 2);
    assert_eq!(v["config"]["potential"]["name"], "zero");
    assert_eq!(v["config"]["magnetic"]["a"], 0.9);

    std::fs::write(&path, "a = 0.9\nB = 1.0\nN = 3\n").unwrap();
    assert!(matches!(
        run(&["bands", "--config", p]),
        Err(CliError::Usage(_))
    ));
    // flags replace the whole magnetic block of the file
    assert!(run(&["bands", "--config", p, "--a", "0.2"]).is_ok());
}

#[test]
fn output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cmd = command(&["nanotube-bands", "masses", "--a", "0.3", "--n-max", "3"]);
    let out = cli::execute(&cmd, Some(dir.path())).unwrap();
    let written = out.written.unwrap();
    assert_eq!(written, dir.path().join("masses.json"));
    assert_eq!(std::fs::read_to_string(written).unwrap(), out.text);

    let cmd = command(&[
        "nanotube-bands",
        "bands",
        "--a",
        "0.3",
        "--output",
        "sub/b.txt",
        "--format",
        "text",
    ]);
    let out = cli::execute(&cmd, Some(dir.path())).unwrap();
    assert_eq!(out.written.unwrap(), dir.path().join("sub/b.txt"));
}

#[test]
fn help_is_not_an_error() {
    let text = run(&["--help"]).unwrap();
    assert!(text.contains("bands") && text.contains("flatbands"));
}
