use std::path::Path;
use std::process::{Command, Output};

fn symflat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symflat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn verify_classify_suite_passes() {
    let out = symflat(&["verify", "--suite", "classify"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.ends_with("PASS")).count(), 6);
}

#[test]
fn verify_t4_suite_has_six_passing_rows() {
    let out = symflat(&["verify", "--suite", "t4", "--json"]);
    assert_eq!(code(&out), 0);
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r["pass"] == true));
}

#[test]
fn verify_rejects_unknown_suite() {
    assert_eq!(code(&symflat(&["verify", "--suite", "bogus"])), 2);
}

#[test]
fn classify_rational_pair() {
    let out = symflat(&["classify", "1", "1/2"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("c0:          1/2"));
    let json = symflat(&["classify", "1", "1/2", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["c0"], "1/2");
    assert_eq!(v["verdict"]["case"], "s1_extension");
}

#[test]
fn classify_irrational_is_flat_only() {
    let out = symflat(&["classify", "1", "--irrational-ratio", "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"]["case"], "flat_only");
    assert_eq!(v["euler_class"], "0");
}

#[test]
fn classify_configuration_errors() {
    assert_eq!(code(&symflat(&["classify", "0", "1"])), 2);
    assert_eq!(code(&symflat(&["classify", "1", "x/y"])), 2);
    assert_eq!(code(&symflat(&["classify", "1"])), 2);
}

#[test]
fn eval_flat_preset_is_zero() {
    let out = symflat(&["eval", "--preset", "flat_wilson(0.1,0.2,0.3,0.4)", "--kind", "ym", "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["value"], 0.0);
    assert_eq!(v[0]["critical"], true);
}

#[test]
fn eval_bpst_with_torus_functional_is_a_configuration_error() {
    assert_eq!(code(&symflat(&["eval", "--preset", "bpst", "--kind", "pym"])), 2);
}

#[test]
fn eval_scene_file_and_schema_errors() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("scene.json");
    std::fs::write(&good, r#"{"preset": "constant_flux(0.5)", "resolution": 8, "b": "minus_phi"}"#).unwrap();
    let out = symflat(&["eval", "--scene", good.to_str().unwrap(), "--kind", "cone", "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v[0]["value"].as_f64().unwrap().abs() < 1e-20);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"preset": "constant_flux(0.5)", "colour": "blue"}"#).unwrap();
    assert_eq!(code(&symflat(&["eval", "--scene", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&symflat(&["eval", "--scene", "/nonexistent/scene.json"])), 2);
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    assert_eq!(
        r.headers().unwrap().iter().collect::<Vec<_>>(),
        ["time", "value_ym", "value_pym", "value_phi", "residual"]
    );
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn flow_from_flat_preset_has_only_the_initial_row() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("trace.csv");
    let out = symflat(&[
        "flow", "--preset", "flat_wilson(0.1,0.2,0.3,0.4)", "--resolution", "8", "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(read_csv(&out_path).len(), 1);
}

#[test]
fn pym_flow_on_t4_example_is_monotone_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = symflat(&[
            "flow", "--preset", "t4_yang_mills_example", "--resolution", "8", "--kind", "pym", "--steps", "100",
            "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        (path, stdout(&out))
    };
    let (a, report_a) = run("a.csv");
    let (b, report_b) = run("b.csv");
    let rows = read_csv(&a);
    assert_eq!(rows.len(), 101);
    let pym: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(pym.windows(2).all(|w| w[1] - w[0] <= 1e-10), "value_pym increased");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(report_a, report_b);
}

#[test]
fn flow_requires_an_output_path() {
    assert_eq!(code(&symflat(&["flow", "--preset", "constant_flux(0.2)"])), 2);
}

#[test]
fn flow_needs_a_source() {
    assert_eq!(code(&symflat(&["flow", "--out", "x.csv"])), 2);
}
