use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mirrorpath")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn value(doc: &Value) -> f64 {
    doc["result"]["value"].as_f64().expect("numeric value")
}

#[test]
fn half_oscillator_kernel_matches_image_pair() {
    let doc = json(&["kernel", "--system", "half-ho", "--omega", "1", "--euclidean", "--beta", "1", "--xf", "1", "--xi", "1"]);
    let (s, c) = (1f64.sinh(), 1f64.cosh());
    let pref = (1.0 / (2.0 * std::f64::consts::PI * s)).sqrt();
    let expected = pref * ((-(2.0 * c - 2.0) / (2.0 * s)).exp() - (-(2.0 * c + 2.0) / (2.0 * s)).exp());
    assert!((value(&doc) - expected).abs() < 1e-13);
    for key in ["request", "result", "diagnostics"] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn well_trace() {
    let doc = json(&["trace", "--system", "isw", "--width", "pi", "--beta", "0.5"]);
    assert!((value(&doc) - 0.753313).abs() < 1e-4);
    assert_eq!(doc["diagnostics"]["traces"][0]["tail_warning"], Value::Bool(false));
}

#[test]
fn csv_long_format() {
    let out = run(&["kernel", "--system", "half-line", "--beta", "1", "--xf", "0.5,1", "--xi", "1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x_f,x_i,beta,value");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0.5,1.0,1.0,"));
}

#[test]
fn greens_poles_and_values() {
    let doc = json(&["greens", "--system", "isw", "--xf", "1", "--xi", "1", "--scan", "0.5,10"]);
    let poles: Vec<f64> = doc["result"]["poles"].as_array().unwrap().iter().map(|p| p.as_f64().unwrap()).collect();
    assert_eq!(poles.len(), 3);
    for (p, e) in poles.iter().zip([1.0, 4.0, 9.0]) {
        assert!((p - e).abs() < 1e-6);
    }
    let isw = json(&["greens", "--system", "isw", "--xf", "0.7", "--xi", "2.0", "--energy", "2.5"]);
    let pt = json(&["greens", "--system", "rosen-morse", "--s", "0.5", "--xf", "0.7", "--xi", "2.0", "--energy", "2.5"]);
    assert!((value(&isw) - value(&pt)).abs() < 1e-9);
}

#[test]
fn spectra() {
    let doc = json(&["spectrum", "--system", "rosen-morse", "--b", "2", "--levels", "3"]);
    let e: Vec<f64> = doc["result"]["energies"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    for (n, got) in e.iter().enumerate() {
        let want = (2.0 + n as f64).powi(2) - 4.0;
        assert!((got - want).abs() < 1e-3, "{n}: {got}");
    }
    let doc = json(&["spectrum", "--system", "half-ho", "--omega", "1", "--method", "trace", "--levels", "2"]);
    let e = doc["result"]["energies"].as_array().unwrap();
    assert!((e[0].as_f64().unwrap() - 1.5).abs() < 5e-2);
    assert!((e[1].as_f64().unwrap() - 3.5).abs() < 5e-2);
}

#[test]
fn susy_limit() {
    let doc = json(&["susy", "--system", "rosen-morse", "--b", "1", "--xf", "0.3,1.7"]);
    assert_eq!(doc["result"]["isw_limit"]["passed"], Value::Bool(true));
    for p in doc["result"]["potentials"].as_array().unwrap() {
        assert_eq!(p["v_minus"].as_f64().unwrap(), -1.0);
    }
}

#[test]
fn verify_exit_codes() {
    let out = run(&["verify", "--suite", "greens"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["result"]["passed"], Value::Bool(true));

    let out = Command::new(env!("CARGO_BIN_EXE_mirrorpath"))
        .args(["verify", "--suite", "kernels"])
        .env("MIRRORPATH_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_requests_exit_2() {
    let cases: [&[&str]; 6] = [
        &["kernel", "--system", "bogus"],
        &["kernel", "--system", "ho", "--omega", "1", "--xf", "1", "--xi", "1"],
        &["kernel", "--system", "isw", "--width", "pi", "--real-tau", "1", "--xf", "1", "--xi", "1"],
        &["greens", "--system", "rosen-morse", "--xf", "1", "--xi", "1", "--energy", "1"],
        &["trace", "--system", "half-line", "--beta", "1"],
        &["kernel", "--system", "half-line", "--beta", "-1", "--xf", "1", "--xi", "1"],
    ];
    for args in cases {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn output_is_byte_identical() {
    let args = ["trace", "--system", "half-ho", "--omega", "1", "--beta", "0.5,1,2"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let seeded = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_mirrorpath"))
            .args(["verify", "--suite", "kernels"])
            .env("MIRRORPATH_SEED", seed)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(seeded("11"), seeded("11"));
}
