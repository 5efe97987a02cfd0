use std::fs;
use std::path::Path;

use winfree::cli::{run_from, EXIT_DIVERGENCE, EXIT_OK, EXIT_USAGE};

fn run(args: &[&str]) -> i32 {
    run_from(std::iter::once("winfree").chain(args.iter().copied()))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

const INCOHERENT: &str = r#"{
    "model": {"n": 3, "kappa": 0.0, "frequencies": [1.0, 2.0, 3.5]},
    "initial": {"explicit": [0.0, 1.0, -1.0]},
    "sim": {"dt": 0.01, "t_end": 20, "record_stride": 10}
}"#;

#[test]
fn simulate_writes_trace_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.json", INCOHERENT);
    let out = dir.path().join("out");
    assert_eq!(run(&["--quiet", "--out-dir", out.to_str().unwrap(), "simulate", &cfg]), EXIT_OK);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["label"], "incoherence");
    let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert!(trace.starts_with("t,theta_0,theta_1,theta_2,A,R,D,Inc\n"));
    assert_eq!(trace.lines().count(), 1 + 201);

    // classify the written trace back
    assert_eq!(run(&["classify", out.join("trace.csv").to_str().unwrap(), "--config", &cfg]), EXIT_OK);
}

#[test]
fn simulate_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.json", &INCOHERENT.replace("\"kappa\": 0.0", "\"kappa\": 0.8"));
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run(&["-q", "--out-dir", a.to_str().unwrap(), "simulate", &cfg]), EXIT_OK);
    assert_eq!(run(&["-q", "--out-dir", b.to_str().unwrap(), "simulate", &cfg]), EXIT_OK);
    for f in ["trace.csv", "summary.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
    }
}

#[test]
fn malformed_config_fails_closed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    for (name, text) in [
        ("broken.json", "{ \"model\": "),
        ("unknown.json", &INCOHERENT.replace("\"sim\"", "\"simulation\"")[..]),
        ("zero_order.json", &INCOHERENT.replace("\"n\": 3", "\"n\": 0")[..]),
    ] {
        let cfg = write(dir.path(), name, text);
        assert_eq!(run(&["-q", "--out-dir", out.to_str().unwrap(), "simulate", &cfg]), EXIT_USAGE, "{name}");
        assert!(!out.exists(), "{name} produced output");
    }
    assert_eq!(run(&["simulate", "/nonexistent/config.json"]), EXIT_USAGE);
    assert_eq!(run(&["no-such-command"]), EXIT_USAGE);
}

#[test]
fn divergence_exit_code_keeps_partial_trace() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{
        "model": {"n": 1, "kappa": 1.7976931348623157e308, "frequencies": [0.0, 0.0]},
        "initial": {"explicit": [0.1, -0.2]},
        "sim": {"dt": 1.0, "t_end": 50}
    }"#;
    let cfg = write(dir.path(), "stiff.json", text);
    let out = dir.path().join("out");
    assert_eq!(run(&["-q", "--out-dir", out.to_str().unwrap(), "simulate", &cfg]), EXIT_DIVERGENCE);
    assert!(out.join("trace.csv").exists());
    assert!(!out.join("summary.json").exists());
}

#[test]
fn thresholds_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("th");
    let code = run(&[
        "-q", "--out-dir", out.to_str().unwrap(), "thresholds", "-n", "1", "--alpha", "1.5707963267948966",
        "--frequencies", "5,-3",
    ]);
    assert_eq!(code, EXIT_OK);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("thresholds.json")).unwrap()).unwrap();
    assert!((report["kappa_death"].as_f64().unwrap() - 5.0).abs() < 1e-12);
    assert_eq!(report["schema_version"], 1);

    assert_eq!(run(&["thresholds", "-n", "1", "--alpha", "0", "--frequencies", "5"]), EXIT_USAGE);
    assert_eq!(run(&["thresholds", "-n", "0", "--alpha", "1", "--frequencies", "5"]), EXIT_USAGE);
    assert_eq!(run(&["verify", "--n-max", "12"]), EXIT_OK);
    assert_eq!(run(&["single", "-n", "3", "--t-end", "50"]), EXIT_OK);
}

#[test]
fn sweep_output_ignores_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "sweep.json",
        r#"{
            "n_values": [1, 4],
            "kappa_min": 0.0, "kappa_max": 6.0, "kappa_step": 0.5,
            "frequencies": {"identical": {"nu": 5.0, "count": 4}},
            "initial": {"uniform_box": {"alpha": 0.05}},
            "sim": {"dt": 0.01, "t_end": 60, "record_stride": 10},
            "seeds": [3]
        }"#,
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run(&["-q", "--workers", "1", "--out-dir", a.to_str().unwrap(), "sweep", &spec]), EXIT_OK);
    assert_eq!(run(&["-q", "--workers", "3", "--out-dir", b.to_str().unwrap(), "sweep", &spec]), EXIT_OK);
    for f in ["cells.csv", "curves.csv", "curves.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let cells = fs::read_to_string(a.join("cells.csv")).unwrap();
    assert!(cells.lines().nth(1).unwrap().starts_with("1,0,3,locking,"));
    assert!(cells.lines().last().unwrap().starts_with("4,6,3,death,"));
    let curves = fs::read_to_string(a.join("curves.csv")).unwrap();
    assert!(curves.starts_with("n,kappa_i,kappa_p,kappa_d\n1,,,"));
}
