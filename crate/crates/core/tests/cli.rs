use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schedcomm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn write_scenario(dir: &Path, name: &str, body: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(body).unwrap()).unwrap();
    p
}

fn bsc_scenario() -> Value {
    serde_json::from_str(&std::fs::read_to_string(fixture("bsc_single.json")).unwrap()).unwrap()
}

#[test]
fn codelen_of_bsc_fixture() {
    let f = fixture("bsc_single.json");
    let v = json(&run(&["codelen", "--scenario", f.to_str().unwrap()]));
    assert_eq!(v["N"], 35);
}

#[test]
fn zero_load_is_inside_and_stable() {
    let f = fixture("bsc_single.json");
    let f = f.to_str().unwrap();
    let region = json(&run(&["region", "--scenario", f]));
    assert_eq!(region["verdict"], "inside");
    let sim = json(&run(&[
        "simulate",
        "--scenario",
        f,
        "--horizon",
        "5000",
        "--replications",
        "2",
    ]));
    assert_eq!(sim["verdict"], "stable");
}

#[test]
fn exponent_lists_quanta() {
    let f = fixture("gaussian_two_class.json");
    let v = json(&run(&["exponent", "--scenario", f.to_str().unwrap()]));
    assert!(v.is_object());
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("region.json");
    let f = fixture("adder_joint.json");
    let o = run(&[
        "region",
        "--scenario",
        f.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["verdict"], "inside");
}

#[test]
fn sweep_prints_csv_header() {
    let dir = tempfile::tempdir().unwrap();
    let mut sc: Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("sweep_snr_low.json")).unwrap())
            .unwrap();
    sc["sweep"]["simulate"] = Value::Bool(false);
    sc["sweep"]["values"] = serde_json::json!([1, 2, 3]);
    let p = write_scenario(dir.path(), "sweep.json", &sc);
    let o = run(&["sweep", "--scenario", p.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("K,inner_threshold,outer_threshold,nat_inner_threshold")
    );
    assert_eq!(lines.count(), 3);
}

#[test]
fn malformed_scenario_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut sc = bsc_scenario();
    sc["K"] = Value::from(0);
    let p = write_scenario(dir.path(), "bad.json", &sc);
    assert_eq!(
        run(&["codelen", "--scenario", p.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    let p = dir.path().join("garbage.json");
    std::fs::write(&p, "{ not json").unwrap();
    assert_eq!(
        run(&["region", "--scenario", p.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    assert_eq!(run(&["simulate"]).status.code(), Some(2));
}

#[test]
fn useless_channel_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let mut sc = bsc_scenario();
    sc["channel"]["transition"] = serde_json::json!([0.5, 0.5, 0.5, 0.5]);
    let p = write_scenario(dir.path(), "useless.json", &sc);
    let o = run(&["codelen", "--scenario", p.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn same_seed_same_output() {
    let f = fixture("adder_joint.json");
    let args = [
        "simulate",
        "--scenario",
        f.to_str().unwrap(),
        "--seed",
        "11",
        "--horizon",
        "3000",
        "--replications",
        "2",
    ];
    let (a, b) = (run(&args), run(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
