//! End-to-end runs of the `txnav` binary.

use std::fs;
use std::process::Command;

fn txnav() -> Command {
    Command::new(env!("CARGO_BIN_EXE_txnav"))
}

const SPEC: &str = r#"
name = "demo"
scenario = "pn-single"
controller = "learning-pn"
runs = 2
seed = 3

[grid]
rice_v = [15.0]
"#;

#[test]
fn run_then_plot_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("demo.toml");
    fs::write(&spec, SPEC).unwrap();
    let out = dir.path().join("out");
    let status =
        txnav().arg("run").arg("--spec").arg(&spec).arg("--out").arg(&out).arg("--jobs").arg("1").status().unwrap();
    assert!(status.success());
    for f in ["spec.toml", "summary.csv", "runs.csv", "episodes/c000_r000.csv", "episodes/c000_r001.csv"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let header = fs::read_to_string(out.join("episodes/c000_r000.csv")).unwrap();
    assert!(header.starts_with("k,p1,p2,b,r,u_v,u_h,reward\n"));

    let svg = dir.path().join("trace.svg");
    let status = txnav()
        .arg("plot")
        .arg(out.join("episodes/c000_r000.csv"))
        .arg("--scenario")
        .arg("pn-single")
        .arg("--out")
        .arg(&svg)
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(svg).unwrap();
    assert!(text.starts_with("<svg") && text.contains(r#"class="goal""#));
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.toml");
    fs::write(&spec, "name = \"x\"\nscenario = \"pn-single\"\ncontroller = \"teleport\"\n").unwrap();
    assert_eq!(txnav().arg("run").arg("--spec").arg(&spec).status().unwrap().code(), Some(2));
    let missing = dir.path().join("missing.toml");
    assert_eq!(txnav().arg("run").arg("--spec").arg(&missing).status().unwrap().code(), Some(2));
    let unknown = SPEC.replace("pn-single", "no-such-scenario");
    fs::write(&spec, unknown).unwrap();
    assert_eq!(txnav().arg("run").arg("--spec").arg(&spec).status().unwrap().code(), Some(2));
}

#[test]
fn unknown_sweep_is_rejected_by_the_parser() {
    let status = txnav().args(["sweep", "nope"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}
