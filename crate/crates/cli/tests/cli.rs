use std::path::Path;
use std::process::{Command, Output};

fn soulgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_soulgeom")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn passing_run_exits_zero() {
    let out = soulgeom(&["soul", "--body", "rect(2,1)", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["command"], "soul");
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    assert!(r["checks"][0]["tolerance"].is_number());
}

#[test]
fn failed_check_exits_one() {
    let out = soulgeom(&[
        "excess", "--body", "disk(1,256)", "--point", "1,0", "--direction", "1,0", "--expect-slope", "3", "--json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let slope = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "fitted_slope").unwrap();
    assert_eq!(slope["pass"], false);
}

#[test]
fn bad_input_exits_two() {
    for args in [
        vec!["soul", "--body", "rect(2"],
        vec!["soul", "--body", "blob(1)"],
        vec!["soul", "--body", "rect(-1,1)"],
        vec!["soul"],
        vec!["trapezoid", "--surface", "cone"],
        vec!["trapezoid", "--surface", "cone", "--beta", "7"],
        vec!["flow", "--body", "rect(1,1)", "--x0", "5,5"],
        vec!["riccati", "--spec", "{not json"],
        vec!["no-such-command"],
    ] {
        let out = soulgeom(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn busemann_on_the_plane() {
    let out = soulgeom(&["busemann", "--beta", "6.283185307179586", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

fn svg_size(path: &Path) -> (String, String) {
    let text = std::fs::read_to_string(path).unwrap();
    let attr = |name: &str| {
        let start = text.find(&format!("{name}=\"")).unwrap() + name.len() + 2;
        text[start..start + text[start..].find('"').unwrap()].to_string()
    };
    (attr("width"), attr("height"))
}

#[test]
fn artifacts_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = soulgeom(&["flow", "--body", "stadium41a", "--x0", "6,0", "--theta", "0.2", "--out-dir", d]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,x,y,level,grad_norm,theta_r");
    assert!(csv.lines().count() > 100);
    assert_eq!(svg_size(&dir.path().join("flow.svg")), ("800".into(), "600".into()));
    let saved: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("flow_report.json")).unwrap()).unwrap();
    assert_eq!(saved["command"], "flow");
    assert_eq!(saved["artifacts"].as_array().unwrap().len(), 3);

    let spec = r#"{"u0": [[1, 0], [0, 2]], "source": {"kind": "scalar", "value": 0.5}, "t_max": 0.5}"#;
    let out = soulgeom(&["riccati", "--spec", spec, "--out-dir", d]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("riccati.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,u_1_1,u_1_2,u_2_2,lambda_min,lambda_max");

    for (cmd, svg) in [("soul", "soul.svg"), ("evolve", "evolve.svg")] {
        let out = soulgeom(&[cmd, "--body", "ngon(6,1)", "--out-dir", d]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(svg_size(&dir.path().join(svg)), ("800".into(), "600".into()));
    }
}

#[test]
fn no_svg_suppresses_figures() {
    let dir = tempfile::tempdir().unwrap();
    let out = soulgeom(&["soul", "--body", "stadium41a", "--no-svg", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!dir.path().join("soul.svg").exists());
    assert!(dir.path().join("soul_report.json").exists());
}

#[test]
fn body_from_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("square.json");
    let body = r#"{"label": "square", "halfplanes": [
        {"nx": 1, "ny": 0, "c": 1}, {"nx": -1, "ny": 0, "c": 1},
        {"nx": 0, "ny": 1, "c": 1}, {"nx": 0, "ny": -1, "c": 1}]}"#;
    std::fs::write(&path, body).unwrap();
    let out = soulgeom(&["soul", "--body", path.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["outputs"]["inradius"], 1.0);
    assert_eq!(r["outputs"]["label"], "square");
}

#[test]
fn seeds_change_sampled_output() {
    let a = soulgeom(&["trapezoid", "--trials", "50", "--seed", "1", "--json"]);
    let b = soulgeom(&["trapezoid", "--trials", "50", "--seed", "2", "--json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_ne!(a.stdout, b.stdout);
}
