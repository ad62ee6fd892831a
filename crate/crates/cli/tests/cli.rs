use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_firmlab");

fn firmlab(args: &[&str], dir: &Path) -> Output {
    Command::new(BIN).args(args).current_dir(dir).env_remove("FIRMLAB_SEED").output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    fs::write(dir.join(name), body).unwrap();
    name.to_string()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn list_names_every_builtin_and_task() {
    let dir = tempfile::tempdir().unwrap();
    let out = firmlab(&["list"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("abs_plus_one"));
    assert!(text.contains("asym_r(alpha,beta)"));
    for task in ["axioms", "nonexp", "firm-cert", "tau-scan", "prop-scan", "rates", "theorem1", "functional", "descent"] {
        assert!(text.contains(task), "{task}");
    }
    let v = firmlab(&["version"], dir.path());
    assert!(String::from_utf8(v.stdout).unwrap().starts_with("firmlab "));
}

#[test]
fn theorem1_on_reflect_exp_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "t1.json",
        r#"{"space":{"kind":"real_line_abs"},"map":{"kind":"reflect_exp"},"task":"theorem1",
            "params":{"N":10000,"K":5,"tol":1e-2}}"#,
    );
    let out = firmlab(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["verdict"], "PASS");
    let t = &r["metrics"]["theorem1"];
    assert!(t["rho"]["value"].as_f64().unwrap() <= 1e-2);
    assert!(t["rho_bar"]["upper_bound"].as_f64().unwrap() <= 1e-2);
    for s in t["sigma"].as_array().unwrap() {
        assert!(s["per_step"].as_f64().unwrap() <= 1e-2);
    }
}

#[test]
fn tau_scan_of_the_nonfirm_configuration_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "tau.json",
        r#"{"space":{"kind":"asym_r","alpha":1,"beta":2},"map":{"kind":"virtual_pair","x":0,"y":1},"task":"tau-scan"}"#,
    );
    let out = firmlab(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["verdict"], "NOT-FIRM-CONSISTENT");
    assert_eq!(r["metrics"]["tau_scan"]["inf_tau"], 0.0);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [
        ("missing_map.json", r#"{"space":{"kind":"real_line_abs"},"task":"axioms"}"#),
        ("unknown_key.json", r#"{"space":{"kind":"real_line_abs"},"map":{"kind":"identity"},"task":"axioms","x":1}"#),
        ("bad_json.json", r#"{"space":"#),
        ("bad_dim.json", r#"{"space":{"kind":"real_line_abs"},"map":{"kind":"translation","offset":[1,2]},"task":"rates"}"#),
        ("bad_task_map.json", r#"{"space":{"kind":"asym_r","alpha":1,"beta":2},"map":{"kind":"virtual_pair","x":0,"y":1},"task":"rates"}"#),
    ] {
        let cfg = write_config(dir.path(), name, body);
        let out = firmlab(&["run", &cfg], dir.path());
        assert_eq!(out.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    }
    let missing = firmlab(&["run", "nope.json"], dir.path());
    assert_eq!(missing.status.code(), Some(2));
    let stderr = String::from_utf8(firmlab(&["run", "missing_map.json"], dir.path()).stderr).unwrap();
    assert!(stderr.contains("map") && stderr.contains("line 1"), "{stderr}");
}

#[test]
fn divergence_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "div.json",
        r#"{"space":{"kind":"real_line_abs"},"map":{"kind":"scaling","factor":1e100},"task":"rates","params":{"x0":1,"N":200,"K":1}}"#,
    );
    let out = firmlab(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n = 4"));
}

#[test]
fn every_task_runs_and_reaches_its_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[(&str, &str, i32)] = &[
        (r#"{"space":{"kind":"asym_r","alpha":1,"beta":2},"map":{"kind":"identity"},"task":"axioms","params":{"samples":500}}"#, "PASS", 0),
        (r#"{"space":{"kind":"real_line_abs"},"map":{"kind":"abs_plus_one"},"task":"nonexp","params":{"samples":500}}"#, "PASS", 0),
        (r#"{"space":{"kind":"real_line_abs"},"map":{"kind":"scaling","factor":2},"task":"nonexp","params":{"samples":50}}"#, "FAIL", 1),
        (r#"{"space":{"kind":"real_line_abs"},"map":{"kind":"abs_plus_one"},"task":"nonexp","params":{"samples":0,"pairs":[[-1,0]],"lambda_grid":[0.25,0.5,0.75]}}"#, "FAIL", 1),
        (r#"{"space":{"kind":"real_line_abs"},"map":{"kind":"scaling","factor":0.5},"task":"nonexp","params":{"samples":500,"lambda_grid":[0.25,0.5,0.75]}}"#, "PASS", 0),
        (r#"{"space":{"kind":"real_line_abs"},"map":{"kind":"reflect_exp"},"task":"firm-cert","params":{"samples":500}}"#, "FEASIBLE", 0),
        (r#"{"space":{"kind":"asym_r","alpha":1,"beta":2},"map":{"kind":"virtual_pair","x":0,"y":1},"task":"firm-cert"}"#, "INFEASIBLE", 1),
        (r#"{"space":{"kind":"real_line_abs"},"map":{"kind":"reflect_exp"},"task":"tau-scan","params":{"samples":2000}}"#, "FIRM-CONSISTENT", 0),
        (r#"{"space":{"kind":"real_line_abs"},"map":{"kind":"scaling","factor":3},"task":"tau-scan","params":{"samples":100}}"#, "N/A", 1),
        (r#"{"space":{"kind":"asym_r","alpha":1,"beta":2},"map":{"kind":"virtual_pair","x":0,"y":1},"task":"prop-scan"}"#, "FAIL", 1),
        (r#"{"space":{"kind":"real_line_abs"},"map":{"kind":"reflect_exp"},"task":"prop-scan","params":{"samples":2000}}"#, "PASS", 0),
        (r#"{"space":{"kind":"real_line_abs"},"map":{"kind":"abs_plus_one"},"task":"rates","params":{"x0":-3,"N":1000,"K":3,"x1":5,"tol":1e-2,"search_region":[-10,10]}}"#, "PASS", 0),
        (r#"{"space":{"kind":"real_line_abs"},"map":{"kind":"abs_plus_one"},"task":"theorem1","params":{"x0":-3,"N":10000,"K":5,"tol":1e-2}}"#, "PASS", 0),
        (r#"{"space":{"kind":"real_line_abs"},"map":{"kind":"abs_plus_one"},"task":"theorem1","params":{"x0":-3,"N":1000,"K":2,"tol":1e-6}}"#, "FAIL", 1),
        (r#"{"space":{"kind":"real_line_abs"},"map":{"kind":"translation","offset":1},"task":"functional","params":{"samples":500,"N":1000,"horizons":[1000,1500,2000],"probes":[-1,2,1000],"tol":1e-2,"x1":-3}}"#, "PASS", 0),
        (r#"{"space":{"kind":"real_line_abs"},"map":{"kind":"reflect_exp"},"task":"descent","params":{"N":1000,"horizons":[200000,400000,600000],"probes":[-5,12],"starts":[-5,-1,0,3,5],"depth":5}}"#, "PASS", 0),
        (r#"{"space":{"kind":"real_line_abs"},"map":{"kind":"reflect_exp"},"task":"descent","params":{"N":100,"horizons":[1,2],"probes":[-5,12]}}"#, "INCONCLUSIVE", 1),
        (r#"{"space":{"kind":"real_line_abs"},"map":{"kind":"reflect_exp"},"task":"descent","params":{"N":100,"horizons":[200000,400000,600000],"probes":[-5,12],"depth":50}}"#, "FAIL", 1),
    ];
    for (i, (body, verdict, code)) in cases.iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("c{i}.json"), body);
        let out = firmlab(&["run", &cfg], dir.path());
        let r = report(&out);
        assert_eq!(r["verdict"], *verdict, "case {i}: {}", r["metrics"]);
        assert_eq!(out.status.code(), Some(*code), "case {i}");
        let warnings = r["warnings"].as_array().unwrap();
        assert!(warnings.iter().all(|w| !w.as_str().unwrap().starts_with("parameter")), "case {i}: {warnings:?}");
    }
}

#[test]
fn unused_params_are_warned_about() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "w.json",
        r#"{"space":{"kind":"real_line_abs"},"map":{"kind":"identity"},"task":"axioms","params":{"samples":10,"epsilon":0.1}}"#,
    );
    let r = report(&firmlab(&["run", &cfg], dir.path()));
    assert_eq!(r["warnings"][0], "parameter `epsilon` is not used by task axioms");
}

#[test]
fn outputs_land_in_the_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "o.json",
        r#"{"space":{"kind":"real_line_abs"},"map":{"kind":"abs_plus_one"},"task":"rates",
            "params":{"x0":-3,"N":100,"K":1},"output":{"json":"rates.json","csv":"orbit.csv"}}"#,
    );
    let out = firmlab(&["run", &cfg, "--out", "results"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("results/rates.json")).unwrap()).unwrap();
    assert_eq!(report["task"], "rates");
    let csv = fs::read_to_string(dir.path().join("results/orbit.csv")).unwrap();
    assert!(csv.starts_with("n,x1,step_1,from_base\n0,-3,7,0\n1,4,1,7\n"));
    assert_eq!(csv.lines().count(), 102);
}

#[test]
fn seed_precedence_is_flag_then_env_then_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.json",
        r#"{"space":{"kind":"real_line_abs"},"map":{"kind":"identity"},"task":"axioms","params":{"samples":10,"seed":5}}"#,
    );
    let seed_of = |out: Output| report(&out)["metrics"]["seed"].as_u64().unwrap();
    assert_eq!(seed_of(firmlab(&["run", &cfg], dir.path())), 5);
    let env = Command::new(BIN).args(["run", &cfg]).current_dir(dir.path()).env("FIRMLAB_SEED", "9").output().unwrap();
    assert_eq!(seed_of(env), 9);
    let flag = Command::new(BIN)
        .args(["run", &cfg, "--seed", "11"])
        .current_dir(dir.path())
        .env("FIRMLAB_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(seed_of(flag), 11);
    let bad = Command::new(BIN).args(["run", &cfg]).current_dir(dir.path()).env("FIRMLAB_SEED", "x").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
