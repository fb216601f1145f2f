use std::process::{Command, Output};

use serde_json::Value;

fn ratbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ratbound"))
        .args(args)
        .env_remove("RATBOUND_SEED")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

const W_OVER_ZERO: &str = r#"{"d":1,"P":{"degree":1,"coeffs":[[1,0],[0,0]]},"Q":{"degree":1,"coeffs":[[0,0],[0,0]]}}"#;

#[test]
fn decompose_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("map.json");
    std::fs::write(&path, W_OVER_ZERO).unwrap();
    let v = json_of(&ratbound(&["decompose", "--input", path.to_str().unwrap()]));
    assert_eq!(v["result"]["verdict"], "indeterminate");

    let v = json_of(&ratbound(&["decompose", "--family", "custom", "--param", "P=1,0,2", "--param", "Q=0,1,0"]));
    assert_eq!(v["result"]["verdict"], "nondegenerate");

    let v = json_of(&ratbound(&["decompose", "--family", "cubic_eps", "--param", "eps=1"]));
    assert_eq!(v["result"]["verdict"], "nondegenerate");
}

#[test]
fn example1_limit_has_hole_at_infinity() {
    // (wP : 0) with P = z - w: holes at ∞ and 1, each of depth 1.
    let v = json_of(&ratbound(&[
        "decompose", "--family", "custom", "--param", "P=-1,1,0", "--param", "Q=0,0,0",
    ]));
    let holes = v["result"]["holes"].as_array().unwrap();
    assert_eq!(holes.len(), 2);
    assert!(holes.iter().any(|h| h["display"] == "inf" && h["depth"] == 1));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("map.json");
    std::fs::write(&path, W_OVER_ZERO).unwrap();
    let p = path.to_str().unwrap();

    let out = ratbound(&["iterate", "--input", p]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("indeterminacy locus"));

    assert_eq!(ratbound(&["decompose", "--family", "nope"]).status.code(), Some(2));
    assert_eq!(ratbound(&["pointmass", "--input", p]).status.code(), Some(2));
    assert_eq!(ratbound(&["bogus"]).status.code(), Some(2));

    // z² has 0 as an exceptional point.
    let out = ratbound(&[
        "sample", "--family", "custom", "--param", "P=0,0,1", "--param", "Q=1,0,0", "--point", "0",
    ]);
    assert_eq!(out.status.code(), Some(3));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"command\": \"decompose\", \"extra\": 1}").unwrap();
    assert_eq!(ratbound(&["--input", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn csv_output_carries_tolerance_header() {
    let out = ratbound(&[
        "pointmass", "--family", "epstein_FT", "--param", "T=1", "--point", "inf", "--tail", "1e-14",
        "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[1].starts_with("# tolerances: tol="));
    assert_eq!(lines[3], "z_re,z_im,w_re,w_im,mass,error_bound,steps");
    let mass: f64 = lines[4].split(',').nth(4).unwrap().parse().unwrap();
    assert!((mass - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn config_file_and_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out = dir.path().join("out.csv");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"command":"properness","family":{{"name":"inversion","params":{{"k":1}}}},
                "sweep":{{"values":[0.5,2,10]}},"out":{:?}}}"#,
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let res = ratbound(&["--input", cfg.to_str().unwrap()]);
    assert!(res.status.success());
    assert!(res.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 3);
    for r in rows {
        let res: f64 = r.split(',').nth(2).unwrap().parse().unwrap();
        assert!((res - 1.0).abs() < 1e-12);
    }
}

#[test]
fn sampling_is_seeded() {
    let args = ["sample", "--family", "cubic_eps", "--param", "eps=0.5", "--count", "50", "--depth", "8"];
    let a = ratbound(&[&args[..], &["--seed", "7"]].concat());
    let b = ratbound(&[&args[..], &["--seed", "7", "--workers", "2"]].concat());
    let c = ratbound(&[&args[..], &["--seed", "8"]].concat());
    assert_eq!(json_of(&a)["result"]["samples"], json_of(&b)["result"]["samples"]);
    assert_ne!(json_of(&a)["result"]["samples"], json_of(&c)["result"]["samples"]);

    let env = Command::new(env!("CARGO_BIN_EXE_ratbound"))
        .args(args)
        .env("RATBOUND_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(json_of(&env)["result"]["samples"], json_of(&a)["result"]["samples"]);
}

#[test]
fn converge_rows_in_input_order() {
    let v = json_of(&ratbound(&[
        "converge", "--family", "example1", "--param", "d=2", "--param", "a=0.5", "--param", "t=0.1",
        "--sweep", "1e-1,1e-3", "--count", "2000", "--depth", "16", "--seed", "1", "--format", "json",
    ]));
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["value"][0].as_f64().unwrap(), 0.1);
    assert_eq!(rows[1]["value"][0].as_f64().unwrap(), 1e-3);
    assert!(rows.iter().all(|r| r["status"] == "ok"));
}

#[test]
fn escape_grid_shape() {
    let out = ratbound(&[
        "escape", "--family", "custom", "--param", "P=0,0,1", "--param", "Q=1,0,0", "--nx", "3", "--ny", "3",
        "--re", "-1,1", "--im", "-1,1",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 9);
    // For z², G(z, 1) = log max(|z|, 1).
    for r in rows {
        let expect = (r[0].hypot(r[1])).max(1.0).ln();
        assert!((r[2] - expect).abs() < 1e-12, "{r:?}");
    }
}
