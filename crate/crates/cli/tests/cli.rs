//! End-to-end checks of the command-line surface: exit codes, output
//! determinism, the cache round trip, and agreement between text and JSON
//! modes.

use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn fcx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fcx"))
        .args(args)
        .env_remove("FCX_CACHE_DIR")
        .stdin(Stdio::null())
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn counterexample_pair_fails_basis_check() {
    let out = fcx(&["basis-check", "--rank", "3", "x", "yxY"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "false");

    for word in ["x", "yxY"] {
        let out = fcx(&["primitive", "--rank", "3", word]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(stdout(&out).trim(), "true");
    }
}

#[test]
fn apartment_reports_circle_homology() {
    let out = fcx(&["apartment", "x", "y", "z", "--homology"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("vertices: 6"));
    assert!(text.contains("H~_1 = Z"));
}

#[test]
fn building_steinberg_check() {
    let out = fcx(&["building", "3", "2", "--steinberg", "--no-cache"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("computed 8 expected 8 => pass"));
}

#[test]
fn usage_errors_exit_64() {
    let out = fcx(&["no-such-verb"]);
    assert_eq!(out.status.code(), Some(64));
    let out = fcx(&["primitive", "--rank", "3", "q?"]);
    assert_eq!(out.status.code(), Some(64));
    let out = fcx(&["truncate-fc", "5"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn computation_errors_exit_2() {
    // Desk-scale guard without the override.
    let out = fcx(&["building", "5", "2", "--no-cache"]);
    assert_eq!(out.status.code(), Some(2));
    // Apartment of a non-basis.
    let out = fcx(&["apartment", "x", "yxY", "z"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn resource_caps_exit_3_with_report() {
    let out = fcx(&[
        "truncate-fc",
        "3",
        "--max-edges",
        "4",
        "--depth",
        "3",
        "--max-states",
        "10",
        "--no-cache",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("partial progress"), "stderr was: {err}");
}

#[test]
fn json_output_is_deterministic_and_cache_round_trips() {
    let dir = std::env::temp_dir().join(format!("fcx-cli-test-{}", std::process::id()));
    let dir_str = dir.to_str().unwrap().to_string();
    let args = [
        "truncate-fc",
        "2",
        "--max-edges",
        "2",
        "--depth",
        "2",
        "--json",
        "--cache-dir",
        &dir_str,
    ];
    let first = fcx(&args);
    assert_eq!(first.status.code(), Some(0));
    // Second run is served from the cache and must be byte-identical.
    let second = fcx(&args);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    assert!(dir.read_dir().unwrap().next().is_some(), "cache entry written");

    // A corrupted entry is discarded with a warning, then recomputed.
    for entry in dir.read_dir().unwrap() {
        let path: PathBuf = entry.unwrap().path();
        std::fs::write(&path, "{not json").unwrap();
    }
    let third = fcx(&args);
    assert_eq!(third.status.code(), Some(0));
    assert_eq!(first.stdout, third.stdout);
    let err = String::from_utf8_lossy(&third.stderr).into_owned();
    assert!(err.contains("discarding cache entry"), "stderr was: {err}");

    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn text_and_json_agree_on_homology() {
    let complex = serde_json::json!({
        "vertices": ["a", "b", "c"],
        "facets": [[0, 1], [1, 2], [0, 2]],
    });
    let dir = std::env::temp_dir().join(format!("fcx-cli-hom-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("triangle.json");
    std::fs::write(&path, complex.to_string()).unwrap();
    let path_str = path.to_str().unwrap();

    let text = fcx(&["homology", path_str]);
    assert_eq!(text.status.code(), Some(0));
    assert!(stdout(&text).contains("H~_1 = Z"));

    let json = fcx(&["homology", path_str, "--json"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&json).trim()).unwrap();
    let degrees = v["homology"].as_array().unwrap();
    let h1 = degrees.iter().find(|d| d["degree"] == 1).unwrap();
    assert_eq!(h1["betti"], 1);

    let link = fcx(&["link", path_str, "--simplex", "0"]);
    assert_eq!(link.status.code(), Some(0));
    assert!(stdout(&link).contains("vertices: 2"));

    let bad = fcx(&["link", path_str, "--simplex", "0,1,2"]);
    assert_eq!(bad.status.code(), Some(2));

    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn z_simplex_verbs() {
    let out = fcx(&[
        "z-simplex",
        "--rank",
        "3",
        "--factor",
        "y z",
        "--factor",
        "x z",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "true");

    let out = fcx(&[
        "z-simplex",
        "--rank",
        "3",
        "--factor",
        "y z",
        "--factor",
        "y xzX",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "false");
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("unverified"));
}

#[test]
fn map_to_building_reports_verification() {
    let out = fcx(&["map-to-building", "xy", "y", "z"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("verified simplicial isomorphism"));
    assert!(text.contains("true"));
}

#[test]
fn free_factor_witness_output() {
    let out = fcx(&["free-factor", "--rank", "2", "xyX", "--witness", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["result"], true);
    assert!(v["witness"]["images"].is_object());
}
