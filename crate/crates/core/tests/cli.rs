use std::path::PathBuf;

use toricpf::cli::{run_command, CommandOutput};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> CommandOutput {
    let mut argv = vec!["toricpf"];
    argv.extend_from_slice(args);
    run_command(argv)
}

fn scratch(name: &str, body: &str) -> String {
    let dir = std::env::temp_dir().join(format!("toricpf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn validate_bundled_plane() {
    let out = run(&["validate", &data("p2.fan.json")]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout, "smooth complete\n");
}

#[test]
fn validate_flags_incomplete_and_singular_fans() {
    let open = scratch("open.fan.json", r#"{"dim":2,"rays":[[1,0],[0,1],[-1,-1]],"cones":[[0,1],[1,2]]}"#);
    let out = run(&["validate", &open]);
    assert_eq!((out.code, out.stdout.as_str()), (1, "smooth not-complete\n"));
    let singular = scratch("sing.fan.json", r#"{"dim":2,"rays":[[1,0],[-1,2],[0,-1]],"cones":[[0,1],[1,2],[2,0]]}"#);
    let out = run(&["validate", &singular]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.starts_with("not-smooth"), "{}", out.stdout);
}

#[test]
fn pushforward_table_on_the_plane() {
    let out = run(&["pushforward", &data("p2.fan.json"), "--endo", "mul:2", "--divisor", "1,0,0"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let rows: Vec<&str> = out.stdout.lines().skip(2).collect();
    assert_eq!(rows.len(), 4);
    let mut classes: Vec<&str> = rows.iter().map(|r| r.split_whitespace().last().unwrap()).collect();
    classes.sort();
    assert_eq!(classes, vec!["O", "O", "O", "O(-1)"]);
}

#[test]
fn intamp_swap_certificate() {
    let out = run(&["intamp", &data("p1xp1.fan.json"), "--endo", &data("swap2.endo.json")]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout, "yes, certificate H=(3,2)\n");
    let out = run(&["intamp", "std:P2", "--endo", "mul:1"]);
    assert_eq!(out.stdout, "no\n");
}

#[test]
fn other_commands() {
    let fan = data("p1xp1.fan.json");
    let swap = data("swap2.endo.json");
    let out = run(&["h0", "std:P2", "--class", "2"]);
    assert_eq!(out.stdout, "h0(O(2)) = 6\n");
    let out = run(&["positivity", &data("f1.fan.json"), "--class", "1,1"]);
    assert_eq!(out.stdout, "nef-not-ample\n");
    let out = run(&["contracting", &fan, "--endo", &swap]);
    assert!(out.stdout.starts_with("e = 2\n"), "{}", out.stdout);
    let out = run(&["contracting", &fan, "--endo", "mul:1"]);
    assert!(out.stdout.starts_with("none\n"));
    let out = run(&["coset-count", &fan, "--endo", &swap]);
    assert!(out.stdout.starts_with("|Pic/f*Pic| = 2\n"));
    let out = run(&["rank-check", "std:P2", "--endo", "mul:2"]);
    assert_eq!(out.stdout, "ok: prod c = 8 = 4 x 2\n");
    let out = run(&["cox-shifts", "std:P1", "--endo", "mul:2"]);
    assert_eq!(out.stdout, "E_M = R(-1) + R(0)\n");
    let out = run(&["verify", "std:P3", "--endo", "mul:3", "--divisor", "1,-1,0,2", "--box", "1"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.starts_with("pass: 27 summands"), "{}", out.stdout);
    let out = run(&["endo-check", &fan, "--endo", &swap]);
    assert!(out.stdout.contains("multiplicities: (2,2,1,1)"), "{}", out.stdout);
}

#[test]
fn json_output_is_deterministic() {
    let args = ["--json", "pushforward", "std:F2", "--endo", "mul:3", "--divisor", "1,0,-1,2"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a.stdout).unwrap();
    assert_eq!(v["summands"].as_array().unwrap().len(), 9);
    assert_eq!(v["degree"], 9);
    let v: serde_json::Value =
        serde_json::from_str(&run(&["intamp", "--json", "std:P1xP1", "--endo", "bundled:swap2.endo.json"]).stdout)
            .unwrap();
    assert_eq!(v["certificate"], serde_json::json!([3, 2]));
}

#[test]
fn input_errors_exit_two() {
    let bad = scratch("bad.fan.json", "{\"dim\":2,\n \"rays\":[[1,0],[0,1,1]],\"cones\":[[0,1]]}");
    let out = run(&["validate", &bad]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 2"), "{}", out.stderr);
    for args in [
        vec!["h0", "/nonexistent/file.json"],
        vec!["h0", "std:P2", "--divisor", "1,0"],
        vec!["h0", "std:P2", "--divisor", "x"],
        vec!["pushforward", "std:P2", "--endo", "mul:0"],
        vec!["pushforward", "std:P1xP1", "--endo", "mul:zz"],
        vec!["frobnicate"],
        vec!["intamp", "std:P2"],
    ] {
        let out = run(&args);
        assert_eq!(out.code, 2, "{args:?}: {}", out.stdout);
        assert!(!out.stderr.is_empty());
    }
    let shear = scratch("shear.endo.json", r#"{"matrix":[[1,1],[0,1]]}"#);
    let out = run(&["endo-check", "std:P1xP1", "--endo", &shear]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("not ray-compatible"), "{}", out.stderr);
}

#[test]
fn nonprojective_flag_is_accepted() {
    let out = run(&["--allow-nonprojective", "h0", "std:P1"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout, "h0(O) = 1\n");
}

#[test]
fn fan_documents_round_trip() {
    use toricpf::io::{bundled, parse_fan, BUNDLED};
    for (name, _) in BUNDLED.iter().filter(|(n, _)| n.ends_with(".fan.json")) {
        let doc = parse_fan(bundled(name).unwrap()).unwrap();
        assert_eq!(parse_fan(&doc.emit()).unwrap(), doc, "{name}");
    }
}

#[test]
fn binary_propagates_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_toricpf");
    let ok = std::process::Command::new(bin).args(["validate", "std:F3"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "smooth complete\n");
    let bad = std::process::Command::new(bin).args(["h0", "std:Q7"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
