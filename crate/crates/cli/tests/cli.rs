use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gridhfk")).args(args).env_remove("GRIDHFK_MAX_MEMORY_MB").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stderr).unwrap()
}

#[test]
fn trefoil_alexander() {
    let o = run(&["alexander", &fixture("trefoil5.grid")]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "t - 1 + t^-1\n");
}

#[test]
fn unknot_genus() {
    let o = run(&["genus", &fixture("unknot2.grid")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0\n");
}

#[test]
fn invariance_harness() {
    let args = ["check", "invariance", &fixture("trefoil5.grid"), "--moves", "3", "--seed", "7"];
    let o = run(&args);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "PASS: 4/4 HFK-hat tables identical\n");
    // same seed, same bytes
    assert_eq!(run(&args).stdout, o.stdout);
    let mut json = args.to_vec();
    json.push("--json");
    let a = run(&json);
    assert_eq!(a.stdout, run(&json).stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["moves"].as_array().unwrap().len(), 3);
}

#[test]
fn homology_json() {
    let o = run(&["homology", &fixture("trefoil5.grid"), "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["version"], "hat");
    assert_eq!(v["coefficients"], "f2");
    assert_eq!(v["total_rank"], 3);
    let ranks = v["ranks"].as_array().unwrap();
    assert_eq!(ranks.len(), 3);
    assert!(ranks.iter().all(|e| e["free"] == 1 && e["torsion"].as_array().unwrap().is_empty()));

    let o = run(&["homology", "--version", "tilde", "--coefficients", "z", "--json", &fixture("trefoil5.grid")]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["total_rank"], 48);
}

#[test]
fn truncated_minus() {
    let o = run(&["homology", &fixture("unknot2.grid"), "--version", "minus", "--truncate", "3", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["exact_above_maslov"], -4);
    let ranks = v["ranks"].as_array().unwrap();
    for (m, a) in [(0, 0), (-2, -1), (-4, -2)] {
        assert!(ranks.iter().any(|e| e["m"] == m && e["a"] == a && e["free"] == 1));
    }
    let o = run(&["homology", &fixture("unknot2.grid"), "--version", "minus", "--truncate", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn fibered_needs_integers() {
    let o = run(&["fibered", &fixture("trefoil5.grid"), "--json"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "validation");
    let o = run(&["fibered", &fixture("trefoil5.grid"), "--coefficients", "z"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "true\n");
    let o = run(&["fibered", &fixture("knot5_2.grid"), "--coefficients", "z"]);
    assert_eq!(stdout(&o), "false\n");
}

#[test]
fn exit_codes() {
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["genus", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"], "usage");

    let o = run(&["moves", "commute", &fixture("trefoil5.grid"), "--axis", "row", "--index", "0", "--json"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["exit_code"], 2);

    let o = run(&["genus", "2;X=0,0;O=1,1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["genus", "4;X=0,1,2,3;O=1,0,3,2"]);
    assert_eq!(o.status.code(), Some(2), "links have no integral Alexander grading");
    let o = run(&["genus", "/no/such/file"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["homology", &fixture("torus34.grid"), "--max-grid", "6", "--json"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"], "resource");
    let o = run(&["homology", &fixture("granny8.grid"), "--coefficients", "z"]);
    assert_eq!(o.status.code(), Some(3));

    let o = Command::new(env!("CARGO_BIN_EXE_gridhfk"))
        .args(["homology", &fixture("torus34.grid")])
        .env("GRIDHFK_MAX_MEMORY_MB", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));

    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn moves_round_trip() {
    let o = run(&["moves", "stabilize", &fixture("unknot2.grid"), "--row", "0", "--variant", "a"]);
    assert!(o.status.success());
    let stabilized = stdout(&o);
    assert!(stabilized.starts_with("3\n"));
    let path = std::env::temp_dir().join(format!("gridhfk-cli-{}.grid", std::process::id()));
    std::fs::write(&path, &stabilized).unwrap();
    let o = run(&["moves", "destabilize", path.to_str().unwrap(), "--row", "0", "--col", "0", "--json"]);
    let _ = std::fs::remove_file(&path);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["inline"], "2;X=0,1;O=1,0");
    let o = run(&["moves", "commute", "5;X=0,1,2,3,4;O=2,3,4,0,1", "--axis", "col", "--index", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn poset_stats() {
    let o = run(&["poset", "stats", &fixture("trefoil5.grid"), "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["components"], 25);
    assert_eq!(v["parity"]["passed"], true);
    assert_eq!(v["el"]["passed"], true);
    let mut sizes: Vec<u64> = v["posets"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|p| p["components"].as_array().unwrap().iter().map(|c| c["size"].as_u64().unwrap()))
        .filter(|&s| s > 1)
        .collect();
    sizes.sort();
    assert_eq!(sizes, vec![26, 26, 46]);
}

#[test]
fn sign_check() {
    let o = run(&["check", "signs", &fixture("trefoil5.grid")]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("PASS"));
}
