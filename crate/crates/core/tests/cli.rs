use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pencil-lab")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn count_csv_for_2111() {
    let o = run(&["count", "--fixture", "regular-odd-5-shape-2111", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "profile,a,count,expected,pass\n\"(0,0,0,0)\",0,8,8,true\n\"(1,0,0,0)\",1,4,4,true\n");
}

#[test]
fn count_generic_single_row() {
    let o = run(&["count", "--fixture", "generic-odd-5", "--format", "csv"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].ends_with(",0,16,16,true"), "{}", lines[1]);
}

#[test]
fn classify_examples() {
    let o = run(&["classify", "--fixture", "nodal-even-6"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["class"], "RegularNonGeneric");
    let o = run(&["classify", "--fixture", "generic-odd-5"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["class"], "Generic");
    // A1 singular
    let o = run(&["classify", "--fixture", "weierstrass-even-6"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_is_deterministic() {
    let a = run(&["verify", "--fixture", "generic-even-4", "--seed", "3"]);
    let b = run(&["verify", "--fixture", "generic-even-4", "--seed", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["pass"], true);
}

#[test]
fn zero_samples_keeps_exhaustive_checks() {
    let o = run(&["verify-torsor", "--fixture", "generic-even-6", "--samples", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for c in v["checks"].as_array().unwrap() {
        assert_eq!(c["pass"], true, "{c}");
    }
}

#[test]
fn reduce_trace_chain() {
    let o = run(&["reduce", "--fixture", "cusp-even-6", "--trace"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["multiplicity"], 3);
    assert_eq!(v[0]["fiber"], "G_a");
}

#[test]
fn exit_codes() {
    let bad = r#"{"field":{"p":7,"k":1,"modulus":[0,1]},"A1":[[1,2,0],[0,1,0],[0,0,1]],"A2":[[1,0,0],[0,2,0],[0,0,3]]}"#;
    let o = run(&["verify", "--pencil", bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("symmetric"));
    assert_eq!(run(&["count", "--fixture", "no-such"]).status.code(), Some(2));
    assert_eq!(run(&["count", "--fixture", "shape-11111111", "--q", "11"]).status.code(), Some(3));
    assert_eq!(run(&["classify", "--fixture", "generic-odd-3", "--q", "3121"]).status.code(), Some(3));
}

#[test]
fn pencil_from_file() {
    let dir = std::env::temp_dir().join(format!("pencil-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("p.json");
    std::fs::write(&path, r#"{"field":{"p":7,"k":1,"modulus":[0,1]},"A1":[[1,0,0],[0,1,0],[0,0,1]],"A2":[[0,0,0],[0,1,0],[0,0,3]]}"#).unwrap();
    let o = run(&["verify-torsor", "--pencil", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn fixtures_listing() {
    let o = run(&["fixtures", "--format", "csv"]);
    let text = stdout(&o);
    assert!(text.starts_with("name,n,q,shape,description\n"));
    assert!(text.contains("nodal-even-6,6,7,1 2 1 1 1,"));
}
