use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn khslice(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_khslice")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = khslice(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)));
    (v, out.status.code().unwrap())
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn kh_unknot_json() {
    let (v, code) = json(&["kh", "1:"]);
    assert_eq!(code, 0);
    assert_eq!(v["bigraded"], serde_json::json!([
        {"i": 0, "j": -1, "rank": 1, "torsion": []},
        {"i": 0, "j": 1, "rank": 1, "torsion": []}
    ]));
    assert_eq!(v["jones"], serde_json::json!({"t^(0/2)": 1}));
}

#[test]
fn kh_trefoil_collapsed() {
    let (v, code) = json(&["kh", "2: 1 1 1"]);
    assert_eq!(code, 0);
    let got: Vec<(i64, u64, Vec<u64>)> = v["collapsed"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            let t = e["torsion"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
            (e["k"].as_i64().unwrap(), e["rank"].as_u64().unwrap(), t)
        })
        .collect();
    assert_eq!(got, vec![(1, 1, vec![]), (3, 2, vec![]), (5, 0, vec![2]), (6, 1, vec![])]);
    assert_eq!((v["writhe"].as_i64(), v["components"].as_u64()), (Some(-3), Some(1)));
}

#[test]
fn kh_hopf_euler_magnitude() {
    let (v, code) = json(&["kh", "2: 1 1"]);
    assert_eq!(code, 0);
    let chi: i64 = v["collapsed"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| if e["k"].as_i64().unwrap() % 2 == 0 { 1 } else { -1 } * e["rank"].as_i64().unwrap())
        .sum();
    assert_eq!(chi.abs(), 4);
}

#[test]
fn json_is_deterministic() {
    for args in [&["kh", "3: 1 -2 1 -2"][..], &["markov", "2: 1 1 1", "--moves", "6", "--seed", "1"], &["geom", "slice", "--samples", "50"]] {
        let a = khslice(&[args, &["--format", "json"]].concat());
        let b = khslice(&[args, &["--format", "json"]].concat());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["curves", "--samples", "20", "--format", "json"];
    let one = Command::new(env!("CARGO_BIN_EXE_khslice")).args(args).env("KHSLICE_THREADS", "1").output().unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_khslice")).args(args).env("KHSLICE_THREADS", "4").output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn markov_examples() {
    for (braid, moves) in [("2: 1 1 1", "6"), ("1:", "10"), ("3: 1 -2 1 -2", "4")] {
        let (v, code) = json(&["markov", braid, "--moves", moves]);
        assert_eq!(code, 0, "{braid}");
        assert_eq!(v["run"]["trace"].as_array().unwrap().len(), moves.parse::<usize>().unwrap());
    }
}

#[test]
fn geom_batteries() {
    let (v, code) = json(&["geom", "slice", "--samples", "100"]);
    assert_eq!(code, 0, "{v}");
    let (v, code) = json(&["geom", "a1", "--t", "1"]);
    assert_eq!(code, 0, "{v}");
    let (v, code) = json(&["geom", "a2", "--d", "1", "--eps", "0.001", "--power", "3"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["pattern"], serde_json::json!([1, 1]));
    let (v, code) = json(&["geom", "maslov"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["maslov-minus"]["index"], 2);
}

#[test]
fn a2_unresolved_power_fails_cleanly() {
    let (v, code) = json(&["geom", "a2", "--power", "4"]);
    assert_eq!(code, 1);
    assert_eq!(v["passed"], false);
}

#[test]
fn slice_verify_matches_geom_slice() {
    let a = khslice(&["slice", "verify", "--samples", "30", "--format", "csv"]);
    let b = khslice(&["geom", "slice", "--samples", "30", "--format", "csv"]);
    assert!(a.status.success());
    let body = |o: &Output| String::from_utf8_lossy(&o.stdout).lines().skip(1).map(|l| l.split_once(',').unwrap().1.to_string()).collect::<Vec<_>>();
    assert_eq!(body(&a), body(&b));
}

#[test]
fn curves_battery_and_action() {
    let out = khslice(&["curves", "--samples", "20"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let (v, code) = json(&["curves", "--matching", "2; (1,4)+ (2,3)+", "--braid", "4: 2"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"], "2; (1,4)+ (2,3)+");
    let (v, _) = json(&["curves", "--matching", "2; (1,4)+ (2,3)+", "--braid", "4:", "--against", "2; (1,4)- (2,3)-"]);
    assert_eq!((v["intersection"]["endpoints"].as_u64(), v["intersection"]["interior"].as_u64()), (Some(4), Some(0)));
}

#[test]
fn corpus_command() {
    let path = scratch("mini_corpus.txt");
    std::fs::write(&path, "# two links\n2: 1 1 1   # trefoil\n2: 1 1 # Hopf\n").unwrap();
    let (v, code) = json(&["corpus", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["checks"].as_array().unwrap().len(), 10);
    std::fs::write(&path, "2: 1\n2: x\n").unwrap();
    let out = khslice(&["corpus", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));
}

#[test]
fn errors_and_guards() {
    let out = khslice(&["kh", "2: 1 1 1 1 1", "--max-crossings", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the limit of 4"));
    assert_eq!(khslice(&["kh", "2: 0"]).status.code(), Some(2));
    assert_eq!(khslice(&["geom", "a1", "--samples", "7"]).status.code(), Some(2));
    assert_eq!(khslice(&["geom", "a1", "--tol", "0"]).status.code(), Some(2));
    assert_eq!(khslice(&["kh", "1:", "--format", "yaml"]).status.code(), Some(2));
}

#[test]
fn output_files() {
    let out = scratch("trefoil.json");
    let diagram = scratch("trefoil_diagram.json");
    let status = khslice(&[
        "kh", "2: 1 1 1", "--format", "json", "--out", out.to_str().unwrap(), "--dump-diagram", diagram.to_str().unwrap(),
    ]);
    assert!(status.status.success() && status.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["crossings"], 3);
    let d: Value = serde_json::from_str(&std::fs::read_to_string(&diagram).unwrap()).unwrap();
    assert_eq!(d["crossings"].as_array().unwrap().len(), 3);

    let points = scratch("a1_points.csv");
    let r = khslice(&["geom", "a1", "--samples", "16", "--points", points.to_str().unwrap()]);
    assert!(r.status.success());
    let csv = std::fs::read_to_string(&points).unwrap();
    assert_eq!(csv.lines().count(), 17);
    assert!(csv.starts_with("fibre_re,fibre_im,h,phi,a_re"));
}
