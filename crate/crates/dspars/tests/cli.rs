use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn dspars(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dspars"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(text.ends_with('\n'), "reports are newline-terminated");
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("not JSON ({e}): {text}"))
}

fn ok(args: &[&str]) -> Value {
    let out = dspars(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stdout)
    );
    let v = json_of(&out);
    assert_eq!(v["schema"], 1);
    v
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

// Elements 1..=7 of the worked family become edges (0, a) of a star.
fn worked_family(dir: &Path) -> PathBuf {
    let mut el = String::from("n 8\n");
    for a in 1..=7 {
        el.push_str(&format!("0 {a} 1\n"));
    }
    write(dir, "star8.el", &el);
    let sets: [&[u32]; 9] = [
        &[1, 2, 3],
        &[2, 3, 4],
        &[4, 5, 1],
        &[3, 2, 6],
        &[4, 7, 1],
        &[2, 3],
        &[5, 6, 7],
        &[1, 3, 5],
        &[2, 4],
    ];
    let sets: Vec<Vec<[u32; 2]>> = sets.iter().map(|s| s.iter().map(|&a| [0, a]).collect()).collect();
    let doc = serde_json::json!({ "graph": "star8.el", "sets": sets });
    write(dir, "worked.json", &doc.to_string())
}

// Sunflower with kernel {(0,1)} and petals {(0,2),(0,3)}, {(0,4),(0,5)}, ...
fn star_family(dir: &Path, s: usize) -> PathBuf {
    let n = 2 + 2 * s;
    let mut el = format!("n {n}\n0 1 1\n");
    let mut sets = Vec::new();
    for i in 0..s {
        let (a, b) = (2 + 2 * i, 3 + 2 * i);
        el.push_str(&format!("0 {a} {}\n0 {b} 1.5\n", 1 + i));
        sets.push(vec![[0, 1], [0, a], [0, b]]);
    }
    write(dir, &format!("star{s}.el"), &el);
    let doc = serde_json::json!({ "graph": format!("star{s}.el"), "sets": sets });
    write(dir, &format!("star{s}.json"), &doc.to_string())
}

#[test]
fn partition_of_worked_family() {
    let dir = TempDir::new().unwrap();
    let fam = worked_family(dir.path());
    let v = ok(&["partition", "--family", s(&fam)]);
    assert_eq!(v["cardinalities"], serde_json::json!([2, 3, 4, 5]));
    assert_eq!(v["c1"], 2);
    assert_eq!(v["ck"], 5);
    let classes: Vec<Vec<u64>> = v["classes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            c["edges"]
                .as_array()
                .unwrap()
                .iter()
                .map(|e| e[1].as_u64().unwrap())
                .collect()
        })
        .collect();
    assert_eq!(classes, vec![vec![6, 7], vec![5], vec![1, 4], vec![2, 3]]);
    assert!(v["laplacian_residual"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn verify_identity_is_zero() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.el", "0 1 1\n1 2 2\n2 0 0.5\n2 3 1\n");
    let v = ok(&["verify", "--graph", s(&g), "--sparsifier", s(&g)]);
    assert!(v["epsilon_certified"].as_f64().unwrap().abs() <= 1e-12);
    assert_eq!(v["bounded"], true);
}

#[test]
fn verify_reports_unbounded_as_null() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.el", "n 4\n0 1 1\n2 3 1\n");
    let h = write(dir.path(), "h.el", "n 4\n0 1 1\n1 2 1\n2 3 1\n");
    let v = ok(&["verify", "--graph", s(&g), "--sparsifier", s(&h)]);
    assert_eq!(v["epsilon_certified"], Value::Null);
    assert_eq!(v["bounded"], false);
}

#[test]
fn verify_sunflower_on_five_petal_star() {
    let dir = TempDir::new().unwrap();
    let fam = star_family(dir.path(), 5);
    let v = ok(&["nof", "verify-sunflower", "--family", s(&fam)]);
    assert_eq!(v["verdict"], true);
    assert_eq!(v["bit_cost"], 4);
    assert_eq!(v["rounds"].as_array().unwrap().len(), 1);
}

#[test]
fn broadcast_and_exchange_on_nine_petal_star() {
    let dir = TempDir::new().unwrap();
    let fam = star_family(dir.path(), 9);
    let b = ok(&["nof", "broadcast", "--family", s(&fam), "--site", "4"]);
    assert_eq!(b["reconstructed"], true);
    assert_eq!(b["round_edge_costs"], serde_json::json!([16, 3]));
    assert_eq!(b["edge_cost"], 19);

    let args = [
        "nof",
        "exchange",
        "--family",
        s(&fam),
        "--site",
        "4",
        "--epsilon",
        "0.3",
        "--seed",
        "5",
    ];
    let e = ok(&args);
    assert_eq!(e["round_count"], 2);
    for site in e["sites"].as_array().unwrap() {
        let measured = site["epsilon_measured"].as_f64().unwrap();
        assert!(measured <= site["epsilon_prime"].as_f64().unwrap() + 1e-9);
    }
    assert_eq!(dspars(&args).stdout, dspars(&args).stdout);
}

#[test]
fn sparsify_writes_graph_and_sidecar() {
    let dir = TempDir::new().unwrap();
    let mut el = String::new();
    for u in 0..12 {
        for v in (u + 1)..12 {
            el.push_str(&format!("{u} {v} 1\n"));
        }
    }
    let g = write(dir.path(), "k12.el", &el);
    let h = dir.path().join("h.el");
    let args = [
        "sparsify",
        "--graph",
        s(&g),
        "--epsilon",
        "0.9",
        "--seed",
        "3",
        "--constant",
        "1",
        "--output",
        s(&h),
    ];
    let v = ok(&args);
    let sidecar: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("h.el.json")).unwrap()).unwrap();
    assert_eq!(sidecar, v);
    for key in ["epsilon_target", "epsilon_certified", "edges", "seed"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["seed"], 3);
    let check = ok(&["verify", "--graph", s(&g), "--sparsifier", s(&h)]);
    assert_eq!(check["epsilon_certified"], v["epsilon_certified"]);
    let first = fs::read(&h).unwrap();
    ok(&args);
    assert_eq!(fs::read(&h).unwrap(), first);
}

#[test]
fn union_of_exact_parts_on_duplicated_family() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.el", "0 1 1\n1 2 2\n2 0 1\n");
    let fam = write(
        dir.path(),
        "dup.json",
        r#"{ "graph": "g.el", "sets": [[[0,1],[1,2],[0,2]], [[0,1],[1,2],[0,2]]] }"#,
    );
    let u = dir.path().join("u.el");
    let v = ok(&[
        "union",
        "--family",
        s(&fam),
        "--part",
        s(&g),
        "--part",
        s(&g),
        "--output",
        s(&u),
    ]);
    assert_eq!(v["c1"], 2);
    assert_eq!(v["ck"], 2);
    assert!((v["epsilon_prime"].as_f64().unwrap() - 0.5).abs() <= 1e-12);
    let check = ok(&["verify", "--graph", s(&g), "--sparsifier", s(&u)]);
    assert!((check["epsilon_certified"].as_f64().unwrap() - 0.5).abs() <= 1e-9);
}

#[test]
fn cluster_and_compare() {
    let dir = TempDir::new().unwrap();
    let g = write(
        dir.path(),
        "tri.el",
        "0 1 1\n1 2 1\n0 2 1\n3 4 1\n4 5 1\n3 5 1\n6 7 1\n7 8 1\n6 8 1\n",
    );
    let labels = dir.path().join("labels.json");
    let out = dspars(&[
        "cluster",
        "--graph",
        s(&g),
        "--k",
        "3",
        "--seed",
        "9",
        "--out",
        s(&labels),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(&labels).unwrap();
    let arr: Vec<usize> = serde_json::from_str(&text).unwrap();
    assert_eq!(arr.len(), 9);
    let truth = write(dir.path(), "truth.json", "[5, 5, 5, 1, 1, 1, 0, 0, 0]");
    let v = ok(&["cluster", "compare", s(&labels), s(&truth)]);
    assert_eq!(v["ari"], 1.0);
}

#[test]
fn laplacian_report() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "p.el", "0 1 2\n1 2 1\n");
    let v = ok(&["laplacian", "--graph", s(&g)]);
    assert_eq!(
        v["matrix"],
        serde_json::json!([[2.0, -2.0, 0.0], [-2.0, 3.0, -1.0], [0.0, -1.0, 1.0]])
    );
}

#[test]
fn failures_yield_error_objects() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.el", "0 1 1\n0 1 2\n");
    let out = dspars(&["verify", "--graph", s(&bad), "--sparsifier", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["error"], "edge_list");
    assert!(v["detail"].as_str().unwrap().contains(":2:"));

    let small = star_family(dir.path(), 5);
    let out = dspars(&["nof", "broadcast", "--family", s(&small), "--site", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["error"], "nof");

    let out = dspars(&["sparsify", "--graph", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["error"], "usage");

    let g = write(dir.path(), "g.el", "0 1 1\n");
    let out = dspars(&[
        "sparsify",
        "--graph",
        s(&g),
        "--epsilon",
        "1.5",
        "--output",
        s(&dir.path().join("h.el")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
