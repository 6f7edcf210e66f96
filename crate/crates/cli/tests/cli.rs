use std::path::PathBuf;
use std::process::{Command, Output};

fn instances() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freeprod"))
        .args(args)
        .current_dir(instances())
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn order_cmp() {
    let o = run(&["order", "cmp", "free_product.json", "g2", "g1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "LT\n");
    assert_eq!(
        stdout(&run(&[
            "order",
            "cmp",
            "free_product.json",
            "g1 g2",
            "g1 g2"
        ])),
        "EQ\n"
    );
    assert_eq!(
        stdout(&run(&["order", "cmp", "free_product.json", "g1", "g2^5"])),
        "GT\n"
    );
}

#[test]
fn intersect_cyclic_with_itself() {
    let o = run(&["intersect", "free_product.json", "AB", "AB"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("components: 1\n  #0: rank 0"), "{out}");
    assert!(out.contains("HOLDS"));
}

#[test]
fn rank_reports_basis() {
    let out = stdout(&run(&["rank", "free_product.json", "R3"]));
    assert!(out.starts_with("reduced rank: 2\nbasis size: 3\n"), "{out}");
    let o = run(&["--json", "rank", "rational.json", "H"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["reduced_rank"], 1);
    assert_eq!(v["basis"].as_array().unwrap().len(), 2);
}

#[test]
fn word_classify() {
    let o = run(&[
        "--json",
        "word",
        "classify",
        "rational.json",
        "g2^-1 g1 g3^1/2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["rotation"]["sign"].is_string());
    let not_cyclic = stdout(&run(&["word", "classify", "rational.json", "g1 g2 g1"]));
    assert!(not_cyclic.contains("not cyclically reduced"));
}

#[test]
fn maxedges_report() {
    let o = run(&["--json", "maxedges", "free_product.json", "R3", "R3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["complete"], true);
    assert_eq!(v["good_cut"], true);
    assert_eq!(
        v["certified"].as_array().unwrap().len() as i64,
        -v["euler_characteristic"].as_i64().unwrap()
    );
    assert_eq!(v["edge_count"]["status"], "consistent");

    let o = run(&["maxedges", "free_product.json", "AB", "BA"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("none"));
}

#[test]
fn shnc_example() {
    let o = run(&["shnc", "shnc.json", "E", "E"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("4 ≤ 4 ≤ 4: HOLDS"));
    let o = run(&["--json", "shnc", "shnc.json", "X", "Y"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(
        (v["report"]["a"].as_u64(), v["report"]["b"].as_u64()),
        (Some(0), Some(0))
    );
}

#[test]
fn verify_small_sweep_is_deterministic() {
    let a = run(&["verify", "--count", "15", "--seed", "3", "--edge-count"]);
    assert_eq!(a.status.code(), Some(0));
    let b = run(&["verify", "--count", "15", "--seed", "3", "--edge-count"]);
    assert_eq!(a.stdout, b.stdout);
    let out = stdout(&a);
    assert!(out.lines().next().unwrap().starts_with("#0000 "));
    assert!(out.ends_with("checked 15, skipped 0, failed 0\n"), "{out}");
}

#[test]
fn verify_reports_skipped_instances() {
    let o = run(&[
        "verify",
        "--count",
        "3",
        "--max-gens",
        "1",
        "--min-syllables",
        "1",
        "--max-syllables",
        "1",
        "--retries",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("checked 0, skipped 3, failed 0\n"));
}

#[test]
fn export_dot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r2.dot");
    let o = run(&[
        "export-dot",
        "free_product.json",
        "R2",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let dot = std::fs::read_to_string(&out).unwrap();
    assert!(dot.starts_with("graph \"R2\" {"));
    let o = run(&["export-dot", "free_product.json", "R2*R2", "-"]);
    assert!(stdout(&o).contains("graph \"R2_x_R2\""));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"factors": [{"kind": "Z"}, {"kind": "Z"}], "subgroups": {"F": ["g1^2"], "Half": ["g1^1/2 g2"]}}"#).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(run(&["rank", p, "F"]).status.code(), Some(3));
    assert_eq!(run(&["rank", p, "Half"]).status.code(), Some(2));
    assert_eq!(run(&["rank", p, "Missing"]).status.code(), Some(2));
    assert_eq!(run(&["order", "cmp", p, "g3", "g1"]).status.code(), Some(2));
    assert_eq!(
        run(&["order", "cmp", p, "g1^0", "g1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["rank", "no-such-file.json", "F"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    std::fs::write(&path, "{ not json").unwrap();
    assert_eq!(run(&["rank", p, "F"]).status.code(), Some(2));
}
