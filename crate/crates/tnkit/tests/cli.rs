use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn tnkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tnkit"))
        .args(args)
        .env_remove("TNKIT_MAX_AMPLITUDES")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = tnkit(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn p(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_writes_meta_and_version() {
    let dir = tempfile::tempdir().unwrap();
    let f = p(&dir, "net.json");
    ok(&[
        "build",
        "--kind",
        "mera2d-b2",
        "--layers",
        "2",
        "--chi",
        "2",
        "--out",
        s(&f),
    ]);
    let v = json(&f);
    assert_eq!(v["format"], "tns-v1");
    assert_eq!(v["meta"]["C_o"], 8);
    assert!(v["generator-version"]
        .as_str()
        .unwrap()
        .starts_with("tnkit "));

    let t = p(&dir, "ttn.json");
    ok(&["build", "--kind", "ttn1d", "--layers", "5", "--out", s(&t)]);
    assert_eq!(json(&t)["lattice"]["size"], 32);
}

#[test]
fn invalid_parameters_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let f = p(&dir, "x.json");
    assert_eq!(
        code(&tnkit(&[
            "build",
            "--kind",
            "ttn1d",
            "--layers",
            "4",
            "--out",
            s(&f)
        ])),
        2
    );
    assert_eq!(
        code(&tnkit(&[
            "build",
            "--kind",
            "mera3d",
            "--layers",
            "2",
            "--out",
            s(&f)
        ])),
        2
    );
    assert_eq!(code(&tnkit(&["frobnicate"])), 2);
    assert_eq!(
        code(&tnkit(&[
            "map",
            s(&f),
            "--scheme",
            "shifted",
            "--out",
            s(&f)
        ])),
        2
    );
}

#[test]
fn refined_map_summary() {
    let dir = tempfile::tempdir().unwrap();
    let (net, map, csv) = (p(&dir, "n.json"), p(&dir, "m.json"), p(&dir, "c.csv"));
    ok(&[
        "build",
        "--kind",
        "mera2d-b2",
        "--layers",
        "3",
        "--out",
        s(&net),
    ]);
    let text = ok(&[
        "map",
        s(&net),
        "--scheme",
        "refined",
        "--out",
        s(&map),
        "--csv",
        s(&csv),
    ]);
    assert!(text.contains("within bound"));
    let v = json(&map);
    assert_eq!(v["summary"]["max_internal_paths"], 2);
    assert_eq!(v["summary"]["within_bound"], true);
    let rows = std::fs::read_to_string(&csv).unwrap();
    let max = rows
        .lines()
        .skip(2)
        .map(|l| l.split(',').nth(3).unwrap().parse::<usize>().unwrap())
        .max();
    assert_eq!(max, Some(2));
}

#[test]
fn naive_1d_flags_stacks() {
    let dir = tempfile::tempdir().unwrap();
    let (net, map) = (p(&dir, "n.json"), p(&dir, "m.json"));
    ok(&[
        "build",
        "--kind",
        "mera1d",
        "--layers",
        "4",
        "--out",
        s(&net),
    ]);
    let text = ok(&["map", s(&net), "--scheme", "naive", "--out", s(&map)]);
    assert!(text.contains("warning: stacks"));
    assert!(text.contains("one dimension"));
    assert_eq!(json(&map)["summary"]["unbounded_stacks"], true);
}

#[test]
fn verify_passes_for_every_scheme() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, layers) in [("mera2d-b2", "1"), ("mera1d", "2")] {
        let net = p(&dir, "n.json");
        ok(&[
            "build",
            "--kind",
            kind,
            "--layers",
            layers,
            "--seed",
            "11",
            "--out",
            s(&net),
        ]);
        for scheme in ["naive", "shifted", "refined"] {
            let map = p(&dir, "m.json");
            ok(&["map", s(&net), "--scheme", scheme, "--out", s(&map)]);
            let text = ok(&["verify", s(&net), s(&map)]);
            assert!(!text.contains("FAIL"), "{kind} {scheme}: {text}");
        }
    }
}

#[test]
fn verify_refusals() {
    let dir = tempfile::tempdir().unwrap();
    let (net, map) = (p(&dir, "n.json"), p(&dir, "m.json"));
    ok(&[
        "build",
        "--kind",
        "mera2d-b2",
        "--layers",
        "1",
        "--seed",
        "3",
        "--out",
        s(&net),
    ]);
    ok(&["map", s(&net), "--scheme", "shifted", "--out", s(&map)]);

    let out = Command::new(env!("CARGO_BIN_EXE_tnkit"))
        .args(["verify", s(&net), s(&map)])
        .env("TNKIT_MAX_AMPLITUDES", "4")
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);

    let mut v = json(&map);
    let paths = v["paths"].as_array_mut().unwrap();
    let long = paths
        .iter_mut()
        .find(|x| x["sites"].as_array().unwrap().len() > 2)
        .unwrap();
    long["sites"].as_array_mut().unwrap().remove(1);
    let bad = p(&dir, "bad.json");
    std::fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(code(&tnkit(&["verify", s(&net), s(&bad)])), 4);

    let sym = p(&dir, "sym.json");
    ok(&[
        "build",
        "--kind",
        "mera2d-b2",
        "--layers",
        "1",
        "--out",
        s(&sym),
    ]);
    assert_eq!(code(&tnkit(&["verify", s(&sym), s(&map)])), 2);
}

#[test]
fn ttn_entropy_scan() {
    let text = ok(&["entropy", "ttn1d", "--layers", "1..9:2"]);
    let rows: Vec<Vec<usize>> = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    for r in rows {
        assert_eq!(r[2], r[0].div_ceil(2));
    }
}

#[test]
fn qca_scan_cross_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(&dir, "q.csv");
    let text = ok(&[
        "entropy",
        "qca",
        "--dim",
        "2",
        "--sizes",
        "16",
        "--layers",
        "1..3",
        "--cross-check",
        "--out",
        s(&out),
    ]);
    assert!(text.starts_with("fit: S = "));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(
        csv.lines().nth(1),
        Some("dim,size,layers,entropy,ratio,stabilizer,agree")
    );
    assert!(csv.lines().skip(2).all(|l| l.ends_with(",true")));
}

#[test]
fn outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut seen = Vec::new();
    for i in 0..2 {
        let (net, map, csv, svg) = (
            p(&dir, &format!("n{i}")),
            p(&dir, &format!("m{i}")),
            p(&dir, &format!("c{i}")),
            p(&dir, &format!("s{i}")),
        );
        ok(&[
            "build",
            "--kind",
            "mera2d-b3",
            "--layers",
            "2",
            "--seed",
            "5",
            "--out",
            s(&net),
        ]);
        ok(&[
            "map",
            s(&net),
            "--scheme",
            "refined",
            "--out",
            s(&map),
            "--csv",
            s(&csv),
        ]);
        ok(&["render", s(&map), "--out", s(&svg)]);
        seen.push([&net, &map, &csv, &svg].map(|f| std::fs::read(f).unwrap()));
    }
    assert_eq!(seen[0], seen[1]);
}

#[test]
fn render_both_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let (net, map, a, b) = (
        p(&dir, "n.json"),
        p(&dir, "m.json"),
        p(&dir, "a.svg"),
        p(&dir, "b.svg"),
    );
    ok(&[
        "build",
        "--kind",
        "mera2d-b2",
        "--layers",
        "2",
        "--out",
        s(&net),
    ]);
    ok(&["map", s(&net), "--scheme", "shifted", "--out", s(&map)]);
    ok(&["render", s(&net), "--out", s(&a)]);
    ok(&["render", s(&map), "--out", s(&b)]);
    let b = std::fs::read_to_string(&b).unwrap();
    assert!(b.contains("<polyline") && b.contains("6 paths:"));
    assert!(!std::fs::read_to_string(&a).unwrap().contains("<polyline"));
}
