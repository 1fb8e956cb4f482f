use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.toml"))
}

fn input(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/inputs").join(format!("{name}.toml"))
}

fn run(args: &[&str], file: &Path) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_sqzlift")).args(args).arg(file).output().expect("binary runs");
    (out.status.code().expect("exit code"), String::from_utf8(out.stdout).expect("utf-8"))
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).expect("stdout is JSON")
}

/// Compares against `tests/golden/<name>.json`; `SQZLIFT_BLESS=1` rewrites the file.
fn golden(name: &str, text: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.json"));
    if std::env::var_os("SQZLIFT_BLESS").is_some() {
        std::fs::write(&path, text).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(text, expected, "{name} differs from its golden file");
}

const GOLDEN: &[(&str, &str)] = &[
    ("check", "z4-to-z2-m-z2"),
    ("resolve", "z8-to-z4-m-z2"),
    ("ext", "z4-to-z2-m-z2sq"),
    ("tor", "z8-to-z4-m-z2"),
    ("obstruct", "z4-to-z2-m-z2"),
    ("obstruct", "z4-split-z4-m-z2"),
    ("lifts", "z4-to-z2-m-z2"),
    ("lifts", "cocycle-z4-over-z2"),
    ("lifts", "dual-split-residue-m-k"),
    ("verify", "z4-to-z2-complex"),
    ("oracle", "z4-to-z2-m-z2"),
    ("torsor", "z4-split-z4-m-z2"),
    ("torsor", "z8-to-z4-m-z2"),
];

#[test]
fn reports_match_golden_files() {
    for (command, name) in GOLDEN {
        let (code, out) = run(&[command], &fixture(name));
        assert_eq!(code, 0, "{command} {name}: {out}");
        golden(&format!("{command}-{name}"), &out);
    }
}

#[test]
fn reports_are_deterministic() {
    for command in ["lifts", "verify", "torsor"] {
        let a = run(&[command], &fixture("z9-to-z3-m-z3"));
        let b = run(&[command], &fixture("z9-to-z3-m-z3"));
        assert_eq!(a, b, "{command}");
    }
}

#[test]
fn listed_reports() {
    let (_, out) = run(&["obstruct"], &fixture("z4-to-z2-m-z2"));
    let v = json(&out);
    assert_eq!(v["ext2_class"], "0");
    assert_eq!(v["vanishes"], true);
    let (_, out) = run(&["lifts"], &fixture("z4-to-z2-m-z2"));
    let v = json(&out);
    assert_eq!(v["classes"], 1);
    assert_eq!(v["ext1_order"], 1);
    assert_eq!(v["torsor_ok"], true);
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn every_fixture_passes_torsor_and_verify() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    for f in files {
        let (code, out) = run(&["verify"], &f);
        assert_eq!(code, 0, "verify {}: {out}", f.display());
        let (code, out) = run(&["torsor"], &f);
        let module = !out.contains("needs a module input");
        assert_eq!(code, if module { 0 } else { 4 }, "torsor {}: {out}", f.display());
    }
}

#[test]
fn obstruction_ignores_the_section_flag() {
    for name in ["z4-to-z2-m-z2", "z4-split-z4-m-z2", "x4-to-x2-m-k"] {
        let (_, base) = run(&["obstruct"], &fixture(name));
        for seed in ["1", "5", "99"] {
            let (code, out) = run(&["obstruct", "--section", seed], &fixture(name));
            assert_eq!(code, 0);
            assert_eq!(json(&out)["vanishes"], json(&base)["vanishes"], "{name} seed {seed}");
        }
    }
}

#[test]
fn malformed_input_exits_4_with_a_path() {
    for (name, path) in [("non-associative", "extension.base"), ("bad-map", "extension.map"), ("typo", "toml")] {
        let (code, out) = run(&["check"], &input(name));
        assert_eq!(code, 4, "{name}: {out}");
        let v = json(&out);
        assert_eq!(v["error"]["kind"], "malformed_input");
        assert_eq!(v["error"]["path"], path, "{name}");
    }
    let (code, out) = run(&["oracle"], &fixture("z4-to-z2-complex"));
    assert_eq!(code, 4, "{out}");
    let (code, _) = run(&["frobnicate"], &fixture("z4-to-z2-m-z2"));
    assert_eq!(code, 4);
}

#[test]
fn exhaustion_exits_3() {
    let (code, out) = run(&["oracle", "--budget", "2"], &fixture("dual-split-regular-m-k"));
    assert_eq!(code, 3, "{out}");
    assert_eq!(json(&out)["error"]["kind"], "exhausted");
    let (code, out) = run(&["lifts", "--resolution-length", "0"], &fixture("z8-to-z4-m-z2"));
    assert_eq!(code, 3, "{out}");
}
