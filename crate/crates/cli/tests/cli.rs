use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use oe_cli::{ReportDocument, Summary};
use serde_json::Value;

const SHIPPED: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/theorem-b-z2.cfg");

fn oewb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oewb")).args(args).output().expect("binary runs")
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    oewb(&args)
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("suite.cfg");
    std::fs::write(&path, body).unwrap();
    path
}

fn report(out: &Path, name: &str) -> ReportDocument {
    serde_json::from_str(&std::fs::read_to_string(out.join(format!("{name}.json"))).unwrap()).unwrap()
}

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("timing_ms");
            m.values_mut().for_each(strip_timing);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

const NEGATIVE: &str = r#"
schema_version = 1
[groups.K]
builtin = "Z2"

[[checks]]
name = "free"
kind = "appendix-section"
group = "K"
copies = 3

[[checks]]
name = "fixed-point"
kind = "appendix-section"
group = "K"
table = [[0, 1, 2, 3], [1, 0, 2, 3]]
"#;

#[test]
fn shipped_config_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(Path::new(SHIPPED), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: Summary = serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary.exit_code, 0);
    assert_eq!(summary.checks.len(), 1);
    let doc = report(dir.path(), "theorem-b-z2");
    assert!(doc.report.passed());
    assert!(doc.report.is_well_formed());
    assert!(doc.report.timing_ms.is_some());
}

#[test]
fn undeclared_group_exits_3_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "schema_version = 1\n[[checks]]\nname = \"tb\"\nkind = \"theorem-b\"\ngroup = \"H\"\nseed = 0\n");
    let out = run(&cfg, &dir.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("checks.tb.group"), "{err}");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn malformed_documents_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    for (body, field) in [
        ("schema_version = 1\nchecks = [", "config"),
        ("schema_version = 7\nchecks = []\n", "schema_version"),
        ("schema_version = 1\n[[checks]]\nname = \"x\"\nkind = \"lemma-2\"\n", "checks.x"),
        ("schema_version = 1\n[groups.K]\nbuiltin = \"Q8\"\n[[checks]]\nname = \"x\"\nkind = \"appendix-section\"\ngroup = \"K\"\n", "groups.K.builtin"),
        ("schema_version = 1\n[groups.K]\nbuiltin = \"Z2\"\n[[checks]]\nname = \"x\"\nkind = \"appendix-section\"\ngroup = \"K\"\n", "checks.x.table"),
        ("schema_version = 1\n[groups.K]\nbuiltin = \"Z2\"\n[[checks]]\nname = \"x\"\nkind = \"star-action\"\nk = \"K\"\ntwist = [\"5\"]\nseed = 0\n", "checks.x.twist"),
        ("schema_version = 1\n[[checks]]\nname = \"x\"\nkind = \"lemma-indep\"\nx_size = 1\nx0_size = 2\nh_action = [[0, 0]]\nindex_size = 1\nfamily = [[[0, 0]]]\n", "checks.x"),
    ] {
        let cfg = write_config(dir.path(), body);
        let out = run(&cfg, &dir.path().join("out"), &[]);
        let err = String::from_utf8_lossy(&out.stderr);
        assert_eq!(out.status.code(), Some(3), "{body}\n{err}");
        assert!(err.contains(field), "{field}: {err}");
    }
    let out = run(Path::new("/nonexistent/suite.cfg"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn negative_control_exits_1_with_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), NEGATIVE);
    let out = run(&cfg, &dir.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(report(&dir.path().join("out"), "free").report.passed());
    let bad = report(&dir.path().join("out"), "fixed-point").report;
    assert!(!bad.passed());
    assert!(bad.counterexample.unwrap().contains("point 2"));
}

#[test]
fn budget_exhaustion_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "schema_version = 1\n[[checks]]\nname = \"x\"\nkind = \"lemma-indep\"\nx_size = 2\nx0_size = 2\nh_action = [[0, 1], [1, 0]]\nindex_size = 3\nfamily = [[[0, 0], [1, 2]], [[1, 1], [0, 0]]]\n",
    );
    assert_eq!(run(&cfg, &dir.path().join("a"), &[]).status.code(), Some(0));
    let out = run(&cfg, &dir.path().join("b"), &["--budget", "8"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&dir.path().join("b"), "x").report.verdict, oe_core::Verdict::Undetermined);
}

#[test]
fn only_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), NEGATIVE);
    let out = run(&cfg, &dir.path().join("out"), &["--only", "free"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!dir.path().join("out/fixed-point.json").exists());
    assert_eq!(run(&cfg, &dir.path().join("x"), &["--only", "nope"]).status.code(), Some(3));

    let out = run(Path::new(SHIPPED), &dir.path().join("seeded"), &["--seed-override", "99"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&dir.path().join("seeded"), "theorem-b-z2").report.seed, Some(99));
}

#[test]
fn reports_are_byte_identical_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let checks = &NEGATIVE[NEGATIVE.find("[[checks]]").unwrap()..];
    let cfg = write_config(dir.path(), &(std::fs::read_to_string(SHIPPED).unwrap() + checks));
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run(&cfg, &a, &[]).status.code(), Some(1));
    assert_eq!(run(&cfg, &b, &[]).status.code(), Some(1));
    for name in ["theorem-b-z2", "free", "fixed-point", "summary"] {
        let read = |dir: &Path| {
            let mut v: Value = serde_json::from_str(&std::fs::read_to_string(dir.join(format!("{name}.json"))).unwrap()).unwrap();
            strip_timing(&mut v);
            serde_json::to_string_pretty(&v).unwrap()
        };
        assert_eq!(read(&a), read(&b), "{name}");
    }
    assert_eq!(std::fs::read(a.join("summary.json")).unwrap(), std::fs::read(b.join("summary.json")).unwrap());
}

#[test]
fn text_format_writes_text_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(Path::new(SHIPPED), dir.path(), &["--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("theorem-b-z2.txt")).unwrap();
    assert!(text.contains("[PASS] theorem-b"), "{text}");
    assert!(std::fs::read_to_string(dir.path().join("summary.txt")).unwrap().contains("exit 0"));
}

#[test]
fn list_checks_is_structured_and_stable() {
    let out = oewb(&["list-checks", "--format", "structured"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert_eq!(names.len(), 8);
    assert!(names.contains(&"coinduction-characterization"));
    assert!(v.as_array().unwrap().iter().all(|e| e["anchor"].as_str().is_some_and(|a| !a.is_empty())));
    let text = oewb(&["list-checks"]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("lemma-indep"));
}

#[test]
fn catalog_examples_run() {
    let dir = tempfile::tempdir().unwrap();
    for e in oe_cli::catalog() {
        if e.name == "lemma-2" {
            continue;
        }
        let cfg = write_config(dir.path(), e.example);
        let out = run(&cfg, &dir.path().join(e.name), &[]);
        assert_eq!(out.status.code(), Some(0), "{}: {}", e.name, String::from_utf8_lossy(&out.stdout));
    }
}
