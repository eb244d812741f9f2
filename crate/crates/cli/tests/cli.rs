//! End-to-end runs of the binary: exit codes, determinism, cache precedence.

use std::path::Path;
use std::process::Command;

fn kloodist() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_kloodist"));
    c.env_remove("KLOODIST_CACHE");
    c
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

const SMALL: &str = r#"{"field": {"p": 5}, "a": ["0-1/1", "1-0-1/0-1"], "degrees": [1, 2, 3, 4]}"#;

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn angles_identical_across_worker_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", SMALL);
    for w in ["1", "8"] {
        let st = kloodist()
            .args(["angles", "--workers", w, "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(tmp.path().join(format!("out{w}")))
            .arg("--cache-dir")
            .arg(tmp.path().join(format!("cache{w}")))
            .output()
            .unwrap()
            .status;
        assert!(st.success());
    }
    let one = read_dir_sorted(&tmp.path().join("out1"));
    assert_eq!(one.len(), 8);
    assert_eq!(one, read_dir_sorted(&tmp.path().join("out8")));
    let d4 = String::from_utf8(one.iter().find(|(n, _)| n == "angles_a0_d4.csv").unwrap().1.clone()).unwrap();
    assert_eq!(d4.lines().filter(|l| !l.starts_with('#')).count(), 151);
    assert!(d4.contains("# config={") && d4.contains("# version="));
}

#[test]
fn every_report_command_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"field": {"p": 3}, "a": ["0-1/1", "1-1/1"], "degrees": [2, 3, 4], "moduli": ["0-0-1"],
            "short_intervals": ["A=0-0-0-0-0-1;h=3"], "boxes": [[[0.0, 1.5], [1.0, 3.0]]]}"#,
    );
    for cmd in ["dist", "ap", "short", "joint", "census"] {
        for fmt in ["csv", "json"] {
            let mut outs = Vec::new();
            for w in ["1", "3"] {
                let out = tmp.path().join(format!("{cmd}-{fmt}-{w}"));
                let st = kloodist()
                    .args([cmd, "--workers", w, "--format", fmt, "--config"])
                    .arg(&cfg)
                    .arg("--out")
                    .arg(&out)
                    .output()
                    .unwrap()
                    .status;
                assert!(st.success(), "{cmd} {fmt}");
                outs.push(read_dir_sorted(&out));
            }
            assert!(!outs[0].is_empty());
            assert_eq!(outs[0], outs[1], "{cmd} {fmt}");
        }
    }
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        ("missing", None),
        ("bad-json", Some("{not json")),
        ("unknown-key", Some(r#"{"field": {"p": 5}, "a": "0-1/1", "degrees": [2], "extra": true}"#)),
        ("composite-p", Some(r#"{"field": {"p": 9}, "a": "0-1/1", "degrees": [2]}"#)),
        (
            "excluded-short",
            Some(r#"{"field": {"p": 3}, "a": "0-1/1", "degrees": [4], "short_intervals": ["A=0-0-0-0-1;h=2"]}"#),
        ),
    ];
    for (name, body) in cases {
        let path = match body {
            Some(b) => write_config(tmp.path(), name, b),
            None => tmp.path().join("nope.json"),
        };
        let out = kloodist().args(["short", "--config"]).arg(&path).arg("--out").arg(tmp.path()).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = kloodist().args(["dist"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = kloodist().args(["dist", "--format", "xml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_check_exits_1() {
    let out = kloodist().args(["verify", "--only", "99"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn verify_subset_passes() {
    let out = kloodist().args(["verify", "--only", "8,9,10"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.contains("PASS")).count(), 3);
}

#[test]
fn cache_dir_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let (from_cfg, from_env, from_flag) = (tmp.path().join("cfg"), tmp.path().join("env"), tmp.path().join("flag"));
    let body = format!(
        r#"{{"field": {{"p": 3}}, "a": "0-1/1", "degrees": [2], "cache_dir": {}}}"#,
        serde_json::to_string(&from_cfg).unwrap()
    );
    let cfg = write_config(tmp.path(), "c.json", &body);
    let run = |env: Option<&Path>, flag: Option<&Path>| {
        let mut c = kloodist();
        c.args(["angles", "--config"]).arg(&cfg).arg("--out").arg(tmp.path().join("out"));
        if let Some(e) = env {
            c.env("KLOODIST_CACHE", e);
        }
        if let Some(f) = flag {
            c.arg("--cache-dir").arg(f);
        }
        assert!(c.output().unwrap().status.success());
    };
    let entries = |p: &Path| std::fs::read_dir(p).map(|d| d.count()).unwrap_or(0);
    run(None, None);
    assert_eq!(entries(&from_cfg), 1);
    run(Some(&from_env), None);
    assert_eq!(entries(&from_env), 1);
    run(Some(&from_env), Some(&from_flag));
    assert_eq!(entries(&from_flag), 1);
}

#[test]
fn corrupt_cache_entry_is_rebuilt() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", SMALL);
    let cache = tmp.path().join("cache");
    let run = |out: &str| {
        let o = kloodist()
            .args(["angles", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(tmp.path().join(out))
            .arg("--cache-dir")
            .arg(&cache)
            .output()
            .unwrap();
        assert!(o.status.success());
        String::from_utf8(o.stderr).unwrap()
    };
    run("a");
    for e in std::fs::read_dir(&cache).unwrap() {
        let p = e.unwrap().path();
        let text = std::fs::read_to_string(&p).unwrap();
        std::fs::write(&p, text.replace('1', "2")).unwrap();
    }
    let warnings = run("b");
    assert!(warnings.contains("corrupt"));
    assert_eq!(read_dir_sorted(&tmp.path().join("a")), read_dir_sorted(&tmp.path().join("b")));
    assert!(!run("c").contains("corrupt"));
}

/// With r = 1 the classes are the nonzero constant terms, so the ap counts
/// must add up to the places with nonzero constant term.
#[test]
fn ap_with_r1_matches_dist_on_constant_term_classes() {
    let tmp = tempfile::tempdir().unwrap();
    let ap = write_config(
        tmp.path(),
        "ap.json",
        r#"{"field": {"p": 5}, "a": "1-1/1", "degrees": [3], "moduli": ["0-1"], "intervals": [[0.0, 3.141592653589793]]}"#,
    );
    let dist = write_config(
        tmp.path(),
        "dist.json",
        r#"{"field": {"p": 5}, "a": "1-1/1", "degrees": [3], "nonzero_constant": true, "intervals": [[0.0, 3.141592653589793]]}"#,
    );
    for (cmd, cfg) in [("ap", &ap), ("dist", &dist)] {
        let st = kloodist()
            .args([cmd, "--format", "json", "--config"])
            .arg(cfg)
            .arg("--out")
            .arg(tmp.path())
            .output()
            .unwrap()
            .status;
        assert!(st.success());
    }
    let read = |n: &str| -> serde_json::Value {
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join(n)).unwrap()).unwrap()
    };
    let ap = read("ap.json");
    let dist = read("dist.json");
    let total: u64 = ap["tables"]["classes"].as_array().unwrap().iter().map(|r| r["count"].as_u64().unwrap()).sum();
    assert_eq!(total, dist["tables"]["summary"][0]["n"].as_u64().unwrap());
}
