use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropcc"))
        .args(args)
        .env("TROPCC_CACHE", cache)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn census_reports_genus_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["census", "--g", "3", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["classes"], 4);
    assert_eq!(v["by_edges"]["6"], 2);
}

#[test]
fn compute_writes_and_reuses_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["compute", "--g", "3", "--n", "3..4", "--format", "json"];
    let first = run(dir.path(), &args);
    assert_eq!(
        code(&first),
        0,
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    let tables: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(
        tables[1]["degrees"]["9"][0]["partition"],
        serde_json::json!([2, 2])
    );
    let entries = fs::read_dir(dir.path().join("result")).unwrap().count();
    assert_eq!(entries, 2);
    let second = run(dir.path(), &args);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn corrupt_cache_entries_exit_with_four() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&run(dir.path(), &["compute", "--g", "3", "--n", "1"])),
        0
    );
    let entry = fs::read_dir(dir.path().join("result"))
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    let text = fs::read_to_string(&entry).unwrap();
    fs::write(&entry, text.replacen("\"mult\": 1", "\"mult\": 3", 1)).unwrap();
    let out = run(dir.path(), &["compute", "--g", "3", "--n", "1"]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("corrupt"));
}

#[test]
fn bad_arguments_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["compute", "--g", "3", "--n", "40"][..],
        &["compute", "--g", "4", "--n", "1", "--route", "e1"],
        &["compute", "--g", "1", "--n", "1"],
        &["compute", "--g", "3", "--n", "2", "--isotypic", "3,1"],
        &["compute", "--g", "3", "--n", "2", "--hgc", "3,3"],
        &["verify", "g3-full-n<=40"],
        &["verify", "g7-full-n<=2"],
        &["compute", "--g", "three", "--n", "1"],
    ] {
        assert_eq!(code(&run(dir.path(), args)), 2, "{args:?}");
    }
}

#[test]
fn verify_passes_on_small_scopes() {
    let dir = tempfile::tempdir().unwrap();
    for scope in ["census", "g3-full-n<=3", "g3-sign-n<=4"] {
        let out = run(dir.path(), &["verify", scope]);
        assert_eq!(
            code(&out),
            0,
            "{scope}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
        assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
    }
}

#[test]
fn isotypic_and_hgc_options() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "compute",
            "--g",
            "3",
            "--n",
            "3",
            "--isotypic",
            "trivial",
            "--hgc",
            "1,2",
            "--format",
            "json",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["degrees"]["8"][0]["partition"], serde_json::json!([3]));
    assert_eq!(v[0]["hgc"][0]["i"], 0);
}

#[test]
fn conf_reports_one_graph() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "conf", "--g", "3", "--n", "2", "--graph", "goggles", "--format", "json",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["n"], 2);
}
