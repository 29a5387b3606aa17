use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use serde_json::Value;

/// One catalog cache per test run, shared by all commands.
fn cache_dir() -> &'static Path {
    static DIR: OnceLock<tempfile::TempDir> = OnceLock::new();
    DIR.get_or_init(|| tempfile::tempdir().unwrap()).path()
}

fn run_with_cache(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_splitcartan"))
        .args(args)
        .env("SPLITCARTAN_CACHE", cache)
        .output()
        .expect("spawn splitcartan")
}

fn run(args: &[&str]) -> Output {
    run_with_cache(cache_dir(), args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn composite_and_small_primes_are_usage_errors() {
    for p in ["4", "7", "x"] {
        let o = run(&["genus", "-p", p]);
        assert_eq!(o.status.code(), Some(2), "p = {p}");
    }
    assert_eq!(run(&["verdict"]).status.code(), Some(2));
}

#[test]
fn genus_as_json() {
    let o = run(&["genus", "-p", "29", "--format", "json"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["g_plus"], 26);
    assert_eq!(v["g_zero"], 2);
}

#[test]
fn verdict_for_11_is_klein_four() {
    let o = run(&["verdict", "-p", "11", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["aut_group"], "klein_four");
    assert_eq!(v["status"], "VERIFIED");
}

#[test]
fn parity_for_31() {
    let o = run(&["parity", "-p", "31", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["sum_p"], 10);
    assert_eq!(v["allowed_max"], 9);
    assert_eq!(v["ruled_out"], true);
    assert_eq!(v["n_max"], 36);
}

#[test]
fn pointcount_text() {
    let o = run(&["pointcount", "-p", "17", "--nmax", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("N_2(1) = 6"), "{s}");
    assert!(s.contains("functional equation: true"));
}

#[test]
fn hyper_for_11_and_17() {
    let o = run(&["hyper", "-p", "11"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("y^2 = x^6 - 7*x^4 + 11*x^2 + 11"));
    let o = run(&["hyper", "-p", "17", "--format", "json"]);
    let v = json(&o);
    assert_eq!(v["shape"], "OTHER");
    assert_eq!(v["result"]["outcome"], "refused");
}

#[test]
fn verdict_all() {
    let o = run(&["verdict", "--all", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    let list = v.as_array().unwrap();
    let primes: Vec<u64> = list.iter().map(|x| x["p"].as_u64().unwrap()).collect();
    assert_eq!(primes, vec![11, 13, 17, 19, 23, 29, 31, 37, 41, 43]);
    for x in list {
        let want = if x["p"] == 11 { "klein_four" } else { "trivial" };
        assert_eq!(x["aut_group"], want);
        assert_eq!(x["status"], "VERIFIED");
    }
}

#[test]
fn empty_report_succeeds() {
    let o = run(&["report", "--primes", ""]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("no primes requested"));
}

#[test]
fn cached_rerun_gives_identical_report() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = |out: &PathBuf| {
        vec!["report".to_string(), "--primes".into(), "11,13,37".into(), "-o".into(), out.display().to_string(), "--format".into(), "json".into()]
    };
    let first = run_with_cache(&cache, &args(&a).iter().map(String::as_str).collect::<Vec<_>>());
    assert!(first.status.success(), "{}", stderr(&first));
    let second = run_with_cache(&cache, &args(&b).iter().map(String::as_str).collect::<Vec<_>>());
    assert!(second.status.success());
    let (ra, rb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ra, rb);
    let v: Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(v["t_values"]["13"], 3);
}

#[test]
fn unreadable_cache_is_rebuilt_with_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v1").join("catalog-p11.json");
    std::fs::create_dir_all(path.parent().unwrap()).unwrap();
    std::fs::write(&path, "not a catalog").unwrap();
    let o = run_with_cache(dir.path(), &["catalog", "-p", "11"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning"), "{}", stderr(&o));
    assert!(std::fs::read_to_string(&path).unwrap().contains("schema_version"));
}

#[test]
fn import_round_trip_and_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("catalog-121.json");
    let f = file.to_str().unwrap();
    let o = run(&["catalog", "-p", "11", "--save", f]);
    assert!(o.status.success(), "{}", stderr(&o));

    let computed = json(&run(&["hyper", "-p", "11", "--format", "json"]));
    let imported = json(&run(&["hyper", "-p", "11", "--import", f, "--format", "json"]));
    assert_eq!(computed, imported);

    let o = run(&["catalog", "-p", "11", "--import", f, "--format", "json"]);
    assert!(json(&o)["catalog"]["provenance"].as_str().unwrap().starts_with("imported"));
    let o = run(&["catalog", "-p", "13", "--import", f]);
    assert_eq!(o.status.code(), Some(1));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"schema_version": 1}"#).unwrap();
    let o = run(&["catalog", "-p", "11", "--import", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("schema"), "{}", stderr(&o));
}
