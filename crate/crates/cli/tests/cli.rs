use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use drg::cache::{cache_key, cache_load, cache_store, split_dumps, Artifact, CacheError};
use drg::config::{parse_suites, Backend, RunConfig};
use drg::pipeline::prepare;
use drg::{cmd_dump, cmd_verify, AnySplit};
use serde_json::Value;
use splitdec::dump::read_matrix;
use splitdec::field::QSign;
use splitdec::linalg::Mat;
use rug::Rational;

fn drg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drg"))
        .args(args)
        .env_remove("DRG_CACHE_DIR")
        .output()
        .expect("drg runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn config(graph: &str, suites: &str) -> RunConfig {
    let mut c = RunConfig::new(graph.parse().unwrap());
    c.suites = parse_suites(suites).unwrap();
    c
}

#[test]
fn info_hamming() {
    let o = drg(&["info", "--graph", "hamming:3,2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("n=8 D=3"), "{text}");
    assert!(text.contains("{3,2,1;1,2,3}"), "{text}");
    assert!(text.contains("not classical"), "{text}");
}

#[test]
fn info_classical_parameters() {
    let text = stdout(&drg(&["info", "--graph", "bilinear:3,3,2"]));
    assert!(text.contains("classical (3,2,1,7)"), "{text}");
    let text = stdout(&drg(&["info", "--graph", "cycle:5"]));
    assert!(text.contains("not classical"), "{text}");
}

#[test]
fn verify_exit_codes() {
    let o = drg(&["verify", "--graph", "hamming:3,2", "--suites", "scheme,split,tmodule"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));

    let o = drg(&["verify", "--graph", "hamming:3,2", "--suites", "qtet"]);
    assert_eq!(o.status.code(), Some(2));
    let o = drg(&["verify", "--graph", "hamming:3,2", "--probe", "sample:0:1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = drg(&["verify", "--graph", "nonsense:1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = drg(&["verify", "--graph", "hamming:3,2", "--qsign", "-", "--suites", "scheme"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn petersen_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("petersen.txt");
    let mut text = String::from("# Petersen graph\n10\n");
    for i in 0..5 {
        text.push_str(&format!("{} {}\n", i, (i + 1) % 5));
        text.push_str(&format!("{} {}\n", i, i + 5));
        text.push_str(&format!("{} {}\n", 5 + i, 5 + (i + 2) % 5));
    }
    fs::write(&path, text).unwrap();
    let spec = format!("file:{}", path.display());
    let o = drg(&["info", "--graph", &spec]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("{3,2;1,1}"), "{}", stdout(&o));
    let o = drg(&["verify", "--graph", &spec, "--suites", "scheme,split,tmodule"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let c = config("hamming:3,3", "split");
    let p = prepare(&c).unwrap();
    let split = AnySplit::build(&p.scheme, &p.dd, &p.dual).unwrap();
    let key = cache_key(Artifact::Split, &c, &p.fingerprint, Backend::Exact);
    assert!(cache_load(dir.path(), &key, &p.scheme, &p.dual).unwrap().is_none());
    cache_store(dir.path(), &key, &split).unwrap();
    let loaded = cache_load(dir.path(), &key, &p.scheme, &p.dual).unwrap().unwrap();
    assert_eq!(split_dumps(&split), split_dumps(&loaded));
    assert_eq!(split.dims_table(), loaded.dims_table());
}

#[test]
fn cache_keys() {
    let mut c = config("hamming:3,2", "split");
    let split_plus = cache_key(Artifact::Split, &c, "f", Backend::Exact);
    let qtet_plus = cache_key(Artifact::QTet, &c, "f", Backend::Exact);
    c.qsign = QSign::Minus;
    assert_eq!(split_plus, cache_key(Artifact::Split, &c, "f", Backend::Exact));
    assert_ne!(qtet_plus, cache_key(Artifact::QTet, &c, "f", Backend::Exact));
    assert_ne!(split_plus, cache_key(Artifact::Split, &c, "g", Backend::Exact));
    assert_ne!(split_plus, cache_key(Artifact::Split, &c, "f", Backend::F64));
}

fn corrupt_one_byte(dir: &Path) {
    let entry = fs::read_dir(dir).unwrap().next().unwrap().unwrap().path();
    let file = entry.join("dd.change.txt");
    let mut bytes = fs::read(&file).unwrap();
    let last = bytes.len() - 2;
    bytes[last] = if bytes[last] == b'0' { b'1' } else { b'0' };
    fs::write(&file, bytes).unwrap();
}

#[test]
fn corrupt_cache_is_detected_and_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config("hamming:3,2", "split");
    c.cache_dir = Some(dir.path().to_path_buf());
    let first = cmd_verify(&c).unwrap();
    assert_eq!(first.metadata["cache"], "stored");
    let second = cmd_verify(&c).unwrap();
    assert_eq!(second.metadata["cache"], "hit");
    assert_eq!(first.checks_json(), second.checks_json());

    corrupt_one_byte(dir.path());
    let p = prepare(&c).unwrap();
    let key = cache_key(Artifact::Split, &c, &p.fingerprint, Backend::Exact);
    assert!(matches!(
        cache_load(dir.path(), &key, &p.scheme, &p.dual),
        Err(CacheError::Corrupt(..))
    ));
    let third = cmd_verify(&c).unwrap();
    assert_eq!(third.metadata["cache"], "corrupt, recomputed");
    assert!(third.all_passed());
    assert_eq!(cmd_verify(&c).unwrap().metadata["cache"], "hit");
}

#[test]
fn verify_is_deterministic() {
    let c = config("cycle:8", "scheme,split,tmodule");
    let a = cmd_verify(&c).unwrap();
    let b = cmd_verify(&c).unwrap();
    assert!(a.all_passed());
    assert_eq!(a.checks_json(), b.checks_json());
}

#[test]
fn dump_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config("hamming:3,2", "split");
    c.out = Some(dir.path().to_path_buf());
    let report = cmd_dump(&c).unwrap();
    let files = report.tables["files"].as_object().unwrap();
    assert!(files.contains_key("A1.txt"));
    assert!(files.contains_key("E3.txt"));
    assert!(files.contains_key("uu.inverse.txt"));
    for (name, meta) in files {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        let (_, m): (_, Mat<Rational>) = read_matrix(&text).unwrap();
        assert_eq!(m.rows() as u64, meta["rows"].as_u64().unwrap());
    }
    let a1: Mat<Rational> = read_matrix(&fs::read_to_string(dir.path().join("A1.txt")).unwrap()).unwrap().1;
    let degree: Rational = (0..8).map(|j| a1[(0, j)].clone()).sum();
    assert_eq!(degree, 3);
    assert!(dir.path().join("report.json").exists());
}

#[test]
fn dump_needs_out() {
    let o = drg(&["dump", "--graph", "hamming:3,2"]);
    assert_eq!(o.status.code(), Some(2));
}
