use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sicut::problems::{BiigInstance, WmcigInstance};
use sicut::report::{read_records, COLUMNS};

fn sicut(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sicut")).args(args).current_dir(dir).output().expect("binary runs")
}

fn write_examples(dir: &Path) {
    let ex1 = BiigInstance::new(vec![0.3, 0.5, 0.4], 4, vec![(0, 0), (1, 0), (1, 1), (2, 0), (2, 2)], 2, 1).unwrap();
    let ex2 = WmcigInstance::new(vec![5, 9, 6, 4], vec![vec![0, 2], vec![0, 1], vec![0, 2, 3]], 2, 1).unwrap();
    fs::write(dir.join("ex1.biig"), ex1.to_text()).unwrap();
    fs::write(dir.join("ex2.wmcig"), ex2.to_text()).unwrap();
}

#[test]
fn solve_prints_a_result_row() {
    let dir = tempfile::tempdir().unwrap();
    write_examples(dir.path());
    let out = sicut(&["solve", "ex2.wmcig", "--setting", "B-S1", "--time-limit", "60"], dir.path());
    assert!(out.status.success());
    let recs = read_records(out.stdout.as_slice()).unwrap();
    assert_eq!(recs.len(), 1);
    let r = &recs[0];
    assert_eq!((r.ub, r.lb, r.gap_pct), (15.0, 15.0, 0.0));
    assert_eq!((r.instance.as_str(), r.setting.as_str(), r.status.as_str()), ("ex2", "B-S1", "optimal"));
}

#[test]
fn verify_agrees_with_enumeration() {
    let dir = tempfile::tempdir().unwrap();
    write_examples(dir.path());
    for (file, setting) in [("ex1.biig", "ILDAE-S2"), ("ex2.wmcig", "B-S3"), ("ex2.wmcig", "ILA-S1")] {
        let out = sicut(&["verify", file, "--setting", setting], dir.path());
        assert!(out.status.success(), "{file} {setting}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    write_examples(dir.path());
    let out = sicut(&["solve", "ex2.wmcig", "--setting", "XQ-S9"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("XQ-S9"));
    assert_eq!(sicut(&["frobnicate"], dir.path()).status.code(), Some(2));
}

#[test]
fn runtime_failures_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    write_examples(dir.path());
    assert_eq!(sicut(&["solve", "missing.wmcig"], dir.path()).status.code(), Some(1));
    fs::write(dir.path().join("junk.wmcig"), "WMCIG 3 x\n").unwrap();
    assert_eq!(sicut(&["solve", "junk.wmcig"], dir.path()).status.code(), Some(1));
    let out = sicut(&["export-miblp", "ex1.biig", "--out", "ex1"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn generate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    for name in ["a.wmcig", "b.wmcig"] {
        let out = sicut(&["generate", "wmcig", "--n", "12", "--radius", "2", "--k", "2", "--seed", "9", "--out", name], p);
        assert!(out.status.success());
    }
    assert_eq!(fs::read(p.join("a.wmcig")).unwrap(), fs::read(p.join("b.wmcig")).unwrap());
    let out = sicut(&["generate", "biig", "--n", "8", "--k", "2", "--seed", "9", "--out", "c.biig"], p);
    assert!(out.status.success());
    assert!(sicut(&["verify", "a.wmcig"], p).status.success());
    assert!(sicut(&["verify", "c.biig", "--setting", "BLDAE-S3"], p).status.success());
}

#[test]
fn bench_writes_every_manifest_row() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    write_examples(p);
    fs::write(p.join("runs.txt"), "# examples\nex2.wmcig,ILDAE-S2\nex1.biig, B-S1\nex2.wmcig,I-S3\n").unwrap();
    let out = sicut(&["bench", "runs.txt", "--threads", "2", "--out", "bench.csv"], p);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(p.join("bench.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), COLUMNS.join(","));
    let recs = read_records(text.as_bytes()).unwrap();
    let got: Vec<(&str, &str)> = recs.iter().map(|r| (r.instance.as_str(), r.setting.as_str())).collect();
    assert_eq!(got, [("ex2", "ILDAE-S2"), ("ex1", "B-S1"), ("ex2", "I-S3")]);
    assert!((recs[1].ub - 0.98).abs() < 1e-9);

    fs::write(p.join("bad.txt"), "ex2.wmcig,ZZ-S1\n").unwrap();
    assert_eq!(sicut(&["bench", "bad.txt"], p).status.code(), Some(1));
}

#[test]
fn export_writes_both_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    write_examples(p);
    assert!(sicut(&["export-miblp", "ex2.wmcig", "--out", "ex2"], p).status.success());
    let lp = fs::read_to_string(p.join("ex2.lp")).unwrap();
    let aux = fs::read_to_string(p.join("ex2.aux")).unwrap();
    assert!(lp.starts_with("OBJ") || lp.contains("max:"));
    assert!(aux.starts_with("@NUMVARS"));
}
