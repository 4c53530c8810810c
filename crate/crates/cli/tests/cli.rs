use std::path::PathBuf;
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn fellap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fellap")).args(args).output().unwrap()
}

fn with_config(name: &str, args: &[&str]) -> Output {
    let path = config(name);
    let mut all = vec!["--config", path.to_str().unwrap()];
    all.extend_from_slice(args);
    fellap(&all)
}

fn rows(out: &Output) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    r.records().map(|x| x.unwrap()).collect()
}

fn column(out: &Output, name: &str) -> Vec<String> {
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    let idx = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|x| x.unwrap()[idx].to_string()).collect()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn valid_semidirect_config_passes() {
    let out = with_config("z3.json", &["validate", "semidirect"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(column(&out, "status").iter().all(|s| s == "pass"));
}

#[test]
fn corrupted_cocycle_names_condition_5() {
    let out = with_config("z3.json", &["validate", "corrupted"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("condition (5)"));
    let failing: Vec<_> = rows(&out).into_iter().filter(|r| &r[5] == "fail").map(|r| r[1].to_string()).collect();
    assert_eq!(failing, vec!["condition (5)"]);
    // the same phase over Z_2 is a cocycle
    assert_eq!(with_config("z3.json", &["validate", "twisted-z2"]).status.code(), Some(0));
}

#[test]
fn missing_refs_and_configs_exit_2() {
    assert_eq!(with_config("z3.json", &["validate", "nowhere"]).status.code(), Some(2));
    assert_eq!(fellap(&["validate", "semidirect"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"bundles": {"b": {"semidirect": "ghost"}}}"#).unwrap();
    let out = fellap(&["--config", bad.to_str().unwrap(), "validate", "b"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("ghost"));
}

#[test]
fn globalize_trivial_z3_gives_three_points_with_shift() {
    let dir = tempfile::tempdir().unwrap();
    let emitted = dir.path().join("global.json");
    let out = with_config("z3.json", &["globalize", "trivial", "--emit-config", emitted.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stderr(&out).contains("envelope blocks: [1, 1, 1]"));
    let mut shift: Vec<(String, String, String)> =
        rows(&out).iter().map(|r| (r[0].to_string(), r[1].to_string(), r[2].to_string())).collect();
    shift.sort();
    for (t, j, k) in &shift {
        let (t, j, k): (usize, usize, usize) = (t.parse().unwrap(), j.parse().unwrap(), k.parse().unwrap());
        assert_eq!(k, (j + t) % 3);
    }
    assert_eq!(shift.len(), 9);
    // the emitted config holds a valid global action
    let out = fellap(&["--config", emitted.to_str().unwrap(), "validate", "trivial-envelope"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn globalize_rejects_bad_and_infinite_inputs() {
    assert_eq!(with_config("z3.json", &["globalize", "broken"]).status.code(), Some(1));
    assert_eq!(with_config("f2.json", &["globalize", "random"]).status.code(), Some(3));
}

#[test]
fn uniform_witness_on_s3_has_zero_defects() {
    let out = with_config("s3.json", &["ap-check", "--bundle", "semidirect", "--witness", "builtin:uniform"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let defects = column(&out, "defect");
    assert!(!defects.is_empty());
    assert!(defects.iter().all(|d| d.parse::<f64>().unwrap() < 1e-12));
}

#[test]
fn folner_family_defects_follow_the_box_size() {
    let out = with_config(
        "z.json",
        &["ap-check", "--bundle", "line", "--witness", "builtin:folner:6", "--targets", "2", "--tol", "0.5"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    for r in rows(&out) {
        let n: f64 = r[0].parse().unwrap();
        let d: f64 = r[4].parse().unwrap();
        assert!((d - (2.0 / n).min(1.0)).abs() < 1e-12, "N={n}: {d}");
    }
}

#[test]
fn cuntz_ap_generator_defect_is_one_over_i() {
    let out = fellap(&["cuntz-ap", "--n", "2", "--imax", "8", "--targets", "a"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = rows(&out);
    assert_eq!(r.len(), 8);
    for row in r {
        let i: f64 = row[0].parse().unwrap();
        assert!((row[2].parse::<f64>().unwrap() - 1.0 / i).abs() < 1e-12);
    }
}

#[test]
fn kernels_on_z_report_square_window_dimension() {
    let out = with_config("z.json", &["kernels", "--bundle", "matrix-line", "--window", "2", "--samples", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    for r in rows(&out) {
        let f: usize = r[1].parse().unwrap();
        assert_eq!(r[2].parse::<usize>().unwrap(), f * f * 4);
    }
}

#[test]
fn groupoid_table_size() {
    let out = fellap(&["groupoid", "--n", "2", "--depth", "2", "--radius", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(rows(&out).len(), 20);
}

#[test]
fn provenance_columns_follow_the_documented_ones() {
    let out = with_config("z3.json", &["validate", "semidirect", "--seed", "4"]);
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    let h: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(&h[6..], ["refs", "params", "seed", "config_sha256"]);
    let first = r.records().next().unwrap().unwrap();
    assert_eq!(&first[8], "4");
    assert_eq!(first[9].len(), 64);
}
