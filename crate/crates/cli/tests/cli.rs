use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_barcode-lab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect()
}

fn header(path: &Path) -> Vec<String> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.headers().unwrap().iter().map(String::from).collect()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

const UNIT_SUFFIXES: &[&str] = &[
    "_units",
    "_iterations",
    "_winding",
    "_index",
    "_dimensionless",
    "_count",
    "_bars",
    "_bool",
    "_per_iteration",
    "_crossings",
    "_per_axis",
    "_seconds",
    "_json",
];
const LABEL_COLUMNS: &[&str] = &["kind", "type", "schedule", "directory", "subcommand", "degree", "seed"];

fn assert_unit_headers(dir: &Path) {
    for e in fs::read_dir(dir).unwrap() {
        let path = e.unwrap().path();
        if path.extension().is_some_and(|x| x == "csv") {
            for col in header(&path) {
                assert!(
                    LABEL_COLUMNS.contains(&col.as_str()) || UNIT_SUFFIXES.iter().any(|s| col.ends_with(s)),
                    "{}: column {col}",
                    path.display()
                );
            }
        }
    }
}

#[test]
fn fixed_point_census_at_k2() {
    let tmp = tempfile::tempdir().unwrap();
    ok(tmp.path(), &["orbits", "--K", "2", "--k", "1", "--out", "o"]);
    let dir = tmp.path().join("o");
    let r = rows(&dir.join("orbits.csv"));
    assert_eq!(r.len(), 2);
    let kinds: Vec<&str> = r.iter().map(|x| x[5].as_str()).collect();
    assert_eq!(kinds, ["hyperbolic", "elliptic"]);
    let m = manifest(&dir);
    assert_eq!(m["subcommand"], "orbits");
    assert_eq!(m["summary"]["census"]["hyperbolic"], 1);
    assert_eq!(m["files"][0], "orbits.csv");
    assert_unit_headers(&dir);
}

#[test]
fn pseudo_rotation_report_is_all_zero() {
    let tmp = tempfile::tempdir().unwrap();
    ok(tmp.path(), &["synthetic", "--law", "pseudo_rotation", "--n", "2", "--kmax", "10"]);
    let dir = tmp.path().join("out/synthetic");
    let m = manifest(&dir);
    assert_eq!(m["summary"]["all_zero"], true);
    for row in rows(&dir.join("entropy_table.csv")) {
        assert_eq!(row[2], "3");
    }
    for row in rows(&dir.join("sequential.csv")) {
        assert_eq!(row[1], "0");
    }
    assert_unit_headers(&dir);
}

#[test]
fn crofton_ratio_at_k8() {
    let tmp = tempfile::tempdir().unwrap();
    ok(tmp.path(), &["crofton", "--K", "2", "--k", "8", "--out", "c"]);
    let dir = tmp.path().join("c");
    let r = rows(&dir.join("crofton.csv"));
    assert_eq!(r.len(), 8);
    for row in &r {
        let ratio: f64 = row[3].parse().unwrap();
        assert!(ratio <= 1.02, "{row:?}");
        assert_eq!(row[6], "true");
    }
    let v = rows(&dir.join("volb.csv"));
    assert!(v.iter().all(|row| row[9] == "true"));
    assert_unit_headers(&dir);
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 3] = [
        &["orbits", "--K", "8", "--k", "3", "--random-seeds", "50", "--seed", "9"],
        &["synthetic", "--law", "almost_periodic", "--kmax", "12", "--seed", "4"],
        &["gamma", "--K", "8", "--kmax", "3", "--budget", "5000"],
    ];
    for args in runs {
        for out in ["a", "b"] {
            let mut full = args.to_vec();
            full.extend(["--out", out]);
            ok(tmp.path(), &full);
        }
        let a = tmp.path().join("a");
        let m = manifest(&a);
        for f in m["files"].as_array().unwrap() {
            let f = f.as_str().unwrap();
            if f == "manifest.json" {
                continue;
            }
            let x = fs::read(a.join(f)).unwrap();
            let y = fs::read(tmp.path().join("b").join(f)).unwrap();
            assert_eq!(x, y, "{args:?}: {f}");
        }
    }
}

#[test]
fn flags_override_config_which_overrides_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("cfg.json"),
        r#"{"seed": 5, "out": "from_file", "orbits": {"K": 8.0, "k": 2}}"#,
    )
    .unwrap();
    ok(tmp.path(), &["--config", "cfg.json", "orbits", "--k", "1"]);
    let m = manifest(&tmp.path().join("from_file"));
    assert_eq!(m["seed"], 5);
    assert_eq!(m["parameters"]["K"], 8.0);
    assert_eq!(m["parameters"]["k"], 1);
    assert_eq!(m["parameters"]["phase_space"], "torus");
    assert_eq!(m["config_file"], "cfg.json");
    ok(tmp.path(), &["--config", "cfg.json", "--seed", "6", "--out", "flag", "orbits"]);
    let m = manifest(&tmp.path().join("flag"));
    assert_eq!(m["seed"], 6);
    assert_eq!(m["parameters"]["k"], 2);
}

#[test]
fn config_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("bad.json"), r#"{"orbits": {"kick": 2}}"#).unwrap();
    fs::write(tmp.path().join("broken.json"), "{").unwrap();
    for args in [
        &["--config", "bad.json", "orbits"][..],
        &["--config", "broken.json", "orbits"],
        &["--config", "missing.json", "orbits"],
        &["orbits", "--phase-space", "sphere"],
        &["sequential", "--schedules", "weird", "--budget", "1000"],
        &["synthetic", "--law", "nope"],
        &["entropy", "--kmin", "2", "--kmax", "3"],
        &["orbits", "--K", "x"],
    ] {
        let out = run(tmp.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn budget_refusal_exits_with_three() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), &["barcode", "--k", "3", "--n", "30", "--budget", "1000"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("largest feasible n is 10"));
    let out = run(tmp.path(), &["gamma", "--kmax", "4", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn grid_and_orbit_barcodes() {
    let tmp = tempfile::tempdir().unwrap();
    ok(tmp.path(), &["barcode", "--K", "8", "--k", "2", "--n", "128", "--out", "g"]);
    ok(tmp.path(), &["barcode", "--K", "8", "--k", "2", "--n", "128", "--source", "orbit", "--out", "o"]);
    let g = rows(&tmp.path().join("g/barcode.csv"));
    let o = rows(&tmp.path().join("o/barcode.csv"));
    assert_eq!(g.iter().filter(|r| r[0] == "infinite").count(), 2);
    assert_eq!(o.iter().filter(|r| r[0] == "infinite").count(), 2);
    let m = manifest(&tmp.path().join("o"));
    assert_eq!(m["summary"]["significant_unmatched"], 0);
    assert!(tmp.path().join("o/matches.csv").exists());
    assert_unit_headers(&tmp.path().join("o"));
}

#[test]
fn sweeps_and_report() {
    let tmp = tempfile::tempdir().unwrap();
    let budget = ["--budget", "20000"];
    ok(tmp.path(), &[&["entropy", "--K", "8", "--kmax", "3", "--out", "runs/e"][..], &budget].concat());
    ok(
        tmp.path(),
        &[&["sequential", "--K", "8", "--kmin", "1", "--kmax", "3", "--out", "runs/s"][..], &budget].concat(),
    );
    ok(tmp.path(), &[&["gamma", "--K", "8", "--kmax", "3", "--out", "runs/g"][..], &budget].concat());
    for d in ["runs/e", "runs/s", "runs/g"] {
        assert_unit_headers(&tmp.path().join(d));
    }
    let gamma = rows(&tmp.path().join("runs/g/gamma.csv"));
    assert_eq!(gamma.len(), 3);
    assert_eq!(gamma[0][2], "2");
    assert!(gamma[2][3].parse::<usize>().unwrap() > 2);

    let script = fs::read_to_string(tmp.path().join("runs/s/plot.gp")).unwrap();
    for line in script.lines().filter(|l| l.contains(".dat'")) {
        let file = line.split('\'').nth(1).unwrap();
        assert!(tmp.path().join("runs/s").join(file).exists(), "{file}");
    }

    ok(tmp.path(), &["report", "--from", "runs", "--out", "rep"]);
    let r = rows(&tmp.path().join("rep/report.csv"));
    let subs: Vec<&str> = r.iter().map(|x| x[1].as_str()).collect();
    assert_eq!(subs, ["entropy", "gamma", "sequential"]);
}
