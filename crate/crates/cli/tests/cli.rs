use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn ccurv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccurv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn field_cmd(sub: &[&str], field: &str, rest: &[&str]) -> Output {
    let f = fixture(field);
    let mut args: Vec<&str> = sub.to_vec();
    args.push("--field");
    args.push(f.to_str().unwrap());
    args.extend_from_slice(rest);
    ccurv(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value_of(o: &Output, key: &str) -> String {
    stdout(o)
        .lines()
        .find_map(|l| {
            let mut it = l.split_whitespace();
            (it.next() == Some(key)).then(|| it.next().unwrap_or("").to_string())
        })
        .unwrap_or_else(|| panic!("no {key} in {}", stdout(o)))
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is json")
}

#[test]
fn conjugate_distance_of_k4() {
    let o = field_cmd(&["conjugate"], "k4.cfg", &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(value_of(&o, "ell0").starts_with("1.570796"));
}

#[test]
fn boundary_curvature_of_the_unit_sphere() {
    let o = field_cmd(&["boundary"], "sphere.cfg", &[]);
    assert_eq!(o.status.code(), Some(0));
    // the conjugate locus is the circle of geodesic radius π
    assert_eq!(value_of(&o, "k"), "0.318309886");
    let j = json(&field_cmd(
        &["boundary"],
        "sphere.cfg",
        &["--format", "json"],
    ));
    assert!((j["k"].as_f64().unwrap() - std::f64::consts::FRAC_1_PI).abs() < 1e-6);
}

#[test]
fn eval_on_the_sphere() {
    let h = std::f64::consts::FRAC_PI_2.to_string();
    let o = field_cmd(
        &["eval"],
        "sphere.cfg",
        &["--r0", &h, "--theta", &h, "--phi", &h],
    );
    assert_eq!(o.status.code(), Some(0));
    let c: f64 = value_of(&o, "C").parse().unwrap();
    assert!((c - 0.189431).abs() < 1e-6);

    let o = field_cmd(
        &["eval"],
        "sphere.cfg",
        &["--r0", "1", "--theta", "0", "--phi", "0"],
    );
    assert_eq!(value_of(&o, "ratio"), "degenerate");
    assert_eq!(value_of(&o, "flags"), "degenerate");
    let c: f64 = value_of(&o, "C").parse().unwrap();
    assert!(c.abs() < 1e-12);
}

#[test]
fn eval_oracle_on_the_bump() {
    let o = field_cmd(
        &["eval"],
        "bump.cfg",
        &[
            "--r0", "1.2", "--theta", "1", "--phi", "2", "--oracle", "--format", "json",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let j = json(&o);
    assert!(j["oracle"]["rel_gap"].as_f64().unwrap() <= 1e-4, "{j}");
    // JSON keeps full precision
    let text = stdout(&o);
    assert!(text.contains(&j["value"].as_f64().unwrap().to_string()));
}

#[test]
fn sphere_scan_writes_reports_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.json");
    let o = field_cmd(
        &["scan"],
        "sphere.cfg",
        &[
            "--nr",
            "16",
            "--nth",
            "16",
            "--nph",
            "16",
            "--sigma",
            "3.21e-9",
            "--format",
            "json",
            "--out",
            out.to_str().unwrap(),
        ],
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(report["violations"].as_array().unwrap().is_empty());
    assert_eq!(report["regime"], "proven regime");
    let csv = std::fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "r0,theta,phi,C,A2,ratio,method,flags"
    );
    assert_eq!(lines.count(), 16 * 16 * 16);
    let m: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("scan.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(m["grid"]["nr"], 16);
}

#[test]
fn scans_do_not_depend_on_thread_count() {
    let args = ["--nr", "8", "--nth", "8", "--nph", "8", "--format", "csv"];
    let f = fixture("bump.cfg");
    let mut all = vec!["scan", "--field", f.to_str().unwrap()];
    all.extend_from_slice(&args);
    let a = ccurv(&all);
    let b = Command::new(env!("CARGO_BIN_EXE_ccurv"))
        .args(&all)
        .env("CCURV_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn manifests_differ_only_in_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let read = |name: &str| -> Value {
        let out = dir.path().join(name);
        let o = field_cmd(&["conjugate"], "k4.cfg", &["--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let m = dir.path().join(name.replace(".txt", ".manifest.json"));
        let mut v: Value = serde_json::from_str(&std::fs::read_to_string(m).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("wall_time_s");
        // the output path is part of the command line
        v.as_object_mut().unwrap().remove("command");
        v.as_object_mut().unwrap().remove("config_hash");
        v
    };
    let a = read("a.txt");
    let b = read("b.txt");
    assert_eq!(a, b);
    let again = read("a.txt");
    assert_eq!(a, again);
}

#[test]
fn constants_table_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.json");
    let o = ccurv(&[
        "constants",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let t: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let g = |k: &str| t[k].as_f64().unwrap_or_else(|| panic!("missing {k}"));
    assert_eq!(
        g("chosen.eta"),
        g("chosen.eta1").min(g("chosen.eta2")).min(g("chosen.eta3"))
    );
    assert!((1438.0..=1441.0).contains(&g("pinching")));
}

#[test]
fn constants_are_stable_under_a_finer_grid() {
    let parse = |o: Output| -> Value { json(&o) };
    let coarse = parse(ccurv(&["constants", "--format", "json"]));
    let fine = parse(ccurv(&[
        "constants",
        "--grid",
        "4000000",
        "--format",
        "json",
    ]));
    for i in 1..=17 {
        let k = format!("c.{i}");
        let (a, b) = (coarse[&k].as_f64().unwrap(), fine[&k].as_f64().unwrap());
        assert!((a - b).abs() < 1e-8, "{k}: {a} vs {b}");
    }
}

#[test]
fn check_paper_exit_code_follows_the_checks() {
    let o = ccurv(&["constants", "--check-paper", "--format", "json"]);
    let j = json(&o);
    let checks = j["paper_checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    let all_pass = checks.iter().all(|c| c["pass"].as_bool().unwrap());
    assert_eq!(o.status.code(), Some(if all_pass { 0 } else { 4 }));
}

#[test]
fn verify_campaigns_pass_on_the_sphere() {
    for sub in [
        vec!["verify", "lemma"],
        vec!["verify", "corollary"],
        vec!["verify", "sturm"],
    ] {
        let o = field_cmd(&sub, "sphere.cfg", &[]);
        assert_eq!(o.status.code(), Some(0), "{sub:?}: {}", stdout(&o));
    }
    for sub in [["verify", "hfuncs"], ["verify", "mu1"]] {
        let o = ccurv(&sub);
        assert_eq!(o.status.code(), Some(0), "{sub:?}: {}", stdout(&o));
    }
}

#[test]
fn verify_output_as_csv() {
    let o = ccurv(&["verify", "hfuncs", "--format", "csv"]);
    let text = stdout(&o);
    assert!(text.starts_with("id,lhs,rhs,margin,slack,count,failures,status\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn violations_exit_with_four() {
    // the sphere's ratio 𝒞/𝒜₂ stays near 0.022, far below one
    let o = field_cmd(
        &["scan"],
        "sphere.cfg",
        &["--nr", "8", "--nth", "8", "--nph", "8", "--sigma", "1"],
    );
    assert_eq!(o.status.code(), Some(4), "{}", stdout(&o));
    assert_ne!(value_of(&o, "violations"), "0");
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(
        field_cmd(&["conjugate"], "broken.cfg", &[]).status.code(),
        Some(2)
    );
    assert_eq!(
        field_cmd(&["conjugate"], "missing.cfg", &[]).status.code(),
        Some(2)
    );
    assert_eq!(
        field_cmd(&["verify", "lemma"], "large.cfg", &[])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        field_cmd(&["eval"], "sphere.cfg", &["--r0", "3.14159"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(ccurv(&["scan"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_ccurv"))
        .args(["verify", "hfuncs"])
        .env("CCURV_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
