use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn wstar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wstar")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn metric_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".metric").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn catalog_lists_five_metrics() {
    let o = wstar(&["catalog", "list"]);
    assert_eq!(code(&o), 0);
    let names: Vec<String> = stdout(&o).lines().map(|l| l.split_whitespace().next().unwrap().to_string()).collect();
    assert_eq!(names, ["minkowski", "schwarzschild", "desitter_flat", "flrw_dust", "perturbed_flat"]);
}

#[test]
fn vacuum_checks_pass_with_exit_zero() {
    let o = wstar(&[
        "check",
        "--metric",
        "schwarzschild",
        "--checks",
        "ricci_flat,wstar_divergence_free,codazzi",
        "--points",
        "8",
        "--no-timestamp",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&o);
    assert_eq!(r["checks"].as_array().unwrap().len(), 3);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
    assert!(r.get("timestamp").is_none());
}

#[test]
fn failing_check_exits_one() {
    let o = wstar(&["check", "--metric", "flrw_dust", "--checks", "einstein", "--points", "4"]);
    assert_eq!(code(&o), 1);
    let r = json(&o);
    let c = &r["checks"][0];
    assert_eq!(c["status"], "fail");
    assert!(c["max_residual"].as_f64().unwrap() > 1e-3);
    assert!(r["timestamp"].as_u64().is_some());
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["check", "--metric", "no_such_metric"][..],
        &["check", "--metric", "minkowski", "--checks", "bogus"],
        &["check", "--metric", "minkowski", "--points", "0"],
        &["check", "--metric", "minkowski", "--rtol", "-1"],
        &["check", "--metric", "minkowski", "--k", "0"],
        &["check", "--metric", "minkowski", "--format", "xml"],
        &["compute", "--metric", "minkowski", "--tensor", "torsion"],
        &["compute", "--metric", "minkowski", "--tensor", "ricci", "--at", "w=1"],
        &["frobnicate"],
    ] {
        let o = wstar(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn metric_file_errors_name_the_line() {
    let f = metric_file("coords = t, x\ng[0][0] = -1\ng[1][1] = 1 +\n");
    let o = wstar(&["check", "--metric", f.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let f = metric_file("coords = t, x\ng[0][0] = -1\ng[1][1] = 1\ng[0][1] = x\ng[1][0] = t\n");
    let o = wstar(&["check", "--metric", f.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 5"), "{}", stderr(&o));
}

#[test]
fn metric_file_runs_like_the_catalog_entry() {
    let f = metric_file(
        "dim = 4\ncoords = t, r, theta, phi\nparam M = 1.0\n\
         domain t = 0 .. 10\ndomain r = 3.0 .. 20.0\ndomain theta = 0.3 .. 2.8\ndomain phi = 0 .. 6.28\n\
         g[0][0] = -(1 - 2*M/r)\ng[1][1] = 1/(1 - 2*M/r)\ng[2][2] = r^2\ng[3][3] = r^2 * sin(theta)^2\n",
    );
    let path = f.path().to_str().unwrap();
    let args = |m: &str| {
        wstar(&["check", "--metric", m, "--checks", "ricci_flat,wstar_flat,einstein", "--points", "6", "--no-timestamp"])
    };
    let (file, cat) = (json(&args(path)), json(&args("schwarzschild")));
    assert_eq!(file["dimension"], 4);
    for k in 0..3 {
        assert_eq!(file["checks"][k]["status"], cat["checks"][k]["status"]);
        let (a, b) = (file["checks"][k]["max_residual"].as_f64().unwrap(), cat["checks"][k]["max_residual"].as_f64().unwrap());
        assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "{a} vs {b}");
    }
}

#[test]
fn compute_prints_components() {
    let o = wstar(&["compute", "--metric", "minkowski", "--tensor", "riemann", "--at", "t=1,x=2,y=3,z=4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "R_ijkl: all components zero");

    let o = wstar(&["compute", "--metric", "desitter_flat", "--tensor", "scalar", "--at", "t=0.5"]);
    let r: f64 = stdout(&o).trim().strip_prefix("R: ").unwrap().parse().unwrap();
    assert!((r - 12.0).abs() < 1e-8);

    let o = wstar(&["compute", "--metric", "schwarzschild", "--tensor", "wstar_contraction", "--at", "r=4"]);
    assert_eq!(code(&o), 0);
    for line in stdout(&o).lines().skip(1) {
        let v: f64 = line.rsplit(": ").next().unwrap().parse().unwrap();
        assert!(v.abs() <= 1e-9, "{line}");
    }

    let o = wstar(&["compute", "--metric", "flrw_dust", "--tensor", "krupka", "--at", "t=1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("C_lm: all components zero"), "{}", stdout(&o));
}

#[test]
fn evaluation_errors_exit_three() {
    let o = wstar(&["compute", "--metric", "schwarzschild", "--tensor", "ricci", "--at", "r=2"]);
    assert_eq!(code(&o), 3, "{}", stdout(&o));
    let f = metric_file("coords = t, x, y, z\ndomain x = -2 .. -1\ng[0][0] = -1\ng[1][1] = ln(x)\ng[2][2] = 1\ng[3][3] = 1\n");
    let o = wstar(&["check", "--metric", f.path().to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("no admissible point"), "{}", stderr(&o));
}

#[test]
fn reports_are_reproducible_and_match_the_schema() {
    let schema: Value =
        serde_json::from_str(include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/report.schema.json"))).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    for metric in ["minkowski", "schwarzschild", "desitter_flat", "flrw_dust", "perturbed_flat"] {
        let args = ["check", "--metric", metric, "--points", "3", "--seed", "7", "--xi", "1,0,0,0", "--no-timestamp"];
        let a = wstar(&args);
        let b = wstar(&args);
        assert_eq!(a.stdout, b.stdout, "{metric}");
        let report = json(&a);
        let errors: Vec<String> = validator.iter_errors(&report).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{metric}: {errors:?}");
        for c in report["checks"].as_array().unwrap() {
            let (r, t) = (c["max_residual"].as_f64().unwrap(), c["tolerance"].as_f64().unwrap());
            match c["status"].as_str().unwrap() {
                "pass" => assert!(r <= t, "{c}"),
                "fail" if c["worst_point"].as_array().unwrap().is_empty() => {}
                "fail" => assert!(r > t || r.is_nan(), "{c}"),
                _ => assert!(c["reason"].is_string()),
            }
        }
        let timed = json(&wstar(&args[..args.len() - 1]));
        assert!(validator.is_valid(&timed));
        assert!(timed["timestamp"].is_u64());
    }
}

#[test]
fn classify_reports_flags_and_pairings() {
    let o = wstar(&["classify", "--metric", "desitter_flat", "--points", "4", "--no-timestamp"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&o);
    let c = &r["classification"];
    assert_eq!(c["einstein"]["holds"], true);
    assert_eq!(c["wstar_flat"]["holds"], true);
    assert!(c["pairings"].as_array().unwrap().iter().all(|p| p["holds"] == true));

    let o = wstar(&["classify", "--metric", "schwarzschild", "--points", "4", "--format", "table"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("ricci_recurrent            n/a"));
}
