use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qtwick_cli::run_with;

fn qtwick(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtwick"))
        .args(args)
        .env_remove("QTWICK_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = qtwick(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// In-process run; returns (code, stdout, stderr).
fn run(args: &[&str]) -> (i32, String, String) {
    let argv = std::iter::once("qtwick").chain(args.iter().copied()).map(String::from).collect();
    let (mut o, mut e) = (Vec::new(), Vec::new());
    let code = run_with(argv, &mut o, &mut e);
    (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
}

fn check(path: &Path) {
    let out = qtwick(&["--check", path.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "check of {} failed: {}",
        path.display(),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn pairings_text() {
    let text = stdout(&["pairings", "--n", "2", "--format", "text"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().all(|l| l.contains(" cross=") && l.contains(",nest=")));
    assert!(lines.contains(&"{(1,3),(2,4)} cross=1,nest=0"));
    assert!(lines.contains(&"{(1,4),(2,3)} cross=0,nest=1"));
}

#[test]
fn wick_renders_polynomial() {
    assert_eq!(stdout(&["wick", "--eps", "11**"]), "q + t\n");
    assert_eq!(stdout(&["wick", "--field", "2"]), "1 + q + t\n");
    let evald = stdout(&["wick", "--field", "3", "--eval", "0,1"]);
    assert_eq!(evald.lines().nth(1), Some("5.0000000000000000e0"));
}

#[test]
fn clt_example_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let args = [
        "clt", "--mode", "moment", "--eps", "11**", "--q", "0.5", "--t", "1.25", "--ns",
        "25,50,100,200", "--seed", "42", "--out",
    ];
    let mut full: Vec<&str> = args.to_vec();
    full.push(path.to_str().unwrap());
    assert_eq!(stdout(&full), "");
    let csv = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "N,eps,q,t,seed,mode,value,target,abs_err");
    assert_eq!(lines.len(), 5);
    for (line, n) in lines[1..].iter().zip([25, 50, 100, 200]) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[0], n.to_string());
        assert_eq!(&f[1..6], &["11**", "5.0000000000000000e-1", "1.2500000000000000e0", "42", "moment"]);
        let value: f64 = f[6].parse().unwrap();
        let target: f64 = f[7].parse().unwrap();
        let err: f64 = f[8].parse().unwrap();
        assert_eq!(target, 1.75);
        assert_eq!(err, (value - target).abs());
    }
    check(&path);
}

#[test]
fn every_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base.csv");
    let base_s = base.to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["pairings", "--n", "3", "--format", "csv"],
        vec!["pairings", "--tuple", "1,2,2,1", "--format", "csv"],
        vec!["pairings", "--tuple", "1,1,1,2", "--format", "csv"],
        vec!["wick", "--eps", "1*1*1*", "--format", "csv"],
        vec!["wick", "--field", "3", "--eval", "-0.5,2", "--format", "csv"],
        vec!["wick", "--eps", "11**", "--labels", "1,2,2,1", "--cov", "1*=1/2", "--format", "csv"],
        vec!["fock", "moment", "--ops", "a1,c1", "--q", "0.3", "--t", "1.1"],
        vec!["fock", "residual", "--d", "2", "--m", "3", "--q", "-0.4", "--t", "0.7"],
        vec!["fock", "gram", "--d", "2", "--n", "3", "--q", "0.2", "--t", "0.9"],
        vec!["coeffs", "sample", "--n", "6", "--q", "0.3", "--t", "0.8", "--seed", "9"],
        vec!["coeffs", "normal-order", "--tuple", "1,2,1,2", "--eps", "1*1*", "--base", base_s, "--t", "0.8"],
        vec!["jw", "moment", "--ops", "2,1,2*,1*", "--q", "0.3", "--t", "0.8", "--seed", "2"],
        vec!["jw", "check", "--n", "3", "--format", "csv", "--q", "0.3", "--t", "0.8"],
        vec!["jw", "state", "--ops", "1*,3*", "--q", "0.3", "--t", "0.8"],
        vec!["clt", "--mode", "lambda", "--eps", "11**", "--pairing", "{(1,4),(2,3)}", "--q", "0.3", "--t", "0.8", "--ns", "6,9"],
    ];
    for (k, args) in cases.iter().enumerate() {
        let path = if args[1] == "sample" { base.clone() } else { dir.path().join(format!("{k}.csv")) };
        let mut full = args.clone();
        full.extend(["--out", path.to_str().unwrap()]);
        stdout(&full);
        check(&path);
    }
}

#[test]
fn check_rejects_edits() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pairs.csv");
    let csv = stdout(&["pairings", "--n", "2", "--format", "csv"]);
    fs::write(&path, csv.replace(",1,0", ",1.0,0")).unwrap();
    let out = qtwick(&["--check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    fs::write(&path, "mystery,header\n1,2\n").unwrap();
    assert_eq!(qtwick(&["--check", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn seed_determines_outputs() {
    let runs: [&[&str]; 3] = [
        &["coeffs", "sample", "--n", "12", "--q", "-0.3", "--t", "0.9", "--seed", "77"],
        &["jw", "state", "--ops", "3,2*,3*,1*", "--q", "0.2", "--t", "1.3", "--seed", "77"],
        &["clt", "--eps", "1*1*", "--q", "0.2", "--t", "1.3", "--ns", "10,20", "--seed", "77"],
    ];
    for args in runs {
        assert_eq!(stdout(args), stdout(args));
    }
    let a = stdout(&["coeffs", "sample", "--n", "12", "--q", "0", "--t", "1", "--seed", "1"]);
    let b = stdout(&["coeffs", "sample", "--n", "12", "--q", "0", "--t", "1", "--seed", "2"]);
    assert_ne!(a, b);
}

#[test]
fn jobs_do_not_change_reports() {
    let base = ["clt", "--eps", "11**", "--q", "0.5", "--t", "1.25", "--ns", "10,20,40", "--seed", "5"];
    let serial = stdout(&base);
    let mut par = base.to_vec();
    par.extend(["--jobs", "3"]);
    assert_eq!(stdout(&par), serial);
}

#[test]
fn seed_env_is_a_default() {
    let args = ["coeffs", "sample", "--n", "5", "--q", "0.1", "--t", "1"];
    let env_run = |seed: &str, extra: &[&str]| {
        let out = Command::new(env!("CARGO_BIN_EXE_qtwick"))
            .args(args)
            .args(extra)
            .env("QTWICK_SEED", seed)
            .output()
            .unwrap();
        (out.status.code(), String::from_utf8(out.stdout).unwrap())
    };
    let mut with_flag = args.to_vec();
    with_flag.extend(["--seed", "31"]);
    assert_eq!(env_run("31", &[]).1, stdout(&with_flag));
    assert_eq!(env_run("99", &["--seed", "31"]).1, stdout(&with_flag));
    assert_eq!(env_run("0", &[]).1, stdout(&args));
    assert_eq!(env_run("nope", &[]).0, Some(2));
}

#[test]
fn config_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# manifest\nq = 0.5\nt = 1.25\neps = \"11**\"\nns = 10,20\nseed = 3\n").unwrap();
    let cfg_s = cfg.to_str().unwrap();
    let from_config = stdout(&["--config", cfg_s, "clt"]);
    let explicit = stdout(&["clt", "--q", "0.5", "--t", "1.25", "--eps", "11**", "--ns", "10,20", "--seed", "3"]);
    assert_eq!(from_config, explicit);
    let overridden = stdout(&["clt", "--config", cfg_s, "--seed", "4"]);
    let explicit4 = stdout(&["clt", "--q", "0.5", "--t", "1.25", "--eps", "11**", "--ns", "10,20", "--seed", "4"]);
    assert_eq!(overridden, explicit4);
    assert_ne!(overridden, from_config);

    fs::write(&cfg, "this line has no equals sign\n").unwrap();
    assert_eq!(qtwick(&["--config", cfg_s, "clt"]).status.code(), Some(2));
    let missing = dir.path().join("absent.conf");
    assert_eq!(qtwick(&["--config", missing.to_str().unwrap(), "clt"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["frobnicate"],
        vec!["pairings", "--n", "2", "--bogus"],
        vec![],
        vec!["pairings"],
        vec!["wick", "--eps", "11x*"],
        vec!["clt", "--eps", "11**", "--q", "0.5", "--t", "1.25", "--ns", "50,25"],
        vec!["clt", "--eps", "11**", "--q", "3", "--t", "1.25", "--ns", "25"],
        vec!["jw", "moment", "--ops", "1,x", "--q", "0", "--t", "1"],
        vec!["jw", "dump", "--n", "2", "--i", "1", "--q", "0", "--t", "1", "--format", "csv"],
    ] {
        let (code, out, err) = run(&args);
        assert_eq!(code, 2, "{args:?}");
        assert!(out.is_empty(), "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("pairings") && out.contains("clt"));
}

#[test]
fn unwritable_output_is_internal() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("no/such/dir/out.csv");
    let (code, _, err) = run(&["pairings", "--n", "1", "--out", target.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("cannot write"));
}

#[test]
fn jw_dump_is_json() {
    let text = stdout(&["jw", "dump", "--n", "3", "--i", "2", "--adjoint", "--q", "0.4", "--t", "0.9", "--seed", "1"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let slots = v["slots"].as_array().unwrap();
    assert_eq!(slots.len(), 3);
    assert_eq!(slots[1]["kind"], "flip");
    assert_eq!(slots[2]["kind"], "diag");
}

#[test]
fn jw_moment_matches_library() {
    use qtwick_core::coeffs::{sample_base, CoefficientTable};
    use qtwick_core::jw::vacuum_expectation;
    let csv = stdout(&["jw", "moment", "--ops", "1,2,1*,2*", "--q", "-0.6", "--t", "0.7", "--seed", "12"]);
    let value: f64 = csv.lines().nth(1).unwrap().rsplit(',').next().unwrap().parse().unwrap();
    let table = CoefficientTable::new(sample_base(2, -0.6, 0.7, 12).unwrap(), 0.7).unwrap();
    let direct = vacuum_expectation(&[(1, false), (2, false), (1, true), (2, true)], 2, &table).unwrap();
    assert_eq!(value, direct);
    assert!(value != 0.0);
}
