use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn analogmp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_analogmp"))
        .args(args)
        .output()
        .expect("spawn analogmp")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL: &str = "\
suites = bundle, monad, group-action
planners = rp_tc, circle_tc
dims = 1, 2
samples = 300
pairs_per_rung = 100
ladder = 1e-2, 1e-3, 1e-4
monad_max_points = 3
monad_max_denominator = 3
action_denominator = 2
";

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn list_shows_planners_and_suites() {
    let o = analogmp(&["list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for name in [
        "rp_tc",
        "sphere_acat",
        "rp_tc2_equivariant",
        "rp_tc_naive",
        "group-action",
    ] {
        assert!(text.contains(name), "{name} missing from list output");
    }
}

#[test]
fn passing_run_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.cfg", SMALL);
    let out = dir.path().join("out");
    let o = analogmp(&["run", &cfg, "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    // rp_tc on RP^1, RP^2 and one circle planner, three suites each, plus two law suites
    assert_eq!(report["reports"].as_array().unwrap().len(), 3 * 3 + 2);
    assert_eq!(report["reports"][0]["seed"], 42);
    assert!(report["reports"][0]["wall_time_ms"].is_null());
    let csv = fs::read_to_string(out.join("samples.csv")).unwrap();
    assert!(csv.starts_with("planner,space,sample,atom,weight,t,coordinates"));
    assert!(csv.lines().count() > 10);
}

#[test]
fn reruns_are_byte_identical_and_seed_matters() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.cfg", SMALL);
    let read = |sub: &str, extra: &[&str]| {
        let out = dir.path().join(sub);
        let mut args = vec!["run", cfg.as_str(), "--output", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        assert_eq!(analogmp(&args).status.code(), Some(0));
        fs::read(out.join("report.json")).unwrap()
    };
    let a = read("a", &[]);
    let b = read("b", &[]);
    assert_eq!(a, b);
    let c = read("c", &["--seed", "7"]);
    assert_ne!(a, c);
}

#[test]
fn fault_injected_planner_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "fault.cfg",
        "suites = support, section\nplanners = rp_tc, rp_tc_bound1\nsamples = 200\n",
    );
    let out = dir.path().join("out");
    let o = analogmp(&["run", &cfg, "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("failing: support rp_tc_bound1"), "{text}");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let failing = &report["reports"][1];
    assert_eq!(failing["pass"], false);
    let exemplars = failing["exemplars"].as_array().unwrap();
    assert!(!exemplars.is_empty() && exemplars.len() <= 5);
}

#[test]
fn malformed_config_exits_two_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.cfg", "suites = monad\nsamples = lots\n");
    let o = analogmp(&["run", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let cfg = write_config(
        dir.path(),
        "unknown.cfg",
        "suites = monad\nplanners = nope\n",
    );
    assert_eq!(analogmp(&["run", &cfg]).status.code(), Some(2));
    assert_eq!(
        analogmp(&["run", "/nonexistent/config.cfg"]).status.code(),
        Some(2)
    );
    assert_eq!(
        analogmp(&["run", &cfg, "--set", "seed"]).status.code(),
        Some(2)
    );
}

#[test]
fn flags_override_file_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "o.cfg",
        "suites = support\nplanners = rp_tc\nsamples = 100\nseed = 1\n",
    );
    let out = dir.path().join("out");
    let o = analogmp(&[
        "run",
        &cfg,
        "--output",
        out.to_str().unwrap(),
        "--samples",
        "50",
        "--set",
        "dims=3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["samples"], 50);
    assert_eq!(report["reports"][0]["space"], "RP^3");
    assert_eq!(report["reports"][0]["checks"][0]["cases"], 50);
}

#[test]
fn audit_subcommand_exit_codes() {
    let ok = analogmp(&[
        "audit",
        "rp_tc",
        "--suite",
        "support",
        "--samples",
        "500",
        "--seed",
        "3",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("support rp_tc on RP^2: PASS"));

    let naive = analogmp(&[
        "audit",
        "rp_tc_naive",
        "--suite",
        "continuity",
        "--samples",
        "100",
    ]);
    assert_eq!(naive.status.code(), Some(1));

    assert_eq!(analogmp(&["audit", "nope"]).status.code(), Some(2));
    assert_eq!(
        analogmp(&["audit", "rp_tc", "--suite", "nope"])
            .status
            .code(),
        Some(2)
    );
}
