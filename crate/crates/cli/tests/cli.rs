use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn tiersim(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tiersim"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("TIERSIM_OUT_DIR")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn help_and_version_exit_zero() {
    for flag in ["--help", "--version"] {
        let o = Command::new(env!("CARGO_BIN_EXE_tiersim")).arg(flag).output().unwrap();
        assert_eq!(o.status.code(), Some(0));
    }
    let o = Command::new(env!("CARGO_BIN_EXE_tiersim"))
        .arg("explode")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn simulate_cloud_only_is_all_cloud_and_repeatable() {
    let dir = tempdir().unwrap();
    let args = [
        "simulate",
        "--policy",
        "cloud-only",
        "--seed",
        "42",
        "--replications",
        "2",
        "--format",
        "csv",
    ];
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(tiersim(&args, &a).status.success());
    assert!(tiersim(&args, &b).status.success());
    let report = fs::read_to_string(a.join("cloud-only-report.csv")).unwrap();
    assert!(report.contains("cloud-only,cloud_share_pct,100,0"), "{report}");
    assert!(report.contains("cloud-only,sensitive_local_pct,0,0"));
    for f in ["cloud-only-report.csv", "cloud-only-trace.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn rl_policy_requires_agent() {
    let dir = tempdir().unwrap();
    let o = tiersim(&["simulate", "--policy", "rl-hipa"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--agent"));
    let missing = dir.path().join("nope.tsq");
    let o = tiersim(
        &["simulate", "--policy", "rl-hipa", "--agent", missing.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nope.tsq"));
}

#[test]
fn malformed_scenario_names_the_problem() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\n  \"name\": \"x\",\n  \"duration\": -1\n}").unwrap();
    let o = tiersim(
        &["simulate", "--policy", "static", "--scenario", path.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("bad.json") && err.contains("line"), "{err}");

    let mut spec: serde_json::Value = serde_json::from_str(tiersim::sim::SMART_CITY_JSON).unwrap();
    spec["duration"] = serde_json::json!(-1.0);
    fs::write(&path, spec.to_string()).unwrap();
    let o = tiersim(
        &["simulate", "--policy", "static", "--scenario", path.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("duration"), "{}", stderr(&o));
}

#[test]
fn train_is_deterministic_and_writes_curve() {
    let dir = tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = tiersim(&["train", "--episodes", "40", "--seed", "7"], out);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(
        fs::read(a.join("agent.tsq")).unwrap(),
        fs::read(b.join("agent.tsq")).unwrap()
    );
    let curve = fs::read_to_string(a.join("learning-curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 41);
    assert_eq!(curve.lines().next(), Some("episode,mean_reward"));

    let o = tiersim(&["train", "--episodes", "0"], dir.path());
    assert_eq!(o.status.code(), Some(1));

    let agent = a.join("agent.tsq");
    let o = tiersim(
        &[
            "simulate",
            "--policy",
            "rl-hipa",
            "--agent",
            agent.to_str().unwrap(),
            "--replications",
            "1",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn compare_against_itself_gives_zero_deltas() {
    let dir = tempdir().unwrap();
    let o = tiersim(
        &[
            "compare",
            "--policies",
            "cloud-only,cloud-only",
            "--replications",
            "2",
            "--format",
            "csv",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("comparison.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert!(cells[3..].iter().all(|c| *c == "0"), "{line}");
    }
}

#[test]
fn csv_and_markdown_carry_the_same_numbers() {
    let dir = tempdir().unwrap();
    let base = [
        "compare",
        "--policies",
        "cloud-only,static,fog-centric",
        "--replications",
        "2",
    ];
    let csv_dir = dir.path().join("csv");
    let md_dir = dir.path().join("md");
    assert!(tiersim(&[&base[..], &["--format", "csv"]].concat(), &csv_dir)
        .status
        .success());
    assert!(tiersim(&[&base[..], &["--format", "markdown"]].concat(), &md_dir)
        .status
        .success());
    let csv = fs::read_to_string(csv_dir.join("comparison.csv")).unwrap();
    let md = fs::read_to_string(md_dir.join("comparison.md")).unwrap();
    for line in csv.lines().skip(1) {
        for cell in line.split(',').skip(1).filter(|c| !c.is_empty()) {
            assert!(md.contains(&format!(" {cell} |")), "markdown lacks {cell}");
        }
    }
    assert!(md.contains("| Metric | cloud-only | static | fog-centric |"));
}

#[test]
fn sweep_cells_follow_the_grid() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("grid");
    let o = tiersim(
        &[
            "sweep",
            "--policy",
            "threshold-hipa",
            "--replications",
            "1",
            "--grid",
            "task_count=500,5000",
            "--grid",
            "mix.privacy_probability=0.2,0.5,0.8",
        ],
        &out,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let index = fs::read_to_string(out.join("index.csv")).unwrap();
    assert_eq!(index.lines().count(), 1 + 6);
    assert!(out.join("cell-5.md").exists());

    let single = dir.path().join("single");
    assert!(
        tiersim(&["sweep", "--policy", "static", "--replications", "1"], &single)
            .status
            .success()
    );
    assert_eq!(fs::read_to_string(single.join("index.csv")).unwrap().lines().count(), 2);

    let rejected = dir.path().join("rejected");
    let o = tiersim(&["sweep", "--policy", "static", "--grid", "task_cnt=1"], &rejected);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("task_cnt"));
    assert!(!rejected.join("index.csv").exists());
}

#[test]
fn output_dir_from_environment() {
    let dir = tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_tiersim"))
        .args(["simulate", "--policy", "static", "--replications", "1"])
        .env("TIERSIM_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("static-report.md").exists());
}
