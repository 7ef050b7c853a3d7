use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qclust(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qclust"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

const SMALL: &str = r#"
mode = "ideal"

[schedule]
steps = 5
dt = 0.05252
h = 6.5
epsilon = 1e-6

[sweep]
axis = "dt"
values = [0.04, 0.05252, 0.06]
"#;

fn small_config(dir: &Path) -> std::path::PathBuf {
    let p = dir.join("small.toml");
    fs::write(&p, SMALL).unwrap();
    p
}

#[test]
fn oracle_is_deterministic_and_stamped() {
    let dir = tempfile::tempdir().unwrap();
    ok(&qclust(&["oracle", "--out", "a"], dir.path()));
    ok(&qclust(&["oracle", "--out", "b"], dir.path()));
    for name in ["oracle.json", "weights.csv"] {
        let a = fs::read(dir.path().join("a").join(name)).unwrap();
        let b = fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
        let text = String::from_utf8(a).unwrap();
        assert!(text.contains("config_hash") && text.contains("version"));
    }
    let csv = fs::read_to_string(dir.path().join("a/weights.csv")).unwrap();
    // Two comment lines, the header and one row per assignment.
    assert_eq!(csv.lines().count(), 2 + 1 + 243);
}

#[test]
fn sweep_rows_follow_grid_order_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let cfg = cfg.to_str().unwrap();
    ok(&qclust(&["sweep", "--config", cfg, "--out", "s", "--workers", "3"], dir.path()));
    let first = fs::read_to_string(dir.path().join("s/sweep.csv")).unwrap();
    let values: Vec<&str> = first
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(values, ["4.0000000000000001e-2", "5.2519999999999997e-2", "5.9999999999999998e-2"]);
    assert!(first.lines().nth(2).unwrap().starts_with("dt,fidelity,second_probability,norm_drift,wall_time_s"));

    // A stale checkpoint is recomputed; valid ones are reused.
    let ck = dir.path().join("s/checkpoints/point-0001.json");
    let stale = fs::read_to_string(&ck).unwrap().replace("config_hash\": \"", "config_hash\": \"x");
    fs::write(&ck, stale).unwrap();
    ok(&qclust(&["sweep", "--config", cfg, "--out", "s", "--workers", "1"], dir.path()));
    assert_eq!(fs::read_to_string(dir.path().join("s/sweep.csv")).unwrap(), first);
}

#[test]
fn compile_and_verify_small_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let cfg = cfg.to_str().unwrap();
    ok(&qclust(&["compile", "--config", cfg, "--out", "c"], dir.path()));
    let pulses = fs::read_to_string(dir.path().join("c/pulses.txt")).unwrap();
    assert!(pulses.starts_with("# config_hash = "));
    assert_eq!(pulses.lines().filter(|l| l.starts_with("STEP")).count(), 6);

    ok(&qclust(&["ir-verify", "--config", cfg, "--out", "v", "--max-steps", "2"], dir.path()));
    let csv = fs::read_to_string(dir.path().join("v/ir_verify.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(3).collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        let d: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!(d < 1e-10);
    }
}

#[test]
fn simulate_respects_step_cap() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    ok(&qclust(
        &["simulate", "--config", cfg.to_str().unwrap(), "--out", "p", "--max-steps", "1"],
        dir.path(),
    ));
    let report = fs::read_to_string(dir.path().join("p/pulse.json")).unwrap();
    assert!(report.contains("\"steps_run\": 1"));
    assert!(report.contains("\"truncated\": true"));
    assert!(report.contains("\"wall_time_s\": 0.0"));
}

#[test]
fn errors_are_named_and_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "mode = \"ideal\"\n[schedule]\nsteps = 4\ndt = -1.0\nh = 1.0\nepsilon = 0.0\n").unwrap();
    let out = qclust(&["ideal", "--config", bad.to_str().unwrap()], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("schedule.dt"));

    let missing = dir.path().join("missing.toml");
    fs::write(&missing, "mode = \"oracle\"\n[instance]\npath = \"points.txt\"\n").unwrap();
    let out = qclust(&["oracle", "--config", missing.to_str().unwrap()], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("points.txt"));

    let out = qclust(&["sweep"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("sweep"));
}

#[test]
fn instance_path_is_relative_to_config() {
    let dir = tempfile::tempdir().unwrap();
    let sub = dir.path().join("cfg");
    fs::create_dir(&sub).unwrap();
    let text = qutrit_core::clustering::ClusteringInstance::example().to_text();
    fs::write(sub.join("points.txt"), text).unwrap();
    fs::write(sub.join("run.toml"), "mode = \"oracle\"\n[instance]\npath = \"points.txt\"\n").unwrap();
    ok(&qclust(&["oracle", "--config", "cfg/run.toml", "--out", "o"], dir.path()));
    let json = fs::read_to_string(dir.path().join("o/oracle.json")).unwrap();
    assert!(json.contains("\"preferred\""));
}
