use std::fs;
use std::process::{Command, Output};

fn schrodhelm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schrodhelm")).args(args).output().unwrap()
}

#[test]
fn default_run_succeeds() {
    let out = schrodhelm(&["--m", "6", "--checkpoints", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("[config]\n"));
    assert!(stdout.contains("\n[metrics]\n"));
    assert!(stdout.contains("err_x_l2 = "));
}

#[test]
fn config_errors_exit_with_two() {
    for args in [
        &["--epsilon", "2"][..],
        &["--psi", "gauss"],
        &["--lr", "1"],
        &["--bogus"],
        &["--m", "3", "--strict"],
        &["--sweep", "q=1,2"],
        &["--config", "/nonexistent/file.cfg"],
    ] {
        let out = schrodhelm(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn writes_output_files() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("runs/k10");
    let out = schrodhelm(&["--m", "6", "--checkpoints", "4", "--out", prefix.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let solution = fs::read_to_string(dir.path().join("runs/k10_solution.csv")).unwrap();
    assert!(solution.starts_with("x,re_u_exact,im_u_exact,re_v,im_v\n"));
    let series = fs::read_to_string(dir.path().join("runs/k10_checkpoints.csv")).unwrap();
    assert_eq!(series.lines().count(), 5);
    assert!(dir.path().join("runs/k10_metrics.csv").exists());
    assert!(dir.path().join("runs/k10_summary.txt").exists());
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# sample\nk = 10\nn = 5\nm = 6\npsi = exp\ncheckpoints = 0\n").unwrap();
    let out = schrodhelm(&["--config", cfg.to_str().unwrap(), "--n", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("n = 4\n"));
    assert!(stdout.contains("psi = exp\n"));
    assert!(stdout.contains("m = 6\n"));

    fs::write(&cfg, "k = 10\nwidth = 3\n").unwrap();
    let out = schrodhelm(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn sweep_prints_table_and_fits() {
    let out = schrodhelm(&["--m", "6", "--sweep", "n=4,5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let mut lines = stdout.lines();
    assert!(lines.next().unwrap().starts_with("param,k,cells,m,"));
    assert!(stdout.contains("disc_l2_order_in_h = "));
}

#[test]
fn warnings_go_to_stderr() {
    let out = schrodhelm(&["--m", "3", "--checkpoints", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning: "));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[warnings]"));
}
