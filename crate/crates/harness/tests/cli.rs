use std::path::Path;
use std::process::{Command, Output};

use lindsteady::output::read_records_csv;

fn lindsteady(args: &[&str], workers: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lindsteady"));
    cmd.args(args);
    match workers {
        Some(w) => cmd.env("LINDSTEADY_WORKERS", w),
        None => cmd.env_remove("LINDSTEADY_WORKERS"),
    };
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, extra: &str) -> String {
    let path = dir.join("run.toml");
    let out = dir.join("out");
    std::fs::write(
        &path,
        format!("[lattice]\nn = 12\n[dissipation]\nalpha1 = 4.0\n{extra}\n[output]\ndir = {:?}\n", out),
    )
    .unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn point_succeeds_and_writes_records() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let out = lindsteady(&["point", &cfg], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("scan,n,t,"));
    let rows = read_records_csv(&dir.path().join("out/records.csv")).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].is_ok());
    assert_eq!(rows[0].n, 12);
}

#[test]
fn solver_failure_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "gamma = 0.0");
    let out = lindsteady(&["point", &cfg], None);
    assert_eq!(out.status.code(), Some(1));
    let rows = read_records_csv(&dir.path().join("out/records.csv")).unwrap();
    assert!(rows[0].status.starts_with("failed:"), "{}", rows[0].status);
}

#[test]
fn unknown_key_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "alpha_one = 3.0");
    let out = lindsteady(&["point", &cfg], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha_one"));
    assert!(!dir.path().join("out").exists(), "nothing may run before validation");
}

#[test]
fn missing_file_exits_with_three() {
    let out = lindsteady(&["point", "/nonexistent/run.toml"], None);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/run.toml"));
}

#[test]
fn bad_usage_and_bad_worker_count_are_config_errors() {
    assert_eq!(lindsteady(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(lindsteady(&["preset", "fig9"], None).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let grid = dir.path().join("grid.toml");
    std::fs::write(&grid, "nu = [0.1]\n").unwrap();
    let out = lindsteady(&["sweep", &cfg, "--grid", grid.to_str().unwrap()], Some("zero"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_rows_do_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.toml");
    std::fs::write(
        &grid,
        "[[scan]]\nlabel = \"a\"\nnu = [0.1, 0.6]\nalpha1 = { start = 0.0, stop = 6.0, count = 5 }\n\
         [[scan]]\nlabel = \"b\"\nn = [10, 14, 9]\n",
    )
    .unwrap();
    let mut tables = Vec::new();
    for workers in ["1", "8"] {
        let sub = dir.path().join(workers);
        std::fs::create_dir(&sub).unwrap();
        let cfg = write_config(&sub, "");
        let out = lindsteady(&["sweep", &cfg, "--grid", grid.to_str().unwrap()], Some(workers));
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let text = std::fs::read_to_string(sub.join("out/records.csv")).unwrap();
        let without_time: Vec<String> = text
            .lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect();
        tables.push(without_time);
    }
    assert_eq!(tables[0].len(), 14);
    assert_eq!(tables[0], tables[1]);
    let sizes: Vec<&str> = tables[0][11..].iter().map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(sizes, ["10", "14", "9"]);
}

#[test]
fn fig1_preset_writes_metadata_dumps_and_a_pure_state() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("fig1");
    let out = lindsteady(&["preset", "fig1", "--out", out_dir.to_str().unwrap()], Some("1"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["config.toml", "grid.toml", "metadata.toml", "records.csv", "rho_pq_0000.txt", "rho_nn_0000.txt"] {
        assert!(out_dir.join(f).exists(), "{f} missing");
    }
    let rows = read_records_csv(&out_dir.join("records.csv")).unwrap();
    assert!(rows[0].purity >= 0.999);
    assert!((rows[0].pr - 144.0).abs() <= 0.5);

    let cfg = lindsteady::load_config(&out_dir.join("config.toml")).unwrap();
    assert_eq!(cfg.dissipation.alpha1, 0.0);
    let (tag, rho_pq) = lindsteady::read_matrix_dump(&out_dir.join("rho_pq_0000.txt")).unwrap();
    assert_eq!(tag, "eigen-momentum");
    assert!((rho_pq[(143, 143)].re - 1.0).abs() < 1e-3);
}

#[test]
fn check_passes() {
    let out = lindsteady(&["check"], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 5);
}
