use lindsteady::grid::{AxisSpec, Param, Scan};
use lindsteady::output::write_records;
use lindsteady::{run_point, run_sweep, solve_point, RunConfig, SweepGrid};

fn config(n: usize) -> RunConfig {
    let mut cfg = RunConfig::with_size(n);
    cfg.dissipation.alpha1 = 4.0;
    cfg
}

fn csv_without_time(records: &[lindsteady::ResultRecord]) -> Vec<String> {
    let mut buf = Vec::new();
    write_records(records, &mut buf).unwrap();
    String::from_utf8(buf)
        .unwrap()
        .lines()
        .map(|l| l.rsplit_once(',').unwrap().0.to_string())
        .collect()
}

#[test]
fn same_config_twice_gives_identical_rows() {
    let cfg = config(40);
    let a = solve_point(&cfg, "point", false).record;
    let b = solve_point(&cfg, "point", false).record;
    assert_eq!(csv_without_time(&[a]), csv_without_time(&[b]));
}

#[test]
fn forty_alpha_values_give_forty_rows_in_order() {
    let grid = SweepGrid::single(
        Scan::labelled("alpha1").with(Param::Alpha1, AxisSpec::Range { start: 0.0, stop: 6.0, count: 40 }),
    );
    let rows = run_sweep(&config(10), &grid, 3).unwrap();
    assert_eq!(rows.len(), 40);
    let alphas: Vec<f64> = rows.iter().map(|r| r.record.alpha1).collect();
    assert_eq!(alphas, lindsteady::grid::linspace(0.0, 6.0, 40));
    assert!(rows.iter().all(|r| r.record.is_ok()));
}

#[test]
fn failures_are_recorded_per_row() {
    let mut cfg = config(8);
    cfg.dissipation.gamma = 0.0;
    let grid = SweepGrid::single(Scan::labelled("nu").with(Param::Nu, AxisSpec::List(vec![0.1, 0.3, 0.6])));
    let rows = run_sweep(&cfg, &grid, 2).unwrap();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert!(r.record.status.starts_with("failed:"));
        assert!(r.record.c_re.is_nan() && r.record.purity.is_nan());
        assert!(r.error.is_some());
    }
}

#[test]
fn invalid_grid_point_stops_before_solving() {
    let mut cfg = config(8);
    cfg.solver.initial_state = lindsteady::config::InitialChoice::Site(7);
    let grid = SweepGrid::single(Scan::labelled("n").with(Param::N, AxisSpec::List(vec![12.0, 6.0])));
    let err = run_sweep(&cfg, &grid, 1).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn run_point_writes_requested_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(6);
    cfg.output.dir = dir.path().join("dumps");
    cfg.observables.emit_rho_pq = true;
    let out = run_point(&cfg).unwrap();
    let (tag, m) = lindsteady::read_matrix_dump(&cfg.output.dir.join("rho_pq_point.txt")).unwrap();
    assert_eq!(tag, "eigen-momentum");
    let kept = out.observables.unwrap().rho_pq.unwrap();
    for i in 0..6 {
        for j in 0..6 {
            assert_eq!(m[(i, j)], kept[(i, j)]);
        }
    }
    assert!(!cfg.output.dir.join("rho_nn_point.txt").exists());
}
