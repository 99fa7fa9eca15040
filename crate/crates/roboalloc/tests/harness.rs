use std::f64::consts::SQRT_2;
use std::time::Duration;

use rand::SeedableRng;
use roboalloc::harness::{
    emit_tables, log_log_fit, read_tables, run_scalability, run_sweep, solve_parallel, write_tables, Dataset,
    GridPoint, Method, ScalabilityConfig, SweepConfig, SweepRow, TableFormat,
};
use roboalloc_core::architecture::{generate_architecture, LinkParams};
use roboalloc_core::solver::solve;
use roboalloc_core::{FoldedNormal, Problem, SeededRng, SolverConfig};

fn sweep(n: &[usize], reps: usize, archs: Option<usize>) -> SweepConfig {
    SweepConfig { n_range: n.to_vec(), reps_per_arch: reps, archs_per_n: archs, ..SweepConfig::default() }
}

#[test]
fn one_robot_sweep_on_the_bundled_dataset() {
    let out = run_sweep(&Dataset::bundled(1.0), &sweep(&[1], 5, None)).unwrap();
    assert!(out.failures.is_empty());
    assert_eq!(out.rows.len(), 2);
    assert_eq!(out.cells.len(), 2);
    assert!(out.cells.iter().all(|c| c.arch == 0 && c.distances.len() == 5));
    let ours = &out.rows[0];
    let base = &out.rows[1];
    assert_eq!((ours.method, base.method), (Method::Ours, Method::Baseline));
    assert!(ours.mean <= base.mean);
    assert!(ours.time.is_none());
    for (a, b) in out.cells[0].distances.iter().zip(&out.cells[1].distances) {
        assert!(a <= b);
    }
}

#[test]
fn spread_free_links_give_zero_deviation() {
    let mut data = Dataset::bundled(1.0);
    for p in data.links.entries.values_mut() {
        *p = LinkParams { delay: FoldedNormal::new(p.delay.mean(), 0.0), ..*p };
    }
    let out = run_sweep(&data, &sweep(&[1], 3, None)).unwrap();
    for row in &out.rows {
        assert_eq!(row.sd, 0.0);
        assert_eq!(row.ci, 0.0);
    }
}

#[test]
fn interval_narrows_with_more_repetitions() {
    let data = Dataset::bundled(1.0);
    let few = run_sweep(&data, &sweep(&[1], 10, None)).unwrap();
    let many = run_sweep(&data, &sweep(&[1], 40, None)).unwrap();
    // the baseline keeps one allocation at n = 1, so only ours varies
    let (a, b) = (&few.rows[0], &many.rows[0]);
    assert_eq!(a.method, Method::Ours);
    assert!(a.ci > 0.0 && b.ci < a.ci, "{} !< {}", b.ci, a.ci);
    assert!(many.rows[1].ci <= few.rows[1].ci);
}

#[test]
fn sweeps_are_reproducible_and_timing_is_opt_in() {
    let data = Dataset::bundled(1.0);
    let cfg = sweep(&[1, 2], 2, None);
    let mut x = Vec::new();
    let mut y = Vec::new();
    write_tables(&run_sweep(&data, &cfg).unwrap().rows, TableFormat::Csv, &mut x).unwrap();
    write_tables(&run_sweep(&data, &cfg).unwrap().rows, TableFormat::Csv, &mut y).unwrap();
    assert_eq!(x, y);
    let other = run_sweep(&data, &SweepConfig { seed: 8, ..cfg.clone() }).unwrap();
    let mut z = Vec::new();
    write_tables(&other.rows, TableFormat::Csv, &mut z).unwrap();
    assert_ne!(x, z);
    let timed = run_sweep(&data, &SweepConfig { timing: true, ..cfg }).unwrap();
    assert!(timed.rows.iter().all(|r| r.time.is_some_and(|t| t >= 0.0)));
}

#[test]
fn two_robots_use_both_architectures() {
    let out = run_sweep(&Dataset::bundled(1.0), &sweep(&[2], 2, None)).unwrap();
    let archs: std::collections::BTreeSet<usize> = out.cells.iter().map(|c| c.arch).collect();
    assert_eq!(archs.len(), 2);
    assert_eq!(out.rows.len(), 2);
}

#[test]
fn bad_sweep_settings_are_rejected() {
    let data = Dataset::bundled(1.0);
    assert!(run_sweep(&data, &sweep(&[], 1, None)).is_err());
    assert!(run_sweep(&data, &sweep(&[0], 1, None)).is_err());
    assert!(run_sweep(&data, &sweep(&[1], 0, None)).is_err());
    assert!(run_sweep(&data, &sweep(&[1], 1, Some(0))).is_err());
}

fn rows(k: usize) -> Vec<SweepRow> {
    (0..k)
        .map(|i| SweepRow {
            n: 1 + i / 2,
            method: if i % 2 == 0 { Method::Ours } else { Method::Baseline },
            mean: 1.0 + i as f64 / 7.0,
            sd: 0.1 / (i + 1) as f64,
            ci: 0.3,
            time: (i % 3 == 0).then_some(i as f64 * 1e-3),
        })
        .collect()
}

#[test]
fn tables_round_trip_in_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    for format in [TableFormat::Csv, TableFormat::Json] {
        let path = dir.path().join(format!("t.{format:?}"));
        let r = rows(20);
        emit_tables(&r, format, &path).unwrap();
        assert_eq!(read_tables(&path, format).unwrap(), r);
    }
    let mut buf = Vec::new();
    write_tables(&rows(20), TableFormat::Csv, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 21);
    assert_eq!(text.lines().next().unwrap(), "n,method,mean,sd,ci,time");
    let mut buf = Vec::new();
    write_tables(&[], TableFormat::Csv, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), "n,method,mean,sd,ci,time\n");
    assert_eq!("csv".parse::<TableFormat>().unwrap(), TableFormat::Csv);
    assert!("xml".parse::<TableFormat>().is_err());
}

#[test]
fn parallel_solve_matches_sequential() {
    let data = Dataset::bundled(1.0);
    for robots in 1..=3 {
        let arch =
            generate_architecture(robots, &data.links, &mut SeededRng::seed_from_u64(robots as u64), 1000).unwrap();
        let p = Problem::new(&data.graph, &arch, &data.profile, SolverConfig::default()).unwrap();
        let a = solve(&p).unwrap();
        let b = solve_parallel(&p).unwrap();
        assert_eq!(a.best_alloc, b.best_alloc);
        assert_eq!(a.distance, b.distance);
        assert!(b.distance <= SQRT_2);
        assert!(b.wall_time > 0.0);
    }
}

#[test]
fn small_grid_and_fit() {
    let cfg = ScalabilityConfig {
        max_algorithms: 3,
        max_nodes: 4,
        archs: 1,
        dags: 1,
        min_sample: Duration::from_micros(100),
        ..ScalabilityConfig::default()
    };
    let rep = run_scalability(&cfg).unwrap();
    assert_eq!(rep.points.len(), 4);
    for p in &rep.points {
        assert_eq!(p.size, (p.nodes as f64).powi(p.algorithms as i32));
        assert!(p.time > 0.0);
    }
    assert!(rep.regression.is_some());
    let one = ScalabilityConfig { max_algorithms: 2, max_nodes: 3, ..cfg };
    assert!(run_scalability(&one).unwrap().regression.is_none());
}

#[test]
fn fit_recovers_an_exact_power_law() {
    let points: Vec<GridPoint> = [10.0, 100.0, 1000.0, 1e4]
        .iter()
        .map(|&s: &f64| GridPoint { algorithms: 0, nodes: 0, size: s, time: 3e-6 * s.powf(1.5) })
        .collect();
    let r = log_log_fit(&points).unwrap();
    assert!((r.slope - 1.5).abs() < 1e-9);
    assert!((r.intercept - 3e-6f64.ln()).abs() < 1e-9);
    assert!((r.r2 - 1.0).abs() < 1e-12);
}
