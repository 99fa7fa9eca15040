//! Experiment runs: architecture sweeps against the baseline, scalability
//! timing with a log-log fit, and result tables.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};

use roboalloc_core::algograph::AlgorithmGraph;
use roboalloc_core::architecture::{generate_architecture, nonisomorphic_batch, Architecture, BatchConfig, LinkTable};
use roboalloc_core::memmodel::MemoryProfile;
use roboalloc_core::solver::{
    merge_results, solve, solve_baseline_li2018, solve_scoped, Problem, SearchScope, SharedIncumbent, SolveError,
    SolveResult, SolverConfig,
};
use roboalloc_core::SeededRng;

use crate::dataset;
use crate::formats::{dataset_paths, read_json, ArchitectureFile, GraphFile, LinkTableFile};
use crate::instances::{random_graph, random_link_table};

/// Confidence level of the reported intervals.
pub const CI_LEVEL: f64 = 0.999;

/// Graph, memory data and link parameters an experiment runs on.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub graph: AlgorithmGraph,
    pub profile: MemoryProfile,
    pub links: LinkTable,
    /// Fixed topology for single solves, if the dataset has one.
    pub architecture: Option<Architecture>,
}

impl Dataset {
    /// The bundled pipeline and link measurements, with per-bit costs from
    /// [`dataset::bundled_links_scaled`].
    pub fn bundled(per_bit_scale: f64) -> Self {
        let graph = dataset::bundled_graph();
        Dataset {
            profile: MemoryProfile::from_graph(&graph),
            graph,
            links: dataset::bundled_links_scaled(per_bit_scale),
            architecture: None,
        }
    }

    /// Reads `graph.json`, `links.json` and an optional `architecture.json`.
    pub fn load(dir: &Path) -> Result<Self> {
        let (graph_path, links_path, arch_path) = dataset_paths(dir);
        let graph =
            read_json::<GraphFile>(&graph_path)?.to_graph().with_context(|| graph_path.display().to_string())?;
        let links = read_json::<LinkTableFile>(&links_path)?.to_table();
        let architecture = if arch_path.exists() {
            Some(
                read_json::<ArchitectureFile>(&arch_path)?
                    .to_architecture()
                    .with_context(|| arch_path.display().to_string())?,
            )
        } else {
            None
        };
        Ok(Dataset { profile: MemoryProfile::from_graph(&graph), graph, links, architecture })
    }

    /// `bundled` or a directory path.
    pub fn resolve(spec: &str, per_bit_scale: f64) -> Result<Self> {
        if spec == "bundled" {
            Ok(Self::bundled(per_bit_scale))
        } else {
            Self::load(Path::new(spec))
        }
    }
}

/// Stateless seed derivation so every (n, architecture, repetition) draws
/// from its own stream.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    let mut z = seed;
    for &p in parts {
        z = splitmix(z ^ splitmix(p.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    }
    z
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Runs [`solve`] over the children of the search root on the rayon pool,
/// sharing the incumbent bound. The answer equals the sequential one;
/// `nodes_explored` may differ between runs.
pub fn solve_parallel(problem: &Problem) -> Result<SolveResult, SolveError> {
    let started = Instant::now();
    let roots = problem.root_branches();
    let mut result = if roots <= 1 || rayon::current_num_threads() <= 1 {
        solve(problem)?
    } else {
        let shared = SharedIncumbent::new(f64::INFINITY);
        let parts: Vec<Result<SolveResult, SolveError>> = (0..roots)
            .into_par_iter()
            .map(|r| solve_scoped(problem, SearchScope { root: Some(r), shared: Some(&shared) }))
            .collect();
        let tie = problem.config().tie_eps;
        let mut acc: Option<SolveResult> = None;
        for p in parts {
            let p = p?;
            acc = Some(match acc {
                None => p,
                Some(a) => merge_results(a, p, tie),
            });
        }
        acc.expect("at least one root branch")
    };
    result.wall_time = started.elapsed().as_secs_f64();
    Ok(result)
}

/// Runs `f` and records its duration in `wall_time`.
pub fn timed<F>(f: F) -> Result<SolveResult, SolveError>
where
    F: FnOnce() -> Result<SolveResult, SolveError>,
{
    let started = Instant::now();
    let mut r = f()?;
    r.wall_time = started.elapsed().as_secs_f64();
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ours,
    Baseline,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Ours, Method::Baseline];
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub n_range: Vec<usize>,
    /// Defaults to `n + 5`, capped by the number of distinct architectures.
    pub archs_per_n: Option<usize>,
    pub reps_per_arch: usize,
    pub seed: u64,
    pub max_attempts: usize,
    pub solver: SolverConfig,
    /// Fill the time column. Off by default so tables are reproducible.
    pub timing: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n_range: (1..=6).collect(),
            archs_per_n: None,
            reps_per_arch: 10,
            seed: 7,
            max_attempts: 1000,
            solver: SolverConfig::default(),
            timing: false,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_range.is_empty() || self.n_range.contains(&0) {
            bail!("n_range must list robot counts of at least 1");
        }
        if self.reps_per_arch == 0 || self.archs_per_n == Some(0) || self.max_attempts == 0 {
            bail!("sweep counts must be at least 1");
        }
        Ok(())
    }
}

/// One output table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub method: Method,
    pub mean: f64,
    pub sd: f64,
    /// Half-width of the confidence interval.
    pub ci: f64,
    /// Mean solve time in seconds.
    pub time: Option<f64>,
}

/// Repetitions of one method on one architecture.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub n: usize,
    pub arch: usize,
    pub method: Method,
    pub distances: Vec<f64>,
    pub times: Vec<f64>,
}

impl Cell {
    pub fn summary(&self) -> Summary {
        Summary::of(&self.distances)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    pub n: usize,
    pub arch: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub cells: Vec<Cell>,
    pub failures: Vec<SweepFailure>,
}

/// Mean, sample standard deviation and Student-t half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub sd: f64,
    pub ci: f64,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Self {
        let count = xs.len();
        if count == 0 {
            return Summary { count, mean: f64::NAN, sd: 0.0, ci: 0.0 };
        }
        let mean = xs.iter().sum::<f64>() / count as f64;
        if count < 2 {
            return Summary { count, mean, sd: 0.0, ci: 0.0 };
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
        let sd = var.sqrt();
        Summary { count, mean, sd, ci: t_quantile(count - 1) * sd / (count as f64).sqrt() }
    }
}

fn t_quantile(df: usize) -> f64 {
    let t = StudentsT::new(0.0, 1.0, df as f64).expect("positive degrees of freedom");
    t.inverse_cdf(0.5 + CI_LEVEL / 2.0)
}

/// Solves each generated architecture with both methods, repeating with
/// fresh link delays. Repetitions are averaged per architecture and the
/// architecture means summarized per robot count; with a single
/// architecture the repetitions are summarized directly.
pub fn run_sweep(data: &Dataset, cfg: &SweepConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let mut out = SweepOutput::default();
    for &n in &cfg.n_range {
        let mut rng = SeededRng::seed_from_u64(derive_seed(cfg.seed, &[n as u64]));
        let batch_cfg = BatchConfig { size: cfg.archs_per_n, max_attempts: cfg.max_attempts, ..BatchConfig::default() };
        let batch = match nonisomorphic_batch(n, &data.links, &mut rng, batch_cfg) {
            Ok(b) => b,
            Err(e) => {
                out.failures.push(SweepFailure { n, arch: None, message: e.to_string() });
                continue;
            }
        };
        let results: Vec<Result<[Cell; 2], String>> =
            batch.par_iter().enumerate().map(|(k, arch)| run_cell(data, cfg, n, k, arch)).collect();
        let mut cells = Vec::new();
        for (k, r) in results.into_iter().enumerate() {
            match r {
                Ok(pair) => cells.extend(pair),
                Err(message) => out.failures.push(SweepFailure { n, arch: Some(k), message }),
            }
        }
        for method in Method::ALL {
            let mine: Vec<&Cell> = cells.iter().filter(|c| c.method == method).collect();
            if mine.is_empty() {
                continue;
            }
            let s = if mine.len() == 1 {
                mine[0].summary()
            } else {
                let means: Vec<f64> = mine.iter().map(|c| c.summary().mean).collect();
                Summary::of(&means)
            };
            let time = cfg.timing.then(|| {
                let t: Vec<f64> = mine.iter().flat_map(|c| c.times.iter().copied()).collect();
                t.iter().sum::<f64>() / t.len() as f64
            });
            out.rows.push(SweepRow { n, method, mean: s.mean, sd: s.sd, ci: s.ci, time });
        }
        out.cells.extend(cells);
    }
    Ok(out)
}

fn run_cell(data: &Dataset, cfg: &SweepConfig, n: usize, k: usize, arch: &Architecture) -> Result<[Cell; 2], String> {
    let mut ours = Cell { n, arch: k, method: Method::Ours, distances: Vec::new(), times: Vec::new() };
    let mut base = Cell { method: Method::Baseline, ..ours.clone() };
    for r in 0..cfg.reps_per_arch {
        let mut rng = SeededRng::seed_from_u64(derive_seed(cfg.seed, &[n as u64, k as u64, r as u64]));
        let realized = arch.realize(&mut rng);
        let problem =
            Problem::new(&data.graph, &realized, &data.profile, cfg.solver.clone()).map_err(|e| e.to_string())?;
        let a = timed(|| solve(&problem)).map_err(|e| e.to_string())?;
        let b = timed(|| solve_baseline_li2018(&problem)).map_err(|e| e.to_string())?;
        ours.distances.push(a.distance);
        ours.times.push(a.wall_time);
        base.distances.push(b.distance);
        base.times.push(b.wall_time);
    }
    Ok([ours, base])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Json,
}

impl std::str::FromStr for TableFormat {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            other => bail!("unknown format {other:?}, expected csv or json"),
        }
    }
}

/// Writes rows with columns n, method, mean, sd, ci, time.
pub fn write_tables<W: Write>(rows: &[SweepRow], format: TableFormat, w: W) -> Result<()> {
    match format {
        TableFormat::Csv => {
            let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
            wtr.write_record(["n", "method", "mean", "sd", "ci", "time"])?;
            for r in rows {
                wtr.serialize(r)?;
            }
            wtr.flush()?;
        }
        TableFormat::Json => {
            let mut w = w;
            serde_json::to_writer_pretty(&mut w, rows)?;
            w.write_all(b"\n")?;
        }
    }
    Ok(())
}

pub fn emit_tables(rows: &[SweepRow], format: TableFormat, path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    write_tables(rows, format, &mut w).with_context(|| format!("writing {}", path.display()))?;
    w.flush().with_context(|| format!("writing {}", path.display()))
}

pub fn read_tables(path: &Path, format: TableFormat) -> Result<Vec<SweepRow>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let rows = match format {
        TableFormat::Csv => csv::Reader::from_reader(file)
            .deserialize()
            .collect::<std::result::Result<Vec<SweepRow>, _>>()
            .with_context(|| format!("parsing {}", path.display()))?,
        TableFormat::Json => {
            serde_json::from_reader(BufReader::new(file)).with_context(|| format!("parsing {}", path.display()))?
        }
    };
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct ScalabilityConfig {
    pub min_algorithms: usize,
    pub max_algorithms: usize,
    /// Node counts include the cloud and the fog.
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub archs: usize,
    pub dags: usize,
    pub edge_prob: f64,
    pub seed: u64,
    /// Each instance is re-solved until this much time has passed.
    pub min_sample: Duration,
    pub solver: SolverConfig,
}

impl Default for ScalabilityConfig {
    fn default() -> Self {
        ScalabilityConfig {
            min_algorithms: 2,
            max_algorithms: 8,
            min_nodes: 3,
            max_nodes: 6,
            archs: 3,
            dags: 3,
            edge_prob: 0.4,
            seed: 7,
            min_sample: Duration::from_millis(2),
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub algorithms: usize,
    pub nodes: usize,
    /// Allocations in the search space, `nodes ^ algorithms`.
    pub size: f64,
    /// Mean solve time in seconds.
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regression {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalabilityReport {
    pub points: Vec<GridPoint>,
    /// Fit of `ln time` on `ln size`; absent with fewer than three points.
    pub regression: Option<Regression>,
    pub total_seconds: f64,
}

/// Times [`solve`] over a grid of algorithm and node counts on random
/// instances and fits a line on log-log axes.
pub fn run_scalability(cfg: &ScalabilityConfig) -> Result<ScalabilityReport> {
    if cfg.min_algorithms == 0 || cfg.min_algorithms > cfg.max_algorithms {
        bail!("need 1 <= min_algorithms <= max_algorithms");
    }
    if cfg.min_nodes < 3 || cfg.min_nodes > cfg.max_nodes {
        bail!("need 3 <= min_nodes <= max_nodes");
    }
    if cfg.archs == 0 || cfg.dags == 0 {
        bail!("archs and dags must be at least 1");
    }
    let started = Instant::now();
    let mut points = Vec::new();
    for nodes in cfg.min_nodes..=cfg.max_nodes {
        let robots = nodes - 2;
        for algorithms in cfg.min_algorithms..=cfg.max_algorithms {
            let mut times = Vec::new();
            for a in 0..cfg.archs {
                let mut rng = SeededRng::seed_from_u64(derive_seed(cfg.seed, &[nodes as u64, a as u64]));
                let table = random_link_table(&mut rng);
                let arch = generate_architecture(robots, &table, &mut rng, 1000)?;
                for d in 0..cfg.dags {
                    let mut rng = SeededRng::seed_from_u64(derive_seed(
                        cfg.seed,
                        &[nodes as u64, a as u64, algorithms as u64, d as u64],
                    ));
                    let graph = random_graph(algorithms, cfg.edge_prob, &mut rng);
                    let profile = MemoryProfile::from_graph(&graph);
                    let problem = Problem::new(&graph, &arch, &profile, cfg.solver.clone())?;
                    times.push(time_solve(&problem, cfg.min_sample)?);
                }
            }
            let size = (nodes as f64).powi(algorithms as i32);
            points.push(GridPoint { algorithms, nodes, size, time: times.iter().sum::<f64>() / times.len() as f64 });
        }
    }
    let regression = log_log_fit(&points);
    Ok(ScalabilityReport { points, regression, total_seconds: started.elapsed().as_secs_f64() })
}

fn time_solve(problem: &Problem, min_sample: Duration) -> Result<f64> {
    let started = Instant::now();
    let mut runs = 0u32;
    loop {
        std::hint::black_box(solve(problem)?);
        runs += 1;
        if started.elapsed() >= min_sample {
            break;
        }
    }
    Ok(started.elapsed().as_secs_f64() / runs as f64)
}

/// Ordinary least squares of `ln time` on `ln size` with an F-test p-value.
pub fn log_log_fit(points: &[GridPoint]) -> Option<Regression> {
    let m = points.len();
    if m < 3 {
        return None;
    }
    let x = DMatrix::from_fn(m, 2, |i, j| if j == 0 { 1.0 } else { points[i].size.ln() });
    let y = DVector::from_iterator(m, points.iter().map(|p| p.time.ln()));
    let xtx = x.transpose() * &x;
    let beta = xtx.cholesky()?.solve(&(x.transpose() * &y));
    let fitted = &x * &beta;
    let mean = y.mean();
    let ss_res = (&y - &fitted).norm_squared();
    let ss_tot = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    if ss_tot == 0.0 {
        return None;
    }
    let r2 = 1.0 - ss_res / ss_tot;
    let df = (m - 2) as f64;
    let p_value = if ss_res == 0.0 {
        0.0
    } else {
        let f = r2 / ((1.0 - r2) / df);
        let dist = FisherSnedecor::new(1.0, df).ok()?;
        1.0 - dist.cdf(f)
    };
    Some(Regression { slope: beta[1], intercept: beta[0], r2, p_value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_of_constant_has_no_spread() {
        let s = Summary::of(&[2.0, 2.0, 2.0]);
        assert_eq!((s.mean, s.sd, s.ci), (2.0, 0.0, 0.0));
        assert_eq!(Summary::of(&[5.0]).ci, 0.0);
    }

    #[test]
    fn t_quantile_matches_table() {
        // two-sided 99.9% critical values
        assert!((t_quantile(9) - 4.780912).abs() < 1e-5);
        assert!((t_quantile(1000) - 3.300283).abs() < 1e-4);
    }

    #[test]
    fn exact_power_law_fits_perfectly() {
        let pts: Vec<GridPoint> = (1..6)
            .map(|i| {
                let size = 10f64.powi(i);
                GridPoint { algorithms: i as usize, nodes: 3, size, time: 1e-6 * size.powf(0.7) }
            })
            .collect();
        let r = log_log_fit(&pts).unwrap();
        assert!((r.slope - 0.7).abs() < 1e-9);
        assert!((r.r2 - 1.0).abs() < 1e-12);
        assert!(log_log_fit(&pts[..2]).is_none());
    }

    #[test]
    fn seeds_differ_by_part() {
        assert_ne!(derive_seed(7, &[1, 0]), derive_seed(7, &[0, 1]));
        assert_eq!(derive_seed(7, &[3]), derive_seed(7, &[3]));
    }
}
