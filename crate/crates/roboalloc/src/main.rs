use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use serde::Serialize;
use serde_json::json;

use roboalloc::dataset::memory_example;
use roboalloc::formats::{allocation_json, ArchitectureFile, ConfigFile, MethodDto};
use roboalloc::harness::{
    derive_seed, run_scalability, run_sweep, solve_parallel, timed, write_tables, Dataset, ScalabilityConfig,
    SweepConfig, TableFormat,
};
use roboalloc::instances::{random_graph, random_link_table};
use roboalloc_core::architecture::{generate_architecture, Architecture};
use roboalloc_core::memmodel::{balance_optima, balance_restricted_values, MemoryError, MemoryProfile};
use roboalloc_core::solver::{enumerate_oracle, solve, solve_baseline_li2018, Problem, SolveError, SolveResult};
use roboalloc_core::SeededRng;

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct ConfigError(String);

fn config_err(e: impl std::fmt::Display) -> anyhow::Error {
    ConfigError(e.to_string()).into()
}

#[derive(Parser)]
#[command(name = "roboalloc", version, about = "Allocate algorithm graphs over robot, fog and cloud nodes")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// JSON settings file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the seed from the settings file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value = "json")]
    format: String,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// `bundled` or a directory with graph.json, links.json and optionally
    /// architecture.json.
    #[arg(long, global = true, default_value = "bundled")]
    dataset: String,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal allocation of one instance.
    Solve(SolveArgs),
    /// Optimal allocation for response time alone.
    TimeOnly(SolveArgs),
    /// Memory-only balancing of algorithm sizes over robots.
    BalanceMem(BalanceArgs),
    /// Ours against the baseline over random architectures.
    Sweep(SweepArgs),
    /// Solve-time measurements and log-log fit.
    Scalability(ScalabilityArgs),
    /// One random architecture.
    GenArch(GenArchArgs),
    /// Compares the solver with exhaustive enumeration on random instances.
    OracleCheck(OracleArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Robots of the generated architecture when the dataset has none.
    #[arg(long, default_value_t = 1)]
    robots: usize,
    /// Also report the baseline allocation.
    #[arg(long)]
    baseline: bool,
}

#[derive(Args)]
struct BalanceArgs {
    /// Sizes that must go to robots linked to a fog node.
    #[arg(long, value_delimiter = ',')]
    restricted: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    unrestricted: Option<Vec<f64>>,
    #[arg(long)]
    robots: Option<usize>,
    /// Zero-based indices of robots linked to a fog node.
    #[arg(long, value_delimiter = ',')]
    tr0: Option<Vec<usize>>,
    #[arg(long, default_value = "exact")]
    method: String,
    /// Enumerate up to this many equivalent optima of the second stage.
    #[arg(long, default_value_t = 0)]
    optima: usize,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    archs: Option<usize>,
    /// Fill the mean solve time column.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct ScalabilityArgs {
    #[arg(long)]
    max_algorithms: Option<usize>,
    #[arg(long)]
    max_nodes: Option<usize>,
    #[arg(long)]
    archs: Option<usize>,
    #[arg(long)]
    dags: Option<usize>,
}

#[derive(Args)]
struct GenArchArgs {
    #[arg(long, default_value_t = 3)]
    robots: usize,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 50)]
    instances: usize,
    #[arg(long, default_value_t = 5)]
    max_algorithms: usize,
    /// Node count including cloud and fog.
    #[arg(long, default_value_t = 4)]
    max_nodes: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.is::<ConfigError>() {
            return 3;
        }
        if let Some(s) = cause.downcast_ref::<SolveError>() {
            if matches!(s, SolveError::Infeasible(_)) {
                return 2;
            }
        }
        if let Some(MemoryError::InfeasibleMemoryPlacement) = cause.downcast_ref::<MemoryError>() {
            return 2;
        }
    }
    1
}

struct Ctx {
    cfg: ConfigFile,
    format: TableFormat,
    out: Option<PathBuf>,
    dataset: String,
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.global.config {
        Some(p) => ConfigFile::load(p).map_err(|e| config_err(format!("{e:#}")))?,
        None => ConfigFile::default(),
    };
    if let Some(s) = cli.global.seed {
        cfg.seed = s;
    }
    let format: TableFormat = cli.global.format.parse().map_err(config_err)?;
    rayon::ThreadPoolBuilder::new().num_threads(cfg.workers.max(1)).build_global().ok();
    let ctx = Ctx { cfg, format, out: cli.global.out, dataset: cli.global.dataset };
    match cli.command {
        Command::Solve(a) => cmd_solve(&ctx, &a, false),
        Command::TimeOnly(a) => cmd_solve(&ctx, &a, true),
        Command::BalanceMem(a) => cmd_balance(&ctx, &a),
        Command::Sweep(a) => cmd_sweep(&ctx, &a),
        Command::Scalability(a) => cmd_scalability(&ctx, &a),
        Command::GenArch(a) => cmd_gen_arch(&ctx, &a),
        Command::OracleCheck(a) => cmd_oracle(&ctx, &a),
    }
}

fn load_dataset(ctx: &Ctx) -> Result<Dataset> {
    let mut d = Dataset::resolve(&ctx.dataset, ctx.cfg.per_bit_scale).map_err(|e| config_err(format!("{e:#}")))?;
    d.profile = ctx.cfg.apply_overhead(d.profile);
    Ok(d)
}

fn emit(ctx: &Ctx, bytes: Vec<u8>) -> Result<()> {
    match &ctx.out {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(&bytes)?;
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(ctx: &Ctx, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    emit(ctx, bytes)
}

fn result_json(r: &SolveResult) -> serde_json::Value {
    json!({
        "allocation": allocation_json(&r.best_alloc),
        "distance": r.distance,
        "per_robot_times": r.per_robot_times.iter().map(|(k, v)| (k.0, *v)).collect::<BTreeMap<_, _>>(),
        "time_aggregate": r.time_aggregate,
        "memory": {
            "per_robot": r.memory.per_robot.iter().map(|(k, v)| (k.0, *v)).collect::<BTreeMap<_, _>>(),
            "max_usage": r.memory.max_usage,
            "total": r.memory.total,
        },
        "normalizers": { "time": r.objective.time_norm, "memory": r.objective.mem_norm },
        "nodes_explored": r.nodes_explored,
        "pruned": r.pruned,
        "wall_time": r.wall_time,
    })
}

fn instance_architecture(ctx: &Ctx, data: &Dataset, robots: usize) -> Result<Architecture> {
    if let Some(a) = &data.architecture {
        return Ok(a.clone());
    }
    if robots == 0 {
        return Err(config_err("--robots must be at least 1"));
    }
    let mut rng = SeededRng::seed_from_u64(ctx.cfg.seed);
    Ok(generate_architecture(robots, &data.links, &mut rng, ctx.cfg.sweep.max_attempts)?)
}

fn cmd_solve(ctx: &Ctx, a: &SolveArgs, time_only: bool) -> Result<()> {
    let data = load_dataset(ctx)?;
    let arch = instance_architecture(ctx, &data, a.robots)?;
    let mut solver = ctx.cfg.solver();
    if time_only {
        solver.weights.memory = 0.0;
    }
    let problem = Problem::new(&data.graph, &arch, &data.profile, solver)?;
    let ours = solve_parallel(&problem)?;
    let mut doc = json!({ "architecture": ArchitectureFile::from_architecture(&arch), "ours": result_json(&ours) });
    if a.baseline {
        let base = timed(|| solve_baseline_li2018(&problem))?;
        doc["baseline"] = result_json(&base);
    }
    emit_json(ctx, &doc)
}

fn cmd_balance(ctx: &Ctx, a: &BalanceArgs) -> Result<()> {
    let restricted = a.restricted.clone().unwrap_or_else(|| memory_example::RESTRICTED.to_vec());
    let unrestricted = a.unrestricted.clone().unwrap_or_else(|| memory_example::UNRESTRICTED.to_vec());
    let robots = a.robots.unwrap_or(memory_example::ROBOTS);
    let tr0 = a.tr0.clone().unwrap_or_else(|| memory_example::TR0.to_vec());
    let method: MethodDto =
        serde_json::from_value(json!(a.method)).map_err(|_| config_err("method must be auto, exact or lpt"))?;
    if robots == 0 {
        return Err(config_err("--robots must be at least 1"));
    }
    let initial = vec![0.0; robots];
    let res = balance_restricted_values(&restricted, &unrestricted, &initial, &tr0, method.into())?;
    let max = res.loads.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut optima = Vec::new();
    if a.optima > 0 {
        for b in balance_optima(&unrestricted, &res.stage_one, a.optima)? {
            optima.push(b.loads);
        }
    }
    emit_json(
        ctx,
        &json!({
            "restricted_bins": res.restricted,
            "unrestricted_bins": res.unrestricted,
            "stage_one": res.stage_one,
            "loads": res.loads,
            "max_load": max,
            "optima": optima,
        }),
    )
}

fn cmd_sweep(ctx: &Ctx, a: &SweepArgs) -> Result<()> {
    let data = load_dataset(ctx)?;
    let s = &ctx.cfg.sweep;
    let (lo, hi) = (a.n_min.unwrap_or(s.n_min), a.n_max.unwrap_or(s.n_max));
    let cfg = SweepConfig {
        n_range: (lo..=hi).collect(),
        archs_per_n: a.archs.or(s.archs_per_n),
        reps_per_arch: a.reps.unwrap_or(s.reps_per_arch),
        seed: ctx.cfg.seed,
        max_attempts: s.max_attempts,
        solver: ctx.cfg.solver(),
        timing: a.timing,
    };
    cfg.validate().map_err(config_err)?;
    let out = run_sweep(&data, &cfg)?;
    for f in &out.failures {
        match f.arch {
            Some(k) => eprintln!("n={} architecture {}: {}", f.n, k, f.message),
            None => eprintln!("n={}: {}", f.n, f.message),
        }
    }
    let mut bytes = Vec::new();
    write_tables(&out.rows, ctx.format, &mut bytes)?;
    emit(ctx, bytes)
}

fn cmd_scalability(ctx: &Ctx, a: &ScalabilityArgs) -> Result<()> {
    let s = &ctx.cfg.scalability;
    let cfg = ScalabilityConfig {
        max_algorithms: a.max_algorithms.unwrap_or(s.max_algorithms),
        max_nodes: a.max_nodes.unwrap_or(s.max_nodes),
        archs: a.archs.unwrap_or(s.archs),
        dags: a.dags.unwrap_or(s.dags),
        seed: ctx.cfg.seed,
        min_sample: Duration::from_millis(2),
        solver: ctx.cfg.solver(),
        ..ScalabilityConfig::default()
    };
    if cfg.max_algorithms < cfg.min_algorithms || cfg.max_nodes < cfg.min_nodes || cfg.archs == 0 || cfg.dags == 0 {
        return Err(config_err("scalability grid needs at least 2 algorithms, 3 nodes and one instance"));
    }
    let report = run_scalability(&cfg)?;
    match ctx.format {
        TableFormat::Json => emit_json(ctx, &report),
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for p in &report.points {
                w.serialize(p)?;
            }
            let bytes = w.into_inner()?;
            if let Some(r) = report.regression {
                eprintln!("slope {:.4} intercept {:.4} r2 {:.4} p {:.3e}", r.slope, r.intercept, r.r2, r.p_value);
            }
            emit(ctx, bytes)
        }
    }
}

fn cmd_gen_arch(ctx: &Ctx, a: &GenArchArgs) -> Result<()> {
    let data = load_dataset(ctx)?;
    if a.robots == 0 {
        return Err(config_err("--robots must be at least 1"));
    }
    let mut rng = SeededRng::seed_from_u64(ctx.cfg.seed);
    let arch = generate_architecture(a.robots, &data.links, &mut rng, ctx.cfg.sweep.max_attempts)?;
    emit_json(ctx, &ArchitectureFile::from_architecture(&arch))
}

fn cmd_oracle(ctx: &Ctx, a: &OracleArgs) -> Result<()> {
    if a.max_algorithms == 0 || a.max_nodes < 3 {
        return Err(config_err("oracle-check needs at least one algorithm and three nodes"));
    }
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for i in 0..a.instances {
        let mut rng = SeededRng::seed_from_u64(derive_seed(ctx.cfg.seed, &[i as u64]));
        let algorithms = 1 + i % a.max_algorithms;
        let nodes = 3 + i % (a.max_nodes - 2);
        let graph = random_graph(algorithms, 0.4, &mut rng);
        let table = random_link_table(&mut rng);
        let arch = generate_architecture(nodes - 2, &table, &mut rng, 1000)?;
        let profile = ctx.cfg.apply_overhead(MemoryProfile::from_graph(&graph));
        let problem = Problem::new(&graph, &arch, &profile, ctx.cfg.solver())?;
        let s = solve(&problem)?;
        let o = enumerate_oracle(&problem)?;
        let gap = (s.distance - o.distance).abs();
        worst = worst.max(gap);
        rows.push(json!({ "instance": i, "algorithms": algorithms, "nodes": nodes, "solve": s.distance, "oracle": o.distance, "gap": gap }));
    }
    let ok = worst <= 1e-9;
    emit_json(ctx, &json!({ "instances": rows, "max_gap": worst, "agree": ok }))?;
    if ok {
        Ok(())
    } else {
        anyhow::bail!("solver and oracle disagree by {worst:e}")
    }
}
