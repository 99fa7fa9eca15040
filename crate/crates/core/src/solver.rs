//! Branch-and-bound allocation search.
//!
//! The objective is the distance to the origin of the normalized per-robot
//! response times and the normalized largest robot memory. Normalizers come
//! from placing every algorithm on one baseline node, so that allocation
//! always sits at `sqrt(2)`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::algograph::{AlgorithmGraph, AlgorithmId, GraphError};
use crate::architecture::{ArchError, Architecture, NodeClass, NodeId};
use crate::float;
use crate::memmodel::{Combine, MemoryModel, MemoryProfile, MemoryReport};
use crate::timemodel::{Allocation, DelayMode, TimeError, TimeOptions, TimePlan, NONE};

pub const DEFAULT_ORACLE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveWeights {
    pub time: f64,
    pub memory: f64,
}

impl Default for ObjectiveWeights {
    fn default() -> Self {
        ObjectiveWeights { time: 1.0, memory: 1.0 }
    }
}

/// Where the normalizing allocation puts every algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineNode {
    /// Lowest-id node of the class.
    Class(NodeClass),
    Node(NodeId),
}

impl Default for BaselineNode {
    fn default() -> Self {
        BaselineNode::Class(NodeClass::Cloud)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub weights: ObjectiveWeights,
    pub baseline: BaselineNode,
    pub combine: Combine,
    pub time: TimeOptions,
    pub pruning: bool,
    /// Also return every allocation within this distance of the optimum.
    pub collect_optima: Option<f64>,
    pub oracle_cap: u64,
    /// Distances closer than this are ties, broken by allocation key.
    pub tie_eps: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            weights: ObjectiveWeights::default(),
            baseline: BaselineNode::default(),
            combine: Combine::default(),
            time: TimeOptions::default(),
            pruning: true,
            collect_optima: None,
            oracle_cap: DEFAULT_ORACLE_CAP,
            tie_eps: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Time(#[from] TimeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Arch(#[from] ArchError),
    #[error("no feasible allocation: algorithm {0} has no allowed node")]
    Infeasible(AlgorithmId),
    #[error("baseline node unavailable: {0}")]
    NoBaselineNode(&'static str),
    #[error("normalizer of a weighted objective term is not positive (time {time}, memory {memory})")]
    DegenerateNormalizer { time: f64, memory: f64 },
    #[error("search space of {size} allocations exceeds the oracle cap {cap}")]
    OracleTooLarge { size: u128, cap: u64 },
    #[error("invalid heterogeneous setup: {0}")]
    InvalidClasses(&'static str),
}

/// Normalizers of the joint objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointObjective {
    pub time_norm: f64,
    pub mem_norm: f64,
    pub baseline_node: NodeId,
    pub weights: ObjectiveWeights,
}

impl JointObjective {
    /// `sqrt(sum_e (w_t t_e / T)^2 + (w_m m / M)^2)`; zero-weight terms drop out.
    pub fn distance<I: IntoIterator<Item = f64>>(&self, robot_times: I, max_memory: f64) -> f64 {
        let w = self.weights;
        let t = robot_times.into_iter().map(|t| if w.time == 0.0 { 0.0 } else { w.time * t / self.time_norm });
        let m = if w.memory == 0.0 { 0.0 } else { w.memory * max_memory / self.mem_norm };
        float::norm(t.chain(core::iter::once(m)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub best_alloc: Allocation,
    pub distance: f64,
    pub per_robot_times: BTreeMap<NodeId, f64>,
    pub time_aggregate: f64,
    pub memory: MemoryReport,
    pub objective: JointObjective,
    pub nodes_explored: u64,
    pub pruned: u64,
    /// Seconds; filled in by callers that can read a clock.
    pub wall_time: f64,
    /// Incumbent distances in the order they were accepted.
    pub incumbent_trace: Vec<f64>,
    /// Allocations within `collect_optima` of the optimum, by key.
    pub optima: Vec<Allocation>,
}

/// Best distance shared between workers, stored as `f64` bits.
#[derive(Debug)]
pub struct SharedIncumbent(AtomicU64);

impl SharedIncumbent {
    pub fn new(value: f64) -> Self {
        SharedIncumbent(AtomicU64::new(value.to_bits()))
    }

    pub fn get(&self) -> f64 {
        f64::from_bits(self.0.load(Ordering::Acquire))
    }

    /// Lowers the stored value to `value` if smaller.
    pub fn offer(&self, value: f64) {
        let mut cur = self.0.load(Ordering::Acquire);
        while value < f64::from_bits(cur) {
            match self.0.compare_exchange_weak(cur, value.to_bits(), Ordering::AcqRel, Ordering::Acquire) {
                Ok(_) => return,
                Err(actual) => cur = actual,
            }
        }
    }
}

/// A solvable instance: graph, architecture and memory data bound together.
#[derive(Debug, Clone)]
pub struct Problem {
    graph: AlgorithmGraph,
    arch: Architecture,
    profile: MemoryProfile,
    config: SolverConfig,
    plan: TimePlan,
    memory: MemoryModel,
    hosts: Vec<(usize, Vec<usize>)>,
}

impl Problem {
    pub fn new(
        graph: &AlgorithmGraph,
        arch: &Architecture,
        profile: &MemoryProfile,
        config: SolverConfig,
    ) -> Result<Self, SolveError> {
        let plan = TimePlan::new(graph, arch, config.time)?;
        let memory = MemoryModel::with_routes(plan.graph(), arch, plan.routes(), profile, config.combine);
        let hosts = plan.real_order().into_iter().map(|v| (v, plan.allowed_positions(v).to_vec())).collect();
        Ok(Problem { graph: graph.clone(), arch: arch.clone(), profile: profile.clone(), config, plan, memory, hosts })
    }

    /// Only `robots` initiate requests and count for memory; only they and
    /// non-edge nodes may host algorithms.
    pub fn scoped(mut self, robots: &BTreeSet<NodeId>) -> Result<Self, SolveError> {
        self.plan = self.plan.with_initiators(robots)?;
        self.memory.restrict_robots(robots);
        let arch = &self.arch;
        for (_, hs) in self.hosts.iter_mut() {
            hs.retain(|&k| {
                let n = arch.nodes()[k];
                n.class != NodeClass::Edge || robots.contains(&n.id)
            });
        }
        Ok(self)
    }

    pub fn graph(&self) -> &AlgorithmGraph {
        &self.graph
    }

    pub fn architecture(&self) -> &Architecture {
        &self.arch
    }

    pub fn profile(&self) -> &MemoryProfile {
        &self.profile
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn plan(&self) -> &TimePlan {
        &self.plan
    }

    pub fn memory_model(&self) -> &MemoryModel {
        &self.memory
    }

    /// Same instance with other settings.
    pub fn with_config(&self, config: SolverConfig) -> Result<Self, SolveError> {
        Problem::new(&self.graph, &self.arch, &self.profile, config)
    }

    /// Same instance on another architecture with the same nodes, e.g. one
    /// with realized link delays.
    pub fn with_architecture(&self, arch: &Architecture) -> Result<Self, SolveError> {
        Problem::new(&self.graph, arch, &self.profile, self.config.clone())
    }

    pub fn baseline_node(&self) -> Result<NodeId, SolveError> {
        match self.config.baseline {
            BaselineNode::Node(id) => {
                self.arch.node(id).map(|n| n.id).ok_or(SolveError::NoBaselineNode("node not in architecture"))
            }
            BaselineNode::Class(c) => {
                self.arch.nodes_of(c).next().ok_or(SolveError::NoBaselineNode("no node of the baseline class"))
            }
        }
    }

    pub fn baseline_allocation(&self) -> Result<Allocation, SolveError> {
        Ok(Allocation::all_on(&self.graph, self.baseline_node()?))
    }

    /// Normalizers from the baseline allocation, placement constraints aside.
    pub fn objective(&self) -> Result<JointObjective, SolveError> {
        let node = self.baseline_node()?;
        let alloc = Allocation::all_on(&self.graph, node);
        let time_norm = self.plan.aggregate_time_unconstrained(&alloc, DelayMode::Expected)?.aggregate;
        let mem_norm = self.memory.report(&alloc, &self.arch).max_usage;
        let w = self.config.weights;
        let bad = |weight: f64, norm: f64| weight != 0.0 && !(norm > 0.0 && norm.is_finite());
        if bad(w.time, time_norm) || bad(w.memory, mem_norm) {
            return Err(SolveError::DegenerateNormalizer { time: time_norm, memory: mem_norm });
        }
        Ok(JointObjective { time_norm, mem_norm, baseline_node: node, weights: w })
    }

    /// Full-model evaluation of `alloc` under `objective`.
    pub fn evaluate(&self, alloc: &Allocation, objective: &JointObjective) -> Result<Evaluation, SolveError> {
        let time = self.plan.aggregate_time(alloc, DelayMode::Expected)?;
        let memory = self.memory.report(alloc, &self.arch);
        let distance = objective.distance(time.per_robot_final.values().copied(), memory.max_usage);
        Ok(Evaluation { distance, per_robot_times: time.per_robot_final, time_aggregate: time.aggregate, memory })
    }

    /// Number of allocations the search space contains.
    pub fn search_space(&self) -> u128 {
        self.hosts.iter().map(|(_, h)| h.len() as u128).product()
    }

    /// Allowed host count of the first algorithm branched on.
    pub fn root_branches(&self) -> usize {
        self.hosts.first().map_or(1, |(_, h)| h.len())
    }

    fn check_feasible(&self) -> Result<(), SolveError> {
        for (v, hs) in &self.hosts {
            if hs.is_empty() {
                return Err(SolveError::Infeasible(self.plan.graph().specs()[*v].id));
            }
        }
        Ok(())
    }

    fn allocation_from_hosts(&self, hosts: &[usize]) -> Allocation {
        let specs = self.plan.graph().specs();
        (0..hosts.len())
            .filter(|&v| hosts[v] != NONE && !specs[v].id.is_virtual())
            .map(|v| (specs[v].id, self.plan.node_id(hosts[v])))
            .collect()
    }
}

/// Full-model figures of one allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub distance: f64,
    pub per_robot_times: BTreeMap<NodeId, f64>,
    pub time_aggregate: f64,
    pub memory: MemoryReport,
}

struct Search<'a> {
    problem: &'a Problem,
    objective: JointObjective,
    use_memory: bool,
    pruning: bool,
    slack: f64,
    tie_eps: f64,
    shared: Option<&'a SharedIncumbent>,
    hosts: Vec<usize>,
    best: f64,
    best_key: Option<Vec<usize>>,
    trace: Vec<f64>,
    near: Vec<(f64, Vec<usize>)>,
    collect: Option<f64>,
    explored: u64,
    pruned: u64,
}

impl Search<'_> {
    fn bound(&self) -> f64 {
        let s = self.shared.map_or(f64::INFINITY, |s| s.get());
        self.best.min(s)
    }

    fn key(&self) -> Vec<usize> {
        let specs = self.problem.plan.graph().specs();
        (0..self.hosts.len()).filter(|&v| !specs[v].id.is_virtual()).map(|v| self.hosts[v]).collect()
    }

    fn leaf(&mut self, d: f64) {
        if let Some(eps) = self.collect {
            if d <= self.bound() + eps {
                let key = self.key();
                self.near.push((d, key));
            }
        }
        let better = d < self.best - self.tie_eps;
        let tie = !better && d <= self.best + self.tie_eps;
        if better || (tie && self.best_key.as_ref().is_none_or(|k| self.key() < *k)) {
            self.best = d;
            self.best_key = Some(self.key());
            self.trace.push(d);
            if let Some(s) = self.shared {
                s.offer(d);
            }
        }
    }

    fn run(
        &mut self,
        depth: usize,
        time: &mut crate::timemodel::IncrementalTime<'_>,
        mem: &mut crate::memmodel::IncrementalMemory<'_>,
        root: Option<usize>,
    ) {
        let problem = self.problem;
        if depth == problem.hosts.len() {
            let m = if self.use_memory { mem.max_usage() } else { 0.0 };
            let d = self.objective.distance(time.values().iter().copied(), m);
            self.leaf(d);
            return;
        }
        let (v, ref hs) = problem.hosts[depth];
        for (i, &h) in hs.iter().enumerate() {
            if depth == 0 && root.is_some_and(|r| r != i) {
                continue;
            }
            self.explored += 1;
            time.push(v, h);
            if self.use_memory {
                mem.push(v, h);
            }
            self.hosts[v] = h;
            let m = if self.use_memory { mem.max_usage() } else { 0.0 };
            let partial = self.objective.distance(time.values().iter().copied(), m);
            let limit = self.bound() + self.tie_eps + self.slack;
            if self.pruning && partial > limit {
                self.pruned += 1;
            } else {
                self.run(depth + 1, time, mem, root);
            }
            self.hosts[v] = NONE;
            if self.use_memory {
                mem.pop();
            }
            time.pop();
        }
    }
}

/// Options for one search call.
#[derive(Debug, Clone, Copy, Default)]
pub struct SearchScope<'a> {
    /// Only explore this child of the root.
    pub root: Option<usize>,
    pub shared: Option<&'a SharedIncumbent>,
}

/// Exact optimum of the joint objective.
pub fn solve(problem: &Problem) -> Result<SolveResult, SolveError> {
    solve_scoped(problem, SearchScope::default())
}

/// [`solve`] restricted to part of the tree and/or sharing its incumbent.
pub fn solve_scoped(problem: &Problem, scope: SearchScope<'_>) -> Result<SolveResult, SolveError> {
    problem.check_feasible()?;
    let objective = problem.objective()?;
    search(problem, objective, problem.config.weights.memory != 0.0, scope)
}

fn search(
    problem: &Problem,
    objective: JointObjective,
    use_memory: bool,
    scope: SearchScope<'_>,
) -> Result<SolveResult, SolveError> {
    problem.check_feasible()?;
    let cfg = &problem.config;
    let mut s = Search {
        problem,
        objective,
        use_memory,
        pruning: cfg.pruning,
        slack: cfg.collect_optima.unwrap_or(0.0),
        tie_eps: cfg.tie_eps,
        shared: scope.shared,
        hosts: vec![NONE; problem.plan.graph().len()],
        best: f64::INFINITY,
        best_key: None,
        trace: Vec::new(),
        near: Vec::new(),
        collect: cfg.collect_optima,
        explored: 0,
        pruned: 0,
    };
    // the baseline allocation is the first incumbent when it is allowed
    if let Ok(base) = problem.baseline_allocation() {
        if let Ok(ev) = problem.evaluate(&base, &objective) {
            let d =
                if use_memory { ev.distance } else { objective.distance(ev.per_robot_times.values().copied(), 0.0) };
            let in_scope = match scope.root {
                None => true,
                Some(r) => problem
                    .hosts
                    .first()
                    .is_none_or(|(_, h)| h.get(r).map(|&k| problem.plan.node_id(k)) == Some(objective.baseline_node)),
            };
            if in_scope {
                for (v, hs) in &problem.hosts {
                    if let Some(&k) = hs.iter().find(|&&k| problem.plan.node_id(k) == objective.baseline_node) {
                        s.hosts[*v] = k;
                    }
                }
                s.leaf(d);
                s.hosts.iter_mut().for_each(|h| *h = NONE);
                s.near.clear();
            }
        }
    }
    let mut time = problem.plan.incremental();
    let mut mem = problem.memory.incremental();
    s.run(0, &mut time, &mut mem, scope.root);
    let Some(key) = s.best_key.clone() else {
        // every branch of this scope was pruned against the shared bound
        return Ok(empty_result(objective, s.explored, s.pruned));
    };
    let best_alloc = key_to_allocation(problem, &key);
    let ev = problem.evaluate(&best_alloc, &objective)?;
    let distance = if use_memory { ev.distance } else { objective.distance(ev.per_robot_times.values().copied(), 0.0) };
    let mut optima = Vec::new();
    if let Some(eps) = cfg.collect_optima {
        let mut near: Vec<_> = s.near.iter().filter(|(d, _)| *d <= s.best + eps).map(|(_, k)| k.clone()).collect();
        near.sort();
        near.dedup();
        optima = near.iter().map(|k| key_to_allocation(problem, k)).collect();
    }
    Ok(SolveResult {
        best_alloc,
        distance,
        per_robot_times: ev.per_robot_times,
        time_aggregate: ev.time_aggregate,
        memory: ev.memory,
        objective,
        nodes_explored: s.explored,
        pruned: s.pruned,
        wall_time: 0.0,
        incumbent_trace: s.trace,
        optima,
    })
}

fn empty_result(objective: JointObjective, explored: u64, pruned: u64) -> SolveResult {
    SolveResult {
        best_alloc: Allocation::new(),
        distance: f64::INFINITY,
        per_robot_times: BTreeMap::new(),
        time_aggregate: f64::INFINITY,
        memory: MemoryReport::from_loads(BTreeMap::new()),
        objective,
        nodes_explored: explored,
        pruned,
        wall_time: 0.0,
        incumbent_trace: Vec::new(),
        optima: Vec::new(),
    }
}

fn key_to_allocation(problem: &Problem, key: &[usize]) -> Allocation {
    let specs = problem.plan.graph().specs();
    let mut hosts = vec![NONE; specs.len()];
    let real: Vec<usize> = (0..specs.len()).filter(|&v| !specs[v].id.is_virtual()).collect();
    for (&v, &k) in real.iter().zip(key) {
        hosts[v] = k;
    }
    problem.allocation_from_hosts(&hosts)
}

/// Picks the better of two partial results: lower distance, then smaller key.
pub fn merge_results(a: SolveResult, b: SolveResult, tie_eps: f64) -> SolveResult {
    let (explored, pruned) = (a.nodes_explored + b.nodes_explored, a.pruned + b.pruned);
    let a_wins = if (a.distance - b.distance).abs() <= tie_eps {
        a.best_alloc.key() <= b.best_alloc.key() || b.best_alloc.is_empty()
    } else {
        a.distance < b.distance
    };
    let (mut win, lose) = if a_wins { (a, b) } else { (b, a) };
    if win.best_alloc.is_empty() && !lose.best_alloc.is_empty() {
        win = lose.clone();
    }
    win.nodes_explored = explored;
    win.pruned = pruned;
    let mut optima: Vec<Allocation> = win.optima.iter().chain(&lose.optima).cloned().collect();
    optima.sort_by_key(|a| a.key());
    optima.dedup();
    win.optima = optima;
    win
}

/// Baseline: the same search, but timing ignores output-return
/// transmissions and memory is left out. The allocation found is then
/// scored under the full objective of `problem`.
pub fn solve_baseline_li2018(problem: &Problem) -> Result<SolveResult, SolveError> {
    let mut cfg = problem.config.clone();
    cfg.time.output_return = false;
    cfg.weights.memory = 0.0;
    cfg.collect_optima = None;
    let reduced = problem.with_config(cfg)?;
    let objective = reduced.objective()?;
    let found = search(&reduced, objective, false, SearchScope::default())?;
    let full = problem.objective()?;
    let ev = problem.evaluate(&found.best_alloc, &full)?;
    Ok(SolveResult {
        distance: ev.distance,
        per_robot_times: ev.per_robot_times,
        time_aggregate: ev.time_aggregate,
        memory: ev.memory,
        objective: full,
        ..found
    })
}

/// Evaluates every feasible allocation with the non-incremental evaluator.
pub fn enumerate_oracle(problem: &Problem) -> Result<SolveResult, SolveError> {
    problem.check_feasible()?;
    let size = problem.search_space();
    let cap = problem.config.oracle_cap;
    if size > cap as u128 {
        return Err(SolveError::OracleTooLarge { size, cap });
    }
    let objective = problem.objective()?;
    let real: Vec<(AlgorithmId, Vec<NodeId>)> = problem
        .hosts
        .iter()
        .map(|(v, hs)| (problem.plan.graph().specs()[*v].id, hs.iter().map(|&k| problem.plan.node_id(k)).collect()))
        .collect();
    let mut digits = vec![0usize; real.len()];
    let mut best: Option<(f64, Allocation, Evaluation)> = None;
    let mut explored = 0u64;
    let tie = problem.config.tie_eps;
    loop {
        let alloc: Allocation = real.iter().zip(&digits).map(|((id, hs), &d)| (*id, hs[d])).collect();
        let ev = problem.evaluate(&alloc, &objective)?;
        explored += 1;
        let replace = match &best {
            None => true,
            Some((d, a, _)) => ev.distance < d - tie || (ev.distance <= d + tie && alloc.key() < a.key()),
        };
        if replace {
            best = Some((ev.distance, alloc, ev));
        }
        // odometer step
        let mut i = 0;
        loop {
            if i == digits.len() {
                let (distance, best_alloc, ev) = best.expect("at least one allocation");
                return Ok(SolveResult {
                    best_alloc,
                    distance,
                    per_robot_times: ev.per_robot_times,
                    time_aggregate: ev.time_aggregate,
                    memory: ev.memory,
                    objective,
                    nodes_explored: explored,
                    pruned: 0,
                    wall_time: 0.0,
                    incumbent_trace: Vec::new(),
                    optima: Vec::new(),
                });
            }
            digits[i] += 1;
            if digits[i] < real[i].1.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Staged procedure for robots split into classes that run different
/// algorithm sets.
///
/// `usage[i]` lists the algorithms class `classes[i]` runs. Stage by stage,
/// over unions of classes of growing size, the algorithms used by exactly
/// that union are placed by [`solve`] on the union's robots plus fog and
/// cloud, with only those robots initiating requests. The combined allocation
/// is scored under the full objective; it is not guaranteed optimal.
pub fn solve_heterogeneous(
    problem: &Problem,
    classes: &[BTreeSet<NodeId>],
    usage: &[BTreeSet<AlgorithmId>],
) -> Result<SolveResult, SolveError> {
    if classes.len() != usage.len() || classes.is_empty() {
        return Err(SolveError::InvalidClasses("one algorithm set per class is required"));
    }
    if classes.len() > 20 {
        return Err(SolveError::InvalidClasses("at most 20 classes"));
    }
    let edges: BTreeSet<NodeId> = problem.arch.nodes_of(NodeClass::Edge).collect();
    let mut covered = BTreeSet::new();
    for c in classes {
        if c.is_empty() || c.iter().any(|r| !edges.contains(r) || !covered.insert(*r)) {
            return Err(SolveError::InvalidClasses("classes must be disjoint non-empty sets of edge nodes"));
        }
    }
    if covered != edges {
        return Err(SolveError::InvalidClasses("classes must cover every edge node"));
    }
    let used_by = |id: AlgorithmId| -> u32 {
        usage.iter().enumerate().filter(|(_, u)| u.contains(&id)).fold(0, |m, (i, _)| m | (1 << i))
    };
    let all: Vec<AlgorithmId> = problem.graph.real_ids().collect();
    if let Some(id) = all.iter().find(|id| used_by(**id) == 0) {
        return Err(SolveError::Infeasible(*id));
    }
    let mut masks: Vec<u32> = (1..(1u32 << classes.len())).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let mut alloc = Allocation::new();
    let (mut explored, mut pruned) = (0, 0);
    for mask in masks {
        let stage: BTreeSet<AlgorithmId> = all.iter().copied().filter(|id| used_by(*id) == mask).collect();
        if stage.is_empty() {
            continue;
        }
        let robots: BTreeSet<NodeId> =
            (0..classes.len()).filter(|i| mask & (1 << i) != 0).flat_map(|i| classes[i].iter().copied()).collect();
        let sub_graph = problem.graph.induced_subgraph(&stage);
        let sub = Problem::new(&sub_graph, &problem.arch, &problem.profile, problem.config.clone())?.scoped(&robots)?;
        let r = solve(&sub)?;
        explored += r.nodes_explored;
        pruned += r.pruned;
        for (id, node) in r.best_alloc.iter() {
            alloc.insert(id, node);
        }
    }
    let objective = problem.objective()?;
    let ev = problem.evaluate(&alloc, &objective)?;
    Ok(SolveResult {
        best_alloc: alloc,
        distance: ev.distance,
        per_robot_times: ev.per_robot_times,
        time_aggregate: ev.time_aggregate,
        memory: ev.memory,
        objective,
        nodes_explored: explored,
        pruned,
        wall_time: 0.0,
        incumbent_trace: Vec::new(),
        optima: Vec::new(),
    })
}
