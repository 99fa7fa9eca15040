//! Robot memory usage and memory balancing.
//!
//! A robot stores every algorithm output (`TO`), its own overhead (`TM`) and
//! the working memory of the algorithms it hosts. Hosted memory is either a
//! plain sum or the memory algebra: processing memory of algorithms that may
//! run concurrently adds up, that of algorithms in sequence does not.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::algograph::{AlgorithmGraph, AlgorithmId, Reachability};
use crate::architecture::{Architecture, NodeClass, NodeId, RobotPartition, RouteTable};
use crate::timemodel::Allocation;

/// Item count above which [`BalanceMethod::Auto`] switches to LPT.
pub const EXACT_BALANCE_LIMIT: usize = 20;

const EPS: f64 = 1e-9;

/// Memory figures of one algorithm, in bytes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AlgorithmMemory {
    pub processing: f64,
    /// Input that has to come from fog or cloud.
    pub input_external: f64,
    /// Input already present on the robots.
    pub input_internal: f64,
    pub output: f64,
}

impl AlgorithmMemory {
    pub fn new(processing: f64, input_external: f64, input_internal: f64, output: f64) -> Self {
        AlgorithmMemory { processing, input_external, input_internal, output }
    }

    /// Load of the algorithm when memories are simply added.
    pub fn simple_load(&self) -> f64 {
        self.processing + self.input_external + self.input_internal
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MemoryProfile {
    pub algorithms: BTreeMap<AlgorithmId, AlgorithmMemory>,
    /// Per-robot overhead; missing robots count as 0.
    pub overhead: BTreeMap<NodeId, f64>,
}

impl MemoryProfile {
    /// Reads sizes from the specs, converting bits to bytes.
    pub fn from_graph(g: &AlgorithmGraph) -> Self {
        let algorithms = g
            .specs()
            .iter()
            .filter(|s| !s.id.is_virtual())
            .map(|s| {
                let m = AlgorithmMemory::new(
                    s.processing_bytes,
                    s.input_external_bits / 8.0,
                    s.input_internal_bits / 8.0,
                    s.output_bits / 8.0,
                );
                (s.id, m)
            })
            .collect();
        MemoryProfile { algorithms, overhead: BTreeMap::new() }
    }

    pub fn with_overhead(mut self, robot: NodeId, bytes: f64) -> Self {
        self.overhead.insert(robot, bytes);
        self
    }

    pub fn get(&self, id: AlgorithmId) -> AlgorithmMemory {
        self.algorithms.get(&id).copied().unwrap_or_default()
    }

    /// `TO`: all outputs, kept on every robot.
    pub fn output_total(&self) -> f64 {
        self.algorithms.values().map(|m| m.output).sum()
    }

    pub fn overhead_of(&self, robot: NodeId) -> f64 {
        self.overhead.get(&robot).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Combine {
    #[default]
    SimpleSum,
    Algebra,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemoryReport {
    pub per_robot: BTreeMap<NodeId, f64>,
    pub max_usage: f64,
    pub total: f64,
    pub variance_term: f64,
}

impl MemoryReport {
    pub fn from_loads(per_robot: BTreeMap<NodeId, f64>) -> Self {
        let total: f64 = per_robot.values().sum();
        let max_usage = per_robot.values().copied().fold(0.0, f64::max);
        let mean = if per_robot.is_empty() { 0.0 } else { total / per_robot.len() as f64 };
        let variance_term = per_robot.values().map(|m| (m - mean) * (m - mean)).sum();
        MemoryReport { per_robot, max_usage, total, variance_term }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MemoryError {
    #[error("externally fed algorithms need a robot linked to a fog node, but there is none")]
    InfeasibleMemoryPlacement,
    #[error("at least one bin is required")]
    NoBins,
    #[error("expected {expected} initial loads, got {got}")]
    PriorLength { expected: usize, got: usize },
    #[error("bin index {0} out of range")]
    BadBin(usize),
    #[error("memory values must be finite and non-negative")]
    InvalidValue,
}

/// Largest total weight of a set of pairwise incomparable items.
pub fn max_weight_antichain<F: Fn(usize, usize) -> bool>(weights: &[f64], comparable: F) -> f64 {
    let n = weights.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]));
    let conflicts: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i != j && comparable(i, j)).collect()).collect();
    let mut best = 0.0;
    let mut chosen = Vec::new();
    antichain_dfs(&order, 0, weights, &conflicts, &mut chosen, 0.0, &mut best);
    best
}

fn antichain_dfs(
    order: &[usize],
    i: usize,
    w: &[f64],
    conflicts: &[Vec<bool>],
    chosen: &mut Vec<usize>,
    acc: f64,
    best: &mut f64,
) {
    if acc > *best {
        *best = acc;
    }
    if i == order.len() {
        return;
    }
    let rest: f64 = order[i..].iter().filter(|&&v| chosen.iter().all(|&c| !conflicts[c][v])).map(|&v| w[v]).sum();
    if acc + rest <= *best {
        return;
    }
    let v = order[i];
    if chosen.iter().all(|&c| !conflicts[c][v]) {
        chosen.push(v);
        antichain_dfs(order, i + 1, w, conflicts, chosen, acc + w[v], best);
        chosen.pop();
    }
    antichain_dfs(order, i + 1, w, conflicts, chosen, acc, best);
}

/// Memory algebra over `g`: the heaviest set of mutually parallel
/// processing memories, plus all external inputs.
pub fn memory_algebra(g: &AlgorithmGraph, profile: &MemoryProfile) -> f64 {
    let ids: Vec<AlgorithmId> = g.real_ids().collect();
    let reach = g.reachability();
    let weights: Vec<f64> = ids.iter().map(|id| profile.get(*id).processing).collect();
    let processing = max_weight_antichain(&weights, |i, j| reach.comparable(ids[i], ids[j]));
    processing + ids.iter().map(|id| profile.get(*id).input_external).sum::<f64>()
}

/// Edge nodes that forward external input to `robot`: the interior edge
/// nodes of the cheapest route from the nearest fog (or cloud, without fog).
/// Empty for robots linked directly to a fog node.
pub fn relay_nodes(arch: &Architecture, routes: &RouteTable, robot: NodeId) -> Vec<NodeId> {
    let Some(rp) = arch.position(robot) else {
        return Vec::new();
    };
    if arch.partition_robots().tr0.contains(&robot) {
        return Vec::new();
    }
    let mut sources: Vec<usize> = (0..arch.len()).filter(|&k| arch.nodes()[k].class == NodeClass::Fog).collect();
    if sources.is_empty() {
        sources = (0..arch.len()).filter(|&k| arch.nodes()[k].class == NodeClass::Cloud).collect();
    }
    let best = sources
        .into_iter()
        .filter(|&s| routes.is_reachable(s, rp))
        .min_by(|&a, &b| routes.expected(a, rp, 0.0).total_cmp(&routes.expected(b, rp, 0.0)));
    let Some(src) = best else {
        return Vec::new();
    };
    let hops = routes.hops(src, rp).unwrap_or(&[]);
    let links = arch.links();
    let mut out = Vec::new();
    for &li in hops {
        let to = links[li].to;
        if to != robot && arch.class_of(to) == Some(NodeClass::Edge) {
            out.push(to);
        }
    }
    out
}

/// Memory evaluation bound to one graph and architecture.
#[derive(Debug, Clone)]
pub struct MemoryModel {
    combine: Combine,
    /// edge node positions in the architecture
    robots: Vec<usize>,
    robot_ids: Vec<NodeId>,
    /// architecture position -> robot index
    robot_of: Vec<Option<usize>>,
    /// graph position -> memory
    mem: Vec<AlgorithmMemory>,
    ids: Vec<AlgorithmId>,
    base: Vec<f64>,
    relays: Vec<Vec<usize>>,
    reach: Reachability,
}

impl MemoryModel {
    pub fn new(g: &AlgorithmGraph, arch: &Architecture, profile: &MemoryProfile, combine: Combine) -> Self {
        let routes = arch.routes().expect("routes of a valid architecture");
        Self::with_routes(g, arch, &routes, profile, combine)
    }

    pub(crate) fn with_routes(
        g: &AlgorithmGraph,
        arch: &Architecture,
        routes: &RouteTable,
        profile: &MemoryProfile,
        combine: Combine,
    ) -> Self {
        let robots: Vec<usize> = (0..arch.len()).filter(|&k| arch.nodes()[k].class == NodeClass::Edge).collect();
        let robot_ids: Vec<NodeId> = robots.iter().map(|&k| arch.nodes()[k].id).collect();
        let mut robot_of = vec![None; arch.len()];
        for (r, &k) in robots.iter().enumerate() {
            robot_of[k] = Some(r);
        }
        let to = profile.output_total();
        let base = robot_ids.iter().map(|&id| to + profile.overhead_of(id)).collect();
        let relays = robot_ids
            .iter()
            .map(|&id| {
                relay_nodes(arch, routes, id)
                    .into_iter()
                    .filter_map(|n| arch.position(n).and_then(|k| robot_of[k]))
                    .collect()
            })
            .collect();
        let ids: Vec<AlgorithmId> = g.ids().collect();
        let mem =
            ids.iter().map(|&id| if id.is_virtual() { AlgorithmMemory::default() } else { profile.get(id) }).collect();
        MemoryModel { combine, robots, robot_ids, robot_of, mem, ids, base, relays, reach: g.reachability() }
    }

    /// Only `robots` count towards the report.
    pub fn restrict_robots(&mut self, robots: &BTreeSet<NodeId>) {
        let keep: Vec<usize> = (0..self.robot_ids.len()).filter(|&r| robots.contains(&self.robot_ids[r])).collect();
        let mut remap = vec![None; self.robot_ids.len()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = Some(new);
        }
        self.relays = keep.iter().map(|&r| self.relays[r].iter().filter_map(|&x| remap[x]).collect()).collect();
        self.base = keep.iter().map(|&r| self.base[r]).collect();
        self.robots = keep.iter().map(|&r| self.robots[r]).collect();
        self.robot_ids = keep.iter().map(|&r| self.robot_ids[r]).collect();
        for slot in self.robot_of.iter_mut() {
            *slot = slot.and_then(|r| remap[r]);
        }
    }

    pub fn robots(&self) -> &[NodeId] {
        &self.robot_ids
    }

    fn hosted_load(&self, hosted: &[usize]) -> f64 {
        match self.combine {
            Combine::SimpleSum => hosted.iter().map(|&v| self.mem[v].simple_load()).sum(),
            Combine::Algebra => {
                let w: Vec<f64> = hosted.iter().map(|&v| self.mem[v].processing).collect();
                let ac = max_weight_antichain(&w, |i, j| {
                    self.reach.reaches_pos(hosted[i], hosted[j]) || self.reach.reaches_pos(hosted[j], hosted[i])
                });
                ac + hosted.iter().map(|&v| self.mem[v].input_external).sum::<f64>()
            }
        }
    }

    fn loads(&self, placed: &[(usize, usize)]) -> Vec<f64> {
        let mut hosted = vec![Vec::new(); self.robots.len()];
        let mut loads = self.base.clone();
        for &(v, k) in placed {
            if let Some(r) = self.robot_of.get(k).copied().flatten() {
                hosted[r].push(v);
                let ext = self.mem[v].input_external;
                if ext > 0.0 {
                    for &rr in &self.relays[r] {
                        loads[rr] += ext;
                    }
                }
            }
        }
        for (r, h) in hosted.iter().enumerate() {
            loads[r] += self.hosted_load(h);
        }
        loads
    }

    fn placed(&self, alloc: &Allocation, arch: &Architecture) -> Vec<(usize, usize)> {
        alloc
            .iter()
            .filter_map(|(id, node)| {
                let v = self.ids.binary_search(&id).ok()?;
                Some((v, arch.position(node)?))
            })
            .collect()
    }

    pub fn report(&self, alloc: &Allocation, arch: &Architecture) -> MemoryReport {
        let loads = self.loads(&self.placed(alloc, arch));
        MemoryReport::from_loads(self.robot_ids.iter().copied().zip(loads).collect())
    }

    pub fn robot_memory(&self, alloc: &Allocation, arch: &Architecture, robot: NodeId) -> Option<f64> {
        let r = self.robot_ids.iter().position(|&x| x == robot)?;
        Some(self.loads(&self.placed(alloc, arch))[r])
    }

    pub(crate) fn incremental(&self) -> IncrementalMemory<'_> {
        IncrementalMemory {
            model: self,
            hosted: vec![Vec::new(); self.robots.len()],
            hosted_load: vec![0.0; self.robots.len()],
            relay_load: vec![0.0; self.robots.len()],
            undo: Vec::new(),
        }
    }
}

/// Push/pop memory tracker for the search.
#[derive(Debug)]
pub(crate) struct IncrementalMemory<'a> {
    model: &'a MemoryModel,
    hosted: Vec<Vec<usize>>,
    hosted_load: Vec<f64>,
    relay_load: Vec<f64>,
    undo: Vec<Option<(usize, f64, Vec<f64>)>>,
}

impl IncrementalMemory<'_> {
    pub(crate) fn push(&mut self, v: usize, k: usize) {
        let m = self.model;
        let Some(r) = m.robot_of.get(k).copied().flatten() else {
            self.undo.push(None);
            return;
        };
        let old_relay: Vec<f64> = m.relays[r].iter().map(|&rr| self.relay_load[rr]).collect();
        let old = self.hosted_load[r];
        self.hosted[r].push(v);
        self.hosted_load[r] = match m.combine {
            Combine::SimpleSum => old + m.mem[v].simple_load(),
            Combine::Algebra => m.hosted_load(&self.hosted[r]),
        };
        let ext = m.mem[v].input_external;
        if ext > 0.0 {
            for &rr in &m.relays[r] {
                self.relay_load[rr] += ext;
            }
        }
        self.undo.push(Some((r, old, old_relay)));
    }

    pub(crate) fn pop(&mut self) {
        if let Some((r, old, old_relay)) = self.undo.pop().expect("pop without push") {
            self.hosted[r].pop();
            self.hosted_load[r] = old;
            for (&rr, v) in self.model.relays[r].iter().zip(old_relay) {
                self.relay_load[rr] = v;
            }
        }
    }

    pub(crate) fn max_usage(&self) -> f64 {
        (0..self.hosted.len())
            .map(|r| self.model.base[r] + self.hosted_load[r] + self.relay_load[r])
            .fold(0.0, f64::max)
    }
}

/// One-shot `MU` of `robot`.
pub fn robot_memory(
    g: &AlgorithmGraph,
    arch: &Architecture,
    profile: &MemoryProfile,
    alloc: &Allocation,
    robot: NodeId,
    combine: Combine,
) -> Option<f64> {
    MemoryModel::new(g, arch, profile, combine).robot_memory(alloc, arch, robot)
}

/// One-shot report over all robots.
pub fn memory_report(
    g: &AlgorithmGraph,
    arch: &Architecture,
    profile: &MemoryProfile,
    alloc: &Allocation,
    combine: Combine,
) -> MemoryReport {
    MemoryModel::new(g, arch, profile, combine).report(alloc, arch)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BalanceMethod {
    /// Exact up to [`EXACT_BALANCE_LIMIT`] items, LPT beyond.
    #[default]
    Auto,
    Exact,
    Lpt,
}

/// Bin index per value, and the resulting bin loads.
#[derive(Debug, Clone, PartialEq)]
pub struct Balanced {
    pub assignment: Vec<usize>,
    pub loads: Vec<f64>,
}

fn check_inputs(values: &[f64], initial: &[f64]) -> Result<(), MemoryError> {
    if initial.is_empty() {
        return Err(MemoryError::NoBins);
    }
    if values.iter().chain(initial).any(|v| !v.is_finite() || *v < 0.0) {
        return Err(MemoryError::InvalidValue);
    }
    Ok(())
}

fn loads_of(values: &[f64], initial: &[f64], assignment: &[usize]) -> Vec<f64> {
    let mut loads = initial.to_vec();
    for (v, &b) in values.iter().zip(assignment) {
        loads[b] += v;
    }
    loads
}

fn sum_sq(loads: &[f64]) -> f64 {
    loads.iter().map(|l| l * l).sum()
}

fn max_of(loads: &[f64]) -> f64 {
    loads.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Distributes `values` over bins that start at `initial`, minimizing the
/// variance of the final loads (then the largest load, then the assignment
/// vector lexicographically).
pub fn balance(values: &[f64], initial: &[f64], method: BalanceMethod) -> Result<Balanced, MemoryError> {
    check_inputs(values, initial)?;
    let exact = match method {
        BalanceMethod::Exact => true,
        BalanceMethod::Lpt => false,
        BalanceMethod::Auto => values.len() <= EXACT_BALANCE_LIMIT,
    };
    let assignment = if exact { exact_assignment(values, initial) } else { lpt_assignment(values, initial) };
    let loads = loads_of(values, initial, &assignment);
    Ok(Balanced { assignment, loads })
}

/// Longest processing time first: largest value to the least loaded bin,
/// ties to the lowest bin index.
pub fn lpt_assignment(values: &[f64], initial: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut loads = initial.to_vec();
    let mut out = vec![0; values.len()];
    for i in order {
        let mut bin = 0;
        for b in 1..loads.len() {
            if loads[b] < loads[bin] {
                bin = b;
            }
        }
        loads[bin] += values[i];
        out[i] = bin;
    }
    out
}

/// Lower bounds on (sum of squares, max) when `rest` is spread continuously
/// over `loads`, filling the lowest bins first.
fn water_fill(loads: &[f64], rest: f64) -> (f64, f64) {
    let mut sorted = loads.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut remaining = rest;
    let mut level = sorted[0];
    let mut k = 1;
    while remaining > 0.0 {
        let next = if k < n { sorted[k] } else { f64::INFINITY };
        let room = (next - level) * k as f64;
        if room >= remaining {
            level += remaining / k as f64;
            remaining = 0.0;
        } else {
            remaining -= room;
            level = next;
            k += 1;
        }
    }
    let ssq: f64 = sorted.iter().map(|&l| if l < level { level * level } else { l * l }).sum();
    (ssq, level.max(sorted[n - 1]))
}

#[derive(Clone, Copy)]
struct Score {
    ssq: f64,
    max: f64,
}

impl Score {
    fn tol(self) -> f64 {
        EPS * (1.0 + self.ssq.abs())
    }

    fn better(self, other: Score) -> bool {
        let t = other.tol();
        self.ssq < other.ssq - t || (self.ssq <= other.ssq + t && self.max < other.max - EPS * (1.0 + other.max.abs()))
    }

    /// A bound that can still reach `target`.
    fn admits(bound: (f64, f64), target: Score) -> bool {
        let t = target.tol();
        bound.0 <= target.ssq + t
            && (bound.0 < target.ssq - t || bound.1 <= target.max + EPS * (1.0 + target.max.abs()))
    }

    fn matches(self, target: Score) -> bool {
        (self.ssq - target.ssq).abs() <= target.tol() && (self.max - target.max).abs() <= EPS * (1.0 + target.max.abs())
    }
}

/// Optimal (sum of squares, max) over all assignments.
fn exact_score(values: &[f64], initial: &[f64]) -> Score {
    let lpt = loads_of(values, initial, &lpt_assignment(values, initial));
    let mut best = Score { ssq: sum_sq(&lpt), max: max_of(&lpt) };
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let mut suffix = vec![0.0; sorted.len() + 1];
    for i in (0..sorted.len()).rev() {
        suffix[i] = suffix[i + 1] + sorted[i];
    }
    let mut loads = initial.to_vec();
    score_dfs(&sorted, &suffix, 0, &mut loads, &mut best);
    best
}

fn score_dfs(values: &[f64], suffix: &[f64], i: usize, loads: &mut [f64], best: &mut Score) {
    if i == values.len() {
        let s = Score { ssq: sum_sq(loads), max: max_of(loads) };
        if s.better(*best) {
            *best = s;
        }
        return;
    }
    if !Score::admits(water_fill(loads, suffix[i]), *best) {
        return;
    }
    for b in 0..loads.len() {
        // bins with equal loads are interchangeable
        if (0..b).any(|c| loads[c] == loads[b]) {
            continue;
        }
        loads[b] += values[i];
        score_dfs(values, suffix, i + 1, loads, best);
        loads[b] -= values[i];
    }
}

fn exact_assignment(values: &[f64], initial: &[f64]) -> Vec<usize> {
    let target = exact_score(values, initial);
    let mut found = Vec::new();
    let mut assignment = Vec::with_capacity(values.len());
    let mut loads = initial.to_vec();
    optima_dfs(values, &suffix_sums(values), &mut loads, &mut assignment, target, true, 1, &mut found);
    found.pop().expect("the optimal score is attainable")
}

fn suffix_sums(values: &[f64]) -> Vec<f64> {
    let mut suffix = vec![0.0; values.len() + 1];
    for i in (0..values.len()).rev() {
        suffix[i] = suffix[i + 1] + values[i];
    }
    suffix
}

/// Assignments in original item order reaching `target`, lexicographically.
/// With `skip_symmetric` a bin is not tried when an earlier bin with the
/// same load already failed; this keeps the first hit but drops duplicates.
#[allow(clippy::too_many_arguments)]
fn optima_dfs(
    values: &[f64],
    suffix: &[f64],
    loads: &mut [f64],
    assignment: &mut Vec<usize>,
    target: Score,
    skip_symmetric: bool,
    limit: usize,
    found: &mut Vec<Vec<usize>>,
) -> bool {
    let i = assignment.len();
    if i == values.len() {
        if (Score { ssq: sum_sq(loads), max: max_of(loads) }).matches(target) {
            found.push(assignment.clone());
            return true;
        }
        return false;
    }
    if !Score::admits(water_fill(loads, suffix[i]), target) {
        return false;
    }
    let mut any = false;
    let mut failed_loads: Vec<f64> = Vec::new();
    for b in 0..loads.len() {
        if skip_symmetric && failed_loads.contains(&loads[b]) {
            continue;
        }
        if loads[b] + values[i] > target.max + EPS * (1.0 + target.max.abs()) {
            continue;
        }
        let before = loads[b];
        loads[b] += values[i];
        assignment.push(b);
        let hit = optima_dfs(values, suffix, loads, assignment, target, skip_symmetric, limit, found);
        assignment.pop();
        loads[b] -= values[i];
        any |= hit;
        if found.len() >= limit {
            return true;
        }
        if !hit {
            failed_loads.push(before);
        }
    }
    any
}

/// Every optimal assignment (up to `limit`), lexicographically ordered.
pub fn balance_optima(values: &[f64], initial: &[f64], limit: usize) -> Result<Vec<Balanced>, MemoryError> {
    check_inputs(values, initial)?;
    let target = exact_score(values, initial);
    let mut found = Vec::new();
    let mut loads = initial.to_vec();
    optima_dfs(values, &suffix_sums(values), &mut loads, &mut Vec::new(), target, false, limit, &mut found);
    Ok(found
        .into_iter()
        .map(|assignment| {
            let loads = loads_of(values, initial, &assignment);
            Balanced { assignment, loads }
        })
        .collect())
}

/// Result of the two-stage balance.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedBalance {
    /// bin per restricted value (always a `tr0` bin)
    pub restricted: Vec<usize>,
    pub unrestricted: Vec<usize>,
    /// loads after the first stage
    pub stage_one: Vec<f64>,
    pub loads: Vec<f64>,
}

/// Restricted values go to the bins in `tr0` first; the rest is then
/// balanced over all bins with the first-stage loads as priors.
pub fn balance_restricted_values(
    restricted: &[f64],
    unrestricted: &[f64],
    initial: &[f64],
    tr0: &[usize],
    method: BalanceMethod,
) -> Result<RestrictedBalance, MemoryError> {
    check_inputs(restricted, initial)?;
    if let Some(&b) = tr0.iter().find(|&&b| b >= initial.len()) {
        return Err(MemoryError::BadBin(b));
    }
    let mut stage_one = initial.to_vec();
    let mut restricted_bins = Vec::new();
    if !restricted.is_empty() {
        if tr0.is_empty() {
            return Err(MemoryError::InfeasibleMemoryPlacement);
        }
        let priors: Vec<f64> = tr0.iter().map(|&b| initial[b]).collect();
        let first = balance(restricted, &priors, method)?;
        restricted_bins = first.assignment.iter().map(|&i| tr0[i]).collect();
        for (v, &b) in restricted.iter().zip(&restricted_bins) {
            stage_one[b] += v;
        }
    }
    let second = balance(unrestricted, &stage_one, method)?;
    Ok(RestrictedBalance {
        restricted: restricted_bins,
        unrestricted: second.assignment,
        stage_one,
        loads: second.loads,
    })
}

/// Memory-only placement of the given algorithms onto robots. Algorithms
/// with external input are restricted to robots linked to a fog node.
pub fn balance_restricted(
    profile: &MemoryProfile,
    partition: &RobotPartition,
    algorithms: &BTreeSet<AlgorithmId>,
    method: BalanceMethod,
) -> Result<Allocation, MemoryError> {
    let robots: Vec<NodeId> =
        partition.tr0.iter().chain(&partition.tr_inf).copied().collect::<BTreeSet<_>>().into_iter().collect();
    if robots.is_empty() {
        return Err(MemoryError::NoBins);
    }
    let tr0: Vec<usize> = (0..robots.len()).filter(|&i| partition.tr0.contains(&robots[i])).collect();
    let (restricted, unrestricted): (Vec<AlgorithmId>, Vec<AlgorithmId>) =
        algorithms.iter().partition(|id| profile.get(**id).input_external > 0.0);
    let load = |ids: &[AlgorithmId]| ids.iter().map(|id| profile.get(*id).simple_load()).collect::<Vec<_>>();
    let initial: Vec<f64> = robots.iter().map(|&r| profile.overhead_of(r)).collect();
    let res = balance_restricted_values(&load(&restricted), &load(&unrestricted), &initial, &tr0, method)?;
    let mut alloc = Allocation::new();
    for (id, b) in restricted.iter().zip(&res.restricted).chain(unrestricted.iter().zip(&res.unrestricted)) {
        alloc.insert(*id, robots[*b]);
    }
    Ok(alloc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn water_fill_bounds() {
        let (ssq, max) = water_fill(&[0.0, 0.0], 4.0);
        assert_eq!((ssq, max), (8.0, 2.0));
        let (ssq, max) = water_fill(&[5.0, 1.0], 2.0);
        assert_eq!((ssq, max), (34.0, 5.0));
        let (ssq, _) = water_fill(&[3.0, 1.0, 1.0], 0.0);
        assert_eq!(ssq, 11.0);
    }

    #[test]
    fn lpt_ties_go_low() {
        assert_eq!(lpt_assignment(&[3.0, 3.0, 2.0], &[0.0, 0.0]), vec![0, 1, 0]);
    }

    #[test]
    fn exact_simple_split() {
        let b = balance(&[8.0, 7.0, 6.0, 5.0], &[0.0, 0.0], BalanceMethod::Exact).unwrap();
        assert_eq!(b.loads, vec![13.0, 13.0]);
        assert_eq!(b.assignment, vec![0, 1, 1, 0]);
    }

    #[test]
    fn few_values_get_their_own_bins() {
        let b = balance(&[3.0, 1.0, 2.0], &[0.0; 5], BalanceMethod::Exact).unwrap();
        let mut loads = b.loads.clone();
        loads.sort_by(f64::total_cmp);
        assert_eq!(loads, vec![0.0, 0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn restricted_needs_tr0() {
        let e = balance_restricted_values(&[1.0], &[], &[0.0, 0.0], &[], BalanceMethod::Exact);
        assert_eq!(e.unwrap_err(), MemoryError::InfeasibleMemoryPlacement);
        let r = balance_restricted_values(&[9.0], &[], &[0.0, 100.0], &[1], BalanceMethod::Exact).unwrap();
        assert_eq!(r.restricted, vec![1]);
    }

    #[test]
    fn antichain_chain_and_parallel() {
        let w = [5.0, 9.0, 7.0];
        assert_eq!(max_weight_antichain(&w, |_, _| true), 9.0);
        assert_eq!(max_weight_antichain(&w, |_, _| false), 21.0);
        // 0 < 1, 2 parallel to both
        assert_eq!(max_weight_antichain(&w, |i, j| (i.min(j), i.max(j)) == (0, 1)), 16.0);
    }
}
