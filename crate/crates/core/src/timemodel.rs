//! Response-time model.
//!
//! For an initiating robot `e`, the virtual source and sink sit on `e`. Each
//! algorithm `i` waits for the outputs of its predecessors (`T1`, the latest
//! predecessor output delivered to the host of `i`) plus the transmission of
//! every intermediate payload `S_ji` (`T2`), then runs once its host is free.
//! A robot's final time is the moment the last algorithm output reaches it.
//! Robots are aggregated with the Euclidean norm.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::algograph::{heights, AlgorithmGraph, AlgorithmId, GraphError, DEFAULT_FLOW_CAP};
use crate::architecture::{ArchError, Architecture, NodeClass, NodeId, RouteTable};
use crate::float;
use crate::SeededRng;

pub(crate) const NONE: usize = usize::MAX;

/// Total map from (non-virtual) algorithms to hosting nodes.
#[derive(Debug, Clone, PartialEq, Eq, Default, PartialOrd, Ord, Hash)]
pub struct Allocation {
    map: BTreeMap<AlgorithmId, NodeId>,
}

impl Allocation {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every real algorithm of `g` on `node`.
    pub fn all_on(g: &AlgorithmGraph, node: NodeId) -> Self {
        g.real_ids().map(|id| (id, node)).collect()
    }

    pub fn insert(&mut self, id: AlgorithmId, node: NodeId) -> Option<NodeId> {
        self.map.insert(id, node)
    }

    pub fn with(mut self, id: AlgorithmId, node: NodeId) -> Self {
        self.map.insert(id, node);
        self
    }

    pub fn remove(&mut self, id: AlgorithmId) -> Option<NodeId> {
        self.map.remove(&id)
    }

    pub fn get(&self, id: AlgorithmId) -> Option<NodeId> {
        self.map.get(&id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (AlgorithmId, NodeId)> + '_ {
        self.map.iter().map(|(a, n)| (*a, *n))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn contains(&self, id: AlgorithmId) -> bool {
        self.map.contains_key(&id)
    }

    /// Algorithms hosted on `node`.
    pub fn on_node(&self, node: NodeId) -> BTreeSet<AlgorithmId> {
        self.iter().filter(|(_, n)| *n == node).map(|(a, _)| a).collect()
    }

    /// Host ids in algorithm-id order; the canonical tie-break key.
    pub fn key(&self) -> Vec<NodeId> {
        self.map.values().copied().collect()
    }

    pub fn as_map(&self) -> &BTreeMap<AlgorithmId, NodeId> {
        &self.map
    }
}

impl FromIterator<(AlgorithmId, NodeId)> for Allocation {
    fn from_iter<T: IntoIterator<Item = (AlgorithmId, NodeId)>>(iter: T) -> Self {
        Allocation { map: iter.into_iter().collect() }
    }
}

/// How link times are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DelayMode {
    /// Closed-form expectations along cached routes.
    #[default]
    Expected,
    /// Independent per-hop samples; each robot draws from its own stream of
    /// a generator seeded with `seed`.
    Sampled { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeOptions {
    /// Charge the transmission of each output back to whoever requested it.
    /// Disabling it gives the execution-centric model used by the baseline.
    pub output_return: bool,
    pub flow_cap: usize,
}

impl Default for TimeOptions {
    fn default() -> Self {
        TimeOptions { output_return: true, flow_cap: DEFAULT_FLOW_CAP }
    }
}

impl TimeOptions {
    pub fn without_output_return() -> Self {
        TimeOptions { output_return: false, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimeError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Arch(#[from] ArchError),
    #[error("algorithm {alg} may not run on {node}")]
    ConstraintViolation { alg: AlgorithmId, node: NodeId },
    #[error("algorithm {0} is not allocated")]
    Unallocated(AlgorithmId),
    #[error("algorithm {0} is not part of the graph")]
    UnknownAlgorithm(AlgorithmId),
    #[error("{0} is not an edge node")]
    NotAnEdgeNode(NodeId),
    #[error("partial allocation is not closed under height")]
    InvalidPrefix,
    #[error("architecture has no edge nodes")]
    NoEdgeNodes,
}

/// Timing of one initiating robot.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotTimes {
    pub initiator: NodeId,
    pub final_time: f64,
    /// (start, execution finish) of every algorithm
    pub per_algorithm: BTreeMap<AlgorithmId, (f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeReport {
    pub per_robot_final: BTreeMap<NodeId, f64>,
    pub aggregate: f64,
    pub per_algorithm: BTreeMap<NodeId, BTreeMap<AlgorithmId, (f64, f64)>>,
}

impl TimeReport {
    fn from_robots(robots: Vec<RobotTimes>) -> Self {
        let aggregate = float::norm(robots.iter().map(|r| r.final_time));
        let mut per_robot_final = BTreeMap::new();
        let mut per_algorithm = BTreeMap::new();
        for r in robots {
            per_robot_final.insert(r.initiator, r.final_time);
            per_algorithm.insert(r.initiator, r.per_algorithm);
        }
        TimeReport { per_robot_final, aggregate, per_algorithm }
    }
}

/// Source of transmission times.
pub(crate) trait Delay {
    fn trans(&mut self, routes: &RouteTable, src: usize, dst: usize, bits: f64) -> f64;
}

pub(crate) struct ExpectedDelay;

impl Delay for ExpectedDelay {
    #[inline]
    fn trans(&mut self, routes: &RouteTable, src: usize, dst: usize, bits: f64) -> f64 {
        routes.expected(src, dst, bits)
    }
}

struct SampledDelay<'a, R: Rng>(&'a mut R);

impl<R: Rng> Delay for SampledDelay<'_, R> {
    fn trans(&mut self, routes: &RouteTable, src: usize, dst: usize, bits: f64) -> f64 {
        if src == dst {
            return 0.0;
        }
        routes.sample(src, dst, bits, self.0)
    }
}

/// A lifted graph bound to an architecture, with everything the evaluator
/// needs precomputed. Build once, evaluate many allocations.
#[derive(Debug, Clone)]
pub struct TimePlan {
    graph: AlgorithmGraph,
    arch: Architecture,
    routes: RouteTable,
    opts: TimeOptions,
    height: Vec<usize>,
    /// vertex positions, descending height then id
    order: Vec<usize>,
    preds: Vec<Vec<usize>>,
    src: usize,
    sink: usize,
    /// exec[v][node], `None` when unknown or unreachable
    exec: Vec<Vec<Option<f64>>>,
    /// hosts that also satisfy the placement constraint
    allowed: Vec<Vec<usize>>,
    out_bits: Vec<f64>,
    in_bits: Vec<f64>,
    initiators: Vec<usize>,
}

impl TimePlan {
    /// Lifts `g` if needed and binds it to `arch`. Hosts that cannot reach or
    /// be reached from every edge node are excluded.
    pub fn new(g: &AlgorithmGraph, arch: &Architecture, opts: TimeOptions) -> Result<Self, TimeError> {
        let graph = if g.is_lifted() { g.clone() } else { g.lift_to_semilattice()? };
        let routes = arch.routes()?;
        let flows = graph.execution_flows(opts.flow_cap)?;
        let hmap = heights(&flows);
        let n = graph.len();
        let height: Vec<usize> = graph.specs().iter().map(|s| hmap.get(&s.id).copied().unwrap_or(0)).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| height[b].cmp(&height[a]).then(a.cmp(&b)));
        let preds = (0..n).map(|v| graph.pred_positions(v).to_vec()).collect();
        let src = graph.position(AlgorithmId::SOURCE).ok_or(GraphError::NotLifted)?;
        let sink = graph.position(AlgorithmId::SINK).ok_or(GraphError::NotLifted)?;
        let initiators: Vec<usize> =
            arch.nodes().iter().enumerate().filter(|(_, nd)| nd.class == NodeClass::Edge).map(|(i, _)| i).collect();
        if initiators.is_empty() {
            return Err(TimeError::NoEdgeNodes);
        }
        let connected = |h: usize| initiators.iter().all(|&e| routes.is_reachable(e, h) && routes.is_reachable(h, e));
        let mut exec = Vec::with_capacity(n);
        let mut allowed = Vec::with_capacity(n);
        for s in graph.specs() {
            let row: Vec<Option<f64>> = arch
                .nodes()
                .iter()
                .enumerate()
                .map(|(k, nd)| {
                    if s.id.is_virtual() {
                        return Some(0.0);
                    }
                    if !connected(k) {
                        return None;
                    }
                    s.exec.on(nd.id, nd.class)
                })
                .collect();
            let nodes = arch.nodes();
            allowed.push(
                (0..row.len()).filter(|&k| row[k].is_some() && s.allowed.allows(nodes[k].id, nodes[k].class)).collect(),
            );
            exec.push(row);
        }
        let out_bits = graph.specs().iter().map(|s| s.output_bits).collect();
        let in_bits = graph.specs().iter().map(|s| s.input_internal_bits).collect();
        Ok(TimePlan {
            graph,
            arch: arch.clone(),
            routes,
            opts,
            height,
            order,
            preds,
            src,
            sink,
            exec,
            allowed,
            out_bits,
            in_bits,
            initiators,
        })
    }

    /// Restricts the initiating robots to `robots`.
    pub fn with_initiators(mut self, robots: &BTreeSet<NodeId>) -> Result<Self, TimeError> {
        let mut init = Vec::new();
        for r in robots {
            let p = self.arch.position(*r).ok_or(ArchError::UnknownNode(*r))?;
            if self.arch.nodes()[p].class != NodeClass::Edge {
                return Err(TimeError::NotAnEdgeNode(*r));
            }
            init.push(p);
        }
        if init.is_empty() {
            return Err(TimeError::NoEdgeNodes);
        }
        self.initiators = init;
        Ok(self)
    }

    pub fn graph(&self) -> &AlgorithmGraph {
        &self.graph
    }

    pub fn architecture(&self) -> &Architecture {
        &self.arch
    }

    pub fn options(&self) -> TimeOptions {
        self.opts
    }

    pub(crate) fn routes(&self) -> &RouteTable {
        &self.routes
    }

    pub fn initiators(&self) -> Vec<NodeId> {
        self.initiators.iter().map(|&p| self.node_id(p)).collect()
    }

    pub(crate) fn node_id(&self, pos: usize) -> NodeId {
        self.arch.nodes()[pos].id
    }

    pub fn height(&self, id: AlgorithmId) -> Option<usize> {
        self.graph.position(id).map(|p| self.height[p])
    }

    /// Real algorithms in processing order: descending height, then id.
    pub fn processing_order(&self) -> Vec<AlgorithmId> {
        self.real_order().into_iter().map(|p| self.graph.specs()[p].id).collect()
    }

    pub(crate) fn real_order(&self) -> Vec<usize> {
        self.order.iter().copied().filter(|&p| p != self.src && p != self.sink).collect()
    }

    /// Nodes an algorithm may be placed on, sorted by id.
    pub fn allowed_nodes(&self, id: AlgorithmId) -> Vec<NodeId> {
        match self.graph.position(id) {
            Some(p) => self.allowed[p].iter().map(|&k| self.node_id(k)).collect(),
            None => Vec::new(),
        }
    }

    pub(crate) fn allowed_positions(&self, v: usize) -> &[usize] {
        &self.allowed[v]
    }

    /// Positional host vector; virtual and unallocated vertices get `NONE`.
    fn hosts(&self, alloc: &Allocation, require_total: bool) -> Result<Vec<usize>, TimeError> {
        self.hosts_with(alloc, require_total, true)
    }

    fn hosts_with(&self, alloc: &Allocation, require_total: bool, placement: bool) -> Result<Vec<usize>, TimeError> {
        let mut hosts = vec![NONE; self.graph.len()];
        for (id, node) in alloc.iter() {
            let v = self.graph.position(id).filter(|_| !id.is_virtual()).ok_or(TimeError::UnknownAlgorithm(id))?;
            let k = self.arch.position(node).ok_or(ArchError::UnknownNode(node))?;
            let ok = if placement { self.allowed[v].contains(&k) } else { self.exec[v][k].is_some() };
            if !ok {
                return Err(TimeError::ConstraintViolation { alg: id, node });
            }
            hosts[v] = k;
        }
        if require_total {
            if let Some(s) =
                self.graph.specs().iter().enumerate().find(|(v, s)| !s.id.is_virtual() && hosts[*v] == NONE)
            {
                return Err(TimeError::Unallocated(s.1.id));
            }
        }
        Ok(hosts)
    }

    fn initiator_position(&self, initiator: NodeId) -> Result<usize, TimeError> {
        let p = self.arch.position(initiator).ok_or(ArchError::UnknownNode(initiator))?;
        if self.arch.nodes()[p].class != NodeClass::Edge {
            return Err(TimeError::NotAnEdgeNode(initiator));
        }
        Ok(p)
    }

    /// One robot's evaluation. Unallocated vertices are skipped, which is
    /// what makes prefix evaluation a lower bound.
    fn run<D: Delay>(
        &self,
        hosts: &[usize],
        e: usize,
        delay: &mut D,
        mut trace: Option<&mut BTreeMap<AlgorithmId, (f64, f64)>>,
    ) -> f64 {
        let mut fin = vec![0.0; self.graph.len()];
        let mut node_free = vec![0.0; self.arch.len()];
        let mut value: f64 = 0.0;
        for &v in &self.order {
            if v == self.src || v == self.sink {
                continue;
            }
            let h = hosts[v];
            if h == NONE {
                continue;
            }
            let (mut t1, mut t2) = (0.0f64, 0.0);
            for &p in &self.preds[v] {
                if p == self.src {
                    t2 += delay.trans(&self.routes, e, h, self.in_bits[v]);
                    continue;
                }
                let hp = hosts[p];
                let mut arrival = fin[p];
                if self.opts.output_return {
                    arrival += delay.trans(&self.routes, hp, h, self.out_bits[p]);
                }
                t1 = t1.max(arrival);
                t2 += delay.trans(&self.routes, hp, h, self.out_bits[p]);
            }
            let start = (t1 + t2).max(node_free[h]);
            let finish = start + self.exec[v][h].unwrap_or(0.0);
            node_free[h] = finish;
            fin[v] = finish;
            let delivered = if self.opts.output_return {
                finish + delay.trans(&self.routes, h, e, self.out_bits[v])
            } else {
                finish
            };
            value = value.max(delivered);
            if let Some(t) = trace.as_deref_mut() {
                t.insert(self.graph.specs()[v].id, (start, finish));
            }
        }
        value
    }

    fn robot_times(&self, hosts: &[usize], e: usize, mode: DelayMode) -> RobotTimes {
        let mut per_algorithm = BTreeMap::new();
        let final_time = match mode {
            DelayMode::Expected => self.run(hosts, e, &mut ExpectedDelay, Some(&mut per_algorithm)),
            DelayMode::Sampled { seed } => {
                let mut rng = SeededRng::seed_from_u64(seed);
                rng.set_stream(self.node_id(e).0 as u64);
                self.run(hosts, e, &mut SampledDelay(&mut rng), Some(&mut per_algorithm))
            }
        };
        RobotTimes { initiator: self.node_id(e), final_time, per_algorithm }
    }

    pub fn response_time(
        &self,
        alloc: &Allocation,
        initiator: NodeId,
        mode: DelayMode,
    ) -> Result<RobotTimes, TimeError> {
        let hosts = self.hosts(alloc, true)?;
        let e = self.initiator_position(initiator)?;
        Ok(self.robot_times(&hosts, e, mode))
    }

    /// Evaluates every initiating robot and takes the Euclidean norm.
    pub fn aggregate_time(&self, alloc: &Allocation, mode: DelayMode) -> Result<TimeReport, TimeError> {
        let hosts = self.hosts(alloc, true)?;
        let robots = self.initiators.iter().map(|&e| self.robot_times(&hosts, e, mode)).collect();
        Ok(TimeReport::from_robots(robots))
    }

    /// Like [`TimePlan::aggregate_time`] but ignoring placement constraints;
    /// only needs execution times to be known.
    pub fn aggregate_time_unconstrained(&self, alloc: &Allocation, mode: DelayMode) -> Result<TimeReport, TimeError> {
        let hosts = self.hosts_with(alloc, true, false)?;
        let robots = self.initiators.iter().map(|&e| self.robot_times(&hosts, e, mode)).collect();
        Ok(TimeReport::from_robots(robots))
    }

    /// Expected-mode aggregate over the allocated prefix. The prefix must
    /// contain every algorithm taller than any allocated one.
    pub fn partial_time(&self, partial: &Allocation) -> Result<f64, TimeError> {
        Ok(float::norm(self.partial_per_robot(partial)?.into_values()))
    }

    pub fn partial_per_robot(&self, partial: &Allocation) -> Result<BTreeMap<NodeId, f64>, TimeError> {
        let hosts = self.hosts(partial, false)?;
        let lowest = (0..hosts.len()).filter(|&v| hosts[v] != NONE).map(|v| self.height[v]).min();
        if let Some(lowest) = lowest {
            let gap = (0..hosts.len())
                .any(|v| v != self.src && v != self.sink && hosts[v] == NONE && self.height[v] > lowest);
            if gap {
                return Err(TimeError::InvalidPrefix);
            }
        }
        Ok(self.initiators.iter().map(|&e| (self.node_id(e), self.run(&hosts, e, &mut ExpectedDelay, None))).collect())
    }

    /// Execution order of the algorithms placed on each node.
    pub fn node_schedule(&self, alloc: &Allocation) -> Result<BTreeMap<NodeId, Vec<AlgorithmId>>, TimeError> {
        let hosts = self.hosts(alloc, false)?;
        let mut out: BTreeMap<NodeId, Vec<AlgorithmId>> = BTreeMap::new();
        for &v in &self.order {
            if hosts[v] != NONE {
                out.entry(self.node_id(hosts[v])).or_default().push(self.graph.specs()[v].id);
            }
        }
        Ok(out)
    }

    pub(crate) fn incremental(&self) -> IncrementalTime<'_> {
        IncrementalTime::new(self)
    }
}

/// One-shot helper: builds a [`TimePlan`] and evaluates one robot.
pub fn response_time(
    g: &AlgorithmGraph,
    arch: &Architecture,
    alloc: &Allocation,
    initiator: NodeId,
    mode: DelayMode,
) -> Result<RobotTimes, TimeError> {
    TimePlan::new(g, arch, TimeOptions::default())?.response_time(alloc, initiator, mode)
}

/// One-shot helper: builds a [`TimePlan`] and evaluates every robot.
pub fn aggregate_time(
    g: &AlgorithmGraph,
    arch: &Architecture,
    alloc: &Allocation,
    mode: DelayMode,
) -> Result<TimeReport, TimeError> {
    TimePlan::new(g, arch, TimeOptions::default())?.aggregate_time(alloc, mode)
}

/// Push/pop evaluator used by the search. Algorithms must be pushed in
/// processing order; all robots are advanced together in expected mode.
#[derive(Debug)]
pub(crate) struct IncrementalTime<'a> {
    plan: &'a TimePlan,
    hosts: Vec<usize>,
    /// fin[r * n + v]
    fin: Vec<f64>,
    /// node_free[r * nodes + k]
    node_free: Vec<f64>,
    value: Vec<f64>,
    undo: Vec<Undo>,
}

#[derive(Debug)]
struct Undo {
    v: usize,
    host: usize,
    free: Vec<f64>,
    value: Vec<f64>,
}

impl<'a> IncrementalTime<'a> {
    fn new(plan: &'a TimePlan) -> Self {
        let r = plan.initiators.len();
        IncrementalTime {
            plan,
            hosts: vec![NONE; plan.graph.len()],
            fin: vec![0.0; r * plan.graph.len()],
            node_free: vec![0.0; r * plan.arch.len()],
            value: vec![0.0; r],
            undo: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, v: usize, h: usize) {
        let p = self.plan;
        let (n, nodes) = (p.graph.len(), p.arch.len());
        let mut free = Vec::with_capacity(p.initiators.len());
        let old_value = self.value.clone();
        self.hosts[v] = h;
        let r_exec = p.exec[v][h].unwrap_or(0.0);
        for (r, &e) in p.initiators.iter().enumerate() {
            let (mut t1, mut t2) = (0.0f64, 0.0);
            for &q in &p.preds[v] {
                if q == p.src {
                    t2 += p.routes.expected(e, h, p.in_bits[v]);
                    continue;
                }
                let hq = self.hosts[q];
                let tr = p.routes.expected(hq, h, p.out_bits[q]);
                let arrival = if p.opts.output_return { self.fin[r * n + q] + tr } else { self.fin[r * n + q] };
                t1 = t1.max(arrival);
                t2 += tr;
            }
            let slot = r * nodes + h;
            free.push(self.node_free[slot]);
            let finish = (t1 + t2).max(self.node_free[slot]) + r_exec;
            self.node_free[slot] = finish;
            self.fin[r * n + v] = finish;
            let delivered = if p.opts.output_return { finish + p.routes.expected(h, e, p.out_bits[v]) } else { finish };
            if delivered > self.value[r] {
                self.value[r] = delivered;
            }
        }
        self.undo.push(Undo { v, host: h, free, value: old_value });
    }

    pub(crate) fn pop(&mut self) {
        let u = self.undo.pop().expect("pop without push");
        let nodes = self.plan.arch.len();
        for (r, f) in u.free.into_iter().enumerate() {
            self.node_free[r * nodes + u.host] = f;
        }
        self.value = u.value;
        self.hosts[u.v] = NONE;
    }

    /// Current per-robot values, in initiator order.
    pub(crate) fn values(&self) -> &[f64] {
        &self.value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algograph::{AlgorithmSpec, ExecTimes, Placement};
    use crate::architecture::{LinkModel, LinkParams, LinkTable, Node};

    fn a(n: u32) -> AlgorithmId {
        AlgorithmId(n)
    }

    fn solo_robot() -> Architecture {
        Architecture::new(vec![Node::new(2, NodeClass::Edge)], vec![]).unwrap()
    }

    fn spec(id: u32, t: f64) -> AlgorithmSpec {
        AlgorithmSpec::new(id, "", ExecTimes::uniform(t, t, t))
    }

    #[test]
    fn chain_on_one_robot() {
        let g = AlgorithmGraph::new(vec![spec(2, 1.0), spec(3, 2.0)], [(a(2), a(3))]).unwrap();
        let arch = solo_robot();
        let alloc = Allocation::all_on(&g, NodeId(2));
        let r = response_time(&g, &arch, &alloc, NodeId(2), DelayMode::Expected).unwrap();
        assert_eq!(r.final_time, 3.0);
        assert_eq!(r.per_algorithm[&a(3)], (1.0, 3.0));
    }

    #[test]
    fn join_waits_for_latest_predecessor() {
        let specs = vec![spec(2, 5.0), spec(3, 7.0), spec(4, 1.0)];
        let g = AlgorithmGraph::new(specs, [(a(2), a(4)), (a(3), a(4))]).unwrap();
        let nodes = vec![Node::new(2, NodeClass::Edge), Node::new(3, NodeClass::Edge), Node::new(4, NodeClass::Edge)];
        let arch = Architecture::from_pairs(
            nodes,
            &[(NodeId(2), NodeId(3)), (NodeId(3), NodeId(4))],
            &LinkTable::uniform(0.0),
        )
        .unwrap();
        let alloc: Allocation = [(a(2), NodeId(2)), (a(3), NodeId(3)), (a(4), NodeId(4))].into_iter().collect();
        let r = response_time(&g, &arch, &alloc, NodeId(2), DelayMode::Expected).unwrap();
        assert_eq!(r.per_algorithm[&a(4)].0, 7.0);
        assert_eq!(r.final_time, 8.0);
    }

    #[test]
    fn same_node_work_is_serialized() {
        let g = AlgorithmGraph::new(vec![spec(2, 2.0), spec(3, 3.0)], []).unwrap();
        let r = response_time(&g, &solo_robot(), &Allocation::all_on(&g, NodeId(2)), NodeId(2), DelayMode::Expected)
            .unwrap();
        assert_eq!(r.final_time, 5.0);
        assert_eq!(r.per_algorithm[&a(2)], (0.0, 2.0));
        assert_eq!(r.per_algorithm[&a(3)], (2.0, 5.0));
    }

    #[test]
    fn transmissions_on_a_two_node_link() {
        // robot 2 <-> fog 1, 1s each way; source -> A(fog, 2s) -> B(robot, 1s)
        let nodes = vec![Node::new(1, NodeClass::Fog), Node::new(2, NodeClass::Edge)];
        let links = vec![
            LinkModel::new(NodeId(1), NodeId(2), LinkParams::deterministic(1.0)),
            LinkModel::new(NodeId(2), NodeId(1), LinkParams::deterministic(1.0)),
        ];
        let arch = Architecture::new(nodes, links).unwrap();
        let g = AlgorithmGraph::new(vec![spec(2, 2.0), spec(3, 1.0)], [(a(2), a(3))]).unwrap();
        let alloc: Allocation = [(a(2), NodeId(1)), (a(3), NodeId(2))].into_iter().collect();
        let plan = TimePlan::new(&g, &arch, TimeOptions::default()).unwrap();
        let r = plan.response_time(&alloc, NodeId(2), DelayMode::Expected).unwrap();
        // A: dispatch 1, runs 1..3; B: T1 = 3 + 1, T2 = 1, runs 5..6
        assert_eq!(r.per_algorithm[&a(2)], (1.0, 3.0));
        assert_eq!(r.per_algorithm[&a(3)], (5.0, 6.0));
        assert_eq!(r.final_time, 6.0);
        let li = TimePlan::new(&g, &arch, TimeOptions::without_output_return()).unwrap();
        let r = li.response_time(&alloc, NodeId(2), DelayMode::Expected).unwrap();
        assert_eq!(r.per_algorithm[&a(3)], (4.0, 5.0));
        assert_eq!(r.final_time, 5.0);
    }

    #[test]
    fn placement_is_enforced() {
        let mut s = spec(2, 1.0);
        s.allowed = Placement::classes([NodeClass::Cloud]);
        let g = AlgorithmGraph::new(vec![s], []).unwrap();
        let err = response_time(&g, &solo_robot(), &Allocation::all_on(&g, NodeId(2)), NodeId(2), DelayMode::Expected);
        assert_eq!(err.unwrap_err(), TimeError::ConstraintViolation { alg: a(2), node: NodeId(2) });
    }

    #[test]
    fn unallocated_and_bad_prefix() {
        let g = AlgorithmGraph::new(vec![spec(2, 1.0), spec(3, 1.0)], [(a(2), a(3))]).unwrap();
        let plan = TimePlan::new(&g, &solo_robot(), TimeOptions::default()).unwrap();
        let half = Allocation::new().with(a(3), NodeId(2));
        assert_eq!(plan.aggregate_time(&half, DelayMode::Expected).unwrap_err(), TimeError::Unallocated(a(2)));
        assert_eq!(plan.partial_time(&half).unwrap_err(), TimeError::InvalidPrefix);
        assert_eq!(plan.partial_time(&Allocation::new()).unwrap(), 0.0);
        let top = Allocation::new().with(a(2), NodeId(2));
        assert_eq!(plan.partial_time(&top).unwrap(), 1.0);
    }

    #[test]
    fn incremental_matches_full_run() {
        let specs = vec![spec(2, 1.0), spec(3, 2.0), spec(4, 0.5)];
        let g = AlgorithmGraph::new(specs, [(a(2), a(3)), (a(2), a(4))]).unwrap();
        let t = LinkTable::uniform(0.3);
        let arch = Architecture::from_pairs(
            crate::architecture::generated_nodes(2),
            &[(NodeId(0), NodeId(1)), (NodeId(1), NodeId(2)), (NodeId(2), NodeId(3))],
            &t,
        )
        .unwrap();
        let plan = TimePlan::new(&g, &arch, TimeOptions::default()).unwrap();
        let alloc: Allocation = [(a(2), NodeId(1)), (a(3), NodeId(0)), (a(4), NodeId(3))].into_iter().collect();
        let mut inc = plan.incremental();
        for v in plan.real_order() {
            let id = plan.graph().specs()[v].id;
            inc.push(v, arch.position(alloc.get(id).unwrap()).unwrap());
        }
        let full = plan.aggregate_time(&alloc, DelayMode::Expected).unwrap();
        let finals: Vec<f64> = full.per_robot_final.values().copied().collect();
        assert_eq!(inc.values(), &finals[..]);
        inc.pop();
        inc.pop();
        inc.pop();
        assert!(inc.values().iter().all(|&v| v == 0.0));
    }
}
