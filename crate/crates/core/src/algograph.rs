//! Algorithm dependency graphs.
//!
//! An [`AlgorithmGraph`] holds the algorithms to allocate and their execution
//! dependencies. Lifting it with [`AlgorithmGraph::lift_to_semilattice`] adds a
//! virtual source (id 1) above every original source and a virtual sink (id 0)
//! below every original sink, so every execution runs from one top to one
//! bottom vertex.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::architecture::{NodeClass, NodeId};

/// Default bound on the number of execution flows enumerated for one graph.
pub const DEFAULT_FLOW_CAP: usize = 200_000;

/// Identifier of an algorithm. Ids 0 and 1 are reserved for the virtual sink
/// and source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AlgorithmId(pub u32);

impl AlgorithmId {
    /// Virtual sink, below every algorithm.
    pub const SINK: AlgorithmId = AlgorithmId(0);
    /// Virtual source, above every algorithm.
    pub const SOURCE: AlgorithmId = AlgorithmId(1);

    pub fn is_virtual(self) -> bool {
        self == Self::SINK || self == Self::SOURCE
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::SINK => f.write_str("sink"),
            Self::SOURCE => f.write_str("source"),
            AlgorithmId(n) => write!(f, "#{n}"),
        }
    }
}

/// Average execution time of one algorithm, per node class with optional
/// per-node overrides (heterogeneous robots).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExecTimes {
    pub edge: Option<f64>,
    pub fog: Option<f64>,
    pub cloud: Option<f64>,
    pub by_node: BTreeMap<NodeId, f64>,
}

impl ExecTimes {
    pub fn uniform(edge: f64, fog: f64, cloud: f64) -> Self {
        ExecTimes { edge: Some(edge), fog: Some(fog), cloud: Some(cloud), by_node: BTreeMap::new() }
    }

    pub fn zero() -> Self {
        Self::uniform(0.0, 0.0, 0.0)
    }

    pub fn with_node(mut self, node: NodeId, seconds: f64) -> Self {
        self.by_node.insert(node, seconds);
        self
    }

    /// Execution time on `node`, `None` when nothing is known for it.
    pub fn on(&self, node: NodeId, class: NodeClass) -> Option<f64> {
        if let Some(t) = self.by_node.get(&node) {
            return Some(*t);
        }
        match class {
            NodeClass::Edge => self.edge,
            NodeClass::Fog => self.fog,
            NodeClass::Cloud => self.cloud,
        }
    }

    fn values(&self) -> impl Iterator<Item = f64> + '_ {
        [self.edge, self.fog, self.cloud].into_iter().flatten().chain(self.by_node.values().copied())
    }
}

/// Prior knowledge about where an algorithm may run.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Placement {
    #[default]
    Anywhere,
    Classes(BTreeSet<NodeClass>),
    Nodes(BTreeSet<NodeId>),
}

impl Placement {
    pub fn classes<I: IntoIterator<Item = NodeClass>>(classes: I) -> Self {
        Placement::Classes(classes.into_iter().collect())
    }

    pub fn nodes<I: IntoIterator<Item = NodeId>>(nodes: I) -> Self {
        Placement::Nodes(nodes.into_iter().collect())
    }

    pub fn allows(&self, node: NodeId, class: NodeClass) -> bool {
        match self {
            Placement::Anywhere => true,
            Placement::Classes(c) => c.contains(&class),
            Placement::Nodes(n) => n.contains(&node),
        }
    }
}

/// One algorithm: execution times, data sizes and placement constraints.
///
/// Input and output sizes are in bits, processing memory in bytes.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSpec {
    pub id: AlgorithmId,
    pub name: String,
    pub exec: ExecTimes,
    /// Input delivered by fog/cloud rather than by predecessors on robots.
    pub input_external_bits: f64,
    /// Input available on the robots (initiator side).
    pub input_internal_bits: f64,
    /// Output size; also the intermediate payload sent to each successor.
    pub output_bits: f64,
    pub processing_bytes: f64,
    pub allowed: Placement,
}

impl AlgorithmSpec {
    pub fn new(id: u32, name: impl Into<String>, exec: ExecTimes) -> Self {
        AlgorithmSpec {
            id: AlgorithmId(id),
            name: name.into(),
            exec,
            input_external_bits: 0.0,
            input_internal_bits: 0.0,
            output_bits: 0.0,
            processing_bytes: 0.0,
            allowed: Placement::Anywhere,
        }
    }

    pub fn virtual_vertex(id: AlgorithmId) -> Self {
        let name = if id == AlgorithmId::SOURCE { "source" } else { "sink" };
        AlgorithmSpec { id, ..AlgorithmSpec::new(0, name, ExecTimes::zero()) }
    }

    fn validate(&self) -> Result<(), GraphError> {
        let bad = |reason: &'static str| GraphError::InvalidSpec { id: self.id, reason };
        let sizes = [self.input_external_bits, self.input_internal_bits, self.output_bits, self.processing_bytes];
        if sizes.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(bad("sizes must be finite and non-negative"));
        }
        if self.exec.values().any(|t| !t.is_finite() || t < 0.0) {
            return Err(bad("execution times must be finite and non-negative"));
        }
        match &self.allowed {
            Placement::Classes(c) if c.is_empty() => Err(bad("allowed classes must not be empty")),
            Placement::Nodes(n) if n.is_empty() => Err(bad("allowed nodes must not be empty")),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate algorithm id {0}")]
    DuplicateId(AlgorithmId),
    #[error("algorithm id {0} is reserved for a virtual vertex")]
    ReservedId(AlgorithmId),
    #[error("edge refers to unknown algorithm {0}")]
    UnknownEdgeEndpoint(AlgorithmId),
    #[error("self loop on algorithm {0}")]
    SelfLoop(AlgorithmId),
    #[error("invalid algorithm {id}: {reason}")]
    InvalidSpec { id: AlgorithmId, reason: &'static str },
    #[error("dependency graph contains a cycle")]
    CyclicDependency,
    #[error("graph is not lifted to a semi-lattice")]
    NotLifted,
    #[error("more than {cap} execution flows")]
    TooManyFlows { cap: usize },
    #[error("vertex {0} does not occur in any execution flow")]
    UnknownVertex(AlgorithmId),
}

/// A directed path from the virtual source to the virtual sink.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExecutionFlow(pub Vec<AlgorithmId>);

impl ExecutionFlow {
    pub fn vertices(&self) -> &[AlgorithmId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Dependency DAG of algorithms. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmGraph {
    specs: Vec<AlgorithmSpec>,
    index: BTreeMap<AlgorithmId, usize>,
    edges: BTreeSet<(AlgorithmId, AlgorithmId)>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
}

impl AlgorithmGraph {
    /// Builds a graph of user algorithms. Ids 0 and 1 are rejected.
    pub fn new<I>(specs: Vec<AlgorithmSpec>, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (AlgorithmId, AlgorithmId)>,
    {
        if let Some(s) = specs.iter().find(|s| s.id.is_virtual()) {
            return Err(GraphError::ReservedId(s.id));
        }
        Self::from_parts(specs, edges)
    }

    fn from_parts<I>(mut specs: Vec<AlgorithmSpec>, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (AlgorithmId, AlgorithmId)>,
    {
        specs.sort_by_key(|s| s.id);
        let mut index = BTreeMap::new();
        for (i, s) in specs.iter().enumerate() {
            s.validate()?;
            if index.insert(s.id, i).is_some() {
                return Err(GraphError::DuplicateId(s.id));
            }
        }
        let edges: BTreeSet<_> = edges.into_iter().collect();
        let mut preds = vec![Vec::new(); specs.len()];
        let mut succs = vec![Vec::new(); specs.len()];
        for &(u, v) in &edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let ui = *index.get(&u).ok_or(GraphError::UnknownEdgeEndpoint(u))?;
            let vi = *index.get(&v).ok_or(GraphError::UnknownEdgeEndpoint(v))?;
            succs[ui].push(vi);
            preds[vi].push(ui);
        }
        Ok(AlgorithmGraph { specs, index, edges, preds, succs })
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    /// All vertices, sorted by id.
    pub fn specs(&self) -> &[AlgorithmSpec] {
        &self.specs
    }

    pub fn spec(&self, id: AlgorithmId) -> Option<&AlgorithmSpec> {
        self.index.get(&id).map(|&i| &self.specs[i])
    }

    pub fn ids(&self) -> impl Iterator<Item = AlgorithmId> + '_ {
        self.specs.iter().map(|s| s.id)
    }

    /// Non-virtual algorithms, sorted by id.
    pub fn real_ids(&self) -> impl Iterator<Item = AlgorithmId> + '_ {
        self.ids().filter(|id| !id.is_virtual())
    }

    pub fn contains(&self, id: AlgorithmId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn edges(&self) -> &BTreeSet<(AlgorithmId, AlgorithmId)> {
        &self.edges
    }

    pub fn has_edge(&self, from: AlgorithmId, to: AlgorithmId) -> bool {
        self.edges.contains(&(from, to))
    }

    pub(crate) fn position(&self, id: AlgorithmId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub(crate) fn pred_positions(&self, pos: usize) -> &[usize] {
        &self.preds[pos]
    }

    pub fn preds(&self, id: AlgorithmId) -> Vec<AlgorithmId> {
        self.neighbours(id, &self.preds)
    }

    pub fn succs(&self, id: AlgorithmId) -> Vec<AlgorithmId> {
        self.neighbours(id, &self.succs)
    }

    fn neighbours(&self, id: AlgorithmId, adj: &[Vec<usize>]) -> Vec<AlgorithmId> {
        match self.index.get(&id) {
            Some(&i) => adj[i].iter().map(|&j| self.specs[j].id).collect(),
            None => Vec::new(),
        }
    }

    /// Topological order of vertex positions, or `CyclicDependency`.
    fn topological_order(&self) -> Result<Vec<usize>, GraphError> {
        let mut indegree: Vec<usize> = self.preds.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..self.len()).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(self.len());
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &v in &self.succs[u] {
                indegree[v] -= 1;
                if indegree[v] == 0 {
                    queue.push_back(v);
                }
            }
        }
        if order.len() == self.len() {
            Ok(order)
        } else {
            Err(GraphError::CyclicDependency)
        }
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_ok()
    }

    /// True when the graph has both virtual vertices and every other vertex
    /// has at least one predecessor and one successor.
    pub fn is_lifted(&self) -> bool {
        let (Some(src), Some(sink)) = (self.position(AlgorithmId::SOURCE), self.position(AlgorithmId::SINK)) else {
            return false;
        };
        self.preds[src].is_empty()
            && self.succs[sink].is_empty()
            && (0..self.len())
                .filter(|&i| i != src && i != sink)
                .all(|i| !self.preds[i].is_empty() && !self.succs[i].is_empty())
            && (self.len() > 2 || self.has_edge(AlgorithmId::SOURCE, AlgorithmId::SINK))
    }

    /// Adds the virtual source and sink. Idempotent.
    pub fn lift_to_semilattice(&self) -> Result<AlgorithmGraph, GraphError> {
        self.topological_order()?;
        let mut specs = self.specs.clone();
        for id in [AlgorithmId::SINK, AlgorithmId::SOURCE] {
            if !self.contains(id) {
                specs.push(AlgorithmSpec::virtual_vertex(id));
            }
        }
        let mut edges = self.edges.clone();
        let mut real = 0;
        for (i, s) in self.specs.iter().enumerate() {
            if s.id.is_virtual() {
                continue;
            }
            real += 1;
            if self.preds[i].is_empty() {
                edges.insert((AlgorithmId::SOURCE, s.id));
            }
            if self.succs[i].is_empty() {
                edges.insert((s.id, AlgorithmId::SINK));
            }
        }
        if real == 0 {
            edges.insert((AlgorithmId::SOURCE, AlgorithmId::SINK));
        }
        let lifted = Self::from_parts(specs, edges)?;
        lifted.topological_order()?;
        Ok(lifted)
    }

    /// Every directed path from the virtual source to the virtual sink.
    ///
    /// Fails with `TooManyFlows` once more than `cap` paths are found.
    pub fn execution_flows(&self, cap: usize) -> Result<Vec<ExecutionFlow>, GraphError> {
        if !self.is_lifted() {
            return Err(GraphError::NotLifted);
        }
        let src = self.position(AlgorithmId::SOURCE).ok_or(GraphError::NotLifted)?;
        let sink = self.position(AlgorithmId::SINK).ok_or(GraphError::NotLifted)?;
        let mut flows = Vec::new();
        let mut path = vec![src];
        // iterative DFS: stack of (vertex, next successor slot)
        let mut stack = vec![(src, 0usize)];
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            if u == sink {
                if flows.len() == cap {
                    return Err(GraphError::TooManyFlows { cap });
                }
                flows.push(ExecutionFlow(path.iter().map(|&p| self.specs[p].id).collect()));
                stack.pop();
                path.pop();
                continue;
            }
            if *next < self.succs[u].len() {
                let v = self.succs[u][*next];
                *next += 1;
                stack.push((v, 0));
                path.push(v);
            } else {
                stack.pop();
                path.pop();
            }
        }
        Ok(flows)
    }

    /// Restriction to `keep`: an edge `u -> v` exists when `g` has a directed
    /// path from `u` to `v` whose interior avoids `keep`.
    pub fn induced_subgraph(&self, keep: &BTreeSet<AlgorithmId>) -> AlgorithmGraph {
        let kept: Vec<usize> = keep.iter().filter_map(|id| self.position(*id)).collect();
        let mut in_keep = vec![false; self.len()];
        for &k in &kept {
            in_keep[k] = true;
        }
        let mut edges = BTreeSet::new();
        let mut seen = vec![usize::MAX; self.len()];
        for &u in &kept {
            let mut stack: Vec<usize> = self.succs[u].clone();
            while let Some(w) = stack.pop() {
                if seen[w] == u {
                    continue;
                }
                seen[w] = u;
                if in_keep[w] {
                    edges.insert((self.specs[u].id, self.specs[w].id));
                } else {
                    stack.extend(self.succs[w].iter().copied());
                }
            }
        }
        let specs = kept.iter().map(|&k| self.specs[k].clone()).collect();
        Self::from_parts(specs, edges).expect("sub-structure of a valid graph")
    }

    /// Transitive closure of the dependency relation.
    pub fn reachability(&self) -> Reachability {
        let n = self.len();
        let words = n.div_ceil(64).max(1);
        let mut bits = vec![0u64; n * words];
        let order = self.topological_order().unwrap_or_else(|_| (0..n).collect());
        for &u in order.iter().rev() {
            for &v in &self.succs[u] {
                bits[u * words + v / 64] |= 1 << (v % 64);
                for w in 0..words {
                    let reach_v = bits[v * words + w];
                    bits[u * words + w] |= reach_v;
                }
            }
        }
        Reachability { ids: self.specs.iter().map(|s| s.id).collect(), index: self.index.clone(), words, bits }
    }
}

/// Height of `v`: the largest number of vertices from `v` to the sink
/// (inclusive) over all flows through `v`. The sink has height 1.
pub fn height(v: AlgorithmId, flows: &[ExecutionFlow]) -> Result<usize, GraphError> {
    flows
        .iter()
        .filter_map(|f| f.0.iter().position(|&x| x == v).map(|p| f.len() - p))
        .max()
        .ok_or(GraphError::UnknownVertex(v))
}

/// Height of every vertex occurring in `flows`.
pub fn heights(flows: &[ExecutionFlow]) -> BTreeMap<AlgorithmId, usize> {
    let mut out = BTreeMap::new();
    for f in flows {
        let len = f.len();
        for (p, &v) in f.0.iter().enumerate() {
            let h = out.entry(v).or_insert(0);
            *h = (*h).max(len - p);
        }
    }
    out
}

/// Reachability matrix of a graph, stored as bitsets.
#[derive(Debug, Clone)]
pub struct Reachability {
    ids: Vec<AlgorithmId>,
    index: BTreeMap<AlgorithmId, usize>,
    words: usize,
    bits: Vec<u64>,
}

impl Reachability {
    /// True when a non-empty directed path leads from `from` to `to`.
    pub fn reaches(&self, from: AlgorithmId, to: AlgorithmId) -> bool {
        match (self.index.get(&from), self.index.get(&to)) {
            (Some(&u), Some(&v)) => self.reaches_pos(u, v),
            _ => false,
        }
    }

    pub(crate) fn reaches_pos(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.words + v / 64] & (1 << (v % 64)) != 0
    }

    /// Serial pairs are comparable; parallel pairs are not.
    pub fn comparable(&self, a: AlgorithmId, b: AlgorithmId) -> bool {
        self.reaches(a, b) || self.reaches(b, a)
    }

    pub fn ids(&self) -> &[AlgorithmId] {
        &self.ids
    }
}

impl fmt::Display for ExecutionFlow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(" -> "))
    }
}
