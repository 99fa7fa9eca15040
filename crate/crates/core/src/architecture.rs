//! Network architecture: edge/fog/cloud nodes joined by directed links whose
//! latency is a base value plus a folded-normal random delay.

use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::float::{self, Ord64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeClass {
    Edge,
    Fog,
    Cloud,
}

impl fmt::Display for NodeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeClass::Edge => "edge",
            NodeClass::Fog => "fog",
            NodeClass::Cloud => "cloud",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub class: NodeClass,
}

impl Node {
    pub fn new(id: u32, class: NodeClass) -> Self {
        Node { id: NodeId(id), class }
    }
}

/// Distribution of `|X|` with `X ~ Normal(mu, sigma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldedNormal {
    pub mu: f64,
    pub sigma: f64,
}

impl FoldedNormal {
    pub const ZERO: FoldedNormal = FoldedNormal { mu: 0.0, sigma: 0.0 };

    pub fn new(mu: f64, sigma: f64) -> Self {
        FoldedNormal { mu, sigma }
    }

    /// Closed-form mean; `|mu|` when `sigma == 0`.
    pub fn mean(&self) -> f64 {
        let (mu, sigma) = (self.mu, self.sigma);
        if sigma == 0.0 {
            return mu.abs();
        }
        sigma * float::sqrt(2.0 / core::f64::consts::PI) * float::exp(-mu * mu / (2.0 * sigma * sigma))
            + mu * (1.0 - 2.0 * float::std_normal_cdf(-mu / sigma))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.sigma == 0.0 {
            return self.mu.abs();
        }
        // parameters are validated when the owning link is built
        let normal = Normal::new(self.mu, self.sigma).expect("valid folded-normal parameters");
        normal.sample(rng).abs()
    }
}

/// Latency parameters of a link, independent of its endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    pub base_latency: f64,
    pub delay: FoldedNormal,
    pub per_bit_cost: f64,
}

impl LinkParams {
    pub fn new(base_latency: f64, mu: f64, sigma: f64) -> Self {
        LinkParams { base_latency, delay: FoldedNormal::new(mu, sigma), per_bit_cost: 0.0 }
    }

    pub fn deterministic(seconds: f64) -> Self {
        LinkParams { base_latency: seconds, delay: FoldedNormal::ZERO, per_bit_cost: 0.0 }
    }

    pub fn with_per_bit_cost(mut self, per_bit_cost: f64) -> Self {
        self.per_bit_cost = per_bit_cost;
        self
    }

    fn is_valid(&self) -> bool {
        let finite = self.base_latency.is_finite()
            && self.delay.mu.is_finite()
            && self.delay.sigma.is_finite()
            && self.per_bit_cost.is_finite();
        finite && self.base_latency >= 0.0 && self.delay.sigma >= 0.0 && self.per_bit_cost >= 0.0
    }

    /// `base + E|N(mu, sigma)| + per_bit_cost * payload`.
    pub fn expected_time(&self, payload_bits: f64) -> f64 {
        self.base_latency + self.delay.mean() + self.per_bit_cost * payload_bits
    }

    pub fn sample_time<R: Rng + ?Sized>(&self, payload_bits: f64, rng: &mut R) -> f64 {
        self.base_latency + self.delay.sample(rng) + self.per_bit_cost * payload_bits
    }
}

/// A directed link between two nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkModel {
    pub from: NodeId,
    pub to: NodeId,
    pub params: LinkParams,
}

impl LinkModel {
    pub fn new(from: NodeId, to: NodeId, params: LinkParams) -> Self {
        LinkModel { from, to, params }
    }

    pub fn expected_time(&self, payload_bits: f64) -> f64 {
        self.params.expected_time(payload_bits)
    }

    pub fn sample_time<R: Rng + ?Sized>(&self, payload_bits: f64, rng: &mut R) -> f64 {
        self.params.sample_time(payload_bits, rng)
    }
}

/// Closed-form expectation of [`sample_link_time`].
pub fn expected_link_time(link: &LinkModel, payload_bits: f64) -> f64 {
    link.expected_time(payload_bits)
}

/// One random transmission time over `link`.
pub fn sample_link_time<R: Rng + ?Sized>(link: &LinkModel, payload_bits: f64, rng: &mut R) -> f64 {
    link.sample_time(payload_bits, rng)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArchError {
    #[error("duplicate node {0}")]
    DuplicateNode(NodeId),
    #[error("link refers to unknown node {0}")]
    UnknownNode(NodeId),
    #[error("invalid parameters on link {0} -> {1}")]
    InvalidLink(NodeId, NodeId),
    #[error("architecture is not connected")]
    Disconnected,
    #[error("no route from {0} to {1}")]
    Unreachable(NodeId, NodeId),
    #[error("no link parameters for {0} -> {1} links")]
    MissingLinkClass(NodeClass, NodeClass),
    #[error("no connected architecture after {0} attempts")]
    GenerationExhausted(usize),
    #[error("at least one edge node is required")]
    NoEdgeNodes,
}

/// Edge nodes split by whether they have a direct link to a fog node.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RobotPartition {
    pub tr0: BTreeSet<NodeId>,
    pub tr_inf: BTreeSet<NodeId>,
}

/// Nodes and directed links. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Architecture {
    nodes: Vec<Node>,
    index: BTreeMap<NodeId, usize>,
    links: Vec<LinkModel>,
    outgoing: Vec<Vec<usize>>,
}

impl Architecture {
    /// Validates endpoints, link parameters and connectivity of the
    /// underlying undirected graph.
    pub fn new(mut nodes: Vec<Node>, links: Vec<LinkModel>) -> Result<Self, ArchError> {
        nodes.sort_by_key(|n| n.id);
        let mut index = BTreeMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.id, i).is_some() {
                return Err(ArchError::DuplicateNode(n.id));
            }
        }
        let mut outgoing = vec![Vec::new(); nodes.len()];
        for (li, l) in links.iter().enumerate() {
            let from = *index.get(&l.from).ok_or(ArchError::UnknownNode(l.from))?;
            index.get(&l.to).ok_or(ArchError::UnknownNode(l.to))?;
            if !l.params.is_valid() || l.from == l.to {
                return Err(ArchError::InvalidLink(l.from, l.to));
            }
            outgoing[from].push(li);
        }
        let arch = Architecture { nodes, index, links, outgoing };
        if !arch.is_connected() {
            return Err(ArchError::Disconnected);
        }
        Ok(arch)
    }

    /// Builds links in both directions for each undirected pair, taking
    /// parameters from `table` by endpoint class.
    pub fn from_pairs(nodes: Vec<Node>, pairs: &[(NodeId, NodeId)], table: &LinkTable) -> Result<Self, ArchError> {
        let class: BTreeMap<NodeId, NodeClass> = nodes.iter().map(|n| (n.id, n.class)).collect();
        let mut links = Vec::with_capacity(pairs.len() * 2);
        for &(u, v) in pairs {
            let cu = *class.get(&u).ok_or(ArchError::UnknownNode(u))?;
            let cv = *class.get(&v).ok_or(ArchError::UnknownNode(v))?;
            links.push(LinkModel::new(u, v, table.get(cu, cv)?));
            links.push(LinkModel::new(v, u, table.get(cv, cu)?));
        }
        Self::new(nodes, links)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn links(&self) -> &[LinkModel] {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.index.get(&id).map(|&i| &self.nodes[i])
    }

    pub fn class_of(&self, id: NodeId) -> Option<NodeClass> {
        self.node(id).map(|n| n.class)
    }

    pub(crate) fn position(&self, id: NodeId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn nodes_of(&self, class: NodeClass) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().filter(move |n| n.class == class).map(|n| n.id)
    }

    pub fn edge_nodes(&self) -> Vec<NodeId> {
        self.nodes_of(NodeClass::Edge).collect()
    }

    pub fn has_link(&self, from: NodeId, to: NodeId) -> bool {
        self.links.iter().any(|l| l.from == from && l.to == to)
    }

    /// Neighbours in the underlying undirected graph, sorted.
    pub fn neighbours(&self, id: NodeId) -> BTreeSet<NodeId> {
        self.links
            .iter()
            .filter_map(|l| match (l.from == id, l.to == id) {
                (true, _) => Some(l.to),
                (_, true) => Some(l.from),
                _ => None,
            })
            .collect()
    }

    fn undirected_adjacency(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); self.nodes.len()];
        for l in &self.links {
            let (u, v) = (self.index[&l.from], self.index[&l.to]);
            adj[u].insert(v);
            adj[v].insert(u);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.nodes.is_empty() {
            return true;
        }
        let adj = self.undirected_adjacency();
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Splits edge nodes into those linked directly to a fog node and the rest.
    pub fn partition_robots(&self) -> RobotPartition {
        let mut p = RobotPartition::default();
        for id in self.nodes_of(NodeClass::Edge) {
            let fog_linked = self.neighbours(id).iter().any(|n| self.class_of(*n) == Some(NodeClass::Fog));
            if fog_linked {
                p.tr0.insert(id);
            } else {
                p.tr_inf.insert(id);
            }
        }
        p
    }

    /// Minimum expected-latency path (zero payload). Empty when `from == to`.
    pub fn route(&self, from: NodeId, to: NodeId) -> Result<Vec<LinkModel>, ArchError> {
        let src = self.position(from).ok_or(ArchError::UnknownNode(from))?;
        let dst = self.position(to).ok_or(ArchError::UnknownNode(to))?;
        let tree = self.shortest_path_tree(src);
        let path = tree.path_to(dst).ok_or(ArchError::Unreachable(from, to))?;
        Ok(path.into_iter().map(|li| self.links[li]).collect())
    }

    fn shortest_path_tree(&self, src: usize) -> PathTree {
        let n = self.nodes.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut via: Vec<Option<usize>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(Reverse((Ord64(0.0), src)));
        while let Some(Reverse((Ord64(d), u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &li in &self.outgoing[u] {
                let l = &self.links[li];
                let v = self.index[&l.to];
                let nd = d + l.expected_time(0.0);
                if nd < dist[v] {
                    dist[v] = nd;
                    via[v] = Some(li);
                    heap.push(Reverse((Ord64(nd), v)));
                }
            }
        }
        PathTree { src, via, links: self.links.iter().map(|l| self.index[&l.from]).collect() }
    }

    /// All-pairs routes, computed once.
    pub fn routes(&self) -> Result<RouteTable, ArchError> {
        RouteTable::new(self)
    }

    /// Draws one delay per link and bakes it into the base latency, leaving a
    /// deterministic architecture.
    pub fn realize<R: Rng + ?Sized>(&self, rng: &mut R) -> Architecture {
        let links = self
            .links
            .iter()
            .map(|l| {
                let base = l.params.base_latency + l.params.delay.sample(rng);
                let params =
                    LinkParams { base_latency: base, delay: FoldedNormal::ZERO, per_bit_cost: l.params.per_bit_cost };
                LinkModel::new(l.from, l.to, params)
            })
            .collect();
        Architecture { links, ..self.clone() }
    }

    /// Same topology with every link parameter mapped through `f`.
    pub fn map_links<F: Fn(&LinkModel) -> LinkParams>(&self, f: F) -> Result<Architecture, ArchError> {
        let links = self.links.iter().map(|l| LinkModel::new(l.from, l.to, f(l))).collect();
        Architecture::new(self.nodes.clone(), links)
    }

    /// Directed adjacency matrix in node-position order.
    fn adjacency_matrix(&self) -> Vec<Vec<bool>> {
        let n = self.nodes.len();
        let mut m = vec![vec![false; n]; n];
        for l in &self.links {
            m[self.index[&l.from]][self.index[&l.to]] = true;
        }
        m
    }
}

struct PathTree {
    src: usize,
    via: Vec<Option<usize>>,
    /// origin position of each link
    links: Vec<usize>,
}

impl PathTree {
    fn path_to(&self, dst: usize) -> Option<Vec<usize>> {
        let mut path = Vec::new();
        let mut at = dst;
        while at != self.src {
            let li = self.via[at]?;
            path.push(li);
            at = self.links[li];
        }
        path.reverse();
        Some(path)
    }
}

/// Cached minimum-expected-latency routes for every ordered node pair.
#[derive(Debug, Clone)]
pub struct RouteTable {
    n: usize,
    /// link indices per (src, dst), `None` when unreachable
    paths: Vec<Option<Vec<usize>>>,
    fixed: Vec<f64>,
    per_bit: Vec<f64>,
    links: Vec<LinkParams>,
}

impl RouteTable {
    pub fn new(arch: &Architecture) -> Result<Self, ArchError> {
        let n = arch.nodes.len();
        let mut paths = Vec::with_capacity(n * n);
        let mut fixed = Vec::with_capacity(n * n);
        let mut per_bit = Vec::with_capacity(n * n);
        for s in 0..n {
            let tree = arch.shortest_path_tree(s);
            for d in 0..n {
                let p = tree.path_to(d);
                let (f, b) = match &p {
                    Some(p) => p.iter().fold((0.0, 0.0), |(f, b), &li| {
                        let l = &arch.links[li].params;
                        (f + l.base_latency + l.delay.mean(), b + l.per_bit_cost)
                    }),
                    None => (f64::INFINITY, 0.0),
                };
                paths.push(p);
                fixed.push(f);
                per_bit.push(b);
            }
        }
        Ok(RouteTable { n, paths, fixed, per_bit, links: arch.links.iter().map(|l| l.params).collect() })
    }

    pub(crate) fn is_reachable(&self, src: usize, dst: usize) -> bool {
        self.paths[src * self.n + dst].is_some()
    }

    /// Link indices along the route, by node positions.
    pub(crate) fn hops(&self, src: usize, dst: usize) -> Option<&[usize]> {
        self.paths[src * self.n + dst].as_deref()
    }

    /// Expected transmission time of `payload_bits` from `src` to `dst`.
    #[inline]
    pub(crate) fn expected(&self, src: usize, dst: usize, payload_bits: f64) -> f64 {
        if src == dst {
            return 0.0;
        }
        let k = src * self.n + dst;
        self.fixed[k] + self.per_bit[k] * payload_bits
    }

    /// Sum of independent per-hop samples along the fixed route.
    pub(crate) fn sample<R: Rng + ?Sized>(&self, src: usize, dst: usize, payload_bits: f64, rng: &mut R) -> f64 {
        match &self.paths[src * self.n + dst] {
            Some(p) => p.iter().map(|&li| self.links[li].sample_time(payload_bits, rng)).sum(),
            None => f64::INFINITY,
        }
    }
}

/// Link parameters by (source class, destination class).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinkTable {
    pub entries: BTreeMap<(NodeClass, NodeClass), LinkParams>,
}

impl LinkTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, from: NodeClass, to: NodeClass, params: LinkParams) -> Self {
        self.entries.insert((from, to), params);
        self
    }

    pub fn get(&self, from: NodeClass, to: NodeClass) -> Result<LinkParams, ArchError> {
        self.entries.get(&(from, to)).copied().ok_or(ArchError::MissingLinkClass(from, to))
    }

    /// Every entry set to the same deterministic latency.
    pub fn uniform(seconds: f64) -> Self {
        use NodeClass::*;
        let mut t = LinkTable::new();
        for from in [Edge, Fog, Cloud] {
            for to in [Edge, Fog, Cloud] {
                t.entries.insert((from, to), LinkParams::deterministic(seconds));
            }
        }
        t
    }
}

/// Node layout used by the generator: cloud `0`, fog `1`, robots `2..`.
pub fn generated_nodes(n_edge: usize) -> Vec<Node> {
    let mut nodes = vec![Node::new(0, NodeClass::Cloud), Node::new(1, NodeClass::Fog)];
    nodes.extend((0..n_edge).map(|i| Node::new(2 + i as u32, NodeClass::Edge)));
    nodes
}

/// Random connected architecture with one cloud, one fog and `n_edge` robots.
///
/// The cloud to fog link and one fog to robot link are always present; between
/// `n_edge - 1` and `n_edge (n_edge - 1) / 2` further links are drawn among
/// the fog and the robots. Disconnected draws are rejected.
pub fn generate_architecture<R: Rng + ?Sized>(
    n_edge: usize,
    table: &LinkTable,
    rng: &mut R,
    max_attempts: usize,
) -> Result<Architecture, ArchError> {
    for _ in 0..max_attempts {
        let pairs = draw_pairs(n_edge, rng)?;
        match Architecture::from_pairs(generated_nodes(n_edge), &pairs, table) {
            Ok(a) => return Ok(a),
            Err(ArchError::Disconnected) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(ArchError::GenerationExhausted(max_attempts))
}

fn draw_pairs<R: Rng + ?Sized>(n_edge: usize, rng: &mut R) -> Result<Vec<(NodeId, NodeId)>, ArchError> {
    if n_edge == 0 {
        return Err(ArchError::NoEdgeNodes);
    }
    let fog = NodeId(1);
    let robot = NodeId(2 + rng.random_range(0..n_edge) as u32);
    let mut pairs = vec![(NodeId(0), fog), (fog, robot)];
    // candidate pairs among fog and robots, minus the mandatory one
    let members: Vec<NodeId> = (1..=n_edge as u32 + 1).map(NodeId).collect();
    let mut pool = Vec::new();
    for (i, &u) in members.iter().enumerate() {
        for &v in &members[i + 1..] {
            if (u, v) != (fog, robot) {
                pool.push((u, v));
            }
        }
    }
    let lo = n_edge - 1;
    let hi = n_edge * (n_edge - 1) / 2;
    let k = rng.random_range(lo..=hi);
    for i in index::sample(rng, pool.len(), k) {
        pairs.push(pool[i]);
    }
    Ok(pairs)
}

/// Sorted (class, out-degree, in-degree) triples: a cheap necessary
/// condition for isomorphism.
pub fn degree_signature(a: &Architecture) -> Vec<(NodeClass, usize, usize)> {
    let m = a.adjacency_matrix();
    let n = m.len();
    let mut sig: Vec<_> = (0..n)
        .map(|i| {
            let out = m[i].iter().filter(|&&x| x).count();
            let inn = (0..n).filter(|&j| m[j][i]).count();
            (a.nodes[i].class, out, inn)
        })
        .collect();
    sig.sort();
    sig
}

/// Class-preserving isomorphism test: degree signatures first, then a
/// backtracking search over permutations of the adjacency matrix.
pub fn is_isomorphic(a: &Architecture, b: &Architecture) -> bool {
    if a.nodes.len() != b.nodes.len() || degree_signature(a) != degree_signature(b) {
        return false;
    }
    permutation_exists(a, b)
}

/// Exhaustive class-preserving permutation search, without the degree filter.
pub fn permutation_exists(a: &Architecture, b: &Architecture) -> bool {
    let (ma, mb) = (a.adjacency_matrix(), b.adjacency_matrix());
    let n = ma.len();
    if n != mb.len() {
        return false;
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn extend(
        i: usize,
        a: &Architecture,
        b: &Architecture,
        ma: &[Vec<bool>],
        mb: &[Vec<bool>],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        let n = ma.len();
        if i == n {
            return true;
        }
        for j in 0..n {
            if used[j] || a.nodes[i].class != b.nodes[j].class {
                continue;
            }
            let consistent =
                (0..i).all(|k| ma[i][k] == mb[j][map[k]] && ma[k][i] == mb[map[k]][j]) && ma[i][i] == mb[j][j];
            if consistent {
                map[i] = j;
                used[j] = true;
                if extend(i + 1, a, b, ma, mb, map, used) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    extend(0, a, b, &ma, &mb, &mut map, &mut used)
}

/// Number of pairwise non-isomorphic architectures the generator can produce
/// for `n_edge` robots, counting at most `limit + 1` classes. `None` when the
/// space is too large to enumerate.
pub fn architecture_class_count(n_edge: usize, limit: usize) -> Option<usize> {
    let members = n_edge + 1;
    let pool: Vec<(u32, u32)> =
        (1..=members as u32).flat_map(|u| (u + 1..=members as u32).map(move |v| (u, v))).collect();
    if n_edge == 0 || pool.len() > 15 {
        return None;
    }
    let (lo, hi) = (n_edge, n_edge * (n_edge - 1) / 2 + 1);
    let table = LinkTable::uniform(1.0);
    let mut classes: Vec<Architecture> = Vec::new();
    for mask in 0u32..(1 << pool.len()) {
        let k = mask.count_ones() as usize;
        if k < lo || k > hi {
            continue;
        }
        let chosen: Vec<(u32, u32)> = (0..pool.len()).filter(|i| mask & (1 << i) != 0).map(|i| pool[i]).collect();
        if !chosen.iter().any(|&(u, _)| u == 1) {
            continue;
        }
        let mut pairs = vec![(NodeId(0), NodeId(1))];
        pairs.extend(chosen.iter().map(|&(u, v)| (NodeId(u), NodeId(v))));
        let Ok(arch) = Architecture::from_pairs(generated_nodes(n_edge), &pairs, &table) else {
            continue;
        };
        if !classes.iter().any(|c| is_isomorphic(c, &arch)) {
            classes.push(arch);
            if classes.len() > limit {
                break;
            }
        }
    }
    Some(classes.len())
}

/// Settings for [`nonisomorphic_batch`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchConfig {
    /// Architectures requested; defaults to `n_edge + 5` when `None`.
    pub size: Option<usize>,
    /// Consecutive isomorphic draws tolerated before accepting one anyway.
    pub max_failures: usize,
    /// Attempts per draw in [`generate_architecture`].
    pub max_attempts: usize,
}

impl Default for BatchConfig {
    fn default() -> Self {
        BatchConfig { size: None, max_failures: 5, max_attempts: 1000 }
    }
}

/// Up to `n_edge + 5` random architectures, rejecting isomorphic repeats.
///
/// After `max_failures` consecutive rejected draws the next draw is kept
/// regardless. The batch never exceeds the number of distinct architectures
/// when that number can be enumerated.
pub fn nonisomorphic_batch<R: Rng + ?Sized>(
    n_edge: usize,
    table: &LinkTable,
    rng: &mut R,
    cfg: BatchConfig,
) -> Result<Vec<Architecture>, ArchError> {
    let mut target = cfg.size.unwrap_or(n_edge + 5);
    if let Some(classes) = architecture_class_count(n_edge, target) {
        target = target.min(classes);
    }
    let mut out: Vec<Architecture> = Vec::with_capacity(target);
    let mut failures = 0;
    while out.len() < target {
        let cand = generate_architecture(n_edge, table, rng, cfg.max_attempts)?;
        if failures >= cfg.max_failures || !out.iter().any(|a| is_isomorphic(a, &cand)) {
            out.push(cand);
            failures = 0;
        } else {
            failures += 1;
        }
    }
    Ok(out)
}
