#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use roboalloc_core::architecture::{generate_architecture, NodeClass};
use roboalloc_core::{
    AlgorithmGraph, AlgorithmId, AlgorithmSpec, Allocation, Architecture, ExecTimes, LinkParams, LinkTable,
    MemoryProfile, NodeId, SeededRng,
};

pub fn rng(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

pub fn graph_from(n: usize, edges: &[(u32, u32)], exec: &[(f64, f64, f64)]) -> AlgorithmGraph {
    let specs = (0..n)
        .map(|i| {
            let (e, f, c) = exec[i];
            AlgorithmSpec::new(i as u32 + 2, format!("a{i}"), ExecTimes::uniform(e, f, c))
        })
        .collect();
    AlgorithmGraph::new(specs, edges.iter().map(|&(u, v)| (AlgorithmId(u), AlgorithmId(v)))).unwrap()
}

pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> AlgorithmGraph {
    let specs = (0..n)
        .map(|i| {
            let mut s = AlgorithmSpec::new(
                i as u32 + 2,
                format!("a{i}"),
                ExecTimes::uniform(
                    rng.random_range(0.01..2.0),
                    rng.random_range(0.01..1.0),
                    rng.random_range(0.01..0.5),
                ),
            );
            s.input_internal_bits = rng.random_range(0.0..1e4);
            s.input_external_bits = if rng.random_bool(0.3) { rng.random_range(1.0..8e4) } else { 0.0 };
            s.output_bits = rng.random_range(0.0..1e4);
            s.processing_bytes = rng.random_range(1.0..1e4);
            s
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                edges.push((AlgorithmId(i as u32 + 2), AlgorithmId(j as u32 + 2)));
            }
        }
    }
    AlgorithmGraph::new(specs, edges).unwrap()
}

pub fn random_table<R: Rng>(rng: &mut R) -> LinkTable {
    use NodeClass::*;
    let mut t = LinkTable::new();
    for a in [Edge, Fog, Cloud] {
        for b in [Edge, Fog, Cloud] {
            let p = LinkParams::new(rng.random_range(0.0..0.5), rng.random_range(0.0..0.3), rng.random_range(0.0..0.3))
                .with_per_bit_cost(rng.random_range(0.0..1e-4));
            t = t.with(a, b, p);
        }
    }
    t
}

pub fn random_arch<R: Rng>(rng: &mut R, robots: usize) -> Architecture {
    let t = random_table(rng);
    generate_architecture(robots, &t, rng, 1000).unwrap()
}

/// Graph with up to `max_alg` algorithms on cloud, fog and up to
/// `max_nodes - 2` robots.
pub fn random_instance(seed: u64, max_alg: usize, max_nodes: usize) -> (AlgorithmGraph, Architecture, MemoryProfile) {
    let mut r = rng(seed);
    let n = r.random_range(1..=max_alg);
    let g = random_graph(&mut r, n, 0.4);
    let robots = r.random_range(1..=max_nodes - 2);
    let a = random_arch(&mut r, robots);
    let p = MemoryProfile::from_graph(&g);
    (g, a, p)
}

/// All-pairs cheapest expected routes by Floyd-Warshall, with the per-bit
/// cost accumulated along the chosen route. Indexed by position in
/// `arch.nodes()`.
pub struct Routes {
    pub index: BTreeMap<NodeId, usize>,
    pub fixed: Vec<Vec<f64>>,
    pub per_bit: Vec<Vec<f64>>,
}

impl Routes {
    pub fn new(arch: &Architecture) -> Self {
        let n = arch.len();
        let index: BTreeMap<NodeId, usize> = arch.nodes().iter().enumerate().map(|(i, nd)| (nd.id, i)).collect();
        let mut fixed = vec![vec![f64::INFINITY; n]; n];
        let mut per_bit = vec![vec![0.0; n]; n];
        for (i, row) in fixed.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        for l in arch.links() {
            let (a, b) = (index[&l.from], index[&l.to]);
            let c = l.params.base_latency + l.params.delay.mean();
            if c < fixed[a][b] {
                fixed[a][b] = c;
                per_bit[a][b] = l.params.per_bit_cost;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let c = fixed[i][k] + fixed[k][j];
                    if c < fixed[i][j] {
                        fixed[i][j] = c;
                        per_bit[i][j] = per_bit[i][k] + per_bit[k][j];
                    }
                }
            }
        }
        Routes { index, fixed, per_bit }
    }

    pub fn time(&self, a: NodeId, b: NodeId, bits: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        let (i, j) = (self.index[&a], self.index[&b]);
        self.fixed[i][j] + self.per_bit[i][j] * bits
    }
}

/// Vertices from `v` to the sink, inclusive, along the longest path.
pub fn height_of(g: &AlgorithmGraph, v: AlgorithmId, memo: &mut BTreeMap<AlgorithmId, usize>) -> usize {
    if let Some(&h) = memo.get(&v) {
        return h;
    }
    let h = 1 + g.succs(v).into_iter().map(|s| height_of(g, s, memo)).max().unwrap_or(0);
    memo.insert(v, h);
    h
}

fn exec_on(arch: &Architecture, spec: &AlgorithmSpec, node: NodeId) -> f64 {
    spec.exec.on(node, arch.class_of(node).unwrap()).unwrap()
}

/// Response time seen by robot `e`, computed directly from the graph,
/// the allocation and Floyd-Warshall routes.
pub fn reference_time(
    g: &AlgorithmGraph,
    arch: &Architecture,
    alloc: &Allocation,
    e: NodeId,
    output_return: bool,
) -> f64 {
    let routes = Routes::new(arch);
    let mut memo = BTreeMap::new();
    let mut order: Vec<AlgorithmId> = g.real_ids().collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(height_of(g, v, &mut memo)), v));
    let mut fin: BTreeMap<AlgorithmId, f64> = BTreeMap::new();
    let mut free: BTreeMap<NodeId, f64> = BTreeMap::new();
    let mut result: f64 = 0.0;
    for v in order {
        let spec = g.spec(v).unwrap();
        let h = alloc.get(v).unwrap();
        let preds = g.preds(v);
        let (mut t1, mut t2) = (0.0f64, 0.0);
        if preds.is_empty() {
            t2 += routes.time(e, h, spec.input_internal_bits);
        }
        for p in preds {
            let hp = alloc.get(p).unwrap();
            let tr = routes.time(hp, h, g.spec(p).unwrap().output_bits);
            t1 = t1.max(fin[&p] + if output_return { tr } else { 0.0 });
            t2 += tr;
        }
        let start = (t1 + t2).max(*free.get(&h).unwrap_or(&0.0));
        let f = start + exec_on(arch, spec, h);
        free.insert(h, f);
        fin.insert(v, f);
        let back = if output_return { routes.time(h, e, spec.output_bits) } else { 0.0 };
        result = result.max(f + back);
    }
    result
}

/// Longest exec-time path of the DAG under the host times of `alloc`.
pub fn critical_path(g: &AlgorithmGraph, arch: &Architecture, alloc: &Allocation) -> f64 {
    fn finish(
        g: &AlgorithmGraph,
        arch: &Architecture,
        alloc: &Allocation,
        v: AlgorithmId,
        memo: &mut BTreeMap<AlgorithmId, f64>,
    ) -> f64 {
        if let Some(&f) = memo.get(&v) {
            return f;
        }
        let ready = g.preds(v).into_iter().map(|p| finish(g, arch, alloc, p, memo)).fold(0.0, f64::max);
        let f = ready + exec_on(arch, g.spec(v).unwrap(), alloc.get(v).unwrap());
        memo.insert(v, f);
        f
    }
    let mut memo = BTreeMap::new();
    g.real_ids().map(|v| finish(g, arch, alloc, v, &mut memo)).fold(0.0, f64::max)
}

/// Every total assignment of the real algorithms to the given hosts.
pub fn all_allocations(g: &AlgorithmGraph, hosts: &[NodeId]) -> Vec<Allocation> {
    let ids: Vec<AlgorithmId> = g.real_ids().collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; ids.len()];
    loop {
        out.push(ids.iter().zip(&idx).map(|(&id, &k)| (id, hosts[k])).collect());
        let mut i = 0;
        loop {
            if i == ids.len() {
                return out;
            }
            idx[i] += 1;
            if idx[i] < hosts.len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

pub fn node_ids(arch: &Architecture) -> Vec<NodeId> {
    arch.nodes().iter().map(|n| n.id).collect()
}

pub fn robots(arch: &Architecture) -> BTreeSet<NodeId> {
    arch.edge_nodes().into_iter().collect()
}
