//! Random algorithm graphs and link tables for tests and scalability runs.

use rand::Rng;

use roboalloc_core::algograph::{AlgorithmGraph, AlgorithmId, AlgorithmSpec, ExecTimes};
use roboalloc_core::architecture::{LinkParams, LinkTable, NodeClass};

/// Random DAG on ids `2..2 + n`; each forward pair is an edge with
/// probability `edge_prob`. Execution times shrink from edge to fog to cloud.
pub fn random_graph<R: Rng + ?Sized>(n: usize, edge_prob: f64, rng: &mut R) -> AlgorithmGraph {
    let specs = (0..n)
        .map(|i| {
            let edge = rng.random_range(0.05..1.0);
            let fog = edge * rng.random_range(0.2..0.8);
            let cloud = fog * rng.random_range(0.2..0.8);
            let mut s = AlgorithmSpec::new(i as u32 + 2, format!("a{}", i + 1), ExecTimes::uniform(edge, fog, cloud));
            s.input_internal_bits = rng.random_range(0.0..2.0e5);
            s.output_bits = rng.random_range(1.0e3..1.0e6);
            s.processing_bytes = rng.random_range(1.0e6..2.0e7);
            s
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(edge_prob) {
                edges.push((AlgorithmId(i as u32 + 2), AlgorithmId(j as u32 + 2)));
            }
        }
    }
    AlgorithmGraph::new(specs, edges).expect("forward edges form a DAG")
}

/// Random parameters for every ordered pair of node classes.
pub fn random_link_table<R: Rng + ?Sized>(rng: &mut R) -> LinkTable {
    use NodeClass::*;
    let mut t = LinkTable::new();
    for from in [Edge, Fog, Cloud] {
        for to in [Edge, Fog, Cloud] {
            let p =
                LinkParams::new(rng.random_range(0.01..0.5), rng.random_range(0.0..0.2), rng.random_range(0.0..0.2))
                    .with_per_bit_cost(rng.random_range(0.0..1.0e-6));
            t.entries.insert((from, to), p);
        }
    }
    t
}
