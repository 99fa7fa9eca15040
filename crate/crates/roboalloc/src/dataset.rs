//! Bundled measurements: the face-recognition pipeline, its execution
//! times and memory sizes, and measured link latencies between node classes.

use roboalloc_core::algograph::{AlgorithmGraph, AlgorithmId, AlgorithmSpec, ExecTimes};
use roboalloc_core::architecture::{LinkParams, LinkTable, NodeClass};
use roboalloc_core::memmodel::MemoryProfile;

/// One row of the pipeline table.
struct Row {
    name: &'static str,
    edge: f64,
    fog: f64,
    cloud: f64,
    input_bits: f64,
    output_bits: f64,
    processing_bytes: f64,
}

const PIPELINE: [Row; 7] = [
    Row {
        name: "A1",
        edge: 0.445,
        fog: 0.153,
        cloud: 0.047,
        input_bits: 4718592.0,
        output_bits: 1120.0,
        processing_bytes: 14619367.0,
    },
    Row {
        name: "A2",
        edge: 4.475,
        fog: 1.538,
        cloud: 0.470,
        input_bits: 47185920.0,
        output_bits: 11200.0,
        processing_bytes: 11683901.0,
    },
    Row {
        name: "A3",
        edge: 7.2e-4,
        fog: 4.1e-4,
        cloud: 1.5e-4,
        input_bits: 11200.0,
        output_bits: 11200.0,
        processing_bytes: 11684220.0,
    },
    Row {
        name: "A4",
        edge: 2.0e-4,
        fog: 7.74e-5,
        cloud: 3.46e-5,
        input_bits: 11200.0,
        output_bits: 0.0,
        processing_bytes: 7799083.0,
    },
    Row {
        name: "A5",
        edge: 6.61e-5,
        fog: 1.94e-5,
        cloud: 9.96e-6,
        input_bits: 11200.0,
        output_bits: 11200.0,
        processing_bytes: 11253700.0,
    },
    Row {
        name: "A6",
        edge: 2.1e-4,
        fog: 1.3e-4,
        cloud: 4.75e-5,
        input_bits: 11200.0,
        output_bits: 1120.0,
        processing_bytes: 11261700.0,
    },
    Row {
        name: "A7",
        edge: 1.09e-3,
        fog: 4.01e-3,
        cloud: 2.7e-4,
        input_bits: 4718592.0,
        output_bits: 4718592.0,
        processing_bytes: 8010779.0,
    },
];

/// Id of pipeline stage `k` (1-based): A1 is 2, ..., A7 is 8.
pub fn stage(k: u32) -> AlgorithmId {
    AlgorithmId(k + 1)
}

/// Pipeline dependencies between stage numbers.
pub const PIPELINE_EDGES: [(u32, u32); 7] = [(1, 2), (2, 3), (2, 4), (4, 5), (3, 6), (5, 6), (6, 7)];

/// The seven-stage face-recognition pipeline. Table inputs are treated as
/// data already on the robots.
pub fn bundled_graph() -> AlgorithmGraph {
    let specs = PIPELINE
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut s = AlgorithmSpec::new(i as u32 + 2, r.name, ExecTimes::uniform(r.edge, r.fog, r.cloud));
            s.input_internal_bits = r.input_bits;
            s.output_bits = r.output_bits;
            s.processing_bytes = r.processing_bytes;
            s
        })
        .collect();
    let edges = PIPELINE_EDGES.iter().map(|&(u, v)| (stage(u), stage(v)));
    AlgorithmGraph::new(specs, edges).expect("bundled pipeline is a valid DAG")
}

pub fn bundled_profile() -> MemoryProfile {
    MemoryProfile::from_graph(&bundled_graph())
}

/// Measured 32-byte transmission times. Entries the measurements do not
/// cover (cloud to edge and back, fog to fog) are absent.
pub fn bundled_links() -> LinkTable {
    use NodeClass::*;
    LinkTable::new()
        .with(Cloud, Fog, LinkParams::new(0.439, 0.109, 0.087))
        .with(Fog, Cloud, LinkParams::new(0.417, 0.376, 0.365))
        .with(Fog, Edge, LinkParams::new(0.475, 0.187, 0.397))
        .with(Edge, Fog, LinkParams::new(0.447, 0.182, 0.111))
        .with(Edge, Edge, LinkParams::new(0.112, 0.061, 0.023))
}

/// Bits in the measured 32-byte message.
pub const MEASURED_BITS: f64 = 256.0;

/// [`bundled_links`] with a payload term: each link's per-bit cost is
/// `scale` times its expected 32-byte time spread over 256 bits. A scale of
/// 0 gives the latencies alone.
pub fn bundled_links_scaled(scale: f64) -> LinkTable {
    let mut t = bundled_links();
    for p in t.entries.values_mut() {
        *p = p.with_per_bit_cost(scale * p.expected_time(0.0) / MEASURED_BITS);
    }
    t
}

/// Memory-balancing example: 13 algorithm sizes in MB, five robots, the
/// first two linked to the fog.
pub mod memory_example {
    pub const VALUES: [f64; 13] = [4.0, 5.0, 6.0, 7.0, 8.0, 10.0, 12.0, 13.0, 14.0, 18.0, 24.0, 30.0, 32.0];
    /// Sizes of the algorithms fed from fog or cloud.
    pub const RESTRICTED: [f64; 5] = [5.0, 6.0, 14.0, 18.0, 24.0];
    pub const UNRESTRICTED: [f64; 8] = [4.0, 7.0, 8.0, 10.0, 12.0, 13.0, 30.0, 32.0];
    pub const ROBOTS: usize = 5;
    /// Bin indices of the robots linked to the fog.
    pub const TR0: [usize; 2] = [0, 1];
    /// Published per-robot totals.
    pub const LOADS: [f64; 5] = [35.0, 36.0, 39.0, 38.0, 35.0];
    pub const MAX_LOAD: f64 = 39.0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pipeline_shape() {
        let g = bundled_graph();
        assert_eq!(g.len(), 7);
        assert_eq!(g.succs(stage(2)), vec![stage(3), stage(4)]);
        assert_eq!(g.preds(stage(6)), vec![stage(3), stage(5)]);
        let p = bundled_profile();
        assert_eq!(p.get(stage(7)).output, 4718592.0 / 8.0);
    }

    #[test]
    fn scaled_links_double_the_measured_message() {
        let base = bundled_links();
        let scaled = bundled_links_scaled(1.0);
        for (k, p) in &base.entries {
            let q = scaled.entries[k];
            let m = p.expected_time(0.0);
            assert!((q.expected_time(MEASURED_BITS) - 2.0 * m).abs() < 1e-12);
        }
        assert_eq!(bundled_links_scaled(0.0), base);
    }

    #[test]
    fn memory_example_partitions_values() {
        use memory_example::*;
        let mut all: Vec<f64> = RESTRICTED.iter().chain(&UNRESTRICTED).copied().collect();
        all.sort_by(f64::total_cmp);
        assert_eq!(all, VALUES.to_vec());
        assert_eq!(LOADS.iter().sum::<f64>(), VALUES.iter().sum::<f64>());
    }
}
