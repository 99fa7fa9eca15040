//! # roboalloc-core
//!
//! Static allocation of interdependent algorithms onto the nodes of a robotic
//! network made of edge nodes (robots), fog nodes (local servers) and cloud
//! nodes.
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//!  * [`algograph`]: the algorithm dependency DAG, its lifting to a
//!    semi-lattice with a virtual source and sink, execution flows, heights and
//!    induced subgraphs.
//!  * [`architecture`]: nodes, stochastic links, routing, robot partitioning
//!    and random architecture generation with isomorphism rejection.
//!  * [`timemodel`]: the recursive response-time model, evaluated per
//!    initiating robot and aggregated with the Euclidean norm.
//!  * [`memmodel`]: per-robot memory usage, the memory algebra over induced
//!    subgraphs, and variance-minimizing memory balancing.
//!  * [`solver`]: branch-and-bound over allocations minimizing the normalized
//!    joint time/memory distance, a time-only baseline, an exhaustive oracle
//!    and the staged heterogeneous-robot procedure.
//!
//! IO, file formats, the bundled measurements and the experiment harness live
//! in the `roboalloc` companion crate.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod algograph;
pub mod architecture;
pub mod memmodel;
pub mod solver;
pub mod timemodel;

mod float;

pub use algograph::{AlgorithmGraph, AlgorithmId, AlgorithmSpec, ExecTimes, ExecutionFlow, GraphError, Placement};
pub use architecture::{
    ArchError, Architecture, FoldedNormal, LinkModel, LinkParams, LinkTable, Node, NodeClass, NodeId, RobotPartition,
    RouteTable,
};
pub use memmodel::{AlgorithmMemory, BalanceMethod, Combine, MemoryError, MemoryProfile, MemoryReport};
pub use solver::{JointObjective, ObjectiveWeights, Problem, SolveError, SolveResult, SolverConfig};
pub use timemodel::{Allocation, DelayMode, TimeError, TimeOptions, TimeReport};

/// Deterministic RNG used wherever a seeded stream is needed.
pub type SeededRng = rand_chacha::ChaCha8Rng;
