//! JSON documents for graphs, architectures, link tables and settings.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use roboalloc_core::algograph::{AlgorithmGraph, AlgorithmId, AlgorithmSpec, ExecTimes, Placement};
use roboalloc_core::architecture::{Architecture, LinkModel, LinkParams, LinkTable, Node, NodeClass, NodeId};
use roboalloc_core::memmodel::{BalanceMethod, Combine, MemoryProfile};
use roboalloc_core::solver::{BaselineNode, ObjectiveWeights, SolverConfig};
use roboalloc_core::timemodel::Allocation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassDto {
    Edge,
    Fog,
    Cloud,
}

impl From<ClassDto> for NodeClass {
    fn from(c: ClassDto) -> Self {
        match c {
            ClassDto::Edge => NodeClass::Edge,
            ClassDto::Fog => NodeClass::Fog,
            ClassDto::Cloud => NodeClass::Cloud,
        }
    }
}

impl From<NodeClass> for ClassDto {
    fn from(c: NodeClass) -> Self {
        match c {
            NodeClass::Edge => ClassDto::Edge,
            NodeClass::Fog => ClassDto::Fog,
            NodeClass::Cloud => ClassDto::Cloud,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExecDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fog: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cloud: Option<f64>,
    /// Per-node overrides keyed by node id.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub nodes: BTreeMap<u32, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AllowedDto {
    Classes(Vec<ClassDto>),
    Nodes(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmDto {
    pub id: u32,
    #[serde(default)]
    pub name: String,
    /// Seconds.
    pub exec: ExecDto,
    #[serde(default)]
    pub input_external_bits: f64,
    #[serde(default)]
    pub input_internal_bits: f64,
    #[serde(default)]
    pub output_bits: f64,
    #[serde(default)]
    pub processing_bytes: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allowed: Option<AllowedDto>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub algorithms: Vec<AlgorithmDto>,
    /// (predecessor, successor) id pairs.
    #[serde(default)]
    pub edges: Vec<(u32, u32)>,
}

impl GraphFile {
    pub fn to_graph(&self) -> Result<AlgorithmGraph> {
        let specs = self
            .algorithms
            .iter()
            .map(|a| {
                let mut exec =
                    ExecTimes { edge: a.exec.edge, fog: a.exec.fog, cloud: a.exec.cloud, ..Default::default() };
                exec.by_node = a.exec.nodes.iter().map(|(k, v)| (NodeId(*k), *v)).collect();
                let mut s = AlgorithmSpec::new(a.id, a.name.clone(), exec);
                s.input_external_bits = a.input_external_bits;
                s.input_internal_bits = a.input_internal_bits;
                s.output_bits = a.output_bits;
                s.processing_bytes = a.processing_bytes;
                s.allowed = match &a.allowed {
                    None => Placement::Anywhere,
                    Some(AllowedDto::Classes(c)) => Placement::classes(c.iter().map(|&c| c.into())),
                    Some(AllowedDto::Nodes(n)) => Placement::nodes(n.iter().map(|&n| NodeId(n))),
                };
                s
            })
            .collect();
        let edges = self.edges.iter().map(|&(u, v)| (AlgorithmId(u), AlgorithmId(v)));
        Ok(AlgorithmGraph::new(specs, edges)?)
    }

    pub fn from_graph(g: &AlgorithmGraph) -> Self {
        let algorithms = g
            .specs()
            .iter()
            .filter(|s| !s.id.is_virtual())
            .map(|s| AlgorithmDto {
                id: s.id.0,
                name: s.name.clone(),
                exec: ExecDto {
                    edge: s.exec.edge,
                    fog: s.exec.fog,
                    cloud: s.exec.cloud,
                    nodes: s.exec.by_node.iter().map(|(k, v)| (k.0, *v)).collect(),
                },
                input_external_bits: s.input_external_bits,
                input_internal_bits: s.input_internal_bits,
                output_bits: s.output_bits,
                processing_bytes: s.processing_bytes,
                allowed: match &s.allowed {
                    Placement::Anywhere => None,
                    Placement::Classes(c) => Some(AllowedDto::Classes(c.iter().map(|&c| c.into()).collect())),
                    Placement::Nodes(n) => Some(AllowedDto::Nodes(n.iter().map(|n| n.0).collect())),
                },
            })
            .collect();
        let edges =
            g.edges().iter().filter(|(u, v)| !u.is_virtual() && !v.is_virtual()).map(|(u, v)| (u.0, v.0)).collect();
        GraphFile { algorithms, edges }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDto {
    pub id: u32,
    pub class: ClassDto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkDto {
    pub src: u32,
    pub dst: u32,
    pub base_latency_s: f64,
    #[serde(default)]
    pub fn_mu: f64,
    #[serde(default)]
    pub fn_sigma: f64,
    #[serde(default)]
    pub per_bit_cost: f64,
}

impl LinkDto {
    fn params(&self) -> LinkParams {
        LinkParams::new(self.base_latency_s, self.fn_mu, self.fn_sigma).with_per_bit_cost(self.per_bit_cost)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchitectureFile {
    pub nodes: Vec<NodeDto>,
    pub links: Vec<LinkDto>,
}

impl ArchitectureFile {
    pub fn to_architecture(&self) -> Result<Architecture> {
        let nodes = self.nodes.iter().map(|n| Node::new(n.id, n.class.into())).collect();
        let links = self.links.iter().map(|l| LinkModel::new(NodeId(l.src), NodeId(l.dst), l.params())).collect();
        Ok(Architecture::new(nodes, links)?)
    }

    pub fn from_architecture(a: &Architecture) -> Self {
        ArchitectureFile {
            nodes: a.nodes().iter().map(|n| NodeDto { id: n.id.0, class: n.class.into() }).collect(),
            links: a
                .links()
                .iter()
                .map(|l| LinkDto {
                    src: l.from.0,
                    dst: l.to.0,
                    base_latency_s: l.params.base_latency,
                    fn_mu: l.params.delay.mu,
                    fn_sigma: l.params.delay.sigma,
                    per_bit_cost: l.params.per_bit_cost,
                })
                .collect(),
        }
    }
}

/// Link parameters by endpoint class, used to generate architectures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkClassDto {
    pub src: ClassDto,
    pub dst: ClassDto,
    pub base_latency_s: f64,
    #[serde(default)]
    pub fn_mu: f64,
    #[serde(default)]
    pub fn_sigma: f64,
    #[serde(default)]
    pub per_bit_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkTableFile {
    pub links: Vec<LinkClassDto>,
}

impl LinkTableFile {
    pub fn to_table(&self) -> LinkTable {
        let mut t = LinkTable::new();
        for l in &self.links {
            let p = LinkParams::new(l.base_latency_s, l.fn_mu, l.fn_sigma).with_per_bit_cost(l.per_bit_cost);
            t.entries.insert((l.src.into(), l.dst.into()), p);
        }
        t
    }

    pub fn from_table(t: &LinkTable) -> Self {
        LinkTableFile {
            links: t
                .entries
                .iter()
                .map(|((s, d), p)| LinkClassDto {
                    src: (*s).into(),
                    dst: (*d).into(),
                    base_latency_s: p.base_latency,
                    fn_mu: p.delay.mu,
                    fn_sigma: p.delay.sigma,
                    per_bit_cost: p.per_bit_cost,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineDto {
    #[default]
    SimpleSum,
    Algebra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodDto {
    #[default]
    Auto,
    Exact,
    Lpt,
}

impl From<MethodDto> for BalanceMethod {
    fn from(m: MethodDto) -> Self {
        match m {
            MethodDto::Auto => BalanceMethod::Auto,
            MethodDto::Exact => BalanceMethod::Exact,
            MethodDto::Lpt => BalanceMethod::Lpt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineDto {
    Cloud,
    Fog,
    Node(u32),
}

/// Solver and experiment settings. Every field is optional in the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub time_weight: f64,
    pub memory_weight: f64,
    pub baseline: BaselineDto,
    pub combine: CombineDto,
    pub pruning: bool,
    pub output_return: bool,
    pub collect_optima: Option<f64>,
    pub oracle_cap: u64,
    pub flow_cap: usize,
    pub workers: usize,
    pub seed: u64,
    /// Multiplier on the payload-dependent part of bundled link times.
    pub per_bit_scale: f64,
    /// Per-robot memory overhead in bytes, keyed by node id.
    pub memory_overhead: BTreeMap<u32, f64>,
    pub sweep: SweepSection,
    pub scalability: ScalabilitySection,
}

impl Default for ConfigFile {
    fn default() -> Self {
        let s = SolverConfig::default();
        ConfigFile {
            time_weight: s.weights.time,
            memory_weight: s.weights.memory,
            baseline: BaselineDto::Cloud,
            combine: CombineDto::SimpleSum,
            pruning: s.pruning,
            output_return: s.time.output_return,
            collect_optima: None,
            oracle_cap: s.oracle_cap,
            flow_cap: s.time.flow_cap,
            workers: 1,
            seed: 7,
            per_bit_scale: 1.0,
            memory_overhead: BTreeMap::new(),
            sweep: SweepSection::default(),
            scalability: ScalabilitySection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub n_min: usize,
    pub n_max: usize,
    pub archs_per_n: Option<usize>,
    pub reps_per_arch: usize,
    pub max_attempts: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection { n_min: 1, n_max: 6, archs_per_n: None, reps_per_arch: 10, max_attempts: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalabilitySection {
    pub max_algorithms: usize,
    pub max_nodes: usize,
    pub archs: usize,
    pub dags: usize,
}

impl Default for ScalabilitySection {
    fn default() -> Self {
        ScalabilitySection { max_algorithms: 8, max_nodes: 6, archs: 3, dags: 3 }
    }
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: ConfigFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let weights = [self.time_weight, self.memory_weight];
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || weights.iter().all(|w| *w == 0.0) {
            bail!("objective weights must be non-negative and not both zero");
        }
        if !(self.per_bit_scale.is_finite() && self.per_bit_scale >= 0.0) {
            bail!("per_bit_scale must be non-negative");
        }
        if self.sweep.n_min == 0 || self.sweep.n_min > self.sweep.n_max {
            bail!("sweep needs 1 <= n_min <= n_max");
        }
        if self.sweep.reps_per_arch == 0 || self.sweep.archs_per_n == Some(0) || self.sweep.max_attempts == 0 {
            bail!("sweep counts must be at least 1");
        }
        if self.scalability.archs == 0 || self.scalability.dags == 0 {
            bail!("scalability counts must be at least 1");
        }
        if self.scalability.max_algorithms < 2 || self.scalability.max_nodes < 3 {
            bail!("scalability grid needs at least 2 algorithms and 3 nodes");
        }
        Ok(())
    }

    pub fn solver(&self) -> SolverConfig {
        let mut s = SolverConfig {
            weights: ObjectiveWeights { time: self.time_weight, memory: self.memory_weight },
            baseline: match self.baseline {
                BaselineDto::Cloud => BaselineNode::Class(NodeClass::Cloud),
                BaselineDto::Fog => BaselineNode::Class(NodeClass::Fog),
                BaselineDto::Node(n) => BaselineNode::Node(NodeId(n)),
            },
            combine: match self.combine {
                CombineDto::SimpleSum => Combine::SimpleSum,
                CombineDto::Algebra => Combine::Algebra,
            },
            pruning: self.pruning,
            collect_optima: self.collect_optima,
            oracle_cap: self.oracle_cap,
            ..SolverConfig::default()
        };
        s.time.output_return = self.output_return;
        s.time.flow_cap = self.flow_cap;
        s
    }

    pub fn apply_overhead(&self, mut profile: MemoryProfile) -> MemoryProfile {
        for (k, v) in &self.memory_overhead {
            profile = profile.with_overhead(NodeId(*k), *v);
        }
        profile
    }
}

/// Allocation as `{algorithm id: node id}`.
pub fn allocation_json(a: &Allocation) -> BTreeMap<u32, u32> {
    a.iter().map(|(k, v)| (k.0, v.0)).collect()
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

/// Files of a dataset directory.
pub fn dataset_paths(dir: &Path) -> (PathBuf, PathBuf, PathBuf) {
    (dir.join("graph.json"), dir.join("links.json"), dir.join("architecture.json"))
}
