mod common;

use std::collections::BTreeSet;
use std::f64::consts::SQRT_2;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use roboalloc_core::architecture::{LinkModel, Node, NodeClass};
use roboalloc_core::solver::{
    enumerate_oracle, merge_results, solve, solve_baseline_li2018, solve_heterogeneous, solve_scoped, BaselineNode,
    SearchScope, SharedIncumbent,
};
use roboalloc_core::{
    AlgorithmGraph, AlgorithmId, AlgorithmSpec, Allocation, Architecture, ExecTimes, LinkParams, MemoryProfile, NodeId,
    ObjectiveWeights, Placement, Problem, SolveError, SolverConfig,
};

fn a(n: u32) -> AlgorithmId {
    AlgorithmId(n)
}

fn problem(g: &AlgorithmGraph, arch: &Architecture, p: &MemoryProfile, cfg: SolverConfig) -> Problem {
    Problem::new(g, arch, p, cfg).unwrap()
}

fn time_only() -> SolverConfig {
    SolverConfig { weights: ObjectiveWeights { time: 1.0, memory: 0.0 }, ..SolverConfig::default() }
}

/// Time-only distance computed from the reference recursion alone.
fn reference_distance(g: &AlgorithmGraph, arch: &Architecture, alloc: &Allocation) -> f64 {
    let norm = |al: &Allocation| -> Vec<f64> {
        arch.edge_nodes().iter().map(|&e| reference_time(g, arch, al, e, true)).collect()
    };
    let base = norm(&Allocation::all_on(g, NodeId(0)));
    let t: f64 = base.iter().map(|x| x * x).sum::<f64>().sqrt();
    norm(alloc).iter().map(|x| (x / t).powi(2)).sum::<f64>().sqrt()
}

#[test]
fn time_only_optimum_matches_reference_enumeration() {
    for seed in 0..40 {
        let (g, arch, prof) = random_instance(seed, 4, 4);
        let r = solve(&problem(&g, &arch, &prof, time_only())).unwrap();
        let best = all_allocations(&g, &node_ids(&arch))
            .iter()
            .map(|al| reference_distance(&g, &arch, al))
            .fold(f64::INFINITY, f64::min);
        assert!((r.distance - best).abs() < 1e-9, "seed {seed}: {} vs {best}", r.distance);
        assert!((reference_distance(&g, &arch, &r.best_alloc) - r.distance).abs() < 1e-9);
    }
}

#[test]
fn baseline_allocation_sits_at_sqrt_two() {
    for seed in 0..30 {
        let (g, arch, prof) = random_instance(seed, 5, 5);
        let p = problem(&g, &arch, &prof, SolverConfig::default());
        let obj = p.objective().unwrap();
        assert_eq!(obj.baseline_node, NodeId(0));
        let ev = p.evaluate(&p.baseline_allocation().unwrap(), &obj).unwrap();
        assert!((ev.distance - SQRT_2).abs() < 1e-12, "seed {seed}: {}", ev.distance);
        let r = solve(&p).unwrap();
        assert!((r.incumbent_trace[0] - SQRT_2).abs() < 1e-12);
        assert!(r.distance <= SQRT_2 + 1e-12);
    }
}

#[test]
fn baseline_node_choice() {
    let (g, arch, prof) = random_instance(3, 3, 4);
    let fog = SolverConfig { baseline: BaselineNode::Class(NodeClass::Fog), ..SolverConfig::default() };
    let p = problem(&g, &arch, &prof, fog);
    assert_eq!(p.baseline_node().unwrap(), NodeId(1));
    let obj = p.objective().unwrap();
    let ev = p.evaluate(&p.baseline_allocation().unwrap(), &obj).unwrap();
    assert!((ev.distance - SQRT_2).abs() < 1e-12);
    let missing = SolverConfig { baseline: BaselineNode::Node(NodeId(99)), ..SolverConfig::default() };
    assert!(matches!(problem(&g, &arch, &prof, missing).objective(), Err(SolveError::NoBaselineNode(_))));
}

#[test]
fn pruning_does_not_change_the_optimum() {
    for seed in 0..30 {
        let (g, arch, prof) = random_instance(100 + seed, 5, 4);
        let p = problem(&g, &arch, &prof, SolverConfig::default());
        let on = solve(&p).unwrap();
        let off = solve(&p.with_config(SolverConfig { pruning: false, ..SolverConfig::default() }).unwrap()).unwrap();
        assert!((on.distance - off.distance).abs() < 1e-12);
        assert_eq!(on.best_alloc, off.best_alloc);
        assert!(on.nodes_explored <= off.nodes_explored);
        assert_eq!(off.pruned, 0);
    }
}

#[test]
fn solve_is_deterministic() {
    let (g, arch, prof) = random_instance(11, 5, 5);
    let p = problem(&g, &arch, &prof, SolverConfig::default());
    let x = solve(&p).unwrap();
    let y = solve(&p).unwrap();
    assert_eq!(x.best_alloc, y.best_alloc);
    assert_eq!(x.distance, y.distance);
    assert_eq!(x.nodes_explored, y.nodes_explored);
    assert_eq!(x.incumbent_trace, y.incumbent_trace);
}

/// Cloud, fog and one robot, fully linked.
fn triangle(latency: f64, per_bit: f64) -> Architecture {
    let nodes = vec![Node::new(0, NodeClass::Cloud), Node::new(1, NodeClass::Fog), Node::new(2, NodeClass::Edge)];
    let p = LinkParams::deterministic(latency).with_per_bit_cost(per_bit);
    let mut links = Vec::new();
    for u in 0..3 {
        for v in 0..3 {
            if u != v {
                links.push(LinkModel::new(NodeId(u), NodeId(v), p));
            }
        }
    }
    Architecture::new(nodes, links).unwrap()
}

#[test]
fn output_return_moves_work_to_the_robot() {
    let mut s = AlgorithmSpec::new(2, "big", ExecTimes::uniform(0.5, 0.4, 0.1));
    s.output_bits = 1e6;
    let g = AlgorithmGraph::new(vec![s], []).unwrap();
    let arch = triangle(0.01, 1e-6);
    let prof = MemoryProfile::from_graph(&g);
    let p = problem(&g, &arch, &prof, time_only());
    let ours = solve(&p).unwrap();
    let base = solve_baseline_li2018(&p).unwrap();
    assert_eq!(base.best_alloc.get(a(2)), Some(NodeId(0)));
    assert_eq!(ours.best_alloc.get(a(2)), Some(NodeId(2)));
    // cloud: 0.01 + 0.1 + (0.01 + 1.0) back
    assert!((base.time_aggregate - 1.12).abs() < 1e-9);
    assert!((ours.time_aggregate - 0.5).abs() < 1e-9);
    assert!(ours.distance < base.distance);
}

#[test]
fn free_links_make_both_methods_agree() {
    for seed in 0..20 {
        let (g, arch, prof) = random_instance(200 + seed, 4, 4);
        let free = arch.map_links(|_| LinkParams::deterministic(0.0)).unwrap();
        let p = problem(&g, &free, &prof, time_only());
        let ours = solve(&p).unwrap();
        let base = solve_baseline_li2018(&p).unwrap();
        assert!((ours.distance - base.distance).abs() < 1e-9, "seed {seed}");
    }
}

#[test]
fn single_algorithm_with_two_allowed_nodes() {
    let mut s = AlgorithmSpec::new(2, "x", ExecTimes::uniform(3.0, 2.0, 1.0));
    s.allowed = Placement::nodes([NodeId(1), NodeId(2)]);
    let g = AlgorithmGraph::new(vec![s], []).unwrap();
    let arch = triangle(0.5, 0.0);
    let prof = MemoryProfile::from_graph(&g);
    let p = problem(&g, &arch, &prof, time_only());
    assert_eq!(p.search_space(), 2);
    let r = solve(&p).unwrap();
    // fog 0.5 + 2.0 + 0.5 against robot 3.0
    assert_eq!(r.best_alloc.get(a(2)), Some(NodeId(1)));
    assert!((r.time_aggregate - 3.0).abs() < 1e-12);
    let o = enumerate_oracle(&p).unwrap();
    assert_eq!(o.best_alloc, r.best_alloc);
    assert_eq!(o.nodes_explored, 2);
}

#[test]
fn infeasible_and_oversized_instances() {
    let mut s = AlgorithmSpec::new(2, "x", ExecTimes::uniform(1.0, 1.0, 1.0));
    s.allowed = Placement::nodes([NodeId(7)]);
    s.processing_bytes = 1.0;
    let g = AlgorithmGraph::new(vec![s], []).unwrap();
    let arch = triangle(0.1, 0.0);
    let prof = MemoryProfile::from_graph(&g);
    let p = problem(&g, &arch, &prof, SolverConfig::default());
    assert_eq!(solve(&p).unwrap_err(), SolveError::Infeasible(a(2)));
    assert_eq!(enumerate_oracle(&p).unwrap_err(), SolveError::Infeasible(a(2)));

    let (g, arch, prof) = random_instance(5, 6, 5);
    let cfg = SolverConfig { oracle_cap: 1, ..SolverConfig::default() };
    let p = problem(&g, &arch, &prof, cfg);
    let size = p.search_space();
    assert!(size > 1);
    assert_eq!(enumerate_oracle(&p).unwrap_err(), SolveError::OracleTooLarge { size, cap: 1 });
}

#[test]
fn parallel_roots_merge_to_the_sequential_optimum() {
    for seed in 0..15 {
        let (g, arch, prof) = random_instance(300 + seed, 5, 5);
        let p = problem(&g, &arch, &prof, SolverConfig::default());
        let whole = solve(&p).unwrap();
        let shared = SharedIncumbent::new(f64::INFINITY);
        let merged = (0..p.root_branches())
            .map(|r| solve_scoped(&p, SearchScope { root: Some(r), shared: Some(&shared) }).unwrap())
            .reduce(|x, y| merge_results(x, y, 1e-12))
            .unwrap();
        assert!((merged.distance - whole.distance).abs() < 1e-12, "seed {seed}");
        assert_eq!(merged.best_alloc, whole.best_alloc);
    }
}

#[test]
fn near_optimal_allocations_are_collected() {
    for seed in 0..10 {
        let (g, arch, prof) = random_instance(400 + seed, 3, 4);
        let eps = 0.05;
        let cfg = SolverConfig { collect_optima: Some(eps), ..SolverConfig::default() };
        let p = problem(&g, &arch, &prof, cfg);
        let r = solve(&p).unwrap();
        let obj = p.objective().unwrap();
        let want: BTreeSet<Vec<NodeId>> = all_allocations(&g, &node_ids(&arch))
            .into_iter()
            .filter(|al| p.evaluate(al, &obj).unwrap().distance <= r.distance + eps)
            .map(|al| al.key())
            .collect();
        let got: BTreeSet<Vec<NodeId>> = r.optima.iter().map(|al| al.key()).collect();
        assert_eq!(got, want, "seed {seed}");
        assert!(got.contains(&r.best_alloc.key()));
    }
}

#[test]
fn heterogeneous_single_class_is_plain_solve() {
    for seed in 0..10 {
        let (g, arch, prof) = random_instance(500 + seed, 4, 5);
        let p = problem(&g, &arch, &prof, SolverConfig::default());
        let classes = vec![robots(&arch)];
        let usage = vec![g.real_ids().collect()];
        let h = solve_heterogeneous(&p, &classes, &usage).unwrap();
        let r = solve(&p).unwrap();
        assert!((h.distance - r.distance).abs() < 1e-12);
        assert_eq!(h.best_alloc, r.best_alloc);
    }
}

#[test]
fn heterogeneous_classes_keep_work_off_foreign_robots() {
    let mut gaps = Vec::new();
    for seed in 0..10 {
        let mut r = rng(600 + seed);
        let g = random_graph(&mut r, 4, 0.3);
        let arch = random_arch(&mut r, 2);
        let prof = MemoryProfile::from_graph(&g);
        let p = problem(&g, &arch, &prof, SolverConfig::default());
        let bots: Vec<NodeId> = arch.edge_nodes();
        let classes = vec![BTreeSet::from([bots[0]]), BTreeSet::from([bots[1]])];
        let mut usage = vec![BTreeSet::new(), BTreeSet::new()];
        for id in g.real_ids() {
            match r.random_range(0..3) {
                0 => {
                    usage[0].insert(id);
                }
                1 => {
                    usage[1].insert(id);
                }
                _ => {
                    usage[0].insert(id);
                    usage[1].insert(id);
                }
            }
        }
        if usage.iter().any(|u| u.is_empty()) {
            continue;
        }
        let h = solve_heterogeneous(&p, &classes, &usage).unwrap();
        assert_eq!(h.best_alloc.len(), g.real_ids().count());
        for (id, node) in h.best_alloc.iter() {
            for (i, c) in classes.iter().enumerate() {
                if c.contains(&node) {
                    assert!(usage[i].contains(&id), "seed {seed}: {id} on {node}");
                }
            }
        }
        let oracle = enumerate_oracle(&p).unwrap();
        assert!(h.distance >= oracle.distance - 1e-12);
        gaps.push(h.distance - oracle.distance);
    }
    assert!(!gaps.is_empty());
    eprintln!("heterogeneous gaps to the unconstrained optimum: {gaps:?}");
}

#[test]
fn heterogeneous_rejects_bad_classes() {
    let (g, arch, prof) = random_instance(7, 3, 4);
    let p = problem(&g, &arch, &prof, SolverConfig::default());
    let all: BTreeSet<AlgorithmId> = g.real_ids().collect();
    let bad = solve_heterogeneous(&p, &[BTreeSet::from([NodeId(0)])], std::slice::from_ref(&all));
    assert!(matches!(bad, Err(SolveError::InvalidClasses(_))));
    assert!(matches!(solve_heterogeneous(&p, &[], &[]), Err(SolveError::InvalidClasses(_))));
    let none = solve_heterogeneous(&p, &[robots(&arch)], &[BTreeSet::new()]);
    assert!(matches!(none, Err(SolveError::Infeasible(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solve_matches_exhaustive_enumeration(seed in 0u64..1_000_000) {
        let (g, arch, prof) = random_instance(seed, 5, 4);
        let p = problem(&g, &arch, &prof, SolverConfig::default());
        let r = solve(&p).unwrap();
        let o = enumerate_oracle(&p).unwrap();
        prop_assert!((r.distance - o.distance).abs() < 1e-9, "{} vs {}", r.distance, o.distance);
        prop_assert_eq!(o.nodes_explored as u128, p.search_space());
    }

    #[test]
    fn incumbents_only_improve(seed in 0u64..1_000_000) {
        let (g, arch, prof) = random_instance(seed, 5, 5);
        let r = solve(&problem(&g, &arch, &prof, SolverConfig::default())).unwrap();
        prop_assert!(!r.incumbent_trace.is_empty());
        prop_assert!(r.incumbent_trace.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!((r.incumbent_trace.last().unwrap() - r.distance).abs() < 1e-9);
    }

    #[test]
    fn ours_never_worse_than_baseline(seed in 0u64..1_000_000) {
        let (g, arch, prof) = random_instance(seed, 5, 5);
        let p = problem(&g, &arch, &prof, SolverConfig::default());
        let ours = solve(&p).unwrap();
        let base = solve_baseline_li2018(&p).unwrap();
        prop_assert!(ours.distance <= base.distance + 1e-12);
        let obj = p.objective().unwrap();
        prop_assert!((p.evaluate(&base.best_alloc, &obj).unwrap().distance - base.distance).abs() < 1e-12);
    }

    #[test]
    fn placement_constraints_are_respected(seed in 0u64..1_000_000) {
        let mut r = rng(seed);
        let n = r.random_range(1..=4);
        let mut g0 = random_graph(&mut r, n, 0.4);
        let bots = r.random_range(1..=3);
        let arch = random_arch(&mut r, bots);
        let ids = node_ids(&arch);
        let specs: Vec<AlgorithmSpec> = g0
            .specs()
            .iter()
            .filter(|s| !s.id.is_virtual())
            .cloned()
            .map(|mut s| {
                s.allowed = match r.random_range(0..3) {
                    0 => Placement::Anywhere,
                    1 => Placement::classes([NodeClass::Edge, NodeClass::Fog]),
                    _ => Placement::nodes([ids[r.random_range(0..ids.len())]]),
                };
                s
            })
            .collect();
        g0 = AlgorithmGraph::new(specs, g0.edges().iter().copied()).unwrap();
        let prof = MemoryProfile::from_graph(&g0);
        let p = problem(&g0, &arch, &prof, SolverConfig::default());
        let res = solve(&p).unwrap();
        for (id, node) in res.best_alloc.iter() {
            let s = g0.spec(id).unwrap();
            prop_assert!(s.allowed.allows(node, arch.class_of(node).unwrap()));
        }
        let o = enumerate_oracle(&p).unwrap();
        prop_assert!((res.distance - o.distance).abs() < 1e-9);
    }
}
