mod common;

use std::time::Duration;

use common::{brute_force_optimum, random_instance};
use ecoroute::exact::{solve_exact_with, validate, Check, ExactError, ModelBounds};
use ecoroute::instance::{ContainerSpec, Instance, InstanceParts, NetworkRef};
use ecoroute::network::{Arc, Network, NodeId};
use ecoroute::routing::solve_heuristic_with;
use ecoroute::solution::CertificateStatus;
use ecoroute::{all_pairs_shortest, Lambda, Strategy};

fn spec(c: u32, l: u32) -> ContainerSpec {
    ContainerSpec::new(c, l).unwrap()
}

fn lambdas() -> [Lambda; 5] {
    ["0", "0.25", "0.5", "0.75", "1"].map(|s| s.parse().unwrap())
}

fn optimum(inst: &Instance) -> (u128, ecoroute::Solution) {
    let dist = all_pairs_shortest(inst.network());
    let sol = solve_exact_with(inst, &dist, &ModelBounds::default()).unwrap();
    let cert = sol.certificate.clone().unwrap();
    assert_eq!(cert.status, CertificateStatus::Optimal);
    let verdict = validate(inst, &sol, &dist).unwrap();
    assert!(verdict.feasible, "{:?}", verdict.violations);
    (inst.lambda().scaled(sol.objectives.z1, sol.objectives.z2), sol)
}

#[test]
fn single_node_forced_structure() {
    let arcs = vec![
        Arc { from: NodeId(1), to: NodeId(2), length: 5 },
        Arc { from: NodeId(2), to: NodeId(1), length: 5 },
    ];
    let inst = Instance::new(InstanceParts {
        name: "one".into(),
        network: NetworkRef::inline(Network::new("pair", arcs).unwrap()),
        depot: NodeId(1),
        demand_nodes: vec![NodeId(2)],
        modalities: 2,
        demands: vec![vec![1, 1]],
        container: spec(1, 2),
        lambda: Lambda::ONE,
        seed: None,
    })
    .unwrap();
    let (_, sol) = optimum(&inst);
    assert_eq!(sol.objectives.z2, 10);
    assert_eq!(sol.route_count(), 1);
}

#[test]
fn matches_brute_force_across_lambdas() {
    for seed in 0..12 {
        let m = 1 + (seed % 4) as usize;
        let base = random_instance(seed, m, 2, 2, spec(1, 2));
        for lambda in lambdas() {
            let inst = base.with_lambda(lambda);
            let (value, _) = optimum(&inst);
            assert_eq!(value, brute_force_optimum(&inst, lambda), "seed {seed} lambda {lambda}");
        }
    }
}

#[test]
fn matches_brute_force_with_larger_blocks() {
    for seed in 100..106 {
        let inst = random_instance(seed, 3, 2, 3, spec(2, 2));
        let (value, _) = optimum(&inst);
        assert_eq!(value, brute_force_optimum(&inst, Lambda::ONE), "seed {seed}");
    }
}

#[test]
fn lambda_zero_counts_modality_uses() {
    for seed in 20..26 {
        let inst = random_instance(seed, 3, 2, 2, spec(1, 2)).with_lambda(Lambda::ZERO);
        let (value, sol) = optimum(&inst);
        assert_eq!(value, u128::from(sol.objectives.z1));
        assert_eq!(value, brute_force_optimum(&inst, Lambda::ZERO));
    }
}

#[test]
fn optimal_distance_shrinks_as_lambda_grows() {
    for seed in 30..36 {
        let base = random_instance(seed, 3, 2, 2, spec(1, 2));
        let z2: Vec<u64> = lambdas().iter().map(|&l| optimum(&base.with_lambda(l)).1.objectives.z2).collect();
        assert!(z2.windows(2).all(|w| w[1] <= w[0]), "seed {seed}: {z2:?}");
    }
}

#[test]
fn heuristics_never_beat_the_optimum() {
    for seed in 40..50 {
        let inst = random_instance(seed, 4, 2, 2, spec(1, 2));
        let dist = all_pairs_shortest(inst.network());
        let (value, _) = optimum(&inst);
        for strategy in [Strategy::Fixed, Strategy::Adapted] {
            let h = solve_heuristic_with(&inst, &dist, strategy).unwrap();
            assert!(value <= inst.lambda().scaled(h.objectives.z1, h.objectives.z2));
        }
    }
}

#[test]
fn cold_start_reaches_the_same_optimum() {
    for seed in 50..55 {
        let inst = random_instance(seed, 3, 2, 2, spec(1, 2));
        let dist = all_pairs_shortest(inst.network());
        let warm = solve_exact_with(&inst, &dist, &ModelBounds::default()).unwrap();
        let cold = solve_exact_with(&inst, &dist, &ModelBounds { warm_start: false, ..Default::default() }).unwrap();
        assert_eq!(warm.objectives, cold.objectives);
    }
}

#[test]
fn repeated_solves_are_identical() {
    let inst = random_instance(61, 4, 2, 2, spec(1, 2));
    let dist = all_pairs_shortest(inst.network());
    let a = solve_exact_with(&inst, &dist, &ModelBounds::default()).unwrap();
    let b = solve_exact_with(&inst, &dist, &ModelBounds::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn route_bound_below_need_is_rejected() {
    let inst = random_instance(70, 3, 2, 2, spec(1, 2));
    let dist = all_pairs_shortest(inst.network());
    let bounds = ModelBounds { max_routes: Some(0), ..Default::default() };
    assert!(matches!(solve_exact_with(&inst, &dist, &bounds), Err(ExactError::InfeasibleBounds { .. })));
}

#[test]
fn stop_cap_is_respected() {
    let inst = random_instance(71, 4, 2, 2, spec(1, 2));
    let dist = all_pairs_shortest(inst.network());
    let bounds = ModelBounds { max_stops_per_route: Some(1), ..Default::default() };
    let sol = solve_exact_with(&inst, &dist, &bounds).unwrap();
    assert!(sol.routes.iter().all(|r| r.stops.len() == 3));
    assert!(validate(&inst, &sol, &dist).unwrap().feasible);
}

#[test]
fn node_budget_yields_incumbent_with_bound() {
    let net = NetworkRef::sioux_falls();
    let nodes: Vec<NodeId> = (2..=9).map(NodeId).collect();
    let inst = ecoroute::generate_instance(&net, NodeId(1), &nodes, &ecoroute::Protocol::default(), 5).unwrap();
    let dist = all_pairs_shortest(inst.network());
    let bounds = ModelBounds { node_budget: Some(5_000), ..Default::default() };
    let sol = solve_exact_with(&inst, &dist, &bounds).unwrap();
    let cert = sol.certificate.clone().unwrap();
    assert_eq!(cert.status, CertificateStatus::Incumbent);
    assert!(cert.bound <= sol.objectives.z3());
    assert!(validate(&inst, &sol, &dist).unwrap().feasible);
}

#[test]
fn cold_search_without_budget_has_no_incumbent() {
    let net = NetworkRef::sioux_falls();
    let nodes: Vec<NodeId> = (2..=12).map(NodeId).collect();
    let inst = ecoroute::generate_instance(&net, NodeId(1), &nodes, &ecoroute::Protocol::default(), 5).unwrap();
    let dist = all_pairs_shortest(inst.network());
    let bounds = ModelBounds { node_budget: Some(3), warm_start: false, time_budget: Duration::from_secs(1), ..Default::default() };
    assert!(matches!(solve_exact_with(&inst, &dist, &bounds), Err(ExactError::NoIncumbent { .. })));
}

#[test]
fn validator_flags_block_overflow() {
    let inst = random_instance(80, 2, 4, 2, spec(1, 4));
    let dist = all_pairs_shortest(inst.network());
    let mut sol = solve_heuristic_with(&inst, &dist, Strategy::Adapted).unwrap();
    sol.routes[0].config = ecoroute::packing::ContainerConfig::new(vec![3, 2, 0, 0]);
    let verdict = validate(&inst, &sol, &dist).unwrap();
    assert!(!verdict.feasible);
    assert!(verdict.has(Check::Constraint(4)));
}
