//! Exact solving for small instances and feasibility checking for any
//! solution.
//!
//! The route set `I` is not fixed in advance: it is the set of routes a
//! solution actually uses, bounded by [`ModelBounds::max_routes`].

mod search;
mod validate;

use std::time::{Duration, Instant};

use num_rational::Ratio;
use thiserror::Error;

use crate::instance::{DemandLedger, Instance};
use crate::network::{all_pairs_shortest, DistanceMatrix};
use crate::packing::{block_requirements, ContainerConfig};
use crate::routing::solve_heuristic_with;
use crate::solution::{Certificate, CertificateStatus, Pickup, Route, Solution, Strategy};

pub use crate::objective::{objective, Objectives};
pub use validate::{validate, Check, ValidationError, Verdict, Violation};

use search::{Budget, Draft, Problem, Search};

/// Default wall-clock budget of the exact search.
pub const DEFAULT_TIME_BUDGET: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelBounds {
    /// Upper bound on the number of routes; defaults to one route per
    /// required block, `sum q_j^k`.
    pub max_routes: Option<usize>,
    /// Cap on service stops per route.
    pub max_stops_per_route: Option<usize>,
    pub time_budget: Duration,
    /// Cap on search nodes. Unlike the time budget, it stops the search at
    /// the same point on every run.
    pub node_budget: Option<u64>,
    /// Seed the incumbent with the better heuristic solution.
    pub warm_start: bool,
}

impl Default for ModelBounds {
    fn default() -> Self {
        ModelBounds {
            max_routes: None,
            max_stops_per_route: None,
            time_budget: DEFAULT_TIME_BUDGET,
            node_budget: None,
            warm_start: true,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("at most {max_routes} routes allowed but at least {needed} are required")]
    InfeasibleBounds { max_routes: usize, needed: usize },
    #[error("no feasible solution within the given route and stop limits")]
    Infeasible,
    #[error("search budget exhausted after {nodes} nodes ({elapsed:?}) without any feasible solution")]
    NoIncumbent { nodes: u64, elapsed: Duration },
}

pub fn solve_exact(inst: &Instance, bounds: &ModelBounds) -> Result<Solution, ExactError> {
    let dist = all_pairs_shortest(inst.network());
    solve_exact_with(inst, &dist, bounds)
}

/// Branch-and-bound minimisation of `Z3` under the instance's lambda.
///
/// The returned solution carries a [`Certificate`]: `optimal` when the search
/// space was exhausted, `incumbent` when a budget ran out first, with the
/// best proven lower bound either way.
pub fn solve_exact_with(
    inst: &Instance,
    dist: &DistanceMatrix,
    bounds: &ModelBounds,
) -> Result<Solution, ExactError> {
    let spec = inst.container();
    let q_total = block_requirements(&DemandLedger::new(inst), spec).total() as usize;
    let needed = q_total.div_ceil(spec.block_count() as usize);
    let max_routes = bounds.max_routes.unwrap_or(q_total);
    if max_routes < needed {
        return Err(ExactError::InfeasibleBounds { max_routes, needed });
    }
    let max_stops = bounds.max_stops_per_route.unwrap_or(usize::MAX);
    let lambda = inst.lambda();

    let warm = if bounds.warm_start {
        [Strategy::Adapted, Strategy::Fixed]
            .into_iter()
            .filter_map(|s| solve_heuristic_with(inst, dist, s).ok())
            .filter(|sol| {
                sol.routes.len() <= max_routes && sol.routes.iter().all(|r| r.stops.len() - 2 <= max_stops)
            })
            .min_by_key(|sol| lambda.scaled(sol.objectives.z1, sol.objectives.z2))
    } else {
        None
    };

    let problem = build_problem(inst, dist, max_routes, max_stops);
    let started = Instant::now();
    let budget = Budget { time: bounds.time_budget, nodes: bounds.node_budget };
    let warm_value = warm.as_ref().map(|s| lambda.scaled(s.objectives.z1, s.objectives.z2));
    let outcome = Search::new(&problem, budget, warm_value).run();

    let best = match outcome.best {
        Some(best) => best,
        None if outcome.exhausted => return Err(ExactError::Infeasible),
        None => return Err(ExactError::NoIncumbent { nodes: outcome.nodes, elapsed: started.elapsed() }),
    };
    let mut solution = match best.routes {
        Some(drafts) => {
            let routes: Vec<Route> = drafts.iter().map(|d| to_route(inst, &problem, d)).collect();
            let mut ledger = DemandLedger::new(inst);
            drain(&mut ledger, inst, &routes);
            Solution::new(inst, Strategy::Exact, routes, ledger)
        }
        None => {
            let sol = warm.expect("warm start present when search found nothing better");
            Solution::new(inst, Strategy::Exact, sol.routes, sol.residual)
        }
    };
    let (status, bound) = if outcome.exhausted {
        (CertificateStatus::Optimal, best.value)
    } else {
        (CertificateStatus::Incumbent, outcome.open_bound.map_or(best.value, |b| b.min(best.value)))
    };
    solution.certificate = Some(Certificate {
        status,
        bound: Ratio::new(bound, u128::from(lambda.denom())),
        nodes_explored: outcome.nodes,
    });
    Ok(solution)
}

fn build_problem(inst: &Instance, dist: &DistanceMatrix, max_routes: usize, max_stops: usize) -> Problem {
    let ids = inst.demand_nodes().to_vec();
    let depot = inst.depot();
    Problem {
        modalities: inst.modalities(),
        block_capacity: inst.container().block_capacity(),
        block_count: inst.container().block_count(),
        demand: inst.demands().iter().flatten().copied().collect(),
        from_depot: ids.iter().map(|&j| dist.distance(depot, j)).collect(),
        to_depot: ids.iter().map(|&j| dist.distance(j, depot)).collect(),
        between: ids.iter().flat_map(|&a| ids.iter().map(move |&b| dist.distance(a, b))).collect(),
        ids,
        lambda: inst.lambda(),
        max_routes,
        max_stops,
    }
}

fn to_route(inst: &Instance, problem: &Problem, draft: &Draft) -> Route {
    let spec = inst.container();
    let mut stops = vec![inst.depot()];
    stops.extend(draft.stops.iter().map(|&j| problem.ids[j]));
    stops.push(inst.depot());
    let config = ContainerConfig::new(draft.load.iter().map(|&l| l.div_ceil(spec.block_capacity())).collect());
    let pickups = draft
        .picks
        .iter()
        .map(|&(j, k, kg)| Pickup { node: problem.ids[j], modality: k, kg })
        .collect();
    Route { stops, config, pickups, distance: draft.distance }
}

fn drain(ledger: &mut DemandLedger, inst: &Instance, routes: &[Route]) {
    for p in routes.iter().flat_map(|r| &r.pickups) {
        let idx = inst.demand_index(p.node).expect("pickup at a demand node");
        ledger.collect(idx, p.modality, p.kg).expect("search never over-collects");
    }
}
