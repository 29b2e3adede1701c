use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::instance::Instance;
use crate::network::{DistanceMatrix, NodeId};
use crate::objective::Objectives;
use crate::solution::{evaluate, Route, Solution};

/// Model constraint (or objective bookkeeping) a violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    /// Constraint `C1`..`C12` of the routing model.
    Constraint(u8),
    /// Reported distances or objective values disagree with recomputation.
    Objective,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::Constraint(n) => write!(f, "C{n}"),
            Check::Objective => f.write_str("OBJ"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub check: Check,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.check, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub feasible: bool,
    pub violations: Vec<Violation>,
    /// Objectives recomputed from stops and pickups, under the solution's lambda.
    pub recomputed: Objectives,
}

impl Verdict {
    pub fn has(&self, check: Check) -> bool {
        self.violations.iter().any(|v| v.check == check)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidationError {
    #[error("route {route}: node {node} is not in the network")]
    UnknownNode { route: usize, node: NodeId },
}

/// Checks a solution against the routing model.
///
/// Every route must be a depot-anchored closed walk over distinct demand
/// nodes (C7-C9, C11), collect something (C1) only where it stops (C10), and
/// respect its container's blocks (C3-C5). Globally, every node with waste
/// must be visited (C2) and every `(node, modality)` collected exactly (C6).
/// Distances and objectives are recomputed and must match the reported ones.
pub fn validate(inst: &Instance, sol: &Solution, dist: &DistanceMatrix) -> Result<Verdict, ValidationError> {
    for (i, route) in sol.routes.iter().enumerate() {
        let nodes = route.stops.iter().chain(route.pickups.iter().map(|p| &p.node));
        if let Some(&node) = nodes.into_iter().find(|n| !dist.contains(**n)) {
            return Err(ValidationError::UnknownNode { route: i, node });
        }
    }

    let mut out = Vec::new();
    let mut push = |n: u8, detail: String| out.push(Violation { check: Check::Constraint(n), detail });
    let k_count = inst.modalities();
    let spec = inst.container();
    let demand_nodes: HashSet<NodeId> = inst.demand_nodes().iter().copied().collect();
    let mut recomputed_routes: Vec<Route> = Vec::with_capacity(sol.routes.len());
    let mut objective_issues = Vec::new();

    for (i, route) in sol.routes.iter().enumerate() {
        let r = i + 1;
        match route.stops.first() {
            Some(&first) if first == inst.depot() => {}
            other => push(7, format!("route {r} starts at {other:?} instead of depot {}", inst.depot())),
        }
        match route.stops.last() {
            Some(&last) if last == inst.depot() && route.stops.len() >= 2 => {}
            other => push(8, format!("route {r} ends at {other:?} instead of depot {}", inst.depot())),
        }
        let inner: &[NodeId] = if route.stops.len() >= 2 { &route.stops[1..route.stops.len() - 1] } else { &[] };
        let mut seen = HashSet::new();
        for &stop in inner {
            if stop == inst.depot() {
                push(9, format!("route {r} passes through the depot mid-route"));
            } else if !demand_nodes.contains(&stop) {
                push(9, format!("route {r} stops at {stop}, which is not a demand node"));
            }
            if !seen.insert(stop) {
                push(11, format!("route {r} visits {stop} twice, closing a cycle away from the depot"));
            }
        }

        if route.config.blocks().len() != k_count {
            push(
                12,
                format!("route {r} config has {} entries for {k_count} modalities", route.config.blocks().len()),
            );
        }
        for p in &route.pickups {
            if p.modality >= k_count {
                push(12, format!("route {r} picks up unknown modality {}", p.modality + 1));
            }
            if p.kg == 0 {
                push(12, format!("route {r} lists an empty pickup at node {}", p.node));
            }
            if !inner.contains(&p.node) {
                push(10, format!("route {r} collects at {} without stopping there", p.node));
            }
        }
        if route.total_load() == 0 {
            push(1, format!("route {r} collects no waste"));
        }
        let blocks = route.config.total_blocks();
        if blocks > u64::from(spec.block_count()) {
            push(4, format!("route {r} packs {blocks} blocks but a container holds {}", spec.block_count()));
        }
        for k in 0..k_count {
            let n_k = route.config.blocks().get(k).copied().unwrap_or(0);
            let load = route.load(k);
            if load > 0 && n_k == 0 {
                push(3, format!("route {r} collects modality {} without a block for it", k + 1));
            }
            let cap = u64::from(n_k) * u64::from(spec.block_capacity());
            if load > cap {
                push(5, format!("route {r} loads {load} kg of modality {} into {cap} kg of blocks", k + 1));
            }
        }

        let walked = if route.stops.is_empty() { 0 } else { dist.walk_length(&route.stops) };
        if walked != route.distance {
            objective_issues.push(format!("route {r} reports distance {} but its legs sum to {walked}", route.distance));
        }
        recomputed_routes.push(Route { distance: walked, ..route.clone() });
    }

    let visited: HashSet<NodeId> = sol
        .routes
        .iter()
        .flat_map(|r| r.stops.iter().copied())
        .filter(|&n| n != inst.depot())
        .collect();
    for (idx, &node) in inst.demand_nodes().iter().enumerate() {
        let total: u64 = inst.demands()[idx].iter().map(|&w| u64::from(w)).sum();
        if total > 0 && !visited.contains(&node) {
            push(2, format!("demand node {node} is never visited"));
        }
        for k in 0..k_count {
            let want = u64::from(inst.demand(idx, k));
            let got = sol.collected_at(node, k);
            if got != want {
                push(6, format!("node {node} modality {}: collected {got} kg of {want} kg", k + 1));
            }
        }
    }
    for p in sol.routes.iter().flat_map(|r| &r.pickups) {
        if !demand_nodes.contains(&p.node) {
            push(6, format!("pickup at {}, which produces no waste", p.node));
        }
    }

    let recomputed = evaluate(&recomputed_routes, k_count, sol.objectives.lambda);
    if recomputed.z1 != sol.objectives.z1 {
        objective_issues.push(format!("reported Z1 {} but pickups give {}", sol.objectives.z1, recomputed.z1));
    }
    if recomputed.z2 != sol.objectives.z2 {
        objective_issues.push(format!("reported Z2 {} but routes give {}", sol.objectives.z2, recomputed.z2));
    }
    out.extend(objective_issues.into_iter().map(|detail| Violation { check: Check::Objective, detail }));

    Ok(Verdict { feasible: out.is_empty(), violations: out, recomputed })
}
