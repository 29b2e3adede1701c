//! Greedy two-phase route construction.
//!
//! Phase 1 sends a diversified container on out-and-back trips to every node
//! that still holds waste of all modalities, nearest node first, until it no
//! longer does. Phase 2 clears what is left, either with diversified
//! containers that chain nearest-neighbour stops until their blocks are full
//! ([`Strategy::Fixed`]), or with single-node trips whose container is
//! configured for that node ([`Strategy::Adapted`]).
//!
//! Ties on distance are always broken by the lower node id.

use thiserror::Error;

use crate::instance::{DemandLedger, Instance};
use crate::network::{all_pairs_shortest, DistanceMatrix, NodeId};
use crate::packing::{adapted_config, block_requirements, diversified_config, ContainerConfig, PackingError};
use crate::solution::{Pickup, Route, Solution, Strategy};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error(transparent)]
    Packing(#[from] PackingError),
    #[error("the heuristic solver does not handle strategy `{0}`")]
    UnsupportedStrategy(Strategy),
}

/// Demand-node positions sorted by distance from the depot, then node id.
fn by_depot_distance(inst: &Instance, dist: &DistanceMatrix) -> Vec<usize> {
    let mut order: Vec<usize> = (0..inst.demand_nodes().len()).collect();
    order.sort_by_key(|&i| {
        let node = inst.demand_nodes()[i];
        (dist.distance(inst.depot(), node), node)
    });
    order
}

/// Loads up to the container's per-modality capacity at `idx`, updating the
/// ledger and the remaining capacities.
fn load_at(
    ledger: &mut DemandLedger,
    idx: usize,
    spare: &mut [u32],
    pickups: &mut Vec<Pickup>,
) {
    for (k, room) in spare.iter_mut().enumerate() {
        let take = ledger.residual(idx, k).min(*room);
        if take > 0 {
            ledger.collect(idx, k, take).expect("pickup bounded by residual");
            *room -= take;
            pickups.push(Pickup { node: ledger.node(idx), modality: k, kg: take });
        }
    }
}

fn out_and_back(
    inst: &Instance,
    dist: &DistanceMatrix,
    ledger: &mut DemandLedger,
    idx: usize,
    config: ContainerConfig,
) -> Route {
    let spec = inst.container();
    let mut spare: Vec<u32> = (0..inst.modalities()).map(|k| config.capacity(k, spec)).collect();
    let mut pickups = Vec::new();
    load_at(ledger, idx, &mut spare, &mut pickups);
    let stops = vec![inst.depot(), inst.demand_nodes()[idx], inst.depot()];
    let distance = dist.walk_length(&stops);
    Route { stops, config, pickups, distance }
}

/// Phase 1: out-and-back diversified trips to nodes holding every modality.
pub fn phase1_diversified(
    inst: &Instance,
    ledger: &mut DemandLedger,
    dist: &DistanceMatrix,
) -> Result<Vec<Route>, PackingError> {
    let config = diversified_config(inst.container(), inst.modalities())?;
    let mut routes = Vec::new();
    for idx in by_depot_distance(inst, dist) {
        while ledger.row(idx).iter().all(|&r| r > 0) {
            routes.push(out_and_back(inst, dist, ledger, idx, config.clone()));
        }
    }
    Ok(routes)
}

/// Phase 2, fixed strategy: diversified containers extended stop by stop to
/// the nearest node holding waste some unfilled block can take.
pub fn phase2_fixed(
    inst: &Instance,
    ledger: &mut DemandLedger,
    dist: &DistanceMatrix,
) -> Result<Vec<Route>, PackingError> {
    let config = diversified_config(inst.container(), inst.modalities())?;
    let spec = inst.container();
    let mut routes = Vec::new();
    while !ledger.is_clear() {
        let mut spare: Vec<u32> = (0..inst.modalities()).map(|k| config.capacity(k, spec)).collect();
        let mut stops = vec![inst.depot()];
        let mut pickups = Vec::new();
        let mut here = inst.depot();
        loop {
            let next = (0..ledger.len())
                .filter(|&idx| spare.iter().enumerate().any(|(k, &room)| room > 0 && ledger.residual(idx, k) > 0))
                .min_by_key(|&idx| (dist.distance(here, ledger.node(idx)), ledger.node(idx)));
            let Some(idx) = next else { break };
            load_at(ledger, idx, &mut spare, &mut pickups);
            here = ledger.node(idx);
            stops.push(here);
            if spare.iter().all(|&room| room == 0) {
                break;
            }
        }
        stops.push(inst.depot());
        let distance = dist.walk_length(&stops);
        routes.push(Route { stops, config: config.clone(), pickups, distance });
    }
    Ok(routes)
}

/// Phase 2, adapted strategy: one out-and-back trip at a time to the pending
/// node nearest the depot, with a container configured for its residual.
pub fn phase2_adapted(
    inst: &Instance,
    ledger: &mut DemandLedger,
    dist: &DistanceMatrix,
) -> Result<Vec<Route>, PackingError> {
    let mut pending: Vec<usize> =
        by_depot_distance(inst, dist).into_iter().filter(|&idx| !ledger.node_is_clear(idx)).collect();
    let mut routes = Vec::new();
    while let Some(&idx) = pending.first() {
        let q = block_requirements(ledger, inst.container());
        let config = adapted_config(q.row(idx), inst.container())?;
        routes.push(out_and_back(inst, dist, ledger, idx, config));
        if ledger.node_is_clear(idx) {
            pending.remove(0);
        }
    }
    Ok(routes)
}

pub fn solve_heuristic(inst: &Instance, strategy: Strategy) -> Result<Solution, SolveError> {
    let dist = all_pairs_shortest(inst.network());
    solve_heuristic_with(inst, &dist, strategy)
}

/// Like [`solve_heuristic`] with a precomputed distance matrix.
///
/// With fewer blocks than modalities the fixed strategy is rejected; the
/// adapted strategy skips phase 1 (no diversified container exists) and
/// serves every node with configured trips.
pub fn solve_heuristic_with(
    inst: &Instance,
    dist: &DistanceMatrix,
    strategy: Strategy,
) -> Result<Solution, SolveError> {
    let mut ledger = DemandLedger::new(inst);
    let mut routes = match (strategy, phase1_diversified(inst, &mut ledger, dist)) {
        (_, Ok(routes)) => routes,
        (Strategy::Adapted, Err(PackingError::TooFewBlocks { .. })) => Vec::new(),
        (_, Err(e)) => return Err(e.into()),
    };
    let tail = match strategy {
        Strategy::Fixed => phase2_fixed(inst, &mut ledger, dist)?,
        Strategy::Adapted => phase2_adapted(inst, &mut ledger, dist)?,
        Strategy::Exact => return Err(SolveError::UnsupportedStrategy(strategy)),
    };
    routes.extend(tail);
    debug_assert!(ledger.is_clear());
    Ok(Solution::new(inst, strategy, routes, ledger))
}

/// Depot-to-node distance of every demand node.
pub fn depot_distances(inst: &Instance, dist: &DistanceMatrix) -> Vec<(NodeId, u64)> {
    inst.demand_nodes().iter().map(|&n| (n, dist.distance(inst.depot(), n))).collect()
}
