//! Routes and solutions shared by the heuristic and exact solvers.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::instance::{DemandLedger, Instance};
use crate::network::{DistanceMatrix, NodeId};
use crate::objective::{Lambda, Objectives};
use crate::packing::ContainerConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Fixed,
    Adapted,
    Exact,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Fixed => "fixed",
            Strategy::Adapted => "adapted",
            Strategy::Exact => "exact",
        })
    }
}

/// kg of one modality (0-based index) picked up at one node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pickup {
    pub node: NodeId,
    pub modality: usize,
    pub kg: u32,
}

/// One container trip: depot, service stops in order, depot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Route {
    pub stops: Vec<NodeId>,
    pub config: ContainerConfig,
    pub pickups: Vec<Pickup>,
    pub distance: u64,
}

impl Route {
    /// kg of modality `k` loaded over the whole trip.
    pub fn load(&self, k: usize) -> u64 {
        self.pickups.iter().filter(|p| p.modality == k).map(|p| u64::from(p.kg)).sum()
    }

    pub fn total_load(&self) -> u64 {
        self.pickups.iter().map(|p| u64::from(p.kg)).sum()
    }

    /// `y_i^k`: whether this route collects any modality-`k` waste.
    pub fn uses(&self, k: usize) -> bool {
        self.pickups.iter().any(|p| p.modality == k && p.kg > 0)
    }

    /// Modalities used by this route, i.e. its contribution to `Z1`.
    pub fn used_modalities(&self, modalities: usize) -> u64 {
        (0..modalities).filter(|&k| self.uses(k)).count() as u64
    }

    /// Full street-level walk of the route.
    pub fn path(&self, dist: &DistanceMatrix) -> Vec<NodeId> {
        let mut walk = vec![self.stops[0]];
        for leg in self.stops.windows(2) {
            walk.extend(dist.path(leg[0], leg[1]).into_iter().skip(1));
        }
        walk
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateStatus {
    /// The search space was exhausted.
    Optimal,
    /// A search budget ran out; the solution is the best one found.
    Incumbent,
}

/// Optimality evidence attached to exact-solver output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub status: CertificateStatus,
    /// Proven lower bound on `Z3`.
    pub bound: Ratio<u128>,
    pub nodes_explored: u64,
}

impl Certificate {
    /// Relative distance between the solution's `Z3` and the bound, percent.
    pub fn gap_percent(&self, z3: Ratio<u128>) -> f64 {
        let to_f64 = |r: Ratio<u128>| *r.numer() as f64 / *r.denom() as f64;
        let value = to_f64(z3);
        if value == 0.0 {
            return 0.0;
        }
        100.0 * (value - to_f64(self.bound)) / value
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub strategy: Strategy,
    pub routes: Vec<Route>,
    pub objectives: Objectives,
    pub residual: DemandLedger,
    pub certificate: Option<Certificate>,
}

impl Solution {
    pub fn new(inst: &Instance, strategy: Strategy, routes: Vec<Route>, residual: DemandLedger) -> Self {
        let objectives = evaluate(&routes, inst.modalities(), inst.lambda());
        Solution { strategy, routes, objectives, residual, certificate: None }
    }

    pub fn route_count(&self) -> usize {
        self.routes.len()
    }

    /// Total kg picked up over all routes.
    pub fn collected(&self) -> u64 {
        self.routes.iter().map(Route::total_load).sum()
    }

    /// Total kg of modality `k` collected at `node`.
    pub fn collected_at(&self, node: NodeId, k: usize) -> u64 {
        self.routes
            .iter()
            .flat_map(|r| &r.pickups)
            .filter(|p| p.node == node && p.modality == k)
            .map(|p| u64::from(p.kg))
            .sum()
    }
}

/// `Z1` from realised pickups and `Z2` from the routes' distances.
pub fn evaluate(routes: &[Route], modalities: usize, lambda: Lambda) -> Objectives {
    let z1 = routes.iter().map(|r| r.used_modalities(modalities)).sum();
    let z2 = routes.iter().map(|r| r.distance).sum();
    Objectives::new(z1, z2, lambda)
}
