//! The solution document: a pretty-printed JSON file tied to its instance by
//! checksum.
//!
//! Modalities are written 1-based, as users number them.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{DemandLedger, Instance};
use crate::network::{DistanceMatrix, NodeId};
use crate::objective::{Lambda, Objectives};
use crate::packing::ContainerConfig;
use crate::solution::{Certificate, CertificateStatus, Pickup, Route, Solution, Strategy};
use crate::TOOL_VERSION;

pub const SOLUTION_FORMAT: &str = "ecoroute-solution/1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DocumentError {
    #[error("malformed solution document: {0}")]
    Syntax(String),
    #[error("{path}: {reason}")]
    Invalid { path: String, reason: String },
    #[error("solution belongs to instance {found}, not {expected}")]
    ChecksumMismatch { expected: String, found: String },
}

fn invalid(path: impl Into<String>, reason: impl Into<String>) -> DocumentError {
    DocumentError::Invalid { path: path.into(), reason: reason.into() }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolutionDoc {
    format: String,
    #[serde(default)]
    tool: Option<String>,
    instance: InstanceStamp,
    strategy: Strategy,
    routes: Vec<RouteDoc>,
    objectives: ObjectivesDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceStamp {
    name: String,
    checksum: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RouteDoc {
    stops: Vec<NodeId>,
    config: ContainerConfig,
    pickups: Vec<PickupDoc>,
    distance: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    path: Option<Vec<NodeId>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PickupDoc {
    node: NodeId,
    modality: usize,
    kg: u32,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectivesDoc {
    z1: u64,
    z2: u64,
    z3: f64,
    z3_exact: String,
    lambda: Lambda,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateDoc {
    status: CertificateStatus,
    bound: String,
    gap_percent: f64,
    nodes_explored: u64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct WriteOptions<'a> {
    /// Street-level walk of every route, for plotting.
    pub paths: Option<&'a DistanceMatrix>,
    pub certificate: bool,
}

fn ratio_text(r: Ratio<u128>) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_ratio(text: &str) -> Option<Ratio<u128>> {
    let (n, d) = text.split_once('/').unwrap_or((text, "1"));
    let (n, d): (u128, u128) = (n.trim().parse().ok()?, d.trim().parse().ok()?);
    (d != 0).then(|| Ratio::new(n, d))
}

pub fn write_solution(inst: &Instance, sol: &Solution, opts: WriteOptions<'_>) -> String {
    let routes = sol
        .routes
        .iter()
        .map(|r| RouteDoc {
            stops: r.stops.clone(),
            config: r.config.clone(),
            pickups: r
                .pickups
                .iter()
                .map(|p| PickupDoc { node: p.node, modality: p.modality + 1, kg: p.kg })
                .collect(),
            distance: r.distance,
            path: opts.paths.map(|d| r.path(d)),
        })
        .collect();
    let o = sol.objectives;
    let certificate = sol.certificate.as_ref().filter(|_| opts.certificate).map(|c| CertificateDoc {
        status: c.status,
        bound: ratio_text(c.bound),
        gap_percent: c.gap_percent(o.z3()),
        nodes_explored: c.nodes_explored,
    });
    let doc = SolutionDoc {
        format: SOLUTION_FORMAT.into(),
        tool: Some(TOOL_VERSION.into()),
        instance: InstanceStamp { name: inst.name().into(), checksum: inst.checksum() },
        strategy: sol.strategy,
        routes,
        objectives: ObjectivesDoc { z1: o.z1, z2: o.z2, z3: o.z3_f64(), z3_exact: o.z3_exact(), lambda: o.lambda },
        certificate,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("solution serialises");
    text.push('\n');
    text
}

/// Reads a solution written for `inst`.
///
/// Reported objectives are kept as written so a validator can compare them
/// against recomputation. The residual ledger is rebuilt from the pickups,
/// clamped at zero.
pub fn read_solution(inst: &Instance, text: &str) -> Result<Solution, DocumentError> {
    let doc: SolutionDoc = serde_json::from_str(text).map_err(|e| DocumentError::Syntax(e.to_string()))?;
    if doc.format != SOLUTION_FORMAT {
        return Err(invalid("format", format!("unsupported format `{}`", doc.format)));
    }
    let expected = inst.checksum();
    if doc.instance.checksum != expected {
        return Err(DocumentError::ChecksumMismatch { expected, found: doc.instance.checksum });
    }

    let mut routes = Vec::with_capacity(doc.routes.len());
    for (i, r) in doc.routes.into_iter().enumerate() {
        let mut pickups = Vec::with_capacity(r.pickups.len());
        for (p_idx, p) in r.pickups.into_iter().enumerate() {
            if p.modality == 0 {
                return Err(invalid(format!("routes[{i}].pickups[{p_idx}].modality"), "modalities start at 1"));
            }
            pickups.push(Pickup { node: p.node, modality: p.modality - 1, kg: p.kg });
        }
        routes.push(Route { stops: r.stops, config: r.config, pickups, distance: r.distance });
    }

    let mut residual = DemandLedger::new(inst);
    for p in routes.iter().flat_map(|r| &r.pickups) {
        if let Some(idx) = inst.demand_index(p.node) {
            if p.modality < inst.modalities() {
                let kg = p.kg.min(residual.residual(idx, p.modality));
                residual.collect(idx, p.modality, kg).expect("clamped to residual");
            }
        }
    }

    let certificate = match doc.certificate {
        Some(c) => Some(Certificate {
            status: c.status,
            bound: parse_ratio(&c.bound).ok_or_else(|| invalid("certificate.bound", format!("`{}` is not a ratio", c.bound)))?,
            nodes_explored: c.nodes_explored,
        }),
        None => None,
    };
    let o = doc.objectives;
    Ok(Solution {
        strategy: doc.strategy,
        routes,
        objectives: Objectives::new(o.z1, o.z2, o.lambda),
        residual,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_instance, NetworkRef, Protocol};
    use crate::routing::solve_heuristic;

    fn instance() -> Instance {
        let nodes: Vec<NodeId> = (2..=6).map(NodeId).collect();
        generate_instance(&NetworkRef::sioux_falls(), NodeId(1), &nodes, &Protocol::default(), 3).unwrap()
    }

    #[test]
    fn round_trip() {
        let inst = instance();
        let sol = solve_heuristic(&inst, Strategy::Adapted).unwrap();
        let text = write_solution(&inst, &sol, WriteOptions::default());
        let back = read_solution(&inst, &text).unwrap();
        assert_eq!(back, sol);
        assert_eq!(write_solution(&inst, &back, WriteOptions::default()), text);
    }

    #[test]
    fn modalities_are_one_based_on_disk() {
        let inst = instance();
        let sol = solve_heuristic(&inst, Strategy::Fixed).unwrap();
        let text = write_solution(&inst, &sol, WriteOptions::default());
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let mods: Vec<u64> = v["routes"]
            .as_array()
            .unwrap()
            .iter()
            .flat_map(|r| r["pickups"].as_array().unwrap().iter().map(|p| p["modality"].as_u64().unwrap()))
            .collect();
        assert!(mods.iter().all(|&m| (1..=4).contains(&m)));
    }

    #[test]
    fn rejects_other_instance() {
        let inst = instance();
        let sol = solve_heuristic(&inst, Strategy::Fixed).unwrap();
        let text = write_solution(&inst, &sol, WriteOptions::default());
        let mut parts = inst.to_parts();
        parts.demands[0][0] += 1;
        let other = Instance::new(parts).unwrap();
        assert_eq!(inst.with_lambda(Lambda::ZERO).checksum(), inst.checksum());
        assert!(matches!(read_solution(&other, &text), Err(DocumentError::ChecksumMismatch { .. })));
    }

    #[test]
    fn paths_walk_the_streets() {
        let inst = instance();
        let dist = crate::network::all_pairs_shortest(inst.network());
        let sol = solve_heuristic(&inst, Strategy::Fixed).unwrap();
        let text = write_solution(&inst, &sol, WriteOptions { paths: Some(&dist), certificate: false });
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let path = v["routes"][0]["path"].as_array().unwrap();
        assert_eq!(path.first(), path.last());
    }
}
