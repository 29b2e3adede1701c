//! Problem instances: demand points, waste amounts per modality, container
//! specification, the instance document format and the residual-demand
//! ledger used while solving.

use std::sync::Arc as Shared;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::experiments::standin::{make_standin_network, STANDIN_BUNDLE};
use crate::network::{bundled_sioux_falls, parse_edge_list, Network, NetworkError, NodeId};
use crate::objective::Lambda;
use crate::rng::SeededRng;

pub const INSTANCE_FORMAT: &str = "ecoroute-instance/1";
pub const SIOUX_FALLS_BUNDLE: &str = "sioux-falls";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("{path}: {reason}")]
    Invalid { path: String, reason: String },
    #[error("network: {0}")]
    Network(#[from] NetworkError),
    #[error("malformed instance document: {0}")]
    Syntax(String),
}

fn invalid(path: impl Into<String>, reason: impl Into<String>) -> InstanceError {
    InstanceError::Invalid { path: path.into(), reason: reason.into() }
}

/// Block capacity `c` (kg) and blocks per container `|L|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawContainer", into = "RawContainer")]
pub struct ContainerSpec {
    block_capacity: u32,
    block_count: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawContainer {
    block_capacity: u32,
    block_count: u32,
}

impl TryFrom<RawContainer> for ContainerSpec {
    type Error = InstanceError;
    fn try_from(raw: RawContainer) -> Result<Self, Self::Error> {
        ContainerSpec::new(raw.block_capacity, raw.block_count)
    }
}

impl From<ContainerSpec> for RawContainer {
    fn from(spec: ContainerSpec) -> Self {
        RawContainer { block_capacity: spec.block_capacity, block_count: spec.block_count }
    }
}

impl ContainerSpec {
    pub fn new(block_capacity: u32, block_count: u32) -> Result<Self, InstanceError> {
        if block_capacity == 0 {
            return Err(invalid("container.block_capacity", "must be at least 1"));
        }
        if block_count == 0 {
            return Err(invalid("container.block_count", "must be at least 1"));
        }
        Ok(ContainerSpec { block_capacity, block_count })
    }

    /// `c`, kg per block.
    pub fn block_capacity(&self) -> u32 {
        self.block_capacity
    }

    /// `|L|`, blocks per container.
    pub fn block_count(&self) -> u32 {
        self.block_count
    }

    /// `C = c * |L|`.
    pub fn total_capacity(&self) -> u64 {
        u64::from(self.block_capacity) * u64::from(self.block_count)
    }
}

/// Where an instance's network comes from; kept so documents can refer to
/// bundled networks by name instead of inlining them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NetworkSource {
    Bundle {
        bundle: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    Inline {
        name: String,
        edges: String,
    },
}

/// A network together with the reference used to obtain it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkRef {
    pub source: NetworkSource,
    pub network: Shared<Network>,
}

impl NetworkRef {
    pub fn sioux_falls() -> Self {
        NetworkRef {
            source: NetworkSource::Bundle { bundle: SIOUX_FALLS_BUNDLE.into(), seed: None },
            network: Shared::new(bundled_sioux_falls()),
        }
    }

    pub fn standin(seed: u64) -> Self {
        NetworkRef {
            source: NetworkSource::Bundle { bundle: STANDIN_BUNDLE.into(), seed: Some(seed) },
            network: Shared::new(make_standin_network(seed)),
        }
    }

    pub fn inline(network: Network) -> Self {
        NetworkRef {
            source: NetworkSource::Inline {
                name: network.name().to_string(),
                edges: network.to_edge_list(),
            },
            network: Shared::new(network),
        }
    }

    pub fn resolve(source: &NetworkSource) -> Result<Self, InstanceError> {
        match source {
            NetworkSource::Bundle { bundle, seed } => match (bundle.as_str(), seed) {
                (SIOUX_FALLS_BUNDLE, None) => Ok(Self::sioux_falls()),
                (STANDIN_BUNDLE, seed) => Ok(Self::standin(seed.unwrap_or(0))),
                _ => Err(invalid("network.bundle", format!("unknown bundle `{bundle}`"))),
            },
            NetworkSource::Inline { name, edges } => Ok(NetworkRef {
                source: source.clone(),
                network: Shared::new(parse_edge_list(name, edges)?),
            }),
        }
    }
}

/// A complete problem instance. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    name: String,
    network: NetworkRef,
    depot: NodeId,
    demand_nodes: Vec<NodeId>,
    modalities: usize,
    demands: Vec<Vec<u32>>,
    container: ContainerSpec,
    lambda: Lambda,
    seed: Option<u64>,
}

/// Fields of an [`Instance`] before validation.
#[derive(Debug, Clone)]
pub struct InstanceParts {
    pub name: String,
    pub network: NetworkRef,
    pub depot: NodeId,
    pub demand_nodes: Vec<NodeId>,
    pub modalities: usize,
    /// One row per demand node, one column per modality, kg.
    pub demands: Vec<Vec<u32>>,
    pub container: ContainerSpec,
    pub lambda: Lambda,
    pub seed: Option<u64>,
}

impl Instance {
    pub fn new(parts: InstanceParts) -> Result<Self, InstanceError> {
        let net = &parts.network.network;
        if !net.contains(parts.depot) {
            return Err(invalid("depot", format!("node {} is not in the network", parts.depot)));
        }
        if parts.demand_nodes.is_empty() {
            return Err(invalid("demand_nodes", "at least one demand node is required"));
        }
        for (i, &node) in parts.demand_nodes.iter().enumerate() {
            let path = format!("demand_nodes[{i}]");
            if !net.contains(node) {
                return Err(invalid(path, format!("node {node} is not in the network")));
            }
            if node == parts.depot {
                return Err(invalid(path, format!("depot {node} cannot be a demand node")));
            }
            if parts.demand_nodes[..i].contains(&node) {
                return Err(invalid(path, format!("node {node} is listed twice")));
            }
        }
        if parts.modalities == 0 {
            return Err(invalid("modalities", "at least one modality is required"));
        }
        if parts.demands.len() != parts.demand_nodes.len() {
            return Err(invalid(
                "demands",
                format!(
                    "expected {} rows (one per demand node), found {}",
                    parts.demand_nodes.len(),
                    parts.demands.len()
                ),
            ));
        }
        for (i, row) in parts.demands.iter().enumerate() {
            if row.len() != parts.modalities {
                return Err(invalid(
                    format!("demands[{i}]"),
                    format!("expected {} modalities, found {}", parts.modalities, row.len()),
                ));
            }
        }
        if parts.demands.iter().flatten().all(|&w| w == 0) {
            return Err(invalid("demands", "all demands are zero"));
        }
        Ok(Instance {
            name: parts.name,
            network: parts.network,
            depot: parts.depot,
            demand_nodes: parts.demand_nodes,
            modalities: parts.modalities,
            demands: parts.demands,
            container: parts.container,
            lambda: parts.lambda,
            seed: parts.seed,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn network(&self) -> &Network {
        &self.network.network
    }

    pub fn network_ref(&self) -> &NetworkRef {
        &self.network
    }

    pub fn depot(&self) -> NodeId {
        self.depot
    }

    pub fn demand_nodes(&self) -> &[NodeId] {
        &self.demand_nodes
    }

    /// `|K|`.
    pub fn modalities(&self) -> usize {
        self.modalities
    }

    /// Demand rows, aligned with [`Instance::demand_nodes`].
    pub fn demands(&self) -> &[Vec<u32>] {
        &self.demands
    }

    /// `w_j^k` for the demand node at position `idx`, modality `k` (0-based).
    pub fn demand(&self, idx: usize, k: usize) -> u32 {
        self.demands[idx][k]
    }

    pub fn demand_index(&self, node: NodeId) -> Option<usize> {
        self.demand_nodes.iter().position(|&n| n == node)
    }

    pub fn container(&self) -> ContainerSpec {
        self.container
    }

    pub fn lambda(&self) -> Lambda {
        self.lambda
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Same instance under a different lambda.
    pub fn with_lambda(&self, lambda: Lambda) -> Instance {
        Instance { lambda, ..self.clone() }
    }

    pub fn to_parts(&self) -> InstanceParts {
        InstanceParts {
            name: self.name.clone(),
            network: self.network.clone(),
            depot: self.depot,
            demand_nodes: self.demand_nodes.clone(),
            modalities: self.modalities,
            demands: self.demands.clone(),
            container: self.container,
            lambda: self.lambda,
            seed: self.seed,
        }
    }

    /// Hex SHA-256 of the canonical instance document.
    /// SHA-256 of the instance document with lambda reset to 1. Lambda is a
    /// solve parameter, so re-weighting keeps solutions tied to the same data.
    pub fn checksum(&self) -> String {
        hex::encode(Sha256::digest(write_instance(&self.with_lambda(Lambda::ONE)).as_bytes()))
    }
}

/// Per-node, per-modality and grand totals of waste.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WasteTotals {
    pub per_node: Vec<u64>,
    pub per_modality: Vec<u64>,
    pub grand: u64,
}

pub fn total_waste(inst: &Instance) -> WasteTotals {
    let per_node: Vec<u64> =
        inst.demands.iter().map(|row| row.iter().map(|&w| u64::from(w)).sum()).collect();
    let per_modality: Vec<u64> = (0..inst.modalities)
        .map(|k| inst.demands.iter().map(|row| u64::from(row[k])).sum())
        .collect();
    let grand = per_node.iter().sum();
    WasteTotals { per_node, per_modality, grand }
}

/// Instance-generation parameters besides network, nodes and seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Protocol {
    pub modalities: usize,
    /// Inclusive kg range of every drawn demand.
    pub demand_range: (u32, u32),
    pub container: ContainerSpec,
    pub lambda: Lambda,
}

impl Default for Protocol {
    /// Four modalities, demands uniform on 1..=9 kg, four 1 kg blocks, lambda 1.
    fn default() -> Self {
        Protocol {
            modalities: 4,
            demand_range: (1, 9),
            container: ContainerSpec { block_capacity: 1, block_count: 4 },
            lambda: Lambda::ONE,
        }
    }
}

/// Draws every `w_j^k` independently and uniformly from the protocol's range.
///
/// Draw order is demand node by demand node (as listed), modality 1 to `|K|`
/// within a node, all from one [`SeededRng`] seeded with `seed`.
pub fn generate_instance(
    network: &NetworkRef,
    depot: NodeId,
    demand_nodes: &[NodeId],
    protocol: &Protocol,
    seed: u64,
) -> Result<Instance, InstanceError> {
    let (lo, hi) = protocol.demand_range;
    if lo > hi {
        return Err(invalid("demand_range", format!("empty range {lo}:{hi}")));
    }
    if demand_nodes.contains(&depot) {
        return Err(invalid("demand_nodes", format!("depot {depot} cannot be a demand node")));
    }
    let mut rng = SeededRng::new(seed);
    let demands = demand_nodes
        .iter()
        .map(|_| (0..protocol.modalities).map(|_| rng.uniform_inclusive(lo, hi)).collect())
        .collect();
    Instance::new(InstanceParts {
        name: format!("{}-n{}-s{}", network.network.name(), demand_nodes.len(), seed),
        network: network.clone(),
        depot,
        demand_nodes: demand_nodes.to_vec(),
        modalities: protocol.modalities,
        demands,
        container: protocol.container,
        lambda: protocol.lambda,
        seed: Some(seed),
    })
}

#[derive(Serialize)]
struct InstanceDocOut<'a> {
    format: &'static str,
    name: &'a str,
    network: &'a NetworkSource,
    depot: NodeId,
    demand_nodes: &'a [NodeId],
    modalities: usize,
    demands: &'a [Vec<u32>],
    container: ContainerSpec,
    lambda: Lambda,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDocIn {
    #[serde(default)]
    format: Option<String>,
    name: String,
    network: NetworkSource,
    depot: NodeId,
    demand_nodes: Vec<NodeId>,
    modalities: usize,
    demands: Vec<Vec<i64>>,
    container: RawContainer,
    #[serde(default)]
    lambda: Option<Lambda>,
    #[serde(default)]
    seed: Option<u64>,
}

/// Serialises an instance as a pretty-printed JSON document.
pub fn write_instance(inst: &Instance) -> String {
    let doc = InstanceDocOut {
        format: INSTANCE_FORMAT,
        name: &inst.name,
        network: &inst.network.source,
        depot: inst.depot,
        demand_nodes: &inst.demand_nodes,
        modalities: inst.modalities,
        demands: &inst.demands,
        container: inst.container,
        lambda: inst.lambda,
        seed: inst.seed,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("instance serialises");
    text.push('\n');
    text
}

pub fn read_instance(text: &str) -> Result<Instance, InstanceError> {
    let doc: InstanceDocIn =
        serde_json::from_str(text).map_err(|e| InstanceError::Syntax(e.to_string()))?;
    if let Some(format) = &doc.format {
        if format != INSTANCE_FORMAT {
            return Err(invalid("format", format!("unsupported format `{format}`")));
        }
    }
    let container = ContainerSpec::try_from(doc.container)?;
    let mut demands = Vec::with_capacity(doc.demands.len());
    for (i, row) in doc.demands.iter().enumerate() {
        let mut parsed = Vec::with_capacity(row.len());
        for (k, &w) in row.iter().enumerate() {
            let path = format!("demands[{i}][{k}]");
            let node = doc.demand_nodes.get(i).map_or("?".to_string(), |n| n.to_string());
            if w < 0 {
                return Err(invalid(
                    path,
                    format!("negative demand {w} at node {node}, modality {}", k + 1),
                ));
            }
            let w = u32::try_from(w).map_err(|_| {
                invalid(path, format!("demand {w} at node {node}, modality {} is too large", k + 1))
            })?;
            parsed.push(w);
        }
        demands.push(parsed);
    }
    Instance::new(InstanceParts {
        name: doc.name,
        network: NetworkRef::resolve(&doc.network)?,
        depot: doc.depot,
        demand_nodes: doc.demand_nodes,
        modalities: doc.modalities,
        demands,
        container,
        lambda: doc.lambda.unwrap_or_default(),
        seed: doc.seed,
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot collect {requested} kg of modality {} at node {node}: only {available} kg left", .modality + 1)]
pub struct OverCollection {
    pub node: NodeId,
    pub modality: usize,
    pub requested: u32,
    pub available: u32,
}

/// Residual demand during one solve. Rows align with the instance's demand
/// nodes; amounts only ever decrease.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandLedger {
    nodes: Vec<NodeId>,
    residual: Vec<Vec<u32>>,
    remaining: u64,
}

impl DemandLedger {
    pub fn new(inst: &Instance) -> Self {
        DemandLedger {
            nodes: inst.demand_nodes.clone(),
            residual: inst.demands.clone(),
            remaining: total_waste(inst).grand,
        }
    }

    pub fn residual(&self, idx: usize, k: usize) -> u32 {
        self.residual[idx][k]
    }

    pub fn row(&self, idx: usize) -> &[u32] {
        &self.residual[idx]
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.residual
    }

    pub fn node(&self, idx: usize) -> NodeId {
        self.nodes[idx]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Total kg still uncollected.
    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    pub fn is_clear(&self) -> bool {
        self.remaining == 0
    }

    pub fn node_is_clear(&self, idx: usize) -> bool {
        self.residual[idx].iter().all(|&r| r == 0)
    }

    /// Records a pickup of `kg` of modality `k` at node position `idx`.
    pub fn collect(&mut self, idx: usize, k: usize, kg: u32) -> Result<(), OverCollection> {
        let available = self.residual[idx][k];
        if kg > available {
            return Err(OverCollection { node: self.nodes[idx], modality: k, requested: kg, available });
        }
        self.residual[idx][k] -= kg;
        self.remaining -= u64::from(kg);
        Ok(())
    }
}
