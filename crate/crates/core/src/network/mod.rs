//! Street networks: directed weighted graphs, their all-pairs shortest
//! distances, and the bundled benchmark topologies.

mod edge_list;
mod shortest;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use edge_list::parse_edge_list;
pub use shortest::{all_pairs_dijkstra, all_pairs_floyd_warshall, all_pairs_shortest, DistanceMatrix};

/// Opaque node label as it appears in input files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arc {
    pub from: NodeId,
    pub to: NodeId,
    pub length: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: negative arc length {length}")]
    NegativeLength { line: usize, length: i64 },
    #[error("self-loop arc at node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate arc {from} -> {to}")]
    DuplicateArc { from: NodeId, to: NodeId },
    #[error("network has no arcs")]
    Empty,
    #[error("network is not strongly connected: no path from {from} to {to}")]
    NotStronglyConnected { from: NodeId, to: NodeId },
}

/// A strongly connected directed graph with non-negative integer arc lengths.
///
/// Nodes are the endpoints of the arcs, kept in ascending id order. Internal
/// indices follow that order, so index comparisons agree with id comparisons.
#[derive(Debug, Clone)]
pub struct Network {
    name: String,
    nodes: Vec<NodeId>,
    arcs: Vec<Arc>,
    index: HashMap<NodeId, usize>,
    // Outgoing (target index, length), sorted by target index.
    out: Vec<Vec<(usize, u64)>>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.nodes == other.nodes && self.arcs == other.arcs
    }
}

impl Eq for Network {}

impl Network {
    pub fn new(name: impl Into<String>, arcs: Vec<Arc>) -> Result<Self, NetworkError> {
        if arcs.is_empty() {
            return Err(NetworkError::Empty);
        }
        let mut seen = BTreeSet::new();
        for arc in &arcs {
            if arc.from == arc.to {
                return Err(NetworkError::SelfLoop(arc.from));
            }
            if !seen.insert((arc.from, arc.to)) {
                return Err(NetworkError::DuplicateArc { from: arc.from, to: arc.to });
            }
        }
        let nodes: Vec<NodeId> = arcs
            .iter()
            .flat_map(|a| [a.from, a.to])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: HashMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut out = vec![Vec::new(); nodes.len()];
        for arc in &arcs {
            out[index[&arc.from]].push((index[&arc.to], arc.length));
        }
        for list in &mut out {
            list.sort_unstable();
        }
        let net = Network { name: name.into(), nodes, arcs, index, out };
        net.check_strongly_connected()?;
        Ok(net)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.index.contains_key(&node)
    }

    pub fn index_of(&self, node: NodeId) -> Option<usize> {
        self.index.get(&node).copied()
    }

    pub(crate) fn out_arcs(&self, idx: usize) -> &[(usize, u64)] {
        &self.out[idx]
    }

    /// Renders the network as a directed edge list that
    /// [`parse_edge_list`] reads back to an equal network.
    pub fn to_edge_list(&self) -> String {
        let mut text = format!(
            "# name: {}\n# {} nodes, {} directed arcs\n# FROM TO LENGTH directed\n",
            self.name,
            self.nodes.len(),
            self.arcs.len()
        );
        for arc in &self.arcs {
            text.push_str(&format!("{} {} {} directed\n", arc.from, arc.to, arc.length));
        }
        text
    }

    fn check_strongly_connected(&self) -> Result<(), NetworkError> {
        let n = self.nodes.len();
        let mut reverse = vec![Vec::new(); n];
        for (from, list) in self.out.iter().enumerate() {
            for &(to, _) in list {
                reverse[to].push(from);
            }
        }
        let forward: Vec<Vec<usize>> =
            self.out.iter().map(|l| l.iter().map(|&(t, _)| t).collect()).collect();
        let root = 0;
        if let Some(missing) = unreachable_from(root, &forward) {
            return Err(NetworkError::NotStronglyConnected {
                from: self.nodes[root],
                to: self.nodes[missing],
            });
        }
        if let Some(missing) = unreachable_from(root, &reverse) {
            return Err(NetworkError::NotStronglyConnected {
                from: self.nodes[missing],
                to: self.nodes[root],
            });
        }
        Ok(())
    }
}

fn unreachable_from(root: usize, adjacency: &[Vec<usize>]) -> Option<usize> {
    let mut seen = vec![false; adjacency.len()];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &v in &adjacency[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen.iter().position(|&s| !s)
}

const SIOUX_FALLS_EDGES: &str = include_str!("../../data/sioux_falls.edges");

/// The Sioux Falls benchmark network: nodes 1-24, 76 directed arcs.
pub fn bundled_sioux_falls() -> Network {
    parse_edge_list("sioux-falls", SIOUX_FALLS_EDGES).expect("bundled Sioux Falls data is valid")
}
