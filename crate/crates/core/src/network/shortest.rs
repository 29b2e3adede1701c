use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use super::{Network, NodeId};

/// Shortest `(distance, hop count)` pairs, minimised lexicographically.
///
/// Hop counts make successor selection well founded when zero-length arcs
/// exist: every canonical successor is strictly closer in hops.
type Key = (u64, u32);

const UNREACHED: Key = (u64::MAX, u32::MAX);

/// All-pairs shortest distances over a [`Network`], with one canonical
/// shortest path per ordered pair.
///
/// The canonical successor of `u` towards `v` is the lowest-id out-neighbour
/// `w` with `len(u,w) + d(w,v) = d(u,v)` and one hop fewer than `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    nodes: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    dist: Vec<u64>,
    hops: Vec<u32>,
    next: Vec<u32>,
}

impl DistanceMatrix {
    fn from_keys(net: &Network, keys: Vec<Key>) -> Self {
        let n = net.node_count();
        debug_assert!(keys.iter().all(|&k| k != UNREACHED));
        let dist: Vec<u64> = keys.iter().map(|k| k.0).collect();
        let hops: Vec<u32> = keys.iter().map(|k| k.1).collect();
        let mut next = vec![u32::MAX; n * n];
        for u in 0..n {
            for v in 0..n {
                if u == v {
                    next[u * n + v] = u as u32;
                    continue;
                }
                let target = (dist[u * n + v], hops[u * n + v]);
                // out_arcs is sorted by target index, i.e. by node id.
                let succ = net
                    .out_arcs(u)
                    .iter()
                    .find(|&&(w, len)| (len + dist[w * n + v], hops[w * n + v] + 1) == target)
                    .map(|&(w, _)| w)
                    .expect("shortest path has a first arc");
                next[u * n + v] = succ as u32;
            }
        }
        DistanceMatrix {
            nodes: net.nodes().to_vec(),
            index: net.nodes().iter().enumerate().map(|(i, &n)| (n, i)).collect(),
            dist,
            hops,
            next,
        }
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    fn idx(&self, node: NodeId) -> usize {
        *self
            .index
            .get(&node)
            .unwrap_or_else(|| panic!("node {node} is not in the distance matrix"))
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.index.contains_key(&node)
    }

    /// Shortest distance from `from` to `to`. Panics on unknown nodes.
    pub fn distance(&self, from: NodeId, to: NodeId) -> u64 {
        let n = self.nodes.len();
        self.dist[self.idx(from) * n + self.idx(to)]
    }

    pub fn hops(&self, from: NodeId, to: NodeId) -> u32 {
        let n = self.nodes.len();
        self.hops[self.idx(from) * n + self.idx(to)]
    }

    /// The canonical shortest path, including both endpoints.
    pub fn path(&self, from: NodeId, to: NodeId) -> Vec<NodeId> {
        let n = self.nodes.len();
        let (mut u, v) = (self.idx(from), self.idx(to));
        let mut path = vec![self.nodes[u]];
        while u != v {
            u = self.next[u * n + v] as usize;
            path.push(self.nodes[u]);
        }
        path
    }

    /// Total length of the closed or open walk visiting `stops` in order.
    pub fn walk_length(&self, stops: &[NodeId]) -> u64 {
        stops.windows(2).map(|w| self.distance(w[0], w[1])).sum()
    }
}

/// All-pairs shortest distances; the production route uses repeated
/// single-source Dijkstra.
pub fn all_pairs_shortest(net: &Network) -> DistanceMatrix {
    all_pairs_dijkstra(net)
}

/// One Dijkstra run per source node, binary-heap based.
pub fn all_pairs_dijkstra(net: &Network) -> DistanceMatrix {
    let n = net.node_count();
    let mut keys = vec![UNREACHED; n * n];
    for source in 0..n {
        let row = &mut keys[source * n..(source + 1) * n];
        row[source] = (0, 0);
        let mut heap = BinaryHeap::from([Reverse(((0u64, 0u32), source))]);
        while let Some(Reverse((key, u))) = heap.pop() {
            if key > row[u] {
                continue;
            }
            for &(v, len) in net.out_arcs(u) {
                let cand = (key.0 + len, key.1 + 1);
                if cand < row[v] {
                    row[v] = cand;
                    heap.push(Reverse((cand, v)));
                }
            }
        }
    }
    DistanceMatrix::from_keys(net, keys)
}

/// Floyd-Warshall dynamic programme over intermediate vertices.
pub fn all_pairs_floyd_warshall(net: &Network) -> DistanceMatrix {
    let n = net.node_count();
    let mut keys = vec![UNREACHED; n * n];
    for u in 0..n {
        keys[u * n + u] = (0, 0);
        for &(v, len) in net.out_arcs(u) {
            keys[u * n + v] = keys[u * n + v].min((len, 1));
        }
    }
    for k in 0..n {
        for i in 0..n {
            let ik = keys[i * n + k];
            if ik == UNREACHED {
                continue;
            }
            for j in 0..n {
                let kj = keys[k * n + j];
                if kj == UNREACHED {
                    continue;
                }
                let cand = (ik.0 + kj.0, ik.1 + kj.1);
                if cand < keys[i * n + j] {
                    keys[i * n + j] = cand;
                }
            }
        }
    }
    DistanceMatrix::from_keys(net, keys)
}
