//! Synthetic 39-node street network for the fixed-vs-adapted comparison.
//!
//! Nodes 1..=39 sit row-major on an 8-wide grid (the last row holds 7
//! nodes) with 100-unit spacing. Each coordinate is jittered by a uniform
//! integer in `-20..=20`; then every complete grid cell draws one of: no
//! diagonal, the `\` diagonal, or the `/` diagonal. Streets are the grid
//! edges plus drawn diagonals, two-way, with length equal to the rounded
//! Euclidean distance between the jittered endpoints.

use crate::network::{Arc, Network, NodeId};
use crate::rng::SeededRng;

pub const STANDIN_BUNDLE: &str = "standin-39";
pub const STANDIN_NODE_COUNT: u32 = 39;
pub const STANDIN_DEPOT: NodeId = NodeId(17);
pub const STANDIN_DEMAND_NODES: [NodeId; 7] =
    [NodeId(1), NodeId(11), NodeId(19), NodeId(22), NodeId(29), NodeId(33), NodeId(39)];

const WIDTH: u32 = 8;
const SPACING: i64 = 100;
const JITTER: u32 = 20;

fn node_at(row: u32, col: u32) -> Option<NodeId> {
    let id = row * WIDTH + col + 1;
    (col < WIDTH && id <= STANDIN_NODE_COUNT).then_some(NodeId(id))
}

/// Builds the stand-in network. The same seed always yields the same network.
pub fn make_standin_network(seed: u64) -> Network {
    let mut rng = SeededRng::new(seed);
    let coords: Vec<(i64, i64)> = (0..STANDIN_NODE_COUNT)
        .map(|i| {
            let (row, col) = (i / WIDTH, i % WIDTH);
            let jx = i64::from(rng.uniform_inclusive(0, 2 * JITTER)) - i64::from(JITTER);
            let jy = i64::from(rng.uniform_inclusive(0, 2 * JITTER)) - i64::from(JITTER);
            (i64::from(col) * SPACING + jx, i64::from(row) * SPACING + jy)
        })
        .collect();
    let length = |a: NodeId, b: NodeId| {
        let (pa, pb) = (coords[a.0 as usize - 1], coords[b.0 as usize - 1]);
        let (dx, dy) = ((pa.0 - pb.0) as f64, (pa.1 - pb.1) as f64);
        (dx.hypot(dy).round() as u64).max(1)
    };

    let rows = STANDIN_NODE_COUNT.div_ceil(WIDTH);
    let mut streets = Vec::new();
    for row in 0..rows {
        for col in 0..WIDTH {
            let Some(here) = node_at(row, col) else { continue };
            if let Some(right) = node_at(row, col + 1) {
                streets.push((here, right));
            }
            if let Some(down) = node_at(row + 1, col) {
                streets.push((here, down));
            }
        }
    }
    for row in 0..rows {
        for col in 0..WIDTH - 1 {
            let corners = (
                node_at(row, col),
                node_at(row, col + 1),
                node_at(row + 1, col),
                node_at(row + 1, col + 1),
            );
            if let (Some(tl), Some(tr), Some(bl), Some(br)) = corners {
                match rng.uniform_inclusive(0, 2) {
                    1 => streets.push((tl, br)),
                    2 => streets.push((tr, bl)),
                    _ => {}
                }
            }
        }
    }

    let arcs = streets
        .into_iter()
        .flat_map(|(a, b)| {
            let len = length(a, b);
            [Arc { from: a, to: b, length: len }, Arc { from: b, to: a, length: len }]
        })
        .collect();
    Network::new(format!("{STANDIN_BUNDLE}-s{seed}"), arcs).expect("grid network is strongly connected")
}
