//! Container configurations: how many blocks of each modality a container
//! carries on one route.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{ContainerSpec, DemandLedger};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PackingError {
    #[error(
        "the fixed configuration needs one block per modality: {block_count} blocks cannot hold {modalities} modalities"
    )]
    TooFewBlocks { block_count: u32, modalities: usize },
    #[error("node has no residual demand to configure a container for")]
    NothingToCollect,
}

/// Blocks per modality, `n^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ContainerConfig(Vec<u32>);

impl ContainerConfig {
    pub fn new(blocks: Vec<u32>) -> Self {
        ContainerConfig(blocks)
    }

    pub fn blocks(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, k: usize) -> u32 {
        self.0[k]
    }

    pub fn total_blocks(&self) -> u64 {
        self.0.iter().map(|&n| u64::from(n)).sum()
    }

    /// kg of modality `k` the container can hold.
    pub fn capacity(&self, k: usize, spec: ContainerSpec) -> u32 {
        self.0[k] * spec.block_capacity()
    }
}

impl fmt::Display for ContainerConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// `q_j^k = ceil(residual_j^k / c)` for every demand node and modality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockRequirement {
    q: Vec<Vec<u32>>,
}

impl BlockRequirement {
    pub fn row(&self, idx: usize) -> &[u32] {
        &self.q[idx]
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.q
    }

    pub fn total(&self) -> u64 {
        self.q.iter().flatten().map(|&q| u64::from(q)).sum()
    }
}

pub fn blocks_for(kg: u32, spec: ContainerSpec) -> u32 {
    kg.div_ceil(spec.block_capacity())
}

pub fn block_requirements(ledger: &DemandLedger, spec: ContainerSpec) -> BlockRequirement {
    BlockRequirement {
        q: ledger.rows().iter().map(|row| row.iter().map(|&r| blocks_for(r, spec)).collect()).collect(),
    }
}

/// Least number of visits that can retire `q_jk` blocks: `ceil(q_jk / |L|)`.
pub fn min_visits(q_jk: u32, spec: ContainerSpec) -> u32 {
    q_jk.div_ceil(spec.block_count())
}

/// One block per modality; surplus blocks go round-robin from modality 1.
pub fn diversified_config(spec: ContainerSpec, modalities: usize) -> Result<ContainerConfig, PackingError> {
    let blocks = spec.block_count() as usize;
    if blocks < modalities {
        return Err(PackingError::TooFewBlocks { block_count: spec.block_count(), modalities });
    }
    let mut config = vec![0u32; modalities];
    for slot in 0..blocks {
        config[slot % modalities] += 1;
    }
    Ok(ContainerConfig(config))
}

/// Container configuration tailored to one node's block requirement row.
///
/// * Some `q^k >= |L|`: all `|L|` blocks go to the lowest such modality.
/// * Else if `sum q^k >= |L|`: blocks are granted to modalities by
///   decreasing `q^k` (lower index first on ties), each capped at `q^k`,
///   until all `|L|` are used.
/// * Else: `n^k = q^k`.
///
/// In the first case the other modalities of the node are left for later
/// routes even when `q^k` equals `|L|` exactly.
pub fn adapted_config(q_row: &[u32], spec: ContainerSpec) -> Result<ContainerConfig, PackingError> {
    let blocks = spec.block_count();
    if q_row.iter().all(|&q| q == 0) {
        return Err(PackingError::NothingToCollect);
    }
    let mut config = vec![0u32; q_row.len()];
    if let Some(k) = q_row.iter().position(|&q| q >= blocks) {
        config[k] = blocks;
        return Ok(ContainerConfig(config));
    }
    let total: u64 = q_row.iter().map(|&q| u64::from(q)).sum();
    if total < u64::from(blocks) {
        return Ok(ContainerConfig(q_row.to_vec()));
    }
    let mut order: Vec<usize> = (0..q_row.len()).collect();
    order.sort_by_key(|&k| (std::cmp::Reverse(q_row[k]), k));
    let mut free = blocks;
    for k in order {
        let grant = q_row[k].min(free);
        config[k] = grant;
        free -= grant;
        if free == 0 {
            break;
        }
    }
    Ok(ContainerConfig(config))
}
