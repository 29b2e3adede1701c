//! Deployment planning for mobile multi-block waste containers.
//!
//! Each container carries `|L|` blocks of `c` kg, and every block is assigned
//! to one waste modality before the container leaves the depot. The crate
//! plans routes that collect all waste at the demand nodes of a street
//! network:
//!
//! * [`network`]: street graphs, all-pairs shortest distances, bundled
//!   benchmark topologies.
//! * [`instance`]: demand data, seeded generation, the instance document.
//! * [`packing`]: block requirements and container configurations.
//! * [`routing`]: the two-phase greedy heuristic under the fixed and adapted
//!   configuration strategies.
//! * [`exact`]: branch-and-bound for small instances and the solution
//!   validator.
//! * [`experiments`]: benchmark harness and report output.

pub mod document;
pub mod exact;
pub mod experiments;
pub mod instance;
pub mod network;
pub mod objective;
pub mod packing;
pub mod rng;
pub mod routing;
pub mod solution;

pub use exact::{solve_exact, validate, ModelBounds, Verdict};
pub use instance::{generate_instance, read_instance, write_instance, ContainerSpec, Instance, Protocol};
pub use network::{all_pairs_shortest, bundled_sioux_falls, DistanceMatrix, Network, NodeId};
pub use objective::{Lambda, Objectives};
pub use routing::solve_heuristic;
pub use solution::{Route, Solution, Strategy};

/// Version tag written into every document and report.
pub const TOOL_VERSION: &str = concat!("ecoroute ", env!("CARGO_PKG_VERSION"));
