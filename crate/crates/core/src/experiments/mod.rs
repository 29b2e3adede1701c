//! Benchmark harness: exact vs. heuristics on Sioux Falls, and a repeated
//! fixed-vs-adapted comparison on the 39-node stand-in network.
//!
//! CSV output carries no timings, so reruns with the same seeds are
//! byte-identical. Timings and the generation time go to the JSON report only.

pub mod standin;

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use thiserror::Error;

use crate::exact::{solve_exact_with, validate, ExactError, ModelBounds};
use crate::instance::{generate_instance, Instance, InstanceError, NetworkRef, Protocol};
use crate::network::{all_pairs_shortest, DistanceMatrix, NodeId};
use crate::objective::Lambda;
use crate::rng::derive_seed;
use crate::routing::{solve_heuristic_with, SolveError};
use crate::solution::{CertificateStatus, Solution, Strategy};
use crate::TOOL_VERSION;

use standin::{STANDIN_DEMAND_NODES, STANDIN_DEPOT};

pub const REPORT_FORMAT: &str = "ecoroute-report/1";

/// How a Table-1 row maps a node count onto Sioux Falls.
pub const TABLE1_NODE_CONVENTION: &str = "n demand nodes = nodes 2..=n+1, depot = node 1";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("instance: {0}")]
    Instance(#[from] InstanceError),
    #[error("heuristic: {0}")]
    Solve(#[from] SolveError),
    #[error("{label}: {strategy} solution failed validation: {detail}")]
    Infeasible { label: String, strategy: Strategy, detail: String },
    #[error("node count {n} needs nodes 2..={} but the network has {available} nodes", n + 1)]
    NodeCount { n: usize, available: usize },
    #[error("at least one trial is required")]
    NoTrials,
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExactStatus {
    Optimal,
    Incumbent,
    /// Budget ran out before any solution was found.
    NoIncumbent,
}

impl ExactStatus {
    fn as_str(self) -> &'static str {
        match self {
            ExactStatus::Optimal => "optimal",
            ExactStatus::Incumbent => "incumbent",
            ExactStatus::NoIncumbent => "no-incumbent",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub node_count: usize,
    pub seed: u64,
    pub exact_status: ExactStatus,
    pub exact_objective: Option<u64>,
    /// Proven lower bound (rounded up: objectives are integers at lambda 1).
    pub exact_bound: Option<u64>,
    /// `100 (objective - bound) / objective`, the "% Gap" of a budget-limited run.
    pub exact_bound_gap_percent: Option<f64>,
    pub exact_cpu_seconds: f64,
    pub fixed_objective: u64,
    pub fixed_gap_percent: Option<f64>,
    pub adapted_objective: u64,
    pub adapted_gap_percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table2Row {
    pub trial: usize,
    pub seed: u64,
    pub fixed_routes: usize,
    pub fixed_km: u64,
    pub adapted_routes: usize,
    pub adapted_km: u64,
    pub abs_route_diff: i64,
    pub abs_km_diff: i64,
    pub rel_route_percent: f64,
    pub rel_km_percent: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Summary> {
        let values: Vec<f64> = values.into_iter().collect();
        if values.is_empty() {
            return None;
        }
        Some(Summary {
            mean: values.iter().sum::<f64>() / values.len() as f64,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Aggregates {
    pub rows: usize,
    pub exact_optimal: usize,
    pub fixed_gap_percent: Option<Summary>,
    pub adapted_gap_percent: Option<Summary>,
    /// Rows with both gaps known where adapted's gap is strictly smaller.
    pub adapted_beats_fixed: usize,
    pub comparable_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table2Aggregates {
    pub trials: usize,
    pub abs_km_diff: Option<Summary>,
    pub rel_km_percent: Option<Summary>,
    pub abs_route_diff: Option<Summary>,
    pub rel_route_percent: Option<Summary>,
    /// Trials where adapted travels strictly less than fixed.
    pub km_improved: usize,
    pub max_abs_route_diff: u64,
}

impl Table1Aggregates {
    pub fn from_rows(rows: &[Table1Row]) -> Self {
        let comparable: Vec<_> =
            rows.iter().filter_map(|r| Some((r.fixed_gap_percent?, r.adapted_gap_percent?))).collect();
        Table1Aggregates {
            rows: rows.len(),
            exact_optimal: rows.iter().filter(|r| r.exact_status == ExactStatus::Optimal).count(),
            fixed_gap_percent: Summary::of(rows.iter().filter_map(|r| r.fixed_gap_percent)),
            adapted_gap_percent: Summary::of(rows.iter().filter_map(|r| r.adapted_gap_percent)),
            adapted_beats_fixed: comparable.iter().filter(|(f, a)| a < f).count(),
            comparable_rows: comparable.len(),
        }
    }
}

impl Table2Aggregates {
    pub fn from_rows(rows: &[Table2Row]) -> Self {
        Table2Aggregates {
            trials: rows.len(),
            abs_km_diff: Summary::of(rows.iter().map(|r| r.abs_km_diff as f64)),
            rel_km_percent: Summary::of(rows.iter().map(|r| r.rel_km_percent)),
            abs_route_diff: Summary::of(rows.iter().map(|r| r.abs_route_diff as f64)),
            rel_route_percent: Summary::of(rows.iter().map(|r| r.rel_route_percent)),
            km_improved: rows.iter().filter(|r| r.abs_km_diff > 0).count(),
            max_abs_route_diff: rows.iter().map(|r| r.abs_route_diff.unsigned_abs()).max().unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub generated_unix: u64,
}

impl Provenance {
    fn now() -> Self {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        Provenance { tool: TOOL_VERSION, generated_unix: secs }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1Config {
    pub network: String,
    pub node_convention: &'static str,
    pub node_counts: Vec<usize>,
    pub seeds: Vec<u64>,
    pub modalities: usize,
    pub demand_range: (u32, u32),
    pub block_capacity: u32,
    pub block_count: u32,
    pub lambda: Lambda,
    pub time_budget_seconds: f64,
    pub node_budget: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table2Config {
    pub network: String,
    pub network_seed: u64,
    pub depot: NodeId,
    pub demand_nodes: Vec<NodeId>,
    pub trials: usize,
    pub master_seed: u64,
    pub seed_derivation: &'static str,
    pub modalities: usize,
    pub demand_range: (u32, u32),
    pub block_capacity: u32,
    pub block_count: u32,
}

/// Config echo, rows, aggregates recomputable from the rows, and provenance.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport<C, R, A> {
    pub format: &'static str,
    pub table: &'static str,
    pub config: C,
    pub rows: Vec<R>,
    pub aggregates: A,
    pub provenance: Provenance,
}

pub type Table1Report = ExperimentReport<Table1Config, Table1Row, Table1Aggregates>;
pub type Table2Report = ExperimentReport<Table2Config, Table2Row, Table2Aggregates>;

impl<C: Serialize, R: Serialize, A: Serialize> ExperimentReport<C, R, A> {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialises");
        text.push('\n');
        text
    }
}

/// Instance and solutions behind one report row, for `--keep-solutions`.
#[derive(Debug, Clone)]
pub struct RunArtifact {
    pub label: String,
    pub instance: Instance,
    pub solutions: Vec<Solution>,
}

fn pct(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        100.0 * num / den
    }
}

fn checked(inst: &Instance, sol: &Solution, dist: &DistanceMatrix, label: &str) -> Result<(), ExperimentError> {
    let infeasible = |detail: String| ExperimentError::Infeasible { label: label.into(), strategy: sol.strategy, detail };
    let verdict = validate(inst, sol, dist).map_err(|e| infeasible(e.to_string()))?;
    match verdict.violations.first() {
        None => Ok(()),
        Some(v) => Err(infeasible(v.to_string())),
    }
}

/// Exact vs. both heuristics on Sioux Falls at lambda 1, one row per
/// `(seed, node count)` in seed-major order. The instance for a row is
/// generated with that seed directly.
pub fn run_table1(
    net: &NetworkRef,
    node_counts: &[usize],
    seeds: &[u64],
    protocol: &Protocol,
    bounds: &ModelBounds,
) -> Result<(Table1Report, Vec<RunArtifact>), ExperimentError> {
    let protocol = Protocol { lambda: Lambda::ONE, ..*protocol };
    let available = net.network.node_count();
    if let Some(&n) = node_counts.iter().find(|&&n| n == 0 || n + 1 > available) {
        return Err(ExperimentError::NodeCount { n, available });
    }
    let dist = all_pairs_shortest(&net.network);
    let mut rows = Vec::new();
    let mut artifacts = Vec::new();
    for &seed in seeds {
        for &n in node_counts {
            let label = format!("table1-n{n}-s{seed}");
            let nodes: Vec<NodeId> = (2..=n as u32 + 1).map(NodeId).collect();
            let inst = generate_instance(net, NodeId(1), &nodes, &protocol, seed)?;
            let fixed = solve_heuristic_with(&inst, &dist, Strategy::Fixed)?;
            let adapted = solve_heuristic_with(&inst, &dist, Strategy::Adapted)?;
            checked(&inst, &fixed, &dist, &label)?;
            checked(&inst, &adapted, &dist, &label)?;

            let started = Instant::now();
            let exact = solve_exact_with(&inst, &dist, bounds);
            let cpu = started.elapsed().as_secs_f64();
            let (status, objective, bound) = match &exact {
                Ok(sol) => {
                    checked(&inst, sol, &dist, &label)?;
                    let cert = sol.certificate.as_ref().expect("exact solutions carry a certificate");
                    let status = match cert.status {
                        CertificateStatus::Optimal => ExactStatus::Optimal,
                        CertificateStatus::Incumbent => ExactStatus::Incumbent,
                    };
                    let bound = cert.bound.ceil().to_integer() as u64;
                    (status, Some(sol.objectives.z2), Some(bound))
                }
                Err(ExactError::NoIncumbent { .. }) => (ExactStatus::NoIncumbent, None, None),
                Err(e) => unreachable!("default bounds admit every instance: {e}"),
            };
            let gap = |h: u64| objective.map(|e| pct(h as f64 - e as f64, e as f64));
            rows.push(Table1Row {
                node_count: n,
                seed,
                exact_status: status,
                exact_objective: objective,
                exact_bound: bound,
                exact_bound_gap_percent: objective.zip(bound).map(|(o, b)| pct(o as f64 - b as f64, o as f64)),
                exact_cpu_seconds: cpu,
                fixed_objective: fixed.objectives.z2,
                fixed_gap_percent: gap(fixed.objectives.z2),
                adapted_objective: adapted.objectives.z2,
                adapted_gap_percent: gap(adapted.objectives.z2),
            });
            let mut solutions = vec![fixed, adapted];
            solutions.extend(exact.ok());
            artifacts.push(RunArtifact { label, instance: inst, solutions });
        }
    }
    let config = Table1Config {
        network: net.network.name().to_string(),
        node_convention: TABLE1_NODE_CONVENTION,
        node_counts: node_counts.to_vec(),
        seeds: seeds.to_vec(),
        modalities: protocol.modalities,
        demand_range: protocol.demand_range,
        block_capacity: protocol.container.block_capacity(),
        block_count: protocol.container.block_count(),
        lambda: protocol.lambda,
        time_budget_seconds: bounds.time_budget.as_secs_f64(),
        node_budget: bounds.node_budget,
    };
    let aggregates = Table1Aggregates::from_rows(&rows);
    let report = ExperimentReport {
        format: REPORT_FORMAT,
        table: "table1",
        config,
        rows,
        aggregates,
        provenance: Provenance::now(),
    };
    Ok((report, artifacts))
}

/// Fixed vs. adapted on the stand-in network. Trial `t` (1-based) uses the
/// instance seed `derive_seed(master_seed, t)`.
pub fn run_table2(
    network_seed: u64,
    protocol: &Protocol,
    trials: usize,
    master_seed: u64,
) -> Result<(Table2Report, Vec<RunArtifact>), ExperimentError> {
    if trials == 0 {
        return Err(ExperimentError::NoTrials);
    }
    let net = NetworkRef::standin(network_seed);
    let dist = all_pairs_shortest(&net.network);
    let mut rows = Vec::with_capacity(trials);
    let mut artifacts = Vec::with_capacity(trials);
    for t in 1..=trials {
        let seed = derive_seed(master_seed, t as u64);
        let label = format!("table2-t{t:02}");
        let inst = generate_instance(&net, STANDIN_DEPOT, &STANDIN_DEMAND_NODES, protocol, seed)?;
        let fixed = solve_heuristic_with(&inst, &dist, Strategy::Fixed)?;
        let adapted = solve_heuristic_with(&inst, &dist, Strategy::Adapted)?;
        checked(&inst, &fixed, &dist, &label)?;
        checked(&inst, &adapted, &dist, &label)?;
        rows.push(table2_row(t, seed, &fixed, &adapted));
        artifacts.push(RunArtifact { label, instance: inst, solutions: vec![fixed, adapted] });
    }
    let config = Table2Config {
        network: net.network.name().to_string(),
        network_seed,
        depot: STANDIN_DEPOT,
        demand_nodes: STANDIN_DEMAND_NODES.to_vec(),
        trials,
        master_seed,
        seed_derivation: "trial t uses ChaCha8(master_seed) stream t, first u64",
        modalities: protocol.modalities,
        demand_range: protocol.demand_range,
        block_capacity: protocol.container.block_capacity(),
        block_count: protocol.container.block_count(),
    };
    let aggregates = Table2Aggregates::from_rows(&rows);
    let report = ExperimentReport {
        format: REPORT_FORMAT,
        table: "table2",
        config,
        rows,
        aggregates,
        provenance: Provenance::now(),
    };
    Ok((report, artifacts))
}

pub fn table2_row(trial: usize, seed: u64, fixed: &Solution, adapted: &Solution) -> Table2Row {
    let (fr, ar) = (fixed.route_count(), adapted.route_count());
    let (fk, ak) = (fixed.objectives.z2, adapted.objectives.z2);
    let abs_route_diff = fr as i64 - ar as i64;
    let abs_km_diff = fk as i64 - ak as i64;
    Table2Row {
        trial,
        seed,
        fixed_routes: fr,
        fixed_km: fk,
        adapted_routes: ar,
        adapted_km: ak,
        abs_route_diff,
        abs_km_diff,
        rel_route_percent: pct(abs_route_diff as f64, fr as f64),
        rel_km_percent: pct(abs_km_diff as f64, fk as f64),
    }
}

fn fmt_opt<T: ToString>(v: Option<T>) -> String {
    v.map_or(String::new(), |v| v.to_string())
}

fn fmt_pct(v: f64) -> String {
    format!("{v:.2}")
}

pub fn table1_csv(rows: &[Table1Row]) -> Result<String, ExperimentError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "nodes",
        "seed",
        "exact_status",
        "exact_objective",
        "exact_bound",
        "exact_bound_gap_percent",
        "fixed_objective",
        "fixed_gap_percent",
        "adapted_objective",
        "adapted_gap_percent",
    ])?;
    for r in rows {
        w.write_record([
            r.node_count.to_string(),
            r.seed.to_string(),
            r.exact_status.as_str().to_string(),
            fmt_opt(r.exact_objective),
            fmt_opt(r.exact_bound),
            fmt_opt(r.exact_bound_gap_percent.map(fmt_pct)),
            r.fixed_objective.to_string(),
            fmt_opt(r.fixed_gap_percent.map(fmt_pct)),
            r.adapted_objective.to_string(),
            fmt_opt(r.adapted_gap_percent.map(fmt_pct)),
        ])?;
    }
    into_string(w)
}

/// Columns follow the published table: n, fixed routes/km, adapted
/// routes/km, absolute and relative improvements.
pub fn table2_csv(rows: &[Table2Row]) -> Result<String, ExperimentError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "n",
        "fixed_routes",
        "fixed_km",
        "adapted_routes",
        "adapted_km",
        "abs_route_diff",
        "abs_km_diff",
        "rel_route_percent",
        "rel_km_percent",
    ])?;
    for r in rows {
        w.write_record([
            r.trial.to_string(),
            r.fixed_routes.to_string(),
            r.fixed_km.to_string(),
            r.adapted_routes.to_string(),
            r.adapted_km.to_string(),
            r.abs_route_diff.to_string(),
            r.abs_km_diff.to_string(),
            fmt_pct(r.rel_route_percent),
            fmt_pct(r.rel_km_percent),
        ])?;
    }
    into_string(w)
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String, ExperimentError> {
    let bytes = w.into_inner().map_err(|e| ExperimentError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
