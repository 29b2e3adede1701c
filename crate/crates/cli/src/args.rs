use std::collections::hash_map::RandomState;
use std::hash::{BuildHasher, Hasher};
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ecoroute::experiments::standin::{STANDIN_BUNDLE, STANDIN_DEPOT};
use ecoroute::instance::{
    ContainerSpec, NetworkRef, NetworkSource, INSTANCE_FORMAT, SIOUX_FALLS_BUNDLE,
};
use ecoroute::network::parse_edge_list;
use ecoroute::{Lambda, NodeId};

const VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    " (instance format ecoroute-instance/1, solution format ecoroute-solution/1, report format ecoroute-report/1)"
);

#[derive(Debug, Parser)]
#[command(name = "ecoroute", version = VERSION, about = "Route and configure multi-block waste containers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded random instance.
    Generate(GenerateArgs),
    /// Solve an instance with a heuristic strategy or the exact search.
    Solve(SolveArgs),
    /// Check a solution against an instance; exit 1 when infeasible.
    Validate(ValidateArgs),
    /// Run a benchmark table.
    #[command(subcommand)]
    Bench(BenchCmd),
    /// Print a network as an edge list.
    ExportNetwork(ExportArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// `sioux-falls`, `standin-39[:SEED]` or the path of an edge-list file.
    #[arg(long, default_value = SIOUX_FALLS_BUNDLE)]
    pub network: String,
    /// Defaults to node 1 on Sioux Falls and node 17 on the stand-in network.
    #[arg(long, value_parser = parse_node)]
    pub depot: Option<NodeId>,
    /// Comma-separated ids or inclusive ranges, e.g. `2..11` or `1,11,19`.
    #[arg(long, value_parser = parse_nodes)]
    pub demand_nodes: NodeList,
    #[arg(long, default_value_t = 4)]
    pub modalities: usize,
    /// Inclusive demand range in kg, `LO:HI`.
    #[arg(long, value_parser = parse_range, default_value = "1:9")]
    pub range: (u32, u32),
    #[arg(long, default_value_t = 1)]
    pub block_capacity: u32,
    #[arg(long, default_value_t = 4)]
    pub block_count: u32,
    #[arg(long, default_value = "1")]
    pub lambda: Lambda,
    /// Drawn at random and printed when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub name: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

impl GenerateArgs {
    pub fn container(&self) -> anyhow::Result<ContainerSpec> {
        Ok(ContainerSpec::new(self.block_capacity, self.block_count)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Fixed,
    Adapted,
    Exact,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub strategy: StrategyArg,
    /// Overrides the instance's lambda.
    #[arg(long)]
    pub lambda: Option<Lambda>,
    /// Wall-clock seconds for the exact search.
    #[arg(
        long,
        env = "ECOROUTE_TIME_BUDGET",
        default_value_t = 60.0,
        value_parser = parse_seconds
    )]
    pub time_budget: f64,
    /// Search-node cap for the exact search; reproducible, unlike the time budget.
    #[arg(long)]
    pub node_budget: Option<u64>,
    #[arg(long)]
    pub max_stops: Option<usize>,
    #[arg(long)]
    pub max_routes: Option<usize>,
    /// Do not seed the exact search with the heuristic solutions.
    #[arg(long)]
    pub cold: bool,
    /// Write the optimality certificate into the solution document.
    #[arg(long)]
    pub certificate: bool,
    /// Include each route's street-level walk.
    #[arg(long)]
    pub paths: bool,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub instance: PathBuf,
    pub solution: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum BenchCmd {
    /// Exact vs. both heuristics on Sioux Falls.
    Table1(Table1Args),
    /// Fixed vs. adapted over repeated trials on the stand-in network.
    Table2(Table2Args),
}

#[derive(Debug, Args)]
pub struct BenchOut {
    /// Directory for the CSV, the JSON report and kept solutions.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, requires = "out")]
    pub keep_solutions: bool,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    /// Demand-node counts; a count n uses nodes 2..=n+1 with depot 1.
    #[arg(long, value_delimiter = ',', default_value = "10")]
    pub nodes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub seeds: Vec<u64>,
    #[arg(long, env = "ECOROUTE_TIME_BUDGET", default_value_t = 60.0, value_parser = parse_seconds)]
    pub time_budget: f64,
    #[arg(long)]
    pub node_budget: Option<u64>,
    #[command(flatten)]
    pub out: BenchOut,
}

#[derive(Debug, Args)]
pub struct Table2Args {
    #[arg(long, default_value_t = 30, value_parser = parse_trials)]
    pub trials: usize,
    #[arg(long, default_value_t = 42)]
    pub master_seed: u64,
    #[arg(long, default_value_t = 0)]
    pub network_seed: u64,
    #[command(flatten)]
    pub out: BenchOut,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long, default_value = SIOUX_FALLS_BUNDLE)]
    pub network: String,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct NodeList(pub Vec<NodeId>);

fn parse_node(s: &str) -> Result<NodeId, String> {
    s.trim().parse().map(NodeId).map_err(|_| format!("`{s}` is not a node id"))
}

pub fn parse_nodes(s: &str) -> Result<NodeList, String> {
    let mut nodes = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..") {
            Some((lo, hi)) => {
                let (lo, hi) = (parse_node(lo)?, parse_node(hi.trim_start_matches('='))?);
                if lo > hi {
                    return Err(format!("empty node range `{part}`"));
                }
                nodes.extend((lo.0..=hi.0).map(NodeId));
            }
            None => nodes.push(parse_node(part)?),
        }
    }
    if nodes.is_empty() {
        return Err("no demand nodes given".into());
    }
    Ok(NodeList(nodes))
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("`{s}` is not LO:HI"))?;
    let lo: u32 = lo.trim().parse().map_err(|_| format!("bad lower bound in `{s}`"))?;
    let hi: u32 = hi.trim().parse().map_err(|_| format!("bad upper bound in `{s}`"))?;
    if lo > hi {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok((lo, hi))
}

fn parse_seconds(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("`{s}` is not a positive number of seconds")),
    }
}

fn parse_trials(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(0) => Err("at least one trial is required".into()),
        Ok(n) => Ok(n),
        Err(_) => Err(format!("`{s}` is not a trial count")),
    }
}

pub fn resolve_network(spec: &str) -> anyhow::Result<NetworkRef> {
    if spec == SIOUX_FALLS_BUNDLE {
        return Ok(NetworkRef::sioux_falls());
    }
    if let Some(rest) = spec.strip_prefix(STANDIN_BUNDLE) {
        let seed = match rest.strip_prefix(':') {
            Some(seed) => seed.parse().with_context(|| format!("bad network seed in `{spec}`"))?,
            None if rest.is_empty() => 0,
            None => bail!("unknown network `{spec}`"),
        };
        return Ok(NetworkRef::resolve(&NetworkSource::Bundle { bundle: STANDIN_BUNDLE.into(), seed: Some(seed) })?);
    }
    let path = PathBuf::from(spec);
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading network {spec}"))?;
    let name = path.file_stem().map_or("network".into(), |s| s.to_string_lossy().into_owned());
    Ok(NetworkRef::inline(parse_edge_list(&name, &text).with_context(|| format!("network {spec}"))?))
}

pub fn default_depot(net: &NetworkRef) -> NodeId {
    match &net.source {
        NetworkSource::Bundle { bundle, .. } if bundle == STANDIN_BUNDLE => STANDIN_DEPOT,
        _ => net.network.nodes()[0],
    }
}

/// The only entropy the tool ever uses; the result is printed so the run can
/// be repeated with `--seed`.
pub fn fresh_seed() -> u64 {
    let mut h = RandomState::new().build_hasher();
    h.write(INSTANCE_FORMAT.as_bytes());
    h.finish()
}

impl SolveArgs {
    /// Flags that only the exact search reads.
    pub fn exact_only_flags(&self) -> Vec<&'static str> {
        let set = [
            ("--node-budget", self.node_budget.is_some()),
            ("--max-stops", self.max_stops.is_some()),
            ("--max-routes", self.max_routes.is_some()),
            ("--cold", self.cold),
            ("--certificate", self.certificate),
        ];
        set.into_iter().filter(|&(_, on)| on).map(|(f, _)| f).collect()
    }
}
