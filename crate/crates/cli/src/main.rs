//! `ecoroute` command-line entry point.
//!
//! Exit codes: 0 success or feasible, 1 infeasible verdict, 2 solve error
//! (including rejected flag combinations), 3 I/O or format error.

mod args;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::Parser;

use ecoroute::document::{read_solution, write_solution, WriteOptions};
use ecoroute::exact::{solve_exact_with, ModelBounds};
use ecoroute::experiments::{run_table1, run_table2, table1_csv, table2_csv, RunArtifact};
use ecoroute::instance::{generate_instance, read_instance, total_waste, write_instance, Instance, NetworkRef};
use ecoroute::routing::solve_heuristic_with;
use ecoroute::{all_pairs_shortest, validate, Protocol, Solution, Strategy};

use args::{BenchCmd, Cli, Command, ExportArgs, GenerateArgs, SolveArgs, StrategyArg, ValidateArgs};

/// An error paired with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

const SOLVE: u8 = 2;
const IO: u8 = 3;

trait Code<T> {
    fn code(self, code: u8) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Code<T> for Result<T, E> {
    fn code(self, code: u8) -> Result<T, Failure> {
        self.map_err(|e| Failure { code, error: e.into() })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve(a),
        Command::Validate(a) => validate_cmd(a),
        Command::Bench(b) => bench(b),
        Command::ExportNetwork(a) => export_network(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).code(IO)
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display())).code(IO)
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let text = read_text(path)?;
    read_instance(&text).with_context(|| format!("instance {}", path.display())).code(IO)
}

/// Writes `text` to `out`, or to stdout when no path is given.
fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Summary lines go to stdout unless stdout already carries the document.
fn summary(to_stdout: bool, line: &str) {
    if to_stdout {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn generate(a: GenerateArgs) -> Result<u8, Failure> {
    let net = args::resolve_network(&a.network).code(IO)?;
    let depot = a.depot.unwrap_or_else(|| args::default_depot(&net));
    let protocol = Protocol {
        modalities: a.modalities,
        demand_range: a.range,
        container: a.container().code(SOLVE)?,
        lambda: a.lambda,
    };
    let seed = a.seed.unwrap_or_else(args::fresh_seed);
    let inst = generate_instance(&net, depot, &a.demand_nodes.0, &protocol, seed).code(SOLVE)?;
    let inst = match a.name {
        Some(name) => {
            let mut parts = inst.to_parts();
            parts.name = name;
            Instance::new(parts).code(SOLVE)?
        }
        None => inst,
    };
    emit(a.out.as_deref(), &write_instance(&inst))?;
    let totals = total_waste(&inst);
    summary(
        a.out.is_some(),
        &format!(
            "seed={seed} name={} demand_nodes={} total_kg={} checksum={}",
            inst.name(),
            inst.demand_nodes().len(),
            totals.grand,
            inst.checksum()
        ),
    );
    Ok(0)
}

fn solve(a: SolveArgs) -> Result<u8, Failure> {
    let stray = a.exact_only_flags();
    if a.strategy != StrategyArg::Exact && !stray.is_empty() {
        return Err(anyhow!("{} only valid with --strategy exact", stray.join(", "))).code(SOLVE);
    }
    let mut inst = load_instance(&a.instance)?;
    if let Some(lambda) = a.lambda {
        inst = inst.with_lambda(lambda);
    }
    let dist = all_pairs_shortest(inst.network());
    let sol: Solution = match a.strategy {
        StrategyArg::Fixed => solve_heuristic_with(&inst, &dist, Strategy::Fixed).code(SOLVE)?,
        StrategyArg::Adapted => solve_heuristic_with(&inst, &dist, Strategy::Adapted).code(SOLVE)?,
        StrategyArg::Exact => {
            let bounds = ModelBounds {
                max_routes: a.max_routes,
                max_stops_per_route: a.max_stops,
                time_budget: Duration::from_secs_f64(a.time_budget),
                node_budget: a.node_budget,
                warm_start: !a.cold,
            };
            solve_exact_with(&inst, &dist, &bounds).code(SOLVE)?
        }
    };
    let opts = WriteOptions { paths: a.paths.then_some(&dist), certificate: a.certificate };
    emit(a.out.as_deref(), &write_solution(&inst, &sol, opts))?;
    let o = sol.objectives;
    let mut line = format!(
        "strategy={} routes={} z1={} z2={} z3={} lambda={}",
        sol.strategy,
        sol.route_count(),
        o.z1,
        o.z2,
        o.z3_exact(),
        o.lambda
    );
    if let Some(c) = &sol.certificate {
        let status = if c.status == ecoroute::solution::CertificateStatus::Optimal { "optimal" } else { "incumbent" };
        let bound = c.bound;
        line += &format!(
            " status={status} bound={} gap_percent={:.4} nodes={}",
            if *bound.denom() == 1 { bound.numer().to_string() } else { format!("{}/{}", bound.numer(), bound.denom()) },
            c.gap_percent(o.z3()),
            c.nodes_explored
        );
    }
    summary(a.out.is_some(), &line);
    Ok(0)
}

fn validate_cmd(a: ValidateArgs) -> Result<u8, Failure> {
    let inst = load_instance(&a.instance)?;
    let text = read_text(&a.solution)?;
    let sol = read_solution(&inst, &text).with_context(|| format!("solution {}", a.solution.display())).code(IO)?;
    let dist = all_pairs_shortest(inst.network());
    let verdict = validate(&inst, &sol, &dist).code(IO)?;
    for v in &verdict.violations {
        println!("{v}");
    }
    let r = verdict.recomputed;
    println!(
        "feasible={} violations={} z1={} z2={} z3={} lambda={}",
        verdict.feasible,
        verdict.violations.len(),
        r.z1,
        r.z2,
        r.z3_exact(),
        r.lambda
    );
    Ok(if verdict.feasible { 0 } else { 1 })
}

fn bench(b: BenchCmd) -> Result<u8, Failure> {
    match b {
        BenchCmd::Table1(a) => {
            let net = NetworkRef::sioux_falls();
            let bounds = ModelBounds {
                time_budget: Duration::from_secs_f64(a.time_budget),
                node_budget: a.node_budget,
                ..ModelBounds::default()
            };
            let (report, artifacts) = run_table1(&net, &a.nodes, &a.seeds, &Protocol::default(), &bounds).code(SOLVE)?;
            let csv = table1_csv(&report.rows).code(IO)?;
            let agg = &report.aggregates;
            let fmt = |s: Option<ecoroute::experiments::Summary>| s.map_or("na".into(), |s| format!("{:.2}", s.mean));
            let line = format!(
                "rows={} exact_optimal={} fixed_gap_mean={} adapted_gap_mean={} adapted_beats_fixed={}/{}",
                agg.rows,
                agg.exact_optimal,
                fmt(agg.fixed_gap_percent),
                fmt(agg.adapted_gap_percent),
                agg.adapted_beats_fixed,
                agg.comparable_rows
            );
            finish_bench(a.out.out.as_deref(), a.out.keep_solutions, "table1", &csv, &report.to_json(), &artifacts, &line)
        }
        BenchCmd::Table2(a) => {
            let (report, artifacts) =
                run_table2(a.network_seed, &Protocol::default(), a.trials, a.master_seed).code(SOLVE)?;
            let csv = table2_csv(&report.rows).code(IO)?;
            let agg = &report.aggregates;
            let line = format!(
                "trials={} km_improved={} rel_km_mean={:.2} max_abs_route_diff={}",
                agg.trials,
                agg.km_improved,
                agg.rel_km_percent.map_or(0.0, |s| s.mean),
                agg.max_abs_route_diff
            );
            finish_bench(a.out.out.as_deref(), a.out.keep_solutions, "table2", &csv, &report.to_json(), &artifacts, &line)
        }
    }
}

fn finish_bench(
    out: Option<&Path>,
    keep: bool,
    table: &str,
    csv: &str,
    json: &str,
    artifacts: &[RunArtifact],
    line: &str,
) -> Result<u8, Failure> {
    let Some(dir) = out else {
        if keep {
            return Err(anyhow!("--keep-solutions needs --out")).code(SOLVE);
        }
        print!("{csv}");
        eprintln!("{line}");
        return Ok(0);
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display())).code(IO)?;
    write_text(&dir.join(format!("{table}.csv")), csv)?;
    write_text(&dir.join(format!("{table}-report.json")), json)?;
    if keep {
        let sub: PathBuf = dir.join("solutions");
        fs::create_dir_all(&sub).with_context(|| format!("creating {}", sub.display())).code(IO)?;
        for art in artifacts {
            write_text(&sub.join(format!("{}.instance.json", art.label)), &write_instance(&art.instance))?;
            for sol in &art.solutions {
                let opts = WriteOptions { paths: None, certificate: true };
                let name = format!("{}.{}.solution.json", art.label, sol.strategy);
                write_text(&sub.join(name), &write_solution(&art.instance, sol, opts))?;
            }
        }
    }
    println!("{line} out={}", dir.display());
    Ok(0)
}

fn export_network(a: ExportArgs) -> Result<u8, Failure> {
    let net = args::resolve_network(&a.network).code(IO)?;
    emit(a.out.as_deref(), &net.network.to_edge_list())?;
    Ok(0)
}
