use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use mpesp::formulation::expand::{expand_to_pesp, instance_sizes, restrict_timetable};
use mpesp::formulation::lp::write_lp;
use mpesp::formulation::mps::write_mps;
use mpesp::formulation::simplex::{solve_mip, MipStatus};
use mpesp::formulation::{build_arc_mpesp, build_cycle_mpesp, MipModel, VarKind};
use mpesp::io::{self, Dialect, Instance, SolutionFile};
use mpesp::network::{EventActivityNetwork, Timetable};
use mpesp::num::{exact, Rational};
use mpesp::quotient::{classify, root_instance, RootingReport};
use mpesp::routing::{
    evaluate_exact, iterate_timetable_routing, lower_bound_lengths, route_passengers, trim_transfer_arcs,
    Formulation, IterateConfig, ODMatrix,
};
use mpesp::solver::{
    arc_enumeration_optimum, branch_and_bound, brute_force_optimum, SolveConfig, SolveResult, SolveStatus,
    BRUTE_FORCE_CAP,
};
use mpesp::tree::{fundamental_basis, is_sharp, sharp_tree, sharp_tree_harmonic, sharp_tree_rooted, CycleBasis, SpanningTree};
use mpesp::Execution;

const EXIT_INFEASIBLE: u8 = 3;

#[derive(Parser)]
#[command(name = "mpesp", version, about = "Multiperiodic event scheduling toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Input {
    /// Instance file, or a directory for the timpasslib dialect.
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = DialectArg::Native)]
    dialect: DialectArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum DialectArg {
    Native,
    Timpasslib,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TreeArg {
    Harmonic,
    Rooted,
    Auto,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormulationArg {
    Arc,
    Cycle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Representation {
    Mpesp,
    Pesp,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MipFormat {
    Lp,
    Mps,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GeneratorKind {
    Random,
    Harmonic,
    Rooted,
}

#[derive(Args, Clone)]
struct Limits {
    /// Time limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    node_limit: Option<u64>,
    /// Run the search on one thread.
    #[arg(long)]
    sequential: bool,
}

impl Limits {
    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn config(&self) -> Result<SolveConfig> {
        let time_limit = match self.time_limit {
            Some(t) if !(t.is_finite() && t >= 0.0) => bail!("--time-limit must be a nonnegative number of seconds"),
            Some(t) => Some(Duration::from_secs_f64(t)),
            None => None,
        };
        Ok(SolveConfig { node_limit: self.node_limit, time_limit, warm_start: None, execution: self.execution() })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sizes as PESP, MPESP and rooted MPESP, periods and classification.
    Inspect {
        #[command(flatten)]
        input: Input,
    },
    /// Harmonic, rooted or neither, with the failing rootedness conditions.
    Classify {
        #[command(flatten)]
        input: Input,
    },
    /// Adds the events and activities that make the instance rooted.
    Root {
        #[command(flatten)]
        input: Input,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sharp spanning tree.
    Tree {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = TreeArg::Auto)]
        tree: TreeArg,
    },
    /// Fundamental cycle basis with Odijk ranges.
    Basis {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = TreeArg::Auto)]
        tree: TreeArg,
    },
    /// Builds a formulation and prints its size.
    Build {
        #[arg(value_enum)]
        formulation: FormulationArg,
        #[arg(value_enum)]
        representation: Representation,
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = TreeArg::Auto)]
        tree: TreeArg,
        #[arg(long)]
        trim: Option<String>,
    },
    /// Writes a formulation as an LP or MPS file.
    ExportMip {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = FormulationArg::Cycle)]
        formulation: FormulationArg,
        #[arg(long, value_enum, default_value_t = Representation::Mpesp)]
        representation: Representation,
        #[arg(long, value_enum, default_value_t = MipFormat::Lp)]
        format: MipFormat,
        #[arg(long, value_enum, default_value_t = TreeArg::Auto)]
        tree: TreeArg,
        #[arg(long)]
        trim: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solves to optimality and writes a solution file.
    Solve {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = FormulationArg::Cycle)]
        formulation: FormulationArg,
        #[arg(long, value_enum, default_value_t = Representation::Mpesp)]
        representation: Representation,
        #[arg(long, value_enum, default_value_t = TreeArg::Auto)]
        tree: TreeArg,
        #[command(flatten)]
        limits: Limits,
        /// Solution file whose timetable seeds the incumbent.
        #[arg(long)]
        warm_start: Option<PathBuf>,
        /// Keep only this fraction of the transfer activities, heaviest first.
        #[arg(long)]
        trim: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rolls the instance out to a single period.
    Expand {
        #[command(flatten)]
        input: Input,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Routes the demand on lower bounds, or on the tension of a solution.
    Route {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        solution: Option<PathBuf>,
        #[arg(long)]
        sequential: bool,
    },
    /// Travel time of a timetable on the network and on the roll-out.
    Evaluate {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        sequential: bool,
    },
    /// Alternates timetabling and routing while admitting more transfers.
    Iterate {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = FormulationArg::Cycle)]
        formulation: FormulationArg,
        #[command(flatten)]
        limits: Limits,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Brute-force and arc-enumeration optima for small instances.
    Oracle {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = BRUTE_FORCE_CAP)]
        cap: u64,
        #[arg(long)]
        sequential: bool,
    },
    /// Checks a solution file against an instance.
    Verify {
        #[command(flatten)]
        input: Input,
        solution: PathBuf,
    },
    /// Writes a seeded random instance.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = GeneratorKind::Random)]
        kind: GeneratorKind,
        /// Largest number of events.
        #[arg(long, default_value_t = 6)]
        events: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn read(input: &Input) -> Result<Instance> {
    let dialect = match input.dialect {
        DialectArg::Native => Dialect::Native,
        DialectArg::Timpasslib => Dialect::TimPassLib,
    };
    io::read_instance(&input.instance, dialect).with_context(|| format!("reading {}", input.instance.display()))
}

fn require_od(inst: &Instance) -> Result<&ODMatrix> {
    inst.od.as_ref().context("instance has no [stations]/[od] sections")
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => Ok(io::write_file(path, text)?),
        None => out(text),
    }
}

fn out(text: &str) -> Result<()> {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn print_json(value: &Value) -> Result<()> {
    out(&(serde_json::to_string_pretty(value)? + "\n"))
}

fn q(r: &Rational) -> Value {
    Value::String(exact(r))
}

fn parse_fraction(text: &str) -> Result<Rational> {
    mpesp::num::parse_rational(text).map_err(|e| anyhow::anyhow!("--trim: {e}"))
}

fn apply_trim(net: EventActivityNetwork, trim: Option<&str>) -> Result<EventActivityNetwork> {
    let Some(text) = trim else { return Ok(net) };
    let weights = net.activities().iter().map(|a| (a.id, a.weight)).collect();
    Ok(trim_transfer_arcs(&net, &weights, parse_fraction(text)?)?)
}

/// Instance the cycle formulation runs on, its sharp tree and the rooting that was applied.
fn prepare_tree(net: &EventActivityNetwork, choice: TreeArg) -> Result<(EventActivityNetwork, SpanningTree, RootingReport)> {
    if choice == TreeArg::Harmonic {
        return Ok((net.clone(), sharp_tree_harmonic(net)?, RootingReport::default()));
    }
    let (rooted, report) = root_instance(net)?;
    let tree = match choice {
        TreeArg::Rooted => sharp_tree_rooted(&rooted)?,
        _ => sharp_tree(&rooted)?,
    };
    Ok((rooted, tree, report))
}

fn prepare_basis(net: &EventActivityNetwork, choice: TreeArg) -> Result<(EventActivityNetwork, CycleBasis, RootingReport)> {
    let (net, tree, report) = prepare_tree(net, choice)?;
    let basis = fundamental_basis(&net, &tree)?;
    Ok((net, basis, report))
}

fn represent(net: &EventActivityNetwork, representation: Representation) -> Result<EventActivityNetwork> {
    Ok(match representation {
        Representation::Mpesp => net.clone(),
        Representation::Pesp => expand_to_pesp(net)?.0,
    })
}

fn build_model(net: &EventActivityNetwork, formulation: FormulationArg, tree: TreeArg) -> Result<MipModel> {
    Ok(match formulation {
        FormulationArg::Arc => build_arc_mpesp(net),
        FormulationArg::Cycle => {
            let (net, basis, _) = prepare_basis(net, tree)?;
            build_cycle_mpesp(&net, &basis)?
        }
    })
}

fn model_summary(model: &MipModel) -> Value {
    json!({
        "name": model.name,
        "variables": model.variables.len(),
        "integer": model.num_integer(),
        "continuous": model.num_continuous(),
        "constraints": model.constraints.len(),
    })
}

fn class_name(net: &EventActivityNetwork) -> Value {
    serde_json::to_value(classify(net)).unwrap_or(Value::Null)
}

fn drop_added(tt: Timetable, report: &RootingReport) -> Timetable {
    let mut times = tt.times;
    for e in &report.added_events {
        times.remove(e);
    }
    Timetable { times }
}

struct Outcome {
    solution: SolutionFile,
    details: Value,
}

fn solve_cycle(net: &EventActivityNetwork, tree: TreeArg, mut config: SolveConfig) -> Result<Outcome> {
    let (work, basis, report) = prepare_basis(net, tree)?;
    if let Some(tt) = config.warm_start.as_mut() {
        for e in &report.added_events {
            tt.times.insert(*e, Rational::default());
        }
    }
    let r: SolveResult = branch_and_bound(&work, &basis, &config)?;
    let mut solution = SolutionFile::from(&r);
    if !report.is_empty() {
        solution.offsets.clear();
        if let Some(tt) = solution.timetable.take() {
            let tt = drop_added(tt, &report).normalized(net);
            let (x, _) = net.tension_from_timetable(&tt)?;
            solution.tension = Some(x);
            solution.timetable = Some(tt);
        }
    }
    let certificate = if r.status == SolveStatus::Infeasible {
        Some(match basis.cycles.iter().find(|c| c.odijk_lower > c.odijk_upper) {
            Some(c) => json!({
                "kind": "empty_offset_range",
                "cycle": c.oriented_arcs.iter().map(|s| json!({"activity": s.activity.0, "forward": s.forward})).collect::<Vec<_>>(),
                "period": c.period,
                "lower": c.odijk_lower,
                "upper": c.odijk_upper,
            }),
            None => json!({"kind": "exhausted_search", "nodes": r.node_count}),
        })
    } else {
        None
    };
    Ok(Outcome {
        solution,
        details: json!({
            "nodes": r.node_count,
            "elapsed_ms": r.elapsed.as_millis() as u64,
            "added_events": report.added_events.len(),
            "certificate": certificate,
        }),
    })
}

fn solve_arc(net: &EventActivityNetwork, limits: &Limits) -> Result<Outcome> {
    if limits.time_limit.is_some() {
        log::warn!("--time-limit is not supported by the arc formulation, use --node-limit");
    }
    let model = build_arc_mpesp(net);
    let sol = solve_mip(&model, limits.node_limit.unwrap_or(u64::MAX))?;
    let status = match sol.status {
        MipStatus::Optimal => SolveStatus::Optimal,
        MipStatus::Infeasible => SolveStatus::Infeasible,
        MipStatus::NodeLimit => SolveStatus::LimitReached,
        MipStatus::Unbounded => bail!("arc model is unbounded"),
    };
    let mut solution = SolutionFile { status: status.as_str().into(), ..Default::default() };
    if let Some(values) = &sol.values {
        let times = model
            .variables
            .iter()
            .zip(values)
            .filter(|(v, _)| v.kind == VarKind::Time)
            .map(|(v, t)| (mpesp::network::EventId(v.source), *t))
            .collect();
        let tt = Timetable { times }.normalized(net);
        let (x, _) = net.tension_from_timetable(&tt)?;
        solution.objective = Some(net.objective(&x)?);
        solution.tension = Some(x);
        solution.timetable = Some(tt);
    }
    let certificate = (status == SolveStatus::Infeasible).then(|| json!({"kind": "exhausted_search", "nodes": sol.nodes}));
    Ok(Outcome { solution, details: json!({"nodes": sol.nodes, "certificate": certificate}) })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Inspect { input } => {
            let inst = read(&input)?;
            let net = &inst.network;
            let sizes = instance_sizes(net)?;
            print_json(&json!({
                "events": net.num_events(),
                "activities": net.num_activities(),
                "periods": net.periods(),
                "lcm": net.lcm_period(),
                "classification": class_name(net),
                "sizes": {
                    "pesp": [sizes.pesp.0.to_string(), sizes.pesp.1.to_string()],
                    "mpesp": [sizes.mpesp.0, sizes.mpesp.1],
                    "rooted": [sizes.rooted.0, sizes.rooted.1],
                },
                "od_pairs": inst.od.as_ref().map(|od| od.entries.len()),
            }))?;
        }
        Command::Classify { input } => {
            let inst = read(&input)?;
            print_json(&class_name(&inst.network))?;
        }
        Command::Root { input, output } => {
            let inst = read(&input)?;
            let (rooted, report) = root_instance(&inst.network)?;
            let text = io::write_instance(&rooted, inst.od.as_ref())?;
            match output {
                Some(path) => {
                    io::write_file(&path, &text)?;
                    print_json(&serde_json::to_value(&report)?)?;
                }
                None => out(&text)?,
            }
        }
        Command::Tree { input, tree } => {
            let inst = read(&input)?;
            let (net, t, report) = prepare_tree(&inst.network, tree)?;
            let witness = is_sharp(&net, &t)?;
            print_json(&json!({
                "root": t.root.0,
                "arcs": t.arcs.iter().map(|a| a.0).collect::<Vec<_>>(),
                "sharp": witness.is_none(),
                "rooting": report,
            }))?;
        }
        Command::Basis { input, tree } => {
            let inst = read(&input)?;
            let (_, basis, _) = prepare_basis(&inst.network, tree)?;
            print_json(&serde_json::to_value(&basis)?)?;
        }
        Command::Build { formulation, representation, input, tree, trim } => {
            let inst = read(&input)?;
            let net = represent(&apply_trim(inst.network, trim.as_deref())?, representation)?;
            print_json(&model_summary(&build_model(&net, formulation, tree)?))?;
        }
        Command::ExportMip { input, formulation, representation, format, tree, trim, output } => {
            let inst = read(&input)?;
            let net = represent(&apply_trim(inst.network, trim.as_deref())?, representation)?;
            let model = build_model(&net, formulation, tree)?;
            let text = match format {
                MipFormat::Lp => write_lp(&model)?,
                MipFormat::Mps => write_mps(&model)?,
            };
            emit(&text, output.as_deref())?;
        }
        Command::Solve { input, formulation, representation, tree, limits, warm_start, trim, output } => {
            let inst = read(&input)?;
            let net = apply_trim(inst.network, trim.as_deref())?;
            let mut config = limits.config()?;
            if let Some(path) = &warm_start {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                config.warm_start = io::parse_solution(&text)?.timetable;
            }
            let outcome = match representation {
                Representation::Mpesp => match formulation {
                    FormulationArg::Cycle => solve_cycle(&net, tree, config)?,
                    FormulationArg::Arc => solve_arc(&net, &limits)?,
                },
                Representation::Pesp => {
                    let (pesp, map) = expand_to_pesp(&net)?;
                    if config.warm_start.is_some() {
                        log::warn!("warm starts are not rolled out, ignoring it");
                        config.warm_start = None;
                    }
                    let mut o = match formulation {
                        FormulationArg::Cycle => solve_cycle(&pesp, tree, config)?,
                        FormulationArg::Arc => solve_arc(&pesp, &limits)?,
                    };
                    o.details["pesp_objective"] = o.solution.objective.as_ref().map(q).unwrap_or(Value::Null);
                    o.solution.offsets.clear();
                    if let Some(tt) = o.solution.timetable.take() {
                        let tt = restrict_timetable(&net, &map, &tt)?.normalized(&net);
                        let (x, _) = net.tension_from_timetable(&tt)?;
                        o.solution.objective = Some(net.objective(&x)?);
                        o.solution.tension = Some(x);
                        o.solution.timetable = Some(tt);
                    }
                    o
                }
            };
            let text = io::write_solution(&outcome.solution);
            match &output {
                Some(path) => io::write_file(path, &text)?,
                None => out(&text)?,
            }
            eprintln!("{}", serde_json::to_string(&outcome.details)?);
            if outcome.solution.status == SolveStatus::Infeasible.as_str() {
                return Ok(EXIT_INFEASIBLE);
            }
        }
        Command::Expand { input, output } => {
            let inst = read(&input)?;
            let (pesp, map) = expand_to_pesp(&inst.network)?;
            let text = io::write_instance(&pesp, None)?;
            match output {
                Some(path) => {
                    io::write_file(&path, &text)?;
                    print_json(&json!({
                        "period": map.period,
                        "events": pesp.num_events(),
                        "activities": pesp.num_activities(),
                        "objective_offset": q(&map.objective_offset),
                    }))?;
                }
                None => out(&text)?,
            }
        }
        Command::Route { input, solution, sequential } => {
            let inst = read(&input)?;
            let od = require_od(&inst)?;
            let net = &inst.network;
            let lengths = match &solution {
                Some(path) => tension_of(net, path)?,
                None => lower_bound_lengths(net),
            };
            let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
            let state = route_passengers(net, od, &lengths, exec)?;
            print_json(&serde_json::to_value(&state)?)?;
        }
        Command::Evaluate { input, solution, sequential } => {
            let inst = read(&input)?;
            let od = require_od(&inst)?;
            let net = &inst.network;
            let tt = timetable_of(&solution)?;
            let (x, report) = net.tension_from_timetable(&tt)?;
            if !report.is_feasible() {
                bail!("timetable is infeasible: {}", report.violations[0]);
            }
            let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
            let routed = route_passengers(net, od, &x, exec)?;
            let exact_total = evaluate_exact(net, &tt, od, exec)?;
            print_json(&json!({
                "network_travel_time": q(&routed.travel_time_total),
                "exact_travel_time": q(&exact_total),
                "demand": q(&od.total_demand()),
            }))?;
        }
        Command::Iterate { input, formulation, limits, output } => {
            let inst = read(&input)?;
            let od = require_od(&inst)?;
            let config = IterateConfig {
                formulation: match formulation {
                    FormulationArg::Arc => Formulation::Arc,
                    FormulationArg::Cycle => Formulation::Cycle,
                },
                solve: limits.config()?,
                mip_node_limit: limits.node_limit.unwrap_or(IterateConfig::default().mip_node_limit),
                ..Default::default()
            };
            let r = iterate_timetable_routing(&inst.network, od, &config)?;
            if let Some(path) = &output {
                let (x, _) = inst.network.tension_from_timetable(&r.timetable)?;
                let sol = SolutionFile {
                    status: if r.limit_reached { "limit_reached" } else { "heuristic" }.into(),
                    objective: Some(inst.network.objective(&x)?),
                    timetable: Some(r.timetable.clone()),
                    tension: Some(x),
                    offsets: Default::default(),
                };
                io::write_file(path, &io::write_solution(&sol))?;
            }
            print_json(&json!({
                "converged": r.converged,
                "limit_reached": r.limit_reached,
                "travel_time": q(&r.routing.travel_time_total),
                "average_travel_time": r.routing.average_travel_time().as_ref().map(q),
                "history": r.history,
            }))?;
        }
        Command::Oracle { input, cap, sequential } => {
            let inst = read(&input)?;
            let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
            let brute = brute_force_optimum(&inst.network, cap, exec)?;
            let arcs = arc_enumeration_optimum(&inst.network)?;
            print_json(&json!({
                "brute_force": brute.as_ref().map(|r| q(&r.0)),
                "arc_enumeration": arcs.as_ref().map(q),
                "timetable": brute.as_ref().map(|r| r.1.times.iter().map(|(e, t)| (e.0.to_string(), q(t))).collect::<serde_json::Map<_, _>>()),
            }))?;
            if brute.is_none() {
                return Ok(EXIT_INFEASIBLE);
            }
        }
        Command::Verify { input, solution } => {
            let inst = read(&input)?;
            let text = std::fs::read_to_string(&solution).with_context(|| format!("reading {}", solution.display()))?;
            let sol = io::parse_solution(&text)?;
            let problems = io::verify_solution(&inst.network, &sol);
            print_json(&json!({"valid": problems.is_empty(), "problems": problems}))?;
            if !problems.is_empty() {
                return Ok(1);
            }
        }
        Command::Generate { seed, kind, events, output } => {
            if events < 2 {
                bail!("--events must be at least 2");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let net = match kind {
                GeneratorKind::Random => {
                    let params = mpesp::generate::InstanceParams { events: 2..=events, ..Default::default() };
                    mpesp::generate::random_network(&mut rng, &params)
                }
                GeneratorKind::Harmonic => mpesp::generate::random_harmonic(&mut rng, 2..=events),
                GeneratorKind::Rooted => mpesp::generate::random_rooted(&mut rng, 2..=events),
            };
            emit(&io::write_instance(&net, None)?, output.as_deref())?;
        }
    }
    Ok(0)
}

fn timetable_of(path: &Path) -> Result<Timetable> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    io::parse_solution(&text)?.timetable.context("solution has no [times] section")
}

fn tension_of(net: &EventActivityNetwork, path: &Path) -> Result<mpesp::network::Tension> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let sol = io::parse_solution(&text)?;
    match (sol.tension, sol.timetable) {
        (Some(x), _) => Ok(x),
        (None, Some(tt)) => Ok(net.tension_from_timetable(&tt)?.0),
        (None, None) => bail!("solution has neither [tensions] nor [times]"),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
