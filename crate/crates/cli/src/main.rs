use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use minuniq::acceptance::{criterion_ids, run_criterion};
use minuniq::counting::{
    max_path_weight, reach_lfew_count, spl_indicator_vector, weight_query_table,
};
use minuniq::gen::{self, Density, LayeredShape};
use minuniq::graph::{min_unique_report, shortest_distances, VertexStatus};
use minuniq::io::{self, EmbeddingJson, GraphJson, MachineJson};
use minuniq::isolation::{find_good_prime_with, Criterion};
use minuniq::machines::{acc, classify, gap, opt_value, rej};
use minuniq::ra::{ra_decide, RaConfig};
use minuniq::reductions::{
    bfs_tree_weights, three_page_reach_instance, transducer_to_shortest_path, TransducerParams,
};
use minuniq::{reach, ConfigMachine, Cost, DiGraph, Execution, WeightFn};

#[derive(Parser)]
#[command(
    name = "minuniq",
    version,
    about = "Isolation, unambiguous reachability and reductions on explicit graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Print the full JSON run report instead of a text summary.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for generated instances.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Prime budget for `isolate`/`count`, configuration budget for `ra`.
    #[arg(long, global = true)]
    budget: Option<u64>,

    /// Write a DOT rendering of the result graph here.
    #[arg(long, global = true)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct GraphInput {
    /// Graph file, text (`n m` then `src dst` lines) or JSON.
    #[arg(long)]
    graph: PathBuf,

    /// Weights file or `unit`. Defaults to weights embedded in a JSON graph, else unit.
    #[arg(long)]
    weights: Option<String>,

    #[arg(short, long, default_value_t = 0)]
    source: usize,

    /// Defaults to the last vertex.
    #[arg(short, long)]
    target: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    Minunique,
    St,
}

#[derive(Clone, Copy, ValueEnum)]
enum CountMode {
    Table,
    Reachlfew,
    Spl,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReduceTarget {
    #[value(name = "3page")]
    ThreePage,
    SplGraph,
    TreeWeights,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Dag,
    ReachfewDag,
    LayeredMachine,
    Transducer,
}

#[derive(Subcommand)]
enum Command {
    /// Is there a path from source to target?
    Reach(GraphInput),
    /// Minimum path weights and their multiplicities from the source.
    Minunique(GraphInput),
    /// Search for the first odd prime whose modular weights isolate paths.
    Isolate {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, value_enum, default_value = "minunique")]
        criterion: CriterionArg,
    },
    /// Run the unambiguous reachability decider.
    Ra {
        #[command(flatten)]
        input: GraphInput,
        /// Count every surviving computation.
        #[arg(long)]
        audit: bool,
        /// Include the guess transcript.
        #[arg(long)]
        witness: bool,
    },
    /// Path counting and optimum indicators.
    Count {
        #[arg(long, value_enum)]
        mode: CountMode,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        machine: Option<PathBuf>,
        #[arg(short, long, default_value_t = 0)]
        source: usize,
        #[arg(short, long)]
        target: Option<usize>,
        /// Per-vertex path bound promised by the instance.
        #[arg(long, default_value_t = 8)]
        bound: u64,
    },
    /// Build a reduction.
    Reduce {
        #[arg(long, value_enum)]
        to: ReduceTarget,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        machine: Option<PathBuf>,
        #[arg(short, long, default_value_t = 0)]
        source: usize,
        #[arg(short, long)]
        target: Option<usize>,
    },
    /// Class membership of a machine by exact path counting.
    Classify {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long, default_value_t = 8)]
        bound: u64,
    },
    /// Generate a random instance.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Edge density as `num/den`.
        #[arg(long, default_value = "1/3")]
        density: String,
        #[arg(long, default_value_t = 8)]
        bound: u64,
        #[arg(long, default_value_t = 4)]
        layers: usize,
        #[arg(long, default_value_t = 3)]
        width: usize,
        #[arg(long, default_value_t = 3)]
        max_inc: u64,
        /// Also write the instance (graph text or machine JSON) here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Only this criterion.
        #[arg(long)]
        criterion: Option<u8>,
        #[arg(long)]
        sequential: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Reach(_) => "reach",
            Command::Minunique(_) => "minunique",
            Command::Isolate { .. } => "isolate",
            Command::Ra { .. } => "ra",
            Command::Count { .. } => "count",
            Command::Reduce { .. } => "reduce",
            Command::Classify { .. } => "classify",
            Command::Gen { .. } => "gen",
            Command::Selftest { .. } => "selftest",
        }
    }
}

enum Failure {
    Input(String),
    Contract(String),
}

impl From<minuniq::Error> for Failure {
    fn from(e: minuniq::Error) -> Self {
        if e.is_contract_violation() {
            Failure::Contract(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, Failure>;

/// Result of one command: JSON payload plus a text summary.
struct Outcome {
    payload: Value,
    text: String,
    /// Set when the command ran but its checks failed.
    failed: bool,
}

impl Outcome {
    fn new(payload: Value, text: impl Into<String>) -> Self {
        Outcome {
            payload,
            text: text.into(),
            failed: false,
        }
    }
}

#[derive(Serialize)]
struct RunReport {
    schema: u32,
    command: &'static str,
    input_digest: Option<String>,
    seed: Option<u64>,
    payload: Value,
    wall_time_ms: u128,
}

/// Reads input files and hashes everything read.
#[derive(Default)]
struct Inputs {
    hasher: Option<Sha256>,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> CliResult<String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        self.hasher
            .get_or_insert_with(Sha256::new)
            .update(text.as_bytes());
        Ok(text)
    }

    fn digest(self) -> Option<String> {
        self.hasher
            .map(|h| h.finalize().iter().map(|b| format!("{b:02x}")).collect())
    }

    fn graph(&mut self, input: &GraphInput) -> CliResult<(DiGraph, WeightFn)> {
        let (g, embedded) = io::parse_graph_any(&self.read(&input.graph)?)?;
        let w = match input.weights.as_deref() {
            Some("unit") => WeightFn::unit(g.m()),
            Some(path) => io::parse_weights_text(&self.read(Path::new(path))?, &g)?,
            None => embedded.unwrap_or_else(|| WeightFn::unit(g.m())),
        };
        Ok((g, w))
    }

    fn plain_graph(&mut self, path: Option<&PathBuf>) -> CliResult<DiGraph> {
        let path = path.ok_or_else(|| Failure::Input("--graph is required".into()))?;
        Ok(io::parse_graph_any(&self.read(path)?)?.0)
    }

    fn machine(&mut self, path: Option<&PathBuf>) -> CliResult<ConfigMachine> {
        let path = path.ok_or_else(|| Failure::Input("--machine is required".into()))?;
        Ok(io::parse_machine_json(&self.read(path)?)?)
    }
}

fn target_of(g: &DiGraph, t: Option<usize>) -> CliResult<usize> {
    match t {
        Some(t) => Ok(t),
        None if g.n() > 0 => Ok(g.n() - 1),
        None => Err(Failure::Input("empty graph has no default target".into())),
    }
}

fn big(n: &BigUint) -> Value {
    Value::String(n.to_string())
}

fn cost(c: Cost) -> Value {
    match c {
        Cost::Finite(v) => json!(v),
        Cost::Infinite => json!("inf"),
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli, inputs: &mut Inputs) -> CliResult<Outcome> {
    match &cli.command {
        Command::Reach(input) => {
            let (g, _) = inputs.graph(input)?;
            let t = target_of(&g, input.target)?;
            let r = reach(&g, input.source, t)?;
            Ok(Outcome::new(
                json!({ "source": input.source, "target": t, "reachable": r }),
                format!("reachable={r}"),
            ))
        }
        Command::Minunique(input) => {
            let (g, w) = inputs.graph(input)?;
            let report = min_unique_report(&g, &w, input.source)?;
            let vertices: Vec<Value> = report
                .vertices
                .iter()
                .map(|st| match st {
                    VertexStatus::Unreachable => json!({ "status": "unreachable" }),
                    VertexStatus::UniqueMin { dist } => {
                        json!({ "status": "unique_min", "dist": dist })
                    }
                    VertexStatus::Tied { dist, multiplicity } => {
                        json!({ "status": "tied", "dist": dist, "multiplicity": big(multiplicity) })
                    }
                })
                .collect();
            let tie = report.first_tie();
            let text = match tie {
                Some(v) => format!("min_unique=false, tie at {v}"),
                None => "min_unique=true".to_string(),
            };
            if let Some(path) = &cli.dot {
                write_file(path, &io::to_dot(&g, Some(&w), None))?;
            }
            Ok(Outcome::new(
                json!({ "source": input.source, "min_unique": report.min_unique_wrt_s, "first_tie": tie, "vertices": vertices }),
                text,
            ))
        }
        Command::Isolate { input, criterion } => {
            let (g, _) = inputs.graph(input)?;
            let criterion = match criterion {
                CriterionArg::Minunique => Criterion::MinUniqueWrtS,
                CriterionArg::St => Criterion::DistinctStWeights {
                    t: target_of(&g, input.target)?,
                },
            };
            let budget = cli.budget.unwrap_or(10_000) as usize;
            let search =
                find_good_prime_with(&g, input.source, criterion, budget, Execution::default())?;
            let lines = search.audit_lines();
            let found = search.found();
            let payload = json!({
                "prime": found.map(|r| r.prime),
                "weights": found.map(|r| r.weight_fn.weights().to_vec()),
                "audit": lines,
            });
            let mut outcome = Outcome::new(payload, lines.join("\n"));
            outcome.failed = found.is_none();
            Ok(outcome)
        }
        Command::Ra {
            input,
            audit,
            witness,
        } => {
            let (g, w) = inputs.graph(input)?;
            let t = target_of(&g, input.target)?;
            let mut config = RaConfig {
                audit: *audit,
                ..RaConfig::default()
            };
            if let Some(b) = cli.budget {
                config.budget = b as usize;
            }
            let v = ra_decide(&g, &w, input.source, t, &config)?;
            let mut payload = json!({
                "answer": v.answer,
                "accepting_computations": v.accepting_computations.as_ref().map(big),
                "conflicting_computations": v.conflicting_computations.as_ref().map(big),
                "stage_counts": v.stage_counts,
                "expanded_vertices": v.expanded_vertices,
                "configurations_explored": v.configurations_explored,
            });
            if *witness {
                payload["witness"] = json!(v.witness);
            }
            let mut text = format!("answer={}", v.answer);
            if let Some(c) = &v.accepting_computations {
                text.push_str(&format!(" accepting_computations={c}"));
            }
            Ok(Outcome::new(payload, text))
        }
        Command::Count {
            mode,
            graph,
            machine,
            source,
            target,
            bound,
        } => match mode {
            CountMode::Table => {
                let g = inputs.plain_graph(graph.as_ref())?;
                let w = WeightFn::unit(g.m());
                let horizon = max_path_weight(&g, &w, *source)?;
                let table = weight_query_table(&g, &w, *source, horizon)?;
                let rows: Vec<Value> = (0..g.n())
                    .map(|v| {
                        let by_weight: serde_json::Map<String, Value> = table
                            .realized_weights(v)
                            .into_iter()
                            .map(|wt| (wt.to_string(), big(table.get(v, wt))))
                            .collect();
                        json!({ "vertex": v, "total": big(&table.marginal(v)), "by_weight": by_weight })
                    })
                    .collect();
                let t = target_of(&g, *target)?;
                Ok(Outcome::new(
                    json!({ "source": source, "table": rows }),
                    format!("paths to {t}: {}", table.marginal(t)),
                ))
            }
            CountMode::Reachlfew => {
                let g = inputs.plain_graph(graph.as_ref())?;
                let t = target_of(&g, *target)?;
                let budget = cli.budget.unwrap_or(10_000) as usize;
                let r = reach_lfew_count(&g, *source, t, *bound, budget)?;
                Ok(Outcome::new(
                    json!({ "count": big(&r.count), "prime": r.prime, "rejected_primes": r.rejected_primes }),
                    format!("count={} prime={}", r.count, r.prime),
                ))
            }
            CountMode::Spl => {
                let m = inputs.machine(machine.as_ref())?;
                let h = spl_indicator_vector(&m)?;
                let opt = match h.iter().position(|&x| x == 1) {
                    Some(j) => Cost::Finite(j as u64),
                    None => Cost::Infinite,
                };
                Ok(Outcome::new(
                    json!({ "h": h, "optimum": cost(opt) }),
                    format!("optimum={opt}"),
                ))
            }
        },
        Command::Reduce {
            to,
            graph,
            machine,
            source,
            target,
        } => match to {
            ReduceTarget::ThreePage => {
                let g = inputs.plain_graph(graph.as_ref())?;
                let t = target_of(&g, *target)?;
                let (_, book) = three_page_reach_instance(&g, *source, t)?;
                if let Some(path) = &cli.dot {
                    write_file(path, &io::to_dot(&book.h, None, Some(&book.embedding)))?;
                }
                let reachable = reach(&book.h, book.source, book.sink)?;
                let payload = json!({
                    "graph": GraphJson::from_graph(&book.h, None),
                    "embedding": EmbeddingJson::from(&book.embedding),
                    "source": book.source,
                    "sink": book.sink,
                    "page3_edges": book.page3_edges,
                    "reachable": reachable,
                });
                let text = format!(
                    "{} vertices, {} edges, {} on page 3, reachable={reachable}",
                    book.h.n(),
                    book.h.m(),
                    book.page3_edges
                );
                Ok(Outcome::new(payload, text))
            }
            ReduceTarget::SplGraph => {
                let m = inputs.machine(machine.as_ref())?;
                let params = TransducerParams::fitting(&m)?;
                let inst = transducer_to_shortest_path(&m, params)?;
                let dist =
                    match shortest_distances(&inst.graph, &inst.weights, inst.source)?[inst.sink] {
                        Some(d) => Cost::Finite(d),
                        None => Cost::Infinite,
                    };
                let decoded = inst.decode(dist)?;
                if let Some(path) = &cli.dot {
                    write_file(path, &io::to_dot(&inst.graph, Some(&inst.weights), None))?;
                }
                let payload = json!({
                    "graph": GraphJson::from_graph(&inst.graph, Some(&inst.weights)),
                    "source": inst.source,
                    "sink": inst.sink,
                    "params": params,
                    "offset": params.offset()?,
                    "distance": cost(dist),
                    "decoded_optimum": cost(decoded),
                });
                Ok(Outcome::new(
                    payload,
                    format!("distance={dist} optimum={decoded}"),
                ))
            }
            ReduceTarget::TreeWeights => {
                let g = inputs.plain_graph(graph.as_ref())?;
                let w = bfs_tree_weights(&g, *source)?;
                if let Some(path) = &cli.dot {
                    write_file(path, &io::to_dot(&g, Some(&w), None))?;
                }
                Ok(Outcome::new(
                    json!({ "weights": w.weights() }),
                    io::write_weights_text(&w),
                ))
            }
        },
        Command::Classify { machine, bound } => {
            let m = inputs.machine(Some(machine))?;
            let flags = classify(&m, *bound);
            let payload = json!({
                "flags": flags,
                "acc": big(&acc(&m)),
                "rej": big(&rej(&m)),
                "gap": gap(&m).to_string(),
                "optimum": if m.is_transducer() { cost(opt_value(&m)?) } else { Value::Null },
            });
            Ok(Outcome::new(
                payload.clone(),
                serde_json::to_string_pretty(&payload["flags"]).unwrap(),
            ))
        }
        Command::Gen {
            kind,
            n,
            density,
            bound,
            layers,
            width,
            max_inc,
            out,
        } => {
            let mut rng = gen::rng(cli.seed.unwrap_or(0));
            let density = parse_density(density)?;
            let shape = LayeredShape {
                layers: *layers,
                width: *width,
            };
            let (payload, file) = match kind {
                GenKind::Dag | GenKind::ReachfewDag => {
                    let g = match kind {
                        GenKind::Dag => gen::random_dag(&mut rng, *n, density)?,
                        _ => gen::reach_few_dag(&mut rng, *n, *bound, density)?,
                    };
                    (
                        json!(GraphJson::from_graph(&g, None)),
                        io::write_graph_text(&g),
                    )
                }
                GenKind::LayeredMachine | GenKind::Transducer => {
                    let m = match kind {
                        GenKind::LayeredMachine => gen::layered_machine(&mut rng, shape)?,
                        _ => gen::random_transducer(&mut rng, shape, *max_inc)?,
                    };
                    let json = MachineJson::from_machine(&m);
                    (json!(json), serde_json::to_string_pretty(&json).unwrap())
                }
            };
            if let Some(path) = out {
                write_file(path, &file)?;
            }
            Ok(Outcome::new(payload, file))
        }
        Command::Selftest {
            criterion,
            sequential,
        } => {
            let exec = if *sequential {
                Execution::Sequential
            } else {
                Execution::default()
            };
            let ids: Vec<u8> = match criterion {
                Some(id) if criterion_ids().any(|c| c == *id) => vec![*id],
                Some(id) => return Err(Failure::Input(format!("no criterion {id}"))),
                None => criterion_ids().collect(),
            };
            let reports: Vec<_> = ids.into_iter().map(|id| run_criterion(id, exec)).collect();
            let text = reports
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("\n");
            let failed = reports.iter().any(|r| !r.passed());
            Ok(Outcome {
                payload: json!(reports),
                text,
                failed,
            })
        }
    }
}

fn parse_density(text: &str) -> CliResult<Density> {
    let parsed = text
        .split_once('/')
        .and_then(|(a, b)| Some(Density::new(a.trim().parse().ok()?, b.trim().parse().ok()?)));
    parsed.ok_or_else(|| Failure::Input(format!("density `{text}` is not of the form num/den")))
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let mut inputs = Inputs::default();
    let result = run(&cli, &mut inputs);
    match result {
        Ok(outcome) => {
            if cli.json {
                let seed = match cli.command {
                    Command::Gen { .. } => Some(cli.seed.unwrap_or(0)),
                    _ => cli.seed,
                };
                let report = RunReport {
                    schema: 1,
                    command: cli.command.name(),
                    input_digest: inputs.digest(),
                    seed,
                    payload: outcome.payload,
                    wall_time_ms: started.elapsed().as_millis(),
                };
                emit(&serde_json::to_string_pretty(&report).unwrap());
            } else {
                emit(outcome.text.trim_end());
            }
            if outcome.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Contract(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
