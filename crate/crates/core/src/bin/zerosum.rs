use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use zerosum::constructions::{arc_critical_instance, extremal_cyclic, random_labelling};
use zerosum::harness::{self, VerdictReport, DEFAULT_NODE_LIMIT};
use zerosum::paths::{self, DP_CAP};
use zerosum::{CycleWitness, Error, GroupSpec, Labelling, LabellingJson};

const EXIT_COUNTEREXAMPLE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NONE: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;
const EXIT_TOO_LARGE: u8 = 5;

/// Balanced cycles in group-labelled complete digraphs.
///
/// Files are JSON; `-` reads standard input. Set ZEROSUM_WORKERS to bound the
/// number of worker threads.
#[derive(Parser)]
#[command(name = "zerosum", version)]
struct Cli {
    /// Largest digraph handed to the exact subset DP.
    #[arg(long, global = true, default_value_t = DP_CAP,
          value_parser = dp_cap)]
    max_dp_vertices: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a labelling.
    Gen(GenArgs),
    /// Heuristic scan, then exact search within the DP cap.
    Check { labelling: PathBuf },
    /// Exact balanced-cycle search.
    FindCycle { labelling: PathBuf },
    /// List every balanced cycle (at most 12 vertices).
    Enumerate { labelling: PathBuf },
    /// Balanced cycle or stabilizer certificate.
    KeyLemma { labelling: PathBuf },
    /// Balanced cycle in a Z_p-labelling on at least p + 1 vertices.
    PrimeFind { labelling: PathBuf },
    /// Exhaustive or randomized campaign.
    Verify(VerifyArgs),
    /// Least n forcing a balanced cycle, by backtracking.
    ComputeN {
        #[arg(long)]
        group: PathBuf,
        #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
        node_limit: u64,
    },
    /// Graphviz rendering, optionally highlighting a cycle.
    Dot {
        labelling: PathBuf,
        /// Comma-separated vertices, e.g. 0,1,2.
        #[arg(long, value_delimiter = ',')]
        cycle: Option<Vec<usize>>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct GenArgs {
    /// Z_q with 1 on increasing arcs: Q N.
    #[arg(long, num_args = 2, value_names = ["Q", "N"])]
    extremal: Option<Vec<usize>>,
    /// Extremal Q on Q+1 vertices minus arc K of its balanced cycle: Q K.
    #[arg(long, num_args = 2, value_names = ["Q", "K"])]
    arc_critical: Option<Vec<usize>>,
    /// Uniform labels: GROUP_JSON N SEED.
    #[arg(long, num_args = 3, value_names = ["GROUP_JSON", "N", "SEED"])]
    random: Option<Vec<String>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    ExhaustiveNormalized,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    group: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, conflicts_with = "random")]
    mode: Option<Mode>,
    /// Random labellings instead of enumeration.
    #[arg(long)]
    random: bool,
    #[arg(long, default_value_t = 1000, requires = "random")]
    trials: u64,
    #[arg(long, default_value_t = 0, requires = "random")]
    seed: u64,
}

fn dp_cap(raw: &str) -> Result<usize, String> {
    let n: usize = raw.parse().map_err(|e| format!("{e}"))?;
    if (1..=DP_CAP).contains(&n) {
        Ok(n)
    } else {
        Err(format!("must be between 1 and {DP_CAP}"))
    }
}

enum Failure {
    Lib(Error),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<(Value, u8), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_workers() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }
    match run(&cli) {
        Ok((value, code)) => {
            let text = match value {
                Value::String(s) => s,
                v => serde_json::to_string_pretty(&v).expect("serializable") + "\n",
            };
            // a closed pipe downstream is not an error
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            ExitCode::from(code)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            let code = if matches!(e, Error::SearchSpaceTooLarge(_)) { EXIT_TOO_LARGE } else { EXIT_USAGE };
            ExitCode::from(code)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn configure_workers() -> Result<(), String> {
    let Ok(raw) = std::env::var("ZEROSUM_WORKERS") else { return Ok(()) };
    let n: usize = raw.parse().map_err(|_| format!("ZEROSUM_WORKERS={raw} is not a count"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn read_input(path: &Path) -> Result<String, Failure> {
    let mut text = String::new();
    let res = if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(text)
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read_input(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_labelling(path: &Path) -> Result<Labelling, Failure> {
    let json: LabellingJson = parse(path)?;
    Ok(Labelling::from_json(&json)?)
}

fn load_group(path: &Path) -> Result<Arc<zerosum::FiniteGroup>, Failure> {
    let spec: GroupSpec = parse(path)?;
    Ok(Arc::new(spec.build()?))
}

fn cycle_json(cycle: Option<&CycleWitness>) -> Value {
    json!({ "balanced_cycle": cycle })
}

fn run(cli: &Cli) -> Outcome {
    let cap = cli.max_dp_vertices;
    match &cli.command {
        Command::Gen(args) => gen(args),
        Command::Check { labelling } => {
            let l = load_labelling(labelling)?;
            let verdict = paths::check(&l, cap);
            let code = if verdict.balanced_cycle.is_some() {
                0
            } else if verdict.is_inconclusive() {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_NONE
            };
            Ok((serde_json::to_value(&verdict).expect("serializable"), code))
        }
        Command::FindCycle { labelling } => {
            let l = load_labelling(labelling)?;
            let cycle = paths::find_balanced_cycle_capped(&l, cap)?;
            let code = if cycle.is_some() { 0 } else { EXIT_NONE };
            Ok((cycle_json(cycle.as_ref()), code))
        }
        Command::Enumerate { labelling } => {
            let l = load_labelling(labelling)?;
            let cycles = paths::enumerate_balanced_cycles(&l)?;
            let code = if cycles.is_empty() { EXIT_NONE } else { 0 };
            Ok((json!({ "count": cycles.len(), "cycles": cycles }), code))
        }
        Command::KeyLemma { labelling } => {
            let l = load_labelling(labelling)?;
            let out = zerosum::key_lemma(&l)?;
            let mut value = serde_json::to_value(&out.result).expect("serializable");
            value["within_hypothesis"] = json!(out.within_hypothesis);
            Ok((value, 0))
        }
        Command::PrimeFind { labelling } => {
            let l = load_labelling(labelling)?;
            let cycle = zerosum::prime_finder(&l)?;
            Ok((cycle_json(Some(&cycle)), 0))
        }
        Command::Verify(args) => verify(args, cap),
        Command::ComputeN { group, node_limit } => {
            let g = load_group(group)?;
            let report = harness::compute_n(&g, *node_limit)?;
            Ok((serde_json::to_value(&report).expect("serializable"), 0))
        }
        Command::Dot { labelling, cycle } => {
            let l = load_labelling(labelling)?;
            let cycle = cycle.clone().map(CycleWitness::new).transpose()?;
            if let Some(c) = &cycle {
                l.cycle_value(c, c.vertices[0])?;
            }
            Ok((Value::String(l.to_dot(cycle.as_ref())), 0))
        }
    }
}

fn gen(args: &GenArgs) -> Outcome {
    let l = if let Some(v) = &args.extremal {
        extremal_cyclic(v[0], v[1])?
    } else if let Some(v) = &args.arc_critical {
        arc_critical_instance(v[0], v[1])?
    } else if let Some(v) = &args.random {
        let group = load_group(Path::new(&v[0]))?;
        let n = v[1].parse().map_err(|_| Failure::Input(format!("bad vertex count {}", v[1])))?;
        let seed = v[2].parse().map_err(|_| Failure::Input(format!("bad seed {}", v[2])))?;
        random_labelling(&group, n, seed)?
    } else {
        unreachable!("clap requires one generator")
    };
    Ok((serde_json::to_value(l.to_json()).expect("serializable"), 0))
}

fn verify(args: &VerifyArgs, cap: usize) -> Outcome {
    let group = load_group(&args.group)?;
    let report: VerdictReport = if args.random {
        harness::verify_random(&group, args.n, args.trials, args.seed, cap)?
    } else {
        let normalized = match args.mode {
            Some(Mode::Exhaustive) => false,
            Some(Mode::ExhaustiveNormalized) => true,
            None => return Err(Failure::Input("verify needs --mode or --random".into())),
        };
        harness::verify_all_capped(&group, args.n, normalized, cap)?
    };
    let code = if report.has_counterexample() {
        EXIT_COUNTEREXAMPLE
    } else if report.unresolved > 0 {
        EXIT_INCONCLUSIVE
    } else {
        0
    };
    Ok((serde_json::to_value(&report).expect("serializable"), code))
}
