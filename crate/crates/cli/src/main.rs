use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cnot_steiner::arch::{ArchError, Architecture};
use cnot_steiner::bench::{explain, generate, run_bench, to_csv, BenchConfig, BenchError};
use cnot_steiner::circuit::{emit_qasm, parse_qasm};
use cnot_steiner::gf2::ParityMatrix;
use cnot_steiner::pipeline::{route_circuit, RouteError, RouteOptions};
use cnot_steiner::placement::GaParams;
use cnot_steiner::rng::derive_seed;
use cnot_steiner::router::{synthesize, trace_to_circuit, Method};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "cnot-steiner",
    version,
    about = "Route CNOT and CNOT+Rz circuits onto constrained qubit architectures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Route a QASM circuit and print JSON statistics
    Route(RouteArgs),
    /// Mean routed CNOT counts of random circuits, as CSV
    Bench(BenchArgs),
    /// Write random CNOT circuits as QASM files
    Gen(GenArgs),
    /// Synthesize a parity matrix into a routed QASM circuit
    Synth(SynthArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ArchArgs {
    /// Built-in architecture: square-9, square-16, ibm-qx5, rigetti-16q-aspen, ibm-q20-tokyo
    #[arg(long)]
    arch: Option<String>,
    /// Architecture JSON file
    #[arg(long, value_name = "PATH")]
    arch_json: Option<PathBuf>,
}

#[derive(Args)]
struct GaArgs {
    /// Keep the identity placement instead of searching
    #[arg(long)]
    no_placement: bool,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    /// Crossover probability
    #[arg(long)]
    crossover: Option<f64>,
    /// Mutation probability
    #[arg(long)]
    mutation: Option<f64>,
}

#[derive(Args)]
struct RouteArgs {
    input: PathBuf,
    /// Output QASM file; stdout when omitted (statistics then go to stderr)
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    arch: ArchArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    ga: GaArgs,
    /// Ignore connectivity (Patel-Markov-Hayes)
    #[arg(long)]
    unconstrained: bool,
    /// Accept Rz gates and re-synthesize the phase polynomial
    #[arg(long)]
    phasepoly: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    arch: ArchArgs,
    /// Input CNOT counts; defaults to 3,5,10,20,30 up to 9 qubits and 4,8,...,256 above
    #[arg(long, value_delimiter = ',')]
    counts: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    ga: GaArgs,
    #[arg(long)]
    unconstrained: bool,
    /// CSV destination; stdout when omitted
    #[arg(long, value_name = "PATH")]
    csv_out: Option<PathBuf>,
    /// Print reference figures for the architecture to stderr
    #[arg(long)]
    explain: bool,
}

#[derive(Args)]
struct GenArgs {
    /// Qubit count
    #[arg(short, long)]
    n: usize,
    /// CNOTs per circuit
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// Matrix file: one row of 0/1 entries per line
    input: PathBuf,
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    arch: ArchArgs,
    #[arg(long)]
    unconstrained: bool,
}

enum Failure {
    Usage(String),
    Parse(String),
    Synthesis(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Synthesis(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Parse(m) | Failure::Synthesis(m) => m,
        }
    }
}

impl From<RouteError> for Failure {
    fn from(e: RouteError) -> Self {
        if e.is_input_error() {
            Failure::Parse(e.to_string())
        } else {
            Failure::Synthesis(e.to_string())
        }
    }
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::NoCounts | BenchError::NoSamples | BenchError::Circuit(_) => Failure::Usage(e.to_string()),
            BenchError::Route { .. } => Failure::Synthesis(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn load_arch(args: &ArchArgs) -> Result<Architecture, Failure> {
    match (&args.arch, &args.arch_json) {
        (Some(name), _) => Architecture::builtin(name).map_err(|e| Failure::Usage(e.to_string())),
        (None, Some(path)) => Architecture::from_json_file(path).map_err(|e| match e {
            ArchError::Io(_) => Failure::Usage(format!("{}: {e}", path.display())),
            _ => Failure::Parse(format!("{}: {e}", path.display())),
        }),
        (None, None) => Err(Failure::Usage("one of --arch or --arch-json is required".into())),
    }
}

/// GA settings for `n` qubits with any flag overrides, or `None` under `--no-placement`.
fn ga_params(args: &GaArgs, n: usize, seed: u64) -> Result<Option<GaParams>, Failure> {
    if args.no_placement {
        return Ok(None);
    }
    let mut p = GaParams::for_size(n, seed);
    p.population = args.population.unwrap_or(p.population);
    p.iterations = args.iterations.unwrap_or(p.iterations);
    p.crossover_prob = args.crossover.unwrap_or(p.crossover_prob);
    p.mutation_prob = args.mutation.unwrap_or(p.mutation_prob);
    p.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(Some(p))
}

fn route(args: RouteArgs) -> Result<(), Failure> {
    let a = load_arch(&args.arch)?;
    let text = read(&args.input)?;
    let c = parse_qasm(&text).map_err(|e| Failure::Parse(format!("{}: {e}", args.input.display())))?;
    let placement = ga_params(&args.ga, a.n(), derive_seed(args.seed, "ga", &[]))?;
    let opts = RouteOptions {
        unconstrained: args.unconstrained,
        phasepoly: args.phasepoly,
        ..RouteOptions::new(placement)
    };
    let routed = route_circuit(&c, &a, &opts)?;
    let stats = json!({
        "input_cnots": routed.input_cnots,
        "output_cnots": routed.output_cnots,
        "overhead_percent": routed.overhead_percent(),
        "placement": routed.placement.as_slice(),
        "seed": args.seed,
    });
    let qasm = emit_qasm(&routed.circuit);
    match &args.out {
        Some(path) => {
            write(path, &qasm)?;
            println!("{stats}");
        }
        None => {
            print!("{qasm}");
            eprintln!("{stats}");
        }
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    let a = load_arch(&args.arch)?;
    let counts = if !args.counts.is_empty() {
        args.counts.clone()
    } else if a.n() <= 9 {
        vec![3, 5, 10, 20, 30]
    } else {
        (2..=8).map(|k| 1 << k).collect()
    };
    let cfg = BenchConfig {
        counts,
        samples: args.samples,
        seed: args.seed,
        ga: ga_params(&args.ga, a.n(), args.seed)?,
        unconstrained: args.unconstrained,
        ..BenchConfig::new(&a, vec![], args.seed)
    };
    if args.explain {
        eprint!("{}", explain(&a));
    }
    let csv = to_csv(&run_bench(&a, &cfg)?);
    match &args.csv_out {
        Some(path) => write(path, &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn gen(args: GenArgs) -> Result<(), Failure> {
    let files = generate(args.n, args.count, args.samples, args.seed).map_err(|e| Failure::Usage(e.to_string()))?;
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", args.out_dir.display())))?;
    for (name, c) in &files {
        write(&args.out_dir.join(name), &emit_qasm(c))?;
    }
    Ok(())
}

fn synth(args: SynthArgs) -> Result<(), Failure> {
    let a = load_arch(&args.arch)?;
    let text = read(&args.input)?;
    let p: ParityMatrix = text
        .parse()
        .map_err(|e| Failure::Parse(format!("{}: {e}", args.input.display())))?;
    if p.n() != a.n() {
        return Err(Failure::Parse(format!(
            "{}x{} matrix for a {}-qubit architecture",
            p.n(),
            p.n(),
            a.n()
        )));
    }
    let method = if args.unconstrained {
        Method::Pmh(cnot_steiner::gf2::default_pmh_block_size(a.n()))
    } else {
        Method::Auto
    };
    let trace = synthesize(&p, &a, method).map_err(|e| Failure::Synthesis(e.to_string()))?;
    let qasm = emit_qasm(&trace_to_circuit(&trace, p.n()));
    match &args.out {
        Some(path) => write(path, &qasm),
        None => {
            print!("{qasm}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Route(args) => route(args),
        Command::Bench(args) => bench(args),
        Command::Gen(args) => gen(args),
        Command::Synth(args) => synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
