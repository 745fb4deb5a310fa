use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};

use iqp_verify::bitlin::BitVector;
use iqp_verify::evaluators::{
    correlation_clifford, correlation_diagonal, correlation_statevector, correlation_subspace, mc_sample_count,
    sample_outputs, Backend, CorrelationResult, DiagonalMode,
};
use iqp_verify::experiments::{
    exp_anticoncentration, exp_fig1a, exp_fig1b, exp_parseval, fig1b_histogram, ExperimentReport,
};
use iqp_verify::keygen::{build_challenge, random_ops, scramble, ConstructionSpec};
use iqp_verify::model::{bias_from_correlation, parse_key, parse_program, serialize_key, serialize_program, IqpProgram, SecretKey};
use iqp_verify::protocol::{
    acceptance_threshold, new_session_id, verify_remote, ClientConfig, ProverKind, ProverServer, ServerConfig,
};
use iqp_verify::rng;

const EXIT_REJECT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "iqp-verify", version, about = "Secret-encoded IQP challenges: build, evaluate, serve and verify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a challenge program and its secret key.
    Keygen(KeygenArgs),
    /// Apply random column additions to a program and its key.
    Scramble(ScrambleArgs),
    /// Compute <Z_s> with one backend.
    Eval(EvalArgs),
    /// Draw output samples from a program.
    Sample(SampleArgs),
    /// Run a prover service over TCP.
    Serve(ServeArgs),
    /// Challenge a prover and judge its samples.
    Verify(VerifyArgs),
    /// Level fractions of random pi/8 circuits across n.
    #[command(name = "exp-fig1a")]
    ExpFig1a(Fig1aArgs),
    /// Per-instance quantized values of random pi/8 circuits.
    #[command(name = "exp-fig1b")]
    ExpFig1b(Fig1bArgs),
    /// Mean <Z_s>^2 and tails for random 2-local circuits.
    #[command(name = "exp-anticoncentration")]
    ExpAnticoncentration(AnticoncentrationArgs),
    /// Collision probability against the mean squared correlation.
    #[command(name = "exp-parseval")]
    ExpParseval(ParsevalArgs),
}

#[derive(Args, Debug)]
struct KeygenArgs {
    #[arg(long)]
    n: usize,
    /// Number of secrets.
    #[arg(long, default_value_t = 1)]
    secrets: usize,
    /// Qubits per secret block.
    #[arg(long, default_value_t = 3)]
    weight: usize,
    /// Minimum |<Z_s>| per secret.
    #[arg(long, default_value_t = 0.7)]
    target: f64,
    #[arg(long, default_value_t = 2000)]
    budget: usize,
    /// Rows orthogonal to every secret; defaults to 2n.
    #[arg(long)]
    redundant: Option<usize>,
    /// Scrambling operations; defaults to 20n.
    #[arg(long)]
    scramble_ops: Option<usize>,
    #[arg(long)]
    allow_swaps: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    program_out: PathBuf,
    #[arg(long)]
    key_out: PathBuf,
}

#[derive(Args, Debug)]
struct ScrambleArgs {
    #[arg(long)]
    program: PathBuf,
    #[arg(long)]
    key: PathBuf,
    #[arg(long)]
    ops: usize,
    #[arg(long)]
    allow_swaps: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    program_out: PathBuf,
    #[arg(long)]
    key_out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BackendArg {
    Statevector,
    Diagonal,
    Mc,
    Subspace,
    Clifford,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    program: PathBuf,
    /// Secret bitstring; alternatively evaluate every secret of --key.
    #[arg(long, conflicts_with = "key", required_unless_present = "key")]
    secret: Option<String>,
    #[arg(long)]
    key: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "statevector")]
    backend: BackendArg,
    /// Monte-Carlo accuracy; the sample count follows from epsilon and delta.
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Explicit Monte-Carlo sample count, overriding epsilon.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    program: PathBuf,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProverArg {
    Honest,
    Uniform,
    Leak,
}

#[derive(Args, Debug, Clone)]
struct ProverChoice {
    #[arg(long, value_enum, default_value = "honest")]
    prover: ProverArg,
    /// Key file handed to the leak prover.
    #[arg(long)]
    leak_key: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:7878")]
    listen: String,
    #[command(flatten)]
    prover: ProverChoice,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 30)]
    read_timeout_secs: u64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    program: PathBuf,
    #[arg(long)]
    key: PathBuf,
    /// Prover address.
    #[arg(long, required_unless_present = "local_prover")]
    connect: Option<String>,
    /// Spawn this prover in-process on a loopback port instead of connecting.
    #[arg(long, value_enum, conflicts_with = "connect")]
    local_prover: Option<ProverArg>,
    #[arg(long)]
    leak_key: Option<PathBuf>,
    /// Samples requested.
    #[arg(long, default_value_t = 10_000)]
    t: u64,
    /// Failure probability used to derive the acceptance threshold.
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Explicit acceptance threshold, overriding delta.
    #[arg(long)]
    epsilon_acc: Option<f64>,
    /// Send the verdict back to the prover.
    #[arg(long)]
    reveal_verdict: bool,
    #[arg(long, default_value_t = 60)]
    timeout_secs: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct OutArg {
    /// CSV output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Fig1aArgs {
    #[arg(long, default_value_t = 2)]
    n_min: usize,
    #[arg(long, default_value_t = 8)]
    n_max: usize,
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct Fig1bArgs {
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[arg(long, default_value_t = 500)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the level histogram here.
    #[arg(long)]
    histogram_out: Option<PathBuf>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct AnticoncentrationArgs {
    #[arg(long, default_value_t = 4)]
    n_min: usize,
    #[arg(long, default_value_t = 10)]
    n_max: usize,
    #[arg(long, default_value_t = 1000)]
    circuits: usize,
    #[arg(long, default_value_t = 1)]
    secrets_per_circuit: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct ParsevalArgs {
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 50)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_USAGE);
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("IQP_VERIFY_THREADS") else { return Ok(()) };
    let threads: usize = value.trim().parse().with_context(|| format!("IQP_VERIFY_THREADS={value:?} is not a count"))?;
    if threads == 0 {
        bail!("IQP_VERIFY_THREADS must be at least 1");
    }
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Keygen(a) => keygen(a),
        Command::Scramble(a) => scramble_cmd(a),
        Command::Eval(a) => eval(a),
        Command::Sample(a) => sample(a),
        Command::Serve(a) => serve(a),
        Command::Verify(a) => verify(a),
        Command::ExpFig1a(a) => {
            let report = exp_fig1a(a.n_min..=a.n_max, a.count, a.seed)?;
            emit_report(&report, a.out.out.as_deref())
        }
        Command::ExpFig1b(a) => {
            let report = exp_fig1b(a.count, a.n, a.seed)?;
            if let Some(path) = &a.histogram_out {
                write_file(path, &fig1b_histogram(&report)?.to_csv()?)?;
            }
            emit_report(&report, a.out.out.as_deref())
        }
        Command::ExpAnticoncentration(a) => {
            let report = exp_anticoncentration(a.n_min..=a.n_max, a.circuits, a.secrets_per_circuit, a.seed)?;
            emit_report(&report, a.out.out.as_deref())
        }
        Command::ExpParseval(a) => {
            let report = exp_parseval(a.n, a.instances, a.seed)?;
            emit_report(&report, a.out.out.as_deref())
        }
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_program(path: &Path) -> Result<IqpProgram> {
    parse_program(&read_file(path)?).with_context(|| format!("parsing program {}", path.display()))
}

fn load_key(path: &Path) -> Result<SecretKey> {
    parse_key(&read_file(path)?).with_context(|| format!("parsing key {}", path.display()))
}

fn emit_report(report: &ExperimentReport, out: Option<&Path>) -> Result<ExitCode> {
    let csv = report.to_csv()?;
    match out {
        Some(path) => write_file(path, &csv)?,
        None => std::io::stdout().write_all(csv.as_bytes())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn keygen(a: KeygenArgs) -> Result<ExitCode> {
    let mut spec = ConstructionSpec::new(a.n, a.secrets, a.weight, a.seed);
    spec.target = a.target;
    spec.budget = a.budget;
    if let Some(r) = a.redundant {
        spec.redundant_rows = r;
    }
    spec.scramble_ops = a.scramble_ops;
    spec.allow_swaps = a.allow_swaps;
    let (program, key) = build_challenge(&spec)?;
    write_file(&a.program_out, &serialize_program(&program))?;
    write_file(&a.key_out, &serialize_key(&key))?;
    println!("wrote {} rows on {} qubits with {} secret(s)", program.m(), program.n(), key.len());
    Ok(ExitCode::SUCCESS)
}

fn scramble_cmd(a: ScrambleArgs) -> Result<ExitCode> {
    let program = load_program(&a.program)?;
    let key = load_key(&a.key)?;
    let mut r = rng::seeded(a.seed);
    let ops = random_ops(program.n(), a.ops, a.allow_swaps, &mut r)?;
    let (program, secrets) = scramble(&program, key.secrets(), &ops)?;
    let key = SecretKey::new(program.n(), secrets, key.expected().to_vec())?.with_notes(key.notes().to_vec());
    write_file(&a.program_out, &serialize_program(&program))?;
    write_file(&a.key_out, &serialize_key(&key))?;
    println!("applied {} operations", ops.len());
    Ok(ExitCode::SUCCESS)
}

fn evaluate(program: &IqpProgram, s: &BitVector, a: &EvalArgs, index: u64) -> Result<CorrelationResult> {
    Ok(match a.backend {
        BackendArg::Statevector => correlation_statevector(program, s)?,
        BackendArg::Diagonal => correlation_diagonal(program, s, DiagonalMode::Exact)?,
        BackendArg::Mc => {
            let samples = match a.samples {
                Some(t) => t,
                None => mc_sample_count(a.epsilon, a.delta)?,
            };
            let seed = a.seed.wrapping_add(index);
            correlation_diagonal(program, s, DiagonalMode::MonteCarlo { samples, delta: a.delta, seed })?
        }
        BackendArg::Subspace => correlation_subspace(program, s)?,
        BackendArg::Clifford => correlation_clifford(program, s)?,
    })
}

fn eval(a: EvalArgs) -> Result<ExitCode> {
    let program = load_program(&a.program)?;
    let secrets: Vec<BitVector> = match (&a.secret, &a.key) {
        (Some(s), _) => vec![s.parse()?],
        (None, Some(k)) => load_key(k)?.secrets().to_vec(),
        (None, None) => bail!("either --secret or --key is required"),
    };
    for (i, s) in secrets.iter().enumerate() {
        if s.len() != program.n() {
            bail!("secret {s} has length {}, program has {} qubits", s.len(), program.n());
        }
        let result = evaluate(&program, s, &a, i as u64)?;
        let mut line = format!(
            "secret={s} backend={} value={:.12} bias={:.12} error_bound={:.6}",
            result.backend,
            result.value,
            bias_from_correlation(result.value)?,
            result.error_bound
        );
        if result.backend == Backend::Clifford {
            line.push_str(&format!(" g={}", result.g.map(|g| g.to_string()).unwrap_or_else(|| "none".into())));
        }
        if let Some(t) = result.samples_used {
            line.push_str(&format!(" samples={t}"));
        }
        println!("{line}");
    }
    Ok(ExitCode::SUCCESS)
}

fn sample(a: SampleArgs) -> Result<ExitCode> {
    let program = load_program(&a.program)?;
    let mut r = rng::seeded(a.seed);
    let samples = sample_outputs(&program, a.count, &mut r)?;
    let mut text = String::with_capacity(samples.len() * (program.n() + 1));
    for x in &samples {
        text.push_str(&x.to_string());
        text.push('\n');
    }
    match &a.out {
        Some(path) => write_file(path, &text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn prover_kind(kind: ProverArg, leak_key: Option<&Path>) -> Result<ProverKind> {
    Ok(match kind {
        ProverArg::Honest => ProverKind::Honest,
        ProverArg::Uniform => ProverKind::Uniform,
        ProverArg::Leak => {
            let path = leak_key.context("the leak prover needs --leak-key")?;
            ProverKind::Leak(load_key(path)?)
        }
    })
}

fn serve(a: ServeArgs) -> Result<ExitCode> {
    let kind = prover_kind(a.prover.prover, a.prover.leak_key.as_deref())?;
    let config = ServerConfig {
        seed: a.seed,
        read_timeout: Some(Duration::from_secs(a.read_timeout_secs)),
        ..ServerConfig::default()
    };
    let server = ProverServer::bind(a.listen.as_str(), kind, config)?;
    eprintln!("listening on {}", server.local_addr()?);
    server.serve();
    Ok(ExitCode::SUCCESS)
}

fn verify(a: VerifyArgs) -> Result<ExitCode> {
    let program = load_program(&a.program)?;
    let key = load_key(&a.key)?;
    if key.n() != program.n() {
        bail!("key is for {} qubits, program has {}", key.n(), program.n());
    }
    let threshold = acceptance_threshold(&key, a.delta, a.t)?;
    for w in &threshold.warnings {
        warn!("{w}");
    }
    let epsilon_acc = a.epsilon_acc.unwrap_or(threshold.epsilon);
    let mut r = rng::seeded(a.seed);
    let session = new_session_id(&mut r);
    let local = match a.local_prover {
        Some(kind) => {
            let kind = prover_kind(kind, a.leak_key.as_deref())?;
            let config = ServerConfig { seed: a.seed, ..ServerConfig::default() };
            Some(ProverServer::bind("127.0.0.1:0", kind, config)?.spawn()?)
        }
        None => None,
    };
    let addr = match (&local, &a.connect) {
        (Some(handle), _) => handle.addr().to_string(),
        (None, Some(addr)) => addr.clone(),
        (None, None) => bail!("either --connect or --local-prover is required"),
    };
    info!("session {session} against {addr}");
    let client = ClientConfig { timeout: Duration::from_secs(a.timeout_secs), ..ClientConfig::default() };
    let (report, _) = verify_remote(addr.as_str(), &program, &key, a.t, epsilon_acc, &session, a.reveal_verdict, &client)?;
    if let Some(handle) = local {
        handle.shutdown();
    }
    println!("session={session} t={} epsilon_acc={:.6}", report.t, report.epsilon_acc);
    for rec in &report.records {
        println!(
            "secret#{} expected={:.6} observed={:.6} deviation={:.6} {}",
            rec.index,
            rec.expected,
            rec.observed,
            rec.deviation,
            if rec.pass { "pass" } else { "fail" }
        );
    }
    println!("verdict={}", if report.accept { "accept" } else { "reject" });
    Ok(if report.accept { ExitCode::SUCCESS } else { ExitCode::from(EXIT_REJECT) })
}
