//! `qgcd` — run the phase-estimation gcd algorithm, dump outcome
//! distributions for plotting, emit circuits, or run the self-check suite.
//!
//! Exit codes: 0 success, 1 failed verification, 2 usage or domain error,
//! 3 resource limit, 4 protocol failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qgcd_core::circuit::{build_qpe_circuit, emit_text, resource_report};
use qgcd_core::qpe::{
    choose_t, default_max_iters, exact_distribution, protocol_a_with_limit, protocol_b_with_limit,
    run_kitaev_qpe_capped, run_statevector_qpe_capped, GcdOutcome, PhaseEstimate, Protocol,
};
use qgcd_core::verify::{run_suite, VerifyOptions};
use qgcd_core::{Error, DEFAULT_MAX_AMPS};

mod output;

#[derive(Parser)]
#[command(
    name = "qgcd",
    version,
    about = "Greatest common divisor via phase estimation over a modular-addition unitary"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the algorithm end to end and print the gcd claim
    Gcd(GcdArgs),
    /// Write the outcome distribution of one configuration
    Dist(DistArgs),
    /// Emit the circuit text and a resource report
    Circuit(CircuitArgs),
    /// Run the small-instance invariant suite
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolArg {
    A,
    B,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exact,
    Statevector,
    Kitaev,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args)]
struct GcdArgs {
    #[arg(long)]
    x: u64,
    #[arg(long)]
    r: u64,
    #[arg(long, value_enum, default_value = "a")]
    protocol: ProtocolArg,
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    /// Repetitions for protocol a
    #[arg(long, default_value_t = 20)]
    reps: u32,
    /// Iteration cap for protocol b (default 10·ceil(log2 r))
    #[arg(long)]
    max_iters: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DistArgs {
    #[arg(long)]
    x: u64,
    #[arg(long)]
    r: u64,
    /// Control-register size, or "auto" to derive it from epsilon
    #[arg(long, default_value = "auto")]
    t: String,
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    #[arg(long, value_enum, default_value = "exact")]
    method: Method,
    #[arg(long, default_value_t = 100_000)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CircuitArgs {
    #[arg(long)]
    x: u64,
    #[arg(long)]
    r: u64,
    /// Control-register size, or "auto" to derive it from epsilon
    #[arg(long, default_value = "auto")]
    t: String,
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Output path for the circuit text (stdout when omitted; the resource
    /// report always goes to stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Restrict the suite to moduli at most 24 (finishes in seconds)
    #[arg(long)]
    quick: bool,
    /// Negative control: corrupt an expected phase sign so the eigenvalue
    /// check must fail
    #[arg(long, hide = true)]
    inject_phase_fault: bool,
}

enum Failure {
    Core(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure::Core(err)
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure::Io(err)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(Failure::Core(err)) => {
            eprintln!("error: {err}");
            match err {
                Error::Resource(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
        Err(Failure::Io(err)) => {
            eprintln!("i/o error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Gcd(args) => cmd_gcd(args),
        Command::Dist(args) => cmd_dist(args),
        Command::Circuit(args) => cmd_circuit(args),
        Command::Verify(args) => Ok(cmd_verify(args)),
    }
}

/// Amplitude budget for `2^t * r`, overridable through QGCD_MAX_DIM.
fn amplitude_cap() -> Result<u64, Error> {
    match std::env::var("QGCD_MAX_DIM") {
        Ok(raw) => raw
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("QGCD_MAX_DIM must be an integer, got `{raw}`"))),
        Err(_) => Ok(DEFAULT_MAX_AMPS),
    }
}

fn resolve_t(arg: &str, r: u64, epsilon: f64) -> Result<u32, Error> {
    if arg == "auto" {
        return Ok(choose_t(r, epsilon)?.0);
    }
    arg.parse().map_err(|_| {
        Error::Domain(format!(
            "--t must be a positive integer or \"auto\", got `{arg}`"
        ))
    })
}

fn write_output(out: &Option<PathBuf>, content: &str) -> std::io::Result<()> {
    use std::io::Write;
    match out {
        Some(path) => std::fs::write(path, content),
        None => std::io::stdout().write_all(content.as_bytes()),
    }
}

fn cmd_gcd(args: GcdArgs) -> Result<ExitCode, Failure> {
    if args.format == Format::Csv {
        return Err(Failure::Core(Error::Domain(
            "gcd output has no csv form; use text or json".into(),
        )));
    }
    let cap = amplitude_cap()?;
    let record = match args.protocol {
        ProtocolArg::A => {
            protocol_a_with_limit(args.x, args.r, args.epsilon, args.reps, args.seed, cap)?
        }
        ProtocolArg::B => {
            let max_iters = args.max_iters.unwrap_or_else(|| default_max_iters(args.r));
            protocol_b_with_limit(args.x, args.r, args.epsilon, args.seed, max_iters, cap)?
        }
    };
    if let GcdOutcome::Gcd(g) = record.claimed_gcd {
        // Contract check before anything is printed.
        assert!(
            args.x.is_multiple_of(g) && args.r.is_multiple_of(g),
            "claimed gcd {g} does not divide the inputs"
        );
    }
    let rendered = match args.format {
        Format::Json => format!("{}\n", output::run_record_json(&record)),
        _ => output::run_record_text(&record),
    };
    write_output(&args.out, &rendered)?;
    match record.claimed_gcd {
        GcdOutcome::Gcd(_) => Ok(ExitCode::SUCCESS),
        GcdOutcome::Failed => {
            let what = match record.config.protocol {
                Protocol::A => format!("no usable order estimate in {} repetitions", args.reps),
                Protocol::B => "iteration budget exhausted".to_string(),
            };
            eprintln!(
                "protocol {} failed: {what} (seed {})",
                record.config.protocol, args.seed
            );
            Ok(ExitCode::from(4))
        }
    }
}

fn histogram(estimates: &[PhaseEstimate], t: u32) -> Vec<f64> {
    let mut h = vec![0.0f64; 1usize << t];
    let weight = 1.0 / estimates.len() as f64;
    for est in estimates {
        h[est.m_out as usize] += weight;
    }
    h
}

fn cmd_dist(args: DistArgs) -> Result<ExitCode, Failure> {
    let cap = amplitude_cap()?;
    let t = resolve_t(&args.t, args.r, args.epsilon)?;
    let probabilities = match args.method {
        Method::Exact => exact_distribution(args.x, args.r, t)?,
        Method::Statevector => {
            let est = run_statevector_qpe_capped(args.x, args.r, t, args.shots, args.seed, cap)?;
            histogram(&est, t)
        }
        Method::Kitaev => {
            let est = run_kitaev_qpe_capped(args.x, args.r, t, args.shots, args.seed, cap)?;
            histogram(&est, t)
        }
    };
    let rendered = match args.format {
        Format::Csv => output::distribution_csv(&probabilities),
        Format::Json => format!("{}\n", output::distribution_json(&probabilities)),
        Format::Text => output::distribution_text(&probabilities),
    };
    write_output(&args.out, &rendered)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_circuit(args: CircuitArgs) -> Result<ExitCode, Failure> {
    let t = resolve_t(&args.t, args.r, args.epsilon)?;
    let circuit = build_qpe_circuit(args.x, args.r, t)?;
    let text = emit_text(&circuit);
    let report = resource_report(&circuit, args.epsilon)?;
    match args.format {
        Format::Json => {
            let value = output::circuit_json(&circuit, &text, &report);
            write_output(&args.out, &format!("{value}\n"))?;
        }
        _ => {
            let report_text = output::report_text(&circuit, &report);
            match &args.out {
                Some(_) => {
                    // Files get pure circuit text (reparseable as-is); the
                    // report goes to stdout.
                    write_output(&args.out, &text)?;
                    print!("{report_text}");
                }
                None => {
                    print!("{text}\n{report_text}");
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> ExitCode {
    let outcomes = run_suite(&VerifyOptions {
        quick: args.quick,
        inject_phase_fault: args.inject_phase_fault,
    });
    let mut all_passed = true;
    println!("{:<22} {:<6} detail", "check", "result");
    for outcome in &outcomes {
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        all_passed &= outcome.passed;
        println!("{:<22} {:<6} {}", outcome.name, verdict, outcome.detail);
    }
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
