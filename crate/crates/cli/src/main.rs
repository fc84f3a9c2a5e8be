//! `qbfsim`: translate QBFs, check proofs, transpile them into first-order
//! resolution, and generate the separating formula families.
//!
//! Exit codes: 0 accepted, 1 rejected, 2 usage, parse or I/O error.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qbfsim::families::{Family, SigmaMode};

/// Environment variable holding the start of the fresh-variable counter.
const FRESH_OFFSET_VAR: &str = "QBFSIM_FRESH_OFFSET";

#[derive(Parser)]
#[command(name = "qbfsim", version, about)]
struct Cli {
    /// Print progress to stderr.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Translate a QBF into first-order logic.
    Translate(TranslateArgs),
    /// Check a proof trace against a formula.
    Check(CheckArgs),
    /// Transpile a QBF proof into a first-order resolution proof.
    Simulate(SimulateArgs),
    /// Generate a family member with companions and a reference proof.
    Gen(GenArgs),
    /// Generate, check and measure a range of family members as CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TranslateMode {
    /// Direct translation of the formula tree.
    Fo,
    Skolem,
    Epr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Skolem,
    Epr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckCalculus {
    Qres,
    Qures,
    Ircalc,
    IrcalcSigma,
    IrcalcDeltaSigma,
    R1,
    R1subs,
}

impl CheckCalculus {
    pub fn name(self) -> &'static str {
        match self {
            CheckCalculus::Qres => "qres",
            CheckCalculus::Qures => "qures",
            CheckCalculus::Ircalc => "ircalc",
            CheckCalculus::IrcalcSigma => "ircalc-sigma",
            CheckCalculus::IrcalcDeltaSigma => "ircalc-delta-sigma",
            CheckCalculus::R1 => "r1",
            CheckCalculus::R1subs => "r1subs",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FromCalculus {
    Qres,
    Qures,
    Ircalc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ToSystem {
    R1,
    R1subs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Php,
    Phi,
    Omega,
    Kbkf,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Php => Family::Php,
            FamilyArg::Phi => Family::Phi,
            FamilyArg::Omega => Family::Omega,
            FamilyArg::Kbkf => Family::Kbkf,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SigmaArg {
    /// Bind each x_j to e_j.
    Atomic,
    /// Bind each x_j to an extension variable defined by Δ.
    Herbrand,
}

impl From<SigmaArg> for SigmaMode {
    fn from(s: SigmaArg) -> Self {
        match s {
            SigmaArg::Atomic => SigmaMode::Atomic,
            SigmaArg::Herbrand => SigmaMode::Herbrand,
        }
    }
}

#[derive(Args)]
pub struct TranslateArgs {
    #[arg(long, value_enum)]
    pub mode: TranslateMode,
    /// Add the units p(f1) and ~p(f0).
    #[arg(long)]
    pub wrap: bool,
    /// Emit TPTP CNF instead of JSON (clause modes only).
    #[arg(long)]
    pub tptp: bool,
    /// Accept free matrix variables in QDIMACS input.
    #[arg(long)]
    pub open: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// QDIMACS, PCNF JSON, or (for `--mode fo`) formula-tree JSON.
    pub input: PathBuf,
}

#[derive(Args)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub calculus: CheckCalculus,
    /// σ_v companion file.
    #[arg(long)]
    pub sigma: Option<PathBuf>,
    /// Δ companion file.
    #[arg(long)]
    pub delta: Option<PathBuf>,
    /// Clause form the R1 proof refutes (when --inputs is not given).
    #[arg(long, value_enum, default_value = "skolem")]
    pub mode: ModeArg,
    /// Explicit R1 input clauses (JSON).
    #[arg(long)]
    pub inputs: Option<PathBuf>,
    #[arg(long)]
    pub open: bool,
    pub formula: PathBuf,
    pub proof: PathBuf,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub from: FromCalculus,
    #[arg(long, value_enum)]
    pub to: ToSystem,
    #[arg(long, value_enum, default_value = "skolem")]
    pub mode: ModeArg,
    /// Target trace; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Full simulation report with the step mapping.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Skip the per-step invariant checks.
    #[arg(long)]
    pub no_invariants: bool,
    #[arg(long)]
    pub open: bool,
    pub formula: PathBuf,
    pub proof: PathBuf,
}

#[derive(Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long, conflicts_with = "t")]
    pub n: Option<usize>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long, value_enum)]
    pub with_sigma: Option<SigmaArg>,
    #[arg(long)]
    pub with_proof: bool,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Lift the parameter cap.
    #[arg(long)]
    pub force: bool,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Inclusive parameter range `A..B`.
    #[arg(long)]
    pub range: String,
    #[arg(long, value_enum)]
    pub with_sigma: Option<SigmaArg>,
    /// CSV file to append to; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Write 0 for check_ms so tables are reproducible.
    #[arg(long)]
    pub no_timing: bool,
    #[arg(long)]
    pub force: bool,
}

fn fresh_offset() -> anyhow::Result<u64> {
    match std::env::var(FRESH_OFFSET_VAR) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("{FRESH_OFFSET_VAR} must be a non-negative integer")),
        Err(_) => Ok(0),
    }
}

fn run(cli: &Cli) -> commands::Verdict {
    match &cli.command {
        Command::Translate(a) => commands::translate(a),
        Command::Check(a) => commands::check(a),
        Command::Simulate(a) => commands::simulate(a, fresh_offset()?),
        Command::Gen(a) => commands::gen(a, cli.verbose),
        Command::Bench(a) => commands::bench(a, cli.verbose),
    }
}

/// The error chain, skipping causes already quoted by their parent.
fn describe(e: &anyhow::Error) -> String {
    let mut out = String::new();
    let mut last = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if !last.contains(&text) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&text);
        }
        last = text;
    }
    out
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(2)
        }
    }
}
