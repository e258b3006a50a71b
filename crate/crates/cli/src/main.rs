mod commands;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "endocable", version, about = "Cycle sets, permutation braces and endocabling")]
struct Cli {
    /// Seed for randomized axiom sampling on large braces.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structural summary of a cycle set.
    Analyze { file: PathBuf },
    /// Retraction tower; writes the first retraction.
    Retract {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Endocabling by a scalar, a central lambda_z or id - lambda_z.
    Cable(CableArgs),
    /// Run the identity suite on a file, or verify a theorem by enumeration.
    Verify(VerifyArgs),
    /// Solve a model file.
    Search(SearchArgs),
    /// List all cycle sets of a small size.
    Enumerate {
        n: usize,
        #[arg(long, value_enum, default_value_t = DiagonalArg::None)]
        diagonal: DiagonalArg,
        /// Keep one representative per isomorphism class.
        #[arg(long)]
        dedup: bool,
    },
    /// Brute-force oracles for the holomorph classification lemmas.
    Oracle {
        #[command(subcommand)]
        which: OracleCmd,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "selector")]
struct Selector {
    #[arg(long, allow_negative_numbers = true)]
    scalar: Option<i64>,
    /// Index into the sorted center of the permutation brace.
    #[arg(long)]
    central: Option<usize>,
    /// Index into the sorted center; cables by id - lambda_z.
    #[arg(long = "phi-z")]
    phi_z: Option<usize>,
}

#[derive(Args)]
struct CableArgs {
    file: PathBuf,
    #[command(flatten)]
    selector: Selector,
    /// Apply the cabling this many times.
    #[arg(long, default_value_t = 1)]
    iterate: u32,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Identities,
    Theorem,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    /// `FILE` for identities; `NAME N` for theorem.
    #[arg(required = true)]
    args: Vec<String>,
    /// Allow the long-running sizes.
    #[arg(long)]
    extended: bool,
    #[arg(long)]
    budget_nodes: Option<u64>,
    #[arg(long)]
    budget_secs: Option<u64>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    First,
    All,
    Decide,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DiagonalArg {
    None,
    Fullcycle,
}

#[derive(Args)]
struct SearchArgs {
    model: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::First)]
    mode: ModeArg,
    #[arg(long)]
    budget_nodes: Option<u64>,
    #[arg(long)]
    budget_secs: Option<u64>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Fixed-point-free elements of order p in Hol(Z_{p^v}).
    Hol {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        v: u32,
    },
    /// Fixed-point-free involutions commuting with i -> i+2 on Z_{2^v}.
    T2 {
        #[arg(long)]
        v: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let echo: Vec<String> = std::env::args().skip(1).collect();
    let result = commands::run(&cli, &echo);
    eprintln!("wall time: {:.3?}", start.elapsed());
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
