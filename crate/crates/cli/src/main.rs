mod commands;
mod config;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigUint;

use crate::error::CliResult;

#[derive(Parser)]
#[command(name = "koopman-dh", version, about = "Koopman lifting experiments on the Diffie-Hellman map")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the orbit x_{k+1} = c x_k mod p as CSV, one state per line.
    Simulate {
        #[arg(long)]
        p: BigUint,
        #[arg(long)]
        m: BigUint,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value = "1")]
        x0: BigUint,
        /// Multiplier c; defaults to the generator.
        #[arg(long)]
        multiplier: Option<BigUint>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the brute-force minimal lifting dimension with (p-1)/2 + 1.
    VerifyTheorem {
        /// Single prime; shorthand for --from P --to P.
        #[arg(long, conflicts_with_all = ["from", "to"])]
        p: Option<u64>,
        #[arg(long, default_value_t = 5)]
        from: u64,
        #[arg(long, default_value_t = 61)]
        to: u64,
        /// Sweep every primitive root instead of the smallest.
        #[arg(long)]
        all_generators: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover the exponent of c = m^e mod p spectrally and check it.
    Recover {
        #[arg(long)]
        p: BigUint,
        #[arg(long)]
        m: BigUint,
        #[arg(long, required_unless_present = "e", conflicts_with = "e")]
        c: Option<BigUint>,
        /// Self-test: derive c from e first.
        #[arg(long)]
        e: Option<BigUint>,
        #[arg(long)]
        parity_only: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force the shared secret from the two public values.
    SharedSecret {
        #[arg(long)]
        p: BigUint,
        #[arg(long)]
        m: BigUint,
        #[arg(long)]
        c_e: BigUint,
        #[arg(long)]
        c_d: BigUint,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Least-squares fit of the lifted operator from snapshots.
    Edmd {
        #[arg(long, required_unless_present = "data")]
        p: Option<BigUint>,
        #[arg(long, required_unless_present = "data")]
        m: Option<BigUint>,
        #[arg(long)]
        q: usize,
        /// Number of snapshot pairs; defaults to one period (or all data).
        #[arg(long)]
        n: Option<usize>,
        /// Integer sequence, one value per line.
        #[arg(long, conflicts_with_all = ["p", "m"])]
        data: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Linear complexity of the orbit, or of a sequence from a file.
    Complexity {
        #[arg(long, required_unless_present = "sequence")]
        p: Option<BigUint>,
        #[arg(long, required_unless_present = "sequence")]
        m: Option<BigUint>,
        #[arg(long, conflicts_with_all = ["p", "m"])]
        sequence: Option<PathBuf>,
        /// Also compute the complexity over GF(prime).
        #[arg(long, requires = "sequence")]
        prime: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a sweep described by a TOML config and write the report.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Leave out the wall-clock time so reruns are byte-identical.
        #[arg(long)]
        golden: bool,
    },
}

fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Simulate { p, m, steps, x0, multiplier, out } => {
            commands::simulate_cmd(&p, &m, steps, &x0, multiplier.as_ref(), out.as_deref())
        }
        Command::VerifyTheorem { p, from, to, all_generators, out } => {
            let (from, to) = p.map_or((from, to), |p| (p, p));
            commands::verify_theorem_cmd(from, to, all_generators, out.as_deref())
        }
        Command::Recover { p, m, c, e, parity_only, out } => {
            commands::recover_cmd(&p, &m, c.as_ref(), e.as_ref(), parity_only, out.as_deref())
        }
        Command::SharedSecret { p, m, c_e, c_d, out } => commands::shared_secret_cmd(&p, &m, &c_e, &c_d, out.as_deref()),
        Command::Edmd { p, m, q, n, data, out } => {
            commands::edmd_cmd(p.as_ref(), m.as_ref(), q, n, data.as_deref(), out.as_deref())
        }
        Command::Complexity { p, m, sequence, prime, out } => {
            commands::complexity_cmd(p.as_ref(), m.as_ref(), sequence.as_deref(), prime, out.as_deref())
        }
        Command::Run { config, golden } => commands::run_cmd(&config, golden),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
