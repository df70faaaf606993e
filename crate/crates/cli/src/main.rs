//! Command-line front end: evaluate rate bounds on explicit strategies,
//! trace frontiers, run the exhaustive oracle, audit the information
//! identities, and compare inner against outer frontiers on a shared pool.
//!
//! Exit status: 0 on success, 1 on validation failure, 2 on a violated
//! internal guarantee, 64 on usage errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{builder::ValueParser, Parser, Subcommand, ValueEnum};

use bcregions_cli::commands::{
    self, CmdError, CompareCmd, FrontierCmd, OracleCmd, SearchArgs,
};
use bcregions::search::BoundKind;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BoundArg {
    Inner,
    Outer,
}

impl From<BoundArg> for BoundKind {
    fn from(b: BoundArg) -> Self {
        match b {
            BoundArg::Inner => BoundKind::Inner,
            BoundArg::Outer => BoundKind::Outer,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "bcregions",
    version,
    about = "Rate-region bounds for two-user broadcast channels with transmitter side information"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct SearchFlags {
    /// Seed for all randomized search stages.
    #[arg(long)]
    seed: u64,
    /// Sweep directions over the quarter circle.
    #[arg(long)]
    directions: Option<usize>,
    /// Random restarts per direction.
    #[arg(long)]
    restarts: Option<usize>,
    /// Hill-climbing iterations per restart.
    #[arg(long)]
    iters: Option<usize>,
    /// |U| (class 2; default 2).
    #[arg(long)]
    u: Option<usize>,
    /// |V1| (default |X||W| + 1).
    #[arg(long)]
    v1: Option<usize>,
    /// |V2| (default |X||W| + 1).
    #[arg(long)]
    v2: Option<usize>,
    /// Markov-chain tolerance for class-2 strategies.
    #[arg(long)]
    markov_tol: Option<f64>,
}

impl SearchFlags {
    fn to_args(&self) -> SearchArgs {
        SearchArgs {
            seed: self.seed,
            directions: self.directions,
            restarts: self.restarts,
            iters: self.iters,
            u: self.u,
            v1: self.v1,
            v2: self.v2,
            markov_tol: self.markov_tol,
            grid_cap: None,
        }
    }
}

fn class_parser() -> ValueParser {
    clap::value_parser!(u8).range(1..=2).into()
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate every bound expression on an explicit channel and strategy.
    Eval {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
    },
    /// Trace a Pareto frontier; writes CSV plus a JSON strategy sidecar.
    Frontier {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long, value_parser = class_parser())]
        class: u8,
        #[arg(long, value_enum)]
        bound: BoundArg,
        #[arg(long)]
        out: PathBuf,
        /// Sidecar path (default: the CSV path with a .json extension).
        #[arg(long)]
        sidecar: Option<PathBuf>,
        #[command(flatten)]
        search: SearchFlags,
    },
    /// Exhaustive lattice oracle for tiny instances.
    Oracle {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long, value_parser = class_parser())]
        class: u8,
        #[arg(long, value_enum)]
        bound: BoundArg,
        /// Lattice levels per coordinate (default 9).
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        sidecar: Option<PathBuf>,
        /// Cap on enumerated strategies.
        #[arg(long)]
        cap: Option<u64>,
        /// |U| (default 2; use 1 for the oracle).
        #[arg(long)]
        u: Option<usize>,
        #[arg(long)]
        v1: Option<usize>,
        #[arg(long)]
        v2: Option<usize>,
    },
    /// Audit the information identities on seeded random joints.
    Audit {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Largest per-letter alphabet.
        #[arg(long, default_value_t = 3)]
        max_card: usize,
        /// Largest sequence length.
        #[arg(long, default_value_t = 3)]
        max_len: usize,
    },
    /// Run both bounds on a shared candidate pool and report dominance.
    Compare {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long, value_parser = class_parser())]
        class: u8,
        /// Componentwise domination tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[command(flatten)]
        search: SearchFlags,
    },
}

fn configure_threads() {
    if let Ok(raw) = std::env::var("BCREGIONS_THREADS") {
        if let Ok(n) = raw.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), CmdError> {
    match cli.command {
        Command::Eval { channel, strategy } => commands::eval(&channel, &strategy),
        Command::Frontier {
            channel,
            class,
            bound,
            out,
            sidecar,
            search,
        } => commands::run_frontier(&FrontierCmd {
            channel,
            class,
            bound: bound.into(),
            out,
            sidecar,
            search: search.to_args(),
        }),
        Command::Oracle {
            channel,
            class,
            bound,
            resolution,
            out,
            sidecar,
            cap,
            u,
            v1,
            v2,
        } => commands::run_oracle(&OracleCmd {
            channel,
            class,
            bound: bound.into(),
            resolution,
            out,
            sidecar,
            search: SearchArgs {
                u,
                v1,
                v2,
                grid_cap: cap,
                ..SearchArgs::default()
            },
        }),
        Command::Audit {
            seed,
            trials,
            max_card,
            max_len,
        } => commands::run_audit(seed, trials, max_card, max_len),
        Command::Compare {
            channel,
            class,
            tolerance,
            search,
        } => commands::run_compare(&CompareCmd {
            channel,
            class,
            tolerance,
            search: search.to_args(),
        }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(64)
                }
            };
        }
    };
    configure_threads();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status())
        }
    }
}
