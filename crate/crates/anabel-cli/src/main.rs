use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod docs;

use commands::Report;
use docs::CliError;

#[derive(Parser)]
#[command(
    name = "anabel",
    version,
    about = "Combinatorial and p-adic arithmetic checks on graphs, monoids and polysimplicial sets"
)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    machine: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fiber exponents of z -> z^(p^h) over points at the given valuations.
    SplitRadius {
        p: u64,
        h: u32,
        /// Valuations such as 1, 3/2.
        #[arg(required = true)]
        v: Vec<String>,
    },
    /// The two integer intervals of the Tate-curve experiment.
    TateIntervals {
        p: u64,
        v: String,
        n: u64,
        l: u64,
        m: u64,
    },
    /// Fixed sweep of interval parameters and gap thresholds.
    TateSweep,
    /// Kernel of cycle sums over all covers up to the given degree.
    VerifyRigidity {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
    },
    /// Rigidity over every small connected graph of minimal arity 3.
    RigiditySweep {
        #[arg(long, default_value_t = 3)]
        max_vertices: usize,
        #[arg(long, default_value_t = 5)]
        max_edges: usize,
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
    },
    /// Fundamental group of a graph of groups or a polysimplicial set.
    Pi1 {
        #[arg(long)]
        input: PathBuf,
    },
    /// Abelianized fundamental group of a graph of groups, two ways.
    Abelianize {
        #[arg(long)]
        input: PathBuf,
    },
    /// Bounded integrality and saturation checks for a monoid morphism.
    SaturationCheck {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Kummer test for a monoid morphism.
    KummerCheck {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
        #[arg(long, value_delimiter = ',')]
        all_primes_except: Vec<u64>,
    },
    /// Faces and saturation of an affine monoid.
    Faces {
        #[arg(long)]
        input: PathBuf,
    },
    /// Covers of a graph up to the given degree.
    CoverEnum {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
    },
    /// Current group with an explicit basis.
    CurrentGroup {
        #[arg(long)]
        input: PathBuf,
        /// "Z" or "Z/n".
        #[arg(long)]
        ring: Option<String>,
    },
    /// Cospecialization map of strata posets, with an optional composition check.
    Cospec {
        #[arg(long)]
        input: PathBuf,
    },
    /// Group extension from an automorphism family and a cocycle.
    Schreier {
        #[arg(long)]
        input: PathBuf,
    },
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::SplitRadius { p, h, v } => commands::split_radius(*p, *h, v),
        Command::TateIntervals { p, v, n, l, m } => commands::tate(*p, v, *n, *l, *m),
        Command::TateSweep => commands::tate_sweep(),
        Command::VerifyRigidity { input, max_degree } => {
            commands::verify_rigidity(input, *max_degree)
        }
        Command::RigiditySweep {
            max_vertices,
            max_edges,
            max_degree,
        } => commands::rigidity_sweep(*max_vertices, *max_edges, *max_degree),
        Command::Pi1 { input } => commands::pi1(input),
        Command::Abelianize { input } => commands::abelianize(input),
        Command::SaturationCheck {
            input,
            primes,
            bound,
        } => commands::saturation_check(input, primes, *bound),
        Command::KummerCheck {
            input,
            primes,
            all_primes_except,
        } => commands::kummer_check(input, primes, all_primes_except),
        Command::Faces { input } => commands::faces_cmd(input),
        Command::CoverEnum { input, max_degree } => commands::cover_enum(input, *max_degree),
        Command::CurrentGroup { input, ring } => {
            commands::current_group_cmd(input, ring.as_deref())
        }
        Command::Cospec { input } => commands::cospec_cmd(input),
        Command::Schreier { input } => commands::schreier(input),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            let text = if cli.machine {
                serde_json::to_string_pretty(&report.json).expect("json values serialize") + "\n"
            } else {
                report.lines.join("\n") + "\n"
            };
            if out.write_all(text.as_bytes()).is_err() {
                return ExitCode::from(2);
            }
            if report.holds {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
