mod builtin;
mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use report::{render, Format, RunReport};

/// Exact rational cohomology of nilmanifold models and toral-rank
/// certificates.
#[derive(Parser, Debug)]
#[command(name = "sullivan", version)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, env = "SULLIVAN_FORMAT", value_enum, default_value = "json")]
    pub format: Format,

    /// Worker threads for degree-level parallelism (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Lift the limits of 24 generators and truncation degree 40.
    #[arg(long, global = true)]
    pub unsafe_large: bool,

    /// Leave `wall_time_ms` null so that reports are byte-stable.
    #[arg(long, global = true)]
    pub omit_timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

/// A model given either as a file in the `.cdga` format or as a builtin
/// name such as `xr:5`, `upper-tri:4` or `xr:5*xr:5`.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Path to a `.cdga` file.
    pub file: Option<PathBuf>,
    /// Builtin model: xr:R, upper-tri:N, torus:K, split:N,K, shift:N,K,
    /// upper-tri-lie:N, xr-lie:R; join with '*' for tensor products.
    #[arg(long)]
    pub builtin: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Betti numbers of a model.
    Cohomology {
        #[command(flatten)]
        source: Source,
        /// Also print a basis of cohomology representatives.
        #[arg(long)]
        representatives: bool,
        /// Truncation degree for models with even generators.
        #[arg(long)]
        truncate: Option<u32>,
        /// Kill the given odd generator with a new closed even generator `t`.
        #[arg(long, value_name = "GENERATOR")]
        twist: Option<String>,
    },
    /// Total Betti numbers of X_r against 2^r.
    Table1 {
        #[arg(long, default_value_t = 9)]
        max_r: usize,
    },
    /// Compare n! with 2^{d(n,k)}, or scan for the smallest n where it
    /// falls below.
    Trc {
        #[arg(long, required_unless_present = "scan_min", conflicts_with = "scan_min")]
        n: Option<usize>,
        /// Defaults to ceil(n/2) + 1.
        #[arg(long, requires = "n")]
        k: Option<usize>,
        #[arg(long)]
        scan_min: bool,
        #[arg(long, default_value_t = 60)]
        max_n: usize,
    },
    /// Exact ratios n!/2^{d(n,k)} over a range of n.
    Ratio {
        #[arg(long, default_value_t = 50)]
        from: usize,
        #[arg(long, default_value_t = 80)]
        to: usize,
    },
    /// Betti total of X_r, or of a product of X_r factors, against 2^r.
    Certificate {
        #[arg(long, required_unless_present = "product", conflicts_with = "product")]
        r: Option<usize>,
        /// Comma-separated factors, e.g. 5,5.
        #[arg(long, value_delimiter = ',')]
        product: Vec<usize>,
    },
    /// Split u(n) at off-diagonal k into base and fiber.
    Split {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Which degree-1 generators admit a principal torus twist.
    Obstruction {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        rank: usize,
        /// Restrict to these fiber generators (default: all of degree 1).
        #[arg(long, value_delimiter = ',')]
        fiber: Vec<String>,
    },
    /// Center of a nilpotent Lie algebra.
    Center {
        #[command(flatten)]
        source: Source,
    },
    /// Betti numbers of u(n) before and after regrading by kappa.
    Shift {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        kappa: u32,
    },
    /// Check that given elements form a basis of cohomology.
    VerifyClasses {
        #[command(flatten)]
        source: Source,
        /// File with one element per line.
        #[arg(long)]
        classes: Option<PathBuf>,
        /// An element, e.g. 'a*x1 - b*x2'; repeatable.
        #[arg(long = "class")]
        class: Vec<String>,
    },
    /// Print a builtin in the `.cdga` format.
    Export {
        #[arg(long)]
        builtin: String,
    },
}

/// Why a command did not produce a report.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or input; exit status 2.
    Usage(String),
    /// A consistency check inside the engine failed; exit status 3.
    Internal(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    let start = Instant::now();
    match commands::run(&cli) {
        Ok(commands::Done::Text(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Ok(commands::Done::Report(outcome)) => {
            let elapsed = (!cli.omit_timing).then(|| start.elapsed());
            let report = RunReport::new(argv[1..].to_vec(), &outcome, elapsed);
            print!("{}", render(cli.format, &report, &outcome.table));
            if outcome.violated {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Internal(m) => eprintln!("internal error: {m}"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}
