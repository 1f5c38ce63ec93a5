mod eval;
mod report;
mod suites;
mod values;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypcos_core::Error;

use report::Format;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numeric() => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "usage: {s}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "hypcos", version, about = "Multiprecision hypergeometric and Ramanujan cosine-integral evaluator")]
struct Cli {
    #[command(flatten)]
    cfg: GlobalArgs,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalArgs {
    /// Significant decimal digits (at least 16).
    #[arg(long, global = true, env = "HYPCOS_DIGITS", default_value_t = 50,
          value_parser = clap::value_parser!(u32).range(16..))]
    digits: u32,
    /// Absolute accuracy target for series evaluations.
    #[arg(long, global = true, default_value = "1e-12")]
    tolerance: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    output: Format,
    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a single function.
    Eval {
        #[command(subcommand)]
        kind: eval::EvalKind,
    },
    /// Run a verification suite; exit 1 if any row fails.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// n values for the reciprocity suite.
        #[arg(long, default_value = "1/2,1,2")]
        n: String,
    },
    /// Grid of R_C(m, n) with per-cell tail bounds.
    Table {
        #[arg(long, default_value = "0,1,2")]
        m: String,
        #[arg(long, default_value = "1/2,1,2")]
        n: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    ClosedForms,
    Identities,
    Reciprocity,
    Oracle,
    All,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub digits: u32,
    pub tolerance: f64,
    pub tolerance_text: String,
    pub seed: u64,
    pub jobs: usize,
}

impl RunConfig {
    fn from_args(a: &GlobalArgs) -> Result<Self, CliError> {
        let tol = values::exact(&a.tolerance)?.to_f64();
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::Usage(format!("tolerance {} must be positive", a.tolerance)));
        }
        let jobs = match a.jobs {
            Some(j) => j as usize,
            None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        };
        Ok(Self { digits: a.digits, tolerance: tol, tolerance_text: a.tolerance.clone(), seed: a.seed, jobs })
    }

    /// Runs `f` over `items` on the configured pool; output order follows
    /// input order regardless of scheduling.
    pub fn map<T: Sync, R: Send>(&self, items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new().num_threads(self.jobs).build().expect("thread pool");
        pool.install(|| items.par_iter().map(&f).collect())
    }
}

fn run(cli: Cli) -> Result<(report::Report, bool), CliError> {
    let cfg = RunConfig::from_args(&cli.cfg)?;
    match cli.cmd {
        Command::Eval { kind } => Ok((eval::run(&kind, &cfg)?, false)),
        Command::Verify { suite, n } => Ok((suites::verify(suite, &n, &cfg)?, true)),
        Command::Table { m, n } => Ok((suites::table(&m, &n, &cfg)?, true)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.cfg.output;
    match run(cli) {
        Ok((rep, checked)) => {
            print!("{}", rep.render(format));
            if checked && !rep.all_pass() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
