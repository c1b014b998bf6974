use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use koszul_lab::bigraded::Window;
use koszul_lab::cli::problem;
use koszul_lab::cli::run::{run, Command, Flags, Format};

/// Exact Koszul-duality computations for dg-modules over Sym(𝒳).
#[derive(Parser, Debug)]
#[command(name = "koszul-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Problem file (JSON).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Module name: one from the problem file, or T, S, R, k, Tdual, K1, K2.
    #[arg(long, global = true)]
    module: Option<String>,
    /// Internal-degree window "jmin:jmax", overriding the problem's.
    #[arg(long, global = true, allow_hyphen_values = true)]
    window: Option<Window>,
    /// table, json or csv.
    #[arg(long, global = true, default_value = "table")]
    format: Format,
    /// Suite name for verify, or "all".
    #[arg(long, global = true)]
    suite: Option<String>,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Parse and validate the problem file.
    Check,
    /// Cohomology table of a module.
    Cohomology,
    /// κ of a 𝒯-module or κ⁻¹ of an ℛ-module.
    Dual,
    /// Semi-free resolution summary.
    Resolve,
    /// Both sides of the derived-intersection exchange for a setup.
    Intersect,
    /// Verification suites.
    Verify,
    /// Chain-level dimensions of a module, or of 𝒯.
    Hilbert,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Check => Command::Check,
            Cmd::Cohomology => Command::Cohomology,
            Cmd::Dual => Command::Dual,
            Cmd::Resolve => Command::Resolve,
            Cmd::Intersect => Command::Intersect,
            Cmd::Verify => Command::Verify,
            Cmd::Hilbert => Command::Hilbert,
        }
    }
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("KOSZUL_LAB_THREADS") {
        let n: usize = v.parse().with_context(|| format!("KOSZUL_LAB_THREADS={v} is not a count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    init_threads()?;
    let problem = match &cli.input {
        Some(path) => Some(problem::parse(path).with_context(|| format!("reading {}", path.display()))?),
        None => None,
    };
    let flags = Flags {
        module: cli.module.clone(),
        window: cli.window,
        suite: cli.suite.clone(),
        seed: cli.seed,
    };
    let outcome = run(cli.command.into(), problem.as_ref(), &flags)?;
    print!("{}", outcome.render(cli.format));
    if outcome.pass {
        return Ok(ExitCode::SUCCESS);
    }
    eprintln!("{}", serde_json::json!({ "failures": outcome.failures }));
    Ok(ExitCode::FAILURE)
}
