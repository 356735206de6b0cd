use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

/// Isoperimetric profiles, perimeters and symmetrizations in Grushin spaces
/// and H-type groups.
#[derive(Debug, Parser)]
#[command(name = "isoperim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Shoot for the isoperimetric profile; comma lists sweep all tuples.
    Solve(SolveArgs),
    /// Perimeter, volume and isoperimetric ratio of a profile CSV or grid JSON.
    Measure(MeasureArgs),
    /// Symmetrize a grid set and print the stage trace.
    Rearrange(RearrangeArgs),
    /// Validate an H-type structure or compute an H-perimeter.
    Htype {
        #[command(subcommand)]
        action: HtypeAction,
    },
    /// Run the seeded invariant suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct ParamArgs {
    #[arg(long)]
    h: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    h: Vec<u32>,
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<u32>,
    #[arg(long, value_delimiter = ',', required = true)]
    alpha: Vec<f64>,
    /// Directory for `solve_h{h}_k{k}_a{alpha}.{json,csv}`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative bisection tolerance on C.
    #[arg(long, default_value_t = 1e-15)]
    tol_c: f64,
    /// Relative local error tolerance of the integrator.
    #[arg(long, default_value_t = 1e-12)]
    tol_step: f64,
    /// Initial bracket `LO,HI` for C; defaults to `[h/4, 4h]`.
    #[arg(long, value_delimiter = ',', num_args = 1, value_name = "LO,HI")]
    bracket: Option<Vec<f64>>,
    /// Nodes of the written profile.
    #[arg(long, default_value_t = 201)]
    nodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    /// Profile CSV (`r,f[,fp]`) or grid JSON.
    input: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    /// Apply `delta_lambda` before measuring.
    #[arg(long, default_value_t = 1.0)]
    dilate: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct RearrangeArgs {
    /// Grid JSON.
    input: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    /// Where to write the rearranged grid JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum HtypeAction {
    /// Check `J_Y^2 = -|Y|^2 I`; exits 3 when the structure is not H-type.
    Validate {
        structure: PathBuf,
        #[arg(long, default_value_t = isoperim::htype::DEFAULT_HTYPE_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// H-perimeter of the set generated by a profile CSV.
    Perimeter {
        structure: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// One of spaces, measures, htype, rearrange, profileode, all.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(commands::EXIT_INPUT) } else { ExitCode::SUCCESS };
        }
    };
    let result = commands::init_threads().and_then(|_| match cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Measure(a) => commands::measure(a),
        Command::Rearrange(a) => commands::rearrange(a),
        Command::Htype { action } => commands::htype(action),
        Command::Verify(a) => commands::verify(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
