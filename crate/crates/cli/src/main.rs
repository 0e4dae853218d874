mod commands;
mod fail;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use semiconf::convergence::Method;
use semiconf::Mode;

#[derive(Parser, Debug)]
#[command(name = "semiconf", version)]
#[command(about = "Semi-conformal maps from power-series solutions of the ansatz equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve for the coefficient triangle from boundary data
    Solve(SolveArgs),
    /// Evaluate phi on a point grid
    Eval(EvalArgs),
    /// Semi-conformality and harmonicity residuals on a point grid
    Verify(VerifyArgs),
    /// Estimate the radius of convergence in u at z = 0
    Radius(RadiusArgs),
    /// Run the coefficient identity suite
    Identities(IdentitiesArgs),
    /// Sample the fibre circle of phi = eta
    Fibres(FibresArgs),
    /// Compare a closed-form family with its truncated series
    Compare(CompareArgs),
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Boundary data JSON: {"q": 0|1, "order": N, "data": [[re, im], ...]}
    #[arg(long)]
    pub input: PathBuf,
    /// Coefficient file to write
    #[arg(long)]
    pub out: PathBuf,
    /// Truncation order; overrides the order in the input file
    #[arg(long)]
    pub order: Option<usize>,
    /// Scalar mode; inferred from the data when omitted
    #[arg(long)]
    pub mode: Option<Mode>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Coefficient file written by `solve`
    #[arg(long)]
    pub input: PathBuf,
    /// CSV with header x,y,z
    #[arg(long)]
    pub grid: PathBuf,
    /// CSV output x,y,z,re,im; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Coefficient file written by `solve`
    #[arg(long)]
    pub input: PathBuf,
    /// CSV with header x,y,z
    #[arg(long)]
    pub grid: PathBuf,
    /// JSON report; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Threshold on the largest semi-conformality residual
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Finite-difference step for the cross-check
    #[arg(long, default_value_t = 1e-5)]
    pub fd_step: f64,
}

/// A solution family, from a JSON file or from flags.
#[derive(Args, Debug)]
pub struct FamilyArgs {
    /// Family JSON: {"family": "q0"|"q1"|"two_param"|"hopf"|"product", "c": [re, im], ...}
    #[arg(long, conflicts_with = "family")]
    pub input: Option<PathBuf>,
    /// Family name: q0, q1, two_param, hopf, product
    #[arg(long)]
    pub family: Option<String>,
    /// Parameter c as re,im
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    /// Parameter alpha as re,im
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Parameter beta as re,im
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// Parameter b of the product family as re,im
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
}

#[derive(Args, Debug)]
pub struct RadiusArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 60)]
    pub order: usize,
    #[arg(long, default_value = "float")]
    pub mode: Mode,
    /// ratio or root
    #[arg(long, default_value = "ratio")]
    pub method: Method,
    /// JSON report; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct IdentitiesArgs {
    /// Common upper index for every check; per-check defaults when omitted
    #[arg(long)]
    pub kmax: Option<usize>,
    /// JSON report; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Test hook: perturb the first comparison of the named check
    #[arg(long)]
    pub inject_fault: Option<String>,
}

#[derive(Args, Debug)]
pub struct FibresArgs {
    /// alpha as re,im
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    /// Fibre value eta as re,im
    #[arg(long, allow_hyphen_values = true)]
    pub eta: String,
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    /// CSV output x,y,z,theta
    #[arg(long)]
    pub out: PathBuf,
    /// JSON header file; stdout when omitted
    #[arg(long)]
    pub header: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 30)]
    pub order: usize,
    #[arg(long, default_value = "exact")]
    pub mode: Mode,
    /// CSV with header x,y,z; a (u, z) box is used when omitted
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// Box half-width in u
    #[arg(long, default_value_t = 0.2)]
    pub umax: f64,
    /// Box half-width in z
    #[arg(long, default_value_t = 0.2)]
    pub zmax: f64,
    /// Points per box side
    #[arg(long, default_value_t = 21)]
    pub steps: usize,
    /// JSON report; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                fail::Code::Input.into()
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let res = match &cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Eval(a) => commands::eval(a),
        Command::Verify(a) => commands::verify(a),
        Command::Radius(a) => commands::radius(a),
        Command::Identities(a) => commands::identities(a),
        Command::Fibres(a) => commands::fibres(a),
        Command::Compare(a) => commands::compare(a),
    };
    match res {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {f}");
            f.code.into()
        }
    }
}
