mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Affine integration logic over finite charged metric structures.
#[derive(Debug, Parser)]
#[command(name = "alint", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Signature file (`.alsig`); otherwise the one embedded in the inputs.
    #[arg(long, global = true, value_name = "FILE")]
    pub signature: Option<PathBuf>,
    /// Largest raw product an ultramean may expand. Overrides AL_PRODUCT_CAP.
    #[arg(long, global = true, value_name = "N")]
    pub product_cap: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check structures against the structural axioms.
    Validate {
        #[arg(required = true)]
        structures: Vec<PathBuf>,
        /// Accept total charge in [0,1] instead of exactly 1.
        #[arg(long)]
        mass_le_one: bool,
        /// Accept distinct points at distance 0.
        #[arg(long)]
        pseudometric: bool,
    },
    /// Evaluate a formula at an assignment.
    Eval {
        #[arg(long, value_name = "FILE")]
        structure: PathBuf,
        #[arg(long)]
        formula: String,
        /// `var=point`, where point is an index or a label. Repeatable or
        /// comma-separated; commas inside parentheses belong to the label.
        #[arg(long, value_name = "VAR=POINT")]
        at: Vec<String>,
        /// Also print every evaluable subformula.
        #[arg(long)]
        trace: bool,
    },
    /// Check a theory (`.alth`) in a structure under all assignments.
    Check {
        #[arg(long, value_name = "FILE")]
        structure: PathBuf,
        #[arg(long, value_name = "FILE")]
        theory: PathBuf,
    },
    /// Build the ultramean of structures over finitely many weights.
    Ultramean {
        #[arg(long, value_name = "FILE")]
        weights: PathBuf,
        #[arg(required = true)]
        structures: Vec<PathBuf>,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Build the ultramean of copies of one structure.
    Powermean {
        #[arg(long, value_name = "FILE")]
        weights: PathBuf,
        structure: PathBuf,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Compare ultramean values with weighted factor values.
    VerifyLos {
        #[arg(long, value_name = "FILE")]
        weights: PathBuf,
        #[arg(required = true)]
        structures: Vec<PathBuf>,
        /// Formula list (`.alf`); otherwise all formulas up to --depth.
        #[arg(long, value_name = "FILE")]
        formulas: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, value_delimiter = ',', default_value = "x,y")]
        vars: Vec<String>,
    },
    /// Check a proof script (`.alpf`) and probe it on models.
    CheckProof {
        proof: PathBuf,
        /// Directory of `.alstr` models for the soundness probe.
        #[arg(long, value_name = "DIR")]
        models: Option<PathBuf>,
        /// Also probe this many generated models.
        #[arg(long, value_name = "N", requires = "seed")]
        random_models: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Find weights whose ultramean satisfies a sentence theory.
    SolveMixture {
        #[arg(long, value_name = "DIR")]
        models: PathBuf,
        #[arg(long, value_name = "FILE")]
        theory: PathBuf,
        #[arg(long, value_name = "FILE")]
        weights_out: Option<PathBuf>,
    },
    /// Compare the two orders of a double integral.
    CheckFubini {
        #[arg(long, value_name = "FILE")]
        structure: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long, default_value = "x")]
        x: String,
        #[arg(long, default_value = "y")]
        y: String,
        /// Fix the remaining variables; otherwise every assignment is tried.
        #[arg(long, value_name = "VAR=POINT")]
        at: Vec<String>,
    },
    /// Tabulate the type realized by a tuple.
    TypeOf {
        #[arg(long, value_name = "FILE")]
        structure: PathBuf,
        #[arg(long, value_name = "VAR=POINT", required = true)]
        at: Vec<String>,
        /// Formula family (`.alf`); otherwise all formulas up to --depth.
        #[arg(long, value_name = "FILE")]
        formulas: Option<PathBuf>,
        #[arg(long)]
        depth: usize,
        /// Report the type distance to this tuple (points in --at order).
        #[arg(long)]
        compare: Vec<String>,
    },
    /// Check that a map preserves every formula up to a depth.
    ElemCheck {
        #[arg(long, value_name = "FILE")]
        source: PathBuf,
        #[arg(long, value_name = "FILE")]
        target: PathBuf,
        /// Image of each source point, in order; defaults to the identity.
        #[arg(long)]
        map: Vec<String>,
        #[arg(long)]
        depth: usize,
        #[arg(long, value_delimiter = ',', default_value = "x,y")]
        vars: Vec<String>,
        #[arg(long, default_value_t = 50_000_000)]
        budget: u128,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = commands::run(&cli);
    match outcome {
        Ok(report) => {
            print!("{}", report.text);
            ExitCode::from(report.status as u8)
        }
        Err(e) => {
            eprintln!("alint: {e}");
            ExitCode::from(2)
        }
    }
}
