use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qplab::io::{MatrixJson, PointJson};
use qplab::jobs::{run, Command, JobError, JobSpec};

#[derive(Parser)]
#[command(name = "qplab", version, about = "Experiments with pencils of quadrics")]
struct Cli {
    /// Run a job description instead of a subcommand.
    #[arg(long, value_name = "FILE")]
    job: Option<PathBuf>,
    /// Also write the report to this file.
    #[arg(long, value_name = "FILE", global = true)]
    json_out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Option<Cmd>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Pencil data.
    Pencil {
        #[command(subcommand)]
        cmd: PencilCmd,
    },
    /// Sample a point of X (or Y with --on-y).
    Sample(Common),
    /// Evaluate the fibration on a point and covector.
    Phi(Common),
    /// Restricted determinant form of a point and covector.
    Fh(Common),
    /// Bundle computations.
    Bundle {
        #[command(subcommand)]
        cmd: BundleCmd,
    },
    /// Skew-symmetric map invariants.
    Skew {
        #[command(subcommand)]
        cmd: SkewCmd,
    },
    /// Normalized kernel vector of the power matrix.
    Vandermonde(Common),
    /// Seeded verification runs.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
}

#[derive(Subcommand)]
enum PencilCmd {
    Info(Common),
}

#[derive(Subcommand)]
enum BundleCmd {
    Splitting(Common),
}

#[derive(Subcommand)]
enum SkewCmd {
    Invariants {
        #[arg(long, value_name = "FILE")]
        matrix: PathBuf,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    Diagram(Common),
    Even(Common),
    Lagrangian(Common),
    All(Common),
}

#[derive(Args, Default)]
struct Common {
    /// Comma-separated pencil coefficients, e.g. `0,1,2,3,4,5`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambdas: Option<Vec<String>>,
    /// Genus; implies the coefficients 0, 1, ..., 2g+1.
    #[arg(long)]
    g: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    train: Option<usize>,
    #[arg(long)]
    holdout: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    fd_step: Option<f64>,
    #[arg(long)]
    budget: Option<usize>,
    /// Sample on Y and restrict covectors accordingly.
    #[arg(long)]
    on_y: bool,
    /// Exact arithmetic (default).
    #[arg(long, conflicts_with = "float")]
    exact: bool,
    /// Floating-point arithmetic.
    #[arg(long)]
    float: bool,
    /// Point file; may carry a covector.
    #[arg(long, value_name = "FILE")]
    point: Option<PathBuf>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, JobError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| JobError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| JobError::Input(format!("{}: {e}", path.display())))
}

fn spec_from(command: Command, c: Common) -> Result<JobSpec, JobError> {
    let mut s = JobSpec::new(command);
    s.lambdas = c.lambdas;
    s.g = c.g;
    s.seed = c.seed;
    s.tol = c.tol;
    s.train = c.train;
    s.holdout = c.holdout;
    s.samples = c.samples;
    s.fd_step = c.fd_step;
    s.budget = c.budget;
    s.on_y = c.on_y;
    s.float = c.float && !c.exact;
    s.point = c.point.as_deref().map(read_json::<PointJson>).transpose()?;
    Ok(s)
}

fn job(cli: Cli) -> Result<JobSpec, JobError> {
    if let Some(path) = cli.job {
        if cli.cmd.is_some() {
            return Err(JobError::Input("--job cannot be combined with a subcommand".into()));
        }
        return read_json(&path);
    }
    let Some(cmd) = cli.cmd else {
        return Err(JobError::Input("expected a subcommand or --job".into()));
    };
    match cmd {
        Cmd::Pencil { cmd: PencilCmd::Info(c) } => spec_from(Command::PencilInfo, c),
        Cmd::Sample(c) => spec_from(Command::Sample, c),
        Cmd::Phi(c) => spec_from(Command::Phi, c),
        Cmd::Fh(c) => spec_from(Command::Fh, c),
        Cmd::Bundle { cmd: BundleCmd::Splitting(c) } => spec_from(Command::BundleSplitting, c),
        Cmd::Skew { cmd: SkewCmd::Invariants { matrix } } => {
            let mut s = JobSpec::new(Command::SkewInvariants);
            s.matrix = Some(read_json::<MatrixJson>(&matrix)?);
            Ok(s)
        }
        Cmd::Vandermonde(c) => spec_from(Command::Vandermonde, c),
        Cmd::Verify { cmd } => match cmd {
            VerifyCmd::Diagram(c) => spec_from(Command::VerifyDiagram, c),
            VerifyCmd::Even(c) => spec_from(Command::VerifyEven, c),
            VerifyCmd::Lagrangian(c) => spec_from(Command::VerifyLagrangian, c),
            VerifyCmd::All(c) => spec_from(Command::VerifyAll, c),
        },
    }
}

fn configure_threads() -> Result<(), JobError> {
    let Ok(v) = std::env::var("QPLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| JobError::Input(format!("QPLAB_THREADS: not a number: {v}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| JobError::Internal(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let out = cli.json_out.clone();
    let result = configure_threads().and_then(|_| job(cli)).and_then(|s| run(&s));
    match result {
        Ok(report) => {
            let text = report.to_json_string();
            println!("{text}");
            if let Some(path) = out {
                if let Err(e) = std::fs::write(&path, format!("{text}\n")) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
