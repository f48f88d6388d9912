use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use stabreg_cli::commands::{cmd_filters, cmd_generate, cmd_profiles, cmd_sweep, cmd_verify};
use stabreg_cli::config::{ExperimentConfig, Overrides};

#[derive(Parser)]
#[command(
    name = "stabreg",
    version,
    about = "Experiment runner for regularized least-squares solvers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the problem instance (matrix, data, solution, operator) to files
    Generate(CommonArgs),
    /// Tabulate error measures across the regularization-parameter grid
    Sweep(CommonArgs),
    /// Write componentwise solution/data profiles per parameter or dimension
    Profiles(CommonArgs),
    /// Tabulate the filter-factor families over a singular-value grid
    Filters(CommonArgs),
    /// Run the invariant suite and write a machine-readable report
    Verify(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file; any flag below overrides its field
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problem generator: shaw | heat | phillips | gravity
    #[arg(long)]
    problem: Option<String>,
    /// Problem dimension
    #[arg(long)]
    n: Option<usize>,
    /// Lower end of the regularization-parameter grid
    #[arg(long)]
    gamma_lo: Option<f64>,
    /// Upper end of the regularization-parameter grid
    #[arg(long)]
    gamma_hi: Option<f64>,
    /// Number of logarithmically spaced grid points
    #[arg(long)]
    gamma_count: Option<usize>,
    /// Explicit comma-separated parameter list, replacing the grid
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    gammas: Option<Vec<f64>>,
    /// Perturbation kind: none | white | filtered | smoothing
    #[arg(long)]
    noise: Option<String>,
    /// Perturbation magnitude
    #[arg(long)]
    eta: Option<f64>,
    /// RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// Penalty anchor: zero | exact
    #[arg(long)]
    g_mode: Option<String>,
    /// Regularization operator order: 0 | 1 | 2
    #[arg(long)]
    operator: Option<u8>,
    /// Comma-separated subset of tikhonov,stabreg
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    methods: Option<Vec<String>>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker-thread count for the parameter fan-out
    #[arg(long)]
    workers: Option<usize>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            problem: self.problem.clone(),
            n: self.n,
            gamma_lo: self.gamma_lo,
            gamma_hi: self.gamma_hi,
            gamma_count: self.gamma_count,
            gammas: self.gammas.clone(),
            noise: self.noise.clone(),
            eta: self.eta,
            seed: self.seed,
            g_mode: self.g_mode.clone(),
            operator: self.operator,
            methods: self.methods.clone(),
            out: self.out.clone(),
            workers: self.workers,
        }
    }

    fn load_config(&self) -> stabreg_cli::Result<ExperimentConfig> {
        ExperimentConfig::load(self.config.as_deref(), &self.overrides())
    }
}

fn run(command: &Command) -> stabreg_cli::Result<()> {
    match command {
        Command::Generate(args) => cmd_generate(&args.load_config()?),
        Command::Sweep(args) => cmd_sweep(&args.load_config()?),
        Command::Profiles(args) => cmd_profiles(&args.load_config()?),
        Command::Filters(args) => cmd_filters(&args.load_config()?),
        Command::Verify(args) => cmd_verify(&args.load_config()?),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version render with exit 0; genuine argument errors
            // follow the validation exit code
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(&cli.command) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
