use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dfn_osm_cli::{execute, plot_file, CliError, ExperimentKind, PlotSpec, RunRequest};

#[derive(Parser)]
#[command(name = "dfn-osm", version, about = "Schwarz iteration analysis on staircase fracture networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral radius against the number of fractures.
    SweepN(RunArgs),
    /// Spectral radius against a uniform Robin parameter.
    SweepP(RunArgs),
    /// Spectral radius per Fourier mode.
    SweepMode(RunArgs),
    /// Min-max Robin parameter by equioscillation.
    Optimize(RunArgs),
    /// Discrete Schwarz iteration against the matrix prediction.
    OsmValidate(RunArgs),
    /// Line chart of CSV columns.
    Plot(PlotArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Also write M, N and T of the configured operator as CSV.
    #[arg(long)]
    dump_matrices: bool,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    csv: PathBuf,
    #[arg(long)]
    x: String,
    /// Comma-separated y columns.
    #[arg(long, value_delimiter = ',', required = true)]
    y: Vec<String>,
    #[arg(long)]
    log_x: bool,
    #[arg(long)]
    log_y: bool,
    #[arg(long, default_value = "")]
    title: String,
    #[arg(long)]
    out: PathBuf,
}

fn run_experiment(kind: ExperimentKind, args: RunArgs) -> Result<(), CliError> {
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::Validation("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(format!("--threads: {e}")))?;
    }
    let config_text = std::fs::read_to_string(&args.config).map_err(|source| CliError::Io {
        path: args.config.clone(),
        source,
    })?;
    let written = execute(&RunRequest {
        kind,
        config_text,
        out_dir: args.out,
        seed: args.seed,
        dump_matrices: args.dump_matrices,
    })?;
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::SweepN(a) => run_experiment(ExperimentKind::SweepN, a),
        Command::SweepP(a) => run_experiment(ExperimentKind::SweepP, a),
        Command::SweepMode(a) => run_experiment(ExperimentKind::SweepMode, a),
        Command::Optimize(a) => run_experiment(ExperimentKind::Optimize, a),
        Command::OsmValidate(a) => run_experiment(ExperimentKind::OsmValidate, a),
        Command::Plot(a) => {
            let ys: Vec<&str> = a.y.iter().map(String::as_str).collect();
            plot_file(&a.csv, &PlotSpec::new(&a.title, &a.x, &ys, a.log_x, a.log_y), &a.out)?;
            println!("{}", a.out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dfn-osm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
