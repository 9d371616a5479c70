use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pdla::harness::{self, parse_matrix_csv, DatasetSource, ExperimentConfig, HarnessError};
use pdla::mapca;

#[derive(Parser)]
#[command(
    name = "pdla",
    version,
    about = "Deviant-learning predictive classification experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// DLA recall vs LSTM baseline on a labeled set
    Exp1(RunArgs),
    /// Skip-sequence sweep
    Exp2(RunArgs),
    /// Learning-extent sweep
    Exp3(RunArgs),
    /// Score a prediction matrix against observations
    Mapca {
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        yhat: PathBuf,
        #[arg(long)]
        tol: f64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: results/exp<N>)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG chart per trend series
    #[arg(long)]
    svg: bool,
    /// `bundled`, `synth`, or a CSV path
    #[arg(long)]
    dataset: Option<String>,
}

impl RunArgs {
    fn resolve(&self, experiment: u8) -> Result<(ExperimentConfig, PathBuf), HarnessError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(d) = &self.dataset {
            cfg.dataset = Some(DatasetSource::parse(d));
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        let dir = cfg
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("results/exp{experiment}")));
        Ok((cfg, dir))
    }
}

fn read(path: &PathBuf) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Exp1(args) => {
            let (cfg, dir) = args.resolve(1)?;
            let report = harness::run_experiment1(&cfg)?;
            harness::write_experiment1(&report, &cfg, &dir)?;
            print!("{}", report.to_text());
        }
        Command::Exp2(args) => {
            let (cfg, dir) = args.resolve(2)?;
            let outcome = harness::run_experiment2(&cfg)?;
            harness::write_sweep(&outcome, &cfg, &dir, args.svg)?;
            print!("{}", outcome.report.to_csv());
        }
        Command::Exp3(args) => {
            let (cfg, dir) = args.resolve(3)?;
            let outcome = harness::run_experiment3(&cfg)?;
            harness::write_sweep(&outcome, &cfg, &dir, args.svg)?;
            print!("{}", outcome.report.to_csv());
        }
        Command::Mapca { y, yhat, tol } => {
            let y = parse_matrix_csv(&read(&y)?)?;
            let yhat = parse_matrix_csv(&read(&yhat)?)?;
            let r = mapca(&y, &yhat, tol)?;
            println!(
                "MAPCA {:.4}% ({}/{} within tol {})",
                r.accuracy_percent, r.hits, r.n_z, r.tol
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
