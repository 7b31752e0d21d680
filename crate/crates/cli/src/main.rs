use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use laserphm_cli::commands::{write_diagnosis, DIAGNOSIS_NAME};
use laserphm_cli::{
    diagnose, evaluate, generate, preprocess, train, CliError, DiagnoseInputs, RunConfig,
};

/// Laser diode fault detection and remaining-useful-life prediction.
#[derive(Debug, Parser)]
#[command(name = "laserphm", version)]
struct Cli {
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the base output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate run-to-failure sequences for every mode.
    Generate,
    /// Write the model input windows of the generated data.
    Preprocess,
    /// Train the fault detector and both RUL regressors.
    Train,
    /// Score the trained models on the held-out windows.
    Evaluate,
    /// Generate, preprocess, train and evaluate in one go.
    Pipeline,
    /// Diagnose one sequence from a sequence CSV.
    Diagnose {
        /// Sequence CSV in the generator's format.
        #[arg(long)]
        input: PathBuf,
        /// Sequence id; required when the file holds several.
        #[arg(long)]
        id: Option<u64>,
        #[arg(long)]
        detector: Option<PathBuf>,
        #[arg(long)]
        rul_sudden: Option<PathBuf>,
        #[arg(long)]
        rul_gradual: Option<PathBuf>,
        /// Where to write the JSON record; defaults to the report directory.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg = cfg.with_seed(seed);
    }
    if let Some(out) = cli.out {
        cfg = cfg.with_out_dir(out);
    }
    cfg.validate()?;

    let do_generate = |cfg: &RunConfig| -> Result<(), CliError> {
        let s = generate(cfg)?;
        println!(
            "generated {} sequences ({} samples, seed {}) in {}",
            s.manifest.sequences,
            s.manifest.samples,
            s.manifest.seed,
            s.data_dir.display()
        );
        Ok(())
    };
    let do_train = |cfg: &RunConfig| -> Result<(), CliError> {
        let s = train(cfg)?;
        let last =
            |log: &laserphm::models::TrainingLog| log.last().map_or(f64::NAN, |r| r.holdout_metric);
        println!("detector holdout accuracy {:.4}", last(&s.detector));
        println!("rul-sudden holdout rmse {:.4}", last(&s.sudden));
        println!("rul-gradual holdout rmse {:.4}", last(&s.gradual));
        Ok(())
    };
    let do_evaluate = |cfg: &RunConfig| -> Result<(), CliError> {
        let report = evaluate(cfg)?;
        for (name, value) in report.metrics() {
            println!("{name} {value}");
        }
        Ok(())
    };

    match cli.command {
        Command::Generate => do_generate(&cfg),
        Command::Preprocess => {
            let n = preprocess(&cfg)?;
            println!("wrote {n} windows to {}", cfg.features_dir().display());
            Ok(())
        }
        Command::Train => do_train(&cfg),
        Command::Evaluate => do_evaluate(&cfg),
        Command::Pipeline => {
            do_generate(&cfg)?;
            preprocess(&cfg)?;
            do_train(&cfg)?;
            do_evaluate(&cfg)
        }
        Command::Diagnose {
            input,
            id,
            detector,
            rul_sudden,
            rul_gradual,
            output,
        } => {
            let mut inputs = DiagnoseInputs::from_config(&cfg, input, id);
            if let Some(p) = detector {
                inputs.detector = p;
            }
            if let Some(p) = rul_sudden {
                inputs.rul_sudden = p;
            }
            if let Some(p) = rul_gradual {
                inputs.rul_gradual = p;
            }
            let diagnosis = diagnose(&inputs)?;
            println!("{}", diagnosis.to_json());
            let path = output.unwrap_or_else(|| cfg.report_dir().join(DIAGNOSIS_NAME));
            write_diagnosis(&path, &diagnosis)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
