use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use transfer_risk::pipeline::{cmd_analyze, cmd_generate, cmd_report, cmd_run, PipelineConfig, Variant};
use transfer_risk::Error;

/// Hospital-transfer risk prediction on temporal patient-similarity graphs.
#[derive(Debug, Parser)]
#[command(name = "transfer-risk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic cohort (patients.csv, vitals.csv) to the output directory.
    Generate(Overrides),
    /// Train and evaluate one model variant on one day's risk set.
    Run(Overrides),
    /// Post-hoc LCC cluster analysis on the artifacts of a previous run.
    Analyze(Overrides),
    /// Tabulate every report found under the output directory.
    Report(Overrides),
}

/// Command-line values take precedence over the config file.
#[derive(Debug, Args)]
struct Overrides {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Prediction day T (uses the first T days of vitals).
    #[arg(long)]
    day: Option<u32>,
    /// knn-gcn, diffusion-gcn, diffusion-gcn-age, logistic or knn.
    #[arg(long)]
    variant: Option<Variant>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Overrides {
    fn load(&self) -> Result<PipelineConfig, Error> {
        let mut cfg = match &self.config {
            Some(p) => PipelineConfig::from_file(p)?,
            None => PipelineConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(d) = self.day {
            cfg.day = d;
        }
        if let Some(v) = self.variant {
            cfg.variant = v;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn dispatch(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Generate(o) => {
            let cfg = o.load()?;
            let table = cmd_generate(&cfg)?;
            print!("{table}");
        }
        Command::Run(o) => {
            let cfg = o.load()?;
            let r = cmd_run(&cfg)?;
            println!(
                "{} day {}: AUC {:.4}  SEN {:.4}  SPE {:.4}  (n_test {}, positives {}, best epoch {})",
                r.variant,
                r.day,
                r.eval.auc,
                r.eval.sensitivity,
                r.eval.specificity,
                r.n_test,
                r.eval.n_positive,
                r.best_epoch.map_or_else(|| "-".into(), |e| e.to_string())
            );
        }
        Command::Analyze(o) => {
            let cfg = o.load()?;
            let outcome = cmd_analyze(&cfg)?;
            if outcome.empty_high_risk {
                eprintln!("warning: the high-risk cluster is empty");
            }
            print!("{}", outcome.report.to_text());
        }
        Command::Report(o) => {
            let cfg = o.load()?;
            print!("{}", cmd_report(&cfg)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // malformed arguments count as a validation error
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
