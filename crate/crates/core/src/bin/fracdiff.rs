use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use fracdiff::cli::{parse_config, run, ExperimentConfig, PresetName};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Preset {
    Table1,
    Table2,
    Table3,
    Oracle,
}

/// Convergence studies for time-fractional diffusion with a time-dependent coefficient.
#[derive(Debug, Parser)]
#[command(name = "fracdiff", version)]
struct Args {
    /// Experiment configuration file (`key = value` lines).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Run a built-in study.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Override the set of fractional orders (comma separated).
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// CSV destination; overrides `output` in the config.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn load(args: &Args) -> fracdiff::Result<ExperimentConfig> {
    let mut config = match (&args.config, args.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|source| fracdiff::Error::Io {
                path: path.clone(),
                source,
            })?;
            parse_config(&text)?
        }
        (None, Some(p)) => ExperimentConfig::preset(match p {
            Preset::Table1 => PresetName::Table1,
            Preset::Table2 => PresetName::Table2,
            Preset::Table3 => PresetName::Table3,
            Preset::Oracle => PresetName::Oracle,
        }),
        // Falls through to the parser's own "preset required" message.
        (None, None) => parse_config("")?,
    };
    if let Some(alphas) = &args.alpha {
        if let Some(&a) = alphas.iter().find(|&&a| !(a > 0.0 && a <= 1.0)) {
            return Err(fracdiff::Error::InvalidArgument(format!(
                "alpha must lie in (0,1], got {a}"
            )));
        }
        config.alphas = alphas.clone();
    }
    if let Some(out) = &args.output {
        config.output = Some(out.clone());
    }
    Ok(config)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = load(&args).and_then(|config| run(&config));
    match result {
        Ok(report) => {
            print!("{}", report.console);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
