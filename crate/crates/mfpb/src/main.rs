use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mfpb::commands::{self, ToyFormat, TrainArgs};
use mfpb::Result;
use mfpb_core::eval::SynthParams;
use mfpb_core::Mode;

#[derive(Parser)]
#[command(name = "mfpb", version, about = "Fairness-aware boosting with Pareto-based model selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    MultiFair,
    Vanilla,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Table,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Train, extract the Pareto front, select by preference, write model.json and bundle.json.
    Train {
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 500)]
        rounds: usize,
        #[arg(long, value_enum, default_value = "multi-fair")]
        mode: ModeArg,
        /// Preference over (error, class balance, fairness), e.g. 0.43,0.3,0.27.
        #[arg(long, default_value = "1,1,1", allow_hyphen_values = true)]
        preference: String,
        #[arg(long, default_value_t = 0.5)]
        test_fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ignore the first R rounds when building the front.
        #[arg(long, default_value_t = 0)]
        burn_in: usize,
        /// Score the per-round objectives on this fraction of the training
        /// part, held out from stump fitting.
        #[arg(long)]
        objective_holdout: Option<f64>,
        #[arg(long, default_value = ".")]
        output_dir: PathBuf,
    },
    /// Re-select on a stored bundle and update its `selected` field.
    Select {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        preference: String,
    },
    /// Fairness and performance report for external predictions.
    Audit {
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Four-classifier example table with its ordering checks.
    Toy {
        #[arg(long, value_enum, default_value = "table")]
        format: FormatArg,
    },
    /// Write a synthetic group-biased dataset and its schema.
    Synth {
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 0.25)]
        imbalance_ratio: f64,
        #[arg(long, default_value_t = 0.4)]
        bias: f64,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = ".")]
        output_dir: PathBuf,
    },
    /// Write selection test vectors for a bundle.
    Golden {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    mfpb::init_threads()?;
    match cli.command {
        Command::Train {
            schema,
            data,
            rounds,
            mode,
            preference,
            test_fraction,
            seed,
            burn_in,
            objective_holdout,
            output_dir,
        } => {
            let args = TrainArgs {
                schema,
                data,
                rounds,
                mode: match mode {
                    ModeArg::MultiFair => Mode::MultiFair,
                    ModeArg::Vanilla => Mode::Vanilla,
                },
                preference: commands::parse_preference(&preference)?,
                test_fraction,
                seed,
                burn_in,
                objective_holdout,
                output_dir,
            };
            commands::train(&args, out).map(drop)
        }
        Command::Select { bundle, preference } => {
            commands::select(&bundle, &commands::parse_preference(&preference)?, out).map(drop)
        }
        Command::Audit { predictions, schema, data } => commands::audit(&predictions, &schema, &data, out).map(drop),
        Command::Toy { format } => {
            let format = match format {
                FormatArg::Table => ToyFormat::Table,
                FormatArg::Json => ToyFormat::Json,
            };
            commands::toy(format, out).map(drop)
        }
        Command::Synth { n, imbalance_ratio, bias, k, seed, output_dir } => {
            let params = SynthParams { n, imbalance_ratio, bias_strength: bias, k_attrs: k, seed };
            commands::synth(params, &output_dir, out)
        }
        Command::Golden { bundle, count, seed, output } => {
            commands::golden(&bundle, count, seed, &output, out).map(drop)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
