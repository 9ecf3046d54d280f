//! `emofnd` command-line runner.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data or IO
//! error, 3 failed check.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use emofnd::eval::TableFormat;
use emofnd::{EmotionTaxonomy, Split, Variant};

#[derive(Debug, Parser)]
#[command(name = "emofnd", version, about = "Emotion-guided domain-adaptive fake news detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fill in document emotion labels with the lexicon annotator.
    Annotate(AnnotateArgs),
    /// Generate a synthetic source/target corpus pair plus a manifest.
    Gencorpus(GencorpusArgs),
    /// Train one model (grid search over alpha/beta unless both are fixed).
    Train(TrainCmdArgs),
    /// Report a checkpoint's accuracy on a labelled dataset.
    Eval(EvalArgs),
    /// Train and evaluate every (pair, variant, seed) cell and print a table.
    Matrix(MatrixArgs),
    /// Compare analytic gradients with central finite differences.
    Gradcheck(GradcheckArgs),
}

#[derive(Debug, Args)]
struct AnnotateArgs {
    /// Dataset JSON-lines file.
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    #[arg(long, default_value = "plutchik")]
    taxonomy: EmotionTaxonomy,
    /// Lexicon JSON-lines file (token, emotion, weight); defaults to the built-in seed lexicon.
    #[arg(long, value_name = "PATH")]
    lexicon: Option<PathBuf>,
    /// Re-annotate documents that already carry an emotion label.
    #[arg(long)]
    force: bool,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GencorpusArgs {
    /// Directory for <source>.jsonl, <target>.jsonl and manifest.json.
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 2000)]
    n: usize,
    /// Fraction of topic tokens shared by the two domains.
    #[arg(long, default_value_t = 0.3)]
    overlap: f64,
    /// Probability that a document's emotion follows its veracity group.
    #[arg(long, default_value_t = 0.9)]
    rho: f64,
    #[arg(long, default_value = "ekman")]
    taxonomy: EmotionTaxonomy,
    #[arg(long, default_value_t = 12)]
    min_len: usize,
    #[arg(long, default_value_t = 20)]
    max_len: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Probability that a document's topic tokens follow its label.
    #[arg(long, default_value_t = 0.9)]
    topic_signal: f64,
    #[arg(long, default_value_t = 0.5)]
    topic_share: f64,
    #[arg(long, default_value_t = 40)]
    topic_pool: usize,
    #[arg(long, default_value_t = 1)]
    markers: usize,
    #[arg(long, default_value = "synth-src")]
    source_name: String,
    #[arg(long, default_value = "synth-tgt")]
    target_name: String,
}

/// Training hyperparameters. Values come from the flags, then the config
/// file, then built-in defaults.
#[derive(Debug, Args)]
struct TrainArgs {
    /// JSON file with any subset of the training config fields.
    #[arg(long, env = "EMOFND_CONFIG", value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    patience: Option<usize>,
    /// Comma-separated alpha values for the grid search.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    alpha_grid: Option<Vec<f64>>,
    /// Comma-separated beta values for the grid search.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    beta_grid: Option<Vec<f64>>,
    /// Gradient-reversal strength.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    embed_dim: Option<usize>,
    #[arg(long)]
    hidden_dim: Option<usize>,
    #[arg(long)]
    max_len: Option<usize>,
    #[arg(long)]
    min_count: Option<usize>,
    /// Fixed adversarial weight; skips the grid search (needs --beta).
    #[arg(long, requires = "beta")]
    alpha: Option<f64>,
    /// Fixed emotion weight; skips the grid search (needs --alpha).
    #[arg(long, requires = "alpha")]
    beta: Option<f64>,
    /// Lexicon JSON-lines file used for weak emotion labels.
    #[arg(long, value_name = "PATH")]
    lexicon: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TrainCmdArgs {
    /// Labelled source dataset.
    #[arg(long, value_name = "PATH")]
    source: PathBuf,
    /// Target dataset (train split used unlabelled); required for DA variants.
    #[arg(long, value_name = "PATH")]
    target: Option<PathBuf>,
    #[arg(long, default_value = "da-mtl-p")]
    variant: Variant,
    #[command(flatten)]
    train: TrainArgs,
    /// Checkpoint output path.
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    /// Per-epoch training record, JSON lines.
    #[arg(long, value_name = "PATH")]
    record: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum SplitArg {
    Train,
    Val,
    Test,
    All,
}

impl SplitArg {
    fn split(self) -> Option<Split> {
        match self {
            SplitArg::Train => Some(Split::Train),
            SplitArg::Val => Some(Split::Val),
            SplitArg::Test => Some(Split::Test),
            SplitArg::All => None,
        }
    }
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
    /// Labelled dataset to score.
    #[arg(long, value_name = "PATH")]
    data: PathBuf,
    #[arg(long, value_enum, default_value = "test")]
    split: SplitArg,
}

#[derive(Debug, Args)]
struct MatrixArgs {
    /// JSON manifest: {"alias": {"path": "...", "domain": "..."}}.
    #[arg(long, value_name = "PATH")]
    manifest: PathBuf,
    /// Comma-separated source:target alias pairs.
    #[arg(long, value_delimiter = ',', value_name = "SRC:TGT", required = true)]
    pairs: Vec<String>,
    /// Comma-separated variants, or `all`.
    #[arg(long, default_value = "all")]
    variants: String,
    /// Number of seeds per cell, counting up from --seed.
    #[arg(long, default_value_t = 5)]
    seeds: usize,
    #[command(flatten)]
    train: TrainArgs,
    #[arg(long, default_value = "tsv")]
    format: TableFormat,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GradcheckArgs {
    #[arg(long, default_value = "da-mtl-p")]
    variant: Variant,
    /// Number of random instances.
    #[arg(long, default_value_t = 20)]
    seeds: u64,
    /// Maximum relative error.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
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
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
