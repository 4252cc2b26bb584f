//! `headtags`: batch pipelines over line-delimited news corpora.

mod commands;
mod config;
mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "headtags",
    version,
    about = "Content selection, instruction data and evaluation for headline and tag generation"
)]
pub struct Cli {
    /// TOML file with defaults for any flag below.
    #[arg(long, global = true, env = "HEADTAGS_CONFIG")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Validate a corpus and write its canonical form.
    Ingest(IngestArgs),
    /// Corpus statistics, overall and per language.
    Stats(StatsArgs),
    /// Per-language train/validation/test split.
    Split(SplitArgs),
    /// Select sentences with image or caption queries.
    Retrieve(RetrieveArgs),
    /// Build the instruction dataset with the controlled/unrestricted mixture.
    Prepare(PrepareArgs),
    /// Score generated headlines against references.
    EvalHeadline(EvalHeadlineArgs),
    /// Score predicted tags against gold tags.
    EvalTags(EvalTagsArgs),
}

#[derive(Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// JSON report with kept count and rejected lines.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Subword vocabulary; adds average subword tokens per article.
    #[arg(long, env = "HEADTAGS_VOCAB")]
    pub vocab: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Directory receiving train.jsonl, val.jsonl and test.jsonl.
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, env = "HEADTAGS_SEED")]
    pub seed: Option<u64>,
    /// Train, validation and test shares.
    #[arg(long, value_delimiter = ',', num_args = 3, env = "HEADTAGS_RATIOS")]
    pub ratios: Option<Vec<f64>>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ModalityArg {
    Image,
    Caption,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ContentModeArg {
    ArticleOnly,
    RetrievedOnly,
    RetrievedPlusArticle,
}

#[derive(Args)]
pub struct RetrieveArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Precomputed embedding table.
    #[arg(long, env = "HEADTAGS_EMBEDDINGS", conflicts_with = "service_url")]
    pub embeddings: Option<PathBuf>,
    /// Base URL of a running embedding service.
    #[arg(long, env = "HEADTAGS_SERVICE_URL")]
    pub service_url: Option<String>,
    /// Where image ids resolve to files when using the service.
    #[arg(long, env = "HEADTAGS_IMAGE_DIR")]
    pub image_dir: Option<PathBuf>,
    #[arg(long, value_enum, env = "HEADTAGS_MODALITY")]
    pub modality: Option<ModalityArg>,
    #[arg(long, env = "HEADTAGS_K")]
    pub k: Option<usize>,
    #[arg(long, value_enum, env = "HEADTAGS_MODE")]
    pub mode: Option<ContentModeArg>,
    /// Abort on the first record with missing embeddings instead of skipping it.
    #[arg(long, env = "HEADTAGS_STRICT", num_args = 0..=1, default_missing_value = "true")]
    pub strict: Option<bool>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args)]
pub struct PrepareArgs {
    /// Corpus or retrieve output; a `content` field replaces the article.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Share of examples given the controlled prefix.
    #[arg(long, env = "HEADTAGS_FRACTION")]
    pub fraction: Option<f64>,
    #[arg(long, env = "HEADTAGS_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args)]
pub struct EvalHeadlineArgs {
    /// One generated headline per line.
    #[arg(long)]
    pub hyps: PathBuf,
    /// One reference headline per line.
    #[arg(long)]
    pub refs: PathBuf,
    #[arg(long, env = "HEADTAGS_VOCAB")]
    pub vocab: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PredFormat {
    /// A JSON array of tags per line.
    Json,
    /// Raw model output per line, parsed for the tag list.
    Generated,
}

#[derive(Args)]
pub struct EvalTagsArgs {
    #[arg(long)]
    pub preds: PathBuf,
    /// A JSON array of gold tags per line.
    #[arg(long)]
    pub golds: PathBuf,
    #[arg(long, env = "HEADTAGS_LANGUAGE")]
    pub language: Option<String>,
    #[arg(long = "k", value_delimiter = ',', env = "HEADTAGS_K_VALUES")]
    pub k_values: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: PredFormat,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("HEADTAGS_LOG", "info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    if let Err(err) = commands::run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
