//! `gendebias` command-line driver.
//!
//! Exit status: 0 on success, 1 for usage and validation errors, 2 for I/O
//! errors.

mod commands;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gendebias::bias::PermutationScheme;
use gendebias::mitigation::Method;
use gendebias::Ridge;

#[derive(Debug, Parser)]
#[command(
    name = "gendebias",
    version,
    about = "Measure and mitigate gender bias in embeddings of grammatically gendered languages"
)]
struct Cli {
    /// Log more to stderr (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Seed for every random stage.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep only the first N words of each embedding file.
    #[arg(long, value_name = "N")]
    pub max_words: Option<usize>,
    /// Output file (directory for `mitigate`). Defaults to stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Bilingual {
    /// English embeddings in the same space.
    #[arg(long, value_name = "PATH")]
    pub embeddings_en: Option<PathBuf>,
    /// English lexicon (definitional pairs and attributes).
    #[arg(long, value_name = "PATH")]
    pub lexicon_en: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Semantic, grammatical and orthogonalized gender directions.
    Directions {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "PATH")]
        embeddings: PathBuf,
        #[arg(long, value_name = "PATH")]
        lexicon: PathBuf,
        #[command(flatten)]
        bilingual: Bilingual,
        /// Diagonal loading for LDA: `auto` or a non-negative number.
        #[arg(long, default_value = "auto", value_parser = parse_ridge)]
        ridge: Ridge,
        /// Report k-fold cross-validated accuracy of the grammatical classifier.
        #[arg(long, value_name = "K")]
        cv_folds: Option<usize>,
    },
    /// Per-word MWEAT scores and the aggregate permutation test.
    Audit {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "PATH")]
        embeddings: PathBuf,
        #[arg(long, value_name = "PATH")]
        lexicon: PathBuf,
        #[arg(long, default_value_t = 1000)]
        n_perm: usize,
        #[arg(long, value_enum, default_value_t = Scheme::Paired)]
        scheme: Scheme,
    },
    /// Run one of the mitigation pipelines and write the result to a directory.
    Mitigate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long, value_name = "PATH")]
        embeddings: PathBuf,
        #[arg(long, value_name = "PATH")]
        lexicon: PathBuf,
        #[command(flatten)]
        bilingual: Bilingual,
        /// Seed dictionary for alignment; identical strings when omitted.
        #[arg(long, value_name = "PATH")]
        seed_dict: Option<PathBuf>,
        #[arg(long, default_value = "auto", value_parser = parse_ridge)]
        ridge: Ridge,
    },
    /// Pearson correlation of cosines with human similarity scores.
    EvalSimilarity {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "PATH")]
        embeddings: PathBuf,
        /// Tab-separated `word1 word2 score` rows.
        #[arg(long, value_name = "PATH")]
        dataset: PathBuf,
    },
    /// Word translation precision at 1 and 5.
    EvalTranslation {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "PATH")]
        embeddings: PathBuf,
        #[arg(long, value_name = "PATH")]
        embeddings_en: PathBuf,
        /// Test dictionary, source word then target word per line.
        #[arg(long, value_name = "PATH")]
        dict: PathBuf,
        /// Rank with cross-domain similarity local scaling.
        #[arg(long)]
        csls: bool,
        /// Translate from English into the gendered language.
        #[arg(long)]
        reverse: bool,
        /// Also write per-query results as CSV.
        #[arg(long, value_name = "PATH")]
        details: Option<PathBuf>,
    },
    /// Analogy-based translation of gendered occupation forms (MRR, ASD).
    EvalPairs {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "PATH")]
        embeddings: PathBuf,
        #[arg(long, value_name = "PATH")]
        embeddings_en: PathBuf,
        #[arg(long, value_name = "PATH")]
        lexicon: PathBuf,
        /// Rank only among occupation forms instead of the whole vocabulary.
        #[arg(long)]
        occupations_only: bool,
    },
    /// Projections of lexicon words on the grammatical and semantic directions.
    ExportProjections {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "PATH")]
        embeddings: PathBuf,
        #[arg(long, value_name = "PATH")]
        lexicon: PathBuf,
        #[command(flatten)]
        bilingual: Bilingual,
        /// Reuse directions from a `directions` output instead of refitting.
        #[arg(long, value_name = "PATH")]
        directions: Option<PathBuf>,
        #[arg(long, default_value = "auto", value_parser = parse_ridge)]
        ridge: Ridge,
    },
    /// Spearman correlation of occupation bias between the two languages.
    Correlate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "PATH")]
        embeddings: PathBuf,
        #[arg(long, value_name = "PATH")]
        lexicon: PathBuf,
        #[arg(long, value_name = "PATH")]
        embeddings_en: PathBuf,
        #[arg(long, value_name = "PATH")]
        lexicon_en: PathBuf,
        /// Keep the direction of bias instead of its magnitude.
        #[arg(long)]
        signed: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Scheme {
    Paired,
    Partition,
}

impl From<Scheme> for PermutationScheme {
    fn from(s: Scheme) -> Self {
        match s {
            Scheme::Paired => PermutationScheme::PairedSwap,
            Scheme::Partition => PermutationScheme::Partition,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum MethodArg {
    ShiftOri,
    ShiftEn,
    DeAlign,
    HybridOri,
    HybridEn,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::ShiftOri => Method::ShiftOri,
            MethodArg::ShiftEn => Method::ShiftEn,
            MethodArg::DeAlign => Method::DeAlign,
            MethodArg::HybridOri => Method::HybridOri,
            MethodArg::HybridEn => Method::HybridEn,
        }
    }
}

fn parse_ridge(s: &str) -> Result<Ridge, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Ridge::Auto);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(Ridge::Fixed(v)),
        _ => Err(format!("expected `auto` or a non-negative number, got {s:?}")),
    }
}

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Io(String),
}

impl CliError {
    pub fn io(path: impl AsRef<Path>, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.as_ref().display()))
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Invalid(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<gendebias::Error> for CliError {
    fn from(e: gendebias::Error) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Invalid(e.to_string())
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Invalid(format!("json: {e}"))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    use commands as c;
    match cli.command {
        Command::Directions { common, embeddings, lexicon, bilingual, ridge, cv_folds } => {
            c::directions(&common, &embeddings, &lexicon, &bilingual, ridge, cv_folds)
        }
        Command::Audit { common, embeddings, lexicon, n_perm, scheme } => {
            c::audit(&common, &embeddings, &lexicon, n_perm, scheme.into())
        }
        Command::Mitigate { common, method, embeddings, lexicon, bilingual, seed_dict, ridge } => c::mitigate(
            &common,
            method.into(),
            &embeddings,
            &lexicon,
            &bilingual,
            seed_dict.as_deref(),
            ridge,
        ),
        Command::EvalSimilarity { common, embeddings, dataset } => {
            c::eval_similarity(&common, &embeddings, &dataset)
        }
        Command::EvalTranslation { common, embeddings, embeddings_en, dict, csls, reverse, details } => {
            c::eval_translation(&common, &embeddings, &embeddings_en, &dict, csls, reverse, details.as_deref())
        }
        Command::EvalPairs { common, embeddings, embeddings_en, lexicon, occupations_only } => {
            c::eval_pairs(&common, &embeddings, &embeddings_en, &lexicon, occupations_only)
        }
        Command::ExportProjections { common, embeddings, lexicon, bilingual, directions, ridge } => {
            c::export_projections(&common, &embeddings, &lexicon, &bilingual, directions.as_deref(), ridge)
        }
        Command::Correlate { common, embeddings, lexicon, embeddings_en, lexicon_en, signed } => {
            c::correlate(&common, &embeddings, &lexicon, &embeddings_en, &lexicon_en, signed)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
