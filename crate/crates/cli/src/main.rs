//! `moralframe`: command-line pipeline from raw tweets to frame and stance
//! statistics. Every run writes `manifest-<command>.json` next to its
//! artifacts.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::config::ConfigFile;
use crate::error::{CliError, CliResult};
use crate::output::{Format, Run};

#[derive(Debug, Parser)]
#[command(name = "moralframe", version, about = "Moral-frame and stance analytics for short social-media texts")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// INI-style configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every stochastic step.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Format of tabular artifacts.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Directory for artifacts and the manifest.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Deduplicate a JSONL corpus and write normalized tokens.
    Ingest(commands::corpus::IngestArgs),
    /// Keep documents containing any keyword.
    Filter(commands::corpus::FilterArgs),
    /// Split documents into frame-bearing phrases.
    Segment(commands::corpus::SegmentArgs),
    /// Fit LDA and propose candidate keywords.
    DiscoverKeywords(commands::topics::DiscoverArgs),
    /// Sample documents per keyword into a review sheet.
    ReviewSample(commands::topics::ReviewSampleArgs),
    /// Tally a completed review sheet and accept keywords.
    ReviewTally(commands::topics::ReviewTallyArgs),
    /// Cross-validate and train a classifier.
    Train(commands::train::TrainArgs),
    /// Label phrases with the label model and classifier fallback.
    Label(commands::label::LabelArgs),
    /// Score documents with the valence lexicon.
    Sentiment(commands::corpus::SentimentArgs),
    /// Statistical analyses.
    #[command(subcommand)]
    Analyze(commands::analyze::AnalyzeCommand),
    /// Frame-by-stance summary report.
    Report(commands::report::ReportArgs),
}

/// Global flags plus the optional config file.
pub struct Context {
    pub global: GlobalArgs,
    pub config: ConfigFile,
}

impl Context {
    /// Flag value, else `key` from the config, else `default`.
    pub fn value<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> CliResult<T> {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.config.get(key)?.unwrap_or(default)),
        }
    }

    pub fn optional<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.config.get(key),
        }
    }

    pub fn optional_path(&self, flag: &Option<PathBuf>, key: &str) -> Option<PathBuf> {
        flag.clone().or_else(|| self.config.path(key))
    }

    pub fn path(&self, flag: &Option<PathBuf>, key: &str, flag_name: &str) -> CliResult<PathBuf> {
        self.optional_path(flag, key)
            .ok_or_else(|| CliError::Config(format!("missing {flag_name} (or {key} in the config file)")))
    }

    pub fn run(&self, command: &str) -> CliResult<Run> {
        let format = match self.global.format {
            Some(f) => f,
            None => match self.config.raw("general.format") {
                None => Format::Tsv,
                Some("tsv") => Format::Tsv,
                Some("jsonl") => Format::Jsonl,
                Some(other) => return Err(CliError::Config(format!("unknown format {other:?}"))),
            },
        };
        let out_dir = self.optional_path(&self.global.out_dir, "paths.out_dir").unwrap_or_else(|| PathBuf::from("."));
        let seed = self.optional(self.global.seed, "general.seed")?;
        Run::new(command, out_dir, format, seed)
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let config = match &cli.global.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let ctx = Context { global: cli.global, config };
    match cli.command {
        Command::Ingest(a) => commands::corpus::ingest(&ctx, a),
        Command::Filter(a) => commands::corpus::filter(&ctx, a),
        Command::Segment(a) => commands::corpus::segment(&ctx, a),
        Command::Sentiment(a) => commands::corpus::sentiment(&ctx, a),
        Command::DiscoverKeywords(a) => commands::topics::discover(&ctx, a),
        Command::ReviewSample(a) => commands::topics::review_sample(&ctx, a),
        Command::ReviewTally(a) => commands::topics::review_tally(&ctx, a),
        Command::Train(a) => commands::train::train(&ctx, a),
        Command::Label(a) => commands::label::label(&ctx, a),
        Command::Analyze(c) => commands::analyze::analyze(&ctx, c),
        Command::Report(a) => commands::report::report(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let err = CliError::Config(e.to_string().trim().to_owned());
            eprintln!("{}", err.record());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
