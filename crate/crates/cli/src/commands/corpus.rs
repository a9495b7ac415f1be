use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use serde_json::{json, Value};

use moralframe::corpus::{segment_phrases, Deduplicator, KeywordFilter, Preprocessor};
use moralframe::sentiment::{batch_score, utc_day, SentimentLabel, ValenceLexicon};

use super::{all_documents, documents, frame_lexicon, stopwords};
use crate::error::{CliError, CliResult};
use crate::output::Run;
use crate::Context;

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// JSONL corpus, one document per line.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Stopword list replacing the built-in English list.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
}

pub fn ingest(ctx: &Context, args: IngestArgs) -> CliResult<()> {
    let mut run = ctx.run("ingest")?;
    let input = ctx.path(&args.input, "paths.corpus", "--input")?;
    let pre = Preprocessor::new(stopwords(ctx, &mut run, &args.stopwords)?);
    let mut dedupe = Deduplicator::new();
    let reader = documents(&mut run, &input)?;
    let mut corpus = run.jsonl("corpus.jsonl")?;
    let mut tokens = run.table("tokens", &["doc_id", "tokens", "hashtags"])?;
    for doc in reader {
        let doc = doc?;
        if !dedupe.admit(&doc) {
            continue;
        }
        serde_json::to_writer(&mut corpus, &doc).map_err(|e| CliError::Data(e.to_string()))?;
        writeln!(corpus)?;
        let t = pre.process(&doc);
        tokens.row(vec![json!(t.doc_id), json!(t.tokens), json!(t.hashtags)])?;
    }
    corpus.flush()?;
    tokens.finish()?;
    run.summary("documents_read", dedupe.total());
    run.summary("duplicates_removed", dedupe.removed());
    run.summary("duplicate_fraction", dedupe.duplicate_fraction());
    run.summary("documents_kept", dedupe.total() - dedupe.removed());
    run.finish()
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Keyword list, one lowercase term per line.
    #[arg(long)]
    pub keywords: Option<PathBuf>,
    /// Drop retweets.
    #[arg(long)]
    pub exclude_retweets: bool,
}

pub fn filter(ctx: &Context, args: FilterArgs) -> CliResult<()> {
    let mut run = ctx.run("filter")?;
    let input = ctx.path(&args.input, "paths.corpus", "--input")?;
    let kw_path = ctx.path(&args.keywords, "paths.keywords", "--keywords")?;
    let exclude = args.exclude_retweets || ctx.value(None, "filter.exclude_retweets", false)?;
    run.setting("exclude_retweets", exclude);
    let keywords = moralframe::corpus::parse_word_list(&run.read_input(&kw_path)?);
    let filter = KeywordFilter::new(keywords, exclude)?;
    let reader = documents(&mut run, &input)?;
    let mut out = run.jsonl("filtered.jsonl")?;
    let (mut total, mut kept) = (0usize, 0usize);
    for doc in reader {
        let doc = doc?;
        total += 1;
        if filter.matches(&doc) {
            kept += 1;
            serde_json::to_writer(&mut out, &doc).map_err(|e| CliError::Data(e.to_string()))?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    run.summary("documents_read", total);
    run.summary("documents_kept", kept);
    run.finish()
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Frame lexicon (`pattern<TAB>Frame`); defaults to the built-in seed list.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
}

pub fn segment(ctx: &Context, args: SegmentArgs) -> CliResult<()> {
    let mut run = ctx.run("segment")?;
    let input = ctx.path(&args.input, "paths.corpus", "--input")?;
    let lex = frame_lexicon(ctx, &mut run, &args.lexicon)?;
    let reader = documents(&mut run, &input)?;
    let mut out = run.table("phrases", &["doc_id", "index", "text", "trigger_terms"])?;
    let (mut docs, mut phrases, mut with_phrases) = (0usize, 0usize, 0usize);
    for doc in reader {
        let doc = doc?;
        docs += 1;
        let found = segment_phrases(&doc, &lex);
        with_phrases += usize::from(!found.is_empty());
        for p in found {
            phrases += 1;
            out.row(vec![json!(p.doc_id), json!(p.index), json!(p.text), json!(p.trigger_terms)])?;
        }
    }
    out.finish()?;
    run.summary("documents", docs);
    run.summary("documents_with_phrases", with_phrases);
    run.summary("phrases", phrases);
    run.finish()
}

#[derive(Debug, Args)]
pub struct SentimentArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// `term<TAB>valence` lexicon; defaults to the built-in demo lexicon.
    #[arg(long)]
    pub valence: Option<PathBuf>,
    #[arg(long)]
    pub negations: Option<PathBuf>,
    #[arg(long)]
    pub boosters: Option<PathBuf>,
}

pub fn sentiment(ctx: &Context, args: SentimentArgs) -> CliResult<()> {
    let mut run = ctx.run("sentiment")?;
    let input = ctx.path(&args.input, "paths.corpus", "--input")?;
    let lex = valence_lexicon(ctx, &mut run, &args)?;
    let docs = all_documents(&mut run, &input)?;
    let scored = batch_score(&docs, &lex);
    let rows = docs.iter().zip(&scored.scores).map(|(d, (id, s))| {
        vec![json!(id), json!(utc_day(d.created_at).to_string()), json!(s.compound), json!(s.label.name())]
    });
    run.write_table("sentiment", &["doc_id", "day", "compound", "label"], rows)?;
    let daily: Vec<Vec<Value>> = scored.daily_mean.iter().map(|(d, m)| vec![json!(d.to_string()), json!(m)]).collect();
    run.write_table("daily-sentiment", &["day", "mean_compound"], daily)?;
    for l in [SentimentLabel::Positive, SentimentLabel::Neutral, SentimentLabel::Negative] {
        let n = scored.scores.iter().filter(|(_, s)| s.label == l).count();
        run.summary(&format!("label_{}", l.name().to_lowercase()), n);
    }
    run.summary("documents", docs.len());
    run.summary("days", scored.daily_mean.len());
    run.finish()
}

pub fn valence_lexicon(ctx: &Context, run: &mut Run, args: &SentimentArgs) -> CliResult<ValenceLexicon<f64>> {
    let valence = ctx.optional_path(&args.valence, "paths.valence");
    let negations = ctx.optional_path(&args.negations, "paths.negations");
    let boosters = ctx.optional_path(&args.boosters, "paths.boosters");
    for p in [&valence, &negations, &boosters].into_iter().flatten() {
        run.input(p)?;
    }
    run.setting("valence", valence.as_ref().map_or("builtin-demo".to_owned(), |p| p.display().to_string()));
    Ok(match valence {
        Some(v) => ValenceLexicon::load(v, negations.as_deref(), boosters.as_deref())?,
        None => ValenceLexicon::demo(),
    })
}
