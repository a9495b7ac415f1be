use std::fs::File;
use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use moralframe::corpus::{parse_word_list, DocumentReader, Preprocessor, TokenizedDocument};
use moralframe::topics::{
    candidate_keywords, coherence, keyword_precision_check, lda_fit, parse_review_sheet, render_review_sheet,
    tally_review_sheet, top_words, LdaParams, SynonymTable,
};

use super::{all_documents, stopwords};
use crate::error::CliResult;
use crate::output::Header;
use crate::Context;

#[derive(Debug, Args)]
pub struct DiscoverArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// `term<TAB>synonym...` table used to expand candidates.
    #[arg(long)]
    pub synonyms: Option<PathBuf>,
    /// Number of topics.
    #[arg(long)]
    pub topics: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Document-topic prior; defaults to 50/topics.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Words listed per topic.
    #[arg(long)]
    pub top_n: Option<usize>,
}

pub fn discover(ctx: &Context, args: DiscoverArgs) -> CliResult<()> {
    let mut run = ctx.run("discover-keywords")?;
    let seed = run.require_seed()?;
    let input = ctx.path(&args.input, "paths.corpus", "--input")?;
    let k = ctx.value(args.topics, "topics.num_topics", 10)?;
    let mut params = LdaParams::<f64>::with_defaults(k, seed);
    params.iterations = ctx.value(args.iterations, "topics.iterations", params.iterations)?;
    params.alpha = ctx.value(args.alpha, "topics.alpha", params.alpha)?;
    params.beta = ctx.value(args.beta, "topics.beta", params.beta)?;
    let top_n = ctx.value(args.top_n, "topics.top_n", 10)?;
    run.setting("topics", k);
    run.setting("iterations", params.iterations);
    run.setting("alpha", params.alpha);
    run.setting("beta", params.beta);
    run.setting("top_n", top_n);
    let synonyms = match ctx.optional_path(&args.synonyms, "paths.synonyms") {
        Some(p) => SynonymTable::parse(&run.read_input(&p)?)?,
        None => SynonymTable::default(),
    };
    let pre = Preprocessor::new(stopwords(ctx, &mut run, &args.stopwords)?);
    let corpus: Vec<TokenizedDocument> =
        all_documents(&mut run, &input)?.iter().map(|d| pre.process(d)).filter(|t| !t.tokens.is_empty()).collect();
    let model = lda_fit(&corpus, &params)?;
    let summaries = (0..k).map(|t| top_words(&model, t, top_n)).collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for s in &summaries {
        for (rank, (w, p)) in s.top_words.iter().enumerate() {
            rows.push(vec![json!(s.topic_id), json!(rank + 1), json!(w), json!(p)]);
        }
    }
    run.write_table("topics", &["topic", "rank", "word", "probability"], rows)?;
    let candidates = candidate_keywords(&summaries, &synonyms);
    run.write_table("candidates", &["keyword"], candidates.iter().map(|c| vec![json!(c)]))?;
    run.write_text("lda-model.txt", Header::Hash, &model.to_text())?;
    run.summary("documents", corpus.len());
    run.summary("vocabulary", model.vocab_size());
    run.summary("candidates", candidates.len());
    if top_n >= 2 {
        run.summary("umass_coherence", coherence(&model, &corpus, top_n)?);
    }
    run.finish()
}

#[derive(Debug, Args)]
pub struct ReviewSampleArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Keywords to review, one per line.
    #[arg(long)]
    pub keywords: Option<PathBuf>,
    /// Documents sampled per keyword.
    #[arg(long)]
    pub sample_n: Option<usize>,
}

pub fn review_sample(ctx: &Context, args: ReviewSampleArgs) -> CliResult<()> {
    let mut run = ctx.run("review-sample")?;
    let seed = run.require_seed()?;
    let input = ctx.path(&args.input, "paths.corpus", "--input")?;
    let kw_path = ctx.path(&args.keywords, "paths.keywords", "--keywords")?;
    let n = ctx.value(args.sample_n, "topics.review_sample", 100)?;
    run.setting("sample_n", n);
    let keywords = parse_word_list(&run.read_input(&kw_path)?);
    run.input(&input)?;
    let mut sheet = String::new();
    for (i, kw) in keywords.iter().enumerate() {
        let mut failure = None;
        let stream = DocumentReader::new(File::open(&input)?).map_while(|r| r.map_err(|e| failure = Some(e)).ok());
        let sample = keyword_precision_check(kw, stream, n, seed.wrapping_add(i as u64));
        if let Some(e) = failure {
            return Err(e.into());
        }
        let sample = sample?;
        let rendered = render_review_sheet(kw, &sample);
        let body = if i == 0 { rendered.as_str() } else { rendered.split_once('\n').map_or("", |(_, b)| b) };
        sheet.push_str(body);
    }
    run.write_text("review-sheet.tsv", Header::Hash, &sheet)?;
    run.summary("keywords", keywords.len());
    run.summary("rows", sheet.lines().count().saturating_sub(1));
    run.finish()
}

#[derive(Debug, Args)]
pub struct ReviewTallyArgs {
    /// Completed review sheet.
    #[arg(long)]
    pub sheet: PathBuf,
}

pub fn review_tally(ctx: &Context, args: ReviewTallyArgs) -> CliResult<()> {
    let mut run = ctx.run("review-tally")?;
    let rows = parse_review_sheet(&run.read_input(&args.sheet)?)?;
    let tallies = tally_review_sheet(&rows)?;
    let table = tallies.iter().map(|t| {
        let precision = if t.reviewed == 0 { 0.0 } else { t.relevant as f64 / t.reviewed as f64 };
        vec![json!(t.keyword), json!(t.reviewed), json!(t.relevant), json!(precision), json!(t.accepted)]
    });
    run.write_table("keyword-tally", &["keyword", "reviewed", "relevant", "precision", "accepted"], table)?;
    let accepted: Vec<&str> = tallies.iter().filter(|t| t.accepted).map(|t| t.keyword.as_str()).collect();
    let mut list = accepted.join("\n");
    if !list.is_empty() {
        list.push('\n');
    }
    run.write_text("accepted-keywords.txt", Header::Hash, &list)?;
    run.summary("keywords", tallies.len());
    run.summary("accepted", accepted.len());
    run.finish()
}
