use std::path::PathBuf;

use clap::Args;
use serde_json::{json, Value};

use moralframe::corpus::surface_tokens;
use moralframe::labelmodel::{apply_lfs, em_fit, pipeline_label, EmConfig, LabelModelParams, PhraseItem, NUM_LFS};
use moralframe::learn::{EmbeddingClassifier, LinearModel, Task};

use super::{embeddings, frame_lexicon};
use crate::error::{CliError, CliResult};
use crate::output::{column, parse_table, strip_manifest_line, Header};
use crate::Context;

#[derive(Debug, Args)]
pub struct LabelArgs {
    /// Phrase table from `segment`.
    #[arg(long)]
    pub phrases: Option<PathBuf>,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Frame classifier dump from `train frame`.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Previously fitted label-model parameters; skips EM.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Minimum posterior for the label model to commit.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Minimum top probability for the classifier to vote.
    #[arg(long)]
    pub floor: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
}

pub fn label(ctx: &Context, args: LabelArgs) -> CliResult<()> {
    let mut run = ctx.run("label")?;
    let tau = ctx.value(args.tau, "labelmodel.tau", 0.5)?;
    let floor = ctx.value(args.floor, "labelmodel.floor", 0.6)?;
    run.setting("tau", tau);
    run.setting("floor", floor);
    let phrases = ctx.path(&args.phrases, "paths.phrases", "--phrases")?;
    let items: Vec<PhraseItem> = parse_table(&run.read_input(&phrases)?)?
        .iter()
        .map(|r| Ok(PhraseItem::new(format!("{}#{}", column(r, "doc_id")?, column(r, "index")?), surface_tokens(column(r, "text")?))))
        .collect::<CliResult<_>>()?;
    let lex = frame_lexicon(ctx, &mut run, &args.lexicon)?;
    let emb = embeddings(ctx, &mut run, &args.embeddings)?;
    let model_path = ctx.path(&args.model, "paths.frame_model", "--model")?;
    let model = LinearModel::<f64>::from_text(strip_manifest_line(&run.read_input(&model_path)?))?;
    if model.task != Task::Frame {
        return Err(CliError::Config(format!("{} is a {} model, not a frame model", model_path.display(), model.task.name())));
    }
    if model.dim() != emb.dim() {
        return Err(CliError::Config(format!("model expects {}-d features, embeddings are {}-d", model.dim(), emb.dim())));
    }
    let clf = EmbeddingClassifier::new(&model, &emb);
    let votes = apply_lfs(&items, &lex, &clf, floor)?;
    let mut columns = vec!["item_id".to_owned()];
    columns.extend((0..NUM_LFS).map(|j| format!("lf{j}")));
    let column_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let vote_rows = items.iter().enumerate().map(|(i, item)| {
        let mut row = vec![json!(item.id)];
        row.extend(votes.row(i).map(|v| v.map_or(json!(-1), |c| json!(c))));
        row
    });
    run.write_table("votes", &column_refs, vote_rows)?;
    if items.is_empty() {
        run.write_table("labels", &["item_id", "frame", "source"], Vec::new())?;
        for key in ["items", "model_count", "fallback_count"] {
            run.summary(key, 0);
        }
        run.summary("model_fraction", 0.0);
        run.summary("fallback_fraction", 0.0);
        return run.finish();
    }

    let params: LabelModelParams<f64> = match ctx.optional_path(&args.params, "paths.label_params") {
        Some(p) => {
            run.setting("params", p.display());
            LabelModelParams::from_text(strip_manifest_line(&run.read_input(&p)?))?
        }
        None => {
            let seed = run.require_seed()?;
            let defaults = EmConfig::<f64>::default();
            let config = EmConfig {
                max_iter: ctx.value(args.max_iter, "labelmodel.max_iter", defaults.max_iter)?,
                tol: ctx.value(args.tol, "labelmodel.tol", defaults.tol)?,
                seed,
            };
            run.setting("max_iter", config.max_iter);
            run.setting("tol", config.tol);
            em_fit(&votes, &config)?
        }
    };
    run.write_text("label-params.txt", Header::Hash, &params.to_text())?;

    let out = pipeline_label(&items, &lex, &clf, &params, tau, floor)?;
    let rows: Vec<Vec<Value>> =
        out.labels.iter().map(|l| vec![json!(l.item_id), json!(l.frame.name()), json!(l.source.name())]).collect();
    run.write_table("labels", &["item_id", "frame", "source"], rows)?;
    run.summary("items", items.len());
    run.summary("model_count", out.coverage.model_count);
    run.summary("fallback_count", out.coverage.fallback_count);
    run.summary("model_fraction", out.coverage.model_fraction);
    run.summary("fallback_fraction", out.coverage.fallback_fraction);
    run.summary("em_iterations", params.em_iterations_run);
    run.summary("log_likelihood", params.log_likelihood);
    run.finish()
}
