use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;

use clap::Args;
use serde::Deserialize;
use serde_json::json;

use moralframe::corpus::{parse_gold_annotations, surface_tokens, GoldAnnotation, MoralFrame, Relevance};
use moralframe::learn::{
    crossval, featurize, train as fit, ClassifierSpec, CrossValConfig, EmbeddingTable, Hyper, ImbalanceStep,
    OversampleTarget, Sample, Task,
};

use super::{all_documents, embeddings};
use crate::error::{CliError, CliResult};
use crate::output::{column, parse_table, Header};
use crate::Context;

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// relevance, stance or frame.
    pub task: Task,
    /// Gold annotations: doc_id, phrase_index, relevance, frame, stance, annotator_id.
    #[arg(long)]
    pub gold: Option<PathBuf>,
    /// Phrase table from `segment` (relevance and frame tasks).
    #[arg(long)]
    pub phrases: Option<PathBuf>,
    /// JSONL corpus (stance task).
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Comma-separated learning rates to search.
    #[arg(long)]
    pub learning_rate: Option<String>,
    /// Comma-separated L2 strengths to search.
    #[arg(long)]
    pub l2: Option<String>,
    /// Class to cap in training folds, by name.
    #[arg(long)]
    pub undersample_class: Option<String>,
    #[arg(long)]
    pub undersample_cap: Option<usize>,
    /// Oversample every class to the majority size in training folds.
    #[arg(long)]
    pub oversample: bool,
    /// Neighbours for synthetic oversampling.
    #[arg(long)]
    pub oversample_k: Option<usize>,
    /// JSONL of `{"text", "frame"}` items used to top up frame classes.
    #[arg(long)]
    pub external: Option<PathBuf>,
    #[arg(long)]
    pub augment_target: Option<usize>,
}

fn parse_grid(text: &str, what: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| CliError::Config(format!("bad {what} value {v:?}"))))
        .collect()
}

/// Majority label per key over annotators; ties go to the lowest index.
fn majority<K: Ord + Clone>(votes: impl IntoIterator<Item = (K, usize)>, classes: usize) -> BTreeMap<K, usize> {
    let mut counts: BTreeMap<K, Vec<usize>> = BTreeMap::new();
    for (k, c) in votes {
        counts.entry(k).or_insert_with(|| vec![0; classes])[c] += 1;
    }
    counts
        .into_iter()
        .map(|(k, v)| {
            let best = (0..classes).fold(0, |b, i| if v[i] > v[b] { i } else { b });
            (k, best)
        })
        .collect()
}

fn gold_labels(task: Task, gold: &[GoldAnnotation]) -> BTreeMap<(String, Option<usize>), usize> {
    let c = task.num_classes();
    match task {
        Task::Relevance => majority(
            gold.iter().filter_map(|g| {
                let label = match g.relevance {
                    Relevance::Relevant => 0,
                    Relevance::Irrelevant => 1,
                    Relevance::SomewhatRelevant => return None,
                };
                Some(((g.doc_id.clone(), Some(g.phrase_index)), label))
            }),
            c,
        ),
        Task::Frame => majority(
            gold.iter().filter_map(|g| g.frame.map(|f| ((g.doc_id.clone(), Some(g.phrase_index)), f.index()))),
            c,
        ),
        Task::Stance => majority(gold.iter().filter_map(|g| g.stance.map(|s| ((g.doc_id.clone(), None), s.index()))), c),
    }
}

#[derive(Deserialize)]
struct ExternalItem {
    text: String,
    frame: String,
}

pub fn train(ctx: &Context, args: TrainArgs) -> CliResult<()> {
    let task = args.task;
    let mut run = ctx.run(&format!("train-{}", task.name()))?;
    let seed = run.require_seed()?;
    let gold_path = ctx.path(&args.gold, "paths.gold", "--gold")?;
    let gold = parse_gold_annotations(&run.read_input(&gold_path)?)?;
    let emb: EmbeddingTable<f64> = embeddings(ctx, &mut run, &args.embeddings)?;
    let texts: HashMap<(String, Option<usize>), String> = match task {
        Task::Stance => {
            let corpus = ctx.path(&args.corpus, "paths.corpus", "--corpus")?;
            all_documents(&mut run, &corpus)?.into_iter().map(|d| ((d.id, None), d.text)).collect()
        }
        _ => {
            let phrases = ctx.path(&args.phrases, "paths.phrases", "--phrases")?;
            parse_table(&run.read_input(&phrases)?)?
                .iter()
                .map(|r| {
                    let index = column(r, "index")?
                        .parse::<usize>()
                        .map_err(|_| CliError::Data(format!("bad phrase index {:?}", r["index"])))?;
                    Ok(((column(r, "doc_id")?.to_owned(), Some(index)), column(r, "text")?.to_owned()))
                })
                .collect::<CliResult<_>>()?
        }
    };
    let labels = gold_labels(task, &gold);
    let mut missing = 0usize;
    let data: Vec<Sample<f64>> = labels
        .iter()
        .filter_map(|(key, &label)| match texts.get(key) {
            Some(text) => Some(Sample::new(featurize(&surface_tokens(text), &emb).values, label)),
            None => {
                missing += 1;
                None
            }
        })
        .collect();
    if missing > 0 {
        log::warn!("{missing} annotated item(s) have no text in the input and were skipped");
    }
    run.summary("annotated_without_text", missing);

    let folds = ctx.value(args.folds, "learn.folds", 5)?;
    let epochs = ctx.value(args.epochs, "learn.epochs", 500)?;
    let lrs = parse_grid(&ctx.value(args.learning_rate, "learn.learning_rate", "0.1".to_owned())?, "learning rate")?;
    let l2s = parse_grid(&ctx.value(args.l2, "learn.l2", "0.0001".to_owned())?, "l2")?;
    run.setting("task", task.name());
    run.setting("folds", folds);
    run.setting("epochs", epochs);
    run.setting("learning_rate", lrs.iter().map(f64::to_string).collect::<Vec<_>>().join(","));
    run.setting("l2", l2s.iter().map(f64::to_string).collect::<Vec<_>>().join(","));

    let names = task.class_names();
    let mut plan = Vec::new();
    if let Some(name) = ctx.optional(args.undersample_class.clone(), "learn.undersample_class")? {
        let class = names
            .iter()
            .position(|n| n.eq_ignore_ascii_case(&name))
            .ok_or_else(|| CliError::Config(format!("unknown class {name:?} for task {}", task.name())))?;
        let cap = ctx.value(args.undersample_cap, "learn.undersample_cap", 500)?;
        run.setting("undersample", format!("{name}:{cap}"));
        plan.push(ImbalanceStep::Undersample { class, cap });
    }
    let k = ctx.value(args.oversample_k, "learn.oversample_k", 5)?;
    if let Some(path) = ctx.optional_path(&args.external, "paths.external") {
        if task != Task::Frame {
            return Err(CliError::Config("--external applies to the frame task only".into()));
        }
        let per_class_target = ctx.value(args.augment_target, "learn.augment_target", 500)?;
        let mut external = Vec::new();
        for (i, line) in run.read_input(&path)?.lines().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with(moralframe::corpus::MANIFEST_RECORD) {
                continue;
            }
            let item: ExternalItem =
                serde_json::from_str(line).map_err(|e| CliError::Data(format!("{} line {}: {e}", path.display(), i + 1)))?;
            let frame: MoralFrame = item.frame.parse().map_err(|e: String| CliError::Data(e))?;
            external.push(Sample::new(featurize(&surface_tokens(&item.text), &emb).values, frame.index()));
        }
        run.setting("augment_target", per_class_target);
        plan.push(ImbalanceStep::Augment { external, per_class_target, k });
    }
    if args.oversample || ctx.value(None, "learn.oversample", false)? {
        run.setting("oversample_k", k);
        plan.push(ImbalanceStep::Oversample { target: OversampleTarget::MatchMajority, k });
    }

    let mut grid = vec![ClassifierSpec::UniformRandom];
    for &learning_rate in &lrs {
        for &l2 in &l2s {
            grid.push(ClassifierSpec::Logistic(Hyper { epochs, learning_rate, l2, seed }));
        }
    }
    let config = CrossValConfig { folds, stratified: true, plan: plan.clone(), grid: grid.clone(), seed };
    let report = crossval(&data, task, &config)?;

    let best_logistic = (1..grid.len())
        .max_by(|&a, &b| {
            report.reports[a]
                .weighted_f1
                .partial_cmp(&report.reports[b].weighted_f1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(b.cmp(&a))
        })
        .expect("grid has a logistic entry");
    let rows = grid.iter().zip(&report.reports).enumerate().map(|(i, (spec, r))| {
        let (kind, lr, l2) = match spec {
            ClassifierSpec::UniformRandom => ("uniform_random", None, None),
            ClassifierSpec::Logistic(h) => ("logistic", Some(h.learning_rate), Some(h.l2)),
        };
        vec![
            json!(i),
            json!(kind),
            json!(lr),
            json!(l2),
            json!(r.accuracy),
            json!(r.macro_f1),
            json!(r.weighted_f1),
            json!(i == best_logistic),
        ]
    });
    run.write_table(
        &format!("crossval-{}", task.name()),
        &["config", "classifier", "learning_rate", "l2", "accuracy", "macro_f1", "weighted_f1", "selected"],
        rows,
    )?;
    let best = &report.reports[best_logistic];
    let class_rows = best.per_class.iter().enumerate().map(|(c, m)| {
        vec![json!(names[c]), json!(m.precision), json!(m.recall), json!(m.f1), json!(m.support)]
    });
    run.write_table(&format!("metrics-{}", task.name()), &["class", "precision", "recall", "f1", "support"], class_rows)?;

    let mut full = data.clone();
    for (s, step) in plan.iter().enumerate() {
        full = step.apply(full, seed.wrapping_add(s as u64 + 1))?;
    }
    let ClassifierSpec::Logistic(hyper) = grid[best_logistic] else { unreachable!("index skips the baseline") };
    let model = fit(&full, task, &hyper)?;
    run.write_text(&format!("model-{}.txt", task.name()), Header::Hash, &model.to_text())?;

    run.summary("items", data.len());
    run.summary("training_items_after_plan", full.len());
    run.summary("selected_learning_rate", hyper.learning_rate);
    run.summary("selected_l2", hyper.l2);
    run.summary("cv_weighted_f1", best.weighted_f1);
    run.summary("cv_macro_f1", best.macro_f1);
    run.summary("cv_accuracy", best.accuracy);
    run.summary("random_baseline_weighted_f1", report.reports[0].weighted_f1);
    run.summary("final_loss", model.meta.final_loss);
    run.finish()
}
