use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use serde_json::{json, Value};

use moralframe::analysis::{
    chi_square_with_threshold, cohen_kappa, daily_virality, fit_regression, frame_popularity_timeline, frame_rank_svg,
    frame_shares, krippendorff_alpha, virality_svg, ContingencyTable, RegressionKind, ViralityRecord,
    SIGNIFICANCE_THRESHOLD,
};
use moralframe::corpus::{parse_gold_annotations, surface_tokens, MoralFrame, Stance};
use moralframe::sentiment::{score, ValenceLexicon};

use super::all_documents;
use crate::error::{CliError, CliResult};
use crate::output::{column, parse_table, Header, Run};
use crate::Context;

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// χ² test with adjusted residuals on a frame-by-stance table.
    Chi2(Chi2Args),
    /// Linear or logistic regression with coefficient tests.
    Regression(RegressionArgs),
    /// Daily virality by stance.
    Virality(ViralityArgs),
    /// Cohen's κ and Krippendorff's α from gold annotations.
    Agreement(AgreementArgs),
    /// Daily frame popularity ranks.
    Timeline(TimelineArgs),
}

pub fn analyze(ctx: &Context, cmd: AnalyzeCommand) -> CliResult<()> {
    match cmd {
        AnalyzeCommand::Chi2(a) => chi2(ctx, a),
        AnalyzeCommand::Regression(a) => regression(ctx, a),
        AnalyzeCommand::Virality(a) => virality(ctx, a),
        AnalyzeCommand::Agreement(a) => agreement(ctx, a),
        AnalyzeCommand::Timeline(a) => timeline(ctx, a),
    }
}

#[derive(Debug, Args)]
pub struct Chi2Args {
    /// Count table: header row of column labels, then `label<TAB>count...`.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// |adjusted residual| above which a cell is significant.
    #[arg(long)]
    pub threshold: Option<f64>,
}

pub fn write_chi2(run: &mut Run, table: &ContingencyTable, threshold: f64, stem: &str) -> CliResult<()> {
    let report = chi_square_with_threshold::<f64>(table, threshold)?;
    let mut rows = Vec::new();
    for (r, cells) in report.cells.iter().enumerate() {
        for (c, cell) in cells.iter().enumerate() {
            rows.push(vec![
                json!(report.row_labels[r]),
                json!(report.col_labels[c]),
                json!(cell.observed),
                json!(cell.expected),
                json!(cell.adjusted_residual),
                json!(cell.significant),
            ]);
        }
    }
    run.write_table(
        &format!("{stem}-residuals"),
        &["row", "column", "observed", "expected", "adjusted_residual", "significant"],
        rows,
    )?;
    run.write_text(&format!("{stem}-table.txt"), Header::Hash, &report.render_table())?;
    run.summary("chi2", report.chi2);
    run.summary("dof", report.dof);
    run.summary("p_value", report.p_value);
    run.summary("n", table.total());
    run.summary("significant_cells", report.significant_cells().len());
    Ok(())
}

fn chi2(ctx: &Context, args: Chi2Args) -> CliResult<()> {
    let mut run = ctx.run("analyze-chi2")?;
    let path = ctx.path(&args.table, "paths.table", "--table")?;
    let threshold = ctx.value(args.threshold, "analysis.threshold", SIGNIFICANCE_THRESHOLD)?;
    run.setting("threshold", threshold);
    let table = ContingencyTable::parse_tsv(&run.read_input(&path)?)?;
    write_chi2(&mut run, &table, threshold, "chi2")?;
    run.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Transform {
    None,
    /// ln(y + 1), e.g. for retweet counts.
    Log1p,
}

#[derive(Debug, Args)]
pub struct RegressionArgs {
    /// Table (TSV or JSONL) holding response and predictor columns.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub response: String,
    /// Comma-separated predictor columns.
    #[arg(long)]
    pub predictors: String,
    /// linear or logistic.
    #[arg(long, default_value = "linear")]
    pub kind: String,
    #[arg(long, value_enum, default_value = "none")]
    pub transform: Transform,
}

fn number(row: &BTreeMap<String, String>, name: &str) -> CliResult<f64> {
    let v = column(row, name)?;
    v.trim().parse().map_err(|_| CliError::Data(format!("column {name}: {v:?} is not a number")))
}

fn regression(ctx: &Context, args: RegressionArgs) -> CliResult<()> {
    let mut run = ctx.run("analyze-regression")?;
    let kind: RegressionKind = args.kind.parse().map_err(CliError::Config)?;
    let predictors: Vec<String> = args.predictors.split(',').map(|p| p.trim().to_owned()).filter(|p| !p.is_empty()).collect();
    if predictors.is_empty() {
        return Err(CliError::Config("no predictors given".into()));
    }
    run.setting("kind", &args.kind);
    run.setting("response", &args.response);
    run.setting("predictors", predictors.join(","));
    run.setting("transform", format!("{:?}", args.transform).to_lowercase());
    let rows = parse_table(&run.read_input(&args.data)?)?;
    let mut x = Vec::with_capacity(rows.len());
    let mut y = Vec::with_capacity(rows.len());
    for r in &rows {
        x.push(predictors.iter().map(|p| number(r, p)).collect::<CliResult<Vec<f64>>>()?);
        let v = number(r, &args.response)?;
        y.push(match args.transform {
            Transform::None => v,
            Transform::Log1p => v.ln_1p(),
        });
    }
    let fit = fit_regression(kind, &x, &y, &predictors)?;
    let table = (0..fit.names.len()).map(|i| {
        vec![json!(fit.names[i]), json!(fit.coefficients[i]), json!(fit.std_errors[i]), json!(fit.statistics[i]), json!(fit.p_values[i])]
    });
    run.write_table("regression", &["term", "beta", "std_error", "statistic", "p_value"], table)?;
    run.summary("n", fit.n);
    run.summary("iterations", fit.iterations);
    run.summary("converged", fit.converged);
    run.summary(if kind == RegressionKind::Linear { "r_squared" } else { "log_likelihood" }, fit.fit_statistic);
    run.summary("warnings", &fit.warnings);
    run.finish()
}

#[derive(Debug, Args)]
pub struct ViralityArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Table with `doc_id` and `stance` columns.
    #[arg(long)]
    pub stances: Option<PathBuf>,
    /// Table with `doc_id` and `compound` columns; scored with the built-in
    /// demo lexicon when absent.
    #[arg(long)]
    pub sentiment: Option<PathBuf>,
}

pub fn stance_table(run: &mut Run, path: &Path) -> CliResult<HashMap<String, Stance>> {
    parse_table(&run.read_input(path)?)?
        .iter()
        .map(|r| Ok((column(r, "doc_id")?.to_owned(), column(r, "stance")?.parse::<Stance>().map_err(CliError::Data)?)))
        .collect()
}

fn virality(ctx: &Context, args: ViralityArgs) -> CliResult<()> {
    let mut run = ctx.run("analyze-virality")?;
    let corpus = ctx.path(&args.corpus, "paths.corpus", "--corpus")?;
    let stances_path = ctx.path(&args.stances, "paths.stances", "--stances")?;
    let stances = stance_table(&mut run, &stances_path)?;
    let compounds: Option<HashMap<String, f64>> = match ctx.optional_path(&args.sentiment, "paths.sentiment") {
        Some(p) => Some(
            parse_table(&run.read_input(&p)?)?
                .iter()
                .map(|r| Ok((column(r, "doc_id")?.to_owned(), number(r, "compound")?)))
                .collect::<CliResult<_>>()?,
        ),
        None => {
            run.setting("valence", "builtin-demo");
            None
        }
    };
    let lex = ValenceLexicon::<f64>::demo();
    let docs = all_documents(&mut run, &corpus)?;
    let mut records = Vec::new();
    for d in &docs {
        let Some(&stance) = stances.get(&d.id) else { continue };
        let compound = match &compounds {
            Some(m) => *m.get(&d.id).ok_or_else(|| CliError::Data(format!("no sentiment for document {}", d.id)))?,
            None => score(&surface_tokens(&d.text), &lex).compound,
        };
        records.push(ViralityRecord { created_at: d.created_at, retweets: d.retweet_count, stance, compound });
    }
    let used = records.len();
    let series = daily_virality(records);
    let rows = series.days.iter().map(|(day, v)| {
        vec![
            json!(day.to_string()),
            json!(v.virality_for),
            json!(v.virality_against),
            json!(v.virality_undecided),
            json!(v.mean_sentiment),
            json!(v.tweets),
        ]
    });
    run.write_table("virality", &["day", "virality_for", "virality_against", "virality_undecided", "mean_sentiment", "tweets"], rows)?;
    run.write_text("virality.svg", Header::Xml, &virality_svg(&series))?;
    run.summary("documents", docs.len());
    run.summary("documents_with_stance", used);
    run.summary("days", series.len());
    run.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Field {
    Stance,
    Frame,
    Relevance,
}

#[derive(Debug, Args)]
pub struct AgreementArgs {
    #[arg(long)]
    pub gold: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "stance")]
    pub field: Field,
}

fn agreement(ctx: &Context, args: AgreementArgs) -> CliResult<()> {
    let mut run = ctx.run("analyze-agreement")?;
    let path = ctx.path(&args.gold, "paths.gold", "--gold")?;
    let gold = parse_gold_annotations(&run.read_input(&path)?)?;
    run.setting("field", format!("{:?}", args.field).to_lowercase());
    // item -> annotator -> label
    let mut ratings: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    for g in &gold {
        let (item, label) = match args.field {
            Field::Stance => (g.doc_id.clone(), g.stance.map(|s| s.name().to_owned())),
            Field::Frame => (format!("{}#{}", g.doc_id, g.phrase_index), g.frame.map(|f| f.name().to_owned())),
            Field::Relevance => (format!("{}#{}", g.doc_id, g.phrase_index), Some(g.relevance.name().to_owned())),
        };
        if let Some(label) = label {
            ratings.entry(item).or_default().insert(g.annotator_id.clone(), label);
        }
    }
    let annotators: BTreeSet<&String> = ratings.values().flat_map(|m| m.keys()).collect();
    let units: Vec<Vec<String>> = ratings.values().map(|m| m.values().cloned().collect()).collect();
    let alpha: f64 = krippendorff_alpha(&units)?;
    let mut rows = vec![vec![json!("krippendorff_alpha"), json!(alpha), json!(units.iter().filter(|u| u.len() >= 2).count())]];
    let mut pair = annotators.iter();
    if let (Some(a), Some(b)) = (pair.next(), pair.next()) {
        let shared: Vec<(&String, &String)> = ratings.values().filter_map(|m| Some((m.get(*a)?, m.get(*b)?))).collect();
        if !shared.is_empty() {
            let (la, lb): (Vec<&String>, Vec<&String>) = shared.into_iter().unzip();
            let kappa: f64 = cohen_kappa(&la, &lb)?;
            rows.push(vec![json!(format!("cohen_kappa:{a}:{b}")), json!(kappa), json!(la.len())]);
            run.summary("cohen_kappa", kappa);
            run.summary("kappa_items", la.len());
        }
    }
    run.write_table("agreement", &["metric", "value", "items"], rows)?;
    run.summary("krippendorff_alpha", alpha);
    run.summary("annotators", annotators.len());
    run.summary("items", ratings.len());
    run.finish()
}

#[derive(Debug, Args)]
pub struct TimelineArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Label table from `label` (`item_id` = `doc_id#index`, `frame`).
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

/// `(doc_id, frame)` per labeled phrase.
pub fn frame_labels(run: &mut Run, path: &Path) -> CliResult<Vec<(String, MoralFrame)>> {
    parse_table(&run.read_input(path)?)?
        .iter()
        .map(|r| {
            let item = column(r, "item_id")?;
            let doc = item.rsplit_once('#').map_or(item, |(d, _)| d).to_owned();
            Ok((doc, column(r, "frame")?.parse::<MoralFrame>().map_err(CliError::Data)?))
        })
        .collect()
}

fn timeline(ctx: &Context, args: TimelineArgs) -> CliResult<()> {
    let mut run = ctx.run("analyze-timeline")?;
    let corpus = ctx.path(&args.corpus, "paths.corpus", "--corpus")?;
    let labels_path = ctx.path(&args.labels, "paths.labels", "--labels")?;
    let labels = frame_labels(&mut run, &labels_path)?;
    let times: HashMap<String, i64> = all_documents(&mut run, &corpus)?.into_iter().map(|d| (d.id, d.created_at)).collect();
    let records = labels
        .iter()
        .map(|(doc, f)| times.get(doc).map(|&t| (t, *f)).ok_or_else(|| CliError::Data(format!("label for unknown document {doc}"))))
        .collect::<CliResult<Vec<_>>>()?;
    let tl = frame_popularity_timeline(records);
    let mut rows = Vec::new();
    for (day, d) in &tl {
        for (rank, f) in d.order.iter().enumerate() {
            rows.push(vec![json!(day.to_string()), json!(rank + 1), json!(f.name()), json!(d.counts[f.index()])]);
        }
    }
    run.write_table("timeline", &["day", "rank", "frame", "count"], rows)?;
    run.write_text("frame-ranks.svg", Header::Xml, &frame_rank_svg(&tl))?;
    let shares: [f64; MoralFrame::COUNT] = frame_shares(labels.iter().map(|(_, f)| *f));
    let share_rows: Vec<Vec<Value>> = MoralFrame::ALL
        .iter()
        .map(|f| vec![json!(f.name()), json!(labels.iter().filter(|(_, g)| g == f).count()), json!(shares[f.index()])])
        .collect();
    run.write_table("frame-shares", &["frame", "count", "share"], share_rows)?;
    run.summary("labels", labels.len());
    run.summary("days", tl.len());
    run.finish()
}
