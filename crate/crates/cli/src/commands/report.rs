use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use serde_json::json;

use moralframe::analysis::{frame_shares, ContingencyTable, SIGNIFICANCE_THRESHOLD};
use moralframe::corpus::{MoralFrame, Stance};

use super::analyze::{frame_labels, stance_table, write_chi2};
use crate::error::{CliError, CliResult};
use crate::output::{Header, Run};
use crate::Context;

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Label table from `label`.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Table with `doc_id` and `stance` columns.
    #[arg(long)]
    pub stances: Option<PathBuf>,
    #[arg(long)]
    pub threshold: Option<f64>,
}

/// Frame-by-stance counts over labeled phrases whose document has a stance.
fn frame_by_stance(run: &mut Run, labels: &Path, stances: &Path) -> CliResult<(ContingencyTable, usize)> {
    let labels = frame_labels(run, labels)?;
    let stances = stance_table(run, stances)?;
    let mut pairs = Vec::new();
    let mut unmatched = 0;
    for (doc, frame) in labels {
        match stances.get(&doc) {
            Some(s) => pairs.push((frame, *s)),
            None => unmatched += 1,
        }
    }
    let mut counts = vec![vec![0u64; Stance::ALL.len()]; MoralFrame::COUNT];
    for (f, s) in &pairs {
        counts[f.index()][s.index()] += 1;
    }
    // Frames never observed have a zero row margin and carry no information.
    let (present, rows): (Vec<MoralFrame>, Vec<Vec<u64>>) =
        MoralFrame::ALL.into_iter().zip(counts).filter(|(_, row)| row.iter().any(|&c| c > 0)).unzip();
    let table = ContingencyTable::new(
        present.iter().map(|f| f.name().to_owned()).collect(),
        Stance::ALL.iter().map(|s| s.name().to_owned()).collect(),
        rows,
    )?;
    Ok((table, unmatched))
}

pub fn report(ctx: &Context, args: ReportArgs) -> CliResult<()> {
    let mut run = ctx.run("report")?;
    let labels = ctx.path(&args.labels, "paths.labels", "--labels")?;
    let stances = ctx.path(&args.stances, "paths.stances", "--stances")?;
    let threshold = ctx.value(args.threshold, "analysis.threshold", SIGNIFICANCE_THRESHOLD)?;
    run.setting("threshold", threshold);
    let (table, unmatched) = frame_by_stance(&mut run, &labels, &stances)?;
    if table.total() == 0 {
        return Err(CliError::Data("no labeled phrase belongs to a document with a stance".into()));
    }
    run.write_text("frames-by-stance.tsv", Header::Hash, &table.to_tsv())?;

    let mut text = String::new();
    writeln!(text, "frame shares among {} labeled phrases", table.total()).unwrap();
    let frames = table.row_labels.iter().zip(&table.counts).flat_map(|(name, row)| {
        let frame: MoralFrame = name.parse().expect("row labels are frame names");
        std::iter::repeat_n(frame, row.iter().sum::<u64>() as usize)
    });
    let shares: [f64; MoralFrame::COUNT] = frame_shares(frames);
    let mut share_rows = Vec::new();
    for f in MoralFrame::ALL {
        writeln!(text, "{:<14}{:>8.4}", f.name(), shares[f.index()]).unwrap();
        share_rows.push(vec![json!(f.name()), json!(shares[f.index()])]);
    }
    run.write_table("report-shares", &["frame", "share"], share_rows)?;
    write_chi2(&mut run, &table, threshold, "report-chi2")?;
    run.write_text("report.txt", Header::Hash, &text)?;
    run.summary("unmatched_labels", unmatched);
    run.summary("frames_absent", MoralFrame::COUNT - table.row_labels.len());
    run.finish()
}
