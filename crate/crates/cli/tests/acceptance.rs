//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use tempfile::TempDir;

use moralframe::analysis::{cohen_kappa, cohen_kappa_exact, fit_regression, krippendorff_alpha, virality, RegressionKind};
use moralframe::corpus::{MoralFrame, TokenizedDocument};
use moralframe::labelmodel::{em_fit_traced, majority_vote, predict, EmConfig, VoteMatrix};
use moralframe::learn::{
    adasyn_oversample, class_counts, loss_and_gradient, train, undersample, Classifier, Hyper, Sample, Task,
};
use moralframe::sentiment::{label_for, normalize, score, SentimentLabel, ValenceLexicon};
use moralframe::topics::{lda_fit, lda_fit_observed, top_words, LdaParams};

use common::*;

type Outcome = Result<String, String>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn within_time(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("{what} took {t:.2?}, limit {limit:?}"))
}

/// Residuals as printed beside the frame-by-stance counts (For, Against, Undecided).
const PRINTED_RESIDUALS: [(&str, [f64; 3]); 12] = [
    ("Care", [75.89, -77.69, -5.14]),
    ("Harm", [-28.56, 28.48, 3.42]),
    ("Loyalty", [-9.01, 12.60, -5.99]),
    ("Betrayal", [-1.67, 5.02, -6.37]),
    ("Authority", [-6.45, 6.06, 1.51]),
    ("Subversion", [-1.08, 0.46, 1.33]),
    ("Purity", [-15.45, 18.32, -3.85]),
    ("Degradation", [-12.96, 12.85, 1.70]),
    ("Fairness", [-9.19, 9.82, -0.18]),
    ("Injustice", [-11.57, 14.05, -3.54]),
    ("Freedom", [-44.47, 38.72, 16.34]),
    ("Oppression", [-14.38, 17.40, -4.26]),
];

fn chi2_run(dir: &TempDir) -> Result<(String, Duration), String> {
    let start = Instant::now();
    let out = run(&["--out-dir", s(dir.path()), "analyze", "chi2", "--table", s(&data("frames_by_stance.tsv"))]);
    let elapsed = start.elapsed();
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    Ok((String::from_utf8(out.stdout).unwrap(), elapsed))
}

fn c1_chi_square() -> Outcome {
    let dir = TempDir::new().unwrap();
    let (stdout, elapsed) = chi2_run(&dir)?;
    let chi2: f64 = summary(&stdout, "chi2").parse().unwrap();
    let dof: usize = summary(&stdout, "dof").parse().unwrap();
    ensure((chi2 - 7640.089).abs() <= 0.5, || format!("chi2 = {chi2}"))?;
    ensure(dof == 22, || format!("dof = {dof}"))?;
    ensure(elapsed < Duration::from_secs(1), || format!("runtime {elapsed:.2?}"))?;
    Ok(format!("chi2 = {chi2:.4}, dof = {dof}, runtime {elapsed:.2?}"))
}

fn c2_residuals() -> Outcome {
    let dir = TempDir::new().unwrap();
    chi2_run(&dir)?;
    let (header, rows) = tsv_rows(&dir.path().join("chi2-residuals.tsv"));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let (ri, ci, ai, si) = (col("row"), col("column"), col("adjusted_residual"), col("significant"));
    let stances = ["For", "Against", "Undecided"];
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut significant = 0;
    for (frame, printed) in PRINTED_RESIDUALS {
        for (j, stance) in stances.iter().enumerate() {
            let row = rows
                .iter()
                .find(|r| r[ri] == frame && r[ci] == *stance)
                .ok_or_else(|| format!("no cell {frame}/{stance}"))?;
            let r: f64 = row[ai].parse().unwrap();
            let diff = (r - printed[j]).abs();
            worst = worst.max(diff);
            ensure(diff <= 0.05, || format!("{frame}/{stance}: {r:.4} vs printed {}", printed[j]))?;
            let flagged = row[si] == "true";
            ensure(flagged == (r.abs() > 3.0), || format!("{frame}/{stance}: flag {flagged} for r = {r}"))?;
            ensure(flagged == (printed[j].abs() > 3.0), || format!("{frame}/{stance}: flag disagrees with printed value"))?;
            significant += usize::from(flagged);
            checked += 1;
        }
    }
    ensure(checked == 36 && rows.len() == 36, || format!("{} cells", rows.len()))?;
    Ok(format!("36 cells, max |Δ| = {worst:.4}, {significant} significant"))
}

fn c3_virality() -> Outcome {
    ensure(virality::<f64>(0) == 1.0, || "virality(0) != 1".into())?;
    let mut prev = virality::<f64>(0);
    let mut prev_step = f64::INFINITY;
    for r in 1..=1_000_000u64 {
        let v = virality::<f64>(r);
        let step = v - prev;
        ensure(step > 0.0, || format!("not increasing at {r}"))?;
        ensure(step < prev_step, || format!("not concave at {r}"))?;
        prev = v;
        prev_step = step;
    }
    let v = virality::<f64>(128_868);
    ensure((v - 12.7665).abs() <= 1e-3, || format!("virality(128868) = {v}"))?;
    Ok(format!("virality(128868) = {v:.4}; increasing and concave on 0..=10^6"))
}

fn c4_label_model() -> Outcome {
    const ITEMS: usize = 2000;
    const LFS: usize = 13;
    const CLASSES: usize = 12;
    let start = Instant::now();
    let mut close = 0;
    let mut cells = 0;
    let mut wins = 0;
    let mut strict_wins = 0;
    let mut oracle_wins = 0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xACC0 + seed);
        let acc: Vec<f64> = (0..LFS).map(|_| rng.gen_range(0.55..0.95)).collect();
        let prop: Vec<f64> = (0..LFS).map(|_| rng.gen_range(0.3..0.9)).collect();
        let mut truth = Vec::with_capacity(ITEMS);
        let mut rows = Vec::with_capacity(ITEMS);
        for _ in 0..ITEMS {
            let y = rng.gen_range(0..CLASSES);
            let row: Vec<Option<usize>> = (0..LFS)
                .map(|j| {
                    if rng.gen::<f64>() >= prop[j] {
                        None
                    } else if rng.gen::<f64>() < acc[j] {
                        Some(y)
                    } else {
                        let w = rng.gen_range(0..CLASSES - 1);
                        Some(if w >= y { w + 1 } else { w })
                    }
                })
                .collect();
            truth.push(y);
            rows.push(row);
        }
        let votes = VoteMatrix::from_rows(CLASSES, LFS, &rows).map_err(|e| e.to_string())?;
        let config = EmConfig { seed, ..EmConfig::default() };
        let (params, trace) = em_fit_traced::<f64>(&votes, &config).map_err(|e| e.to_string())?;
        for (it, w) in trace.windows(2).enumerate() {
            ensure(w[1] >= w[0], || format!("seed {seed}: log-likelihood fell at iteration {} ({} -> {})", it + 1, w[0], w[1]))?;
        }
        for j in 0..LFS {
            cells += 1;
            close += usize::from((params.accuracy[j] - acc[j]).abs() <= 0.05);
        }
        let lm = predict(&votes, &params, 0.0);
        let lm_correct = lm.iter().zip(&truth).filter(|(p, &y)| p.decision.class() == Some(y)).count();
        let mv_correct = majority_vote(&votes).iter().zip(&truth).filter(|(p, &y)| **p == Some(y)).count();
        // Bayes-optimal decisions under the planted parameters, for reference.
        let mut planted = params.clone();
        planted.accuracy = acc.clone();
        planted.class_prior = vec![1.0 / CLASSES as f64; CLASSES];
        let oracle_correct =
            predict(&votes, &planted, 0.0).iter().zip(&truth).filter(|(p, &y)| p.decision.class() == Some(y)).count();
        wins += usize::from(lm_correct >= mv_correct);
        strict_wins += usize::from(lm_correct > mv_correct);
        oracle_wins += usize::from(oracle_correct >= mv_correct);
    }
    within_time(start, Duration::from_secs(30), "20 EM fits")?;
    let frac = close as f64 / cells as f64;
    ensure(frac >= 0.9, || format!("{close}/{cells} accuracy cells within 0.05"))?;
    ensure(wins >= 18, || {
        format!("label model at least as accurate as majority vote in {wins}/20 seeds (strictly better in {strict_wins})")
    })?;
    Ok(format!(
        "{close}/{cells} cells within 0.05 ({:.1}%), accuracy >= majority vote in {wins}/20 seeds \
         (strictly better in {strict_wins}; planted-parameter oracle >= in {oracle_wins}), monotone log-likelihood, {:.2?}",
        100.0 * frac,
        start.elapsed()
    ))
}

fn c5_coverage() -> Outcome {
    let dir = TempDir::new().unwrap();
    let phrases = dir.path().join("phrases.tsv");
    write_coverage_phrases(&phrases);
    let model = dir.path().join("model.txt");
    write_zero_frame_model(&model, 16);
    let params = dir.path().join("params.txt");
    write_params(&params);
    let out = dir.path().join("out");
    let stdout = ok(&[
        "--out-dir",
        s(&out),
        "label",
        "--phrases",
        s(&phrases),
        "--embeddings",
        s(&data("toy_embeddings.txt")),
        "--model",
        s(&model),
        "--params",
        s(&params),
    ]);
    let n = HIT_PHRASES.len() + MISS_PHRASES.len();
    let expect_model = HIT_PHRASES.len() as f64 / n as f64;
    let mf: f64 = summary(&stdout, "model_fraction").parse().unwrap();
    let ff: f64 = summary(&stdout, "fallback_fraction").parse().unwrap();
    ensure(summary(&stdout, "model_count") == HIT_PHRASES.len().to_string(), || "model count".into())?;
    ensure(summary(&stdout, "fallback_count") == MISS_PHRASES.len().to_string(), || "fallback count".into())?;
    ensure(mf == expect_model && ff == 1.0 - expect_model, || format!("fractions {mf}/{ff}"))?;

    let (header, rows) = tsv_rows(&out.join("labels.tsv"));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let (ii, fi, si) = (col("item_id"), col("frame"), col("source"));
    let ids: BTreeSet<&str> = rows.iter().map(|r| r[ii].as_str()).collect();
    ensure(rows.len() == n && ids.len() == n, || format!("{} label rows for {n} phrases", rows.len()))?;
    for r in &rows {
        r[fi].parse::<MoralFrame>().map_err(|e| format!("{}: {e}", r[ii]))?;
    }
    for (i, (_, frame)) in HIT_PHRASES.iter().enumerate() {
        ensure(rows[i][fi] == *frame && rows[i][si] == "label_model", || format!("row {i}: {:?}", rows[i]))?;
    }
    ensure(rows[HIT_PHRASES.len()..].iter().all(|r| r[si] == "fallback"), || "miss rows not on fallback".into())?;
    Ok(format!("model {mf:.2} / fallback {ff:.2} as constructed; {n} phrases, one frame each"))
}

fn random_samples(rng: &mut ChaCha8Rng, n: usize, dim: usize, classes: usize) -> Vec<Sample<f64>> {
    let normal = Normal::new(0.0, 1.0).unwrap();
    (0..n)
        .map(|i| Sample::new((0..dim).map(|_| normal.sample(rng)).collect(), i % classes))
        .collect()
}

fn c6_classifier() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let normal = Normal::new(0.0, 0.5).unwrap();
    let data = random_samples(&mut rng, 40, 4, 3);
    let mut w: Vec<Vec<f64>> = (0..3).map(|_| (0..5).map(|_| normal.sample(&mut rng)).collect()).collect();
    let l2 = 0.01;
    let (_, grad) = loss_and_gradient(&w, &data, l2);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for c in 0..3 {
        for d in 0..5 {
            let orig = w[c][d];
            w[c][d] = orig + h;
            let up = loss_and_gradient(&w, &data, l2).0;
            w[c][d] = orig - h;
            let down = loss_and_gradient(&w, &data, l2).0;
            w[c][d] = orig;
            let numeric = (up - down) / (2.0 * h);
            let rel = (grad[c][d] - numeric).abs() / grad[c][d].abs().max(numeric.abs()).max(1e-8);
            worst = worst.max(rel);
        }
    }
    ensure(worst <= 1e-5, || format!("gradient relative error {worst:e}"))?;

    let blob = Normal::new(0.0, 0.5).unwrap();
    let separable: Vec<Sample<f64>> = (0..100)
        .map(|i| {
            let (c, label) = if i % 2 == 0 { (-2.0, 0) } else { (2.0, 1) };
            Sample::new(vec![c + blob.sample(&mut rng), c + blob.sample(&mut rng)], label)
        })
        .collect();
    let hyper = Hyper { epochs: 2000, learning_rate: 0.5, l2: 0.0, seed: 0 };
    let model = train(&separable, Task::Stance, &hyper).map_err(|e| e.to_string())?;
    let correct = separable.iter().filter(|s| model.predict(&s.features) == s.label).count();
    ensure(correct == separable.len(), || format!("separable training accuracy {correct}/100"))?;

    let base = random_samples(&mut rng, 60, 3, 3);
    let perm = [2usize, 0, 1];
    let permuted: Vec<Sample<f64>> = base.iter().map(|s| Sample::new(s.features.clone(), perm[s.label])).collect();
    let hyper = Hyper::default();
    let a = train(&base, Task::Stance, &hyper).map_err(|e| e.to_string())?;
    let b = train(&permuted, Task::Stance, &hyper).map_err(|e| e.to_string())?;
    for c in 0..3 {
        ensure(a.weights[c] == b.weights[perm[c]], || format!("class {c} weights not permuted exactly"))?;
    }
    for s in &base {
        let (pa, pb) = (a.predict_proba(&s.features), b.predict_proba(&s.features));
        ensure((0..3).all(|c| pa[c] == pb[perm[c]]), || "probabilities not permuted exactly".into())?;
    }
    Ok(format!("max gradient rel. error {worst:.1e}; separable accuracy 1.0; permutation equivariance exact"))
}

/// Class totals of the annotated frame-by-stance sample, in frame order.
const ANNOTATED_FRAME_TOTALS: [(&str, usize); 12] = [
    ("Care", 1075),
    ("Harm", 523),
    ("Fairness", 19),
    ("Injustice", 27),
    ("Loyalty", 244),
    ("Betrayal", 55),
    ("Authority", 180),
    ("Subversion", 64),
    ("Purity", 43),
    ("Degradation", 7),
    ("Freedom", 126),
    ("Oppression", 64),
];

fn on_segment(p: &[f64], a: &[f64], b: &[f64]) -> bool {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let (px, py) = (p[0] - a[0], p[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return px == 0.0 && py == 0.0;
    }
    let cross = dx * py - dy * px;
    let t = (dx * px + dy * py) / len2;
    cross.abs() <= 1e-9 * len2.max(1.0) && (-1e-12..=1.0 + 1e-12).contains(&t)
}

fn c7_imbalance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut samples = Vec::new();
    for (name, n) in ANNOTATED_FRAME_TOTALS {
        let frame: MoralFrame = name.parse().unwrap();
        for _ in 0..n {
            samples.push(Sample::new(vec![rng.gen::<f64>(), rng.gen::<f64>()], frame.index()));
        }
    }
    samples.shuffle(&mut rng);
    let care = MoralFrame::Care.index();
    let reduced = undersample(&samples, care, 500, 11).map_err(|e| e.to_string())?;
    let before = class_counts(&samples);
    let after = class_counts(&reduced);
    ensure(before[&care] == 1075 && after[&care] == 500, || format!("Care {} -> {}", before[&care], after[&care]))?;
    ensure(before.iter().all(|(c, n)| *c == care || after[c] == *n), || "non-Care classes changed".into())?;

    let centres = [(0.0, 0.0, 1.0, 80), (1.5, 1.5, 0.5, 15), (-2.0, 2.0, 0.4, 6)];
    let mut pts = Vec::new();
    for (label, &(cx, cy, sd, n)) in centres.iter().enumerate() {
        let d = Normal::new(0.0, sd).unwrap();
        for _ in 0..n {
            pts.push(Sample::new(vec![cx + d.sample(&mut rng), cy + d.sample(&mut rng)], label));
        }
    }
    let k = 5;
    let targets: BTreeMap<usize, usize> = [(1, 80), (2, 80)].into_iter().collect();
    let out = adasyn_oversample(&pts, &targets, k, 21).map_err(|e| e.to_string())?;
    let counts = class_counts(&out);
    ensure(counts.values().all(|&n| n == 80) && counts.len() == 3, || format!("counts {counts:?}"))?;
    ensure(out[..pts.len()] == pts[..], || "real samples not kept first and unchanged".into())?;
    let mut synthetic = 0;
    for p in &out[pts.len()..] {
        let members: Vec<&Sample<f64>> = pts.iter().filter(|s| s.label == p.label).collect();
        let found = members.iter().any(|a| {
            let mut others: Vec<&&Sample<f64>> = members.iter().filter(|b| !std::ptr::eq(**b, *a)).collect();
            let dist = |b: &Sample<f64>| (b.features[0] - a.features[0]).powi(2) + (b.features[1] - a.features[1]).powi(2);
            others.sort_by(|x, y| dist(x).total_cmp(&dist(y)));
            others.iter().take(k).any(|b| on_segment(&p.features, &a.features, &b.features))
        });
        ensure(found, || format!("synthetic point {:?} of class {} off every neighbour segment", p.features, p.label))?;
        synthetic += 1;
    }
    Ok(format!("Care 1075 -> 500; ADASYN to 80/80/80 with {synthetic} synthetic points all on same-class neighbour segments"))
}

fn two_topic_corpus() -> Vec<TokenizedDocument> {
    let a: Vec<String> = (0..10).map(|i| format!("alpha{i}")).collect();
    let b: Vec<String> = (0..10).map(|i| format!("beta{i}")).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    (0..100)
        .map(|d| {
            let vocab = if d % 2 == 0 { &a } else { &b };
            TokenizedDocument {
                doc_id: format!("d{d}"),
                tokens: (0..30).map(|_| vocab.choose(&mut rng).unwrap().clone()).collect(),
                hashtags: Vec::new(),
            }
        })
        .collect()
}

fn c8_lda() -> Outcome {
    let start = Instant::now();
    let corpus = two_topic_corpus();
    let params = LdaParams::<f64>::with_defaults(2, 42);
    let total: u64 = corpus.iter().map(|d| d.tokens.len() as u64).sum();
    let mut freq: HashMap<&str, u64> = HashMap::new();
    for t in corpus.iter().flat_map(|d| &d.tokens) {
        *freq.entry(t).or_default() += 1;
    }
    let mut violation = None;
    let mut sweeps = 0;
    let model = lda_fit_observed(&corpus, &params, |sweep, m| {
        sweeps += 1;
        let ok = m.topic_totals.iter().sum::<u64>() == total
            && (0..m.num_topics).all(|k| m.topic_word_counts[k].iter().map(|&c| c as u64).sum::<u64>() == m.topic_totals[k])
            && m.doc_topic_counts.iter().zip(&corpus).all(|(row, d)| row.iter().map(|&c| c as usize).sum::<usize>() == d.tokens.len())
            && m.vocab.iter().enumerate().all(|(w, t)| {
                (0..m.num_topics).map(|k| m.topic_word_counts[k][w] as u64).sum::<u64>() == freq[t.as_str()]
            });
        if !ok && violation.is_none() {
            violation = Some(sweep);
        }
    })
    .map_err(|e| e.to_string())?;
    ensure(violation.is_none(), || format!("counts not conserved after sweep {violation:?}"))?;
    ensure(sweeps == params.iterations, || format!("{sweeps} sweeps observed"))?;

    let mut purities = Vec::new();
    let mut majorities = BTreeSet::new();
    for k in 0..2 {
        let words = top_words(&model, k, 10).map_err(|e| e.to_string())?.words();
        let alpha = words.iter().filter(|w| w.starts_with("alpha")).count();
        let major = alpha.max(words.len() - alpha);
        majorities.insert(alpha * 2 > words.len());
        purities.push(major as f64 / words.len() as f64);
    }
    ensure(purities.iter().all(|&p| p >= 0.9), || format!("purity {purities:?}"))?;
    ensure(majorities.len() == 2, || "both topics recovered the same vocabulary".into())?;

    let again = lda_fit(&corpus, &params).map_err(|e| e.to_string())?;
    ensure(again == model && again.to_text() == model.to_text(), || "same seed gave a different model".into())?;
    within_time(start, Duration::from_secs(60), "LDA")?;
    Ok(format!(
        "purity {:.2}/{:.2}, counts conserved over {sweeps} sweeps, bit-exact rerun, {:.2?}",
        purities[0],
        purities[1],
        start.elapsed()
    ))
}

fn c9_agreement() -> Outcome {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (x, y, n) in [(0, 0, 20), (0, 1, 5), (1, 0, 10), (1, 1, 15)] {
        a.extend(std::iter::repeat_n(x, n));
        b.extend(std::iter::repeat_n(y, n));
    }
    let kappa: f64 = cohen_kappa(&a, &b).map_err(|e| e.to_string())?;
    ensure((kappa - 0.4).abs() <= 1e-12, || format!("kappa = {kappa}"))?;
    let exact = cohen_kappa_exact(&a, &b).map_err(|e| e.to_string())?;
    ensure(exact == Ratio::new(2, 5), || format!("exact kappa = {exact}"))?;

    let units: Vec<Vec<&str>> = ["Care", "Harm", "Care", "Freedom", "Oppression", "Harm"]
        .iter()
        .enumerate()
        .map(|(i, l)| vec![*l; 2 + i % 3])
        .collect();
    let alpha: f64 = krippendorff_alpha(&units).map_err(|e| e.to_string())?;
    ensure(alpha == 1.0, || format!("alpha = {alpha} under perfect agreement"))?;

    let mut worst: f64 = 0.0;
    for seed in 0..5 {
        let mut rng = ChaCha8Rng::seed_from_u64(900 + seed);
        let r1: Vec<u8> = (0..10_000).map(|_| rng.gen_range(0..3)).collect();
        let r2: Vec<u8> = (0..10_000).map(|_| rng.gen_range(0..3)).collect();
        let k: f64 = cohen_kappa(&r1, &r2).map_err(|e| e.to_string())?;
        worst = worst.max(k.abs());
    }
    ensure(worst < 0.05, || format!("independent raters |kappa| = {worst}"))?;
    Ok(format!("kappa = {kappa} (exact 2/5), alpha = 1 on perfect agreement, independent |kappa| <= {worst:.4}"))
}

fn c10_sentiment() -> Outcome {
    ensure(label_for(0.25f64) == SentimentLabel::Neutral, || "0.25 not Neutral".into())?;
    ensure(label_for(-0.25f64) == SentimentLabel::Neutral, || "-0.25 not Neutral".into())?;
    ensure(label_for(0.25f64 + 1e-12) == SentimentLabel::Positive, || "just above 0.25 not Positive".into())?;
    ensure(label_for(-0.25f64 - 1e-12) == SentimentLabel::Negative, || "just below -0.25 not Negative".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let x: f64 = rng.gen_range(-100.0..100.0);
        worst = worst.max((normalize(-x) + normalize(x)).abs());
    }
    let lex = ValenceLexicon::<f64>::demo();
    let flipped = lex.negated();
    let mut vocab: Vec<String> = lex.valence.keys().chain(&lex.negations).chain(lex.boosters.keys()).cloned().collect();
    vocab.extend(["the", "lockdown", "today", "people"].map(String::from));
    vocab.sort();
    for _ in 0..5_000 {
        let n = rng.gen_range(1..16);
        let tokens: Vec<String> = (0..n).map(|_| vocab.choose(&mut rng).unwrap().clone()).collect();
        worst = worst.max((score(&tokens, &flipped).compound + score(&tokens, &lex).compound).abs());
    }
    ensure(worst <= 1e-12, || format!("oddness violated by {worst:e}"))?;
    Ok(format!("+/-0.25 -> Neutral; oddness max deviation {worst:.1e}"))
}

fn c11_regression() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let x_dist = Normal::new(0.0, 1.0).unwrap();
    let noise = Normal::new(0.0, 0.1).unwrap();
    let n = 10_000;
    let names = vec!["x".to_owned()];
    let xs: Vec<Vec<f64>> = (0..n).map(|_| vec![x_dist.sample(&mut rng)]).collect();
    let y: Vec<f64> = xs.iter().map(|x| 1.0 + 0.5 * x[0] + noise.sample(&mut rng)).collect();
    let fit = fit_regression(RegressionKind::Linear, &xs, &y, &names).map_err(|e| e.to_string())?;
    let (b, c) = (fit.coefficient("x").unwrap(), fit.coefficient("intercept").unwrap());
    ensure((b - 0.5).abs() <= 0.01 && (c - 1.0).abs() <= 0.01, || format!("beta = {b}, intercept = {c}"))?;
    ensure(fit.p_values.iter().all(|&p| p < 1e-6), || format!("p-values {:?}", fit.p_values))?;

    let yl: Vec<f64> = xs
        .iter()
        .map(|x| {
            let p = 1.0 / (1.0 + (-(1.0 + 0.5 * x[0])).exp());
            f64::from(u8::from(rng.gen::<f64>() < p))
        })
        .collect();
    let logit = fit_regression(RegressionKind::Logistic, &xs, &yl, &names).map_err(|e| e.to_string())?;
    ensure(logit.converged, || "IRLS did not converge".into())?;
    let (lb, lc) = (logit.coefficient("x").unwrap(), logit.coefficient("intercept").unwrap());
    let mut score_x = 0.0;
    let mut score_c = 0.0;
    for (x, &yi) in xs.iter().zip(&yl) {
        let r = yi - 1.0 / (1.0 + (-(lc + lb * x[0])).exp());
        score_x += r * x[0];
        score_c += r;
    }
    ensure(score_x.abs() <= 1e-6 && score_c.abs() <= 1e-6, || format!("score equations {score_x:e}, {score_c:e}"))?;
    Ok(format!(
        "linear beta = {b:.4}, intercept = {c:.4}, max p = {:.1e}; logistic score residuals {:.1e}, {:.1e}",
        fit.p_values.iter().cloned().fold(0.0, f64::max),
        score_x.abs(),
        score_c.abs()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("chi-square reproduction", c1_chi_square),
        ("adjusted residuals", c2_residuals),
        ("virality formula", c3_virality),
        ("label-model recovery", c4_label_model),
        ("pipeline coverage accounting", c5_coverage),
        ("classifier correctness", c6_classifier),
        ("imbalance treatments", c7_imbalance),
        ("LDA sanity", c8_lda),
        ("agreement metrics", c9_agreement),
        ("sentiment trichotomy", c10_sentiment),
        ("regression recovery", c11_regression),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
