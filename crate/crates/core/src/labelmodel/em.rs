use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::votes::VoteMatrix;
use crate::corpus::MoralFrame;
use crate::error::{Error, Result};
use crate::scalar::{log_sum_exp, Scalar};

/// Accuracy clamp: estimates stay in `[ACCURACY_EPS, 1 − ACCURACY_EPS]`.
pub const ACCURACY_EPS: f64 = 1e-4;
const INIT_ACCURACY: f64 = 0.7;
const INIT_JITTER: f64 = 0.05;
const PARAMS_MAGIC: &str = "# label-model-params v1";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmConfig<F> {
    pub max_iter: usize,
    /// Stop once the log-likelihood gain of an iteration drops below this.
    pub tol: F,
    /// Seeds the accuracy initialization jitter.
    pub seed: u64,
}

impl<F: Scalar> Default for EmConfig<F> {
    fn default() -> Self {
        EmConfig { max_iter: 200, tol: F::of(1e-8), seed: 0 }
    }
}

/// Fitted one-coin Dawid–Skene parameters.
///
/// Labeling function `j` votes with probability `propensity[j]`; a vote is
/// correct with probability `accuracy[j]` and otherwise uniform over the
/// remaining classes.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelModelParams<F> {
    pub class_prior: Vec<F>,
    pub accuracy: Vec<F>,
    pub propensity: Vec<F>,
    pub em_iterations_run: usize,
    pub log_likelihood: F,
}

impl<F: Scalar> LabelModelParams<F> {
    pub fn num_classes(&self) -> usize {
        self.class_prior.len()
    }

    pub fn num_lfs(&self) -> usize {
        self.accuracy.len()
    }

    /// `key=value` lines with round-trip precision.
    pub fn to_text(&self) -> String {
        let mut s = format!("{PARAMS_MAGIC}\n");
        writeln!(s, "num_classes={}", self.num_classes()).unwrap();
        writeln!(s, "num_lfs={}", self.num_lfs()).unwrap();
        writeln!(s, "em_iterations_run={}", self.em_iterations_run).unwrap();
        writeln!(s, "log_likelihood={}", self.log_likelihood).unwrap();
        for (k, p) in self.class_prior.iter().enumerate() {
            writeln!(s, "class_prior.{k}={p}").unwrap();
        }
        for (j, a) in self.accuracy.iter().enumerate() {
            writeln!(s, "accuracy.{j}={a}").unwrap();
        }
        for (j, p) in self.propensity.iter().enumerate() {
            writeln!(s, "propensity.{j}={p}").unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut num_classes = None;
        let mut num_lfs = None;
        let mut iters = 0usize;
        let mut ll = F::zero();
        let mut entries: Vec<(String, usize, f64, usize)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |m: &str| Error::Parse { line: i + 1, message: m.to_owned() };
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad("bad number"));
            match key.trim() {
                "num_classes" => num_classes = Some(num(value)? as usize),
                "num_lfs" => num_lfs = Some(num(value)? as usize),
                "em_iterations_run" => iters = num(value)? as usize,
                "log_likelihood" => ll = F::of(num(value)?),
                other => {
                    let (name, idx) = other.split_once('.').ok_or_else(|| bad("unknown key"))?;
                    let idx: usize = idx.parse().map_err(|_| bad("bad index"))?;
                    entries.push((name.to_owned(), idx, num(value)?, i + 1));
                }
            }
        }
        let c = num_classes.ok_or(Error::Parse { line: 0, message: "missing num_classes".into() })?;
        let m = num_lfs.ok_or(Error::Parse { line: 0, message: "missing num_lfs".into() })?;
        let mut p = LabelModelParams {
            class_prior: vec![F::nan(); c],
            accuracy: vec![F::nan(); m],
            propensity: vec![F::nan(); m],
            em_iterations_run: iters,
            log_likelihood: ll,
        };
        for (name, idx, v, line) in entries {
            let slot = match name.as_str() {
                "class_prior" => p.class_prior.get_mut(idx),
                "accuracy" => p.accuracy.get_mut(idx),
                "propensity" => p.propensity.get_mut(idx),
                _ => None,
            };
            *slot.ok_or(Error::Parse { line, message: format!("unexpected key {name}.{idx}") })? = F::of(v);
        }
        if p.class_prior.iter().chain(&p.accuracy).chain(&p.propensity).any(|x| x.is_nan()) {
            return Err(Error::Parse { line: 0, message: "incomplete parameter file".into() });
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelDecision {
    Class(usize),
    Abstain,
}

impl LabelDecision {
    pub fn class(self) -> Option<usize> {
        match self {
            LabelDecision::Class(k) => Some(k),
            LabelDecision::Abstain => None,
        }
    }

    pub fn frame(self) -> Option<MoralFrame> {
        self.class().and_then(MoralFrame::from_index)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilisticLabel<F> {
    pub item: usize,
    pub posterior: Vec<F>,
    pub decision: LabelDecision,
}

/// Per-item log joint `ln π_k + Σ_j ln P(v_ij | k)` for every class, leaving
/// out the abstention and propensity factors (constant in `k`).
fn log_joint<F: Scalar>(votes: &VoteMatrix, item: usize, log_prior: &[F], log_right: &[F], log_wrong: &[F], out: &mut [F]) {
    out.copy_from_slice(log_prior);
    for (j, v) in votes.row(item).enumerate() {
        if let Some(v) = v {
            for (k, o) in out.iter_mut().enumerate() {
                *o += if k == v { log_right[j] } else { log_wrong[j] };
            }
        }
    }
}

struct EStep<F> {
    posteriors: Vec<Vec<F>>,
    log_likelihood: F,
}

fn e_step<F: Scalar>(votes: &VoteMatrix, p: &LabelModelParams<F>) -> EStep<F> {
    let c = votes.num_classes();
    let wrong_share = F::of_usize(c - 1);
    let log_prior: Vec<F> = p.class_prior.iter().map(|x| x.ln()).collect();
    let log_right: Vec<F> = p.accuracy.iter().map(|a| a.ln()).collect();
    let log_wrong: Vec<F> = p.accuracy.iter().map(|&a| ((F::one() - a) / wrong_share).ln()).collect();
    let log_vote: Vec<F> = p.propensity.iter().map(|x| x.ln()).collect();
    let log_abstain: Vec<F> =
        p.propensity.iter().map(|&x| if x >= F::one() { F::neg_infinity() } else { (F::one() - x).ln() }).collect();

    let mut posteriors = Vec::with_capacity(votes.num_items());
    let mut ll = F::zero();
    let mut buf = vec![F::zero(); c];
    for i in 0..votes.num_items() {
        log_joint(votes, i, &log_prior, &log_right, &log_wrong, &mut buf);
        let lse = log_sum_exp(&buf);
        let mut evidence = lse;
        for (j, v) in votes.row(i).enumerate() {
            evidence += if v.is_some() { log_vote[j] } else { log_abstain[j] };
        }
        ll += evidence;
        posteriors.push(buf.iter().map(|&x| (x - lse).exp()).collect());
    }
    EStep { posteriors, log_likelihood: ll }
}

fn m_step<F: Scalar>(votes: &VoteMatrix, q: &[Vec<F>], propensity: &[F]) -> LabelModelParams<F> {
    let n = F::of_usize(votes.num_items());
    let c = votes.num_classes();
    let mut prior = vec![F::zero(); c];
    for row in q {
        for (k, &x) in row.iter().enumerate() {
            prior[k] += x;
        }
    }
    prior.iter_mut().for_each(|x| *x /= n);

    let lo = F::of(ACCURACY_EPS);
    let hi = F::one() - lo;
    let mut right = vec![F::zero(); votes.num_lfs()];
    let mut cast = vec![0usize; votes.num_lfs()];
    for (i, qi) in q.iter().enumerate() {
        for (j, v) in votes.row(i).enumerate() {
            if let Some(v) = v {
                right[j] += qi[v];
                cast[j] += 1;
            }
        }
    }
    let accuracy = right
        .iter()
        .zip(&cast)
        .map(|(&r, &n_j)| if n_j == 0 { F::of(INIT_ACCURACY) } else { (r / F::of_usize(n_j)).max(lo).min(hi) })
        .collect();
    LabelModelParams {
        class_prior: prior,
        accuracy,
        propensity: propensity.to_vec(),
        em_iterations_run: 0,
        log_likelihood: F::neg_infinity(),
    }
}

/// Empirical vote rates, floored at ε so a silent function keeps a finite
/// log-likelihood.
fn empirical_propensity<F: Scalar>(votes: &VoteMatrix) -> Vec<F> {
    let n = F::of_usize(votes.num_items());
    (0..votes.num_lfs())
        .map(|j| {
            let cast = (0..votes.num_items()).filter(|&i| votes.get(i, j).is_some()).count();
            (F::of_usize(cast) / n).max(F::of(ACCURACY_EPS))
        })
        .collect()
}

pub fn em_fit<F: Scalar>(votes: &VoteMatrix, config: &EmConfig<F>) -> Result<LabelModelParams<F>> {
    em_fit_traced(votes, config).map(|(p, _)| p)
}

/// [`em_fit`] also returning the log-likelihood after initialization and
/// after every accepted iteration. Iteration stops at `max_iter`, when the
/// gain drops below `tol`, or before an iterate that would lower it.
pub fn em_fit_traced<F: Scalar>(votes: &VoteMatrix, config: &EmConfig<F>) -> Result<(LabelModelParams<F>, Vec<F>)> {
    if votes.num_items() == 0 {
        return Err(Error::DegenerateInput("vote matrix has no items".into()));
    }
    if votes.all_abstain() {
        return Err(Error::DegenerateInput("every labeling function abstains on every item".into()));
    }
    let c = votes.num_classes();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let propensity = empirical_propensity(votes);
    let mut params = LabelModelParams {
        class_prior: vec![F::one() / F::of_usize(c); c],
        accuracy: (0..votes.num_lfs())
            .map(|_| F::of(INIT_ACCURACY + rng.gen_range(-INIT_JITTER..INIT_JITTER)))
            .collect(),
        propensity: propensity.clone(),
        em_iterations_run: 0,
        log_likelihood: F::neg_infinity(),
    };

    let mut e = e_step(votes, &params);
    let mut trace = vec![e.log_likelihood];
    params.log_likelihood = e.log_likelihood;
    for it in 1..=config.max_iter {
        let mut next = m_step(votes, &e.posteriors, &propensity);
        let e_next = e_step(votes, &next);
        let gain = e_next.log_likelihood - e.log_likelihood;
        if gain < F::zero() {
            // EM cannot lower the likelihood; a drop is rounding at the fixed
            // point. Keep the better iterate and stop.
            break;
        }
        next.em_iterations_run = it;
        next.log_likelihood = e_next.log_likelihood;
        trace.push(e_next.log_likelihood);
        params = next;
        e = e_next;
        if gain < config.tol {
            break;
        }
    }
    Ok((params, trace))
}

/// Row-wise posterior and decision. An item abstains when every function
/// abstains or the top posterior is below `tau`; ties go to the lowest class.
pub fn predict<F: Scalar>(votes: &VoteMatrix, params: &LabelModelParams<F>, tau: F) -> Vec<ProbabilisticLabel<F>> {
    let c = votes.num_classes();
    let wrong_share = F::of_usize(c - 1);
    let log_prior: Vec<F> = params.class_prior.iter().map(|x| x.ln()).collect();
    let log_right: Vec<F> = params.accuracy.iter().map(|a| a.ln()).collect();
    let log_wrong: Vec<F> = params.accuracy.iter().map(|&a| ((F::one() - a) / wrong_share).ln()).collect();
    let mut buf = vec![F::zero(); c];
    (0..votes.num_items())
        .map(|i| {
            if votes.row(i).all(|v| v.is_none()) {
                return ProbabilisticLabel { item: i, posterior: params.class_prior.clone(), decision: LabelDecision::Abstain };
            }
            log_joint(votes, i, &log_prior, &log_right, &log_wrong, &mut buf);
            let lse = log_sum_exp(&buf);
            let posterior: Vec<F> = buf.iter().map(|&x| (x - lse).exp()).collect();
            let (best, &top) = posterior
                .iter()
                .enumerate()
                .fold((0, &posterior[0]), |acc, (k, p)| if *p > *acc.1 { (k, p) } else { acc });
            let decision = if top >= tau { LabelDecision::Class(best) } else { LabelDecision::Abstain };
            ProbabilisticLabel { item: i, posterior, decision }
        })
        .collect()
}

/// Plurality of non-abstain votes per item; ties go to the lowest class.
pub fn majority_vote(votes: &VoteMatrix) -> Vec<Option<usize>> {
    let mut counts = vec![0usize; votes.num_classes()];
    (0..votes.num_items())
        .map(|i| {
            counts.iter_mut().for_each(|c| *c = 0);
            for v in votes.row(i).flatten() {
                counts[v] += 1;
            }
            let (best, &n) = counts.iter().enumerate().fold((0, &0), |acc, (k, c)| if *c > *acc.1 { (k, c) } else { acc });
            (n > 0).then_some(best)
        })
        .collect()
}
