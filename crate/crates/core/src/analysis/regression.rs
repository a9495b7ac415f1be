use std::fmt::Write as _;
use std::str::FromStr;

use super::linalg::least_squares;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::special::{normal_two_sided, student_t_two_sided};

pub const MAX_IRLS_ITERATIONS: usize = 100;
pub const IRLS_TOLERANCE: f64 = 1e-8;
/// Coefficient magnitude above which a logistic fit is reported as
/// quasi-separated.
pub const SEPARATION_BOUND: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegressionKind {
    Linear,
    Logistic,
}

impl FromStr for RegressionKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" | "ols" => Ok(RegressionKind::Linear),
            "logistic" | "logit" => Ok(RegressionKind::Logistic),
            other => Err(format!("unknown regression kind {other:?}")),
        }
    }
}

/// Coefficients are listed per predictor in input order, intercept last.
/// `statistics` holds t values for linear fits and Wald z values for
/// logistic fits.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit<F> {
    pub kind: RegressionKind,
    pub names: Vec<String>,
    pub coefficients: Vec<F>,
    pub std_errors: Vec<F>,
    pub statistics: Vec<F>,
    pub p_values: Vec<F>,
    pub n: usize,
    /// Residual degrees of freedom for linear fits.
    pub df: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Coefficient of determination (linear) or maximized log-likelihood
    /// (logistic).
    pub fit_statistic: F,
    pub warnings: Vec<String>,
}

impl<F: Scalar> RegressionFit<F> {
    pub fn coefficient(&self, name: &str) -> Option<F> {
        self.names.iter().position(|n| n == name).map(|i| self.coefficients[i])
    }

    pub fn to_tsv(&self) -> String {
        let stat = match self.kind {
            RegressionKind::Linear => "t",
            RegressionKind::Logistic => "z",
        };
        let mut s = format!("term\tbeta\tstd_error\t{stat}\tp_value\n");
        for i in 0..self.names.len() {
            writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}",
                self.names[i], self.coefficients[i], self.std_errors[i], self.statistics[i], self.p_values[i]
            )
            .unwrap();
        }
        s
    }
}

fn sigmoid<F: Scalar>(z: F) -> F {
    if z >= F::zero() {
        F::one() / (F::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (F::one() + e)
    }
}

/// `y·η − ln(1 + e^η)` summed.
fn log_likelihood<F: Scalar>(eta: &[F], y: &[F]) -> F {
    eta.iter()
        .zip(y)
        .map(|(&e, &yi)| yi * e - (e.max(F::zero()) + (-e.abs()).exp().ln_1p()))
        .sum()
}

fn linear_predictor<F: Scalar>(columns: &[Vec<F>], beta: &[F], n: usize) -> Vec<F> {
    (0..n).map(|i| columns.iter().zip(beta).map(|(c, b)| c[i] * *b).sum()).collect()
}

/// Fit `y` on the rows of `x` plus an intercept.
///
/// Linear fits use QR least squares with t-tests on `n − p − 1` degrees of
/// freedom. Logistic fits use Newton/IRLS from zero with step halving, stop
/// once the Newton increment is below 1e-8 in every coefficient, and report Wald z-tests.
pub fn fit_regression<F: Scalar>(kind: RegressionKind, x: &[Vec<F>], y: &[F], names: &[String]) -> Result<RegressionFit<F>> {
    let n = y.len();
    if x.len() != n {
        return Err(Error::LengthMismatch(x.len(), n));
    }
    let p = x.first().map_or(0, Vec::len);
    if names.len() != p {
        return Err(Error::LengthMismatch(names.len(), p));
    }
    if let Some(row) = x.iter().find(|r| r.len() != p) {
        return Err(Error::LengthMismatch(row.len(), p));
    }
    if n <= p + 1 {
        return Err(Error::TooFewSamples(format!("{n} observations for {} coefficients", p + 1)));
    }
    let mut columns: Vec<Vec<F>> = (0..p).map(|j| x.iter().map(|r| r[j]).collect()).collect();
    for (j, col) in columns.iter().enumerate() {
        if col.iter().all(|v| *v == col[0]) {
            return Err(Error::SingularDesign(format!("{} is constant", names[j])));
        }
    }
    columns.push(vec![F::one(); n]);
    let mut all_names = names.to_vec();
    all_names.push("intercept".to_owned());
    match kind {
        RegressionKind::Linear => fit_linear(columns, y, all_names),
        RegressionKind::Logistic => fit_logistic(columns, y, all_names),
    }
}

fn fit_linear<F: Scalar>(columns: Vec<Vec<F>>, y: &[F], names: Vec<String>) -> Result<RegressionFit<F>> {
    let n = y.len();
    let k = columns.len();
    let ls = least_squares(&columns, y, &names)?;
    let fitted = linear_predictor(&columns, &ls.beta, n);
    let rss: F = y.iter().zip(&fitted).map(|(a, b)| (*a - *b) * (*a - *b)).sum();
    let mean = y.iter().copied().sum::<F>() / F::of_usize(n);
    let tss: F = y.iter().map(|v| (*v - mean) * (*v - mean)).sum();
    let df = n - k;
    let sigma2 = rss / F::of_usize(df);
    let std_errors: Vec<F> = ls.unscaled_variances().into_iter().map(|v| (sigma2 * v).sqrt()).collect();
    let statistics: Vec<F> = ls.beta.iter().zip(&std_errors).map(|(b, s)| *b / *s).collect();
    let p_values = statistics.iter().map(|t| student_t_two_sided(*t, F::of_usize(df))).collect();
    let r2 = if tss > F::zero() { F::one() - rss / tss } else { F::one() };
    Ok(RegressionFit {
        kind: RegressionKind::Linear,
        names,
        coefficients: ls.beta,
        std_errors,
        statistics,
        p_values,
        n,
        df,
        iterations: 1,
        converged: true,
        fit_statistic: r2,
        warnings: Vec::new(),
    })
}

fn fit_logistic<F: Scalar>(columns: Vec<Vec<F>>, y: &[F], names: Vec<String>) -> Result<RegressionFit<F>> {
    let n = y.len();
    let k = columns.len();
    if y.iter().any(|v| *v != F::zero() && *v != F::one()) {
        return Err(Error::InvalidRecord("logistic outcome must be 0 or 1".into()));
    }
    let floor = F::of(1e-12);
    let tol = F::of(IRLS_TOLERANCE);
    let slack = F::epsilon() * F::of_usize(n);
    let mut beta = vec![F::zero(); k];
    let mut eta = vec![F::zero(); n];
    let mut ll = log_likelihood(&eta, y);
    let mut iterations = 0;
    let mut converged = false;
    let mut weighted = vec![vec![F::zero(); n]; k];
    while iterations < MAX_IRLS_ITERATIONS {
        iterations += 1;
        let mut rhs = vec![F::zero(); n];
        for i in 0..n {
            let mu = sigmoid(eta[i]);
            let sw = (mu * (F::one() - mu)).max(floor).sqrt();
            for (wc, c) in weighted.iter_mut().zip(&columns) {
                wc[i] = c[i] * sw;
            }
            rhs[i] = (y[i] - mu) / sw;
        }
        let delta = least_squares(&weighted, &rhs, &names)?.beta;
        let mut step = F::one();
        let (next, next_eta, next_ll) = loop {
            let cand: Vec<F> = beta.iter().zip(&delta).map(|(b, d)| *b + step * *d).collect();
            let cand_eta = linear_predictor(&columns, &cand, n);
            let cand_ll = log_likelihood(&cand_eta, y);
            // Differences below the summation rounding of the log-likelihood
            // carry no sign information; do not halve on them.
            if cand_ll >= ll - slack * (F::one() + ll.abs()) || step < F::of(1e-10) {
                break (cand, cand_eta, cand_ll);
            }
            step *= F::of(0.5);
        };
        // Convergence is judged on the full Newton increment.
        let moved = delta.iter().map(|d| d.abs()).fold(F::zero(), F::max);
        beta = next;
        eta = next_eta;
        ll = next_ll;
        if moved < tol {
            converged = true;
            break;
        }
    }
    for i in 0..n {
        let mu = sigmoid(eta[i]);
        let sw = (mu * (F::one() - mu)).max(floor).sqrt();
        for (wc, c) in weighted.iter_mut().zip(&columns) {
            wc[i] = c[i] * sw;
        }
    }
    let info = least_squares(&weighted, &vec![F::zero(); n], &names)?;
    let std_errors: Vec<F> = info.unscaled_variances().into_iter().map(F::sqrt).collect();
    let statistics: Vec<F> = beta.iter().zip(&std_errors).map(|(b, s)| *b / *s).collect();
    let p_values = statistics.iter().map(|z| normal_two_sided(*z)).collect();
    let mut warnings = Vec::new();
    if !converged {
        warnings.push(format!("no convergence after {MAX_IRLS_ITERATIONS} iterations"));
    }
    for (name, b) in names.iter().zip(&beta) {
        if b.abs() > F::of(SEPARATION_BOUND) {
            warnings.push(format!("|beta| of {name} exceeds {SEPARATION_BOUND}; possible quasi-separation"));
        }
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(RegressionFit {
        kind: RegressionKind::Logistic,
        names,
        coefficients: beta,
        std_errors,
        statistics,
        p_values,
        n,
        df: n - k,
        iterations,
        converged,
        fit_statistic: ll,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn exact_linear_fit() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 * 0.5]).collect();
        let y: Vec<f64> = x.iter().map(|r| 2.0 * r[0] + 1.0).collect();
        let fit = fit_regression(RegressionKind::Linear, &x, &y, &names(&["x"])).unwrap();
        assert!((fit.coefficients[0] - 2.0).abs() < 1e-9);
        assert!((fit.coefficients[1] - 1.0).abs() < 1e-9);
        assert_eq!(fit.coefficient("intercept"), Some(fit.coefficients[1]));
    }

    #[test]
    fn residuals_are_orthogonal_to_predictors() {
        let x: Vec<Vec<f64>> = (0..50).map(|i| vec![(i as f64).sin(), (i as f64 * 0.3).cos() + 0.1 * i as f64]).collect();
        let y: Vec<f64> = (0..50).map(|i| ((i * 7919) % 97) as f64 / 10.0).collect();
        let fit = fit_regression(RegressionKind::Linear, &x, &y, &names(&["a", "b"])).unwrap();
        let resid: Vec<f64> =
            x.iter().zip(&y).map(|(r, v)| v - (fit.coefficients[0] * r[0] + fit.coefficients[1] * r[1] + fit.coefficients[2])).collect();
        for j in 0..2 {
            let dot: f64 = resid.iter().zip(&x).map(|(e, r)| e * r[j]).sum();
            assert!(dot.abs() < 1e-8, "column {j}: {dot}");
        }
        assert!(resid.iter().sum::<f64>().abs() < 1e-8);
        assert!(fit.p_values.iter().all(|p| (0.0..=1.0).contains(p)));
    }

    #[test]
    fn singular_designs_rejected() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 3.0]).collect();
        let y = vec![0.0; 10];
        assert!(matches!(fit_regression(RegressionKind::Linear, &x, &y, &names(&["a", "c"])), Err(Error::SingularDesign(_))));
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 2.0 * i as f64 + 1.0]).collect();
        assert!(matches!(fit_regression(RegressionKind::Linear, &x, &y, &names(&["a", "b"])), Err(Error::SingularDesign(_))));
    }

    #[test]
    fn symmetric_logistic_has_zero_intercept() {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in -10..=10 {
            for (label, count) in [(1.0, 10 + i), (0.0, 10 - i)] {
                for _ in 0..count {
                    x.push(vec![i as f64 / 5.0]);
                    y.push(label);
                }
            }
        }
        let fit = fit_regression(RegressionKind::Logistic, &x, &y, &names(&["x"])).unwrap();
        assert!(fit.converged);
        assert!(fit.coefficients[1].abs() < 1e-9);
        assert!(fit.coefficients[0] > 0.0);
        assert!(fit.warnings.is_empty());
    }

    #[test]
    fn separation_is_a_warning() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..20).map(|i| f64::from(i >= 10)).collect();
        let fit = fit_regression(RegressionKind::Logistic, &x, &y, &names(&["x"])).unwrap();
        assert!(!fit.warnings.is_empty());
    }
}
