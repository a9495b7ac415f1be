use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Least-squares solution of `X β ≈ y` by Householder QR.
#[derive(Debug, Clone)]
pub(crate) struct LeastSquares<F> {
    pub beta: Vec<F>,
    /// Inverse of the triangular factor, row-major `k × k`. Then
    /// `(XᵀX)⁻¹ = R⁻¹ R⁻ᵀ`.
    pub r_inv: Vec<Vec<F>>,
}

impl<F: Scalar> LeastSquares<F> {
    /// Diagonal of `(XᵀX)⁻¹`.
    pub fn unscaled_variances(&self) -> Vec<F> {
        self.r_inv.iter().map(|row| row.iter().map(|v| *v * *v).sum()).collect()
    }
}

/// `columns` holds the design column-major; all columns have length `n ≥ k`.
/// A column whose component orthogonal to the earlier ones is negligible
/// relative to its own norm makes the design singular.
#[allow(clippy::needless_range_loop)]
pub(crate) fn least_squares<F: Scalar>(columns: &[Vec<F>], y: &[F], names: &[String]) -> Result<LeastSquares<F>> {
    let k = columns.len();
    let n = y.len();
    if n < k {
        return Err(Error::TooFewSamples(format!("{n} rows for {k} coefficients")));
    }
    let mut a: Vec<Vec<F>> = columns.to_vec();
    let mut b = y.to_vec();
    let tol = F::epsilon().sqrt();
    let mut diag = vec![F::zero(); k];
    for j in 0..k {
        let original: F = columns[j].iter().map(|v| *v * *v).sum::<F>().sqrt();
        let norm: F = a[j][j..].iter().map(|v| *v * *v).sum::<F>().sqrt();
        if original == F::zero() || norm <= tol * original {
            return Err(Error::SingularDesign(names.get(j).cloned().unwrap_or_else(|| format!("column {j}"))));
        }
        let alpha = if a[j][j] > F::zero() { -norm } else { norm };
        let mut v: Vec<F> = a[j][j..].to_vec();
        v[0] -= alpha;
        let vv: F = v.iter().map(|x| *x * *x).sum();
        let reflect = |col: &mut [F]| {
            let s = F::of(2.0) * v.iter().zip(col.iter()).map(|(p, q)| *p * *q).sum::<F>() / vv;
            col.iter_mut().zip(&v).for_each(|(c, vi)| *c -= s * *vi);
        };
        for col in a.iter_mut().skip(j + 1) {
            reflect(&mut col[j..]);
        }
        reflect(&mut b[j..]);
        diag[j] = alpha;
        a[j][j] = alpha;
    }
    let r = |i: usize, j: usize| if i == j { diag[i] } else { a[j][i] };
    let mut beta = vec![F::zero(); k];
    for i in (0..k).rev() {
        let mut s = b[i];
        for j in i + 1..k {
            s -= r(i, j) * beta[j];
        }
        beta[i] = s / r(i, i);
    }
    let mut r_inv = vec![vec![F::zero(); k]; k];
    for c in 0..k {
        for i in (0..=c).rev() {
            let mut s = if i == c { F::one() } else { F::zero() };
            for j in i + 1..=c {
                s -= r(i, j) * r_inv[j][c];
            }
            r_inv[i][c] = s / r(i, i);
        }
    }
    Ok(LeastSquares { beta, r_inv })
}
