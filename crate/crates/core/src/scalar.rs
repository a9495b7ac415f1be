//! Floating-point abstraction shared by the numeric modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar used throughout the numeric code: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize is representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Sum in a fixed order that does not depend on the order of `values`.
///
/// Values are sorted (total order) before accumulation, so any permutation of
/// the same multiset produces a bit-identical result.
pub fn order_independent_sum<F: Scalar>(values: &mut [F]) -> F {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    values.iter().fold(F::zero(), |acc, &v| acc + v)
}

/// `ln(Σ exp(x_i))` with max-shifting.
pub fn log_sum_exp<F: Scalar>(values: &[F]) -> F {
    let max = values.iter().copied().fold(F::neg_infinity(), F::max);
    if max == F::neg_infinity() {
        return max;
    }
    let s: F = values.iter().map(|&v| (v - max).exp()).sum();
    max + s.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_is_permutation_invariant() {
        let mut a = vec![1e16_f64, 1.0, -1e16, 3.5, 1e-3];
        let mut b = vec![3.5_f64, -1e16, 1e-3, 1.0, 1e16];
        assert_eq!(order_independent_sum(&mut a).to_bits(), order_independent_sum(&mut b).to_bits());
    }

    #[test]
    fn lse_matches_naive() {
        let v = [0.1_f64, -2.0, 1.5];
        let naive = v.iter().map(|x| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&v) - naive).abs() < 1e-12);
        assert_eq!(log_sum_exp::<f64>(&[f64::NEG_INFINITY]), f64::NEG_INFINITY);
    }
}
