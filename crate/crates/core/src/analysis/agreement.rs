use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

type Q = Ratio<i128>;

/// Cohen's κ as an exact fraction: `(N·agree − Σ a_k b_k)/(N² − Σ a_k b_k)`
/// where `a_k`, `b_k` are the two raters' marginal counts.
pub fn cohen_kappa_exact<T: Ord>(a: &[T], b: &[T]) -> Result<Q> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(Error::InsufficientRatings);
    }
    let n = a.len() as i128;
    let mut marginals: BTreeMap<&T, (i128, i128)> = BTreeMap::new();
    let mut agree = 0i128;
    for (x, y) in a.iter().zip(b) {
        marginals.entry(x).or_default().0 += 1;
        marginals.entry(y).or_default().1 += 1;
        agree += i128::from(x == y);
    }
    let chance: i128 = marginals.values().map(|(p, q)| p * q).sum();
    if chance == n * n {
        return if agree == n { Ok(Q::from_integer(1)) } else { Err(Error::DegenerateMarginals) };
    }
    Ok(Q::new(n * agree - chance, n * n - chance))
}

pub fn cohen_kappa<T: Ord, F: Scalar>(a: &[T], b: &[T]) -> Result<F> {
    cohen_kappa_exact(a, b).map(|q| F::of(q.to_f64().unwrap_or(f64::NAN)))
}

/// Turn a coder-by-item grid with missing ratings into per-item rating lists.
pub fn units_from_coders<T: Clone>(coders: &[Vec<Option<T>>]) -> Vec<Vec<T>> {
    let items = coders.iter().map(Vec::len).max().unwrap_or(0);
    (0..items)
        .map(|i| coders.iter().filter_map(|c| c.get(i).cloned().flatten()).collect())
        .collect()
}

/// Nominal Krippendorff α as an exact fraction, from per-item rating lists.
///
/// Only items with at least two ratings are pairable. With `o` the
/// coincidence matrix, `n_c` its marginals and `n` the number of pairable
/// values, `α = 1 − (n − 1)·Σ_{c≠k} o_ck / Σ_{c≠k} n_c n_k`. When every
/// pairable value is the same there is no disagreement to expect and α is 1.
pub fn krippendorff_alpha_exact<T: Ord>(units: &[Vec<T>]) -> Result<Q> {
    let pairable: Vec<&Vec<T>> = units.iter().filter(|u| u.len() >= 2).collect();
    if pairable.is_empty() {
        return Err(Error::InsufficientRatings);
    }
    let mut observed_disagreement = Q::zero();
    let mut totals: BTreeMap<&T, i128> = BTreeMap::new();
    let mut n = 0i128;
    for unit in pairable {
        let m = unit.len() as i128;
        let mut counts: BTreeMap<&T, i128> = BTreeMap::new();
        for v in unit {
            *counts.entry(v).or_default() += 1;
            *totals.entry(v).or_default() += 1;
        }
        // ordered pairs of differing values within the unit
        let same: i128 = counts.values().map(|c| c * (c - 1)).sum();
        observed_disagreement += Q::new(m * (m - 1) - same, m - 1);
        n += m;
    }
    let sum_sq: i128 = totals.values().map(|c| c * c).sum();
    let expected_pairs = n * n - sum_sq;
    if expected_pairs == 0 {
        return Ok(Q::from_integer(1));
    }
    Ok(Q::from_integer(1) - observed_disagreement * Q::from_integer(n - 1) / Q::from_integer(expected_pairs))
}

pub fn krippendorff_alpha<T: Ord, F: Scalar>(units: &[Vec<T>]) -> Result<F> {
    krippendorff_alpha_exact(units).map(|q| F::of(q.to_f64().unwrap_or(f64::NAN)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn from_confusion(grid: &[[usize; 2]; 2]) -> (Vec<u8>, Vec<u8>) {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for (i, row) in grid.iter().enumerate() {
            for (j, &count) in row.iter().enumerate() {
                for _ in 0..count {
                    a.push(i as u8);
                    b.push(j as u8);
                }
            }
        }
        (a, b)
    }

    #[test]
    fn kappa_hand_fixture() {
        let (a, b) = from_confusion(&[[20, 5], [10, 15]]);
        assert_eq!(cohen_kappa_exact(&a, &b).unwrap(), Q::new(2, 5));
    }

    #[test]
    fn kappa_errors() {
        assert!(matches!(cohen_kappa_exact(&[1, 2], &[1]), Err(Error::LengthMismatch(2, 1))));
        assert_eq!(cohen_kappa_exact(&[3, 3], &[3, 3]).unwrap(), Q::from_integer(1));
    }

    #[test]
    fn alpha_known_value() {
        // Classic nominal example: 4 coders, 12 units, some missing.
        let coders: Vec<Vec<Option<u8>>> = vec![
            vec![Some(1), Some(2), Some(3), Some(3), Some(2), Some(1), Some(4), Some(1), Some(2), None, None, None],
            vec![Some(1), Some(2), Some(3), Some(3), Some(2), Some(2), Some(4), Some(1), Some(2), Some(5), None, Some(3)],
            vec![None, Some(3), Some(3), Some(3), Some(2), Some(3), Some(4), Some(2), Some(2), Some(5), Some(1), None],
            vec![Some(1), Some(2), Some(3), Some(3), Some(2), Some(4), Some(4), Some(1), Some(2), Some(5), Some(1), None],
        ];
        let units = units_from_coders(&coders);
        let alpha: f64 = krippendorff_alpha(&units).unwrap();
        assert!((alpha - 0.743).abs() < 1e-3, "{alpha}");
    }

    #[test]
    fn alpha_all_disagree_binary() {
        for n in [2usize, 5, 50] {
            let units: Vec<Vec<u8>> = (0..n).map(|i| if i % 2 == 0 { vec![0, 1] } else { vec![1, 0] }).collect();
            let q = krippendorff_alpha_exact(&units).unwrap();
            assert_eq!(q, Q::new(-(n as i128 - 1), n as i128));
        }
    }

    #[test]
    fn alpha_pairable_rule() {
        let units = vec![vec![7, 7], vec![1], vec![2], vec![3]];
        assert_eq!(krippendorff_alpha_exact(&units).unwrap(), Q::from_integer(1));
        assert!(matches!(krippendorff_alpha_exact(&[vec![1], vec![2]]), Err(Error::InsufficientRatings)));
    }

    proptest! {
        #[test]
        fn perfect_agreement_is_one(labels in prop::collection::vec(0u32..1000, 1..100), raters in 2usize..5) {
            let k = cohen_kappa_exact(&labels, &labels).unwrap();
            prop_assert_eq!(k, Q::from_integer(1));
            let units: Vec<Vec<u32>> = labels.iter().map(|&l| vec![l; raters]).collect();
            prop_assert_eq!(krippendorff_alpha_exact(&units).unwrap(), Q::from_integer(1));
        }
    }
}
