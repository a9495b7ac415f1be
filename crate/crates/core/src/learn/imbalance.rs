use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Sample;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub fn class_counts<F>(samples: &[Sample<F>]) -> BTreeMap<usize, usize> {
    let mut counts = BTreeMap::new();
    for s in samples {
        *counts.entry(s.label).or_insert(0) += 1;
    }
    counts
}

/// Keep a uniform random subset of `cap` items of `class` when it has more.
/// Relative order of the survivors is preserved.
pub fn undersample<F: Clone>(samples: &[Sample<F>], class: usize, cap: usize, seed: u64) -> Result<Vec<Sample<F>>> {
    if cap == 0 {
        return Err(Error::InvalidParameter("undersampling cap must be at least 1".into()));
    }
    let members: Vec<usize> = samples.iter().enumerate().filter(|(_, s)| s.label == class).map(|(i, _)| i).collect();
    if members.len() <= cap {
        return Ok(samples.to_vec());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let keep: BTreeSet<usize> = index::sample(&mut rng, members.len(), cap).into_iter().map(|j| members[j]).collect();
    Ok(samples.iter().enumerate().filter(|(i, s)| s.label != class || keep.contains(i)).map(|(_, s)| s.clone()).collect())
}

/// Cap every class at `cap`.
pub fn undersample_all<F: Clone>(samples: &[Sample<F>], cap: usize, seed: u64) -> Result<Vec<Sample<F>>> {
    let mut out = samples.to_vec();
    for (i, class) in class_counts(samples).into_keys().enumerate() {
        out = undersample(&out, class, cap, seed.wrapping_add(i as u64))?;
    }
    Ok(out)
}

fn sq_dist<F: Scalar>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).map(|(x, y)| (*x - *y) * (*x - *y)).sum()
}

/// Indices of the `k` nearest candidates to `samples[i]`, excluding `i`.
/// Ties go to the lower index.
fn nearest<F: Scalar>(samples: &[Sample<F>], i: usize, candidates: &[usize], k: usize) -> Vec<usize> {
    let x = &samples[i].features;
    let mut scored: Vec<(F, usize)> =
        candidates.iter().filter(|&&j| j != i).map(|&j| (sq_dist(x, &samples[j].features), j)).collect();
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
    scored.truncate(k);
    scored.into_iter().map(|(_, j)| j).collect()
}

/// Split `total` across weights proportionally, rounding by largest
/// remainder (ties to the lower index). Zero total weight splits uniformly.
fn allocate<F: Scalar>(weights: &[F], total: usize) -> Vec<usize> {
    let n = weights.len();
    let sum: F = weights.iter().copied().sum();
    let shares: Vec<F> = if sum > F::zero() {
        weights.iter().map(|w| *w / sum * F::of_usize(total)).collect()
    } else {
        vec![F::of_usize(total) / F::of_usize(n); n]
    };
    let mut alloc: Vec<usize> = shares.iter().map(|s| s.floor().to_usize().unwrap_or(0)).collect();
    let assigned: usize = alloc.iter().sum();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let ra = shares[a] - shares[a].floor();
        let rb = shares[b] - shares[b].floor();
        rb.partial_cmp(&ra).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
    });
    for &i in order.iter().cycle().take(total.saturating_sub(assigned)) {
        alloc[i] += 1;
    }
    alloc
}

/// Adaptive synthetic oversampling.
///
/// Every class in `targets` whose count is below its target gains synthetic
/// points until it reaches the target. Output is the input unchanged
/// followed by the synthetic points, grouped by class in ascending order.
/// Each synthetic point lies on the segment between a real class member and
/// one of its `k` nearest same-class neighbours.
pub fn adasyn_oversample<F: Scalar>(
    samples: &[Sample<F>],
    targets: &BTreeMap<usize, usize>,
    k: usize,
    seed: u64,
) -> Result<Vec<Sample<F>>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let everyone: Vec<usize> = (0..samples.len()).collect();
    let mut out = samples.to_vec();
    for (&class, &target) in targets {
        let members: Vec<usize> = everyone.iter().copied().filter(|&i| samples[i].label == class).collect();
        if members.len() >= target {
            continue;
        }
        if members.len() < 2 {
            return Err(Error::InsufficientMinority { class, count: members.len() });
        }
        let deficit = target - members.len();
        let ratios: Vec<F> = members
            .iter()
            .map(|&i| {
                let nn = nearest(samples, i, &everyone, k);
                let foreign = nn.iter().filter(|&&j| samples[j].label != class).count();
                F::of_usize(foreign) / F::of_usize(k)
            })
            .collect();
        let alloc = allocate(&ratios, deficit);
        for (&i, &g) in members.iter().zip(&alloc) {
            if g == 0 {
                continue;
            }
            let friends = nearest(samples, i, &members, k);
            let x = &samples[i].features;
            for _ in 0..g {
                let j = *friends.choose(&mut rng).expect("class has at least two members");
                let lambda = F::of(rng.gen::<f64>());
                let features = x.iter().zip(&samples[j].features).map(|(a, b)| *a + lambda * (*b - *a)).collect();
                out.push(Sample::new(features, class));
            }
        }
    }
    Ok(out)
}

/// Top up each class of `fold` to `per_class_target` from the matching
/// external items, drawn at random without replacement. Classes the
/// external pool cannot fill are completed with [`adasyn_oversample`].
/// Classes already at or above the target are left alone.
pub fn augment_external<F: Scalar>(
    fold: &[Sample<F>],
    external: &[Sample<F>],
    per_class_target: usize,
    k: usize,
    seed: u64,
) -> Result<Vec<Sample<F>>> {
    if let (Some(a), Some(b)) = (fold.first(), external.first()) {
        if a.features.len() != b.features.len() {
            return Err(Error::Format(format!(
                "external items have dimension {} but the fold has {}",
                b.features.len(),
                a.features.len()
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = class_counts(fold);
    let mut out = fold.to_vec();
    let mut remaining = BTreeMap::new();
    for (&class, &count) in &counts {
        if count >= per_class_target {
            continue;
        }
        let mut pool: Vec<&Sample<F>> = external.iter().filter(|s| s.label == class).collect();
        pool.shuffle(&mut rng);
        let take = pool.len().min(per_class_target - count);
        out.extend(pool.into_iter().take(take).cloned());
        if count + take < per_class_target {
            remaining.insert(class, per_class_target);
        }
    }
    if remaining.is_empty() {
        return Ok(out);
    }
    adasyn_oversample(&out, &remaining, k, rng.gen())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize, label: usize, offset: f64) -> Vec<Sample<f64>> {
        (0..n).map(|i| Sample::new(vec![offset + i as f64, (i % 3) as f64], label)).collect()
    }

    #[test]
    fn undersample_caps_and_preserves_order() {
        let mut data = line(20, 0, 0.0);
        data.extend(line(5, 1, 100.0));
        let out = undersample(&data, 0, 8, 3).unwrap();
        assert_eq!(class_counts(&out)[&0], 8);
        assert_eq!(class_counts(&out)[&1], 5);
        let xs: Vec<f64> = out.iter().filter(|s| s.label == 0).map(|s| s.features[0]).collect();
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(out, undersample(&data, 0, 8, 3).unwrap());
        assert_eq!(undersample(&data, 1, 8, 3).unwrap(), data);
        assert!(undersample(&data, 0, 0, 3).is_err());
    }

    #[test]
    fn adasyn_count_contract() {
        let mut data = line(10, 0, 0.0);
        data.extend(line(3, 1, 4.5));
        let targets = BTreeMap::from([(1, 10)]);
        let out = adasyn_oversample(&data, &targets, 5, 9).unwrap();
        assert_eq!(class_counts(&out), BTreeMap::from([(0, 10), (1, 10)]));
        assert_eq!(&out[..data.len()], &data[..]);
    }

    #[test]
    fn adasyn_requires_two_members() {
        let mut data = line(10, 0, 0.0);
        data.push(Sample::new(vec![3.0, 3.0], 1));
        let targets = BTreeMap::from([(1, 5)]);
        assert!(matches!(
            adasyn_oversample(&data, &targets, 3, 1),
            Err(Error::InsufficientMinority { class: 1, count: 1 })
        ));
    }

    #[test]
    fn allocation_is_proportional_with_uniform_fallback() {
        assert_eq!(allocate(&[0.0f64, 0.0, 0.0], 7), vec![3, 2, 2]);
        assert_eq!(allocate(&[1.0f64, 3.0], 8), vec![2, 6]);
        assert_eq!(allocate(&[1.0f64, 1.0, 1.0], 4).iter().sum::<usize>(), 4);
    }

    #[test]
    fn external_pool_fills_before_synthesis() {
        let mut fold = line(6, 0, 0.0);
        fold.extend(line(2, 1, 50.0));
        fold.extend(line(3, 2, 90.0));
        let external = line(10, 1, 60.0);
        let out = augment_external(&fold, &external, 6, 2, 4).unwrap();
        let counts = class_counts(&out);
        assert_eq!(counts, BTreeMap::from([(0, 6), (1, 6), (2, 6)]));
        // class 1 came entirely from the external pool
        assert_eq!(out.iter().filter(|s| s.label == 1 && s.features[0] >= 60.0).count(), 4);
        assert!(out.iter().filter(|s| s.label == 1).all(|s| s.features[0].fract() == 0.0));
        let empty = augment_external(&fold, &[], 6, 2, 4).unwrap();
        assert_eq!(class_counts(&empty)[&1], 6);
    }
}
