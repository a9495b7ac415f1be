use std::collections::BTreeMap;

use chrono::NaiveDate;

use crate::corpus::MoralFrame;
use crate::scalar::Scalar;
use crate::sentiment::utc_day;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DayFrames {
    /// Indexed by frame encoding.
    pub counts: [usize; MoralFrame::COUNT],
    /// All twelve frames by descending count, ties by frame index.
    pub order: Vec<MoralFrame>,
}

impl DayFrames {
    fn from_counts(counts: [usize; MoralFrame::COUNT]) -> Self {
        let mut order = MoralFrame::ALL.to_vec();
        order.sort_by(|a, b| counts[b.index()].cmp(&counts[a.index()]).then(a.index().cmp(&b.index())));
        DayFrames { counts, order }
    }

    pub fn rank_of(&self, frame: MoralFrame) -> usize {
        self.order.iter().position(|f| *f == frame).expect("order lists every frame")
    }
}

/// Per-UTC-day frame counts and popularity order from `(created_at, frame)`
/// records. Days without records are absent.
pub fn frame_popularity_timeline(records: impl IntoIterator<Item = (i64, MoralFrame)>) -> BTreeMap<NaiveDate, DayFrames> {
    let mut counts: BTreeMap<NaiveDate, [usize; MoralFrame::COUNT]> = BTreeMap::new();
    for (t, frame) in records {
        counts.entry(utc_day(t)).or_insert([0; MoralFrame::COUNT])[frame.index()] += 1;
    }
    counts.into_iter().map(|(d, c)| (d, DayFrames::from_counts(c))).collect()
}

/// Share of each frame over all records; zeros for an empty input.
pub fn frame_shares<F: Scalar>(frames: impl IntoIterator<Item = MoralFrame>) -> [F; MoralFrame::COUNT] {
    let mut counts = [0usize; MoralFrame::COUNT];
    for f in frames {
        counts[f.index()] += 1;
    }
    let total: usize = counts.iter().sum();
    let mut shares = [F::zero(); MoralFrame::COUNT];
    if total > 0 {
        for (s, c) in shares.iter_mut().zip(counts) {
            *s = F::of_usize(c) / F::of_usize(total);
        }
    }
    shares
}

#[cfg(test)]
mod tests {
    use super::*;
    use MoralFrame::*;

    #[test]
    fn order_by_count_then_index() {
        let mut recs = vec![(0, Harm); 2];
        recs.extend(vec![(5, Care); 5]);
        let t = frame_popularity_timeline(recs);
        let day = t.values().next().unwrap();
        assert_eq!(&day.order[..2], &[Care, Harm]);
        assert_eq!(day.counts[Care.index()], 5);
        assert_eq!(day.order.len(), 12);

        let mut tie = vec![(0, Harm); 3];
        tie.extend(vec![(0, Care); 3]);
        let t = frame_popularity_timeline(tie);
        assert_eq!(t.values().next().unwrap().order[0], Care);
        assert_eq!(t.values().next().unwrap().rank_of(Harm), 1);
    }

    #[test]
    fn shares() {
        let mut frames = vec![Care; 401];
        frames.extend(vec![Freedom; 599]);
        let s: [f64; 12] = frame_shares(frames);
        assert!((s[Care.index()] - 0.401).abs() < 1e-12);
        assert_eq!(frame_shares::<f64>(vec![]), [0.0; 12]);
    }
}
