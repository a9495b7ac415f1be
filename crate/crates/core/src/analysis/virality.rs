use std::collections::BTreeMap;

use chrono::NaiveDate;

use crate::corpus::Stance;
use crate::scalar::Scalar;
use crate::sentiment::utc_day;

/// `1 + ln(retweets + 1)`.
pub fn virality<F: Scalar>(retweets: u64) -> F {
    F::one() + F::of(retweets as f64).ln_1p()
}

/// What a tweet contributes to the daily series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViralityRecord<F> {
    pub created_at: i64,
    pub retweets: u64,
    pub stance: Stance,
    pub compound: F,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DayVirality<F> {
    pub virality_for: F,
    pub virality_against: F,
    pub virality_undecided: F,
    pub mean_sentiment: F,
    pub tweets: usize,
}

impl<F: Scalar> DayVirality<F> {
    pub fn by_stance(&self, stance: Stance) -> F {
        match stance {
            Stance::For => self.virality_for,
            Stance::Against => self.virality_against,
            Stance::Undecided => self.virality_undecided,
        }
    }
}

/// Per UTC day; days without tweets are absent.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ViralitySeries<F> {
    pub days: BTreeMap<NaiveDate, DayVirality<F>>,
}

impl<F> ViralitySeries<F> {
    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }
}

pub fn daily_virality<F: Scalar>(records: impl IntoIterator<Item = ViralityRecord<F>>) -> ViralitySeries<F> {
    let mut days: BTreeMap<NaiveDate, DayVirality<F>> = BTreeMap::new();
    for r in records {
        let d = days.entry(utc_day(r.created_at)).or_default();
        let v = virality::<F>(r.retweets);
        match r.stance {
            Stance::For => d.virality_for += v,
            Stance::Against => d.virality_against += v,
            Stance::Undecided => d.virality_undecided += v,
        }
        d.mean_sentiment += r.compound;
        d.tweets += 1;
    }
    for d in days.values_mut() {
        d.mean_sentiment /= F::of_usize(d.tweets);
    }
    ViralitySeries { days }
}
