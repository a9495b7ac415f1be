use std::fmt::Write as _;

use crate::corpus::MoralFrame;
use crate::error::{Error, Result};

/// Wire value of an abstention in exported vote matrices.
pub const ABSTAIN: i32 = -1;
/// Twelve dictionary functions plus the classifier function.
pub const NUM_LFS: usize = 13;
/// Column of the classifier labeling function.
pub const CLASSIFIER_LF: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LfKind {
    Dictionary(MoralFrame),
    Classifier,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelingFunction {
    pub id: usize,
    pub kind: LfKind,
    pub name: String,
}

pub fn standard_labeling_functions() -> Vec<LabelingFunction> {
    let mut lfs: Vec<LabelingFunction> = MoralFrame::ALL
        .iter()
        .map(|&f| LabelingFunction {
            id: f.index(),
            kind: LfKind::Dictionary(f),
            name: format!("dictionary_{}", f.name().to_lowercase()),
        })
        .collect();
    lfs.push(LabelingFunction { id: CLASSIFIER_LF, kind: LfKind::Classifier, name: "classifier".into() });
    lfs
}

/// Items × labeling functions grid of class votes or abstentions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoteMatrix {
    num_classes: usize,
    num_lfs: usize,
    votes: Vec<Option<u16>>,
}

impl VoteMatrix {
    pub fn new(num_classes: usize, num_lfs: usize) -> Self {
        assert!(num_classes >= 2 && num_classes <= u16::MAX as usize, "unsupported class count");
        VoteMatrix { num_classes, num_lfs, votes: Vec::new() }
    }

    pub fn num_items(&self) -> usize {
        self.votes.len().checked_div(self.num_lfs).unwrap_or(0)
    }

    pub fn num_lfs(&self) -> usize {
        self.num_lfs
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn push_row(&mut self, row: &[Option<usize>]) -> Result<()> {
        if row.len() != self.num_lfs {
            return Err(Error::LengthMismatch(row.len(), self.num_lfs));
        }
        if let Some(bad) = row.iter().flatten().find(|&&c| c >= self.num_classes) {
            return Err(Error::InvalidRecord(format!("vote {bad} outside 0..{}", self.num_classes)));
        }
        self.votes.extend(row.iter().map(|v| v.map(|c| c as u16)));
        Ok(())
    }

    pub fn from_rows(num_classes: usize, num_lfs: usize, rows: &[Vec<Option<usize>>]) -> Result<Self> {
        let mut m = VoteMatrix::new(num_classes, num_lfs);
        for r in rows {
            m.push_row(r)?;
        }
        Ok(m)
    }

    #[inline]
    pub fn get(&self, item: usize, lf: usize) -> Option<usize> {
        self.votes[item * self.num_lfs + lf].map(usize::from)
    }

    pub fn row(&self, item: usize) -> impl Iterator<Item = Option<usize>> + '_ {
        self.votes[item * self.num_lfs..(item + 1) * self.num_lfs].iter().map(|v| v.map(usize::from))
    }

    pub fn all_abstain(&self) -> bool {
        self.votes.iter().all(Option::is_none)
    }

    /// Dictionary column `j < 12` may only vote `j`.
    pub fn check_dictionary_columns(&self) -> Result<()> {
        for i in 0..self.num_items() {
            for j in 0..self.num_lfs.min(CLASSIFIER_LF) {
                if let Some(v) = self.get(i, j) {
                    if v != j {
                        return Err(Error::InvalidRecord(format!("item {i}: dictionary function {j} voted {v}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Tab-separated export: `item_id, lf0, lf1, ...` with −1 for abstain.
    pub fn to_tsv(&self, item_ids: &[String]) -> String {
        let mut s = String::from("item_id");
        for j in 0..self.num_lfs {
            write!(s, "\tlf{j}").unwrap();
        }
        s.push('\n');
        for i in 0..self.num_items() {
            s.push_str(item_ids.get(i).map(String::as_str).unwrap_or(""));
            for v in self.row(i) {
                write!(s, "\t{}", v.map_or(ABSTAIN as i64, |c| c as i64)).unwrap();
            }
            s.push('\n');
        }
        s
    }

    /// Inverse of [`VoteMatrix::to_tsv`]; returns item ids alongside the matrix.
    pub fn from_tsv(text: &str, num_classes: usize) -> Result<(Vec<String>, Self)> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, message: "missing header".into() })?;
        let num_lfs = header.split('\t').count().saturating_sub(1);
        let mut m = VoteMatrix::new(num_classes, num_lfs);
        let mut ids = Vec::new();
        for (i, line) in lines {
            let mut fields = line.split('\t');
            ids.push(fields.next().unwrap_or_default().to_owned());
            let row = fields
                .map(|f| match f.trim().parse::<i64>() {
                    Ok(v) if v == ABSTAIN as i64 => Ok(None),
                    Ok(v) if v >= 0 => Ok(Some(v as usize)),
                    _ => Err(Error::Parse { line: i + 1, message: format!("bad vote {f:?}") }),
                })
                .collect::<Result<Vec<_>>>()?;
            m.push_row(&row).map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?;
        }
        Ok((ids, m))
    }
}
