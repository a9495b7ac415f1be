use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::special::chi_square_sf;

pub const SIGNIFICANCE_THRESHOLD: f64 = 3.0;

/// Row-by-column count table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ContingencyTable {
    pub fn new(row_labels: Vec<String>, col_labels: Vec<String>, counts: Vec<Vec<u64>>) -> Result<Self> {
        if counts.len() != row_labels.len() {
            return Err(Error::LengthMismatch(counts.len(), row_labels.len()));
        }
        if let Some(r) = counts.iter().find(|r| r.len() != col_labels.len()) {
            return Err(Error::LengthMismatch(r.len(), col_labels.len()));
        }
        if row_labels.is_empty() || col_labels.is_empty() {
            return Err(Error::InvalidParameter("table needs at least one row and one column".into()));
        }
        Ok(ContingencyTable { row_labels, col_labels, counts })
    }

    /// Tally `(row, column)` index pairs.
    pub fn from_pairs(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut counts = vec![vec![0u64; col_labels.len()]; row_labels.len()];
        for (r, c) in pairs {
            *counts
                .get_mut(r)
                .and_then(|row| row.get_mut(c))
                .ok_or_else(|| Error::InvalidRecord(format!("cell ({r}, {c}) outside the table")))? += 1;
        }
        Self::new(row_labels, col_labels, counts)
    }

    /// Tab-separated: a header whose first cell is ignored and whose other
    /// cells name the columns, then `label<TAB>count...` rows. Blank lines
    /// and `#` comments are skipped.
    pub fn parse_tsv(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
            .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, message: "empty table".into() })?;
        let col_labels: Vec<String> = header.split('\t').skip(1).map(|s| s.trim().to_owned()).collect();
        let mut row_labels = Vec::new();
        let mut counts = Vec::new();
        for (line, l) in lines {
            let mut cells = l.split('\t');
            row_labels.push(cells.next().unwrap_or_default().trim().to_owned());
            let row = cells
                .map(|c| c.trim().parse::<u64>().map_err(|_| Error::Parse { line, message: format!("bad count {c:?}") }))
                .collect::<Result<Vec<u64>>>()?;
            if row.len() != col_labels.len() {
                return Err(Error::Parse { line, message: format!("expected {} counts, found {}", col_labels.len(), row.len()) });
            }
            counts.push(row);
        }
        Self::new(row_labels, col_labels, counts)
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "\t{}", self.col_labels.join("\t")).unwrap();
        for (label, row) in self.row_labels.iter().zip(&self.counts) {
            let cells: Vec<String> = row.iter().map(u64::to_string).collect();
            writeln!(s, "{label}\t{}", cells.join("\t")).unwrap();
        }
        s
    }

    pub fn row_totals(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_totals(&self) -> Vec<u64> {
        (0..self.col_labels.len()).map(|c| self.counts.iter().map(|r| r[c]).sum()).collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellResidual<F> {
    pub observed: u64,
    pub expected: F,
    pub adjusted_residual: F,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport<F> {
    pub chi2: F,
    pub dof: usize,
    pub p_value: F,
    pub threshold: F,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub cells: Vec<Vec<CellResidual<F>>>,
}

impl<F: Scalar> ResidualReport<F> {
    /// Cells rendered as `count (residual)` with two decimals.
    pub fn render_table(&self) -> String {
        let mut s = String::new();
        writeln!(s, "\t{}", self.col_labels.join("\t")).unwrap();
        for (label, row) in self.row_labels.iter().zip(&self.cells) {
            let cells: Vec<String> =
                row.iter().map(|c| format!("{} ({:.2})", c.observed, c.adjusted_residual.as_f64())).collect();
            writeln!(s, "{label}\t{}", cells.join("\t")).unwrap();
        }
        s
    }

    /// One line per cell: row, column, observed, expected, residual, flag.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("row\tcolumn\tobserved\texpected\tadjusted_residual\tsignificant\n");
        for (r, row) in self.cells.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                writeln!(
                    s,
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    self.row_labels[r], self.col_labels[c], cell.observed, cell.expected, cell.adjusted_residual, cell.significant
                )
                .unwrap();
            }
        }
        s
    }

    pub fn significant_cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (r, row) in self.cells.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                if cell.significant {
                    out.push((r, c));
                }
            }
        }
        out
    }
}

pub fn chi_square<F: Scalar>(table: &ContingencyTable) -> Result<ResidualReport<F>> {
    chi_square_with_threshold(table, F::of(SIGNIFICANCE_THRESHOLD))
}

/// Pearson χ² with adjusted standardized residuals
/// `(O − E)/√(E(1 − r/N)(1 − c/N))`; a cell is significant when
/// `|residual| > threshold`.
pub fn chi_square_with_threshold<F: Scalar>(table: &ContingencyTable, threshold: F) -> Result<ResidualReport<F>> {
    let rows = table.row_totals();
    let cols = table.col_totals();
    if let Some(i) = rows.iter().position(|&t| t == 0) {
        return Err(Error::ZeroMarginal(format!("row {:?}", table.row_labels[i])));
    }
    if let Some(i) = cols.iter().position(|&t| t == 0) {
        return Err(Error::ZeroMarginal(format!("column {:?}", table.col_labels[i])));
    }
    let n = F::of(table.total() as f64);
    let mut chi2 = F::zero();
    let mut cells = Vec::with_capacity(rows.len());
    for (r, row) in table.counts.iter().enumerate() {
        let rt = F::of(rows[r] as f64);
        let mut out = Vec::with_capacity(row.len());
        for (c, &o) in row.iter().enumerate() {
            let ct = F::of(cols[c] as f64);
            let expected = rt * ct / n;
            let diff = F::of(o as f64) - expected;
            chi2 += diff * diff / expected;
            let var = expected * (F::one() - rt / n) * (F::one() - ct / n);
            let adjusted_residual = if var > F::zero() { diff / var.sqrt() } else { F::zero() };
            out.push(CellResidual { observed: o, expected, adjusted_residual, significant: adjusted_residual.abs() > threshold });
        }
        cells.push(out);
    }
    let dof = (rows.len() - 1) * (cols.len() - 1);
    let p_value = if dof == 0 { F::one() } else { chi_square_sf(chi2, dof) };
    Ok(ResidualReport {
        chi2,
        dof,
        p_value,
        threshold,
        row_labels: table.row_labels.clone(),
        col_labels: table.col_labels.clone(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn proportional_rows_are_independent() {
        let t = ContingencyTable::new(labels(&["a", "b"]), labels(&["x", "y"]), vec![vec![10, 20], vec![30, 60]]).unwrap();
        let r = chi_square::<f64>(&t).unwrap();
        assert!(r.chi2.abs() < 1e-12);
        assert!(r.cells.iter().flatten().all(|c| c.adjusted_residual.abs() < 1e-12));
        assert_eq!(r.dof, 1);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_by_two_against_hand_values() {
        // E = 15 everywhere; χ² = 4·25/15; adjusted residual = 5/√(15·½·½)
        let t = ContingencyTable::new(labels(&["a", "b"]), labels(&["x", "y"]), vec![vec![20, 10], vec![10, 20]]).unwrap();
        let r = chi_square::<f64>(&t).unwrap();
        assert!((r.chi2 - 100.0 / 15.0).abs() < 1e-12);
        let adj = 5.0 / (15.0f64 * 0.25).sqrt();
        assert!((r.cells[0][0].adjusted_residual - adj).abs() < 1e-12);
        assert!((r.cells[0][1].adjusted_residual + adj).abs() < 1e-12);
        assert_eq!(r.significant_cells(), vec![]);
    }

    #[test]
    fn zero_marginal_rejected() {
        let t = ContingencyTable::new(labels(&["a", "b"]), labels(&["x", "y"]), vec![vec![0, 0], vec![3, 4]]).unwrap();
        assert!(matches!(chi_square::<f64>(&t), Err(Error::ZeroMarginal(_))));
    }

    #[test]
    fn tsv_round_trip_and_pairs() {
        let t = ContingencyTable::from_pairs(labels(&["a", "b"]), labels(&["x", "y", "z"]), [(0, 0), (1, 2), (1, 2)]).unwrap();
        assert_eq!(t.counts, vec![vec![1, 0, 0], vec![0, 0, 2]]);
        assert_eq!(ContingencyTable::parse_tsv(&t.to_tsv()).unwrap(), t);
        assert!(ContingencyTable::from_pairs(labels(&["a"]), labels(&["x"]), [(1, 0)]).is_err());
        assert!(ContingencyTable::parse_tsv("\tx\ty\na\t1\n").is_err());
    }
}
