use crate::features::ClassLabel;

use super::EvalError;

/// Counts indexed by gold label (rows) and predicted label (columns).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub labels: Vec<ClassLabel>,
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    /// Tallies parallel gold/predicted sequences over all sixteen labels.
    pub fn from_pairs(gold: &[ClassLabel], predicted: &[ClassLabel]) -> Result<ConfusionMatrix, EvalError> {
        if gold.len() != predicted.len() {
            return Err(EvalError::LengthMismatch(gold.len(), predicted.len()));
        }
        let labels = ClassLabel::ALL.to_vec();
        let mut counts = vec![vec![0; labels.len()]; labels.len()];
        for (g, p) in gold.iter().zip(predicted) {
            counts[g.index()][p.index()] += 1;
        }
        Ok(ConfusionMatrix { labels, counts })
    }

    /// A matrix over an explicit label order; `counts` must be square.
    pub fn from_grid(labels: Vec<ClassLabel>, counts: Vec<Vec<usize>>) -> Result<ConfusionMatrix, EvalError> {
        if counts.len() != labels.len() {
            return Err(EvalError::LengthMismatch(counts.len(), labels.len()));
        }
        if let Some(row) = counts.iter().find(|r| r.len() != labels.len()) {
            return Err(EvalError::LengthMismatch(row.len(), labels.len()));
        }
        Ok(ConfusionMatrix { labels, counts })
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn row_total(&self, i: usize) -> usize {
        self.counts[i].iter().sum()
    }

    pub fn column_total(&self, j: usize) -> usize {
        self.counts.iter().map(|r| r[j]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        (0..self.labels.len()).map(|i| self.counts[i][i]).sum::<usize>() as f64 / total as f64
    }

    /// Rows and columns for labels that never occur as gold or prediction
    /// are dropped.
    pub fn trimmed(&self) -> ConfusionMatrix {
        let keep: Vec<usize> =
            (0..self.labels.len()).filter(|i| self.row_total(*i) + self.column_total(*i) > 0).collect();
        ConfusionMatrix {
            labels: keep.iter().map(|i| self.labels[*i]).collect(),
            counts: keep.iter().map(|i| keep.iter().map(|j| self.counts[*i][*j]).collect()).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassMetrics {
    pub label: ClassLabel,
    pub recall: f64,
    pub precision: f64,
    pub fallout: f64,
    pub f1: f64,
}

/// Recall, precision, fallout and F per label, in matrix order. A label
/// that is never predicted gets precision 1; one that never occurs gets
/// recall 0.
pub fn per_class_metrics(m: &ConfusionMatrix) -> Vec<ClassMetrics> {
    let total = m.total();
    (0..m.labels.len())
        .map(|i| {
            let tp = m.counts[i][i];
            let row = m.row_total(i);
            let col = m.column_total(i);
            let recall = if row == 0 { 0.0 } else { tp as f64 / row as f64 };
            let precision = if col == 0 { 1.0 } else { tp as f64 / col as f64 };
            let negatives = total - row;
            let fallout = if negatives == 0 { 0.0 } else { (col - tp) as f64 / negatives as f64 };
            let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
            ClassMetrics { label: m.labels[i], recall, precision, fallout, f1 }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ClassLabel::*;

    #[test]
    fn identity_matrix() {
        let labels = vec![C, O, T];
        let m = ConfusionMatrix::from_grid(labels, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        for c in per_class_metrics(&m) {
            assert_eq!((c.recall, c.precision, c.fallout, c.f1), (1.0, 1.0, 0.0, 1.0));
        }
        assert_eq!(m.accuracy(), 1.0);
    }

    #[test]
    fn conventions_for_empty_rows_and_columns() {
        let m = ConfusionMatrix::from_pairs(&[C, C, O], &[C, O, C]).unwrap().trimmed();
        assert_eq!(m.labels, vec![O, C]);
        let pc = per_class_metrics(&m);
        assert_eq!(pc[1].recall, 0.5);
        assert_eq!(pc[1].precision, 0.5);
        assert_eq!(pc[0].fallout, 0.5);

        let m = ConfusionMatrix::from_grid(vec![C, Q], vec![vec![2, 0], vec![0, 0]]).unwrap();
        let pc = per_class_metrics(&m);
        assert_eq!((pc[1].recall, pc[1].precision, pc[1].f1), (0.0, 1.0, 0.0));
    }

    #[test]
    fn shape_is_checked() {
        assert!(ConfusionMatrix::from_grid(vec![C], vec![vec![1, 2]]).is_err());
        assert!(ConfusionMatrix::from_pairs(&[C], &[]).is_err());
    }
}
