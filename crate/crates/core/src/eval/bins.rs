use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::metrics::{metrics_from_confusion, ConfusionMatrix, MetricsReport};
use super::{domain, EvalError};
use crate::model::Label;

/// One classified account for the per-bin analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinRecord {
    pub truth: Label,
    pub predicted: Label,
    pub non_empty_comments: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinReport {
    /// Inclusive bounds on the number of non-empty comments.
    pub lower: usize,
    pub upper: usize,
    pub population: usize,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsReport<f64>,
}

/// Groups accounts by `non_empty_comments / bin_width` and reports metrics
/// per occupied bin, in ascending bin order.
pub fn f1_by_comment_bins(records: &[BinRecord], bin_width: usize) -> Result<Vec<BinReport>, EvalError> {
    if bin_width == 0 {
        return Err(domain("bin width must be at least 1"));
    }
    let mut bins: BTreeMap<usize, ConfusionMatrix> = BTreeMap::new();
    for r in records {
        bins.entry(r.non_empty_comments / bin_width)
            .or_default()
            .record(r.truth, r.predicted);
    }
    bins.into_iter()
        .map(|(bin, confusion)| {
            Ok(BinReport {
                lower: bin * bin_width,
                upper: bin * bin_width + bin_width - 1,
                population: confusion.total(),
                metrics: metrics_from_confusion(&confusion, confusion.bots(), confusion.humans())?,
                confusion,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(truth: Label, predicted: Label, n: usize) -> BinRecord {
        BinRecord {
            truth,
            predicted,
            non_empty_comments: n,
        }
    }

    #[test]
    fn two_bins() {
        let rows = f1_by_comment_bins(
            &[rec(Label::Bot, Label::Bot, 3), rec(Label::Human, Label::Human, 7)],
            5,
        )
        .unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!((rows[0].lower, rows[0].upper, rows[0].population), (0, 4, 1));
        assert_eq!((rows[1].lower, rows[1].upper, rows[1].population), (5, 9, 1));
    }

    #[test]
    fn single_bin_equals_global() {
        let recs = [
            rec(Label::Bot, Label::Bot, 12),
            rec(Label::Bot, Label::Human, 13),
            rec(Label::Human, Label::Human, 10),
            rec(Label::Human, Label::Bot, 14),
        ];
        let rows = f1_by_comment_bins(&recs, 5).unwrap();
        assert_eq!(rows.len(), 1);
        let cm = ConfusionMatrix::from_pairs(recs.iter().map(|r| (r.truth, r.predicted)));
        assert_eq!(rows[0].metrics, metrics_from_confusion(&cm, 2, 2).unwrap());
        assert!(f1_by_comment_bins(&recs, 0).is_err());
    }
}
