use serde::{Deserialize, Serialize};

use super::{domain, EvalError};
use crate::model::Label;
use crate::scalar::Scalar;

/// Binary confusion counts with bots as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub fp: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Label, Label)>) -> Self {
        let mut cm = Self::default();
        for (truth, predicted) in pairs {
            cm.record(truth, predicted);
        }
        cm
    }

    pub fn record(&mut self, truth: Label, predicted: Label) {
        match (truth, predicted) {
            (Label::Bot, Label::Bot) => self.tp += 1,
            (Label::Bot, Label::Human) => self.fn_ += 1,
            (Label::Human, Label::Bot) => self.fp += 1,
            (Label::Human, Label::Human) => self.tn += 1,
        }
    }

    pub fn bots(&self) -> usize {
        self.tp + self.fn_
    }

    pub fn humans(&self) -> usize {
        self.fp + self.tn
    }

    pub fn total(&self) -> usize {
        self.bots() + self.humans()
    }

    pub fn accuracy(&self) -> f64 {
        if self.total() == 0 {
            return 0.0;
        }
        (self.tp + self.tn) as f64 / self.total() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics<T> {
    pub precision: T,
    pub recall: T,
    pub f1: T,
    /// Set when the ratio had a zero denominator and was reported as 0.
    pub precision_undefined: bool,
    pub recall_undefined: bool,
    pub f1_undefined: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport<T> {
    pub bot: ClassMetrics<T>,
    pub human: ClassMetrics<T>,
    /// Class-size weighted precision.
    pub precision: T,
    /// Class-size weighted recall.
    pub recall: T,
    /// Harmonic mean of the weighted precision and recall.
    pub f1: T,
}

fn ratio<T: Scalar>(num: usize, den: usize) -> (T, bool) {
    if den == 0 {
        (T::zero(), true)
    } else {
        (T::from_count(num) / T::from_count(den), false)
    }
}

fn harmonic<T: Scalar>(p: T, r: T) -> (T, bool) {
    let sum = p + r;
    if sum == T::zero() {
        (T::zero(), true)
    } else {
        (T::two() * p * r / sum, false)
    }
}

fn class_metrics<T: Scalar>(hits: usize, predicted: usize, actual: usize) -> ClassMetrics<T> {
    let (precision, precision_undefined) = ratio(hits, predicted);
    let (recall, recall_undefined) = ratio(hits, actual);
    let (f1, f1_undefined) = harmonic(precision, recall);
    ClassMetrics {
        precision,
        recall,
        f1,
        precision_undefined,
        recall_undefined,
        f1_undefined,
    }
}

/// Per-class and weighted precision, recall and F1.
///
/// Weighted precision is `(P(B)·|B| + P(H)·|H|) / (|B| + |H|)` and likewise
/// for recall; the overall F1 is `2PR / (P + R)` of those two.
pub fn metrics_from_confusion<T: Scalar>(
    cm: &ConfusionMatrix,
    n_bots: usize,
    n_humans: usize,
) -> Result<MetricsReport<T>, EvalError> {
    if cm.bots() != n_bots || cm.humans() != n_humans {
        return Err(domain(format!(
            "confusion matrix has {} bots / {} humans, expected {n_bots} / {n_humans}",
            cm.bots(),
            cm.humans()
        )));
    }
    if n_bots + n_humans == 0 {
        return Err(domain("confusion matrix is empty"));
    }
    let bot = class_metrics::<T>(cm.tp, cm.tp + cm.fp, n_bots);
    let human = class_metrics::<T>(cm.tn, cm.tn + cm.fn_, n_humans);
    let (wb, wh) = (T::from_count(n_bots), T::from_count(n_humans));
    let total = wb + wh;
    let precision = (bot.precision * wb + human.precision * wh) / total;
    let recall = (bot.recall * wb + human.recall * wh) / total;
    let (f1, _) = harmonic(precision, recall);
    Ok(MetricsReport {
        bot,
        human,
        precision,
        recall,
        f1,
    })
}

impl<T: Scalar> MetricsReport<T> {
    pub fn to_f64(&self) -> MetricsReport<f64> {
        let conv = |c: &ClassMetrics<T>| ClassMetrics {
            precision: c.precision.to_f64_lossy(),
            recall: c.recall.to_f64_lossy(),
            f1: c.f1.to_f64_lossy(),
            precision_undefined: c.precision_undefined,
            recall_undefined: c.recall_undefined,
            f1_undefined: c.f1_undefined,
        };
        MetricsReport {
            bot: conv(&self.bot),
            human: conv(&self.human),
            precision: self.precision.to_f64_lossy(),
            recall: self.recall.to_f64_lossy(),
            f1: self.f1.to_f64_lossy(),
        }
    }
}
