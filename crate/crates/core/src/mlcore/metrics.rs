use serde::{Deserialize, Serialize};

use super::model::Classifier;
use super::{Dataset, MlError};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    /// Per-class scores weighted by class support.
    #[default]
    Weighted,
    Macro,
    /// Scores of class 1 only.
    Positive,
}

impl Averaging {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "weighted" => Some(Averaging::Weighted),
            "macro" => Some(Averaging::Macro),
            "positive" => Some(Averaging::Positive),
            _ => None,
        }
    }
}

/// `counts[actual][predicted]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 2]; 2],
}

impl ConfusionMatrix {
    pub fn record(&mut self, actual: usize, predicted: usize) {
        self.counts[actual][predicted] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn support(&self, class: usize) -> u64 {
        self.counts[class].iter().sum()
    }

    pub fn predicted(&self, class: usize) -> u64 {
        self.counts[0][class] + self.counts[1][class]
    }

    /// Zero when the class is never predicted.
    pub fn precision_of(&self, class: usize) -> f64 {
        ratio(self.counts[class][class], self.predicted(class))
    }

    /// Zero when the class never occurs.
    pub fn recall_of(&self, class: usize) -> f64 {
        ratio(self.counts[class][class], self.support(class))
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub averaging: Averaging,
    pub confusion: ConfusionMatrix,
}

impl Metrics {
    pub fn from_confusion(confusion: ConfusionMatrix, averaging: Averaging) -> Self {
        let total = confusion.total();
        let accuracy = ratio(confusion.counts[0][0] + confusion.counts[1][1], total);
        let (precision, recall) = match averaging {
            Averaging::Positive => (confusion.precision_of(1), confusion.recall_of(1)),
            Averaging::Macro => (
                (confusion.precision_of(0) + confusion.precision_of(1)) / 2.0,
                (confusion.recall_of(0) + confusion.recall_of(1)) / 2.0,
            ),
            Averaging::Weighted => {
                let w = |c| ratio(confusion.support(c), total);
                (
                    w(0) * confusion.precision_of(0) + w(1) * confusion.precision_of(1),
                    w(0) * confusion.recall_of(0) + w(1) * confusion.recall_of(1),
                )
            }
        };
        Metrics {
            accuracy,
            precision,
            recall,
            averaging,
            confusion,
        }
    }
}

/// Confusion-matrix metrics of `model` over every row of `test`.
pub fn evaluate(model: &impl Classifier, test: &Dataset, averaging: Averaging) -> Result<Metrics, MlError> {
    if test.is_empty() {
        return Err(MlError::Data("cannot evaluate on an empty dataset".into()));
    }
    let mut confusion = ConfusionMatrix::default();
    for (row, &label) in test.rows().zip(test.labels()) {
        let class = model.predict(row)?.class.min(1);
        confusion.record(label as usize, class);
    }
    Ok(Metrics::from_confusion(confusion, averaging))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn hand_computed_matrix() {
        let cm = ConfusionMatrix {
            counts: [[3, 1], [2, 4]],
        };
        // class 0: support 4, predicted 5, hits 3
        // class 1: support 6, predicted 5, hits 4
        let w = Metrics::from_confusion(cm, Averaging::Weighted);
        assert!(close(w.accuracy, 0.7));
        assert!(close(w.precision, 0.4 * 0.6 + 0.6 * 0.8));
        assert!(close(w.recall, 0.7));
        let m = Metrics::from_confusion(cm, Averaging::Macro);
        assert!(close(m.precision, 0.7));
        assert!(close(m.recall, (0.75 + 4.0 / 6.0) / 2.0));
        let p = Metrics::from_confusion(cm, Averaging::Positive);
        assert!(close(p.precision, 0.8));
        assert!(close(p.recall, 4.0 / 6.0));
    }

    #[test]
    fn perfect_and_constant_predictors() {
        let perfect = Metrics::from_confusion(
            ConfusionMatrix {
                counts: [[55, 0], [0, 45]],
            },
            Averaging::Weighted,
        );
        assert_eq!((perfect.accuracy, perfect.precision, perfect.recall), (1.0, 1.0, 1.0));
        let majority = Metrics::from_confusion(
            ConfusionMatrix {
                counts: [[55, 0], [45, 0]],
            },
            Averaging::Weighted,
        );
        assert!(close(majority.accuracy, 0.55));
        assert!(close(majority.precision, 0.55 * 0.55));
    }
}
