//! Confusion matrix and the derived evaluation measures.
//!
//! Per-class precision, recall, and F1 can be undefined (a class never
//! predicted, or absent from the truth). Those report the value 0 plus a
//! degenerate flag instead of NaN so serialized reports stay clean, and
//! macro averages run over the classes where the measure is defined.

use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};

/// Counts of (true class, predicted class) pairs: `counts[[t, p]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: Array2<u64>,
}

/// Tally a confusion matrix from aligned label vectors.
pub fn confusion(actual: &[u32], predicted: &[u32], class_count: usize) -> Result<ConfusionMatrix> {
    if actual.len() != predicted.len() {
        return Err(Error::Shape(format!(
            "{} actual labels but {} predictions",
            actual.len(),
            predicted.len()
        )));
    }
    if class_count == 0 {
        return Err(Error::Range("class count must be at least 1".into()));
    }
    let mut counts = Array2::<u64>::zeros((class_count, class_count));
    for (i, (&t, &p)) in actual.iter().zip(predicted).enumerate() {
        if t as usize >= class_count || p as usize >= class_count {
            return Err(Error::Range(format!(
                "pair {i} has labels ({t}, {p}) but only {class_count} classes exist"
            )));
        }
        counts[[t as usize, p as usize]] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

impl ConfusionMatrix {
    /// The count table, true class by predicted class.
    pub fn counts(&self) -> &Array2<u64> {
        &self.counts
    }

    /// Number of classes.
    pub fn class_count(&self) -> usize {
        self.counts.nrows()
    }

    /// Total number of tallied pairs.
    pub fn total(&self) -> u64 {
        self.counts.sum()
    }

    fn true_positive(&self, class: usize) -> u64 {
        self.counts[[class, class]]
    }

    fn predicted_count(&self, class: usize) -> u64 {
        self.counts.column(class).sum()
    }

    fn actual_count(&self, class: usize) -> u64 {
        self.counts.row(class).sum()
    }
}

/// Fraction of correctly classified samples.
pub fn accuracy(cm: &ConfusionMatrix) -> Result<f64> {
    let n = cm.total();
    if n == 0 {
        return Err(Error::UndefinedMetric("accuracy of an empty evaluation".into()));
    }
    let correct: u64 = (0..cm.class_count()).map(|i| cm.true_positive(i)).sum();
    Ok(correct as f64 / n as f64)
}

/// One class's measures. A degenerate measure (zero denominator) carries
/// the value 0 and a cleared `*_defined` flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub class: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub precision_defined: bool,
    pub recall_defined: bool,
    pub f1_defined: bool,
    /// Number of samples whose true class this is.
    pub support: u64,
}

/// Precision, recall, and F1 for one class.
pub fn precision_recall_f1(cm: &ConfusionMatrix, class: usize) -> Result<ClassMetrics> {
    if class >= cm.class_count() {
        return Err(Error::Range(format!(
            "class {class} out of range for {} classes",
            cm.class_count()
        )));
    }
    let support = cm.actual_count(class);
    let tp = cm.true_positive(class) as f64;
    let predicted = cm.predicted_count(class) as f64;
    let actual = support as f64;

    let precision_defined = predicted > 0.0;
    let recall_defined = actual > 0.0;
    let precision = if precision_defined { tp / predicted } else { 0.0 };
    let recall = if recall_defined { tp / actual } else { 0.0 };
    let f1_defined = precision + recall > 0.0;
    let f1 = if f1_defined { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
    Ok(ClassMetrics {
        class,
        precision,
        recall,
        f1,
        precision_defined,
        recall_defined,
        f1_defined,
        support,
    })
}

/// Macro-averaged measures: unweighted means over the classes where each
/// measure is defined. The F1 is the harmonic mean of the macro
/// precision and macro recall.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MacroAverages {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Classes whose precision or recall was degenerate (excluded from
    /// the respective mean).
    pub degenerate_classes: Vec<usize>,
}

/// Macro-average the per-class measures.
pub fn macro_average(cm: &ConfusionMatrix) -> Result<MacroAverages> {
    let mut p_sum = 0.0;
    let mut p_count = 0usize;
    let mut r_sum = 0.0;
    let mut r_count = 0usize;
    let mut degenerate = Vec::new();
    for class in 0..cm.class_count() {
        let m = precision_recall_f1(cm, class)?;
        if m.precision_defined {
            p_sum += m.precision;
            p_count += 1;
        }
        if m.recall_defined {
            r_sum += m.recall;
            r_count += 1;
        }
        if !m.precision_defined || !m.recall_defined {
            degenerate.push(class);
        }
    }
    let precision = if p_count > 0 { p_sum / p_count as f64 } else { 0.0 };
    let recall = if r_count > 0 { r_sum / r_count as f64 } else { 0.0 };
    let f1 =
        if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
    Ok(MacroAverages { precision, recall, f1, degenerate_classes: degenerate })
}

/// Full evaluation: accuracy, macro measures, per-class breakdown, and
/// wall-clock timings. Serializes to JSON (field order is declaration
/// order) and to a flat key-value text block.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub train_seconds: f64,
    pub test_seconds: f64,
    pub sample_count: u64,
    pub per_class: Vec<ClassMetrics>,
    pub degenerate_classes: Vec<usize>,
}

impl EvalReport {
    /// Assemble a report from a confusion matrix and timings.
    pub fn from_confusion(
        cm: &ConfusionMatrix,
        train_seconds: f64,
        test_seconds: f64,
    ) -> Result<EvalReport> {
        let accuracy = accuracy(cm)?;
        let macros = macro_average(cm)?;
        let per_class = (0..cm.class_count())
            .map(|c| precision_recall_f1(cm, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(EvalReport {
            accuracy,
            precision: macros.precision,
            recall: macros.recall,
            f1: macros.f1,
            train_seconds,
            test_seconds,
            sample_count: cm.total(),
            per_class,
            degenerate_classes: macros.degenerate_classes,
        })
    }

    /// Flat `key = value` rendering with a stable line order.
    pub fn to_flat_text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        line("accuracy", format!("{}", self.accuracy));
        line("precision", format!("{}", self.precision));
        line("recall", format!("{}", self.recall));
        line("f1", format!("{}", self.f1));
        line("train_seconds", format!("{}", self.train_seconds));
        line("test_seconds", format!("{}", self.test_seconds));
        line("sample_count", format!("{}", self.sample_count));
        for m in &self.per_class {
            let c = m.class;
            line(&format!("class_{c}_precision"), format!("{}", m.precision));
            line(&format!("class_{c}_recall"), format!("{}", m.recall));
            line(&format!("class_{c}_f1"), format!("{}", m.f1));
            line(&format!("class_{c}_support"), format!("{}", m.support));
            if !m.precision_defined || !m.recall_defined {
                line(&format!("class_{c}_degenerate"), "true".to_string());
            }
        }
        out
    }
}
