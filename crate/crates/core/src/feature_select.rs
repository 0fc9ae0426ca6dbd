//! Attribution-driven feature ranking and selection.
//!
//! The input is a per-sample attribution tensor: for every sample, one
//! score per feature saying how much that feature contributed to the
//! sample's class. Scores are averaged within each class, the class
//! means are averaged with equal weight (so a 10x larger class does not
//! drown out the others), and the top-m features by aggregate score are
//! kept. Scores rank as-is by default; an absolute-value mode is
//! available for when strong negative evidence should also count.

use std::io::Write;
use std::path::Path;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::dataset::{read_matrix_file, write_matrix_file, Dataset, ATTRIBUTION_MAGIC};
use crate::error::{Error, Result};
use crate::fsio::atomic_write;

/// Per-sample, per-feature attribution scores plus the class each sample
/// row explains.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributionTensor {
    scores: Array2<f64>,
    sample_class: Vec<u32>,
    class_count: usize,
}

impl AttributionTensor {
    /// Validating constructor.
    pub fn new(scores: Array2<f64>, sample_class: Vec<u32>, class_count: usize) -> Result<Self> {
        let (n, d) = (scores.nrows(), scores.ncols());
        if n == 0 || d == 0 {
            return Err(Error::EmptyDataset(format!("attribution tensor is {n}x{d}")));
        }
        if sample_class.len() != n {
            return Err(Error::Shape(format!(
                "{n} score rows but {} class entries",
                sample_class.len()
            )));
        }
        if class_count == 0 {
            return Err(Error::Range("class count must be at least 1".into()));
        }
        for (i, v) in scores.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Range(format!(
                    "attribution entry at row {}, column {} is {v}",
                    i / d,
                    i % d
                )));
            }
        }
        for (i, &c) in sample_class.iter().enumerate() {
            if c as usize >= class_count {
                return Err(Error::Range(format!(
                    "sample {i} claims class {c} but only {class_count} classes exist"
                )));
            }
        }
        Ok(AttributionTensor { scores, sample_class, class_count })
    }

    pub fn n(&self) -> usize {
        self.scores.nrows()
    }

    pub fn feature_count(&self) -> usize {
        self.scores.ncols()
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn scores(&self) -> ArrayView2<'_, f64> {
        self.scores.view()
    }

    pub fn sample_class(&self) -> &[u32] {
        &self.sample_class
    }
}

/// Mean attribution vector over the samples of one class.
pub fn class_mean_scores(attrib: &AttributionTensor, class_id: u32) -> Result<Vec<f64>> {
    let d = attrib.feature_count();
    let mut sum = vec![0.0f64; d];
    let mut count = 0usize;
    for (row, &c) in attrib.scores.rows().into_iter().zip(&attrib.sample_class) {
        if c == class_id {
            for (acc, &v) in sum.iter_mut().zip(row) {
                *acc += v;
            }
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::EmptyClass {
            class: class_id as usize,
            msg: "no attribution rows for this class".into(),
        });
    }
    for v in &mut sum {
        *v /= count as f64;
    }
    Ok(sum)
}

/// Aggregate attribution per feature: the mean of the per-class mean
/// vectors, each class weighted equally regardless of its sample count.
pub fn overall_scores(attrib: &AttributionTensor) -> Result<Vec<f64>> {
    let c = attrib.class_count();
    let d = attrib.feature_count();
    let mut sum = vec![0.0f64; d];
    for class in 0..c {
        let mean = class_mean_scores(attrib, class as u32)?;
        for (acc, v) in sum.iter_mut().zip(mean) {
            *acc += v;
        }
    }
    for v in &mut sum {
        *v /= c as f64;
    }
    Ok(sum)
}

/// An ordered feature selection: `selected` holds m distinct feature
/// indices in non-increasing score order (ties toward the lower index),
/// and `scores` keeps the full aggregate score vector it was ranked
/// from. `absolute` records whether ranking used |score|.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSelection {
    pub selected: Vec<usize>,
    pub scores: Vec<f64>,
    #[serde(default)]
    pub absolute: bool,
}

impl FeatureSelection {
    /// Dimensionality of the space the selection was ranked over.
    pub fn source_dim(&self) -> usize {
        self.scores.len()
    }

    /// Number of selected features.
    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    fn rank_key(&self, idx: usize) -> f64 {
        if self.absolute {
            self.scores[idx].abs()
        } else {
            self.scores[idx]
        }
    }

    /// Check the structural invariants (used after deserialization).
    pub fn validate(&self) -> Result<()> {
        let d = self.scores.len();
        if self.selected.is_empty() || self.selected.len() > d {
            return Err(Error::Format(format!(
                "selection keeps {} of {d} features",
                self.selected.len()
            )));
        }
        for v in &self.scores {
            if !v.is_finite() {
                return Err(Error::Format(format!("selection score {v} is not finite")));
            }
        }
        let mut seen = vec![false; d];
        for &i in &self.selected {
            if i >= d {
                return Err(Error::Format(format!("selected index {i} out of {d}")));
            }
            if seen[i] {
                return Err(Error::Format(format!("selected index {i} repeats")));
            }
            seen[i] = true;
        }
        for w in self.selected.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (ka, kb) = (self.rank_key(a), self.rank_key(b));
            if kb > ka || (kb == ka && b < a) {
                return Err(Error::Format(format!(
                    "selected indices {a} and {b} are out of rank order"
                )));
            }
        }
        Ok(())
    }
}

/// Keep the m highest-scoring feature indices, descending, ties toward
/// the lower index. With `absolute`, rank by |score|.
pub fn top_m(scores: &[f64], m: usize, absolute: bool) -> Result<FeatureSelection> {
    let d = scores.len();
    if m == 0 || m > d {
        return Err(Error::Range(format!("m must be in [1, {d}], got {m}")));
    }
    for (i, v) in scores.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::Range(format!("score for feature {i} is {v}")));
        }
    }
    let key = |i: usize| if absolute { scores[i].abs() } else { scores[i] };
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| key(b).total_cmp(&key(a)).then(a.cmp(&b)));
    order.truncate(m);
    Ok(FeatureSelection { selected: order, scores: scores.to_vec(), absolute })
}

/// Project a dataset onto a selection's features, in selection order.
pub fn apply_selection(sel: &FeatureSelection, data: &Dataset) -> Result<Dataset> {
    if data.feature_count() != sel.source_dim() {
        return Err(Error::Shape(format!(
            "selection was ranked over {} features but the dataset has {}",
            sel.source_dim(),
            data.feature_count()
        )));
    }
    data.select_columns(&sel.selected)
}

/// Write a selection to a JSON file (atomically).
pub fn save_selection(path: &Path, sel: &FeatureSelection) -> Result<()> {
    sel.validate()?;
    atomic_write(path, |w| {
        serde_json::to_writer_pretty(&mut *w, sel)
            .map_err(|e| Error::Format(format!("cannot encode selection: {e}")))?;
        writeln!(w).map_err(|e| Error::io(path, e))
    })
}

/// Read and validate a selection from a JSON file.
pub fn load_selection(path: &Path) -> Result<FeatureSelection> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let sel: FeatureSelection = serde_json::from_str(&text).map_err(|e| {
        Error::Format(format!("{} is not a selection file: {e}", path.display()))
    })?;
    sel.validate()?;
    Ok(sel)
}

/// Read an attribution tensor from the binary container format.
pub fn load_attribution_binary(path: &Path) -> Result<AttributionTensor> {
    let raw = read_matrix_file(path, ATTRIBUTION_MAGIC, "attribution tensor")?;
    let scores = raw.features.mapv(f64::from);
    AttributionTensor::new(scores, raw.labels, raw.class_count)
}

/// Write an attribution tensor in the binary container format. Scores
/// are stored as float32, matching what the loader returns.
pub fn save_attribution_binary(path: &Path, attrib: &AttributionTensor) -> Result<()> {
    let f32_scores = attrib.scores.mapv(|v| v as f32);
    write_matrix_file(
        path,
        ATTRIBUTION_MAGIC,
        f32_scores.view(),
        &attrib.sample_class,
        attrib.class_count as u64,
    )
}

/// Read an attribution tensor from CSV: d score columns then one class
/// column. Class indices are taken as-is (no remapping; they already
/// index the classifier's classes) and the class count is the largest
/// index plus one.
pub fn load_attribution_csv(path: &Path, has_header: bool) -> Result<AttributionTensor> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file);
    let mut scores: Vec<f32> = Vec::new();
    let mut classes: Vec<u32> = Vec::new();
    let mut width: Option<usize> = None;
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1 + usize::from(has_header);
        let record = record.map_err(|e| Error::Parse { row, msg: e.to_string() })?;
        if record.len() == 1 && record[0].is_empty() {
            continue; // blank line
        }
        if record.len() < 2 {
            return Err(Error::Parse {
                row,
                msg: format!("need at least one score column plus a class, got {}", record.len()),
            });
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(Error::Parse {
                    row,
                    msg: format!("row has {} columns, earlier rows had {w}", record.len()),
                });
            }
            _ => {}
        }
        let d = record.len() - 1;
        for field in record.iter().take(d) {
            // Scores parse as float32 so CSV and binary agree bitwise.
            let v: f32 = field
                .parse()
                .map_err(|_| Error::Parse { row, msg: format!("'{field}' is not a number") })?;
            scores.push(v);
        }
        let class_field = &record[d];
        let class: u32 = class_field.parse().map_err(|_| Error::Parse {
            row,
            msg: format!("'{class_field}' is not a class index"),
        })?;
        classes.push(class);
    }
    if classes.is_empty() {
        return Err(Error::EmptyDataset(format!("{} holds no attribution rows", path.display())));
    }
    let d = width.expect("width is set once a row parses") - 1;
    let n = classes.len();
    let matrix = Array2::from_shape_vec((n, d), scores)
        .expect("row-major score buffer matches the counted shape");
    let class_count = classes.iter().copied().max().unwrap_or(0) as usize + 1;
    AttributionTensor::new(matrix.mapv(f64::from), classes, class_count)
}

/// Read an attribution tensor, picking the format by file extension
/// (`.csv` is CSV, anything else the binary container).
pub fn load_attribution_auto(path: &Path, csv_has_header: bool) -> Result<AttributionTensor> {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => load_attribution_csv(path, csv_has_header),
        _ => load_attribution_binary(path),
    }
}
