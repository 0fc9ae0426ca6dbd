//! Dataset handling: CSV and binary I/O, label remapping, min-max
//! normalization, one-hot targets, synthetic data, and stratified splits.
//!
//! Feature values are stored as `f32` (the binary format's precision);
//! all learning math upcasts to `f64`. Labels are kept contiguous in
//! `[0, c)`; the mapping back to the labels that appeared in a source
//! file lives in [`LabelMap`].

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use ndarray::{Array2, ArrayView2};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::fsio::{atomic_write, FileReader};

const DATASET_MAGIC: &[u8; 4] = b"MCKD";
pub(crate) const ATTRIBUTION_MAGIC: &[u8; 4] = b"MCKA";
const FORMAT_VERSION: u32 = 1;

/// A labelled dataset: `n` rows of `d` features plus one class label per
/// row, with labels contiguous in `[0, class_count)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Array2<f32>,
    labels: Vec<u32>,
    class_count: usize,
}

impl Dataset {
    /// Build a dataset, validating every structural invariant: at least
    /// one row and one feature, finite feature values, one label per row,
    /// and every label below `class_count`.
    pub fn new(features: Array2<f32>, labels: Vec<u32>, class_count: usize) -> Result<Self> {
        if features.nrows() == 0 {
            return Err(Error::EmptyDataset("dataset has no rows".into()));
        }
        if features.ncols() == 0 {
            return Err(Error::Shape("dataset needs at least one feature column".into()));
        }
        if labels.len() != features.nrows() {
            return Err(Error::Shape(format!(
                "{} feature rows but {} labels",
                features.nrows(),
                labels.len()
            )));
        }
        if class_count == 0 {
            return Err(Error::Range("class count must be at least 1".into()));
        }
        if let Some((i, v)) = features.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite feature value {v} at row {}, column {}", i.0, i.1)));
        }
        if let Some((row, &l)) = labels.iter().enumerate().find(|(_, &l)| l as usize >= class_count) {
            return Err(Error::Range(format!(
                "label {l} at row {row} is outside [0, {class_count})"
            )));
        }
        Ok(Dataset { features, labels, class_count })
    }

    /// Number of rows.
    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    /// Number of feature columns.
    pub fn feature_count(&self) -> usize {
        self.features.ncols()
    }

    /// Number of classes `c`; labels are `0..c`.
    pub fn class_count(&self) -> usize {
        self.class_count
    }

    /// Feature matrix view.
    pub fn features(&self) -> ArrayView2<'_, f32> {
        self.features.view()
    }

    /// The feature matrix widened to `f64` for numeric work.
    pub fn features_f64(&self) -> Array2<f64> {
        self.features.mapv(f64::from)
    }

    /// Labels, one per row.
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// New dataset holding the given rows, in the given order.
    ///
    /// Panics if an index is out of range; callers produce indices from
    /// this dataset.
    pub fn select_rows(&self, rows: &[u32]) -> Dataset {
        assert!(!rows.is_empty(), "row selection must be non-empty");
        let mut features = Array2::<f32>::zeros((rows.len(), self.feature_count()));
        let mut labels = Vec::with_capacity(rows.len());
        for (out, &r) in rows.iter().enumerate() {
            features.row_mut(out).assign(&self.features.row(r as usize));
            labels.push(self.labels[r as usize]);
        }
        Dataset { features, labels, class_count: self.class_count }
    }

    /// New dataset whose columns are `cols`, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Dataset> {
        if cols.is_empty() {
            return Err(Error::Range("column selection must be non-empty".into()));
        }
        for &c in cols {
            if c >= self.feature_count() {
                return Err(Error::Range(format!(
                    "column {c} is outside [0, {})",
                    self.feature_count()
                )));
            }
        }
        let mut features = Array2::<f32>::zeros((self.n(), cols.len()));
        for (out, &c) in cols.iter().enumerate() {
            features.column_mut(out).assign(&self.features.column(c));
        }
        Ok(Dataset { features, labels: self.labels.clone(), class_count: self.class_count })
    }
}

/// Mapping from contiguous class indices back to the label values that
/// appeared in the source file, in first-appearance order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    originals: Vec<i64>,
}

impl LabelMap {
    /// Identity map for data whose labels are already `0..c`.
    pub fn identity(class_count: usize) -> Self {
        LabelMap { originals: (0..class_count as i64).collect() }
    }

    /// Build from an explicit table; entry `i` is the original label for
    /// class `i`. Duplicate originals are rejected.
    pub fn from_originals(originals: Vec<i64>) -> Result<Self> {
        let mut seen = HashMap::new();
        for (i, &v) in originals.iter().enumerate() {
            if let Some(prev) = seen.insert(v, i) {
                return Err(Error::Format(format!(
                    "label map lists original label {v} for both class {prev} and class {i}"
                )));
            }
        }
        Ok(LabelMap { originals })
    }

    /// Number of classes covered.
    pub fn class_count(&self) -> usize {
        self.originals.len()
    }

    /// Original label for a class index.
    pub fn original(&self, class: u32) -> i64 {
        self.originals[class as usize]
    }

    /// The full table, indexed by class.
    pub fn originals(&self) -> &[i64] {
        &self.originals
    }

    /// Class index owning an original label, if any.
    pub fn position(&self, original: i64) -> Option<u32> {
        self.originals.iter().position(|&v| v == original).map(|i| i as u32)
    }
}

// ---------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------

/// Load a CSV file of `d` float feature columns followed by one integer
/// label column. Labels are remapped to contiguous `[0, c)` in
/// first-appearance order; the returned [`LabelMap`] records the
/// originals.
pub fn load_csv(path: &Path, has_header: bool) -> Result<(Dataset, LabelMap)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .trim(csv::Trim::All)
        .from_reader(file);

    let mut values: Vec<f32> = Vec::new();
    let mut labels: Vec<u32> = Vec::new();
    let mut originals: Vec<i64> = Vec::new();
    let mut class_of: HashMap<i64, u32> = HashMap::new();
    let mut width: Option<usize> = None;

    for (i, record) in reader.records().enumerate() {
        let row = i + 1; // 1-based over data rows
        let record = record.map_err(|e| Error::Parse { row, msg: e.to_string() })?;
        let w = record.len();
        if w == 1 && record.get(0).is_some_and(|f| f.is_empty()) {
            continue; // blank line
        }
        match width {
            None => {
                if w < 2 {
                    return Err(Error::Parse {
                        row,
                        msg: format!("need at least one feature column and a label column, got {w} column(s)"),
                    });
                }
                width = Some(w);
            }
            Some(expect) if w != expect => {
                return Err(Error::Parse {
                    row,
                    msg: format!("row has {w} columns but earlier rows have {expect}"),
                });
            }
            Some(_) => {}
        }
        let w = width.unwrap();
        for col in 0..w - 1 {
            let field = record.get(col).unwrap();
            let v: f32 = field.parse().map_err(|_| Error::Parse {
                row,
                msg: format!("column {col}: {field:?} is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row,
                    msg: format!("column {col}: {field:?} is not finite"),
                });
            }
            values.push(v);
        }
        let label_field = record.get(w - 1).unwrap();
        let original: i64 = label_field.parse().map_err(|_| Error::Parse {
            row,
            msg: format!("label column: {label_field:?} is not an integer"),
        })?;
        let class = *class_of.entry(original).or_insert_with(|| {
            originals.push(original);
            (originals.len() - 1) as u32
        });
        labels.push(class);
    }

    let Some(width) = width else {
        return Err(Error::EmptyDataset(format!("{} contains no data rows", path.display())));
    };
    let d = width - 1;
    let n = labels.len();
    let features = Array2::from_shape_vec((n, d), values).expect("row width was enforced");
    let class_count = originals.len();
    Ok((Dataset::new(features, labels, class_count)?, LabelMap { originals }))
}

/// Write a dataset as CSV (no header), mapping class indices back to
/// their original labels. Feature formatting round-trips `f32` exactly.
pub fn save_csv(path: &Path, data: &Dataset, map: &LabelMap) -> Result<()> {
    if map.class_count() < data.class_count() {
        return Err(Error::Shape(format!(
            "label map covers {} classes but dataset has {}",
            map.class_count(),
            data.class_count()
        )));
    }
    atomic_write(path, |out| {
        let mut line = String::new();
        for i in 0..data.n() {
            line.clear();
            for v in data.features.row(i) {
                line.push_str(&format!("{v}"));
                line.push(',');
            }
            line.push_str(&format!("{}\n", map.original(data.labels[i])));
            out.write_all(line.as_bytes()).map_err(|e| Error::io(path, e))?;
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------
// Binary container (shared by datasets and attribution tensors)
// ---------------------------------------------------------------------

pub(crate) fn write_matrix_file(
    path: &Path,
    magic: &[u8; 4],
    features: ArrayView2<f32>,
    labels: &[u32],
    class_count: u64,
) -> Result<()> {
    atomic_write(path, |out| {
        let io = |e| Error::io(path, e);
        out.write_all(magic).map_err(io)?;
        out.write_u32::<LittleEndian>(FORMAT_VERSION).map_err(io)?;
        out.write_u64::<LittleEndian>(features.nrows() as u64).map_err(io)?;
        out.write_u64::<LittleEndian>(features.ncols() as u64).map_err(io)?;
        out.write_u64::<LittleEndian>(class_count).map_err(io)?;
        for row in features.rows() {
            for &v in row {
                out.write_f32::<LittleEndian>(v).map_err(io)?;
            }
        }
        for &l in labels {
            out.write_u32::<LittleEndian>(l).map_err(io)?;
        }
        Ok(())
    })
}

pub(crate) struct MatrixFile {
    pub features: Array2<f32>,
    pub labels: Vec<u32>,
    pub class_count: usize,
}

pub(crate) fn read_matrix_file(path: &Path, magic: &[u8; 4], kind: &str) -> Result<MatrixFile> {
    let mut r = FileReader::open(path)?;
    let mut got = [0u8; 4];
    r.read_exact(&mut got, "magic")?;
    if &got != magic {
        return Err(Error::Format(format!(
            "{} is not a {kind} file (magic {:?}, expected {:?})",
            path.display(),
            String::from_utf8_lossy(&got),
            String::from_utf8_lossy(magic)
        )));
    }
    let version = r.read_u32("version")?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "{} uses {kind} format version {version}; this build reads version {FORMAT_VERSION}",
            path.display()
        )));
    }
    let n = r.read_u64("row count")?;
    let d = r.read_u64("feature count")?;
    let c = r.read_u64("class count")?;
    if n == 0 {
        return Err(Error::EmptyDataset(format!("{} declares zero rows", path.display())));
    }
    if d == 0 {
        return Err(Error::Format(format!("{} declares zero feature columns", path.display())));
    }
    if c == 0 || c > u64::from(u32::MAX) {
        return Err(Error::Format(format!("{} declares class count {c}", path.display())));
    }
    let total = n
        .checked_mul(d)
        .filter(|t| *t <= (usize::MAX as u64) && *t * 4 < (1u64 << 40))
        .ok_or_else(|| Error::Format(format!("{} declares an implausible payload ({n} x {d})", path.display())))?;

    let mut values = vec![0f32; total as usize];
    // Bulk little-endian read of the whole feature block.
    {
        let mut bytes = vec![0u8; values.len() * 4];
        r.read_exact(&mut bytes, "feature payload")?;
        let mut cursor = std::io::Cursor::new(bytes);
        cursor
            .read_f32_into::<LittleEndian>(&mut values)
            .expect("in-memory read cannot fail");
    }
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::Format(format!(
                "{} contains non-finite value {v} at row {}, column {}",
                path.display(),
                i / d as usize,
                i % d as usize
            )));
        }
    }
    let mut labels = vec![0u32; n as usize];
    {
        let mut bytes = vec![0u8; labels.len() * 4];
        r.read_exact(&mut bytes, "label payload")?;
        let mut cursor = std::io::Cursor::new(bytes);
        cursor
            .read_u32_into::<LittleEndian>(&mut labels)
            .expect("in-memory read cannot fail");
    }
    r.expect_eof()?;
    for (row, &l) in labels.iter().enumerate() {
        if u64::from(l) >= c {
            return Err(Error::Format(format!(
                "{} row {row} has label {l}, outside the declared {c} classes",
                path.display()
            )));
        }
    }
    let features = Array2::from_shape_vec((n as usize, d as usize), values).expect("shape checked");
    Ok(MatrixFile { features, labels, class_count: c as usize })
}

/// Load a dataset from the binary container format.
pub fn load_binary(path: &Path) -> Result<Dataset> {
    let m = read_matrix_file(path, DATASET_MAGIC, "dataset")?;
    Dataset::new(m.features, m.labels, m.class_count)
}

/// Save a dataset in the binary container format.
pub fn save_binary(path: &Path, data: &Dataset) -> Result<()> {
    write_matrix_file(path, DATASET_MAGIC, data.features(), data.labels(), data.class_count() as u64)
}

/// Load a dataset by extension: `.csv` as text, anything else binary.
pub fn load_auto(path: &Path, has_header: bool) -> Result<(Dataset, LabelMap)> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        load_csv(path, has_header)
    } else {
        let data = load_binary(path)?;
        let c = data.class_count();
        Ok((data, LabelMap::identity(c)))
    }
}

// ---------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------

/// Per-feature min/max learned from training data, mapping each feature
/// to `[0, 1]` via `(x - min) / (max - min)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationSpec {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl NormalizationSpec {
    /// Rebuild from stored vectors (model deserialization).
    pub fn from_bounds(min: Vec<f64>, max: Vec<f64>) -> Result<Self> {
        if min.len() != max.len() {
            return Err(Error::Shape(format!(
                "normalizer has {} minima but {} maxima",
                min.len(),
                max.len()
            )));
        }
        for (i, (lo, hi)) in min.iter().zip(&max).enumerate() {
            if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                return Err(Error::Format(format!(
                    "normalizer bounds for feature {i} are invalid ({lo}, {hi})"
                )));
            }
        }
        Ok(NormalizationSpec { min, max })
    }

    /// Feature count the bounds apply to.
    pub fn feature_count(&self) -> usize {
        self.min.len()
    }

    /// Per-feature minima.
    pub fn min(&self) -> &[f64] {
        &self.min
    }

    /// Per-feature maxima.
    pub fn max(&self) -> &[f64] {
        &self.max
    }
}

/// Learn per-feature bounds from a dataset.
pub fn fit_normalizer(train: &Dataset) -> NormalizationSpec {
    let d = train.feature_count();
    let mut min = vec![f64::INFINITY; d];
    let mut max = vec![f64::NEG_INFINITY; d];
    for row in train.features().rows() {
        for (j, &v) in row.iter().enumerate() {
            let v = f64::from(v);
            if v < min[j] {
                min[j] = v;
            }
            if v > max[j] {
                max[j] = v;
            }
        }
    }
    NormalizationSpec { min, max }
}

/// Apply min-max scaling. Features that were constant in training map to
/// 0. With `clamp`, outputs are clipped into `[0, 1]` (required before a
/// chi-square kernel sees out-of-sample data).
pub fn apply_normalizer(spec: &NormalizationSpec, data: &Dataset, clamp: bool) -> Result<Dataset> {
    if spec.feature_count() != data.feature_count() {
        return Err(Error::Shape(format!(
            "normalizer was fit on {} features but data has {}",
            spec.feature_count(),
            data.feature_count()
        )));
    }
    let mut features = data.features().to_owned();
    for mut row in features.rows_mut() {
        for (j, v) in row.iter_mut().enumerate() {
            let (lo, hi) = (spec.min[j], spec.max[j]);
            let t = if hi > lo { (f64::from(*v) - lo) / (hi - lo) } else { 0.0 };
            let t = if clamp { t.clamp(0.0, 1.0) } else { t };
            *v = t as f32;
        }
    }
    Dataset::new(features, data.labels.clone(), data.class_count)
}

// ---------------------------------------------------------------------
// Targets
// ---------------------------------------------------------------------

/// One-hot target matrix: row per sample, column per class, exactly one
/// 1.0 per row.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetMatrix {
    values: Array2<f64>,
}

impl TargetMatrix {
    /// The underlying `n x c` matrix.
    pub fn values(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    /// Number of classes (columns).
    pub fn class_count(&self) -> usize {
        self.values.ncols()
    }

    /// Target rows for the given sample indices, in order.
    pub fn select_rows(&self, rows: &[u32]) -> TargetMatrix {
        let mut values = Array2::<f64>::zeros((rows.len(), self.values.ncols()));
        for (out, &r) in rows.iter().enumerate() {
            values.row_mut(out).assign(&self.values.row(r as usize));
        }
        TargetMatrix { values }
    }
}

/// Encode labels as a one-hot matrix with `c` columns.
pub fn one_hot(labels: &[u32], c: usize) -> Result<TargetMatrix> {
    if c == 0 {
        return Err(Error::Range("class count must be at least 1".into()));
    }
    let mut values = Array2::<f64>::zeros((labels.len(), c));
    for (i, &l) in labels.iter().enumerate() {
        if l as usize >= c {
            return Err(Error::Range(format!("label {l} at row {i} is outside [0, {c})")));
        }
        values[[i, l as usize]] = 1.0;
    }
    Ok(TargetMatrix { values })
}

// ---------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------

/// Shape family for [`gen_synthetic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticShape {
    /// Gaussian clusters, one per class, centred on a wide circle in the
    /// first two dimensions — close to linearly separable.
    Blobs,
    /// Concentric rings, one radius band per class — not linearly
    /// separable.
    Rings,
}

/// Deterministically generate a labelled dataset. The same
/// `(n, d, c, seed, shape)` always produces identical bytes. Classes are
/// assigned round-robin, so `n >= c` guarantees every class appears.
pub fn gen_synthetic(n: usize, d: usize, c: usize, seed: u64, shape: SyntheticShape) -> Result<Dataset> {
    if c == 0 {
        return Err(Error::Range("class count must be at least 1".into()));
    }
    if n < c {
        return Err(Error::Range(format!("need at least {c} rows to cover {c} classes, got {n}")));
    }
    if d < 2 {
        return Err(Error::Range(format!("synthetic shapes need at least 2 dimensions, got {d}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut features = Array2::<f32>::zeros((n, d));
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % c;
        labels.push(class as u32);
        let mut row = features.row_mut(i);
        match shape {
            SyntheticShape::Blobs => {
                let angle = 2.0 * std::f64::consts::PI * class as f64 / c as f64;
                let (cx, cy) = (10.0 * angle.cos(), 10.0 * angle.sin());
                for j in 0..d {
                    let noise: f64 = normal.sample(&mut rng);
                    let centre = match j {
                        0 => cx,
                        1 => cy,
                        _ => 0.0,
                    };
                    row[j] = (centre + noise) as f32;
                }
            }
            SyntheticShape::Rings => {
                let radius = 1.0 + 2.0 * class as f64;
                let angle: f64 = rng.random_range(0.0..2.0 * std::f64::consts::PI);
                let radial: f64 = normal.sample(&mut rng);
                let r = radius + 0.15 * radial;
                row[0] = (r * angle.cos()) as f32;
                row[1] = (r * angle.sin()) as f32;
                for j in 2..d {
                    let noise: f64 = normal.sample(&mut rng);
                    row[j] = (0.15 * noise) as f32;
                }
            }
        }
    }
    Dataset::new(features, labels, c)
}

// ---------------------------------------------------------------------
// Splitting
// ---------------------------------------------------------------------

/// Stratified train/test split: within each class, `test_fraction`
/// (rounded) of the rows go to the test side, so class proportions are
/// preserved to within one sample. Deterministic for a given seed. Rows
/// keep their original relative order inside each side.
pub fn train_test_split(data: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Range(format!(
            "test fraction must be strictly between 0 and 1, got {test_fraction}"
        )));
    }
    let mut by_class: Vec<Vec<u32>> = vec![Vec::new(); data.class_count()];
    for (i, &l) in data.labels().iter().enumerate() {
        by_class[l as usize].push(i as u32);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut test_idx: Vec<u32> = Vec::new();
    let mut train_idx: Vec<u32> = Vec::new();
    for (class, mut members) in by_class.into_iter().enumerate() {
        if members.is_empty() {
            continue; // class absent from the data; nothing to preserve
        }
        let count = members.len();
        let take = (test_fraction * count as f64).round() as usize;
        let take = take.min(count);
        if take == count {
            return Err(Error::Stratification(format!(
                "class {class} has {count} row(s) and a {test_fraction} test fraction would leave it absent from the training side"
            )));
        }
        members.shuffle(&mut rng);
        test_idx.extend(&members[..take]);
        train_idx.extend(&members[take..]);
    }
    if test_idx.is_empty() {
        return Err(Error::Stratification(
            "test fraction rounds to zero rows for every class; the test side would be empty".into(),
        ));
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok((data.select_rows(&train_idx), data.select_rows(&test_idx)))
}
