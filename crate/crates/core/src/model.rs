//! Trained-model persistence and the raw-query prediction pipeline.
//!
//! A saved model bundles the classifier with everything needed to serve
//! queries in the original data space: the feature selection applied
//! before training (if any), the normalization bounds fitted on the
//! training data, and the table mapping internal class indices back to
//! the label values the training file used. Everything lives in one
//! binary file of length-prefixed sections, so identically configured
//! training runs produce byte-identical files.

use std::borrow::Cow;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use byteorder::{LittleEndian, WriteBytesExt};
use ndarray::{Array1, Array2, ArrayView2};

use crate::baselines::{
    default_hidden_count, predict_elm, predict_gnb, predict_rkelm, train_elm, train_gnb,
    train_rkelm, ElmModel, GnbModel, KnnModel, RkelmModel,
};
use crate::dataset::{
    apply_normalizer, fit_normalizer, one_hot, Dataset, LabelMap, NormalizationSpec,
};
use crate::error::{Error, Result};
use crate::feature_select::{apply_selection, FeatureSelection};
use crate::fsio::{atomic_write, FileReader};
use crate::kelm::{predict_kelm, train_kelm, KelmColumn, KelmConfig};
use crate::kernels::KernelParams;
use crate::mckelm::{train_mckelm, MckelmModel, QueryReport, VoteMode};
use crate::partition::{PartitionConfig, PartitionTree, SplitNode};

const MODEL_MAGIC: &[u8; 4] = b"MCKM";
const MODEL_VERSION: u32 = 1;

/// Any classifier this crate can train, behind one dispatch point.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainedClassifier {
    Mckelm(MckelmModel),
    Kelm(KelmColumn),
    Elm(ElmModel),
    Rkelm(RkelmModel),
    Knn(KnnModel),
    Gnb(GnbModel),
}

impl TrainedClassifier {
    fn kind_tag(&self) -> u32 {
        match self {
            TrainedClassifier::Mckelm(_) => 0,
            TrainedClassifier::Kelm(_) => 1,
            TrainedClassifier::Elm(_) => 2,
            TrainedClassifier::Rkelm(_) => 3,
            TrainedClassifier::Knn(_) => 4,
            TrainedClassifier::Gnb(_) => 5,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            TrainedClassifier::Mckelm(_) => "mckelm",
            TrainedClassifier::Kelm(_) => "kelm",
            TrainedClassifier::Elm(_) => "elm",
            TrainedClassifier::Rkelm(_) => "rkelm",
            TrainedClassifier::Knn(_) => "knn",
            TrainedClassifier::Gnb(_) => "gnb",
        }
    }

    /// Classes the classifier scores.
    pub fn class_count(&self) -> usize {
        match self {
            TrainedClassifier::Mckelm(m) => m.class_count(),
            TrainedClassifier::Kelm(c) => c.class_count(),
            TrainedClassifier::Elm(m) => m.class_count(),
            TrainedClassifier::Rkelm(m) => m.class_count(),
            TrainedClassifier::Knn(m) => m.train_data().class_count(),
            TrainedClassifier::Gnb(m) => m.class_count(),
        }
    }

    /// Features the classifier consumes (after any selection).
    pub fn feature_count(&self) -> usize {
        match self {
            TrainedClassifier::Mckelm(m) => m.dim(),
            TrainedClassifier::Kelm(c) => c.support().ncols(),
            TrainedClassifier::Elm(m) => m.feature_count(),
            TrainedClassifier::Rkelm(m) => m.feature_count(),
            TrainedClassifier::Knn(m) => m.train_data().feature_count(),
            TrainedClassifier::Gnb(m) => m.feature_count(),
        }
    }

    /// The kernel the classifier evaluates, for those that have one.
    pub fn kernel(&self) -> Option<&KernelParams> {
        match self {
            // Every column shares one configuration; the first speaks
            // for all of them.
            TrainedClassifier::Mckelm(m) => Some(m.columns()[0].config().kernel()),
            TrainedClassifier::Kelm(c) => Some(c.config().kernel()),
            TrainedClassifier::Rkelm(m) => Some(m.kernel()),
            _ => None,
        }
    }

    /// Classify preprocessed queries. Vote reports come back only from
    /// the multicolumn model; `mode` is ignored by everything else.
    pub fn predict(
        &self,
        queries: ArrayView2<f64>,
        mode: VoteMode,
    ) -> Result<(Vec<u32>, Option<Vec<QueryReport>>)> {
        match self {
            TrainedClassifier::Mckelm(m) => {
                let reports = m.predict_mode(queries, mode)?;
                let labels = reports.iter().map(|r| r.label).collect();
                Ok((labels, Some(reports)))
            }
            TrainedClassifier::Kelm(c) => Ok((predict_kelm(c, queries)?.labels, None)),
            TrainedClassifier::Elm(m) => Ok((predict_elm(m, queries)?, None)),
            TrainedClassifier::Rkelm(m) => Ok((predict_rkelm(m, queries)?, None)),
            TrainedClassifier::Knn(m) => Ok((m.predict(queries)?, None)),
            TrainedClassifier::Gnb(m) => Ok((predict_gnb(m, queries)?, None)),
        }
    }
}

/// Prediction over a raw query batch.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelPrediction {
    /// Predicted class indices in the model's internal space.
    pub internal: Vec<u32>,
    /// The same predictions mapped back to original label values.
    pub labels: Vec<i64>,
    /// Routing and vote records, when the classifier produces them.
    pub reports: Option<Vec<QueryReport>>,
}

/// A classifier plus the preprocessing that turns raw queries into its
/// input space.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub classifier: TrainedClassifier,
    /// Per-feature bounds fitted on the (post-selection) training data.
    pub normalizer: NormalizationSpec,
    /// Feature subset applied before normalization, if training used one.
    pub selection: Option<FeatureSelection>,
    /// Internal class index -> original label value.
    pub labels: LabelMap,
}

impl ModelFile {
    /// Cross-check the parts against each other.
    pub fn validate(&self) -> Result<()> {
        let d = self.classifier.feature_count();
        if self.normalizer.feature_count() != d {
            return Err(Error::Shape(format!(
                "normalizer covers {} features but the classifier consumes {d}",
                self.normalizer.feature_count()
            )));
        }
        if let Some(sel) = &self.selection {
            if sel.len() != d {
                return Err(Error::Shape(format!(
                    "selection keeps {} features but the classifier consumes {d}",
                    sel.len()
                )));
            }
        }
        if self.labels.class_count() != self.classifier.class_count() {
            return Err(Error::Format(format!(
                "label map covers {} classes but the classifier scores {}",
                self.labels.class_count(),
                self.classifier.class_count()
            )));
        }
        Ok(())
    }

    /// Whether normalization clamps into [0, 1]. Only kernels defined on
    /// the unit interval need it; everything else passes values through
    /// so out-of-range queries keep their geometry.
    pub fn clamps(&self) -> bool {
        self.classifier.kernel().is_some_and(KernelParams::requires_unit_interval)
    }

    /// Features a raw query row must have (before any selection).
    pub fn input_dim(&self) -> usize {
        match &self.selection {
            Some(sel) => sel.source_dim(),
            None => self.classifier.feature_count(),
        }
    }

    /// Run the full pipeline on raw queries: select features, normalize,
    /// classify, and map class indices back to original labels.
    pub fn predict(&self, data: &Dataset, mode: VoteMode) -> Result<ModelPrediction> {
        let selected: Cow<'_, Dataset> = match &self.selection {
            Some(sel) => Cow::Owned(apply_selection(sel, data)?),
            None => Cow::Borrowed(data),
        };
        let normalized = apply_normalizer(&self.normalizer, &selected, self.clamps())?;
        let (internal, reports) =
            self.classifier.predict(normalized.features_f64().view(), mode)?;
        let labels = internal.iter().map(|&c| self.labels.original(c)).collect();
        Ok(ModelPrediction { internal, labels, reports })
    }

    /// Serialize to `path`, atomically.
    pub fn save(&self, path: &Path) -> Result<()> {
        self.validate()?;
        let sections = [
            encode_label_map(&self.labels),
            encode_normalizer(&self.normalizer),
            encode_selection(self.selection.as_ref()),
            encode_classifier(&self.classifier),
        ];
        atomic_write(path, |out| {
            let io = |e| Error::io(path, e);
            out.write_all(MODEL_MAGIC).map_err(io)?;
            out.write_u32::<LittleEndian>(MODEL_VERSION).map_err(io)?;
            out.write_u32::<LittleEndian>(self.classifier.kind_tag()).map_err(io)?;
            for section in &sections {
                out.write_u64::<LittleEndian>(section.len() as u64).map_err(io)?;
                out.write_all(section).map_err(io)?;
            }
            Ok(())
        })
    }

    /// Load and fully validate a model file.
    pub fn load(path: &Path) -> Result<ModelFile> {
        let mut r = FileReader::open(path)?;
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic, "magic")?;
        if &magic != MODEL_MAGIC {
            return Err(Error::Format(format!(
                "{} is not a model file (magic {:?})",
                path.display(),
                String::from_utf8_lossy(&magic)
            )));
        }
        let version = r.read_u32("version")?;
        if version != MODEL_VERSION {
            return Err(Error::Format(format!(
                "{} uses model format version {version}; this build reads version {MODEL_VERSION}",
                path.display()
            )));
        }
        let kind = r.read_u32("classifier kind")?;

        let labels = decode_with(&mut r, "label map", decode_label_map)?;
        let normalizer = decode_with(&mut r, "normalizer", decode_normalizer)?;
        let selection = decode_with(&mut r, "feature selection", decode_selection)?;
        let classifier = decode_with(&mut r, "classifier", |s| decode_classifier(kind, s))?;
        r.expect_eof()?;

        let model = ModelFile { classifier, normalizer, selection, labels };
        model.validate()?;
        Ok(model)
    }
}

/// Re-express labels given in one file's class space in another's.
/// Fails when a label was never seen by the target map.
pub fn translate_labels(from: &LabelMap, labels: &[u32], to: &LabelMap) -> Result<Vec<u32>> {
    labels
        .iter()
        .map(|&l| {
            let original = from.original(l);
            to.position(original).ok_or_else(|| {
                Error::Range(format!("label {original} does not appear in the model's label map"))
            })
        })
        .collect()
}

/// Which classifier a training run should produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierChoice {
    Mckelm,
    Kelm,
    Elm,
    Rkelm,
    Knn,
    Gnb,
}

/// A complete training request: the classifier, its hyper-parameters,
/// and the feature selection to apply before anything else.
#[derive(Debug, Clone)]
pub struct TrainRecipe {
    pub classifier: ClassifierChoice,
    pub kernel: KernelParams,
    pub regularization: f64,
    /// Partition depth for the multicolumn model: 2^eta subsets.
    pub eta: u32,
    /// Training rows consulted when routing a query to columns.
    pub route_k: usize,
    /// Hidden nodes for the random-feature machine; `None` scales the
    /// count with the training rows.
    pub hidden: Option<usize>,
    /// Neighbours for the nearest-neighbour classifier.
    pub knn_k: usize,
    pub seed: u64,
    pub selection: Option<FeatureSelection>,
}

impl TrainRecipe {
    pub fn new(classifier: ClassifierChoice) -> Self {
        TrainRecipe {
            classifier,
            kernel: KernelParams::Rbf { gamma: 1.0 },
            regularization: 1.0,
            eta: 3,
            route_k: 3,
            hidden: None,
            knn_k: 1,
            seed: 0,
            selection: None,
        }
    }
}

/// The full training pipeline on raw data: feature selection, bounds
/// fitted on what remains, normalization, then the classifier. Returns
/// the bundled model and the seconds the classifier fit alone took —
/// preparation is excluded so timings compare classifiers, not I/O.
pub fn train_model_file(
    recipe: &TrainRecipe,
    raw: &Dataset,
    labels: LabelMap,
) -> Result<(ModelFile, f64)> {
    let selected = match &recipe.selection {
        Some(sel) => apply_selection(sel, raw)?,
        None => raw.clone(),
    };
    let normalizer = fit_normalizer(&selected);
    let train = apply_normalizer(&normalizer, &selected, false)?;
    let config = KelmConfig::new(recipe.kernel, recipe.regularization)?;

    let started = Instant::now();
    let classifier = match recipe.classifier {
        ClassifierChoice::Mckelm => TrainedClassifier::Mckelm(train_mckelm(
            &train,
            &PartitionConfig::new(recipe.eta)?,
            &config,
            recipe.route_k,
        )?),
        ClassifierChoice::Kelm => {
            let targets = one_hot(train.labels(), train.class_count())?;
            TrainedClassifier::Kelm(train_kelm(&train, &targets, &config, 0)?)
        }
        ClassifierChoice::Elm => {
            let targets = one_hot(train.labels(), train.class_count())?;
            let hidden = recipe.hidden.unwrap_or_else(|| default_hidden_count(train.n()));
            TrainedClassifier::Elm(train_elm(
                &train,
                &targets,
                hidden,
                recipe.regularization,
                recipe.seed,
            )?)
        }
        ClassifierChoice::Rkelm => {
            let targets = one_hot(train.labels(), train.class_count())?;
            TrainedClassifier::Rkelm(train_rkelm(
                &train,
                &targets,
                recipe.kernel,
                recipe.regularization,
                recipe.seed,
            )?)
        }
        ClassifierChoice::Knn => TrainedClassifier::Knn(KnnModel::new(train, recipe.knn_k)?),
        ClassifierChoice::Gnb => TrainedClassifier::Gnb(train_gnb(&train)?),
    };
    let seconds = started.elapsed().as_secs_f64();

    let model = ModelFile { classifier, normalizer, selection: recipe.selection.clone(), labels };
    model.validate()?;
    Ok((model, seconds))
}

// ---------------------------------------------------------------------
// Section encoding
// ---------------------------------------------------------------------

fn put_u8(buf: &mut Vec<u8>, v: u8) {
    buf.push(v);
}

fn put_u32(buf: &mut Vec<u8>, v: u32) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn put_u64(buf: &mut Vec<u8>, v: u64) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn put_i64(buf: &mut Vec<u8>, v: i64) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn put_f64(buf: &mut Vec<u8>, v: f64) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn put_matrix(buf: &mut Vec<u8>, m: ArrayView2<f64>) {
    put_u64(buf, m.nrows() as u64);
    put_u64(buf, m.ncols() as u64);
    for row in m.rows() {
        for &v in row {
            put_f64(buf, v);
        }
    }
}

fn put_kernel(buf: &mut Vec<u8>, kernel: &KernelParams) {
    let tag = match kernel {
        KernelParams::Rbf { .. } => 0u8,
        KernelParams::ChiSquare { .. } => 1u8,
    };
    put_u8(buf, tag);
    put_f64(buf, kernel.scalar());
}

fn encode_label_map(map: &LabelMap) -> Vec<u8> {
    let mut buf = Vec::new();
    put_u64(&mut buf, map.class_count() as u64);
    for &v in map.originals() {
        put_i64(&mut buf, v);
    }
    buf
}

fn encode_normalizer(spec: &NormalizationSpec) -> Vec<u8> {
    let mut buf = Vec::new();
    put_u64(&mut buf, spec.feature_count() as u64);
    for &v in spec.min() {
        put_f64(&mut buf, v);
    }
    for &v in spec.max() {
        put_f64(&mut buf, v);
    }
    buf
}

fn encode_selection(selection: Option<&FeatureSelection>) -> Vec<u8> {
    let mut buf = Vec::new();
    match selection {
        None => put_u8(&mut buf, 0),
        Some(sel) => {
            put_u8(&mut buf, 1);
            put_u64(&mut buf, sel.source_dim() as u64);
            put_u64(&mut buf, sel.len() as u64);
            for &i in &sel.selected {
                put_u64(&mut buf, i as u64);
            }
            for &s in &sel.scores {
                put_f64(&mut buf, s);
            }
            put_u8(&mut buf, sel.absolute as u8);
        }
    }
    buf
}

fn encode_classifier(classifier: &TrainedClassifier) -> Vec<u8> {
    let mut buf = Vec::new();
    match classifier {
        TrainedClassifier::Mckelm(m) => {
            put_u64(&mut buf, m.route_k() as u64);
            put_u64(&mut buf, m.class_count() as u64);
            let config = m.columns()[0].config();
            put_kernel(&mut buf, config.kernel());
            put_f64(&mut buf, config.regularization());
            let tree = m.tree();
            put_u32(&mut buf, tree.eta());
            put_u64(&mut buf, tree.dim() as u64);
            put_f64(&mut buf, tree.root_density());
            for s in tree.splits() {
                put_u64(&mut buf, s.feature as u64);
                put_f64(&mut buf, s.value);
                put_f64(&mut buf, s.halves_density);
            }
            for members in tree.leaf_members() {
                put_u64(&mut buf, members.len() as u64);
                for &r in members {
                    put_u32(&mut buf, r);
                }
            }
            put_matrix(&mut buf, m.train_features().view());
            // Support rows are recoverable from the routing matrix and
            // the leaf membership; only the solved weights are stored.
            for col in m.columns() {
                put_matrix(&mut buf, col.beta());
            }
        }
        TrainedClassifier::Kelm(c) => {
            put_kernel(&mut buf, c.config().kernel());
            put_f64(&mut buf, c.config().regularization());
            put_matrix(&mut buf, c.support());
            put_matrix(&mut buf, c.beta());
        }
        TrainedClassifier::Elm(m) => {
            put_u64(&mut buf, m.seed());
            put_matrix(&mut buf, m.input_weights().view());
            for &b in m.biases() {
                put_f64(&mut buf, b);
            }
            put_matrix(&mut buf, m.beta().view());
        }
        TrainedClassifier::Rkelm(m) => {
            put_kernel(&mut buf, m.kernel());
            put_f64(&mut buf, m.regularization());
            put_u64(&mut buf, m.seed());
            put_matrix(&mut buf, m.nodes().view());
            put_matrix(&mut buf, m.beta().view());
            for &r in m.node_rows() {
                put_u32(&mut buf, r);
            }
        }
        TrainedClassifier::Knn(m) => {
            put_u64(&mut buf, m.k() as u64);
            let data = m.train_data();
            put_u64(&mut buf, data.class_count() as u64);
            put_u64(&mut buf, data.n() as u64);
            put_u64(&mut buf, data.feature_count() as u64);
            for row in data.features().rows() {
                for &v in row {
                    buf.extend_from_slice(&v.to_le_bytes());
                }
            }
            for &l in data.labels() {
                put_u32(&mut buf, l);
            }
        }
        TrainedClassifier::Gnb(m) => {
            put_matrix(&mut buf, m.means().view());
            put_matrix(&mut buf, m.variances().view());
            for &p in m.priors() {
                put_f64(&mut buf, p);
            }
        }
    }
    buf
}

// ---------------------------------------------------------------------
// Section decoding
// ---------------------------------------------------------------------

/// One length-prefixed section, consumed front to back.
struct Section {
    name: &'static str,
    data: Vec<u8>,
    pos: usize,
}

fn read_section(r: &mut FileReader, name: &'static str) -> Result<Section> {
    let len = r.read_u64(&format!("{name} section length"))?;
    let data = r.read_block(len, name)?;
    Ok(Section { name, data, pos: 0 })
}

/// Decode one section and insist every byte of it was consumed.
fn decode_with<T>(
    r: &mut FileReader,
    name: &'static str,
    decode: impl FnOnce(&mut Section) -> Result<T>,
) -> Result<T> {
    let mut section = read_section(r, name)?;
    let value = decode(&mut section)?;
    section.finish()?;
    Ok(value)
}

impl Section {
    fn take(&mut self, n: usize, what: &str) -> Result<&[u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.data.len()).ok_or_else(|| {
            Error::Truncated(format!("{} section ended inside {what}", self.name))
        })?;
        let slice = &self.data[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn get_u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn get_u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn get_u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn get_i64(&mut self, what: &str) -> Result<i64> {
        Ok(i64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn get_f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn get_f32(&mut self, what: &str) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn get_count(&mut self, what: &str) -> Result<usize> {
        let v = self.get_u64(what)?;
        usize::try_from(v)
            .map_err(|_| Error::Format(format!("{what} = {v} does not fit this platform")))
    }

    fn get_matrix(&mut self, what: &str) -> Result<Array2<f64>> {
        let rows = self.get_count(what)?;
        let cols = self.get_count(what)?;
        let total = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::Format(format!("{what} dimensions {rows}x{cols} overflow")))?;
        let mut values = Vec::with_capacity(total.min(self.data.len() / 8 + 1));
        for _ in 0..total {
            values.push(self.get_f64(what)?);
        }
        Array2::from_shape_vec((rows, cols), values)
            .map_err(|e| Error::Format(format!("{what}: {e}")))
    }

    fn get_kernel(&mut self) -> Result<KernelParams> {
        let tag = self.get_u8("kernel kind")?;
        let scalar = self.get_f64("kernel parameter")?;
        match tag {
            0 => KernelParams::rbf(scalar),
            1 => KernelParams::chi_square(scalar),
            other => Err(Error::Format(format!("unknown kernel tag {other}"))),
        }
    }

    /// Error if any bytes remain unconsumed.
    fn finish(self) -> Result<()> {
        if self.pos != self.data.len() {
            return Err(Error::Format(format!(
                "{} section has {} unread trailing bytes",
                self.name,
                self.data.len() - self.pos
            )));
        }
        Ok(())
    }
}

fn decode_label_map(s: &mut Section) -> Result<LabelMap> {
    let c = s.get_count("class count")?;
    let mut originals = Vec::with_capacity(c.min(s.data.len() / 8 + 1));
    for _ in 0..c {
        originals.push(s.get_i64("original label")?);
    }
    LabelMap::from_originals(originals)
}

fn decode_normalizer(s: &mut Section) -> Result<NormalizationSpec> {
    let d = s.get_count("feature count")?;
    let mut min = Vec::with_capacity(d.min(s.data.len() / 8 + 1));
    for _ in 0..d {
        min.push(s.get_f64("feature minimum")?);
    }
    let mut max = Vec::with_capacity(d.min(s.data.len() / 8 + 1));
    for _ in 0..d {
        max.push(s.get_f64("feature maximum")?);
    }
    NormalizationSpec::from_bounds(min, max)
}

fn decode_selection(s: &mut Section) -> Result<Option<FeatureSelection>> {
    if s.get_u8("selection flag")? == 0 {
        return Ok(None);
    }
    let source_dim = s.get_count("source feature count")?;
    let m = s.get_count("selected feature count")?;
    let mut selected = Vec::with_capacity(m.min(s.data.len() / 8 + 1));
    for _ in 0..m {
        selected.push(s.get_count("selected feature index")?);
    }
    let mut scores = Vec::with_capacity(source_dim.min(s.data.len() / 8 + 1));
    for _ in 0..source_dim {
        scores.push(s.get_f64("feature score")?);
    }
    let absolute = match s.get_u8("ranking mode")? {
        0 => false,
        1 => true,
        other => return Err(Error::Format(format!("unknown ranking mode {other}"))),
    };
    let sel = FeatureSelection { selected, scores, absolute };
    sel.validate()?;
    Ok(Some(sel))
}

fn decode_classifier(kind: u32, s: &mut Section) -> Result<TrainedClassifier> {
    let classifier = match kind {
        0 => {
            let route_k = s.get_count("route count")?;
            let class_count = s.get_count("class count")?;
            let kernel = s.get_kernel()?;
            let reg = s.get_f64("regularization")?;
            let config = KelmConfig::new(kernel, reg)?;
            let eta = s.get_u32("partition depth")?;
            let dim = s.get_count("feature count")?;
            let root_density = s.get_f64("root density")?;
            let leaves = 1usize
                .checked_shl(eta.min(31))
                .filter(|_| eta <= 31)
                .ok_or_else(|| Error::Format(format!("partition depth {eta} is out of range")))?;
            let mut splits = Vec::with_capacity(leaves - 1);
            for _ in 0..leaves - 1 {
                let feature = s.get_count("split feature")?;
                let value = s.get_f64("split value")?;
                let halves_density = s.get_f64("split halves density")?;
                splits.push(SplitNode { feature, value, halves_density });
            }
            let mut leaf_members = Vec::with_capacity(leaves);
            for _ in 0..leaves {
                let count = s.get_count("leaf row count")?;
                let mut members = Vec::with_capacity(count.min(s.data.len() / 4 + 1));
                for _ in 0..count {
                    members.push(s.get_u32("leaf row index")?);
                }
                leaf_members.push(members);
            }
            let train_features = s.get_matrix("routing matrix")?;
            let tree = PartitionTree::from_parts(eta, dim, root_density, splits, leaf_members)?;
            let mut columns = Vec::with_capacity(leaves);
            for (i, members) in tree.leaf_members().iter().enumerate() {
                let beta = s.get_matrix("column weights")?;
                let mut support = Array2::<f64>::zeros((members.len(), dim));
                for (out, &r) in members.iter().enumerate() {
                    let row = train_features.row(r as usize);
                    support.row_mut(out).assign(&row);
                }
                columns.push(KelmColumn::from_parts(i, config, support, beta)?);
            }
            let model =
                MckelmModel::from_parts(tree, columns, route_k, class_count, train_features)?;
            TrainedClassifier::Mckelm(model)
        }
        1 => {
            let kernel = s.get_kernel()?;
            let reg = s.get_f64("regularization")?;
            let config = KelmConfig::new(kernel, reg)?;
            let support = s.get_matrix("support rows")?;
            let beta = s.get_matrix("output weights")?;
            TrainedClassifier::Kelm(KelmColumn::from_parts(0, config, support, beta)?)
        }
        2 => {
            let seed = s.get_u64("seed")?;
            let input_weights = s.get_matrix("input weights")?;
            let hidden = input_weights.nrows();
            let mut biases = Array1::<f64>::zeros(hidden);
            for b in biases.iter_mut() {
                *b = s.get_f64("bias")?;
            }
            let beta = s.get_matrix("output weights")?;
            TrainedClassifier::Elm(ElmModel::from_parts(input_weights, biases, beta, seed)?)
        }
        3 => {
            let kernel = s.get_kernel()?;
            let reg = s.get_f64("regularization")?;
            let seed = s.get_u64("seed")?;
            let nodes = s.get_matrix("mapping nodes")?;
            let beta = s.get_matrix("output weights")?;
            let mut node_rows = Vec::with_capacity(nodes.nrows());
            for _ in 0..nodes.nrows() {
                node_rows.push(s.get_u32("node row index")?);
            }
            TrainedClassifier::Rkelm(RkelmModel::from_parts(
                nodes, beta, kernel, reg, node_rows, seed,
            )?)
        }
        4 => {
            let k = s.get_count("neighbour count")?;
            let class_count = s.get_count("class count")?;
            let n = s.get_count("row count")?;
            let d = s.get_count("feature count")?;
            let total = n
                .checked_mul(d)
                .ok_or_else(|| Error::Format(format!("feature block {n}x{d} overflows")))?;
            let mut values = Vec::with_capacity(total.min(s.data.len() / 4 + 1));
            for _ in 0..total {
                values.push(s.get_f32("feature value")?);
            }
            let features = Array2::from_shape_vec((n, d), values)
                .map_err(|e| Error::Format(format!("feature block: {e}")))?;
            let mut labels = Vec::with_capacity(n.min(s.data.len() / 4 + 1));
            for _ in 0..n {
                labels.push(s.get_u32("label")?);
            }
            let data = Dataset::new(features, labels, class_count)?;
            TrainedClassifier::Knn(KnnModel::new(data, k)?)
        }
        5 => {
            let means = s.get_matrix("class means")?;
            let variances = s.get_matrix("class variances")?;
            let mut priors = Vec::with_capacity(means.nrows());
            for _ in 0..means.nrows() {
                priors.push(s.get_f64("class prior")?);
            }
            TrainedClassifier::Gnb(GnbModel::from_parts(means, variances, priors)?)
        }
        other => return Err(Error::Format(format!("unknown classifier kind {other}"))),
    };
    Ok(classifier)
}
