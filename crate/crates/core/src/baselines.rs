//! Reference classifiers the multicolumn model is compared against:
//! a random-feature extreme learning machine, a reduced kernel machine
//! that maps through a random subset of training rows, exact k-nearest
//! neighbours, and Gaussian naive Bayes.

use ndarray::{Array1, Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::{Dataset, TargetMatrix};
use crate::error::{Error, Result};
use crate::kelm::argmax_row;
use crate::kernels::{kernel_cross_matrix, KernelParams};
use crate::linalg::solve_spd;
use crate::partition::{build_partition, PartitionConfig, PartitionTree};

/// Variance floor for naive Bayes (constant features otherwise divide
/// by zero).
pub const VARIANCE_FLOOR: f64 = 1e-9;

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Default hidden-layer width for the random-feature machine: a tenth
/// of the training rows, kept between 64 and 1024. This is our own
/// stand-in heuristic, overridable wherever a hidden count is accepted.
pub fn default_hidden_count(n: usize) -> usize {
    (n / 10).clamp(64, 1024)
}

/// Random-feature network: fixed random input weights and biases, a
/// sigmoid hidden layer, and ridge-trained output weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ElmModel {
    input_weights: Array2<f64>,
    biases: Array1<f64>,
    beta: Array2<f64>,
    seed: u64,
}

impl ElmModel {
    pub fn hidden_count(&self) -> usize {
        self.input_weights.nrows()
    }

    pub fn feature_count(&self) -> usize {
        self.input_weights.ncols()
    }

    pub fn class_count(&self) -> usize {
        self.beta.ncols()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn input_weights(&self) -> &Array2<f64> {
        &self.input_weights
    }

    pub fn biases(&self) -> &Array1<f64> {
        &self.biases
    }

    pub fn beta(&self) -> &Array2<f64> {
        &self.beta
    }

    /// Reassemble from stored parts, revalidating shapes.
    pub fn from_parts(
        input_weights: Array2<f64>,
        biases: Array1<f64>,
        beta: Array2<f64>,
        seed: u64,
    ) -> Result<Self> {
        let l = input_weights.nrows();
        if l == 0 || input_weights.ncols() == 0 {
            return Err(Error::Format("hidden layer has no weights".into()));
        }
        if biases.len() != l || beta.nrows() != l || beta.ncols() == 0 {
            return Err(Error::Format(format!(
                "inconsistent layer shapes: {l} hidden units, {} biases, {}x{} output weights",
                biases.len(),
                beta.nrows(),
                beta.ncols()
            )));
        }
        for v in input_weights.iter().chain(biases.iter()).chain(beta.iter()) {
            if !v.is_finite() {
                return Err(Error::Format(format!("non-finite weight {v}")));
            }
        }
        Ok(ElmModel { input_weights, biases, beta, seed })
    }

    fn hidden_map(&self, features: ArrayView2<f64>) -> Array2<f64> {
        let mut h = features.dot(&self.input_weights.t());
        for mut row in h.rows_mut() {
            for (v, &b) in row.iter_mut().zip(&self.biases) {
                *v = sigmoid(*v + b);
            }
        }
        h
    }
}

/// Train the random-feature machine: draw input weights and biases
/// uniformly from [-1, 1] with the seed, then ridge-solve
/// (C*I + H'H) beta = H'T for the output weights.
pub fn train_elm(
    train: &Dataset,
    targets: &TargetMatrix,
    hidden: usize,
    reg_c: f64,
    seed: u64,
) -> Result<ElmModel> {
    if hidden == 0 {
        return Err(Error::Range("hidden count must be at least 1".into()));
    }
    if !(reg_c > 0.0) || !reg_c.is_finite() {
        return Err(Error::Range(format!("regularization must be a positive real, got {reg_c}")));
    }
    if targets.values().nrows() != train.n() {
        return Err(Error::Shape(format!(
            "{} target rows for {} training rows",
            targets.values().nrows(),
            train.n()
        )));
    }
    let d = train.feature_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut input_weights = Array2::<f64>::zeros((hidden, d));
    for v in input_weights.iter_mut() {
        *v = rng.random_range(-1.0..=1.0);
    }
    let mut biases = Array1::<f64>::zeros(hidden);
    for v in biases.iter_mut() {
        *v = rng.random_range(-1.0..=1.0);
    }
    let model = ElmModel { input_weights, biases, beta: Array2::zeros((hidden, 0)), seed };

    let h = model.hidden_map(train.features_f64().view());
    let mut a = h.t().dot(&h);
    for i in 0..hidden {
        a[[i, i]] += reg_c;
    }
    let b = h.t().dot(&targets.values());
    let beta = solve_spd(a.view(), b.view())?;
    Ok(ElmModel { beta, ..model })
}

/// Classify queries with the random-feature machine.
pub fn predict_elm(model: &ElmModel, queries: ArrayView2<f64>) -> Result<Vec<u32>> {
    if queries.ncols() != model.feature_count() {
        return Err(Error::Shape(format!(
            "queries have {} features but the model was trained on {}",
            queries.ncols(),
            model.feature_count()
        )));
    }
    let scores = model.hidden_map(queries).dot(&model.beta);
    Ok(scores.rows().into_iter().map(argmax_row).collect())
}

/// Reduced kernel machine: kernel features against a random subset of
/// training rows instead of all of them.
#[derive(Debug, Clone, PartialEq)]
pub struct RkelmModel {
    nodes: Array2<f64>,
    beta: Array2<f64>,
    kernel: KernelParams,
    regularization: f64,
    /// Training-row indices the mapping nodes came from, ascending.
    node_rows: Vec<u32>,
    seed: u64,
}

impl RkelmModel {
    pub fn node_count(&self) -> usize {
        self.nodes.nrows()
    }

    pub fn feature_count(&self) -> usize {
        self.nodes.ncols()
    }

    pub fn class_count(&self) -> usize {
        self.beta.ncols()
    }

    pub fn kernel(&self) -> &KernelParams {
        &self.kernel
    }

    pub fn regularization(&self) -> f64 {
        self.regularization
    }

    pub fn node_rows(&self) -> &[u32] {
        &self.node_rows
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn nodes(&self) -> &Array2<f64> {
        &self.nodes
    }

    pub fn beta(&self) -> &Array2<f64> {
        &self.beta
    }

    /// Reassemble from stored parts, revalidating shapes.
    pub fn from_parts(
        nodes: Array2<f64>,
        beta: Array2<f64>,
        kernel: KernelParams,
        regularization: f64,
        node_rows: Vec<u32>,
        seed: u64,
    ) -> Result<Self> {
        if nodes.nrows() == 0 || nodes.nrows() != beta.nrows() || beta.ncols() == 0 {
            return Err(Error::Format(format!(
                "inconsistent shapes: {} mapping nodes, {}x{} output weights",
                nodes.nrows(),
                beta.nrows(),
                beta.ncols()
            )));
        }
        if node_rows.len() != nodes.nrows() {
            return Err(Error::Format(format!(
                "{} node row ids for {} nodes",
                node_rows.len(),
                nodes.nrows()
            )));
        }
        if !(regularization > 0.0) || !regularization.is_finite() {
            return Err(Error::Format(format!(
                "regularization must be a positive real, got {regularization}"
            )));
        }
        for v in nodes.iter().chain(beta.iter()) {
            if !v.is_finite() {
                return Err(Error::Format(format!("non-finite weight {v}")));
            }
        }
        Ok(RkelmModel { nodes, beta, kernel, regularization, node_rows, seed })
    }
}

/// Sample `p` distinct indices from `0..n` with a seeded partial
/// Fisher-Yates shuffle, returned ascending.
fn sample_rows(n: usize, p: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let mut idx: Vec<u32> = (0..n as u32).collect();
    for i in 0..p {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    let mut chosen = idx[..p].to_vec();
    chosen.sort_unstable();
    chosen
}

/// Train the reduced kernel machine with the standard node budget:
/// 10% of the training rows, at least one.
pub fn train_rkelm(
    train: &Dataset,
    targets: &TargetMatrix,
    kernel: KernelParams,
    reg_c: f64,
    seed: u64,
) -> Result<RkelmModel> {
    let p = ((0.10 * train.n() as f64).round() as usize).max(1);
    train_rkelm_with_node_count(train, targets, kernel, reg_c, seed, p)
}

/// Train the reduced kernel machine with an explicit node count
/// (1 <= p <= n). `p = n` degenerates to a full kernel machine in
/// least-squares form.
pub fn train_rkelm_with_node_count(
    train: &Dataset,
    targets: &TargetMatrix,
    kernel: KernelParams,
    reg_c: f64,
    seed: u64,
    p: usize,
) -> Result<RkelmModel> {
    let n = train.n();
    if p == 0 || p > n {
        return Err(Error::Range(format!("node count must be in [1, {n}], got {p}")));
    }
    if !(reg_c > 0.0) || !reg_c.is_finite() {
        return Err(Error::Range(format!("regularization must be a positive real, got {reg_c}")));
    }
    if targets.values().nrows() != n {
        return Err(Error::Shape(format!("{} target rows for {n} training rows", targets.values().nrows())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let node_rows = sample_rows(n, p, &mut rng);
    let features = train.features_f64();
    let mut nodes = Array2::<f64>::zeros((p, train.feature_count()));
    for (out, &r) in node_rows.iter().enumerate() {
        nodes.row_mut(out).assign(&features.row(r as usize));
    }
    let k_map = kernel_cross_matrix(features.view(), nodes.view(), &kernel)?;
    let mut a = k_map.t().dot(&k_map);
    for i in 0..p {
        a[[i, i]] += reg_c;
    }
    let b = k_map.t().dot(&targets.values());
    let beta = solve_spd(a.view(), b.view())?;
    Ok(RkelmModel { nodes, beta, kernel, regularization: reg_c, node_rows, seed })
}

/// Classify queries with the reduced kernel machine.
pub fn predict_rkelm(model: &RkelmModel, queries: ArrayView2<f64>) -> Result<Vec<u32>> {
    if queries.ncols() != model.feature_count() {
        return Err(Error::Shape(format!(
            "queries have {} features but the model was trained on {}",
            queries.ncols(),
            model.feature_count()
        )));
    }
    let k_q = kernel_cross_matrix(queries, model.nodes.view(), &model.kernel)?;
    let scores = k_q.dot(&model.beta);
    Ok(scores.rows().into_iter().map(argmax_row).collect())
}

// Partition depth that leaves roughly 32-row leaves; purely a search
// accelerator, never changes results (the search is exact).
fn knn_tree(train: &Dataset) -> Result<PartitionTree> {
    let n = train.n();
    let mut eta = 0u32;
    while (n >> (eta + 1)) >= 32 && eta < 12 {
        eta += 1;
    }
    let features = train.features_f64();
    loop {
        match build_partition(features.view(), &PartitionConfig::new(eta)?) {
            Ok(tree) => return Ok(tree),
            // Duplicate-heavy data can make a node unsplittable; a
            // shallower tree is always valid.
            Err(Error::SplitImpossible { .. }) if eta > 0 => eta -= 1,
            Err(e) => return Err(e),
        }
    }
}

/// Exact k-nearest-neighbour classification. Majority vote over the k
/// neighbours; ties prefer the label of the closest neighbour (then the
/// lowest row index, which the neighbour ordering already encodes).
pub fn knn_predict(train: &Dataset, queries: ArrayView2<f64>, k: usize) -> Result<Vec<u32>> {
    if k == 0 || k > train.n() {
        return Err(Error::Range(format!("k must be in [1, {}], got {k}", train.n())));
    }
    if queries.ncols() != train.feature_count() {
        return Err(Error::Shape(format!(
            "queries have {} features but the training set has {}",
            queries.ncols(),
            train.feature_count()
        )));
    }
    let tree = knn_tree(train)?;
    let features = train.features_f64();
    (0..queries.nrows())
        .into_par_iter()
        .map(|q| {
            let query: Vec<f64> = queries.row(q).to_vec();
            let neighbours = tree.k_nearest_nodes(features.view(), &query, k)?;
            let mut counts = vec![0usize; train.class_count()];
            for &(row, _) in &neighbours {
                counts[train.labels()[row as usize] as usize] += 1;
            }
            let top = *counts.iter().max().expect("at least one class");
            // Neighbours ascend by (distance, row index): the first one
            // holding a top-count label settles any tie.
            let winner = neighbours
                .iter()
                .map(|&(row, _)| train.labels()[row as usize])
                .find(|&label| counts[label as usize] == top)
                .expect("some neighbour holds the top label");
            Ok(winner)
        })
        .collect()
}

/// k-nearest-neighbour classifier bundled with its training data, for
/// persistence alongside the other models.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    train: Dataset,
    k: usize,
}

impl KnnModel {
    pub fn new(train: Dataset, k: usize) -> Result<Self> {
        if k == 0 || k > train.n() {
            return Err(Error::Range(format!("k must be in [1, {}], got {k}", train.n())));
        }
        Ok(KnnModel { train, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn train_data(&self) -> &Dataset {
        &self.train
    }

    pub fn predict(&self, queries: ArrayView2<f64>) -> Result<Vec<u32>> {
        knn_predict(&self.train, queries, self.k)
    }
}

/// Gaussian naive Bayes with per-class diagonal covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct GnbModel {
    means: Array2<f64>,
    variances: Array2<f64>,
    priors: Vec<f64>,
}

impl GnbModel {
    pub fn class_count(&self) -> usize {
        self.means.nrows()
    }

    pub fn feature_count(&self) -> usize {
        self.means.ncols()
    }

    pub fn means(&self) -> &Array2<f64> {
        &self.means
    }

    pub fn variances(&self) -> &Array2<f64> {
        &self.variances
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    /// Reassemble from stored parts, revalidating invariants.
    pub fn from_parts(
        means: Array2<f64>,
        variances: Array2<f64>,
        priors: Vec<f64>,
    ) -> Result<Self> {
        let (c, d) = (means.nrows(), means.ncols());
        if c == 0 || d == 0 || variances.nrows() != c || variances.ncols() != d {
            return Err(Error::Format(format!(
                "inconsistent shapes: means {c}x{d}, variances {}x{}",
                variances.nrows(),
                variances.ncols()
            )));
        }
        if priors.len() != c {
            return Err(Error::Format(format!("{} priors for {c} classes", priors.len())));
        }
        for v in means.iter() {
            if !v.is_finite() {
                return Err(Error::Format(format!("non-finite mean {v}")));
            }
        }
        for v in variances.iter() {
            if !(*v >= VARIANCE_FLOOR) || !v.is_finite() {
                return Err(Error::Format(format!("variance {v} below the floor")));
            }
        }
        let sum: f64 = priors.iter().sum();
        if !priors.iter().all(|p| *p > 0.0 && p.is_finite()) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Format(format!("priors must be positive and sum to 1, sum {sum}")));
        }
        Ok(GnbModel { means, variances, priors })
    }
}

/// Fit Gaussian naive Bayes: per-class feature means, population
/// variances (floored), and empirical class priors.
pub fn train_gnb(train: &Dataset) -> Result<GnbModel> {
    let c = train.class_count();
    let d = train.feature_count();
    let features = train.features_f64();
    let mut counts = vec![0usize; c];
    for &l in train.labels() {
        counts[l as usize] += 1;
    }
    if let Some(class) = counts.iter().position(|&k| k == 0) {
        return Err(Error::EmptyClass {
            class,
            msg: "cannot fit a class with no samples".into(),
        });
    }
    let mut means = Array2::<f64>::zeros((c, d));
    for (row, &l) in features.rows().into_iter().zip(train.labels()) {
        for (acc, &v) in means.row_mut(l as usize).iter_mut().zip(row) {
            *acc += v;
        }
    }
    for class in 0..c {
        means.row_mut(class).mapv_inplace(|v| v / counts[class] as f64);
    }
    let mut variances = Array2::<f64>::zeros((c, d));
    for (row, &l) in features.rows().into_iter().zip(train.labels()) {
        let mean_row = means.row(l as usize).to_owned();
        for ((acc, &v), &m) in variances.row_mut(l as usize).iter_mut().zip(row).zip(&mean_row) {
            let diff = v - m;
            *acc += diff * diff;
        }
    }
    for class in 0..c {
        let k = counts[class] as f64;
        variances.row_mut(class).mapv_inplace(|v| (v / k).max(VARIANCE_FLOOR));
    }
    let n = train.n() as f64;
    let priors: Vec<f64> = counts.iter().map(|&k| k as f64 / n).collect();
    Ok(GnbModel { means, variances, priors })
}

/// Classify queries by the highest log-posterior, ties toward the lower
/// class index.
pub fn predict_gnb(model: &GnbModel, queries: ArrayView2<f64>) -> Result<Vec<u32>> {
    if queries.ncols() != model.feature_count() {
        return Err(Error::Shape(format!(
            "queries have {} features but the model was trained on {}",
            queries.ncols(),
            model.feature_count()
        )));
    }
    let c = model.class_count();
    let mut labels = Vec::with_capacity(queries.nrows());
    let tau = 2.0 * std::f64::consts::PI;
    let mut scores = Array1::<f64>::zeros(c);
    for row in queries.rows() {
        for class in 0..c {
            let mut log_post = model.priors[class].ln();
            for ((&x, &m), &v) in
                row.iter().zip(model.means.row(class)).zip(model.variances.row(class))
            {
                let diff = x - m;
                log_post += -0.5 * (tau * v).ln() - diff * diff / (2.0 * v);
            }
            scores[class] = log_post;
        }
        labels.push(argmax_row(scores.view()));
    }
    Ok(labels)
}
