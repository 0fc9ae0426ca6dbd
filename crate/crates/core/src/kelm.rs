//! Single kernel extreme learning machine column.
//!
//! Training is closed-form: with Gram matrix `K` over the subset's rows,
//! one-hot targets `T`, and ridge strength `C`, the output weights solve
//! `(C·I + K) · beta = T`. Prediction evaluates the kernel between each
//! query and every support row and takes the class with the highest
//! score, preferring the lowest class index on exact ties.

use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::dataset::{Dataset, TargetMatrix};
use crate::error::{Error, Result};
use crate::kernels::{kernel_cross_matrix, kernel_matrix, KernelParams};
use crate::linalg::Cholesky;

/// Residual bound the solve must meet, relative Frobenius against `T`.
const RESIDUAL_LIMIT: f64 = 1e-6;

/// Kernel choice plus ridge strength for one column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KelmConfig {
    kernel: KernelParams,
    regularization: f64,
}

impl KelmConfig {
    /// Validated constructor; the ridge strength must be a positive real.
    pub fn new(kernel: KernelParams, regularization: f64) -> Result<Self> {
        if !(regularization > 0.0) || !regularization.is_finite() {
            return Err(Error::Range(format!(
                "regularization must be a positive real, got {regularization}"
            )));
        }
        Ok(KelmConfig { kernel, regularization })
    }

    /// The kernel.
    pub fn kernel(&self) -> &KernelParams {
        &self.kernel
    }

    /// Ridge strength added to the Gram diagonal.
    pub fn regularization(&self) -> f64 {
        self.regularization
    }
}

/// A trained column: the support rows it memorised, the solved output
/// weights, and the configuration that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct KelmColumn {
    subset_id: usize,
    config: KelmConfig,
    support: Array2<f64>,
    beta: Array2<f64>,
}

impl KelmColumn {
    /// Identifier of the partition subset this column was trained on
    /// (0 for a standalone column).
    pub fn subset_id(&self) -> usize {
        self.subset_id
    }

    /// Training configuration.
    pub fn config(&self) -> &KelmConfig {
        &self.config
    }

    /// Support rows (the subset's training vectors).
    pub fn support(&self) -> ArrayView2<'_, f64> {
        self.support.view()
    }

    /// Output weights, one row per support vector, one column per class.
    pub fn beta(&self) -> ArrayView2<'_, f64> {
        self.beta.view()
    }

    /// Number of classes scored.
    pub fn class_count(&self) -> usize {
        self.beta.ncols()
    }

    /// Rebuild a column from stored parts (model deserialization).
    pub fn from_parts(
        subset_id: usize,
        config: KelmConfig,
        support: Array2<f64>,
        beta: Array2<f64>,
    ) -> Result<Self> {
        if support.nrows() != beta.nrows() {
            return Err(Error::Shape(format!(
                "column has {} support rows but {} weight rows",
                support.nrows(),
                beta.nrows()
            )));
        }
        Ok(KelmColumn { subset_id, config, support, beta })
    }
}

/// Index of the row maximum, lowest index on ties.
pub(crate) fn argmax_row(row: ArrayView1<f64>) -> u32 {
    let mut best = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    for (i, &v) in row.iter().enumerate() {
        if v > best_v {
            best_v = v;
            best = i;
        }
    }
    best as u32
}

/// Train one column on a subset. `subset_id` is carried into any
/// numerical error so multi-column failures name the offending column.
pub fn train_kelm(
    subset: &Dataset,
    targets: &TargetMatrix,
    config: &KelmConfig,
    subset_id: usize,
) -> Result<KelmColumn> {
    let t = targets.values();
    if t.nrows() != subset.n() {
        return Err(Error::Shape(format!(
            "subset has {} rows but targets have {}",
            subset.n(),
            t.nrows()
        )));
    }
    let support = subset.features_f64();
    let mut a = kernel_matrix(support.view(), config.kernel())?;
    let c = config.regularization();
    for i in 0..a.nrows() {
        a[[i, i]] += c;
    }
    let factor = Cholesky::factor(a.view()).map_err(|e| tag_subset(e, subset_id))?;
    let beta = factor.solve(t);

    // The solution must actually reproduce the targets through the
    // regularized system; a quiet breakdown surfaces here.
    let residual = (&a.dot(&beta) - &t).mapv(|v| v * v).sum().sqrt();
    let t_norm = t.mapv(|v| v * v).sum().sqrt();
    if !(residual <= RESIDUAL_LIMIT * t_norm) {
        return Err(Error::Numerical {
            subset_id: Some(subset_id),
            msg: format!(
                "solve residual {residual:.3e} exceeds {RESIDUAL_LIMIT:.0e} of the target norm"
            ),
        });
    }
    Ok(KelmColumn { subset_id, config: *config, support, beta })
}

fn tag_subset(e: Error, subset_id: usize) -> Error {
    match e {
        Error::Numerical { msg, .. } => Error::Numerical { subset_id: Some(subset_id), msg },
        other => other,
    }
}

/// Predicted labels plus the raw class scores for a batch of queries
/// (already in the column's feature space).
#[derive(Debug, Clone, PartialEq)]
pub struct KelmPrediction {
    /// Winning class per query.
    pub labels: Vec<u32>,
    /// Score matrix, query rows by class columns.
    pub scores: Array2<f64>,
}

/// Score queries against a trained column.
pub fn predict_kelm(column: &KelmColumn, queries: ArrayView2<f64>) -> Result<KelmPrediction> {
    if queries.ncols() != column.support.ncols() {
        return Err(Error::Shape(format!(
            "queries have {} features but the column was trained on {}",
            queries.ncols(),
            column.support.ncols()
        )));
    }
    let cross = kernel_cross_matrix(queries, column.support.view(), column.config.kernel())?;
    let scores = cross.dot(&column.beta);
    let labels = scores.rows().into_iter().map(argmax_row).collect();
    Ok(KelmPrediction { labels, scores })
}
