//! Multicolumn model: one kernel column per partition leaf.
//!
//! Training builds the density-guided partition tree, then fits an
//! independent kernel column on every leaf's rows (in parallel; results
//! are merged in leaf order so the model is identical however many
//! threads run). Inference finds the `route_k` nearest training rows to
//! the query, consults the distinct subsets owning them, and lets those
//! columns vote: plurality first, then smallest routing distance, then
//! lowest label.

use std::collections::BTreeMap;

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;

use crate::dataset::{one_hot, Dataset};
use crate::error::{Error, Result};
use crate::kelm::{predict_kelm, train_kelm, KelmColumn, KelmConfig};
use crate::partition::{build_partition, PartitionConfig, PartitionTree};

/// How the consulted columns' outputs combine into one label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VoteMode {
    /// Each column casts its argmax label; plurality wins (the default).
    #[default]
    Majority,
    /// Average the columns' raw score rows, then take the argmax.
    /// Experimental alternative; vote records are still reported.
    ScoreAverage,
}

/// One column's opinion about a query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoteRecord {
    /// Subset (leaf) that produced the vote.
    pub subset: u32,
    /// Label the column predicted.
    pub label: u32,
    /// Distance from the query to the nearest training row owned by the
    /// subset among the routed neighbours.
    pub distance: f64,
}

/// Prediction for one query: the winning label plus every vote cast.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryReport {
    /// Label after the vote.
    pub label: u32,
    /// Votes in routing order (nearest subset first).
    pub votes: Vec<VoteRecord>,
}

/// Resolve a set of votes: most votes wins; ties prefer the label whose
/// nearest routed row is closest; remaining ties take the lowest label.
pub fn vote(votes: &[VoteRecord]) -> u32 {
    assert!(!votes.is_empty(), "vote needs at least one ballot");
    let mut tally: BTreeMap<u32, (usize, f64)> = BTreeMap::new();
    for v in votes {
        let entry = tally.entry(v.label).or_insert((0, f64::INFINITY));
        entry.0 += 1;
        if v.distance < entry.1 {
            entry.1 = v.distance;
        }
    }
    let mut best: Option<(u32, usize, f64)> = None;
    // Ascending label order makes the final tie-break implicit.
    for (&label, &(count, dist)) in &tally {
        let take = match best {
            None => true,
            Some((_, bc, bd)) => count > bc || (count == bc && dist < bd),
        };
        if take {
            best = Some((label, count, dist));
        }
    }
    best.expect("tally is non-empty").0
}

/// A trained multicolumn model.
#[derive(Debug, Clone, PartialEq)]
pub struct MckelmModel {
    tree: PartitionTree,
    columns: Vec<KelmColumn>,
    route_k: usize,
    class_count: usize,
    /// Training rows in the model's feature space, kept for routing.
    train_features: Array2<f64>,
}

impl MckelmModel {
    /// Partition tree the columns were trained on.
    pub fn tree(&self) -> &PartitionTree {
        &self.tree
    }

    /// Kernel columns, one per leaf, in leaf order.
    pub fn columns(&self) -> &[KelmColumn] {
        &self.columns
    }

    /// Number of nearest training rows consulted per query.
    pub fn route_k(&self) -> usize {
        self.route_k
    }

    /// Number of classes the model distinguishes.
    pub fn class_count(&self) -> usize {
        self.class_count
    }

    /// Training rows used for routing.
    pub fn train_features(&self) -> &Array2<f64> {
        &self.train_features
    }

    /// Feature dimensionality.
    pub fn dim(&self) -> usize {
        self.tree.dim()
    }

    /// Reassemble a model from stored parts, revalidating consistency
    /// (used by model deserialization).
    pub fn from_parts(
        tree: PartitionTree,
        columns: Vec<KelmColumn>,
        route_k: usize,
        class_count: usize,
        train_features: Array2<f64>,
    ) -> Result<Self> {
        if route_k == 0 {
            return Err(Error::Format("route_k must be at least 1".into()));
        }
        if columns.len() != tree.subset_count() {
            return Err(Error::Format(format!(
                "tree has {} leaves but {} columns are present",
                tree.subset_count(),
                columns.len()
            )));
        }
        if train_features.nrows() != tree.row_count() || train_features.ncols() != tree.dim() {
            return Err(Error::Format(format!(
                "routing matrix is {}x{} but the tree indexes {} rows of {} features",
                train_features.nrows(),
                train_features.ncols(),
                tree.row_count(),
                tree.dim()
            )));
        }
        for (i, col) in columns.iter().enumerate() {
            if col.subset_id() != i {
                return Err(Error::Format(format!(
                    "column at position {i} claims subset {}",
                    col.subset_id()
                )));
            }
            if col.support().nrows() != tree.leaf_members()[i].len() {
                return Err(Error::Format(format!(
                    "column {i} holds {} support rows but its leaf owns {}",
                    col.support().nrows(),
                    tree.leaf_members()[i].len()
                )));
            }
            if col.support().ncols() != tree.dim() {
                return Err(Error::Format(format!(
                    "column {i} support has {} features, tree has {}",
                    col.support().ncols(),
                    tree.dim()
                )));
            }
            if col.beta().ncols() != class_count {
                return Err(Error::Format(format!(
                    "column {i} scores {} classes, model declares {class_count}",
                    col.beta().ncols()
                )));
            }
        }
        Ok(MckelmModel { tree, columns, route_k, class_count, train_features })
    }

    /// Subsets to consult for a query: owners of the `route_k` nearest
    /// training rows (capped at the number of rows), deduplicated in
    /// nearest-first order. Each subset is paired with the distance of
    /// its nearest routed row.
    pub fn route(&self, query: &[f64]) -> Result<Vec<(u32, f64)>> {
        let k = self.route_k.min(self.tree.row_count());
        let neighbours = self.tree.k_nearest_nodes(self.train_features.view(), query, k)?;
        let mut consulted: Vec<(u32, f64)> = Vec::new();
        for (row, dist) in neighbours {
            let subset = self.tree.row_subset()[row as usize];
            if !consulted.iter().any(|&(s, _)| s == subset) {
                consulted.push((subset, dist));
            }
        }
        Ok(consulted)
    }

    /// Predict every query row, returning the vote record per query.
    pub fn predict(&self, queries: ArrayView2<f64>) -> Result<Vec<QueryReport>> {
        self.predict_mode(queries, VoteMode::Majority)
    }

    /// Predict with an explicit vote-combination mode.
    pub fn predict_mode(
        &self,
        queries: ArrayView2<f64>,
        mode: VoteMode,
    ) -> Result<Vec<QueryReport>> {
        if queries.ncols() != self.dim() {
            return Err(Error::Shape(format!(
                "queries have {} features but the model was trained on {}",
                queries.ncols(),
                self.dim()
            )));
        }
        (0..queries.nrows())
            .into_par_iter()
            .map(|q| {
                let row = queries.row(q).to_vec();
                let consulted = self.route(&row)?;
                let query_matrix = queries.row(q).insert_axis(ndarray::Axis(0));
                let mut votes = Vec::with_capacity(consulted.len());
                let mut score_sum = vec![0.0f64; self.class_count];
                for &(subset, distance) in &consulted {
                    let column = &self.columns[subset as usize];
                    let prediction = predict_kelm(column, query_matrix.view())?;
                    votes.push(VoteRecord { subset, label: prediction.labels[0], distance });
                    if mode == VoteMode::ScoreAverage {
                        for (acc, &s) in score_sum.iter_mut().zip(prediction.scores.row(0)) {
                            *acc += s;
                        }
                    }
                }
                let label = match mode {
                    VoteMode::Majority => vote(&votes),
                    VoteMode::ScoreAverage => {
                        let k = consulted.len() as f64;
                        for s in &mut score_sum {
                            *s /= k;
                        }
                        crate::kelm::argmax_row(ndarray::ArrayView1::from(&score_sum))
                    }
                };
                Ok(QueryReport { label, votes })
            })
            .collect()
    }

    /// Predicted labels only.
    pub fn predict_labels(&self, queries: ArrayView2<f64>) -> Result<Vec<u32>> {
        Ok(self.predict(queries)?.into_iter().map(|r| r.label).collect())
    }
}

/// Train a multicolumn model: partition the rows, then fit one kernel
/// column per leaf. Columns train in parallel and are merged in leaf
/// order, so the result does not depend on thread count.
pub fn train_mckelm(
    train: &Dataset,
    partition: &PartitionConfig,
    kelm: &KelmConfig,
    route_k: usize,
) -> Result<MckelmModel> {
    if route_k == 0 {
        return Err(Error::Config("route_k must be at least 1".into()));
    }
    let train_features = train.features_f64();
    let tree = build_partition(train_features.view(), partition)?;
    let targets = one_hot(train.labels(), train.class_count())?;
    let columns: Vec<KelmColumn> = tree
        .leaf_members()
        .par_iter()
        .enumerate()
        .map(|(subset, members)| {
            let subset_data = train.select_rows(members);
            let subset_targets = targets.select_rows(members);
            train_kelm(&subset_data, &subset_targets, kelm, subset)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MckelmModel {
        tree,
        columns,
        route_k,
        class_count: train.class_count(),
        train_features,
    })
}
