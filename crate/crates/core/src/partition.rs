//! Density-guided k-d partition tree.
//!
//! The tree recursively median-splits the training rows `eta` times,
//! always splitting every node, so exactly `2^eta` leaves come out. At
//! each node the split feature is the one whose post-split average
//! density stays closest to the density of the whole training set,
//! which keeps the leaf point clouds comparably "filled" rather than
//! letting one leaf collect all the sparse directions.
//!
//! Density of a row set is `m / exp(mean_i ln(range_i + eps))`: the row
//! count over the geometric mean of the per-feature extents. The epsilon
//! keeps single points and constant features finite.
//!
//! The same tree doubles as an exact nearest-neighbour index: a
//! branch-and-bound descent that only prunes a subtree when its
//! separating plane is provably farther than the current k-th best
//! candidate, so results match a linear scan exactly, ties included.

use std::collections::BinaryHeap;

use ndarray::ArrayView2;

use crate::error::{Error, Result};

/// Epsilon added to every feature extent before the geometric mean.
pub const DENSITY_EPSILON: f64 = 1e-9;

/// Tree depth configuration: the tree always has exactly `2^eta` leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionConfig {
    eta: u32,
}

impl PartitionConfig {
    /// Validated constructor. `eta` is capped at 24 (16.7M subsets) to
    /// keep `2^eta` in comfortable range; real uses are single digits.
    pub fn new(eta: u32) -> Result<Self> {
        if eta > 24 {
            return Err(Error::Range(format!("eta = {eta} is beyond the supported limit of 24")));
        }
        Ok(PartitionConfig { eta })
    }

    /// Number of halving rounds.
    pub fn eta(&self) -> u32 {
        self.eta
    }

    /// Number of leaves the tree will have.
    pub fn subset_count(&self) -> usize {
        1usize << self.eta
    }
}

/// Density of a row set: row count over the geometric mean of feature
/// extents (each padded by [`DENSITY_EPSILON`]).
///
/// Panics on an empty row set; callers always hold at least one row.
pub fn density(rows: ArrayView2<f64>) -> f64 {
    let m = rows.nrows();
    assert!(m >= 1, "density needs at least one row");
    let d = rows.ncols();
    let mut log_sum = 0.0f64;
    for j in 0..d {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in rows.column(j) {
            if v < lo {
                lo = v;
            }
            if v > hi {
                hi = v;
            }
        }
        log_sum += ((hi - lo) + DENSITY_EPSILON).ln();
    }
    m as f64 / (log_sum / d as f64).exp()
}

// Internal row-indexed variant over a flat row-major matrix.
fn density_indexed(flat: &[f64], d: usize, members: &[u32]) -> f64 {
    let m = members.len();
    debug_assert!(m >= 1);
    let mut log_sum = 0.0f64;
    for j in 0..d {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &r in members {
            let v = flat[r as usize * d + j];
            if v < lo {
                lo = v;
            }
            if v > hi {
                hi = v;
            }
        }
        log_sum += ((hi - lo) + DENSITY_EPSILON).ln();
    }
    m as f64 / (log_sum / d as f64).exp()
}

/// Median of the values: middle element for odd counts, mean of the two
/// middle elements for even counts.
fn median_of(values: &mut Vec<f64>) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        (values[m / 2 - 1] + values[m / 2]) / 2.0
    }
}

/// Split member positions at the median of `values`. Rows strictly below
/// the median go left, strictly above go right; rows exactly at the
/// median fill the remaining left slots in original order (left holds
/// `ceil(m/2)` rows), then spill right. Relative order is preserved.
fn split_at_median(values: &[f64], median: f64) -> (Vec<usize>, Vec<usize>) {
    let m = values.len();
    let left_target = m.div_ceil(2);
    let n_less = values.iter().filter(|&&v| v < median).count();
    let mut tie_quota = left_target - n_less;
    let mut left = Vec::with_capacity(left_target);
    let mut right = Vec::with_capacity(m - left_target);
    for (pos, &v) in values.iter().enumerate() {
        if v < median {
            left.push(pos);
        } else if v > median {
            right.push(pos);
        } else if tie_quota > 0 {
            tie_quota -= 1;
            left.push(pos);
        } else {
            right.push(pos);
        }
    }
    debug_assert_eq!(left.len(), left_target);
    (left, right)
}

/// The split chosen for one node: the feature, its median, and the
/// average density of the two halves that split produces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitChoice {
    /// Feature column the node splits on.
    pub feature: usize,
    /// Median of that feature over the node's rows.
    pub median: f64,
    /// Mean of the two halves' densities (the quantity compared to the
    /// root density).
    pub halves_density: f64,
}

/// Pick the split feature for a row set: the non-constant feature whose
/// halves' average density is closest to `root_density`, ties resolved
/// toward the lowest feature index. Constant features cannot split and
/// are excluded; if every feature is constant the node is unsplittable.
///
/// When called directly (outside a tree build) the error's node id is 0.
pub fn choose_split_feature(rows: ArrayView2<f64>, root_density: f64) -> Result<SplitChoice> {
    let m = rows.nrows();
    if m < 2 {
        return Err(Error::InsufficientData(format!("cannot split {m} row(s)")));
    }
    let owned;
    let flat: &[f64] = match rows.as_slice() {
        Some(s) => s,
        None => {
            owned = rows.to_owned();
            owned.as_slice().expect("owned array is contiguous")
        }
    };
    let members: Vec<u32> = (0..m as u32).collect();
    choose_split_indexed(flat, rows.ncols(), &members, root_density)
}

fn choose_split_indexed(
    flat: &[f64],
    d: usize,
    members: &[u32],
    root_density: f64,
) -> Result<SplitChoice> {
    let m = members.len();
    let mut best: Option<(f64, SplitChoice)> = None;
    let mut values = Vec::with_capacity(m);
    for feature in 0..d {
        values.clear();
        values.extend(members.iter().map(|&r| flat[r as usize * d + feature]));
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) {
            continue; // constant feature: cannot divide the rows
        }
        let mut sorted = values.clone();
        let median = median_of(&mut sorted);
        let (left_pos, right_pos) = split_at_median(&values, median);
        let left: Vec<u32> = left_pos.iter().map(|&p| members[p]).collect();
        let right: Vec<u32> = right_pos.iter().map(|&p| members[p]).collect();
        let halves = (density_indexed(flat, d, &left) + density_indexed(flat, d, &right)) / 2.0;
        let metric = (halves - root_density).abs();
        let better = match &best {
            None => true,
            Some((best_metric, _)) => metric < *best_metric,
        };
        if better {
            best = Some((metric, SplitChoice { feature, median, halves_density: halves }));
        }
    }
    match best {
        Some((_, choice)) => Ok(choice),
        None => Err(Error::SplitImpossible {
            node: 0,
            msg: format!("all {d} features are constant across {m} rows"),
        }),
    }
}

/// One internal node of the perfect binary tree, in heap order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitNode {
    /// Feature the node splits on.
    pub feature: usize,
    /// Split threshold: queries with `value <= threshold` descend left.
    pub value: f64,
    /// Average density of the node's two halves at build time.
    pub halves_density: f64,
}

/// A built partition: `2^eta` leaves, each owning a disjoint set of
/// training row indices, plus the split nodes to route queries.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionTree {
    eta: u32,
    dim: usize,
    root_density: f64,
    /// Internal nodes in heap order (`2^eta - 1` of them).
    splits: Vec<SplitNode>,
    /// Training row indices per leaf, ordered left to right.
    leaf_members: Vec<Vec<u32>>,
    /// Owning subset id per training row.
    row_subset: Vec<u32>,
}

impl PartitionTree {
    /// Halving rounds the tree was built with.
    pub fn eta(&self) -> u32 {
        self.eta
    }

    /// Feature dimensionality of the space.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of training rows indexed.
    pub fn row_count(&self) -> usize {
        self.row_subset.len()
    }

    /// Number of leaves.
    pub fn subset_count(&self) -> usize {
        self.leaf_members.len()
    }

    /// Density of the full training set at build time.
    pub fn root_density(&self) -> f64 {
        self.root_density
    }

    /// Internal split nodes in heap order.
    pub fn splits(&self) -> &[SplitNode] {
        &self.splits
    }

    /// Training row indices owned by each leaf.
    pub fn leaf_members(&self) -> &[Vec<u32>] {
        &self.leaf_members
    }

    /// Owning subset of each training row.
    pub fn row_subset(&self) -> &[u32] {
        &self.row_subset
    }

    /// Reassemble a tree from stored parts, revalidating the structural
    /// invariants (used by model deserialization).
    pub fn from_parts(
        eta: u32,
        dim: usize,
        root_density: f64,
        splits: Vec<SplitNode>,
        leaf_members: Vec<Vec<u32>>,
    ) -> Result<Self> {
        let leaves = 1usize
            .checked_shl(eta)
            .ok_or_else(|| Error::Format(format!("eta = {eta} is out of range")))?;
        if splits.len() != leaves - 1 {
            return Err(Error::Format(format!(
                "tree with eta = {eta} needs {} split nodes, found {}",
                leaves - 1,
                splits.len()
            )));
        }
        if leaf_members.len() != leaves {
            return Err(Error::Format(format!(
                "tree with eta = {eta} needs {leaves} leaves, found {}",
                leaf_members.len()
            )));
        }
        for s in &splits {
            if s.feature >= dim || !s.value.is_finite() {
                return Err(Error::Format(format!(
                    "split node references feature {} (dim {dim}) with value {}",
                    s.feature, s.value
                )));
            }
        }
        let n: usize = leaf_members.iter().map(Vec::len).sum();
        let mut row_subset = vec![u32::MAX; n];
        for (leaf, members) in leaf_members.iter().enumerate() {
            if members.is_empty() {
                return Err(Error::Format(format!("leaf {leaf} owns no rows")));
            }
            for &r in members {
                let slot = row_subset
                    .get_mut(r as usize)
                    .ok_or_else(|| Error::Format(format!("leaf {leaf} references row {r} beyond {n}")))?;
                if *slot != u32::MAX {
                    return Err(Error::Format(format!("row {r} appears in two leaves")));
                }
                *slot = leaf as u32;
            }
        }
        Ok(PartitionTree { eta, dim, root_density, splits, leaf_members, row_subset })
    }

    /// Leaf a query descends to.
    pub fn locate_leaf(&self, query: &[f64]) -> Result<usize> {
        if query.len() != self.dim {
            return Err(Error::Shape(format!(
                "query has {} features but the tree was built on {}",
                query.len(),
                self.dim
            )));
        }
        let mut node = 0usize;
        while node < self.splits.len() {
            let s = &self.splits[node];
            node = if query[s.feature] <= s.value { 2 * node + 1 } else { 2 * node + 2 };
        }
        Ok(node - self.splits.len())
    }

    /// Exact k nearest training rows to a query, ascending by Euclidean
    /// distance with ties broken toward the lower row index. `rows` must
    /// be the matrix the tree was built on.
    pub fn k_nearest_nodes(
        &self,
        rows: ArrayView2<f64>,
        query: &[f64],
        k: usize,
    ) -> Result<Vec<(u32, f64)>> {
        if rows.nrows() != self.row_count() || rows.ncols() != self.dim {
            return Err(Error::Shape(format!(
                "tree indexes {} rows of {} features, got a {}x{} matrix",
                self.row_count(),
                self.dim,
                rows.nrows(),
                rows.ncols()
            )));
        }
        if query.len() != self.dim {
            return Err(Error::Shape(format!(
                "query has {} features but the tree was built on {}",
                query.len(),
                self.dim
            )));
        }
        if k == 0 || k > self.row_count() {
            return Err(Error::Range(format!(
                "k must be in [1, {}], got {k}",
                self.row_count()
            )));
        }
        let owned;
        let flat: &[f64] = match rows.as_slice() {
            Some(s) => s,
            None => {
                owned = rows.to_owned();
                owned.as_slice().expect("owned array is contiguous")
            }
        };
        let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(k + 1);
        self.search(0, flat, query, k, &mut heap);
        let mut out: Vec<Candidate> = heap.into_vec();
        out.sort_unstable();
        Ok(out.into_iter().map(|c| (c.row, c.d2.sqrt())).collect())
    }

    fn search(&self, node: usize, flat: &[f64], query: &[f64], k: usize, heap: &mut BinaryHeap<Candidate>) {
        let d = self.dim;
        if node >= self.splits.len() {
            let leaf = node - self.splits.len();
            for &r in &self.leaf_members[leaf] {
                let row = &flat[r as usize * d..(r as usize + 1) * d];
                // Plain in-order accumulation: the linear-scan reference
                // computes the same expression and gets identical bits.
                let mut d2 = 0.0f64;
                for (a, b) in query.iter().zip(row) {
                    let t = a - b;
                    d2 += t * t;
                }
                let cand = Candidate { d2, row: r };
                if heap.len() < k {
                    heap.push(cand);
                } else if cand < *heap.peek().expect("heap is non-empty") {
                    heap.pop();
                    heap.push(cand);
                }
            }
            return;
        }
        let s = &self.splits[node];
        let (near, far) = if query[s.feature] <= s.value {
            (2 * node + 1, 2 * node + 2)
        } else {
            (2 * node + 2, 2 * node + 1)
        };
        self.search(near, flat, query, k, heap);
        let gap = query[s.feature] - s.value;
        let plane_d2 = gap * gap;
        // `<=` matters: an equal-distance candidate with a lower row index
        // may live on the far side and must still be found.
        if heap.len() < k || plane_d2 <= heap.peek().expect("heap is non-empty").d2 {
            self.search(far, flat, query, k, heap);
        }
    }
}

/// Neighbour candidate ordered by (squared distance, row index).
#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    d2: f64,
    row: u32,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.d2.total_cmp(&other.d2).then(self.row.cmp(&other.row))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Build the partition tree over training rows.
pub fn build_partition(features: ArrayView2<f64>, config: &PartitionConfig) -> Result<PartitionTree> {
    let n = features.nrows();
    let d = features.ncols();
    if d == 0 {
        return Err(Error::Shape("cannot partition zero-dimensional rows".into()));
    }
    let leaves = config.subset_count();
    if n < leaves {
        return Err(Error::InsufficientData(format!(
            "eta = {} makes {leaves} subsets but only {n} rows are available",
            config.eta()
        )));
    }
    let owned;
    let flat: &[f64] = match features.as_slice() {
        Some(s) => s,
        None => {
            owned = features.to_owned();
            owned.as_slice().expect("owned array is contiguous")
        }
    };
    let all: Vec<u32> = (0..n as u32).collect();
    let root_density = density_indexed(flat, d, &all);

    let mut splits: Vec<Option<SplitNode>> = vec![None; leaves - 1];
    let mut leaf_members: Vec<Vec<u32>> = vec![Vec::new(); leaves];
    let eta = config.eta();

    // Depth-first expansion of the perfect tree in heap order.
    let mut stack: Vec<(usize, u32, Vec<u32>)> = vec![(0, 0, all)];
    while let Some((node, depth, members)) = stack.pop() {
        if depth == eta {
            leaf_members[node - (leaves - 1)] = members;
            continue;
        }
        let choice = choose_split_indexed(flat, d, &members, root_density).map_err(|e| match e {
            Error::SplitImpossible { msg, .. } => Error::SplitImpossible { node, msg },
            other => other,
        })?;
        let values: Vec<f64> =
            members.iter().map(|&r| flat[r as usize * d + choice.feature]).collect();
        let (left_pos, right_pos) = split_at_median(&values, choice.median);
        let left: Vec<u32> = left_pos.iter().map(|&p| members[p]).collect();
        let right: Vec<u32> = right_pos.iter().map(|&p| members[p]).collect();
        splits[node] = Some(SplitNode {
            feature: choice.feature,
            value: choice.median,
            halves_density: choice.halves_density,
        });
        stack.push((2 * node + 1, depth + 1, left));
        stack.push((2 * node + 2, depth + 1, right));
    }

    let splits: Vec<SplitNode> = splits
        .into_iter()
        .map(|s| s.expect("every internal node was visited"))
        .collect();
    let mut row_subset = vec![0u32; n];
    for (leaf, members) in leaf_members.iter().enumerate() {
        for &r in members {
            row_subset[r as usize] = leaf as u32;
        }
    }
    Ok(PartitionTree { eta, dim: d, root_density, splits, leaf_members, row_subset })
}
