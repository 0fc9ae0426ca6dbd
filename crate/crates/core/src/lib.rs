//! Multicolumn kernel extreme learning machine.
//!
//! Kernel ridge classifiers trained in closed form become expensive as
//! the Gram matrix grows, so this crate partitions the training set with
//! a density-guided median tree and fits one compact kernel column per
//! leaf. Queries are routed to the few columns whose subsets own the
//! nearest training rows, and the columns vote. The result keeps the
//! closed-form training of a kernel machine while the cubic solve cost
//! drops with the subset size.
//!
//! The crate also ships the supporting cast: dataset and model file
//! formats, RBF and chi-square kernels, attribution-driven feature
//! selection, reference baselines (random-feature and reduced kernel
//! machines, nearest neighbour, naive Bayes), and evaluation metrics.
//! Everything is deterministic: identical inputs, configuration, and
//! seeds produce bitwise-identical models on any thread count.

pub mod baselines;
pub mod dataset;
pub mod error;
pub mod feature_select;
mod fsio;
pub mod kelm;
pub mod kernels;
mod linalg;
pub mod mckelm;
pub mod metrics;
pub mod model;
pub mod partition;

pub use error::{Error, Result};
pub use fsio::write_text_atomic;
