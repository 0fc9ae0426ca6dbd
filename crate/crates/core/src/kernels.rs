//! Kernel functions and Gram-matrix assembly.
//!
//! Two kernels are supported: RBF `exp(-gamma * ||x - y||^2)` and
//! chi-square `exp(-sigma * sum_i (x_i - y_i)^2 / (x_i + y_i))`. The
//! chi-square form is defined for component values in `[0, 1]`, with a
//! `0/0` summand taken as 0 (both components absent contributes no
//! distance). Each takes a single positive scale parameter.

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Kernel choice plus its scale parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelParams {
    /// `exp(-gamma * ||x - y||^2)`.
    Rbf {
        /// Width parameter; larger means more local.
        gamma: f64,
    },
    /// `exp(-sigma * sum (x_i - y_i)^2 / (x_i + y_i))` on `[0, 1]` data.
    ChiSquare {
        /// Scale parameter.
        sigma: f64,
    },
}

impl KernelParams {
    /// RBF kernel with validated width.
    pub fn rbf(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::Range(format!("gamma must be a positive real, got {gamma}")));
        }
        Ok(KernelParams::Rbf { gamma })
    }

    /// Chi-square kernel with validated scale.
    pub fn chi_square(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Range(format!("sigma must be a positive real, got {sigma}")));
        }
        Ok(KernelParams::ChiSquare { sigma })
    }

    /// True if this kernel constrains inputs to `[0, 1]`.
    pub fn requires_unit_interval(&self) -> bool {
        matches!(self, KernelParams::ChiSquare { .. })
    }

    /// The single scale parameter.
    pub fn scalar(&self) -> f64 {
        match self {
            KernelParams::Rbf { gamma } => *gamma,
            KernelParams::ChiSquare { sigma } => *sigma,
        }
    }

    /// Stable name used by the CLI and file formats.
    pub fn kind_name(&self) -> &'static str {
        match self {
            KernelParams::Rbf { .. } => "rbf",
            KernelParams::ChiSquare { .. } => "chi2",
        }
    }

    fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            KernelParams::Rbf { gamma } => rbf_unchecked(x, y, gamma),
            KernelParams::ChiSquare { sigma } => chi_square_unchecked(x, y, sigma),
        }
    }
}

#[inline]
fn rbf_unchecked(x: &[f64], y: &[f64], gamma: f64) -> f64 {
    let mut sq = 0.0;
    for (a, b) in x.iter().zip(y) {
        let d = a - b;
        sq += d * d;
    }
    (-gamma * sq).exp()
}

#[inline]
fn chi_square_unchecked(x: &[f64], y: &[f64], sigma: f64) -> f64 {
    let mut acc = 0.0;
    for (a, b) in x.iter().zip(y) {
        let s = a + b;
        if s != 0.0 {
            let d = a - b;
            acc += d * d / s;
        }
    }
    (-sigma * acc).exp()
}

fn check_dims(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!(
            "kernel arguments have lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

fn check_unit_interval_vec(v: &[f64], name: &str) -> Result<()> {
    for (i, &c) in v.iter().enumerate() {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::Domain(format!(
                "chi-square kernel needs components in [0, 1]; {name}[{i}] = {c}"
            )));
        }
    }
    Ok(())
}

/// RBF kernel value for a pair of equal-length vectors.
pub fn rbf_kernel(x: &[f64], y: &[f64], gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::Range(format!("gamma must be a positive real, got {gamma}")));
    }
    check_dims(x, y)?;
    Ok(rbf_unchecked(x, y, gamma))
}

/// Chi-square kernel value for a pair of equal-length vectors with
/// components in `[0, 1]`.
pub fn chi_square_kernel(x: &[f64], y: &[f64], sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Range(format!("sigma must be a positive real, got {sigma}")));
    }
    check_dims(x, y)?;
    check_unit_interval_vec(x, "x")?;
    check_unit_interval_vec(y, "y")?;
    Ok(chi_square_unchecked(x, y, sigma))
}

fn check_unit_interval_matrix(rows: ArrayView2<f64>, name: &str) -> Result<()> {
    for ((i, j), &v) in rows.indexed_iter() {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!(
                "chi-square kernel needs values in [0, 1]; {name} entry ({i}, {j}) = {v}"
            )));
        }
    }
    Ok(())
}

/// Full symmetric Gram matrix of a row set. Each pair is evaluated once
/// and mirrored, so the result is exactly symmetric with a unit diagonal.
/// Rows are processed in parallel; the output does not depend on thread
/// count.
pub fn kernel_matrix(rows: ArrayView2<f64>, params: &KernelParams) -> Result<Array2<f64>> {
    if params.requires_unit_interval() {
        check_unit_interval_matrix(rows, "row")?;
    }
    let n = rows.nrows();
    let d = rows.ncols();
    let owned;
    let flat: &[f64] = match rows.as_slice() {
        Some(s) => s,
        None => {
            owned = rows.to_owned();
            owned.as_slice().expect("owned array is contiguous")
        }
    };
    let row = |i: usize| &flat[i * d..(i + 1) * d];

    // Upper-triangle tails, one per row, computed independently.
    let tails: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (i..n).map(|j| params.eval_unchecked(row(i), row(j))).collect())
        .collect();

    let mut k = Array2::<f64>::zeros((n, n));
    for (i, tail) in tails.iter().enumerate() {
        for (off, &v) in tail.iter().enumerate() {
            let j = i + off;
            k[[i, j]] = v;
            k[[j, i]] = v;
        }
    }
    Ok(k)
}

/// Rectangular kernel matrix between query rows and support rows:
/// entry `(i, j)` is `k(queries[i], support[j])`.
pub fn kernel_cross_matrix(
    queries: ArrayView2<f64>,
    support: ArrayView2<f64>,
    params: &KernelParams,
) -> Result<Array2<f64>> {
    if queries.ncols() != support.ncols() {
        return Err(Error::Shape(format!(
            "queries have {} features but support rows have {}",
            queries.ncols(),
            support.ncols()
        )));
    }
    if params.requires_unit_interval() {
        check_unit_interval_matrix(queries, "query")?;
        check_unit_interval_matrix(support, "support")?;
    }
    let d = support.ncols();
    let q_owned;
    let s_owned;
    let q_flat: &[f64] = match queries.as_slice() {
        Some(s) => s,
        None => {
            q_owned = queries.to_owned();
            q_owned.as_slice().expect("owned array is contiguous")
        }
    };
    let s_flat: &[f64] = match support.as_slice() {
        Some(s) => s,
        None => {
            s_owned = support.to_owned();
            s_owned.as_slice().expect("owned array is contiguous")
        }
    };
    let n = support.nrows();
    let m = queries.nrows();
    let mut k = Array2::<f64>::zeros((m, n));
    let out: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let q = &q_flat[i * d..(i + 1) * d];
            (0..n).map(|j| params.eval_unchecked(q, &s_flat[j * d..(j + 1) * d])).collect()
        })
        .collect();
    for (i, vals) in out.into_iter().enumerate() {
        for (j, v) in vals.into_iter().enumerate() {
            k[[i, j]] = v;
        }
    }
    Ok(k)
}
