//! Dense symmetric positive-definite solves.
//!
//! Everything here is deliberately plain: a Cholesky factorization with a
//! fixed, compile-time reduction order followed by forward/back
//! substitution. Identical inputs therefore produce bitwise-identical
//! solutions run after run, which the model types rely on. The matrix is
//! never inverted explicitly.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

/// Dot product with four independent accumulators.
///
/// The accumulator layout is part of the numeric contract: it fixes the
/// reduction order, so results are reproducible bit for bit while still
/// giving the CPU some instruction-level parallelism.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let quads = a.len() / 4;
    let mut acc = [0.0f64; 4];
    for q in 0..quads {
        let j = q * 4;
        acc[0] += a[j] * b[j];
        acc[1] += a[j + 1] * b[j + 1];
        acc[2] += a[j + 2] * b[j + 2];
        acc[3] += a[j + 3] * b[j + 3];
    }
    let mut tail = 0.0;
    for j in quads * 4..a.len() {
        tail += a[j] * b[j];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite
/// matrix, stored row-major with the strict upper triangle zeroed.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    /// Factor `a = L·Lᵀ`. Only the lower triangle of `a` is read, so a
    /// matrix that is symmetric up to rounding is handled consistently.
    ///
    /// Fails with a numerical error if a pivot is not strictly positive
    /// (the matrix is not positive definite) or a non-finite value
    /// appears.
    pub fn factor(a: ArrayView2<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Shape(format!(
                "expected a square matrix, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let mut l = vec![0.0f64; n * n];
        for i in 0..n {
            for j in 0..=i {
                let (ri, rj) = (i * n, j * n);
                let s = a[[i, j]] - dot(&l[ri..ri + j], &l[rj..rj + j]);
                if i == j {
                    // `!(s > 0)` also catches NaN pivots.
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(Error::numerical(format!(
                            "matrix is not positive definite (pivot {i} = {s})"
                        )));
                    }
                    l[ri + i] = s.sqrt();
                } else {
                    l[ri + j] = s / l[rj + j];
                }
            }
        }
        Ok(Cholesky { n, l })
    }

    /// Solve `(L·Lᵀ)·X = B` for a matrix right-hand side.
    ///
    /// Panics if `B` has the wrong row count; callers validate shapes.
    pub fn solve(&self, b: ArrayView2<f64>) -> Array2<f64> {
        assert_eq!(b.nrows(), self.n, "right-hand side rows must match the factor");
        let n = self.n;
        let m = b.ncols();
        let mut x = Array2::<f64>::zeros((n, m));
        let mut col = vec![0.0f64; n];
        for c in 0..m {
            // Forward substitution: L·y = b.
            for i in 0..n {
                let ri = i * n;
                let s = b[[i, c]] - dot(&self.l[ri..ri + i], &col[..i]);
                col[i] = s / self.l[ri + i];
            }
            // Back substitution: Lᵀ·x = y, walking column i of L.
            for i in (0..n).rev() {
                let mut s = col[i];
                for k in i + 1..n {
                    s -= self.l[k * n + i] * col[k];
                }
                col[i] = s / self.l[i * n + i];
            }
            for i in 0..n {
                x[[i, c]] = col[i];
            }
        }
        x
    }

    /// The factor as a dense matrix, for tests to inspect.
    #[cfg(test)]
    pub fn lower(&self) -> Array2<f64> {
        Array2::from_shape_vec((self.n, self.n), self.l.clone()).expect("stored shape is valid")
    }
}

/// Factor-and-solve convenience for `A·X = B` with symmetric
/// positive-definite `A`.
pub fn solve_spd(a: ArrayView2<f64>, b: ArrayView2<f64>) -> Result<Array2<f64>> {
    if b.nrows() != a.nrows() {
        return Err(Error::Shape(format!(
            "system is {}x{} but right-hand side has {} rows",
            a.nrows(),
            a.ncols(),
            b.nrows()
        )));
    }
    Ok(Cholesky::factor(a)?.solve(b))
}
