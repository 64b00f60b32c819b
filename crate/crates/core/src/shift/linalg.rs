//! Dense matrices and a cyclic Jacobi eigensolver for symmetric matrices.
//! Everything the shift analysis needs — covariance algebra, inverses via
//! eigendecomposition, PSD square roots — is built on these two pieces.

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        Ok(Matrix {
            rows: n_rows,
            cols: n_cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Numerical(format!(
                "dimension mismatch: {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if (self.get(i, j) - self.get(j, i)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Force exact symmetry by averaging opposite entries.
    pub fn symmetrize(&mut self) {
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let avg = 0.5 * (self.get(i, j) + self.get(j, i));
                self.set(i, j, avg);
                self.set(j, i, avg);
            }
        }
    }
}

/// Eigendecomposition of a symmetric matrix by the cyclic Jacobi method.
///
/// Returns eigenvalues in descending order and the matching eigenvectors
/// as the ROWS of the returned matrix (so `vectors.row(k)` pairs with
/// `values[k]`).
pub fn jacobi_eigen(matrix: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    if matrix.rows != matrix.cols {
        return Err(Error::Numerical(
            "eigendecomposition needs a square matrix".into(),
        ));
    }
    if !matrix.is_symmetric(1e-9) {
        return Err(Error::Numerical("matrix is not symmetric".into()));
    }
    let n = matrix.rows;
    let mut a = matrix.clone();
    a.symmetrize();
    let mut v = Matrix::identity(n);

    let off_norm = |m: &Matrix| -> f64 {
        let mut sum = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                sum += m.get(i, j) * m.get(i, j);
            }
        }
        sum.sqrt()
    };
    let frobenius = {
        let mut sum = 0.0;
        for x in a.data() {
            sum += x * x;
        }
        sum.sqrt().max(f64::MIN_POSITIVE)
    };

    const MAX_SWEEPS: usize = 100;
    for _ in 0..MAX_SWEEPS {
        if off_norm(&a) <= 1e-14 * frobenius {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                // A <- J^T A J applied in place to rows/cols p and q
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                // accumulate rotations: V <- V J (eigenvectors in columns)
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    order.sort_by(|&x, &y| diag[y].total_cmp(&diag[x]));

    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (row, &col) in order.iter().enumerate() {
        for k in 0..n {
            vectors.set(row, k, v.get(k, col));
        }
    }
    Ok((values, vectors))
}

/// Reconstruct sum_k f(lambda_k) v_k v_k^T from an eigendecomposition.
pub fn spectral_map(values: &[f64], vectors: &Matrix, f: impl Fn(f64) -> f64) -> Matrix {
    let n = vectors.cols;
    let mut out = Matrix::zeros(n, n);
    for (k, &lambda) in values.iter().enumerate() {
        let fl = f(lambda);
        if fl == 0.0 {
            continue;
        }
        let row = vectors.row(k);
        for i in 0..n {
            let fi = fl * row[i];
            for j in 0..n {
                out.data[i * n + j] += fi * row[j];
            }
        }
    }
    out
}

/// PSD square root: eigenvalues below 1e-12 are clamped to zero; values
/// materially negative mean the input was not PSD.
pub fn sqrt_psd(matrix: &Matrix) -> Result<Matrix> {
    let (values, vectors) = jacobi_eigen(matrix)?;
    for &lambda in &values {
        if lambda < -1e-8 * values[0].abs().max(1.0) {
            return Err(Error::Numerical(format!(
                "matrix is not PSD: eigenvalue {lambda}"
            )));
        }
    }
    Ok(spectral_map(&values, &vectors, |l| {
        if l > 1e-12 {
            l.sqrt()
        } else {
            0.0
        }
    }))
}

/// Random PSD matrix for crate-internal tests.
#[cfg(test)]
pub(crate) fn random_psd(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Matrix {
    use rand::Rng;
    let b = {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, rng.random_range(-1.0..1.0));
            }
        }
        m
    };
    let mut psd = b.matmul(&b.transpose()).unwrap();
    for i in 0..n {
        psd.set(i, i, psd.get(i, i) + 1e-6);
    }
    psd
}
