//! PCA projection of embedding matrices onto the top principal components
//! of the sample covariance, with deterministic component signs.

use crate::error::{Error, Result};

use super::linalg::{jacobi_eigen, Matrix};

pub const DEFAULT_PCA_DIM: usize = 64;

#[derive(Debug, Clone)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// dim_out rows, each an orthonormal component in input space.
    pub components: Matrix,
    pub dim_out: usize,
    pub explained_variance: Vec<f64>,
}

/// Fit on the reference population only; requires n > dim_out.
///
/// Component signs are fixed so each component's largest-magnitude entry
/// is positive, making the basis deterministic.
pub fn fit_pca(embeddings: &Matrix, dim_out: usize) -> Result<PcaModel> {
    let n = embeddings.rows;
    let d = embeddings.cols;
    if dim_out == 0 || dim_out > d {
        return Err(Error::InvalidInput(format!(
            "dim_out {dim_out} must be in 1..={d}"
        )));
    }
    if n <= dim_out {
        return Err(Error::InvalidInput(format!(
            "need more rows ({n}) than output dimensions ({dim_out})"
        )));
    }
    if embeddings.data().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite embedding entries".into()));
    }

    let mut mean = vec![0.0; d];
    for i in 0..n {
        for (j, m) in mean.iter_mut().enumerate() {
            *m += embeddings.get(i, j);
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }

    let mut covariance = Matrix::zeros(d, d);
    for i in 0..n {
        for a in 0..d {
            let da = embeddings.get(i, a) - mean[a];
            for b in a..d {
                let db = embeddings.get(i, b) - mean[b];
                let v = covariance.get(a, b) + da * db;
                covariance.set(a, b, v);
            }
        }
    }
    for a in 0..d {
        for b in a..d {
            let v = covariance.get(a, b) / n as f64;
            covariance.set(a, b, v);
            covariance.set(b, a, v);
        }
    }
    if covariance.trace() <= 0.0 {
        return Err(Error::Numerical("zero-variance data".into()));
    }

    let (values, vectors) = jacobi_eigen(&covariance)?;
    let mut components = Matrix::zeros(dim_out, d);
    for k in 0..dim_out {
        let row = vectors.row(k);
        // sign fix: largest-magnitude entry positive, first index on ties
        let mut best = 0;
        for (j, v) in row.iter().enumerate() {
            if v.abs() > row[best].abs() {
                best = j;
            }
        }
        let flip = if row[best] < 0.0 { -1.0 } else { 1.0 };
        for (j, v) in row.iter().enumerate() {
            components.set(k, j, flip * v);
        }
    }
    Ok(PcaModel {
        mean,
        components,
        dim_out,
        explained_variance: values[..dim_out].to_vec(),
    })
}

/// Project rows onto the fitted basis: (X - mean) C^T.
pub fn project(model: &PcaModel, embeddings: &Matrix) -> Result<Matrix> {
    if embeddings.cols != model.mean.len() {
        return Err(Error::InvalidInput(format!(
            "embedding dimension {} does not match the fitted model ({})",
            embeddings.cols,
            model.mean.len()
        )));
    }
    let n = embeddings.rows;
    let mut out = Matrix::zeros(n, model.dim_out);
    for i in 0..n {
        for k in 0..model.dim_out {
            let mut dot = 0.0;
            for j in 0..embeddings.cols {
                dot += (embeddings.get(i, j) - model.mean[j]) * model.components.get(k, j);
            }
            out.set(i, k, dot);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_subspace_reconstructs() {
        // points in a 2-D subspace of R^4
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let basis = [[1.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, -1.0]];
        let mut rows = Vec::new();
        for _ in 0..20 {
            let a: f64 = rng.random_range(-1.0..1.0);
            let b: f64 = rng.random_range(-1.0..1.0);
            rows.push((0..4).map(|j| a * basis[0][j] + b * basis[1][j]).collect());
        }
        let data = Matrix::from_rows(rows).unwrap();
        let model = fit_pca(&data, 2).unwrap();
        let projected = project(&model, &data).unwrap();

        // reconstruct: mean + projected * components
        for i in 0..data.rows {
            for j in 0..4 {
                let mut rebuilt = model.mean[j];
                for k in 0..2 {
                    rebuilt += projected.get(i, k) * model.components.get(k, j);
                }
                assert!(
                    (rebuilt - data.get(i, j)).abs() < 1e-9,
                    "({i},{j}): {rebuilt} vs {}",
                    data.get(i, j)
                );
            }
        }
    }

    #[test]
    fn projecting_fit_data_is_centered() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut rows = Vec::new();
        for _ in 0..50 {
            rows.push((0..6).map(|_| rng.random_range(-2.0..2.0)).collect());
        }
        let data = Matrix::from_rows(rows).unwrap();
        let model = fit_pca(&data, 3).unwrap();
        let projected = project(&model, &data).unwrap();
        for k in 0..3 {
            let mean: f64 = (0..50).map(|i| projected.get(i, k)).sum::<f64>() / 50.0;
            assert!(mean.abs() < 1e-9, "component {k} mean {mean}");
        }
        // explained variances nonincreasing
        for w in model.explained_variance.windows(2) {
            assert!(w[0] >= w[1] - 1e-12);
        }
    }

    #[test]
    fn isotropic_sample_has_flat_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 4000;
        let d = 4;
        let mut rows = Vec::new();
        for _ in 0..n {
            // sum of uniforms as a cheap near-gaussian; isotropic by construction
            rows.push(
                (0..d)
                    .map(|_| (0..12).map(|_| rng.random_range(-0.5..0.5)).sum::<f64>())
                    .collect(),
            );
        }
        let data = Matrix::from_rows(rows).unwrap();
        let model = fit_pca(&data, d).unwrap();
        let top = model.explained_variance[0];
        let bottom = model.explained_variance[d - 1];
        // eigenvalue dispersion of an isotropic sample covariance is
        // O(sqrt(d/n)); allow a generous multiple
        let spread = (top - bottom) / top;
        assert!(spread < 0.2, "spread {spread}");
    }

    #[test]
    fn deterministic_component_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let mut rows = Vec::new();
        for _ in 0..30 {
            rows.push((0..5).map(|_| rng.random_range(-1.0..1.0)).collect());
        }
        let data = Matrix::from_rows(rows).unwrap();
        let a = fit_pca(&data, 3).unwrap();
        let b = fit_pca(&data, 3).unwrap();
        assert_eq!(a.components, b.components);
        for k in 0..3 {
            let row = a.components.row(k);
            let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = row.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(max.abs() >= min.abs(), "component {k} sign not fixed");
        }
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let tiny = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(fit_pca(&tiny, 2).is_err()); // n <= dim_out

        let constant = Matrix::from_rows(vec![vec![1.0, 1.0]; 10]).unwrap();
        assert!(fit_pca(&constant, 1).is_err()); // zero variance
    }
}
