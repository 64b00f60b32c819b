//! Gaussian summaries of projected embeddings and the three closed-form
//! distribution distances between them: KL divergence, Wasserstein-2, and
//! Fréchet distance.

use crate::error::{Error, Result};

use super::linalg::{jacobi_eigen, spectral_map, sqrt_psd, Matrix};

/// Mean and (ridge-regularized, population) covariance of one group.
#[derive(Debug, Clone)]
pub struct GaussianSummary {
    pub mu: Vec<f64>,
    pub sigma: Matrix,
    pub n: usize,
    pub d: usize,
    pub ridge: f64,
}

/// Default ridge scale: 1e-6 times the mean covariance diagonal.
pub const DEFAULT_RIDGE_SCALE: f64 = 1e-6;

/// Population-covariance Gaussian fit with `ridge` added to the diagonal.
pub fn fit_gaussian(projected: &Matrix, ridge: f64) -> Result<GaussianSummary> {
    let n = projected.rows;
    let d = projected.cols;
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "gaussian fit needs at least 2 rows, got {n}"
        )));
    }
    if ridge < 0.0 {
        return Err(Error::InvalidInput(format!("negative ridge {ridge}")));
    }
    let mut mu = vec![0.0; d];
    for i in 0..n {
        for (j, m) in mu.iter_mut().enumerate() {
            *m += projected.get(i, j);
        }
    }
    for m in &mut mu {
        *m /= n as f64;
    }
    let mut sigma = Matrix::zeros(d, d);
    for i in 0..n {
        for a in 0..d {
            let da = projected.get(i, a) - mu[a];
            for b in a..d {
                let db = projected.get(i, b) - mu[b];
                let v = sigma.get(a, b) + da * db;
                sigma.set(a, b, v);
            }
        }
    }
    for a in 0..d {
        for b in a..d {
            let v = sigma.get(a, b) / n as f64;
            let v = if a == b { v + ridge } else { v };
            sigma.set(a, b, v);
            sigma.set(b, a, v);
        }
    }
    Ok(GaussianSummary {
        mu,
        sigma,
        n,
        d,
        ridge,
    })
}

/// Ridge magnitude from the default policy for an unregularized covariance.
pub fn default_ridge(projected: &Matrix) -> Result<f64> {
    let unridged = fit_gaussian(projected, 0.0)?;
    let d = unridged.d as f64;
    Ok(DEFAULT_RIDGE_SCALE * unridged.sigma.trace() / d)
}

fn check_dims(p: &GaussianSummary, q: &GaussianSummary) -> Result<()> {
    if p.d != q.d {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: {} vs {}",
            p.d, q.d
        )));
    }
    Ok(())
}

fn mean_diff_sq(p: &GaussianSummary, q: &GaussianSummary) -> f64 {
    p.mu.iter().zip(&q.mu).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// KL(P || Q) for Gaussians:
/// 0.5 [tr(Sq^-1 Sp) + (mq-mp)^T Sq^-1 (mq-mp) - d + ln(|Sq|/|Sp|)],
/// computed through symmetric eigendecompositions.
pub fn kl_gaussian(p: &GaussianSummary, q: &GaussianSummary) -> Result<f64> {
    check_dims(p, q)?;
    let d = p.d;

    let (q_vals, q_vecs) = jacobi_eigen(&q.sigma)?;
    if q_vals.iter().any(|&l| l <= 0.0) {
        return Err(Error::Numerical(
            "covariance of Q is singular; increase the ridge".into(),
        ));
    }
    let (p_vals, _) = jacobi_eigen(&p.sigma)?;
    if p_vals.iter().any(|&l| l <= 0.0) {
        return Err(Error::Numerical(
            "covariance of P has zero determinant; increase the ridge".into(),
        ));
    }

    let q_inv = spectral_map(&q_vals, &q_vecs, |l| 1.0 / l);

    // tr(Sq^-1 Sp)
    let mut trace_term = 0.0;
    for i in 0..d {
        for k in 0..d {
            trace_term += q_inv.get(i, k) * p.sigma.get(k, i);
        }
    }

    // (mq - mp)^T Sq^-1 (mq - mp)
    let diff: Vec<f64> = q.mu.iter().zip(&p.mu).map(|(a, b)| a - b).collect();
    let mut mahalanobis = 0.0;
    for i in 0..d {
        for j in 0..d {
            mahalanobis += diff[i] * q_inv.get(i, j) * diff[j];
        }
    }

    let logdet_q: f64 = q_vals.iter().map(|l| l.ln()).sum();
    let logdet_p: f64 = p_vals.iter().map(|l| l.ln()).sum();

    Ok(0.5 * (trace_term + mahalanobis - d as f64 + logdet_q - logdet_p))
}

fn covariance_alignment_trace(p: &GaussianSummary, q: &GaussianSummary) -> Result<f64> {
    // tr((Sp^1/2 Sq Sp^1/2)^1/2) via the symmetrized product
    let sqrt_p = sqrt_psd(&p.sigma)?;
    let mut inner = sqrt_p.matmul(&q.sigma)?.matmul(&sqrt_p)?;
    inner.symmetrize();
    let cross = sqrt_psd(&inner)?;
    Ok(cross.trace())
}

/// Wasserstein-2 distance between Gaussians:
/// sqrt(||mp-mq||^2 + tr(Sp + Sq - 2 (Sp^1/2 Sq Sp^1/2)^1/2)).
pub fn w2_gaussian(p: &GaussianSummary, q: &GaussianSummary) -> Result<f64> {
    check_dims(p, q)?;
    let cross_trace = covariance_alignment_trace(p, q)?;
    let total = mean_diff_sq(p, q) + p.sigma.trace() + q.sigma.trace() - 2.0 * cross_trace;
    Ok(total.max(0.0).sqrt())
}

/// Fréchet distance between Gaussians:
/// ||mp-mq||^2 + tr(Sp + Sq - 2 (Sp Sq)^1/2), with the product square root
/// evaluated through the symmetrized-form trace identity.
pub fn frechet_gaussian(p: &GaussianSummary, q: &GaussianSummary) -> Result<f64> {
    check_dims(p, q)?;
    let cross_trace = covariance_alignment_trace(p, q)?;
    let total = mean_diff_sq(p, q) + p.sigma.trace() + q.sigma.trace() - 2.0 * cross_trace;
    Ok(total.max(0.0))
}

/// The per-pair shift report row.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ShiftReport {
    pub kl: f64,
    pub w2: f64,
    pub frechet: f64,
}

impl ShiftReport {
    pub fn compute(p: &GaussianSummary, q: &GaussianSummary) -> Result<Self> {
        Ok(ShiftReport {
            kl: kl_gaussian(p, q)?,
            w2: w2_gaussian(p, q)?,
            frechet: frechet_gaussian(p, q)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn summary_1d(mu: f64, var: f64) -> GaussianSummary {
        GaussianSummary {
            mu: vec![mu],
            sigma: Matrix::from_rows(vec![vec![var]]).unwrap(),
            n: 100,
            d: 1,
            ridge: 0.0,
        }
    }

    pub(crate) fn random_summary(d: usize, rng: &mut ChaCha8Rng) -> GaussianSummary {
        let sigma = crate::shift::linalg::random_psd(d, rng);
        GaussianSummary {
            mu: (0..d).map(|_| rng.random_range(-1.0..1.0)).collect(),
            sigma,
            n: 100,
            d,
            ridge: 1e-6,
        }
    }

    #[test]
    fn fit_gaussian_hand_case() {
        let data = Matrix::from_rows(vec![vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
        let g = fit_gaussian(&data, 0.0).unwrap();
        assert_eq!(g.mu, vec![1.0, 0.0]);
        assert_eq!(g.sigma.get(0, 0), 1.0); // population covariance
        assert_eq!(g.sigma.get(1, 1), 0.0);
        assert_eq!(g.sigma.get(0, 1), 0.0);
    }

    #[test]
    fn identical_points_leave_ridge_only() {
        let data = Matrix::from_rows(vec![vec![3.0, 1.0]; 5]).unwrap();
        let g = fit_gaussian(&data, 1e-4).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1e-4 } else { 0.0 };
                assert_eq!(g.sigma.get(i, j), expect);
            }
        }
    }

    #[test]
    fn ridge_shifts_eigenvalues_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data = {
            let mut m = Matrix::zeros(20, 3);
            for i in 0..20 {
                for j in 0..3 {
                    m.set(i, j, rng.random_range(-1.0..1.0));
                }
            }
            m
        };
        let bare = fit_gaussian(&data, 0.0).unwrap();
        let ridged = fit_gaussian(&data, 1e-6).unwrap();
        let (bare_vals, _) = jacobi_eigen(&bare.sigma).unwrap();
        let (ridged_vals, _) = jacobi_eigen(&ridged.sigma).unwrap();
        for (a, b) in bare_vals.iter().zip(&ridged_vals) {
            assert!((b - a - 1e-6).abs() < 1e-12);
        }
    }

    #[test]
    fn kl_identical_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let p = random_summary(4, &mut rng);
            assert!(kl_gaussian(&p, &p).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn kl_1d_hand_case_and_asymmetry() {
        // KL(N(0,1) || N(0,2)) = 0.5[1/2 - 1 + ln 2]
        let p = summary_1d(0.0, 1.0);
        let q = summary_1d(0.0, 2.0);
        let forward = kl_gaussian(&p, &q).unwrap();
        let expect = 0.5 * (0.5 - 1.0 + 2.0f64.ln());
        assert!((forward - expect).abs() < 1e-12);
        assert!((forward - 0.09657).abs() < 1e-5);

        let reverse = kl_gaussian(&q, &p).unwrap();
        let expect_rev = 0.5 * (2.0 - 1.0 - 2.0f64.ln());
        assert!((reverse - expect_rev).abs() < 1e-12);
        assert!((reverse - 0.1534).abs() < 1e-4);
        assert!((forward - reverse).abs() > 0.05);
    }

    #[test]
    fn kl_singular_q_instructs_larger_ridge() {
        let p = summary_1d(0.0, 1.0);
        let q = summary_1d(0.0, 0.0);
        let err = kl_gaussian(&p, &q).unwrap_err();
        assert!(err.to_string().contains("ridge"), "{err}");
    }

    #[test]
    fn w2_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = random_summary(5, &mut rng);
        assert!(w2_gaussian(&p, &p).unwrap() < 1e-9);

        // equal covariances, means 3 apart: pure transport
        let a = summary_1d(0.0, 1.7);
        let b = summary_1d(3.0, 1.7);
        assert!((w2_gaussian(&a, &b).unwrap() - 3.0).abs() < 1e-9);

        // 1-D, equal means, sigma 1 vs 2: |1-2| = 1
        let c = summary_1d(0.0, 1.0);
        let d = summary_1d(0.0, 4.0);
        assert!((w2_gaussian(&c, &d).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn w2_symmetry_and_frechet_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for d in [2, 4, 8] {
            let p = random_summary(d, &mut rng);
            let q = random_summary(d, &mut rng);
            let w_pq = w2_gaussian(&p, &q).unwrap();
            let w_qp = w2_gaussian(&q, &p).unwrap();
            assert!((w_pq - w_qp).abs() < 1e-9, "d={d}: {w_pq} vs {w_qp}");

            let fd = frechet_gaussian(&p, &q).unwrap();
            let rel = (fd - w_pq * w_pq).abs() / fd.abs().max(1e-12);
            assert!(rel < 1e-8, "d={d}: fd {fd} vs w2^2 {}", w_pq * w_pq);
        }
    }

    #[test]
    fn distances_invariant_under_common_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let p = random_summary(4, &mut rng);
        let q = random_summary(4, &mut rng);

        // random orthogonal matrix from eigenvectors of a random symmetric
        let (_, rotation) = jacobi_eigen(&crate::shift::linalg::random_psd(4, &mut rng)).unwrap();
        let rotate = |g: &GaussianSummary| -> GaussianSummary {
            let r = &rotation;
            let mu: Vec<f64> = (0..4)
                .map(|i| (0..4).map(|j| r.get(i, j) * g.mu[j]).sum())
                .collect();
            let mut sigma = r.matmul(&g.sigma).unwrap().matmul(&r.transpose()).unwrap();
            sigma.symmetrize();
            GaussianSummary {
                mu,
                sigma,
                n: g.n,
                d: g.d,
                ridge: g.ridge,
            }
        };
        let (rp, rq) = (rotate(&p), rotate(&q));

        let kl = kl_gaussian(&p, &q).unwrap();
        let kl_rot = kl_gaussian(&rp, &rq).unwrap();
        assert!((kl - kl_rot).abs() < 1e-8);

        let w2 = w2_gaussian(&p, &q).unwrap();
        let w2_rot = w2_gaussian(&rp, &rq).unwrap();
        assert!((w2 - w2_rot).abs() < 1e-8);

        let fd = frechet_gaussian(&p, &q).unwrap();
        let fd_rot = frechet_gaussian(&rp, &rq).unwrap();
        assert!((fd - fd_rot).abs() < 1e-8);
    }
}
