//! Spearman rank correlation with exact permutation p-values at small n
//! and a two-sided t approximation otherwise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::average_ranks;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub rho: f64,
    pub p_value: f64,
    pub n: usize,
}

const EXACT_MAX_N: usize = 10;

/// Pearson correlation of average-ranked values.
///
/// Two-sided p-value: exact enumeration of all n! rank permutations for
/// n <= 10, else the t approximation t = rho sqrt((n-2)/(1-rho^2)) with
/// n-2 degrees of freedom.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::InvalidInput(format!(
            "length mismatch: {n} vs {}",
            y.len()
        )));
    }
    if n < 3 {
        return Err(Error::InvalidInput(format!("need n >= 3, got {n}")));
    }
    let constant = |v: &[f64]| v.iter().all(|a| a == &v[0]);
    if constant(x) || constant(y) {
        return Err(Error::InvalidInput(
            "correlation undefined for a constant input vector".into(),
        ));
    }

    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let rho = pearson(&rx, &ry);

    let p_value = if n <= EXACT_MAX_N {
        exact_permutation_p(&rx, &ry, rho)
    } else {
        t_two_sided_p(rho, n)
    };
    Ok(CorrelationResult { rho, p_value, n })
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    cov / (va.sqrt() * vb.sqrt())
}

/// Fraction of permutations of the y-ranks whose |rho| reaches |rho_obs|,
/// conditional on the observed tie patterns.
fn exact_permutation_p(rx: &[f64], ry: &[f64], rho_obs: f64) -> f64 {
    let n = rx.len();
    let ma = rx.iter().sum::<f64>() / n as f64;
    let mb = ry.iter().sum::<f64>() / n as f64;
    let ca: Vec<f64> = rx.iter().map(|v| v - ma).collect();
    let norm_a = ca.iter().map(|v| v * v).sum::<f64>().sqrt();
    let norm_b = ry.iter().map(|v| (v - mb) * (v - mb)).sum::<f64>().sqrt();

    // rho of a permutation reduces to a dot product with fixed norms
    let mut perm: Vec<f64> = ry.to_vec();
    let mut count = 0u64;
    let mut total = 0u64;
    let threshold = rho_obs.abs() - 1e-12;
    // Heap's algorithm, iterative
    let mut c = vec![0usize; n];
    let mut eval = |p: &[f64]| {
        let dot: f64 = ca.iter().zip(p).map(|(a, b)| a * (b - mb)).sum();
        let rho = dot / (norm_a * norm_b);
        if rho.abs() >= threshold {
            count += 1;
        }
        total += 1;
    };
    eval(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            eval(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    count as f64 / total as f64
}

fn t_two_sided_p(rho: f64, n: usize) -> f64 {
    let df = (n - 2) as f64;
    if rho.abs() >= 1.0 {
        return 0.0;
    }
    let t = rho * (df / (1.0 - rho * rho)).sqrt();
    let x = df / (df + t * t);
    incomplete_beta_regularized(df / 2.0, 0.5, x)
}

/// ln Gamma via the Lanczos approximation.
fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 6] = [
        76.180_091_729_471_46,
        -86.505_320_329_416_77,
        24.014_098_240_830_91,
        -1.231_739_572_450_155,
        0.120_865_097_386_617_7e-2,
        -0.539_523_938_495_3e-5,
    ];
    let mut y = x;
    let tmp = x + 5.5;
    let tmp = tmp - (x + 0.5) * tmp.ln();
    let mut series = 1.000_000_000_190_015;
    for c in COEFFS {
        y += 1.0;
        series += c / y;
    }
    -tmp + (2.506_628_274_631_000_5 * series / x).ln()
}

/// Regularized incomplete beta I_x(a, b) via the Lentz continued fraction.
fn incomplete_beta_regularized(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-14;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m_f = m as f64;
        let m2 = 2.0 * m_f;
        let aa = m_f * (b - m_f) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m_f) * (qab + m_f) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_pairs() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let up = [2.0, 4.0, 9.0, 16.0, 25.0];
        let r = spearman(&x, &up).unwrap();
        assert!((r.rho - 1.0).abs() < 1e-12);
        // with n=5: only the 2 perfectly monotone permutations reach |rho|=1
        assert!((r.p_value - 2.0 / 120.0).abs() < 1e-12);

        let down = [25.0, 16.0, 9.0, 4.0, 2.0];
        let r = spearman(&x, &down).unwrap();
        assert!((r.rho + 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_vector_is_error() {
        assert!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(spearman(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]).is_err());
    }

    #[test]
    fn tied_case_matches_brute_force_oracle() {
        // n = 5 with one tie in y
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [1.0, 3.0, 2.0, 3.0, 5.0];
        let r = spearman(&x, &y).unwrap();

        // oracle: rank by hand, enumerate all 120 permutations directly
        let rx = average_ranks(&x);
        let ry = average_ranks(&y);
        let rho_oracle = pearson(&rx, &ry);
        assert!((r.rho - rho_oracle).abs() < 1e-12);

        // independent permutation count via index permutations
        let mut idx = [0usize, 1, 2, 3, 4];
        let mut count = 0;
        let mut total = 0;
        permute(&mut idx, 0, &mut |p| {
            let perm_ry: Vec<f64> = p.iter().map(|&i| ry[i]).collect();
            let rho = pearson(&rx, &perm_ry);
            if rho.abs() >= r.rho.abs() - 1e-12 {
                count += 1;
            }
            total += 1;
        });
        assert_eq!(total, 120);
        assert!((r.p_value - count as f64 / 120.0).abs() < 1e-12);
    }

    fn permute(idx: &mut [usize; 5], k: usize, f: &mut impl FnMut(&[usize; 5])) {
        if k == 5 {
            f(idx);
            return;
        }
        for i in k..5 {
            idx.swap(k, i);
            permute(idx, k + 1, f);
            idx.swap(k, i);
        }
    }

    #[test]
    fn t_approximation_matches_table_value() {
        // two-sided p for t = 2.228 at df = 10 is 0.05
        let p = incomplete_beta_regularized(5.0, 0.5, 10.0 / (10.0 + 2.228 * 2.228));
        assert!((p - 0.05).abs() < 1e-3, "{p}");
    }

    #[test]
    fn large_n_uses_t_branch() {
        let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| v + ((v * 7.0).sin())).collect();
        let r = spearman(&x, &y).unwrap();
        assert!(r.rho > 0.9);
        assert!(r.p_value < 0.001);

        let perfect: Vec<f64> = x.clone();
        let r = spearman(&x, &perfect).unwrap();
        assert!((r.rho - 1.0).abs() < 1e-12);
        assert!(r.p_value < 1e-15);
    }

    #[test]
    fn invariant_under_monotone_transforms() {
        let x = [0.3, 1.2, 0.7, 2.5, 1.9, 0.1];
        let y = [5.0, 2.0, 4.0, 1.0, 3.0, 6.0];
        let base = spearman(&x, &y).unwrap();
        let x_exp: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        let y_cube: Vec<f64> = y.iter().map(|v| v.powi(3) + 10.0).collect();
        let transformed = spearman(&x_exp, &y_cube).unwrap();
        assert!((base.rho - transformed.rho).abs() < 1e-12);
        assert!((base.p_value - transformed.p_value).abs() < 1e-12);
    }
}
