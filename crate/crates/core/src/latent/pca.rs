use crate::error::{FaeError, Result};

/// Off-diagonal Frobenius norm at which the Jacobi sweeps stop.
const JACOBI_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a dense symmetric matrix by cyclic Jacobi
/// rotations. Returns eigenvalues and column eigenvectors (row-major
/// `n × n`, column `k` pairs with value `k`), unsorted.
pub fn symmetric_eigen(matrix: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = matrix.len();
    if matrix.iter().any(|r| r.len() != n) {
        return Err(FaeError::Shape("eigendecomposition needs a square matrix".into()));
    }
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= JACOBI_TOL * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let values = (0..n).map(|i| a[i][i]).collect();
    Ok((values, v))
}

fn off_diagonal_norm(a: &[Vec<f64>]) -> f64 {
    let mut s = 0.0;
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if i != j {
                s += x * x;
            }
        }
    }
    s.sqrt()
}

/// Mean, principal axes and their variances.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaResult {
    pub mean: Vec<f64>,
    /// `k` orthonormal axes; each axis' largest-magnitude entry is positive.
    pub components: Vec<Vec<f64>>,
    /// Sample variance (divisor `n−1`) along each axis, non-increasing.
    pub explained_variance: Vec<f64>,
    /// Trace of the sample covariance.
    pub total_variance: f64,
}

/// Sample covariance (divisor `n−1`) of the rows.
pub fn covariance(rows: &[Vec<f64>], mean: &[f64]) -> Vec<Vec<f64>> {
    let dim = mean.len();
    let mut cov = vec![vec![0.0; dim]; dim];
    for r in rows {
        for i in 0..dim {
            let di = r[i] - mean[i];
            for j in i..dim {
                cov[i][j] += di * (r[j] - mean[j]);
            }
        }
    }
    let denom = (rows.len() - 1) as f64;
    for i in 0..dim {
        for j in i..dim {
            cov[i][j] /= denom;
            cov[j][i] = cov[i][j];
        }
    }
    cov
}

/// Centers `rows`, finds the top-`k` covariance eigenvectors and projects.
pub fn pca_fit(rows: &[Vec<f64>], k: usize) -> Result<(PcaResult, Vec<Vec<f64>>)> {
    let n = rows.len();
    if n < 2 {
        return Err(FaeError::Config(format!("PCA needs at least 2 rows, got {n}")));
    }
    let dim = rows[0].len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(FaeError::Shape("PCA rows have differing lengths".into()));
    }
    if k == 0 || k > dim {
        return Err(FaeError::Config(format!("k={k} must lie in 1..={dim}")));
    }
    let mean: Vec<f64> = (0..dim)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let cov = covariance(rows, &mean);
    let total_variance = (0..dim).map(|i| cov[i][i]).sum();
    let (values, vectors) = symmetric_eigen(&cov)?;

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let components: Vec<Vec<f64>> = order[..k]
        .iter()
        .map(|&c| {
            let mut axis: Vec<f64> = (0..dim).map(|r| vectors[r][c]).collect();
            let pivot = axis
                .iter()
                .enumerate()
                .fold(0, |best, (i, x)| if x.abs() > axis[best].abs() { i } else { best });
            if axis[pivot] < 0.0 {
                axis.iter_mut().for_each(|x| *x = -*x);
            }
            axis
        })
        .collect();
    // Rounding can leave tiny negative eigenvalues on rank-deficient data.
    let explained_variance = order[..k].iter().map(|&c| values[c].max(0.0)).collect();
    let projections = rows
        .iter()
        .map(|r| {
            components
                .iter()
                .map(|axis| axis.iter().zip(r).zip(&mean).map(|((a, x), m)| a * (x - m)).sum())
                .collect()
        })
        .collect();
    Ok((
        PcaResult {
            mean,
            components,
            explained_variance,
            total_variance,
        },
        projections,
    ))
}
