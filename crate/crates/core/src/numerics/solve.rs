//! Least-squares solver on a dense design matrix.
//!
//! The solve goes through a Householder QR factorization rather than the
//! normal equations; the condition numbers seen in this data (~1e3..1e4)
//! are where the normal equations start shedding digits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major design matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignMatrix {
    data: Vec<f64>,
    n: usize,
    p: usize,
    has_intercept: bool,
}

impl DesignMatrix {
    /// Build from columns. `has_intercept` asserts column 0 is all ones.
    pub fn from_columns(columns: &[Vec<f64>], has_intercept: bool) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::ShapeMismatch("no columns".into()));
        }
        let n = columns[0].len();
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::ShapeMismatch("columns of unequal length".into()));
        }
        let p = columns.len();
        if has_intercept && columns[0].iter().any(|&v| v != 1.0) {
            return Err(Error::ShapeMismatch(
                "has_intercept set but column 0 is not all ones".into(),
            ));
        }
        if columns.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::ShapeMismatch("non-finite entry".into()));
        }
        let mut data = vec![0.0; n * p];
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                data[i * p + j] = v;
            }
        }
        Ok(DesignMatrix {
            data,
            n,
            p,
            has_intercept,
        })
    }

    /// Prepend an all-ones intercept column to the given predictor columns.
    pub fn with_intercept(predictors: &[Vec<f64>]) -> Result<Self> {
        let n = predictors.first().map(|c| c.len()).unwrap_or(0);
        let mut cols = Vec::with_capacity(predictors.len() + 1);
        cols.push(vec![1.0; n]);
        cols.extend(predictors.iter().cloned());
        Self::from_columns(&cols, true)
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_cols(&self) -> usize {
        self.p
    }

    pub fn has_intercept(&self) -> bool {
        self.has_intercept
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.p + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.p..(i + 1) * self.p]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    /// Rows selected by index, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.p);
        for &i in indices {
            if i >= self.n {
                return Err(Error::ShapeMismatch(format!("row index {i} out of range")));
            }
            data.extend_from_slice(self.row(i));
        }
        if indices.len() < self.p {
            return Err(Error::InsufficientObservations {
                n: indices.len(),
                p: self.p,
            });
        }
        Ok(DesignMatrix {
            data,
            n: indices.len(),
            p: self.p,
            has_intercept: self.has_intercept,
        })
    }

    /// X^T X, row-major p x p.
    pub fn gram(&self) -> Vec<Vec<f64>> {
        let p = self.p;
        let mut g = vec![vec![0.0; p]; p];
        for i in 0..self.n {
            let row = self.row(i);
            for a in 0..p {
                for b in a..p {
                    g[a][b] += row[a] * row[b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                g[a][b] = g[b][a];
            }
        }
        g
    }
}

/// By-products of a least-squares solve.
#[derive(Debug, Clone)]
pub struct LeastSquaresSolution {
    pub beta: Vec<f64>,
    pub sse: f64,
    /// (X^T X)^{-1}, the unscaled covariance factor.
    pub xtx_inverse: Vec<Vec<f64>>,
    pub rank: usize,
}

/// Relative tolerance for declaring a diagonal of R negligible.
const RANK_TOL: f64 = 1e-12;

/// Minimize ||y - X beta||^2 via Householder QR.
pub fn solve_least_squares(x: &DesignMatrix, y: &[f64]) -> Result<LeastSquaresSolution> {
    let n = x.n_rows();
    let p = x.n_cols();
    if y.len() != n {
        return Err(Error::LengthMismatch(format!(
            "y has {} entries for {} rows",
            y.len(),
            n
        )));
    }
    if n < p {
        return Err(Error::InsufficientObservations { n, p });
    }

    // Working copies; `a` is overwritten with R in its upper triangle.
    let mut a: Vec<f64> = x.data.clone();
    let mut qty: Vec<f64> = y.to_vec();
    let at = |a: &Vec<f64>, i: usize, j: usize| a[i * p + j];

    for k in 0..p {
        // Householder vector for column k, rows k..n.
        let mut norm = 0.0f64;
        for i in k..n {
            norm = norm.hypot(at(&a, i, k));
        }
        if norm == 0.0 {
            return Err(Error::RankDeficient { rank: k, cols: p });
        }
        let alpha = if at(&a, k, k) > 0.0 { -norm } else { norm };
        let mut v = vec![0.0; n - k];
        for i in k..n {
            v[i - k] = at(&a, i, k);
        }
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|&t| t * t).sum();
        if vtv > 0.0 {
            // Apply H = I - 2 v v^T / (v^T v) to remaining columns and to y.
            for j in k..p {
                let mut dot = 0.0;
                for i in k..n {
                    dot += v[i - k] * at(&a, i, j);
                }
                let scale = 2.0 * dot / vtv;
                for i in k..n {
                    a[i * p + j] -= scale * v[i - k];
                }
            }
            let mut dot = 0.0;
            for i in k..n {
                dot += v[i - k] * qty[i];
            }
            let scale = 2.0 * dot / vtv;
            for i in k..n {
                qty[i] -= scale * v[i - k];
            }
        }
        a[k * p + k] = alpha;
        for i in (k + 1)..n {
            a[i * p + k] = 0.0;
        }
    }

    // Rank check against the largest diagonal magnitude.
    let max_diag = (0..p).map(|k| at(&a, k, k).abs()).fold(0.0f64, f64::max);
    let rank = (0..p)
        .filter(|&k| at(&a, k, k).abs() > RANK_TOL * max_diag)
        .count();
    if rank < p {
        return Err(Error::RankDeficient { rank, cols: p });
    }

    // Back-substitute R beta = (Q^T y)[..p].
    let mut beta = vec![0.0; p];
    for k in (0..p).rev() {
        let mut s = qty[k];
        for j in (k + 1)..p {
            s -= at(&a, k, j) * beta[j];
        }
        beta[k] = s / at(&a, k, k);
    }

    // R^{-1} by back-substitution, then (X^T X)^{-1} = R^{-1} R^{-T}.
    let mut rinv = vec![vec![0.0; p]; p];
    for col in 0..p {
        let mut e = vec![0.0; p];
        e[col] = 1.0;
        for k in (0..=col).rev() {
            let mut s = e[k];
            for j in (k + 1)..=col {
                s -= at(&a, k, j) * rinv[j][col];
            }
            rinv[k][col] = s / at(&a, k, k);
        }
    }
    let mut xtx_inverse = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in i..p {
            let mut s = 0.0;
            for k in j..p {
                s += rinv[i][k] * rinv[j][k];
            }
            xtx_inverse[i][j] = s;
            xtx_inverse[j][i] = s;
        }
    }

    // Residuals against the original design keep fitted + residual = y exact.
    let mut sse = 0.0;
    for i in 0..n {
        let fit: f64 = x.row(i).iter().zip(&beta).map(|(xi, b)| xi * b).sum();
        let r = y[i] - fit;
        sse += r * r;
    }

    Ok(LeastSquaresSolution {
        beta,
        sse,
        xtx_inverse,
        rank,
    })
}

/// Condition number of X: the ratio of extreme singular values, computed as
/// sqrt(lambda_max/lambda_min) of X^T X. Rank deficiency yields +inf.
pub fn condition_number(x: &DesignMatrix) -> f64 {
    let gram = x.gram();
    let eig = sym_eigenvalues(gram);
    let lam_max = eig.iter().cloned().fold(f64::MIN, f64::max);
    let lam_min = eig.iter().cloned().fold(f64::MAX, f64::min);
    if lam_max <= 0.0 {
        return f64::INFINITY;
    }
    if lam_min <= lam_max * 1e-30 {
        return f64::INFINITY;
    }
    (lam_max / lam_min).sqrt()
}

/// Eigenvalues of a small symmetric matrix by the cyclic Jacobi method.
fn sym_eigenvalues(mut m: Vec<Vec<f64>>) -> Vec<f64> {
    let p = m.len();
    if p == 1 {
        return vec![m[0][0]];
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..p {
            for j in (i + 1)..p {
                off += m[i][j] * m[i][j];
            }
        }
        let frob: f64 = m
            .iter()
            .flatten()
            .map(|v| v * v)
            .sum::<f64>()
            .max(f64::MIN_POSITIVE);
        if off <= 1e-30 * frob {
            break;
        }
        for i in 0..p {
            for j in (i + 1)..p {
                if m[i][j] == 0.0 {
                    continue;
                }
                let theta = (m[j][j] - m[i][i]) / (2.0 * m[i][j]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..p {
                    let mik = m[i][k];
                    let mjk = m[j][k];
                    m[i][k] = c * mik - s * mjk;
                    m[j][k] = s * mik + c * mjk;
                }
                for k in 0..p {
                    let mki = m[k][i];
                    let mkj = m[k][j];
                    m[k][i] = c * mki - s * mkj;
                    m[k][j] = s * mki + c * mkj;
                }
            }
        }
    }
    (0..p).map(|i| m[i][i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn simple_design() -> (DesignMatrix, Vec<f64>) {
        let x = DesignMatrix::with_intercept(&[vec![1.0, 2.0, 3.0, 4.0]]).unwrap();
        let y = vec![2.0, 4.0, 5.0, 8.0];
        (x, y)
    }

    #[test]
    fn hand_checked_slope() {
        // Sxx = 5, Sxy = 9.5 -> slope 1.9, intercept 0, SSE 0.7.
        let (x, y) = simple_design();
        let sol = solve_least_squares(&x, &y).unwrap();
        assert_abs_diff_eq!(sol.beta[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.beta[1], 1.9, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.sse, 0.7, epsilon = 1e-12);
        assert_eq!(sol.rank, 2);
    }

    #[test]
    fn exact_line_interpolates() {
        let xs = vec![0.0, 1.0, 2.0, 5.0];
        let ys: Vec<f64> = xs.iter().map(|&v| 3.0 * v + 1.0).collect();
        let x = DesignMatrix::with_intercept(&[xs]).unwrap();
        let sol = solve_least_squares(&x, &ys).unwrap();
        assert_abs_diff_eq!(sol.beta[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.beta[1], 3.0, epsilon = 1e-12);
        assert!(sol.sse < 1e-20);
    }

    #[test]
    fn duplicated_column_is_rank_deficient() {
        let c = vec![1.0, 2.0, 3.0, 4.0];
        let x = DesignMatrix::from_columns(&[c.clone(), c], false).unwrap();
        let y = vec![1.0, 2.0, 3.0, 4.0];
        assert!(matches!(
            solve_least_squares(&x, &y),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn residuals_orthogonal_to_design() {
        let x = DesignMatrix::with_intercept(&[
            vec![0.3, 1.7, 2.2, 3.9, 4.1, 5.5],
            vec![9.0, 3.0, 7.0, 1.0, 4.0, 6.0],
        ])
        .unwrap();
        let y = vec![1.0, 2.0, 0.5, 3.5, 2.2, 4.4];
        let sol = solve_least_squares(&x, &y).unwrap();
        let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for j in 0..x.n_cols() {
            let dot: f64 = (0..x.n_rows())
                .map(|i| {
                    let fit: f64 = x.row(i).iter().zip(&sol.beta).map(|(a, b)| a * b).sum();
                    x.get(i, j) * (y[i] - fit)
                })
                .sum();
            assert!(dot.abs() <= 1e-8 * ynorm, "column {j}: {dot}");
        }
    }

    #[test]
    fn xtx_inverse_matches_direct_inverse() {
        // 2x2 case invertible by hand.
        let x = DesignMatrix::with_intercept(&[vec![1.0, 2.0, 4.0]]).unwrap();
        let sol = solve_least_squares(&x, &[1.0, 2.0, 3.0]).unwrap();
        // X^T X = [[3, 7], [7, 21]]; det = 14; inverse = [[21, -7], [-7, 3]]/14
        assert_abs_diff_eq!(sol.xtx_inverse[0][0], 21.0 / 14.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.xtx_inverse[0][1], -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.xtx_inverse[1][1], 3.0 / 14.0, epsilon = 1e-12);
    }

    #[test]
    fn condition_of_orthonormal_columns_is_one() {
        let s = 1.0 / 2.0f64.sqrt();
        let x = DesignMatrix::from_columns(&[vec![s, s, 0.0], vec![s, -s, 0.0]], false).unwrap();
        assert_abs_diff_eq!(condition_number(&x), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn condition_of_scaled_orthogonal_columns() {
        let x = DesignMatrix::from_columns(
            &[vec![1.0, 0.0, 0.0], vec![0.0, 1000.0, 0.0]],
            false,
        )
        .unwrap();
        assert_abs_diff_eq!(condition_number(&x), 1000.0, epsilon = 1e-9);
    }

    #[test]
    fn condition_of_singular_design_is_infinite() {
        let c = vec![1.0, 2.0, 3.0];
        let x = DesignMatrix::from_columns(&[c.clone(), c], false).unwrap();
        assert!(condition_number(&x).is_infinite());
    }
}
