//! Small dense real least squares via Householder QR with column pivoting.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Solution of `min ‖A x − b‖₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct LstsqSolution {
    pub x: Vec<f64>,
    /// Numerical rank of `A`.
    pub rank: usize,
    /// ‖A x − b‖₂.
    pub residual: f64,
    /// Column indices not determined by the data (empty when full rank).
    pub undetermined: Vec<usize>,
}

/// Solves a row-major `rows × cols` system. Columns whose pivot falls below
/// `rcond · max pivot` are reported as undetermined and set to zero.
pub fn solve(a: &[f64], rows: usize, cols: usize, b: &[f64], rcond: f64) -> LstsqSolution {
    assert_eq!(a.len(), rows * cols);
    assert_eq!(b.len(), rows);
    let mut q = a.to_vec();
    let mut rhs = b.to_vec();
    let mut perm: Vec<usize> = (0..cols).collect();
    let at = |m: &Vec<f64>, r: usize, c: usize| m[r * cols + c];

    let steps = rows.min(cols);
    let mut rank = 0;
    let mut first_pivot = 0.0;
    for k in 0..steps {
        // pivot: remaining column with the largest trailing norm
        let (best, best_norm) = (k..cols)
            .map(|c| {
                let n2: f64 = (k..rows).map(|r| at(&q, r, c).powi(2)).sum();
                (c, n2.sqrt())
            })
            .fold((k, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if k == 0 {
            first_pivot = best_norm;
        }
        if best_norm <= rcond * first_pivot || best_norm == 0.0 {
            break;
        }
        if best != k {
            for r in 0..rows {
                q.swap(r * cols + k, r * cols + best);
            }
            perm.swap(k, best);
        }
        // Householder reflector zeroing column k below the diagonal
        let alpha = if at(&q, k, k) > 0.0 { -best_norm } else { best_norm };
        let mut v: Vec<f64> = (k..rows).map(|r| at(&q, r, k)).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for c in k..cols {
                let dot: f64 = (k..rows).map(|r| v[r - k] * at(&q, r, c)).sum();
                let f = 2.0 * dot / vnorm2;
                for r in k..rows {
                    q[r * cols + c] -= f * v[r - k];
                }
            }
            let dot: f64 = (k..rows).map(|r| v[r - k] * rhs[r]).sum();
            let f = 2.0 * dot / vnorm2;
            for r in k..rows {
                rhs[r] -= f * v[r - k];
            }
        }
        rank += 1;
    }

    // back substitution on the leading rank×rank triangle
    let mut y = vec![0.0; cols];
    for k in (0..rank).rev() {
        let s: f64 = ((k + 1)..rank).map(|c| at(&q, k, c) * y[c]).sum();
        y[k] = (rhs[k] - s) / at(&q, k, k);
    }
    let mut x = vec![0.0; cols];
    for (k, &col) in perm.iter().enumerate() {
        x[col] = y[k];
    }
    let residual = (0..rows)
        .map(|r| {
            let ax: f64 = (0..cols).map(|c| a[r * cols + c] * x[c]).sum();
            (ax - b[r]).powi(2)
        })
        .sum::<f64>()
        .sqrt();
    let mut undetermined: Vec<usize> = perm[rank..].to_vec();
    undetermined.sort_unstable();
    LstsqSolution {
        x,
        rank,
        residual,
        undetermined,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_system() {
        let a = [2.0, 1.0, 1.0, 3.0];
        let sol = solve(&a, 2, 2, &[3.0, 5.0], 1e-12);
        assert_eq!(sol.rank, 2);
        assert!((sol.x[0] - 0.8).abs() < 1e-14 && (sol.x[1] - 1.4).abs() < 1e-14);
        assert!(sol.residual < 1e-14);
    }

    #[test]
    fn overdetermined_fit() {
        // y = 1 + 2t with one perturbed point
        let ts = [0.0, 1.0, 2.0, 3.0];
        let a: Vec<f64> = ts.iter().flat_map(|&t| [1.0, t]).collect();
        let b = [1.0, 3.0, 5.0, 7.4];
        let sol = solve(&a, 4, 2, &b, 1e-12);
        assert_eq!(sol.rank, 2);
        // normal equations: [[4,6],[6,14]] x = [16.4, 36.2]
        assert!((sol.x[0] - 0.92).abs() < 1e-12);
        assert!((sol.x[1] - 2.12).abs() < 1e-12);
        assert!(sol.residual > 0.0);
    }

    #[test]
    fn rank_deficient_reports_columns() {
        let a = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        let sol = solve(&a, 2, 3, &[1.0, 2.0], 1e-12);
        assert_eq!(sol.rank, 2);
        assert_eq!(sol.undetermined, vec![2]);
        assert_eq!(sol.x, vec![1.0, 2.0, 0.0]);
    }
}
