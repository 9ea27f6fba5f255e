//! Householder QR with column pivoting, and the kernel/least-squares
//! operations built on it: orthonormal null-space bases and minimum-norm
//! particular solutions of `A x = b`.

use super::{Matrix, Vector};
use crate::error::{Error, Result};

/// Rank cutoff relative to the largest R diagonal magnitude.
const RANK_THRESHOLD: f64 = 1e-10;

/// Pivoted QR factorization `A P = Q R` with full square `Q`.
struct PivotedQr {
    q: Matrix,
    r: Matrix,
    perm: Vec<usize>,
    rank: usize,
}

fn pivoted_qr(a: &Matrix) -> PivotedQr {
    let m = a.rows();
    let n = a.cols();
    let steps = m.min(n);
    let mut r = a.clone();
    let mut q = Matrix::identity(m);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut col_norms: Vec<f64> = (0..n).map(|j| r.col(j).norm_sq()).collect();

    for k in 0..steps {
        // Pivot the largest remaining column to the front.
        let (pivot, _) = col_norms
            .iter()
            .enumerate()
            .skip(k)
            .fold((k, -1.0), |acc, (j, &v)| if v > acc.1 { (j, v) } else { acc });
        if pivot != k {
            for i in 0..m {
                let tmp = r.get(i, k);
                r.set(i, k, r.get(i, pivot));
                r.set(i, pivot, tmp);
            }
            perm.swap(k, pivot);
            col_norms.swap(k, pivot);
        }

        // Householder reflector for column k below the diagonal.
        let mut norm_sq = 0.0;
        for i in k..m {
            norm_sq += r.get(i, k) * r.get(i, k);
        }
        let norm = norm_sq.sqrt();
        if norm == 0.0 {
            continue;
        }
        let akk = r.get(k, k);
        let alpha = if akk >= 0.0 { -norm } else { norm };
        let mut v = vec![0.0; m - k];
        v[0] = akk - alpha;
        for i in (k + 1)..m {
            v[i - k] = r.get(i, k);
        }
        let v_norm_sq: f64 = v.iter().map(|x| x * x).sum();
        if v_norm_sq == 0.0 {
            continue;
        }

        // Apply H = I - 2 v v^T / (v^T v) to R (from the left) ...
        for j in k..n {
            let mut dot = 0.0;
            for i in k..m {
                dot += v[i - k] * r.get(i, j);
            }
            let coeff = 2.0 * dot / v_norm_sq;
            for i in k..m {
                r.set(i, j, r.get(i, j) - coeff * v[i - k]);
            }
        }
        // ... and accumulate it into Q (from the right).
        for i in 0..m {
            let mut dot = 0.0;
            for j in k..m {
                dot += q.get(i, j) * v[j - k];
            }
            let coeff = 2.0 * dot / v_norm_sq;
            for j in k..m {
                q.set(i, j, q.get(i, j) - coeff * v[j - k]);
            }
        }
        r.set(k, k, alpha);
        for i in (k + 1)..m {
            r.set(i, k, 0.0);
        }
        for j in (k + 1)..n {
            col_norms[j] = ((k + 1)..m).map(|i| r.get(i, j) * r.get(i, j)).sum();
        }
    }

    let largest = r.get(0, 0).abs();
    let mut rank = 0;
    for k in 0..steps {
        if r.get(k, k).abs() > RANK_THRESHOLD * largest && largest > 0.0 {
            rank = k + 1;
        } else {
            break;
        }
    }
    PivotedQr { q, r, perm, rank }
}

/// The square orthogonal `Q` factor of the pivoted QR of `a`; applying it to
/// a Gaussian matrix yields a uniformly random rotation for conditioning
/// purposes.
pub fn orthonormal_factor(a: &Matrix) -> Matrix {
    pivoted_qr(a).q
}

/// Orthonormal basis of the kernel of `A`, returned as the columns of a
/// `cols x (cols - rank)` matrix `F` with `A F = 0` and `F^T F = I`.
///
/// A full-rank square `A` yields a zero-width `F`.
pub fn null_space_basis(a: &Matrix) -> Matrix {
    let n = a.cols();
    let qr = pivoted_qr(&a.transpose());
    let rank = qr.rank;
    let mut basis = Matrix::zeros(n, n - rank);
    for j in rank..n {
        for i in 0..n {
            basis.set(i, j - rank, qr.q.get(i, j));
        }
    }
    basis
}

/// Minimum-norm solution of the consistent system `A x = b`.
///
/// Returns `Error::InfeasibleEquality` when the residual of the candidate
/// solution exceeds `1e-10 * (1 + |b|)`, i.e. when the system is inconsistent.
pub fn particular_solution(a: &Matrix, b: &Vector) -> Result<Vector> {
    if a.rows() != b.len() {
        return Err(Error::InvalidInput(format!(
            "system shape mismatch: {} rows vs rhs length {}",
            a.rows(),
            b.len()
        )));
    }
    let m = a.rows();
    let n = a.cols();
    // Factor A^T P = Q R, so P^T A = R^T Q^T and the system becomes a
    // triangular solve for w = Q^T x restricted to the first `rank` rows.
    let qr = pivoted_qr(&a.transpose());
    let rank = qr.rank;

    // Permuted right-hand side: row i of P^T A is row perm[i] of A.
    let pb: Vec<f64> = (0..m).map(|i| b[qr.perm[i]]).collect();

    // Forward substitution on the lower-triangular R^T (rank x rank block).
    let mut w = vec![0.0; rank];
    for i in 0..rank {
        let mut acc = pb[i];
        for j in 0..i {
            acc -= qr.r.get(j, i) * w[j];
        }
        w[i] = acc / qr.r.get(i, i);
    }

    // x = Q[:, :rank] w lies in the row space of A, hence has minimum norm.
    let mut x = Vector::zeros(n);
    for (j, &wj) in w.iter().enumerate() {
        for i in 0..n {
            x[i] += qr.q.get(i, j) * wj;
        }
    }

    let mut residual = a.matvec(&x);
    residual.add_scaled(-1.0, b);
    if residual.norm() > 1e-10 * (1.0 + b.norm()) {
        return Err(Error::InfeasibleEquality(format!(
            "residual {} for rhs of norm {}",
            residual.norm(),
            b.norm()
        )));
    }
    Ok(x)
}
