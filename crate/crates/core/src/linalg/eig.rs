//! Symmetric eigendecomposition by the cyclic Jacobi rotation method.
//!
//! Jacobi is unconditionally robust for real symmetric matrices and more than
//! fast enough at the matrix sizes this crate works with (n <= ~50). Sweeps
//! run until the off-diagonal Frobenius norm drops below 1e-12 (or the
//! rounding floor for large-norm inputs).

use super::{Matrix, Vector};
use crate::error::{Error, Result};

/// Eigendecomposition `A = V diag(w) V^T` of a symmetric matrix.
///
/// Eigenvalues are sorted ascending; column `j` of `eigenvectors` is the unit
/// eigenvector paired with `eigenvalues[j]`.
#[derive(Clone, Debug)]
pub struct SymEigResult {
    pub eigenvalues: Vector,
    pub eigenvectors: Matrix,
}

impl SymEigResult {
    /// Reconstructs `V diag(w) V^T`; used by the reconstruction tests.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for j in 0..n {
            let w = self.eigenvalues[j];
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        scaled.matmul(&self.eigenvectors.transpose())
    }

    /// Smallest eigenvalue with its eigenvector.
    pub fn min_pair(&self) -> (f64, Vector) {
        (self.eigenvalues[0], self.eigenvectors.col(0))
    }
}

const OFF_DIAGONAL_TARGET: f64 = 1e-12;
const SYMMETRY_TOLERANCE: f64 = 1e-12;
const MAX_SWEEPS: usize = 64;

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            sum += 2.0 * a.get(i, j) * a.get(i, j);
        }
    }
    sum.sqrt()
}

/// Full eigendecomposition of a symmetric matrix.
///
/// Errors on non-square input and on asymmetry beyond `1e-12`.
pub fn sym_eig(a: &Matrix) -> Result<SymEigResult> {
    if !a.is_square() {
        return Err(Error::InvalidInput(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if a.rows() > 0 && a.asymmetry() > SYMMETRY_TOLERANCE {
        return Err(Error::InvalidInput(format!(
            "matrix asymmetry {} exceeds tolerance {SYMMETRY_TOLERANCE}",
            a.asymmetry()
        )));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(SymEigResult {
            eigenvalues: Vector::zeros(0),
            eigenvectors: Matrix::zeros(0, 0),
        });
    }

    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    // Quadratic Jacobi convergence stalls at the rounding floor; accept that
    // floor for matrices whose scale puts 1e-12 out of reach.
    let floor = 1e-15 * a.frobenius_norm();
    let target = OFF_DIAGONAL_TARGET.max(floor);

    let mut converged = off_diagonal_norm(&m) <= target;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                // Classic two-sided rotation annihilating (p, q).
                let theta = (m.get(q, q) - m.get(p, p)) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
        converged = off_diagonal_norm(&m) <= target;
    }
    if !converged {
        return Err(Error::Numerical(
            "Jacobi sweeps did not reach the off-diagonal target".into(),
        ));
    }

    // Sort eigenpairs ascending.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).partial_cmp(&m.get(j, j)).unwrap());
    let eigenvalues = Vector::from_vec(order.iter().map(|&i| m.get(i, i)).collect());
    let mut eigenvectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors.set(i, dst, v.get(i, src));
        }
    }
    Ok(SymEigResult {
        eigenvalues,
        eigenvectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rng::Rng;

    #[test]
    fn identity_eigenvalues() {
        let r = sym_eig(&Matrix::identity(3)).unwrap();
        for j in 0..3 {
            assert!((r.eigenvalues[j] - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn diagonal_matrix_sorted() {
        let mut a = Matrix::zeros(3, 3);
        a.set(0, 0, -2.0);
        a.set(1, 1, 0.0);
        a.set(2, 2, 5.0);
        let r = sym_eig(&a).unwrap();
        assert_eq!(r.eigenvalues.as_slice(), &[-2.0, 0.0, 5.0]);
        // Eigenvectors are signed permutations of the identity columns.
        for j in 0..3 {
            let col = r.eigenvectors.col(j);
            let ones = col.iter().filter(|v| v.abs() > 0.5).count();
            assert_eq!(ones, 1);
            assert!((col.norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn two_by_two_hand_values() {
        // Characteristic polynomial (2-w)^2 - 1 = 0 gives w in {1, 3}.
        let a = Matrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let r = sym_eig(&a).unwrap();
        assert!((r.eigenvalues[0] - 1.0).abs() <= 1e-12);
        assert!((r.eigenvalues[1] - 3.0).abs() <= 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(sym_eig(&Matrix::zeros(2, 3)).is_err());
        let asym = Matrix::from_rows(&[&[1.0, 2.0], &[0.5, 1.0]]);
        assert!(sym_eig(&asym).is_err());
    }

    #[test]
    fn reconstruction_random_sizes() {
        let mut rng = Rng::seed_from_u64(123);
        for n in [1usize, 2, 3, 5, 8, 13, 20] {
            let mut a = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let x = rng.next_normal();
                    a.set(i, j, x);
                    a.set(j, i, x);
                }
            }
            let r = sym_eig(&a).unwrap();
            let mut diff = r.reconstruct();
            diff.add_scaled(-1.0, &a);
            assert!(
                diff.frobenius_norm() <= 1e-8 * a.frobenius_norm().max(1e-300),
                "reconstruction residual too large at n = {n}"
            );
            // Orthonormality of the eigenvector columns.
            let vtv = r.eigenvectors.transpose().matmul(&r.eigenvectors);
            let mut id_diff = vtv;
            id_diff.add_scaled(-1.0, &Matrix::identity(n));
            assert!(id_diff.frobenius_norm() <= 1e-10);
            // A v = w v per pair.
            for j in 0..n {
                let vj = r.eigenvectors.col(j);
                let mut res = a.matvec(&vj);
                res.add_scaled(-r.eigenvalues[j], &vj);
                assert!(res.norm() <= 1e-8 * a.frobenius_norm().max(1.0));
            }
        }
    }
}
