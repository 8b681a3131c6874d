//! Symmetric eigendecomposition with merged spectral projectors.

use super::{frob, Mat, Vector};
use crate::error::{Error, Result};

/// One spectral projector `pi_lambda` of a symmetric matrix, covering a
/// cluster of nearly equal eigenvalues.
#[derive(Debug, Clone)]
pub struct SpectralProjector {
    /// Representative eigenvalue (mean of the merged cluster).
    pub value: f64,
    /// Rank of the projector (cluster multiplicity).
    pub rank: usize,
    /// The projector matrix, symmetric and idempotent.
    pub projector: Mat,
}

/// Eigendecomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEig {
    /// All eigenvalues in ascending order (not deduplicated).
    pub eigenvalues: Vector,
    /// Orthonormal eigenvectors, column i pairs with eigenvalue i.
    pub eigenvectors: Mat,
    /// Spectral projectors after merging near-degenerate clusters.
    pub projectors: Vec<SpectralProjector>,
}

impl SymEig {
    /// Reconstructs `sum_lambda lambda * pi_lambda`.
    pub fn reconstruct(&self) -> Mat {
        let n = self.eigenvectors.nrows();
        let mut s = Mat::zeros(n, n);
        for p in &self.projectors {
            s += &p.projector * p.value;
        }
        s
    }

    /// Applies an analytic function through the spectral decomposition.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Mat {
        let n = self.eigenvectors.nrows();
        let mut s = Mat::zeros(n, n);
        for p in &self.projectors {
            s += &p.projector * f(p.value);
        }
        s
    }
}

/// Eigendecomposition of a symmetric matrix, merging eigenvalue clusters
/// whose gap is below `tol * scale` into a single projector.
///
/// Fails with `NonSymmetric` when the asymmetry exceeds `tol * ||s||_F`.
pub fn sym_eig(s: &Mat, tol: f64) -> Result<SymEig> {
    assert!(s.nrows() == s.ncols() && s.nrows() > 0, "square input required");
    let asym = frob(&(s - s.transpose()));
    let scale_in = frob(s).max(1.0);
    if asym > tol * scale_in {
        return Err(Error::NonSymmetric {
            asymmetry: asym,
            tol: tol * scale_in,
        });
    }
    let sym = (s + s.transpose()) * 0.5;
    let n = sym.nrows();
    let decomp = nalgebra::SymmetricEigen::new(sym);

    // nalgebra does not order the spectrum; sort ascending.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| decomp.eigenvalues[a].total_cmp(&decomp.eigenvalues[b]));
    let eigenvalues = Vector::from_fn(n, |i, _| decomp.eigenvalues[order[i]]);
    let mut eigenvectors = Mat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &decomp.eigenvectors.column(src));
    }

    let scale = eigenvalues.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    let mut projectors = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eigenvalues[end] - eigenvalues[end - 1] < tol * scale {
            end += 1;
        }
        let block = eigenvectors.columns(start, end - start);
        let projector = block * block.transpose();
        let value = eigenvalues.rows(start, end - start).mean();
        projectors.push(SpectralProjector {
            value,
            rank: end - start,
            projector,
        });
        start = end;
    }

    Ok(SymEig {
        eigenvalues,
        eigenvectors,
        projectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_two_by_two() {
        let s = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let e = sym_eig(&s, 1e-9).unwrap();
        assert_eq!(e.eigenvalues.as_slice(), &[-1.0, 1.0]);
        assert_eq!(e.projectors.len(), 2);
        // ascending: first projector is E22, second E11
        assert!((e.projectors[0].projector[(1, 1)] - 1.0).abs() < 1e-12);
        assert!((e.projectors[1].projector[(0, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix_merges_to_identity() {
        let s = Mat::zeros(3, 3);
        let e = sym_eig(&s, 1e-9).unwrap();
        assert_eq!(e.projectors.len(), 1);
        assert_eq!(e.projectors[0].rank, 3);
        assert!((e.projectors[0].projector.clone() - Mat::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn hand_solved_characteristic_polynomial() {
        // [[2,1],[1,2]]: det(S - x I) = (2-x)^2 - 1 = 0, so x = 1, 3
        // with eigenvectors (1,-1)/sqrt(2) and (1,1)/sqrt(2).
        let s = Mat::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let e = sym_eig(&s, 1e-9).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((e.eigenvalues[1] - 3.0).abs() < 1e-12);
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        for (col, expect) in [(0, [inv_sqrt2, -inv_sqrt2]), (1, [inv_sqrt2, inv_sqrt2])] {
            let v = e.eigenvectors.column(col);
            let aligned = if v[0] * expect[0] >= 0.0 { 1.0 } else { -1.0 };
            assert!((v[0] * aligned - expect[0]).abs() < 1e-12);
            assert!((v[1] * aligned - expect[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        let s = Mat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(sym_eig(&s, 1e-9), Err(Error::NonSymmetric { .. })));
    }

    #[test]
    fn near_degenerate_cluster_is_merged() {
        let s = Mat::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0 + 1e-13, 0.0, 0.0, 0.0, 5.0]);
        let e = sym_eig(&s, 1e-9).unwrap();
        assert_eq!(e.projectors.len(), 2);
        assert_eq!(e.projectors[0].rank, 2);
    }
}
