//! Dense real-matrix substrate: symmetric eigendecomposition with spectral
//! projectors, matrix exponential, rank-revealing kernels and basis
//! selection, and a small dense simplex solver with dual certificates.
//!
//! All operations are pure functions of their inputs; dimensions here are
//! desk-scale (ambient n <= 20, representation m <= 50), so everything is
//! dense and double precision throughout.

mod eig;
mod expm;
mod kernel;
mod lp;

pub use eig::{sym_eig, SpectralProjector, SymEig};
pub use expm::{expm, logm_spd, polar};
pub use kernel::{
    containment_residual, null_space, null_space_with_scale, orthonormal_span, rank_basis,
    span_contains, subspace_intersection, subspaces_equal,
};
pub use lp::{lp_max, LpProblem, LpSolution};

use crate::error::{Error, Result};

/// Dense real matrix, the carrier for all algebra and group elements.
pub type Mat = nalgebra::DMatrix<f64>;
/// Dense real column vector.
pub type Vector = nalgebra::DVector<f64>;

/// Default relative tolerance for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;
/// Tolerance for reconstruction and idempotency checks.
pub const RECONSTRUCT_TOL: f64 = 1e-10;

/// Frobenius norm shorthand.
pub fn frob(m: &Mat) -> f64 {
    m.norm()
}

/// Rejects matrices containing NaN or infinities.
pub fn check_finite(m: &Mat, what: &str) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} contains NaN or inf")))
    }
}

/// Row-major flattening of a matrix into a vector.
pub fn vec_rm(m: &Mat) -> Vector {
    let (r, c) = m.shape();
    Vector::from_fn(r * c, |k, _| m[(k / c, k % c)])
}

/// Inverse of [`vec_rm`].
pub fn mat_from_rm(rows: usize, cols: usize, v: &Vector) -> Mat {
    assert_eq!(v.len(), rows * cols, "flat length mismatch");
    Mat::from_fn(rows, cols, |i, j| v[i * cols + j])
}

/// Matrix commutator [A, B] = AB - BA.
pub fn comm(a: &Mat, b: &Mat) -> Mat {
    a * b - b * a
}

/// Solves the least-squares problem `a x = b` through the SVD pseudoinverse.
pub fn lstsq(a: &Mat, b: &Vector) -> Vector {
    let svd = a.clone().svd(true, true);
    svd.solve(&Mat::from_column_slice(b.len(), 1, b.as_slice()), 1e-13)
        .map(|m| Vector::from_column_slice(m.as_slice()))
        .unwrap_or_else(|_| Vector::zeros(a.ncols()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vec_rm_roundtrip() {
        let m = Mat::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let v = vec_rm(&m);
        assert_eq!(v.as_slice(), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(mat_from_rm(2, 3, &v), m);
    }

    #[test]
    fn finite_check_rejects_nan() {
        let mut m = Mat::zeros(2, 2);
        m[(0, 1)] = f64::NAN;
        assert!(check_finite(&m, "test").is_err());
    }
}
