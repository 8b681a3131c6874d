//! Matrix exponential, principal logarithm of SPD matrices, and polar
//! decomposition.

use super::{sym_eig, Mat};
use crate::error::{Error, Result};

/// Matrix exponential by scaling-and-squaring with Pade approximants.
///
/// Total on finite square input; `expm(0) = I` exactly.
pub fn expm(x: &Mat) -> Mat {
    assert!(x.nrows() == x.ncols(), "square input required");
    x.exp()
}

/// Principal logarithm of a symmetric positive-definite matrix.
pub fn logm_spd(s: &Mat, tol: f64) -> Result<Mat> {
    let e = sym_eig(s, tol.max(1e-8))?;
    let min = e.eigenvalues[0];
    if min <= 0.0 {
        return Err(Error::NotPositiveDefinite { min_eig: min });
    }
    Ok(e.map(f64::ln))
}

/// Polar decomposition `m = u * s` with `u` orthogonal and `s` symmetric
/// positive semi-definite, computed from the SVD.
pub fn polar(m: &Mat) -> (Mat, Mat) {
    assert!(m.nrows() == m.ncols(), "square input required");
    let svd = m.clone().svd(true, true);
    let u = svd.u.as_ref().expect("svd with u");
    let vt = svd.v_t.as_ref().expect("svd with v_t");
    let orth = u * vt;
    let mut sigma = Mat::zeros(m.nrows(), m.ncols());
    for i in 0..svd.singular_values.len() {
        sigma[(i, i)] = svd.singular_values[i];
    }
    let spd = vt.transpose() * sigma * vt;
    (orth, spd)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_zero_is_identity() {
        let e = expm(&Mat::zeros(3, 3));
        assert_eq!(e, Mat::identity(3, 3));
    }

    #[test]
    fn symmetric_off_diagonal_generator() {
        // exp(s (E12 + E21)) = [[cosh s, sinh s], [sinh s, cosh s]]
        for &s in &[0.3, -1.1, 2.0] {
            let x = Mat::from_row_slice(2, 2, &[0.0, s, s, 0.0]);
            let e = expm(&x);
            assert!((e[(0, 0)] - s.cosh()).abs() < 1e-13 * s.cosh());
            assert!((e[(0, 1)] - s.sinh()).abs() < 1e-13 * s.cosh());
            assert!((e[(1, 0)] - s.sinh()).abs() < 1e-13 * s.cosh());
            assert!((e[(1, 1)] - s.cosh()).abs() < 1e-13 * s.cosh());
        }
    }

    #[test]
    fn nilpotent_of_order_two_is_exact() {
        let x = Mat::from_row_slice(2, 2, &[0.0, 3.5, 0.0, 0.0]);
        let e = expm(&x);
        assert!((e - (Mat::identity(2, 2) + &x)).norm() < 1e-15);
    }

    #[test]
    fn diagonal_case() {
        let a = 0.7;
        let x = Mat::from_row_slice(2, 2, &[a, 0.0, 0.0, -a]);
        let e = expm(&x);
        assert!((e[(0, 0)] - a.exp()).abs() < 1e-14);
        assert!((e[(1, 1)] - (-a).exp()).abs() < 1e-14);
        assert!(e[(0, 1)].abs() < 1e-15 && e[(1, 0)].abs() < 1e-15);
    }

    #[test]
    fn log_inverts_exp_on_spd() {
        let x = Mat::from_row_slice(2, 2, &[0.4, 0.1, 0.1, -0.2]);
        let s = expm(&x);
        let back = logm_spd(&s, 1e-12).unwrap();
        assert!((back - x).norm() < 1e-10);
    }

    #[test]
    fn polar_factors_of_a_sheared_rotation() {
        let m = Mat::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        let (u, s) = polar(&m);
        assert!((u.transpose() * &u - Mat::identity(2, 2)).norm() < 1e-12);
        assert!((&u * &s - m).norm() < 1e-12);
        assert!((s.clone() - s.transpose()).norm() < 1e-12);
    }
}
