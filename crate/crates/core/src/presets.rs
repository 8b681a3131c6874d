//! Built-in scenario data used across tests, benchmarks, and the bundled
//! scenario files: sl(2,R) with its diagonal torus (S1) and sl(3,R) with
//! so(3) (S2), both under the standard representation.

use crate::liealg::{LieAlgebra, Representation, Subalgebra};
use crate::numerics::{Mat, Vector};

fn e(n: usize, i: usize, j: usize) -> Mat {
    let mut m = Mat::zeros(n, n);
    m[(i, j)] = 1.0;
    m
}

/// sl(2,R) in the basis (H0, E, F) = (diag(1,-1), E12, E21).
pub fn sl2_algebra() -> LieAlgebra {
    let h0 = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    LieAlgebra::new(2, vec![h0, e(2, 0, 1), e(2, 1, 0)], 1e-9).expect("sl2 closes")
}

/// The diagonal torus span{H0} inside [`sl2_algebra`].
pub fn sl2_torus(alg: &LieAlgebra) -> Subalgebra {
    Subalgebra::new(alg, vec![Vector::from_column_slice(&[1.0, 0.0, 0.0])], 1e-9)
        .expect("torus closes")
}

/// Standard 2-dimensional representation of sl(2,R): drho is the identity
/// assignment on the basis matrices.
pub fn sl2_standard_rep() -> Representation {
    let alg = sl2_algebra();
    Representation::new(2, alg.basis().to_vec()).expect("valid rep")
}

/// Exponential-product factor lists for the S1 grid `{exp(t H0)}`,
/// t in {-1, 0, 1}; coefficients are over the torus basis.
pub fn s1_omega_specs() -> Vec<Vec<Vector>> {
    [-1.0, 0.0, 1.0]
        .iter()
        .map(|&t| vec![Vector::from_column_slice(&[t])])
        .collect()
}

/// gl(2,R) on the elementary-matrix basis (E11, E12, E21, E22).
pub fn gl2_algebra() -> LieAlgebra {
    LieAlgebra::new(2, vec![e(2, 0, 0), e(2, 0, 1), e(2, 1, 0), e(2, 1, 1)], 1e-9)
        .expect("gl2 closes")
}

/// sl(3,R) in the basis (H1, H2, E12, E13, E23, E21, E31, E32) with
/// H1 = diag(1,-1,0), H2 = diag(0,1,-1).
pub fn sl3_algebra() -> LieAlgebra {
    let h1 = Mat::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0]);
    let h2 = Mat::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0]);
    let basis = vec![
        h1,
        h2,
        e(3, 0, 1),
        e(3, 0, 2),
        e(3, 1, 2),
        e(3, 1, 0),
        e(3, 2, 0),
        e(3, 2, 1),
    ];
    LieAlgebra::new(3, basis, 1e-9).expect("sl3 closes")
}

/// so(3) inside [`sl3_algebra`], generated by the rotation generators
/// L1 = E32 - E23, L2 = E13 - E31, L3 = E21 - E12.
pub fn so3_in_sl3(alg: &LieAlgebra) -> Subalgebra {
    let l1 = Vector::from_column_slice(&[0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 1.0]);
    let l2 = Vector::from_column_slice(&[0.0, 0.0, 0.0, 1.0, 0.0, 0.0, -1.0, 0.0]);
    let l3 = Vector::from_column_slice(&[0.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    Subalgebra::new(alg, vec![l1, l2, l3], 1e-9).expect("so3 closes")
}

/// Standard 3-dimensional representation of sl(3,R).
pub fn sl3_standard_rep() -> Representation {
    let alg = sl3_algebra();
    Representation::new(3, alg.basis().to_vec()).expect("valid rep")
}

/// The 12 rotations of the tetrahedral group as exponential products over
/// the so(3) basis: the identity, three half-turns about the coordinate
/// axes, and eight third-turns about the four body diagonals. Averaging
/// over this set reproduces the isotypic projection onto scalars, which
/// keeps the evaluation functional inside the row space of the constant
/// pipeline's linear program.
pub fn s2_omega_specs() -> Vec<Vec<Vector>> {
    use std::f64::consts::PI;
    let mut specs = vec![vec![Vector::zeros(3)]];
    for axis in 0..3 {
        let mut v = Vector::zeros(3);
        v[axis] = PI;
        specs.push(vec![v]);
    }
    let third = 2.0 * PI / 3.0 / 3.0_f64.sqrt();
    for signs in [
        [1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ] {
        for orientation in [1.0, -1.0] {
            let v = Vector::from_column_slice(&[
                orientation * third * signs[0],
                orientation * third * signs[1],
                orientation * third * signs[2],
            ]);
            specs.push(vec![v]);
        }
    }
    specs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tetrahedral_rotations_are_orthogonal_and_distinct() {
        let alg = sl3_algebra();
        let h = so3_in_sl3(&alg);
        let specs = s2_omega_specs();
        assert_eq!(specs.len(), 12);
        let mats: Vec<Mat> = specs
            .iter()
            .map(|factors| {
                let mut m = Mat::identity(3, 3);
                for f in factors {
                    let mut g = Vector::zeros(alg.dim());
                    for (i, c) in h.coeffs().iter().enumerate() {
                        g += c * f[i];
                    }
                    m *= crate::numerics::expm(&alg.element(&g));
                }
                m
            })
            .collect();
        for m in &mats {
            assert!((m.transpose() * m - Mat::identity(3, 3)).norm() < 1e-12);
            assert!((m.determinant() - 1.0).abs() < 1e-12);
        }
        for (i, a) in mats.iter().enumerate() {
            for b in mats.iter().skip(i + 1) {
                assert!((a - b).norm() > 0.5, "rotations must be distinct");
            }
        }
        // closure under multiplication: each product is again in the list
        for a in &mats {
            for b in &mats {
                let p = a * b;
                assert!(
                    mats.iter().any(|m| (&p - m).norm() < 1e-10),
                    "products stay in the set"
                );
            }
        }
    }
}
