//! The Cartan involution realized as negative transpose in the working
//! basis, the positive form it induces, the fixed/anti-fixed splitting, and
//! the adapted Euclidean structure on a representation space.

use crate::error::{Error, Result};
use crate::liealg::{killing_form, BilinearForm, FormKind, LieAlgebra, Representation, Subalgebra};
use crate::numerics::{containment_residual, null_space, orthonormal_span, sym_eig, vec_rm, Mat, Vector};

/// The involution `X -> -X^T` on a transpose-stable algebra, together with
/// the Killing form, its positive companion, and the eigenspace splitting.
#[derive(Debug, Clone)]
pub struct CartanStructure {
    /// Matrix of the involution on algebra coordinates.
    pub theta: Mat,
    /// Killing form of the algebra.
    pub killing: BilinearForm,
    /// The positive-definite form `(X, Y) -> -B(X, theta Y)`.
    pub b_theta: BilinearForm,
    /// Fixed space of the involution (antisymmetric matrices in the span).
    pub k: Subalgebra,
    /// The opposite eigenspace (symmetric matrices in the span), which is
    /// also the Killing-orthocomplement of `k`.
    pub k_perp: Vec<Vector>,
}

impl CartanStructure {
    /// Applies the involution to a coordinate vector.
    pub fn apply(&self, coords: &Vector) -> Vector {
        &self.theta * coords
    }
}

/// Builds the standard Cartan structure for a transpose-stable algebra.
///
/// Fails with `NotTransposeClosed` when some `-X_i^T` leaves the span, and
/// with `NotPositiveDefinite` when the induced form is not positive (the
/// presentation is then not compatible with this involution).
pub fn standard_theta(alg: &LieAlgebra) -> Result<CartanStructure> {
    let d = alg.dim();
    let tol = crate::numerics::DEFAULT_RANK_TOL;
    let mut theta = Mat::zeros(d, d);
    for i in 0..d {
        let neg_t = -alg.basis()[i].transpose();
        let (coords, residual) = alg.coords_with_residual(&neg_t);
        if residual > tol * alg.basis()[i].norm().max(1.0) {
            return Err(Error::NotTransposeClosed { residual });
        }
        theta.set_column(i, &coords);
    }

    let inv_residual = (&theta * &theta - Mat::identity(d, d)).norm();
    if inv_residual > 1e-10 * (d as f64) {
        return Err(Error::Numerical(format!(
            "involution square deviates from identity by {inv_residual:.3e}"
        )));
    }

    let killing = killing_form(alg);
    let b_theta_gram = -&killing.gram * &theta;
    let b_theta_gram = (&b_theta_gram + b_theta_gram.transpose()) * 0.5;
    let eig = sym_eig(&b_theta_gram, 1e-12)?;
    if eig.eigenvalues[0] <= 1e-9 * eig.eigenvalues[eig.eigenvalues.len() - 1].abs().max(1.0) {
        return Err(Error::NotPositiveDefinite {
            min_eig: eig.eigenvalues[0],
        });
    }
    let b_theta = BilinearForm {
        gram: b_theta_gram,
        kind: FormKind::BTheta,
    };

    // The eigenspace extractions need an absolute floor: theta -+ I can be
    // pure roundoff when one eigenspace fills the algebra.
    let fixed = crate::numerics::null_space_with_scale(&(&theta - Mat::identity(d, d)), tol, 1.0);
    let anti = crate::numerics::null_space_with_scale(&(&theta + Mat::identity(d, d)), tol, 1.0);
    let k_coeffs: Vec<Vector> = (0..fixed.ncols())
        .map(|j| fixed.column(j).into_owned())
        .collect();
    let k_perp: Vec<Vector> = (0..anti.ncols())
        .map(|j| anti.column(j).into_owned())
        .collect();
    if k_coeffs.len() + k_perp.len() != d {
        return Err(Error::Numerical(format!(
            "eigenspace split {} + {} does not cover dimension {d}",
            k_coeffs.len(),
            k_perp.len()
        )));
    }
    let k = Subalgebra::new(alg, k_coeffs, tol)?;

    Ok(CartanStructure {
        theta,
        killing,
        b_theta,
        k,
        k_perp,
    })
}

/// True when the involution maps the span of `sub` into itself within `tol`.
pub fn is_theta_stable(cs: &CartanStructure, sub: &Subalgebra, tol: f64) -> bool {
    theta_stability_residual(cs, sub.coeffs()) <= tol * 1e3
}

/// Largest residual of `theta(v)` against the span, over the basis of the
/// subspace.
pub fn theta_stability_residual(cs: &CartanStructure, coeffs: &[Vector]) -> f64 {
    if coeffs.is_empty() {
        return 0.0;
    }
    let span = orthonormal_span(coeffs, 1e-12);
    coeffs
        .iter()
        .map(|v| containment_residual(&span, &(cs.apply(v))))
        .fold(0.0, f64::max)
}

/// A positive-definite inner product `Q` on the representation space whose
/// adjunction extends the negative of the involution along `drho`.
#[derive(Debug, Clone)]
pub struct AdaptedInnerProduct {
    /// The Gram matrix, normalized to `Tr(Q) = dim V` by the solver.
    pub q: Mat,
    chol_l: Mat,
    chol_l_inv: Mat,
}

impl AdaptedInnerProduct {
    /// Wraps an explicit positive-definite Gram matrix.
    pub fn from_gram(q: Mat) -> Result<Self> {
        let chol = nalgebra::Cholesky::new(q.clone())
            .ok_or(Error::NotPositiveDefinite { min_eig: f64::NAN })?;
        let l = chol.l();
        let l_inv = l
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("cholesky factor not invertible".into()))?;
        Ok(AdaptedInnerProduct {
            q,
            chol_l: l,
            chol_l_inv: l_inv,
        })
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn inner(&self, a: &Vector, b: &Vector) -> f64 {
        (a.transpose() * &self.q * b)[(0, 0)]
    }

    pub fn norm(&self, v: &Vector) -> f64 {
        self.inner(v, v).max(0.0).sqrt()
    }

    /// Operator norm of `a` with respect to this inner product: the largest
    /// singular value after whitening by the Cholesky factor.
    pub fn op_norm(&self, a: &Mat) -> f64 {
        let w = self.chol_l.transpose() * a * self.chol_l_inv.transpose();
        w.svd(false, false)
            .singular_values
            .iter()
            .cloned()
            .fold(0.0, f64::max)
    }

    /// Adjoint of `a` with respect to `Q`: `Q^{-1} a^T Q`.
    pub fn adjoint(&self, a: &Mat) -> Mat {
        let qat = a.transpose() * &self.q;
        let linv_t = self.chol_l_inv.transpose();
        // Q^{-1} = L^{-T} L^{-1}
        &linv_t * (&self.chol_l_inv * qat)
    }

    /// `||a - adj(a)|| / (1 + ||a||)`: zero for Q-self-adjoint operators.
    pub fn self_adjoint_residual(&self, a: &Mat) -> f64 {
        (a - self.adjoint(a)).norm() / (1.0 + a.norm())
    }

    /// `||a + adj(a)|| / (1 + ||a||)`: zero for Q-antisymmetric operators.
    pub fn anti_adjoint_residual(&self, a: &Mat) -> f64 {
        (a + self.adjoint(a)).norm() / (1.0 + a.norm())
    }

    /// The involution `A -> -adj(A)` on `gl(V)` extending the algebra-level
    /// involution through the representation.
    pub fn theta_v(&self, a: &Mat) -> Mat {
        -self.adjoint(a)
    }

    /// Eigenvalues of a Q-self-adjoint operator, ascending: the spectrum of
    /// the whitened symmetrization.
    pub fn self_adjoint_eigenvalues(&self, a: &Mat, tol: f64) -> Result<Vector> {
        let w = self.chol_l.transpose() * a * self.chol_l_inv.transpose();
        let asym = (&w - w.transpose()).norm();
        if asym > 1e-8 * (1.0 + w.norm()) {
            return Err(Error::NonSymmetric {
                asymmetry: asym,
                tol: 1e-8 * (1.0 + w.norm()),
            });
        }
        let sym = (&w + w.transpose()) * 0.5;
        Ok(sym_eig(&sym, tol)?.eigenvalues)
    }
}

/// Solves for the adapted inner product: the symmetric solutions `Q` of
/// `Q drho(theta X) + drho(X)^T Q = 0` over the basis, requiring a unique
/// positive-definite ray, normalized to `Tr(Q) = dim V`. A solution space
/// of dimension other than one is reported as `NoSolution` rather than
/// resolved by guessing.
pub fn adapt_inner_product(
    alg: &LieAlgebra,
    cs: &CartanStructure,
    rep: &Representation,
) -> Result<AdaptedInnerProduct> {
    let m = rep.dim_v();
    if m == 0 {
        return Err(Error::ZeroRep);
    }
    let d = alg.dim();
    let sym_dim = m * (m + 1) / 2;
    let mut pairs = Vec::with_capacity(sym_dim);
    for i in 0..m {
        for j in i..m {
            pairs.push((i, j));
        }
    }
    let sym_basis: Vec<Mat> = pairs
        .iter()
        .map(|&(i, j)| {
            let mut s = Mat::zeros(m, m);
            if i == j {
                s[(i, i)] = 1.0;
            } else {
                s[(i, j)] = 1.0;
                s[(j, i)] = 1.0;
            }
            s
        })
        .collect();

    let mut constraints = Mat::zeros(d * m * m, sym_dim);
    for l in 0..d {
        let a = &rep.drho()[l];
        let mut unit = Vector::zeros(d);
        unit[l] = 1.0;
        let b = rep.apply(&cs.apply(&unit));
        for (col, s) in sym_basis.iter().enumerate() {
            let block = s * &b + a.transpose() * s;
            constraints
                .view_mut((l * m * m, col), (m * m, 1))
                .copy_from(&vec_rm(&block));
        }
    }

    let kernel = null_space(&constraints, crate::numerics::DEFAULT_RANK_TOL);
    match kernel.ncols() {
        0 => Err(Error::NoSolution {
            reason: "adjunction system has no symmetric solution".into(),
        }),
        1 => {
            let coeffs = kernel.column(0);
            let mut q = Mat::zeros(m, m);
            for (idx, s) in sym_basis.iter().enumerate() {
                q += s * coeffs[idx];
            }
            if q.trace() < 0.0 {
                q = -q;
            }
            let eig = sym_eig(&q, 1e-12)?;
            let max = eig.eigenvalues[m - 1];
            if eig.eigenvalues[0] <= 1e-9 * max.abs().max(1.0) {
                return Err(Error::NoSolution {
                    reason: format!(
                        "solution ray is not definite (spectrum [{:.3e}, {:.3e}])",
                        eig.eigenvalues[0], max
                    ),
                });
            }
            q *= m as f64 / q.trace();
            AdaptedInnerProduct::from_gram(q)
        }
        s => Err(Error::NoSolution {
            reason: format!("solution space is {s}-dimensional, adapted structure ambiguous"),
        }),
    }
}

/// Largest residual of the adjunction identity
/// `Q drho(theta X) + drho(X)^T Q = 0` over the algebra basis.
pub fn adjunction_residual(
    alg: &LieAlgebra,
    cs: &CartanStructure,
    rep: &Representation,
    q: &AdaptedInnerProduct,
) -> f64 {
    let d = alg.dim();
    let mut worst = 0.0_f64;
    for l in 0..d {
        let a = &rep.drho()[l];
        let mut unit = Vector::zeros(d);
        unit[l] = 1.0;
        let b = rep.apply(&cs.apply(&unit));
        let r = &q.q * b + a.transpose() * &q.q;
        worst = worst.max(r.norm() / (1.0 + a.norm()));
    }
    worst
}

/// Orthocomplement of a coordinate subspace with respect to a bilinear
/// form: the kernel of the stacked functionals `v -> form(basis_i, v)`.
pub fn form_orthocomplement(
    form: &BilinearForm,
    coeffs: &[Vector],
    dim: usize,
) -> Vec<Vector> {
    if coeffs.is_empty() {
        return (0..dim)
            .map(|i| {
                let mut v = Vector::zeros(dim);
                v[i] = 1.0;
                v
            })
            .collect();
    }
    let mut rows = Mat::zeros(coeffs.len(), dim);
    for (i, c) in coeffs.iter().enumerate() {
        let functional = form.gram.transpose() * c;
        rows.set_row(i, &functional.transpose());
    }
    let kernel = null_space(&rows, crate::numerics::DEFAULT_RANK_TOL);
    (0..kernel.ncols())
        .map(|j| kernel.column(j).into_owned())
        .collect()
}

/// Checks that the orthocomplements with respect to the Killing form and
/// with respect to the positive form agree as subspaces.
pub fn orthocomplements_agree(
    cs: &CartanStructure,
    coeffs: &[Vector],
    dim: usize,
    tol: f64,
) -> bool {
    let ob = form_orthocomplement(&cs.killing, coeffs, dim);
    let obt = form_orthocomplement(&cs.b_theta, coeffs, dim);
    crate::numerics::subspaces_equal(&ob, &obt, tol)
}

/// Residual of `theta` restricted to a stable subalgebra being again an
/// involutive automorphism.
pub fn restricted_involution_residual(
    alg: &LieAlgebra,
    cs: &CartanStructure,
    sub: &Subalgebra,
) -> f64 {
    let mut worst = theta_stability_residual(cs, sub.coeffs());
    for a in sub.coeffs() {
        let ta = cs.apply(a);
        let back = cs.apply(&ta);
        worst = worst.max((&back - a).norm() / (1.0 + a.norm()));
        for b in sub.coeffs() {
            let tb = cs.apply(b);
            let lhs = cs.apply(&(alg.ad_of(a) * b));
            let rhs = alg.ad_of(&ta) * tb;
            worst = worst.max((lhs - rhs).norm() / (1.0 + (alg.ad_of(a) * b).norm()));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::adjoint_rep;
    use crate::presets;

    #[test]
    fn sl2_split_into_rotations_and_symmetric_part() {
        let alg = presets::sl2_algebra();
        let cs = standard_theta(&alg).unwrap();
        assert_eq!(cs.k.dim(), 1);
        assert_eq!(cs.k_perp.len(), 2);
        // k realizes antisymmetric matrices: span{E - F}
        let km = cs.k.matrices(&alg)[0].clone();
        assert!((km.clone() + km.transpose()).norm() < 1e-10);
        // k_perp realizes symmetric matrices
        for c in &cs.k_perp {
            let m = alg.element(c);
            assert!((m.clone() - m.transpose()).norm() < 1e-10);
        }
    }

    #[test]
    fn so3_is_entirely_fixed() {
        // so(3) as its own algebra: all antisymmetric, theta = id
        let alg3 = presets::sl3_algebra();
        let so3 = presets::so3_in_sl3(&alg3);
        let basis = so3.matrices(&alg3);
        let alg = LieAlgebra::new(3, basis, 1e-9).unwrap();
        let cs = standard_theta(&alg).unwrap();
        assert_eq!(cs.k.dim(), 3);
        assert!(cs.k_perp.is_empty());
        assert!((cs.theta.clone() - Mat::identity(3, 3)).norm() < 1e-10);
    }

    #[test]
    fn sl2_b_theta_gram() {
        // theta H0 = -H0, theta E = -F: B_theta = diag(8, 4, 4)
        let alg = presets::sl2_algebra();
        let cs = standard_theta(&alg).unwrap();
        let expect = Mat::from_row_slice(3, 3, &[8.0, 0.0, 0.0, 0.0, 4.0, 0.0, 0.0, 0.0, 4.0]);
        assert!((cs.b_theta.gram.clone() - expect).norm() < 1e-10);
    }

    #[test]
    fn theta_stability_of_subspaces() {
        let alg = presets::sl2_algebra();
        let cs = standard_theta(&alg).unwrap();
        let torus = presets::sl2_torus(&alg);
        assert!(is_theta_stable(&cs, &torus, 1e-9));
        // span{E12} is not stable: theta E12 = -E21
        let e12 =
            Subalgebra::new(&alg, vec![Vector::from_column_slice(&[0.0, 1.0, 0.0])], 1e-9).unwrap();
        assert!(!is_theta_stable(&cs, &e12, 1e-9));
        // so(3) in sl(3) is stable
        let alg3 = presets::sl3_algebra();
        let cs3 = standard_theta(&alg3).unwrap();
        let so3 = presets::so3_in_sl3(&alg3);
        assert!(is_theta_stable(&cs3, &so3, 1e-9));
    }

    #[test]
    fn adapted_product_for_standard_rep_is_identity() {
        let alg = presets::sl2_algebra();
        let cs = standard_theta(&alg).unwrap();
        let rep = presets::sl2_standard_rep();
        let q = adapt_inner_product(&alg, &cs, &rep).unwrap();
        assert!((q.q.clone() - Mat::identity(2, 2)).norm() < 1e-9);
        assert!(adjunction_residual(&alg, &cs, &rep, &q) < 1e-9);
    }

    #[test]
    fn conjugated_rep_yields_inverse_gram() {
        // drho' = A drho A^{-1} has adapted product (A A^T)^{-1} up to scale
        let alg = presets::sl2_algebra();
        let cs = standard_theta(&alg).unwrap();
        let a = Mat::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 1.0]);
        let a_inv = a.clone().try_inverse().unwrap();
        let drho: Vec<Mat> = presets::sl2_standard_rep()
            .drho()
            .iter()
            .map(|x| &a * x * &a_inv)
            .collect();
        let rep = Representation::new(2, drho).unwrap();
        let q = adapt_inner_product(&alg, &cs, &rep).unwrap();
        let mut expect = (&a * a.transpose()).try_inverse().unwrap();
        expect *= 2.0 / expect.trace();
        assert!((q.q.clone() - expect).norm() < 1e-9);
        assert!(adjunction_residual(&alg, &cs, &rep, &q) < 1e-9);
    }

    #[test]
    fn adjoint_rep_adapted_product_is_b_theta() {
        let alg = presets::sl2_algebra();
        let cs = standard_theta(&alg).unwrap();
        let rep = adjoint_rep(&alg);
        let q = adapt_inner_product(&alg, &cs, &rep).unwrap();
        let mut expect = cs.b_theta.gram.clone();
        expect *= 3.0 / expect.trace();
        assert!((q.q.clone() - expect).norm() < 1e-9);
    }

    #[test]
    fn k_maps_to_antisymmetric_kperp_to_symmetric() {
        for (alg, rep) in [
            (presets::sl2_algebra(), presets::sl2_standard_rep()),
            (presets::sl3_algebra(), presets::sl3_standard_rep()),
        ] {
            let cs = standard_theta(&alg).unwrap();
            let q = adapt_inner_product(&alg, &cs, &rep).unwrap();
            for c in cs.k.coeffs() {
                assert!(q.anti_adjoint_residual(&rep.apply(c)) < 1e-8);
            }
            for c in &cs.k_perp {
                assert!(q.self_adjoint_residual(&rep.apply(c)) < 1e-8);
            }
        }
    }

    #[test]
    fn orthocomplements_of_stable_subspaces_coincide() {
        let alg = presets::sl2_algebra();
        let cs = standard_theta(&alg).unwrap();
        let torus = presets::sl2_torus(&alg);
        assert!(orthocomplements_agree(&cs, torus.coeffs(), alg.dim(), 1e-9));
        assert!(orthocomplements_agree(&cs, cs.k.coeffs(), alg.dim(), 1e-9));
    }

    #[test]
    fn theta_restricts_to_involutive_automorphism() {
        let alg = presets::sl2_algebra();
        let cs = standard_theta(&alg).unwrap();
        let torus = presets::sl2_torus(&alg);
        assert!(restricted_involution_residual(&alg, &cs, &torus) < 1e-9);
    }

    #[test]
    fn non_transpose_stable_span_is_rejected() {
        // the borel span{H0, E12} is closed but not transpose-stable
        let basis = vec![
            Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]),
            Mat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]),
        ];
        let alg = LieAlgebra::new(2, basis, 1e-9).unwrap();
        assert!(matches!(
            standard_theta(&alg),
            Err(Error::NotTransposeClosed { .. })
        ));
    }

    #[test]
    fn op_norm_matches_euclidean_case() {
        let q = AdaptedInnerProduct::from_gram(Mat::identity(2, 2)).unwrap();
        let a = Mat::from_row_slice(2, 2, &[std::f64::consts::E, 0.0, 0.0, 0.1]);
        assert!((q.op_norm(&a) - std::f64::consts::E).abs() < 1e-12);
    }
}
