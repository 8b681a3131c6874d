//! Real matrix Lie algebras presented by explicit bases: brackets,
//! structure constants, adjoint representations, Killing and trace forms,
//! centers, derived algebras, and the reductive splitting through the
//! center.

use crate::error::{Error, Result};
use crate::numerics::{
    check_finite, comm, null_space, orthonormal_span, rank_basis, span_contains, vec_rm, Mat,
    Vector,
};

/// A real matrix Lie algebra given by a basis of `n x n` matrices with
/// verified bracket closure.
#[derive(Debug, Clone)]
pub struct LieAlgebra {
    ambient_dim: usize,
    basis: Vec<Mat>,
    /// `ad(X_i)` in basis coordinates: entry (k, j) is the structure
    /// constant c_{ij}^k of [X_i, X_j] = sum_k c_{ij}^k X_k.
    ad_mats: Vec<Mat>,
    /// Column j holds the row-major flattening of basis matrix j.
    basis_cols: Mat,
    /// Pseudoinverse of `basis_cols`, for coordinate solves.
    coord_pinv: Mat,
}

impl LieAlgebra {
    /// Builds and validates the algebra: finite entries, linear
    /// independence, bracket closure, antisymmetric structure constants.
    pub fn new(ambient_dim: usize, basis: Vec<Mat>, tol: f64) -> Result<Self> {
        if ambient_dim == 0 || basis.is_empty() {
            return Err(Error::InvalidInput("empty algebra presentation".into()));
        }
        let n = ambient_dim;
        let d = basis.len();
        for (i, x) in basis.iter().enumerate() {
            if x.shape() != (n, n) {
                return Err(Error::DimensionMismatch(format!(
                    "basis matrix {i} is {}x{}, ambient is {n}",
                    x.nrows(),
                    x.ncols()
                )));
            }
            check_finite(x, &format!("basis matrix {i}"))?;
        }

        let flats: Vec<Vector> = basis.iter().map(vec_rm).collect();
        let (rank, _) = rank_basis(&flats, tol);
        if rank < d {
            return Err(Error::DependentBasis { rank, expected: d });
        }
        let mut basis_cols = Mat::zeros(n * n, d);
        for (j, f) in flats.iter().enumerate() {
            basis_cols.set_column(j, f);
        }
        let coord_pinv = basis_cols
            .clone()
            .svd(true, true)
            .pseudo_inverse(1e-13)
            .map_err(|e| Error::Numerical(format!("basis pseudoinverse: {e}")))?;

        let mut alg = LieAlgebra {
            ambient_dim,
            basis,
            ad_mats: Vec::new(),
            basis_cols,
            coord_pinv,
        };

        // Closure: every bracket must resolve in the span.
        let scale = alg.basis.iter().map(|m| m.norm()).fold(1.0_f64, f64::max);
        let mut ad_mats = vec![Mat::zeros(d, d); d];
        for (i, ad_i) in ad_mats.iter_mut().enumerate() {
            for j in 0..d {
                let br = comm(&alg.basis[i], &alg.basis[j]);
                let (coords, residual) = alg.coords_with_residual(&br);
                if residual > tol * scale * scale {
                    return Err(Error::BracketNotClosed { i, j, residual });
                }
                ad_i.set_column(j, &coords);
            }
        }
        // Antisymmetry in the first two indices, then make it exact.
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let a = ad_mats[i][(k, j)];
                    let b = ad_mats[j][(k, i)];
                    if (a + b).abs() > 1e-10 * scale.powi(2).max(1.0) {
                        return Err(Error::Numerical(format!(
                            "structure constants not antisymmetric at ({i},{j},{k}): {}",
                            a + b
                        )));
                    }
                }
            }
        }
        for i in 0..d {
            for j in 0..i {
                for k in 0..d {
                    let avg = 0.5 * (ad_mats[i][(k, j)] - ad_mats[j][(k, i)]);
                    ad_mats[i][(k, j)] = avg;
                    ad_mats[j][(k, i)] = -avg;
                }
            }
            for k in 0..d {
                ad_mats[i][(k, i)] = 0.0;
            }
        }
        alg.ad_mats = ad_mats;
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn basis(&self) -> &[Mat] {
        &self.basis
    }

    /// `ad(X_i)` as a matrix on basis coordinates.
    pub fn ad_matrix(&self, i: usize) -> &Mat {
        &self.ad_mats[i]
    }

    /// `ad` of an arbitrary element given by coordinates.
    pub fn ad_of(&self, coords: &Vector) -> Mat {
        let d = self.dim();
        let mut m = Mat::zeros(d, d);
        for (i, ad) in self.ad_mats.iter().enumerate() {
            m += ad * coords[i];
        }
        m
    }

    /// Ambient matrix of the element with the given coordinates.
    pub fn element(&self, coords: &Vector) -> Mat {
        assert_eq!(coords.len(), self.dim(), "coordinate length");
        let n = self.ambient_dim;
        let mut m = Mat::zeros(n, n);
        for (i, x) in self.basis.iter().enumerate() {
            m += x * coords[i];
        }
        m
    }

    /// Coordinates of an ambient matrix together with the out-of-span
    /// residual.
    pub fn coords_with_residual(&self, m: &Mat) -> (Vector, f64) {
        let flat = vec_rm(m);
        let coords = &self.coord_pinv * &flat;
        let residual = (&self.basis_cols * &coords - flat).norm();
        (coords, residual)
    }

    /// Coordinates of an ambient matrix known to lie in the span.
    pub fn coords_of(&self, m: &Mat, tol: f64) -> Result<Vector> {
        let (coords, residual) = self.coords_with_residual(m);
        if residual > tol * m.norm().max(1.0) {
            return Err(Error::MembershipViolation { residual });
        }
        Ok(coords)
    }

    /// Largest Jacobi identity residual over all basis triples, measured in
    /// the ambient matrix space.
    pub fn jacobi_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let s = comm(&comm(&self.basis[i], &self.basis[j]), &self.basis[k])
                        + comm(&comm(&self.basis[j], &self.basis[k]), &self.basis[i])
                        + comm(&comm(&self.basis[k], &self.basis[i]), &self.basis[j]);
                    worst = worst.max(s.norm());
                }
            }
        }
        worst
    }
}

/// A subalgebra (or plain subspace) of a [`LieAlgebra`], held as coefficient
/// vectors over the parent basis.
#[derive(Debug, Clone)]
pub struct Subalgebra {
    coeffs: Vec<Vector>,
}

impl Subalgebra {
    /// Validated construction: independence and bracket closure within the
    /// span (at tolerance).
    pub fn new(alg: &LieAlgebra, coeffs: Vec<Vector>, tol: f64) -> Result<Self> {
        for c in &coeffs {
            if c.len() != alg.dim() {
                return Err(Error::DimensionMismatch(format!(
                    "subalgebra coefficient length {} against algebra dim {}",
                    c.len(),
                    alg.dim()
                )));
            }
        }
        let (rank, _) = rank_basis(&coeffs, tol);
        if rank < coeffs.len() {
            return Err(Error::DependentBasis {
                rank,
                expected: coeffs.len(),
            });
        }
        let sub = Subalgebra { coeffs };
        let residual = sub.closure_residual(alg);
        if residual > tol * 1e3 {
            return Err(Error::BracketNotClosed {
                i: 0,
                j: 0,
                residual,
            });
        }
        Ok(sub)
    }

    /// Subspace constructor without the closure requirement.
    pub fn subspace(alg: &LieAlgebra, coeffs: Vec<Vector>, tol: f64) -> Result<Self> {
        let (rank, _) = rank_basis(&coeffs, tol);
        if rank < coeffs.len() {
            return Err(Error::DependentBasis {
                rank,
                expected: coeffs.len(),
            });
        }
        for c in &coeffs {
            if c.len() != alg.dim() {
                return Err(Error::DimensionMismatch("coefficient length".into()));
            }
        }
        Ok(Subalgebra { coeffs })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Vector] {
        &self.coeffs
    }

    /// Ambient realizations of the basis members.
    pub fn matrices(&self, alg: &LieAlgebra) -> Vec<Mat> {
        self.coeffs.iter().map(|c| alg.element(c)).collect()
    }

    /// Largest residual of a pairwise bracket against the span.
    pub fn closure_residual(&self, alg: &LieAlgebra) -> f64 {
        if self.coeffs.is_empty() {
            return 0.0;
        }
        let span = orthonormal_span(&self.coeffs, 1e-12);
        let mut worst = 0.0_f64;
        for (i, a) in self.coeffs.iter().enumerate() {
            for b in self.coeffs.iter().skip(i + 1) {
                let bracket = alg.ad_of(a) * b;
                let norm = bracket.norm();
                if norm < 1e-14 {
                    continue;
                }
                worst = worst.max(crate::numerics::containment_residual(&span, &bracket));
            }
        }
        worst
    }
}

/// Kinds of bilinear forms carried by [`BilinearForm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormKind {
    Killing,
    Trace,
    BTheta,
}

/// A symmetric bilinear form over an algebra basis, held as its Gram matrix.
#[derive(Debug, Clone)]
pub struct BilinearForm {
    pub gram: Mat,
    pub kind: FormKind,
}

impl BilinearForm {
    pub fn apply(&self, a: &Vector, b: &Vector) -> f64 {
        (a.transpose() * &self.gram * b)[(0, 0)]
    }
}

/// A Lie algebra homomorphism into `gl(V)`, one image per basis element;
/// group elements are reached as products of exponentials.
#[derive(Debug, Clone)]
pub struct Representation {
    dim_v: usize,
    drho: Vec<Mat>,
}

impl Representation {
    pub fn new(dim_v: usize, drho: Vec<Mat>) -> Result<Self> {
        for (i, m) in drho.iter().enumerate() {
            if m.shape() != (dim_v, dim_v) {
                return Err(Error::DimensionMismatch(format!(
                    "drho[{i}] is {}x{}, expected {dim_v}x{dim_v}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            check_finite(m, &format!("drho[{i}]"))?;
        }
        Ok(Representation { dim_v, drho })
    }

    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    pub fn drho(&self) -> &[Mat] {
        &self.drho
    }

    /// `drho` of the element with the given algebra coordinates.
    pub fn apply(&self, coords: &Vector) -> Mat {
        assert_eq!(coords.len(), self.drho.len(), "coordinate length");
        let mut m = Mat::zeros(self.dim_v, self.dim_v);
        for (i, x) in self.drho.iter().enumerate() {
            m += x * coords[i];
        }
        m
    }

    /// `rho` of a product of exponentials of algebra elements.
    pub fn rho_product(&self, factors: &[Vector]) -> Mat {
        let mut m = Mat::identity(self.dim_v, self.dim_v);
        for f in factors {
            m *= crate::numerics::expm(&self.apply(f));
        }
        m
    }

    /// Exact inverse of [`Representation::rho_product`]: reversed factors
    /// with negated exponents.
    pub fn rho_product_inv(&self, factors: &[Vector]) -> Mat {
        let mut m = Mat::identity(self.dim_v, self.dim_v);
        for f in factors.iter().rev() {
            m *= crate::numerics::expm(&(-self.apply(f)));
        }
        m
    }

    /// Largest residual of `drho[X_i, X_j] = [drho X_i, drho X_j]` over all
    /// basis pairs.
    pub fn homomorphism_residual(&self, alg: &LieAlgebra) -> f64 {
        let d = alg.dim();
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                let lhs = self.apply(&(alg.ad_matrix(i) * unit(d, j)));
                let rhs = comm(&self.drho[i], &self.drho[j]);
                worst = worst.max((lhs - rhs).norm());
            }
        }
        worst
    }
}

fn unit(d: usize, j: usize) -> Vector {
    let mut v = Vector::zeros(d);
    v[j] = 1.0;
    v
}

/// The adjoint representation on the algebra's own coordinate space.
pub fn adjoint_rep(alg: &LieAlgebra) -> Representation {
    Representation {
        dim_v: alg.dim(),
        drho: alg.ad_mats.clone(),
    }
}

/// Killing form `B(X_i, X_j) = Tr(ad X_i ad X_j)`.
pub fn killing_form(alg: &LieAlgebra) -> BilinearForm {
    let d = alg.dim();
    let mut gram = Mat::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let v = (alg.ad_mats[i].clone() * &alg.ad_mats[j]).trace();
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
    }
    BilinearForm {
        gram,
        kind: FormKind::Killing,
    }
}

/// Largest residual of the complete invariance identity
/// `B([Z,X],Y) + B(X,[Z,Y]) = 0` over basis triples.
pub fn killing_invariance_residual(alg: &LieAlgebra, form: &BilinearForm) -> f64 {
    let d = alg.dim();
    let mut worst = 0.0_f64;
    for z in 0..d {
        for x in 0..d {
            for y in 0..d {
                let zx = alg.ad_matrix(z) * unit(d, x);
                let zy = alg.ad_matrix(z) * unit(d, y);
                let s = form.apply(&zx, &unit(d, y)) + form.apply(&unit(d, x), &zy);
                worst = worst.max(s.abs());
            }
        }
    }
    worst
}

/// The trace form `(A, B) -> Tr(AB)` on the elementary-matrix basis of
/// `gl(m)`, with row-major index pairs.
pub fn trace_form(m: usize) -> BilinearForm {
    assert!(m >= 1, "positive ambient dimension required");
    let mm = m * m;
    let mut gram = Mat::zeros(mm, mm);
    for a in 0..m {
        for b in 0..m {
            // Tr(E_ab E_cd) = delta_{bc} delta_{ad}
            gram[(a * m + b, b * m + a)] = 1.0;
        }
    }
    BilinearForm {
        gram,
        kind: FormKind::Trace,
    }
}

/// Center (joint kernel of all `ad(X_i)`) and derived algebra (span of all
/// brackets), both closed under the bracket.
pub fn center_and_derived(alg: &LieAlgebra, tol: f64) -> Result<(Subalgebra, Subalgebra)> {
    let d = alg.dim();
    let mut stacked = Mat::zeros(d * d, d);
    for i in 0..d {
        stacked.view_mut((i * d, 0), (d, d)).copy_from(&alg.ad_mats[i]);
    }
    let kernel = null_space(&stacked, tol);
    let center_coeffs: Vec<Vector> = (0..kernel.ncols())
        .map(|j| kernel.column(j).into_owned())
        .collect();
    let center = Subalgebra::new(alg, center_coeffs, tol)?;

    let mut bracket_coords = Vec::new();
    for i in 0..d {
        for j in 0..d {
            bracket_coords.push(alg.ad_matrix(i) * unit(d, j));
        }
    }
    let derived_basis = orthonormal_span(&bracket_coords, tol);
    let derived = Subalgebra::new(alg, derived_basis, tol)?;
    Ok((center, derived))
}

/// Reductive splitting: `h' = (h + z(g)) intersect [g, g]`, a subalgebra of
/// the derived algebra acting like `h` does.
pub fn reductive_split(alg: &LieAlgebra, h: &Subalgebra, tol: f64) -> Result<Subalgebra> {
    let (center, derived) = center_and_derived(alg, tol)?;
    let mut sum: Vec<Vector> = h.coeffs().to_vec();
    sum.extend(center.coeffs().iter().cloned());
    let sum_basis = orthonormal_span(&sum, tol);
    let inter = crate::numerics::subspace_intersection(&sum_basis, derived.coeffs(), tol);
    Subalgebra::new(alg, inter, tol)
}

/// True when the span of the subalgebra contains all the given coordinate
/// vectors.
pub fn subalgebra_contains(sub: &Subalgebra, vectors: &[Vector], tol: f64) -> bool {
    if sub.dim() == 0 {
        return vectors.iter().all(|v| v.norm() <= tol * 1e3);
    }
    span_contains(sub.coeffs(), vectors, tol)
}
