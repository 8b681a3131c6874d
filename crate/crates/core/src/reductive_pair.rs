//! Centralizers and commutants, the trace-form isotypic projector, the
//! transversal subspace `p = k_perp intersect z_g_perp`, sampling of
//! `Y = K exp(p)`, and numerical factorization through the coordinates
//! `(k, P, Z) -> k exp(P) exp(Z)`.

use crate::cartan::{form_orthocomplement, is_theta_stable, CartanStructure};
use crate::error::{Error, Result};
use crate::liealg::{LieAlgebra, Representation, Subalgebra};
use crate::numerics::{
    comm, expm, logm_spd, lstsq, mat_from_rm, null_space, orthonormal_span, polar, rank_basis,
    subspace_intersection, vec_rm, Mat, Vector,
};
use crate::sampling;
use rand::Rng;

/// Joint kernel of `ad(h_i)` over the subalgebra basis: all elements of the
/// algebra commuting with the subalgebra.
pub fn centralizer(alg: &LieAlgebra, h: &Subalgebra, tol: f64) -> Result<Subalgebra> {
    let d = alg.dim();
    if h.dim() == 0 {
        let full: Vec<Vector> = (0..d)
            .map(|i| {
                let mut v = Vector::zeros(d);
                v[i] = 1.0;
                v
            })
            .collect();
        return Subalgebra::new(alg, full, tol);
    }
    let mut stacked = Mat::zeros(h.dim() * d, d);
    for (i, c) in h.coeffs().iter().enumerate() {
        stacked.view_mut((i * d, 0), (d, d)).copy_from(&alg.ad_of(c));
    }
    let kernel = null_space(&stacked, tol);
    let coeffs: Vec<Vector> = (0..kernel.ncols())
        .map(|j| kernel.column(j).into_owned())
        .collect();
    Subalgebra::new(alg, coeffs, tol)
}

/// The commutant of the subalgebra's image in `gl(V)`, with the orthogonal
/// projector onto it taken with respect to the trace form.
#[derive(Debug, Clone)]
pub struct Commutant {
    dim_v: usize,
    /// Frobenius-orthonormal basis of the commutant.
    z_basis: Vec<Mat>,
    /// The projector on row-major vec coordinates (`m^2 x m^2`).
    projector: Mat,
}

impl Commutant {
    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    pub fn dim(&self) -> usize {
        self.z_basis.len()
    }

    pub fn z_basis(&self) -> &[Mat] {
        &self.z_basis
    }

    pub fn projector_matrix(&self) -> &Mat {
        &self.projector
    }

    /// Trace-form-orthogonal projection of `a` onto the commutant.
    pub fn project(&self, a: &Mat) -> Mat {
        let m = self.dim_v;
        assert_eq!(a.shape(), (m, m), "projector input shape");
        mat_from_rm(m, m, &(&self.projector * vec_rm(a)))
    }

    /// Largest commutation residual `||[drho h_i, Z_j]||` over both bases.
    pub fn commutation_residual(&self, rep: &Representation, h: &Subalgebra) -> f64 {
        let mut worst = 0.0_f64;
        for c in h.coeffs() {
            let a = rep.apply(c);
            for z in &self.z_basis {
                worst = worst.max(comm(&a, z).norm() / (1.0 + a.norm()));
            }
        }
        worst
    }

    /// `||P^2 - P||` on the vectorized projector.
    pub fn idempotency_residual(&self) -> f64 {
        (&self.projector * &self.projector - &self.projector).norm()
    }

    /// Largest `|Tr((A - P A) Z_j)|` over the commutant basis for the given
    /// probe, normalized by the probe norm.
    pub fn trace_orthogonality_residual(&self, a: &Mat) -> f64 {
        let residue = a - self.project(a);
        self.z_basis
            .iter()
            .map(|z| (&residue * z).trace().abs())
            .fold(0.0, f64::max)
            / a.norm().max(1.0)
    }
}

/// Computes the commutant of `drho(h)` in `gl(V)` as the joint kernel of
/// the commutator operators, and the trace-form projector onto it. For a
/// connected group this is the commutant of the group image itself.
pub fn commutant(rep: &Representation, h: &Subalgebra, tol: f64) -> Result<Commutant> {
    let m = rep.dim_v();
    if m == 0 {
        return Err(Error::ZeroRep);
    }
    let mm = m * m;
    let eye = Mat::identity(m, m);
    let kernel = if h.dim() == 0 {
        Mat::identity(mm, mm)
    } else {
        let mut stacked = Mat::zeros(h.dim() * mm, mm);
        for (i, c) in h.coeffs().iter().enumerate() {
            let a = rep.apply(c);
            // row-major vec(AZ - ZA) = (A kron I - I kron A^T) vec(Z)
            let op = a.kronecker(&eye) - eye.kronecker(&a.transpose());
            stacked.view_mut((i * mm, 0), (mm, mm)).copy_from(&op);
        }
        null_space(&stacked, tol)
    };

    let dz = kernel.ncols();
    if dz == 0 {
        return Err(Error::Numerical(
            "commutant is zero-dimensional: identity is always a member".into(),
        ));
    }
    let z_basis: Vec<Mat> = (0..dz)
        .map(|j| mat_from_rm(m, m, &kernel.column(j).into_owned()))
        .collect();

    // Gram of the trace form on the commutant; nondegenerate whenever the
    // action is semisimple.
    let gram = Mat::from_fn(dz, dz, |i, j| (&z_basis[i] * &z_basis[j]).trace());
    let gram_inv = gram.clone().try_inverse().ok_or_else(|| {
        Error::Numerical("trace form degenerates on the commutant".into())
    })?;

    // projector = Zc . G^{-1} . T with T rows vec(Z_j^T)
    let mut zc = Mat::zeros(mm, dz);
    let mut t = Mat::zeros(dz, mm);
    for (j, z) in z_basis.iter().enumerate() {
        zc.set_column(j, &vec_rm(z));
        t.set_row(j, &vec_rm(&z.transpose()).transpose());
    }
    let projector = zc * gram_inv * t;

    Ok(Commutant {
        dim_v: m,
        z_basis,
        projector,
    })
}

/// Trace-form-orthogonal projection of `a` onto the commutant.
pub fn project_z(comm: &Commutant, a: &Mat) -> Mat {
    comm.project(a)
}

/// The full structural data of a reductive pair: the centralizer split and
/// the transversal coordinates for `Y = K exp(p)`.
#[derive(Debug, Clone)]
pub struct ReductivePair {
    /// The reductive subalgebra, stable under the involution.
    pub h: Subalgebra,
    /// Centralizer of `h` in the ambient algebra.
    pub z_g: Subalgebra,
    /// Killing-orthocomplement of the centralizer.
    pub z_g_perp: Vec<Vector>,
    /// `p = k_perp intersect z_g_perp`, the escape directions of `Y`.
    pub p: Vec<Vector>,
    /// `k_perp intersect z_g`, the third factorization coordinate space.
    pub kperp_cap_zg: Vec<Vector>,
    /// The Cartan structure the splitting was taken against.
    pub cartan: CartanStructure,
}

/// Builds the pair data. Requires `h` stable under the involution.
pub fn build_pair(
    alg: &LieAlgebra,
    h: &Subalgebra,
    cartan: &CartanStructure,
    tol: f64,
) -> Result<ReductivePair> {
    if !is_theta_stable(cartan, h, tol) {
        let residual = crate::cartan::theta_stability_residual(cartan, h.coeffs());
        return Err(Error::NotThetaStable { residual });
    }
    let d = alg.dim();
    let z_g = centralizer(alg, h, tol)?;
    let z_g_perp = form_orthocomplement(&cartan.killing, z_g.coeffs(), d);
    let p = subspace_intersection(&cartan.k_perp, &z_g_perp, tol);
    let kperp_cap_zg = subspace_intersection(&cartan.k_perp, z_g.coeffs(), tol);

    let pair = ReductivePair {
        h: h.clone(),
        z_g,
        z_g_perp,
        p,
        kperp_cap_zg,
        cartan: cartan.clone(),
    };

    // Structural residuals; these are construction guarantees, surfaced as
    // errors rather than left to debug assertions.
    let mut split: Vec<Vector> = pair.z_g.coeffs().to_vec();
    split.extend(pair.z_g_perp.iter().cloned());
    let (rank, _) = rank_basis(&split, tol);
    if rank != d {
        return Err(Error::Numerical(format!(
            "centralizer and its orthocomplement span rank {rank} < {d}"
        )));
    }
    if pair.p.len() + pair.kperp_cap_zg.len() != pair.cartan.k_perp.len() {
        return Err(Error::Numerical(format!(
            "k_perp split {} + {} misses dimension {}",
            pair.p.len(),
            pair.kperp_cap_zg.len(),
            pair.cartan.k_perp.len()
        )));
    }
    if pair.centralizer_commutation_residual(alg) > tol * 1e3 {
        return Err(Error::Numerical(
            "centralizer does not commute with the subalgebra".into(),
        ));
    }
    Ok(pair)
}

impl ReductivePair {
    /// Largest `||[h_i, z_j]||` over both bases.
    pub fn centralizer_commutation_residual(&self, alg: &LieAlgebra) -> f64 {
        let mut worst = 0.0_f64;
        for hc in self.h.coeffs() {
            let ad_h = alg.ad_of(hc);
            for zc in self.z_g.coeffs() {
                worst = worst.max((&ad_h * zc).norm());
            }
        }
        worst
    }

    /// Largest Killing pairing of `p` against the centralizer and against
    /// the fixed subalgebra (both vanish by construction).
    pub fn p_orthogonality_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for pv in &self.p {
            for zc in self.z_g.coeffs() {
                worst = worst.max(self.cartan.killing.apply(pv, zc).abs());
            }
            for kc in self.cartan.k.coeffs() {
                worst = worst.max(self.cartan.killing.apply(pv, kc).abs());
            }
        }
        worst
    }

    /// Dimension of the parent algebra.
    pub fn algebra_dim(&self) -> usize {
        self.cartan.theta.nrows()
    }

    /// Algebra coordinates of an element given over the `p` basis.
    pub fn p_to_algebra(&self, coords: &Vector) -> Vector {
        accumulate(&self.p, coords, self.algebra_dim())
    }

    /// Algebra coordinates of an element given over the
    /// `k_perp intersect z_g` basis.
    pub fn z_to_algebra(&self, coords: &Vector) -> Vector {
        accumulate(&self.kperp_cap_zg, coords, self.algebra_dim())
    }

    /// Algebra coordinates of an element given over the `k` basis.
    pub fn k_to_algebra(&self, coords: &Vector) -> Vector {
        accumulate(self.cartan.k.coeffs(), coords, self.algebra_dim())
    }

    /// Ambient realization of coordinates over the `p` basis.
    pub fn p_element(&self, alg: &LieAlgebra, coords: &Vector) -> Mat {
        alg.element(&self.p_to_algebra(coords))
    }

    /// Ambient realization of coordinates over the `k_perp intersect z_g`
    /// basis.
    pub fn z_element(&self, alg: &LieAlgebra, coords: &Vector) -> Mat {
        alg.element(&self.z_to_algebra(coords))
    }

    /// Ambient realization of coordinates over the `k` basis.
    pub fn k_element(&self, alg: &LieAlgebra, coords: &Vector) -> Mat {
        alg.element(&self.k_to_algebra(coords))
    }

    /// Membership residual of an ambient matrix against the span of `p`.
    pub fn p_membership_residual(&self, alg: &LieAlgebra, m: &Mat) -> f64 {
        let (coords, coord_res) = alg.coords_with_residual(m);
        let span = orthonormal_span(&self.p, 1e-12);
        let span_res = crate::numerics::containment_residual(&span, &coords);
        (coord_res / m.norm().max(1.0)).max(span_res)
    }
}

fn accumulate(basis: &[Vector], coords: &Vector, dim: usize) -> Vector {
    assert_eq!(coords.len(), basis.len(), "coordinate length");
    let mut acc = Vector::zeros(dim);
    for (i, b) in basis.iter().enumerate() {
        acc += b * coords[i];
    }
    acc
}

/// Result of factoring a group element through `(k, P, Z)`.
#[derive(Debug, Clone)]
pub struct MostowCoords {
    /// Orthogonal factor, fixed by the global involution.
    pub k_factor: Mat,
    /// Coordinates of `P` over the pair's `p` basis.
    pub p_coords: Vector,
    /// Coordinates of `Z` over the pair's `k_perp intersect z_g` basis.
    pub z_coords: Vector,
    /// Ambient `P`.
    pub p_component: Mat,
    /// Ambient `Z`.
    pub z_component: Mat,
    /// Relative reconstruction residual of `k exp(P) exp(Z)`.
    pub residual: f64,
    /// Newton iterations used.
    pub iterations: usize,
}

/// The forward product `k exp(P) exp(Z)`.
pub fn mostow_forward(k: &Mat, p_component: &Mat, z_component: &Mat) -> Mat {
    k * expm(p_component) * expm(z_component)
}

/// Factors an invertible group element as `k exp(P) exp(Z)` by a damped
/// Gauss-Newton iteration in the coordinates `(kappa, P, Z)`, seeded from
/// the polar decomposition.
pub fn mostow_factor(
    alg: &LieAlgebra,
    pair: &ReductivePair,
    g_elt: &Mat,
    tol: f64,
    max_iter: usize,
) -> Result<MostowCoords> {
    let n = alg.ambient_dim();
    assert_eq!(g_elt.shape(), (n, n), "group element shape");
    let scale = 1.0 + g_elt.norm();

    // Polar seed: g = U S, split log(S) over p + (k_perp cap z_g).
    let (u, s) = polar(g_elt);
    let log_s = logm_spd(&s, 1e-9)?;
    let (s_coords, _) = alg.coords_with_residual(&log_s);
    let dp = pair.p.len();
    let dz = pair.kperp_cap_zg.len();
    let dk = pair.cartan.k.dim();
    let mut split_cols = Mat::zeros(alg.dim(), dp + dz);
    for (j, b) in pair.p.iter().enumerate() {
        split_cols.set_column(j, b);
    }
    for (j, b) in pair.kperp_cap_zg.iter().enumerate() {
        split_cols.set_column(dp + j, b);
    }
    let ab = if dp + dz > 0 {
        lstsq(&split_cols, &s_coords)
    } else {
        Vector::zeros(0)
    };
    let mut k_factor = u;
    let mut a = Vector::from_fn(dp, |i, _| ab[i]);
    let mut b = Vector::from_fn(dz, |i, _| ab[dp + i]);

    let residual_of = |k: &Mat, a: &Vector, b: &Vector| -> (Vector, f64) {
        let rec = mostow_forward(k, &pair.p_element(alg, a), &pair.z_element(alg, b));
        let diff = (&rec - g_elt) / scale;
        let f = vec_rm(&diff);
        let r = f.norm();
        (f, r)
    };

    let ndof = dk + dp + dz;
    let fd = 1e-6;
    let (mut f0, mut r0) = residual_of(&k_factor, &a, &b);
    let mut iterations = 0;
    while r0 > tol && iterations < max_iter {
        iterations += 1;
        // Finite-difference Jacobian over (kappa, dP, dZ).
        let mut jac = Mat::zeros(n * n, ndof);
        for c in 0..ndof {
            let (kp, ap, bp) = perturb(alg, pair, &k_factor, &a, &b, c, fd);
            let (fc, _) = residual_of(&kp, &ap, &bp);
            jac.set_column(c, &((fc - &f0) / fd));
        }
        let du = lstsq(&jac, &(-&f0));
        // Backtracking: halve the step until the residual drops.
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..14 {
            let (kt, at, bt) = apply_step(alg, pair, &k_factor, &a, &b, &du, step);
            let (ft, rt) = residual_of(&kt, &at, &bt);
            if rt < r0 {
                k_factor = kt;
                a = at;
                b = bt;
                f0 = ft;
                r0 = rt;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }

    if r0 > tol {
        return Err(Error::NoConvergence {
            iterations,
            residual: r0,
        });
    }

    Ok(MostowCoords {
        p_component: pair.p_element(alg, &a),
        z_component: pair.z_element(alg, &b),
        k_factor,
        p_coords: a,
        z_coords: b,
        residual: r0,
        iterations,
    })
}

fn perturb(
    alg: &LieAlgebra,
    pair: &ReductivePair,
    k: &Mat,
    a: &Vector,
    b: &Vector,
    dof: usize,
    h: f64,
) -> (Mat, Vector, Vector) {
    let dk = pair.cartan.k.dim();
    let dp = pair.p.len();
    if dof < dk {
        let mut kappa = Vector::zeros(dk);
        kappa[dof] = h;
        (k * expm(&pair.k_element(alg, &kappa)), a.clone(), b.clone())
    } else if dof < dk + dp {
        let mut ap = a.clone();
        ap[dof - dk] += h;
        (k.clone(), ap, b.clone())
    } else {
        let mut bp = b.clone();
        bp[dof - dk - dp] += h;
        (k.clone(), a.clone(), bp)
    }
}

fn apply_step(
    alg: &LieAlgebra,
    pair: &ReductivePair,
    k: &Mat,
    a: &Vector,
    b: &Vector,
    du: &Vector,
    step: f64,
) -> (Mat, Vector, Vector) {
    let dk = pair.cartan.k.dim();
    let dp = pair.p.len();
    let dz = pair.kperp_cap_zg.len();
    let kappa = Vector::from_fn(dk, |i, _| du[i] * step);
    let kt = if dk > 0 {
        k * expm(&pair.k_element(alg, &kappa))
    } else {
        k.clone()
    };
    let at = Vector::from_fn(dp, |i, _| a[i] + du[dk + i] * step);
    let bt = Vector::from_fn(dz, |i, _| b[i] + du[dk + dp + i] * step);
    (kt, at, bt)
}

/// Smallest singular value of the derivative of
/// `(kappa, P, Z) -> k exp(P) exp(Z)` at the given coordinates, by forward
/// differences over the pair's orthonormal bases.
pub fn mostow_jacobian_min_sv(alg: &LieAlgebra, pair: &ReductivePair, coords: &MostowCoords) -> f64 {
    let n = alg.ambient_dim();
    let dk = pair.cartan.k.dim();
    let dp = pair.p.len();
    let dz = pair.kperp_cap_zg.len();
    let ndof = dk + dp + dz;
    let fd = 1e-6;
    let base = mostow_forward(&coords.k_factor, &coords.p_component, &coords.z_component);
    let mut jac = Mat::zeros(n * n, ndof);
    for c in 0..ndof {
        let (kp, ap, bp) = perturb(alg, pair, &coords.k_factor, &coords.p_coords, &coords.z_coords, c, fd);
        let rec = mostow_forward(&kp, &pair.p_element(alg, &ap), &pair.z_element(alg, &bp));
        jac.set_column(c, &(vec_rm(&(rec - &base)) / fd));
    }
    jac.svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Radius of the ball the compact coordinate is drawn from.
pub const K_SAMPLE_RADIUS: f64 = std::f64::consts::PI;

/// Draws `y = exp(kappa) exp(P)` with `kappa` uniform in a fixed ball of
/// the compact part and `P` uniform in the ball of the given radius.
pub fn sample_y_with_rng(
    alg: &LieAlgebra,
    pair: &ReductivePair,
    radius: f64,
    rng: &mut impl Rng,
) -> Mat {
    let (y, _, _) = sample_y_parts(alg, pair, radius, rng);
    y
}

/// As [`sample_y_with_rng`], also returning the drawn coordinates.
pub fn sample_y_parts(
    alg: &LieAlgebra,
    pair: &ReductivePair,
    radius: f64,
    rng: &mut impl Rng,
) -> (Mat, Vector, Vector) {
    assert!(radius >= 0.0, "radius must be nonnegative");
    let kappa = sampling::uniform_ball(rng, pair.cartan.k.dim(), K_SAMPLE_RADIUS);
    let p = sampling::uniform_ball(rng, pair.p.len(), radius);
    let y = expm(&pair.k_element(alg, &kappa)) * expm(&pair.p_element(alg, &p));
    (y, kappa, p)
}

/// Seeded wrapper over [`sample_y_with_rng`].
pub fn sample_y(alg: &LieAlgebra, pair: &ReductivePair, radius: f64, seed: u64) -> Mat {
    let mut rng = sampling::substream(seed, 0);
    sample_y_with_rng(alg, pair, radius, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::standard_theta;
    use crate::presets;

    fn s1() -> (LieAlgebra, Subalgebra, Representation, ReductivePair) {
        let alg = presets::sl2_algebra();
        let h = presets::sl2_torus(&alg);
        let rep = presets::sl2_standard_rep();
        let cs = standard_theta(&alg).unwrap();
        let pair = build_pair(&alg, &h, &cs, 1e-9).unwrap();
        (alg, h, rep, pair)
    }

    fn s2() -> (LieAlgebra, Subalgebra, Representation, ReductivePair) {
        let alg = presets::sl3_algebra();
        let h = presets::so3_in_sl3(&alg);
        let rep = presets::sl3_standard_rep();
        let cs = standard_theta(&alg).unwrap();
        let pair = build_pair(&alg, &h, &cs, 1e-9).unwrap();
        (alg, h, rep, pair)
    }

    #[test]
    fn centralizer_of_the_torus_is_itself() {
        let alg = presets::sl2_algebra();
        let h = presets::sl2_torus(&alg);
        let z = centralizer(&alg, &h, 1e-9).unwrap();
        assert_eq!(z.dim(), 1);
        assert!(crate::numerics::subspaces_equal(z.coeffs(), h.coeffs(), 1e-9));
    }

    #[test]
    fn centralizer_of_so3_is_trivial() {
        let alg = presets::sl3_algebra();
        let h = presets::so3_in_sl3(&alg);
        let z = centralizer(&alg, &h, 1e-9).unwrap();
        assert_eq!(z.dim(), 0);
    }

    #[test]
    fn centralizer_of_the_whole_algebra_is_its_center() {
        let alg = presets::sl2_algebra();
        let full: Vec<Vector> = (0..3)
            .map(|i| {
                let mut v = Vector::zeros(3);
                v[i] = 1.0;
                v
            })
            .collect();
        let h = Subalgebra::new(&alg, full, 1e-9).unwrap();
        let z = centralizer(&alg, &h, 1e-9).unwrap();
        assert_eq!(z.dim(), 0);
    }

    #[test]
    fn commutant_of_the_torus_is_diagonal() {
        let (_, h, rep, _) = s1();
        let c = commutant(&rep, &h, 1e-9).unwrap();
        assert_eq!(c.dim(), 2);
        for z in c.z_basis() {
            assert!(z[(0, 1)].abs() < 1e-12 && z[(1, 0)].abs() < 1e-12);
        }
        assert!(c.idempotency_residual() < 1e-12);
        assert!(c.commutation_residual(&rep, &h) < 1e-12);
    }

    #[test]
    fn commutant_of_so3_is_scalars() {
        let (_, h, rep, _) = s2();
        let c = commutant(&rep, &h, 1e-9).unwrap();
        assert_eq!(c.dim(), 1);
        let z = &c.z_basis()[0];
        let scaled = z / z[(0, 0)];
        assert!((scaled - Mat::identity(3, 3)).norm() < 1e-10);
    }

    #[test]
    fn trivial_subalgebra_gives_full_commutant() {
        let rep = presets::sl2_standard_rep();
        let alg = presets::sl2_algebra();
        let h = Subalgebra::new(&alg, vec![], 1e-9).unwrap();
        let c = commutant(&rep, &h, 1e-9).unwrap();
        assert_eq!(c.dim(), 4);
        let probe = Mat::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert!((c.project(&probe) - &probe).norm() < 1e-12);
    }

    #[test]
    fn projection_keeps_the_diagonal_for_s1() {
        let (_, h, rep, _) = s1();
        let c = commutant(&rep, &h, 1e-9).unwrap();
        let a = Mat::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let pa = project_z(&c, &a);
        let expect = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 4.0]);
        assert!((pa - expect).norm() < 1e-12);
        // identity always projects to itself
        let eye = Mat::identity(2, 2);
        assert!((c.project(&eye) - eye).norm() < 1e-12);
        assert!(c.trace_orthogonality_residual(&a) < 1e-12);
    }

    #[test]
    fn projection_to_scalars_for_s2() {
        let (_, h, rep, _) = s2();
        let c = commutant(&rep, &h, 1e-9).unwrap();
        let a = Mat::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 0.5, -1.0, 3.0, 0.0, 1.0, 2.5]);
        let pa = project_z(&c, &a);
        let expect = Mat::identity(3, 3) * (a.trace() / 3.0);
        assert!((pa - expect).norm() < 1e-12);
    }

    #[test]
    fn s1_pair_subspaces() {
        let (alg, _, _, pair) = s1();
        assert_eq!(pair.z_g.dim(), 1);
        assert_eq!(pair.p.len(), 1);
        assert_eq!(pair.kperp_cap_zg.len(), 1);
        // p realizes span{E + F}
        let p_mat = pair.p_element(&alg, &Vector::from_column_slice(&[1.0]));
        let scaled = &p_mat / p_mat[(0, 1)];
        let expect = Mat::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!((scaled - expect).norm() < 1e-9);
        // z realizes span{H0}
        let z_mat = pair.z_element(&alg, &Vector::from_column_slice(&[1.0]));
        let scaled = &z_mat / z_mat[(0, 0)];
        let expect = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!((scaled - expect).norm() < 1e-9);
        assert!(pair.p_orthogonality_residual() < 1e-9);
    }

    #[test]
    fn s2_pair_subspaces() {
        let (alg, _, _, pair) = s2();
        assert_eq!(pair.z_g.dim(), 0);
        assert_eq!(pair.p.len(), 5);
        assert_eq!(pair.kperp_cap_zg.len(), 0);
        // members of p are symmetric traceless
        for c in &pair.p {
            let m = alg.element(c);
            assert!((m.clone() - m.transpose()).norm() < 1e-9);
            assert!(m.trace().abs() < 1e-10);
        }
    }

    #[test]
    fn degenerate_pair_with_h_equal_g() {
        let alg = presets::sl2_algebra();
        let cs = standard_theta(&alg).unwrap();
        let full: Vec<Vector> = (0..3)
            .map(|i| {
                let mut v = Vector::zeros(3);
                v[i] = 1.0;
                v
            })
            .collect();
        let h = Subalgebra::new(&alg, full, 1e-9).unwrap();
        let pair = build_pair(&alg, &h, &cs, 1e-9).unwrap();
        assert_eq!(pair.z_g.dim(), 0);
        assert_eq!(pair.p.len(), cs.k_perp.len());
    }

    #[test]
    fn non_stable_subalgebra_is_rejected() {
        let alg = presets::sl2_algebra();
        let cs = standard_theta(&alg).unwrap();
        let e12 =
            Subalgebra::new(&alg, vec![Vector::from_column_slice(&[0.0, 1.0, 0.0])], 1e-9).unwrap();
        assert!(matches!(
            build_pair(&alg, &e12, &cs, 1e-9),
            Err(Error::NotThetaStable { .. })
        ));
    }

    #[test]
    fn factor_recovers_a_pure_rotation() {
        let (alg, _, _, pair) = s1();
        let rot = expm(&Mat::from_row_slice(2, 2, &[0.0, 0.4, -0.4, 0.0]));
        let c = mostow_factor(&alg, &pair, &rot, 1e-10, 50).unwrap();
        assert!(c.p_coords.norm() < 1e-9);
        assert!(c.z_coords.norm() < 1e-9);
        assert!((c.k_factor.clone() - rot).norm() < 1e-9);
    }

    #[test]
    fn factor_recovers_a_pure_p_exponential() {
        let (alg, _, _, pair) = s1();
        let p = Mat::from_row_slice(2, 2, &[0.0, 0.7, 0.7, 0.0]);
        let g = expm(&p);
        let c = mostow_factor(&alg, &pair, &g, 1e-10, 50).unwrap();
        assert!((c.k_factor.clone() - Mat::identity(2, 2)).norm() < 1e-9);
        assert!((c.p_component.clone() - p).norm() < 1e-9);
        assert!(c.z_coords.norm() < 1e-9);
    }

    #[test]
    fn factor_separates_noncommuting_p_and_z() {
        // exp(0.3 (E+F)) exp(0.5 H0): the polar seed alone mixes the parts,
        // the corrected solve recovers Z = 0.5 H0.
        let (alg, _, _, pair) = s1();
        let p = Mat::from_row_slice(2, 2, &[0.0, 0.3, 0.3, 0.0]);
        let z = Mat::from_row_slice(2, 2, &[0.5, 0.0, 0.0, -0.5]);
        let g = expm(&p) * expm(&z);
        let c = mostow_factor(&alg, &pair, &g, 1e-10, 50).unwrap();
        let rec = mostow_forward(&c.k_factor, &c.p_component, &c.z_component);
        assert!((rec - &g).norm() / g.norm() < 1e-9);
        assert!((c.z_component.clone() - z).norm() < 1e-7);
        assert!((c.p_component.clone() - p).norm() < 1e-7);
        // orthogonality of the compact factor
        let kt = c.k_factor.transpose() * &c.k_factor;
        assert!((kt - Mat::identity(2, 2)).norm() < 1e-8);
    }

    #[test]
    fn roundtrip_on_random_triples_both_scenarios() {
        for scenario in 0..2 {
            let (alg, _, _, pair) = if scenario == 0 { s1() } else { s2() };
            let mut rng = sampling::substream(11, scenario as u64);
            for _ in 0..20 {
                let kappa = sampling::uniform_ball(&mut rng, pair.cartan.k.dim(), 1.0);
                let pc = sampling::uniform_ball(&mut rng, pair.p.len(), 1.0);
                let zc = sampling::uniform_ball(&mut rng, pair.kperp_cap_zg.len(), 1.0);
                let k = expm(&pair.k_element(&alg, &kappa));
                let g = mostow_forward(
                    &k,
                    &pair.p_element(&alg, &pc),
                    &pair.z_element(&alg, &zc),
                );
                let c = mostow_factor(&alg, &pair, &g, 1e-10, 60).unwrap();
                let rec = mostow_forward(&c.k_factor, &c.p_component, &c.z_component);
                assert!((rec - &g).norm() / (1.0 + g.norm()) < 1e-8);
                // local component agreement in the small-norm regime
                assert!((c.p_coords.clone() - &pc).norm() < 1e-7);
                assert!((c.z_coords.clone() - &zc).norm() < 1e-7);
                assert!(mostow_jacobian_min_sv(&alg, &pair, &c) > 1e-6);
            }
        }
    }

    #[test]
    fn sampled_y_has_no_z_component() {
        let (alg, _, _, pair) = s1();
        let mut rng = sampling::substream(5, 3);
        for _ in 0..10 {
            let y = sample_y_with_rng(&alg, &pair, 2.0, &mut rng);
            let c = mostow_factor(&alg, &pair, &y, 1e-10, 60).unwrap();
            assert!(c.z_coords.norm() <= 1e-7, "z part {}", c.z_coords.norm());
        }
    }

    #[test]
    fn zero_radius_samples_stay_compact() {
        let (alg, _, _, pair) = s1();
        let mut rng = sampling::substream(5, 4);
        let y = sample_y_with_rng(&alg, &pair, 0.0, &mut rng);
        assert!((y.transpose() * &y - Mat::identity(2, 2)).norm() < 1e-10);
    }

    #[test]
    fn samples_are_reproducible_for_a_fixed_seed() {
        let (alg, _, _, pair) = s1();
        let a = sample_y(&alg, &pair, 2.0, 31);
        let b = sample_y(&alg, &pair, 2.0, 31);
        let c = sample_y(&alg, &pair, 2.0, 32);
        assert_eq!(a, b);
        assert!((a - c).norm() > 0.0);
    }

    #[test]
    fn s2_random_elements_factor_with_zero_z() {
        // z_g = 0 in S2: the polar decomposition already is the answer
        let (alg, _, _, pair) = s2();
        let mut rng = sampling::substream(6, 0);
        for _ in 0..5 {
            let coords = sampling::uniform_ball(&mut rng, alg.dim(), 1.0);
            let g = expm(&alg.element(&coords));
            let c = mostow_factor(&alg, &pair, &g, 1e-10, 60).unwrap();
            assert_eq!(c.z_coords.len(), 0);
            let rec = mostow_forward(&c.k_factor, &c.p_component, &c.z_component);
            assert!((rec - &g).norm() / (1.0 + g.norm()) < 1e-8);
        }
    }

    #[test]
    fn conjugation_invariance_of_the_isotypic_projection() {
        // pi_z(rho(h) A rho(h)^{-1}) = pi_z(A) for h in the subgroup
        let (_, h, rep, _) = s1();
        let c = commutant(&rep, &h, 1e-9).unwrap();
        let mut rng = sampling::substream(9, 2);
        for _ in 0..50 {
            let t: f64 = rng.random_range(-1.5..1.5);
            let hmat = rep.rho_product(&[Vector::from_column_slice(&[t, 0.0, 0.0])]);
            let hinv = rep.rho_product_inv(&[Vector::from_column_slice(&[t, 0.0, 0.0])]);
            let a = Mat::from_fn(2, 2, |_, _| rng.random_range(-2.0..2.0));
            let lhs = c.project(&(&hmat * &a * &hinv));
            let rhs = c.project(&a);
            assert!((lhs - rhs).norm() < 1e-8 * (1.0 + a.norm()));
        }
    }
}
