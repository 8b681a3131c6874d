//! Certified non-contraction bounds: the trace-convexity inequality, the
//! expansion property of projected exponentials, the space of conjugation
//! coefficients with its constant-part functional, and the LP-computed
//! constant with sampled verification of the resulting inequality
//! `sup_omega ||rho(y omega) v|| >= c_eff ||v||` over `Y = K exp(p)`.

use crate::cartan::AdaptedInnerProduct;
use crate::error::{Error, Result};
use crate::liealg::{LieAlgebra, Representation, Subalgebra};
use crate::numerics::{expm, lp_max, null_space, rank_basis, sym_eig, LpProblem, Mat, Vector};
use crate::reductive_pair::{sample_y_parts, Commutant, ReductivePair};
use crate::sampling;
use rand::Rng;

/// A finite subset of the subgroup, each element an ordered product of
/// exponentials of subalgebra elements, with cached representation images.
#[derive(Debug, Clone)]
pub struct OmegaSet {
    /// Factor lists over the subalgebra basis.
    specs: Vec<Vec<Vector>>,
    /// Cached `rho(omega)`.
    rho: Vec<Mat>,
    /// Cached `rho(omega^{-1})`, exact from the reversed negated factors.
    rho_inv: Vec<Mat>,
}

impl OmegaSet {
    /// Builds the set, expanding subalgebra coordinates through the
    /// representation. Every factor vector must have the subalgebra
    /// dimension.
    pub fn new(rep: &Representation, h: &Subalgebra, specs: Vec<Vec<Vector>>) -> Result<Self> {
        if rep.dim_v() == 0 {
            return Err(Error::ZeroRep);
        }
        let dh = h.dim();
        let dg = rep.drho().len();
        let mut rho = Vec::with_capacity(specs.len());
        let mut rho_inv = Vec::with_capacity(specs.len());
        for (i, factors) in specs.iter().enumerate() {
            let mut g_factors = Vec::with_capacity(factors.len());
            for f in factors {
                if f.len() != dh {
                    return Err(Error::DimensionMismatch(format!(
                        "element {i}: factor length {} against subalgebra dim {dh}",
                        f.len()
                    )));
                }
                let mut g = Vector::zeros(dg);
                for (l, c) in h.coeffs().iter().enumerate() {
                    g += c * f[l];
                }
                g_factors.push(g);
            }
            let r = rep.rho_product(&g_factors);
            let r_inv = rep.rho_product_inv(&g_factors);
            if !r.iter().all(|x| x.is_finite()) {
                return Err(Error::InvalidInput(format!("element {i} image overflows")));
            }
            rho.push(r);
            rho_inv.push(r_inv);
        }
        Ok(OmegaSet {
            specs,
            rho,
            rho_inv,
        })
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn specs(&self) -> &[Vec<Vector>] {
        &self.specs
    }

    pub fn rho(&self, j: usize) -> &Mat {
        &self.rho[j]
    }

    pub fn rho_inv(&self, j: usize) -> &Mat {
        &self.rho_inv[j]
    }

    /// The conjugation operator `A -> rho(omega_j) A rho(omega_j)^{-1}` on
    /// row-major vec coordinates.
    pub fn conjugation_matrix(&self, j: usize) -> Mat {
        self.rho[j].kronecker(&self.rho_inv[j].transpose())
    }

    /// The subset at the given indices, preserving order.
    pub fn subset(&self, indices: &[usize]) -> OmegaSet {
        OmegaSet {
            specs: indices.iter().map(|&i| self.specs[i].clone()).collect(),
            rho: indices.iter().map(|&i| self.rho[i].clone()).collect(),
            rho_inv: indices.iter().map(|&i| self.rho_inv[i].clone()).collect(),
        }
    }
}

/// Both sides of the trace-convexity inequality
/// `Tr(exp(S) pi) >= rank(pi) exp(Tr(S pi) / rank(pi))` and whether it
/// holds at relative tolerance 1e-9.
pub fn cvx_check(s: &Mat, pi: &Mat) -> Result<(f64, f64, bool)> {
    let scale = 1.0 + pi.norm();
    if (pi - pi.transpose()).norm() > 1e-8 * scale || (pi * pi - pi).norm() > 1e-8 * scale {
        return Err(Error::InvalidInput(
            "projector must be symmetric and idempotent".into(),
        ));
    }
    let rank = pi.trace().round();
    if rank < 0.5 {
        return Err(Error::ZeroProjector);
    }
    let eig = sym_eig(s, 1e-9)?;
    let exp_s = eig.map(f64::exp);
    let lhs = (exp_s * pi).trace();
    let rhs = rank * ((s * pi).trace() / rank).exp();
    Ok((lhs, rhs, lhs >= rhs * (1.0 - 1e-9)))
}

/// Spectrum of the projected exponential `pi_z(rho(exp p_elt))` in the
/// adapted inner product, with its minimum. The element must lie in the
/// pair's `p` subspace; the projected image is self-adjoint with no
/// eigenvalue below one.
pub fn expansion_check(
    alg: &LieAlgebra,
    pair: &ReductivePair,
    rep: &Representation,
    comm: &Commutant,
    q: &AdaptedInnerProduct,
    p_elt: &Mat,
    tol: f64,
) -> Result<(Vector, f64)> {
    let residual = pair.p_membership_residual(alg, p_elt);
    if residual > tol * 1e3 {
        return Err(Error::MembershipViolation { residual });
    }
    let coords = alg.coords_of(p_elt, 1e-6)?;
    let rho_p = expm(&rep.apply(&coords));
    let projected = comm.project(&rho_p);
    let eigenvalues = q.self_adjoint_eigenvalues(&projected, 1e-9)?;
    let min = eigenvalues[0];
    Ok((eigenvalues, min))
}

/// A basis of the space of conjugation-coefficient functions
/// `h -> entry_a(rho(h) E_b rho(h)^{-1})`, its evaluations on a finite
/// subset, and the constant-part functional.
#[derive(Debug, Clone)]
pub struct CoefficientSpace {
    /// Representation dimension the indices refer to.
    pub dim_v: usize,
    /// Selected (entry index, elementary matrix index) pairs, both flat
    /// row-major over `m x m`.
    pub basis_index: Vec<(usize, usize)>,
    /// Evaluations on the construction subset, one row per element.
    pub eval_matrix: Mat,
    /// Constant-part functional: component i is the (a_i, b_i) entry of the
    /// commutant projector.
    pub pi_r: Vector,
}

impl CoefficientSpace {
    pub fn dim(&self) -> usize {
        self.basis_index.len()
    }

    /// Evaluations of the basis functions on another subset: one row per
    /// element, one column per basis function.
    pub fn eval_on(&self, omega: &OmegaSet) -> Mat {
        let mut eval = Mat::zeros(omega.len(), self.dim());
        for j in 0..omega.len() {
            let conj = omega.conjugation_matrix(j);
            for (col, &(a, b)) in self.basis_index.iter().enumerate() {
                eval[(j, col)] = conj[(a, b)];
            }
        }
        eval
    }
}

/// Default number of sampled subgroup elements used to resolve the
/// coefficient-space dimension.
pub fn default_sample_count(dim_v: usize) -> usize {
    (4 * dim_v.pow(4)).clamp(32, 600)
}

/// Resolves a maximal independent family among the `m^4` candidate
/// coefficient functions by evaluating them at seeded random subgroup
/// elements (products of up to three exponentials with coefficients in
/// [-2, 2]) and selecting pivot columns in index order. The constant-part
/// functional comes from the commutant projector, never from integration.
pub fn coefficient_space(
    rep: &Representation,
    h: &Subalgebra,
    comm: &Commutant,
    omega: &OmegaSet,
    seed: u64,
    count: usize,
) -> Result<CoefficientSpace> {
    let m = rep.dim_v();
    if m == 0 {
        return Err(Error::ZeroRep);
    }
    let m2 = m * m;
    let candidates = m2 * m2;
    let count = count.max(8);

    // Row s holds the flattened conjugation operator of sample s; the
    // column at flat index (a, b) is then the value vector of that
    // candidate function across samples.
    let mut values = Mat::zeros(count, candidates);
    for s_idx in 0..count {
        let mut rng = sampling::substream(seed, s_idx as u64);
        let n_factors = rng.random_range(1..=3usize);
        let factors: Vec<Vector> = (0..n_factors)
            .map(|_| Vector::from_fn(h.dim(), |_, _| rng.random_range(-2.0..2.0)))
            .collect();
        let g_factors: Vec<Vector> = factors
            .iter()
            .map(|f| {
                let mut g = Vector::zeros(rep.drho().len());
                for (l, c) in h.coeffs().iter().enumerate() {
                    g += c * f[l];
                }
                g
            })
            .collect();
        let r = rep.rho_product(&g_factors);
        let r_inv = rep.rho_product_inv(&g_factors);
        let conj = r.kronecker(&r_inv.transpose());
        values.set_row(s_idx, &crate::numerics::vec_rm(&conj).transpose());
    }

    let columns: Vec<Vector> = (0..candidates)
        .map(|c| values.column(c).into_owned())
        .collect();
    let (_, selected) = rank_basis(&columns, crate::numerics::DEFAULT_RANK_TOL);
    let basis_index: Vec<(usize, usize)> = selected.iter().map(|&c| (c / m2, c % m2)).collect();

    let pi_r = Vector::from_fn(basis_index.len(), |i, _| {
        let (a, b) = basis_index[i];
        comm.projector_matrix()[(a, b)]
    });

    let cs = CoefficientSpace {
        dim_v: m,
        basis_index,
        eval_matrix: Mat::zeros(0, 0),
        pi_r,
    };
    let eval_matrix = cs.eval_on(omega);
    Ok(CoefficientSpace { eval_matrix, ..cs })
}

/// The constant part of a coefficient function given over the basis.
pub fn pi_r_value(cs: &CoefficientSpace, coeffs: &Vector) -> f64 {
    assert_eq!(coeffs.len(), cs.dim(), "coefficient length");
    cs.pi_r.dot(coeffs)
}

/// Largest deviation from constancy of `h -> entry_a(rho(h) pi_z(E_b)
/// rho(h)^{-1})` over seeded subgroup samples, for one basis function.
pub fn action_constancy_residual(
    rep: &Representation,
    h: &Subalgebra,
    comm: &Commutant,
    a: usize,
    b: usize,
    seed: u64,
    count: usize,
) -> f64 {
    let m = rep.dim_v();
    let mut e_b = Vector::zeros(m * m);
    e_b[b] = 1.0;
    let projected = comm.project(&crate::numerics::mat_from_rm(m, m, &e_b));
    let at_identity = projected[(a / m, a % m)];
    let mut worst = 0.0_f64;
    for s_idx in 0..count {
        let mut rng = sampling::substream(seed, s_idx as u64);
        let factors: Vec<Vector> = (0..2)
            .map(|_| Vector::from_fn(h.dim(), |_, _| rng.random_range(-2.0..2.0)))
            .collect();
        let g_factors: Vec<Vector> = factors
            .iter()
            .map(|f| {
                let mut g = Vector::zeros(rep.drho().len());
                for (l, c) in h.coeffs().iter().enumerate() {
                    g += c * f[l];
                }
                g
            })
            .collect();
        let r = rep.rho_product(&g_factors);
        let r_inv = rep.rho_product_inv(&g_factors);
        let moved = &r * &projected * &r_inv;
        worst = worst.max((moved[(a / m, a % m)] - at_identity).abs());
    }
    worst
}

/// True when evaluation on the subset is injective on the coefficient
/// space: the evaluation matrix has full column rank.
pub fn condition_star(cs: &CoefficientSpace, omega: &OmegaSet, tol: f64) -> bool {
    let eval = cs.eval_on(omega);
    let columns: Vec<Vector> = (0..eval.ncols())
        .map(|c| eval.column(c).into_owned())
        .collect();
    let (rank, _) = rank_basis(&columns, tol);
    rank == cs.dim()
}

/// Selects a subset of at most `dim` elements whose evaluations still
/// separate the coefficient space, by pivoted row selection in index
/// order. Requires the input subset to separate it already.
pub fn reduce_omega(cs: &CoefficientSpace, omega: &OmegaSet, tol: f64) -> Result<OmegaSet> {
    let eval = cs.eval_on(omega);
    let rows: Vec<Vector> = (0..eval.nrows())
        .map(|r| eval.row(r).transpose())
        .collect();
    let (_, selected) = rank_basis(&rows, tol);
    let subset = omega.subset(&selected);
    if !condition_star(cs, &subset, tol) {
        let columns: Vec<Vector> = (0..eval.ncols())
            .map(|c| eval.column(c).into_owned())
            .collect();
        let (rank, _) = rank_basis(&columns, tol);
        return Err(Error::StarViolated {
            rank,
            dim: cs.dim(),
        });
    }
    Ok(subset)
}

/// The certified constant: LP optimum `c'`, the operator-norm factor `C`,
/// and the effective bound `c_eff = 1 / (C c')`, together with the dual
/// certificate and the subset used.
#[derive(Debug, Clone)]
pub struct BoundCertificate {
    /// LP optimum: the largest constant part over the evaluation unit ball.
    pub c_prime: f64,
    /// `sup_j ||rho(omega_j^{-1})||` in the adapted inner product.
    pub c_norm: f64,
    /// The effective lower-bound constant `1 / (c_norm * c_prime)`.
    pub c_eff: f64,
    /// Primal optimizer over the coefficient basis.
    pub lp_primal: Vector,
    /// Dual certificate, one weight per subset element.
    pub lp_dual: Vector,
    /// Verified duality gap.
    pub duality_gap: f64,
    /// Whether evaluation separates the full coefficient space; when it
    /// does not, the optimum is still finite provided the constant-part
    /// functional lies in the span of the evaluations, which is checked.
    pub star_strict: bool,
    /// The subset the certificate refers to.
    pub omega: OmegaSet,
}

/// Computes the certificate on the given subset. `StarViolated` when the
/// constant-part functional escapes the span of the evaluation functionals
/// (the supremum is then infinite).
pub fn compute_constant(
    cs: &CoefficientSpace,
    omega: &OmegaSet,
    q: &AdaptedInnerProduct,
    tol: f64,
) -> Result<BoundCertificate> {
    if cs.dim_v == 0 {
        return Err(Error::ZeroRep);
    }
    if omega.is_empty() || cs.dim() == 0 {
        return Err(Error::StarViolated {
            rank: 0,
            dim: cs.dim(),
        });
    }
    let eval = cs.eval_on(omega);
    let d = cs.dim();
    let columns: Vec<Vector> = (0..d).map(|c| eval.column(c).into_owned()).collect();
    let (rank, col_sel) = rank_basis(&columns, tol);
    let star_strict = rank == d;

    let (lp, primal_full) = if star_strict {
        let problem = LpProblem::with_unit_bounds(cs.pi_r.clone(), eval.clone());
        let sol = lp_max(&problem, tol.max(1e-9))?;
        let primal = sol.primal.clone();
        (sol, primal)
    } else {
        // Evaluation does not separate the space. The supremum stays finite
        // exactly when pi_r annihilates the evaluation kernel; restrict to
        // pivot coordinates, solve there, and scatter back.
        let kernel = null_space(&eval, tol);
        let mut worst = 0.0_f64;
        for j in 0..kernel.ncols() {
            worst = worst.max(cs.pi_r.dot(&kernel.column(j).into_owned()).abs());
        }
        if worst > tol * cs.pi_r.norm().max(1.0) * 1e3 {
            return Err(Error::StarViolated { rank, dim: d });
        }
        let mut restricted = Mat::zeros(omega.len(), rank);
        for (jj, &c) in col_sel.iter().enumerate() {
            restricted.set_column(jj, &eval.column(c));
        }
        let r_restricted = Vector::from_fn(rank, |i, _| cs.pi_r[col_sel[i]]);
        let problem = LpProblem::with_unit_bounds(r_restricted, restricted);
        let sol = lp_max(&problem, tol.max(1e-9))?;
        let mut primal = Vector::zeros(d);
        for (jj, &c) in col_sel.iter().enumerate() {
            primal[c] = sol.primal[jj];
        }
        // The scattered optimizer must be feasible for the full system.
        let image = &eval * &primal;
        if image.iter().any(|&x| x.abs() > 1.0 + 1e-8) {
            return Err(Error::Numerical(
                "restricted optimizer infeasible for the full evaluation system".into(),
            ));
        }
        (sol, primal)
    };

    let c_prime = lp.value;
    if c_prime < 1.0 - 1e-9 {
        return Err(Error::Numerical(format!(
            "optimum {c_prime} fell below the constant-function witness"
        )));
    }
    let c_norm = (0..omega.len())
        .map(|j| q.op_norm(omega.rho_inv(j)))
        .fold(0.0_f64, f64::max);
    Ok(BoundCertificate {
        c_prime,
        c_norm,
        c_eff: 1.0 / (c_norm * c_prime),
        lp_primal: primal_full,
        lp_dual: lp.dual,
        duality_gap: lp.gap,
        star_strict,
        omega: omega.clone(),
    })
}

/// `sup_j ||rho_y rho(omega_j) v||_Q / ||v||_Q`.
pub fn omega_sup_ratio(
    omega: &OmegaSet,
    q: &AdaptedInnerProduct,
    rho_y: &Mat,
    v: &Vector,
) -> f64 {
    let nv = q.norm(v);
    (0..omega.len())
        .map(|j| q.norm(&(rho_y * omega.rho(j) * v)))
        .fold(0.0_f64, f64::max)
        / nv
}

/// Relative slack applied to the certified constant before flagging a
/// sampled violation.
pub const DEFAULT_VERIFY_SLACK: f64 = 1e-6;

/// Outcome of a sampled verification run.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub samples: usize,
    pub violations: usize,
    /// Smallest observed `sup_omega ||rho(y omega) v||_Q` over unit vectors.
    pub min_ratio: f64,
    /// The bound tested against: `c_eff (1 - slack)`.
    pub threshold: f64,
}

/// Draws `(y, v)` pairs with `y` from `Y = K exp(p)` at the given radius
/// and `v` uniform on the Q-unit sphere, and checks the certified lower
/// bound on every pair at relative slack [`DEFAULT_VERIFY_SLACK`]. Each
/// sample uses its own `(seed, index)` substream.
#[allow(clippy::too_many_arguments)]
pub fn verify_bound(
    alg: &LieAlgebra,
    pair: &ReductivePair,
    rep: &Representation,
    q: &AdaptedInnerProduct,
    cert: &BoundCertificate,
    samples: usize,
    radius: f64,
    seed: u64,
) -> VerifyReport {
    verify_bound_with_slack(
        alg,
        pair,
        rep,
        q,
        cert,
        samples,
        radius,
        seed,
        DEFAULT_VERIFY_SLACK,
    )
}

/// [`verify_bound`] with an explicit relative slack.
#[allow(clippy::too_many_arguments)]
pub fn verify_bound_with_slack(
    alg: &LieAlgebra,
    pair: &ReductivePair,
    rep: &Representation,
    q: &AdaptedInnerProduct,
    cert: &BoundCertificate,
    samples: usize,
    radius: f64,
    seed: u64,
    slack: f64,
) -> VerifyReport {
    let threshold = cert.c_eff * (1.0 - slack);
    let mut violations = 0;
    let mut min_ratio = f64::INFINITY;
    for i in 0..samples {
        let mut rng = sampling::substream(seed, i as u64);
        let (_, kappa, p) = sample_y_parts(alg, pair, radius, &mut rng);
        let rho_y = expm(&rep.apply(&pair.k_to_algebra(&kappa)))
            * expm(&rep.apply(&pair.p_to_algebra(&p)));
        let mut v = sampling::unit_sphere(&mut rng, rep.dim_v());
        v /= q.norm(&v);
        let ratio = omega_sup_ratio(&cert.omega, q, &rho_y, &v);
        min_ratio = min_ratio.min(ratio);
        if ratio < threshold {
            violations += 1;
        }
    }
    VerifyReport {
        samples,
        violations,
        min_ratio,
        threshold,
    }
}
