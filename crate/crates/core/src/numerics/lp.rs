//! Small dense linear program: maximize `r . x` subject to `|E x|_inf <= u`,
//! solved through its dual `min sum u_j |lambda_j|  s.t.  E^T lambda = r`
//! with a two-phase simplex under Bland's rule. Both the optimizer and the
//! dual certificate are returned and cross-checked, never trusted.

use super::{lstsq, rank_basis, Mat, Vector};
use crate::error::{Error, Result};

/// `max r.x` over `|(E x)_j| <= bounds_j`.
#[derive(Debug, Clone)]
pub struct LpProblem {
    /// Objective functional `r`.
    pub objective: Vector,
    /// Constraint rows (evaluation functionals), one row per bound.
    pub constraints: Mat,
    /// Per-row absolute bound, all positive.
    pub bounds: Vector,
}

impl LpProblem {
    /// Problem with unit bounds on every row.
    pub fn with_unit_bounds(objective: Vector, constraints: Mat) -> Self {
        let bounds = Vector::from_element(constraints.nrows(), 1.0);
        LpProblem {
            objective,
            constraints,
            bounds,
        }
    }
}

/// Optimum, optimizer, and dual certificate of a solved [`LpProblem`].
#[derive(Debug, Clone)]
pub struct LpSolution {
    /// Optimal value `r . x = sum u_j |lambda_j|`.
    pub value: f64,
    /// Primal optimizer `x`.
    pub primal: Vector,
    /// Dual certificate `lambda` with `E^T lambda = r`.
    pub dual: Vector,
    /// Verified duality gap `|r.x - sum u_j |lambda_j||`.
    pub gap: f64,
}

/// Solves the program. `Unbounded` when `r` leaves the row space of `E`,
/// `Degenerate` when `E` is column-rank-deficient.
pub fn lp_max(problem: &LpProblem, tol: f64) -> Result<LpSolution> {
    let e = &problem.constraints;
    let r = &problem.objective;
    let u = &problem.bounds;
    let (k, d) = e.shape();
    if r.len() != d || u.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "objective {} and bounds {} against {k}x{d} constraints",
            r.len(),
            u.len()
        )));
    }
    if k == 0 || d == 0 {
        return Err(Error::InvalidInput("empty linear program".into()));
    }
    if u.iter().any(|&b| b <= 0.0) {
        return Err(Error::InvalidInput("bounds must be positive".into()));
    }

    // r must lie in the row space of E, otherwise the objective direction is
    // unconstrained.
    let et = e.transpose();
    let lam0 = lstsq(&et, r);
    let residual = (&et * &lam0 - r).norm();
    if residual > tol * r.norm().max(1.0) {
        return Err(Error::Unbounded { residual });
    }

    let cols: Vec<Vector> = (0..d).map(|j| e.column(j).into_owned()).collect();
    let (rank, _) = rank_basis(&cols, tol);
    if rank < d {
        return Err(Error::Degenerate { rank, cols: d });
    }

    // Standard form for the dual: A z = r, z >= 0 with
    // A = [E^T | -E^T] and costs (u, u); z = (lambda^+, lambda^-).
    let mut a = Mat::zeros(d, 2 * k);
    a.view_mut((0, 0), (d, k)).copy_from(&et);
    a.view_mut((0, k), (d, k)).copy_from(&(-&et));
    let mut costs = Vector::zeros(2 * k);
    for j in 0..k {
        costs[j] = u[j];
        costs[k + j] = u[j];
    }
    let (z, x) = simplex_standard(&a, r, &costs)?;

    let dual = Vector::from_fn(k, |j, _| z[j] - z[k + j]);
    let value: f64 = (0..k).map(|j| u[j] * dual[j].abs()).sum();

    // Certificate checks: the solver's word is not enough.
    let scale = value.abs().max(1.0);
    let primal_image = e * &x;
    let primal_excess = (0..k)
        .map(|j| primal_image[j].abs() - u[j])
        .fold(f64::MIN, f64::max);
    let dual_residual = (&et * &dual - r).norm();
    let gap = (r.dot(&x) - value).abs();
    if primal_excess > tol * scale || dual_residual > tol * r.norm().max(1.0) || gap > tol * scale {
        return Err(Error::Numerical(format!(
            "lp certificate check failed: excess {primal_excess:.3e}, dual residual \
             {dual_residual:.3e}, gap {gap:.3e}"
        )));
    }

    Ok(LpSolution {
        value,
        primal: x,
        dual,
        gap,
    })
}

/// Two-phase revised simplex for `min c.z  s.t.  A z = b, z >= 0` with A of
/// full row rank. Returns the optimizer and the equality multipliers.
fn simplex_standard(a: &Mat, b: &Vector, costs: &Vector) -> Result<(Vector, Vector)> {
    let (p, q) = a.shape();
    let scale = a.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    let eps = 1e-11 * scale;

    // Orient rows so the artificial start is feasible.
    let mut awork = a.clone();
    let mut bwork = b.clone();
    let mut flip = vec![1.0_f64; p];
    for i in 0..p {
        if bwork[i] < 0.0 {
            flip[i] = -1.0;
            bwork[i] = -bwork[i];
            for j in 0..q {
                awork[(i, j)] = -awork[(i, j)];
            }
        }
    }

    let mut basis: Vec<usize> = (q..q + p).collect(); // artificials
    let column = |j: usize| -> Vector {
        if j < q {
            awork.column(j).into_owned()
        } else {
            let mut e = Vector::zeros(p);
            e[j - q] = 1.0;
            e
        }
    };

    let solve_basis = |basis: &[usize], rhs: &Vector, transpose: bool| -> Result<Vector> {
        let mut bmat = Mat::zeros(p, p);
        for (i, &j) in basis.iter().enumerate() {
            bmat.set_column(i, &column(j));
        }
        let m = if transpose { bmat.transpose() } else { bmat };
        m.lu()
            .solve(rhs)
            .ok_or_else(|| Error::Numerical("singular simplex basis".into()))
    };

    let run_phase = |basis: &mut Vec<usize>, phase_costs: &dyn Fn(usize) -> f64, allow: &dyn Fn(usize) -> bool| -> Result<()> {
        for _round in 0..20_000 {
            let cb = Vector::from_fn(p, |i, _| phase_costs(basis[i]));
            let y = solve_basis(basis, &cb, true)?;
            // Bland: first improving column in index order.
            let mut entering = None;
            for j in 0..q {
                if basis.contains(&j) || !allow(j) {
                    continue;
                }
                let reduced = phase_costs(j) - y.dot(&column(j));
                if reduced < -eps {
                    entering = Some(j);
                    break;
                }
            }
            let entering = match entering {
                Some(j) => j,
                None => return Ok(()),
            };
            let xb = solve_basis(basis, &bwork, false)?;
            let w = solve_basis(basis, &column(entering), false)?;
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..p {
                if w[i] > eps {
                    let ratio = xb[i].max(0.0) / w[i];
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - 1e-14 || (ratio <= lr + 1e-14 && basis[i] < basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let (li, _) = leave.ok_or_else(|| {
                Error::Numerical("simplex direction unbounded below".into())
            })?;
            basis[li] = entering;
        }
        Err(Error::Numerical("simplex iteration cap reached".into()))
    };

    // Phase 1: minimize the artificial mass.
    let art_cost = |j: usize| if j < q { 0.0 } else { 1.0 };
    run_phase(&mut basis, &art_cost, &|_| true)?;
    let xb = solve_basis(&basis, &bwork, false)?;
    let art_mass: f64 = basis
        .iter()
        .zip(xb.iter())
        .filter(|(&j, _)| j >= q)
        .map(|(_, &v)| v.abs())
        .sum();
    if art_mass > 1e-8 * bwork.norm().max(1.0) {
        return Err(Error::Numerical(format!(
            "equality system infeasible (artificial mass {art_mass:.3e})"
        )));
    }

    // Drive any artificial still basic (at zero) out of the basis.
    for i in 0..p {
        if basis[i] >= q {
            let mut replaced = false;
            for j in 0..q {
                if basis.contains(&j) {
                    continue;
                }
                let w = solve_basis(&basis, &column(j), false)?;
                if w[i].abs() > eps {
                    basis[i] = j;
                    replaced = true;
                    break;
                }
            }
            if !replaced {
                return Err(Error::Numerical(
                    "redundant equality row survived phase one".into(),
                ));
            }
        }
    }

    // Phase 2 over the real columns only.
    let real_cost = |j: usize| if j < q { costs[j] } else { f64::INFINITY };
    run_phase(&mut basis, &real_cost, &|j| j < q)?;

    let xb = solve_basis(&basis, &bwork, false)?;
    let mut z = Vector::zeros(q);
    for (i, &j) in basis.iter().enumerate() {
        if j < q {
            z[j] = xb[i].max(0.0);
        }
    }
    let cb = Vector::from_fn(p, |i, _| costs[basis[i]]);
    let mut y = solve_basis(&basis, &cb, true)?;
    for i in 0..p {
        y[i] *= flip[i];
    }
    Ok((z, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_box() {
        // max x s.t. |x| <= 1
        let p = LpProblem::with_unit_bounds(
            Vector::from_column_slice(&[1.0]),
            Mat::from_row_slice(1, 1, &[1.0]),
        );
        let sol = lp_max(&p, 1e-9).unwrap();
        assert!((sol.value - 1.0).abs() < 1e-10);
        assert!((sol.primal[0] - 1.0).abs() < 1e-10);
        assert!(sol.gap <= 1e-9);
    }

    #[test]
    fn three_point_evaluation_system() {
        // Rows (1, u, 1/u) at u in {e^-2, 1, e^2}; objective picks the
        // constant coordinate. Oracle: with E invertible the unique dual is
        // the first row of E^{-1}, so the optimum is its l1 norm.
        let us = [(-2.0_f64).exp(), 1.0, 2.0_f64.exp()];
        let mut e = Mat::zeros(3, 3);
        for (j, &u) in us.iter().enumerate() {
            e[(j, 0)] = 1.0;
            e[(j, 1)] = u;
            e[(j, 2)] = 1.0 / u;
        }
        let p = LpProblem::with_unit_bounds(Vector::from_column_slice(&[1.0, 0.0, 0.0]), e.clone());
        let sol = lp_max(&p, 1e-9).unwrap();

        let inv = e.try_inverse().unwrap();
        let oracle: f64 = (0..3).map(|j| inv[(0, j)].abs()).sum();
        assert!((sol.value - oracle).abs() < 1e-9);
        // coth(1)^2, the closed form of the same quantity
        let coth2 = (1.0 / 1.0_f64.tanh()).powi(2);
        assert!((sol.value - coth2).abs() < 1e-9);
        assert!(sol.gap <= 1e-9);
    }

    #[test]
    fn objective_outside_row_space_is_unbounded() {
        let p = LpProblem::with_unit_bounds(
            Vector::from_column_slice(&[0.0, 1.0]),
            Mat::from_row_slice(1, 2, &[1.0, 0.0]),
        );
        assert!(matches!(lp_max(&p, 1e-9), Err(Error::Unbounded { .. })));
    }

    #[test]
    fn rank_deficient_columns_are_degenerate() {
        let p = LpProblem::with_unit_bounds(
            Vector::from_column_slice(&[1.0, 1.0]),
            Mat::from_row_slice(2, 2, &[1.0, 1.0, 2.0, 2.0]),
        );
        assert!(matches!(lp_max(&p, 1e-9), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn wider_box_scales_the_plain_problem() {
        let mut p = LpProblem::with_unit_bounds(
            Vector::from_column_slice(&[1.0]),
            Mat::from_row_slice(1, 1, &[1.0]),
        );
        p.bounds[0] = 3.0;
        let sol = lp_max(&p, 1e-9).unwrap();
        assert!((sol.value - 3.0).abs() < 1e-10);
    }
}
