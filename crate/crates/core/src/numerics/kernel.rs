//! Rank-revealing kernels, order-respecting basis selection, and subspace
//! arithmetic over coordinate vectors.

use super::{Mat, Vector};

/// Orthonormal basis of the kernel of `a`, as the columns of the returned
/// matrix. A singular value is treated as zero when it is at most
/// `tol * sigma_max`.
pub fn null_space(a: &Mat, tol: f64) -> Mat {
    null_space_with_scale(a, tol, 0.0)
}

/// [`null_space`] with an absolute scale floor: the zero threshold is
/// `tol * max(sigma_max, scale)`. Used when `a` is a difference of
/// O(scale) operators and may degenerate to pure roundoff noise.
pub fn null_space_with_scale(a: &Mat, tol: f64, scale: f64) -> Mat {
    let n = a.ncols();
    if n == 0 {
        return Mat::zeros(0, 0);
    }
    // Pad with zero rows so the SVD carries all n right singular vectors.
    let work = if a.nrows() < n {
        let mut w = Mat::zeros(n, n);
        w.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
        w
    } else {
        a.clone()
    };
    let svd = work.svd(false, true);
    let vt = svd.v_t.expect("svd with v_t");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let threshold = tol * sigma_max.max(scale);
    let mut cols: Vec<usize> = Vec::new();
    for i in 0..svd.singular_values.len() {
        if svd.singular_values[i] <= threshold {
            cols.push(i);
        }
    }
    let mut basis = Mat::zeros(n, cols.len());
    for (dst, &src) in cols.iter().enumerate() {
        basis.set_column(dst, &vt.row(src).transpose());
    }
    basis
}

/// Order-respecting selection of a spanning subset: walks the vectors in the
/// given order and keeps each one whose residual against the span of the
/// already-kept vectors exceeds `tol * scale`, where `scale` is the largest
/// input norm. Returns the rank and the kept indices (ascending).
pub fn rank_basis(vectors: &[Vector], tol: f64) -> (usize, Vec<usize>) {
    let (_, selected) = mgs_select(vectors, tol);
    (selected.len(), selected)
}

/// Orthonormal basis of the span of `vectors` (order-respecting pivots).
pub fn orthonormal_span(vectors: &[Vector], tol: f64) -> Vec<Vector> {
    mgs_select(vectors, tol).0
}

/// Modified Gram-Schmidt with one re-orthogonalization pass.
fn mgs_select(vectors: &[Vector], tol: f64) -> (Vec<Vector>, Vec<usize>) {
    let scale = vectors.iter().map(|v| v.norm()).fold(0.0_f64, f64::max);
    if scale == 0.0 {
        return (Vec::new(), Vec::new());
    }
    let mut q: Vec<Vector> = Vec::new();
    let mut selected = Vec::new();
    for (idx, v) in vectors.iter().enumerate() {
        let mut r = v.clone();
        for _ in 0..2 {
            for u in &q {
                let c = u.dot(&r);
                r -= u * c;
            }
        }
        let norm = r.norm();
        if norm > tol * scale {
            q.push(r / norm);
            selected.push(idx);
        }
    }
    (q, selected)
}

/// Residual of `v` against the span of an orthonormal family, relative to
/// `max(1, ||v||)`.
pub fn containment_residual(orthonormal: &[Vector], v: &Vector) -> f64 {
    let mut r = v.clone();
    for u in orthonormal {
        let c = u.dot(&r);
        r -= u * c;
    }
    r.norm() / v.norm().max(1.0)
}

/// True when every vector of `vs` lies in the span of `span` within
/// `tol * 1e3` relative residual.
pub fn span_contains(span: &[Vector], vs: &[Vector], tol: f64) -> bool {
    let q = orthonormal_span(span, tol.min(1e-6));
    vs.iter().all(|v| containment_residual(&q, v) <= tol * 1e3)
}

/// Orthonormal basis of the intersection of two spans, computed from the
/// kernel of the concatenated constraint matrix [U | -W].
pub fn subspace_intersection(u: &[Vector], w: &[Vector], tol: f64) -> Vec<Vector> {
    if u.is_empty() || w.is_empty() {
        return Vec::new();
    }
    let dim = u[0].len();
    let mut stacked = Mat::zeros(dim, u.len() + w.len());
    for (j, v) in u.iter().enumerate() {
        stacked.set_column(j, v);
    }
    for (j, v) in w.iter().enumerate() {
        stacked.set_column(u.len() + j, &(-v));
    }
    let kernel = null_space(&stacked, tol);
    let mut members = Vec::new();
    for j in 0..kernel.ncols() {
        let mut m = Vector::zeros(dim);
        for (i, v) in u.iter().enumerate() {
            m += v * kernel[(i, j)];
        }
        members.push(m);
    }
    orthonormal_span(&members, tol)
}

/// Subspace equality by dimension plus mutual containment at `tol`.
pub fn subspaces_equal(u: &[Vector], w: &[Vector], tol: f64) -> bool {
    let qu = orthonormal_span(u, tol);
    let qw = orthonormal_span(w, tol);
    if qu.len() != qw.len() {
        return false;
    }
    let ok_uw = qu.iter().all(|v| containment_residual(&qw, v) <= tol * 1e3);
    let ok_wu = qw.iter().all(|v| containment_residual(&qu, v) <= tol * 1e3);
    ok_uw && ok_wu
}
