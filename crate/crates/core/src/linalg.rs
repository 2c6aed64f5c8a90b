//! Small dense linear-algebra helpers shared by the geometry modules.

use nalgebra::{DMatrix, DVector};

/// Relative threshold on singular values when deciding rank.
pub(crate) const RANK_TOL: f64 = 1e-10;

pub(crate) fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank of `m` with an absolute-plus-relative cutoff.
pub(crate) fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let s = singular_values(m);
    let scale = s.first().copied().unwrap_or(0.0).max(1.0);
    s.iter().filter(|&&v| v > tol * scale).count()
}

/// Dimension of the affine hull of `points` (-1 encoded as `None` when empty).
pub(crate) fn affine_dimension(points: &[DVector<f64>]) -> Option<usize> {
    let first = points.first()?;
    if points.len() == 1 {
        return Some(0);
    }
    let n = first.len();
    let m = DMatrix::from_fn(points.len() - 1, n, |r, c| points[r + 1][c] - first[c]);
    Some(rank(&m, RANK_TOL))
}

/// Unit vector orthogonal to the `n - 1` given vectors of length `n`, or
/// `None` when they are not linearly independent.
pub(crate) fn null_vector(rows: &[DVector<f64>], n: usize) -> Option<DVector<f64>> {
    debug_assert_eq!(rows.len() + 1, n);
    if n == 1 {
        return Some(DVector::from_element(1, 1.0));
    }
    // pad with a zero row so the SVD exposes the full right basis
    let m = DMatrix::from_fn(n, n, |r, c| if r < rows.len() { rows[r][c] } else { 0.0 });
    let svd = m.svd(false, true);
    let v_t = svd.v_t?;
    let s = &svd.singular_values;
    let scale = s.iter().copied().fold(0.0f64, f64::max).max(1.0);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    if s[order[n - 2]] <= RANK_TOL * scale {
        return None;
    }
    let k = order[n - 1];
    let v = v_t.row(k).transpose();
    Some(v.normalize())
}

/// Solve a square system, rejecting near-singular matrices.
pub(crate) fn solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let s = singular_values(a);
    let smax = s.first().copied().unwrap_or(0.0);
    let smin = s.last().copied().unwrap_or(0.0);
    if smax == 0.0 || smin <= RANK_TOL * smax.max(1.0) {
        return None;
    }
    a.clone().lu().solve(b)
}

/// In-place Cholesky factorization `a = L Lᵀ` of a row-major `n × n`
/// symmetric matrix; `L` overwrites the lower triangle. Returns `false` if
/// `a` is not numerically positive definite.
fn cholesky_factor(a: &mut [f64], n: usize) -> bool {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > 0.0) {
            return false;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    true
}

/// Solve `L y = b` in place for a factor from [`cholesky_factor`].
fn forward_substitute(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

/// In-place Cholesky solve of the dense symmetric positive definite system
/// `a x = b` (row-major `n × n`). Returns `false` if `a` is not numerically
/// positive definite. The solution overwrites `b`.
pub(crate) fn cholesky_solve(a: &mut [f64], n: usize, b: &mut [f64]) -> bool {
    if !cholesky_factor(a, n) {
        return false;
    }
    forward_substitute(a, n, b);
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= a[k * n + i] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    true
}

/// Determinant of a Cholesky factor stored by [`cholesky_solve`] (product of
/// squared diagonal entries).
pub(crate) fn cholesky_det(l: &[f64], n: usize) -> f64 {
    (0..n).map(|i| l[i * n + i] * l[i * n + i]).product()
}
