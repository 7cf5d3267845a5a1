//! Small dense helpers over a diagonal indefinite metric.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spaces::DiagonalMetric;

pub fn columns<T: Real>(vs: &[DVector<T>], rows: usize) -> DMatrix<T> {
    let mut m = DMatrix::zeros(rows, vs.len());
    for (j, v) in vs.iter().enumerate() {
        m.set_column(j, v);
    }
    m
}

/// `W (Wᵀ η W)⁻¹ Wᵀ η`: the metric-orthogonal projector onto `span W`.
pub fn projector_onto<T: Real>(metric: &DiagonalMetric<T>, w: &DMatrix<T>) -> Result<DMatrix<T>> {
    let eta = metric.matrix();
    // an orthonormal basis of the column space keeps the Gram matrix well conditioned
    let q = if w.ncols() <= w.nrows() { w.clone().qr().q() } else { w.clone() };
    let qt_eta = q.transpose() * &eta;
    let gram = &qt_eta * &q;
    if smallest_singular_value(&gram) < T::lit(1e-12) {
        return Err(Error::Degenerate("induced metric on the subspace is singular".into()));
    }
    let inv = gram
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("induced metric on the subspace is singular".into()))?;
    Ok(&q * inv * qt_eta)
}

/// Eigenpairs of the Gram matrix on the smaller side of `m`, largest first:
/// `m mᵀ` when `m` is wide, `mᵀ m` otherwise.
fn gram_eigen<T: Real>(m: &DMatrix<T>) -> (DVector<T>, DMatrix<T>) {
    let g = if m.nrows() < m.ncols() { m * m.transpose() } else { m.transpose() * m };
    gram_eigen_of_symmetric(g)
}

/// Singular values, largest first, as square roots of Gram eigenvalues.
/// Values below about `1e-8 σ_max` are not resolved.
pub fn singular_values<T: Real>(m: &DMatrix<T>) -> DVector<T> {
    gram_eigen(m).0.map(|l| if l > T::zero() { l.sqrt() } else { T::zero() })
}

/// Number of singular values above `tol · σ_max`.
pub fn numerical_rank<T: Real>(m: &DMatrix<T>, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = singular_values(m);
    let smax = sv[0];
    if smax == T::zero() {
        return 0;
    }
    sv.iter().filter(|&&s| s > T::lit(tol) * smax).count()
}

pub fn smallest_singular_value<T: Real>(m: &DMatrix<T>) -> T {
    let sv = singular_values(m);
    sv[sv.len() - 1]
}

/// Minimum-norm solution of `m x = b` restricted to the `keep` largest
/// singular directions of a wide `m`.
pub fn truncated_solve<T: Real>(m: &DMatrix<T>, b: &DVector<T>, keep: usize) -> DVector<T> {
    let (vals, vecs) = gram_eigen(m);
    let mut y = DVector::zeros(m.nrows());
    for k in 0..keep.min(vals.len()) {
        if vals[k] > T::zero() {
            let u = vecs.column(k);
            y += u * (u.dot(b) / vals[k]);
        }
    }
    m.transpose() * y
}

fn gram_eigen_of_symmetric<T: Real>(g: DMatrix<T>) -> (DVector<T>, DMatrix<T>) {
    let se = g.symmetric_eigen();
    let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].partial_cmp(&se.eigenvalues[a]).unwrap_or(std::cmp::Ordering::Equal));
    let vals = DVector::from_iterator(order.len(), order.iter().map(|&k| se.eigenvalues[k]));
    let vecs = DMatrix::from_fn(se.eigenvectors.nrows(), order.len(), |i, j| se.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

/// Least squares `min ‖A x − b‖`; returns `(x, residual)`. Householder QR for
/// full column rank, otherwise the truncated normal equations.
pub fn least_squares<T: Real>(a: &DMatrix<T>, b: &DVector<T>) -> (DVector<T>, T) {
    let (rows, cols) = a.shape();
    let mut x = None;
    if rows >= cols && cols > 0 {
        let qr = a.clone().qr();
        let r = qr.r();
        let diag: Vec<T> = (0..cols).map(|i| r[(i, i)].abs()).collect();
        let dmax = diag.iter().fold(T::zero(), |acc, &d| if d > acc { d } else { acc });
        if diag.iter().all(|&d| d > T::lit(1e-12) * dmax) {
            x = r.solve_upper_triangular(&(qr.q().transpose() * b));
        }
    }
    let x = x.unwrap_or_else(|| {
        let at = a.transpose();
        let (vals, vecs) = gram_eigen_of_symmetric(&at * a);
        let rhs = at * b;
        let mut out = DVector::zeros(cols);
        for k in 0..vals.len() {
            if vals.len() > 0 && vals[k] > T::lit(1e-13) * vals[0] {
                let v = vecs.column(k);
                out += v * (v.dot(&rhs) / vals[k]);
            }
        }
        out
    });
    let r = (a * &x - b).norm();
    (x, r)
}

/// Largest absolute entry.
pub fn max_abs<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |a, &b| if b.abs() > a { b.abs() } else { a })
}
