//! One-sided Jacobi singular value decomposition.
//!
//! The general-purpose SVD shipped with nalgebra 0.35 can lose several digits
//! on small matrices whose entries span scales (observed: a singular value of
//! 1.0000071 for an orthogonal projector, and singular vectors off by 4e-3).
//! Rank decisions, kernels and orthonormal bases in this crate need machine
//! accuracy, so they are built on this routine instead: one-sided Jacobi
//! converges to high *relative* accuracy and the right factor `V` is an exact
//! product of plane rotations, hence orthogonal to machine precision.
//!
//! The factorization is `A = U diag(sigma) Vᵀ` with `A` of size `m x n`, `U`
//! of size `m x n` (columns beyond the rank are zero), `sigma` of length `n`
//! sorted in descending order, and `V` a full `n x n` orthogonal matrix.

use super::Mat;

pub(crate) struct JacobiSvd {
    /// `m x n`; column `j` is the left singular vector for `sigma[j]`, or zero
    /// when `sigma[j]` vanishes at working precision.
    pub u: Mat,
    /// All `n` values; at most `min(m, n)` can be nonzero.
    pub sigma: Vec<f64>,
    /// Full `n x n` orthogonal right factor.
    pub v: Mat,
}

const MAX_SWEEPS: usize = 64;

pub(crate) fn jacobi_svd(a: &Mat) -> JacobiSvd {
    let m = a.nrows();
    let n = a.ncols();
    let mut w = a.clone();
    let mut v = Mat::identity(n, n);
    if m > 0 && n > 1 {
        let eps = f64::EPSILON;
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let wp = w.column(p);
                    let wq = w.column(q);
                    let alpha = wp.dot(&wp);
                    let beta = wq.dot(&wq);
                    let gamma = wp.dot(&wq);
                    if gamma == 0.0 || gamma.abs() <= eps * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    // Rotation angle zeroing the off-diagonal Gram entry.
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for i in 0..m {
                        let wip = w[(i, p)];
                        let wiq = w[(i, q)];
                        w[(i, p)] = c * wip - s * wiq;
                        w[(i, q)] = s * wip + c * wiq;
                    }
                    for i in 0..n {
                        let vip = v[(i, p)];
                        let viq = v[(i, q)];
                        v[(i, p)] = c * vip - s * viq;
                        v[(i, q)] = s * vip + c * viq;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("non-finite norm"));

    let sigma_max = order.first().map_or(0.0, |&j| norms[j]);
    let floor = sigma_max * (m.max(n)) as f64 * f64::EPSILON;
    let mut u = Mat::zeros(m, n);
    let mut v_sorted = Mat::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        sigma.push(s);
        if s > floor {
            let col = w.column(src) / s;
            u.set_column(dst, &col);
        }
        v_sorted.set_column(dst, &v.column(src));
    }
    JacobiSvd {
        u,
        sigma,
        v: v_sorted,
    }
}
