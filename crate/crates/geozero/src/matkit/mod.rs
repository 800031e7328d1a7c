//! Dense matrix kernels the rest of the crate is built on.
//!
//! Everything operates on [`Mat`] (`nalgebra::DMatrix<f64>`) and takes an explicit
//! [`TolerancePolicy`] so that every rank/equality decision in the crate is made
//! the same way.  Basis-producing operations normalize column signs (first entry
//! of significant magnitude is positive) so results are reproducible bit for bit.

mod jacobi;
mod schur;
mod sylvester;

pub use schur::{order_schur_stable_first, real_schur, SchurForm};
pub use sylvester::solve_sylvester;

use jacobi::jacobi_svd;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

/// Dense dynamically-sized matrix of `f64`.
pub type Mat = DMatrix<f64>;

/// Complex scalar used for eigenvalues and zero sets.
pub type Cx = Complex<f64>;

/// Central tolerance policy.
///
/// * `rank_tol` — base relative threshold for singular-value truncation.  A
///   singular value counts toward the rank when it exceeds
///   `rank_tol * max(rows, cols) * sigma_max`, so the default `1e-9` yields the
///   effective relative threshold `1e-9 * max(rows, cols)`.
/// * `eq_tol` — absolute threshold for residual and identity checks (scaled by
///   the magnitude of the data where an operation documents it).
/// * `stability_margin` — half width of the strip around the imaginary axis:
///   an eigenvalue is *stable* only when `re < -stability_margin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolerancePolicy {
    pub rank_tol: f64,
    pub eq_tol: f64,
    pub stability_margin: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            rank_tol: 1e-9,
            eq_tol: 1e-9,
            stability_margin: 1e-9,
        }
    }
}

impl TolerancePolicy {
    /// Truncation threshold for the singular values of a `rows x cols` matrix
    /// whose largest singular value is `sigma_max`.
    pub fn rank_threshold(&self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        self.rank_tol * rows.max(cols).max(1) as f64 * sigma_max
    }
}

/// Returns the position of the first non-finite entry, if any.
pub fn find_non_finite(m: &Mat) -> Option<(usize, usize)> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m[(i, j)].is_finite() {
                return Some((i, j));
            }
        }
    }
    None
}

/// Fails with [`Error::NonFinite`] when `m` has a NaN or infinite entry.
pub fn ensure_finite(m: &Mat) -> Result<()> {
    match find_non_finite(m) {
        Some((row, col)) => Err(Error::NonFinite { row, col }),
        None => Ok(()),
    }
}

/// Flips every column whose first entry of magnitude `> eq_tol` is negative,
/// making basis output deterministic.
fn normalize_column_signs(m: &mut Mat, eq_tol: f64) {
    for j in 0..m.ncols() {
        let lead = (0..m.nrows()).find(|&i| m[(i, j)].abs() > eq_tol);
        if let Some(i) = lead {
            if m[(i, j)] < 0.0 {
                for k in 0..m.nrows() {
                    m[(k, j)] = -m[(k, j)];
                }
            }
        }
    }
}

/// Numerical rank by singular-value truncation.
pub fn rank(m: &Mat, tol: &TolerancePolicy) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = jacobi_svd(m).sigma;
    let thresh = tol.rank_threshold(m.nrows(), m.ncols(), sv[0]);
    sv.iter().filter(|&&s| s > thresh).count()
}

/// Orthonormal basis of the column space (image) of `m`.
///
/// Returns an `nrows x rank` matrix with orthonormal, sign-normalized columns.
pub fn column_space_basis(m: &Mat, tol: &TolerancePolicy) -> Mat {
    column_space_basis_scaled(m, 0.0, tol)
}

/// [`column_space_basis`] with an explicit data scale: singular values are
/// truncated against `max(sigma_max, scale)`.
///
/// Needed whenever `m` is a projection residue whose entries may consist
/// entirely of roundoff: a threshold relative to `sigma_max` alone would then
/// promote noise to full rank.  Callers that know the natural magnitude of
/// their data (e.g. 1 for anything built from orthonormal columns) pass it
/// here.
pub fn column_space_basis_scaled(m: &Mat, scale: f64, tol: &TolerancePolicy) -> Mat {
    let n = m.nrows();
    if n == 0 || m.ncols() == 0 {
        return Mat::zeros(n, 0);
    }
    let svd = jacobi_svd(m);
    let thresh = tol.rank_threshold(m.nrows(), m.ncols(), svd.sigma[0].max(scale));
    let r = svd.sigma.iter().filter(|&&s| s > thresh).count();
    let mut basis = svd.u.columns(0, r).into_owned();
    normalize_column_signs(&mut basis, tol.eq_tol);
    basis
}

/// Orthonormal basis of the kernel (null space) of `m`.
///
/// Returns an `ncols x (ncols - rank)` matrix; for the zero map this is the
/// identity and for injective maps it has zero columns.
pub fn kernel_basis(m: &Mat, tol: &TolerancePolicy) -> Mat {
    kernel_basis_scaled(m, 0.0, tol)
}

/// [`kernel_basis`] with an explicit data scale; see
/// [`column_space_basis_scaled`] for when this matters.
pub fn kernel_basis_scaled(m: &Mat, scale: f64, tol: &TolerancePolicy) -> Mat {
    let c = m.ncols();
    if c == 0 {
        return Mat::zeros(0, 0);
    }
    if m.nrows() == 0 {
        let mut id = Mat::identity(c, c);
        normalize_column_signs(&mut id, tol.eq_tol);
        return id;
    }
    let svd = jacobi_svd(m);
    let thresh = tol.rank_threshold(m.nrows(), m.ncols(), svd.sigma[0].max(scale));
    let r = svd.sigma.iter().filter(|&&s| s > thresh).count();
    let mut ker = svd.v.columns(r, c - r).into_owned();
    normalize_column_signs(&mut ker, tol.eq_tol);
    ker
}

/// Orthonormal basis of the orthogonal complement of an orthonormal set of
/// columns: given `basis` of size `n x k` the result is `n x (n - k)`.
pub fn orthonormal_complement(basis: &Mat, tol: &TolerancePolicy) -> Mat {
    let n = basis.nrows();
    if basis.ncols() == 0 {
        let mut id = Mat::identity(n, n);
        normalize_column_signs(&mut id, tol.eq_tol);
        return id;
    }
    if basis.ncols() >= n {
        return Mat::zeros(n, 0);
    }
    // The complement of the span of orthonormal columns is the kernel of Bᵀ.
    kernel_basis(&basis.transpose(), tol)
}

/// Horizontal concatenation `[b0 | b1 | ...]`.  Blocks must agree on rows;
/// an empty list yields the 0x0 matrix.
pub fn hcat(blocks: &[&Mat]) -> Mat {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = Mat::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hcat row mismatch");
        out.view_mut((0, at), (rows, b.ncols())).copy_from(*b);
        at += b.ncols();
    }
    out
}

/// Vertical concatenation `[b0; b1; ...]`.  Blocks must agree on columns.
pub fn vcat(blocks: &[&Mat]) -> Mat {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = Mat::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        assert_eq!(b.ncols(), cols, "vcat column mismatch");
        out.view_mut((at, 0), (b.nrows(), cols)).copy_from(*b);
        at += b.nrows();
    }
    out
}

/// Singular values of `m` in descending order (empty for degenerate shapes).
pub fn singular_values(m: &Mat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    jacobi_svd(m).sigma
}

/// Eigenvalues of a square matrix, sorted by real part then imaginary part.
/// Complex eigenvalues appear in conjugate pairs.
pub fn eigenvalues(m: &Mat) -> Vec<Cx> {
    assert_eq!(m.nrows(), m.ncols(), "eigenvalues of a non-square matrix");
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut eigs: Vec<Cx> = m.complex_eigenvalues().iter().copied().collect();
    sort_complex(&mut eigs);
    eigs
}

/// Canonical ordering for complex multisets: by real part, then imaginary part.
pub fn sort_complex(v: &mut [Cx]) {
    v.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .expect("non-finite eigenvalue")
    });
}

/// `exp(A t)` by scaling-and-squaring (delegated to nalgebra's Padé method).
pub fn matrix_exponential(a: &Mat, t: f64) -> Mat {
    assert_eq!(a.nrows(), a.ncols(), "exponential of a non-square matrix");
    if a.nrows() == 0 {
        return Mat::zeros(0, 0);
    }
    (a * t).exp()
}

/// Minimum-norm least-squares solution of `m * x = rhs` (column by column)
/// through the pseudo-inverse; returns `(x, residual)` with
/// `residual = ‖m x - rhs‖`.
pub fn lstsq_min_norm(m: &Mat, rhs: &Mat, tol: &TolerancePolicy) -> (Mat, f64) {
    assert_eq!(m.nrows(), rhs.nrows(), "lstsq shape mismatch");
    if m.ncols() == 0 {
        return (Mat::zeros(0, rhs.ncols()), (m * Mat::zeros(0, rhs.ncols()) - rhs).norm());
    }
    if m.nrows() == 0 {
        return (Mat::zeros(m.ncols(), rhs.ncols()), 0.0);
    }
    let svd = jacobi_svd(m);
    let thresh = tol.rank_threshold(m.nrows(), m.ncols(), svd.sigma[0]);
    let mut scaled = svd.u.transpose() * rhs;
    for (i, &s) in svd.sigma.iter().enumerate() {
        let f = if s > thresh { 1.0 / s } else { 0.0 };
        for j in 0..scaled.ncols() {
            scaled[(i, j)] *= f;
        }
    }
    let x = &svd.v * scaled;
    let residual = (m * &x - rhs).norm();
    (x, residual)
}

/// Pairs two complex multisets greedily and reports whether every pair lies
/// within `tol` of each other.  Multisets of different cardinality never match.
pub fn complex_multisets_match(a: &[Cx], b: &[Cx], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    sort_complex(&mut a);
    sort_complex(&mut b);
    let mut used = vec![false; b.len()];
    for za in &a {
        let mut best: Option<(usize, f64)> = None;
        for (j, zb) in b.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (za - zb).norm();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        match best {
            Some((j, d)) if d <= tol => used[j] = true,
            _ => return false,
        }
    }
    true
}
