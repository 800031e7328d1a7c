//! Real Schur decomposition with block bookkeeping and stable-first reordering.
//!
//! nalgebra supplies the raw factorization; this module post-processes it so the
//! rest of the crate can rely on a strict contract:
//!
//! * `T` is quasi upper triangular and every 2x2 diagonal block carries a
//!   complex-conjugate pair (2x2 blocks with real eigenvalues are split);
//! * blocks can be reordered so every eigenvalue with `re < -margin` appears in
//!   the leading principal submatrix, by orthogonal swaps of adjacent blocks —
//!   no eigenvector bases, so defective eigenvalues are handled exactly like
//!   simple ones.

use nalgebra::linalg::Schur;

use super::{orthonormal_complement, Cx, Mat, TolerancePolicy};
use crate::error::{Error, Result};
use crate::matkit::sylvester::solve_sylvester_kron;

/// Relative bound on the discarded lower-left residual of a block swap.
const SWAP_TOL: f64 = 1e-8;

/// A real Schur factorization `A = Q T Qᵀ` with orthogonal `Q` and quasi upper
/// triangular `T`.
#[derive(Debug, Clone)]
pub struct SchurForm {
    pub q: Mat,
    pub t: Mat,
}

impl SchurForm {
    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    /// Diagonal block layout as `(start, size)` pairs, `size` being 1 or 2.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        scan_blocks(&self.t)
    }

    /// Eigenvalues in diagonal order (conjugate pairs adjacent, `+im` first).
    pub fn eigenvalues(&self) -> Vec<Cx> {
        let mut out = Vec::with_capacity(self.dim());
        for (s, sz) in self.blocks() {
            if sz == 1 {
                out.push(Cx::new(self.t[(s, s)], 0.0));
            } else {
                let (mean, imag) = block_pair(&self.t, s);
                out.push(Cx::new(mean, imag));
                out.push(Cx::new(mean, -imag));
            }
        }
        out
    }

    /// `Q T Qᵀ`, for residual checks.
    pub fn reassemble(&self) -> Mat {
        &self.q * &self.t * self.q.transpose()
    }
}

fn scan_blocks(t: &Mat) -> Vec<(usize, usize)> {
    let n = t.nrows();
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            blocks.push((i, 2));
            i += 2;
        } else {
            blocks.push((i, 1));
            i += 1;
        }
    }
    blocks
}

/// Mean and positive imaginary part of the conjugate pair carried by the 2x2
/// block starting at `s`.
fn block_pair(t: &Mat, s: usize) -> (f64, f64) {
    let a = t[(s, s)];
    let b = t[(s, s + 1)];
    let c = t[(s + 1, s)];
    let d = t[(s + 1, s + 1)];
    let mean = 0.5 * (a + d);
    let disc = 0.25 * (a - d) * (a - d) + b * c;
    (mean, (-disc).max(0.0).sqrt())
}

/// Real Schur decomposition of a square matrix.
///
/// The returned form satisfies the contract in the module docs; in particular
/// subdiagonal entries are exactly zero outside genuine complex 2x2 blocks.
pub fn real_schur(a: &Mat, tol: &TolerancePolicy) -> Result<SchurForm> {
    assert_eq!(a.nrows(), a.ncols(), "Schur of a non-square matrix");
    let n = a.nrows();
    if n == 0 {
        return Ok(SchurForm {
            q: Mat::zeros(0, 0),
            t: Mat::zeros(0, 0),
        });
    }
    if n == 1 {
        return Ok(SchurForm {
            q: Mat::identity(1, 1),
            t: a.clone(),
        });
    }
    let schur =
        Schur::try_new(a.clone(), f64::EPSILON, 0).ok_or(Error::SchurConvergence)?;
    let (q, t) = schur.unpack();
    let mut form = SchurForm { q, t };
    clean_quasi_triangular(&mut form)?;
    let _ = tol;
    Ok(form)
}

/// Zeroes negligible subdiagonal entries and splits 2x2 blocks whose
/// eigenvalues are real, leaving a strict quasi-triangular form.
fn clean_quasi_triangular(form: &mut SchurForm) -> Result<()> {
    let n = form.dim();
    let t = &mut form.t;
    // Below the first subdiagonal everything must vanish already; enforce the
    // exact zeros so block scanning is unambiguous.
    for j in 0..n {
        for i in j + 2..n {
            t[(i, j)] = 0.0;
        }
    }
    for i in 0..n - 1 {
        let small = 64.0 * f64::EPSILON * (t[(i, i)].abs() + t[(i + 1, i + 1)].abs());
        if t[(i + 1, i)].abs() <= small {
            t[(i + 1, i)] = 0.0;
        }
    }
    // No two consecutive nonzero subdiagonal entries may remain.
    for i in 0..n.saturating_sub(2) {
        if t[(i + 1, i)] != 0.0 && t[(i + 2, i + 1)] != 0.0 {
            return Err(Error::SchurConvergence);
        }
    }
    // Split 2x2 blocks with real spectra by an in-plane rotation.
    let mut i = 0;
    while i + 1 < n {
        if form.t[(i + 1, i)] == 0.0 {
            i += 1;
            continue;
        }
        let a = form.t[(i, i)];
        let b = form.t[(i, i + 1)];
        let c = form.t[(i + 1, i)];
        let d = form.t[(i + 1, i + 1)];
        let disc = 0.25 * (a - d) * (a - d) + b * c;
        if disc >= 0.0 {
            let mean = 0.5 * (a + d);
            let sq = disc.sqrt();
            // Eigenvalue farthest from d gives the best-conditioned eigenvector
            // (lambda - d, c).
            let lambda = if mean - d >= 0.0 { mean + sq } else { mean - sq };
            let (v0, v1) = (lambda - d, c);
            let norm = (v0 * v0 + v1 * v1).sqrt();
            let (v0, v1) = (v0 / norm, v1 / norm);
            let mut g = Mat::identity(n, n);
            g[(i, i)] = v0;
            g[(i + 1, i)] = v1;
            g[(i, i + 1)] = -v1;
            g[(i + 1, i + 1)] = v0;
            form.t = g.transpose() * &form.t * &g;
            form.q = &form.q * &g;
            form.t[(i + 1, i)] = 0.0;
            for j in 0..n {
                for k in j + 2..n {
                    form.t[(k, j)] = 0.0;
                }
            }
        }
        i += 2;
    }
    Ok(())
}

fn block_is_stable(t: &Mat, s: usize, sz: usize, margin: f64) -> bool {
    if sz == 1 {
        t[(s, s)] < -margin
    } else {
        0.5 * (t[(s, s)] + t[(s + 1, s + 1)]) < -margin
    }
}

/// Reorders a real Schur form so all eigenvalues with `re < -margin` occupy the
/// leading block; returns the reordered form and the count of stable
/// eigenvalues.
///
/// The swap of two adjacent blocks goes through the invariant-subspace basis
/// `[X; I]` of the trailing block (X from a small Sylvester solve), orthonormal-
/// ized by QR — the standard direct-swap method.  Relative order inside the
/// stable and unstable groups is preserved.
pub fn order_schur_stable_first(
    form: &SchurForm,
    margin: f64,
    tol: &TolerancePolicy,
) -> Result<(SchurForm, usize)> {
    let mut out = form.clone();
    loop {
        let blocks = out.blocks();
        let swap_at = blocks.windows(2).position(|w| {
            let (s1, z1) = w[0];
            let (s2, z2) = w[1];
            !block_is_stable(&out.t, s1, z1, margin) && block_is_stable(&out.t, s2, z2, margin)
        });
        match swap_at {
            Some(j) => {
                let (s, p) = blocks[j];
                let (_, r) = blocks[j + 1];
                swap_adjacent_blocks(&mut out, s, p, r, tol)?;
            }
            None => break,
        }
    }
    let n_stable = out
        .blocks()
        .iter()
        .filter(|&&(s, sz)| block_is_stable(&out.t, s, sz, margin))
        .map(|&(_, sz)| sz)
        .sum();
    Ok((out, n_stable))
}

/// Exchanges the adjacent diagonal blocks at `s` (sizes `p` then `r`) by an
/// orthogonal similarity.
fn swap_adjacent_blocks(
    form: &mut SchurForm,
    s: usize,
    p: usize,
    r: usize,
    tol: &TolerancePolicy,
) -> Result<()> {
    let n = form.dim();
    let m = p + r;
    let a11 = form.t.view((s, s), (p, p)).into_owned();
    let a12 = form.t.view((s, s + p), (p, r)).into_owned();
    let a22 = form.t.view((s + p, s + p), (r, r)).into_owned();
    // Invariant subspace of [[A11, A12], [0, A22]] for the spectrum of A22 is
    // spanned by [X; I] with A11 X - X A22 = -A12.
    let x = solve_sylvester_kron(&a11, &a22, &(-&a12)).map_err(|_| Error::SchurSwapFailed {
        residual: f64::INFINITY,
    })?;
    let mut stacked = Mat::zeros(m, r);
    stacked.view_mut((0, 0), (p, r)).copy_from(&x);
    stacked.view_mut((p, 0), (r, r)).copy_from(&Mat::identity(r, r));
    let q_thin = stacked.qr().q();
    let comp = orthonormal_complement(&q_thin, tol);
    let mut g = Mat::zeros(m, m);
    g.view_mut((0, 0), (m, r)).copy_from(&q_thin);
    g.view_mut((0, r), (m, p)).copy_from(&comp);

    let local = form.t.view((s, s), (m, m)).into_owned();
    let swapped = g.transpose() * &local * &g;
    let residual = swapped.view((r, 0), (p, r)).norm() / local.norm().max(1.0);
    if residual > SWAP_TOL {
        return Err(Error::SchurSwapFailed { residual });
    }

    let mut gbig = Mat::identity(n, n);
    gbig.view_mut((s, s), (m, m)).copy_from(&g);
    form.t = gbig.transpose() * &form.t * &gbig;
    form.q = &form.q * &gbig;
    // Exact zeros in the exchanged lower-left corner and inside the new blocks.
    for j in s..s + r {
        for i in s + r..s + m {
            form.t[(i, j)] = 0.0;
        }
    }
    if r == 2 && form.t[(s + 1, s)].abs() <= 64.0 * f64::EPSILON * local.norm() {
        form.t[(s + 1, s)] = 0.0;
    }
    if p == 2 {
        let i = s + r;
        if form.t[(i + 1, i)].abs() <= 64.0 * f64::EPSILON * local.norm() {
            form.t[(i + 1, i)] = 0.0;
        }
    }
    for j in 0..n {
        for i in j + 2..n {
            form.t[(i, j)] = 0.0;
        }
    }
    Ok(())
}
