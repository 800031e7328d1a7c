//! Sylvester equation `A X - X B = C` by Bartels–Stewart.
//!
//! Both coefficient matrices are brought to real Schur form, the transformed
//! equation is solved block-by-block (blocks are at most 2x2, so each small
//! system is a Kronecker solve of size at most 4), and the solution is rotated
//! back.  A unique solution exists iff the spectra of `A` and `B` are disjoint;
//! this is checked up front so near-collisions surface as a structured error
//! instead of a garbage solution.

use super::schur::real_schur;
use super::{eigenvalues, Mat, TolerancePolicy};
use crate::error::{Error, Result};

/// Solves `A X - X B = C` for `X` (`A` is r x r, `B` is q x q, `C` is r x q).
pub fn solve_sylvester(a: &Mat, b: &Mat, c: &Mat, tol: &TolerancePolicy) -> Result<Mat> {
    let r = a.nrows();
    let q = b.nrows();
    if a.ncols() != r || b.ncols() != q {
        return Err(Error::DimensionMismatch {
            context: "sylvester coefficients",
            expected: "square A and B".into(),
            found: format!("A {}x{}, B {}x{}", a.nrows(), a.ncols(), b.nrows(), b.ncols()),
        });
    }
    if c.nrows() != r || c.ncols() != q {
        return Err(Error::DimensionMismatch {
            context: "sylvester right-hand side",
            expected: format!("{}x{}", r, q),
            found: format!("{}x{}", c.nrows(), c.ncols()),
        });
    }
    if r == 0 || q == 0 {
        return Ok(Mat::zeros(r, q));
    }

    // Solvability: no eigenvalue of A may coincide with one of B.
    let ea = eigenvalues(a);
    let eb = eigenvalues(b);
    let sep_tol = tol.eq_tol * (1.0 + a.norm() + b.norm());
    for za in &ea {
        for zb in &eb {
            if (za - zb).norm() <= sep_tol {
                return Err(Error::SpectraOverlap {
                    re: za.re,
                    im: za.im,
                });
            }
        }
    }

    if r <= 2 && q <= 2 {
        return solve_sylvester_kron(a, b, c);
    }

    let sa = real_schur(a, tol)?;
    let sb = real_schur(b, tol)?;
    let ta = &sa.t;
    let tb = &sb.t;
    let ct = sa.q.transpose() * c * &sb.q;
    let a_blocks = sa.blocks();
    let b_blocks = sb.blocks();

    // Ta Y - Y Tb = Ct, solved bottom-up in the row blocks and left-to-right in
    // the column blocks so every dependency is already known.
    let mut y = Mat::zeros(r, q);
    for &(ls, lsz) in &b_blocks {
        for &(ks, ksz) in a_blocks.iter().rev() {
            let mut rhs = ct.view((ks, ls), (ksz, lsz)).into_owned();
            let below = ks + ksz;
            if below < r {
                rhs -= ta.view((ks, below), (ksz, r - below))
                    * y.view((below, ls), (r - below, lsz));
            }
            if ls > 0 {
                rhs += y.view((ks, 0), (ksz, ls)) * tb.view((0, ls), (ls, lsz));
            }
            let akk = ta.view((ks, ks), (ksz, ksz)).into_owned();
            let bll = tb.view((ls, ls), (lsz, lsz)).into_owned();
            let ykl = solve_sylvester_kron(&akk, &bll, &rhs)?;
            y.view_mut((ks, ls), (ksz, lsz)).copy_from(&ykl);
        }
    }
    Ok(&sa.q * y * sb.q.transpose())
}

/// Direct Kronecker-product solve of `A X - X B = C`, intended for the tiny
/// blocks of Bartels–Stewart (at most 2x2 each side).
pub(crate) fn solve_sylvester_kron(a: &Mat, b: &Mat, c: &Mat) -> Result<Mat> {
    let r = a.nrows();
    let q = b.nrows();
    // vec(A X - X B) = (I ⊗ A - Bᵀ ⊗ I) vec(X), column-major vec.
    let m = Mat::identity(q, q).kronecker(a) - b.transpose().kronecker(&Mat::identity(r, r));
    let rhs = Mat::from_column_slice(r * q, 1, c.as_slice());
    let x = m
        .full_piv_lu()
        .solve(&rhs)
        .ok_or(Error::SingularMatrix {
            context: "sylvester block system",
        })?;
    Ok(Mat::from_column_slice(r, q, x.as_slice()))
}
