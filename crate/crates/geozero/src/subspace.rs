//! Tolerance-aware subspace algebra over real n-space.
//!
//! A [`Subspace`] stores an orthonormal basis and its ambient dimension; the
//! dimension is decided once at construction (by the rank rules of
//! [`TolerancePolicy`]) and never re-ranked, so later equality checks cannot
//! flip-flop across the tolerance.  All operations are pure.

use crate::error::{Error, Result};
use crate::matkit::{
    column_space_basis, column_space_basis_scaled, ensure_finite, kernel_basis_scaled, Mat,
    TolerancePolicy,
};

/// A linear subspace of n-dimensional real space, represented by an
/// orthonormal basis (`n x d`, `0 <= d <= n`).
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Mat,
}

impl Subspace {
    /// The zero subspace of n-space.
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: Mat::zeros(ambient_dim, 0),
        }
    }

    /// The whole of n-space.
    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: Mat::identity(ambient_dim, ambient_dim),
        }
    }

    /// Span of the columns of an arbitrary matrix (columns need not be
    /// independent or normalized).
    pub fn from_columns(m: &Mat, tol: &TolerancePolicy) -> Result<Self> {
        ensure_finite(m)?;
        Ok(Self {
            ambient_dim: m.nrows(),
            basis: column_space_basis(m, tol),
        })
    }

    /// Wraps a matrix that is already an orthonormal basis.
    pub fn from_orthonormal_basis(basis: Mat, tol: &TolerancePolicy) -> Result<Self> {
        ensure_finite(&basis)?;
        let d = basis.ncols();
        if d > basis.nrows() {
            return Err(Error::DimensionMismatch {
                context: "orthonormal basis",
                expected: format!("at most {} columns", basis.nrows()),
                found: format!("{} columns", d),
            });
        }
        let defect = (basis.transpose() * &basis - Mat::identity(d, d)).norm();
        if defect > tol.eq_tol * (d.max(1) as f64) {
            return Err(Error::NotOrthonormal { defect });
        }
        Ok(Self {
            ambient_dim: basis.nrows(),
            basis,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// The stored orthonormal basis (`ambient_dim x dim`).
    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    fn check_ambient(&self, other: &Subspace, context: &'static str) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                context,
                expected: format!("ambient dimension {}", self.ambient_dim),
                found: format!("ambient dimension {}", other.ambient_dim),
            });
        }
        Ok(())
    }

    /// Sum of subspaces: span of the union of the bases.
    pub fn sum(&self, other: &Subspace, tol: &TolerancePolicy) -> Result<Subspace> {
        self.check_ambient(other, "subspace sum")?;
        let mut stacked = Mat::zeros(self.ambient_dim, self.dim() + other.dim());
        stacked.view_mut((0, 0), (self.ambient_dim, self.dim())).copy_from(&self.basis);
        stacked
            .view_mut((0, self.dim()), (self.ambient_dim, other.dim()))
            .copy_from(&other.basis);
        Ok(Subspace {
            ambient_dim: self.ambient_dim,
            basis: column_space_basis(&stacked, tol),
        })
    }

    /// Intersection, computed as the joint kernel of the two projector
    /// complements `I - B Bᵀ` stacked on top of each other.
    pub fn intersect(&self, other: &Subspace, tol: &TolerancePolicy) -> Result<Subspace> {
        self.check_ambient(other, "subspace intersection")?;
        let n = self.ambient_dim;
        let id = Mat::identity(n, n);
        let pu = &id - &self.basis * self.basis.transpose();
        let pv = &id - &other.basis * other.basis.transpose();
        let mut stacked = Mat::zeros(2 * n, n);
        stacked.view_mut((0, 0), (n, n)).copy_from(&pu);
        stacked.view_mut((n, 0), (n, n)).copy_from(&pv);
        // Projector entries are O(1) by construction, hence the explicit scale:
        // for nearly full subspaces the stack itself is pure roundoff.
        Ok(Subspace {
            ambient_dim: n,
            basis: kernel_basis_scaled(&stacked, 1.0, tol),
        })
    }

    /// Inverse image `{x : M x ∈ V}` of this subspace under `m`; the result
    /// lives in the domain of `m` and always contains `ker M`.
    pub fn inverse_image(&self, m: &Mat, tol: &TolerancePolicy) -> Result<Subspace> {
        if m.nrows() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                context: "inverse image",
                expected: format!("matrix with {} rows", self.ambient_dim),
                found: format!("matrix with {} rows", m.nrows()),
            });
        }
        ensure_finite(m)?;
        // M x ∈ V exactly when the projection of M x off V vanishes.  The
        // residue scales with M, so rank decisions are taken against ‖M‖ (a
        // map entirely into V leaves only roundoff).
        let off_v = m - &self.basis * (self.basis.transpose() * m);
        Ok(Subspace {
            ambient_dim: m.ncols(),
            basis: kernel_basis_scaled(&off_v, m.norm(), tol),
        })
    }

    /// Largest distance of a unit basis vector of `other` from this subspace.
    fn containment_defect(&self, other: &Subspace) -> f64 {
        let mut worst = 0.0_f64;
        for j in 0..other.dim() {
            let col = other.basis.column(j);
            let residual = col - &self.basis * (self.basis.transpose() * col);
            worst = worst.max(residual.norm());
        }
        worst
    }

    /// Whether every vector of `other` lies in this subspace (within `eqTol`).
    pub fn contains(&self, other: &Subspace, tol: &TolerancePolicy) -> Result<bool> {
        self.check_ambient(other, "subspace containment")?;
        Ok(self.containment_defect(other) <= tol.eq_tol)
    }

    /// Mutual containment.
    pub fn equals(&self, other: &Subspace, tol: &TolerancePolicy) -> Result<bool> {
        Ok(self.contains(other, tol)? && other.contains(self, tol)?)
    }

    /// Projector gap between the two subspaces: the sine of the largest
    /// principal angle.  0 means identical spans, 1 means some direction of one
    /// space is orthogonal to all of the other.
    pub fn gap(&self, other: &Subspace) -> Result<f64> {
        self.check_ambient(other, "subspace gap")?;
        if self.dim() != other.dim() {
            return Ok(1.0);
        }
        if self.dim() == 0 {
            return Ok(0.0);
        }
        // ‖(I − P_other)·B_self‖₂ = sin θ_max; equal dimensions make the
        // expression symmetric up to roundoff, but take the max anyway.
        let here = &self.basis - &other.basis * (other.basis.transpose() * &self.basis);
        let there = &other.basis - &self.basis * (self.basis.transpose() * &other.basis);
        let s1 = crate::matkit::singular_values(&here);
        let s2 = crate::matkit::singular_values(&there);
        let top = |v: &[f64]| v.first().copied().unwrap_or(0.0);
        Ok(top(&s1).max(top(&s2)).min(1.0))
    }

    /// Columns extending a basis of `self` (the inner subspace) to a basis of
    /// `outer`: the returned `n x (dim outer - dim self)` block is orthonormal
    /// and orthogonal to `self`, and `[self.basis | result]` spans `outer`.
    pub fn complete_basis(&self, outer: &Subspace, tol: &TolerancePolicy) -> Result<Mat> {
        self.check_ambient(outer, "basis completion")?;
        let defect = outer.containment_defect(self);
        if defect > tol.eq_tol {
            return Err(Error::ContainmentViolated { residual: defect });
        }
        // Project the outer basis off the inner subspace; what survives spans
        // the orthogonal complement of inner within outer.  Both bases are
        // orthonormal, so the projected singular values are exactly 0 or 1 and
        // the scale hint keeps an all-roundoff residue at rank zero.
        let projected = &outer.basis - &self.basis * (self.basis.transpose() * &outer.basis);
        let completion = column_space_basis_scaled(&projected, 1.0, tol);
        debug_assert_eq!(completion.ncols(), outer.dim() - self.dim());
        Ok(completion)
    }

    /// Matrix of the map induced by `m` on this subspace: the `d x d` matrix
    /// `R` with `M·basis = basis·R`.  Fails when the subspace is not invariant
    /// under `m`.
    pub fn restriction_matrix(&self, m: &Mat, tol: &TolerancePolicy) -> Result<Mat> {
        if m.nrows() != self.ambient_dim || m.ncols() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                context: "restriction matrix",
                expected: format!("{n}x{n}", n = self.ambient_dim),
                found: format!("{}x{}", m.nrows(), m.ncols()),
            });
        }
        let image = m * &self.basis;
        let residual =
            (&image - &self.basis * (self.basis.transpose() * &image)).norm();
        let scale = image.norm().max(1.0);
        if residual > tol.eq_tol * scale {
            return Err(Error::NotInvariant {
                residual: residual / scale,
            });
        }
        Ok(self.basis.transpose() * image)
    }
}
