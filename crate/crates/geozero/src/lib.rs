//! Geometric analysis and invariant-zero cancellation for linear multivariable systems.
//!
//! The crate analyzes continuous-time LTI quadruples (A, B, C, D) with the tools of
//! the geometric approach — reachable subspace, maximal output-nulling controlled
//! invariant subspace, minimal input-containing conditioned invariant subspace — and
//! synthesizes minimal-order feedforward compensators that cancel the minimum-phase
//! invariant zeros while preserving reachability and right invertibility.
//!
//! Module map:
//! * [`matkit`] — dense kernels: rank-revealing bases, real Schur form with
//!   stable-first reordering, Sylvester solver, matrix exponential.
//! * [`subspace`] — subspaces of ℝⁿ as orthonormal bases, with the lattice
//!   operations (sum, intersection, inverse image, completion, restriction).
//! * [`geometry`] — the structural analysis of a state-space system: invariant
//!   subspaces, friends, invariant zeros, Rosenbrock confirmation.
//! * [`zerocancel`] — the three-stage coordinate pipeline, the resolving subspace,
//!   compensator synthesis, the cascade equivalent and its verification.
//! * [`ltisim`] — step responses by exact discretization, overshoot, relative
//!   degree and DC gain.

pub mod error;
pub mod geometry;
pub mod ltisim;
pub mod matkit;
pub mod subspace;
pub mod zerocancel;

pub use error::{Error, Result};
pub use matkit::{Mat, TolerancePolicy};
