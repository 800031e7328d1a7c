//! Minimum-phase zero cancellation by feedforward: staged similarity
//! transformations, the resolving subspace, and the equivalent-cascade
//! construction.
//!
//! Given a quadruple `(A, B, C, D)` and a friend `F` of the maximal
//! output-nulling subspace V*, the state space splits into three block
//! coordinates: R_{V*} (the part of V* where closed-loop eigenvalues are
//! freely assignable), the zero dynamics carried by V* / R_{V*}, and a
//! complement.  Three transformations expose that split:
//!
//! 1. `T` — a basis adapted to R_{V*} ⊆ V* ⊆ ℝⁿ; `A_F = A + BF` becomes
//!    block upper triangular ([`stage1`]).
//! 2. `T′` — a Sylvester solve decouples the assignable block from the zero
//!    dynamics ([`stage2`]).
//! 3. `T″` — an ordered Schur basis of the zero-dynamics block puts the
//!    stable (minimum-phase) eigenvalues first ([`stage3`]).
//!
//! The columns of `T̄ = T·T′·T″` over the stable zero coordinates span the
//! resolving subspace V_S*; the pair `(W, L)` read off the transformed
//! matrices drives a feedforward compensator of minimal dynamic order
//! `nS = #minimum-phase zeros`.  The cascade plant∘compensator is
//! input-output equivalent to a reduced system whose zero set has lost
//! exactly those zeros while keeping reachability and right-invertibility.
//! [`run_pipeline`] chains the whole construction and audits the outcome.

use crate::error::{Error, Result};
use crate::geometry::{analyze, friend, GeometricAnalysis, StateSpaceSystem, ZeroSet};
use crate::matkit::{
    self, eigenvalues, hcat, kernel_basis, order_schur_stable_first, real_schur,
    singular_values, solve_sylvester, Mat, SchurForm, TolerancePolicy,
};
use crate::subspace::Subspace;

/// Acceptance slack for caller-supplied `F` and `T` matrices, which typically
/// come from external sources rounded to a few decimals.  Checked relative to
/// the data scale.
const SUPPLIED_TOL: f64 = 5e-3;

/// Pairing tolerance when comparing zero multisets before and after
/// cancellation.
const ZERO_PAIRING_TOL: f64 = 1e-6;

/// Block sizes of the staged coordinates: `r = dim R_{V*}`, `q = dim V* − r`
/// zero-dynamics states, split into `n_s` stable and `n_u = q − n_s`
/// unstable ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageDims {
    pub r: usize,
    pub q: usize,
    pub n_s: usize,
    pub n_u: usize,
}

/// Everything produced on the way to the resolving subspace.  `t_bar` is the
/// accumulated transformation `T·T′·T″`; `cf3` equals `cf1` up to roundoff
/// because the later transformations act only inside blocks that `C_F′`
/// already annihilates.
#[derive(Debug, Clone)]
pub struct PipelineTrace {
    pub f: Mat,
    pub t: Mat,
    pub t_prime: Mat,
    pub t_second: Mat,
    pub t_bar: Mat,
    pub af1: Mat,
    pub cf1: Mat,
    pub x: Mat,
    pub af2: Mat,
    pub af3: Mat,
    pub cf3: Mat,
    pub dims: StageDims,
}

/// The minimum-phase zero structure: `w` carries the stable zero dynamics,
/// `l` the friend restricted to them.  `vs_mat` is the distinguished
/// (generally non-orthonormal) basis of the resolving subspace, taken
/// verbatim from the stable middle columns of `T̄`; `vs` is an
/// orthonormalized copy for subspace comparisons.
///
/// The coupling identities `(A+BF)·vs_mat = vs_mat·w`, `l = F·vs_mat` and
/// `C·vs_mat + D·l = 0` hold by construction.
#[derive(Debug, Clone)]
pub struct ZeroStructure {
    pub w: Mat,
    pub l: Mat,
    pub vs_mat: Mat,
    pub vs: Subspace,
}

/// An ordered subset of the input channels (1-based) that keep a direct
/// feedthrough path through the compensator.  Dropped channels receive only
/// the compensator state feedback.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputSelection {
    kept: Vec<usize>,
    input_dim: usize,
}

impl InputSelection {
    /// Keep every channel, in natural order.
    pub fn all(input_dim: usize) -> Self {
        Self {
            kept: (1..=input_dim).collect(),
            input_dim,
        }
    }

    /// Keep the listed channels (distinct, each in `1..=input_dim`).  The
    /// given order decides the column order of the embedding.
    pub fn new(kept: Vec<usize>, input_dim: usize) -> Result<Self> {
        for (i, &j) in kept.iter().enumerate() {
            if j == 0 || j > input_dim {
                return Err(Error::InvalidSelection(format!(
                    "channel {j} is outside 1..={input_dim}"
                )));
            }
            if kept[..i].contains(&j) {
                return Err(Error::InvalidSelection(format!(
                    "channel {j} is listed more than once"
                )));
            }
        }
        Ok(Self { kept, input_dim })
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn len(&self) -> usize {
        self.kept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.kept.len() == self.input_dim && self.kept.iter().enumerate().all(|(i, &j)| j == i + 1)
    }

    /// The `m×k` embedding `E` with a unit column per kept channel and zero
    /// rows for dropped ones; `B·E` keeps exactly the selected columns of
    /// `B`.
    pub fn embedding(&self) -> Mat {
        let mut e = Mat::zeros(self.input_dim, self.kept.len());
        for (pos, &j) in self.kept.iter().enumerate() {
            e[(j - 1, pos)] = 1.0;
        }
        e
    }
}

/// Feedforward compensator `(A_f, B_f, C_f, D_f)` of dynamic order `nS`.
/// Its input splits as `[v; w]`: `v ∈ ℝ^{nS}` excites the cancelled
/// dynamics, `w ∈ ℝᵏ` passes through to the kept plant channels.
#[derive(Debug, Clone)]
pub struct Compensator {
    pub af: Mat,
    pub bf: Mat,
    pub cf: Mat,
    pub df: Mat,
}

impl Compensator {
    pub fn order(&self) -> usize {
        self.af.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.bf.ncols()
    }

    /// View as a plain state-space quadruple (shape checks only — the
    /// compensator need not pass the input/output rank gates).
    pub fn to_system(&self) -> Result<StateSpaceSystem> {
        StateSpaceSystem::assemble(
            self.af.clone(),
            self.bf.clone(),
            self.cf.clone(),
            self.df.clone(),
        )
    }
}

/// The cascade plant∘compensator in reduced form: same state dimension as
/// the plant, inputs `[v; w]` entering through `B_e = [−V_S* | B·E]`.
#[derive(Debug, Clone)]
pub struct CascadeSystem {
    pub ae: Mat,
    pub be: Mat,
    pub ce: Mat,
    pub de: Mat,
    /// Width of the leading `−V_S*` input block (equals the compensator
    /// order).
    pub n_s: usize,
}

impl CascadeSystem {
    pub fn input_dim(&self) -> usize {
        self.be.ncols()
    }

    /// View as a plain state-space quadruple (no rank gate; `B_e` may have
    /// dependent columns).
    pub fn to_system(&self) -> Result<StateSpaceSystem> {
        StateSpaceSystem::assemble(
            self.ae.clone(),
            self.be.clone(),
            self.ce.clone(),
            self.de.clone(),
        )
    }
}

/// Outcome of the post-synthesis audit.  A failed check is a finding, not an
/// error: every verdict lands in a flag.
#[derive(Debug, Clone)]
pub struct CancellationReport {
    pub plant_zeros: ZeroSet,
    pub cascade_zeros: ZeroSet,
    /// Cascade zeros equal the nonminimum-phase plant zeros as multisets.
    pub zero_law_holds: bool,
    pub plant_reachable: bool,
    pub cascade_reachable: bool,
    /// Reachability survived the cancellation (vacuous if the plant was not
    /// reachable to begin with).
    pub reachability_preserved: bool,
    pub plant_right_invertible: bool,
    pub cascade_right_invertible: bool,
    pub right_invertibility_preserved: bool,
    pub compensator_order: usize,
    /// The order equals the number of minimum-phase plant zeros, counted
    /// with multiplicity — the minimum possible.
    pub order_is_minimal: bool,
}

impl CancellationReport {
    pub fn all_pass(&self) -> bool {
        self.zero_law_holds
            && self.reachability_preserved
            && self.right_invertibility_preserved
            && self.order_is_minimal
    }
}

/// Everything [`run_pipeline`] produces.
#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub analysis: GeometricAnalysis,
    pub trace: PipelineTrace,
    pub structure: ZeroStructure,
    pub compensator: Compensator,
    pub cascade: CascadeSystem,
    pub report: CancellationReport,
}

/// Basis adapted to the chain R_{V*} ⊆ V* ⊆ ℝⁿ: columns `1..r` span R_{V*},
/// columns `1..r+q` span V*, and the rest complete to the full space.
///
/// By default every block is completed orthonormally.  A caller may instead
/// supply the trailing `n − r` columns (zero-dynamics and complement
/// directions together); they are validated — the leading `q` of them must
/// stay inside V*, and the assembled matrix must be invertible — and then
/// embedded verbatim.  Supplied columns rounded to a few decimals are
/// accepted.
pub fn build_stage1_transform(
    v_star: &Subspace,
    r_v_star: &Subspace,
    completion: Option<&Mat>,
    tol: &TolerancePolicy,
) -> Result<Mat> {
    let n = v_star.ambient_dim();
    let r = r_v_star.dim();
    let q = v_star.dim() - r;
    let mid = r_v_star.complete_basis(v_star, tol)?;
    match completion {
        None => {
            let inner = hcat(&[r_v_star.basis(), &mid]);
            let v_whole = Subspace::from_orthonormal_basis(inner.clone(), tol)?;
            let outer = v_whole.complete_basis(&Subspace::full(n), tol)?;
            Ok(hcat(&[&inner, &outer]))
        }
        Some(cols) => {
            matkit::ensure_finite(cols)?;
            if cols.nrows() != n || cols.ncols() != n - r {
                return Err(Error::DimensionMismatch {
                    context: "stage-1 completion",
                    expected: format!("{}x{}", n, n - r),
                    found: format!("{}x{}", cols.nrows(), cols.ncols()),
                });
            }
            if q > 0 {
                let lead = cols.columns(0, q).into_owned();
                let vb = v_star.basis();
                let off = &lead - vb * (vb.transpose() * &lead);
                let defect = off.norm() / lead.norm().max(1.0);
                if defect > SUPPLIED_TOL {
                    return Err(Error::SuppliedInputInvalid {
                        what: "stage-1 completion (zero-dynamics columns leave V*)",
                        residual: defect,
                        allowed: SUPPLIED_TOL,
                    });
                }
            }
            let t = hcat(&[r_v_star.basis(), cols]);
            let sv = singular_values(&t);
            let top = sv.first().copied().unwrap_or(0.0);
            let bottom = sv.last().copied().unwrap_or(0.0);
            if n > 0 && bottom <= tol.rank_tol * (n as f64) * top {
                return Err(Error::SuppliedInputInvalid {
                    what: "stage-1 completion (columns do not complete the basis)",
                    residual: if top > 0.0 { bottom / top } else { 0.0 },
                    allowed: tol.rank_tol * n as f64,
                });
            }
            Ok(t)
        }
    }
}

/// First transformation: `AF1 = T⁻¹(A+BF)T`, `CF1 = (C+DF)T`.  With a valid
/// friend and an adapted basis, `AF1` is block upper triangular — blocks
/// (2,1), (3,1) and (3,2) vanish — and `CF1` is zero on the first `r+q`
/// columns.
pub fn stage1(
    sys: &StateSpaceSystem,
    f: &Mat,
    t: &Mat,
    tol: &TolerancePolicy,
) -> Result<(Mat, Mat)> {
    let (n, m, _) = sys.dims();
    if f.nrows() != m || f.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "friend for stage 1",
            expected: format!("{m}x{n}"),
            found: format!("{}x{}", f.nrows(), f.ncols()),
        });
    }
    if t.nrows() != n || t.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "stage-1 transformation",
            expected: format!("{n}x{n}"),
            found: format!("{}x{}", t.nrows(), t.ncols()),
        });
    }
    if matkit::rank(t, tol) < n {
        return Err(Error::SingularTransform);
    }
    let a_f = sys.a() + sys.b() * f;
    let lu = t.clone().full_piv_lu();
    let af1 = lu.solve(&(&a_f * t)).ok_or(Error::SingularTransform)?;
    let cf1 = (sys.c() + sys.d() * f) * t;
    Ok((af1, cf1))
}

/// Second transformation: solve `A′₁₁·X − X·A′₂₂ = −A′₁₂`, embed `X` in the
/// (1,2) block of `T′ = I`, and return `(X, T′, AF2 = T′⁻¹·AF1·T′)`.  Only
/// the (1,2) block (now zero) and the (1,3) block change.
///
/// A unique solution needs the spectra of the assignable block and the zero
/// dynamics to be disjoint; a collision means the friend placed an
/// assignable eigenvalue exactly on an invariant zero, and the remedy is a
/// different friend.
pub fn stage2(af1: &Mat, r: usize, q: usize, tol: &TolerancePolicy) -> Result<(Mat, Mat, Mat)> {
    let n = af1.nrows();
    assert_eq!(af1.ncols(), n, "stage 2 expects a square matrix");
    assert!(r + q <= n, "block sizes exceed the matrix");
    let a11 = af1.view((0, 0), (r, r)).into_owned();
    let a12 = af1.view((0, r), (r, q)).into_owned();
    let a22 = af1.view((r, r), (q, q)).into_owned();
    let x = solve_sylvester(&a11, &a22, &(-a12), tol)?;
    let mut t_prime = Mat::identity(n, n);
    t_prime.view_mut((0, r), (r, q)).copy_from(&x);
    let mut inverse = Mat::identity(n, n);
    inverse.view_mut((0, r), (r, q)).copy_from(&(-&x));
    let af2 = &inverse * af1 * &t_prime;
    Ok((x, t_prime, af2))
}

/// Third transformation: split the zero-dynamics block by stability.  The
/// middle block of `T″` is an ordered real Schur basis with the stable
/// eigenvalues leading; when the block is diagonalizable with well-separated
/// real eigenvalues, the basis is refined to unit eigenvectors (first
/// significant entry positive), which makes the transformed middle block
/// diagonal.  A middle block that is already quasi-triangular and ordered is
/// left untouched (`T″ = I`).
///
/// Returns `(T″, AF3, nS)` with `nS` the stable eigenvalue count.
pub fn stage3(af2: &Mat, r: usize, q: usize, tol: &TolerancePolicy) -> Result<(Mat, Mat, usize)> {
    let n = af2.nrows();
    assert_eq!(af2.ncols(), n, "stage 3 expects a square matrix");
    assert!(r + q <= n, "block sizes exceed the matrix");
    if q == 0 {
        return Ok((Mat::identity(n, n), af2.clone(), 0));
    }
    let margin = tol.stability_margin;
    let a22 = af2.view((r, r), (q, q)).into_owned();
    for z in eigenvalues(&a22) {
        if z.re.abs() <= margin {
            return Err(Error::AxisEigenvalue {
                re: z.re,
                im: z.im,
                margin,
            });
        }
    }
    if let Some(n_s) = ordered_split_of_quasi_triangular(&a22, margin, tol) {
        return Ok((Mat::identity(n, n), af2.clone(), n_s));
    }
    let form = real_schur(&a22, tol)?;
    let (ordered, n_s) = order_schur_stable_first(&form, margin, tol)?;
    let mid = refine_to_eigenvectors(&a22, &ordered, tol).unwrap_or_else(|| ordered.q.clone());
    let mid_inv = mid
        .clone()
        .full_piv_lu()
        .try_inverse()
        .ok_or(Error::SingularTransform)?;
    let mut t_second = Mat::identity(n, n);
    t_second.view_mut((r, r), (q, q)).copy_from(&mid);
    let mut inverse = Mat::identity(n, n);
    inverse.view_mut((r, r), (q, q)).copy_from(&mid_inv);
    let af3 = &inverse * af2 * &t_second;
    Ok((t_second, af3, n_s))
}

/// Stable count of a block that is already quasi upper triangular with every
/// stable eigenvalue ahead of every unstable one; `None` when any further
/// transformation is required.
fn ordered_split_of_quasi_triangular(
    a22: &Mat,
    margin: f64,
    tol: &TolerancePolicy,
) -> Option<usize> {
    let q = a22.nrows();
    let scale = a22.norm().max(1.0);
    let negligible = |v: f64| v.abs() <= tol.eq_tol * scale;
    for i in 2..q {
        for j in 0..i - 1 {
            if !negligible(a22[(i, j)]) {
                return None;
            }
        }
    }
    let mut groups = Vec::new();
    let mut i = 0;
    while i < q {
        if i + 1 < q && !negligible(a22[(i + 1, i)]) {
            let disc = 0.25 * (a22[(i, i)] - a22[(i + 1, i + 1)]).powi(2)
                + a22[(i, i + 1)] * a22[(i + 1, i)];
            if disc >= 0.0 {
                // A real pair hiding in a 2x2 block still needs reduction.
                return None;
            }
            let re = 0.5 * (a22[(i, i)] + a22[(i + 1, i + 1)]);
            groups.push((re < -margin, 2));
            i += 2;
        } else {
            groups.push((a22[(i, i)] < -margin, 1));
            i += 1;
        }
    }
    let mut n_s = 0;
    let mut seen_unstable = false;
    for (stable, size) in groups {
        if stable {
            if seen_unstable {
                return None;
            }
            n_s += size;
        } else {
            seen_unstable = true;
        }
    }
    Some(n_s)
}

/// Unit eigenvector basis (first significant entry positive) in the
/// ordered-Schur eigenvalue order.  Only attempted for simple,
/// well-separated real spectra; complex pairs, clusters, defective or
/// ill-conditioned eigenproblems fall back to the orthogonal Schur columns.
fn refine_to_eigenvectors(a22: &Mat, ordered: &SchurForm, tol: &TolerancePolicy) -> Option<Mat> {
    let q = a22.nrows();
    if ordered.blocks().iter().any(|&(_, size)| size == 2) {
        return None;
    }
    let lams: Vec<f64> = (0..q).map(|i| ordered.t[(i, i)]).collect();
    let cluster = 1e-6 * (1.0 + a22.norm());
    for i in 0..q {
        for j in 0..i {
            if (lams[i] - lams[j]).abs() < cluster {
                return None;
            }
        }
    }
    let mut basis = Mat::zeros(q, q);
    for (idx, &lam) in lams.iter().enumerate() {
        let shifted = a22 - Mat::identity(q, q) * lam;
        let kernel = kernel_basis(&shifted, tol);
        if kernel.ncols() != 1 {
            return None;
        }
        basis.column_mut(idx).copy_from(&kernel.column(0));
    }
    let sv = singular_values(&basis);
    match (sv.first(), sv.last()) {
        (Some(&top), Some(&bottom)) if bottom > 1e-6 * top => Some(basis),
        _ => None,
    }
}

/// Read the zero structure off a completed trace: V_S* is spanned by the
/// stable middle columns of `T̄` (kept unnormalized as the distinguished
/// basis), `W` is the leading zero-dynamics block of `AF3`, and `L = F·V_S*`
/// is the input that holds trajectories on the resolving subspace.
pub fn resolving_subspace(trace: &PipelineTrace, tol: &TolerancePolicy) -> Result<ZeroStructure> {
    let StageDims { r, n_s, .. } = trace.dims;
    let n = trace.t_bar.nrows();
    let vs_mat = trace.t_bar.columns(r, n_s).into_owned();
    let w = trace.af3.view((r, r), (n_s, n_s)).into_owned();
    let l = &trace.f * &vs_mat;
    let vs = if n_s == 0 {
        Subspace::zero(n)
    } else {
        Subspace::from_columns(&vs_mat, tol)?
    };
    Ok(ZeroStructure { w, l, vs_mat, vs })
}

/// Assemble the feedforward compensator: `A_f = W`, `B_f = [I | O]`,
/// `C_f = L`, `D_f = [O | E]` with `E` the selection embedding.  With
/// nothing to cancel (`nS = 0`) and a full selection this degenerates to the
/// static unit pass-through.
pub fn synthesize_compensator(
    zs: &ZeroStructure,
    input_dim: usize,
    sel: &InputSelection,
) -> Result<Compensator> {
    if sel.input_dim() != input_dim {
        return Err(Error::InvalidSelection(format!(
            "selection addresses {} channels but the system has {}",
            sel.input_dim(),
            input_dim
        )));
    }
    if zs.l.nrows() != input_dim {
        return Err(Error::DimensionMismatch {
            context: "compensator synthesis",
            expected: format!("{input_dim} rows in L"),
            found: format!("{}", zs.l.nrows()),
        });
    }
    let n_s = zs.w.nrows();
    let k = sel.len();
    let bf = hcat(&[&Mat::identity(n_s, n_s), &Mat::zeros(n_s, k)]);
    let df = hcat(&[&Mat::zeros(input_dim, n_s), &sel.embedding()]);
    Ok(Compensator {
        af: zs.w.clone(),
        bf,
        cf: zs.l.clone(),
        df,
    })
}

/// The reduced cascade: the plant state equation driven by `[v; w]` through
/// `B_e = [−V_S* | B·E]`, with `A` and `C` unchanged and `D_e = [O | D·E]`.
pub fn cascade_equivalent(
    sys: &StateSpaceSystem,
    zs: &ZeroStructure,
    sel: &InputSelection,
) -> Result<CascadeSystem> {
    let (n, m, p) = sys.dims();
    if sel.input_dim() != m {
        return Err(Error::InvalidSelection(format!(
            "selection addresses {} channels but the system has {m}",
            sel.input_dim()
        )));
    }
    if zs.vs_mat.nrows() != n {
        return Err(Error::DimensionMismatch {
            context: "cascade construction",
            expected: format!("{n} rows in the resolving basis"),
            found: format!("{}", zs.vs_mat.nrows()),
        });
    }
    let e = sel.embedding();
    let n_s = zs.w.nrows();
    let be = hcat(&[&(-&zs.vs_mat), &(sys.b() * &e)]);
    let de = hcat(&[&Mat::zeros(p, n_s), &(sys.d() * &e)]);
    Ok(CascadeSystem {
        ae: sys.a().clone(),
        be,
        ce: sys.c().clone(),
        de,
        n_s,
    })
}

/// Post-synthesis audit: zero-set law, preservation of reachability and
/// right-invertibility, and order minimality.  Failed checks are reported,
/// never thrown.
pub fn verify_cancellation(
    sys: &StateSpaceSystem,
    cascade: &CascadeSystem,
    tol: &TolerancePolicy,
) -> Result<CancellationReport> {
    let plant = analyze(sys, tol)?;
    build_report(&plant, cascade, tol)
}

fn build_report(
    plant: &GeometricAnalysis,
    cascade: &CascadeSystem,
    tol: &TolerancePolicy,
) -> Result<CancellationReport> {
    let cascade_analysis = analyze(&cascade.to_system()?, tol)?;
    let zero_law_holds = matkit::complex_multisets_match(
        cascade_analysis.zeros.all(),
        plant.zeros.non_minimum_phase(),
        ZERO_PAIRING_TOL,
    );
    let order = cascade.n_s;
    Ok(CancellationReport {
        plant_zeros: plant.zeros.clone(),
        cascade_zeros: cascade_analysis.zeros.clone(),
        zero_law_holds,
        plant_reachable: plant.is_reachable,
        cascade_reachable: cascade_analysis.is_reachable,
        reachability_preserved: !plant.is_reachable || cascade_analysis.is_reachable,
        plant_right_invertible: plant.is_right_invertible,
        cascade_right_invertible: cascade_analysis.is_right_invertible,
        right_invertibility_preserved: !plant.is_right_invertible
            || cascade_analysis.is_right_invertible,
        compensator_order: order,
        order_is_minimal: order == plant.zeros.minimum_phase().len(),
    })
}

/// A supplied friend must keep V* invariant and output-nulled, up to the
/// loose tolerance for transcribed data.
fn validate_supplied_friend(
    sys: &StateSpaceSystem,
    v_star: &Subspace,
    f: &Mat,
) -> Result<()> {
    let (n, m, _) = sys.dims();
    if f.nrows() != m || f.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "supplied friend",
            expected: format!("{m}x{n}"),
            found: format!("{}x{}", f.nrows(), f.ncols()),
        });
    }
    matkit::ensure_finite(f)?;
    if v_star.dim() == 0 {
        return Ok(());
    }
    let vb = v_star.basis();
    let a_image = (sys.a() + sys.b() * f) * vb;
    let off = &a_image - vb * (vb.transpose() * &a_image);
    let invariance = off.norm() / a_image.norm().max(1.0);
    let c_image = (sys.c() + sys.d() * f) * vb;
    let nulling = c_image.norm() / (sys.c().norm() + sys.d().norm() * f.norm()).max(1.0);
    let worst = invariance.max(nulling);
    if worst > SUPPLIED_TOL {
        return Err(Error::SuppliedInputInvalid {
            what: "friend matrix (V* not invariant or not output-nulled)",
            residual: worst,
            allowed: SUPPLIED_TOL,
        });
    }
    Ok(())
}

/// A supplied stage-1 basis must be adapted to the computed chain
/// R_{V*} ⊆ V*: leading `r` columns inside R_{V*}, leading `r+q` inside V*.
fn validate_supplied_transform(analysis: &GeometricAnalysis, t: &Mat) -> Result<()> {
    let n = analysis.v_star.ambient_dim();
    if t.nrows() != n || t.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "supplied transformation",
            expected: format!("{n}x{n}"),
            found: format!("{}x{}", t.nrows(), t.ncols()),
        });
    }
    matkit::ensure_finite(t)?;
    fn block_defect(space: &Subspace, cols: Mat) -> f64 {
        if cols.ncols() == 0 {
            return 0.0;
        }
        let b = space.basis();
        let off = &cols - b * (b.transpose() * &cols);
        off.norm() / cols.norm().max(1.0)
    }
    let r = analysis.r_v_star.dim();
    let q = analysis.v_star.dim() - r;
    let worst = block_defect(&analysis.r_v_star, t.columns(0, r).into_owned()).max(block_defect(
        &analysis.v_star,
        t.columns(0, r + q).into_owned(),
    ));
    if worst > SUPPLIED_TOL {
        return Err(Error::SuppliedInputInvalid {
            what: "transformation (leading columns miss the invariant chain)",
            residual: worst,
            allowed: SUPPLIED_TOL,
        });
    }
    Ok(())
}

/// The full synthesis chain: geometric analysis, friend, the three staged
/// transformations, resolving subspace, compensator, cascade and the final
/// audit.
///
/// `supplied_f` / `supplied_t` replace the computed friend and adapted basis
/// after validation against the computed geometry; values rounded to a few
/// decimals are accepted.  A system with no minimum-phase zeros is not an
/// error — the compensator degenerates to a zero-order pass-through and the
/// audit still runs.
pub fn run_pipeline(
    sys: &StateSpaceSystem,
    sel: &InputSelection,
    supplied_f: Option<&Mat>,
    supplied_t: Option<&Mat>,
    tol: &TolerancePolicy,
) -> Result<PipelineOutcome> {
    let (_, m, _) = sys.dims();
    if sel.input_dim() != m {
        return Err(Error::InvalidSelection(format!(
            "selection addresses {} channels but the system has {m}",
            sel.input_dim()
        )));
    }
    let analysis = analyze(sys, tol)?;
    let r = analysis.r_v_star.dim();
    let q = analysis.v_star.dim() - r;
    let f = match supplied_f {
        Some(fm) => {
            validate_supplied_friend(sys, &analysis.v_star, fm)?;
            fm.clone()
        }
        None => friend(sys, &analysis.v_star, tol)?,
    };
    let t = match supplied_t {
        Some(tm) => {
            validate_supplied_transform(&analysis, tm)?;
            tm.clone()
        }
        None => build_stage1_transform(&analysis.v_star, &analysis.r_v_star, None, tol)?,
    };
    let (af1, cf1) = stage1(sys, &f, &t, tol)?;
    let (x, t_prime, af2) = stage2(&af1, r, q, tol)?;
    let (t_second, af3, n_s) = stage3(&af2, r, q, tol)?;
    let t_bar = &t * &t_prime * &t_second;
    let cf3 = &cf1 * &t_prime * &t_second;
    let trace = PipelineTrace {
        f,
        t,
        t_prime,
        t_second,
        t_bar,
        af1,
        cf1,
        x,
        af2,
        af3,
        cf3,
        dims: StageDims {
            r,
            q,
            n_s,
            n_u: q - n_s,
        },
    };
    let structure = resolving_subspace(&trace, tol)?;
    let compensator = synthesize_compensator(&structure, m, sel)?;
    let cascade = cascade_equivalent(sys, &structure, sel)?;
    let report = build_report(&analysis, &cascade, tol)?;
    Ok(PipelineOutcome {
        analysis,
        trace,
        structure,
        compensator,
        cascade,
        report,
    })
}
