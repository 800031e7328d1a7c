//! Shared fixtures: the three bundled example systems and the reference
//! values the toolkit is expected to reproduce on them.

#![allow(dead_code)]

use geozero::geometry::StateSpaceSystem;
use geozero::matkit::Mat;

/// First bundled example: five states, four inputs, three outputs; one
/// minimum-phase and one nonminimum-phase invariant zero.
pub fn example1() -> StateSpaceSystem {
    let a = Mat::from_row_slice(
        5,
        5,
        &[
            -0.79, -1.89, -1.0, -1.01, -0.2, //
            0.89, -4.3, -0.76, -0.48, -0.12, //
            0.8, -5.57, -3.25, -3.01, -1.52, //
            -1.18, 3.41, 0.26, -1.03, 0.92, //
            1.62, -6.41, 0.55, -4.15, -5.63,
        ],
    );
    let b = Mat::from_row_slice(
        5,
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 1.0, //
            2.0, 1.0, 0.0, 0.0, //
            1.0, -1.0, 0.0, 0.0, //
            -1.0, 0.0, 2.0, 0.0,
        ],
    );
    let c = Mat::from_row_slice(
        3,
        5,
        &[
            1.0, 0.0, 0.0, 0.0, 0.0, //
            0.89, -2.8, -0.76, -0.48, -1.12, //
            -0.29, -0.89, -0.25, -1.51, -0.2,
        ],
    );
    let d = Mat::from_row_slice(
        3,
        4,
        &[
            0.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            1.0, 0.0, 0.0, 0.0,
        ],
    );
    StateSpaceSystem::assemble(a, b, c, d).unwrap()
}

/// Reference basis of V* for the first example.
pub fn ex1_v_star() -> Mat {
    Mat::from_row_slice(
        5,
        3,
        &[
            0.0, 0.0, 0.0, //
            -0.6695, 0.0, 0.0, //
            0.6180, -0.5547, 0.0, //
            -0.4120, -0.8321, 0.0, //
            0.0, 0.0, -1.0,
        ],
    )
}

/// Reference basis of S* for the first example.
pub fn ex1_s_star() -> Mat {
    Mat::from_row_slice(
        5,
        3,
        &[
            0.4862, 0.0, 0.0, //
            0.0, -1.0, 0.0, //
            0.4813, 0.0, 0.0, //
            -0.7293, 0.0, 0.0, //
            0.0, 0.0, 1.0,
        ],
    )
}

/// Reference friend of V* for the first example.
pub fn ex1_friend() -> Mat {
    Mat::from_row_slice(
        4,
        5,
        &[
            0.0, 0.7121, 0.1166, 1.5990, 0.2000, //
            0.0, 1.0731, -0.5352, 1.3434, 1.1200, //
            0.0, 1.9832, -0.8226, 2.7324, 2.3320, //
            0.0, 0.6742, -0.3712, 0.7916, -1.0000,
        ],
    )
}

/// Reference stage-1 basis for the first example: R_{V*} column, two
/// zero-dynamics columns inside V*, and two completion columns drawn from
/// S*.
pub fn ex1_transform() -> Mat {
    Mat::from_row_slice(
        5,
        5,
        &[
            0.0, 0.0, 0.0, -0.4862, 0.0, //
            0.0, 0.6695, 0.0, 0.0, -1.0, //
            0.0, -0.6180, -0.5547, -0.4813, 0.0, //
            0.0, 0.4120, -0.8321, 0.7293, 0.0, //
            1.0, 0.0, 0.0, 0.0, 0.0,
        ],
    )
}

/// Reference A_F′ for the first example.
pub fn ex1_af1() -> Mat {
    Mat::from_row_slice(
        5,
        5,
        &[
            -1.1660, -1.4810, 0.9086, -0.4116, 3.1557, //
            0.0, 0.0040, -0.6763, -0.2900, -3.0932, //
            0.0, -1.3907, -0.5015, -1.8603, 0.0092, //
            0.0, 0.0, 0.0, -2.5481, -2.4227, //
            0.0, 0.0, 0.0, -1.7707, -4.6237,
        ],
    )
}

/// Reference C_F′ for the first example.
pub fn ex1_cf1() -> Mat {
    Mat::from_row_slice(
        3,
        5,
        &[
            0.0, 0.0, 0.0, -0.4862, 0.0, //
            0.0, 0.0, 0.0, 0.8204, 1.7269, //
            0.0, 0.0, 0.0, 0.2701, 0.1779,
        ],
    )
}

/// Reference Sylvester solution X for the first example.
pub fn ex1_x() -> Mat {
    Mat::from_row_slice(1, 2, &[-1.7146, -0.3776])
}

/// Reference A_F″ for the first example (only row one differs from A_F′).
pub fn ex1_af2() -> Mat {
    Mat::from_row_slice(
        5,
        5,
        &[
            -1.1660, 0.0, 0.0, -1.6113, -2.1444, //
            0.0, 0.0040, -0.6763, -0.2900, -3.0932, //
            0.0, -1.3907, -0.5015, -1.8603, 0.0092, //
            0.0, 0.0, 0.0, -2.5481, -2.4227, //
            0.0, 0.0, 0.0, -1.7707, -4.6237,
        ],
    )
}

/// Reference unit-eigenvector block of T″ for the first example.
pub fn ex1_jprime() -> Mat {
    Mat::from_row_slice(2, 2, &[0.4744, 0.6699, 0.8803, -0.7424])
}

/// Reference A_F‴ for the first example.
pub fn ex1_af3() -> Mat {
    Mat::from_row_slice(
        5,
        5,
        &[
            -1.1660, 0.0, 0.0, -1.6113, -2.1444, //
            0.0, -1.2509, 0.0, -1.5517, -2.4314, //
            0.0, 0.0, 0.7534, 0.6658, -2.8954, //
            0.0, 0.0, 0.0, -2.5481, -2.4227, //
            0.0, 0.0, 0.0, -1.7707, -4.6237,
        ],
    )
}

/// Reference resolving-subspace basis column for the first example.
pub fn ex1_vs() -> Mat {
    Mat::from_row_slice(5, 1, &[0.0, 0.3176, -0.7815, -0.5370, -1.1458])
}

/// Reference L for the first example.
pub fn ex1_l() -> Mat {
    Mat::from_row_slice(4, 1, &[-0.9528, -1.2457, -2.8665, 1.2249])
}

/// Reference cascade input matrix for the first example.
pub fn ex1_be() -> Mat {
    Mat::from_row_slice(
        5,
        5,
        &[
            0.0, 1.0, 0.0, 0.0, 0.0, //
            -0.3176, 0.0, 1.0, 0.0, 1.0, //
            0.7815, 2.0, 1.0, 0.0, 0.0, //
            0.5370, 1.0, -1.0, 0.0, 0.0, //
            1.1458, -1.0, 0.0, 2.0, 0.0,
        ],
    )
}

/// Reference cascade feedthrough for the first example.
pub fn ex1_de() -> Mat {
    Mat::from_row_slice(
        3,
        5,
        &[
            0.0, 0.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, 0.0,
        ],
    )
}

/// Reference S* of the first example's cascade.
pub fn ex1_cascade_s_star() -> Mat {
    Mat::from_row_slice(
        5,
        4,
        &[
            0.4863, 0.0, 0.0, 0.0, //
            0.0, -1.0, 0.0, 0.0, //
            0.4949, 0.0, 0.8242, 0.0, //
            -0.7202, 0.0, 0.5663, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ],
    )
}

/// Second bundled example: seven states, two inputs, two outputs; a single
/// invariant zero −1 with algebraic multiplicity three and geometric
/// multiplicity two.  Not reachable and not right-invertible.
pub fn example2() -> StateSpaceSystem {
    let a = Mat::from_row_slice(
        7,
        7,
        &[
            -1.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, //
            0.0, -1.0, 0.0, 2.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0, //
            0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0,
        ],
    );
    let mut b = Mat::zeros(7, 2);
    b[(5, 0)] = 1.0;
    b[(6, 1)] = 1.0;
    let mut c = Mat::zeros(2, 7);
    c[(0, 3)] = 1.0;
    c[(1, 4)] = 1.0;
    let d = Mat::zeros(2, 2);
    StateSpaceSystem::assemble(a, b, c, d).unwrap()
}

/// Reference resolving-subspace basis for the second example (not
/// orthonormal; ours may differ by a change of basis).
pub fn ex2_vs() -> Mat {
    Mat::from_row_slice(
        7,
        3,
        &[
            -1.0, 0.0, 0.0, //
            0.0, -1.0, 0.0, //
            0.0, 0.0, 1.0, //
            0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, //
            0.0, 0.3333, 0.1667, //
            0.0, 0.0, -0.5,
        ],
    )
}

/// Reference zero-structure map W for the second example: a single Jordan
/// block pairing plus a separate copy of the eigenvalue −1.
pub fn ex2_w() -> Mat {
    Mat::from_row_slice(
        3,
        3,
        &[
            -1.0, 1.0, 0.0, //
            0.0, -1.0, 0.0, //
            0.0, 0.0, -1.0,
        ],
    )
}

/// Reference L for the second example.
pub fn ex2_l() -> Mat {
    Mat::from_row_slice(
        2,
        3,
        &[
            0.0, 0.3333, 0.1667, //
            0.0, 0.0, -0.5,
        ],
    )
}

/// Third bundled example: five states, three inputs, two outputs; a single
/// minimum-phase invariant zero at −0.5.  Reachable and right-invertible.
pub fn example3() -> StateSpaceSystem {
    let a = Mat::from_row_slice(
        5,
        5,
        &[
            -4.0, 4.0, 1.0, 0.0, 0.0, //
            0.0, -5.0, -3.0, 0.0, 0.0, //
            0.0, 2.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, -30.0, -12.5, //
            0.0, 0.0, 0.0, 16.0, 0.0,
        ],
    );
    let b = Mat::from_row_slice(
        5,
        3,
        &[
            0.0, 0.0, 0.0, //
            3.4640, 0.0, 0.0, //
            0.0, 0.0, 0.0, //
            0.0, 3.5355, 1.0, //
            0.0, 0.0, 1.0,
        ],
    );
    let c = Mat::from_row_slice(
        2,
        5,
        &[
            3.4640, 0.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, 3.5355,
        ],
    );
    let d = Mat::from_row_slice(
        2,
        3,
        &[
            0.0, 0.0, 0.0, //
            -0.5, 0.0, 1.0,
        ],
    );
    StateSpaceSystem::assemble(a, b, c, d).unwrap()
}

/// Reference resolving-subspace column for the third example.
pub fn ex3_vs() -> Mat {
    Mat::from_row_slice(5, 1, &[0.0, -0.2425, 0.9701, 0.0281, -0.0849])
}

/// Reference L for the third example.
pub fn ex3_l() -> Mat {
    Mat::from_row_slice(3, 1, &[0.5251, 0.0497, -0.4074])
}

/// Reference cascade input matrix for the third example (channels 2 and 3
/// kept).
pub fn ex3_be() -> Mat {
    Mat::from_row_slice(
        5,
        3,
        &[
            0.0, 0.0, 0.0, //
            0.2425, 0.0, 0.0, //
            -0.9701, 0.0, 0.0, //
            -0.0281, 3.5355, 1.0, //
            0.0849, 0.0, 1.0,
        ],
    )
}

/// Reference cascade feedthrough for the third example.
pub fn ex3_de() -> Mat {
    Mat::from_row_slice(2, 3, &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0])
}

/// Largest entrywise deviation between two equal-shaped matrices.
pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    assert_eq!(a.shape(), b.shape(), "comparing different shapes");
    (a - b).amax()
}

/// Largest entrywise deviation after aligning the sign of each column of
/// `ours` to the reference — eigenvector-like columns are only determined up
/// to sign.
pub fn max_abs_diff_signed(ours: &Mat, reference: &Mat) -> f64 {
    assert_eq!(ours.shape(), reference.shape(), "comparing different shapes");
    let signs = column_signs(ours, reference);
    (apply_column_signs(ours, &signs) - reference).amax()
}

/// Per-column sign flips (+1/−1) that bring `ours` closest to `reference`,
/// judged by the dot product.  Basis columns fixed only up to sign carry
/// their flip onto every matrix expressed in that basis, so the same vector
/// must be reused for all of them.
pub fn column_signs(ours: &Mat, reference: &Mat) -> Vec<f64> {
    assert_eq!(ours.shape(), reference.shape(), "comparing different shapes");
    (0..ours.ncols())
        .map(|j| {
            if ours.column(j).dot(&reference.column(j)) < 0.0 {
                -1.0
            } else {
                1.0
            }
        })
        .collect()
}

/// Scale each column of `m` by the matching sign.
pub fn apply_column_signs(m: &Mat, signs: &[f64]) -> Mat {
    assert_eq!(m.ncols(), signs.len(), "one sign per column");
    let mut out = m.clone();
    for (j, s) in signs.iter().enumerate() {
        if *s < 0.0 {
            out.column_mut(j).neg_mut();
        }
    }
    out
}
