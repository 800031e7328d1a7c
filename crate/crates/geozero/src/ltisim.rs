//! Time-domain evaluation of state-space systems: step responses by exact
//! discretization, the overshoot metric, per-channel relative degree, and DC
//! gain.
//!
//! The step integrator is not a Runge-Kutta scheme: each sample advances by
//! the exact discrete map `(e^{A·dt}, ∫e^{Aτ}dτ·b)` obtained from one
//! augmented matrix exponential, so the only error source is the exponential
//! itself.

use crate::error::{Error, Result};
use crate::geometry::StateSpaceSystem;
use crate::matkit::{matrix_exponential, Mat, TolerancePolicy};

/// Default sample period (seconds).
pub const DEFAULT_DT: f64 = 1e-3;

/// Default simulation horizon (seconds).
pub const DEFAULT_HORIZON: f64 = 10.0;

/// State-norm bound beyond which a simulation is reported as unbounded.
const OVERFLOW_GUARD: f64 = 1e12;

/// Sampled multi-output response on a uniform time grid: row `k` of
/// `values` is the output vector at `times[k]`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub values: Mat,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn output_count(&self) -> usize {
        self.values.ncols()
    }

    /// CSV rendering: header `t,y1,...,yp`, one row per sample, every number
    /// in shortest round-trip decimal form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for j in 1..=self.output_count() {
            out.push_str(&format!(",y{j}"));
        }
        out.push('\n');
        for (k, t) in self.times.iter().enumerate() {
            out.push_str(&format!("{t}"));
            for j in 0..self.output_count() {
                out.push_str(&format!(",{}", self.values[(k, j)]));
            }
            out.push('\n');
        }
        out
    }
}

/// Unit-step response on `input_channel` (1-based) over `[0, horizon]` with
/// sample period `dt`, starting from the zero state.
pub fn step_response(
    sys: &StateSpaceSystem,
    input_channel: usize,
    horizon: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidGrid(format!("dt must be positive, got {dt}")));
    }
    if !(horizon >= dt) || !horizon.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "horizon {horizon} must be at least one step dt = {dt}"
        )));
    }
    let (n, m, p) = sys.dims();
    if input_channel == 0 || input_channel > m {
        return Err(Error::InvalidSelection(format!(
            "step input channel {input_channel} is outside 1..={m}"
        )));
    }
    let b = sys.b().column(input_channel - 1).into_owned();
    let d = sys.d().column(input_channel - 1).into_owned();

    // One exponential of the augmented map gives both the state propagator
    // and the held-input convolution integral.
    let mut aug = Mat::zeros(n + 1, n + 1);
    aug.view_mut((0, 0), (n, n)).copy_from(sys.a());
    aug.view_mut((0, n), (n, 1)).copy_from(&b);
    let disc = matrix_exponential(&aug, dt);
    let ad = disc.view((0, 0), (n, n)).into_owned();
    let bd = disc.view((0, n), (n, 1)).into_owned();

    let steps = (horizon / dt).round() as usize;
    let count = steps + 1;
    let mut times = Vec::with_capacity(count);
    let mut values = Mat::zeros(count, p);
    let mut x = Mat::zeros(n, 1);
    for k in 0..count {
        let t = k as f64 * dt;
        if x.amax() > OVERFLOW_GUARD {
            return Err(Error::UnboundedResponse {
                t,
                bound: OVERFLOW_GUARD,
            });
        }
        let y = sys.c() * &x + &d;
        times.push(t);
        values.view_mut((k, 0), (1, p)).copy_from(&y.transpose());
        x = &ad * x + &bd;
    }
    Ok(Trajectory { times, values })
}

/// Overshoot fraction of one output series: `(max − final)/|final|`,
/// clamped below at zero.
///
/// The series must have settled — the last tenth of the samples may vary by
/// at most 1% of the final value — and the final value must be nonzero;
/// both conditions are reported as distinct errors.  The metric is invariant
/// under positive scaling of the output.
pub fn overshoot(traj: &Trajectory, output_channel: usize) -> Result<f64> {
    let p = traj.output_count();
    if output_channel == 0 || output_channel > p {
        return Err(Error::InvalidSelection(format!(
            "overshoot output channel {output_channel} is outside 1..={p}"
        )));
    }
    let count = traj.len();
    if count < 2 {
        return Err(Error::InvalidGrid(
            "overshoot needs at least two samples".into(),
        ));
    }
    let series: Vec<f64> = (0..count)
        .map(|k| traj.values[(k, output_channel - 1)])
        .collect();
    let final_value = *series.last().unwrap();
    let peak_abs = series.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if final_value.abs() <= 1e-12 * peak_abs || peak_abs == 0.0 {
        return Err(Error::ZeroFinalValue);
    }

    let tail = count.div_ceil(10).max(2);
    let window = &series[count - tail..];
    let lo = window.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = window.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let variation = hi - lo;
    if variation > 0.01 * final_value.abs() {
        return Err(Error::NonSettling { variation });
    }

    let max_value = series.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(((max_value - final_value) / final_value.abs()).max(0.0))
}

/// Relative degree of a single input/output channel pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelativeDegree {
    /// Index of the first nonzero Markov parameter: 0 for direct
    /// feedthrough, k for `C·A^{k−1}·B`.
    Finite(usize),
    /// Every Markov parameter of the pair vanishes up to order n.
    Infinite,
}

impl std::fmt::Display for RelativeDegree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RelativeDegree::Finite(k) => write!(f, "{k}"),
            RelativeDegree::Infinite => write!(f, "infinite"),
        }
    }
}

/// First index k for which the (output, input) entry of the k-th Markov
/// parameter `D, CB, CAB, ...` is nonzero, judged against `eq_tol` at the
/// scale of that parameter.
pub fn relative_degree(
    sys: &StateSpaceSystem,
    output_channel: usize,
    input_channel: usize,
    tol: &TolerancePolicy,
) -> Result<RelativeDegree> {
    let (n, m, p) = sys.dims();
    if output_channel == 0 || output_channel > p {
        return Err(Error::InvalidSelection(format!(
            "relative-degree output channel {output_channel} is outside 1..={p}"
        )));
    }
    if input_channel == 0 || input_channel > m {
        return Err(Error::InvalidSelection(format!(
            "relative-degree input channel {input_channel} is outside 1..={m}"
        )));
    }
    let (row, col) = (output_channel - 1, input_channel - 1);
    let significant = |entry: f64, scale: f64| entry.abs() > tol.eq_tol * (1.0 + scale);
    if significant(sys.d()[(row, col)], sys.d().amax()) {
        return Ok(RelativeDegree::Finite(0));
    }
    let mut power = sys.b().clone();
    for k in 1..=n {
        let markov = sys.c() * &power;
        if significant(markov[(row, col)], markov.amax()) {
            return Ok(RelativeDegree::Finite(k));
        }
        power = sys.a() * power;
    }
    Ok(RelativeDegree::Infinite)
}

/// Steady-state gain `D − C·A⁻¹·B`; requires A to have no eigenvalue at the
/// origin.
pub fn dc_gain(sys: &StateSpaceSystem) -> Result<Mat> {
    let lu = sys.a().clone().lu();
    match lu.solve(sys.b()) {
        Some(x) if x.iter().all(|v| v.is_finite()) => Ok(sys.d() - sys.c() * x),
        _ => Err(Error::SingularMatrix {
            context: "DC gain needs A invertible",
        }),
    }
}
