//! The three-file verification audit behind `geozero verify`.
//!
//! Given a plant, a compensator and a cascade — typically the triple written
//! by `geozero cancel` — it re-derives every claim the cancellation makes:
//! the cascade matches the literal series interconnection plant∘compensator
//! Markov parameter by Markov parameter, the cascade zero set equals the
//! nonminimum-phase plant zeros, and reachability, right invertibility and
//! order minimality held up.

use geozero::geometry::StateSpaceSystem;
use geozero::matkit::{hcat, vcat, Mat};
use geozero::zerocancel::{verify_cancellation, CancellationReport, CascadeSystem};
use geozero::TolerancePolicy;

use crate::Failure;

/// Agreement threshold for one Markov parameter, relative to its magnitude.
const MARKOV_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct CheckLine {
    pub label: &'static str,
    pub pass: bool,
    /// Human-readable evidence: the residual for the Markov check, the zero
    /// sets for the law, and so on.
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub checks: Vec<CheckLine>,
    pub report: CancellationReport,
}

impl VerifyOutcome {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&CheckLine> {
        self.checks.iter().find(|c| !c.pass)
    }
}

/// First `count` Markov parameters `D, CB, CAB, CA²B, ...` of a quadruple.
fn markov_parameters(sys: &StateSpaceSystem, count: usize) -> Vec<Mat> {
    let mut params = Vec::with_capacity(count);
    params.push(sys.d().clone());
    let mut power = sys.b().clone();
    for _ in 1..count {
        params.push(sys.c() * &power);
        power = sys.a() * power;
    }
    params
}

/// Literal series interconnection: the compensator's output drives the
/// plant's input.
fn series_realization(
    plant: &StateSpaceSystem,
    comp: &StateSpaceSystem,
) -> Result<StateSpaceSystem, Failure> {
    let nf = comp.a().nrows();
    let n = plant.a().nrows();
    let a = vcat(&[
        &hcat(&[comp.a(), &Mat::zeros(nf, n)]),
        &hcat(&[&(plant.b() * comp.c()), plant.a()]),
    ]);
    let b = vcat(&[comp.b(), &(plant.b() * comp.d())]);
    let c = hcat(&[&(plant.d() * comp.c()), plant.c()]);
    let d = plant.d() * comp.d();
    StateSpaceSystem::assemble(a, b, c, d).map_err(Failure::from)
}

fn check_dims(
    plant: &StateSpaceSystem,
    comp: &StateSpaceSystem,
    cascade: &StateSpaceSystem,
) -> Result<(), Failure> {
    let (_, m, p) = plant.dims();
    let (_, mf, pf) = comp.dims();
    let (_, mc, pc) = cascade.dims();
    if pf != m {
        return Err(Failure::validation(format!(
            "compensator has {pf} outputs but the plant takes {m} inputs"
        )));
    }
    if mc != mf {
        return Err(Failure::validation(format!(
            "cascade has {mc} inputs but the compensator takes {mf}"
        )));
    }
    if pc != p {
        return Err(Failure::validation(format!(
            "cascade has {pc} outputs but the plant produces {p}"
        )));
    }
    Ok(())
}

pub fn verify_triple(
    plant: &StateSpaceSystem,
    comp: &StateSpaceSystem,
    cascade: &StateSpaceSystem,
    tol: &TolerancePolicy,
) -> Result<VerifyOutcome, Failure> {
    check_dims(plant, comp, cascade)?;
    let mut checks = Vec::new();

    // Markov-parameter equivalence of the series form and the cascade.
    let count = 2 * plant.a().nrows().max(cascade.a().nrows());
    let series = series_realization(plant, comp)?;
    let series_params = markov_parameters(&series, count);
    let cascade_params = markov_parameters(cascade, count);
    let mut worst = 0.0f64;
    for (s, c) in series_params.iter().zip(&cascade_params) {
        let scale = 1.0 + s.amax().max(c.amax());
        worst = worst.max((s - c).amax() / scale);
    }
    checks.push(CheckLine {
        label: "markov equivalence (series vs cascade)",
        pass: worst <= MARKOV_TOL,
        detail: format!("largest relative deviation {worst:.2e} over {count} parameters"),
    });

    // Zero-set law and preservation, recomputed from scratch.
    let casc_struct = CascadeSystem {
        ae: cascade.a().clone(),
        be: cascade.b().clone(),
        ce: cascade.c().clone(),
        de: cascade.d().clone(),
        n_s: comp.a().nrows(),
    };
    let report = verify_cancellation(plant, &casc_struct, tol)?;
    checks.push(CheckLine {
        label: "zero-set law (cascade zeros = nonminimum-phase plant zeros)",
        pass: report.zero_law_holds,
        detail: format!(
            "cascade has {} zeros, plant has {} nonminimum-phase",
            report.cascade_zeros.len(),
            report.plant_zeros.non_minimum_phase().len()
        ),
    });
    checks.push(CheckLine {
        label: "reachability preserved",
        pass: report.reachability_preserved,
        detail: format!(
            "plant {}, cascade {}",
            reachability_word(report.plant_reachable),
            reachability_word(report.cascade_reachable)
        ),
    });
    checks.push(CheckLine {
        label: "right-invertibility preserved",
        pass: report.right_invertibility_preserved,
        detail: format!(
            "plant {}, cascade {}",
            invertibility_word(report.plant_right_invertible),
            invertibility_word(report.cascade_right_invertible)
        ),
    });
    checks.push(CheckLine {
        label: "compensator order minimal",
        pass: report.order_is_minimal,
        detail: format!(
            "order {}, plant has {} minimum-phase zeros",
            report.compensator_order,
            report.plant_zeros.minimum_phase().len()
        ),
    });

    Ok(VerifyOutcome { checks, report })
}

fn reachability_word(v: bool) -> &'static str {
    if v {
        "reachable"
    } else {
        "not reachable"
    }
}

fn invertibility_word(v: bool) -> &'static str {
    if v {
        "right-invertible"
    } else {
        "not right-invertible"
    }
}
