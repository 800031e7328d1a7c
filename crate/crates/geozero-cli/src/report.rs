//! Assembly and rendering of run reports.
//!
//! One report type serves both commands: `analyze` fills the structural
//! half, `cancel` additionally attaches the selection, compensator order,
//! cascade zero set and preservation verdicts.  JSON field order is fixed
//! by the struct, so reports are byte-reproducible.

use geozero::geometry::GeometricAnalysis;
use geozero::matkit::Cx;
use geozero::zerocancel::{CancellationReport, InputSelection};
use geozero::TolerancePolicy;
use serde::Serialize;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Dims {
    pub n: usize,
    pub m: usize,
    pub p: usize,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ZeroPartitionReport {
    pub minimum_phase: Vec<ComplexValue>,
    pub non_minimum_phase: Vec<ComplexValue>,
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PreservationReport {
    pub zero_law_holds: bool,
    pub cascade_reachable: bool,
    pub reachability_preserved: bool,
    pub cascade_right_invertible: bool,
    pub right_invertibility_preserved: bool,
    pub order_is_minimal: bool,
    pub all_pass: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    pub rank: f64,
    pub eq: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dims: Dims,
    pub v_star_dim: usize,
    pub s_star_dim: usize,
    pub r_v_star_dim: usize,
    pub reachable: bool,
    pub right_invertible: bool,
    pub zeros: ZeroPartitionReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selection: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compensator_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cascade_zeros: Option<Vec<ComplexValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preservation: Option<PreservationReport>,
    pub tolerances: Tolerances,
}

/// Zeros in a stable presentation order: by real part, then imaginary part.
fn sorted_values(zeros: &[Cx]) -> Vec<ComplexValue> {
    let mut list: Vec<ComplexValue> = zeros.iter().map(|z| ComplexValue { re: z.re, im: z.im }).collect();
    list.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    list
}

pub fn analysis_report(
    name: Option<String>,
    dims: (usize, usize, usize),
    analysis: &GeometricAnalysis,
    tol: &TolerancePolicy,
) -> RunReport {
    let (n, m, p) = dims;
    RunReport {
        name,
        dims: Dims { n, m, p },
        v_star_dim: analysis.v_star.dim(),
        s_star_dim: analysis.s_star.dim(),
        r_v_star_dim: analysis.r_v_star.dim(),
        reachable: analysis.is_reachable,
        right_invertible: analysis.is_right_invertible,
        zeros: ZeroPartitionReport {
            minimum_phase: sorted_values(analysis.zeros.minimum_phase()),
            non_minimum_phase: sorted_values(analysis.zeros.non_minimum_phase()),
        },
        selection: None,
        compensator_order: None,
        cascade_zeros: None,
        preservation: None,
        tolerances: Tolerances {
            rank: tol.rank_tol,
            eq: tol.eq_tol,
            margin: tol.stability_margin,
        },
    }
}

pub fn attach_cancellation(
    report: &mut RunReport,
    cancellation: &CancellationReport,
    sel: &InputSelection,
) {
    report.selection = Some(sel.kept().to_vec());
    report.compensator_order = Some(cancellation.compensator_order);
    report.cascade_zeros = Some(sorted_values(cancellation.cascade_zeros.all()));
    report.preservation = Some(PreservationReport {
        zero_law_holds: cancellation.zero_law_holds,
        cascade_reachable: cancellation.cascade_reachable,
        reachability_preserved: cancellation.reachability_preserved,
        cascade_right_invertible: cancellation.cascade_right_invertible,
        right_invertibility_preserved: cancellation.right_invertibility_preserved,
        order_is_minimal: cancellation.order_is_minimal,
        all_pass: cancellation.all_pass(),
    });
}

fn fmt_complex(v: &ComplexValue) -> String {
    if v.im.abs() < 5e-5 {
        format!("{:.4}", v.re)
    } else {
        format!("{:.4}{:+.4}i", v.re, v.im)
    }
}

fn fmt_zero_list(list: &[ComplexValue]) -> String {
    if list.is_empty() {
        "none".into()
    } else {
        list.iter().map(fmt_complex).collect::<Vec<_>>().join(", ")
    }
}

fn yes_no(v: bool) -> &'static str {
    if v {
        "yes"
    } else {
        "no"
    }
}

fn pass_fail(v: bool) -> &'static str {
    if v {
        "pass"
    } else {
        "fail"
    }
}

/// Narrative rendering for `--format=text`.
pub fn render_text(r: &RunReport) -> String {
    let mut s = String::new();
    match &r.name {
        Some(name) => s.push_str(&format!(
            "system {name}: {} states, {} inputs, {} outputs\n",
            r.dims.n, r.dims.m, r.dims.p
        )),
        None => s.push_str(&format!(
            "system: {} states, {} inputs, {} outputs\n",
            r.dims.n, r.dims.m, r.dims.p
        )),
    }
    s.push_str(&format!(
        "dim V* = {}, dim S* = {}, dim R_V* = {}\n",
        r.v_star_dim, r.s_star_dim, r.r_v_star_dim
    ));
    s.push_str(&format!("reachable: {}\n", yes_no(r.reachable)));
    s.push_str(&format!("right-invertible: {}\n", yes_no(r.right_invertible)));
    s.push_str(&format!(
        "invariant zeros (minimum-phase): {}\n",
        fmt_zero_list(&r.zeros.minimum_phase)
    ));
    s.push_str(&format!(
        "invariant zeros (nonminimum-phase): {}\n",
        fmt_zero_list(&r.zeros.non_minimum_phase)
    ));

    if let Some(selection) = &r.selection {
        let rendered = selection
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        s.push_str(&format!("selected input channels: {rendered}\n"));
    }
    if let Some(order) = r.compensator_order {
        s.push_str(&format!("compensator order: {order}\n"));
    }
    if let Some(zeros) = &r.cascade_zeros {
        s.push_str(&format!("cascade zeros: {}\n", fmt_zero_list(zeros)));
    }
    if let Some(p) = &r.preservation {
        s.push_str(&format!("zero-set law: {}\n", pass_fail(p.zero_law_holds)));
        s.push_str(&format!(
            "reachability preserved: {}\n",
            pass_fail(p.reachability_preserved)
        ));
        s.push_str(&format!(
            "right-invertibility preserved: {}\n",
            pass_fail(p.right_invertibility_preserved)
        ));
        s.push_str(&format!(
            "order is minimal: {}\n",
            pass_fail(p.order_is_minimal)
        ));
        s.push_str(&format!("overall: {}\n", pass_fail(p.all_pass)));
    }
    s.push_str(&format!(
        "tolerances: rank {:.1e}, eq {:.1e}, margin {:.1e}\n",
        r.tolerances.rank, r.tolerances.eq, r.tolerances.margin
    ));
    s
}
