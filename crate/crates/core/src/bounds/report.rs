use std::fmt::Write as _;

use num_rational::BigRational;
use serde::{Serialize, Serializer};

use super::{
    absolute_entry, alpha, alpha_expr, alpha_p2, at_delta, beta, check_epsilon, delta_set_entry, delta_zero_table,
    omega_from_a, p2_delta_entry, p2_entries, quotient_entry, AOptions, AlphaExpr, BoundEntry, BoundsError,
    DeltaZeroTable,
};
use crate::config::Configuration;
use crate::fixtures;
use crate::formulas::{self, AValue, CurvetteData, MethodUsed};
use crate::lattice::PairingContext;
use crate::rational::{format_rational, int, Exact};

pub type ReportOptions = AOptions;

/// Everything known about one configuration at one `delta` (or symbolically).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub surface: String,
    pub points: usize,
    pub delta: Option<u32>,
    #[serde(serialize_with = "optional_rational")]
    pub epsilon: Option<BigRational>,
    pub a: Option<u32>,
    pub method: Option<MethodUsed>,
    pub cross_checked: bool,
    pub alpha: Option<AlphaExpr>,
    pub beta: i64,
    pub omega: Option<u32>,
    pub bounds: Vec<BoundEntry>,
    /// Bounds whose hypotheses hold but whose inputs are missing or out of range.
    pub skipped: Vec<String>,
    pub delta_zero_table: Option<DeltaZeroTable>,
    pub curvettes: Vec<CurvetteData>,
    pub comparison: Option<Comparison>,
}

/// The plane bound against the earlier bound for the two-parameter family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub r: u32,
    pub n: u32,
    pub prior_bound: i64,
    pub bound: i64,
    pub improves: bool,
}

fn optional_rational<S: Serializer>(value: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match value {
        Some(v) => s.serialize_str(&format_rational(v)),
        None => s.serialize_none(),
    }
}

pub fn full_report(
    c: &Configuration,
    delta: Option<u32>,
    epsilon: Option<&BigRational>,
) -> Result<BoundsReport, BoundsError> {
    full_report_with(c, delta, epsilon, &ReportOptions::default())
}

pub fn full_report_with(
    c: &Configuration,
    delta: Option<u32>,
    epsilon: Option<&BigRational>,
    opts: &ReportOptions,
) -> Result<BoundsReport, BoundsError> {
    if let Some(eps) = epsilon {
        check_epsilon(eps)?;
    }
    if c.is_empty() {
        return Err(BoundsError::Empty);
    }
    if c.base().is_p2() {
        if delta.is_some() {
            return Err(BoundsError::NotHirzebruch);
        }
        return plane_report(c, epsilon, opts);
    }
    match delta.or(c.base().delta()) {
        None => symbolic_report(c, epsilon, opts),
        Some(0) => delta_zero_report(c, epsilon, opts),
        Some(d) => positive_report(c, d, epsilon, opts),
    }
}

fn empty_report(c: &Configuration, delta: Option<u32>, epsilon: Option<&BigRational>, beta: i64) -> BoundsReport {
    let surface = match delta {
        Some(d) if !c.base().is_p2() => format!("F_{d}"),
        _ => c.base().to_string(),
    };
    BoundsReport {
        surface,
        points: c.len(),
        delta,
        epsilon: epsilon.cloned(),
        a: None,
        method: None,
        cross_checked: false,
        alpha: None,
        beta,
        omega: None,
        bounds: Vec::new(),
        skipped: Vec::new(),
        delta_zero_table: None,
        curvettes: Vec::new(),
        comparison: None,
    }
}

fn record_a(report: &mut BoundsReport, a: &AValue, hirzebruch: &Configuration) -> Result<(), BoundsError> {
    report.a = Some(a.a);
    report.method = Some(a.method);
    report.cross_checked = a.cross_checked;
    if a.method == MethodUsed::ClosedFormSingleRoot {
        for q in hirzebruch.maximal_points() {
            report.curvettes.push(formulas::curvette(hirzebruch, &q)?);
        }
    }
    Ok(())
}

fn plane_report(
    c: &Configuration,
    epsilon: Option<&BigRational>,
    opts: &ReportOptions,
) -> Result<BoundsReport, BoundsError> {
    c.ensure_valid()?;
    let a = opts.compute(c)?;
    let beta = beta(c)?;
    let alpha = alpha_p2(c)?;
    let mut report = empty_report(c, None, epsilon, beta);
    record_a(&mut report, &a, &c.p2_to_f1()?)?;
    report.alpha = alpha.map(|v| AlphaExpr { c0: v, c1: 0, cap: None, value: Some(v) });
    report.bounds = p2_entries(a.a);
    match epsilon {
        Some(eps) => report.bounds.push(p2_delta_entry(alpha, beta, a.a, eps)),
        None if a.a == 1 => report.bounds.push(p2_delta_entry(alpha, beta, 1, &int(1))),
        None => report.skipped.push("plane_delta_set: needs epsilon".to_string()),
    }
    if let Some((r, n)) = fixtures::fig3_parameters(c) {
        let bound = 1 - i64::from(a.a);
        let prior_bound = fixtures::prior_bound_fig3(r, n);
        report.comparison = Some(Comparison { r, n, prior_bound, bound, improves: bound > prior_bound });
    }
    Ok(report)
}

fn symbolic_report(
    c: &Configuration,
    epsilon: Option<&BigRational>,
    opts: &ReportOptions,
) -> Result<BoundsReport, BoundsError> {
    c.ensure_valid()?;
    let a = opts.compute(c)?;
    let mut report = empty_report(c, None, epsilon, beta(c)?);
    record_a(&mut report, &a, c)?;
    report.alpha = Some(alpha_expr(c)?);
    report.skipped.push("all bounds: need a concrete delta".to_string());
    Ok(report)
}

fn positive_report(
    c: &Configuration,
    delta: u32,
    epsilon: Option<&BigRational>,
    opts: &ReportOptions,
) -> Result<BoundsReport, BoundsError> {
    let at = at_delta(c, delta)?;
    at.ensure_valid()?;
    let a = opts.compute(&at)?;
    let alpha_value = alpha(&at, PairingContext::hirzebruch(delta))?;
    let beta = beta(&at)?;
    let mut report = empty_report(c, Some(delta), epsilon, beta);
    record_a(&mut report, &a, &at)?;
    report.alpha = Some(alpha_expr(&at)?);
    if delta >= a.a {
        report.bounds.push(absolute_entry(alpha_value, beta));
        report.skipped.push("hirzebruch_quotient, delta_set: need delta < a".to_string());
        return Ok(report);
    }
    let omega = omega_from_a(delta, a)?.value;
    report.omega = Some(omega);
    report.bounds.push(quotient_entry(alpha_value, omega));
    match epsilon {
        Some(eps) => report.bounds.push(delta_set_entry(alpha_value, beta, omega, eps)),
        None => report.skipped.push("delta_set: needs epsilon".to_string()),
    }
    report.skipped.push("absolute: needs delta >= a".to_string());
    Ok(report)
}

fn delta_zero_report(
    c: &Configuration,
    epsilon: Option<&BigRational>,
    opts: &ReportOptions,
) -> Result<BoundsReport, BoundsError> {
    let at = at_delta(c, 0)?;
    at.ensure_valid()?;
    let table = delta_zero_table(&at, opts)?;
    let omega = table.a1.max(table.a2);
    let alpha_value = alpha(&at, PairingContext::hirzebruch(0))?;
    let beta = beta(&at)?;
    let mut report = empty_report(c, Some(0), epsilon, beta);
    report.alpha = Some(alpha_expr(&at)?);
    report.omega = Some(omega);
    report.bounds.push(quotient_entry(alpha_value, omega));
    match epsilon {
        Some(eps) => report.bounds.push(delta_set_entry(alpha_value, beta, omega, eps)),
        None => report.skipped.push("delta_set: needs epsilon".to_string()),
    }
    report.delta_zero_table = Some(table);
    Ok(report)
}

/// `c0 + c1 delta` with signs and unit coefficients folded.
fn affine_text(c0: i64, c1: i64) -> String {
    let term = match c1 {
        1 => "delta".to_string(),
        -1 => "-delta".to_string(),
        c => format!("{c} delta"),
    };
    match (c0, c1) {
        (_, 0) => c0.to_string(),
        (0, _) => term,
        (_, c) if c < 0 => format!("{c0} - {}", term.trim_start_matches('-')),
        _ => format!("{c0} + {term}"),
    }
}

/// Plain-text rendering with the same content as the JSON form.
pub fn render_text(report: &BoundsReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "surface: {} ({} points)", report.surface, report.points);
    if let Some(eps) = &report.epsilon {
        let _ = writeln!(out, "epsilon: {}", Exact(eps));
    }
    if let (Some(a), Some(method)) = (report.a, report.method) {
        let checked = if report.cross_checked { ", confirmed by the cone method" } else { "" };
        let _ = writeln!(out, "a: {a} ({}{checked})", method.as_str());
    }
    if let Some(alpha) = &report.alpha {
        let mut formula = affine_text(alpha.c0, alpha.c1);
        if let Some(cap) = alpha.cap {
            formula = format!("min({formula}, {cap})");
        }
        match alpha.value {
            Some(v) if alpha.c1 != 0 || alpha.cap.is_some() => {
                let _ = writeln!(out, "alpha: {v} = {formula}");
            }
            Some(v) => {
                let _ = writeln!(out, "alpha: {v}");
            }
            None => {
                let _ = writeln!(out, "alpha: {formula}");
            }
        }
    }
    let _ = writeln!(out, "beta: {}", report.beta);
    if let Some(omega) = report.omega {
        let _ = writeln!(out, "omega: {omega}");
    }
    if let Some(table) = &report.delta_zero_table {
        for (label, rows, min) in
            [("first ruling", &table.first_ruling, table.a1), ("second ruling", &table.second_ruling, table.a2)]
        {
            let cells: Vec<String> = rows
                .iter()
                .map(|r| format!("{}={}", r.special_section.as_deref().unwrap_or("generic"), r.a))
                .collect();
            let _ = writeln!(out, "{label}: {} (min {min})", cells.join(", "));
        }
    }
    if !report.bounds.is_empty() {
        let _ = writeln!(out, "bounds:");
        for b in &report.bounds {
            let _ = writeln!(out, "  {} [{}]: {}", b.kind.as_str(), b.condition, Exact(&b.value));
            let _ = writeln!(out, "    for {}", b.quantifier);
        }
    }
    for s in &report.skipped {
        let _ = writeln!(out, "skipped: {s}");
    }
    for cv in &report.curvettes {
        let mults: Vec<String> = cv.multiplicities.iter().map(|(p, m)| format!("{p}:{m}")).collect();
        let _ = writeln!(
            out,
            "curvette at {}: {} (section {}, fiber {})",
            cv.q,
            mults.join(" "),
            cv.int_with_special_section,
            cv.int_with_fiber_through_root
        );
    }
    if let Some(cmp) = &report.comparison {
        let _ = writeln!(
            out,
            "family r={} n={}: bound {} vs earlier {} ({})",
            cmp.r,
            cmp.n,
            cmp.bound,
            cmp.prior_bound,
            if cmp.improves { "improves" } else { "does not improve" }
        );
    }
    out
}
