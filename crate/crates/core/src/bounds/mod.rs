//! Lower bounds on self-intersections of integral curves on the blown-up
//! surface, absolute or normalized by a nef divisor, with the quantities
//! alpha, beta and omega they are built from.

mod report;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::config::{BaseSurface, ConfigError, Configuration, CurveDecoration, CurveKind};
use crate::cone::{self, ConeError};
use crate::formulas::{self, AValue, FormulaError, Method, MethodUsed};
use crate::lattice::{
    class_of_exceptional_strict, class_of_fiber_strict, class_of_line_strict, class_of_section_chain, intersect,
    self_intersection, LatticeError, NsClass, PairingContext,
};
use crate::rational::int;

pub use report::{full_report, full_report_with, render_text, BoundsReport, Comparison, ReportOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("omega is undefined for delta={delta} >= a={a}; the absolute bound applies instead")]
    Regime { delta: u32, a: u32 },
    #[error("delta={delta} is below a={a}; the effective cone is not known to be polyhedral there")]
    NotPolyhedral { delta: u32, a: u32 },
    #[error("this bound needs a configuration over P2")]
    NotP2,
    #[error("this bound needs a configuration over a Hirzebruch surface")]
    NotHirzebruch,
    #[error("the configuration has no points")]
    Empty,
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("h must be a pullback class without exceptional part")]
    NotPullback,
    #[error("a concrete delta is needed")]
    NeedsDelta,
    #[error("curves of both F_0 rulings are only meaningful at delta=0 (got delta={0})")]
    RulingsNeedDeltaZero(u32),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// `alpha(delta) = min(c0 + c1 * delta, cap)`; `cap` is absent when no
/// fiber term exists. `value` is set once `delta` is known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlphaExpr {
    pub c0: i64,
    pub c1: i64,
    pub cap: Option<i64>,
    pub value: Option<i64>,
}

impl AlphaExpr {
    pub fn at(&self, delta: u32) -> i64 {
        let affine = self.c0 + self.c1 * i64::from(delta);
        self.cap.map_or(affine, |cap| affine.min(cap))
    }
}

/// One bound with the hypotheses it needs and the family it quantifies over.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundEntry {
    pub kind: BoundKind,
    pub condition: String,
    #[serde(with = "crate::rational::serde_string")]
    pub value: BigRational,
    pub quantifier: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `C^2 >= min(alpha, beta)` for every integral curve, `delta >= a > 0`.
    Absolute,
    /// `C^2 / (H*.C)^2 >= min(alpha, -omega)` for nef `H` on the base.
    HirzebruchQuotient,
    /// `C^2 / (D.C)^2 >= min(alpha, beta, -omega / eps^2)` on a delta set.
    DeltaSet,
    /// `C^2 / (D.C)^2 >= -(a - 1)` for `D = iota L* - tau E_p1*`.
    PlaneQuotient,
    /// The plane quotient bound with `D = L*`.
    PlaneLineQuotient,
    /// `C^2 >= -(a - 1) (deg C - mult_p1 C)^2`.
    PlaneDegree,
    /// `C^2 >= min(alpha, beta)` over P2 when `a = 1`.
    PlaneAbsolute,
    /// `C^2 / (D.C)^2 >= min(alpha, beta, -(a - 1) / eps^2)` over P2.
    PlaneDeltaSet,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::Absolute => "absolute",
            BoundKind::HirzebruchQuotient => "hirzebruch_quotient",
            BoundKind::DeltaSet => "delta_set",
            BoundKind::PlaneQuotient => "plane_quotient",
            BoundKind::PlaneLineQuotient => "plane_line_quotient",
            BoundKind::PlaneDegree => "plane_degree",
            BoundKind::PlaneAbsolute => "plane_absolute",
            BoundKind::PlaneDeltaSet => "plane_delta_set",
        }
    }
}

/// Threshold of one ruling choice on `F_0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RulingChoice {
    /// `None` for a section through no configuration point.
    pub special_section: Option<String>,
    pub a: u32,
    pub method: MethodUsed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaZeroTable {
    /// Curves of class `F` are fibers; the special section is of class `M`.
    pub first_ruling: Vec<RulingChoice>,
    /// Roles exchanged.
    pub second_ruling: Vec<RulingChoice>,
    pub a1: u32,
    pub a2: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Omega {
    pub value: u32,
    /// Threshold used for `delta > 0`.
    pub a: Option<AValue>,
    pub table: Option<DeltaZeroTable>,
}

/// Threshold options shared by every computation here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AOptions {
    pub method: Method,
    /// Scan cap; `None` reads the environment or uses the default.
    pub cap: Option<u32>,
}

impl AOptions {
    pub fn compute(&self, c: &Configuration) -> Result<AValue, FormulaError> {
        match self.cap {
            Some(cap) => formulas::compute_a_with_cap(c, self.method, cap),
            None => formulas::compute_a(c, self.method),
        }
    }
}

fn has_rulings(c: &Configuration) -> bool {
    c.curves().iter().any(|cv| matches!(cv.kind, CurveKind::FSectionF0 | CurveKind::MSectionF0))
}

/// The configuration over `F_delta`. On `F_0` a special section is just a
/// curve of class `M`, so fibers and the special section are relabelled as
/// the two rulings.
pub fn at_delta(c: &Configuration, delta: u32) -> Result<Configuration, BoundsError> {
    if c.base().is_p2() {
        return Err(BoundsError::NotHirzebruch);
    }
    if delta > 0 {
        if has_rulings(c) {
            return Err(BoundsError::RulingsNeedDeltaZero(delta));
        }
        return Ok(c.with_base(BaseSurface::hirzebruch(delta)));
    }
    if has_rulings(c) {
        return Ok(c.with_base(BaseSurface::hirzebruch(0)));
    }
    let mut curves: Vec<CurveDecoration> = c
        .curves()
        .iter()
        .filter(|cv| !cv.points.is_empty())
        .map(|cv| CurveDecoration {
            name: cv.name.clone(),
            kind: if cv.kind == CurveKind::Fiber { CurveKind::FSectionF0 } else { CurveKind::MSectionF0 },
            points: cv.points.clone(),
        })
        .collect();
    // Every level-0 point lies on one curve of each ruling.
    for root in c.roots() {
        let covered = |cv: &CurveDecoration| cv.kind == CurveKind::MSectionF0 && cv.points.first() == Some(&root);
        if !curves.iter().any(covered) {
            let mut name = format!("M_{root}");
            while curves.iter().any(|cv| cv.name == name) {
                name.push('\'');
            }
            curves.push(CurveDecoration { name, kind: CurveKind::MSectionF0, points: vec![root.clone()] });
        }
    }
    Ok(c.with_curves(BaseSurface::hirzebruch(0), curves)?)
}

fn chain_len(cv: &CurveDecoration) -> i64 {
    i64::try_from(cv.points.len()).unwrap_or(i64::MAX)
}

/// Symbolic alpha of a Hirzebruch configuration with fibers and special
/// section: `min(-delta - #M0 chain, -#longest fiber chain)`.
pub fn alpha_expr(c: &Configuration) -> Result<AlphaExpr, BoundsError> {
    if c.base().is_p2() {
        return Err(BoundsError::NotHirzebruch);
    }
    if has_rulings(c) {
        let value = c.curves().iter().filter(|cv| !cv.points.is_empty()).map(|cv| -chain_len(cv)).min().unwrap_or(0);
        return Ok(AlphaExpr { c0: value, c1: 0, cap: None, value: Some(value) });
    }
    let section = c.special_section().map_or(0, chain_len);
    let cap = c.curves_of_kind(CurveKind::Fiber).map(|f| -chain_len(f)).min();
    let mut out = AlphaExpr { c0: -section, c1: -1, cap, value: None };
    if let Some(delta) = c.base().delta() {
        out.value = Some(out.at(delta));
    }
    Ok(out)
}

/// Minimum self-intersection of the strict transforms of the decorated
/// curves (and the special section when `delta > 0`).
pub fn alpha(c: &Configuration, ctx: PairingContext) -> Result<i64, BoundsError> {
    if ctx.base().is_p2() || c.base().is_p2() {
        return Err(BoundsError::NotHirzebruch);
    }
    let c = at_delta(c, ctx.delta())?;
    c.ensure_valid()?;
    let mut squares = Vec::new();
    for cv in c.curves().iter().filter(|cv| !cv.points.is_empty()) {
        let class = match cv.kind {
            CurveKind::Fiber | CurveKind::FSectionF0 => class_of_fiber_strict(&c, cv)?,
            _ => class_of_section_chain(&cv.points, ctx)?,
        };
        squares.push(self_intersection(&class, ctx)?);
    }
    if ctx.delta() > 0 && c.special_section().is_none() {
        squares.push(self_intersection(&class_of_section_chain(&[], ctx)?, ctx)?);
    }
    let min = squares.into_iter().min().unwrap_or_else(BigRational::zero);
    Ok(to_i64(&min))
}

/// Over P2: minimum self-intersection of the strict transforms of the
/// decorated lines through the distinguished point.
pub fn alpha_p2(c: &Configuration) -> Result<Option<i64>, BoundsError> {
    if !c.base().is_p2() {
        return Err(BoundsError::NotP2);
    }
    let ctx = PairingContext::p2();
    let mut out: Option<i64> = None;
    for line in c.curves_of_kind(CurveKind::LineThroughP1) {
        let s = to_i64(&self_intersection(&class_of_line_strict(c, line)?, ctx)?);
        out = Some(out.map_or(s, |o| o.min(s)));
    }
    Ok(out)
}

fn to_i64(x: &BigRational) -> i64 {
    i64::try_from(x.to_integer()).expect("self-intersections are small integers")
}

/// Minimum of `E~_p^2 = -1 - #{q -> p}` over all points.
pub fn beta(c: &Configuration) -> Result<i64, BoundsError> {
    if c.is_empty() {
        return Err(BoundsError::Empty);
    }
    let ctx = if c.base().is_p2() { PairingContext::p2() } else { PairingContext::hirzebruch(0) };
    let mut min = i64::MAX;
    for p in c.points() {
        let class = class_of_exceptional_strict(c, &p.id)?;
        min = min.min(to_i64(&self_intersection(&class, ctx)?));
    }
    Ok(min)
}

fn ruling_variant(
    c: &Configuration,
    fibers: CurveKind,
    section: Option<&CurveDecoration>,
) -> Result<Configuration, BoundsError> {
    let mut curves: Vec<CurveDecoration> = c
        .curves_of_kind(fibers)
        .filter(|cv| !cv.points.is_empty())
        .map(|cv| CurveDecoration { name: cv.name.clone(), kind: CurveKind::Fiber, points: cv.points.clone() })
        .collect();
    if let Some(s) = section {
        curves.push(CurveDecoration { name: s.name.clone(), kind: CurveKind::SpecialSection, points: s.points.clone() });
    }
    Ok(c.with_curves(BaseSurface::symbolic(), curves)?)
}

fn ruling_choices(
    c: &Configuration,
    fibers: CurveKind,
    sections: CurveKind,
    opts: &AOptions,
) -> Result<Vec<RulingChoice>, BoundsError> {
    let candidates: Vec<Option<&CurveDecoration>> =
        c.curves_of_kind(sections).filter(|cv| !cv.points.is_empty()).map(Some).chain([None]).collect();
    let mut out = Vec::with_capacity(candidates.len());
    for section in candidates {
        let variant = ruling_variant(c, fibers, section)?;
        let a = opts.compute(&variant)?;
        out.push(RulingChoice { special_section: section.map(|s| s.name.clone()), a: a.a, method: a.method });
    }
    Ok(out)
}

/// Per-choice thresholds for both rulings of `F_0`.
pub fn delta_zero_table(c: &Configuration, opts: &AOptions) -> Result<DeltaZeroTable, BoundsError> {
    let c = at_delta(c, 0)?;
    c.ensure_valid()?;
    let first_ruling = ruling_choices(&c, CurveKind::FSectionF0, CurveKind::MSectionF0, opts)?;
    let second_ruling = ruling_choices(&c, CurveKind::MSectionF0, CurveKind::FSectionF0, opts)?;
    let min = |v: &[RulingChoice]| v.iter().map(|r| r.a).min().expect("the generic choice is always present");
    Ok(DeltaZeroTable { a1: min(&first_ruling), a2: min(&second_ruling), first_ruling, second_ruling })
}

/// `a - delta` for `0 < delta < a`; `max(a1, a2)` for `delta = 0`.
pub fn omega(c: &Configuration, delta: u32) -> Result<Omega, BoundsError> {
    omega_with(c, delta, &AOptions::default())
}

pub fn omega_with(c: &Configuration, delta: u32, opts: &AOptions) -> Result<Omega, BoundsError> {
    if delta == 0 {
        let table = delta_zero_table(c, opts)?;
        return Ok(Omega { value: table.a1.max(table.a2), a: None, table: Some(table) });
    }
    let c = at_delta(c, delta)?;
    let a = opts.compute(&c)?;
    omega_from_a(delta, a)
}

fn omega_from_a(delta: u32, a: AValue) -> Result<Omega, BoundsError> {
    if delta >= a.a {
        return Err(BoundsError::Regime { delta, a: a.a });
    }
    Ok(Omega { value: a.a - delta, a: Some(a), table: None })
}

const ALL_CURVES: &str = "every integral curve C on the blown-up surface: C^2 >= value";
const NEF_PULLBACK: &str = "every nef H on F_delta and integral C with H*.C > 0: C^2/(H*.C)^2 >= value";
const DELTA_SET: &str =
    "every nonzero nef H on F_delta, D in Delta_{H*}(Z, epsilon) and integral C with D.C > 0: C^2/(D.C)^2 >= value";
const PLANE_QUOTIENT: &str = "D = iota L* - tau E_p1* with iota >= tau >= 0 not both zero, integral plane curve C \
                              not a line through p1: C~^2/(D.C~)^2 >= value";
const PLANE_LINE: &str = "integral plane curve C not a line through p1: C~^2/(L*.C~)^2 >= value";
const PLANE_DEGREE: &str =
    "integral plane curve C not a line through p1: C~^2 >= value * (deg C - mult_p1 C)^2";
const PLANE_ALL: &str = "every integral curve C on the blown-up plane: C^2 >= value";
const PLANE_DELTA_SET: &str = "H = iota L* - tau E_p1* nonzero with iota >= tau >= 0, nef D in Delta_{H*}(Z, epsilon) \
                               and integral C with D.C > 0: C^2/(D.C)^2 >= value";

fn entry(kind: BoundKind, condition: &str, value: BigRational, quantifier: &str) -> BoundEntry {
    BoundEntry { kind, condition: condition.to_string(), value, quantifier: quantifier.to_string() }
}

/// The absolute bound when `delta >= a > 0`, else the quotient bound.
pub fn wbnc_bound_hirzebruch(c: &Configuration, delta: u32) -> Result<BoundEntry, BoundsError> {
    hirzebruch_bound_with(c, delta, &AOptions::default())
}

pub fn hirzebruch_bound_with(c: &Configuration, delta: u32, opts: &AOptions) -> Result<BoundEntry, BoundsError> {
    let at = at_delta(c, delta)?;
    let alpha = alpha(&at, PairingContext::hirzebruch(delta))?;
    let beta = beta(&at)?;
    if delta > 0 {
        let a = opts.compute(&at)?;
        if delta >= a.a {
            return Ok(absolute_entry(alpha, beta));
        }
        let omega = omega_from_a(delta, a)?;
        return Ok(quotient_entry(alpha, omega.value));
    }
    let omega = omega_with(&at, 0, opts)?;
    Ok(quotient_entry(alpha, omega.value))
}

fn absolute_entry(alpha: i64, beta: i64) -> BoundEntry {
    entry(BoundKind::Absolute, "delta > 0 and delta >= a", int(alpha.min(beta)), ALL_CURVES)
}

fn quotient_entry(alpha: i64, omega: u32) -> BoundEntry {
    entry(
        BoundKind::HirzebruchQuotient,
        "delta = 0, or 0 < delta < a",
        int(alpha.min(-i64::from(omega))),
        NEF_PULLBACK,
    )
}

fn delta_set_value(alpha: Option<i64>, beta: i64, numerator: u32, epsilon: &BigRational) -> BigRational {
    let eps_term = -BigRational::from_integer(BigInt::from(numerator)) / (epsilon * epsilon);
    let mut value = int(beta).min(eps_term);
    if let Some(alpha) = alpha {
        value = value.min(int(alpha));
    }
    value
}

fn check_epsilon(epsilon: &BigRational) -> Result<(), BoundsError> {
    if epsilon.is_positive() {
        Ok(())
    } else {
        Err(BoundsError::NonPositiveEpsilon)
    }
}

/// `min(alpha, beta, -omega / epsilon^2)`, for `delta = 0` or `0 < delta < a`.
pub fn wbnc_bound_delta_set(c: &Configuration, delta: u32, epsilon: &BigRational) -> Result<BoundEntry, BoundsError> {
    delta_set_bound_with(c, delta, epsilon, &AOptions::default())
}

pub fn delta_set_bound_with(
    c: &Configuration,
    delta: u32,
    epsilon: &BigRational,
    opts: &AOptions,
) -> Result<BoundEntry, BoundsError> {
    check_epsilon(epsilon)?;
    let at = at_delta(c, delta)?;
    let alpha = alpha(&at, PairingContext::hirzebruch(delta))?;
    let beta = beta(&at)?;
    let omega = omega_with(&at, delta, opts)?;
    Ok(delta_set_entry(alpha, beta, omega.value, epsilon))
}

fn delta_set_entry(alpha: i64, beta: i64, omega: u32, epsilon: &BigRational) -> BoundEntry {
    entry(
        BoundKind::DeltaSet,
        "delta = 0, or 0 < delta < a; epsilon > 0",
        delta_set_value(Some(alpha), beta, omega, epsilon),
        DELTA_SET,
    )
}

fn p2_threshold(c: &Configuration, opts: &AOptions) -> Result<AValue, BoundsError> {
    if !c.base().is_p2() {
        return Err(BoundsError::NotP2);
    }
    c.ensure_valid()?;
    Ok(opts.compute(c)?)
}

/// The three forms of `-(a - 1)` over P2, with `a` taken on the `F_1`
/// configuration obtained by blowing up the distinguished point.
pub fn wbnc_bound_p2(c: &Configuration) -> Result<Vec<BoundEntry>, BoundsError> {
    let a = p2_threshold(c, &AOptions::default())?;
    Ok(p2_entries(a.a))
}

fn p2_entries(a: u32) -> Vec<BoundEntry> {
    let value = -int(i64::from(a) - 1);
    vec![
        entry(BoundKind::PlaneQuotient, "configuration over P2", value.clone(), PLANE_QUOTIENT),
        entry(BoundKind::PlaneLineQuotient, "configuration over P2", value.clone(), PLANE_LINE),
        entry(BoundKind::PlaneDegree, "configuration over P2", value, PLANE_DEGREE),
    ]
}

/// `min(alpha, beta)` when `a = 1`, else `min(alpha, beta, -(a - 1) / epsilon^2)`.
pub fn wbnc_bound_p2_delta(c: &Configuration, epsilon: &BigRational) -> Result<BoundEntry, BoundsError> {
    check_epsilon(epsilon)?;
    let a = p2_threshold(c, &AOptions::default())?;
    Ok(p2_delta_entry(alpha_p2(c)?, beta(c)?, a.a, epsilon))
}

fn p2_delta_entry(alpha: Option<i64>, beta: i64, a: u32, epsilon: &BigRational) -> BoundEntry {
    if a == 1 {
        let value = alpha.map_or(beta, |al| al.min(beta));
        return entry(BoundKind::PlaneAbsolute, "configuration over P2 with a = 1", int(value), PLANE_ALL);
    }
    entry(
        BoundKind::PlaneDeltaSet,
        "configuration over P2 with a > 1; epsilon > 0",
        delta_set_value(alpha, beta, a - 1, epsilon),
        PLANE_DELTA_SET,
    )
}

/// Classes of the generators of the effective cone at `delta >= a`.
fn generator_classes(c: &Configuration, ctx: PairingContext) -> Result<Vec<NsClass>, BoundsError> {
    let mut out = Vec::new();
    for p in c.points() {
        out.push(class_of_exceptional_strict(c, &p.id)?);
    }
    for f in c.curves_of_kind(CurveKind::Fiber) {
        out.push(class_of_fiber_strict(c, f)?);
    }
    let chain = c.special_section().map(|s| s.points.clone()).unwrap_or_default();
    out.push(class_of_section_chain(&chain, ctx)?);
    Ok(out)
}

fn polyhedral_generators(c: &Configuration, delta: u32) -> Result<(Vec<NsClass>, PairingContext), BoundsError> {
    let at = at_delta(c, delta)?;
    if has_rulings(&at) || delta == 0 {
        return Err(BoundsError::NotPolyhedral { delta, a: formulas_a_or_one(&at)? });
    }
    let a = formulas::compute_a(&at, Method::Auto)?.a;
    if delta < a {
        return Err(BoundsError::NotPolyhedral { delta, a });
    }
    let ctx = PairingContext::hirzebruch(delta);
    Ok((generator_classes(&at, ctx)?, ctx))
}

fn formulas_a_or_one(c: &Configuration) -> Result<u32, BoundsError> {
    if has_rulings(c) {
        return Ok(1);
    }
    Ok(formulas::compute_a(c, Method::Auto)?.a)
}

/// Whether `d` meets every generator of the effective cone non-negatively.
/// Only defined for `delta >= a`, where those generators are known.
pub fn is_nef_polyhedral(d: &NsClass, c: &Configuration, delta: u32) -> Result<bool, BoundsError> {
    let (generators, ctx) = polyhedral_generators(c, delta)?;
    for s in &generators {
        if intersect(d, s, ctx)?.is_negative() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sufficient test for `d` in the delta set of the pullback `h`: `d - eps h`
/// is nef. `false` means "not shown", not "not a member".
pub fn delta_set_sufficient(
    d: &NsClass,
    h: &NsClass,
    epsilon: &BigRational,
    c: &Configuration,
    delta: u32,
) -> Result<bool, BoundsError> {
    check_epsilon(epsilon)?;
    if !h.is_pullback() {
        return Err(BoundsError::NotPullback);
    }
    let shifted = d.checked_sub(&h.scale(epsilon))?;
    is_nef_polyhedral(&shifted, c, delta)
}

/// Cap used when none is configured, for callers that report it.
pub fn effective_cap(c: &Configuration, opts: &AOptions) -> Result<u32, BoundsError> {
    let c = if c.base().is_p2() { c.p2_to_f1()? } else { c.clone() };
    Ok(opts.cap.unwrap_or_else(|| cone::cap_from_env(&c)))
}
