//! Closed forms for the threshold in two families of configurations, the
//! curvette multiplicities they need, and the dispatcher that picks a method.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, Configuration, CurveKind, PointId};
use crate::cone::{self, ConeError};
use crate::rational::{ceil, JsonInt};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("{form} does not apply: {reason}")]
    HypothesesNotMet { form: ClosedForm, reason: String },
    #[error("point `{0}` is not maximal")]
    NotMaximal(PointId),
    #[error("closed form {form} gives {closed} but the cone method gives {cone}")]
    Disagreement { form: ClosedForm, closed: u32, cone: u32 },
    #[error("threshold {0} does not fit in 32 bits")]
    Overflow(BigInt),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedForm {
    /// Free points, empty special section, one point per fiber.
    FreeFibers,
    /// A single level-0 point.
    SingleRoot,
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClosedForm::FreeFibers => "closed form for free fibers",
            ClosedForm::SingleRoot => "closed form for a single root",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Method {
    #[default]
    Auto,
    Cone,
    ClosedForm,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Method::Auto),
            "cone" => Ok(Method::Cone),
            "closed-form" | "closed_form" => Ok(Method::ClosedForm),
            other => Err(format!("unknown method `{other}` (expected auto, cone or closed-form)")),
        }
    }
}

/// How a threshold value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodUsed {
    Cone,
    ClosedFormFreeFibers,
    ClosedFormSingleRoot,
}

impl MethodUsed {
    pub fn as_str(self) -> &'static str {
        match self {
            MethodUsed::Cone => "cone",
            MethodUsed::ClosedFormFreeFibers => "closed_form_free_fibers",
            MethodUsed::ClosedFormSingleRoot => "closed_form_single_root",
        }
    }
}

impl From<ClosedForm> for MethodUsed {
    fn from(form: ClosedForm) -> Self {
        match form {
            ClosedForm::FreeFibers => MethodUsed::ClosedFormFreeFibers,
            ClosedForm::SingleRoot => MethodUsed::ClosedFormSingleRoot,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AValue {
    pub a: u32,
    pub method: MethodUsed,
    /// Set when a closed form was confirmed by the cone method.
    pub cross_checked: bool,
}

/// Smallest positive integer `>= x`.
pub fn ceil_star(x: &BigRational) -> BigInt {
    ceil(x).max(BigInt::one())
}

/// Multiplicities of a curvette at the maximal point `q`, with its
/// intersection numbers against the decorated special section and the
/// fiber through the root of `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurvetteData {
    pub q: PointId,
    /// Chain order, root first.
    pub multiplicities: Vec<(PointId, BigInt)>,
    pub int_with_special_section: BigInt,
    pub int_with_fiber_through_root: BigInt,
}

impl Serialize for CurvetteData {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::{SerializeMap, SerializeStruct};
        struct Mults<'a>(&'a [(PointId, BigInt)]);
        impl Serialize for Mults<'_> {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(self.0.len()))?;
                for (p, m) in self.0 {
                    map.serialize_entry(p.as_str(), &JsonInt(m))?;
                }
                map.end()
            }
        }
        let mut st = s.serialize_struct("CurvetteData", 4)?;
        st.serialize_field("q", &self.q)?;
        st.serialize_field("multiplicities", &Mults(&self.multiplicities))?;
        st.serialize_field("int_with_special_section", &JsonInt(&self.int_with_special_section))?;
        st.serialize_field("int_with_fiber_through_root", &JsonInt(&self.int_with_fiber_through_root))?;
        st.end()
    }
}

impl CurvetteData {
    pub fn sum_of_squares(&self) -> BigInt {
        self.multiplicities.iter().map(|(_, m)| m * m).sum()
    }

    pub fn multiplicity(&self, p: &PointId) -> Option<&BigInt> {
        self.multiplicities.iter().find(|(id, _)| id == p).map(|(_, m)| m)
    }
}

/// `m_q = 1` and `m_p = sum of m_{p'}` over points `p'` of the chain
/// proximate to `p`.
pub fn curvette(c: &Configuration, q: &PointId) -> Result<CurvetteData, FormulaError> {
    let qi = c.require(q)?;
    if !c.maximal_indices().contains(&qi) {
        return Err(FormulaError::NotMaximal(q.clone()));
    }
    let chain = c.chain_indices(qi)?;
    let mut mult = vec![BigInt::zero(); chain.len()];
    for pos in (0..chain.len()).rev() {
        let p = chain[pos];
        let sum: BigInt = (pos + 1..chain.len())
            .filter(|&later| c.is_proximate(chain[later], p))
            .map(|later| mult[later].clone())
            .sum();
        mult[pos] = if sum.is_zero() { BigInt::one() } else { sum };
    }
    let on = |curve: Option<&crate::config::CurveDecoration>| -> BigInt {
        let Some(curve) = curve else { return BigInt::zero() };
        chain.iter().zip(&mult).filter(|(&p, _)| curve.contains(c.id(p))).map(|(_, m)| m.clone()).sum()
    };
    let root = c.id(chain[0]).clone();
    Ok(CurvetteData {
        q: q.clone(),
        multiplicities: chain.iter().zip(&mult).map(|(&p, m)| (c.id(p).clone(), m.clone())).collect(),
        int_with_special_section: on(c.special_section()),
        int_with_fiber_through_root: on(c.fiber_through(&root)),
    })
}

fn not_met(form: ClosedForm, reason: impl Into<String>) -> FormulaError {
    FormulaError::HypothesesNotMet { form, reason: reason.into() }
}

fn to_u32(value: BigInt) -> Result<u32, FormulaError> {
    u32::try_from(&value).map_err(|_| FormulaError::Overflow(value))
}

fn check_shape(c: &Configuration) -> Result<(), FormulaError> {
    if c.base().is_p2() {
        return Err(ConeError::NotHirzebruch.into());
    }
    if let Some(cv) = c.curves().iter().find(|cv| !matches!(cv.kind, CurveKind::Fiber | CurveKind::SpecialSection)) {
        return Err(ConeError::NeedsRulingChoice(cv.name.clone()).into());
    }
    c.ensure_valid()?;
    Ok(())
}

/// Sum over level-0 points of the longest chain ending at a maximal point
/// above it.
pub fn a_closed_form_free_fibers(c: &Configuration) -> Result<u32, FormulaError> {
    const FORM: ClosedForm = ClosedForm::FreeFibers;
    check_shape(c)?;
    if let Some(p) = c.points().iter().find(|p| p.extra_proximity.is_some()) {
        return Err(not_met(FORM, format!("point {} is a satellite", p.id)));
    }
    if let Some(s) = c.special_section().filter(|s| !s.points.is_empty()) {
        return Err(not_met(FORM, format!("special section {} passes through {}", s.name, s.points[0])));
    }
    if let Some(f) = c.curves_of_kind(CurveKind::Fiber).find(|f| f.points.len() > 1) {
        return Err(not_met(FORM, format!("fiber {} passes through {} points", f.name, f.points.len())));
    }
    let roots = c.root_indices();
    let mut best = vec![0usize; c.len()];
    for q in c.maximal_indices() {
        let chain = c.chain_indices(q)?;
        let root = chain[0];
        best[root] = best[root].max(chain.len());
    }
    let total: usize = roots.iter().map(|&r| best[r]).sum();
    to_u32(BigInt::from(total))
}

/// Largest `ceil_star((sum m^2 - 2 (phi.M0)(phi.F)) / (phi.F)^2)` over
/// curvettes at maximal points.
pub fn a_closed_form_single_root(c: &Configuration) -> Result<u32, FormulaError> {
    const FORM: ClosedForm = ClosedForm::SingleRoot;
    check_shape(c)?;
    let roots = c.roots();
    if roots.len() != 1 {
        return Err(not_met(FORM, format!("{} level-0 points", roots.len())));
    }
    let mut best = BigInt::one();
    for q in c.maximal_points() {
        let data = curvette(c, &q)?;
        let f = &data.int_with_fiber_through_root;
        if f.is_zero() {
            return Err(not_met(FORM, format!("no decorated fiber through {}", roots[0])));
        }
        let numer = data.sum_of_squares() - BigInt::from(2) * &data.int_with_special_section * f;
        let value = ceil_star(&BigRational::new(numer, f * f));
        best = best.max(value);
    }
    to_u32(best)
}

/// Both closed forms, in order, with the first applicable result.
pub fn closed_form(c: &Configuration) -> Result<(ClosedForm, u32), FormulaError> {
    let mut reasons = Vec::new();
    for (form, f) in [
        (ClosedForm::FreeFibers, a_closed_form_free_fibers as fn(&Configuration) -> Result<u32, FormulaError>),
        (ClosedForm::SingleRoot, a_closed_form_single_root),
    ] {
        match f(c) {
            Ok(a) => return Ok((form, a)),
            Err(FormulaError::HypothesesNotMet { reason, .. }) => reasons.push(reason),
            Err(e) => return Err(e),
        }
    }
    Err(not_met(ClosedForm::SingleRoot, reasons.join("; ")))
}

/// A P2 configuration is converted to `F_1` first.
fn hirzebruch_form(c: &Configuration) -> Result<std::borrow::Cow<'_, Configuration>, FormulaError> {
    if c.base().is_p2() {
        c.ensure_valid()?;
        Ok(std::borrow::Cow::Owned(c.p2_to_f1()?))
    } else {
        Ok(std::borrow::Cow::Borrowed(c))
    }
}

pub fn compute_a(c: &Configuration, method: Method) -> Result<AValue, FormulaError> {
    let cap = cone::cap_from_env(&*hirzebruch_form(c)?);
    compute_a_with_cap(c, method, cap)
}

/// `Auto` uses a closed form when one applies and confirms it with the cone
/// method; otherwise it runs the cone method alone.
pub fn compute_a_with_cap(c: &Configuration, method: Method, cap: u32) -> Result<AValue, FormulaError> {
    let c = hirzebruch_form(c)?;
    let c = c.as_ref();
    match method {
        Method::Cone => Ok(AValue { a: cone::min_delta_threshold_with_cap(c, cap)?, method: MethodUsed::Cone, cross_checked: false }),
        Method::ClosedForm => {
            let (form, a) = closed_form(c)?;
            Ok(AValue { a, method: form.into(), cross_checked: false })
        }
        Method::Auto => match closed_form(c) {
            Ok((form, a)) => {
                let by_cone = cone::min_delta_threshold_with_cap(c, cap)?;
                if by_cone != a {
                    return Err(FormulaError::Disagreement { form, closed: a, cone: by_cone });
                }
                Ok(AValue { a, method: form.into(), cross_checked: true })
            }
            Err(FormulaError::HypothesesNotMet { .. }) => Ok(AValue {
                a: cone::min_delta_threshold_with_cap(c, cap)?,
                method: MethodUsed::Cone,
                cross_checked: false,
            }),
            Err(e) => Err(e),
        },
    }
}
