//! Néron-Severi classes of the blown-up surface in the pullback basis
//! `F*, M*, E_p*` (or `L*, E_p*` over P2) and their intersection pairing.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::ser::{Serialize, SerializeMap, SerializeStruct, Serializer};
use thiserror::Error;

use crate::config::{BaseSurface, ConfigError, Configuration, CurveDecoration, CurveKind, PointId};
use crate::rational::{format_rational, int};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// `F*, M*, E_p*`.
    Hirzebruch,
    /// `L*, E_p*`.
    P2,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("cannot combine a class in the {0:?} basis with one in the {1:?} basis")]
    BasisMismatch(Basis, Basis),
    #[error("the pairing needs a concrete delta")]
    SymbolicDelta,
    #[error("curve `{name}` of kind {kind} cannot be used here")]
    WrongKind { name: String, kind: CurveKind },
    #[error("curve `{0}` passes through no configuration point, so it is not stored")]
    EmptyChain(String),
    #[error("the configuration has no special section decoration")]
    MissingSpecialSection,
    #[error("a special section only exists on a Hirzebruch surface")]
    NotHirzebruch,
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// `a F* + b M* - sum m_p E_p*`, or `a L* - sum m_p E_p*` in the P2 basis
/// where `b` is always zero. Absent keys of `m` are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NsClass {
    pub basis: Basis,
    pub a: BigRational,
    pub b: BigRational,
    pub m: BTreeMap<PointId, BigRational>,
}

impl NsClass {
    pub fn zero(basis: Basis) -> Self {
        NsClass { basis, a: BigRational::zero(), b: BigRational::zero(), m: BTreeMap::new() }
    }

    pub fn hirzebruch(a: BigRational, b: BigRational) -> Self {
        NsClass { basis: Basis::Hirzebruch, a, b, m: BTreeMap::new() }
    }

    pub fn p2(a: BigRational) -> Self {
        NsClass { basis: Basis::P2, a, b: BigRational::zero(), m: BTreeMap::new() }
    }

    /// `E_p*` in the given basis.
    pub fn exceptional(basis: Basis, p: impl Into<PointId>) -> Self {
        NsClass::zero(basis).minus_exceptional(p.into(), int(-1))
    }

    pub fn multiplicity(&self, p: &PointId) -> BigRational {
        self.m.get(p).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Adds `-coeff * E_p*`.
    fn minus_exceptional(mut self, p: PointId, coeff: BigRational) -> Self {
        let entry = self.m.entry(p).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.m.retain(|_, v| !v.is_zero());
        }
        self
    }

    pub fn checked_add(&self, other: &NsClass) -> Result<NsClass, LatticeError> {
        self.same_basis(other)?;
        let mut out = self.clone();
        out.a += &other.a;
        out.b += &other.b;
        for (p, v) in &other.m {
            out = out.minus_exceptional(p.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &NsClass) -> Result<NsClass, LatticeError> {
        self.checked_add(&other.scale(&int(-1)))
    }

    pub fn scale(&self, k: &BigRational) -> NsClass {
        if k.is_zero() {
            return NsClass::zero(self.basis);
        }
        NsClass {
            basis: self.basis,
            a: &self.a * k,
            b: &self.b * k,
            m: self.m.iter().map(|(p, v)| (p.clone(), v * k)).collect(),
        }
    }

    /// True when the class has no exceptional part.
    pub fn is_pullback(&self) -> bool {
        self.m.is_empty()
    }

    fn same_basis(&self, other: &NsClass) -> Result<(), LatticeError> {
        if self.basis == other.basis {
            Ok(())
        } else {
            Err(LatticeError::BasisMismatch(self.basis, other.basis))
        }
    }

    /// Dense coordinates: `a, b` (or `a` over P2), then the `E_p*`
    /// coefficients `-m_p` in declaration order of `c`.
    pub fn to_coords(&self, c: &Configuration) -> Vec<BigRational> {
        let mut out = vec![self.a.clone()];
        if self.basis == Basis::Hirzebruch {
            out.push(self.b.clone());
        }
        out.extend(c.points().iter().map(|p| -self.multiplicity(&p.id)));
        out
    }

    pub fn from_coords(basis: Basis, c: &Configuration, coords: &[BigRational]) -> NsClass {
        let head = match basis {
            Basis::Hirzebruch => 2,
            Basis::P2 => 1,
        };
        assert_eq!(coords.len(), head + c.len(), "coordinate vector has the wrong length");
        let mut out = match basis {
            Basis::Hirzebruch => NsClass::hirzebruch(coords[0].clone(), coords[1].clone()),
            Basis::P2 => NsClass::p2(coords[0].clone()),
        };
        for (p, v) in c.points().iter().zip(&coords[head..]) {
            if !v.is_zero() {
                out.m.insert(p.id.clone(), -v);
            }
        }
        out
    }
}

impl fmt::Display for NsClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        let head: &[(&BigRational, &str)] = match self.basis {
            Basis::Hirzebruch => &[(&self.a, "F*"), (&self.b, "M*")],
            Basis::P2 => &[(&self.a, "L*")],
        };
        for (coeff, name) in head {
            if !coeff.is_zero() {
                terms.push((BigRational::clone(coeff), name.to_string()));
            }
        }
        for (p, m) in &self.m {
            terms.push((-m, format!("E{p}*")));
        }
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (coeff, name)) in terms.iter().enumerate() {
            let sign = match (i, coeff.is_negative()) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            let mag = coeff.abs();
            let prefix = if mag == int(1) { String::new() } else { format_rational(&mag) };
            write!(f, "{sign}{prefix}{name}")?;
        }
        Ok(())
    }
}

impl Serialize for NsClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        struct Mults<'a>(&'a BTreeMap<PointId, BigRational>);
        impl Serialize for Mults<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(self.0.len()))?;
                for (p, v) in self.0 {
                    map.serialize_entry(p.as_str(), &format_rational(v))?;
                }
                map.end()
            }
        }
        let mut st = s.serialize_struct("NsClass", 3)?;
        st.serialize_field("a", &format_rational(&self.a))?;
        st.serialize_field("b", &format_rational(&self.b))?;
        st.serialize_field("m", &Mults(&self.m))?;
        st.end()
    }
}

/// The base surface with a concrete `delta`, which fixes the pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairingContext {
    base: BaseSurface,
}

impl PairingContext {
    pub fn hirzebruch(delta: u32) -> Self {
        PairingContext { base: BaseSurface::hirzebruch(delta) }
    }

    pub fn p2() -> Self {
        PairingContext { base: BaseSurface::P2 }
    }

    pub fn new(base: BaseSurface) -> Result<Self, LatticeError> {
        match base {
            BaseSurface::Hirzebruch { delta: None } => Err(LatticeError::SymbolicDelta),
            base => Ok(PairingContext { base }),
        }
    }

    pub fn base(self) -> BaseSurface {
        self.base
    }

    pub fn basis(self) -> Basis {
        if self.base.is_p2() {
            Basis::P2
        } else {
            Basis::Hirzebruch
        }
    }

    /// Zero over P2.
    pub fn delta(self) -> u32 {
        self.base.delta().unwrap_or(0)
    }

    /// Rank of the Néron-Severi group for `points` blown-up points.
    pub fn dimension(self, points: usize) -> usize {
        match self.basis() {
            Basis::Hirzebruch => points + 2,
            Basis::P2 => points + 1,
        }
    }

    fn check(self, class: &NsClass) -> Result<(), LatticeError> {
        if class.basis == self.basis() {
            Ok(())
        } else {
            Err(LatticeError::BasisMismatch(class.basis, self.basis()))
        }
    }
}

pub fn intersect(u: &NsClass, v: &NsClass, ctx: PairingContext) -> Result<BigRational, LatticeError> {
    ctx.check(u)?;
    ctx.check(v)?;
    let mut out = match ctx.basis() {
        Basis::Hirzebruch => {
            let delta = int(i64::from(ctx.delta()));
            &u.a * &v.b + &v.a * &u.b + delta * &u.b * &v.b
        }
        Basis::P2 => &u.a * &v.a,
    };
    for (p, mu) in &u.m {
        if let Some(mv) = v.m.get(p) {
            out -= mu * mv;
        }
    }
    Ok(out)
}

pub fn self_intersection(u: &NsClass, ctx: PairingContext) -> Result<BigRational, LatticeError> {
    intersect(u, u, ctx)
}

/// Gram matrix of the dense basis of [`NsClass::to_coords`].
pub fn gram_matrix(ctx: PairingContext, points: usize) -> Vec<Vec<i64>> {
    let dim = ctx.dimension(points);
    let mut g = vec![vec![0i64; dim]; dim];
    let head = match ctx.basis() {
        Basis::Hirzebruch => {
            g[0][1] = 1;
            g[1][0] = 1;
            g[1][1] = i64::from(ctx.delta());
            2
        }
        Basis::P2 => {
            g[0][0] = 1;
            1
        }
    };
    for (i, row) in g.iter_mut().enumerate().skip(head) {
        row[i] = -1;
    }
    g
}

/// Pairing of dense integer coordinate vectors under `gram`.
pub fn pair_coords(gram: &[Vec<i64>], x: &[BigInt], y: &[BigInt]) -> BigInt {
    let mut out = BigInt::zero();
    for (i, row) in gram.iter().enumerate() {
        if x[i].is_zero() {
            continue;
        }
        for (j, &g) in row.iter().enumerate() {
            if g != 0 && !y[j].is_zero() {
                out += &x[i] * &y[j] * g;
            }
        }
    }
    out
}

fn basis_of(c: &Configuration) -> Basis {
    if c.base().is_p2() {
        Basis::P2
    } else {
        Basis::Hirzebruch
    }
}

fn subtract_chain(mut class: NsClass, chain: &[PointId]) -> NsClass {
    for p in chain {
        class = class.minus_exceptional(p.clone(), int(1));
    }
    class
}

/// `E_p* - sum_{q -> p} E_q*`.
pub fn class_of_exceptional_strict(c: &Configuration, p: &PointId) -> Result<NsClass, LatticeError> {
    let idx = c.require(p)?;
    let proximate: Vec<PointId> = c.proximate_to(idx).into_iter().map(|q| c.id(q).clone()).collect();
    Ok(subtract_chain(NsClass::exceptional(basis_of(c), p.clone()), &proximate))
}

/// `F* - sum E_p*` over the decoration chain. Accepts fibers and curves of
/// class `F` on `F_0`.
pub fn class_of_fiber_strict(c: &Configuration, f: &CurveDecoration) -> Result<NsClass, LatticeError> {
    if !matches!(f.kind, CurveKind::Fiber | CurveKind::FSectionF0) || c.base().is_p2() {
        return Err(LatticeError::WrongKind { name: f.name.clone(), kind: f.kind });
    }
    if f.points.is_empty() {
        return Err(LatticeError::EmptyChain(f.name.clone()));
    }
    Ok(subtract_chain(NsClass::hirzebruch(int(1), BigRational::zero()), &f.points))
}

/// `M* - delta F* - sum E_p*` for a section through `chain`.
pub fn class_of_section_chain(chain: &[PointId], ctx: PairingContext) -> Result<NsClass, LatticeError> {
    if ctx.basis() != Basis::Hirzebruch {
        return Err(LatticeError::NotHirzebruch);
    }
    let delta = int(i64::from(ctx.delta()));
    Ok(subtract_chain(NsClass::hirzebruch(-delta, int(1)), chain))
}

/// Strict transform of the special section, or of a decorated curve of
/// class `M` on `F_0`.
pub fn class_of_section_strict(
    c: &Configuration,
    s: &CurveDecoration,
    ctx: PairingContext,
) -> Result<NsClass, LatticeError> {
    match s.kind {
        CurveKind::SpecialSection => class_of_section_chain(&s.points, ctx),
        CurveKind::MSectionF0 if ctx.delta() == 0 && !c.base().is_p2() => class_of_section_chain(&s.points, ctx),
        kind => Err(LatticeError::WrongKind { name: s.name.clone(), kind }),
    }
}

pub fn class_of_special_section_strict(c: &Configuration, ctx: PairingContext) -> Result<NsClass, LatticeError> {
    if c.base().is_p2() {
        return Err(LatticeError::NotHirzebruch);
    }
    let s = c.special_section().ok_or(LatticeError::MissingSpecialSection)?;
    class_of_section_strict(c, s, ctx)
}

/// `L* - E_{p1}* - sum E_p*` for a line through the distinguished point.
pub fn class_of_line_strict(c: &Configuration, line: &CurveDecoration) -> Result<NsClass, LatticeError> {
    let p1 = match (line.kind, c.distinguished_point()) {
        (CurveKind::LineThroughP1, Some(p1)) => p1.clone(),
        (kind, _) => return Err(LatticeError::WrongKind { name: line.name.clone(), kind }),
    };
    let through_p1 = NsClass::p2(int(1)).minus_exceptional(p1, int(1));
    Ok(subtract_chain(through_p1, &line.points))
}

/// Self-intersection of the class with the same coordinates after changing
/// `delta`: `s + b^2 (delta_to - delta_from)`.
pub fn transport_self_intersection(s: &BigRational, b: &BigRational, delta_from: i64, delta_to: i64) -> BigRational {
    s + b * b * int(delta_to - delta_from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::ratio;

    fn sq(u: &NsClass, ctx: PairingContext) -> BigRational {
        self_intersection(u, ctx).unwrap()
    }

    #[test]
    fn basic_products() {
        let ctx = PairingContext::hirzebruch(3);
        let f = NsClass::hirzebruch(int(1), int(0));
        let m = NsClass::hirzebruch(int(0), int(1));
        assert_eq!(intersect(&f, &m, ctx).unwrap(), int(1));
        assert_eq!(sq(&f, ctx), int(0));
        assert_eq!(sq(&m, ctx), int(3));
        let e = NsClass::exceptional(Basis::Hirzebruch, "p");
        let e2 = NsClass::exceptional(Basis::Hirzebruch, "q");
        assert_eq!(sq(&e, ctx), int(-1));
        assert_eq!(intersect(&e, &e2, ctx).unwrap(), int(0));
        let m0 = NsClass::hirzebruch(int(-3), int(1));
        assert_eq!(sq(&m0, ctx), int(-3));
        assert_eq!(intersect(&m, &m0, ctx).unwrap(), int(0));
    }

    #[test]
    fn mixed_bases_are_rejected() {
        let h = NsClass::hirzebruch(int(1), int(0));
        let p = NsClass::p2(int(1));
        assert!(matches!(intersect(&h, &p, PairingContext::hirzebruch(1)), Err(LatticeError::BasisMismatch(..))));
        assert!(h.checked_add(&p).is_err());
        assert_eq!(PairingContext::new(BaseSurface::symbolic()), Err(LatticeError::SymbolicDelta));
    }

    #[test]
    fn exceptional_strict_transforms() {
        let c = fixtures::fig1_at(6);
        let ctx = PairingContext::hirzebruch(6);
        let e = |p: &str| sq(&class_of_exceptional_strict(&c, &p.into()).unwrap(), ctx);
        assert_eq!(e("p4"), int(-4));
        assert_eq!(e("p2"), int(-3));
        assert_eq!(e("p9"), int(-1));
        assert!(class_of_exceptional_strict(&c, &"zz".into()).is_err());
    }

    #[test]
    fn fiber_and_section_strict_transforms() {
        let c = fixtures::fig1_at(4);
        let ctx = PairingContext::hirzebruch(4);
        assert_eq!(sq(&class_of_fiber_strict(&c, c.curve("F1").unwrap()).unwrap(), ctx), int(-1));
        assert_eq!(sq(&class_of_fiber_strict(&c, c.curve("F2").unwrap()).unwrap(), ctx), int(-2));
        assert_eq!(sq(&class_of_special_section_strict(&c, ctx).unwrap(), ctx), int(-7));
        let empty = CurveDecoration::new("F", CurveKind::Fiber, Vec::<String>::new());
        assert_eq!(class_of_fiber_strict(&c, &empty), Err(LatticeError::EmptyChain("F".into())));
        assert!(class_of_fiber_strict(&c, c.curve("M0").unwrap()).is_err());
        let bare = class_of_section_chain(&[], PairingContext::hirzebruch(2)).unwrap();
        assert_eq!(sq(&bare, PairingContext::hirzebruch(2)), int(-2));
        let f2 = fixtures::fig2();
        let zero = PairingContext::hirzebruch(0);
        assert_eq!(sq(&class_of_section_strict(&f2, f2.curve("M1").unwrap(), zero).unwrap(), zero), int(-5));
    }

    #[test]
    fn line_strict_transform() {
        let c = fixtures::fig3(3, 1);
        let l = class_of_line_strict(&c, c.curve("L1").unwrap()).unwrap();
        assert_eq!(sq(&l, PairingContext::p2()), int(-1));
    }

    #[test]
    fn transport_examples() {
        assert_eq!(transport_self_intersection(&int(0), &int(1), 5, 2), int(-3));
        assert_eq!(transport_self_intersection(&int(7), &int(0), 1, 9), int(7));
        assert_eq!(transport_self_intersection(&int(-4), &int(2), 1, 6), int(16));
        let u = NsClass::hirzebruch(int(3), int(2));
        let s1 = sq(&u, PairingContext::hirzebruch(1));
        assert_eq!(s1, int(16));
        assert_eq!(sq(&u, PairingContext::hirzebruch(6)), transport_self_intersection(&s1, &u.b, 1, 6));
    }

    #[test]
    fn coords_round_trip() {
        let c = fixtures::fig1_at(2);
        let e = class_of_exceptional_strict(&c, &"p4".into()).unwrap();
        let coords = e.to_coords(&c);
        assert_eq!(coords.len(), 22);
        assert_eq!(coords[5], int(1));
        assert_eq!(coords[6], int(-1));
        assert_eq!(NsClass::from_coords(Basis::Hirzebruch, &c, &coords), e);
    }

    #[test]
    fn serializes_with_string_rationals() {
        let mut u = NsClass::hirzebruch(ratio(1, 2), int(1));
        u.m.insert("p1".into(), int(2));
        let json = serde_json::to_string(&u).unwrap();
        assert_eq!(json, r#"{"a":"1/2","b":"1","m":{"p1":"2"}}"#);
        assert_eq!(u.to_string(), "1/2F* + M* - 2Ep1*");
    }
}
