//! Configurations of infinitely near points over a Hirzebruch surface or the
//! projective plane, decorated with the curves whose strict transforms pass
//! through them.
//!
//! Proximity is stored minimally: every non-root point is proximate to its
//! parent, and a satellite point additionally records its second target.
//! Everything else (levels, chains, proximate sets, arrows) is derived.

mod convert;
mod dot;
mod parse;
mod validate;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use validate::{Severity, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(String);

impl PointId {
    pub fn new(id: impl Into<String>) -> Self {
        PointId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PointId {
    fn from(id: &str) -> Self {
        PointId(id.to_string())
    }
}

/// The surface the configuration is blown up over. A Hirzebruch surface with
/// `delta: None` is symbolic: only its combinatorics are used, as when
/// scanning for the effective-cone threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseSurface {
    P2,
    Hirzebruch { delta: Option<u32> },
}

impl BaseSurface {
    pub fn hirzebruch(delta: u32) -> Self {
        BaseSurface::Hirzebruch { delta: Some(delta) }
    }

    pub fn symbolic() -> Self {
        BaseSurface::Hirzebruch { delta: None }
    }

    pub fn is_p2(self) -> bool {
        matches!(self, BaseSurface::P2)
    }

    pub fn delta(self) -> Option<u32> {
        match self {
            BaseSurface::P2 => None,
            BaseSurface::Hirzebruch { delta } => delta,
        }
    }

    /// `F_0` carries both rulings' decorations.
    pub fn is_delta_zero(self) -> bool {
        self.delta() == Some(0)
    }
}

impl fmt::Display for BaseSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseSurface::P2 => f.write_str("P2"),
            BaseSurface::Hirzebruch { delta: Some(d) } => write!(f, "F_{d}"),
            BaseSurface::Hirzebruch { delta: None } => f.write_str("F_delta"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Point {
    pub id: PointId,
    pub parent: Option<PointId>,
    pub extra_proximity: Option<PointId>,
}

impl Point {
    pub fn root(id: impl Into<String>) -> Self {
        Point { id: PointId::new(id), parent: None, extra_proximity: None }
    }

    pub fn free(id: impl Into<String>, parent: impl Into<String>) -> Self {
        Point { id: PointId::new(id), parent: Some(PointId::new(parent)), extra_proximity: None }
    }

    pub fn satellite(id: impl Into<String>, parent: impl Into<String>, extra: impl Into<String>) -> Self {
        Point {
            id: PointId::new(id),
            parent: Some(PointId::new(parent)),
            extra_proximity: Some(PointId::new(extra)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CurveKind {
    #[serde(rename = "fiber")]
    Fiber,
    #[serde(rename = "special_section")]
    SpecialSection,
    /// A curve of class `M` on `F_0`.
    #[serde(rename = "m_section_f0")]
    MSectionF0,
    /// A curve of class `F` on `F_0`.
    #[serde(rename = "f_section_f0")]
    FSectionF0,
    #[serde(rename = "line_through_p1")]
    LineThroughP1,
}

impl CurveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveKind::Fiber => "fiber",
            CurveKind::SpecialSection => "special_section",
            CurveKind::MSectionF0 => "m_section_f0",
            CurveKind::FSectionF0 => "f_section_f0",
            CurveKind::LineThroughP1 => "line_through_p1",
        }
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A curve on the base surface together with the configuration points its
/// successive strict transforms pass through, root first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveDecoration {
    pub name: String,
    pub kind: CurveKind,
    pub points: Vec<PointId>,
}

impl CurveDecoration {
    pub fn new<I, S>(name: impl Into<String>, kind: CurveKind, points: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        CurveDecoration {
            name: name.into(),
            kind,
            points: points.into_iter().map(|p| PointId::new(p)).collect(),
        }
    }

    pub fn last_point(&self) -> Option<&PointId> {
        self.points.last()
    }

    pub fn contains(&self, id: &PointId) -> bool {
        self.points.contains(id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("duplicate point id `{0}`")]
    DuplicateId(PointId),
    #[error("duplicate curve name `{0}`")]
    DuplicateCurveName(String),
    #[error("unknown point id `{id}` referenced by {referrer}")]
    UnknownPoint { id: PointId, referrer: String },
    #[error("unknown point id `{0}`")]
    NoSuchPoint(PointId),
    #[error("parent relation has a cycle through `{0}`")]
    Cycle(PointId),
    #[error("configuration is not over P2")]
    NotP2,
    #[error("invalid configuration: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
}

fn join_violations(violations: &[Violation]) -> String {
    violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// A configuration with resolved point references. Construction checks ids
/// and references only; the geometric invariants are reported by
/// [`Configuration::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    base: BaseSurface,
    points: Vec<Point>,
    curves: Vec<CurveDecoration>,
    index: HashMap<PointId, usize>,
    parent: Vec<Option<usize>>,
    extra: Vec<Option<usize>>,
}

impl Configuration {
    pub fn new(
        base: BaseSurface,
        points: Vec<Point>,
        curves: Vec<CurveDecoration>,
    ) -> Result<Self, ConfigError> {
        let mut index = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if index.insert(p.id.clone(), i).is_some() {
                return Err(ConfigError::DuplicateId(p.id.clone()));
            }
        }
        let resolve = |id: &Option<PointId>, referrer: &PointId| -> Result<Option<usize>, ConfigError> {
            match id {
                None => Ok(None),
                Some(id) => index.get(id).copied().map(Some).ok_or_else(|| ConfigError::UnknownPoint {
                    id: id.clone(),
                    referrer: format!("point `{referrer}`"),
                }),
            }
        };
        let mut parent = Vec::with_capacity(points.len());
        let mut extra = Vec::with_capacity(points.len());
        for p in &points {
            parent.push(resolve(&p.parent, &p.id)?);
            extra.push(resolve(&p.extra_proximity, &p.id)?);
        }
        let mut names = std::collections::HashSet::new();
        for curve in &curves {
            if !names.insert(curve.name.as_str()) {
                return Err(ConfigError::DuplicateCurveName(curve.name.clone()));
            }
            for id in &curve.points {
                if !index.contains_key(id) {
                    return Err(ConfigError::UnknownPoint {
                        id: id.clone(),
                        referrer: format!("curve `{}`", curve.name),
                    });
                }
            }
        }
        Ok(Configuration { base, points, curves, index, parent, extra })
    }

    pub fn base(&self) -> BaseSurface {
        self.base
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn curves(&self) -> &[CurveDecoration] {
        &self.curves
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, id: &PointId) -> bool {
        self.index.contains_key(id)
    }

    pub fn index_of(&self, id: &PointId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub(crate) fn require(&self, id: &PointId) -> Result<usize, ConfigError> {
        self.index_of(id).ok_or_else(|| ConfigError::NoSuchPoint(id.clone()))
    }

    pub(crate) fn id(&self, i: usize) -> &PointId {
        &self.points[i].id
    }

    pub(crate) fn parent_index(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    pub(crate) fn extra_index(&self, i: usize) -> Option<usize> {
        self.extra[i]
    }

    /// Same points, different base surface.
    pub fn with_base(&self, base: BaseSurface) -> Configuration {
        Configuration { base, ..self.clone() }
    }

    /// Same points, replacement decorations.
    pub fn with_curves(&self, base: BaseSurface, curves: Vec<CurveDecoration>) -> Result<Configuration, ConfigError> {
        Configuration::new(base, self.points.clone(), curves)
    }

    /// Strict predecessors of `i`, nearest first. Fails on a parent cycle.
    pub(crate) fn ancestors(&self, i: usize) -> Result<Vec<usize>, ConfigError> {
        let mut out = Vec::new();
        let mut cur = self.parent[i];
        while let Some(p) = cur {
            if p == i || out.len() >= self.points.len() {
                return Err(ConfigError::Cycle(self.points[i].id.clone()));
            }
            out.push(p);
            cur = self.parent[p];
        }
        Ok(out)
    }

    pub(crate) fn level_of(&self, i: usize) -> Result<usize, ConfigError> {
        self.ancestors(i).map(|a| a.len())
    }

    /// Chain `C^q` as indices, root first and `q` last.
    pub(crate) fn chain_indices(&self, i: usize) -> Result<Vec<usize>, ConfigError> {
        let mut chain = self.ancestors(i)?;
        chain.reverse();
        chain.push(i);
        Ok(chain)
    }

    /// Number of strict predecessors of `id`.
    pub fn level(&self, id: &PointId) -> Result<usize, ConfigError> {
        self.level_of(self.require(id)?)
    }

    /// The chain of all points `id` is infinitely near to, root first.
    pub fn chain_below(&self, id: &PointId) -> Result<Vec<PointId>, ConfigError> {
        let chain = self.chain_indices(self.require(id)?)?;
        Ok(chain.into_iter().map(|i| self.points[i].id.clone()).collect())
    }

    /// Whether `q -> p`, i.e. `q` lies on the strict transform of `E_p`.
    pub(crate) fn is_proximate(&self, q: usize, p: usize) -> bool {
        self.parent[q] == Some(p) || self.extra[q] == Some(p)
    }

    /// Indices of the points proximate to `p`, in declaration order.
    pub(crate) fn proximate_to(&self, p: usize) -> Vec<usize> {
        (0..self.points.len()).filter(|&q| self.is_proximate(q, p)).collect()
    }

    pub fn proximate_points(&self, id: &PointId) -> Result<Vec<PointId>, ConfigError> {
        let p = self.require(id)?;
        Ok(self.proximate_to(p).into_iter().map(|q| self.points[q].id.clone()).collect())
    }

    pub fn is_satellite(&self, id: &PointId) -> Result<bool, ConfigError> {
        Ok(self.extra[self.require(id)?].is_some())
    }

    pub(crate) fn maximal_indices(&self) -> Vec<usize> {
        let mut targeted = vec![false; self.points.len()];
        for q in 0..self.points.len() {
            for t in [self.parent[q], self.extra[q]].into_iter().flatten() {
                targeted[t] = true;
            }
        }
        (0..self.points.len()).filter(|&i| !targeted[i]).collect()
    }

    /// Points that are nobody's parent or proximity target, in declaration order.
    pub fn maximal_points(&self) -> Vec<PointId> {
        self.maximal_indices().into_iter().map(|i| self.points[i].id.clone()).collect()
    }

    pub(crate) fn root_indices(&self) -> Vec<usize> {
        (0..self.points.len()).filter(|&i| self.parent[i].is_none()).collect()
    }

    pub fn roots(&self) -> Vec<PointId> {
        self.root_indices().into_iter().map(|i| self.points[i].id.clone()).collect()
    }

    pub fn curves_of_kind(&self, kind: CurveKind) -> impl Iterator<Item = &CurveDecoration> {
        self.curves.iter().filter(move |c| c.kind == kind)
    }

    pub fn special_section(&self) -> Option<&CurveDecoration> {
        self.curves_of_kind(CurveKind::SpecialSection).next()
    }

    pub fn curve(&self, name: &str) -> Option<&CurveDecoration> {
        self.curves.iter().find(|c| c.name == name)
    }

    /// Fiber decoration through the level-0 point `root`.
    pub fn fiber_through(&self, root: &PointId) -> Option<&CurveDecoration> {
        self.curves_of_kind(CurveKind::Fiber).find(|c| c.points.first() == Some(root))
    }

    /// The distinguished first point of a configuration over P2.
    pub fn distinguished_point(&self) -> Option<&PointId> {
        match self.base {
            BaseSurface::P2 => self.points.first().map(|p| &p.id),
            _ => None,
        }
    }

    /// Lists every violated invariant; an empty list means valid.
    pub fn validate(&self) -> Vec<Violation> {
        validate::validate(self)
    }

    /// True when [`validate`](Self::validate) reports no errors (warnings allowed).
    pub fn is_valid(&self) -> bool {
        self.validate().iter().all(|v| v.severity != Severity::Error)
    }

    pub fn ensure_valid(&self) -> Result<(), ConfigError> {
        let errors: Vec<_> = self.validate().into_iter().filter(|v| v.severity == Severity::Error).collect();
        if errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(errors))
        }
    }

    pub fn arrowed_graph(&self) -> ArrowedProximityGraph {
        let mut proximity_edges = Vec::new();
        for (q, p) in self.points.iter().enumerate() {
            for t in [self.parent[q], self.extra[q]].into_iter().flatten() {
                proximity_edges.push((p.id.clone(), self.points[t].id.clone()));
            }
        }
        ArrowedProximityGraph {
            vertices: self.points.iter().map(|p| p.id.clone()).collect(),
            proximity_edges,
            arrows: self
                .curves
                .iter()
                .map(|c| Arrow { curve: c.name.clone(), kind: c.kind, target: c.last_point().cloned() })
                .collect(),
        }
    }

    pub fn export_dot(&self) -> String {
        dot::export(self)
    }

    pub fn p2_to_f1(&self) -> Result<Configuration, ConfigError> {
        convert::p2_to_f1(self)
    }

    pub fn from_json(text: &str) -> Result<Configuration, ConfigError> {
        parse::from_json(text)
    }

    pub fn to_json(&self) -> String {
        parse::to_json(self)
    }
}

/// Arrow placed at the last configuration point of a decoration chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub curve: String,
    pub kind: CurveKind,
    /// `None` for a decorated curve through no configuration point.
    pub target: Option<PointId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowedProximityGraph {
    pub vertices: Vec<PointId>,
    /// `(q, p)` whenever `q -> p` is stored.
    pub proximity_edges: Vec<(PointId, PointId)>,
    pub arrows: Vec<Arrow>,
}

pub fn parse_configuration(text: &str) -> Result<Configuration, ConfigError> {
    Configuration::from_json(text)
}

pub fn validate(c: &Configuration) -> Vec<Violation> {
    c.validate()
}

pub fn level(c: &Configuration, id: &PointId) -> Result<usize, ConfigError> {
    c.level(id)
}

pub fn chain_below(c: &Configuration, id: &PointId) -> Result<Vec<PointId>, ConfigError> {
    c.chain_below(id)
}

pub fn maximal_points(c: &Configuration) -> Vec<PointId> {
    c.maximal_points()
}

pub fn export_dot(c: &Configuration) -> String {
    c.export_dot()
}

pub fn p2_to_f1(c: &Configuration) -> Result<Configuration, ConfigError> {
    c.p2_to_f1()
}
