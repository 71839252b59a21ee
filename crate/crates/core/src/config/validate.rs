use std::fmt;

use super::{BaseSurface, Configuration, CurveDecoration, CurveKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    /// Reported but not fatal: the bound computations only read the stored
    /// proximities.
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub severity: Severity,
    /// `point <id>`, `curve <name>` or `configuration`.
    pub subject: String,
    pub message: String,
}

impl Violation {
    fn error(subject: impl Into<String>, message: impl Into<String>) -> Self {
        Violation { severity: Severity::Error, subject: subject.into(), message: message.into() }
    }

    fn warning(subject: impl Into<String>, message: impl Into<String>) -> Self {
        Violation { severity: Severity::Warning, subject: subject.into(), message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}: {}", self.subject, self.message)
    }
}

pub(super) fn validate(c: &Configuration) -> Vec<Violation> {
    let mut out = Vec::new();
    if c.is_empty() {
        out.push(Violation::error("configuration", "empty configuration"));
        return out;
    }
    let acyclic = check_points(c, &mut out);
    if !acyclic {
        // chain and level rules are meaningless on a cyclic parent relation
        return out;
    }
    for curve in c.curves() {
        check_curve(c, curve, &mut out);
    }
    check_base_rules(c, &mut out);
    out
}

fn point_subject(c: &Configuration, i: usize) -> String {
    format!("point {}", c.id(i))
}

fn check_points(c: &Configuration, out: &mut Vec<Violation>) -> bool {
    let mut acyclic = true;
    for i in 0..c.len() {
        let subject = point_subject(c, i);
        let ancestors = match c.ancestors(i) {
            Ok(a) => a,
            Err(_) => {
                out.push(Violation::error(subject, "parent relation has a cycle"));
                acyclic = false;
                continue;
            }
        };
        let Some(extra) = c.extra_index(i) else { continue };
        let Some(parent) = c.parent_index(i) else {
            out.push(Violation::error(subject, "level-0 point cannot have a second proximity target"));
            continue;
        };
        if extra == parent {
            out.push(Violation::error(subject, "duplicate proximity target"));
        } else if !ancestors.contains(&extra) {
            out.push(Violation::error(
                subject,
                format!("proximity target {} is not a predecessor", c.id(extra)),
            ));
        } else if !c.is_proximate(parent, extra) {
            out.push(Violation::warning(
                subject,
                format!(
                    "proximate to {} but its parent {} is not (points proximate to {} do not form a chain)",
                    c.id(extra),
                    c.id(parent),
                    c.id(extra)
                ),
            ));
        } else if let Some(twin) = (0..i).find(|&o| c.parent_index(o) == Some(parent) && c.extra_index(o) == Some(extra)) {
            // Two exceptional curves meet in a single point.
            out.push(Violation::error(
                subject,
                format!("coincides with {}: both lie on the curves of {} and {}", c.id(twin), c.id(parent), c.id(extra)),
            ));
        }
    }
    acyclic
}

fn allowed_kinds(base: BaseSurface) -> &'static [CurveKind] {
    match base {
        BaseSurface::P2 => &[CurveKind::LineThroughP1],
        BaseSurface::Hirzebruch { delta: Some(0) } => &[CurveKind::FSectionF0, CurveKind::MSectionF0],
        BaseSurface::Hirzebruch { .. } => &[CurveKind::Fiber, CurveKind::SpecialSection],
    }
}

fn check_curve(c: &Configuration, curve: &CurveDecoration, out: &mut Vec<Violation>) {
    let subject = format!("curve {}", curve.name);
    if !allowed_kinds(c.base()).contains(&curve.kind) {
        out.push(Violation::error(
            subject.clone(),
            format!("curve kind {} is not allowed over {}", curve.kind, c.base()),
        ));
    }
    let chain: Vec<usize> = curve.points.iter().filter_map(|id| c.index_of(id)).collect();
    let Some(&first) = chain.first() else {
        if curve.kind != CurveKind::SpecialSection {
            out.push(Violation::error(subject, "empty decoration chain"));
        }
        return;
    };
    if curve.kind == CurveKind::SpecialSection {
        // A section may pass through several level-0 points: each branch is
        // parent-linked, listed parent first, and never forks.
        for (i, &q) in chain.iter().enumerate() {
            let linked = match c.parent_index(q) {
                None => true,
                Some(p) => chain[..i].contains(&p) && !chain[..i].iter().any(|&o| c.parent_index(o) == Some(p)),
            };
            if !linked {
                out.push(Violation::error(subject.clone(), format!("decoration chain not parent-linked at {}", c.id(q))));
            }
        }
    } else {
        for pair in chain.windows(2) {
            if c.parent_index(pair[1]) != Some(pair[0]) {
                out.push(Violation::error(
                    subject.clone(),
                    format!("decoration chain not parent-linked at {}", c.id(pair[1])),
                ));
            }
        }
    }
    match curve.kind {
        CurveKind::LineThroughP1 => {
            let on_line_through_p1 = match c.parent_index(first) {
                None => first != 0,
                Some(p) => p == 0,
            };
            if !on_line_through_p1 {
                out.push(Violation::error(
                    subject.clone(),
                    "line chain must start at a level-0 point or at a point in the first neighbourhood of p1",
                ));
            }
            if chain.contains(&0) {
                out.push(Violation::error(subject.clone(), "the distinguished point cannot be listed on a line"));
            }
        }
        _ => {
            if c.parent_index(first).is_some() {
                out.push(Violation::error(subject.clone(), "decoration chain must start at a level-0 point"));
            }
        }
    }
    for &q in &chain {
        if let Some(e) = c.extra_index(q) {
            if chain.contains(&e) {
                out.push(Violation::error(
                    subject.clone(),
                    format!(
                        "passes through satellite point {} and its second target {}, so it would be singular",
                        c.id(q),
                        c.id(e)
                    ),
                ));
            }
        }
    }
}

fn check_base_rules(c: &Configuration, out: &mut Vec<Violation>) {
    match c.base() {
        BaseSurface::P2 => check_p2(c, out),
        BaseSurface::Hirzebruch { delta: Some(0) } => {
            check_ruling(c, CurveKind::FSectionF0, "curves of class F", out);
            check_ruling(c, CurveKind::MSectionF0, "curves of class M", out);
            check_transversal(c, CurveKind::FSectionF0, CurveKind::MSectionF0, out);
        }
        BaseSurface::Hirzebruch { .. } => {
            if c.curves_of_kind(CurveKind::SpecialSection).count() > 1 {
                out.push(Violation::error("configuration", "more than one special section"));
            }
            check_ruling(c, CurveKind::Fiber, "fibers", out);
            check_transversal(c, CurveKind::Fiber, CurveKind::SpecialSection, out);
        }
    }
}

/// Every level-0 point lies on exactly one curve of `kind`, and distinct
/// curves of `kind` are disjoint.
fn check_ruling(c: &Configuration, kind: CurveKind, label: &str, out: &mut Vec<Violation>) {
    for root in c.root_indices() {
        let id = c.id(root);
        let n = c.curves_of_kind(kind).filter(|cv| cv.contains(id)).count();
        if n != 1 {
            out.push(Violation::error(
                point_subject(c, root),
                format!("level-0 point lies on {n} {label} (expected exactly 1)"),
            ));
        }
    }
    check_disjoint(c, kind, label, out);
}

fn check_disjoint(c: &Configuration, kind: CurveKind, label: &str, out: &mut Vec<Violation>) {
    let curves: Vec<_> = c.curves_of_kind(kind).collect();
    for (i, a) in curves.iter().enumerate() {
        for b in &curves[i + 1..] {
            if let Some(shared) = a.points.iter().find(|p| b.contains(p)) {
                out.push(Violation::error(
                    format!("curve {}", a.name),
                    format!("{label} {} and {} share point {shared}", a.name, b.name),
                ));
            }
        }
    }
}

/// Curves of the two classes meet once, so their chains share at most a root.
fn check_transversal(c: &Configuration, a_kind: CurveKind, b_kind: CurveKind, out: &mut Vec<Violation>) {
    for a in c.curves_of_kind(a_kind) {
        for b in c.curves_of_kind(b_kind) {
            let shared = a.points.iter().filter(|p| b.contains(p)).count();
            if shared > 1 {
                out.push(Violation::error(
                    format!("curve {}", a.name),
                    format!("meets {} in {shared} configuration points (at most 1 allowed)", b.name),
                ));
            }
        }
    }
}

fn check_p2(c: &Configuration, out: &mut Vec<Violation>) {
    if c.parent_index(0).is_some() {
        out.push(Violation::error(point_subject(c, 0), "the distinguished point must have level 0"));
    }
    let p1 = c.id(0).clone();
    for curve in c.curves() {
        if curve.contains(&p1) && curve.kind != CurveKind::LineThroughP1 {
            out.push(Violation::error(format!("curve {}", curve.name), "the distinguished point lies on no decoration"));
        }
    }
    // points that become level 0 after blowing up p1
    for q in 1..c.len() {
        let parent = c.parent_index(q);
        if parent.is_some() && parent != Some(0) {
            continue;
        }
        let id = c.id(q);
        let n = c.curves_of_kind(CurveKind::LineThroughP1).filter(|cv| cv.contains(id)).count();
        if n != 1 {
            out.push(Violation::error(
                point_subject(c, q),
                format!("lies on {n} lines through the distinguished point (expected exactly 1)"),
            ));
        }
    }
    check_disjoint(c, CurveKind::LineThroughP1, "lines", out);
}
