//! Built-in configurations: the twenty-point example over `F_delta`, its
//! `F_0` decoration with both rulings, and the two-parameter family over P2.

use thiserror::Error;

use crate::config::{BaseSurface, Configuration, CurveDecoration, CurveKind, Point, PointId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixtureError {
    #[error("unknown fixture `{0}` (expected fig1, fig2 or fig3)")]
    Unknown(String),
    #[error("fig3 needs r >= 3 and n >= 1 (got r={r}, n={n})")]
    BadParameters { r: u32, n: u32 },
}

pub const NAMES: [&str; 3] = ["fig1", "fig2", "fig3"];

fn twenty_points() -> Vec<Point> {
    let parent = |id: &str, p: &str| Point::free(id, p);
    let sat = |id: &str, p: &str, e: &str| Point::satellite(id, p, e);
    vec![
        Point::root("p1"),
        parent("p2", "p1"),
        parent("p3", "p2"),
        parent("p4", "p3"),
        parent("p5", "p4"),
        sat("p6", "p5", "p4"),
        sat("p7", "p6", "p4"),
        sat("p8", "p3", "p2"),
        parent("p9", "p8"),
        Point::root("p10"),
        parent("p11", "p10"),
        parent("p12", "p11"),
        sat("p13", "p12", "p11"),
        parent("p14", "p10"),
        parent("p15", "p14"),
        sat("p16", "p15", "p14"),
        sat("p17", "p16", "p15"),
        Point::root("p18"),
        parent("p19", "p18"),
        sat("p20", "p19", "p18"),
    ]
}

fn fibers(kind: CurveKind) -> Vec<CurveDecoration> {
    vec![
        CurveDecoration::new("F1", kind, ["p1"]),
        CurveDecoration::new("F2", kind, ["p10", "p11"]),
        CurveDecoration::new("F3", kind, ["p18", "p19"]),
    ]
}

/// Twenty points on three fibers, with the special section through
/// `p10, p14, p15`. The base is symbolic.
pub fn fig1() -> Configuration {
    let mut curves = fibers(CurveKind::Fiber);
    curves.push(CurveDecoration::new("M0", CurveKind::SpecialSection, ["p10", "p14", "p15"]));
    Configuration::new(BaseSurface::symbolic(), twenty_points(), curves).expect("fixture is well formed")
}

pub fn fig1_at(delta: u32) -> Configuration {
    fig1().with_base(BaseSurface::hirzebruch(delta))
}

/// The same points over `F_0` with three curves of each class.
pub fn fig2() -> Configuration {
    let mut curves = fibers(CurveKind::FSectionF0);
    curves.push(CurveDecoration::new("M1", CurveKind::MSectionF0, ["p1", "p2", "p3", "p4", "p5"]));
    curves.push(CurveDecoration::new("M2", CurveKind::MSectionF0, ["p10", "p14", "p15"]));
    curves.push(CurveDecoration::new("M3", CurveKind::MSectionF0, ["p18"]));
    Configuration::new(BaseSurface::hirzebruch(0), twenty_points(), curves).expect("fixture is well formed")
}

/// Over P2: `q1` (the distinguished point), `q2` infinitely near to it, and
/// `n` free branches of `r` points each above `q2`. The line through `q1`
/// tangent to `q2` is decorated.
pub fn fig3(r: u32, n: u32) -> Configuration {
    let mut points = vec![Point::root("q1"), Point::free("q2", "q1")];
    for k in 1..=n {
        for j in 1..=r {
            let parent = if j == 1 { "q2".to_string() } else { format!("p{k}_{}", j - 1) };
            points.push(Point::free(format!("p{k}_{j}"), parent));
        }
    }
    let curves = vec![CurveDecoration::new("L1", CurveKind::LineThroughP1, ["q2"])];
    Configuration::new(BaseSurface::P2, points, curves).expect("fixture is well formed")
}

pub fn fig3_checked(r: u32, n: u32) -> Result<Configuration, FixtureError> {
    if r < 3 || n < 1 {
        return Err(FixtureError::BadParameters { r, n });
    }
    Ok(fig3(r, n))
}

/// Looks a fixture up by name. A path such as `fixtures/fig1.json` resolves
/// by its file stem.
pub fn by_name(name: &str, r: u32, n: u32) -> Result<Configuration, FixtureError> {
    let stem = std::path::Path::new(name)
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(name);
    match stem {
        "fig1" => Ok(fig1()),
        "fig2" => Ok(fig2()),
        "fig3" => fig3_checked(r, n),
        _ => Err(FixtureError::Unknown(name.to_string())),
    }
}

/// `(r, n)` when `c` has the shape of [`fig3`] up to point names.
pub fn fig3_parameters(c: &Configuration) -> Option<(u32, u32)> {
    let points = c.points();
    if !c.base().is_p2() || points.len() < 3 || points.iter().any(|p| p.extra_proximity.is_some()) {
        return None;
    }
    let p1 = &points[0].id;
    fn children<'a>(points: &'a [Point], id: &PointId) -> Vec<&'a PointId> {
        points.iter().filter(|p| p.parent.as_ref() == Some(id)).map(|p| &p.id).collect()
    }
    if c.roots().len() != 1 {
        return None;
    }
    let [q2] = children(points, p1)[..] else { return None };
    let [line] = c.curves() else { return None };
    if line.kind != CurveKind::LineThroughP1 || line.points != [q2.clone()] {
        return None;
    }
    let branches: Vec<&PointId> = children(points, q2);
    let mut r = None;
    for start in &branches {
        let mut len = 1u32;
        let mut at = *start;
        loop {
            match children(points, at)[..] {
                [] => break,
                [next] => {
                    at = next;
                    len += 1;
                }
                _ => return None,
            }
        }
        if *r.get_or_insert(len) != len {
            return None;
        }
    }
    let (r, n) = (r?, u32::try_from(branches.len()).ok()?);
    (r >= 3).then_some((r, n))
}

/// Earlier published lower bound for the P2 family, `-n*ceil((r-2)/4) - 2n + 1`.
pub fn prior_bound_fig3(r: u32, n: u32) -> i64 {
    let (r, n) = (i64::from(r), i64::from(n));
    let quarter = (r - 2 + 3).div_euclid(4);
    -n * quarter - 2 * n + 1
}
