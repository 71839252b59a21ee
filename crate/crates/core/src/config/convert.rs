use super::{BaseSurface, ConfigError, Configuration, CurveDecoration, CurveKind, Point};

/// Name of the special section created from the exceptional curve of `p1`.
pub const SPECIAL_SECTION_NAME: &str = "M0";

/// Blowing up `p1` turns P2 into `F_1`: `E_{p1}` becomes the special section
/// and lines through `p1` become fibers. Points proximate to `p1` end up on
/// the special section; every other proximity pair is kept.
pub(super) fn p2_to_f1(c: &Configuration) -> Result<Configuration, ConfigError> {
    if !c.base().is_p2() {
        return Err(ConfigError::NotP2);
    }
    let Some(p1) = c.points().first().map(|p| p.id.clone()) else {
        return Configuration::new(BaseSurface::hirzebruch(1), vec![], vec![]);
    };
    let drop_p1 = |target: &Option<super::PointId>| target.clone().filter(|t| *t != p1);
    let mut points = Vec::with_capacity(c.len().saturating_sub(1));
    for p in &c.points()[1..] {
        let parent = drop_p1(&p.parent);
        let mut extra = drop_p1(&p.extra_proximity);
        if parent.is_none() || extra == parent {
            extra = None;
        }
        points.push(Point { id: p.id.clone(), parent, extra_proximity: extra });
    }
    let mut on_section: Vec<usize> = c.proximate_to(0);
    on_section.sort_by_key(|&q| c.level_of(q).unwrap_or(usize::MAX));
    let section_chain: Vec<_> = on_section.into_iter().map(|q| c.id(q).clone()).collect();
    let mut curves = Vec::new();
    for curve in c.curves_of_kind(CurveKind::LineThroughP1) {
        curves.push(CurveDecoration {
            name: curve.name.clone(),
            kind: CurveKind::Fiber,
            points: curve.points.iter().filter(|id| **id != p1).cloned().collect(),
        });
    }
    let mut name = SPECIAL_SECTION_NAME.to_string();
    while curves.iter().any(|cv| cv.name == name) {
        name.push('\'');
    }
    curves.push(CurveDecoration { name, kind: CurveKind::SpecialSection, points: section_chain });
    Configuration::new(BaseSurface::hirzebruch(1), points, curves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fig3_becomes_single_root_on_f1() {
        let p2 = fixtures::fig3(3, 1);
        let f1 = p2.p2_to_f1().unwrap();
        assert_eq!(f1.base(), BaseSurface::hirzebruch(1));
        assert_eq!(f1.len(), p2.len() - 1);
        assert_eq!(f1.roots(), vec!["q2".into()]);
        assert_eq!(f1.special_section().unwrap().points, vec!["q2".into()]);
        assert_eq!(f1.fiber_through(&"q2".into()).unwrap().name, "L1");
        assert!(f1.validate().is_empty(), "{:?}", f1.validate());
    }

    #[test]
    fn lonely_p1_gives_empty_configuration() {
        let c = Configuration::new(BaseSurface::P2, vec![Point::root("p1")], vec![]).unwrap();
        let f1 = c.p2_to_f1().unwrap();
        assert!(f1.is_empty());
        assert_eq!(f1.validate()[0].message, "empty configuration");
    }

    #[test]
    fn point_off_p1_lands_on_a_fiber_only() {
        let c = Configuration::new(
            BaseSurface::P2,
            vec![Point::root("p1"), Point::root("q")],
            vec![CurveDecoration::new("L", CurveKind::LineThroughP1, ["q"])],
        )
        .unwrap();
        let f1 = c.p2_to_f1().unwrap();
        assert_eq!(f1.roots(), vec!["q".into()]);
        assert!(f1.special_section().unwrap().points.is_empty());
        assert_eq!(f1.fiber_through(&"q".into()).unwrap().kind, CurveKind::Fiber);
        assert!(f1.validate().is_empty());
    }

    #[test]
    fn proximities_away_from_p1_survive() {
        let c = Configuration::new(
            BaseSurface::P2,
            vec![
                Point::root("p1"),
                Point::free("a", "p1"),
                Point::satellite("b", "a", "p1"),
                Point::satellite("c", "b", "a"),
            ],
            vec![CurveDecoration::new("L", CurveKind::LineThroughP1, ["a"])],
        )
        .unwrap();
        let f1 = c.p2_to_f1().unwrap();
        assert_eq!(f1.special_section().unwrap().points, vec!["a".into(), "b".into()]);
        assert_eq!(f1.proximate_points(&"a".into()).unwrap(), vec!["b".into(), "c".into()]);
        assert!(!f1.is_satellite(&"b".into()).unwrap());
        assert!(f1.is_satellite(&"c".into()).unwrap());
    }

    #[test]
    fn rejects_hirzebruch_input() {
        assert_eq!(fixtures::fig1().p2_to_f1().unwrap_err(), ConfigError::NotP2);
    }
}
