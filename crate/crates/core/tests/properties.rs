mod common;

use std::collections::BTreeMap;

use common::{q, random_chain, random_forest, rng, with_root_fibers, Tree};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use proptest::prelude::*;
use wbnc_core::bounds::{self, BoundKind};
use wbnc_core::config::{BaseSurface, Configuration, CurveDecoration, CurveKind, PointId, Severity};
use wbnc_core::cone::{self, dual_cone, Pairing, RationalCone};
use wbnc_core::fixtures;
use wbnc_core::formulas::{self, ceil_star, Method};
use wbnc_core::lattice::{
    class_of_exceptional_strict, gram_matrix, intersect, self_intersection, transport_self_intersection, Basis,
    NsClass, PairingContext,
};

/// Random plane configuration: the first point is the distinguished one and
/// every other root and every point right after it carries its own line.
fn random_plane(seed: u64, n: usize, roots: usize, satellites: bool) -> Configuration {
    let points = random_forest(&mut rng(seed), n, roots, satellites);
    let curves = points
        .iter()
        .skip(1)
        .filter(|p| p.parent.is_none() || p.parent.as_ref().map(|x| x.as_str()) == Some("p0"))
        .map(|p| CurveDecoration::new(format!("L_{}", p.id), CurveKind::LineThroughP1, [p.id.as_str()]))
        .collect();
    Configuration::new(BaseSurface::P2, points, curves).unwrap()
}

fn no_errors(c: &Configuration) -> bool {
    c.validate().iter().all(|v| v.severity != Severity::Error)
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn ids(k: usize) -> Vec<PointId> {
    (0..k).map(|i| PointId::new(format!("p{i}"))).collect()
}

fn hirzebruch_class() -> impl Strategy<Value = NsClass> {
    (rational(), rational(), prop::collection::vec(rational(), 0..6)).prop_map(|(a, b, ms)| {
        let mut c = NsClass::hirzebruch(a, b);
        for (id, m) in ids(ms.len()).into_iter().zip(ms) {
            c = c.checked_add(&NsClass::exceptional(Basis::Hirzebruch, id).scale(&m)).unwrap();
        }
        c
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn chain_length_is_level_plus_one(seed in any::<u64>(), n in 1usize..12, roots in 1usize..4, sat in any::<bool>()) {
        let c = with_root_fibers(random_forest(&mut rng(seed), n.max(roots), roots, sat));
        for p in c.points() {
            prop_assert_eq!(c.chain_below(&p.id).unwrap().len(), c.level(&p.id).unwrap() + 1);
        }
    }

    #[test]
    fn generated_configurations_are_valid(seed in any::<u64>(), n in 1usize..12, roots in 1usize..4, sat in any::<bool>()) {
        let c = with_root_fibers(random_forest(&mut rng(seed), n.max(roots), roots, sat));
        prop_assert!(no_errors(&c), "{:?}", c.validate());
        let plane = random_plane(seed, n.max(roots), roots, sat);
        prop_assert!(no_errors(&plane), "{:?}", plane.validate());
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), n in 1usize..12, roots in 1usize..4, sat in any::<bool>()) {
        let c = with_root_fibers(random_forest(&mut rng(seed), n.max(roots), roots, sat));
        let back = Configuration::from_json(&c.to_json()).unwrap();
        prop_assert!(no_errors(&back));
        prop_assert_eq!(back.to_json(), c.to_json());
        prop_assert_eq!(back, c);
    }

    #[test]
    fn satellite_targets_are_distinct_ancestors(seed in any::<u64>(), n in 1usize..12, roots in 1usize..4) {
        let c = with_root_fibers(random_forest(&mut rng(seed), n.max(roots), roots, true));
        for p in c.points() {
            if let (Some(parent), Some(extra)) = (&p.parent, &p.extra_proximity) {
                prop_assert_ne!(parent, extra);
                let below = c.chain_below(&p.id).unwrap();
                prop_assert!(below.contains(parent) && below.contains(extra));
            }
        }
    }

    #[test]
    fn plane_conversion_keeps_other_proximities(seed in any::<u64>(), n in 2usize..12, roots in 1usize..4, sat in any::<bool>()) {
        let plane = random_plane(seed, n.max(roots), roots, sat);
        let f1 = plane.p2_to_f1().unwrap();
        prop_assert_eq!(f1.len(), plane.len() - 1);
        prop_assert_eq!(f1.base(), BaseSurface::hirzebruch(1));
        let before = Tree::of(plane.points());
        let after = Tree::of(f1.points());
        for a in f1.points() {
            for b in f1.points() {
                let (a, b) = (a.id.as_str(), b.id.as_str());
                prop_assert_eq!(before.is_proximate(a, b), after.is_proximate(a, b), "{} -> {}", a, b);
            }
        }
        prop_assert!(no_errors(&f1), "{:?}", f1.validate());
    }

    #[test]
    fn dot_export_is_deterministic(seed in any::<u64>(), n in 1usize..12) {
        let c = with_root_fibers(random_forest(&mut rng(seed), n, 1, true));
        prop_assert_eq!(c.export_dot(), c.clone().export_dot());
    }

    #[test]
    fn intersection_is_symmetric_and_bilinear(
        u in hirzebruch_class(), v in hirzebruch_class(), w in hirzebruch_class(),
        s in rational(), t in rational(), delta in 0u32..12,
    ) {
        let ctx = PairingContext::hirzebruch(delta);
        prop_assert_eq!(intersect(&u, &v, ctx).unwrap(), intersect(&v, &u, ctx).unwrap());
        let combo = u.scale(&s).checked_add(&v.scale(&t)).unwrap();
        let lhs = intersect(&combo, &w, ctx).unwrap();
        let rhs = &s * intersect(&u, &w, ctx).unwrap() + &t * intersect(&v, &w, ctx).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn self_intersection_transports(u in hirzebruch_class(), d1 in 0u32..30, d2 in 0u32..30) {
        let s1 = self_intersection(&u, PairingContext::hirzebruch(d1)).unwrap();
        let s2 = self_intersection(&u, PairingContext::hirzebruch(d2)).unwrap();
        let b = &u.b;
        prop_assert_eq!(&s2 - &s1, b * b * q(i64::from(d2) - i64::from(d1)));
        prop_assert_eq!(transport_self_intersection(&s1, b, d1.into(), d2.into()), s2);
    }

    #[test]
    fn exceptional_square_counts_proximate_points(seed in any::<u64>(), n in 1usize..12, roots in 1usize..4) {
        let points = random_forest(&mut rng(seed), n.max(roots), roots, true);
        let tree = Tree::of(&points);
        let c = with_root_fibers(points);
        for p in c.points() {
            let proximate = c.points().iter().filter(|x| tree.is_proximate(x.id.as_str(), p.id.as_str())).count();
            let class = class_of_exceptional_strict(&c, &p.id).unwrap();
            let square = self_intersection(&class, PairingContext::hirzebruch(3)).unwrap();
            prop_assert_eq!(square, q(-1 - proximate as i64));
        }
    }

    #[test]
    fn ceil_star_bounds(n in -50i64..50, d in 1i64..10) {
        let x = BigRational::new(BigInt::from(n), BigInt::from(d));
        let c = BigRational::from_integer(ceil_star(&x));
        prop_assert!(c >= x && c >= BigRational::one());
        prop_assert!(&c - BigRational::one() < x || c == BigRational::one());
        if n >= 1 {
            prop_assert_eq!(ceil_star(&q(n)), BigInt::from(n));
        }
    }

    #[test]
    fn curvettes_satisfy_proximity_equalities(seed in any::<u64>(), n in 1usize..10) {
        let points = random_forest(&mut rng(seed), n, 1, true);
        let tree = Tree::of(&points);
        let c = with_root_fibers(points);
        for qid in c.maximal_points() {
            let data = formulas::curvette(&c, &qid).unwrap();
            let mults: BTreeMap<String, BigInt> =
                data.multiplicities.iter().map(|(p, m)| (p.to_string(), m.clone())).collect();
            prop_assert!(common::proximity_equalities_hold(&tree, qid.as_str(), &mults).is_ok());
        }
    }

    #[test]
    fn delta_set_bound_grows_with_epsilon(a in 1i64..20, b in 1i64..20, c in 1i64..20, d in 1i64..20) {
        let (e1, e2) = (BigRational::new(a.into(), b.into()), BigRational::new(c.into(), d.into()));
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let fig = fixtures::fig1();
        let at = |e: &BigRational| bounds::wbnc_bound_delta_set(&fig, 3, e).unwrap().value;
        prop_assert!(at(&lo) <= at(&hi));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn dual_rays_pair_nonnegatively(seed in any::<u64>(), dim in 2usize..6, extra in 0usize..5) {
        let mut r = rng(seed);
        let rays: Vec<Vec<BigInt>> = (0..dim + extra)
            .map(|_| (0..dim).map(|_| BigInt::from(rand::Rng::gen_range(&mut r, -5i64..=5))).collect())
            .collect();
        prop_assume!(rays.iter().all(|v| v.iter().any(|x| x.sign() != num_bigint::Sign::NoSign)));
        prop_assume!(common::rank(&rays) == dim);
        let k = RationalCone::from_integer_rays(Pairing::standard(dim), rays).unwrap();
        let dual = dual_cone(&k).unwrap();
        for v in dual.rays() {
            prop_assert!(k.dual_contains(v));
        }
        let again = dual_cone(&k).unwrap();
        prop_assert_eq!(again.rays(), dual.rays());
    }

    #[test]
    fn threshold_is_consistent(seed in any::<u64>(), n in 1usize..7, roots in 1usize..3, sat in any::<bool>()) {
        let c = with_root_fibers(random_forest(&mut rng(seed), n.max(roots), roots, sat));
        let a = cone::min_delta_threshold(&c).unwrap();
        for delta in 1..a {
            prop_assert!(!cone::criterion_holds(&c, delta).unwrap());
        }
        for delta in a..=a + 5 {
            prop_assert!(cone::criterion_holds(&c, delta).unwrap());
        }
    }

    #[test]
    fn closed_forms_agree_with_cone(seed in any::<u64>(), n in 1usize..8, roots in 1usize..3, sat in any::<bool>()) {
        let c = with_root_fibers(random_forest(&mut rng(seed), n.max(roots), roots, sat));
        if let Ok((_, closed)) = formulas::closed_form(&c) {
            prop_assert_eq!(formulas::compute_a(&c, Method::Cone).unwrap().a, closed);
        }
    }

    #[test]
    fn report_respects_regimes(seed in any::<u64>(), n in 1usize..6, delta in 1u32..10) {
        let c = with_root_fibers(random_forest(&mut rng(seed), n, 1, true));
        let a = formulas::compute_a(&c, Method::Auto).unwrap().a;
        let report = bounds::full_report(&c, Some(delta), Some(&q(1))).unwrap();
        let absolute = report.bounds.iter().any(|b| b.kind == BoundKind::Absolute);
        prop_assert_eq!(absolute, delta >= a);
        prop_assert_eq!(report.omega.is_some(), delta < a);
    }

    #[test]
    fn plane_bound_matches_hirzebruch_omega(seed in any::<u64>(), n in 2usize..7, sat in any::<bool>()) {
        let plane = random_plane(seed, n, 1, sat);
        let a = formulas::compute_a(&plane, Method::Auto).unwrap().a;
        let plane_value = bounds::wbnc_bound_p2(&plane).unwrap()[0].value.clone();
        prop_assert_eq!(&plane_value, &q(1 - i64::from(a)));
        if a > 1 {
            let omega = bounds::omega(&plane.p2_to_f1().unwrap(), 1).unwrap().value;
            prop_assert_eq!(plane_value, q(-i64::from(omega)));
        }
    }
}

#[test]
fn gram_matrices_are_unimodular() {
    for points in 0..8 {
        for delta in 0..20 {
            let det = common::determinant(&gram_matrix(PairingContext::hirzebruch(delta), points));
            assert_eq!(det.abs(), BigRational::one(), "delta={delta} points={points}");
        }
        let det = common::determinant(&gram_matrix(PairingContext::p2(), points));
        assert_eq!(det.abs(), BigRational::one());
    }
}

#[test]
fn plane_family_beta_and_comparison() {
    for r in 3..=10 {
        for n in 1..=6 {
            let c = fixtures::fig3(r, n);
            assert_eq!(bounds::beta(&c).unwrap(), -1 - i64::from(n));
            let (ri, ni) = (i64::from(r), i64::from(n));
            let quarter = (ri - 2 + 3) / 4;
            let prior = fixtures::prior_bound_fig3(r, n);
            assert_eq!(prior, -ni * quarter - 2 * ni + 1);
            // The earlier bound is strictly worse exactly when n (ceil((r-2)/4) + 2) > r - 1.
            assert_eq!(prior < 2 - ri, ni * (quarter + 2) > ri - 1, "r={r} n={n}");
            if n >= 3 {
                assert!(prior < 2 - ri, "r={r} n={n}");
            }
        }
    }
}

#[test]
fn free_chains_have_unit_multiplicities() {
    for seed in 0..50 {
        let c = with_root_fibers(random_chain(&mut rng(seed), 1 + (seed as usize % 8), false));
        for qid in c.maximal_points() {
            let data = formulas::curvette(&c, &qid).unwrap();
            assert!(data.multiplicities.iter().all(|(_, m)| m == &BigInt::one()));
        }
    }
}
