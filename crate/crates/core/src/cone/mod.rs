//! Rational polyhedral cones in the Néron-Severi lattice, their duals under
//! a symmetric pairing, and the threshold `delta` above which every dual
//! extreme ray has non-negative self-intersection.

mod dd;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::config::{BaseSurface, ConfigError, Configuration, CurveKind};
use crate::lattice::{
    class_of_exceptional_strict, class_of_fiber_strict, class_of_section_chain, gram_matrix, pair_coords, LatticeError,
    NsClass, PairingContext,
};

/// Environment variable consulted for the scan cap when none is given.
pub const MAX_DELTA_ENV: &str = "WBNC_MAX_DELTA";

/// Number of `delta` values past the threshold that must also pass.
pub const CONSISTENCY_WINDOW: u32 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConeError {
    #[error("ray of length {got} in a cone of dimension {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("the zero vector is not a ray")]
    ZeroRay,
    #[error("generators span only a rank-{rank} sublattice of dimension {dim}")]
    NonSpanning { rank: usize, dim: usize },
    #[error("the threshold search needs a Hirzebruch configuration")]
    NotHirzebruch,
    #[error("curve `{0}` belongs to an F_0 ruling; pick a ruling before computing thresholds")]
    NeedsRulingChoice(String),
    #[error("no delta up to the cap {cap} makes every dual extreme ray non-negative")]
    CapExceeded { cap: u32 },
    #[error("the criterion holds at delta={threshold} but fails at delta={failed}")]
    NotMonotone { threshold: u32, failed: u32 },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// A symmetric integer bilinear form, given by its Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairing {
    gram: Vec<Vec<i64>>,
    context: Option<PairingContext>,
}

impl Pairing {
    /// The standard dot product.
    pub fn standard(dim: usize) -> Self {
        let gram = (0..dim).map(|i| (0..dim).map(|j| i64::from(i == j)).collect()).collect();
        Pairing { gram, context: None }
    }

    /// The intersection form on the blowup at `points` points.
    pub fn intersection(ctx: PairingContext, points: usize) -> Self {
        Pairing { gram: gram_matrix(ctx, points), context: Some(ctx) }
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn context(&self) -> Option<PairingContext> {
        self.context
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn pair(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        pair_coords(&self.gram, x, y)
    }

    /// `G x`, so that `pair(x, y) = apply(x) . y`.
    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.gram
            .iter()
            .map(|row| {
                row.iter()
                    .zip(x)
                    .filter(|(g, v)| **g != 0 && !v.is_zero())
                    .map(|(g, v)| v * *g)
                    .sum()
            })
            .collect()
    }
}

/// A cone given by generators. Rays are primitive integer vectors, sorted
/// and deduplicated, in the coordinate order of the pairing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalCone {
    ambient_dim: usize,
    rays: Vec<Vec<BigInt>>,
    pairing: Pairing,
}

/// Smallest positive multiple of `v` with integer entries and gcd 1.
pub fn canonical_ray(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let scale = BigRational::from_integer(lcm);
    dd::primitive(v.iter().map(|x| (x * &scale).to_integer()).collect())
}

impl RationalCone {
    pub fn new(pairing: Pairing, rays: &[Vec<BigRational>]) -> Result<Self, ConeError> {
        let ambient_dim = pairing.dim();
        let mut out = Vec::with_capacity(rays.len());
        for ray in rays {
            if ray.len() != ambient_dim {
                return Err(ConeError::WrongLength { expected: ambient_dim, got: ray.len() });
            }
            if ray.iter().all(Zero::is_zero) {
                return Err(ConeError::ZeroRay);
            }
            out.push(canonical_ray(ray));
        }
        Ok(Self::from_canonical(pairing, out))
    }

    pub fn from_integer_rays(pairing: Pairing, rays: Vec<Vec<BigInt>>) -> Result<Self, ConeError> {
        let rational: Vec<Vec<BigRational>> =
            rays.into_iter().map(|r| r.into_iter().map(BigRational::from_integer).collect()).collect();
        Self::new(pairing, &rational)
    }

    fn from_canonical(pairing: Pairing, mut rays: Vec<Vec<BigInt>>) -> Self {
        rays.sort();
        rays.dedup();
        RationalCone { ambient_dim: pairing.dim(), rays, pairing }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rays(&self) -> &[Vec<BigInt>] {
        &self.rays
    }

    pub fn pairing(&self) -> &Pairing {
        &self.pairing
    }

    /// Whether `v` pairs non-negatively with every generator.
    pub fn dual_contains(&self, v: &[BigInt]) -> bool {
        self.rays.iter().all(|s| !self.pairing.pair(v, s).is_negative())
    }

    pub fn self_pairings(&self) -> Vec<BigInt> {
        self.rays.iter().map(|r| self.pairing.pair(r, r)).collect()
    }
}

/// Extreme rays of `{v : <v, s> >= 0 for every generator s of k}`.
pub fn dual_cone(k: &RationalCone) -> Result<RationalCone, ConeError> {
    let normals: Vec<Vec<BigInt>> = k.rays.iter().map(|s| k.pairing.apply(s)).collect();
    let rays = dd::extreme_rays(&normals, k.ambient_dim).map_err(|e| match e {
        dd::DdError::NonSpanning { rank, dim } => ConeError::NonSpanning { rank, dim },
    })?;
    Ok(RationalCone::from_canonical(k.pairing.clone(), rays))
}

fn integer_coords(class: &NsClass, c: &Configuration) -> Vec<BigInt> {
    class.to_coords(c).into_iter().map(|x| x.to_integer()).collect()
}

/// Rejects configurations whose decorations are not fibers plus at most one
/// special section.
fn check_hirzebruch_shape(c: &Configuration) -> Result<(), ConeError> {
    if c.base().is_p2() {
        return Err(ConeError::NotHirzebruch);
    }
    if let Some(cv) = c.curves().iter().find(|cv| !matches!(cv.kind, CurveKind::Fiber | CurveKind::SpecialSection)) {
        return Err(ConeError::NeedsRulingChoice(cv.name.clone()));
    }
    Ok(())
}

/// Generators of the effective cone once `delta` is past the threshold: the
/// strict transforms of every exceptional divisor, every decorated fiber and
/// the special section. Without a special-section decoration the section
/// passes through no point.
pub fn effective_generators(c: &Configuration, ctx: PairingContext) -> Result<RationalCone, ConeError> {
    check_hirzebruch_shape(c)?;
    if ctx.base().is_p2() {
        return Err(ConeError::NotHirzebruch);
    }
    c.ensure_valid()?;
    let mut rays = Vec::with_capacity(c.len() + c.curves().len() + 1);
    for p in c.points() {
        rays.push(integer_coords(&class_of_exceptional_strict(c, &p.id)?, c));
    }
    for f in c.curves_of_kind(CurveKind::Fiber) {
        rays.push(integer_coords(&class_of_fiber_strict(c, f)?, c));
    }
    let chain = c.special_section().map(|s| s.points.clone()).unwrap_or_default();
    rays.push(integer_coords(&class_of_section_chain(&chain, ctx)?, c));
    RationalCone::from_integer_rays(Pairing::intersection(ctx, c.len()), rays)
}

/// Whether every extreme ray of the dual of the generator cone at `delta`
/// has non-negative self-intersection.
pub fn criterion_holds(c: &Configuration, delta: u32) -> Result<bool, ConeError> {
    let generators = effective_generators(c, PairingContext::hirzebruch(delta))?;
    let dual = dual_cone(&generators)?;
    Ok(dual.self_pairings().iter().all(|s| !s.is_negative()))
}

/// `10 N + 10` for `N` points.
pub fn default_cap(c: &Configuration) -> u32 {
    u32::try_from(c.len()).unwrap_or(u32::MAX / 20).saturating_mul(10).saturating_add(10)
}

/// Cap from `WBNC_MAX_DELTA` when set and numeric, else [`default_cap`].
pub fn cap_from_env(c: &Configuration) -> u32 {
    std::env::var(MAX_DELTA_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or_else(|| default_cap(c))
}

/// Least `delta >= 1` meeting [`criterion_holds`], scanning upward. The
/// next [`CONSISTENCY_WINDOW`] values must pass as well.
pub fn min_delta_threshold(c: &Configuration) -> Result<u32, ConeError> {
    min_delta_threshold_with_cap(c, default_cap(c))
}

pub fn min_delta_threshold_with_cap(c: &Configuration, cap: u32) -> Result<u32, ConeError> {
    check_hirzebruch_shape(c)?;
    c.ensure_valid()?;
    let symbolic = c.with_base(BaseSurface::symbolic());
    let mut threshold = None;
    for delta in 1..=cap {
        if criterion_holds(&symbolic, delta)? {
            threshold = Some(delta);
            break;
        }
    }
    let threshold = threshold.ok_or(ConeError::CapExceeded { cap })?;
    for delta in threshold + 1..=threshold + CONSISTENCY_WINDOW {
        if !criterion_holds(&symbolic, delta)? {
            return Err(ConeError::NotMonotone { threshold, failed: delta });
        }
    }
    Ok(threshold)
}
