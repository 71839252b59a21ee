//! Random configurations and independent oracles shared by the property and
//! acceptance suites. Nothing here calls into the code it checks.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use wbnc_core::config::{BaseSurface, Configuration, CurveDecoration, CurveKind, Point};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `n` points named `p0..`, the first `roots` of level 0. Each later point
/// picks an earlier parent; with `satellites`, it may also be proximate to
/// a point its parent is proximate to.
pub fn random_forest(rng: &mut ChaCha8Rng, n: usize, roots: usize, satellites: bool) -> Vec<Point> {
    let mut points: Vec<Point> = (0..roots).map(|i| Point::root(format!("p{i}"))).collect();
    for i in roots..n {
        let parent = rng.gen_range(0..i);
        let p = &points[parent];
        let targets: Vec<String> = p
            .parent
            .iter()
            .chain(p.extra_proximity.iter())
            .map(|t| t.as_str().to_string())
            .collect();
        let id = format!("p{i}");
        let parent_id = points[parent].id.as_str().to_string();
        // A pair of exceptional curves meets once.
        let targets: Vec<String> = targets
            .into_iter()
            .filter(|t| {
                !points.iter().any(|o| {
                    o.parent.as_ref().map(|x| x.as_str()) == Some(parent_id.as_str())
                        && o.extra_proximity.as_ref().map(|x| x.as_str()) == Some(t.as_str())
                })
            })
            .collect();
        if satellites && !targets.is_empty() && rng.gen_bool(0.4) {
            let extra = &targets[rng.gen_range(0..targets.len())];
            points.push(Point::satellite(id, parent_id, extra.clone()));
        } else {
            points.push(Point::free(id, parent_id));
        }
    }
    points
}

/// A single chain `p0 <- p1 <- ...` with random satellites.
pub fn random_chain(rng: &mut ChaCha8Rng, n: usize, satellites: bool) -> Vec<Point> {
    let mut points = vec![Point::root("p0")];
    for i in 1..n {
        let p = &points[i - 1];
        let targets: Vec<String> =
            p.parent.iter().chain(p.extra_proximity.iter()).map(|t| t.as_str().to_string()).collect();
        let (id, parent) = (format!("p{i}"), format!("p{}", i - 1));
        if satellites && !targets.is_empty() && rng.gen_bool(0.5) {
            let extra = targets[rng.gen_range(0..targets.len())].clone();
            points.push(Point::satellite(id, parent, extra));
        } else {
            points.push(Point::free(id, parent));
        }
    }
    points
}

/// Symbolic base with one single-point fiber per root and no special section.
pub fn with_root_fibers(points: Vec<Point>) -> Configuration {
    let curves = points
        .iter()
        .filter(|p| p.parent.is_none())
        .map(|p| CurveDecoration::new(format!("F_{}", p.id), CurveKind::Fiber, [p.id.as_str()]))
        .collect();
    Configuration::new(BaseSurface::symbolic(), points, curves).expect("generated references resolve")
}

pub struct Tree {
    pub parent: BTreeMap<String, Option<String>>,
    pub extra: BTreeMap<String, Option<String>>,
}

impl Tree {
    pub fn of(points: &[Point]) -> Self {
        Tree {
            parent: points.iter().map(|p| (p.id.to_string(), p.parent.as_ref().map(|x| x.to_string()))).collect(),
            extra: points.iter().map(|p| (p.id.to_string(), p.extra_proximity.as_ref().map(|x| x.to_string()))).collect(),
        }
    }

    pub fn chain(&self, q: &str) -> Vec<String> {
        let mut out = vec![q.to_string()];
        while let Some(Some(p)) = self.parent.get(out.last().unwrap()) {
            out.push(p.clone());
        }
        out.reverse();
        out
    }

    pub fn maximal(&self) -> Vec<String> {
        let parents: BTreeSet<&String> = self.parent.values().flatten().collect();
        self.parent.keys().filter(|p| !parents.contains(p)).cloned().collect()
    }

    pub fn is_proximate(&self, a: &str, b: &str) -> bool {
        self.parent[a].as_deref() == Some(b) || self.extra[a].as_deref() == Some(b)
    }
}

/// Every proximity equality `m_p = sum of m_{p'}` over chain points `p'`
/// proximate to `p`, for `p` below `q`.
pub fn proximity_equalities_hold(tree: &Tree, q: &str, mults: &BTreeMap<String, BigInt>) -> Result<(), String> {
    let chain = tree.chain(q);
    if mults.keys().cloned().collect::<BTreeSet<_>>() != chain.iter().cloned().collect::<BTreeSet<_>>() {
        return Err(format!("multiplicities {mults:?} do not cover the chain {chain:?}"));
    }
    if mults[q] != BigInt::one() {
        return Err(format!("m_q = {}", mults[q]));
    }
    for p in chain.iter().filter(|p| *p != q) {
        let sum: BigInt = chain.iter().filter(|x| tree.is_proximate(x, p)).map(|x| mults[x].clone()).sum();
        if sum != mults[p] {
            return Err(format!("at {p}: m = {} but the proximate sum is {sum}", mults[p]));
        }
    }
    Ok(())
}

/// Maximum over all subsets of maximal points whose chains are pairwise
/// disjoint and start at distinct roots of the total chain length.
pub fn brute_force_free_fibers(tree: &Tree) -> usize {
    let maximal = tree.maximal();
    let chains: Vec<Vec<String>> = maximal.iter().map(|q| tree.chain(q)).collect();
    let mut best = 0;
    for mask in 1u32..(1 << chains.len()) {
        let picked: Vec<&Vec<String>> = (0..chains.len()).filter(|i| mask >> i & 1 == 1).map(|i| &chains[i]).collect();
        let mut seen = BTreeSet::new();
        let mut roots = BTreeSet::new();
        let ok = picked.iter().all(|c| roots.insert(c[0].clone()) && c.iter().all(|p| seen.insert(p.clone())));
        if ok {
            best = best.max(picked.iter().map(|c| c.len()).sum());
        }
    }
    best
}

/// Row reduction over the rationals; returns the rank and the reduced rows.
pub fn row_reduce(mut m: Vec<Vec<BigRational>>) -> (usize, Vec<Vec<BigRational>>) {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, pivot);
        let lead = m[rank][col].clone();
        for x in m[rank].iter_mut() {
            *x = &*x / &lead;
        }
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                let pivot_row = m[rank].clone();
                for (x, y) in m[r].iter_mut().zip(pivot_row) {
                    *x = &*x - &factor * y;
                }
            }
        }
        rank += 1;
    }
    (rank, m)
}

pub fn rank(rows: &[Vec<BigInt>]) -> usize {
    row_reduce(rows.iter().map(|r| r.iter().cloned().map(BigRational::from_integer).collect()).collect()).0
}

/// Determinant by Gaussian elimination over the rationals.
pub fn determinant(m: &[Vec<i64>]) -> BigRational {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else { return BigRational::zero() };
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col].clone();
        for r in col + 1..n {
            let factor = &a[r][col] / &a[col][col];
            let pivot_row = a[col].clone();
            for (x, y) in a[r].iter_mut().zip(pivot_row) {
                *x = &*x - &factor * y;
            }
        }
    }
    det
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return v;
    }
    v.into_iter().map(|x| x / &g).collect()
}

/// Kernel of a `(d-1) x d` integer matrix of rank `d-1`, by signed minors.
fn kernel_by_minors(rows: &[&Vec<BigInt>], d: usize) -> Vec<BigInt> {
    (0..d)
        .map(|j| {
            let minor: Vec<Vec<i64>> = rows
                .iter()
                .map(|r| (0..d).filter(|&k| k != j).map(|k| i64::try_from(&r[k]).unwrap()).collect())
                .collect();
            let det = determinant(&minor).to_integer();
            if j % 2 == 0 {
                det
            } else {
                -det
            }
        })
        .collect()
}

/// Extreme rays of `{v : n.v >= 0 for every normal n}` by trying every
/// `(d-1)`-subset of normals as the active set.
pub fn brute_force_extreme_rays(normals: &[Vec<BigInt>], d: usize) -> BTreeSet<Vec<BigInt>> {
    let mut out = BTreeSet::new();
    let mut subset: Vec<usize> = (0..d - 1).collect();
    if normals.len() < d - 1 {
        return out;
    }
    loop {
        let rows: Vec<&Vec<BigInt>> = subset.iter().map(|&i| &normals[i]).collect();
        let k = kernel_by_minors(&rows, d);
        if k.iter().any(|x| !x.is_zero()) {
            for cand in [k.clone(), k.iter().map(|x| -x).collect()] {
                if normals.iter().all(|n| !dot(n, &cand).is_negative()) {
                    out.insert(primitive(cand));
                }
            }
        }
        // Next combination.
        let mut i = d - 1;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if subset[i] < normals.len() - (d - 1 - i) {
                subset[i] += 1;
                for j in i + 1..d - 1 {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Whether `x` is a non-negative combination of `gens`, trying every
/// linearly independent subset (Caratheodory).
pub fn in_cone(x: &[BigInt], gens: &[Vec<BigInt>]) -> bool {
    if x.iter().all(Zero::is_zero) {
        return true;
    }
    let d = x.len();
    let n = gens.len();
    for mask in 1u32..(1 << n) {
        let picked: Vec<&Vec<BigInt>> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| &gens[i]).collect();
        if picked.len() > d {
            continue;
        }
        // Columns are the picked generators, augmented with x.
        let m: Vec<Vec<BigRational>> = (0..d)
            .map(|row| {
                picked
                    .iter()
                    .map(|g| BigRational::from_integer(g[row].clone()))
                    .chain([BigRational::from_integer(x[row].clone())])
                    .collect()
            })
            .collect();
        let (r, reduced) = row_reduce(m);
        let k = picked.len();
        if r != k {
            continue;
        }
        // Consistent with independent columns: the pivots sit in the first k columns.
        let consistent = reduced.iter().skip(k).all(|row| row[k].is_zero());
        let pivots_ok = (0..k).all(|i| reduced[i][i] == BigRational::one());
        if consistent && pivots_ok && (0..k).all(|i| !reduced[i][k].is_negative()) {
            return true;
        }
    }
    false
}
