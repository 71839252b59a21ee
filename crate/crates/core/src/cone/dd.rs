//! Double description: extreme rays of `{x : a_i . x >= 0}` for integer
//! normals `a_i` spanning the ambient space.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Bitset over constraint indices.
#[derive(Debug, Clone, PartialEq, Eq)]
struct ZeroSet(Vec<u64>);

impl ZeroSet {
    fn new(len: usize) -> Self {
        ZeroSet(vec![0; len.div_ceil(64)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1u64 << (i % 64);
    }

    fn intersection(&self, other: &ZeroSet) -> ZeroSet {
        ZeroSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_subset_of(&self, other: &ZeroSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

struct Ray {
    v: Vec<BigInt>,
    zeros: ZeroSet,
}

pub(crate) fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum()
}

/// Divides by the gcd of the entries; the zero vector is returned unchanged.
pub(crate) fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in &mut v {
            *x /= &g;
        }
    }
    v
}

/// Indices of a maximal independent subset of `rows`, chosen greedily in order.
pub(crate) fn independent_rows(rows: &[Vec<BigInt>], dim: usize) -> Vec<usize> {
    let mut basis: Vec<(usize, Vec<BigRational>)> = Vec::new();
    let mut chosen = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut r: Vec<BigRational> = row.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        for (pivot, b) in &basis {
            if !r[*pivot].is_zero() {
                let f = &r[*pivot] / &b[*pivot];
                for (x, y) in r.iter_mut().zip(b) {
                    *x -= &f * y;
                }
            }
        }
        if let Some(pivot) = r.iter().position(|x| !x.is_zero()) {
            basis.push((pivot, r));
            chosen.push(i);
            if chosen.len() == dim {
                break;
            }
        }
    }
    chosen
}

/// Columns of the inverse of the square matrix `rows`, each scaled to a
/// primitive integer vector. Column `j` pairs positively with row `j` and
/// to zero with the others.
fn inverse_columns(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let d = rows.len();
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<BigRational> = row.iter().map(|x| BigRational::from_integer(x.clone())).collect();
            r.extend((0..d).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for col in 0..d {
        let pivot = (col..d).find(|&r| !m[r][col].is_zero()).expect("rows are independent");
        m.swap(col, pivot);
        let inv = m[col][col].recip();
        for x in &mut m[col] {
            *x *= &inv;
        }
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    (0..d)
        .map(|j| {
            let col: Vec<BigRational> = (0..d).map(|i| m[i][d + j].clone()).collect();
            let lcm = col.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
            primitive(col.iter().map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer()).collect())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum DdError {
    NonSpanning { rank: usize, dim: usize },
}

/// Extreme rays of `{x : a . x >= 0 for a in normals}`, unsorted. The
/// normals must span `dim`-space so the cone is pointed.
pub(crate) fn extreme_rays(normals: &[Vec<BigInt>], dim: usize) -> Result<Vec<Vec<BigInt>>, DdError> {
    let basis = independent_rows(normals, dim);
    if basis.len() < dim {
        return Err(DdError::NonSpanning { rank: basis.len(), dim });
    }
    let m = normals.len();
    let mut order = basis.clone();
    order.extend((0..m).filter(|i| !basis.contains(i)));

    let basis_rows: Vec<Vec<BigInt>> = basis.iter().map(|&i| normals[i].clone()).collect();
    let mut rays: Vec<Ray> = inverse_columns(&basis_rows)
        .into_iter()
        .enumerate()
        .map(|(j, v)| {
            let mut zeros = ZeroSet::new(m);
            for (k, &row) in basis.iter().enumerate() {
                if k != j {
                    zeros.insert(row);
                }
            }
            Ray { v, zeros }
        })
        .collect();

    for &row in &order[dim..] {
        let a = &normals[row];
        let values: Vec<BigInt> = rays.iter().map(|r| dot(a, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len());
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zeros.intersection(&rays[n].zeros);
                if common.count() + 2 < dim {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .filter(|&r| r != p && r != n)
                    .all(|r| !common.is_subset_of(&rays[r].zeros));
                if !adjacent {
                    continue;
                }
                let vp = &values[p];
                let vn = -&values[n];
                let v: Vec<BigInt> = rays[n].v.iter().zip(&rays[p].v).map(|(xn, xp)| vp * xn + &vn * xp).collect();
                let mut zeros = common;
                zeros.insert(row);
                next.push(Ray { v: primitive(v), zeros });
            }
        }
        for (i, ray) in rays.into_iter().enumerate() {
            if values[i].is_zero() {
                let mut ray = ray;
                ray.zeros.insert(row);
                next.push(ray);
            } else if values[i].is_positive() {
                next.push(ray);
            }
        }
        rays = next;
    }
    Ok(rays.into_iter().map(|r| r.v).collect())
}
