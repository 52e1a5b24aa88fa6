//! Convex hulls by placing triangulation.
//!
//! Points are scaled to a common integer lattice first, so every orientation
//! test is an integer dot product against a stored facet normal.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exact::linalg::{nullspace, rref, RatVector};
use crate::exact::rational::{common_denominator, from_big};
use crate::exact::Rational;

type IVec = Vec<BigInt>;

/// `normal . x >= offset` (or `=` for equalities).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Halfspace {
    pub normal: Vec<BigInt>,
    pub offset: Rational,
}

impl Halfspace {
    pub fn value(&self, x: &[Rational]) -> Rational {
        self.normal
            .iter()
            .zip(x)
            .map(|(a, b)| b * from_big(a.clone()))
            .sum::<Rational>()
            - &self.offset
    }
}

pub(crate) struct HullData {
    pub vertices: Vec<RatVector>,
    pub inequalities: Vec<Halfspace>,
    pub equalities: Vec<Halfspace>,
    pub intrinsic_dim: usize,
    pub normalized_volume: Rational,
}

pub(crate) fn compute_hull(points: &[RatVector], dim: usize) -> HullData {
    let mut pts: Vec<RatVector> = points.to_vec();
    pts.sort();
    pts.dedup();
    let scale = common_denominator(pts.iter().flatten());
    let scaled: Vec<IVec> = pts
        .iter()
        .map(|p| p.iter().map(|x| (x * from_big(scale.clone())).to_integer()).collect())
        .collect();
    let unscale = |v: &BigInt| Rational::new(v.clone(), scale.clone());

    let base = &scaled[0];
    let diffs: Vec<Vec<Rational>> = scaled[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| from_big(a - b)).collect())
        .collect();
    let mut reduced = diffs.clone();
    let pivots = rref(&mut reduced);
    let k = pivots.len();

    let mut equalities = Vec::new();
    if k < dim {
        for w in nullspace(&diffs, dim) {
            let normal = primitive_rows(&w);
            let offset: BigInt = normal.iter().zip(base).map(|(a, b)| a * b).sum();
            equalities.push(Halfspace { normal, offset: unscale(&offset) });
        }
        equalities.sort();
    }

    if k == 0 {
        return HullData {
            vertices: vec![pts[0].clone()],
            inequalities: Vec::new(),
            equalities,
            intrinsic_dim: 0,
            normalized_volume: Rational::zero(),
        };
    }

    let projected: Vec<IVec> = scaled
        .iter()
        .map(|p| pivots.iter().map(|&j| p[j].clone()).collect())
        .collect();
    let tri = place(&projected, k);

    let mut inequalities: Vec<Halfspace> = tri
        .facets
        .iter()
        .map(|(normal, offset)| {
            let mut lifted = vec![BigInt::zero(); dim];
            for (slot, &j) in pivots.iter().enumerate() {
                lifted[j] = normal[slot].clone();
            }
            Halfspace { normal: lifted, offset: unscale(offset) }
        })
        .collect();
    inequalities.sort();
    inequalities.dedup();

    let mut vertices: Vec<RatVector> = tri.vertices.iter().map(|&i| pts[i].clone()).collect();
    vertices.sort();

    let normalized_volume = if k == dim {
        let mut denom = BigInt::one();
        for _ in 0..dim {
            denom *= &scale;
        }
        Rational::new(tri.volume, denom)
    } else {
        Rational::zero()
    };

    HullData { vertices, inequalities, equalities, intrinsic_dim: k, normalized_volume }
}

fn primitive_rows(w: &[Rational]) -> IVec {
    let den = common_denominator(w.iter());
    let ints: IVec = w.iter().map(|x| (x * from_big(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    ints.into_iter().map(|x| x / &g).collect()
}

trait Int:
    Clone + Ord + Integer + Signed + std::hash::Hash + std::iter::Sum + std::fmt::Debug
{
    fn to_big(&self) -> BigInt;
}

impl Int for i128 {
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Int for BigInt {
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

struct Placed {
    vertices: Vec<usize>,
    facets: Vec<(IVec, BigInt)>,
    volume: BigInt,
}

/// Picks machine integers when a Hadamard bound rules out overflow in the
/// Bareiss products.
fn place(points: &[IVec], k: usize) -> Placed {
    let max = points
        .iter()
        .flatten()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(BigInt::zero);
    let bits = max.bits() as f64 + 1.0;
    let minor_bits = (k as f64) * (bits + 0.5 * (k as f64).log2());
    if 2.0 * minor_bits + 8.0 < 126.0 {
        let small: Vec<Vec<i128>> = points
            .iter()
            .map(|p| p.iter().map(|x| i128::try_from(x).expect("bounded")).collect())
            .collect();
        place_generic(&small, k)
    } else {
        place_generic(points, k)
    }
}

struct BoundaryFacet<T> {
    normal: Vec<T>,
    offset: T,
    // gcd divided out of the cofactor normal
    content: T,
}

fn dot<T: Int>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| x.clone() * y.clone()).sum()
}

fn det<T: Int>(mut m: Vec<Vec<T>>) -> T {
    // Bareiss fraction-free elimination
    let n = m.len();
    if n == 0 {
        return T::one();
    }
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    negate = !negate;
                }
                None => return T::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (m[i][j].clone() * m[k][k].clone() - m[i][k].clone() * m[k][j].clone()) / prev.clone();
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Hyperplane through the facet points, normal oriented toward `inside`.
fn facet_normal<T: Int>(points: &[Vec<T>], facet: &[usize], inside: &[T]) -> BoundaryFacet<T> {
    let k = inside.len();
    let f0 = &points[facet[0]];
    let rows: Vec<Vec<T>> = facet[1..]
        .iter()
        .map(|&i| points[i].iter().zip(f0).map(|(a, b)| a.clone() - b.clone()).collect())
        .collect();
    let mut normal: Vec<T> = (0..k)
        .map(|j| {
            let mut m = rows.clone();
            let mut e = vec![T::zero(); k];
            e[j] = T::one();
            m.push(e);
            det(m)
        })
        .collect();
    let content = normal.iter().fold(T::zero(), |g, x| g.gcd(x));
    for x in normal.iter_mut() {
        *x = x.clone() / content.clone();
    }
    let mut offset = dot(&normal, f0);
    if dot(&normal, inside) < offset {
        for x in normal.iter_mut() {
            *x = -x.clone();
        }
        offset = -offset;
    }
    BoundaryFacet { normal, offset, content }
}

fn place_generic<T: Int>(points: &[Vec<T>], k: usize) -> Placed {
    // initial simplex: greedy affinely independent subset in input order
    let mut simplex = vec![0usize];
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for (i, p) in points.iter().enumerate().skip(1) {
        if simplex.len() == k + 1 {
            break;
        }
        let mut trial = rows.clone();
        trial.push(p.iter().zip(&points[0]).map(|(a, b)| from_big((a.clone() - b.clone()).to_big())).collect());
        let mut r = trial.clone();
        if rref(&mut r).len() == trial.len() {
            rows = trial;
            simplex.push(i);
        }
    }
    debug_assert_eq!(simplex.len(), k + 1);

    let mut used: BTreeSet<usize> = simplex.iter().copied().collect();
    let mut boundary: HashMap<Vec<usize>, BoundaryFacet<T>> = HashMap::new();
    for skip in 0..=k {
        let facet: Vec<usize> = simplex
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != skip)
            .map(|(_, &v)| v)
            .collect();
        let bf = facet_normal(points, &facet, &points[simplex[skip]]);
        boundary.insert(facet, bf);
    }
    let simplex_rows: Vec<Vec<T>> = simplex[1..]
        .iter()
        .map(|&i| points[i].iter().zip(&points[simplex[0]]).map(|(a, b)| a.clone() - b.clone()).collect())
        .collect();
    let mut volume = det(simplex_rows).abs().to_big();

    for (q, point) in points.iter().enumerate() {
        if used.contains(&q) {
            continue;
        }
        let mut visible: Vec<Vec<usize>> = boundary
            .iter()
            .filter(|(_, bf)| dot(&bf.normal, point) < bf.offset)
            .map(|(f, _)| f.clone())
            .collect();
        if visible.is_empty() {
            continue;
        }
        used.insert(q);
        visible.sort();
        for f in visible {
            let bf = boundary.remove(&f).expect("visible facet on boundary");
            // |det(facet, q)| = content * lattice height
            let height = bf.offset.clone() - dot(&bf.normal, point);
            volume += (height * bf.content.clone()).to_big();
            for drop in 0..f.len() {
                let mut g: Vec<usize> = f
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != drop)
                    .map(|(_, &v)| v)
                    .collect();
                g.push(q);
                g.sort();
                if boundary.remove(&g).is_none() {
                    let bf = facet_normal(points, &g, &points[f[drop]]);
                    boundary.insert(g, bf);
                }
            }
        }
    }

    let mut facets: Vec<(Vec<T>, T)> = boundary
        .into_values()
        .map(|bf| (bf.normal, bf.offset))
        .collect();
    facets.sort();
    facets.dedup();

    let vertices = used
        .into_iter()
        .filter(|&i| {
            let tight: Vec<Vec<Rational>> = facets
                .iter()
                .filter(|(n, o)| &dot(n, &points[i]) == o)
                .map(|(n, _)| n.iter().map(|x| from_big(x.to_big())).collect())
                .collect();
            if tight.len() < k {
                return false;
            }
            let mut m = tight;
            rref(&mut m).len() == k
        })
        .collect();
    let facets = facets
        .into_iter()
        .map(|(n, o)| (n.iter().map(Int::to_big).collect(), o.to_big()))
        .collect();
    Placed { vertices, facets, volume }
}
