//! Exact rational polytopes: hulls, volumes, Minkowski sums and mixed volumes.

mod hull;
pub mod lp;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TorickError};
use crate::exact::linalg::RatVector;
use crate::exact::rational::{format_rational, from_big, parse_rational};
use crate::exact::Rational;

pub use hull::Halfspace;

/// A bounded convex polytope with both V- and H-representations.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalPolytope {
    ambient_dim: usize,
    vertices: Vec<RatVector>,
    inequalities: Vec<Halfspace>,
    equalities: Vec<Halfspace>,
    intrinsic_dim: usize,
    normalized_volume: Rational,
}

impl RationalPolytope {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Irredundant, sorted lexicographically.
    pub fn vertices(&self) -> &[RatVector] {
        &self.vertices
    }

    /// Facet inequalities `normal . x >= offset` with primitive integer normals.
    pub fn inequalities(&self) -> &[Halfspace] {
        &self.inequalities
    }

    /// Equations of the affine hull (empty when full-dimensional).
    pub fn equalities(&self) -> &[Halfspace] {
        &self.equalities
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.intrinsic_dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.intrinsic_dim == self.ambient_dim
    }

    pub fn num_facets(&self) -> usize {
        self.inequalities.len()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.equalities.iter().all(|h| h.value(x).is_zero())
            && self.inequalities.iter().all(|h| !h.value(x).is_negative())
    }

    pub fn translate(&self, t: &[Rational]) -> RationalPolytope {
        let pts: Vec<RatVector> = self
            .vertices
            .iter()
            .map(|v| v.iter().zip(t).map(|(a, b)| a + b).collect())
            .collect();
        hull_in(&pts, self.ambient_dim)
    }

    pub fn dilate(&self, k: &Rational) -> RationalPolytope {
        let pts: Vec<RatVector> = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|a| a * k).collect())
            .collect();
        hull_in(&pts, self.ambient_dim)
    }

    /// Integer points of the polytope, in lexicographic order.
    pub fn lattice_points(&self) -> Vec<Vec<i64>> {
        let d = self.ambient_dim;
        let mut lo = vec![i64::MAX; d];
        let mut hi = vec![i64::MIN; d];
        for v in &self.vertices {
            for j in 0..d {
                let f: i64 = v[j].floor().to_integer().try_into().unwrap_or(i64::MIN);
                let c: i64 = v[j].ceil().to_integer().try_into().unwrap_or(i64::MAX);
                lo[j] = lo[j].min(f);
                hi[j] = hi[j].max(c);
            }
        }
        if d == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        let mut cur = lo.clone();
        loop {
            let x: RatVector = cur.iter().map(|&c| Rational::from_integer(c.into())).collect();
            if self.contains(&x) {
                out.push(cur.clone());
            }
            let mut j = d;
            loop {
                if j == 0 {
                    return out;
                }
                j -= 1;
                if cur[j] < hi[j] {
                    cur[j] += 1;
                    for (c, l) in cur.iter_mut().zip(&lo).skip(j + 1) {
                        *c = *l;
                    }
                    break;
                }
            }
        }
    }
}

fn hull_in(points: &[RatVector], dim: usize) -> RationalPolytope {
    let data = hull::compute_hull(points, dim);
    RationalPolytope {
        ambient_dim: dim,
        vertices: data.vertices,
        inequalities: data.inequalities,
        equalities: data.equalities,
        intrinsic_dim: data.intrinsic_dim,
        normalized_volume: data.normalized_volume,
    }
}

/// Convex hull of a nonempty point set.
pub fn hull(points: &[RatVector]) -> Result<RationalPolytope> {
    let first = points
        .first()
        .ok_or_else(|| TorickError::InvalidArgument("hull of an empty point set".into()))?;
    let dim = first.len();
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(TorickError::DimensionMismatch { expected: dim, got: p.len() });
    }
    Ok(hull_in(points, dim))
}

pub fn hull_int(points: &[Vec<i64>]) -> Result<RationalPolytope> {
    let pts: Vec<RatVector> = points
        .iter()
        .map(|p| p.iter().map(|&x| Rational::from_integer(x.into())).collect())
        .collect();
    hull(&pts)
}

/// `n! * vol(P)`; zero for lower-dimensional polytopes.
pub fn normalized_volume(p: &RationalPolytope) -> Rational {
    p.normalized_volume.clone()
}

pub fn minkowski_sum(p: &RationalPolytope, q: &RationalPolytope) -> Result<RationalPolytope> {
    if p.ambient_dim != q.ambient_dim {
        return Err(TorickError::DimensionMismatch { expected: p.ambient_dim, got: q.ambient_dim });
    }
    let mut pts = Vec::with_capacity(p.vertices.len() * q.vertices.len());
    for a in &p.vertices {
        for b in &q.vertices {
            pts.push(a.iter().zip(b).map(|(x, y)| x + y).collect());
        }
    }
    Ok(hull_in(&pts, p.ambient_dim))
}

/// `(1/n!) * sum over nonempty S of (-1)^(n-|S|) * f(S)`, with `S` passed as a bitmask.
///
/// With `f(S) = normalized_volume(sum of P_i, i in S)` this is the mixed volume
/// normalized so that the diagonal value is `normalized_volume(P)`.
pub fn inclusion_exclusion(
    n: usize,
    mut f: impl FnMut(u32) -> Result<Rational>,
) -> Result<Rational> {
    if n == 0 {
        return Ok(Rational::one());
    }
    let mut total = Rational::zero();
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        let term = f(mask)?;
        if (n - size).is_multiple_of(2) {
            total += term;
        } else {
            total -= term;
        }
    }
    let mut fact = BigInt::one();
    for k in 2..=n {
        fact *= BigInt::from(k);
    }
    Ok(total / from_big(fact))
}

pub fn mixed_intersection(polytopes: &[RationalPolytope]) -> Result<Rational> {
    let n = polytopes.len();
    if let Some(p) = polytopes.iter().find(|p| p.ambient_dim != n) {
        return Err(TorickError::DimensionMismatch { expected: n, got: p.ambient_dim });
    }
    if n == 0 {
        return Ok(Rational::one());
    }
    let mut sums: Vec<Option<RationalPolytope>> = vec![None; 1 << n];
    for mask in 1usize..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let s = if rest == 0 {
            polytopes[low].clone()
        } else {
            minkowski_sum(sums[rest].as_ref().expect("smaller subsets first"), &polytopes[low])?
        };
        sums[mask] = Some(s);
    }
    inclusion_exclusion(n, |mask| Ok(normalized_volume(sums[mask as usize].as_ref().unwrap())))
}

#[derive(Serialize, Deserialize)]
struct PolytopeWire {
    dim: usize,
    vertices: Vec<Vec<String>>,
}

impl Serialize for RationalPolytope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolytopeWire {
            dim: self.ambient_dim,
            vertices: self
                .vertices
                .iter()
                .map(|v| v.iter().map(format_rational).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalPolytope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let wire = PolytopeWire::deserialize(d)?;
        let pts: Vec<RatVector> = wire
            .vertices
            .iter()
            .map(|v| v.iter().map(|s| parse_rational(s)).collect::<Result<_>>())
            .collect::<Result<_>>()
            .map_err(D::Error::custom)?;
        if pts.is_empty() {
            return Err(D::Error::custom("polytope needs at least one vertex"));
        }
        if pts.iter().any(|p| p.len() != wire.dim) {
            return Err(D::Error::custom("vertex length differs from dim"));
        }
        Ok(hull_in(&pts, wire.dim))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn p(rows: &[&[i64]]) -> RationalPolytope {
        hull_int(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn interior_point_is_dropped() {
        let t = hull(&[
            vec![int(0), int(0)],
            vec![int(1), int(0)],
            vec![int(0), int(1)],
            vec![rat(1, 2), rat(1, 2)],
        ])
        .unwrap();
        assert_eq!(t.vertices().len(), 3);
        assert_eq!(t.num_facets(), 3);
        assert_eq!(normalized_volume(&t), int(1));
    }

    #[test]
    fn point_and_square() {
        let pt = p(&[&[0, 0]]);
        assert_eq!(pt.intrinsic_dim(), 0);
        assert_eq!(normalized_volume(&pt), int(0));
        let sq = p(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(sq.num_facets(), 4);
        assert_eq!(normalized_volume(&sq), int(2));
    }

    #[test]
    fn collinear_boundary_points() {
        let t = p(&[&[0, 0], &[1, 0], &[2, 0], &[0, 1], &[0, 2]]);
        assert_eq!(t.vertices().len(), 3);
        assert_eq!(normalized_volume(&t), int(4));
    }

    #[test]
    fn segment_in_the_plane() {
        let s = p(&[&[0, 0], &[2, 2], &[1, 1]]);
        assert_eq!(s.intrinsic_dim(), 1);
        assert_eq!(s.vertices().len(), 2);
        assert_eq!(s.equalities().len(), 1);
        assert!(s.contains(&[int(1), int(1)]));
        assert!(!s.contains(&[int(1), int(0)]));
        assert!(!s.contains(&[int(3), int(3)]));
    }

    #[test]
    fn minkowski_examples() {
        let e1 = p(&[&[0, 0], &[1, 0]]);
        let e2 = p(&[&[0, 0], &[0, 1]]);
        let sq = minkowski_sum(&e1, &e2).unwrap();
        assert_eq!(normalized_volume(&sq), int(2));
        let simplex = p(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let double = minkowski_sum(&simplex, &simplex).unwrap();
        assert_eq!(double, simplex.dilate(&int(2)));
        assert_eq!(normalized_volume(&double), int(8));
        let moved = minkowski_sum(&simplex, &p(&[&[1, 2, 3]])).unwrap();
        assert_eq!(moved, simplex.translate(&[int(1), int(2), int(3)]));
    }

    #[test]
    fn mixed_examples() {
        let sq = p(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(mixed_intersection(&[sq.clone(), sq.clone()]).unwrap(), int(2));
        let e1 = p(&[&[0, 0], &[1, 0]]);
        let e2 = p(&[&[0, 0], &[0, 1]]);
        assert_eq!(mixed_intersection(&[e1, e2]).unwrap(), int(1));
        assert_eq!(mixed_intersection(&[sq, p(&[&[3, 1]])]).unwrap(), int(0));
    }

    #[test]
    fn lattice_points_of_triangle() {
        let t = p(&[&[0, 0], &[2, 0], &[0, 2]]);
        assert_eq!(t.lattice_points().len(), 6);
    }

    #[test]
    fn json_round_trip() {
        let t = hull(&[vec![int(0), rat(1, 2)], vec![int(1), int(0)], vec![int(0), int(0)]]).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"dim":2,"vertices":[["0/1","0/1"],["0/1","1/2"],["1/1","0/1"]]}"#);
        let back: RationalPolytope = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }
}
