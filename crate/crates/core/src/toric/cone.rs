use num_traits::{Signed, Zero};

use crate::error::{Result, TorickError};
use crate::exact::linalg::{gcd_slice, is_primitive, rank, to_rat_vec};
use crate::exact::Rational;
use crate::polyhedra::{hull_int, Halfspace};

/// A strongly convex rational polyhedral cone with primitive, irredundant generators.
#[derive(Debug, Clone)]
pub struct Cone {
    rank: usize,
    rays: Vec<Vec<i64>>,
    dim: usize,
    // facets through the origin, as (inward normal, indices of rays on the facet)
    facets: Vec<(Halfspace, Vec<usize>)>,
    equalities: Vec<Halfspace>,
}

impl PartialEq for Cone {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.rays == other.rays
    }
}

impl Cone {
    /// Checks primitivity, strong convexity and irredundancy.
    pub fn new(rank: usize, rays: Vec<Vec<i64>>) -> Result<Cone> {
        for r in &rays {
            if r.len() != rank {
                return Err(TorickError::DimensionMismatch { expected: rank, got: r.len() });
            }
            if !is_primitive(r) {
                return Err(TorickError::NotPrimitive(r.clone()));
            }
        }
        for (i, r) in rays.iter().enumerate() {
            if rays[..i].contains(r) {
                return Err(TorickError::InvalidFan(format!("repeated generator {r:?}")));
            }
        }
        let (cone, pointed) = Cone::build(rank, rays);
        if !pointed {
            return Err(TorickError::InvalidFan(format!(
                "cone {:?} is not strongly convex",
                cone.rays
            )));
        }
        for i in 0..cone.rays.len() {
            if !cone.is_extreme(i) {
                return Err(TorickError::InvalidFan(format!(
                    "generator {:?} of cone {:?} is redundant",
                    cone.rays[i], cone.rays
                )));
            }
        }
        Ok(cone)
    }

    /// Also reports whether the origin is a vertex of conv(0, rays), i.e. the cone has no line.
    pub(crate) fn build(rank: usize, rays: Vec<Vec<i64>>) -> (Cone, bool) {
        let mut pts = vec![vec![0i64; rank]];
        pts.extend(rays.iter().cloned());
        let p = hull_int(&pts).expect("nonempty");
        let dim = p.intrinsic_dim();
        let facets = p
            .inequalities()
            .iter()
            .filter(|h| h.offset.is_zero())
            .map(|h| {
                let on: Vec<usize> = (0..rays.len())
                    .filter(|&i| h.value(&to_rat_vec(&rays[i])).is_zero())
                    .collect();
                (h.clone(), on)
            })
            .collect();
        let pointed = p.vertices().iter().any(|v| v.iter().all(Zero::is_zero));
        (Cone { rank, rays, dim, facets, equalities: p.equalities().to_vec() }, pointed)
    }

    fn is_extreme(&self, i: usize) -> bool {
        if self.dim <= 1 {
            return true;
        }
        let normals: Vec<Vec<Rational>> = self
            .facets
            .iter()
            .filter(|(_, on)| on.contains(&i))
            .map(|(h, _)| h.normal.iter().map(|x| Rational::from_integer(x.clone())).collect())
            .collect();
        normals.len() >= self.dim - 1 && rank(&normals) == self.dim - 1
    }

    pub fn lattice_rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim == self.rank
    }

    pub fn is_simplicial(&self) -> bool {
        self.rays.len() == self.dim
    }

    /// Index of the sublattice spanned by the generators in its saturation
    /// (gcd of maximal minors); `None` for non-simplicial cones.
    pub fn multiplicity(&self) -> Option<i64> {
        if !self.is_simplicial() {
            return None;
        }
        Some(maximal_minor_gcd(&self.rays, self.rank))
    }

    pub fn is_smooth(&self) -> bool {
        self.multiplicity() == Some(1)
    }

    /// Facets as sorted lists of generator indices.
    pub fn facets(&self) -> Vec<Vec<usize>> {
        self.facets.iter().map(|(_, on)| on.clone()).collect()
    }

    pub fn facet_normals(&self) -> impl Iterator<Item = &Halfspace> {
        self.facets.iter().map(|(h, _)| h)
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.equalities.iter().all(|h| h.value(v).is_zero())
            && self.facets.iter().all(|(h, _)| !h.value(v).is_negative())
    }

    pub fn contains_int(&self, v: &[i64]) -> bool {
        self.contains(&to_rat_vec(v))
    }

    pub fn in_relative_interior(&self, v: &[Rational]) -> bool {
        self.equalities.iter().all(|h| h.value(v).is_zero())
            && self.facets.iter().all(|(h, _)| h.value(v).is_positive())
    }

    /// Generators of the smallest face containing `v` (assumed to lie in the cone).
    pub fn minimal_face(&self, v: &[Rational]) -> Vec<usize> {
        (0..self.rays.len())
            .filter(|&i| {
                self.facets
                    .iter()
                    .filter(|(h, _)| h.value(v).is_zero())
                    .all(|(_, on)| on.contains(&i))
            })
            .collect()
    }
}

pub(crate) fn maximal_minor_gcd(rows: &[Vec<i64>], n: usize) -> i64 {
    let k = rows.len();
    if k == 0 {
        return 1;
    }
    let mut g = 0i64;
    let mut cols: Vec<usize> = (0..k).collect();
    loop {
        let minor: Vec<Vec<i64>> = rows.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect();
        let d = crate::exact::linalg::determinant_int(&minor);
        g = gcd_slice(&[g, i64::try_from(d.abs()).unwrap_or(i64::MAX)]);
        if g == 1 {
            return 1;
        }
        // next k-subset of 0..n
        let mut i = k;
        loop {
            if i == 0 {
                return g;
            }
            i -= 1;
            if cols[i] < n - k + i {
                cols[i] += 1;
                for j in i + 1..k {
                    cols[j] = cols[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn basic_properties() {
        let a1 = Cone::new(2, vec![vec![1, 0], vec![1, 2]]).unwrap();
        assert!(a1.is_simplicial());
        assert_eq!(a1.multiplicity(), Some(2));
        assert!(a1.contains_int(&[1, 1]));
        assert!(!a1.contains_int(&[0, 1]));
        assert_eq!(a1.minimal_face(&[int(2), int(0)]), vec![0]);
        assert_eq!(a1.minimal_face(&[int(1), int(1)]), vec![0, 1]);

        let sq = Cone::new(3, vec![vec![1, 0, 1], vec![0, 1, 1], vec![-1, 0, 1], vec![0, -1, 1]]).unwrap();
        assert!(!sq.is_simplicial());
        assert_eq!(sq.facets().len(), 4);

        assert!(Cone::new(2, vec![vec![1, 0], vec![-1, 0]]).is_err());
        assert!(Cone::new(2, vec![vec![1, 0], vec![1, 1], vec![0, 1]]).is_err());
        assert!(Cone::new(2, vec![vec![2, 0]]).is_err());

        let ray = Cone::new(3, vec![vec![1, 1, 1]]).unwrap();
        assert_eq!(ray.dim(), 1);
        assert!(ray.is_smooth());
        let zero = Cone::new(2, vec![]).unwrap();
        assert_eq!(zero.dim(), 0);
    }
}
