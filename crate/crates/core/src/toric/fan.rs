use std::collections::{BTreeMap, BTreeSet};
use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TorickError};
use crate::exact::linalg::{is_primitive, rank_int, to_rat_vec};
use crate::exact::rational::serde_rational_vec;
use crate::exact::{int, Rational};
use crate::polyhedra::lp::{solve_free, Relation};

use super::cone::Cone;

/// A rational polyhedral fan: ordered rays plus maximal cones as sorted ray-index sets.
#[derive(Debug)]
pub struct Fan {
    rank: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
    cones: Vec<Cone>,
    ample: Option<Vec<Rational>>,
    ample_cache: OnceLock<Option<Vec<Rational>>>,
    walls: OnceLock<Vec<Wall>>,
    complete: OnceLock<bool>,
    volumes: RwLock<HashMap<Vec<Rational>, Rational>>,
}

impl Clone for Fan {
    fn clone(&self) -> Self {
        Fan {
            rank: self.rank,
            rays: self.rays.clone(),
            max_cones: self.max_cones.clone(),
            cones: self.cones.clone(),
            ample: self.ample.clone(),
            ample_cache: self.ample_cache.clone(),
            walls: self.walls.clone(),
            complete: self.complete.clone(),
            volumes: RwLock::new(HashMap::new()),
        }
    }
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.rays == other.rays && self.max_cones == other.max_cones
    }
}

/// Codimension-one intersection of two full-dimensional maximal cones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wall {
    pub left: usize,
    pub right: usize,
    pub common: Vec<usize>,
    /// A ray of the right cone off the wall.
    pub right_extra: usize,
    /// A ray of the left cone off the wall.
    pub left_extra: usize,
}

impl Fan {
    /// Builds the fan after checking indices, primitivity and per-cone conditions.
    /// The face-intersection axiom is checked by [`fan_validate`].
    pub fn new(rank: usize, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Result<Fan> {
        for r in &rays {
            if r.len() != rank {
                return Err(TorickError::DimensionMismatch { expected: rank, got: r.len() });
            }
            if !is_primitive(r) {
                return Err(TorickError::NotPrimitive(r.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for r in &rays {
            if !seen.insert(r.clone()) {
                return Err(TorickError::InvalidFan(format!("ray {r:?} listed twice")));
            }
        }
        let mut normalized = Vec::with_capacity(max_cones.len());
        let mut cones = Vec::with_capacity(max_cones.len());
        for c in &max_cones {
            let mut c = c.clone();
            c.sort_unstable();
            c.dedup();
            if let Some(&bad) = c.iter().find(|&&i| i >= rays.len()) {
                return Err(TorickError::InvalidFan(format!("cone references ray index {bad}")));
            }
            let cone = Cone::new(rank, c.iter().map(|&i| rays[i].clone()).collect())?;
            normalized.push(c);
            cones.push(cone);
        }
        if normalized.is_empty() {
            return Err(TorickError::InvalidFan("fan has no cones".into()));
        }
        for i in 0..rays.len() {
            if !normalized.iter().any(|c| c.contains(&i)) {
                return Err(TorickError::InvalidFan(format!("ray {:?} lies in no maximal cone", rays[i])));
            }
        }
        Ok(Fan {
            rank,
            rays,
            max_cones: normalized,
            cones,
            ample: None,
            ample_cache: OnceLock::new(),
            walls: OnceLock::new(),
            complete: OnceLock::new(),
            volumes: RwLock::new(HashMap::new()),
        })
    }

    /// The fan of a point (lattice of rank 0).
    pub fn point() -> Fan {
        Fan::new(0, Vec::new(), vec![Vec::new()]).expect("point fan")
    }

    /// The fan of all faces of a single cone.
    pub fn from_cone(cone: &Cone) -> Fan {
        let idx: Vec<usize> = (0..cone.rays().len()).collect();
        Fan::new(cone.lattice_rank(), cone.rays().to_vec(), vec![idx]).expect("cone is valid")
    }

    pub fn with_ample(mut self, coeffs: Vec<Rational>) -> Result<Fan> {
        if coeffs.len() != self.rays.len() {
            return Err(TorickError::DimensionMismatch { expected: self.rays.len(), got: coeffs.len() });
        }
        self.ample = Some(coeffs.clone());
        self.ample_cache = OnceLock::from(Some(coeffs));
        Ok(self)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[i64] {
        &self.rays[i]
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn cone(&self, i: usize) -> &Cone {
        &self.cones[i]
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    /// Stored ample coefficients, if the file or a construction supplied one.
    pub fn ample_witness(&self) -> Option<&[Rational]> {
        self.ample.as_deref()
    }

    /// Ample class, computing one on first use when none was supplied.
    pub(crate) fn ample_cached(&self, compute: impl FnOnce() -> Option<Vec<Rational>>) -> Option<&[Rational]> {
        self.ample_cache.get_or_init(compute).as_deref()
    }

    /// Memoized normalized volumes of nef divisors, keyed by coefficient vector.
    pub(crate) fn cached_volume(&self, coeffs: &[Rational], compute: impl FnOnce() -> Result<Rational>) -> Result<Rational> {
        if let Some(v) = self.volumes.read().expect("volume cache").get(coeffs) {
            return Ok(v.clone());
        }
        let v = compute()?;
        self.volumes.write().expect("volume cache").insert(coeffs.to_vec(), v.clone());
        Ok(v)
    }

    pub fn ray_index(&self, v: &[i64]) -> Option<usize> {
        self.rays.iter().position(|r| r == v)
    }

    pub fn is_simplicial(&self) -> bool {
        self.cones.iter().all(Cone::is_simplicial)
    }

    pub fn is_smooth(&self) -> bool {
        self.cones.iter().all(Cone::is_smooth)
    }

    /// Every facet of every maximal cone is shared by exactly two maximal cones,
    /// all maximal cones being full-dimensional.
    pub fn is_complete(&self) -> bool {
        *self.complete.get_or_init(|| {
            if !self.cones.iter().all(Cone::is_full_dimensional) {
                return false;
            }
            let mut count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
            for (ci, cone) in self.cones.iter().enumerate() {
                for f in cone.facets() {
                    let global: Vec<usize> = f.iter().map(|&k| self.max_cones[ci][k]).collect();
                    *count.entry(global).or_default() += 1;
                }
            }
            count.values().all(|&c| c == 2)
        })
    }

    /// Index of a maximal cone containing `v`.
    pub fn containing_cone(&self, v: &[Rational]) -> Option<usize> {
        self.cones.iter().position(|c| c.contains(v))
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.containing_cone(v).is_some()
    }

    /// Global ray indices of the smallest cone of the fan containing `v`.
    pub fn minimal_cone(&self, v: &[Rational]) -> Option<Vec<usize>> {
        let ci = self.containing_cone(v)?;
        Some(
            self.cones[ci]
                .minimal_face(v)
                .into_iter()
                .map(|k| self.max_cones[ci][k])
                .collect(),
        )
    }

    /// Walls between full-dimensional maximal cones, ordered by (left, right).
    pub fn walls(&self) -> &[Wall] {
        self.walls.get_or_init(|| {
            let mut out = Vec::new();
            for i in 0..self.cones.len() {
                if !self.cones[i].is_full_dimensional() {
                    continue;
                }
                for j in i + 1..self.cones.len() {
                    if !self.cones[j].is_full_dimensional() {
                        continue;
                    }
                    let common: Vec<usize> = self.max_cones[i]
                        .iter()
                        .filter(|r| self.max_cones[j].contains(r))
                        .copied()
                        .collect();
                    let rows: Vec<Vec<i64>> = common.iter().map(|&r| self.rays[r].clone()).collect();
                    if self.rank == 0 || rank_int(&rows) + 1 != self.rank {
                        continue;
                    }
                    let off = |c: &[usize]| {
                        c.iter()
                            .copied()
                            .find(|r| {
                                let mut m = rows.clone();
                                m.push(self.rays[*r].clone());
                                rank_int(&m) == self.rank
                            })
                            .expect("full-dimensional cone leaves the wall")
                    };
                    out.push(Wall {
                        left: i,
                        right: j,
                        right_extra: off(&self.max_cones[j]),
                        left_extra: off(&self.max_cones[i]),
                        common,
                    });
                }
            }
            out
        })
    }
}

/// One checked property of a maximal cone.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ConeReport {
    pub rays: Vec<usize>,
    pub dim: usize,
    pub simplicial: bool,
    pub smooth: bool,
    pub multiplicity: Option<i64>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Violation {
    pub kind: String,
    pub cones: Vec<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct FanDiagnostics {
    pub valid: bool,
    pub complete: bool,
    pub simplicial: bool,
    pub smooth: bool,
    pub cones: Vec<ConeReport>,
    pub violations: Vec<Violation>,
}

/// Full axiom check: cones pairwise meet in a common face and no maximal cone is
/// a face of another.
pub fn fan_validate(f: &Fan) -> FanDiagnostics {
    let mut violations = Vec::new();
    let m = f.max_cones.len();
    for i in 0..m {
        for j in i + 1..m {
            let a = &f.max_cones[i];
            let b = &f.max_cones[j];
            let a_in_b = a.iter().all(|r| b.contains(r));
            let b_in_a = b.iter().all(|r| a.contains(r));
            if a_in_b || b_in_a {
                violations.push(Violation {
                    kind: "not-maximal".into(),
                    cones: vec![i, j],
                    detail: "one listed cone is a face of the other".into(),
                });
                continue;
            }
            if !separated(f, a, b) {
                violations.push(Violation {
                    kind: "face-intersection".into(),
                    cones: vec![i, j],
                    detail: format!("cones {a:?} and {b:?} do not meet in a common face"),
                });
            }
        }
    }
    let cones: Vec<ConeReport> = f
        .cones
        .iter()
        .zip(&f.max_cones)
        .map(|(c, idx)| ConeReport {
            rays: idx.clone(),
            dim: c.dim(),
            simplicial: c.is_simplicial(),
            smooth: c.is_smooth(),
            multiplicity: c.multiplicity(),
        })
        .collect();
    let valid = violations.is_empty();
    FanDiagnostics {
        valid,
        complete: valid && f.is_complete(),
        simplicial: f.is_simplicial(),
        smooth: f.is_smooth(),
        cones,
        violations,
    }
}

/// A linear form vanishing on the shared rays, positive on the rest of `a`
/// and negative on the rest of `b`, certifies that the cones meet in the
/// common face.
fn separated(f: &Fan, a: &[usize], b: &[usize]) -> bool {
    let mut rows = Vec::new();
    for &r in a {
        let v = to_rat_vec(&f.rays[r]);
        if b.contains(&r) {
            rows.push((v, Relation::Eq, Rational::zero()));
        } else {
            rows.push((v, Relation::Ge, int(1)));
        }
    }
    for &r in b {
        if !a.contains(&r) {
            rows.push((to_rat_vec(&f.rays[r]), Relation::Le, int(-1)));
        }
    }
    solve_free(f.rank, false, &rows).is_some()
}

/// Star subdivision at a primitive vector of the support. The new ray is
/// appended after the existing ones.
pub fn star_subdivision(f: &Fan, v: &[i64]) -> Result<Fan> {
    if v.len() != f.rank {
        return Err(TorickError::DimensionMismatch { expected: f.rank, got: v.len() });
    }
    if !is_primitive(v) {
        return Err(TorickError::NotPrimitive(v.to_vec()));
    }
    if f.ray_index(v).is_some() {
        return Ok(f.clone());
    }
    let vr = to_rat_vec(v);
    if !f.contains(&vr) {
        return Err(TorickError::NotInSupport(v.to_vec()));
    }
    let new_index = f.rays.len();
    let mut rays = f.rays.clone();
    rays.push(v.to_vec());
    let mut cones: Vec<Vec<usize>> = Vec::new();
    for (cone, idx) in f.cones.iter().zip(&f.max_cones) {
        if !cone.contains(&vr) {
            cones.push(idx.clone());
            continue;
        }
        for h in cone.facet_normals() {
            if h.value(&vr).is_positive() {
                let mut c: Vec<usize> = idx
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| h.value(&to_rat_vec(cone.rays()[k].as_slice())).is_zero())
                    .map(|(_, &r)| r)
                    .collect();
                c.push(new_index);
                cones.push(c);
            }
        }
    }
    Fan::new(f.rank, rays, cones)
}

/// Containment assignment of a refinement: fine maximal cone -> coarse maximal cone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Refinement {
    pub assignment: Vec<usize>,
}

/// Returns the containing-cone map when `fine` refines `coarse`.
pub fn is_refinement(fine: &Fan, coarse: &Fan) -> Option<Refinement> {
    if fine.rank != coarse.rank {
        return None;
    }
    let mut assignment = Vec::with_capacity(fine.cones.len());
    for (idx, cone) in fine.max_cones.iter().zip(&fine.cones) {
        let target = coarse.cones.iter().position(|c| {
            c.dim() >= cone.dim() && idx.iter().all(|&r| c.contains_int(&fine.rays[r]))
        })?;
        assignment.push(target);
    }
    // equal supports: each coarse cone is covered by the fine cones inside it
    for c in &coarse.cones {
        let inside: Vec<usize> = (0..fine.cones.len())
            .filter(|&k| {
                fine.cones[k].dim() == c.dim()
                    && fine.max_cones[k].iter().all(|&r| c.contains_int(&fine.rays[r]))
            })
            .collect();
        if inside.is_empty() {
            return None;
        }
        let mut count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for &k in &inside {
            for face in fine.cones[k].facets() {
                let global: Vec<usize> = face.iter().map(|&j| fine.max_cones[k][j]).collect();
                *count.entry(global).or_default() += 1;
            }
        }
        for (face, n) in count {
            if n >= 2 {
                continue;
            }
            let on_boundary = c.facet_normals().any(|h| {
                face.iter().all(|&r| h.value(&to_rat_vec(&fine.rays[r])).is_zero())
            });
            if !on_boundary {
                return None;
            }
        }
    }
    Some(Refinement { assignment })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct FanWire {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rational_vec")]
    pub ample: Option<Vec<Rational>>,
}

impl FanWire {
    pub(crate) fn build(self) -> Result<Fan> {
        let fan = Fan::new(self.rank, self.rays, self.max_cones)?;
        match self.ample {
            Some(a) => fan.with_ample(a),
            None => Ok(fan),
        }
    }
}

mod opt_rational_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<Rational>>, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct W<'a>(#[serde(with = "serde_rational_vec")] &'a Vec<Rational>);
        v.as_ref().map(W).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<Rational>>, D::Error> {
        #[derive(Deserialize)]
        struct W(#[serde(with = "serde_rational_vec")] Vec<Rational>);
        Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
    }
}

impl Serialize for Fan {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FanWire {
            rank: self.rank,
            rays: self.rays.clone(),
            max_cones: self.max_cones.clone(),
            ample: self.ample.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Fan {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        FanWire::deserialize(d)?.build().map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn p2() -> Fan {
        Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap()
    }

    #[test]
    fn p2_diagnostics() {
        let d = fan_validate(&p2());
        assert!(d.valid && d.complete && d.smooth && d.simplicial);
        let partial = Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![1, 2], vec![0]]).unwrap();
        let d = fan_validate(&partial);
        assert!(d.valid && !d.complete);
    }

    #[test]
    fn overlap_is_reported() {
        let f = Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![1, -1]], vec![vec![0, 1], vec![2, 3]]).unwrap();
        let d = fan_validate(&f);
        assert!(!d.valid);
        assert_eq!(d.violations[0].kind, "face-intersection");
    }

    #[test]
    fn subdivisions() {
        let blown = star_subdivision(&p2(), &[1, 1]).unwrap();
        assert_eq!(blown.num_rays(), 4);
        assert_eq!(blown.max_cones().len(), 4);
        assert!(fan_validate(&blown).complete);
        assert!(is_refinement(&blown, &p2()).is_some());
        assert!(is_refinement(&p2(), &blown).is_none());
        assert_eq!(is_refinement(&p2(), &p2()).unwrap().assignment, vec![0, 1, 2]);
        assert_eq!(star_subdivision(&p2(), &[0, 1]).unwrap(), p2());
        assert!(star_subdivision(&p2(), &[2, 2]).is_err());

        let a1 = Fan::from_cone(&Cone::new(2, vec![vec![1, 0], vec![1, 2]]).unwrap());
        let r = star_subdivision(&a1, &[1, 1]).unwrap();
        assert_eq!(r.max_cones().len(), 2);
        assert!(r.is_smooth());
        assert!(star_subdivision(&a1, &[0, 1]).is_err());
        assert!(is_refinement(&r, &a1).is_some());
    }

    #[test]
    fn walls_of_p2() {
        let w = p2().walls().to_vec();
        assert_eq!(w.len(), 3);
        assert_eq!(w[0].common, vec![1]);
    }

    #[test]
    fn json_round_trip() {
        let s = serde_json::to_string(&p2()).unwrap();
        assert_eq!(s, r#"{"rank":2,"rays":[[1,0],[0,1],[-1,-1]],"max_cones":[[0,1],[1,2],[0,2]]}"#);
        let back: Fan = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p2());
    }
}
