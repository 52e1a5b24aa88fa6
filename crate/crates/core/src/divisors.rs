//! Torus-invariant Q-divisors, support functions and positivity.
//!
//! Conventions: `D = sum a_rho D_rho`; on a maximal cone `sigma` the support
//! function is `m_sigma` with `<m_sigma, v_rho> = -a_rho` for the rays of
//! `sigma`. D is nef when `<m_sigma, v_rho> >= -a_rho` for every ray and cone,
//! and then `P_D = {m : <m, v_rho> >= -a_rho}` is the hull of the `m_sigma`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Result, TorickError};
use crate::exact::linalg::{dot_int, inverse, solve, to_rat_matrix, to_rat_vec, RatVector};
use crate::exact::rational::serde_rational_vec;
use crate::exact::{int, Rational};
use crate::polyhedra::lp::{LinearProgram, LpOutcome, Relation};
use crate::polyhedra::{hull, RationalPolytope};
use crate::toric::{Fan, Refinement, ToricMorphism, Wall};

#[derive(Debug, Clone)]
pub struct TorusDivisor {
    fan: Arc<Fan>,
    coeffs: Vec<Rational>,
}

impl PartialEq for TorusDivisor {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.fan, &other.fan) || *self.fan == *other.fan) && self.coeffs == other.coeffs
    }
}

impl TorusDivisor {
    pub fn new(fan: Arc<Fan>, coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.len() != fan.num_rays() {
            return Err(TorickError::DimensionMismatch { expected: fan.num_rays(), got: coeffs.len() });
        }
        Ok(TorusDivisor { fan, coeffs })
    }

    pub fn from_ints(fan: Arc<Fan>, coeffs: &[i64]) -> Result<Self> {
        TorusDivisor::new(fan, coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero(fan: Arc<Fan>) -> Self {
        let n = fan.num_rays();
        TorusDivisor { fan, coeffs: vec![Rational::zero(); n] }
    }

    /// The prime divisor of ray `i`.
    pub fn prime(fan: Arc<Fan>, i: usize) -> Self {
        let mut d = TorusDivisor::zero(fan);
        d.coeffs[i] = Rational::one();
        d
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Rational {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Rays with nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        (0..self.coeffs.len()).filter(|&i| !self.coeffs[i].is_zero()).collect()
    }

    fn same_fan(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.fan, &other.fan) || *self.fan == *other.fan {
            Ok(())
        } else {
            Err(TorickError::MismatchedFans)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_fan(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(TorusDivisor { fan: self.fan.clone(), coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&int(-1)))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        TorusDivisor { fan: self.fan.clone(), coeffs: self.coeffs.iter().map(|a| a * k).collect() }
    }

    /// `self + t * other`.
    pub fn add_scaled(&self, t: &Rational, other: &Self) -> Result<Self> {
        self.add(&other.scale(t))
    }

    /// Adds the principal divisor of the character `m`.
    pub fn add_character(&self, m: &[Rational]) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(self.fan.rays())
            .map(|(a, v)| a + dot_int(m, v))
            .collect();
        TorusDivisor { fan: self.fan.clone(), coeffs }
    }
}

impl Serialize for TorusDivisor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct W<'a> {
            #[serde(with = "serde_rational_vec")]
            coeffs: &'a Vec<Rational>,
        }
        W { coeffs: &self.coeffs }.serialize(s)
    }
}

/// Linear pieces of a Q-Cartier divisor, one per maximal cone.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportFunction {
    pub functionals: Vec<RatVector>,
    /// Smallest positive integer k with kD Cartier (integral coefficients and functionals).
    pub cartier_index: BigInt,
}

impl SupportFunction {
    /// `psi_D(v)`, evaluated on any maximal cone containing `v`.
    pub fn eval(&self, fan: &Fan, v: &[Rational]) -> Option<Rational> {
        let ci = fan.containing_cone(v)?;
        Some(self.functionals[ci].iter().zip(v).map(|(a, b)| a * b).sum())
    }
}

pub fn support_function(d: &TorusDivisor) -> Result<SupportFunction> {
    let fan = &d.fan;
    let mut functionals = Vec::with_capacity(fan.max_cones().len());
    let mut index = d.coeffs.iter().fold(BigInt::one(), |acc, a| acc.lcm(a.denom()));
    for (ci, idx) in fan.max_cones().iter().enumerate() {
        let rows: Vec<RatVector> = idx.iter().map(|&r| to_rat_vec(fan.ray(r))).collect();
        let rhs: RatVector = idx.iter().map(|&r| -d.coeffs[r].clone()).collect();
        let m = if rows.is_empty() {
            vec![Rational::zero(); fan.rank()]
        } else {
            solve(&rows, &rhs).ok_or(TorickError::NotQCartier { cone: ci })?
        };
        index = m.iter().fold(index, |acc, a| acc.lcm(a.denom()));
        functionals.push(m);
    }
    Ok(SupportFunction { functionals, cartier_index: index })
}

/// `<m_sigma, v_rho> + a_rho`; nonnegative for all pairs exactly when D is nef.
fn convexity_gap(d: &TorusDivisor, sf: &SupportFunction, cone: usize, ray: usize) -> Rational {
    dot_int(&sf.functionals[cone], d.fan.ray(ray)) + &d.coeffs[ray]
}

/// First (cone, ray) pair violating convexity.
pub fn nef_violation(d: &TorusDivisor) -> Result<Option<(usize, usize)>> {
    let sf = support_function(d)?;
    for ci in 0..d.fan.max_cones().len() {
        for r in 0..d.fan.num_rays() {
            if convexity_gap(d, &sf, ci, r).is_negative() {
                return Ok(Some((ci, r)));
            }
        }
    }
    Ok(None)
}

pub fn is_nef(d: &TorusDivisor) -> Result<bool> {
    Ok(nef_violation(d)?.is_none())
}

/// Strict convexity: every ray outside a cone lies strictly above its linear piece.
pub fn is_ample(d: &TorusDivisor) -> Result<bool> {
    let sf = support_function(d)?;
    for (ci, idx) in d.fan.max_cones().iter().enumerate() {
        for r in 0..d.fan.num_rays() {
            if !idx.contains(&r) && !convexity_gap(d, &sf, ci, r).is_positive() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Local convexity across a wall; positive multiple of the intersection with its curve.
pub fn wall_value(d: &TorusDivisor, sf: &SupportFunction, w: &Wall) -> Rational {
    convexity_gap(d, sf, w.left, w.right_extra)
}

/// Offending contracted wall, if any.
pub fn relative_nef_violation(d: &TorusDivisor, pi: &ToricMorphism) -> Result<Option<Wall>> {
    check_source(d, pi)?;
    let sf = support_function(d)?;
    Ok(pi
        .contracted_walls()
        .into_iter()
        .find(|w| wall_value(d, &sf, w).is_negative())
        .cloned())
}

pub fn is_relatively_nef(d: &TorusDivisor, pi: &ToricMorphism) -> Result<bool> {
    Ok(relative_nef_violation(d, pi)?.is_none())
}

pub fn is_relatively_ample(d: &TorusDivisor, pi: &ToricMorphism) -> Result<bool> {
    check_source(d, pi)?;
    let sf = support_function(d)?;
    Ok(pi.contracted_walls().into_iter().all(|w| wall_value(d, &sf, w).is_positive()))
}

fn check_source(d: &TorusDivisor, pi: &ToricMorphism) -> Result<()> {
    if Arc::ptr_eq(&d.fan, pi.source()) || *d.fan == **pi.source() {
        Ok(())
    } else {
        Err(TorickError::MismatchedFans)
    }
}

/// `P_D`, the hull of the linear pieces of a nef divisor on a complete fan.
pub fn polytope_of(d: &TorusDivisor) -> Result<RationalPolytope> {
    if !d.fan.is_complete() {
        return Err(TorickError::Unsupported("polytope of a divisor on a non-complete fan".into()));
    }
    if let Some((cone, ray)) = nef_violation(d)? {
        return Err(TorickError::NotNef { cone, ray });
    }
    let sf = support_function(d)?;
    hull(&sf.functionals)
}

pub fn canonical_divisor(fan: &Arc<Fan>) -> TorusDivisor {
    let n = fan.num_rays();
    TorusDivisor { fan: fan.clone(), coeffs: vec![int(-1); n] }
}

/// `pi^* D` for a Q-Cartier divisor on the target: coefficient `-psi_D(pi(v_rho))`.
pub fn pullback_along(pi: &ToricMorphism, d: &TorusDivisor) -> Result<TorusDivisor> {
    let target = pi.target();
    if !(Arc::ptr_eq(&d.fan, target) || *d.fan == **target) {
        return Err(TorickError::MismatchedFans);
    }
    let sf = support_function(d)?;
    let source = pi.source();
    let mut coeffs = Vec::with_capacity(source.num_rays());
    for v in source.rays() {
        let image = to_rat_vec(&pi.apply(v));
        let psi = sf
            .eval(target, &image)
            .ok_or_else(|| TorickError::InvalidMorphism("ray image outside the target support".into()))?;
        coeffs.push(-psi);
    }
    Ok(TorusDivisor { fan: source.clone(), coeffs })
}

/// `K_X - pi^* K_B`.
pub fn relative_canonical(pi: &ToricMorphism) -> Result<TorusDivisor> {
    let kb = canonical_divisor(pi.target());
    let pulled = match pullback_along(pi, &kb) {
        Err(TorickError::NotQCartier { .. }) => return Err(TorickError::NotQGorenstein),
        other => other?,
    };
    canonical_divisor(pi.source()).sub(&pulled)
}

/// Pullback along a refinement, using its containing-cone assignment.
pub fn pullback_divisor(fine: &Arc<Fan>, refinement: &Refinement, d: &TorusDivisor) -> Result<TorusDivisor> {
    let coarse = &d.fan;
    if refinement.assignment.len() != fine.max_cones().len() {
        return Err(TorickError::InvalidAssignment(format!(
            "assignment covers {} cones, fan has {}",
            refinement.assignment.len(),
            fine.max_cones().len()
        )));
    }
    let sf = support_function(d)?;
    let mut coeffs: Vec<Option<Rational>> = vec![None; fine.num_rays()];
    for (k, idx) in fine.max_cones().iter().enumerate() {
        let target = refinement.assignment[k];
        if target >= coarse.max_cones().len() {
            return Err(TorickError::InvalidAssignment(format!("cone index {target} out of range")));
        }
        for &r in idx {
            if !coarse.cone(target).contains_int(fine.ray(r)) {
                return Err(TorickError::InvalidAssignment(format!(
                    "ray {:?} is not in assigned cone {target}",
                    fine.ray(r)
                )));
            }
            let value = -dot_int(&sf.functionals[target], fine.ray(r));
            match &coeffs[r] {
                Some(prev) if *prev != value => {
                    return Err(TorickError::InvalidAssignment(format!(
                        "inconsistent pullback coefficient for ray {:?}",
                        fine.ray(r)
                    )))
                }
                _ => coeffs[r] = Some(value),
            }
        }
    }
    let coeffs = coeffs.into_iter().map(|c| c.expect("every ray lies in a cone")).collect();
    Ok(TorusDivisor { fan: fine.clone(), coeffs })
}

/// Ample class of a complete fan: the stored witness, else an LP solution.
pub fn ample_class(fan: &Arc<Fan>) -> Result<TorusDivisor> {
    let coeffs = fan
        .ample_cached(|| {
            let pi = ToricMorphism::to_point(fan.clone());
            find_relatively_ample(&pi).ok().map(|d| d.coeffs)
        })
        .ok_or(TorickError::NoProjectivityWitness)?
        .to_vec();
    TorusDivisor::new(fan.clone(), coeffs)
}

/// `D = A - kH` with A nef and the least `k >= 0`, H the fan's ample class.
pub fn nef_decomposition(d: &TorusDivisor) -> Result<(TorusDivisor, TorusDivisor)> {
    let h = ample_class(&d.fan)?;
    let sd = support_function(d)?;
    let sh = support_function(&h)?;
    let mut k = Rational::zero();
    for (ci, idx) in d.fan.max_cones().iter().enumerate() {
        for r in 0..d.fan.num_rays() {
            if idx.contains(&r) {
                continue;
            }
            let gd = convexity_gap(d, &sd, ci, r);
            if gd.is_negative() {
                let gh = convexity_gap(&h, &sh, ci, r);
                if !gh.is_positive() {
                    return Err(TorickError::NoProjectivityWitness);
                }
                let need = -gd / gh;
                if need > k {
                    k = need;
                }
            }
        }
    }
    let b = h.scale(&k);
    Ok((d.add(&b)?, b))
}

/// Support-function coefficients `m_sigma = -R_sigma^{-1} a_sigma` as a linear map of `a`.
fn functional_rows(fan: &Fan, ci: usize) -> Result<Vec<Vec<Rational>>> {
    let idx = &fan.max_cones()[ci];
    let cone = fan.cone(ci);
    if !cone.is_simplicial() || !cone.is_full_dimensional() {
        return Err(TorickError::Unsupported(
            "relative ampleness search needs simplicial full-dimensional cones".into(),
        ));
    }
    let r = to_rat_matrix(&idx.iter().map(|&i| fan.ray(i).to_vec()).collect::<Vec<_>>());
    let inv = inverse(&r).expect("simplicial full-dimensional cone");
    // m_j = -sum_k inv[j][k] a_{idx[k]}
    Ok((0..fan.rank())
        .map(|j| {
            let mut row = vec![Rational::zero(); fan.num_rays()];
            for (k, &ray) in idx.iter().enumerate() {
                row[ray] = -inv[j][k].clone();
            }
            row
        })
        .collect())
}

/// A divisor strictly convex across every contracted wall, minimizing the l1 norm
/// of its coefficients.
pub fn find_relatively_ample(pi: &ToricMorphism) -> Result<TorusDivisor> {
    let fan = pi.source();
    let nr = fan.num_rays();
    let walls = pi.contracted_walls();
    if walls.is_empty() {
        return Ok(TorusDivisor::zero(fan.clone()));
    }
    let mut lp = LinearProgram::new(2 * nr);
    lp.objective = vec![Rational::one(); 2 * nr];
    let mut rows_cache: Vec<Option<Vec<Vec<Rational>>>> = vec![None; fan.max_cones().len()];
    for w in &walls {
        if rows_cache[w.left].is_none() {
            rows_cache[w.left] = Some(functional_rows(fan, w.left)?);
        }
        let m_rows = rows_cache[w.left].as_ref().unwrap();
        let u = fan.ray(w.right_extra);
        // <m_left, u> + a_u as a linear form in a
        let mut g = vec![Rational::zero(); nr];
        for (j, row) in m_rows.iter().enumerate() {
            if u[j] != 0 {
                for (gi, ri) in g.iter_mut().zip(row) {
                    *gi += ri * int(u[j]);
                }
            }
        }
        g[w.right_extra] += Rational::one();
        let mut coeffs = g.clone();
        coeffs.extend(g.iter().map(|x| -x.clone()));
        lp.add(coeffs, Relation::Ge, Rational::one());
    }
    match lp.solve() {
        LpOutcome::Optimal { x, .. } => {
            let coeffs = (0..nr).map(|i| &x[i] - &x[i + nr]).collect();
            TorusDivisor::new(fan.clone(), coeffs)
        }
        _ => Err(TorickError::Infeasible("no divisor is strictly convex on every contracted wall".into())),
    }
}

/// A character `m` with `div(chi^m) = d`, if `d` is principal.
pub fn principal_character(d: &TorusDivisor) -> Option<RatVector> {
    let rows = to_rat_matrix(d.fan.rays());
    if rows.is_empty() {
        return d.is_zero().then(|| vec![Rational::zero(); d.fan.rank()]);
    }
    solve(&rows, &d.coeffs)
}

/// The orbit closure `D_rho` as a toric variety: the star fan of `rho` in `N / Z v_rho`.
#[derive(Debug, Clone)]
pub struct OrbitRestriction {
    pub rho: usize,
    pub fan: Arc<Fan>,
    // (ray of the ambient fan, ray of the star fan, lattice index of the projection)
    images: Vec<(usize, usize, i64)>,
    first_cone: usize,
}

pub fn orbit_restriction(fan: &Arc<Fan>, rho: usize) -> Result<OrbitRestriction> {
    let proj = crate::exact::linalg::quotient_projection(fan.ray(rho));
    let mut rays: Vec<Vec<i64>> = Vec::new();
    let mut images: Vec<(usize, usize, i64)> = Vec::new();
    let mut cones: Vec<Vec<usize>> = Vec::new();
    let mut first_cone = None;
    for (ci, idx) in fan.max_cones().iter().enumerate() {
        if !idx.contains(&rho) {
            continue;
        }
        first_cone.get_or_insert(ci);
        let mut cone = Vec::new();
        for &r in idx {
            if r == rho {
                continue;
            }
            let image: Vec<i64> = proj
                .iter()
                .map(|row| row.iter().zip(fan.ray(r)).map(|(a, b)| a * b).sum())
                .collect();
            let g = crate::exact::linalg::gcd_slice(&image);
            let prim: Vec<i64> = image.iter().map(|x| x / g).collect();
            let pos = match rays.iter().position(|x| *x == prim) {
                Some(p) => p,
                None => {
                    rays.push(prim);
                    images.push((r, rays.len() - 1, g));
                    rays.len() - 1
                }
            };
            cone.push(pos);
        }
        cones.push(cone);
    }
    let first_cone =
        first_cone.ok_or_else(|| TorickError::InvalidArgument(format!("ray index {rho} lies in no cone")))?;
    let star = Arc::new(Fan::new(fan.rank() - 1, rays, cones)?);
    Ok(OrbitRestriction { rho, fan: star, images, first_cone })
}

impl OrbitRestriction {
    /// `D_rho` is complete exactly when `rho` is interior to the support.
    pub fn is_compact(&self) -> bool {
        self.fan.is_complete()
    }

    /// `d|_{D_rho}` after moving `d` off `D_rho` by a character.
    pub fn restrict(&self, d: &TorusDivisor) -> Result<TorusDivisor> {
        let sf = support_function(d)?;
        let m0 = &sf.functionals[self.first_cone];
        let mut coeffs = vec![Rational::zero(); self.fan.num_rays()];
        for &(r, pos, g) in &self.images {
            coeffs[pos] = (&d.coeffs[r] + dot_int(m0, d.fan.ray(r))) / int(g);
        }
        TorusDivisor::new(self.fan.clone(), coeffs)
    }
}
