//! The normalized volume `V`, the Donaldson-Futaki invariant `DF`, paths of
//! polarizations, and base change over a toric curve.
//!
//! With `n = dim X`, `d = dim F`, `b = dim B` and `c = (L_F^d)`:
//!
//! ```text
//! V  = (L^n) / c^((n-1)/d)
//! DF = n (L^(n-1) . K_{X/B}) c^((n-1)/d) - (n-1) (L^n) (L_F^(d-1) . K_F) c^((b-1)/d)
//! ```
//!
//! When the fiber is a point, `V = (L^n)` and `DF = n (L^(n-1) . K_{X/B})`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::divisors::{
    ample_class, canonical_divisor, principal_character, pullback_along, relative_canonical, support_function,
    wall_value, TorusDivisor,
};
use crate::error::{Result, TorickError};
use crate::exact::linalg::{column_reduce, integer_kernel, solve, to_rat_vec};
use crate::exact::poly::{Poly, SignProfile};
use crate::exact::rational::{from_big, serde_rational, serde_rational_opt, serde_rational_vec};
use crate::exact::{int, AlgebraicValue, Rational, Sign};
use crate::intersection::{intersection_number, volume_polynomial};
use crate::model::{generic_fiber, FiberedModel, GenericFiber};
use crate::toric::{Fan, ToricMorphism};

#[derive(Debug, Clone, Serialize)]
pub struct InvariantReport {
    pub model: String,
    pub n: usize,
    pub dim_base: usize,
    pub dim_fiber: usize,
    /// `(L_F^dim F)`; 1 for a point fiber.
    #[serde(with = "serde_rational")]
    pub c: Rational,
    /// `None` when `(L^n)` is undefined (non-complete total space, non-compact polarization).
    pub volume: Option<AlgebraicValue>,
    pub df: AlgebraicValue,
    pub term1: AlgebraicValue,
    pub term2: AlgebraicValue,
    pub sign: Sign,
}

struct Setup {
    n: usize,
    b: usize,
    fiber: GenericFiber,
    c: Rational,
    k: TorusDivisor,
}

fn setup(m: &FiberedModel) -> Result<Setup> {
    m.check_dominant()?;
    m.check_polarization()?;
    let fiber = generic_fiber(m)?;
    let c = if fiber.is_point() { Rational::one() } else { intersection_number(&vec![fiber.polarization.clone(); fiber.dim()])? };
    if !c.is_positive() {
        return Err(TorickError::DegenerateFiberDegree(crate::exact::format_rational(&c)));
    }
    let k = relative_canonical(m.projection())?;
    Ok(Setup { n: m.dim(), b: m.base_dim(), fiber, c, k })
}

impl Setup {
    fn d(&self) -> usize {
        self.fiber.dim()
    }

    /// `c^(k/d)`.
    fn c_pow(&self, k: i64) -> Result<AlgebraicValue> {
        AlgebraicValue::root_power(&self.c, k, self.d().max(1) as u32)
    }

    /// `(L_F^(d-1) . K_F)`.
    fn fiber_slope(&self) -> Result<Rational> {
        let d = self.d();
        let mut args = vec![self.fiber.polarization.clone(); d - 1];
        args.push(canonical_divisor(&self.fiber.fan));
        intersection_number(&args)
    }
}

fn power_with(l: &TorusDivisor, times: usize, rest: &[&TorusDivisor]) -> Result<Rational> {
    let mut args = vec![l.clone(); times];
    args.extend(rest.iter().map(|&e| e.clone()));
    intersection_number(&args)
}

fn optional(r: Result<Rational>) -> Result<Option<Rational>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(TorickError::Unsupported(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `V(X, L)`.
pub fn normalized_volume_v(m: &FiberedModel) -> Result<AlgebraicValue> {
    let s = setup(m)?;
    let vol = power_with(m.polarization(), s.n, &[])?;
    Ok(s.c_pow(-(s.n as i64 - 1))?.scale(&vol))
}

pub fn donaldson_futaki(m: &FiberedModel) -> Result<InvariantReport> {
    let s = setup(m)?;
    let n = s.n;
    let l = m.polarization();
    let lk = power_with(l, n - 1, &[&s.k])?;
    let one = int(n as i64) * lk;
    let (vol, term1, term2) = if s.fiber.is_point() {
        let vol = optional(power_with(l, n, &[]))?;
        (vol.map(AlgebraicValue::from_rational), AlgebraicValue::from_rational(one), AlgebraicValue::zero())
    } else {
        let ln = power_with(l, n, &[])?;
        let vol = s.c_pow(-(n as i64 - 1))?.scale(&ln);
        let term1 = s.c_pow(n as i64 - 1)?.scale(&one);
        let two = int(n as i64 - 1) * &ln * s.fiber_slope()?;
        let term2 = s.c_pow(s.b as i64 - 1)?.scale(&two);
        (Some(vol), term1, term2)
    };
    let df = term1.sub(&term2)?;
    Ok(InvariantReport {
        model: m.id.clone(),
        n,
        dim_base: s.b,
        dim_fiber: s.d(),
        c: s.c.clone(),
        volume: vol,
        sign: df.sign(),
        df,
        term1,
        term2,
    })
}

/// Lagrange interpolation through `(t, f(t))` for `t = 0..=degree`.
fn interpolate(degree: usize, mut f: impl FnMut(&Rational) -> Result<Rational>) -> Result<Poly> {
    let mut total = Poly::zero();
    let xs: Vec<Rational> = (0..=degree).map(|i| int(i as i64)).collect();
    for (i, xi) in xs.iter().enumerate() {
        let yi = f(xi)?;
        let mut basis = Poly::constant(Rational::one());
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                let factor = Poly::new(vec![-xj.clone(), Rational::one()]).scale(&(Rational::one() / (xi - xj)));
                basis = basis.mul(&factor);
            }
        }
        total = total.add(&basis.scale(&yi));
    }
    Ok(total)
}

/// `DF` as the derivative of `V` in the direction `K_{X/B}`, times `c^(2(n-1)/d)`.
///
/// Both volume polynomials are recovered by interpolating self-intersections
/// of `L + tK`, independently of the mixed numbers used by [`donaldson_futaki`].
pub fn df_via_derivative(m: &FiberedModel) -> Result<AlgebraicValue> {
    let s = setup(m)?;
    if s.fiber.is_point() {
        return Err(TorickError::Unsupported("the derivative form degenerates for a point fiber".into()));
    }
    let (n, d) = (s.n, s.d());
    let l = m.polarization();
    let total = interpolate(n, |t| power_with(&l.add_scaled(t, &s.k)?, n, &[]))?;
    let kf = canonical_divisor(&s.fiber.fan);
    let fiber = interpolate(d, |t| power_with(&s.fiber.polarization.add_scaled(t, &kf)?, d, &[]))?;
    // f = A C^(-e), e = (n-1)/d:  f'(0) c^(2e) = A'(0) c^e - e A(0) C'(0) c^(e-1)
    let (a0, a1) = (total.coeff(0), total.coeff(1));
    let c1 = fiber.coeff(1);
    let e = Rational::new(BigInt::from(n - 1), BigInt::from(d));
    let first = s.c_pow(n as i64 - 1)?.scale(&a1);
    let second = s.c_pow(n as i64 - 1 - d as i64)?.scale(&(e * a0 * c1));
    first.sub(&second)
}

/// The `a` with `K_F - a L_F` principal on the generic fiber; 0 for a point fiber.
pub fn fiber_proportionality(m: &FiberedModel) -> Result<Option<Rational>> {
    let fiber = generic_fiber(m)?;
    if fiber.is_point() {
        return Ok(Some(Rational::zero()));
    }
    // unknowns (m, a): <m, v> + a l_v = -1 for every fiber ray
    let rows: Vec<Vec<Rational>> = fiber
        .fan
        .rays()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut row = to_rat_vec(v);
            row.push(fiber.polarization.coeff(i).clone());
            row
        })
        .collect();
    let rhs = vec![int(-1); rows.len()];
    Ok(solve(&rows, &rhs).map(|x| x[fiber.dim()].clone()))
}

/// `E = K_{X/B} - aL` with `K_F = a L_F`.
pub fn canonical_direction(m: &FiberedModel) -> Result<(Rational, TorusDivisor)> {
    let a = fiber_proportionality(m)?.ok_or_else(|| {
        TorickError::FiberClassChanged("K_F is not proportional to the restricted polarization".into())
    })?;
    let k = relative_canonical(m.projection())?;
    Ok((a.clone(), k.add_scaled(&-a, m.polarization())?))
}

#[derive(Debug, Clone, Serialize)]
pub struct PathReport {
    pub model: String,
    #[serde(with = "serde_rational_vec")]
    pub direction: Vec<Rational>,
    #[serde(with = "serde_rational_opt")]
    pub a: Option<Rational>,
    /// End of the relative nef interval; `None` if `L + tE` stays relatively nef for all `t >= 0`.
    #[serde(with = "serde_rational_opt")]
    pub t_max: Option<Rational>,
    /// Coefficients of `DF(L + tE)` in `t`.
    pub df: Vec<AlgebraicValue>,
    /// `DF(L + tE) = scale * q(t)` with `scale > 0` and `q` rational.
    pub scale: AlgebraicValue,
    pub q: Poly,
    /// Coefficients of `((L + tE)^n)`, when defined.
    pub volume: Option<Poly>,
    pub derivative: SignProfile,
    pub nonincreasing: bool,
    /// Sign of `d^2/dt^2 ((L + tE)^n)` when `E` is vertical.
    pub concavity: Option<SignProfile>,
    /// `c^(-(n-1)/d)`, the normalization of `V`.
    pub volume_scale: AlgebraicValue,
}

impl PathReport {
    pub fn df_at(&self, t: &Rational) -> AlgebraicValue {
        self.scale.scale(&self.q.eval(t))
    }

    pub fn derivative_sign_at(&self, t: &Rational) -> Sign {
        self.q.derivative().sign_at(t)
    }

    /// `n(n-1)(L_t^(n-2) . E^2) / c^((n-1)/d)` for vertical `E`.
    pub fn concavity_at(&self, t: &Rational) -> Option<AlgebraicValue> {
        self.concavity.as_ref()?;
        let v = self.volume.as_ref()?;
        Some(self.volume_scale.scale(&v.derivative().derivative().eval(t)))
    }
}

/// `sum_j binom(k, j) t^j (L^(k-j) . E^j . rest)`.
fn mixed_polynomial(l: &TorusDivisor, e: &TorusDivisor, k: usize, rest: &[&TorusDivisor]) -> Result<Poly> {
    let mut coeffs = Vec::with_capacity(k + 1);
    let mut binom = BigInt::one();
    for j in 0..=k {
        let mut args = vec![l.clone(); k - j];
        args.extend(std::iter::repeat_n(e.clone(), j));
        args.extend(rest.iter().map(|&x| x.clone()));
        coeffs.push(from_big(binom.clone()) * intersection_number(&args)?);
        binom = binom * BigInt::from(k - j) / BigInt::from(j + 1);
    }
    Ok(Poly::new(coeffs))
}

/// Largest `t` with `L + tE` relatively nef, from the contracted walls.
pub fn nef_threshold(m: &FiberedModel, e: &TorusDivisor) -> Result<Option<Rational>> {
    let l = m.polarization();
    let (sl, se) = (support_function(l)?, support_function(e)?);
    let mut best: Option<Rational> = None;
    for w in m.projection().contracted_walls() {
        let gl = wall_value(l, &sl, w);
        let ge = wall_value(e, &se, w);
        if ge.is_negative() {
            let t = gl / -ge;
            if best.as_ref().is_none_or(|b| &t < b) {
                best = Some(t);
            }
        }
    }
    Ok(best)
}

pub fn df_path(m: &FiberedModel, e: &TorusDivisor) -> Result<PathReport> {
    let s = setup(m)?;
    let n = s.n;
    if **e.fan() != **m.total() {
        return Err(TorickError::MismatchedFans);
    }
    if !s.fiber.is_point() {
        let coeffs = s.fiber.source_rays.iter().map(|&r| e.coeff(r).clone()).collect();
        let ef = TorusDivisor::new(s.fiber.fan.clone(), coeffs)?;
        if principal_character(&ef).is_none() {
            return Err(TorickError::FiberClassChanged(
                "E is not numerically trivial on the generic fiber, so (L_t|_F^dim F) varies with t".into(),
            ));
        }
    }
    let t_max = nef_threshold(m, e)?;
    let l = m.polarization();
    let p1 = mixed_polynomial(l, e, n - 1, &[&s.k])?.scale(&int(n as i64));
    let volume = match volume_polynomial(l, e) {
        Ok(p) => Some(p),
        Err(TorickError::Unsupported(_)) if s.fiber.is_point() => None,
        Err(err) => return Err(err),
    };
    let (scale, q) = if s.fiber.is_point() {
        (AlgebraicValue::from_rational(Rational::one()), p1)
    } else {
        let p2 = volume.as_ref().expect("complete total space").scale(&(int(n as i64 - 1) * s.fiber_slope()?));
        (s.c_pow(s.b as i64 - 1)?, p1.scale(&s.c).sub(&p2))
    };
    let df = q.coeffs().iter().map(|x| scale.scale(x)).collect();
    let derivative = q.derivative().sign_profile(&Rational::zero(), t_max.as_ref());
    let concavity = match (&volume, m.check_vertical(e)) {
        (Some(v), Ok(())) => Some(v.derivative().derivative().sign_profile(&Rational::zero(), t_max.as_ref())),
        _ => None,
    };
    let a = fiber_proportionality(m)?;
    let a = a.filter(|a| {
        relative_canonical(m.projection())
            .and_then(|k| k.add_scaled(&-a.clone(), l))
            .is_ok_and(|c| c == *e)
    });
    Ok(PathReport {
        model: m.id.clone(),
        direction: e.coeffs().to_vec(),
        a,
        t_max,
        df,
        scale,
        nonincreasing: derivative.nonpositive(),
        derivative,
        q,
        volume,
        concavity,
        volume_scale: s.c_pow(-(n as i64 - 1))?,
    })
}

/// `n(n-1)(L^(n-2) . E^2) / c^((n-1)/d)` for vertical `E`, with its sign.
pub fn concavity_certificate(m: &FiberedModel, e: &TorusDivisor) -> Result<(AlgebraicValue, Sign)> {
    m.check_vertical(e)?;
    let s = setup(m)?;
    let n = s.n;
    if n < 2 {
        return Err(TorickError::InvalidArgument("concavity needs dimension at least 2".into()));
    }
    let raw = int((n * (n - 1)) as i64) * power_with(m.polarization(), n - 2, &[e, e])?;
    let v = s.c_pow(-(n as i64 - 1))?.scale(&raw);
    let sign = v.sign();
    Ok((v, sign))
}

/// `(L^(n-2) . E . pi^*H)` for `H` the ample class of the base.
pub fn base_pairing(m: &FiberedModel, e: &TorusDivisor) -> Result<Rational> {
    let h = ample_class(m.base())?;
    let ph = pullback_along(m.projection(), &h)?;
    power_with(m.polarization(), m.dim() - 2, &[e, &ph])
}

fn require_curve(m: &FiberedModel) -> Result<()> {
    if m.base_dim() != 1 {
        return Err(TorickError::BaseNotCurve(m.base_dim()));
    }
    Ok(())
}

/// `DF / degree` for a model obtained by a base change of the given degree.
pub fn ndf(m: &FiberedModel, degree: u32) -> Result<AlgebraicValue> {
    require_curve(m)?;
    if degree == 0 {
        return Err(TorickError::InvalidArgument("base change degree must be positive".into()));
    }
    Ok(donaldson_futaki(m)?.df.scale(&Rational::new(BigInt::one(), BigInt::from(degree))))
}

/// Normalized pullback along the degree-`d` cover of the base curve that is
/// totally ramified over its two fixed points.
pub fn base_change(m: &FiberedModel, d: u32) -> Result<FiberedModel> {
    require_curve(m)?;
    if d == 0 {
        return Err(TorickError::InvalidArgument("base change degree must be positive".into()));
    }
    let total = m.total();
    let n = total.rank();
    let row = m.projection().matrix()[0].clone();
    let d = i64::from(d);
    let (rank, u) = column_reduce(std::slice::from_ref(&row), n);
    if rank == 0 {
        return Err(TorickError::NonDominant { rank: 0, base_rank: 1 });
    }
    let mut u0: Vec<i64> = u.iter().map(|r| r[0]).collect();
    let mut g: i64 = row.iter().zip(&u0).map(|(a, b)| a * b).sum();
    if g < 0 {
        u0.iter_mut().for_each(|x| *x = -*x);
        g = -g;
    }
    // basis of {v : d | pi(v)}: the kernel and (d / gcd(d, g)) u0
    let step = d / d.gcd(&g);
    let mut basis = integer_kernel(std::slice::from_ref(&row), n);
    basis.push(u0.iter().map(|x| x * step).collect());
    let cols: Vec<Vec<Rational>> = (0..n).map(|i| basis.iter().map(|b| int(b[i])).collect()).collect();
    let mut rays = Vec::with_capacity(total.num_rays());
    let mut scale = Vec::with_capacity(total.num_rays());
    for v in total.rays() {
        let h: i64 = row.iter().zip(v).map(|(a, b)| a * b).sum();
        let k = d / d.gcd(&h);
        let w: Vec<i64> = v.iter().map(|x| x * k).collect();
        let x = solve(&cols, &to_rat_vec(&w)).expect("basis of the fibre-product lattice");
        rays.push(x.iter().map(|c| c.to_integer().try_into().expect("small coordinates")).collect::<Vec<i64>>());
        scale.push(int(k));
    }
    let mut fan = Fan::new(n, rays, total.max_cones().to_vec())?;
    if let Some(a) = total.ample_witness() {
        fan = fan.with_ample(a.iter().zip(&scale).map(|(x, k)| x * k).collect())?;
    }
    let fan = Arc::new(fan);
    let mut matrix = vec![0i64; n];
    matrix[n - 1] = g * step / d;
    let pi = ToricMorphism::new(vec![matrix], fan.clone(), m.base().clone())?;
    let coeffs = m.polarization().coeffs().iter().zip(&scale).map(|(x, k)| x * k).collect();
    let l = TorusDivisor::new(fan, coeffs)?;
    FiberedModel::new(format!("{}/bc{d}", m.id), pi, l, m.marked().to_vec())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberComponent {
    pub ray: usize,
    pub vector: Vec<i64>,
    pub multiplicity: i64,
}

/// Lattice heights over the marked base ray of the rays above it.
pub fn central_fiber_multiplicities(m: &FiberedModel) -> Result<Vec<FiberComponent>> {
    require_curve(m)?;
    let w = m.base().ray(m.marked()[0])[0];
    Ok(m
        .vertical_rays()
        .into_iter()
        .map(|r| {
            let v = m.total().ray(r).to_vec();
            let h = m.projection().apply(&v)[0] / w;
            FiberComponent { ray: r, vector: v, multiplicity: h }
        })
        .collect())
}

pub fn is_reduced(components: &[FiberComponent]) -> bool {
    components.iter().all(|c| c.multiplicity == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fan(rays: Vec<Vec<i64>>, cones: Vec<Vec<usize>>) -> Arc<Fan> {
        Arc::new(Fan::new(rays[0].len(), rays, cones).unwrap())
    }

    fn p1() -> Arc<Fan> {
        fan(vec![vec![1], vec![-1]], vec![vec![0], vec![1]])
    }

    fn p1xp1(l: &[i64]) -> FiberedModel {
        let total = fan(
            vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        );
        let pi = ToricMorphism::new(vec![vec![0, 1]], total.clone(), p1()).unwrap();
        FiberedModel::new("p1xp1", pi, TorusDivisor::from_ints(total, l).unwrap(), vec![0]).unwrap()
    }

    #[test]
    fn product_surface() {
        let m = p1xp1(&[1, 1, 0, 0]);
        let r = donaldson_futaki(&m).unwrap();
        assert_eq!(r.term1, AlgebraicValue::from_rational(int(-4)));
        assert_eq!(r.term2, AlgebraicValue::from_rational(int(-4)));
        assert!(r.df.is_zero());
        assert_eq!(r.volume, Some(AlgebraicValue::from_rational(int(2))));
        assert!(df_via_derivative(&m).unwrap().is_zero());
        assert_eq!(normalized_volume_v(&p1xp1(&[3, 3, 0, 0])).unwrap(), AlgebraicValue::from_rational(int(6)));
    }

    #[test]
    fn nonproduct_polarization_changes_df() {
        let m = p1xp1(&[1, 2, 0, 0]);
        let r = donaldson_futaki(&m).unwrap();
        assert_eq!(r.df, df_via_derivative(&m).unwrap());
        let m2 = p1xp1(&[2, 1, 0, 0]);
        let r2 = donaldson_futaki(&m2).unwrap();
        assert_eq!(r2.c, int(2));
        assert_eq!(r2.df, df_via_derivative(&m2).unwrap());
    }

    #[test]
    fn canonical_direction_on_product() {
        let m = p1xp1(&[1, 1, 0, 0]);
        let (a, e) = canonical_direction(&m).unwrap();
        assert_eq!(a, int(-2));
        // K_{X/B} + 2L = -D0 - D2 + 2D0 + 2D1 ~ 2 D1 (vertical)
        let p = df_path(&m, &e).unwrap();
        assert_eq!(p.a, Some(int(-2)));
        assert!(p.nonincreasing);
        assert!(p.q.coeff(0).is_zero());
        let zero = TorusDivisor::zero(m.total().clone());
        let flat = df_path(&m, &zero).unwrap();
        assert_eq!(flat.t_max, None);
        assert_eq!(flat.q.degree().unwrap_or(0), 0);
        let wrong = TorusDivisor::from_ints(m.total().clone(), &[1, 0, 0, 0]).unwrap();
        assert!(matches!(df_path(&m, &wrong), Err(TorickError::FiberClassChanged(_))));
    }

    #[test]
    fn base_change_of_non_reduced_fibre() {
        let m = p1xp1(&[1, 1, 0, 0]).refine(&[1, 2]).unwrap();
        let mut l = m.polarization().scale(&int(2));
        l = l.sub(&TorusDivisor::prime(m.total().clone(), 4)).unwrap();
        let m = m.with_polarization(l).unwrap();
        let mult = central_fiber_multiplicities(&m).unwrap();
        assert!(!is_reduced(&mult));
        assert_eq!(mult.iter().map(|c| c.multiplicity).max(), Some(2));
        let bc = base_change(&m, 2).unwrap();
        assert!(is_reduced(&central_fiber_multiplicities(&bc).unwrap()));
        assert_eq!(ndf(&m, 1).unwrap(), AlgebraicValue::from_rational(int(3)));
        assert_eq!(ndf(&bc, 2).unwrap(), AlgebraicValue::from_rational(int(1)));

        let prod = p1xp1(&[1, 1, 0, 0]);
        let bc = base_change(&prod, 2).unwrap();
        assert!(ndf(&bc, 2).unwrap().is_zero());
        assert_eq!(bc.total().rays(), prod.total().rays());
    }
}
