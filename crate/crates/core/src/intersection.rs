//! Intersection numbers of torus-invariant Q-Cartier divisors.
//!
//! On a complete projective fan every argument is split as `A - kH` with `A` nef,
//! the product is expanded multilinearly, and each nef term is a mixed volume
//! of the polytopes `P_A`. Non-complete fans are handled when one argument is
//! supported on rays whose orbit closures are complete, by restricting the
//! remaining arguments to those orbit closures.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::divisors::{nef_decomposition, orbit_restriction, polytope_of, OrbitRestriction, TorusDivisor};
use crate::error::{Result, TorickError};
use crate::exact::poly::Poly;
use crate::exact::rational::from_big;
use crate::exact::Rational;
use crate::polyhedra::{inclusion_exclusion, normalized_volume};
use crate::toric::Fan;

/// `(D_1 ... D_n)` for `n` the rank of the common fan.
pub fn intersection_number(ds: &[TorusDivisor]) -> Result<Rational> {
    let fan = match ds.first() {
        Some(d) => d.fan().clone(),
        None => return Ok(Rational::one()),
    };
    if ds.len() != fan.rank() {
        return Err(TorickError::DimensionMismatch { expected: fan.rank(), got: ds.len() });
    }
    if ds.iter().any(|d| **d.fan() != *fan) {
        return Err(TorickError::MismatchedFans);
    }
    let mut orbits = HashMap::new();
    intersect(&fan, ds, &mut orbits)
}

fn intersect(fan: &Arc<Fan>, ds: &[TorusDivisor], orbits: &mut HashMap<usize, OrbitRestriction>) -> Result<Rational> {
    if ds.is_empty() {
        return Ok(Rational::one());
    }
    if ds.iter().any(TorusDivisor::is_zero) {
        return Ok(Rational::zero());
    }
    if fan.is_complete() {
        match global(ds) {
            Err(TorickError::NoProjectivityWitness) => {}
            other => return other,
        }
    }
    for (j, d) in ds.iter().enumerate() {
        let support = d.support();
        let mut compact = true;
        for &r in &support {
            if let std::collections::hash_map::Entry::Vacant(e) = orbits.entry(r) {
                e.insert(orbit_restriction(fan, r)?);
            }
            compact &= orbits[&r].is_compact();
        }
        if !compact {
            continue;
        }
        let mut total = Rational::zero();
        for &r in &support {
            let orbit = &orbits[&r];
            let rest: Vec<TorusDivisor> = ds
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, e)| orbit.restrict(e))
                .collect::<Result<_>>()?;
            let star = orbit.fan.clone();
            total += d.coeff(r) * intersect(&star, &rest, &mut HashMap::new())?;
        }
        return Ok(total);
    }
    if fan.is_complete() {
        Err(TorickError::NoProjectivityWitness)
    } else {
        Err(TorickError::Unsupported(
            "intersection on a non-complete fan needs an argument supported on complete orbit closures".into(),
        ))
    }
}

fn global(ds: &[TorusDivisor]) -> Result<Rational> {
    let n = ds.len();
    let parts: Vec<(TorusDivisor, TorusDivisor)> = ds.iter().map(nef_decomposition).collect::<Result<_>>()?;
    let mut total = Rational::zero();
    // bit i set: take -B_i instead of A_i
    for choice in 0u32..(1u32 << n) {
        let mut args = Vec::with_capacity(n);
        let mut skip = false;
        for (i, (a, b)) in parts.iter().enumerate() {
            let e = if choice >> i & 1 == 1 { b } else { a };
            if e.is_zero() {
                skip = true;
                break;
            }
            args.push(e);
        }
        if skip {
            continue;
        }
        let term = mixed_nef(&args)?;
        if choice.count_ones() % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    Ok(total)
}

/// `(E^n)` for nef `E`.
fn nef_volume(e: &TorusDivisor) -> Result<Rational> {
    e.fan().cached_volume(e.coeffs(), || Ok(normalized_volume(&polytope_of(e)?)))
}

fn mixed_nef(args: &[&TorusDivisor]) -> Result<Rational> {
    if args.iter().all(|e| e.coeffs() == args[0].coeffs()) {
        return nef_volume(args[0]);
    }
    inclusion_exclusion(args.len(), |mask| {
        let mut sum = TorusDivisor::zero(args[0].fan().clone());
        for (i, e) in args.iter().enumerate() {
            if mask >> i & 1 == 1 {
                sum = sum.add(e)?;
            }
        }
        nef_volume(&sum)
    })
}

/// `((L + tE)^n)` as a polynomial in `t`.
pub fn volume_polynomial(l: &TorusDivisor, e: &TorusDivisor) -> Result<Poly> {
    let n = l.fan().rank();
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut binom = BigInt::one();
    for k in 0..=n {
        let mut args = vec![l.clone(); n - k];
        args.extend(std::iter::repeat_n(e.clone(), k));
        coeffs.push(from_big(binom.clone()) * intersection_number(&args)?);
        binom = binom * BigInt::from(n - k) / BigInt::from(k + 1);
    }
    Ok(Poly::new(coeffs))
}

/// `(D^n)`.
pub fn self_intersection(d: &TorusDivisor) -> Result<Rational> {
    intersection_number(&vec![d.clone(); d.fan().rank()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisors::canonical_divisor;
    use crate::exact::int;

    fn fan(rays: Vec<Vec<i64>>, cones: Vec<Vec<usize>>) -> Arc<Fan> {
        Arc::new(Fan::new(rays[0].len(), rays, cones).unwrap())
    }

    fn p2() -> Arc<Fan> {
        fan(vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1], vec![1, 2], vec![2, 0]])
    }

    fn p1xp1() -> Arc<Fan> {
        fan(
            vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        )
    }

    #[test]
    fn projective_plane() {
        let f = p2();
        let h = TorusDivisor::from_ints(f.clone(), &[0, 0, 1]).unwrap();
        let k = canonical_divisor(&f);
        assert_eq!(intersection_number(&[h.clone(), h.clone()]).unwrap(), int(1));
        assert_eq!(intersection_number(&[h.clone(), k.clone()]).unwrap(), int(-3));
        assert_eq!(self_intersection(&k).unwrap(), int(9));
        let p = volume_polynomial(&h, &k).unwrap();
        assert_eq!(p.coeffs(), &[int(1), int(-6), int(9)]);
    }

    #[test]
    fn quadric_surface() {
        let f = p1xp1();
        let l = TorusDivisor::from_ints(f.clone(), &[1, 1, 0, 0]).unwrap();
        let e = TorusDivisor::from_ints(f.clone(), &[-2, 0, 0, 0]).unwrap();
        assert_eq!(intersection_number(&[l.clone(), e.clone()]).unwrap(), int(-2));
        assert_eq!(volume_polynomial(&l, &e).unwrap().coeffs(), &[int(2), int(-4)]);
        assert!(intersection_number(std::slice::from_ref(&l)).is_err());
    }

    #[test]
    fn local_surface() {
        // the A1 cone subdivided at (1,1): one compact curve of self-intersection -2
        let f = fan(vec![vec![1, 0], vec![1, 1], vec![1, 2]], vec![vec![0, 1], vec![1, 2]]);
        let e = TorusDivisor::prime(f.clone(), 1);
        assert_eq!(intersection_number(&[e.clone(), e.clone()]).unwrap(), int(-2));
        let d0 = TorusDivisor::prime(f.clone(), 0);
        assert_eq!(intersection_number(&[d0.clone(), e.clone()]).unwrap(), int(1));
        assert!(intersection_number(&[d0.clone(), d0]).is_err());
    }
}
