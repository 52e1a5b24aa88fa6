//! Elements of Q[c^(1/q)] for a positive integer c, with exact sign.
//!
//! Values are kept canonical: the q-th power part of c is pulled into the
//! coefficients and q is reduced until x^q - c is irreducible over Q (for
//! positive c that happens exactly when c is not a p-th power for any prime
//! p dividing q). Canonical forms of equal values are structurally equal.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::poly::Poly;
use super::rational::{format_rational, from_big, sign_of, to_f64, Rational, Sign};
use crate::error::{Result, TorickError};

#[derive(Debug, Clone)]
pub struct AlgebraicValue {
    base: BigUint,
    root_index: u32,
    /// `coeffs[i]` multiplies `base^(i / root_index)`
    coeffs: Vec<Rational>,
}

impl AlgebraicValue {
    pub fn from_rational(r: Rational) -> Self {
        AlgebraicValue {
            base: BigUint::one(),
            root_index: 1,
            coeffs: vec![r],
        }
    }

    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    /// Build from raw parts and canonicalize.
    pub fn from_parts(base: BigUint, root_index: u32, coeffs: Vec<Rational>) -> Result<Self> {
        if root_index == 0 {
            return Err(TorickError::InvalidArgument("root index must be positive".into()));
        }
        if base.is_zero() {
            return Err(TorickError::InvalidArgument("base must be positive".into()));
        }
        if coeffs.len() > root_index as usize {
            return Err(TorickError::InvalidArgument(format!(
                "{} coefficients for root index {root_index}",
                coeffs.len()
            )));
        }
        let mut acc = Self::zero();
        for (i, a) in coeffs.into_iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let term = Self::integer_root_power(&base, i as i64, root_index).scale(&a);
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// `c^(k/q)` for a positive rational `c`.
    pub fn root_power(c: &Rational, k: i64, q: u32) -> Result<Self> {
        if !c.is_positive() {
            return Err(TorickError::InvalidArgument(format!(
                "base {} of a fractional power must be positive",
                format_rational(c)
            )));
        }
        if q == 0 {
            return Err(TorickError::InvalidArgument("root index must be positive".into()));
        }
        // (r/s)^(1/q) = (r s^(q-1))^(1/q) / s
        let r = c.numer().to_biguint().expect("positive");
        let s = c.denom().to_biguint().expect("positive");
        let big_c = &r * Pow::pow(&s, q - 1);
        let v = Self::integer_root_power(&big_c, k, q);
        let s_pow = rational_pow(&from_big(BigInt::from(s)), -k);
        Ok(v.scale(&s_pow))
    }

    fn integer_root_power(c: &BigUint, k: i64, q: u32) -> Self {
        let (outer, radicand, root) = canonical_radical(c, q);
        // c^(1/q) = outer * radicand^(1/root)
        let outer_pow = rational_pow(&from_big(BigInt::from(outer)), k);
        let root_i = root as i64;
        let whole = k.div_euclid(root_i);
        let frac = k.rem_euclid(root_i) as usize;
        let whole_pow = rational_pow(&from_big(BigInt::from(radicand.clone())), whole);
        let mut coeffs = vec![Rational::zero(); root as usize];
        coeffs[frac] = outer_pow * whole_pow;
        AlgebraicValue {
            base: if root == 1 { BigUint::one() } else { radicand },
            root_index: root,
            coeffs,
        }
        .trimmed()
    }

    fn trimmed(mut self) -> Self {
        if self.root_index > 1 && self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            let c0 = self.coeffs.swap_remove(0);
            return Self::from_rational(c0);
        }
        self
    }

    pub fn base(&self) -> &BigUint {
        &self.base
    }

    pub fn root_index(&self) -> u32 {
        self.root_index
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_rational(&self) -> bool {
        self.root_index == 1
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.coeffs[0].clone())
    }

    pub fn is_zero(&self) -> bool {
        if self.coeffs.iter().all(|c| c.is_zero()) {
            return true;
        }
        if self.is_rational() {
            return false;
        }
        // gcd with x^q - c; the real root c^(1/q) lies in (1, c)
        let p = Poly::new(self.coeffs.clone());
        let mut m = vec![Rational::zero(); self.root_index as usize + 1];
        m[0] = -from_big(BigInt::from(self.base.clone()));
        m[self.root_index as usize] = Rational::one();
        let g = p.gcd(&Poly::new(m));
        if g.degree().unwrap_or(0) == 0 {
            return false;
        }
        let lo = Rational::one();
        let hi = from_big(BigInt::from(self.base.clone()));
        g.sign_at(&lo) != g.sign_at(&hi)
    }

    fn compatible_ring(&self, other: &Self) -> Result<(BigUint, u32)> {
        match (self.is_rational(), other.is_rational()) {
            (true, true) => Ok((BigUint::one(), 1)),
            (true, false) => Ok((other.base.clone(), other.root_index)),
            (false, true) => Ok((self.base.clone(), self.root_index)),
            (false, false) => {
                if self.base == other.base && self.root_index == other.root_index {
                    Ok((self.base.clone(), self.root_index))
                } else {
                    Err(TorickError::IncompatibleBase {
                        left_base: self.base.to_string(),
                        left_root: self.root_index,
                        right_base: other.base.to_string(),
                        right_root: other.root_index,
                    })
                }
            }
        }
    }

    fn padded(&self, q: u32) -> Vec<Rational> {
        let mut c = self.coeffs.clone();
        c.resize(q as usize, Rational::zero());
        c
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let (base, q) = self.compatible_ring(other)?;
        let a = self.padded(q);
        let b = other.padded(q);
        Ok(AlgebraicValue {
            base,
            root_index: q,
            coeffs: a.iter().zip(&b).map(|(x, y)| x + y).collect(),
        }
        .trimmed())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (base, q) = self.compatible_ring(other)?;
        let a = self.padded(q);
        let b = other.padded(q);
        let c = from_big(BigInt::from(base.clone()));
        let qn = q as usize;
        let mut out = vec![Rational::zero(); qn];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let k = i + j;
                if k >= qn {
                    out[k - qn] += x * y * &c;
                } else {
                    out[k] += x * y;
                }
            }
        }
        Ok(AlgebraicValue {
            base,
            root_index: q,
            coeffs: out,
        }
        .trimmed())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        AlgebraicValue {
            base: self.base.clone(),
            root_index: self.root_index,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
        .trimmed()
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    /// Exact sign of the real number obtained at the positive real root.
    pub fn sign(&self) -> Sign {
        if self.is_rational() {
            return sign_of(&self.coeffs[0]);
        }
        if self.is_zero() {
            return Sign::Zero;
        }
        let c = from_big(BigInt::from(self.base.clone()));
        let q = self.root_index;
        // the root lies in (lo, hi) with lo^q < c < hi^q
        let mut lo = Rational::one();
        let mut hi = c.clone();
        loop {
            let (vlo, vhi) = self.enclose(&lo, &hi);
            if vlo.is_positive() {
                return Sign::Positive;
            }
            if vhi.is_negative() {
                return Sign::Negative;
            }
            let mid = (&lo + &hi) / Rational::from_integer(BigInt::from(2));
            let mq = rational_pow(&mid, q as i64);
            if mq < c {
                lo = mid;
            } else {
                // mq == c is impossible: c is not a q-th power
                hi = mid;
            }
        }
    }

    /// Interval containing the value when the root lies in `[lo, hi]`, `lo > 0`.
    fn enclose(&self, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
        let mut plo = Rational::one();
        let mut phi = Rational::one();
        let mut low = Rational::zero();
        let mut high = Rational::zero();
        for a in &self.coeffs {
            if a.is_positive() {
                low += a * &plo;
                high += a * &phi;
            } else if a.is_negative() {
                low += a * &phi;
                high += a * &plo;
            }
            plo *= lo;
            phi *= hi;
        }
        (low, high)
    }

    pub fn to_f64(&self) -> f64 {
        let base = self.base.to_f64().unwrap_or(f64::INFINITY);
        let alpha = base.powf(1.0 / self.root_index as f64);
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| to_f64(c) * alpha.powi(i as i32))
            .sum()
    }

    /// Structural equality of canonical forms, which is value equality.
    pub fn value_eq(&self, other: &Self) -> bool {
        match self.sub(other) {
            Ok(d) => d.is_zero(),
            Err(_) => false,
        }
    }
}

impl PartialEq for AlgebraicValue {
    fn eq(&self, other: &Self) -> bool {
        self.value_eq(other)
    }
}

impl From<Rational> for AlgebraicValue {
    fn from(r: Rational) -> Self {
        AlgebraicValue::from_rational(r)
    }
}

impl fmt::Display for AlgebraicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", format_rational(&self.coeffs[0]));
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format_rational(c),
                _ => format!("{}*{}^({}/{})", format_rational(c), self.base, i, self.root_index),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0/1")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

pub fn rational_pow(x: &Rational, k: i64) -> Rational {
    if k >= 0 {
        Pow::pow(x, k as u64)
    } else {
        Pow::pow(&x.recip(), k.unsigned_abs())
    }
}

/// `c^(1/q) = outer * radicand^(1/root)` with `x^root - radicand` irreducible.
fn canonical_radical(c: &BigUint, q: u32) -> (BigUint, BigUint, u32) {
    if q == 1 || c.is_one() {
        return (c.clone(), BigUint::one(), 1);
    }
    let Some(factors) = factor(c) else {
        // too large to factor; strip a perfect q-th power only
        let r = c.nth_root(q);
        if Pow::pow(&r, q) == *c {
            return (r, BigUint::one(), 1);
        }
        return (BigUint::one(), c.clone(), q);
    };
    let mut outer = BigUint::one();
    let mut residual: Vec<(u64, u32)> = Vec::new();
    for (p, e) in factors {
        let whole = e / q;
        let rest = e % q;
        if whole > 0 {
            outer *= Pow::pow(&BigUint::from(p), whole);
        }
        if rest > 0 {
            residual.push((p, rest));
        }
    }
    if residual.is_empty() {
        return (outer, BigUint::one(), 1);
    }
    let g = residual.iter().fold(q, |g, &(_, e)| g.gcd(&e));
    let root = q / g;
    let mut radicand = BigUint::one();
    for (p, e) in residual {
        radicand *= Pow::pow(&BigUint::from(p), e / g);
    }
    (outer, radicand, root)
}

/// Trial-division factorization for values that fit in 64 bits.
fn factor(c: &BigUint) -> Option<Vec<(u64, u32)>> {
    let mut n = c.to_u64()?;
    if n > (1u64 << 50) {
        return None;
    }
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    Some(out)
}

impl Serialize for AlgebraicValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire {
            base: serde_json::Value,
            root_index: u32,
            coeffs: Vec<String>,
            text: String,
        }
        let base = match self.base.to_u64() {
            Some(b) => serde_json::Value::from(b),
            None => serde_json::Value::from(self.base.to_string()),
        };
        Wire {
            base,
            root_index: self.root_index,
            coeffs: self.coeffs.iter().map(format_rational).collect(),
            text: self.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlgebraicValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            base: serde_json::Value,
            root_index: u32,
            #[serde(with = "crate::exact::rational::serde_rational_vec")]
            coeffs: Vec<Rational>,
            #[serde(default)]
            #[allow(dead_code)]
            text: Option<String>,
        }
        let w = Wire::deserialize(d)?;
        let base = match &w.base {
            serde_json::Value::Number(n) => n
                .as_u64()
                .map(BigUint::from)
                .ok_or_else(|| D::Error::custom("base must be a positive integer"))?,
            serde_json::Value::String(s) => s
                .parse::<BigUint>()
                .map_err(|_| D::Error::custom("base must be a positive integer"))?,
            _ => return Err(D::Error::custom("base must be a positive integer")),
        };
        AlgebraicValue::from_parts(base, w.root_index, w.coeffs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, rat};

    fn val(c: u64, q: u32, coeffs: &[Rational]) -> AlgebraicValue {
        AlgebraicValue::from_parts(BigUint::from(c), q, coeffs.to_vec()).unwrap()
    }

    #[test]
    fn square_root_squares_to_base() {
        let s = val(5, 2, &[int(0), int(1)]);
        assert_eq!(s.mul(&s).unwrap().to_rational(), Some(int(5)));
    }

    #[test]
    fn cancellation_collapses_to_rational() {
        let a = val(5, 2, &[int(1), int(1)]);
        let b = val(5, 2, &[int(2), int(-1)]);
        assert_eq!(a.add(&b).unwrap().to_rational(), Some(int(3)));
    }

    #[test]
    fn cube_root_product_reduces_exponent() {
        let a = val(7, 3, &[int(0), int(2)]);
        let b = val(7, 3, &[int(0), int(0), int(3)]);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.to_rational(), Some(int(42)));
        let float = (2.0 * 7f64.powf(1.0 / 3.0)) * (3.0 * 7f64.powf(2.0 / 3.0));
        assert!((float - 42.0).abs() < 1e-9);
    }

    #[test]
    fn sign_examples() {
        assert_eq!(val(4, 2, &[int(-5), int(3)]).sign(), Sign::Positive);
        assert_eq!(AlgebraicValue::zero().sign(), Sign::Zero);
        assert_eq!(val(2, 2, &[int(-5), int(3)]).sign(), Sign::Negative);
    }

    #[test]
    fn perfect_powers_collapse() {
        let v = val(8, 3, &[int(1), int(1)]);
        assert!(v.is_rational());
        assert_eq!(v.to_rational(), Some(int(3)));
        // 4^(1/4) = 2^(1/2)
        let w = val(4, 4, &[int(0), int(1)]);
        assert_eq!(w.root_index(), 2);
        assert_eq!(w.base(), &BigUint::from(2u32));
        // 24^(1/2) = 2 * 6^(1/2)
        let x = val(24, 2, &[int(0), int(1)]);
        assert_eq!(x, val(6, 2, &[int(0), int(2)]));
    }

    #[test]
    fn rational_bases_and_negative_exponents() {
        // (3/2)^(-1/2) = sqrt(6)/3
        let v = AlgebraicValue::root_power(&rat(3, 2), -1, 2).unwrap();
        assert_eq!(v, val(6, 2, &[int(0), rat(1, 3)]));
        assert!((v.to_f64() - 1.5f64.powf(-0.5)).abs() < 1e-12);
        // 6^(3/2) = 6 * 6^(1/2)
        let w = AlgebraicValue::root_power(&int(6), 3, 2).unwrap();
        assert_eq!(w, val(6, 2, &[int(0), int(6)]));
    }

    #[test]
    fn mixed_bases_are_rejected() {
        let a = val(2, 2, &[int(0), int(1)]);
        let b = val(3, 2, &[int(0), int(1)]);
        assert!(matches!(a.add(&b), Err(TorickError::IncompatibleBase { .. })));
        assert!(a.mul(&AlgebraicValue::from_rational(int(2))).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let v = val(6, 2, &[rat(1, 2), int(-3)]);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"base":6,"root_index":2,"coeffs":["1/2","-3/1"],"text":"1/2 + -3/1*6^(1/2)"}"#);
        let back: AlgebraicValue = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
