//! Univariate polynomials over the rationals with exact real-root isolation.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{format_rational, int, sign_of, Rational, Sign};

/// Coefficients stored lowest degree first, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    #[serde(with = "super::rational::serde_rational_vec")]
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// `x`
    pub fn x() -> Self {
        Poly::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as i64))
                .collect(),
        )
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.coeffs.len() - 1;
        let lead_inv = d.leading().recip();
        let mut r = self.coeffs.clone();
        let mut q = vec![Rational::zero(); r.len().saturating_sub(dd).max(1)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let f = r.last().unwrap() * &lead_inv;
            for (j, c) in d.coeffs.iter().enumerate() {
                let delta = &f * c;
                r[k + j] -= delta;
            }
            q[k] = f;
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        (Poly::new(q), Poly::new(r))
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.leading().recip())
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn sign_at(&self, x: &Rational) -> Sign {
        sign_of(&self.eval(x))
    }

    /// Sign as `x -> +infinity`.
    pub fn sign_at_infinity(&self) -> Sign {
        sign_of(&self.leading())
    }

    /// Cauchy bound: every real root has absolute value below it.
    pub fn root_bound(&self) -> Rational {
        let lead = self.leading().abs();
        let m = self
            .coeffs
            .iter()
            .take(self.coeffs.len().saturating_sub(1))
            .map(|c| c.abs() / &lead)
            .max()
            .unwrap_or_else(Rational::zero);
        m + Rational::one()
    }

    fn squarefree(&self) -> Poly {
        let g = self.gcd(&self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            self.monic()
        } else {
            self.div_rem(&g).0.monic()
        }
    }

    /// Sign analysis on `[lo, hi]` (`hi = None` means `+infinity`).
    pub fn sign_profile(&self, lo: &Rational, hi: Option<&Rational>) -> SignProfile {
        if self.is_zero() {
            return SignProfile {
                lo: lo.clone(),
                hi: hi.cloned(),
                roots: Vec::new(),
                pieces: vec![Sign::Zero],
                at_lo: Sign::Zero,
                at_hi: Sign::Zero,
            };
        }
        let sf = self.squarefree();
        let top = match hi {
            Some(h) => h.clone(),
            None => {
                let b = sf.root_bound();
                if &b > lo {
                    b
                } else {
                    lo + Rational::one()
                }
            }
        };
        let mut roots = Vec::new();
        if sf.eval(lo).is_zero() {
            roots.push(RootEnclosure::exact(lo.clone()));
        }
        if &top > lo {
            let sturm = SturmChain::new(&sf);
            isolate(&sf, &sturm, lo.clone(), top.clone(), &mut roots);
        }
        roots.sort_by(|a, b| a.lo.cmp(&b.lo));

        let mut pieces = Vec::new();
        let degenerate = hi.is_some_and(|h| h <= lo);
        if !degenerate {
            // gap k lies between boundary k-1 and boundary k, where the
            // boundaries are [domain start, roots..., domain end]
            let starts_at_root = roots.first().is_some_and(|r| r.is_exact() && &r.lo == lo);
            let ends_at_root = hi.is_some_and(|h| roots.last().is_some_and(|r| r.is_exact() && &r.hi == h));
            let mut left: Option<&RootEnclosure> = None;
            let skip = usize::from(starts_at_root);
            if starts_at_root {
                left = roots.first();
            }
            for k in skip..=roots.len() {
                let right = roots.get(k);
                if right.is_none() && ends_at_root {
                    break;
                }
                let sample = match left {
                    None => lo.clone(),
                    Some(l) if !l.is_exact() => l.hi.clone(),
                    Some(l) => match right {
                        Some(r) if r.is_exact() => (&l.hi + &r.lo) / int(2),
                        Some(r) => r.lo.clone(),
                        None => match hi {
                            Some(h) => h.clone(),
                            None => &l.hi + Rational::one(),
                        },
                    },
                };
                pieces.push(self.sign_at(&sample));
                left = right;
            }
        }
        let at_lo = self.sign_at(lo);
        let at_hi = match hi {
            Some(h) => self.sign_at(h),
            None => self.sign_at_infinity(),
        };
        SignProfile {
            lo: lo.clone(),
            hi: hi.cloned(),
            roots,
            pieces,
            at_lo,
            at_hi,
        }
    }
}

fn isolate(p: &Poly, sturm: &SturmChain, a: Rational, b: Rational, out: &mut Vec<RootEnclosure>) {
    // roots in (a, b]
    let count = sturm.count(&a, &b);
    if count == 0 {
        return;
    }
    if p.eval(&b).is_zero() {
        out.push(RootEnclosure::exact(b.clone()));
        isolate_open_right(p, sturm, a, b, out);
        return;
    }
    if count == 1 {
        let (mut lo, mut hi) = (a, b);
        while p.eval(&lo).is_zero() {
            let mid = (&lo + &hi) / int(2);
            if p.eval(&mid).is_zero() {
                out.push(RootEnclosure::exact(mid));
                return;
            }
            if sturm.count(&mid, &hi) == 1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(RootEnclosure { lo, hi });
        return;
    }
    let mid = (&a + &b) / int(2);
    isolate(p, sturm, a, mid.clone(), out);
    isolate(p, sturm, mid, b, out);
}

fn isolate_open_right(p: &Poly, sturm: &SturmChain, a: Rational, b: Rational, out: &mut Vec<RootEnclosure>) {
    // roots in (a, b), where b itself is a root
    if sturm.count(&a, &b) <= 1 {
        return;
    }
    let mid = (&a + &b) / int(2);
    isolate(p, sturm, a, mid.clone(), out);
    isolate_open_right(p, sturm, mid, b, out);
}

/// Either an exact rational root (`lo == hi`) or an open interval holding
/// exactly one root, with non-root endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootEnclosure {
    #[serde(with = "crate::exact::rational::serde_rational")]
    pub lo: Rational,
    #[serde(with = "crate::exact::rational::serde_rational")]
    pub hi: Rational,
}

impl RootEnclosure {
    fn exact(x: Rational) -> Self {
        RootEnclosure { lo: x.clone(), hi: x }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

/// Sign structure of a polynomial on a closed interval: the distinct roots
/// inside it and the constant sign on each open piece between them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignProfile {
    #[serde(with = "crate::exact::rational::serde_rational")]
    pub lo: Rational,
    #[serde(with = "crate::exact::rational::serde_rational_opt")]
    pub hi: Option<Rational>,
    pub roots: Vec<RootEnclosure>,
    pub pieces: Vec<Sign>,
    pub at_lo: Sign,
    pub at_hi: Sign,
}

impl SignProfile {
    pub fn nonpositive(&self) -> bool {
        self.at_lo <= Sign::Zero
            && self.at_hi <= Sign::Zero
            && self.pieces.iter().all(|&s| s <= Sign::Zero)
    }

    pub fn nonnegative(&self) -> bool {
        self.at_lo >= Sign::Zero
            && self.at_hi >= Sign::Zero
            && self.pieces.iter().all(|&s| s >= Sign::Zero)
    }
}

struct SturmChain {
    chain: Vec<Poly>,
}

impl SturmChain {
    fn new(p: &Poly) -> Self {
        let mut chain = vec![p.clone(), p.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r.scale(&-Rational::one()));
        }
        SturmChain { chain }
    }

    fn variations(&self, x: &Rational) -> usize {
        let signs: Vec<Sign> = self
            .chain
            .iter()
            .map(|q| q.sign_at(x))
            .filter(|&s| s != Sign::Zero)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Number of distinct roots in `(a, b]`.
    fn count(&self, a: &Rational, b: &Rational) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format_rational(c),
                1 => format!("{}*t", format_rational(c)),
                _ => format!("{}*t^{}", format_rational(c), k),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::rat;

    fn p(c: &[i64]) -> Poly {
        Poly::new(c.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn division_and_gcd() {
        // (x-1)(x-2) and (x-1)(x+3)
        let a = p(&[2, -3, 1]);
        let b = p(&[-3, 2, 1]);
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
        let (q, r) = a.div_rem(&p(&[-1, 1]));
        assert_eq!(q, p(&[-2, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn profile_of_cubic_on_interval() {
        // (x - 1/2)(x - 2)(x - 3) on [0, 5/2]
        let f = Poly::new(vec![rat(-3, 1), rat(17, 2), rat(-11, 2), int(1)]);
        let prof = f.sign_profile(&int(0), Some(&rat(5, 2)));
        assert_eq!(prof.roots.len(), 2);
        assert_eq!(prof.pieces, vec![Sign::Negative, Sign::Positive, Sign::Negative]);
        assert!(!prof.nonpositive());
    }

    #[test]
    fn profile_with_root_at_left_end_and_infinity() {
        // -x^2 on [0, inf)
        let f = p(&[0, 0, -1]);
        let prof = f.sign_profile(&int(0), None);
        assert_eq!(prof.roots, vec![RootEnclosure::exact(int(0))]);
        assert_eq!(prof.pieces, vec![Sign::Negative]);
        assert!(prof.nonpositive());
    }

    #[test]
    fn irrational_roots_get_enclosures() {
        // x^2 - 2 on [0, 4]
        let f = p(&[-2, 0, 1]);
        let prof = f.sign_profile(&int(0), Some(&int(4)));
        assert_eq!(prof.roots.len(), 1);
        let r = &prof.roots[0];
        assert!(!r.is_exact());
        assert!(&r.lo * &r.lo < int(2) && &r.hi * &r.hi > int(2));
        assert_eq!(prof.pieces, vec![Sign::Negative, Sign::Positive]);
    }

    #[test]
    fn double_roots_do_not_split_signs() {
        // -(x-1)^2 on [0,3]
        let f = p(&[-1, 2, -1]);
        let prof = f.sign_profile(&int(0), Some(&int(3)));
        assert_eq!(prof.roots.len(), 1);
        assert!(prof.roots[0].lo < int(1) && prof.roots[0].hi > int(1));
        assert_eq!(prof.pieces, vec![Sign::Negative, Sign::Negative]);
        assert!(prof.nonpositive());
    }
}
