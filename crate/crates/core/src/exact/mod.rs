//! Exact arithmetic: rationals, dense linear algebra, rational polynomials
//! and the value ring Q[c^(1/q)].

pub mod algebraic;
pub mod linalg;
pub mod poly;
pub mod rational;

pub use algebraic::AlgebraicValue;
pub use poly::{Poly, RootEnclosure, SignProfile};
pub use rational::{format_rational, int, parse_rational, rat, Rational, Sign};
