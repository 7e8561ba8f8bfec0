//! Exact arithmetic in ℚ(t₁,…,t_k) with commuting derivations.

mod field;
mod poly;
mod ratfunc;

pub use field::{validate_field, BaseField, FieldRejection, KDerivation};
pub use poly::{fmt_rational, gcd, Mono, Poly, Rational};
pub use ratfunc::RatFunc;
