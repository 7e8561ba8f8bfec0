use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::poly::{gcd, integer_normalizer, Poly, Rational};
use crate::error::{Error, Result};

/// Element of ℚ(t₁,…,t_k) in canonical form.
///
/// Canonical form: `gcd(num, den) = 1`, all coefficients of `num` and `den`
/// are integers whose joint content is 1, and the grlex-leading coefficient
/// of `den` is positive. Zero is `0/1`. Structural equality is value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatFunc { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(c: Rational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    /// The generator t_{j+1}.
    pub fn gen(j: usize) -> Self {
        RatFunc { num: Poly::var(j), den: Poly::one() }
    }

    pub fn from_poly(p: Poly) -> Self {
        Self::normalized(p, Poly::one())
    }

    /// `num/den` brought into canonical form.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = gcd(&num, &den);
            if g.is_one() {
                (num, den)
            } else {
                (
                    num.div_exact(&g).expect("gcd divides numerator"),
                    den.div_exact(&g).expect("gcd divides denominator"),
                )
            }
        };
        let mut scale = integer_normalizer(num.terms().map(|(_, c)| c).chain(den.terms().map(|(_, c)| c)));
        if den.leading_coeff().is_negative() {
            scale = -scale;
        }
        RatFunc { num: num.scale(&scale), den: den.scale(&scale) }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The value as a rational number if it involves no generator.
    pub fn as_rational(&self) -> Option<Rational> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(n / d)
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &RatFunc) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        if e == 0 {
            return RatFunc::one();
        }
        Self::normalized(self.num.pow(e), self.den.pow(e))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::normalized(self.num.scale(c), self.den.clone())
    }

    /// Partial derivative with respect to generator `j`.
    pub fn partial(&self, j: usize) -> Self {
        let dn = self.num.partial(j);
        let dd = self.den.partial(j);
        if dd.is_zero() {
            return Self::normalized(dn, self.den.clone());
        }
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        Self::normalized(num, self.den.mul(&self.den))
    }

    /// Highest generator index occurring in numerator or denominator.
    pub fn max_gen(&self) -> Option<usize> {
        self.num.max_var().max(self.den.max_var())
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        let n = self.num.fmt_with(names);
        if self.den.is_one() {
            return n;
        }
        let d = self.den.fmt_with(names);
        let n = if self.num.num_terms() > 1 { format!("({})", n) } else { n };
        let d = if self.den.num_terms() > 1 || !self.den.terms().next().is_some_and(|(m, c)| m.is_one() || c.is_one()) {
            format!("({})", d)
        } else {
            d
        };
        format!("{}/{}", n, d)
    }

    /// Whether `fmt_with` output can be used as a factor without parentheses.
    pub fn is_atomic(&self) -> bool {
        self.den.is_one() && self.num.num_terms() == 1 && {
            let (m, c) = self.num.terms().next().expect("nonzero");
            !c.is_negative() && (m.is_one() || c.is_one())
        }
    }

    pub fn is_negative_unit_like(&self) -> bool {
        self.den.is_one() && self.num.num_terms() == 1 && self.num.leading_coeff().is_negative()
    }
}

impl Default for RatFunc {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(&[]))
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RatFunc::normalized(self.num.add(&rhs.num), self.den.clone());
        }
        let num = self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den));
        RatFunc::normalized(num, self.den.mul(&rhs.den))
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        if self.is_one() {
            return rhs.clone();
        }
        if rhs.is_one() {
            return self.clone();
        }
        // cross-cancel before multiplying to keep the gcds small
        let g1 = if self.den.is_constant() { Poly::one() } else { gcd(&rhs.num, &self.den) };
        let g2 = if rhs.den.is_constant() { Poly::one() } else { gcd(&self.num, &rhs.den) };
        let n1 = self.num.div_exact(&g2).expect("divides");
        let d2 = rhs.den.div_exact(&g2).expect("divides");
        let n2 = rhs.num.div_exact(&g1).expect("divides");
        let d1 = self.den.div_exact(&g1).expect("divides");
        let num = n1.mul(&n2);
        let den = d1.mul(&d2);
        let mut scale =
            integer_normalizer(num.terms().map(|(_, c)| c).chain(den.terms().map(|(_, c)| c)));
        if den.leading_coeff().is_negative() {
            scale = -scale;
        }
        RatFunc { num: num.scale(&scale), den: den.scale(&scale) }
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: RatFunc) -> RatFunc {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl Zero for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
}

impl One for RatFunc {
    fn one() -> Self {
        RatFunc::one()
    }
}
