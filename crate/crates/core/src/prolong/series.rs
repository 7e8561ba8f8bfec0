use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::coeff::{BaseField, RatFunc, Rational};
use crate::diffpoly::{index_add, index_factorial, indices_up_to, order_of, DerIndet, DiffPoly, MultiIndex, PolPoly};

/// Element of R[ε₁,…,ε_m]/(ε)^{r+1} with polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    m: usize,
    r: u32,
    coeffs: BTreeMap<MultiIndex, DiffPoly>,
}

impl TruncatedSeries {
    pub fn zero(m: usize, r: u32) -> Self {
        TruncatedSeries { m, r, coeffs: BTreeMap::new() }
    }

    pub fn constant(m: usize, r: u32, c: DiffPoly) -> Self {
        let mut s = Self::zero(m, r);
        s.set(vec![0; m], c);
        s
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn coeff(&self, xi: &[u32]) -> DiffPoly {
        self.coeffs.get(xi).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&MultiIndex, &DiffPoly)> {
        self.coeffs.iter()
    }

    /// Sets a coefficient; indices beyond the truncation are dropped.
    pub fn set(&mut self, xi: MultiIndex, c: DiffPoly) {
        if order_of(&xi) > self.r || c.is_zero() {
            self.coeffs.remove(&xi);
        } else {
            self.coeffs.insert(xi, c);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (xi, c) in &other.coeffs {
            let s = out.coeff(xi).add(c);
            out.set(xi.clone(), s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.m, self.r.min(other.r));
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                let xi = index_add(a, b);
                if order_of(&xi) > out.r {
                    continue;
                }
                let s = out.coeff(&xi).add(&ca.mul(cb));
                out.set(xi, s);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.m, self.r, DiffPoly::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn scale(&self, c: &DiffPoly) -> Self {
        let mut out = Self::zero(self.m, self.r);
        for (xi, a) in &self.coeffs {
            out.set(xi.clone(), a.mul(c));
        }
        out
    }
}

pub(crate) fn inv_factorial(xi: &[u32]) -> RatFunc {
    RatFunc::from_rational(Rational::new(BigInt::from(1), BigInt::from(index_factorial(xi))))
}

/// e(c) = Σ_{|ξ|≤r} δ^ξ c / ξ! · ε^ξ for c ∈ K.
pub fn exp_coeff(field: &BaseField, c: &RatFunc, r: u32) -> TruncatedSeries {
    let m = field.m();
    let mut s = TruncatedSeries::zero(m, r);
    for xi in indices_up_to(m, r) {
        let d = field.derive_multi(&xi, c);
        s.set(xi.clone(), DiffPoly::constant(&d * &inv_factorial(&xi)));
    }
    s
}

/// x_i ↦ Σ_{|η|≤r} x_i^η ε^η / η!.
pub fn exp_variable(var: usize, m: usize, r: u32) -> TruncatedSeries {
    let mut s = TruncatedSeries::zero(m, r);
    for eta in indices_up_to(m, r) {
        s.set(eta.clone(), DiffPoly::indet(DerIndet::new(var, eta.clone())).scale(&inv_factorial(&eta)));
    }
    s
}

/// The image of an algebraic polynomial in x_1..x_n under the exponential
/// structure; coefficients are polynomials in the jet coordinates x_i^η.
pub fn exp_embed(field: &BaseField, f: &PolPoly, r: u32) -> TruncatedSeries {
    let m = field.m();
    let mut vars: BTreeMap<usize, TruncatedSeries> = BTreeMap::new();
    let mut out = TruncatedSeries::zero(m, r);
    for (mono, c) in f.as_poly().terms() {
        let mut term = exp_coeff(field, c, r);
        for (v, e) in mono.factors() {
            let x = vars.entry(v.var).or_insert_with(|| exp_variable(v.var, m, r));
            term = term.mul(&x.pow(*e));
        }
        out = out.add(&term);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_generators() {
        let k = BaseField::rational_t();
        let t = RatFunc::gen(0);
        let e = exp_coeff(&k, &t, 2);
        assert_eq!(e.coeff(&[0]), DiffPoly::constant(t.clone()));
        assert_eq!(e.coeff(&[1]), DiffPoly::one());
        assert!(e.coeff(&[2]).is_zero());
        let e2 = exp_coeff(&k, &t.pow(2), 2);
        assert_eq!(e2.coeff(&[1]), DiffPoly::constant(&t * &RatFunc::from_int(2)));
        assert_eq!(e2.coeff(&[2]), DiffPoly::one());
        assert_eq!(e2, e.mul(&e));
        let one = exp_coeff(&k, &RatFunc::one(), 3);
        assert_eq!(one, TruncatedSeries::constant(1, 3, DiffPoly::one()));
    }
}
