use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Signed;

use super::indet::{fmt_indet, DerIndet, IndetStyle};
use crate::coeff::{gcd, Poly, RatFunc};

/// Power product of derivative indeterminates, stored with the
/// highest-ranking indeterminate first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(DerIndet, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: DerIndet) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn power(v: DerIndet, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    pub fn from_factors(factors: impl IntoIterator<Item = (DerIndet, u32)>) -> Self {
        let mut acc: BTreeMap<DerIndet, u32> = BTreeMap::new();
        for (v, e) in factors {
            if e > 0 {
                *acc.entry(v).or_insert(0) += e;
            }
        }
        Monomial(acc.into_iter().rev().collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(DerIndet, u32)] {
        &self.0
    }

    pub fn degree_in(&self, v: &DerIndet) -> u32 {
        self.0.iter().find(|(w, _)| w == v).map_or(0, |(_, e)| *e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// The monomial with the exponent of `v` set to `e`.
    pub fn with_degree(&self, v: &DerIndet, e: u32) -> Monomial {
        let rest = self.0.iter().filter(|(w, _)| w != v).cloned();
        Monomial::from_factors(rest.chain(std::iter::once((v.clone(), e))))
    }

    pub fn fmt_with(&self, style: IndetStyle<'_>) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| {
                let s = fmt_indet(v, style);
                match (*e, s.contains(' ')) {
                    (1, _) => s,
                    (e, true) => format!("({})^{}", s, e),
                    (e, false) => format!("{}^{}", s, e),
                }
            })
            .collect();
        parts.join("*")
    }
}

/// Sparse differential polynomial with coefficients in K.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DiffPoly {
    terms: BTreeMap<Monomial, RatFunc>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn one() -> Self {
        Self::constant(RatFunc::one())
    }

    pub fn constant(c: RatFunc) -> Self {
        Self::monomial(Monomial::one(), c)
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(RatFunc::from_int(n))
    }

    pub fn indet(v: DerIndet) -> Self {
        Self::monomial(Monomial::var(v), RatFunc::one())
    }

    pub fn monomial(m: Monomial, c: RatFunc) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        DiffPoly { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, RatFunc)>) -> Self {
        let mut p = DiffPoly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn as_constant(&self) -> Option<RatFunc> {
        match self.terms.len() {
            0 => Some(RatFunc::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &RatFunc)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: RatFunc) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = &*e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &DiffPoly) -> DiffPoly {
        let (mut big, small) = if self.terms.len() >= other.terms.len() { (self.clone(), other) } else { (other.clone(), self) };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub fn sub(&self, other: &DiffPoly) -> DiffPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> DiffPoly {
        DiffPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn scale(&self, c: &RatFunc) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        DiffPoly { terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn mul(&self, other: &DiffPoly) -> DiffPoly {
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        let mut out = DiffPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &RatFunc) -> DiffPoly {
        DiffPoly::from_terms(self.terms.iter().map(|(k, a)| (k.mul(m), a * c)))
    }

    pub fn pow(&self, e: u32) -> DiffPoly {
        let mut acc = DiffPoly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn map_coeffs(&self, f: impl Fn(&RatFunc) -> RatFunc) -> DiffPoly {
        DiffPoly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    pub fn indets(&self) -> BTreeSet<DerIndet> {
        self.terms.keys().flat_map(|m| m.factors().iter().map(|(v, _)| v.clone())).collect()
    }

    /// Highest-ranking indeterminate occurring, if any.
    pub fn leader(&self) -> Option<DerIndet> {
        self.terms.keys().filter_map(|m| m.factors().first().map(|(v, _)| v)).max().cloned()
    }

    /// Maximum order of an occurring indeterminate; 0 for constants.
    pub fn order(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(v, _)| v.order()))
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, v: &DerIndet) -> u32 {
        self.terms.keys().map(|m| m.degree_in(v)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    /// Coefficients `c_e` with `self = Σ c_e v^e`.
    pub fn coeffs_in(&self, v: &DerIndet) -> Vec<DiffPoly> {
        let mut out = vec![DiffPoly::zero(); self.degree_in(v) as usize + 1];
        for (m, c) in &self.terms {
            let e = m.degree_in(v);
            out[e as usize].add_term(m.with_degree(v, 0), c.clone());
        }
        out
    }

    pub fn from_coeffs_in(v: &DerIndet, coeffs: &[DiffPoly]) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            let vm = Monomial::power(v.clone(), e as u32);
            for (m, a) in &c.terms {
                out.add_term(m.mul(&vm), a.clone());
            }
        }
        out
    }

    /// Formal partial derivative with respect to `v`.
    pub fn partial(&self, v: &DerIndet) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let e = m.degree_in(v);
            if e > 0 {
                out.add_term(m.with_degree(v, e - 1), c * &RatFunc::from_int(e as i64));
            }
        }
        out
    }

    /// Ring homomorphism fixing coefficients and sending each indeterminate
    /// `v` to `image(v)`, or to itself when `image` returns `None`.
    pub fn substitute(&self, image: &dyn Fn(&DerIndet) -> Option<DiffPoly>) -> DiffPoly {
        let mut cache: BTreeMap<DerIndet, Option<DiffPoly>> = BTreeMap::new();
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let mut kept = Vec::new();
            let mut acc = DiffPoly::constant(c.clone());
            for (v, e) in m.factors() {
                let img = cache.entry(v.clone()).or_insert_with(|| image(v));
                match img {
                    None => kept.push((v.clone(), *e)),
                    Some(p) => acc = acc.mul(&p.pow(*e)),
                }
            }
            let km = Monomial::from_factors(kept);
            for (m2, c2) in acc.terms {
                out.add_term(m2.mul(&km), c2);
            }
        }
        out
    }

    /// Rename indeterminates through an injective map.
    pub fn rename(&self, f: &dyn Fn(&DerIndet) -> DerIndet) -> DiffPoly {
        DiffPoly::from_terms(self.terms.iter().map(|(m, c)| {
            (Monomial::from_factors(m.factors().iter().map(|(v, e)| (f(v), *e))), c.clone())
        }))
    }

    /// Scale so the coefficient of the highest monomial is 1.
    pub fn make_monic(&self) -> DiffPoly {
        match self.terms.iter().next_back() {
            None => DiffPoly::zero(),
            Some((_, c)) => self.scale(&c.inv().expect("nonzero coefficient")),
        }
    }

    /// The K-multiple of `self` with coprime polynomial coefficients,
    /// scaled so the highest coefficient has leading rational coefficient 1.
    pub fn primitive_part(&self) -> DiffPoly {
        if self.is_zero() {
            return DiffPoly::zero();
        }
        let mut den = Poly::one();
        for c in self.terms.values() {
            let g = gcd(&den, c.denom());
            den = den.mul(&c.denom().div_exact(&g).expect("gcd divides"));
        }
        let mut content = Poly::zero();
        for c in self.terms.values() {
            let num = c.numer().mul(&den.div_exact(c.denom()).expect("lcm is a multiple"));
            content = gcd(&content, &num);
        }
        let p = self.scale(&RatFunc::new(den, content).expect("nonzero content"));
        let (_, top) = p.terms.iter().next_back().expect("nonzero");
        let lead = top.numer().leading_coeff();
        p.scale(&RatFunc::from_rational(lead.recip()))
    }

    pub fn fmt_with(&self, field_names: &[String], style: IndetStyle<'_>) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.numer().leading_coeff().is_negative();
            let c = if neg { -c } else { c.clone() };
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let cs = c.fmt_with(field_names);
            if m.is_one() {
                if cs.contains(' ') {
                    s.push_str(&format!("({})", cs));
                } else {
                    s.push_str(&cs);
                }
                continue;
            }
            let ms = m.fmt_with(style);
            if c.is_one() {
                s.push_str(&ms);
            } else if c.is_atomic() {
                s.push_str(&format!("{}*{}", cs, ms));
            } else {
                s.push_str(&format!("({})*{}", cs, ms));
            }
        }
        s
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(&[], IndetStyle::Diff(&[])))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(xi: &[u32]) -> DiffPoly {
        DiffPoly::indet(DerIndet::new(0, xi.to_vec()))
    }

    #[test]
    fn arithmetic_and_structure() {
        let p = x(&[1]).pow(2).add(&x(&[0]));
        assert_eq!(p.leader(), Some(DerIndet::new(0, vec![1])));
        assert_eq!(p.degree_in(&DerIndet::new(0, vec![1])), 2);
        assert_eq!(p.order(), 1);
        let cs = p.coeffs_in(&DerIndet::new(0, vec![1]));
        assert_eq!(cs, vec![x(&[0]), DiffPoly::zero(), DiffPoly::one()]);
        assert_eq!(DiffPoly::from_coeffs_in(&DerIndet::new(0, vec![1]), &cs), p);
        assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn display() {
        let t = RatFunc::gen(0);
        let half_t = RatFunc::one().div(&(&t * &RatFunc::from_int(2))).unwrap();
        let p = x(&[1]).add(&x(&[0]).scale(&half_t));
        assert_eq!(p.fmt_with(&["t".into()], IndetStyle::Diff(&["y1".into()])), "d y1 + (1/(2*t))*y1");
        let q = x(&[1]).pow(2).sub(&DiffPoly::constant(t));
        assert_eq!(q.fmt_with(&["t".into()], IndetStyle::Diff(&[])), "(d x1)^2 - t");
    }

    #[test]
    fn substitution() {
        let p = x(&[0]).pow(2).add(&x(&[1]));
        let q = p.substitute(&|v| if v.xi == [0] { Some(DiffPoly::from_int(3)) } else { None });
        assert_eq!(q, x(&[1]).add(&DiffPoly::from_int(9)));
    }
}
