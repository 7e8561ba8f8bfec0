//! Sparse multivariate polynomials over ℚ in the generators t₁..t_k of the
//! base field.
//!
//! Monomials are exponent vectors with trailing zeros trimmed, so polynomials
//! in different numbers of generators mix freely. Terms are kept in a
//! `BTreeMap` ordered by graded lexicographic order; the last entry is the
//! leading term.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// Exponent vector, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Mono(Vec<u32>);

impl Mono {
    pub fn one() -> Self {
        Mono(Vec::new())
    }

    pub fn from_exps(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Mono(exps)
    }

    pub fn var(j: usize) -> Self {
        let mut e = vec![0; j + 1];
        e[j] = 1;
        Mono(e)
    }

    pub fn exp(&self, j: usize) -> u32 {
        self.0.get(j).copied().unwrap_or(0)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let len = self.0.len().max(other.0.len());
        let e = (0..len).map(|j| self.exp(j) + other.exp(j)).collect();
        Mono(e)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Mono) -> Option<Mono> {
        if other.0.len() > self.0.len() {
            return None;
        }
        let mut e = Vec::with_capacity(self.0.len());
        for j in 0..self.0.len() {
            let (a, b) = (self.exp(j), other.exp(j));
            if b > a {
                return None;
            }
            e.push(a - b);
        }
        Some(Mono::from_exps(e))
    }

    fn with_exp(&self, j: usize, e: u32) -> Mono {
        let mut v = self.0.clone();
        if v.len() <= j {
            v.resize(j + 1, 0);
        }
        v[j] = e;
        Mono::from_exps(v)
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| {
                let len = self.0.len().max(other.0.len());
                for j in 0..len {
                    match self.exp(j).cmp(&other.exp(j)) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            })
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Mono, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::one(), c);
        }
        Poly { terms }
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(Rational::from_integer(BigInt::from(n)))
    }

    pub fn var(j: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Mono::var(j), Rational::one());
        Poly { terms }
    }

    pub fn monomial(m: Mono, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Mono::is_one)
    }

    /// The constant value, if this polynomial has no generator in it.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_constant() {
            Some(self.terms.get(&Mono::one()).cloned().unwrap_or_else(Rational::zero))
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Mono::one()).is_some_and(One::is_one)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn leading(&self) -> Option<(&Mono, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Rational {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, m: Mono, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    fn mul_term(&self, m: &Mono, c: &Rational) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(a, b)| (a.mul(m), b * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn degree_in(&self, j: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(j)).max().unwrap_or(0)
    }

    /// Highest generator index occurring, if any.
    pub fn max_var(&self) -> Option<usize> {
        self.terms.keys().filter_map(|m| m.0.len().checked_sub(1)).max()
    }

    /// Lowest generator index occurring, if any.
    pub fn min_var(&self) -> Option<usize> {
        self.terms
            .keys()
            .filter_map(|m| m.0.iter().position(|&e| e > 0))
            .min()
    }

    pub fn partial(&self, j: usize) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(j);
            if e > 0 {
                out.add_term(m.with_exp(j, e - 1), c * Rational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    /// Coefficients with respect to generator `j`, lowest degree first.
    pub fn to_univariate(&self, j: usize) -> Vec<Poly> {
        let deg = self.degree_in(j) as usize;
        let mut coeffs = vec![Poly::zero(); deg + 1];
        for (m, c) in &self.terms {
            let e = m.exp(j) as usize;
            coeffs[e].add_term(m.with_exp(j, 0), c.clone());
        }
        coeffs
    }

    pub fn from_univariate(j: usize, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            let x = Mono::var(j);
            let xe = Mono::from_exps(x.0.iter().map(|v| v * e as u32).collect());
            for (m, a) in &c.terms {
                out.add_term(m.mul(&xe), a.clone());
            }
        }
        out
    }

    /// Exact quotient `self / divisor`, or `None` if the division leaves a
    /// remainder.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let (lm, lc) = divisor.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((m, c)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let qm = m.div(&lm)?;
            let qc = c / &lc;
            rem = rem.sub(&divisor.mul_term(&qm, &qc));
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Scalar making all coefficients integers with unit content, sign chosen
    /// so that the leading coefficient becomes positive.
    pub fn integer_normalizer(&self) -> Rational {
        integer_normalizer(self.terms.values())
    }

    pub fn make_monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = fmt_mono(m, names);
            if mono.is_empty() {
                s.push_str(&fmt_rational(&abs));
            } else if abs.is_one() {
                s.push_str(&mono);
            } else if abs.is_integer() {
                let _ = write!(s, "{}*{}", abs, mono);
            } else {
                let _ = write!(s, "({})*{}", fmt_rational(&abs), mono);
            }
        }
        s
    }
}

/// Positive scalar `L/G` (L = lcm of denominators, G = gcd of numerators)
/// turning the coefficients into coprime integers.
pub(crate) fn integer_normalizer<'a>(coeffs: impl Iterator<Item = &'a Rational>) -> Rational {
    let mut den_lcm = BigInt::one();
    let mut num_gcd = BigInt::zero();
    for c in coeffs {
        den_lcm = den_lcm.lcm(c.denom());
        num_gcd = num_gcd.gcd(c.numer());
    }
    if num_gcd.is_zero() {
        return Rational::one();
    }
    Rational::new(den_lcm, num_gcd)
}

pub fn fmt_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn fmt_mono(m: &Mono, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (j, &e) in m.exps().iter().enumerate() {
        if e == 0 {
            continue;
        }
        let name = names.get(j).cloned().unwrap_or_else(|| format!("t{}", j + 1));
        if e == 1 {
            parts.push(name);
        } else {
            parts.push(format!("{}^{}", name, e));
        }
    }
    parts.join("*")
}

fn trim(v: &mut Vec<Poly>) {
    while v.len() > 1 && v.last().is_some_and(Poly::is_zero) {
        v.pop();
    }
}

/// Pseudo-remainder of `a` by `b` as polynomials in generator `j`.
fn prem(a: &Poly, b: &Poly, j: usize) -> Poly {
    let bc = b.to_univariate(j);
    let db = bc.len() - 1;
    let lb = &bc[db];
    let mut r = a.to_univariate(j);
    trim(&mut r);
    while !(r.len() == 1 && r[0].is_zero()) && r.len() - 1 >= db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let mut next: Vec<Poly> = r.iter().map(|c| c.mul(lb)).collect();
        for (k, c) in bc.iter().enumerate() {
            let idx = k + dr - db;
            next[idx] = next[idx].sub(&c.mul(&lr));
        }
        debug_assert!(next[dr].is_zero());
        trim(&mut next);
        r = next;
    }
    Poly::from_univariate(j, &r)
}

/// Content of `p` with respect to generator `j`: gcd of its coefficients.
fn content(p: &Poly, j: usize) -> Poly {
    let mut g = Poly::zero();
    for c in p.to_univariate(j) {
        g = gcd(&g, &c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn primitive_part(p: &Poly, j: usize) -> Poly {
    let c = content(p, j);
    p.div_exact(&c).expect("content divides").make_monic()
}

/// Greatest common divisor, normalized monic (leading coefficient 1 under
/// grlex). `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.make_monic();
    }
    if b.is_zero() {
        return a.make_monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    let j = match (a.min_var(), b.min_var()) {
        (Some(x), Some(y)) => x.min(y),
        _ => return Poly::one(),
    };
    let ca = content(a, j);
    let cb = content(b, j);
    let c = gcd(&ca, &cb);
    let mut p = a.div_exact(&ca).expect("content divides");
    let mut q = b.div_exact(&cb).expect("content divides");
    if p.degree_in(j) < q.degree_in(j) {
        std::mem::swap(&mut p, &mut q);
    }
    while !q.is_zero() && q.degree_in(j) > 0 {
        let r = prem(&p, &q, j);
        p = q;
        q = if r.is_zero() { r } else { primitive_part(&r, j) };
    }
    let g = if q.is_zero() { primitive_part(&p, j) } else { Poly::one() };
    c.mul(&g).make_monic()
}
