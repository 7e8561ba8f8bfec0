//! Seeded generators and evaluation oracles shared by the integration tests.
#![allow(dead_code)]

pub mod props;

use std::collections::BTreeMap;
use std::sync::Arc;

use diffweil::coeff::{BaseField, Mono, Poly, RatFunc, Rational};
use diffweil::diffpoly::{indices_up_to, DerIndet, DiffPoly, Monomial};
use diffweil::weil::{BElem, Coords, FreeExtension};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Gen(pub ChaCha8Rng);

pub fn q(a: i64, b: i64) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

pub fn rf(a: i64) -> RatFunc {
    RatFunc::from_int(a)
}

pub fn t() -> RatFunc {
    RatFunc::gen(0)
}

pub fn s() -> RatFunc {
    RatFunc::gen(1)
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.0.gen_range(lo..=hi)
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.0.gen_range(0..n)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.0.gen_bool(p)
    }

    pub fn rational(&mut self) -> Rational {
        let mut a = self.int(-5, 5);
        if a == 0 {
            a = 1;
        }
        q(a, self.int(1, 4))
    }

    /// A polynomial in the first `k` generators.
    pub fn poly(&mut self, k: usize, deg: u32, terms: usize) -> Poly {
        let mut p = Poly::zero();
        for _ in 0..terms {
            let exps = (0..k).map(|_| self.int(0, deg as i64) as u32).collect();
            p = p.add(&Poly::monomial(Mono::from_exps(exps), self.rational()));
        }
        p
    }

    pub fn nonzero_poly(&mut self, k: usize, deg: u32, terms: usize) -> Poly {
        loop {
            let p = self.poly(k, deg, terms);
            if !p.is_zero() {
                return p;
            }
        }
    }

    /// A random element of ℚ(t₁..t_k), denominator 1 about half the time.
    pub fn ratfunc(&mut self, k: usize) -> RatFunc {
        let terms = self.int(1, 3) as usize;
        let num = self.poly(k, 2, terms);
        let den = if k == 0 || self.coin(0.5) { Poly::one() } else { self.nonzero_poly(k, 1, 2) };
        RatFunc::new(num, den).expect("nonzero denominator")
    }

    pub fn nonzero_ratfunc(&mut self, k: usize) -> RatFunc {
        loop {
            let c = self.ratfunc(k);
            if !c.is_zero() {
                return c;
            }
        }
    }

    pub fn indet(&mut self, n: usize, m: usize, max_order: u32) -> DerIndet {
        let all = indices_up_to(m, max_order);
        let xi = all[self.below(all.len())].clone();
        DerIndet::new(self.below(n), xi)
    }

    /// c₀ + c₁t₁ with rational c's, for cheap exact evaluation.
    pub fn small_value(&mut self, k: usize) -> RatFunc {
        let c0 = RatFunc::from_rational(self.rational());
        if k == 0 || self.coin(0.3) {
            return c0;
        }
        &c0 + &(&RatFunc::gen(self.below(k)) * &RatFunc::from_rational(self.rational()))
    }

    /// A differential polynomial with coefficients in ℚ(t₁..t_k).
    pub fn diffpoly(&mut self, k: usize, n: usize, m: usize, max_order: u32, deg: u32, terms: usize) -> DiffPoly {
        let mut p = DiffPoly::zero();
        for _ in 0..terms {
            let mut mono = Vec::new();
            for _ in 0..self.int(0, deg as i64) {
                mono.push((self.indet(n, m, max_order), 1));
            }
            p = p.add(&DiffPoly::monomial(Monomial::from_factors(mono), self.nonzero_ratfunc(k)));
        }
        p
    }

    pub fn nonconstant(&mut self, k: usize, n: usize, m: usize, max_order: u32, deg: u32, terms: usize) -> DiffPoly {
        loop {
            let p = self.diffpoly(k, n, m, max_order, deg.max(1), terms);
            if p.leader().is_some() {
                return p;
            }
        }
    }
}

/// ℚ(t, s) with one of a few commuting derivation pairs.
pub fn field_ts(which: usize) -> BaseField {
    let names = vec!["t".to_string(), "s".to_string()];
    let action = match which % 3 {
        0 => vec![vec![rf(1), rf(0)], vec![rf(0), rf(1)]],
        1 => vec![vec![t(), rf(0)], vec![rf(0), s()]],
        _ => vec![vec![rf(1), rf(1)], vec![rf(0), rf(1)]],
    };
    BaseField::new(names, action).expect("commuting")
}

pub fn field_for(m: usize, which: usize) -> Arc<BaseField> {
    Arc::new(if m == 1 { BaseField::rational_t() } else { field_ts(which) })
}

fn zero_matrix(ell: usize) -> Vec<Vec<RatFunc>> {
    vec![vec![RatFunc::zero(); ell]; ell]
}

/// K[b]/(b^ℓ − c) on the basis 1, b, …, b^{ℓ−1}, with δb = (δc/ℓc)·b.
pub fn radical(base: Arc<BaseField>, ell: usize, c: &RatFunc) -> FreeExtension {
    let mut mult = vec![vec![vec![RatFunc::zero(); ell]; ell]; ell];
    for (i, row) in mult.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            if i + j < ell {
                slot[i + j] = RatFunc::one();
            } else {
                slot[i + j - ell] = c.clone();
            }
        }
    }
    let mut unit = vec![RatFunc::zero(); ell];
    unit[0] = RatFunc::one();
    let lc = c * &rf(ell as i64);
    let der = (0..base.m())
        .map(|d| {
            let g = base.derive_base(d, c).unwrap().div(&lc).unwrap();
            let mut mat = zero_matrix(ell);
            for (j, row) in mat.iter_mut().enumerate() {
                row[j] = &g * &rf(j as i64);
            }
            mat
        })
        .collect();
    let names = (0..ell).map(|j| if j == 0 { "1".to_string() } else { format!("b{}", j) }).collect();
    FreeExtension::new_unchecked(base, names, mult, unit, der).expect("shape")
}

/// K^ℓ on its idempotents, with zero derivations.
pub fn product(base: Arc<BaseField>, ell: usize) -> FreeExtension {
    let mut mult = vec![vec![vec![RatFunc::zero(); ell]; ell]; ell];
    for (i, row) in mult.iter_mut().enumerate() {
        row[i][i] = RatFunc::one();
    }
    let unit = vec![RatFunc::one(); ell];
    let der = vec![zero_matrix(ell); base.m()];
    let names = (1..=ell).map(|j| format!("e{}", j)).collect();
    FreeExtension::new_unchecked(base, names, mult, unit, der).expect("shape")
}

/// Inverse of a square matrix over K by Gauss–Jordan elimination.
pub fn invert(a: &[Vec<RatFunc>]) -> Option<Vec<Vec<RatFunc>>> {
    let n = a.len();
    let mut m: Vec<Vec<RatFunc>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { RatFunc::one() } else { RatFunc::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].inv().ok()?;
        for x in m[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..2 * n {
                    let v = &m[r][c] - &(&f * &m[col][c]);
                    m[r][c] = v;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// The same algebra on the basis f_i = Σ_j P_ij e_j.
pub fn change_basis(e: &FreeExtension, p: &[Vec<RatFunc>]) -> FreeExtension {
    let ell = e.ell();
    let base = e.base();
    let qi = invert(p).expect("invertible change of basis");
    // old coordinates v ↦ new coordinates w = Qᵀ v
    let conv = |v: &BElem| -> BElem {
        (0..ell).map(|i| (0..ell).fold(RatFunc::zero(), |acc, j| &acc + &(&qi[j][i] * &v[j]))).collect()
    };
    let old_of = |coeffs: &[RatFunc]| -> BElem {
        (0..ell).fold(e.zero_elem(), |acc, j| e.add(&acc, &e.scale(&e.basis_elem(j), &coeffs[j])))
    };
    let mut mult = vec![vec![Vec::new(); ell]; ell];
    for a in 0..ell {
        for b in 0..ell {
            mult[a][b] = conv(&e.mul(&old_of(&p[a]), &old_of(&p[b])));
        }
    }
    let unit = conv(e.unit());
    let der = (0..base.m())
        .map(|d| {
            let mut mat = zero_matrix(ell);
            for j in 0..ell {
                let w = conv(&e.derive(d, &old_of(&p[j])));
                for i in 0..ell {
                    mat[i][j] = w[i].clone();
                }
            }
            mat
        })
        .collect();
    let names = (1..=ell).map(|j| format!("f{}", j)).collect();
    FreeExtension::new_unchecked(e.base_arc().clone(), names, mult, unit, der).expect("shape")
}

/// A random lower-triangular matrix: rational diagonal, polynomial entries below.
pub fn random_basis_change(g: &mut Gen, ell: usize, k: usize) -> Vec<Vec<RatFunc>> {
    (0..ell)
        .map(|i| {
            (0..ell)
                .map(|j| match i.cmp(&j) {
                    std::cmp::Ordering::Equal => RatFunc::from_rational(g.rational()),
                    std::cmp::Ordering::Greater if g.coin(0.6) => RatFunc::from_poly(g.poly(k, 1, 2)),
                    _ => RatFunc::zero(),
                })
                .collect()
        })
        .collect()
}

/// One member of the randomized extension corpus.
pub fn random_extension(g: &mut Gen, ell: usize, m: usize) -> FreeExtension {
    let base = field_for(m, g.below(3));
    let k = base.k();
    let e = if g.coin(0.5) {
        product(base, ell)
    } else {
        let mut c = RatFunc::from_poly(g.nonzero_poly(k, 2, 2));
        while c.is_constant() {
            c = RatFunc::from_poly(g.nonzero_poly(k, 2, 2));
        }
        radical(base, ell, &c)
    };
    if g.coin(0.7) {
        change_basis(&e, &random_basis_change(g, ell, k))
    } else {
        e
    }
}

/// A random element of B{T} with |T| = n.
pub fn random_bpoly(g: &mut Gen, ell: usize, k: usize, n: usize, m: usize, max_order: u32) -> Coords {
    (0..ell).map(|_| if g.coin(0.6) { g.diffpoly(k, n, m, max_order, 2, 2) } else { DiffPoly::zero() }).collect()
}

pub fn eval_poly_q(p: &Poly, at: &[Rational]) -> Rational {
    let mut acc = q(0, 1);
    for (mono, c) in p.terms() {
        let mut term = c.clone();
        for (j, &e) in mono.exps().iter().enumerate() {
            for _ in 0..e {
                term *= &at[j];
            }
        }
        acc += term;
    }
    acc
}

/// Value of a rational function at a point, `None` on a pole.
pub fn eval_ratfunc(f: &RatFunc, at: &[Rational]) -> Option<Rational> {
    let d = eval_poly_q(f.denom(), at);
    if d == q(0, 1) {
        None
    } else {
        Some(eval_poly_q(f.numer(), at) / d)
    }
}

/// Evaluates a differential polynomial at a K-valued assignment.
pub fn eval_diffpoly(p: &DiffPoly, point: &BTreeMap<DerIndet, RatFunc>) -> RatFunc {
    let mut acc = RatFunc::zero();
    for (mono, c) in p.terms() {
        let mut term = c.clone();
        for (v, e) in mono.factors() {
            term = &term * &point[v].pow(*e);
        }
        acc = &acc + &term;
    }
    acc
}
