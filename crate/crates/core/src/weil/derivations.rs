use serde::Serialize;

use super::descent::{Coords, Descent};
use crate::coeff::{KDerivation, RatFunc};
use crate::diffpoly::{indices_up_to, DerIndet, DiffPoly, DiffRing};

/// A derivation of B{T} built from the natural ones by K-linear
/// combination and commutator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DerivationExpr {
    /// ∂_d: δ_d on B, t_θ ↦ t_{θ+e_d}.
    Natural(usize),
    Combo(Vec<(RatFunc, DerivationExpr)>),
    Bracket(Box<DerivationExpr>, Box<DerivationExpr>),
}

type Matrix = Vec<Vec<RatFunc>>;

impl DerivationExpr {
    pub fn bracket(a: DerivationExpr, b: DerivationExpr) -> Self {
        DerivationExpr::Bracket(Box::new(a), Box::new(b))
    }

    /// Restriction to K.
    pub fn k_part(&self, desc: &Descent) -> KDerivation {
        let field = desc.ext().base();
        match self {
            DerivationExpr::Natural(d) => field.derivation(*d).clone(),
            DerivationExpr::Combo(terms) => terms
                .iter()
                .fold(KDerivation::zero(field.k()), |acc, (a, p)| acc.add(&p.k_part(desc).scale(a))),
            DerivationExpr::Bracket(p, q) => p.k_part(desc).bracket(&q.k_part(desc)),
        }
    }

    /// `M[i][j] = λ_i(P b_j)`.
    pub fn b_matrix(&self, desc: &Descent) -> Matrix {
        let ell = desc.ell();
        match self {
            DerivationExpr::Natural(d) => desc.ext().der_matrix(*d).clone(),
            DerivationExpr::Combo(terms) => {
                let mut out = vec![vec![RatFunc::zero(); ell]; ell];
                for (a, p) in terms {
                    let m = p.b_matrix(desc);
                    for i in 0..ell {
                        for j in 0..ell {
                            out[i][j] = &out[i][j] + &(a * &m[i][j]);
                        }
                    }
                }
                out
            }
            DerivationExpr::Bracket(p, q) => {
                // [P,Q](b_j) = P(Q b_j) − Q(P b_j), expanded through the coefficient action
                let (kp, kq) = (p.k_part(desc), q.k_part(desc));
                let (mp, mq) = (p.b_matrix(desc), q.b_matrix(desc));
                let mut out = vec![vec![RatFunc::zero(); ell]; ell];
                for i in 0..ell {
                    for j in 0..ell {
                        let mut v = &kp.apply(&mq[i][j]) - &kq.apply(&mp[i][j]);
                        for l in 0..ell {
                            v = &v + &(&(&mp[i][l] * &mq[l][j]) - &(&mq[i][l] * &mp[l][j]));
                        }
                        out[i][j] = v;
                    }
                }
                out
            }
        }
    }

    /// P(t_θ) ∈ B{T}.
    pub fn image(&self, desc: &Descent, v: &DerIndet) -> Coords {
        match self {
            DerivationExpr::Natural(d) => desc.scalar(&DiffPoly::indet(v.derive(*d))),
            DerivationExpr::Combo(terms) => terms.iter().fold(desc.zero(), |acc, (a, p)| {
                desc.add(&acc, &desc.scale(&p.image(desc, v), &DiffPoly::constant(a.clone())))
            }),
            DerivationExpr::Bracket(p, q) => {
                let a = p.apply(desc, &q.image(desc, v));
                let b = q.apply(desc, &p.image(desc, v));
                desc.sub(&a, &b)
            }
        }
    }

    /// P applied to an element of B{T}.
    pub fn apply(&self, desc: &Descent, f: &Coords) -> Coords {
        let k = self.k_part(desc);
        let mat = self.b_matrix(desc);
        let mut cache = std::collections::BTreeMap::new();
        let mut out = desc.zero();
        for (idx, fk) in f.iter().enumerate() {
            if fk.is_zero() {
                continue;
            }
            // P(f_k) with f_k ∈ A{T}
            let mut pf = desc.scalar(&fk.map_coeffs(|c| k.apply(c)));
            for v in fk.indets() {
                let img = cache.entry(v.clone()).or_insert_with(|| self.image(desc, &v)).clone();
                pf = desc.add(&pf, &desc.mul(&desc.scalar(&fk.partial(&v)), &img));
            }
            let bk = desc.from_elem(&desc.ext().basis_elem(idx));
            out = desc.add(&out, &desc.mul(&pf, &bk));
            let col: Coords = (0..desc.ell()).map(|i| fk.scale(&mat[i][idx])).collect();
            out = desc.add(&out, &col);
        }
        out
    }

    /// P^W(t_θ(i)) = λ_i(W(P t_θ)) − Σ_j λ_i(P b_j)·t_θ(j).
    pub fn descended_on(&self, desc: &Descent, w: &DerIndet) -> DiffPoly {
        let (t, i) = desc.split(w);
        let wp = desc.descend_poly(&self.image(desc, &DerIndet::new(t, w.xi.clone())));
        let mat = self.b_matrix(desc);
        let mut p = wp[i].clone();
        for j in 0..desc.ell() {
            if !mat[i][j].is_zero() {
                p = p.sub(&DiffPoly::indet(desc.w_var(t, j, &w.xi)).scale(&mat[i][j]));
            }
        }
        p
    }

    /// P^W applied to a polynomial of W(B{T}).
    pub fn apply_descended(&self, desc: &Descent, g: &DiffPoly) -> DiffPoly {
        let k = self.k_part(desc);
        DiffRing::apply_derivation(g, &k, &|w| self.descended_on(desc, w))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl IdentityReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, holds: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !holds {
            self.failures.push(what());
        }
    }
}

fn w_generators(desc: &Descent, s: u32) -> Vec<DerIndet> {
    let mut out = Vec::new();
    for t in 0..desc.gens().len() {
        for theta in indices_up_to(desc.m(), s) {
            for i in 0..desc.ell() {
                out.push(desc.w_var(t, i, &theta));
            }
        }
    }
    out
}

/// Linearity and bracket compatibility of P ↦ P^W on t_θ(i), |θ| ≤ s.
/// When [P1, P2] vanishes on B and on the t_θ, the descended bracket must vanish too.
pub fn check_thm33(
    desc: &Descent,
    p1: &DerivationExpr,
    p2: &DerivationExpr,
    a1: &RatFunc,
    a2: &RatFunc,
    s: u32,
) -> IdentityReport {
    let mut rep = IdentityReport::default();
    let combo = DerivationExpr::Combo(vec![(a1.clone(), p1.clone()), (a2.clone(), p2.clone())]);
    let br = DerivationExpr::bracket(p1.clone(), p2.clone());
    let br_zero_on_b = br.k_part(desc).is_zero() && br.b_matrix(desc).iter().flatten().all(RatFunc::is_zero);
    for w in w_generators(desc, s) {
        let name = || desc.fmt_w(&DiffPoly::indet(w.clone()));
        let lhs = combo.descended_on(desc, &w);
        let rhs = p1.descended_on(desc, &w).scale(a1).add(&p2.descended_on(desc, &w).scale(a2));
        rep.record(lhs == rhs, || format!("linearity fails on {}", name()));

        let lhs = br.descended_on(desc, &w);
        let d1 = p1.descended_on(desc, &w);
        let d2 = p2.descended_on(desc, &w);
        let rhs = p1.apply_descended(desc, &d2).sub(&p2.apply_descended(desc, &d1));
        rep.record(lhs == rhs, || format!("bracket fails on {}", name()));

        let (t, _) = desc.split(&w);
        let br_zero_here = br.image(desc, &DerIndet::new(t, w.xi.clone())).iter().all(DiffPoly::is_zero);
        if br_zero_on_b && br_zero_here {
            rep.record(rhs.is_zero(), || format!("descended bracket of commuting derivations is nonzero on {}", name()));
        }
    }
    rep
}

/// Differentiality of the unit map on the generators t_θ (|θ| < s) and on
/// each relation: λ(W(∂f)) = (∂^W ⊗ δ)(λ(W(f))).
pub fn check_thm32(desc: &Descent, relations: &[Coords], s: u32) -> IdentityReport {
    let mut rep = IdentityReport::default();
    for t in 0..desc.gens().len() {
        for theta in indices_up_to(desc.m(), s.saturating_sub(1)) {
            let v = DerIndet::new(t, theta);
            let w = desc.unit_image(&v);
            for d in 0..desc.m() {
                let lhs = desc.unit_image(&v.derive(d));
                let rhs = desc.ext_derive(d, &w);
                rep.record(lhs == rhs, || format!("unit map not differential on {} for d{}", desc.fmt_t(&DiffPoly::indet(v.clone())), d + 1));
            }
        }
    }
    for (r, f) in relations.iter().enumerate() {
        let g = desc.descend_poly(f);
        for d in 0..desc.m() {
            let lhs = desc.descend_poly(&desc.derive_bpoly(d, f));
            let rhs = desc.ext_derive(d, &g);
            rep.record(lhs == rhs, || format!("relation {} breaks the identity for d{}", r + 1, d + 1));
        }
    }
    rep
}
