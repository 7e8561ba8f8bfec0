use std::collections::BTreeMap;
use std::sync::Arc;

use super::extension::{BElem, FreeExtension};
use crate::coeff::RatFunc;
use crate::diffpoly::{unit_index, DerIndet, DiffPoly, DiffRing, IndetStyle, MultiIndex};

/// ℓ coordinates over A{…}: an element Σ c_k ⊗ b_k of a polynomial ring
/// tensored with B. Used both for B{T} and for W(B{T}) ⊗ B.
pub type Coords = Vec<DiffPoly>;

/// The descent setting: an extension together with the names of the
/// differential indeterminates T.
///
/// B{T} polynomials are [`Coords`] whose entries use `DerIndet { var: t, xi: θ }`.
/// W(B{T}) has indeterminates t_θ(i), stored as `DerIndet { var: t·ℓ + i, xi: θ }`.
#[derive(Clone, Debug)]
pub struct Descent {
    ext: Arc<FreeExtension>,
    gens: Vec<String>,
}

impl Descent {
    pub fn new(ext: Arc<FreeExtension>, gens: Vec<String>) -> Self {
        Descent { ext, gens }
    }

    pub fn ext(&self) -> &FreeExtension {
        &self.ext
    }

    pub fn ext_arc(&self) -> &Arc<FreeExtension> {
        &self.ext
    }

    pub fn gens(&self) -> &[String] {
        &self.gens
    }

    pub fn ell(&self) -> usize {
        self.ext.ell()
    }

    pub fn m(&self) -> usize {
        self.ext.m()
    }

    /// A{T}, the coordinate ring of B{T} over B.
    pub fn t_ring(&self) -> DiffRing {
        DiffRing::with_names(self.ext.base_arc().clone(), self.gens.clone())
    }

    /// t_θ(i) with `i` 0-based.
    pub fn w_var(&self, t: usize, i: usize, theta: &[u32]) -> DerIndet {
        DerIndet::new(t * self.ell() + i, theta.to_vec())
    }

    /// `(t, i)` of a W-ring variable.
    pub fn split(&self, v: &DerIndet) -> (usize, usize) {
        (v.var / self.ell(), v.var % self.ell())
    }

    pub fn w_style(&self) -> IndetStyle<'_> {
        IndetStyle::Weil(&self.gens, self.ell())
    }

    pub fn fmt_w(&self, p: &DiffPoly) -> String {
        p.fmt_with(self.ext.base().names(), self.w_style())
    }

    pub fn fmt_t(&self, p: &DiffPoly) -> String {
        p.fmt_with(self.ext.base().names(), IndetStyle::Diff(&self.gens))
    }

    /// Prints a B{T} polynomial grouped by basis element.
    pub fn fmt_bpoly(&self, f: &Coords) -> String {
        let mut parts = Vec::new();
        for (k, c) in f.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let name = &self.ext.basis_names()[k];
            let cs = self.fmt_t(c);
            if name == "1" {
                parts.push(if c.num_terms() > 1 { format!("({})", cs) } else { cs });
            } else if c.is_one() {
                parts.push(name.clone());
            } else {
                parts.push(format!("({})*{}", cs, name));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    pub fn zero(&self) -> Coords {
        vec![DiffPoly::zero(); self.ell()]
    }

    /// p·1_B for a polynomial p with coefficients in A.
    pub fn scalar(&self, p: &DiffPoly) -> Coords {
        self.ext.unit().iter().map(|u| p.scale(u)).collect()
    }

    pub fn from_elem(&self, b: &BElem) -> Coords {
        b.iter().map(|c| DiffPoly::constant(c.clone())).collect()
    }

    pub fn add(&self, x: &Coords, y: &Coords) -> Coords {
        x.iter().zip(y).map(|(a, b)| a.add(b)).collect()
    }

    pub fn sub(&self, x: &Coords, y: &Coords) -> Coords {
        x.iter().zip(y).map(|(a, b)| a.sub(b)).collect()
    }

    pub fn scale(&self, x: &Coords, p: &DiffPoly) -> Coords {
        x.iter().map(|a| a.mul(p)).collect()
    }

    /// Product through the structure constants.
    pub fn mul(&self, x: &Coords, y: &Coords) -> Coords {
        let mut out = self.zero();
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a.mul(b);
                for (k, c) in self.ext.mult(i, j).iter().enumerate() {
                    if !c.is_zero() {
                        out[k] = out[k].add(&ab.scale(c));
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, x: &Coords, e: u32) -> Coords {
        let mut acc = self.scalar(&DiffPoly::one());
        for _ in 0..e {
            acc = self.mul(&acc, x);
        }
        acc
    }

    /// W_{B{T}}(t_θ) = Σ_i t_θ(i) ⊗ b_i.
    pub fn unit_image(&self, v: &DerIndet) -> Coords {
        (0..self.ell()).map(|i| DiffPoly::indet(self.w_var(v.var, i, &v.xi))).collect()
    }

    /// λ-coordinates of W_{B{T}}(f) for f ∈ B{T}.
    pub fn descend_poly(&self, f: &Coords) -> Coords {
        let mut cache: BTreeMap<(DerIndet, u32), Coords> = BTreeMap::new();
        let mut out = self.zero();
        for (k, fk) in f.iter().enumerate() {
            let bk = self.from_elem(&self.ext.basis_elem(k));
            for (mono, c) in fk.terms() {
                let mut term = self.scale(&bk, &DiffPoly::constant(c.clone()));
                for (v, e) in mono.factors() {
                    let p = cache
                        .entry((v.clone(), *e))
                        .or_insert_with(|| self.pow(&self.unit_image(v), *e))
                        .clone();
                    term = self.mul(&term, &p);
                }
                out = self.add(&out, &term);
            }
        }
        out
    }

    /// ∂_d^W(t_θ(i)) = t_{θ+e_d}(i) − Σ_j λ_i(δ_d b_j)·t_θ(j).
    pub fn descended_derivation(&self, d: usize, t: usize, i: usize, theta: &[u32]) -> DiffPoly {
        let up: MultiIndex = theta.iter().enumerate().map(|(k, &e)| if k == d { e + 1 } else { e }).collect();
        let mut p = DiffPoly::indet(self.w_var(t, i, &up));
        for j in 0..self.ell() {
            let c = self.ext.der(d, i, j);
            if !c.is_zero() {
                p = p.sub(&DiffPoly::indet(self.w_var(t, j, theta)).scale(c));
            }
        }
        p
    }

    /// ∂_d^W applied to a polynomial of W(B{T}).
    pub fn apply_descended(&self, d: usize, g: &DiffPoly) -> DiffPoly {
        DiffRing::apply_derivation(g, self.ext.base().derivation(d), &|v| {
            let (t, i) = self.split(v);
            self.descended_derivation(d, t, i, &v.xi)
        })
    }

    /// (∂_d^W ⊗ δ_d) on W(B{T}) ⊗ B.
    pub fn ext_derive(&self, d: usize, x: &Coords) -> Coords {
        let mut out: Coords = x.iter().map(|c| self.apply_descended(d, c)).collect();
        for (j, c) in x.iter().enumerate() {
            for (i, slot) in out.iter_mut().enumerate() {
                let a = self.ext.der(d, i, j);
                if !a.is_zero() {
                    *slot = slot.add(&c.scale(a));
                }
            }
        }
        out
    }

    /// The natural derivation ∂_d of B{T}: δ_d on B, t_θ ↦ t_{θ+e_d}.
    pub fn derive_bpoly(&self, d: usize, f: &Coords) -> Coords {
        let ring = self.t_ring();
        let mut out: Coords = f.iter().map(|c| ring.differentiate(d, c).expect("d < m")).collect();
        for (j, c) in f.iter().enumerate() {
            for (i, slot) in out.iter_mut().enumerate() {
                let a = self.ext.der(d, i, j);
                if !a.is_zero() {
                    *slot = slot.add(&c.scale(a));
                }
            }
        }
        out
    }

    /// Rewrites t_θ(i) in terms of the descended derivatives of
    /// y_{tℓ+i+1} = t(i): Φ(t_{θ+e_k}(i)) = δ_k Φ(t_θ(i)) + Σ_j λ_i(δ_k b_j) Φ(t_θ(j)).
    pub fn standard_form(&self, v: &DerIndet, cache: &mut BTreeMap<DerIndet, DiffPoly>, yring: &DiffRing) -> DiffPoly {
        if let Some(p) = cache.get(v) {
            return p.clone();
        }
        let result = match v.xi.iter().position(|&e| e > 0) {
            None => DiffPoly::indet(v.clone()),
            Some(k) => {
                let (t, i) = self.split(v);
                let mut lower = v.xi.clone();
                lower[k] -= 1;
                let below = self.standard_form(&DerIndet::new(v.var, lower.clone()), cache, yring);
                let mut p = yring.differentiate(k, &below).expect("k < m");
                for j in 0..self.ell() {
                    let c = self.ext.der(k, i, j);
                    if !c.is_zero() {
                        let w = self.standard_form(&self.w_var(t, j, &lower), cache, yring);
                        p = p.add(&w.scale(c));
                    }
                }
                p
            }
        };
        cache.insert(v.clone(), result.clone());
        result
    }

    /// K{y_1..y_{|T|ℓ}}, the target of [`Descent::standardize`].
    pub fn y_ring(&self) -> DiffRing {
        let n = self.gens.len() * self.ell();
        DiffRing::with_names(self.ext.base_arc().clone(), (1..=n).map(|k| format!("y{}", k)).collect())
    }

    pub fn standardize(&self, g: &DiffPoly) -> DiffPoly {
        let yring = self.y_ring();
        let cache = std::cell::RefCell::new(BTreeMap::new());
        g.substitute(&|v| Some(self.standard_form(v, &mut cache.borrow_mut(), &yring)))
    }

    pub fn unit_vector(&self, d: usize) -> MultiIndex {
        unit_index(self.m(), d)
    }

    pub fn scalar_elem(&self, a: &RatFunc) -> BElem {
        self.ext.scalar(a)
    }
}
