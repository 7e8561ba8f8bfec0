use std::sync::Arc;

use serde::Serialize;

use crate::coeff::BaseField;
use crate::diffpoly::{unit_index, DerIndet, DiffPoly};
use crate::error::{Error, Result};
use crate::prolong::gamma_set;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoordSpec {
    Transcendental,
    /// Minimal polynomial with denominators cleared: polynomial in the
    /// coordinate itself and the ⊴-earlier coordinates.
    Algebraic(DiffPoly),
}

/// A triangular presentation of L = K(a_i^ξ : (ξ, i) ∈ Γ_n(r)).
///
/// Coordinate a_i^ξ is the indeterminate `DerIndet { var: i, xi: ξ }`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelPresentation {
    field: Arc<BaseField>,
    n: usize,
    r: u32,
    coords: Vec<(DerIndet, CoordSpec)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelRejection {
    Malformed { var: usize, xi: Vec<u32>, reason: String },
    Derivation { var: usize, xi: Vec<u32>, k: usize },
}

impl KernelPresentation {
    /// All coordinates transcendental.
    pub fn new(field: Arc<BaseField>, n: usize, r: u32) -> Result<Self> {
        let coords = gamma_set(n, field.m(), r)?.into_iter().map(|v| (v, CoordSpec::Transcendental)).collect();
        Ok(KernelPresentation { field, n, r, coords })
    }

    pub fn set(&mut self, coord: &DerIndet, spec: CoordSpec) -> Result<()> {
        let slot = self
            .coords
            .iter_mut()
            .find(|(v, _)| v == coord)
            .ok_or_else(|| Error::BadIndex(format!("coordinate {:?} outside Γ_n(r)", coord)))?;
        slot.1 = spec;
        Ok(())
    }

    pub fn field(&self) -> &BaseField {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.field.m()
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn coords(&self) -> &[(DerIndet, CoordSpec)] {
        &self.coords
    }

    fn algebraic(&self) -> impl DoubleEndedIterator<Item = (&DerIndet, &DiffPoly)> {
        self.coords.iter().filter_map(|(v, s)| match s {
            CoordSpec::Algebraic(p) => Some((v, p)),
            CoordSpec::Transcendental => None,
        })
    }

    /// Pseudo-reduces `f` against the minimal polynomials ranked at or below
    /// `upto`, highest first.
    fn reduce(&self, f: &DiffPoly, upto: Option<&DerIndet>) -> DiffPoly {
        let mut f = f.clone();
        for (v, p) in self.algebraic().rev() {
            if upto.is_some_and(|u| v > u) {
                continue;
            }
            f = prem(&f, p, v);
            if f.is_zero() {
                break;
            }
        }
        f
    }
}

/// Pseudo-remainder of `f` by `g` in the variable `v`.
fn prem(f: &DiffPoly, g: &DiffPoly, v: &DerIndet) -> DiffPoly {
    let dg = g.degree_in(v);
    let lead = g.coeffs_in(v).swap_remove(dg as usize);
    let unit = lead.as_constant();
    let mut f = f.clone();
    loop {
        let df = f.degree_in(v);
        if f.is_zero() || df < dg {
            return f;
        }
        let cf = f.coeffs_in(v).swap_remove(df as usize);
        let shift = DiffPoly::indet(v.clone()).pow(df - dg);
        f = match &unit {
            Some(c) => {
                let q = cf.scale(&c.inv().expect("nonzero leading coefficient"));
                f.sub(&q.mul(&shift).mul(g))
            }
            None => f.mul(&lead).sub(&cf.mul(&shift).mul(g)).make_monic(),
        };
    }
}

/// Leaders inside Γ_n(r) and the minimal ones among them.
pub fn leaders(kp: &KernelPresentation) -> (Vec<DerIndet>, Vec<DerIndet>) {
    let alg: Vec<&DerIndet> = kp.algebraic().map(|(v, _)| v).collect();
    let all: Vec<DerIndet> =
        kp.coords.iter().map(|(v, _)| v).filter(|v| alg.iter().any(|a| v.is_derivative_of(a))).cloned().collect();
    let minimal: Vec<DerIndet> =
        all.iter().filter(|v| !all.iter().any(|w| v.is_proper_derivative_of(w))).cloned().collect();
    (all, minimal)
}

/// Checks triangularity and that each D_k extends to the coordinates of
/// order below r.
pub fn validate_kernel(kp: &KernelPresentation) -> Option<KernelRejection> {
    let field = kp.field();
    let m = kp.m();
    let malformed = |v: &DerIndet, reason: &str| {
        Some(KernelRejection::Malformed { var: v.var, xi: v.xi.clone(), reason: reason.into() })
    };
    for (v, p) in kp.algebraic() {
        if p.degree_in(v) == 0 {
            return malformed(v, "minimal polynomial is constant in its coordinate");
        }
        if p.indets().iter().any(|w| w > v) {
            return malformed(v, "minimal polynomial mentions a later coordinate");
        }
        let lead = p.coeffs_in(v).swap_remove(p.degree_in(v) as usize);
        let below = kp.coords.iter().map(|(w, _)| w).filter(|w| *w < v).last();
        if below.map_or(lead.is_zero(), |b| kp.reduce(&lead, Some(b)).is_zero()) {
            return malformed(v, "leading coefficient vanishes in the tower");
        }
    }
    for (v, p) in kp.algebraic() {
        if v.order() + 1 > kp.r() {
            continue;
        }
        for k in 0..m {
            let e = unit_index(m, k);
            let mut q = p.map_coeffs(|c| field.derive_base(k, c).expect("derivation index in range"));
            for w in p.indets() {
                q = q.add(&p.partial(&w).mul(&DiffPoly::indet(w.shifted(&e))));
            }
            if !kp.reduce(&q, None).is_zero() {
                return Some(KernelRejection::Derivation { var: v.var, xi: v.xi.clone(), k });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::RatFunc;

    fn a(e: u32) -> DerIndet {
        DerIndet::new(0, vec![e])
    }

    fn square_root_kernel(a1: Option<DiffPoly>) -> KernelPresentation {
        let mut kp = KernelPresentation::new(Arc::new(BaseField::rational_t()), 1, 1).unwrap();
        let a0 = DiffPoly::indet(a(0));
        kp.set(&a(0), CoordSpec::Algebraic(a0.pow(2).sub(&DiffPoly::constant(RatFunc::gen(0))))).unwrap();
        if let Some(p) = a1 {
            kp.set(&a(1), CoordSpec::Algebraic(p)).unwrap();
        }
        kp
    }

    #[test]
    fn three_kernels() {
        let free = KernelPresentation::new(Arc::new(BaseField::rational_t()), 1, 1).unwrap();
        assert_eq!(validate_kernel(&free), None);
        let a0 = DiffPoly::indet(a(0));
        let a1 = DiffPoly::indet(a(1));
        let forced = a0.mul(&a1).scale(&RatFunc::from_int(2)).sub(&DiffPoly::one());
        assert_eq!(validate_kernel(&square_root_kernel(Some(forced))), None);
        assert_eq!(
            validate_kernel(&square_root_kernel(Some(a1.clone()))),
            Some(KernelRejection::Derivation { var: 0, xi: vec![0], k: 0 })
        );
        assert!(validate_kernel(&square_root_kernel(None)).is_some());
    }

    #[test]
    fn malformed_presentations() {
        let mut kp = KernelPresentation::new(Arc::new(BaseField::rational_t()), 1, 1).unwrap();
        kp.set(&a(0), CoordSpec::Algebraic(DiffPoly::indet(a(1)))).unwrap();
        assert!(matches!(validate_kernel(&kp), Some(KernelRejection::Malformed { .. })));
        assert!(kp.set(&a(2), CoordSpec::Transcendental).is_err());
    }

    #[test]
    fn leader_cones() {
        let free = KernelPresentation::new(Arc::new(BaseField::rational_t()), 1, 1).unwrap();
        assert_eq!(leaders(&free), (vec![], vec![]));
        let mut kp = free.clone();
        kp.set(&a(1), CoordSpec::Algebraic(DiffPoly::indet(a(1)))).unwrap();
        assert_eq!(leaders(&kp), (vec![a(1)], vec![a(1)]));
        let kp = square_root_kernel(None);
        assert_eq!(leaders(&kp), (vec![a(0), a(1)], vec![a(0)]));
    }
}
