use std::sync::Arc;

use super::indet::{DerIndet, IndetStyle};
use super::poly::{DiffPoly, Monomial};
use crate::coeff::{BaseField, KDerivation, RatFunc};
use crate::error::{Error, Result};

/// The ring K{x₁,…,x_n}: base field plus variable count and names.
#[derive(Clone, Debug)]
pub struct DiffRing {
    field: Arc<BaseField>,
    n: usize,
    names: Vec<String>,
}

impl DiffRing {
    pub fn new(field: Arc<BaseField>, n: usize) -> Self {
        let names = (1..=n).map(|i| format!("x{}", i)).collect();
        DiffRing { field, n, names }
    }

    pub fn with_names(field: Arc<BaseField>, names: Vec<String>) -> Self {
        DiffRing { field, n: names.len(), names }
    }

    pub fn field(&self) -> &BaseField {
        &self.field
    }

    pub fn field_arc(&self) -> &Arc<BaseField> {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.field.m()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// δ^ξ x_{var+1} as a polynomial.
    pub fn indet(&self, var: usize, xi: &[u32]) -> DiffPoly {
        DiffPoly::indet(DerIndet::new(var, xi.to_vec()))
    }

    pub fn x(&self, var: usize) -> DiffPoly {
        DiffPoly::indet(DerIndet::base(var, self.m()))
    }

    pub fn constant(&self, c: RatFunc) -> DiffPoly {
        DiffPoly::constant(c)
    }

    /// Generic derivation: `coeff` acts on coefficients and `image(v)` gives D(v).
    pub fn apply_derivation(
        f: &DiffPoly,
        coeff: &KDerivation,
        image: &dyn Fn(&DerIndet) -> DiffPoly,
    ) -> DiffPoly {
        let mut out = DiffPoly::zero();
        let mut cache = std::collections::BTreeMap::new();
        for (m, c) in f.terms() {
            let dc = coeff.apply(c);
            out.add_term(m.clone(), dc);
            for (idx, (v, e)) in m.factors().iter().enumerate() {
                let img = cache.entry(v.clone()).or_insert_with(|| image(v));
                if img.is_zero() {
                    continue;
                }
                let mut rest: Vec<(DerIndet, u32)> = m.factors().to_vec();
                if *e == 1 {
                    rest.remove(idx);
                } else {
                    rest[idx].1 -= 1;
                }
                let rest = Monomial::from_factors(rest);
                let scale = c * &RatFunc::from_int(*e as i64);
                for (m2, c2) in img.terms() {
                    out.add_term(m2.mul(&rest), c2 * &scale);
                }
            }
        }
        out
    }

    /// δ_d f (0-based d).
    pub fn differentiate(&self, d: usize, f: &DiffPoly) -> Result<DiffPoly> {
        if d >= self.m() {
            return Err(Error::BadIndex(format!("derivation {} out of range 1..{}", d + 1, self.m())));
        }
        Ok(Self::apply_derivation(f, self.field.derivation(d), &|v| DiffPoly::indet(v.derive(d))))
    }

    /// δ^ξ f.
    pub fn derive_multi(&self, xi: &[u32], f: &DiffPoly) -> DiffPoly {
        let mut g = f.clone();
        for (d, &e) in xi.iter().enumerate() {
            for _ in 0..e {
                if g.is_zero() {
                    return g;
                }
                g = self.differentiate(d, &g).expect("index within m");
            }
        }
        g
    }

    pub fn check_indet(&self, v: &DerIndet) -> Result<()> {
        if v.var >= self.n || v.xi.len() != self.m() {
            return Err(Error::BadIndex(format!("indeterminate outside K{{x1..x{}}} with m = {}", self.n, self.m())));
        }
        Ok(())
    }

    pub fn fmt(&self, f: &DiffPoly) -> String {
        f.fmt_with(self.field.names(), IndetStyle::Diff(&self.names))
    }

    pub fn fmt_pol(&self, f: &DiffPoly) -> String {
        f.fmt_with(self.field.names(), IndetStyle::Pol(&self.names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(m: usize) -> DiffRing {
        let names = vec!["t".to_string()];
        let mut action = vec![vec![RatFunc::zero()]; m];
        action[0][0] = RatFunc::one();
        DiffRing::new(Arc::new(BaseField::new(names, action).unwrap()), 2)
    }

    #[test]
    fn leibniz_on_examples() {
        let r = ring(1);
        let x = r.x(0);
        let dx = r.indet(0, &[1]);
        let got = r.differentiate(0, &x.pow(2)).unwrap();
        assert_eq!(got, x.mul(&dx).scale(&RatFunc::from_int(2)));
        let tx = x.scale(&RatFunc::gen(0));
        assert_eq!(r.differentiate(0, &tx).unwrap(), x.add(&dx.scale(&RatFunc::gen(0))));
    }

    #[test]
    fn mixed_partials_commute() {
        let r = ring(2);
        let x = r.x(0);
        let a = r.differentiate(0, &r.differentiate(1, &x).unwrap()).unwrap();
        let b = r.differentiate(1, &r.differentiate(0, &x).unwrap()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, r.indet(0, &[1, 1]));
        assert!(r.differentiate(2, &x).is_err());
    }
}
