use std::sync::Arc;

use serde::Serialize;

use crate::coeff::{BaseField, RatFunc};
use crate::error::{Error, Result};

/// Coordinates of an element of B in the fixed basis b_1..b_ℓ.
pub type BElem = Vec<RatFunc>;

/// A finite free differential extension B/K with basis b_1..b_ℓ.
///
/// `mult[i][j][k]` is the b_k-coordinate of b_i·b_j and `der[d][i][j]`
/// is the b_i-coordinate of δ_d(b_j), i.e. λ_i(δ_d b_j).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeExtension {
    base: Arc<BaseField>,
    basis_names: Vec<String>,
    mult: Vec<Vec<BElem>>,
    unit: BElem,
    der: Vec<Vec<Vec<RatFunc>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtensionRejection {
    pub identity: String,
    pub detail: String,
}

impl FreeExtension {
    /// Assembles an extension after shape checks only; see [`validate_extension`].
    pub fn new_unchecked(
        base: Arc<BaseField>,
        basis_names: Vec<String>,
        mult: Vec<Vec<BElem>>,
        unit: BElem,
        der: Vec<Vec<Vec<RatFunc>>>,
    ) -> Result<Self> {
        let ell = basis_names.len();
        let bad = |what: &str| Err(Error::InvalidExtension(format!("{} has the wrong shape for rank {}", what, ell)));
        if ell == 0 {
            return Err(Error::InvalidExtension("rank must be at least 1".into()));
        }
        if mult.len() != ell || mult.iter().any(|row| row.len() != ell || row.iter().any(|v| v.len() != ell)) {
            return bad("mult");
        }
        if unit.len() != ell {
            return bad("unit");
        }
        if der.len() != base.m() || der.iter().any(|mat| mat.len() != ell || mat.iter().any(|r| r.len() != ell)) {
            return bad("der");
        }
        Ok(FreeExtension { base, basis_names, mult, unit, der })
    }

    pub fn new(
        base: Arc<BaseField>,
        basis_names: Vec<String>,
        mult: Vec<Vec<BElem>>,
        unit: BElem,
        der: Vec<Vec<Vec<RatFunc>>>,
    ) -> Result<Self> {
        let e = Self::new_unchecked(base, basis_names, mult, unit, der)?;
        match validate_extension(&e) {
            None => Ok(e),
            Some(r) => Err(Error::InvalidExtension(format!("{}: {}", r.identity, r.detail))),
        }
    }

    /// B = K with basis {1}.
    pub fn trivial(base: Arc<BaseField>) -> Self {
        let m = base.m();
        Self::new_unchecked(
            base,
            vec!["1".into()],
            vec![vec![vec![RatFunc::one()]]],
            vec![RatFunc::one()],
            vec![vec![vec![RatFunc::zero()]]; m],
        )
        .expect("shape")
    }

    /// Basis {1, b} with b² = c and δ_d b = (δ_d c / 2c)·b.
    pub fn quadratic(base: Arc<BaseField>, c: RatFunc, name: &str) -> Result<Self> {
        let two_c = &c * &RatFunc::from_int(2);
        let mut der = Vec::new();
        for d in 0..base.m() {
            let coeff = base.derive_base(d, &c)?.div(&two_c)?;
            der.push(vec![vec![RatFunc::zero(), RatFunc::zero()], vec![RatFunc::zero(), coeff]]);
        }
        let (z, o) = (RatFunc::zero(), RatFunc::one());
        let mult = vec![
            vec![vec![o.clone(), z.clone()], vec![z.clone(), o.clone()]],
            vec![vec![z.clone(), o.clone()], vec![c, z.clone()]],
        ];
        Self::new(base, vec!["1".into(), name.into()], mult, vec![o, z], der)
    }

    pub fn base(&self) -> &BaseField {
        &self.base
    }

    pub fn base_arc(&self) -> &Arc<BaseField> {
        &self.base
    }

    pub fn ell(&self) -> usize {
        self.basis_names.len()
    }

    pub fn m(&self) -> usize {
        self.base.m()
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis_names
    }

    pub fn mult(&self, i: usize, j: usize) -> &BElem {
        &self.mult[i][j]
    }

    pub fn unit(&self) -> &BElem {
        &self.unit
    }

    /// λ_i(δ_d b_j).
    pub fn der(&self, d: usize, i: usize, j: usize) -> &RatFunc {
        &self.der[d][i][j]
    }

    pub fn der_matrix(&self, d: usize) -> &Vec<Vec<RatFunc>> {
        &self.der[d]
    }

    pub fn basis_elem(&self, j: usize) -> BElem {
        let mut v = vec![RatFunc::zero(); self.ell()];
        v[j] = RatFunc::one();
        v
    }

    pub fn zero_elem(&self) -> BElem {
        vec![RatFunc::zero(); self.ell()]
    }

    /// The image of a ∈ K in B.
    pub fn scalar(&self, a: &RatFunc) -> BElem {
        self.unit.iter().map(|u| u * a).collect()
    }

    pub fn add(&self, x: &BElem, y: &BElem) -> BElem {
        x.iter().zip(y).map(|(a, b)| a + b).collect()
    }

    pub fn sub(&self, x: &BElem, y: &BElem) -> BElem {
        x.iter().zip(y).map(|(a, b)| a - b).collect()
    }

    pub fn scale(&self, x: &BElem, a: &RatFunc) -> BElem {
        x.iter().map(|c| c * a).collect()
    }

    pub fn mul(&self, x: &BElem, y: &BElem) -> BElem {
        let mut out = self.zero_elem();
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (k, c) in self.mult[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] = &out[k] + &(&ab * c);
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, x: &BElem, e: u32) -> BElem {
        let mut acc = self.unit.clone();
        for _ in 0..e {
            acc = self.mul(&acc, x);
        }
        acc
    }

    /// δ_d on B: coefficients by δ_d, basis vectors by the der matrix.
    pub fn derive(&self, d: usize, x: &BElem) -> BElem {
        let mut out: BElem = x.iter().map(|a| self.base.derivation(d).apply(a)).collect();
        for (j, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (i, slot) in out.iter_mut().enumerate() {
                let c = &self.der[d][i][j];
                if !c.is_zero() {
                    *slot = &*slot + &(a * c);
                }
            }
        }
        out
    }

    pub fn is_zero_elem(x: &BElem) -> bool {
        x.iter().all(RatFunc::is_zero)
    }

    pub fn fmt_elem(&self, x: &BElem) -> String {
        let mut parts = Vec::new();
        for (j, c) in x.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let name = &self.basis_names[j];
            let cs = self.base.fmt(c);
            if name == "1" {
                parts.push(if cs.contains(' ') { format!("({})", cs) } else { cs });
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
}

/// Checks the algebra and derivation axioms on the basis by exact expansion.
pub fn validate_extension(e: &FreeExtension) -> Option<ExtensionRejection> {
    let ell = e.ell();
    let reject = |identity: &str, detail: String| Some(ExtensionRejection { identity: identity.into(), detail });
    let name = |i: usize| e.basis_names[i].clone();
    if let Some(w) = crate::coeff::validate_field(&e.base) {
        return reject("base field", format!("[d{}, d{}] nonzero on generator {}", w.i + 1, w.j + 1, w.generator + 1));
    }
    for i in 0..ell {
        for j in 0..ell {
            if e.mult[i][j] != e.mult[j][i] {
                return reject("commutativity", format!("{}*{} != {}*{}", name(i), name(j), name(j), name(i)));
            }
        }
    }
    for j in 0..ell {
        if e.mul(&e.unit, &e.basis_elem(j)) != e.basis_elem(j) {
            return reject("unit", format!("1*{} != {}", name(j), name(j)));
        }
    }
    for i in 0..ell {
        for j in 0..ell {
            for k in 0..ell {
                let l = e.mul(&e.mult[i][j], &e.basis_elem(k));
                let r = e.mul(&e.basis_elem(i), &e.mult[j][k]);
                if l != r {
                    return reject("associativity", format!("({}*{})*{} != {}*({}*{})", name(i), name(j), name(k), name(i), name(j), name(k)));
                }
            }
        }
    }
    for d in 0..e.m() {
        for i in 0..ell {
            for j in i..ell {
                let (bi, bj) = (e.basis_elem(i), e.basis_elem(j));
                let lhs = e.derive(d, &e.mult[i][j]);
                let rhs = e.add(&e.mul(&e.derive(d, &bi), &bj), &e.mul(&bi, &e.derive(d, &bj)));
                if lhs != rhs {
                    return reject(
                        "leibniz",
                        format!(
                            "d{}({}*{}) = {} but Leibniz gives {}",
                            d + 1,
                            name(i),
                            name(j),
                            e.fmt_elem(&lhs),
                            e.fmt_elem(&rhs)
                        ),
                    );
                }
            }
        }
    }
    for d1 in 0..e.m() {
        for d2 in d1 + 1..e.m() {
            for j in 0..ell {
                let bj = e.basis_elem(j);
                let a = e.derive(d1, &e.derive(d2, &bj));
                let b = e.derive(d2, &e.derive(d1, &bj));
                if a != b {
                    return reject("commuting derivations", format!("[d{}, d{}]({}) != 0", d1 + 1, d2 + 1, name(j)));
                }
            }
        }
    }
    None
}

/// λ-coordinates of a coordinate vector: checks the length and returns them.
pub fn lambda_extract<T: Clone>(coords: &[T], ell: usize) -> Result<Vec<T>> {
    if coords.len() != ell {
        return Err(Error::BadIndex(format!("{} coordinates for a basis of size {}", coords.len(), ell)));
    }
    Ok(coords.to_vec())
}

/// Σ coords_i·b_i, read back as a coordinate vector (the reassembly of λ).
pub fn reassemble(e: &FreeExtension, coords: &[RatFunc]) -> BElem {
    (0..e.ell()).fold(e.zero_elem(), |acc, i| e.add(&acc, &e.scale(&e.basis_elem(i), &coords[i])))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kt() -> Arc<BaseField> {
        Arc::new(BaseField::rational_t())
    }

    #[test]
    fn quadratic_example_validates() {
        let e = FreeExtension::quadratic(kt(), RatFunc::gen(0), "b").unwrap();
        assert!(validate_extension(&e).is_none());
        assert!(validate_extension(&FreeExtension::trivial(kt())).is_none());
    }

    #[test]
    fn wrong_derivation_is_rejected() {
        let good = FreeExtension::quadratic(kt(), RatFunc::gen(0), "b").unwrap();
        let mut der = good.der.clone();
        der[0][1][1] = RatFunc::one();
        let bad = FreeExtension::new_unchecked(kt(), good.basis_names.clone(), good.mult.clone(), good.unit.clone(), der).unwrap();
        let r = validate_extension(&bad).unwrap();
        assert_eq!(r.identity, "leibniz");
    }

    #[test]
    fn lambda_examples() {
        let e = FreeExtension::quadratic(kt(), RatFunc::gen(0), "b").unwrap();
        assert_eq!(lambda_extract(e.unit(), 2).unwrap(), vec![RatFunc::one(), RatFunc::zero()]);
        assert_eq!(lambda_extract(&e.basis_elem(1), 2).unwrap(), vec![RatFunc::zero(), RatFunc::one()]);
        let c = RatFunc::from_int(3);
        let b2c = e.scale(&e.mul(&e.basis_elem(1), &e.basis_elem(1)), &c);
        assert_eq!(b2c, vec![&RatFunc::gen(0) * &c, RatFunc::zero()]);
        assert!(lambda_extract(&b2c, 3).is_err());
        assert_eq!(reassemble(&e, &b2c), b2c);
    }
}
