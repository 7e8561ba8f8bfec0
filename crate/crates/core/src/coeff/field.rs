use serde::Serialize;

use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

/// A derivation of ℚ(t₁,…,t_k) over ℚ, determined by the images of the generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KDerivation {
    images: Vec<RatFunc>,
}

impl KDerivation {
    pub fn new(images: Vec<RatFunc>) -> Self {
        KDerivation { images }
    }

    pub fn zero(k: usize) -> Self {
        KDerivation { images: vec![RatFunc::zero(); k] }
    }

    pub fn images(&self) -> &[RatFunc] {
        &self.images
    }

    pub fn apply(&self, f: &RatFunc) -> RatFunc {
        let mut acc = RatFunc::zero();
        for (j, img) in self.images.iter().enumerate() {
            if img.is_zero() {
                continue;
            }
            let p = f.partial(j);
            if !p.is_zero() {
                acc = &acc + &(img * &p);
            }
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(RatFunc::is_zero)
    }

    pub fn add(&self, other: &KDerivation) -> KDerivation {
        KDerivation::new(self.images.iter().zip(&other.images).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, c: &RatFunc) -> KDerivation {
        KDerivation::new(self.images.iter().map(|a| a * c).collect())
    }

    /// `[self, other]`, evaluated on each generator.
    pub fn bracket(&self, other: &KDerivation) -> KDerivation {
        KDerivation::new(
            self.images
                .iter()
                .zip(&other.images)
                .map(|(a, b)| &self.apply(b) - &other.apply(a))
                .collect(),
        )
    }
}

/// The base field K = ℚ(t₁,…,t_k) with derivations δ₁,…,δ_m.
///
/// Derivation indices are 0-based throughout the library.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseField {
    names: Vec<String>,
    derivations: Vec<KDerivation>,
}

/// Witness that two derivations fail to commute on a generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldRejection {
    pub i: usize,
    pub j: usize,
    pub generator: usize,
    pub bracket: String,
}

impl BaseField {
    /// Builds a field without checking commutation; see [`validate_field`].
    pub fn new_unchecked(names: Vec<String>, action: Vec<Vec<RatFunc>>) -> Result<Self> {
        let k = names.len();
        for (d, row) in action.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidField(format!(
                    "derivation {} gives {} images for {} generators",
                    d + 1,
                    row.len(),
                    k
                )));
            }
            for img in row {
                if let Some(g) = img.max_gen() {
                    if g >= k {
                        return Err(Error::InvalidField(format!("image mentions generator {}", g + 1)));
                    }
                }
            }
        }
        Ok(BaseField { names, derivations: action.into_iter().map(KDerivation::new).collect() })
    }

    /// Builds and validates; a noncommuting pair is an error here.
    pub fn new(names: Vec<String>, action: Vec<Vec<RatFunc>>) -> Result<Self> {
        let f = Self::new_unchecked(names, action)?;
        match validate_field(&f) {
            None => Ok(f),
            Some(w) => Err(Error::InvalidField(format!(
                "[d{}, d{}]({}) = {}",
                w.i + 1,
                w.j + 1,
                f.names[w.generator],
                w.bracket
            ))),
        }
    }

    /// ℚ(t) with δt = 1.
    pub fn rational_t() -> Self {
        Self::new(vec!["t".into()], vec![vec![RatFunc::one()]]).expect("valid")
    }

    /// ℚ with m zero derivations.
    pub fn constants(m: usize) -> Self {
        Self::new(vec![], vec![vec![]; m]).expect("valid")
    }

    pub fn k(&self) -> usize {
        self.names.len()
    }

    pub fn m(&self) -> usize {
        self.derivations.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn action(&self, d: usize, j: usize) -> &RatFunc {
        &self.derivations[d].images()[j]
    }

    pub fn derivation(&self, d: usize) -> &KDerivation {
        &self.derivations[d]
    }

    pub fn derive_base(&self, d: usize, f: &RatFunc) -> Result<RatFunc> {
        if d >= self.m() {
            return Err(Error::BadIndex(format!("derivation {} out of range 1..{}", d + 1, self.m())));
        }
        Ok(self.derivations[d].apply(f))
    }

    /// δ^ξ f for a multi-index ξ of length m.
    pub fn derive_multi(&self, xi: &[u32], f: &RatFunc) -> RatFunc {
        let mut g = f.clone();
        for (d, &e) in xi.iter().enumerate() {
            for _ in 0..e {
                if g.is_zero() {
                    return g;
                }
                g = self.derivations[d].apply(&g);
            }
        }
        g
    }

    pub fn fmt(&self, f: &RatFunc) -> String {
        f.fmt_with(&self.names)
    }
}

/// Checks `[δ_i, δ_j](t_l) = 0` for all pairs and generators.
///
/// Returns the first failing triple in (i, j, l) order, or `None`.
pub fn validate_field(field: &BaseField) -> Option<FieldRejection> {
    let m = field.m();
    for i in 0..m {
        for j in i + 1..m {
            let br = field.derivations[i].bracket(&field.derivations[j]);
            for (l, v) in br.images().iter().enumerate() {
                if !v.is_zero() {
                    return Some(FieldRejection { i, j, generator: l, bracket: field.fmt(v) });
                }
            }
        }
    }
    None
}
