use super::indet::{DerIndet, IndetStyle};
use super::poly::DiffPoly;
use crate::error::{Error, Result};

/// Algebraic polynomial in the jet coordinates x_i^ξ.
///
/// Shares the sparse representation of [`DiffPoly`]; only the reading of
/// the keys differs, and no derivation acts on it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PolPoly(DiffPoly);

impl PolPoly {
    pub fn from_poly(p: DiffPoly) -> Self {
        PolPoly(p)
    }

    pub fn var(v: DerIndet) -> Self {
        PolPoly(DiffPoly::indet(v))
    }

    pub fn as_poly(&self) -> &DiffPoly {
        &self.0
    }

    pub fn into_poly(self) -> DiffPoly {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn fmt_with(&self, field_names: &[String], var_names: &[String]) -> String {
        self.0.fmt_with(field_names, IndetStyle::Pol(var_names))
    }
}

/// Reads δ^ξ x_i as the coordinate x_i^ξ, for `order(f) ≤ r`.
pub fn polify(f: &DiffPoly, r: u32) -> Result<PolPoly> {
    if f.order() > r {
        return Err(Error::BadBound(format!("order {} exceeds bound {}", f.order(), r)));
    }
    Ok(PolPoly(f.clone()))
}

pub fn unpolify(p: &PolPoly) -> DiffPoly {
    p.0.clone()
}
