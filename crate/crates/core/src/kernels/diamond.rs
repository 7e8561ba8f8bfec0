use std::collections::HashMap;

use serde::Serialize;

use super::bounds::BoundTable;
use super::maps::{index_maps, IndexMaps};
use crate::coeff::{BaseField, RatFunc};
use crate::diffpoly::{DerIndet, DiffPoly, PolPoly};
use crate::error::{Error, Result};
use crate::prolong::tau1_explicit;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ProbeOutcome {
    Pass,
    /// Indices into the τ₁ equation list that did not vanish at φ(b).
    Fail { equations: Vec<usize> },
    /// The probe is not a point of W.
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiamondReport {
    pub alpha: usize,
    pub beta: usize,
    pub outcomes: Vec<ProbeOutcome>,
}

impl DiamondReport {
    pub fn all_pass(&self) -> bool {
        self.outcomes.iter().all(|o| !matches!(o, ProbeOutcome::Fail { .. }))
    }
}

fn eval(f: &DiffPoly, at: &HashMap<DerIndet, RatFunc>) -> Result<RatFunc> {
    for v in f.indets() {
        if !at.contains_key(&v) {
            return Err(Error::BadIndex(format!("variable {:?} outside the coordinate set", v)));
        }
    }
    let g = f.substitute(&|v| at.get(v).map(|c| DiffPoly::constant(c.clone())));
    Ok(g.as_constant().unwrap_or_default())
}

/// Checks φ(b) ∈ τ(π(W)) on each probe b ∈ W.
///
/// `w_gens` use the coordinates of Γ_n(C); `piw_gens` those of Γ_n(C − 1),
/// with C = C^n_{1,m}. Probe entries follow the ranking order of Γ_n(C).
pub fn check_diamond(
    field: &BaseField,
    table: &BoundTable,
    n: usize,
    w_gens: &[DiffPoly],
    piw_gens: &[DiffPoly],
    probes: &[Vec<RatFunc>],
) -> Result<DiamondReport> {
    let m = field.m();
    let maps: IndexMaps = index_maps(table, n, m)?;
    let (alpha, beta) = (maps.source.len(), maps.truncated.len());
    for g in piw_gens {
        if g.indets().iter().any(|v| maps.truncated.binary_search(v).is_err()) {
            return Err(Error::BadIndex("π(W) generator outside Γ_n(C − 1)".into()));
        }
    }
    // π(W) lives in U^β: coordinate s of Γ_n(C − 1) becomes the plain variable z_s
    let rename: HashMap<DerIndet, DerIndet> =
        maps.truncated.iter().enumerate().map(|(s, v)| (v.clone(), DerIndet::base(s, m))).collect();
    let flat: Vec<PolPoly> = piw_gens.iter().map(|g| PolPoly::from_poly(g.rename(&|v| rename[v].clone()))).collect();
    let tau = tau1_explicit(field, beta, &flat)?;
    let mut outcomes = Vec::new();
    for b in probes {
        if b.len() != alpha {
            return Err(Error::BadIndex(format!("probe has {} entries, expected {}", b.len(), alpha)));
        }
        let at: HashMap<DerIndet, RatFunc> = maps.source.iter().cloned().zip(b.iter().cloned()).collect();
        let mut on_w = true;
        for g in w_gens {
            if !eval(g, &at)?.is_zero() {
                on_w = false;
            }
        }
        if !on_w {
            outcomes.push(ProbeOutcome::NotApplicable);
            continue;
        }
        let image = IndexMaps::apply(&maps.phi, b);
        let mut tau_at = HashMap::new();
        for (block, chunk) in image.chunks(beta).enumerate() {
            for (s, val) in chunk.iter().enumerate() {
                let mut xi = vec![0; m];
                if block > 0 {
                    xi[block - 1] = 1;
                }
                tau_at.insert(DerIndet::new(s, xi), val.clone());
            }
        }
        let failing: Vec<usize> = tau
            .equations
            .iter()
            .enumerate()
            .filter_map(|(i, e)| match eval(e.as_poly(), &tau_at) {
                Ok(v) if v.is_zero() => None,
                _ => Some(i),
            })
            .collect();
        outcomes.push(if failing.is_empty() { ProbeOutcome::Pass } else { ProbeOutcome::Fail { equations: failing } });
    }
    Ok(DiamondReport { alpha, beta, outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(e: u32) -> DiffPoly {
        DiffPoly::indet(DerIndet::new(0, vec![e]))
    }

    #[test]
    fn ordinary_examples() {
        let k = BaseField::rational_t();
        let t = BoundTable::default();
        let pts = vec![vec![RatFunc::from_int(2), RatFunc::from_int(2)], vec![RatFunc::one(), RatFunc::zero()]];
        let rep = check_diamond(&k, &t, 1, &[x(1).sub(&x(0))], &[], &pts).unwrap();
        assert_eq!((rep.alpha, rep.beta), (2, 1));
        assert_eq!(rep.outcomes, vec![ProbeOutcome::Pass, ProbeOutcome::NotApplicable]);

        let zero = vec![vec![RatFunc::zero(), RatFunc::zero()]];
        let rep = check_diamond(&k, &t, 1, &[x(0), x(1)], &[x(0)], &zero).unwrap();
        assert_eq!(rep.outcomes, vec![ProbeOutcome::Pass]);
        assert!(rep.all_pass());
    }

    #[test]
    fn wrong_projection_fails() {
        let k = BaseField::rational_t();
        let tb = BoundTable::default();
        // W = V(x¹ − 1); π(W) wrongly claimed to be V(x⁰ − t)
        let w = [x(1).sub(&DiffPoly::one()), x(0).sub(&DiffPoly::constant(RatFunc::gen(0)))];
        let bad = [x(0).sub(&DiffPoly::constant(RatFunc::gen(0))).pow(2).sub(&DiffPoly::one())];
        let pts = vec![vec![RatFunc::gen(0), RatFunc::one()]];
        let rep = check_diamond(&k, &tb, 1, &w, &bad, &pts).unwrap();
        assert!(matches!(rep.outcomes[0], ProbeOutcome::Fail { .. }));
        assert!(check_diamond(&k, &tb, 1, &w, &[x(1)], &pts).is_err());
        assert!(check_diamond(&k, &tb, 1, &w, &[], &[vec![RatFunc::one()]]).is_err());
    }
}
