use crate::diffpoly::{h_of_set, polify, theta_set, DerIndet, DiffPoly, DiffRing, PolPoly, RankedSet, ThetaElement};
use crate::error::{Error, Result};

use super::gamma::gamma_set;

/// Data of one UC_m axiom instance: V_r(Λ^{(r)}) minus V_r(H_Λ).
#[derive(Clone, Debug)]
pub struct UcmInstance {
    pub set: RankedSet,
    pub r: u32,
    pub theta: Vec<ThetaElement>,
    pub system: Vec<PolPoly>,
    pub h: DiffPoly,
    pub ineq: PolPoly,
    pub vars: Vec<DerIndet>,
    /// Set when the data is read as the open part of Jet_r V.
    pub localized: bool,
}

impl UcmInstance {
    pub fn to_json(&self, field_names: &[String], var_names: &[String]) -> serde_json::Value {
        serde_json::json!({
            "r": self.r,
            "vars": self.vars.iter().map(|v| (v.xi.clone(), v.var + 1)).collect::<Vec<_>>(),
            "eqs": self.system.iter().map(|p| p.fmt_with(field_names, var_names)).collect::<Vec<_>>(),
            "ineq": self.ineq.fmt_with(field_names, var_names),
            "tags": self.theta.iter().map(|t| serde_json::json!({"source": t.source, "xi": t.xi})).collect::<Vec<_>>(),
            "localized": self.localized,
        })
    }
}

pub fn ucm_instance(ring: &DiffRing, set: &RankedSet, r: u32) -> Result<UcmInstance> {
    let theta = theta_set(ring, set, r)?;
    let system = theta.iter().map(|t| polify(&t.poly, r)).collect::<Result<Vec<_>>>()?;
    let h = h_of_set(set);
    let ineq = polify(&h, r)?;
    Ok(UcmInstance {
        set: set.clone(),
        r,
        theta,
        system,
        h,
        ineq,
        vars: gamma_set(ring.n(), ring.m(), r)?,
        localized: false,
    })
}

/// Jet_r V off V_r(H_Λ), for Λ a characteristic set of V. The closure of
/// the full jet space is not computed.
pub fn jet_system_off_h(ring: &DiffRing, set: &RankedSet, r: u32) -> Result<UcmInstance> {
    let mut inst = ucm_instance(ring, set, r)?;
    inst.localized = true;
    Ok(inst)
}

/// Splits the derivatives of order in (r, s] into those that are not a
/// derivative of any leader of Λ and those that are.
pub fn theta_partition(ring: &DiffRing, set: &RankedSet, r: u32, s: u32) -> Result<(Vec<DerIndet>, Vec<DerIndet>)> {
    if r < set.max_order() {
        return Err(Error::BadBound(format!("bound {} below the order {} of the set", r, set.max_order())));
    }
    if s < r {
        return Err(Error::BadBound(format!("enumeration bound {} below {}", s, r)));
    }
    let leaders: Vec<&DerIndet> = set.leader_data().iter().map(|d| &d.leader).collect();
    let (mut t1, mut t2) = (Vec::new(), Vec::new());
    for v in gamma_set(ring.n(), ring.m(), s)?.into_iter().filter(|v| v.order() > r) {
        if leaders.iter().any(|l| v.is_derivative_of(l)) {
            t2.push(v);
        } else {
            t1.push(v);
        }
    }
    Ok((t1, t2))
}
