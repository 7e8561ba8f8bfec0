use serde::Serialize;

use super::gamma::gamma_set;
use super::series::exp_embed;
use crate::coeff::{BaseField, RatFunc};
use crate::diffpoly::{index_factorial, indices_up_to, unit_index, DerIndet, DiffPoly, MultiIndex, PolPoly};
use crate::error::Result;

/// Where an emitted equation came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquationTag {
    pub source: usize,
    pub xi: MultiIndex,
    /// ξ!, the factor the ε^ξ-coefficient was multiplied by.
    pub cleared: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProlongationSystem {
    pub n: usize,
    pub m: usize,
    pub r: u32,
    pub vars: Vec<DerIndet>,
    pub equations: Vec<PolPoly>,
    pub tags: Vec<EquationTag>,
}

impl ProlongationSystem {
    /// Equations made monic, for comparison up to scalars.
    pub fn normalized(&self) -> Vec<DiffPoly> {
        let mut v: Vec<DiffPoly> =
            self.equations.iter().filter(|p| !p.is_zero()).map(|p| p.as_poly().make_monic()).collect();
        v.sort_by(|a, b| format!("{:?}", a).cmp(&format!("{:?}", b)));
        v.dedup();
        v
    }

    pub fn to_json(&self, field_names: &[String], var_names: &[String]) -> serde_json::Value {
        serde_json::json!({
            "r": self.r,
            "vars": self.vars.iter().map(|v| (v.xi.clone(), v.var + 1)).collect::<Vec<_>>(),
            "eqs": self.equations.iter().map(|p| p.fmt_with(field_names, var_names)).collect::<Vec<_>>(),
            "tags": self.tags,
        })
    }
}

fn max_var(f: &[PolPoly]) -> usize {
    f.iter().flat_map(|p| p.as_poly().indets()).map(|v| v.var + 1).max().unwrap_or(1)
}

/// The ε^ξ-coefficients of every embedded generator, |ξ| ≤ r, times ξ!.
///
/// The generators are read as polynomials in x_i = x_i^0. `n` is raised to
/// cover every variable that occurs.
pub fn prolongation_equations(field: &BaseField, n: usize, f: &[PolPoly], r: u32) -> Result<ProlongationSystem> {
    let m = field.m();
    let n = n.max(max_var(f));
    let mut equations = Vec::new();
    let mut tags = Vec::new();
    for (j, fj) in f.iter().enumerate() {
        let s = exp_embed(field, fj, r);
        for xi in indices_up_to(m, r) {
            let c = index_factorial(&xi);
            equations.push(PolPoly::from_poly(s.coeff(&xi).scale(&RatFunc::from_int(c as i64))));
            tags.push(EquationTag { source: j, xi, cleared: c });
        }
    }
    Ok(ProlongationSystem { n, m, r, vars: gamma_set(n, m, r)?, equations, tags })
}

/// The first prolongation written out directly: for each generator f_j,
/// the equation f_j itself and, for each k,
/// Σ_i ∂f_j/∂x_i · y_{i,k} + f_j^{δ_k}, with y_{i,k} the coordinate x_i^{e_k}.
pub fn tau1_explicit(field: &BaseField, n: usize, f: &[PolPoly]) -> Result<ProlongationSystem> {
    let m = field.m();
    let n = n.max(max_var(f));
    let mut equations = Vec::new();
    let mut tags = Vec::new();
    for (j, fj) in f.iter().enumerate() {
        let p = fj.as_poly();
        equations.push(fj.clone());
        tags.push(EquationTag { source: j, xi: vec![0; m], cleared: 1 });
        for k in 0..m {
            let mut eq = p.map_coeffs(|c| field.derive_base(k, c).expect("derivation index in range"));
            for i in 0..n {
                let y = DiffPoly::indet(DerIndet::new(i, unit_index(m, k)));
                eq = eq.add(&p.partial(&DerIndet::base(i, m)).mul(&y));
            }
            equations.push(PolPoly::from_poly(eq));
            tags.push(EquationTag { source: j, xi: unit_index(m, k), cleared: 1 });
        }
    }
    Ok(ProlongationSystem { n, m, r: 1, vars: gamma_set(n, m, 1)?, equations, tags })
}
