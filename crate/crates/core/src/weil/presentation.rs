use std::collections::BTreeMap;

use super::descent::{Coords, Descent};
use super::extension::{BElem, FreeExtension};
use crate::coeff::RatFunc;
use crate::diffpoly::{indices_up_to, DerIndet, DiffPoly, MultiIndex};
use crate::error::{Error, Result};

/// λ_i(W(f_r)) for relation `relation`, coordinate `coord` (both 0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealGen {
    pub relation: usize,
    pub coord: usize,
    pub poly: DiffPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentOutput {
    pub order_bound: u32,
    /// t_θ(i) for |θ| ≤ order_bound, in ranking order.
    pub generators: Vec<DerIndet>,
    pub ideal_gens: Vec<IdealGen>,
    /// `der_images[d]`: t_θ(i) ↦ ∂_d^W(t_θ(i)).
    pub der_images: Vec<BTreeMap<DerIndet, DiffPoly>>,
    /// t_θ ↦ λ-coordinates of W_D(t_θ).
    pub unit_table: BTreeMap<DerIndet, Coords>,
}

/// Descends the relations F ⊂ B{T} over the working fragment |θ| ≤ s.
pub fn descend_presentation(desc: &Descent, relations: &[Coords], s: u32) -> Result<DescentOutput> {
    for (r, f) in relations.iter().enumerate() {
        let ord = f.iter().map(DiffPoly::order).max().unwrap_or(0);
        if ord > s {
            return Err(Error::BadBound(format!("relation {} has order {} above the bound {}", r + 1, ord, s)));
        }
    }
    let mut ideal_gens = Vec::new();
    for (relation, f) in relations.iter().enumerate() {
        for (coord, poly) in desc.descend_poly(f).into_iter().enumerate() {
            if !poly.is_zero() {
                ideal_gens.push(IdealGen { relation, coord, poly });
            }
        }
    }
    let thetas = indices_up_to(desc.m(), s);
    let mut generators = Vec::new();
    let mut unit_table = BTreeMap::new();
    for t in 0..desc.gens().len() {
        for theta in &thetas {
            let tv = DerIndet::new(t, theta.clone());
            unit_table.insert(tv.clone(), desc.unit_image(&tv));
            for i in 0..desc.ell() {
                generators.push(desc.w_var(t, i, theta));
            }
        }
    }
    generators.sort();
    let der_images = (0..desc.m())
        .map(|d| {
            generators
                .iter()
                .map(|v| {
                    let (t, i) = desc.split(v);
                    (v.clone(), desc.descended_derivation(d, t, i, &v.xi))
                })
                .collect()
        })
        .collect();
    Ok(DescentOutput { order_bound: s, generators, ideal_gens, der_images, unit_table })
}

/// The descended system as differential polynomials in y_1..y_{|T|ℓ},
/// where y_{tℓ+i+1} stands for t(i) and the ambient derivations are ∂^W.
pub fn standardize_descent(desc: &Descent, out: &DescentOutput) -> Vec<DiffPoly> {
    let mut eqs: Vec<DiffPoly> = Vec::new();
    for g in &out.ideal_gens {
        let p = desc.standardize(&g.poly);
        if !p.is_zero() && p.order() <= out.order_bound && !eqs.contains(&p) {
            eqs.push(p);
        }
    }
    eqs
}

/// λ-coordinates of W_D(f), with t_θ(i) standing for its class mod I_D.
pub fn unit_map(desc: &Descent, f: &Coords) -> Coords {
    desc.descend_poly(f)
}

/// F_{A[T]}: t_θ(i) ↦ λ_i(1)·t_θ.
pub fn counit_map(desc: &Descent, g: &DiffPoly) -> DiffPoly {
    let unit = desc.ext().unit().clone();
    g.substitute(&|v| {
        let (t, i) = desc.split(v);
        Some(DiffPoly::indet(DerIndet::new(t, v.xi.clone())).scale(&unit[i]))
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Transfer<P> {
    Point(P),
    Rejected(String),
}

pub type WPoint = BTreeMap<DerIndet, RatFunc>;
pub type BPoint = BTreeMap<DerIndet, BElem>;

fn eval_k(p: &DiffPoly, point: &WPoint) -> Result<RatFunc> {
    for v in p.indets() {
        if !point.contains_key(&v) {
            return Err(Error::NotApplicable("assignment misses a coordinate".into()));
        }
    }
    let val = p.substitute(&|v| point.get(v).map(|c| DiffPoly::constant(c.clone())));
    Ok(val.as_constant().expect("all indeterminates assigned"))
}

/// Evaluates f ∈ B{T} at a B-valued assignment.
pub fn eval_b(ext: &FreeExtension, f: &Coords, point: &BPoint) -> Result<BElem> {
    let mut out = ext.zero_elem();
    for (k, fk) in f.iter().enumerate() {
        let bk = ext.basis_elem(k);
        for (mono, c) in fk.terms() {
            let mut term = ext.scale(&bk, c);
            for (v, e) in mono.factors() {
                let val = point.get(v).ok_or_else(|| Error::NotApplicable("assignment misses a coordinate".into()))?;
                term = ext.mul(&term, &ext.pow(val, *e));
            }
            out = ext.add(&out, &term);
        }
    }
    Ok(out)
}

fn lower_step(xi: &[u32]) -> Option<(usize, MultiIndex)> {
    let k = xi.iter().position(|&e| e > 0)?;
    let mut lower = xi.to_vec();
    lower[k] -= 1;
    Some((k, lower))
}

/// Extends order-0 K-values of the t(i) to a differential point of the
/// free descent up to order s.
pub fn prolong_w_point(desc: &Descent, base: &[Vec<RatFunc>], s: u32) -> WPoint {
    let mut pt = WPoint::new();
    for theta in indices_up_to(desc.m(), s) {
        for (t, vals) in base.iter().enumerate() {
            for i in 0..desc.ell() {
                let v = desc.w_var(t, i, &theta);
                let val = match lower_step(&theta) {
                    None => vals[i].clone(),
                    Some((k, lower)) => w_successor(desc, &pt, t, i, k, &lower),
                };
                pt.insert(v, val);
            }
        }
    }
    pt
}

/// The value t_{θ+e_k}(i) must take: δ_k t_θ(i) + Σ_j λ_i(δ_k b_j) t_θ(j).
fn w_successor(desc: &Descent, pt: &WPoint, t: usize, i: usize, k: usize, theta: &[u32]) -> RatFunc {
    let field = desc.ext().base();
    let mut val = field.derivation(k).apply(&pt[&desc.w_var(t, i, theta)]);
    for j in 0..desc.ell() {
        let c = desc.ext().der(k, i, j);
        if !c.is_zero() {
            val = &val + &(c * &pt[&desc.w_var(t, j, theta)]);
        }
    }
    val
}

/// Extends order-0 B-values of the t to a differential point up to order s.
pub fn prolong_b_point(ext: &FreeExtension, base: &[BElem], s: u32) -> BPoint {
    let mut pt = BPoint::new();
    for theta in indices_up_to(ext.m(), s) {
        for (t, val) in base.iter().enumerate() {
            let v = match lower_step(&theta) {
                None => val.clone(),
                Some((k, lower)) => ext.derive(k, &pt[&DerIndet::new(t, lower)]),
            };
            pt.insert(DerIndet::new(t, theta.clone()), v);
        }
    }
    pt
}

/// Sends a differential K-point of W(D) to the corresponding L-point of D.
pub fn transfer_to_extension(desc: &Descent, out: &DescentOutput, point: &WPoint) -> Result<Transfer<BPoint>> {
    let s = out.order_bound;
    for v in &out.generators {
        if !point.contains_key(v) {
            return Err(Error::NotApplicable(format!("no value for {}", desc.fmt_w(&DiffPoly::indet(v.clone())))));
        }
    }
    for v in &out.generators {
        if v.order() >= s {
            continue;
        }
        let (t, i) = desc.split(v);
        for k in 0..desc.m() {
            let up = desc.w_var(t, i, &v.derive(k).xi);
            if point[&up] != w_successor(desc, point, t, i, k, &v.xi) {
                return Ok(Transfer::Rejected(format!(
                    "value of {} is not the d{} derivative",
                    desc.fmt_w(&DiffPoly::indet(up)),
                    k + 1
                )));
            }
        }
    }
    for g in &out.ideal_gens {
        if !eval_k(&g.poly, point)?.is_zero() {
            return Ok(Transfer::Rejected(format!("violates {} = 0", desc.fmt_w(&g.poly))));
        }
    }
    let mut res = BPoint::new();
    for tv in out.unit_table.keys() {
        let coords: Vec<RatFunc> = (0..desc.ell()).map(|i| point[&desc.w_var(tv.var, i, &tv.xi)].clone()).collect();
        res.insert(tv.clone(), super::extension::reassemble(desc.ext(), &coords));
    }
    Ok(Transfer::Point(res))
}

/// Sends a differential L-point of D to its λ-coordinates, a K-point of W(D).
pub fn transfer_to_base(desc: &Descent, relations: &[Coords], s: u32, point: &BPoint) -> Result<Transfer<WPoint>> {
    let ext = desc.ext();
    let thetas = indices_up_to(desc.m(), s);
    for t in 0..desc.gens().len() {
        for theta in &thetas {
            let v = DerIndet::new(t, theta.clone());
            let Some(val) = point.get(&v) else {
                return Err(Error::NotApplicable(format!("no value for {}", desc.fmt_t(&DiffPoly::indet(v)))));
            };
            if val.len() != desc.ell() {
                return Err(Error::BadIndex("B-value with the wrong number of coordinates".into()));
            }
        }
    }
    for (tv, val) in point {
        if tv.order() >= s {
            continue;
        }
        for k in 0..desc.m() {
            let up = tv.derive(k);
            if point.get(&up) != Some(&ext.derive(k, val)) {
                return Ok(Transfer::Rejected(format!(
                    "value of {} is not the d{} derivative",
                    desc.fmt_t(&DiffPoly::indet(up)),
                    k + 1
                )));
            }
        }
    }
    for f in relations {
        if !FreeExtension::is_zero_elem(&eval_b(ext, f, point)?) {
            return Ok(Transfer::Rejected(format!("violates {} = 0", desc.fmt_bpoly(f))));
        }
    }
    let mut res = WPoint::new();
    for (tv, val) in point {
        for (i, c) in val.iter().enumerate() {
            res.insert(desc.w_var(tv.var, i, &tv.xi), c.clone());
        }
    }
    Ok(Transfer::Point(res))
}
