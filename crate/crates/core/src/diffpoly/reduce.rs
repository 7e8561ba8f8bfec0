use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::Serialize;

use super::indet::{index_sub, indices_up_to, order_of, DerIndet, MultiIndex};
use super::poly::{DiffPoly, Monomial};
use super::ring::DiffRing;
use crate::error::{Error, Result};

/// Rank (v_f, d_f), compared lexicographically.
pub type Rank = (DerIndet, u32);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeaderData {
    pub leader: DerIndet,
    pub degree: u32,
    pub separant: DiffPoly,
    pub initial: DiffPoly,
}

impl LeaderData {
    pub fn rank(&self) -> Rank {
        (self.leader.clone(), self.degree)
    }
}

pub fn leader_data(f: &DiffPoly) -> Result<LeaderData> {
    let leader = f.leader().ok_or_else(|| Error::NotApplicable("leader of a constant".into()))?;
    let coeffs = f.coeffs_in(&leader);
    let degree = (coeffs.len() - 1) as u32;
    Ok(LeaderData {
        separant: f.partial(&leader),
        initial: coeffs.last().cloned().expect("degree ≥ 1"),
        leader,
        degree,
    })
}

/// Rank of any polynomial; constants rank below everything.
pub fn rank(f: &DiffPoly) -> Option<Rank> {
    leader_data(f).ok().map(|d| d.rank())
}

/// Compares ranks with constants lowest.
pub fn compare_rank(f: &DiffPoly, g: &DiffPoly) -> Ordering {
    rank(f).cmp(&rank(g))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionStatus {
    Reduced,
    WeaklyReducedOnly,
    NotWeaklyReduced,
}

pub fn reduction_status(g: &DiffPoly, f: &DiffPoly) -> Result<ReductionStatus> {
    let ld = leader_data(f)?;
    Ok(status_against(g, &ld))
}

fn status_against(g: &DiffPoly, ld: &LeaderData) -> ReductionStatus {
    if g.indets().iter().any(|w| w.is_proper_derivative_of(&ld.leader)) {
        ReductionStatus::NotWeaklyReduced
    } else if g.degree_in(&ld.leader) >= ld.degree {
        ReductionStatus::WeaklyReducedOnly
    } else {
        ReductionStatus::Reduced
    }
}

/// Nonconstant polynomials sorted nondecreasingly by rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedSet {
    members: Vec<DiffPoly>,
    data: Vec<LeaderData>,
}

impl RankedSet {
    pub fn new(mut members: Vec<DiffPoly>) -> Result<Self> {
        if members.iter().any(DiffPoly::is_constant) {
            return Err(Error::NotApplicable("ranked sets hold nonconstant polynomials".into()));
        }
        members.sort_by(compare_rank);
        let data = members.iter().map(|f| leader_data(f).expect("nonconstant")).collect();
        Ok(RankedSet { members, data })
    }

    pub fn empty() -> Self {
        RankedSet { members: vec![], data: vec![] }
    }

    pub fn members(&self) -> &[DiffPoly] {
        &self.members
    }

    pub fn leader_data(&self) -> &[LeaderData] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn ranks(&self) -> Vec<Rank> {
        self.data.iter().map(LeaderData::rank).collect()
    }

    pub fn max_order(&self) -> u32 {
        self.members.iter().map(DiffPoly::order).max().unwrap_or(0)
    }

    pub fn is_autoreduced(&self) -> bool {
        for (i, f) in self.members.iter().enumerate() {
            for (j, ld) in self.data.iter().enumerate() {
                if i != j && status_against(f, ld) != ReductionStatus::Reduced {
                    return false;
                }
            }
        }
        true
    }

    /// Whether `g` is reduced with respect to every member.
    pub fn reduces(&self, g: &DiffPoly) -> bool {
        self.data.iter().all(|ld| status_against(g, ld) == ReductionStatus::Reduced)
    }
}

/// H_Λ = ∏ I_f S_f.
pub fn h_of_set(set: &RankedSet) -> DiffPoly {
    set.data.iter().fold(DiffPoly::one(), |acc, ld| acc.mul(&ld.initial).mul(&ld.separant))
}

/// Certificate for `M·f − g = Σ c_{j,ξ}·δ^ξ f_j`, where
/// `M = ∏ I_j^{a_j} S_j^{b_j}` divides `H_Λ^ell`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisionCertificate {
    pub ell: u32,
    pub initial_exponents: Vec<u32>,
    pub separant_exponents: Vec<u32>,
    pub cofactors: BTreeMap<(usize, MultiIndex), DiffPoly>,
    pub remainder: DiffPoly,
}

impl DivisionCertificate {
    pub fn multiplier(&self, set: &RankedSet) -> DiffPoly {
        let mut m = DiffPoly::one();
        for (j, ld) in set.data.iter().enumerate() {
            m = m.mul(&ld.initial.pow(self.initial_exponents[j]));
            m = m.mul(&ld.separant.pow(self.separant_exponents[j]));
        }
        m
    }

    /// Re-expands `M·f − g − Σ c·δ^ξ f_j` and reports whether it vanishes.
    pub fn verify(&self, ring: &DiffRing, f: &DiffPoly, set: &RankedSet) -> bool {
        if self.initial_exponents.len() != set.len() || self.separant_exponents.len() != set.len() {
            return false;
        }
        if self.initial_exponents.iter().chain(&self.separant_exponents).any(|&e| e > self.ell) {
            return false;
        }
        let mut lhs = self.multiplier(set).mul(f).sub(&self.remainder);
        for ((j, xi), c) in &self.cofactors {
            let Some(fj) = set.members.get(*j) else { return false };
            lhs = lhs.sub(&c.mul(&ring.derive_multi(xi, fj)));
        }
        lhs.is_zero()
    }
}

struct PseudoDivision {
    steps: u32,
    quotient: DiffPoly,
    remainder: DiffPoly,
}

/// `lc^steps · g = quotient · b + remainder` with deg_w remainder < deg_w b.
/// When the leading coefficient of `b` lies in K it is inverted instead,
/// and `steps` stays 0.
fn pseudo_divide(g: &DiffPoly, b: &DiffPoly, w: &DerIndet) -> PseudoDivision {
    let bc = b.coeffs_in(w);
    let db = (bc.len() - 1) as u32;
    let lc = bc.last().expect("nonzero divisor").clone();
    let field_lc = lc.as_constant().map(|c| c.inv().expect("nonzero"));
    let mut r = g.clone();
    let mut q = DiffPoly::zero();
    let mut steps = 0;
    loop {
        let dr = r.degree_in(w);
        if r.is_zero() || dr < db {
            break;
        }
        let lr = r.coeffs_in(w).pop().expect("nonzero");
        let shift = Monomial::power(w.clone(), dr - db);
        match &field_lc {
            Some(inv) => {
                let t = lr.scale(inv).mul(&DiffPoly::monomial(shift, crate::coeff::RatFunc::one()));
                r = r.sub(&t.mul(b));
                q = q.add(&t);
            }
            None => {
                let t = lr.mul(&DiffPoly::monomial(shift, crate::coeff::RatFunc::one()));
                r = lc.mul(&r).sub(&t.mul(b));
                q = lc.mul(&q).add(&t);
                steps += 1;
            }
        }
    }
    PseudoDivision { steps, quotient: q, remainder: r }
}

enum Step {
    Proper { j: usize, w: DerIndet, xi: MultiIndex },
    Degree { j: usize },
}

/// Steps available at the highest offending indeterminate, nearest leader
/// (highest-ranked) first.
fn candidate_steps(g: &DiffPoly, set: &RankedSet) -> Vec<Step> {
    for w in g.indets().iter().rev() {
        let mut out = Vec::new();
        for (j, ld) in set.data.iter().enumerate().rev() {
            if w.is_proper_derivative_of(&ld.leader) {
                let xi = index_sub(&w.xi, &ld.leader.xi).expect("derivative");
                out.push(Step::Proper { j, w: w.clone(), xi });
            } else if *w == ld.leader && g.degree_in(w) >= ld.degree {
                out.push(Step::Degree { j });
            }
        }
        if !out.is_empty() {
            return out;
        }
    }
    Vec::new()
}

/// Ritt–Kolchin division of `f` by `set`, highest offending derivative first,
/// reducing by the nearest leader.
pub fn divide(ring: &DiffRing, f: &DiffPoly, set: &RankedSet) -> DivisionCertificate {
    divide_with(ring, f, set, &mut |_, _| 0)
}

/// Division where `choose(step, count)` picks among the `count` members
/// able to reduce at the given step.
fn divide_with(
    ring: &DiffRing,
    f: &DiffPoly,
    set: &RankedSet,
    choose: &mut dyn FnMut(usize, usize) -> usize,
) -> DivisionCertificate {
    let k = set.len();
    let mut a = vec![0u32; k];
    let mut b = vec![0u32; k];
    let mut cof: BTreeMap<(usize, MultiIndex), DiffPoly> = BTreeMap::new();
    let mut derived: BTreeMap<(usize, MultiIndex), DiffPoly> = BTreeMap::new();
    let mut g = f.clone();
    let mut round = 0;
    loop {
        let mut steps = candidate_steps(&g, set);
        if steps.is_empty() {
            break;
        }
        let pick = choose(round, steps.len()).min(steps.len() - 1);
        round += 1;
        let step = steps.swap_remove(pick);
        let (key, divisor, w, mult, exps) = match step {
            Step::Proper { j, w, xi } => {
                let theta = derived
                    .entry((j, xi.clone()))
                    .or_insert_with(|| ring.derive_multi(&xi, &set.members[j]))
                    .clone();
                ((j, xi), theta, w, set.data[j].separant.clone(), &mut b[j])
            }
            Step::Degree { j } => {
                let ld = &set.data[j];
                ((j, vec![0; ring.m()]), set.members[j].clone(), ld.leader.clone(), ld.initial.clone(), &mut a[j])
            }
        };
        let pd = pseudo_divide(&g, &divisor, &w);
        *exps += pd.steps;
        if pd.steps > 0 {
            let factor = mult.pow(pd.steps);
            for c in cof.values_mut() {
                *c = c.mul(&factor);
            }
        }
        let entry = cof.entry(key).or_default();
        *entry = entry.add(&pd.quotient);
        g = pd.remainder;
    }
    cof.retain(|_, c| !c.is_zero());
    let ell = a.iter().chain(&b).copied().max().unwrap_or(0);
    DivisionCertificate { ell, initial_exponents: a, separant_exponents: b, cofactors: cof, remainder: g }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    /// A `false` verdict is only conclusive when the set is a
    /// characteristic set of a prime differential ideal.
    pub nonmember_needs_characteristic_set: bool,
    pub certificate: DivisionCertificate,
}

/// Reduction paths tried before giving up on a zero remainder.
const MEMBERSHIP_PATHS: usize = 64;

/// Divides `f` by `set`; when the remainder is nonzero and several members
/// could reduce at some step, the alternatives are tried depth first. Any
/// zero remainder is a valid certificate, so the search stays sound.
pub fn membership_test(ring: &DiffRing, f: &DiffPoly, set: &RankedSet) -> Membership {
    let mut path: Vec<usize> = Vec::new();
    let mut first = None;
    for _ in 0..MEMBERSHIP_PATHS {
        let mut counts = Vec::new();
        let cert = divide_with(ring, f, set, &mut |round, count| {
            counts.push(count);
            path.get(round).copied().unwrap_or(0)
        });
        if cert.remainder.is_zero() {
            return Membership { member: true, nonmember_needs_characteristic_set: true, certificate: cert };
        }
        first.get_or_insert(cert);
        path.resize(counts.len(), 0);
        // next path in depth-first order
        while let Some(last) = path.len().checked_sub(1) {
            if path[last] + 1 < counts[last] {
                path[last] += 1;
                break;
            }
            path.pop();
            counts.pop();
        }
        if path.is_empty() {
            break;
        }
    }
    let certificate = first.expect("at least one path");
    Membership { member: false, nonmember_needs_characteristic_set: true, certificate }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Autoreduced {
    Set(RankedSet),
    /// A nonzero constant arose; the witness is that constant.
    Inconsistent(DiffPoly),
}

/// Autoreduced set obtained by repeated extraction of a basic set and
/// reduction of the remaining polynomials against it.
pub fn autoreduce(ring: &DiffRing, input: &[DiffPoly]) -> Autoreduced {
    let mut pool: Vec<DiffPoly> = Vec::new();
    for f in input {
        if f.is_zero() {
            continue;
        }
        if f.is_constant() {
            return Autoreduced::Inconsistent(f.clone());
        }
        if !pool.contains(f) {
            pool.push(f.clone());
        }
    }
    loop {
        let basic = basic_set(&pool);
        let mut fresh = Vec::new();
        for f in &pool {
            if basic.members.contains(f) {
                continue;
            }
            // K-multiples generate the same ideal; dropping content keeps sizes down
            let r = divide(ring, f, &basic).remainder.primitive_part();
            if r.is_zero() {
                continue;
            }
            if r.is_constant() {
                return Autoreduced::Inconsistent(r);
            }
            if !fresh.contains(&r) {
                fresh.push(r);
            }
        }
        if fresh.is_empty() {
            return Autoreduced::Set(basic);
        }
        pool = basic.members.clone();
        pool.extend(fresh);
    }
}

/// Greedy autoreduced subset of lowest rank.
pub fn basic_set(polys: &[DiffPoly]) -> RankedSet {
    let sorted = RankedSet::new(polys.to_vec()).expect("nonconstant");
    let mut chosen: Vec<usize> = Vec::new();
    for (i, f) in sorted.members.iter().enumerate() {
        let fits = chosen.iter().all(|&c| {
            status_against(f, &sorted.data[c]) == ReductionStatus::Reduced
                && status_against(&sorted.members[c], &sorted.data[i]) == ReductionStatus::Reduced
        });
        if fits {
            chosen.push(i);
        }
    }
    RankedSet {
        members: chosen.iter().map(|&i| sorted.members[i].clone()).collect(),
        data: chosen.iter().map(|&i| sorted.data[i].clone()).collect(),
    }
}

/// The ranking on autoreduced sets; `Less` means closer to characteristic.
pub fn compare_autoreduced(a: &RankedSet, b: &RankedSet) -> Ordering {
    let (ra, rb) = (a.ranks(), b.ranks());
    for (x, y) in ra.iter().zip(&rb) {
        match x.cmp(y) {
            Ordering::Equal => {}
            other => return other,
        }
    }
    rb.len().cmp(&ra.len())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaElement {
    pub source: usize,
    pub xi: MultiIndex,
    pub poly: DiffPoly,
}

/// Λ^{(r)}: all δ^ξ f (f ∈ Λ) of order at most r, without duplicates.
pub fn theta_set(ring: &DiffRing, set: &RankedSet, r: u32) -> Result<Vec<ThetaElement>> {
    let max = set.max_order();
    if r < max && !set.is_empty() {
        return Err(Error::BadBound(format!("order bound {} below the set's order {}", r, max)));
    }
    let mut out: Vec<ThetaElement> = Vec::new();
    for (source, f) in set.members.iter().enumerate() {
        for xi in indices_up_to(ring.m(), r - f.order()) {
            let poly = ring.derive_multi(&xi, f);
            if poly.is_zero() || out.iter().any(|e| e.poly == poly) {
                continue;
            }
            debug_assert!(poly.order() <= f.order() + order_of(&xi));
            out.push(ThetaElement { source, xi, poly });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{BaseField, RatFunc};
    use std::sync::Arc;

    fn ring(m: usize, n: usize) -> DiffRing {
        let mut action = vec![vec![RatFunc::zero()]; m];
        action[0][0] = RatFunc::one();
        DiffRing::new(Arc::new(BaseField::new(vec!["t".into()], action).unwrap()), n)
    }

    fn t() -> DiffPoly {
        DiffPoly::constant(RatFunc::gen(0))
    }

    #[test]
    fn leader_data_examples() {
        let r = ring(1, 1);
        let dx = r.indet(0, &[1]);
        let ld = leader_data(&dx.pow(2).add(&r.x(0))).unwrap();
        assert_eq!((ld.leader.xi.clone(), ld.degree), (vec![1], 2));
        assert_eq!(ld.separant, dx.scale(&RatFunc::from_int(2)));
        assert!(ld.initial.is_one());

        let r2 = ring(2, 1);
        let f = r2.indet(0, &[1, 1]).mul(&t()).add(&r2.x(0).pow(3));
        let ld = leader_data(&f).unwrap();
        assert_eq!((ld.leader.xi.clone(), ld.degree), (vec![1, 1], 1));
        assert_eq!((ld.separant.clone(), ld.initial.clone()), (t(), t()));
        assert!(leader_data(&DiffPoly::from_int(3)).is_err());
    }

    #[test]
    fn h_examples() {
        let r = ring(1, 2);
        assert!(h_of_set(&RankedSet::empty()).is_one());
        let dx = r.indet(0, &[1]);
        let set = RankedSet::new(vec![dx.pow(2).sub(&t())]).unwrap();
        assert_eq!(h_of_set(&set), dx.scale(&RatFunc::from_int(2)));
        let r2 = ring(2, 2);
        let set2 = RankedSet::new(vec![r2.indet(0, &[1, 0]).sub(&r2.x(0)), r2.indet(1, &[0, 1])]).unwrap();
        assert!(h_of_set(&set2).is_one());
    }

    #[test]
    fn reduction_status_examples() {
        let r = ring(1, 1);
        let f = r.indet(0, &[1]).pow(2);
        assert_eq!(reduction_status(&r.x(0), &f).unwrap(), ReductionStatus::Reduced);
        assert_eq!(reduction_status(&r.indet(0, &[1]), &f).unwrap(), ReductionStatus::Reduced);
        assert_eq!(reduction_status(&f, &f).unwrap(), ReductionStatus::WeaklyReducedOnly);
        assert_eq!(reduction_status(&r.indet(0, &[2]), &f).unwrap(), ReductionStatus::NotWeaklyReduced);
    }

    #[test]
    fn autoreduce_examples() {
        let r = ring(1, 1);
        let dx = r.indet(0, &[1]);
        let f = dx.pow(2).sub(&t());
        assert_eq!(autoreduce(&r, &[f.clone()]), Autoreduced::Set(RankedSet::new(vec![f]).unwrap()));
        assert_eq!(autoreduce(&r, &[dx.pow(2), dx.clone()]), Autoreduced::Set(RankedSet::new(vec![dx.clone()]).unwrap()));
        let bad = autoreduce(&r, &[r.x(0), dx.sub(&DiffPoly::one())]);
        // the witness is normalized like every remainder
        assert_eq!(bad, Autoreduced::Inconsistent(DiffPoly::one()));
    }

    #[test]
    fn divide_examples() {
        let r = ring(1, 1);
        let dx = r.indet(0, &[1]);
        let gen = dx.pow(2).sub(&t());
        let set = RankedSet::new(vec![gen.clone()]).unwrap();

        let c = divide(&r, &r.x(0), &set);
        assert_eq!((c.ell, c.remainder.clone(), c.cofactors.len()), (0, r.x(0), 0));

        let c = divide(&r, &gen, &set);
        assert_eq!((c.ell, c.remainder.is_zero()), (0, true));
        assert!(c.verify(&r, &gen, &set));

        let f = r.indet(0, &[2]);
        let c = divide(&r, &f, &set);
        assert_eq!((c.ell, c.remainder.clone()), (1, DiffPoly::one()));
        assert_eq!(c.cofactors.get(&(0, vec![1])), Some(&DiffPoly::one()));
        assert_eq!(c.multiplier(&set), h_of_set(&set));
        assert!(c.verify(&r, &f, &set));
    }

    #[test]
    fn membership_examples() {
        let r = ring(1, 1);
        let dx = r.indet(0, &[1]);
        let set = RankedSet::new(vec![dx.pow(2).sub(&t())]).unwrap();
        assert!(membership_test(&r, &DiffPoly::zero(), &set).member);
        let f = dx.mul(&r.indet(0, &[2])).scale(&RatFunc::from_int(2)).sub(&DiffPoly::one());
        assert!(membership_test(&r, &f, &set).member);
        assert!(!membership_test(&r, &DiffPoly::one(), &set).member);
    }

    #[test]
    fn theta_examples() {
        let r = ring(2, 1);
        let set = RankedSet::new(vec![r.indet(0, &[1, 0])]).unwrap();
        let th: Vec<DiffPoly> = theta_set(&r, &set, 2).unwrap().into_iter().map(|e| e.poly).collect();
        assert_eq!(th, vec![r.indet(0, &[1, 0]), r.indet(0, &[1, 1]), r.indet(0, &[2, 0])]);
        let set0 = RankedSet::new(vec![r.x(0)]).unwrap();
        assert_eq!(theta_set(&r, &set0, 0).unwrap().len(), 1);
        let set1 = RankedSet::new(vec![r.indet(0, &[1, 0]).sub(&r.x(0))]).unwrap();
        assert_eq!(theta_set(&r, &set1, 1).unwrap().len(), 1);
        assert!(matches!(theta_set(&r, &set1, 0), Err(Error::BadBound(_))));
    }

    #[test]
    fn compare_examples() {
        let r = ring(1, 2);
        let x = RankedSet::new(vec![r.x(0)]).unwrap();
        let dx2 = RankedSet::new(vec![r.indet(0, &[1]).pow(2)]).unwrap();
        let longer = RankedSet::new(vec![r.x(0), r.indet(1, &[1])]).unwrap();
        assert_eq!(compare_autoreduced(&x, &x), Ordering::Equal);
        assert_eq!(compare_autoreduced(&x, &dx2), Ordering::Less);
        assert_eq!(compare_autoreduced(&longer, &x), Ordering::Less);
    }
}
