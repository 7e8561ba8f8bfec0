use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Multi-index ξ ∈ ℕ^m.
pub type MultiIndex = Vec<u32>;

pub fn order_of(xi: &[u32]) -> u32 {
    xi.iter().sum()
}

pub fn unit_index(m: usize, d: usize) -> MultiIndex {
    let mut xi = vec![0; m];
    xi[d] = 1;
    xi
}

/// Componentwise `a ≤ b`.
pub fn index_le(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub fn index_add(a: &[u32], b: &[u32]) -> MultiIndex {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn index_sub(a: &[u32], b: &[u32]) -> Option<MultiIndex> {
    a.iter().zip(b).map(|(x, y)| x.checked_sub(*y)).collect()
}

/// ξ! = ξ₁!⋯ξ_m!
pub fn index_factorial(xi: &[u32]) -> u64 {
    xi.iter().map(|&e| (1..=e as u64).product::<u64>()).product()
}

/// All ξ ∈ ℕ^m with |ξ| ≤ r, in increasing orderly order:
/// by |ξ|, then lexicographically on (ξ₁, …, ξ_m).
pub fn indices_up_to(m: usize, r: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for total in 0..=r {
        let mut level = Vec::new();
        compositions(m, total, &mut vec![], &mut level);
        level.sort();
        out.extend(level);
    }
    out
}

fn compositions(m: usize, rest: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if cur.len() + 1 == m || m == 0 {
        if m > 0 {
            cur.push(rest);
            out.push(cur.clone());
            cur.pop();
        } else if rest == 0 {
            out.push(vec![]);
        }
        return;
    }
    for e in 0..=rest {
        cur.push(e);
        compositions(m, rest - e, cur, out);
        cur.pop();
    }
}

/// The derivative δ^ξ x_{var+1}; `var` is 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct DerIndet {
    pub var: usize,
    pub xi: MultiIndex,
}

impl DerIndet {
    pub fn new(var: usize, xi: MultiIndex) -> Self {
        DerIndet { var, xi }
    }

    pub fn base(var: usize, m: usize) -> Self {
        DerIndet { var, xi: vec![0; m] }
    }

    pub fn order(&self) -> u32 {
        order_of(&self.xi)
    }

    pub fn m(&self) -> usize {
        self.xi.len()
    }

    pub fn derive(&self, d: usize) -> DerIndet {
        let mut xi = self.xi.clone();
        xi[d] += 1;
        DerIndet { var: self.var, xi }
    }

    pub fn shifted(&self, by: &[u32]) -> DerIndet {
        DerIndet { var: self.var, xi: index_add(&self.xi, by) }
    }

    /// Whether `self = δ^η other` for some η (η = 0 allowed).
    pub fn is_derivative_of(&self, other: &DerIndet) -> bool {
        self.var == other.var && index_le(&other.xi, &self.xi)
    }

    pub fn is_proper_derivative_of(&self, other: &DerIndet) -> bool {
        self.is_derivative_of(other) && self.xi != other.xi
    }
}

impl Ord for DerIndet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then(self.var.cmp(&other.var))
            .then_with(|| self.xi.cmp(&other.xi))
    }
}

impl PartialOrd for DerIndet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The orderly ranking, with dimension checks.
pub fn compare_indets(a: &DerIndet, b: &DerIndet, n: usize, m: usize) -> Result<Ordering> {
    for v in [a, b] {
        if v.xi.len() != m {
            return Err(Error::BadIndex(format!("multi-index of length {} in a ring with m = {}", v.xi.len(), m)));
        }
        if v.var >= n {
            return Err(Error::BadIndex(format!("variable x{} in a ring with n = {}", v.var + 1, n)));
        }
    }
    Ok(a.cmp(b))
}

/// How indeterminates are written.
#[derive(Clone, Copy, Debug)]
pub enum IndetStyle<'a> {
    /// `d1^2 d2 x1`; a single derivation is written `d`.
    Diff(&'a [String]),
    /// Algebraic jet coordinates `x1[1,0]`.
    Pol(&'a [String]),
    /// Descent variables `d x1(2)`: variable `v` is name `v / ell`, copy `v % ell + 1`.
    Weil(&'a [String], usize),
}

fn var_name(names: &[String], var: usize, fallback: &str) -> String {
    names.get(var).cloned().unwrap_or_else(|| format!("{}{}", fallback, var + 1))
}

pub fn derivative_prefix(xi: &[u32]) -> String {
    let mut parts = Vec::new();
    for (d, &e) in xi.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let base = if xi.len() == 1 { "d".to_string() } else { format!("d{}", d + 1) };
        parts.push(if e == 1 { base } else { format!("{}^{}", base, e) });
    }
    parts.join(" ")
}

pub fn fmt_indet(v: &DerIndet, style: IndetStyle<'_>) -> String {
    let (prefix, name) = match style {
        IndetStyle::Diff(names) => (derivative_prefix(&v.xi), var_name(names, v.var, "x")),
        IndetStyle::Pol(names) => {
            let idx: Vec<String> = v.xi.iter().map(u32::to_string).collect();
            return format!("{}[{}]", var_name(names, v.var, "x"), idx.join(","));
        }
        IndetStyle::Weil(names, ell) => {
            let base = var_name(names, v.var / ell, "x");
            (derivative_prefix(&v.xi), format!("{}({})", base, v.var % ell + 1))
        }
    };
    if prefix.is_empty() {
        name
    } else {
        format!("{} {}", prefix, name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn di(var: usize, xi: &[u32]) -> DerIndet {
        DerIndet::new(var, xi.to_vec())
    }

    #[test]
    fn orderly_ranking_examples() {
        assert!(di(0, &[0, 0]) < di(1, &[0, 0]));
        assert!(di(1, &[0, 0]) < di(0, &[1, 0]));
        assert!(di(0, &[0, 1]) < di(0, &[1, 0]));
        assert!(compare_indets(&di(0, &[1]), &di(0, &[0, 0]), 1, 2).is_err());
    }

    #[test]
    fn index_enumeration_is_sorted() {
        let all = indices_up_to(2, 2);
        assert_eq!(all.len(), 6);
        let ranked: Vec<DerIndet> = all.iter().map(|xi| di(0, xi)).collect();
        assert!(ranked.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(indices_up_to(1, 3), vec![vec![0], vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn printing() {
        let n = ["x1".to_string()];
        assert_eq!(fmt_indet(&di(0, &[2, 1]), IndetStyle::Diff(&n)), "d1^2 d2 x1");
        assert_eq!(fmt_indet(&di(0, &[1]), IndetStyle::Diff(&[])), "d x1");
        assert_eq!(fmt_indet(&di(0, &[1, 0]), IndetStyle::Pol(&n)), "x1[1,0]");
        assert_eq!(fmt_indet(&di(3, &[0]), IndetStyle::Weil(&[], 2)), "x2(2)");
    }
}
