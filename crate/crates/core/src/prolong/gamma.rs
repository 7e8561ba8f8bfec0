use crate::coeff::{BaseField, RatFunc};
use crate::diffpoly::{indices_up_to, DerIndet, DiffPoly};
use crate::error::{Error, Result};

/// Γ_n(r) in the orderly ranking: all (ξ, i) with |ξ| ≤ r.
pub fn gamma_set(n: usize, m: usize, r: u32) -> Result<Vec<DerIndet>> {
    if n == 0 || m == 0 {
        return Err(Error::BadIndex(format!("gamma set needs n, m ≥ 1 (got n = {}, m = {})", n, m)));
    }
    let mut out: Vec<DerIndet> = indices_up_to(m, r)
        .into_iter()
        .flat_map(|xi| (0..n).map(move |i| DerIndet::new(i, xi.clone())))
        .collect();
    out.sort();
    Ok(out)
}

/// α(n, r) = n·C(r+m, m).
pub fn alpha_nr(n: usize, m: usize, r: u32) -> u64 {
    n as u64 * binomial(r as u64 + m as u64, m as u64)
}

pub fn binomial(a: u64, b: u64) -> u64 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    (0..b).fold(1u64, |acc, k| acc * (a - k) / (k + 1))
}

/// ∇_r on symbolic variables: (δ^ξ x_i) over Γ_n(r).
pub fn nabla_symbolic(n: usize, m: usize, r: u32) -> Result<Vec<DiffPoly>> {
    Ok(gamma_set(n, m, r)?.into_iter().map(DiffPoly::indet).collect())
}

/// ∇_r on a point of Kⁿ.
pub fn nabla_values(field: &BaseField, a: &[RatFunc], r: u32) -> Result<Vec<RatFunc>> {
    Ok(gamma_set(a.len(), field.m(), r)?.iter().map(|v| field.derive_multi(&v.xi, &a[v.var])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(gamma_set(1, 2, 1).unwrap().len(), 3);
        assert_eq!(gamma_set(2, 1, 2).unwrap().len(), 6);
        assert_eq!(gamma_set(4, 3, 0).unwrap().len(), 4);
        assert!(gamma_set(0, 1, 1).is_err());
        for (n, m, r) in [(1, 2, 1), (3, 2, 3), (2, 3, 2)] {
            assert_eq!(gamma_set(n, m, r).unwrap().len() as u64, alpha_nr(n, m, r));
        }
    }

    #[test]
    fn nabla_order() {
        let v = gamma_set(1, 2, 1).unwrap();
        assert_eq!(v.iter().map(|d| d.xi.clone()).collect::<Vec<_>>(), vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        let k = BaseField::rational_t();
        let t = RatFunc::gen(0);
        assert_eq!(nabla_values(&k, &[t.pow(2)], 1).unwrap(), vec![t.pow(2), &t * &RatFunc::from_int(2)]);
        assert_eq!(nabla_symbolic(2, 1, 0).unwrap().len(), 2);
    }
}
