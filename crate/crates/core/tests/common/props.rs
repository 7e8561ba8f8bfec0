//! Property predicates driven by a seed, shared by the proptest suites and
//! the acceptance summary.

use std::cmp::Ordering;

use diffweil::coeff::{gcd, RatFunc};
use diffweil::diffpoly::{compare_rank, leader_data, DerIndet};

use super::{eval_poly_q, eval_ratfunc, field_for, field_ts, Gen};

pub type Check = Result<(), String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

/// δ(fg) = δf·g + f·δg, and the quotient rule, for every derivation.
pub fn leibniz(seed: u64) -> Check {
    let mut g = Gen::new(seed);
    let m = 1 + g.below(2);
    let field = field_for(m, g.below(3));
    let (a, b) = (g.ratfunc(field.k()), g.nonzero_ratfunc(field.k()));
    for d in 0..m {
        let da = field.derive_base(d, &a).unwrap();
        let db = field.derive_base(d, &b).unwrap();
        let lhs = field.derive_base(d, &(&a * &b)).unwrap();
        ensure(lhs == &(&da * &b) + &(&a * &db), || format!("product rule fails for {} and {}", a, b))?;
        let quot = field.derive_base(d, &a.div(&b).unwrap()).unwrap();
        let want = (&(&da * &b) - &(&a * &db)).div(&(&b * &b)).unwrap();
        ensure(quot == want, || format!("quotient rule fails for {} / {}", a, b))?;
    }
    Ok(())
}

/// δ₁δ₂ = δ₂δ₁ on random elements of ℚ(t, s).
pub fn commutation(seed: u64) -> Check {
    let mut g = Gen::new(seed);
    let field = field_ts(g.below(3));
    let a = g.ratfunc(2);
    let d12 = field.derive_base(0, &field.derive_base(1, &a).unwrap()).unwrap();
    let d21 = field.derive_base(1, &field.derive_base(0, &a).unwrap()).unwrap();
    ensure(d12 == d21, || format!("derivations do not commute on {}", a))
}

/// Equal values have equal representations, and representations are reduced.
pub fn canonical_form(seed: u64) -> Check {
    let mut g = Gen::new(seed);
    let (num, den, c) = (g.poly(2, 2, 3), g.nonzero_poly(2, 2, 2), g.nonzero_poly(2, 1, 2));
    let f = RatFunc::new(num.clone(), den.clone()).unwrap();
    let scaled = RatFunc::new(num.mul(&c), den.mul(&c)).unwrap();
    ensure(f == scaled, || format!("(p·c)/(q·c) and p/q differ: {} vs {}", scaled, f))?;
    let h = g.nonzero_ratfunc(2);
    ensure((&f * &h).div(&h).unwrap() == f, || format!("(f·h)/h ≠ f for f = {}", f))?;
    let common = gcd(f.numer(), f.denom());
    ensure(common.is_constant(), || format!("{} is not in lowest terms", f))?;
    // value oracle: the reduced form agrees with num/den off the poles
    let pt = vec![g.rational(), g.rational()];
    let (dn, dd) = (eval_poly_q(&num, &pt), eval_poly_q(&den, &pt));
    if let Some(v) = eval_ratfunc(&f, &pt) {
        if dd != super::q(0, 1) {
            ensure(v == dn / dd, || format!("{} changes value at {:?}", f, pt))?;
        }
    }
    Ok(())
}

/// Reference ordering: total order, then variable, then exponents.
pub fn reference_cmp(a: &DerIndet, b: &DerIndet) -> Ordering {
    let key = |v: &DerIndet| (v.xi.iter().sum::<u32>(), v.var, v.xi.clone());
    key(a).cmp(&key(b))
}

/// The ranking is a total order compatible with derivation.
pub fn ranking(seed: u64) -> Check {
    let mut g = Gen::new(seed);
    let m = 1 + g.below(3);
    let n = 1 + g.below(3);
    let (u, v, w) = (g.indet(n, m, 3), g.indet(n, m, 3), g.indet(n, m, 3));
    ensure(u.cmp(&v) == reference_cmp(&u, &v), || format!("{:?} vs {:?} disagrees with the reference", u, v))?;
    ensure(u.cmp(&v) == v.cmp(&u).reverse(), || "comparison is not antisymmetric".into())?;
    ensure((u == v) == (u.cmp(&v) == Ordering::Equal), || "distinct indeterminates compare equal".into())?;
    if u < v && v < w {
        ensure(u < w, || "comparison is not transitive".into())?;
    }
    for d in 0..m {
        ensure(u < u.derive(d), || format!("{:?} is not below its derivative", u))?;
        if u < v {
            ensure(u.derive(d) < v.derive(d), || format!("d{} does not preserve {:?} < {:?}", d + 1, u, v))?;
        }
    }
    Ok(())
}

/// Separant and initial rank strictly below the polynomial.
pub fn separant_rank(seed: u64) -> Check {
    let mut g = Gen::new(seed);
    let m = 1 + g.below(2);
    let n = 1 + g.below(2);
    let f = g.nonconstant(m, n, m, 2, 3, 4);
    let ld = leader_data(&f).unwrap();
    ensure(compare_rank(&ld.separant, &f) == Ordering::Less, || format!("separant of {:?} is not lower", f))?;
    ensure(compare_rank(&ld.initial, &f) == Ordering::Less, || format!("initial of {:?} is not lower", f))
}
