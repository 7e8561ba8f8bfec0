use std::sync::Arc;

use super::*;
use crate::coeff::{BaseField, RatFunc};
use crate::diffpoly::{DerIndet, DiffPoly};

fn t() -> RatFunc {
    RatFunc::gen(0)
}

fn example_43(delta_t: i64) -> Descent {
    let base = Arc::new(BaseField::new(vec!["t".into()], vec![vec![RatFunc::from_int(delta_t)]]).unwrap());
    let ext = FreeExtension::quadratic(base, t(), "b").unwrap();
    Descent::new(Arc::new(ext), vec!["x".into()])
}

fn w(desc: &Descent, i: usize, theta: &[u32]) -> DiffPoly {
    DiffPoly::indet(desc.w_var(0, i, theta))
}

fn x(desc: &Descent, theta: &[u32]) -> Coords {
    desc.scalar(&DiffPoly::indet(DerIndet::new(0, theta.to_vec())))
}

#[test]
fn descend_poly_examples() {
    let d = example_43(1);
    assert_eq!(d.descend_poly(&x(&d, &[0])), vec![w(&d, 0, &[0]), w(&d, 1, &[0])]);
    let b = d.from_elem(&d.ext().basis_elem(1));
    let bx = d.mul(&b, &x(&d, &[0]));
    assert_eq!(d.descend_poly(&bx), vec![w(&d, 1, &[0]).scale(&t()), w(&d, 0, &[0])]);
    let x2 = d.mul(&x(&d, &[0]), &x(&d, &[0]));
    let g = d.descend_poly(&x2);
    assert_eq!(g[0], w(&d, 0, &[0]).pow(2).add(&w(&d, 1, &[0]).pow(2).scale(&t())));
    assert_eq!(g[1], w(&d, 0, &[0]).mul(&w(&d, 1, &[0])).scale(&RatFunc::from_int(2)));
}

#[test]
fn descended_derivation_examples() {
    let d = example_43(1);
    assert_eq!(d.descended_derivation(0, 0, 0, &[0]), w(&d, 0, &[1]));
    let half_t = RatFunc::one().div(&(&t() * &RatFunc::from_int(2))).unwrap();
    assert_eq!(d.descended_derivation(0, 0, 1, &[0]), w(&d, 1, &[1]).sub(&w(&d, 1, &[0]).scale(&half_t)));
    let triv = Descent::new(Arc::new(FreeExtension::trivial(Arc::new(BaseField::rational_t()))), vec!["x".into()]);
    assert_eq!(triv.descended_derivation(0, 0, 0, &[2]), DiffPoly::indet(triv.w_var(0, 0, &[3])));
}

#[test]
fn example_43_standardizes() {
    let d = example_43(1);
    let out = descend_presentation(&d, &[x(&d, &[1])], 1).unwrap();
    let gens: Vec<DiffPoly> = out.ideal_gens.iter().map(|g| g.poly.clone()).collect();
    assert_eq!(gens, vec![w(&d, 0, &[1]), w(&d, 1, &[1])]);
    let eqs: Vec<String> = standardize_descent(&d, &out).iter().map(|p| d.y_ring().fmt(p)).collect();
    assert_eq!(eqs, vec!["d y1", "d y2 + (1/(2*t))*y2"]);
}

#[test]
fn constant_basis_variant() {
    let d = example_43(0);
    let out = descend_presentation(&d, &[x(&d, &[1])], 1).unwrap();
    let eqs: Vec<String> = standardize_descent(&d, &out).iter().map(|p| d.y_ring().fmt(p)).collect();
    assert_eq!(eqs, vec!["d y1", "d y2"]);
}

#[test]
fn free_and_trivial_descents() {
    let d = example_43(1);
    assert!(descend_presentation(&d, &[], 2).unwrap().ideal_gens.is_empty());
    let triv = Descent::new(Arc::new(FreeExtension::trivial(Arc::new(BaseField::rational_t()))), vec!["x".into()]);
    let rel = triv.scalar(&DiffPoly::indet(DerIndet::new(0, vec![1])).pow(2).sub(&DiffPoly::constant(t())));
    let out = descend_presentation(&triv, &[rel], 1).unwrap();
    let eqs: Vec<String> = standardize_descent(&triv, &out).iter().map(|p| triv.y_ring().fmt(p)).collect();
    assert_eq!(eqs, vec!["(d y1)^2 - t"]);
}

#[test]
fn unit_and_counit() {
    let d = example_43(1);
    assert_eq!(unit_map(&d, &x(&d, &[0])), vec![w(&d, 0, &[0]), w(&d, 1, &[0])]);
    assert_eq!(unit_map(&d, &d.scalar(&DiffPoly::one())), vec![DiffPoly::one(), DiffPoly::zero()]);
    let xt = DiffPoly::indet(DerIndet::new(0, vec![0]));
    assert_eq!(counit_map(&d, &w(&d, 0, &[0])), xt);
    assert!(counit_map(&d, &w(&d, 1, &[0])).is_zero());
    // Σ_i F(W_D(x)_i)·b_i = x·1_B
    let back: Vec<DiffPoly> = unit_map(&d, &x(&d, &[0])).iter().map(|g| counit_map(&d, g)).collect();
    let sum = (0..2).fold(d.zero(), |acc, i| {
        d.add(&acc, &d.scale(&d.from_elem(&d.ext().basis_elem(i)), &back[i]))
    });
    assert_eq!(sum, x(&d, &[0]));
}

#[test]
fn point_transfer() {
    let d = example_43(1);
    let rels = [x(&d, &[1])];
    let out = descend_presentation(&d, &rels, 1).unwrap();
    let wpt = prolong_w_point(&d, &[vec![RatFunc::from_int(5), RatFunc::zero()]], 1);
    let Transfer::Point(bpt) = transfer_to_extension(&d, &out, &wpt).unwrap() else { panic!("rejected") };
    assert_eq!(bpt[&DerIndet::new(0, vec![0])], d.ext().scalar(&RatFunc::from_int(5)));
    assert_eq!(transfer_to_base(&d, &rels, 1, &bpt).unwrap(), Transfer::Point(wpt));

    let b_point = prolong_b_point(d.ext(), &[d.ext().basis_elem(1)], 1);
    assert!(matches!(transfer_to_base(&d, &rels, 1, &b_point).unwrap(), Transfer::Rejected(_)));
}

#[test]
fn thm33_examples() {
    let d = example_43(1);
    let p = DerivationExpr::Natural(0);
    let rep = check_thm33(&d, &p, &p, &t(), &RatFunc::zero(), 2);
    assert!(rep.ok(), "{:?}", rep.failures);
    assert!(check_thm33(&d, &p, &p, &RatFunc::one(), &RatFunc::from_int(3), 2).ok());
}

#[test]
fn thm32_on_example() {
    let d = example_43(1);
    let f = d.add(&d.mul(&x(&d, &[1]), &x(&d, &[0])), &d.from_elem(&d.ext().basis_elem(1)));
    let rep = check_thm32(&d, &[f], 2);
    assert!(rep.ok(), "{:?}", rep.failures);
    assert!(rep.checked > 0);
}

#[test]
fn natural_descent_matches_claim2() {
    let d = example_43(1);
    let p = DerivationExpr::Natural(0);
    for theta in [[0u32], [1], [2]] {
        for i in 0..2 {
            assert_eq!(p.descended_on(&d, &d.w_var(0, i, &theta)), d.descended_derivation(0, 0, i, &theta));
        }
    }
}
