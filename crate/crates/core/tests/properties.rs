use std::collections::BTreeMap;

use num_traits::Zero;
use proptest::prelude::*;
use vop_core::diffop::{apply, commutator, compose, exp_apply, default_exp_guard, DiffOperator};
use vop_core::families::{build_family, generate_table, Family, FamilySpec, Kind, ParamValue};
use vop_core::ring::{Monomial, Poly};
use vop_core::shiftop::{bispectral_b, shift_compose, ShiftOperator};
use vop_core::{FormalPoly, Param, QPoly, Rat, RatDiffOp, RatShiftOp, RatXPoly, Scalar};

fn rat() -> impl Strategy<Value = Rat> {
    (-4i64..=4, 1i64..=3).prop_map(|(a, b)| Rat::new(a, b))
}

fn xpoly(max_deg: usize) -> impl Strategy<Value = RatXPoly> {
    prop::collection::vec(rat(), 0..=max_deg + 1).prop_map(Poly::from_coeffs)
}

fn diffop() -> impl Strategy<Value = RatDiffOp> {
    prop::collection::vec(xpoly(2), 0..=3).prop_map(|cs| DiffOperator::from_terms(cs.into_iter().enumerate()))
}

fn shiftop() -> impl Strategy<Value = RatShiftOp> {
    prop::collection::vec((-2i64..=2, prop::collection::vec(rat(), 0..=3)), 0..=3).prop_map(|ts| {
        ShiftOperator::from_terms(ts.into_iter().map(|(k, c)| (k, Poly::from_coeffs(c))))
    })
}

fn formal() -> impl Strategy<Value = FormalPoly> {
    prop::collection::vec(rat(), 0..=4).prop_map(Poly::from_coeffs)
}

fn qpoly() -> impl Strategy<Value = QPoly> {
    prop::collection::vec(rat(), 1..=3).prop_filter_map("nonzero q", |cs| {
        let mut all = vec![Rat::zero()];
        all.extend(cs);
        QPoly::new(Poly::from_coeffs(all)).ok().filter(|q| !q.is_zero())
    })
}

fn kind() -> impl Strategy<Value = Kind> {
    prop_oneof![Just(Kind::Weyl), Just(Kind::Sl2), Just(Kind::Cubic)]
}

fn scalar() -> impl Strategy<Value = Scalar> {
    prop::collection::vec(((0u32..=2, 0u32..=2), rat()), 0..=4)
        .prop_map(|ts| Scalar::from_terms(ts.into_iter().map(|((a, b), c)| (Monomial::from_exponents(a, b), c))))
}

fn numeric_family(kind: Kind, q: QPoly, alpha: i64, beta: i64) -> Family<Rat> {
    let params: BTreeMap<Param, ParamValue> = kind
        .params()
        .iter()
        .map(|&p| {
            let v = if p == Param::Alpha { alpha } else { beta };
            (p, ParamValue::Value(Rat::from(v)))
        })
        .collect();
    build_family(&FamilySpec::new(kind, q, params, 6).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn composition_acts_as_application(a in diffop(), b in diffop(), p in xpoly(5)) {
        prop_assert_eq!(apply(&compose(&a, &b), &p), apply(&a, &apply(&b, &p)));
    }

    #[test]
    fn composition_is_associative(a in diffop(), b in diffop(), c in diffop()) {
        prop_assert_eq!(compose(&compose(&a, &b), &c), compose(&a, &compose(&b, &c)));
    }

    #[test]
    fn jacobi_identity(a in diffop(), b in diffop(), c in diffop()) {
        let j = &(&commutator(&a, &commutator(&b, &c)) + &commutator(&b, &commutator(&c, &a)))
            + &commutator(&c, &commutator(&a, &b));
        prop_assert!(j.is_zero());
    }

    #[test]
    fn shift_composition_acts_as_application(s1 in shiftop(), s2 in shiftop(), n in 0i64..6) {
        let f = |m: i64| Rat::from(m * m * m - 2 * m + 7);
        let lhs = shift_compose(&s1, &s2).apply_to_sequence(n, f);
        let rhs = s1.apply_to_sequence(n, |m| s2.apply_to_sequence(m, f));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bispectral_map_reverses_products(a in diffop(), b in diffop()) {
        prop_assert_eq!(bispectral_b(&compose(&a, &b)), shift_compose(&bispectral_b(&b), &bispectral_b(&a)));
    }

    #[test]
    fn scalar_ring_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&a * &b, &b * &a);
        let z = &a - &a;
        prop_assert!(z.is_zero());
        prop_assert_eq!(z.num_terms(), 0);
    }

    #[test]
    fn formal_product_rule(p in formal(), q in formal()) {
        let pq = &p * &q;
        prop_assert_eq!(pq.derivative(), &(&p.derivative() * &q) + &(&p * &q.derivative()));
    }

    #[test]
    fn sigma_is_a_homomorphism(k in kind(), q in qpoly(), a in -2i64..3, b in -2i64..3, i in 0usize..3, j in 0usize..3) {
        let fam = numeric_family(k, q, a, b);
        let gens = [&fam.x, &fam.h, &fam.b];
        let lhs = fam.sigma(&compose(gens[i], gens[j]), None).unwrap();
        let rhs = compose(&fam.sigma(gens[i], None).unwrap(), &fam.sigma(gens[j], None).unwrap());
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(fam.sigma_inv(&fam.sigma(gens[i], None).unwrap(), None).unwrap(), gens[i].clone());
    }

    #[test]
    fn intertwining(k in kind(), q in qpoly(), a in -2i64..3, b in -2i64..3, i in 0usize..3, p in xpoly(4)) {
        let fam = numeric_family(k, q, a, b);
        let gen = [&fam.x, &fam.h, &fam.b][i];
        let ap = apply(gen, &p);
        let lhs = exp_apply(&fam.q_op, &ap, default_exp_guard(&ap)).unwrap();
        let ep = exp_apply(&fam.q_op, &p, default_exp_guard(&p)).unwrap();
        prop_assert_eq!(lhs, apply(&fam.sigma(gen, None).unwrap(), &ep));
    }

    #[test]
    fn eigenvalue_spectrum(k in kind(), q in qpoly(), a in -2i64..3, b in -2i64..3) {
        let fam = numeric_family(k, q, a, b);
        let t = generate_table(&fam).unwrap();
        for (n, p) in t.polys.iter().enumerate() {
            prop_assert_eq!(apply(&fam.l1, p), p.scale(&Rat::from(n as i64)));
        }
    }

    #[test]
    fn diffop_json_round_trip(a in diffop()) {
        let s = serde_json::to_string(&a).unwrap();
        let back: RatDiffOp = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, a);
    }
}
