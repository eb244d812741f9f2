//! Cross-module invariants on random inputs.

use std::f64::consts::PI;

use kloodist_core::equidist::{interval_discrepancy, interval_discrepancy_brute, star_discrepancy};
use kloodist_core::kloosterman::{kloosterman_direct, kloosterman_sum, trace_histogram};
use kloodist_core::places::{interval_to_progression, monic_irreducibles};
use kloodist_core::{support, ExtFieldCtx, FieldSpec, Fq, Poly, PolyRing, RationalFn, ShortInterval};
use proptest::prelude::*;

fn fields() -> Vec<FieldSpec> {
    vec![
        FieldSpec::new(2, 1, None).unwrap(),
        FieldSpec::new(3, 1, None).unwrap(),
        FieldSpec::new(7, 1, None).unwrap(),
        FieldSpec::new(2, 2, None).unwrap(),
        FieldSpec::new(3, 2, None).unwrap(),
    ]
}

fn poly(f: &FieldSpec, coeffs: &[u32]) -> Poly {
    let q = f.q();
    Poly::new(coeffs.iter().map(|&c| Fq::from_index(c % q)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(fi in 0usize..5, x in 0u32..1000, y in 0u32..1000, z in 0u32..1000) {
        let f = &fields()[fi];
        let q = f.q();
        let (x, y, z) = (Fq::from_index(x % q), Fq::from_index(y % q), Fq::from_index(z % q));
        prop_assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
        prop_assert_eq!(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)));
        prop_assert_eq!(f.sub(f.add(x, y), y), x);
        if !x.is_zero() {
            prop_assert_eq!(f.mul(x, f.inv(x).unwrap()), Fq::ONE);
            prop_assert_eq!(f.pow(x, u64::from(q) - 1), Fq::ONE);
        }
    }

    /// The histogram walk agrees with direct summation over the residue field.
    #[test]
    fn walk_matches_direct_sum(fi in 0usize..5, num in proptest::collection::vec(0u32..9, 2..4), pick in 0usize..200) {
        let f = &fields()[fi];
        let ring = PolyRing::new(f);
        let a = RationalFn::new(&ring, poly(f, &num), Poly::one());
        prop_assume!(a.is_ok());
        let a = a.unwrap();
        prop_assume!(!a.is_constant());
        let supp = support(f, &a).unwrap();
        let d = if f.q() <= 3 { 3 } else { 2 };
        let places: Vec<Poly> = monic_irreducibles(f, d, &[]).unwrap().filter(|p| !supp.contains_poly(p)).collect();
        prop_assume!(!places.is_empty());
        let place = &places[pick % places.len()];
        let ctx = ExtFieldCtx::new(f, place).unwrap();
        let hist = trace_histogram(&ctx, &a).unwrap();
        let (re, im) = kloosterman_direct(&ctx, &a).unwrap();
        prop_assert!((kloosterman_sum(&hist) - re).abs() < 1e-9);
        prop_assert!(im.abs() < 1e-9);
        prop_assert_eq!(hist.total(), u64::from(f.q()).pow(d as u32) - 1);
    }

    #[test]
    fn interval_discrepancy_oracle(th in proptest::collection::vec(0.0..=PI, 1..60)) {
        let fast = interval_discrepancy(&th).unwrap();
        prop_assert!((fast - interval_discrepancy_brute(&th).unwrap()).abs() <= 1e-12);
        let star = star_discrepancy(&th).unwrap();
        prop_assert!(star <= fast + 1e-15 && fast <= 2.0 * star + 1e-15);
    }

    /// f lies in I(A, h) with f(0) != 0 exactly when f* lies in the matching progression class.
    #[test]
    fn short_interval_reversal(tail in proptest::collection::vec(0u32..3, 5), h in 1usize..4, f in proptest::collection::vec(0u32..3, 5)) {
        let field = FieldSpec::new(3, 1, None).unwrap();
        let ring = PolyRing::new(&field);
        let mut c = tail.clone();
        c.push(1);
        let iv = ShortInterval::new(poly(&field, &c), h).unwrap();
        let mut fc = f.clone();
        fc.push(1);
        let f = poly(&field, &fc);
        prop_assume!(!f.constant_term().is_zero());
        let prog = interval_to_progression(&iv);
        let rev = f.reverse().unwrap();
        let r = ring.rem(&rev, &prog.modulus).unwrap();
        // f monic, so f* has constant term 1
        let target = ring.rem(&prog.target, &prog.modulus).unwrap();
        prop_assert_eq!(iv.contains(&ring, &f), r == target);
    }
}
