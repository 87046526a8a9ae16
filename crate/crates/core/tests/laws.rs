use std::sync::Arc;

use proptest::prelude::*;
use tfag::chartype::{self, Characteristic, HeightValue};
use tfag::primesym::{ClassKey, Registry};
use tfag::transit::Sampler;
use tfag::{catalog, endoring, oracle, spec};

fn registry() -> Arc<Registry> {
    Arc::new(Registry::new(&[2, 3], &["P", "Q"]).unwrap())
}

fn height() -> impl Strategy<Value = HeightValue> {
    prop_oneof![4 => (0u64..4).prop_map(HeightValue::Finite), 1 => Just(HeightValue::Inf)]
}

fn characteristic() -> impl Strategy<Value = Characteristic> {
    proptest::collection::vec(height(), 6).prop_map(|h| {
        let reg = registry();
        let mut c = Characteristic::zero(&reg);
        c.set_prime(2, h[0]).unwrap();
        c.set_prime(3, h[1]).unwrap();
        c.set_class(&ClassKey::family("P"), h[2]).unwrap();
        c.set_class(&ClassKey::family("Q"), h[3]).unwrap();
        c.set_class(&ClassKey::Rest, h[4]).unwrap();
        if let HeightValue::Finite(k) = h[5] {
            c.set_prime(5, HeightValue::Finite(k + 1)).unwrap();
        }
        c
    })
}

fn catalog_groups() -> Vec<catalog::CatalogEntry> {
    catalog::all().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_adds_valuations(entry in 0usize..7, seed in any::<u64>(), n in prop_oneof![-40i64..-1, 1i64..40]) {
        let e = &catalog_groups()[entry];
        let s = Sampler::new(seed, 1);
        let mut rng = s.rng(0);
        if let Some(a) = s.random_element(&e.group, &mut rng) {
            let lhs = e.group.characteristic_of(&a.scale(&tfag::qmath::q(n))).unwrap();
            let rhs = chartype::scale_i(n, &e.group.characteristic_of(&a).unwrap()).unwrap();
            prop_assert!(chartype::equivalent(&lhs, &rhs).unwrap() && lhs == rhs, "{} vs {}", lhs, rhs);
        }
    }

    #[test]
    fn meet_is_greatest_lower_bound(a in characteristic(), b in characteristic(), c in characteristic()) {
        let m = chartype::meet(&a, &b).unwrap();
        prop_assert!(chartype::chi_le(&m, &a).unwrap());
        prop_assert!(chartype::chi_le(&m, &b).unwrap());
        let below_both = chartype::chi_le(&c, &a).unwrap() && chartype::chi_le(&c, &b).unwrap();
        prop_assert_eq!(below_both, chartype::chi_le(&c, &m).unwrap());
    }

    #[test]
    fn order_is_reflexive_and_antisymmetric(a in characteristic(), b in characteristic()) {
        prop_assert!(chartype::chi_le(&a, &a).unwrap());
        if chartype::chi_le(&a, &b).unwrap() && chartype::chi_le(&b, &a).unwrap() {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn endomorphisms_compose(entry in 0usize..7, seed in any::<u64>()) {
        let e = &catalog_groups()[entry];
        let s = Sampler::new(seed, 1);
        let mut rng = s.rng(1);
        let f = s.random_endomorphism(&e.group, &mut rng);
        let g = s.random_endomorphism(&e.group, &mut rng);
        prop_assert!(endoring::end_contains(&e.group, &f).unwrap());
        prop_assert!(endoring::end_contains(&e.group, &f.mul(&g)).unwrap());
        prop_assert!(endoring::end_contains(&e.group, &f.add(&g)).unwrap());
        prop_assert!(endoring::is_endomorphism(&e.group, &f.mul(&g)).unwrap());
    }

    #[test]
    fn images_stay_in_group(entry in 0usize..7, seed in any::<u64>()) {
        let e = &catalog_groups()[entry];
        let s = Sampler::new(seed, 1);
        let mut rng = s.rng(2);
        let f = s.random_endomorphism(&e.group, &mut rng);
        if let Some(x) = s.random_element(&e.group, &mut rng) {
            let y = x.apply(&f);
            prop_assert!(e.group.contains(&y).unwrap());
            if !y.is_zero() {
                let (cx, cy) = (e.group.characteristic_of(&x).unwrap(), e.group.characteristic_of(&y).unwrap());
                prop_assert!(chartype::chi_le(&cx, &cy).unwrap());
            }
        }
    }

    #[test]
    fn random_specs_round_trip(seed in any::<u64>()) {
        let mut rng = oracle::seeded_rng(seed);
        let g = oracle::random_realized_group(&mut rng, 3).unwrap();
        let s = spec::GroupSpec { group: g, elements: vec![] };
        let text = spec::emit_spec(&s);
        let back = spec::parse_spec(&text).unwrap();
        prop_assert_eq!(spec::emit_spec(&back), text);
    }

    #[test]
    fn element_literals_round_trip(entry in 0usize..7, seed in any::<u64>()) {
        let e = &catalog_groups()[entry];
        let s = Sampler::new(seed, 1);
        let mut rng = s.rng(3);
        if let Some(x) = s.random_element(&e.group, &mut rng) {
            let back = spec::parse_element(&x.to_string(), &e.group).unwrap();
            prop_assert_eq!(back.to_string(), x.to_string());
        }
    }
}
