//! Property tests over randomized inputs.

use permbp::code::{sigma, CodeSpec, IndexMap};
use permbp::decoder::{puncture_adapter, LlrVector, WeightBank, LLR_CLAMP};
use permbp::gf2m::{FieldTable, Gf2Poly};
use proptest::prelude::*;

fn poly_strategy(max_len: usize) -> impl Strategy<Value = Gf2Poly> {
    prop::collection::vec(prop::bool::ANY, 0..max_len)
        .prop_map(|bits| Gf2Poly::from_coeffs(&bits.iter().map(|&b| b as u8).collect::<Vec<_>>()))
}

fn nonzero_poly(max_len: usize) -> impl Strategy<Value = Gf2Poly> {
    poly_strategy(max_len).prop_filter("nonzero", |p| !p.is_zero())
}

fn small_code() -> impl Strategy<Value = CodeSpec> {
    prop_oneof![
        Just(CodeSpec::bch(3, 1).unwrap()),
        Just(CodeSpec::bch(4, 2).unwrap()),
        Just(CodeSpec::punctured_rm(4, 1).unwrap()),
        Just(CodeSpec::punctured_rm(4, 2).unwrap()),
        Just(CodeSpec::bch(3, 1).unwrap().to_extended()),
        Just(CodeSpec::bch(4, 2).unwrap().to_extended()),
    ]
}

proptest! {
    #[test]
    fn lcm_is_commutative_and_associative(
        a in nonzero_poly(20),
        b in nonzero_poly(20),
        c in nonzero_poly(20),
    ) {
        prop_assert_eq!(a.lcm(&b), b.lcm(&a));
        prop_assert_eq!(a.lcm(&b).lcm(&c), a.lcm(&b.lcm(&c)));
    }

    #[test]
    fn lcm_times_gcd_is_the_product(a in nonzero_poly(24), b in nonzero_poly(24)) {
        prop_assert_eq!(a.lcm(&b).mul(&a.gcd(&b)), a.mul(&b));
    }

    #[test]
    fn divmod_reconstructs_and_bounds_the_remainder(
        a in poly_strategy(32),
        b in nonzero_poly(16),
    ) {
        let (q, r) = a.divmod(&b).unwrap();
        prop_assert_eq!(q.mul(&b).add(&r), a);
        if let Some(rd) = r.degree() {
            prop_assert!(rd < b.degree().unwrap());
        }
    }

    #[test]
    fn gcd_divides_both_operands(a in nonzero_poly(24), b in nonzero_poly(24)) {
        let g = a.gcd(&b);
        prop_assert!(a.rem(&g).unwrap().is_zero());
        prop_assert!(b.rem(&g).unwrap().is_zero());
    }

    #[test]
    fn encodings_are_codewords_and_single_flips_are_not(
        spec in small_code(),
        msg_bits in prop::collection::vec(prop::bool::ANY, 11),
        flip in 0usize..16,
    ) {
        let msg: Vec<u8> = msg_bits.iter().take(spec.k).map(|&b| b as u8).collect();
        let cw = spec.encode(&msg).unwrap();
        prop_assert!(spec.is_codeword(&cw));
        let mut flipped = cw.clone();
        let at = flip % cw.len();
        flipped[at] ^= 1;
        prop_assert!(!spec.is_codeword(&flipped));
    }

    #[test]
    fn translations_preserve_extended_membership(
        m in 3usize..=4,
        j_raw in 0usize..16,
        msg_bits in prop::collection::vec(prop::bool::ANY, 7),
    ) {
        let spec = if m == 3 {
            CodeSpec::bch(3, 1).unwrap().to_extended()
        } else {
            CodeSpec::bch(4, 2).unwrap().to_extended()
        };
        let table = FieldTable::new(m).unwrap();
        let map = IndexMap::new(&table);
        let s = sigma(j_raw % map.len(), &map);
        let msg: Vec<u8> = msg_bits.iter().take(spec.k).map(|&b| b as u8).collect();
        let cw = spec.encode(&msg).unwrap();
        prop_assert!(spec.is_codeword(&s.permute(&cw)));
    }

    #[test]
    fn llr_ingestion_clamps_and_padding_prepends_zero(
        values in prop::collection::vec(-1e6f64..1e6, 1..40),
    ) {
        let llr = LlrVector::new(&values);
        for (&v, &c) in values.iter().zip(llr.values()) {
            prop_assert!(c.abs() <= LLR_CLAMP);
            if v.abs() <= LLR_CLAMP {
                prop_assert_eq!(v, c);
            }
        }
        let padded = puncture_adapter(&values);
        prop_assert_eq!(padded.len(), values.len() + 1);
        prop_assert_eq!(padded.values()[0], 0.0);
        prop_assert_eq!(&padded.values()[1..], llr.values());
    }

    #[test]
    fn weight_bank_nested_roundtrip(t in 1usize..6, u in 2usize..8) {
        let bank = WeightBank::unit(t, u);
        prop_assert_eq!(bank.param_count(), t * u * u + u);
        let (s, c, o) = bank.to_nested();
        let back = WeightBank::from_nested(&s, &c, &o).unwrap();
        prop_assert_eq!(back, bank);
    }
}
