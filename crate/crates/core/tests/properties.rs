//! Invariants checked on random inputs.

use std::collections::BTreeSet;

use arithgeo::arith;
use arithgeo::census::squarefree::{count_by_enumeration, count_by_sieve};
use arithgeo::census::MembershipTable;
use arithgeo::geodesics::{length_from_trace, square_trace};
use arithgeo::quadfields::{QuadraticField, SplitType};
use arithgeo::quatalg::{base_change, recover_ramification, QuatAlgK, QuatAlgQ};
use arithgeo::relquad::RelQuadExt;
use arithgeo::volumes::kleinian_covolume;
use num_complex::Complex64;
use proptest::prelude::*;

const BASES: [i64; 5] = [-3, -4, -7, -8, -11];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn split_primes_have_conjugate_roots(i in 0usize..5, idx in 0usize..300) {
        let k = QuadraticField::new(BASES[i]).unwrap();
        let p = arith::primes_up_to(2_000)[idx];
        let above = k.primes_above(p).unwrap();
        match k.splitting(p).unwrap() {
            SplitType::Split => {
                prop_assert_eq!(above.len(), 2);
                prop_assert_eq!(above[0].conjugate(), above[1]);
            }
            SplitType::Inert => prop_assert!(above.is_empty() || above[0].root.is_none()),
            SplitType::Ramified => prop_assert_eq!(above.len(), 1),
        }
    }

    #[test]
    fn conjugate_extension_swaps_primes(i in 0usize..5, x in -200i64..200, idx in 1usize..80) {
        let delta = BASES[i];
        prop_assume!(RelQuadExt::new(delta, x).is_ok());
        let ext = RelQuadExt::new(delta, x).unwrap();
        let p = arith::primes_up_to(500)[idx];
        let k = ext.base_field();
        prop_assume!(k.splitting(p).unwrap() == SplitType::Split);
        for q in k.primes_above(p).unwrap() {
            prop_assert_eq!(ext.splitting_in_l(&q).unwrap(), ext.conjugate().splitting_in_l(&q.conjugate()).unwrap());
        }
    }

    #[test]
    fn discriminant_bound_dominates(i in 0usize..5, x in -10_000i64..10_000) {
        let delta = BASES[i];
        prop_assume!(RelQuadExt::new(delta, x).is_ok());
        let ext = RelQuadExt::new(delta, x).unwrap();
        prop_assert!(ext.poly_discriminant().abs() <= ext.disc_upper_bound());
        prop_assert!(ext.poly_discriminant() > 0);
    }

    #[test]
    fn squaring_doubles_length(re in -50.0f64..50.0, im in -50.0f64..50.0) {
        let t = Complex64::new(re, im);
        prop_assume!(im != 0.0 || re.abs() > 2.0);
        let l1 = length_from_trace(t).unwrap();
        let l2 = length_from_trace(square_trace(t)).unwrap();
        prop_assert!((l2.length - 2.0 * l1.length).abs() <= 1e-9 * l2.length.max(1.0));
        prop_assert!(l1.holonomy > -std::f64::consts::PI - 1e-12 && l1.holonomy <= std::f64::consts::PI + 1e-12);
    }

    #[test]
    fn embedding_matches_local_criterion(ram in proptest::collection::btree_set(0usize..12, 0..5), d in -300i64..300) {
        prop_assume!(arithgeo::quadfields::is_fundamental_discriminant(d));
        let primes = arith::primes_up_to(40);
        let mut ram: BTreeSet<u64> = ram.into_iter().map(|i| primes[i]).collect();
        if ram.len() % 2 == 1 {
            let extra = *ram.iter().next().unwrap();
            ram.remove(&extra);
        }
        let b = QuatAlgQ::indefinite(ram.iter().copied()).unwrap();
        let l = QuadraticField::new(d).unwrap();
        let expected = ram.iter().all(|&p| l.splitting(p).unwrap() != SplitType::Split);
        prop_assert_eq!(b.embeds(&l), expected);
    }

    #[test]
    fn base_change_keeps_split_primes(mask in 0u32..(1 << 8), i in 0usize..5) {
        let delta = BASES[i];
        let primes = arith::primes_up_to(20);
        let mut ram: Vec<u64> = primes.iter().enumerate().filter(|&(j, _)| mask & (1 << j) != 0).map(|(_, &p)| p).collect();
        if ram.len() % 2 == 1 {
            ram.pop();
        }
        let b = QuatAlgQ::indefinite(ram.iter().copied()).unwrap();
        let bk = base_change(&b, delta).unwrap();
        let k = QuadraticField::new(delta).unwrap();
        let below: BTreeSet<u64> = bk.ram_finite().iter().map(|q| q.p).collect();
        let expected: BTreeSet<u64> = ram.into_iter().filter(|&p| k.splitting(p).unwrap() == SplitType::Split).collect();
        prop_assert_eq!(below, expected);
        prop_assert_eq!(bk.ram_finite().len() % 2, 0);
    }

    #[test]
    fn recovery_contains_pairing(mask in 1u32..8, d_bound in 3u64..400) {
        let pairs: Vec<u64> = [5u64, 13, 17].iter().enumerate().filter(|&(j, _)| mask & (1 << j) != 0).map(|(_, &p)| p).collect();
        let b = QuatAlgK::from_split_pairs(-4, pairs.iter().copied()).unwrap();
        if let Ok(rec) = recover_ramification(&b, d_bound, 100) {
            for p in &pairs {
                prop_assert!(rec.recovered.contains(p));
            }
            // Enlarging the bound only shrinks the intersection.
            let bigger = recover_ramification(&b, d_bound * 2, 100).unwrap();
            prop_assert!(bigger.recovered.is_subset(&rec.recovered));
        }
    }

    #[test]
    fn sieve_and_enumeration_agree(modulus in 3u64..12, residue in 0u64..12, x in 2u64..30_000) {
        let r = residue % modulus;
        let table = MembershipTable::from_fn(30_000, |p| p % modulus == r);
        prop_assert_eq!(count_by_sieve(&table, x, 3), count_by_enumeration(&table, x));
    }

    #[test]
    fn covolume_is_multiplicative(extra in 0usize..6) {
        let pool = [13u64, 17, 29, 37, 41, 53];
        let b = QuatAlgK::from_split_pairs(-4, [5]).unwrap();
        let b2 = QuatAlgK::from_split_pairs(-4, [5, pool[extra]]).unwrap();
        let v = kleinian_covolume(&b, 1e-9).unwrap();
        let v2 = kleinian_covolume(&b2, 1e-9).unwrap();
        let factor = (pool[extra] - 1) as u128;
        prop_assert_eq!(v2.local_factor, v.local_factor * factor * factor);
        prop_assert!((v2.value / v.value - (factor * factor) as f64).abs() < 1e-9 * (factor * factor) as f64);
    }
}
