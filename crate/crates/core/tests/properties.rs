mod common;

use common::{close, naive_holds, random_formula};
use gemcheck_core::search::{decode, partition, random_structure};
use gemcheck_core::semantics::push_guards;
use gemcheck_core::structures::literal;
use gemcheck_core::syntax::print;
use gemcheck_core::{parse, Kind, Program};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn kind() -> impl Strategy<Value = Kind> {
    prop_oneof![Just(Kind::Part), Just(Kind::Fusion)]
}

proptest! {
    #[test]
    fn parse_inverts_print(seed in any::<u64>(), depth in 0u32..=6) {
        let f = random_formula(&mut ChaCha8Rng::seed_from_u64(seed), depth);
        let text = print(&f);
        prop_assert_eq!(parse(&text).unwrap(), f, "{}", text);
    }

    #[test]
    fn literal_round_trip(kind in kind(), n in 0usize..=4, seed in any::<u64>()) {
        let s = random_structure(kind, n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let back = literal::parse(&s.to_literal()).unwrap();
        prop_assert_eq!(back.to_literal(), s.to_literal());
        prop_assert_eq!(back.code(), s.code());
    }

    #[test]
    fn code_decodes_to_itself(kind in kind(), n in 0usize..=3, seed in any::<u64>()) {
        let s = random_structure(kind, n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let code = s.code().unwrap();
        prop_assert_eq!(decode(kind, n, code).to_literal(), s.to_literal());
    }

    /// The compiled evaluator (which runs the guard-pushed rewrite) agrees with
    /// a direct recursive evaluation of the original formula.
    #[test]
    fn compiled_agrees_with_naive(seed in any::<u64>(), kind in kind(), n in 0usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let open = random_formula(&mut rng, 4);
        let f = close(&mut rng, open);
        let s = random_structure(kind, n, &mut rng).unwrap();
        let expected = naive_holds(&s, &f);
        prop_assert_eq!(Program::compile(&f).holds(&s).unwrap(), expected, "{}", print(&f));
        prop_assert_eq!(naive_holds(&s, &push_guards(&f)), expected, "{}", print(&push_guards(&f)));
    }

    #[test]
    fn witnesses_falsify(seed in any::<u64>(), kind in kind(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let open = random_formula(&mut rng, 4);
        let f = close(&mut rng, open);
        let s = random_structure(kind, n, &mut rng).unwrap();
        let outcome = Program::compile(&f).check(&s).unwrap();
        if let Some(w) = outcome.witness {
            prop_assert!(!outcome.value);
            prop_assert!(gemcheck_core::semantics::witness_falsifies(&s, &f, &w).unwrap());
        }
    }

    #[test]
    fn partition_is_contiguous_and_exact(start in 0u64..1000, len in 0u64..5000, parts in 1u64..300) {
        let ranges = partition(start..start + len, parts);
        prop_assert!(ranges.len() as u64 <= parts);
        let mut next = start;
        for r in &ranges {
            prop_assert_eq!(r.start, next);
            next = r.end;
        }
        prop_assert_eq!(next, start + len);
        let sizes: Vec<u64> = ranges.iter().map(|r| r.end - r.start).collect();
        if let (Some(lo), Some(hi)) = (sizes.iter().min(), sizes.iter().max()) {
            prop_assert!(hi - lo <= 1);
        }
    }
}
