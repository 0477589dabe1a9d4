use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qtwick_core::coeffs::{sample_base, BaseSequence, CoefficientTable};
use qtwick_core::jw::{apply_monomial, build_jw, Mask, MonomialOperator, SparseState};
use qtwick_core::pairings::{class_of, PairPartition, SetPartition};
use qtwick_core::wickpoly::{wick_mixed, CovarianceSpec, EpsilonString, QTPolynomial};

fn tuple_strategy() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..6, 0..10)
}

/// A random pair partition of `[2n]` from a shuffled list of points.
fn pairing_strategy() -> impl Strategy<Value = PairPartition> {
    (1usize..=6)
        .prop_flat_map(|n| Just((1..=2 * n).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|pts| PairPartition::new(pts.chunks(2).map(|c| (c[0], c[1]))).unwrap())
}

fn poly_strategy() -> impl Strategy<Value = QTPolynomial> {
    prop::collection::vec(((0u32..4, 0u32..4), -5i64..=5), 0..6)
        .prop_map(QTPolynomial::from_counts)
}

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> SparseState {
    let mut s = SparseState::zero(n);
    for _ in 0..rng.gen_range(1..6) {
        s.add(Mask::from_u64(n, rng.gen_range(0..1u64 << n)), rng.gen_range(-2.0..2.0));
    }
    s
}

proptest! {
    #[test]
    fn class_is_invariant_under_relabelling(tuple in tuple_strategy(), shift in 1u8..50) {
        let relabelled: Vec<u32> = tuple.iter().map(|&x| u32::from(x) * 7 + u32::from(shift)).collect();
        prop_assert_eq!(class_of(&tuple), class_of(&relabelled));
    }

    #[test]
    fn class_blocks_cover_positions(tuple in tuple_strategy()) {
        let class = class_of(&tuple);
        let mut seen: Vec<usize> = class.blocks().concat();
        seen.sort_unstable();
        prop_assert_eq!(seen, (1..=tuple.len()).collect::<Vec<_>>());
        for block in class.blocks() {
            prop_assert!(block.iter().all(|&p| tuple[p - 1] == tuple[block[0] - 1]));
        }
        prop_assert_eq!(SetPartition::from_rgs(class.rgs().to_vec()).unwrap(), class);
    }

    #[test]
    fn pairing_reconstructed_from_its_tuples(p in pairing_strategy()) {
        let blocks = p.block_of_positions();
        let tuple: Vec<usize> = blocks.iter().map(|b| 10 - b).collect();
        prop_assert_eq!(class_of(&tuple).as_pair_partition(), Some(p.clone()));
        prop_assert_eq!(p.to_string().parse::<PairPartition>().unwrap(), p.clone());
        let report = p.cross_nest();
        prop_assert_eq!((report.cross_count(), report.nest_count()), p.stats());
        let n = p.blocks();
        prop_assert!(report.cross_count() + report.nest_count() <= n * (n - 1) / 2);
    }

    #[test]
    fn polynomial_render_round_trip(poly in poly_strategy()) {
        let text = poly.to_string();
        prop_assert_eq!(text.parse::<QTPolynomial>().unwrap(), poly.clone());
        prop_assert_eq!(poly.swap_qt().swap_qt(), poly);
    }

    #[test]
    fn polynomial_eval_is_a_ring_map(a in poly_strategy(), b in poly_strategy(), q in -2.0f64..2.0, t in 0.1f64..2.0) {
        let sum = (a.clone() + b.clone()).eval(q, t);
        let prod = (a.clone() * b.clone()).eval(q, t);
        prop_assert!((sum - a.eval(q, t) - b.eval(q, t)).abs() < 1e-9);
        prop_assert!((prod - a.eval(q, t) * b.eval(q, t)).abs() < 1e-8 * (1.0 + prod.abs()));
    }

    #[test]
    fn mixed_moment_vanishes_unless_balanced(bits in prop::collection::vec(any::<bool>(), 1..=8)) {
        let s: String = bits.iter().map(|&b| if b { '*' } else { '1' }).collect();
        let eps: EpsilonString = s.parse().unwrap();
        let stars = bits.iter().filter(|&&b| b).count();
        let w = wick_mixed(&eps, &CovarianceSpec::default()).unwrap();
        if 2 * stars != bits.len() {
            prop_assert!(w.is_zero());
        }
    }

    #[test]
    fn base_csv_round_trip(n in 1usize..12, seed in any::<u64>()) {
        let base = sample_base(n, 0.3, 0.8, seed).unwrap();
        prop_assert_eq!(BaseSequence::from_csv(&base.to_csv()).unwrap(), base);
    }

    #[test]
    fn sampling_is_prefix_stable(n in 2usize..30, extra in 1usize..20, seed in any::<u64>()) {
        let short = sample_base(n, -0.2, 0.9, seed).unwrap();
        let long = sample_base(n + extra, -0.2, 0.9, seed).unwrap();
        prop_assert_eq!(long.restrict(n).unwrap(), short);
    }

    #[test]
    fn state_csv_round_trip(n in 1usize..10, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_state(n, &mut rng);
        prop_assert_eq!(SparseState::from_csv(&s.to_csv(), n).unwrap(), s);
    }

    #[test]
    fn monomial_closure(n in 2usize..7, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let table = CoefficientTable::new(sample_base(n, 0.4, 1.1, seed).unwrap(), 1.1).unwrap();
        let pick = |rng: &mut ChaCha8Rng| -> MonomialOperator {
            build_jw(n, rng.gen_range(1..=n), rng.gen_bool(0.5), &table).unwrap()
        };
        let (a, b) = (pick(&mut rng), pick(&mut rng));
        let ab = a.compose(&b).unwrap();
        for _ in 0..100 {
            let s = random_state(n, &mut rng);
            let direct = apply_monomial(&ab, &s).unwrap();
            let stepwise = apply_monomial(&a, &apply_monomial(&b, &s).unwrap()).unwrap();
            prop_assert!(direct.support_len() <= s.support_len());
            for (m, c) in direct.iter().chain(stepwise.iter()) {
                prop_assert!((direct.coeff(m) - stepwise.coeff(m)).abs() <= 1e-12 * (1.0 + c.abs()));
            }
        }
    }
}
