//! Cross-module properties checked against direct enumeration.

use std::collections::{BTreeMap, BTreeSet};

use gpk_core::boolfn::{gen_fully_balanced, gen_simon, image_analysis, MarkerCensus};
use gpk_core::fbi::{reconstruct_image, Algorithm, FbiSolver};
use gpk_core::gpk::walsh_coefficient;
use gpk_core::simon::verify_hidden_subgroup;
use gpk_core::{BitVector, BooleanOracle, GpkEngine, SubspaceBasis};
use num_rational::Ratio;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn parity(v: u32) -> u32 {
    v.count_ones() & 1
}

/// Ones among `y·f(x)`, by direct counting.
fn ones(table: &[u32], y: u32) -> usize {
    table.iter().filter(|&&v| parity(v & y) == 1).count()
}

struct Brute {
    constants: BTreeSet<u32>,
    balancing: BTreeSet<u32>,
    neither: usize,
}

fn brute(table: &[u32], m: usize) -> Brute {
    let half = table.len() / 2;
    let mut b = Brute {
        constants: BTreeSet::new(),
        balancing: BTreeSet::new(),
        neither: 0,
    };
    for y in 0..1u32 << m {
        match ones(table, y) {
            0 => {
                b.constants.insert(y);
            }
            c if c == table.len() => {
                b.constants.insert(y);
            }
            c if c == half => {
                b.balancing.insert(y);
            }
            _ => b.neither += 1,
        }
    }
    b
}

/// Image is affine with equal preimage counts, by enumeration.
fn affine_and_uniform(table: &[u32]) -> (bool, usize) {
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for &v in table {
        *counts.entry(v).or_default() += 1;
    }
    let p0 = *counts.keys().next().unwrap();
    let shifted: BTreeSet<u32> = counts.keys().map(|p| p ^ p0).collect();
    let closed = shifted
        .iter()
        .all(|a| shifted.iter().all(|b| shifted.contains(&(a ^ b))));
    let uniform = counts.values().all(|&c| c == counts[&p0]);
    // Dimension of the affine hull.
    let mut span: BTreeSet<u32> = BTreeSet::from([0]);
    for &d in &shifted {
        if !span.contains(&d) {
            let extra: Vec<u32> = span.iter().map(|s| s ^ d).collect();
            span.extend(extra);
        }
    }
    (closed && uniform, span.len().trailing_zeros() as usize)
}

fn all_tables(n: usize, m: usize) -> impl Iterator<Item = Vec<u32>> {
    let rows = 1usize << n;
    let choices = 1u64 << m;
    (0..choices.pow(rows as u32)).map(move |mut code| {
        (0..rows)
            .map(|_| {
                let v = (code % choices) as u32;
                code /= choices;
                v
            })
            .collect()
    })
}

fn oracle(n: usize, m: usize, table: &[u32]) -> BooleanOracle {
    BooleanOracle::from_table(n, m, table.iter().map(|&v| BitVector::new(m, v)).collect()).unwrap()
}

#[test]
fn fully_balanced_iff_affine_uniform_image_exhaustive() {
    for n in 1..=3 {
        for m in 1..=2 {
            for table in all_tables(n, m) {
                let b = brute(&table, m);
                let fully = b.neither == 0;
                let (structured, _) = affine_and_uniform(&table);
                assert_eq!(fully, structured, "n={n} m={m} {table:?}");
                let census = MarkerCensus::of(&oracle(n, m, &table)).unwrap();
                assert_eq!(census.is_fully_balanced(), fully);
            }
        }
    }
}

#[test]
fn balancing_index_characterizes_full_balance_exhaustive() {
    for n in 1..=3 {
        for m in 1..=2 {
            for table in all_tables(n, m) {
                let b = brute(&table, m);
                let (_, r) = affine_and_uniform(&table);
                let index = Ratio::new(b.balancing.len() as u64, b.constants.len() as u64);
                let fully = b.neither == 0;
                assert_eq!(fully, index == Ratio::from((1u64 << r) - 1), "{table:?}");
            }
        }
    }
}

#[test]
fn constant_set_is_subspace_and_balancing_set_is_union_of_cosets_exhaustive() {
    for n in 1..=3 {
        for m in 1..=2 {
            for table in all_tables(n, m) {
                let b = brute(&table, m);
                for &c1 in &b.constants {
                    for &c2 in &b.constants {
                        assert!(b.constants.contains(&(c1 ^ c2)));
                    }
                    for &s in &b.balancing {
                        assert!(b.balancing.contains(&(c1 ^ s)));
                    }
                }
                let census = MarkerCensus::of(&oracle(n, m, &table)).unwrap();
                assert_eq!(census.constant_count, b.constants.len() as u64);
                let ours: BTreeSet<u32> = census.balancing.iter().map(|v| v.bits()).collect();
                assert_eq!(ours, b.balancing);
            }
        }
    }
}

#[test]
fn nonzero_marker_average_improves_on_standard_mass_at_zero() {
    for n in 1..=12u32 {
        let big_n = 1u64 << n;
        for k in 0..n {
            let big_k = 1u64 << k;
            let improved = Ratio::new(big_k - 1, big_n - 1);
            let standard = Ratio::new(big_k, big_n);
            assert!(improved < standard, "n={n} k={k}");
        }
    }
}

fn table_strategy() -> impl Strategy<Value = (usize, usize, Vec<u32>)> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(n, m)| {
        (
            Just(n),
            Just(m),
            prop::collection::vec(0u32..(1 << m), 1usize << n),
        )
    })
}

proptest! {
    #[test]
    fn constant_set_is_translation_invariant((n, m, table) in table_strategy(), shift in any::<u32>()) {
        let shift = shift & ((1 << m) - 1);
        let f = oracle(n, m, &table);
        let g = f.translated(BitVector::new(m, shift));
        let cf = MarkerCensus::of(&f).unwrap().constant_set;
        let cg = MarkerCensus::of(&g).unwrap().constant_set;
        prop_assert_eq!(cf, cg);
    }

    #[test]
    fn constant_set_is_image_complement_when_zero_in_image((n, m, table) in table_strategy()) {
        let shift = table[0];
        let shifted: Vec<u32> = table.iter().map(|v| v ^ shift).collect();
        let f = oracle(n, m, &shifted);
        let image = SubspaceBasis::span(m, shifted.iter().map(|&v| BitVector::new(m, v)));
        let census = MarkerCensus::of(&f).unwrap();
        prop_assert_eq!(census.constant_set, image.orthogonal_complement());
    }

    #[test]
    fn engine_amplitudes_match_direct_walsh_sums((n, m, table) in table_strategy(), y in any::<u32>()) {
        let f = oracle(n, m, &table);
        let y = BitVector::new(m, y & ((1 << m) - 1));
        let dist = GpkEngine::default().distribution_fwht(&f, &y).unwrap();
        let walsh = dist.walsh().unwrap();
        for z in BitVector::all(n) {
            let direct: i64 = (0..1u32 << n)
                .map(|x| {
                    if parity(x & z.bits()) ^ parity(table[x as usize] & y.bits()) == 0 { 1 } else { -1 }
                })
                .sum();
            prop_assert_eq!(walsh[z.index()], direct);
            prop_assert_eq!(walsh_coefficient(&f, &z, &y), direct);
        }
    }

    #[test]
    fn algorithm3_agrees_with_brute_force(m in 1usize..=6, extra in 0usize..=2, r_frac in 0.0f64..=1.0, seed in any::<u64>()) {
        let n = m + extra;
        let r = (r_frac * m as f64).round() as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = gen_fully_balanced(n, m, r, &mut rng).unwrap();
        let engine = GpkEngine::default();
        let result = FbiSolver::new(&engine, ChaCha8Rng::seed_from_u64(seed ^ 1))
            .run(Algorithm::Three, &f)
            .unwrap();
        prop_assert_eq!(result.r, r);
        prop_assert!(result.ledger.gpk_calls() <= Algorithm::Three.call_bound(m, r));

        let b = brute(f.table(), m);
        prop_assert_eq!(b.constants.len(), 1 << (m - r));
        prop_assert_eq!(result.ledger.balancing().len(), (1 << r) - 1);
        for s in result.ledger.balancing() {
            prop_assert!(b.balancing.contains(&s.bits()));
        }
        for c in result.ledger.constants() {
            prop_assert!(b.constants.contains(&c.bits()));
        }

        let image = reconstruct_image(&f, &result.ledger).unwrap();
        let truth: BTreeSet<BitVector> = image_analysis(&f).points.into_iter().collect();
        let ours: BTreeSet<BitVector> = image.points.into_iter().collect();
        prop_assert_eq!(ours, truth);
        prop_assert_eq!(f.query_count(), 1);
    }

    #[test]
    fn simon_generator_matches_its_subgroup(n in 1usize..=7, k_frac in 0.0f64..=1.0, seed in any::<u64>()) {
        let k = (k_frac * n as f64).round() as usize;
        let m = n;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, hidden) = gen_simon(n, m, k, &mut rng).unwrap();
        prop_assert!(verify_hidden_subgroup(&f, &hidden));
        let periods = hidden.enumerate().unwrap();
        for x in BitVector::all(n) {
            for y in BitVector::all(n) {
                let same = f.table()[x.index()] == f.table()[y.index()];
                prop_assert_eq!(same, periods.contains(&(x ^ y)));
            }
        }
    }
}
