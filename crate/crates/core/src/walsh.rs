//! Unnormalized fast Walsh–Hadamard transform.

use std::ops::{Add, Sub};

/// In-place butterfly: `v[z] ← Σ_x (−1)^{x·z} v[x]`.
///
/// Works for any copyable ring element; integer inputs give exact Walsh
/// coefficients. Panics if the length is not a power of two.
pub fn fwht_inplace<T>(v: &mut [T])
where
    T: Copy + Add<Output = T> + Sub<Output = T>,
{
    let n = v.len();
    assert!(
        n.is_power_of_two(),
        "Walsh–Hadamard transform needs a power-of-two length, got {n}"
    );
    let mut h = 1;
    while h < n {
        for block in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Number of butterfly (add/sub pair) operations for a length-`2^bits` transform.
pub fn butterfly_count(bits: u32) -> u64 {
    (bits as u64) << bits.saturating_sub(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(v: &[i64]) -> Vec<i64> {
        (0..v.len())
            .map(|z| {
                v.iter()
                    .enumerate()
                    .map(|(x, &a)| if (x & z).count_ones() % 2 == 0 { a } else { -a })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn delta_and_constant() {
        let mut d = vec![1.0, 0.0, 0.0, 0.0];
        fwht_inplace(&mut d);
        assert_eq!(d, vec![1.0, 1.0, 1.0, 1.0]);
        let mut c = vec![1.0, 1.0, 1.0, 1.0];
        fwht_inplace(&mut c);
        assert_eq!(c, vec![4.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    #[should_panic]
    fn rejects_non_power_of_two() {
        let mut v = vec![1i64, 2, 3];
        fwht_inplace(&mut v);
    }

    #[test]
    fn length_one_is_identity() {
        let mut v = vec![7i64];
        fwht_inplace(&mut v);
        assert_eq!(v, vec![7]);
    }

    #[test]
    fn butterflies() {
        assert_eq!(butterfly_count(0), 0);
        assert_eq!(butterfly_count(1), 1);
        assert_eq!(butterfly_count(3), 12);
    }

    proptest! {
        #[test]
        fn matches_definition(
            v in (0usize..7).prop_flat_map(|bits| prop::collection::vec(-1000i64..1000, 1 << bits))
        ) {
            let n = v.len() as i64;
            let mut w = v.clone();
            fwht_inplace(&mut w);
            prop_assert_eq!(&w, &naive(&v));
            fwht_inplace(&mut w);
            let scaled: Vec<i64> = v.iter().map(|a| a * n).collect();
            prop_assert_eq!(w, scaled);
        }
    }
}
