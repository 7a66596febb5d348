//! Exact linear algebra over F₂ on packed bit vectors.
//!
//! Coordinates are packed into a `u32`: position `i` is bit `i`, so position 0
//! is the rightmost character when a vector is written as a binary string
//! (`y_{w-1} … y_1 y_0`). Every string in and out of this crate follows that
//! convention.

use std::fmt;
use std::ops::{BitXor, BitXorAssign};
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{GpkError, Result};

/// Largest supported vector width.
pub const MAX_WIDTH: usize = 24;

/// Largest subspace dimension [`SubspaceBasis::enumerate`] will expand.
pub const MAX_ENUMERATION_DIM: usize = 20;

/// A vector in F₂ʷ, `1 ≤ w ≤ 24`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    // Ordering compares width first, then the integer value.
    width: u8,
    bits: u32,
}

#[inline]
fn mask(width: usize) -> u32 {
    if width >= 32 {
        u32::MAX
    } else {
        (1u32 << width) - 1
    }
}

impl BitVector {
    /// Panics if `width` is outside `1..=24` or `bits` has coordinates beyond `width`.
    pub fn new(width: usize, bits: u32) -> Self {
        Self::try_new(width, bits).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn try_new(width: usize, bits: u32) -> Result<Self> {
        if width == 0 || width > MAX_WIDTH {
            return Err(GpkError::InvalidParameters(format!(
                "bit vector width {width} outside 1..={MAX_WIDTH}"
            )));
        }
        if bits & !mask(width) != 0 {
            return Err(GpkError::InvalidParameters(format!(
                "value {bits:#x} does not fit in {width} bits"
            )));
        }
        Ok(BitVector {
            width: width as u8,
            bits,
        })
    }

    pub fn zero(width: usize) -> Self {
        Self::new(width, 0)
    }

    /// The unit vector with a single 1 at `position`.
    pub fn unit(width: usize, position: usize) -> Self {
        assert!(position < width, "position {position} out of range for width {width}");
        Self::new(width, 1 << position)
    }

    /// Every vector of the given width, in increasing integer order.
    pub fn all(width: usize) -> impl Iterator<Item = BitVector> {
        let _ = Self::zero(width);
        (0..=mask(width)).map(move |b| BitVector {
            width: width as u8,
            bits: b,
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width as usize
    }

    /// Integer encoding, position 0 least significant.
    #[inline]
    pub fn bits(&self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn index(&self) -> usize {
        self.bits as usize
    }

    #[inline]
    pub fn bit(&self, position: usize) -> bool {
        assert!(position < self.width());
        (self.bits >> position) & 1 == 1
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Inner product `⊕ᵢ uᵢ·vᵢ`. Panics on width mismatch.
    #[inline]
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(
            self.width, other.width,
            "dot product of vectors with different widths"
        );
        (self.bits & other.bits).count_ones() & 1 == 1
    }
}

/// Inner product over F₂; free-function form of [`BitVector::dot`].
#[inline]
pub fn dot(u: &BitVector, v: &BitVector) -> bool {
    u.dot(v)
}

impl BitXor for BitVector {
    type Output = BitVector;

    fn bitxor(self, rhs: BitVector) -> BitVector {
        assert_eq!(self.width, rhs.width, "xor of vectors with different widths");
        BitVector {
            width: self.width,
            bits: self.bits ^ rhs.bits,
        }
    }
}

impl BitXorAssign for BitVector {
    fn bitxor_assign(&mut self, rhs: BitVector) {
        *self = *self ^ rhs;
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for pos in (0..self.width()).rev() {
            f.write_str(if self.bit(pos) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = GpkError;

    /// Parses a string written most-significant position first.
    fn from_str(s: &str) -> Result<Self> {
        let width = s.len();
        if width == 0 || width > MAX_WIDTH {
            return Err(GpkError::Parse(format!(
                "binary string {s:?} must have 1..={MAX_WIDTH} characters"
            )));
        }
        let mut bits = 0u32;
        for c in s.chars() {
            bits <<= 1;
            match c {
                '0' => {}
                '1' => bits |= 1,
                _ => return Err(GpkError::Parse(format!("invalid binary string {s:?}"))),
            }
        }
        Ok(BitVector {
            width: width as u8,
            bits,
        })
    }
}

impl Serialize for BitVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A linear subspace of F₂ʷ held as a reduced row-echelon basis.
///
/// The leading coordinate of a row is its highest set position. Rows are kept
/// in strictly decreasing order of leading coordinate and every leading
/// coordinate is zero in all other rows, so two bases are equal iff they span
/// the same subspace.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SubspaceBasis {
    width: u8,
    rows: Vec<u32>,
}

#[inline]
fn leading(v: u32) -> u32 {
    31 - v.leading_zeros()
}

impl SubspaceBasis {
    /// The zero subspace `{0}`.
    pub fn empty(width: usize) -> Self {
        let _ = BitVector::zero(width);
        SubspaceBasis {
            width: width as u8,
            rows: Vec::new(),
        }
    }

    /// All of F₂ʷ.
    pub fn full(width: usize) -> Self {
        let _ = BitVector::zero(width);
        SubspaceBasis {
            width: width as u8,
            rows: (0..width).rev().map(|i| 1u32 << i).collect(),
        }
    }

    pub fn span<I>(width: usize, vectors: I) -> Self
    where
        I: IntoIterator<Item = BitVector>,
    {
        let mut basis = Self::empty(width);
        for v in vectors {
            basis.insert(v);
        }
        basis
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width as usize
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Number of elements in the subspace, `2^dim`.
    pub fn cardinality(&self) -> u64 {
        1u64 << self.dim()
    }

    pub fn rows(&self) -> Vec<BitVector> {
        self.rows
            .iter()
            .map(|&b| BitVector::new(self.width(), b))
            .collect()
    }

    fn check_width(&self, v: &BitVector) {
        assert_eq!(
            v.width(),
            self.width(),
            "vector width {} does not match subspace width {}",
            v.width(),
            self.width()
        );
    }

    fn reduce_bits(&self, mut v: u32) -> u32 {
        for &row in &self.rows {
            if v >> leading(row) & 1 == 1 {
                v ^= row;
            }
        }
        v
    }

    /// Canonical representative of the coset `v + V`: `v` with every leading
    /// coordinate of the basis cleared.
    pub fn reduce(&self, v: &BitVector) -> BitVector {
        self.check_width(v);
        BitVector::new(self.width(), self.reduce_bits(v.bits()))
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        self.check_width(v);
        self.reduce_bits(v.bits()) == 0
    }

    /// Adds `v` to the basis if it lies outside the span. Returns whether the
    /// dimension grew.
    pub fn insert(&mut self, v: BitVector) -> bool {
        self.check_width(&v);
        let r = self.reduce_bits(v.bits());
        if r == 0 {
            return false;
        }
        let p = leading(r);
        for row in self.rows.iter_mut() {
            if *row >> p & 1 == 1 {
                *row ^= r;
            }
        }
        let at = self.rows.partition_point(|&row| leading(row) > p);
        self.rows.insert(at, r);
        true
    }

    /// Non-mutating form of [`insert`](Self::insert).
    pub fn extend(&self, v: BitVector) -> (bool, SubspaceBasis) {
        let mut next = self.clone();
        let added = next.insert(v);
        (added, next)
    }

    /// Smallest nonzero vector, by integer value, outside the span.
    ///
    /// Every element of the span has a leading coordinate among the pivots,
    /// and the rows with pivots below `j` span all of `{0,1}^j`. So the answer
    /// is the unit vector at the lowest non-pivot position.
    pub fn first_outside(&self) -> Option<BitVector> {
        let pivots: u32 = self.rows.iter().fold(0, |acc, &r| acc | (1 << leading(r)));
        let free = !pivots & mask(self.width());
        if free == 0 {
            None
        } else {
            Some(BitVector::new(self.width(), 1 << free.trailing_zeros()))
        }
    }

    /// `{z : z·v = 0 for all v in the span}`.
    pub fn orthogonal_complement(&self) -> SubspaceBasis {
        let w = self.width();
        let pivots: u32 = self.rows.iter().fold(0, |acc, &r| acc | (1 << leading(r)));
        let mut out = SubspaceBasis::empty(w);
        for free in (0..w).filter(|&i| pivots >> i & 1 == 0) {
            // One basis vector per free position: set the free coordinate and
            // copy that column of each row onto the row's pivot.
            let mut v = 1u32 << free;
            for &row in &self.rows {
                if row >> free & 1 == 1 {
                    v |= 1 << leading(row);
                }
            }
            out.insert(BitVector::new(w, v));
        }
        out
    }

    /// Every element of the span in increasing integer order.
    pub fn enumerate(&self) -> Result<Vec<BitVector>> {
        if self.dim() > MAX_ENUMERATION_DIM {
            return Err(GpkError::ResourceLimit {
                what: "subspace dimension",
                actual: self.dim(),
                limit: MAX_ENUMERATION_DIM,
            });
        }
        let mut elems = Vec::with_capacity(1 << self.dim());
        elems.push(0u32);
        for &row in &self.rows {
            let len = elems.len();
            for i in 0..len {
                elems.push(elems[i] ^ row);
            }
        }
        elems.sort_unstable();
        Ok(elems
            .into_iter()
            .map(|b| BitVector::new(self.width(), b))
            .collect())
    }

    /// Sum of two subspaces of the same ambient space.
    pub fn join(&self, other: &SubspaceBasis) -> SubspaceBasis {
        let mut out = self.clone();
        for v in other.rows() {
            out.insert(v);
        }
        out
    }
}

impl fmt::Debug for SubspaceBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl fmt::Display for SubspaceBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("span{")?;
        for (i, r) in self.rows().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("}")
    }
}

/// Solution space of the homogeneous system `{s·x = 0 : s ∈ constraints}`.
pub fn solve_homogeneous(constraints: &[BitVector], width: usize) -> SubspaceBasis {
    SubspaceBasis::span(width, constraints.iter().copied()).orthogonal_complement()
}

/// A uniformly random `dim`-dimensional subspace of F₂ʷ.
///
/// Draws random vectors until `dim` independent ones are found; every subspace
/// has the same number of ordered bases, so the result is uniform.
pub fn random_subspace<R: Rng + ?Sized>(width: usize, dim: usize, rng: &mut R) -> SubspaceBasis {
    assert!(dim <= width, "subspace dimension {dim} exceeds width {width}");
    let mut basis = SubspaceBasis::empty(width);
    while basis.dim() < dim {
        let v = BitVector::new(width, rng.gen::<u32>() & mask(width));
        basis.insert(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn set(vs: &[&str]) -> Vec<BitVector> {
        let mut v: Vec<_> = vs.iter().map(|s| bv(s)).collect();
        v.sort();
        v
    }

    #[test]
    fn dot_examples() {
        for v in BitVector::all(4) {
            assert!(!dot(&bv("0000"), &v));
        }
        assert!(!dot(&bv("1100"), &bv("1100")));
        assert!(!dot(&bv("0010"), &bv("1101")));
        assert!(dot(&bv("0001"), &bv("1101")));
    }

    #[test]
    #[should_panic]
    fn dot_width_mismatch_panics() {
        dot(&bv("01"), &bv("001"));
    }

    #[test]
    fn string_convention_is_rightmost_position_zero() {
        let v = bv("0010");
        assert_eq!(v.bits(), 2);
        assert!(v.bit(1));
        assert_eq!(v.to_string(), "0010");
        assert_eq!(BitVector::unit(4, 3).to_string(), "1000");
        assert!("01a".parse::<BitVector>().is_err());
        assert!("".parse::<BitVector>().is_err());
        assert!(BitVector::try_new(25, 0).is_err());
        assert!(BitVector::try_new(3, 8).is_err());
    }

    #[test]
    fn extend_examples() {
        let (added, b) = SubspaceBasis::empty(4).extend(bv("0000"));
        assert!(!added);
        assert_eq!(b.dim(), 0);

        let start = SubspaceBasis::span(4, [bv("0010")]);
        let (added, b) = start.extend(bv("1100"));
        assert!(added);
        assert_eq!(b, SubspaceBasis::span(4, [bv("1100"), bv("0010")]));
        assert_eq!(b.rows(), vec![bv("1100"), bv("0010")]);

        let start = SubspaceBasis::span(4, [bv("0001"), bv("0100")]);
        let (added, b) = start.extend(bv("0101"));
        assert!(!added);
        assert_eq!(b, start);
    }

    #[test]
    fn rows_are_reduced() {
        let b = SubspaceBasis::span(4, [bv("0011"), bv("0111"), bv("1111")]);
        // 0111^0011 = 0100, 1111^0111 = 1000, so span is {1000, 0100, 0011}.
        assert_eq!(b.rows(), vec![bv("1000"), bv("0100"), bv("0011")]);
    }

    #[test]
    fn first_outside_examples() {
        assert_eq!(SubspaceBasis::empty(4).first_outside(), Some(bv("0001")));
        assert_eq!(
            SubspaceBasis::span(4, [bv("0001")]).first_outside(),
            Some(bv("0010"))
        );
        assert_eq!(SubspaceBasis::full(4).first_outside(), None);
    }

    #[test]
    fn first_outside_matches_linear_scan() {
        for a in 0..16u32 {
            for b in 0..16u32 {
                let basis = SubspaceBasis::span(4, [BitVector::new(4, a), BitVector::new(4, b)]);
                let scan = (1..16u32)
                    .map(|x| BitVector::new(4, x))
                    .find(|v| !basis.contains(v));
                assert_eq!(basis.first_outside(), scan);
            }
        }
    }

    #[test]
    fn complement_examples() {
        assert_eq!(
            SubspaceBasis::empty(4).orthogonal_complement(),
            SubspaceBasis::full(4)
        );
        let v = SubspaceBasis::span(4, [bv("0001"), bv("1100")]);
        assert_eq!(
            v.orthogonal_complement(),
            SubspaceBasis::span(4, [bv("0010"), bv("1100")])
        );
        assert_eq!(
            SubspaceBasis::full(4).orthogonal_complement(),
            SubspaceBasis::empty(4)
        );
    }

    #[test]
    fn solve_homogeneous_examples() {
        let sol = solve_homogeneous(&[bv("0010"), bv("1100")], 4);
        assert_eq!(
            sol.enumerate().unwrap(),
            set(&["0000", "0001", "1100", "1101"])
        );
        assert_eq!(solve_homogeneous(&[], 4), SubspaceBasis::full(4));
        let all: Vec<_> = (0..4).map(|i| BitVector::unit(4, i)).collect();
        assert_eq!(solve_homogeneous(&all, 4).dim(), 0);
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(
            SubspaceBasis::empty(4).enumerate().unwrap(),
            vec![bv("0000")]
        );
        assert_eq!(
            SubspaceBasis::span(4, [bv("0001"), bv("1100")])
                .enumerate()
                .unwrap(),
            set(&["0000", "0001", "1100", "1101"])
        );
        assert_eq!(SubspaceBasis::full(10).enumerate().unwrap().len(), 1024);
        assert!(matches!(
            SubspaceBasis::full(21).enumerate(),
            Err(GpkError::ResourceLimit { .. })
        ));
    }

    #[test]
    fn complement_exhaustive_width_three() {
        // Every subspace of F₂³ arises as the span of some pair of vectors
        // together with the full space.
        let mut spaces = vec![SubspaceBasis::full(3)];
        for a in BitVector::all(3) {
            for b in BitVector::all(3) {
                spaces.push(SubspaceBasis::span(3, [a, b]));
            }
        }
        for v in spaces {
            let c = v.orthogonal_complement();
            assert_eq!(v.dim() + c.dim(), 3);
            // brute-force the annihilator
            let brute = SubspaceBasis::span(
                3,
                BitVector::all(3).filter(|z| v.enumerate().unwrap().iter().all(|x| !x.dot(z))),
            );
            assert_eq!(c, brute);
        }
    }
}
