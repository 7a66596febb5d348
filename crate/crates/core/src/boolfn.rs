//! Truth-table Boolean oracles `f: {0,1}ⁿ → {0,1}ᵐ`, brute-force
//! classification of markers, and instance generators.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{GpkError, Result};
use crate::gf2::{random_subspace, BitVector, SubspaceBasis, MAX_WIDTH};
use crate::walsh::fwht_inplace;

/// Largest output width for which every marker is enumerated.
pub const MAX_MARKER_WIDTH: usize = 20;

/// A Boolean function stored as its full truth table.
///
/// `evaluate` is the counted classical access path. [`table`](Self::table)
/// exposes the raw table without counting; it exists for the circuit
/// simulators and for brute-force ground-truth analysis.
#[derive(Debug)]
pub struct BooleanOracle {
    n: usize,
    m: usize,
    table: Vec<u32>,
    queries: AtomicU64,
}

impl Clone for BooleanOracle {
    fn clone(&self) -> Self {
        BooleanOracle {
            n: self.n,
            m: self.m,
            table: self.table.clone(),
            queries: AtomicU64::new(self.query_count()),
        }
    }
}

impl PartialEq for BooleanOracle {
    /// Two oracles are equal when they compute the same function.
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.m == other.m && self.table == other.table
    }
}

impl Eq for BooleanOracle {}

fn check_dims(n: usize, m: usize) -> Result<()> {
    if n == 0 || n > MAX_WIDTH || m == 0 || m > MAX_WIDTH {
        return Err(GpkError::InvalidParameters(format!(
            "oracle dimensions n={n}, m={m} must both lie in 1..={MAX_WIDTH}"
        )));
    }
    Ok(())
}

impl BooleanOracle {
    pub fn from_table(n: usize, m: usize, table: Vec<BitVector>) -> Result<Self> {
        check_dims(n, m)?;
        if table.len() != 1 << n {
            return Err(GpkError::InvalidParameters(format!(
                "truth table has {} rows, expected 2^{n} = {}",
                table.len(),
                1usize << n
            )));
        }
        if let Some(bad) = table.iter().find(|v| v.width() != m) {
            return Err(GpkError::InvalidParameters(format!(
                "output {bad} has width {}, expected {m}",
                bad.width()
            )));
        }
        Ok(Self::from_raw(n, m, table.iter().map(|v| v.bits()).collect()))
    }

    fn from_raw(n: usize, m: usize, table: Vec<u32>) -> Self {
        debug_assert_eq!(table.len(), 1 << n);
        BooleanOracle {
            n,
            m,
            table,
            queries: AtomicU64::new(0),
        }
    }

    pub fn from_fn<F>(n: usize, m: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(BitVector) -> BitVector,
    {
        check_dims(n, m)?;
        let table = BitVector::all(n).map(&mut f).collect();
        Self::from_table(n, m, table)
    }

    /// `x ↦ c` for every `x ∈ {0,1}ⁿ`.
    pub fn constant(n: usize, c: BitVector) -> Result<Self> {
        Self::from_fn(n, c.width(), |_| c)
    }

    pub fn identity(width: usize) -> Result<Self> {
        Self::from_fn(width, width, |x| x)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    /// Classical query: returns `f(x)` and bumps the query counter.
    pub fn evaluate(&self, x: &BitVector) -> BitVector {
        assert_eq!(x.width(), self.n, "oracle input width mismatch");
        self.queries.fetch_add(1, Ordering::Relaxed);
        BitVector::new(self.m, self.table[x.index()])
    }

    /// Classical queries made through [`evaluate`](Self::evaluate) so far.
    pub fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    /// Uncounted access to the packed outputs, indexed by input value.
    #[inline]
    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn outputs(&self) -> impl Iterator<Item = BitVector> + '_ {
        self.table.iter().map(move |&b| BitVector::new(self.m, b))
    }

    /// `x ↦ f(x) ⊕ shift`.
    pub fn translated(&self, shift: BitVector) -> BooleanOracle {
        assert_eq!(shift.width(), self.m);
        Self::from_raw(
            self.n,
            self.m,
            self.table.iter().map(|&b| b ^ shift.bits()).collect(),
        )
    }

    /// Serializes to the oracle text format: a `n m` header followed by one
    /// output string per input `x = 0, 1, …, 2ⁿ−1`.
    pub fn to_file_string(&self) -> String {
        let mut out = String::with_capacity((self.m + 1) << self.n);
        let _ = writeln!(out, "{} {}", self.n, self.m);
        for v in self.outputs() {
            let _ = writeln!(out, "{v}");
        }
        out
    }

    /// Parses the oracle text format. `#` starts a comment; blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (lineno, header) = lines
            .next()
            .ok_or_else(|| GpkError::Parse("empty oracle file".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| GpkError::Parse(format!("line {lineno}: bad header {header:?}: {e}")))?;
        let [n, m] = dims[..] else {
            return Err(GpkError::Parse(format!(
                "line {lineno}: header must be `n m`, got {header:?}"
            )));
        };
        check_dims(n, m).map_err(|e| GpkError::Parse(format!("line {lineno}: {e}")))?;

        let mut table = Vec::with_capacity(1 << n);
        for (lineno, line) in lines {
            if table.len() == 1 << n {
                return Err(GpkError::Parse(format!(
                    "line {lineno}: more than 2^{n} output rows"
                )));
            }
            let v: BitVector = line
                .parse()
                .map_err(|e| GpkError::Parse(format!("line {lineno}: {e}")))?;
            if v.width() != m {
                return Err(GpkError::Parse(format!(
                    "line {lineno}: output {line:?} has {} characters, expected {m}",
                    v.width()
                )));
            }
            table.push(v.bits());
        }
        if table.len() != 1 << n {
            return Err(GpkError::Parse(format!(
                "expected 2^{n} = {} output rows, found {}",
                1usize << n,
                table.len()
            )));
        }
        Ok(Self::from_raw(n, m, table))
    }
}

/// How a single marker `y` interacts with `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MarkerClass {
    /// `y·f(x)` takes one value on every input.
    Constant,
    /// `y·f(x)` is 0 on exactly half the inputs.
    Balanced,
    Neither,
}

/// `Σ_x (−1)^{f(x)·y}`, by direct summation over the truth table.
pub fn correlation_sum(oracle: &BooleanOracle, y: &BitVector) -> i64 {
    assert_eq!(y.width(), oracle.m(), "marker width mismatch");
    let y = y.bits();
    oracle
        .table()
        .iter()
        .map(|&v| if (v & y).count_ones() & 1 == 0 { 1 } else { -1 })
        .sum()
}

fn class_of(sum: i64, n: usize) -> MarkerClass {
    if sum.unsigned_abs() == 1u64 << n {
        MarkerClass::Constant
    } else if sum == 0 {
        MarkerClass::Balanced
    } else {
        MarkerClass::Neither
    }
}

pub fn classify_marker(oracle: &BooleanOracle, y: &BitVector) -> MarkerClass {
    class_of(correlation_sum(oracle, y), oracle.n())
}

/// Correlation sums for every marker at once: the Walsh transform of the
/// output histogram, `S(y) = Σ_v #f⁻¹(v)·(−1)^{v·y}`.
pub fn marker_spectrum(oracle: &BooleanOracle) -> Result<Vec<i64>> {
    if oracle.m() > MAX_MARKER_WIDTH {
        return Err(GpkError::ResourceLimit {
            what: "output width m",
            actual: oracle.m(),
            limit: MAX_MARKER_WIDTH,
        });
    }
    let mut hist = vec![0i64; 1 << oracle.m()];
    for &v in oracle.table() {
        hist[v as usize] += 1;
    }
    fwht_inplace(&mut hist);
    Ok(hist)
}

/// Brute-force census of all markers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkerCensus {
    pub constant_set: SubspaceBasis,
    pub constant_count: u64,
    pub balancing: Vec<BitVector>,
    /// Markers that are neither constant nor balancing, in increasing order.
    pub neither: Vec<BitVector>,
}

impl MarkerCensus {
    pub fn of(oracle: &BooleanOracle) -> Result<Self> {
        let spectrum = marker_spectrum(oracle)?;
        let m = oracle.m();
        let mut constant = Vec::new();
        let mut balancing = Vec::new();
        let mut neither = Vec::new();
        for (y, &s) in spectrum.iter().enumerate() {
            let y = BitVector::new(m, y as u32);
            match class_of(s, oracle.n()) {
                MarkerClass::Constant => constant.push(y),
                MarkerClass::Balanced => balancing.push(y),
                MarkerClass::Neither => neither.push(y),
            }
        }
        let constant_count = constant.len() as u64;
        let constant_set = SubspaceBasis::span(m, constant);
        debug_assert_eq!(constant_set.cardinality(), constant_count);
        Ok(MarkerCensus {
            constant_set,
            constant_count,
            balancing,
            neither,
        })
    }

    pub fn is_fully_balanced(&self) -> bool {
        self.neither.is_empty()
    }

    /// `#B(f) / #C(f)`.
    pub fn balancing_index(&self) -> Ratio<u64> {
        Ratio::new(self.balancing.len() as u64, self.constant_count)
    }
}

/// Basis of `C(f)`, the markers that make `f` constant.
pub fn constant_set(oracle: &BooleanOracle) -> Result<SubspaceBasis> {
    Ok(MarkerCensus::of(oracle)?.constant_set)
}

/// Every marker that balances `f`, in increasing order.
pub fn balancing_set(oracle: &BooleanOracle) -> Result<Vec<BitVector>> {
    Ok(MarkerCensus::of(oracle)?.balancing)
}

pub fn balancing_index(oracle: &BooleanOracle) -> Result<Ratio<u64>> {
    Ok(MarkerCensus::of(oracle)?.balancing_index())
}

pub fn is_fully_balanced(oracle: &BooleanOracle) -> Result<bool> {
    Ok(MarkerCensus::of(oracle)?.is_fully_balanced())
}

/// Structure of `img(f)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageAnalysis {
    /// Distinct outputs in order of first appearance over increasing `x`.
    pub points: Vec<BitVector>,
    pub multiplicities: Vec<u64>,
    pub is_affine: bool,
    pub uniform: bool,
    /// Span of `{p ⊕ p₀ : p ∈ img(f)}` for `p₀` the first point.
    pub direction_basis: SubspaceBasis,
}

impl ImageAnalysis {
    /// Dimension of the affine hull of the image.
    pub fn dim(&self) -> usize {
        self.direction_basis.dim()
    }
}

pub fn image_analysis(oracle: &BooleanOracle) -> ImageAnalysis {
    let m = oracle.m();
    let mut index: HashMap<u32, usize> = HashMap::new();
    let mut points = Vec::new();
    let mut multiplicities: Vec<u64> = Vec::new();
    for &v in oracle.table() {
        let slot = *index.entry(v).or_insert_with(|| {
            points.push(BitVector::new(m, v));
            multiplicities.push(0);
            points.len() - 1
        });
        multiplicities[slot] += 1;
    }
    let p0 = points[0];
    let direction_basis = SubspaceBasis::span(m, points.iter().map(|&p| p ^ p0));
    // The translated point set is a subspace iff it fills its own span.
    let is_affine = direction_basis.cardinality() == points.len() as u64;
    let uniform = multiplicities.iter().all(|&c| c == multiplicities[0]);
    ImageAnalysis {
        points,
        multiplicities,
        is_affine,
        uniform,
        direction_basis,
    }
}

/// A fully balanced oracle whose image is a uniformly random affine
/// subspace of dimension `r`, each point having exactly `2^{n−r}` preimages
/// assigned through a random permutation of the inputs.
pub fn gen_fully_balanced<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    r: usize,
    rng: &mut R,
) -> Result<BooleanOracle> {
    check_dims(n, m)?;
    if r > n.min(m) {
        return Err(GpkError::InvalidParameters(format!(
            "image dimension r={r} exceeds min(n, m) = {}",
            n.min(m)
        )));
    }
    let direction = random_subspace(m, r, rng);
    let offset = rng.gen::<u32>() & ((1u32 << m) - 1);
    let points = direction.enumerate()?;
    let mut inputs: Vec<u32> = (0..1u32 << n).collect();
    inputs.shuffle(rng);
    let mut table = vec![0u32; 1 << n];
    let block = n - r;
    for (i, &x) in inputs.iter().enumerate() {
        table[x as usize] = points[i >> block].bits() ^ offset;
    }
    Ok(BooleanOracle::from_raw(n, m, table))
}

/// A generalized Simon instance: a random `k`-dimensional subspace `S` of
/// `{0,1}ⁿ` and an oracle constant on each coset of `S` and injective across
/// cosets. Returns the oracle together with a basis of `S`.
pub fn gen_simon<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    k: usize,
    rng: &mut R,
) -> Result<(BooleanOracle, SubspaceBasis)> {
    check_dims(n, m)?;
    if k > n || n - k > m {
        return Err(GpkError::InvalidParameters(format!(
            "need k ≤ n and n − k ≤ m for 2^(n−k) distinct values, got n={n}, m={m}, k={k}"
        )));
    }
    let hidden = random_subspace(n, k, rng);
    let cosets = 1usize << (n - k);
    let values = rand::seq::index::sample(rng, 1usize << m, cosets);
    let mut next = values.iter();
    let mut assigned: HashMap<u32, u32> = HashMap::with_capacity(cosets);
    let table = BitVector::all(n)
        .map(|x| {
            let rep = hidden.reduce(&x).bits();
            *assigned
                .entry(rep)
                .or_insert_with(|| next.next().expect("one value per coset") as u32)
        })
        .collect();
    Ok((BooleanOracle::from_raw(n, m, table), hidden))
}

/// The affine map `x ↦ Ax ⊕ b`, with `matrix[i]` the `i`-th row of `A`
/// (producing output position `i`).
pub fn gen_affine(n: usize, matrix: &[BitVector], offset: BitVector) -> Result<BooleanOracle> {
    let m = offset.width();
    if matrix.len() != m {
        return Err(GpkError::InvalidParameters(format!(
            "matrix has {} rows but offset has width {m}",
            matrix.len()
        )));
    }
    if let Some(row) = matrix.iter().find(|r| r.width() != n) {
        return Err(GpkError::InvalidParameters(format!(
            "matrix row {row} does not have width {n}"
        )));
    }
    BooleanOracle::from_fn(n, m, |x| {
        let bits = matrix
            .iter()
            .enumerate()
            .fold(offset.bits(), |acc, (i, row)| acc ^ ((row.dot(&x) as u32) << i));
        BitVector::new(m, bits)
    })
}

/// Rank of an `m × n` matrix given as rows.
pub fn matrix_rank(rows: &[BitVector]) -> usize {
    match rows.first() {
        None => 0,
        Some(r) => SubspaceBasis::span(r.width(), rows.iter().copied()).dim(),
    }
}

/// The 4→4 oracle used as the running example for the general marker
/// selection algorithm.
pub fn worked_example() -> BooleanOracle {
    const OUTPUTS: [&str; 16] = [
        "0001", "0000", "0000", "1100", "0000", "0001", "0001", "1101", "1100", "1100", "1101",
        "0000", "0001", "1100", "1101", "1101",
    ];
    let table = OUTPUTS.iter().map(|s| s.parse().unwrap()).collect();
    BooleanOracle::from_table(4, 4, table).expect("static table is well formed")
}
