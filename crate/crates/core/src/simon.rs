//! Generalized Simon problem: `f(x) = f(x')` iff `x ⊕ x' ∈ S` for a hidden
//! subspace `S ≤ F₂ⁿ`.
//!
//! For any nonzero marker the GPK output lies in `S⊥`, so repeated runs with
//! random markers collect vectors spanning `S⊥` and `S` is read off as its
//! orthogonal complement.
//!
//! Averaging the output distribution over all `2ᵐ` markers gives `K/N` on
//! `S⊥` (`K = 2ᵏ`, `N = 2ⁿ`). Excluding the zero marker, whose run always
//! returns `0`, shifts mass away from `z = 0`: with `M = 2ᵐ`,
//!
//! ```text
//! p(0) = (MK/N − 1)/(M − 1),    p(z) = MK/(N(M − 1))  for z ∈ S⊥ ∖ {0}
//! ```
//!
//! which is `(K−1)/(N−1)` and `K/(N−1)` when `m = n`.

use std::collections::HashMap;

use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::{BooleanOracle, MAX_MARKER_WIDTH};
use crate::error::{GpkError, Result};
use crate::gf2::{BitVector, SubspaceBasis};
use crate::gpk::{measure, GpkEngine};

/// Default number of consecutive non-growing samples before recovery stops.
pub const DEFAULT_STALL_LIMIT: usize = 20;

/// How each GPK run picks its marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "marker")]
pub enum MarkerMode {
    /// The same nonzero marker every run.
    Fixed(BitVector),
    /// Uniform over all of `{0,1}ᵐ`, zero included.
    Uniform,
    /// Uniform over `{0,1}ᵐ ∖ {0}`.
    UniformNonzero,
}

impl MarkerMode {
    fn draw<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> Result<BitVector> {
        match *self {
            MarkerMode::Fixed(y) => {
                if y.width() != m {
                    return Err(GpkError::InvalidParameters(format!(
                        "marker {y} does not have width {m}"
                    )));
                }
                if y.is_zero() {
                    return Err(GpkError::InvalidParameters(
                        "the zero marker always measures 0".into(),
                    ));
                }
                Ok(y)
            }
            MarkerMode::Uniform => Ok(BitVector::new(m, rng.gen_range(0..1u32 << m))),
            MarkerMode::UniformNonzero => Ok(BitVector::new(m, rng.gen_range(1..1u32 << m))),
        }
    }
}

/// One GPK run with a marker drawn per `mode`, measured once.
pub fn simon_sample<R1, R2>(
    engine: &GpkEngine,
    oracle: &BooleanOracle,
    mode: &MarkerMode,
    marker_rng: &mut R1,
    measure_rng: &mut R2,
) -> Result<BitVector>
where
    R1: Rng + ?Sized,
    R2: Rng + ?Sized,
{
    let y = mode.draw(oracle.m(), marker_rng)?;
    let dist = engine.run(oracle, &y)?;
    Ok(measure(&dist, measure_rng))
}

/// Exact output distribution, indexed by `z`, for a hidden subgroup `hidden`
/// of `{0,1}ⁿ` and markers in `{0,1}ᵐ` chosen per `mode`.
///
/// Only the averaged modes have a distribution determined by `S` alone.
pub fn theoretical_distribution(
    hidden: &SubspaceBasis,
    m: usize,
    mode: &MarkerMode,
) -> Result<Vec<Ratio<u64>>> {
    let n = hidden.width();
    let k = hidden.dim();
    if n > MAX_MARKER_WIDTH || m > MAX_MARKER_WIDTH {
        return Err(GpkError::ResourceLimit {
            what: "width",
            actual: n.max(m),
            limit: MAX_MARKER_WIDTH,
        });
    }
    if m == 0 || n - k > m {
        return Err(GpkError::InvalidParameters(format!(
            "no injective-across-cosets function into {m} bits for n={n}, k={k}"
        )));
    }
    let big_n = 1u64 << n;
    let big_k = 1u64 << k;
    let big_m = 1u64 << m;
    let dual = hidden.orthogonal_complement();
    let (at_zero, on_dual) = match mode {
        MarkerMode::Uniform => (Ratio::new(big_k, big_n), Ratio::new(big_k, big_n)),
        MarkerMode::UniformNonzero => {
            let denom = big_n * (big_m - 1);
            (
                Ratio::new(big_m * big_k - big_n, denom),
                Ratio::new(big_m * big_k, denom),
            )
        }
        MarkerMode::Fixed(_) => {
            return Err(GpkError::InvalidParameters(
                "a fixed marker's distribution depends on f, not only on S".into(),
            ))
        }
    };
    Ok(BitVector::all(n)
        .map(|z| {
            if z.is_zero() {
                at_zero
            } else if dual.contains(&z) {
                on_dual
            } else {
                Ratio::from_integer(0)
            }
        })
        .collect())
}

/// The marker-averaged output distribution computed exactly from integer
/// Walsh coefficients: `p(z) = Σ_y W_f(z,y)² / (N²·#markers)`.
pub fn exact_marker_average(
    engine: &GpkEngine,
    oracle: &BooleanOracle,
    include_zero_marker: bool,
) -> Result<Vec<Ratio<u64>>> {
    if oracle.n() > MAX_MARKER_WIDTH || oracle.m() > MAX_MARKER_WIDTH {
        return Err(GpkError::ResourceLimit {
            what: "width",
            actual: oracle.n().max(oracle.m()),
            limit: MAX_MARKER_WIDTH,
        });
    }
    let big_n = 1u64 << oracle.n();
    let mut sums = vec![0u64; big_n as usize];
    let mut markers = 0u64;
    for y in BitVector::all(oracle.m()) {
        if y.is_zero() && !include_zero_marker {
            continue;
        }
        markers += 1;
        let dist = engine.distribution_fwht(oracle, &y)?;
        let walsh = dist.walsh().expect("transform backend yields integers");
        for (s, &w) in sums.iter_mut().zip(walsh) {
            *s += (w * w) as u64;
        }
    }
    let denom = big_n * big_n * markers;
    Ok(sums.into_iter().map(|s| Ratio::new(s, denom)).collect())
}

/// True iff `f` is constant on every coset of `S` and takes distinct values
/// on distinct cosets. Exhaustive over the truth table.
pub fn verify_hidden_subgroup(oracle: &BooleanOracle, hidden: &SubspaceBasis) -> bool {
    if hidden.width() != oracle.n() {
        return false;
    }
    let table = oracle.table();
    let shifts: Vec<usize> = hidden.rows().iter().map(|s| s.index()).collect();
    let mut coset_of: HashMap<u32, u32> = HashMap::new();
    for x in BitVector::all(oracle.n()) {
        let fx = table[x.index()];
        if shifts.iter().any(|&s| table[x.index() ^ s] != fx) {
            return false;
        }
        let rep = hidden.reduce(&x).bits();
        if *coset_of.entry(fx).or_insert(rep) != rep {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimonRun {
    /// Measured outcomes in order.
    pub samples: Vec<BitVector>,
    /// Span of the samples.
    pub collected: SubspaceBasis,
    /// GPK runs made.
    pub iterations: usize,
    /// `collected⊥`, the candidate hidden subgroup.
    pub recovered: SubspaceBasis,
    pub verified: bool,
}

/// Samples with uniformly random nonzero markers until `stall_limit`
/// consecutive samples fail to enlarge the collected span (or the span is
/// all of `{0,1}ⁿ`), then returns the orthogonal complement.
///
/// If the span is still a proper subspace of `S⊥` each further sample stays
/// inside it with probability below 1/2, so the stall rule stops early with
/// probability below `2^-stall_limit` per incomplete step.
pub fn recover_hidden_subgroup<R1, R2>(
    engine: &GpkEngine,
    oracle: &BooleanOracle,
    marker_rng: &mut R1,
    measure_rng: &mut R2,
    stall_limit: usize,
) -> Result<SimonRun>
where
    R1: Rng + ?Sized,
    R2: Rng + ?Sized,
{
    recover_with_mode(
        engine,
        oracle,
        &MarkerMode::UniformNonzero,
        marker_rng,
        measure_rng,
        stall_limit,
    )
}

/// [`recover_hidden_subgroup`] with an arbitrary marker mode; the fixed and
/// uniform modes serve as baselines.
pub fn recover_with_mode<R1, R2>(
    engine: &GpkEngine,
    oracle: &BooleanOracle,
    mode: &MarkerMode,
    marker_rng: &mut R1,
    measure_rng: &mut R2,
    stall_limit: usize,
) -> Result<SimonRun>
where
    R1: Rng + ?Sized,
    R2: Rng + ?Sized,
{
    if stall_limit == 0 {
        return Err(GpkError::InvalidParameters("stall limit must be at least 1".into()));
    }
    let n = oracle.n();
    let mut collected = SubspaceBasis::empty(n);
    let mut samples = Vec::new();
    let mut stalled = 0;
    while stalled < stall_limit && collected.dim() < n {
        let z = simon_sample(engine, oracle, mode, marker_rng, measure_rng)?;
        samples.push(z);
        if collected.insert(z) {
            stalled = 0;
        } else {
            stalled += 1;
        }
    }
    let recovered = collected.orthogonal_complement();
    let verified = verify_hidden_subgroup(oracle, &recovered);
    Ok(SimonRun {
        iterations: samples.len(),
        samples,
        collected,
        recovered,
        verified,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionRow {
    pub z: BitVector,
    pub expected: f64,
    pub observed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalComparison {
    pub draws: usize,
    pub tv_distance: f64,
    /// One row per `z` with nonzero expected or observed mass.
    pub rows: Vec<DistributionRow>,
}

/// Draws `draws` samples and measures their total-variation distance from
/// the expected distribution. For averaged modes the reference is
/// [`theoretical_distribution`]; for a fixed marker it is that marker's exact
/// `α_z²`.
#[allow(clippy::too_many_arguments)]
pub fn empirical_vs_theoretical<R1, R2>(
    engine: &GpkEngine,
    oracle: &BooleanOracle,
    hidden: &SubspaceBasis,
    mode: &MarkerMode,
    draws: usize,
    marker_rng: &mut R1,
    measure_rng: &mut R2,
) -> Result<EmpiricalComparison>
where
    R1: Rng + ?Sized,
    R2: Rng + ?Sized,
{
    if draws < 1000 {
        return Err(GpkError::InvalidParameters(format!(
            "need at least 1000 draws, got {draws}"
        )));
    }
    let expected: Vec<f64> = match mode {
        MarkerMode::Fixed(y) => GpkEngine::default()
            .distribution_fwht(oracle, y)?
            .probabilities(),
        _ => theoretical_distribution(hidden, oracle.m(), mode)?
            .iter()
            .map(|p| *p.numer() as f64 / *p.denom() as f64)
            .collect(),
    };
    let mut counts = vec![0usize; expected.len()];
    for _ in 0..draws {
        let z = simon_sample(engine, oracle, mode, marker_rng, measure_rng)?;
        counts[z.index()] += 1;
    }
    let mut tv = 0.0;
    let mut rows = Vec::new();
    for (i, (&p, &c)) in expected.iter().zip(&counts).enumerate() {
        let observed = c as f64 / draws as f64;
        tv += (p - observed).abs();
        if p > 0.0 || c > 0 {
            rows.push(DistributionRow {
                z: BitVector::new(oracle.n(), i as u32),
                expected: p,
                observed,
            });
        }
    }
    Ok(EmpiricalComparison {
        draws,
        tv_distance: tv / 2.0,
        rows,
    })
}
