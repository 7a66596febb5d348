//! Marker selection algorithms for the fully balanced image (FBI) problem.
//!
//! Given a fully balanced `f`, every GPK(y) run measures `0` with certainty
//! when `y` makes `f` constant and never measures `0` when `y` balances it.
//! The solvers pick markers outside the span of what they have already
//! learned and sort them into
//!
//! * `C`: independent markers that make `f` constant, and
//! * `B`: representatives of the distinct balancing classes modulo `C(f)`,
//!
//! until the image dimension `r` is pinned down: `dim C(f) = m − r` and there
//! are `2ʳ − 1` balancing classes.
//!
//! Markers are chosen with [`SubspaceBasis::first_outside`], so a run is a
//! deterministic function of the oracle. Only the measured nonzero `z`
//! values depend on the random source.

use std::fmt::{self, Write as _};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::{BooleanOracle, MarkerClass};
use crate::error::{GpkError, Result};
use crate::gf2::{solve_homogeneous, BitVector, SubspaceBasis};
use crate::gpk::{measure, GpkEngine};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    /// Distinguishes `r = 0` from `r = 1` (generalized Deutsch–Jozsa).
    One,
    /// Distinguishes `r = 1` from `r = 2`.
    Two,
    /// Determines any `r`.
    Three,
}

impl Algorithm {
    pub fn number(self) -> u8 {
        match self {
            Algorithm::One => 1,
            Algorithm::Two => 2,
            Algorithm::Three => 3,
        }
    }

    pub fn from_number(k: u8) -> Option<Self> {
        match k {
            1 => Some(Algorithm::One),
            2 => Some(Algorithm::Two),
            3 => Some(Algorithm::Three),
            _ => None,
        }
    }

    /// Worst-case GPK calls for output width `m` and image dimension `r`.
    pub fn call_bound(self, m: usize, r: usize) -> u64 {
        match self {
            Algorithm::One => m as u64,
            Algorithm::Two => 2 * m as u64 - 1,
            Algorithm::Three => algorithm3_bound(m, r),
        }
    }
}

/// `2ʳ(m − r + 1) − 1`.
pub fn algorithm3_bound(m: usize, r: usize) -> u64 {
    assert!(r <= m);
    (1u64 << r) * (m - r + 1) as u64 - 1
}

/// `m − r₀ + 1`.
pub fn early_stop_bound(m: usize, r0: usize) -> u64 {
    assert!(r0 >= 1 && r0 <= m);
    (m - r0 + 1) as u64
}

/// One GPK application as seen by a solver.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    /// 1-based position in the run.
    pub call_index: u64,
    pub marker: BitVector,
    pub outcome: BitVector,
    /// `Constant` when the measured outcome was zero, `Balanced` otherwise.
    pub classification: MarkerClass,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let class = match self.classification {
            MarkerClass::Constant => "constant",
            MarkerClass::Balanced => "balanced",
            MarkerClass::Neither => "neither",
        };
        write!(
            f,
            "{} {} {} {}",
            self.call_index, self.marker, self.outcome, class
        )
    }
}

/// What a solver has learned so far.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkerLedger {
    m: usize,
    constants: Vec<BitVector>,
    constant_span: SubspaceBasis,
    balancing: Vec<BitVector>,
    /// `⟨C ∪ B⟩`.
    explored: SubspaceBasis,
    gpk_calls: u64,
    trace: Vec<TraceEntry>,
}

impl MarkerLedger {
    fn new(m: usize) -> Self {
        MarkerLedger {
            m,
            constants: Vec::new(),
            constant_span: SubspaceBasis::empty(m),
            balancing: Vec::new(),
            explored: SubspaceBasis::empty(m),
            gpk_calls: 0,
            trace: Vec::new(),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Constant markers in the order they were found.
    pub fn constants(&self) -> &[BitVector] {
        &self.constants
    }

    pub fn constant_span(&self) -> &SubspaceBasis {
        &self.constant_span
    }

    /// Balancing-class representatives in insertion order.
    pub fn balancing(&self) -> &[BitVector] {
        &self.balancing
    }

    pub fn explored_span(&self) -> &SubspaceBasis {
        &self.explored
    }

    pub fn gpk_calls(&self) -> u64 {
        self.gpk_calls
    }

    pub fn trace(&self) -> &[TraceEntry] {
        &self.trace
    }

    /// One line per GPK call: `call_index marker outcome_z classification`.
    pub fn trace_log(&self) -> String {
        let mut out = String::new();
        for e in &self.trace {
            let _ = writeln!(out, "{e}");
        }
        out
    }

    fn add_constant(&mut self, y: BitVector) {
        let grew = self.constant_span.insert(y);
        debug_assert!(grew, "constant markers are chosen independent");
        self.constants.push(y);
        self.explored.insert(y);
    }

    fn add_balancing(&mut self, y: BitVector) {
        self.balancing.push(y);
        self.explored.insert(y);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageReconstruction {
    /// `f(0)`, from one classical query.
    pub offset: BitVector,
    /// Solution space of `{s·x = 0 : s ∈ C}`.
    pub direction: SubspaceBasis,
    /// `offset ⊕ direction`, in increasing order.
    pub points: Vec<BitVector>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FbiResult {
    pub algorithm: Algorithm,
    /// Dimension of `img(f)`.
    pub r: usize,
    pub ledger: MarkerLedger,
}

impl FbiResult {
    /// True when `C` spans all of `C(f)`, which is what image
    /// reconstruction needs.
    pub fn is_complete(&self) -> bool {
        self.ledger.constant_span.dim() + self.r == self.ledger.m
    }

    pub fn call_bound(&self) -> u64 {
        self.algorithm.call_bound(self.ledger.m, self.r)
    }
}

/// Runs the marker selection algorithms against one oracle at a time.
pub struct FbiSolver<'e, R> {
    engine: &'e GpkEngine,
    rng: R,
    max_calls: Option<u64>,
}

impl<'e, R: Rng> FbiSolver<'e, R> {
    /// `rng` drives measurement only; marker choice is deterministic.
    pub fn new(engine: &'e GpkEngine, rng: R) -> Self {
        FbiSolver {
            engine,
            rng,
            max_calls: None,
        }
    }

    /// Abort a run with [`GpkError::BudgetExceeded`] once it has used
    /// `limit` GPK calls and needs another.
    pub fn with_max_calls(mut self, limit: u64) -> Self {
        self.max_calls = Some(limit);
        self
    }

    pub fn run(&mut self, algorithm: Algorithm, oracle: &BooleanOracle) -> Result<FbiResult> {
        match algorithm {
            Algorithm::One => self.algorithm1(oracle),
            Algorithm::Two => self.algorithm2(oracle),
            Algorithm::Three => self.algorithm3(oracle),
        }
    }

    /// Applies GPK(y) and reports whether the measured outcome was zero.
    fn gpk(
        &mut self,
        oracle: &BooleanOracle,
        ledger: &mut MarkerLedger,
        y: BitVector,
    ) -> Result<bool> {
        if let Some(limit) = self.max_calls {
            if ledger.gpk_calls >= limit {
                return Err(GpkError::BudgetExceeded { limit });
            }
        }
        let dist = self.engine.run(oracle, &y)?;
        let outcome = measure(&dist, &mut self.rng);
        ledger.gpk_calls += 1;
        let zero = outcome.is_zero();
        ledger.trace.push(TraceEntry {
            call_index: ledger.gpk_calls,
            marker: y,
            outcome,
            classification: if zero {
                MarkerClass::Constant
            } else {
                MarkerClass::Balanced
            },
        });
        Ok(zero)
    }

    /// Promise: `r ∈ {0, 1}`. At most `m` calls.
    pub fn algorithm1(&mut self, oracle: &BooleanOracle) -> Result<FbiResult> {
        let m = oracle.m();
        let mut ledger = MarkerLedger::new(m);
        while let Some(y) = ledger.constant_span.first_outside() {
            if self.gpk(oracle, &mut ledger, y)? {
                ledger.add_constant(y);
            } else {
                return Ok(FbiResult {
                    algorithm: Algorithm::One,
                    r: 1,
                    ledger,
                });
            }
        }
        Ok(FbiResult {
            algorithm: Algorithm::One,
            r: 0,
            ledger,
        })
    }

    /// Promise: `r ∈ {0, r0}` with `r0 ≥ 1`. Decides in at most `m − r0 + 1`
    /// calls: `r0` is ruled out as soon as `C` outgrows `m − r0`.
    pub fn algorithm1_early_stop(&mut self, oracle: &BooleanOracle, r0: usize) -> Result<FbiResult> {
        let m = oracle.m();
        if r0 == 0 || r0 > m {
            return Err(GpkError::InvalidParameters(format!(
                "alternative dimension r0={r0} must lie in 1..={m}"
            )));
        }
        let mut ledger = MarkerLedger::new(m);
        let needed = m - r0 + 1;
        while ledger.constants.len() < needed {
            let y = ledger
                .constant_span
                .first_outside()
                .expect("fewer than m constants leaves a free marker");
            if self.gpk(oracle, &mut ledger, y)? {
                ledger.add_constant(y);
            } else {
                return Ok(FbiResult {
                    algorithm: Algorithm::One,
                    r: r0,
                    ledger,
                });
            }
        }
        Ok(FbiResult {
            algorithm: Algorithm::One,
            r: 0,
            ledger,
        })
    }

    /// Promise: `r ∈ {1, 2}`. At most `2m − 1` calls.
    pub fn algorithm2(&mut self, oracle: &BooleanOracle) -> Result<FbiResult> {
        let m = oracle.m();
        let mut ledger = MarkerLedger::new(m);
        loop {
            if ledger.constants.len() == m - 1 {
                return Ok(FbiResult {
                    algorithm: Algorithm::Two,
                    r: 1,
                    ledger,
                });
            }
            let Some(y) = ledger.explored.first_outside() else {
                return Err(GpkError::InvalidPromise(format!(
                    "all markers explored with {} constant and {} balancing; \
                     inconsistent with r in {{1, 2}}",
                    ledger.constants.len(),
                    ledger.balancing.len()
                )));
            };
            if self.gpk(oracle, &mut ledger, y)? {
                ledger.add_constant(y);
                continue;
            }
            let Some(&s) = ledger.balancing.first() else {
                ledger.add_balancing(y);
                continue;
            };
            let shifted = s ^ y;
            if self.gpk(oracle, &mut ledger, shifted)? {
                ledger.add_constant(shifted);
            } else {
                ledger.add_balancing(y);
                ledger.add_balancing(shifted);
                return Ok(FbiResult {
                    algorithm: Algorithm::Two,
                    r: 2,
                    ledger,
                });
            }
        }
    }

    /// Any fully balanced `f`. Runs until `⟨C ∪ B⟩` is the whole marker
    /// space, then reads `r = m − dim C`, cross-checked against
    /// `#B = 2ʳ − 1`.
    pub fn algorithm3(&mut self, oracle: &BooleanOracle) -> Result<FbiResult> {
        let m = oracle.m();
        let mut ledger = MarkerLedger::new(m);
        while let Some(y) = ledger.explored.first_outside() {
            if self.gpk(oracle, &mut ledger, y)? {
                ledger.add_constant(y);
                continue;
            }
            if ledger.balancing.is_empty() {
                ledger.add_balancing(y);
                continue;
            }
            let reps = ledger.balancing.clone();
            let mut shifted = Vec::with_capacity(reps.len());
            let mut found_constant = false;
            for s in reps {
                let ys = s ^ y;
                if self.gpk(oracle, &mut ledger, ys)? {
                    ledger.add_constant(ys);
                    found_constant = true;
                    break;
                }
                shifted.push(ys);
            }
            if !found_constant {
                ledger.add_balancing(y);
                for ys in shifted {
                    ledger.add_balancing(ys);
                }
            }
        }

        let r = m - ledger.constant_span.dim();
        let classes = ledger.balancing.len() as u64;
        if classes + 1 != 1u64 << r {
            return Err(GpkError::InvalidPromise(format!(
                "dim C = {} implies {} balancing classes but {} were found",
                ledger.constant_span.dim(),
                (1u64 << r) - 1,
                classes
            )));
        }
        Ok(FbiResult {
            algorithm: Algorithm::Three,
            r,
            ledger,
        })
    }
}

/// Recovers `img(f)` from a complete ledger and one classical query of `f(0)`.
pub fn reconstruct_image(oracle: &BooleanOracle, ledger: &MarkerLedger) -> Result<ImageReconstruction> {
    assert_eq!(ledger.m(), oracle.m(), "ledger built for another output width");
    let direction = solve_homogeneous(ledger.constants(), oracle.m());
    let offset = oracle.evaluate(&BitVector::zero(oracle.n()));
    let points = direction.enumerate()?.into_iter().map(|d| d ^ offset);
    let mut points: Vec<_> = points.collect();
    points.sort();
    Ok(ImageReconstruction {
        offset,
        direction,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{gen_fully_balanced, image_analysis, worked_example, MarkerCensus};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn solver(engine: &GpkEngine, seed: u64) -> FbiSolver<'_, ChaCha8Rng> {
        FbiSolver::new(engine, ChaCha8Rng::seed_from_u64(seed))
    }

    #[test]
    fn worked_example_algorithm3() {
        let f = worked_example();
        let engine = GpkEngine::default();
        let res = solver(&engine, 0).algorithm3(&f).unwrap();
        assert_eq!(res.r, 2);
        assert!(res.is_complete());
        let ledger = &res.ledger;
        assert_eq!(
            *ledger.constant_span(),
            SubspaceBasis::span(4, [bv("0010"), bv("1100")])
        );
        assert_eq!(ledger.constants(), &[bv("0010"), bv("1100")]);
        assert_eq!(ledger.balancing(), &[bv("0001"), bv("0100"), bv("0101")]);
        let markers: Vec<_> = ledger.trace().iter().map(|e| e.marker.to_string()).collect();
        assert_eq!(
            markers,
            ["0001", "0010", "0100", "0101", "1000", "1001", "1100"]
        );
        assert_eq!(ledger.gpk_calls(), 7);
        assert_eq!(engine.calls(), 7);
        assert!(ledger.gpk_calls() <= algorithm3_bound(4, 2));

        let before = f.query_count();
        let img = reconstruct_image(&f, ledger).unwrap();
        assert_eq!(f.query_count(), before + 1);
        assert_eq!(img.offset, bv("0001"));
        assert_eq!(
            img.points,
            vec![bv("0000"), bv("0001"), bv("1100"), bv("1101")]
        );
        assert_eq!(
            img.direction.enumerate().unwrap(),
            vec![bv("0000"), bv("0001"), bv("1100"), bv("1101")]
        );
    }

    #[test]
    fn balancing_reps_are_distinct_classes() {
        let f = worked_example();
        let engine = GpkEngine::default();
        let res = solver(&engine, 1).algorithm3(&f).unwrap();
        let c = MarkerCensus::of(&f).unwrap().constant_set;
        let mut classes: Vec<_> = res.ledger.balancing().iter().map(|b| c.reduce(b)).collect();
        classes.sort();
        classes.dedup();
        assert_eq!(classes.len(), 3);
        assert!(classes.iter().all(|b| !b.is_zero()));
    }

    #[test]
    fn constant_oracle() {
        let f = BooleanOracle::constant(3, bv("101")).unwrap();
        let engine = GpkEngine::default();
        let res = solver(&engine, 2).algorithm1(&f).unwrap();
        assert_eq!(res.r, 0);
        assert_eq!(res.ledger.gpk_calls(), 3);
        assert!(res.is_complete());
        let res = solver(&engine, 2).algorithm3(&f).unwrap();
        assert_eq!(res.r, 0);
        assert_eq!(res.ledger.constant_span().dim(), 3);
        assert!(res.ledger.balancing().is_empty());
        let img = reconstruct_image(&f, &res.ledger).unwrap();
        assert_eq!(img.direction.dim(), 0);
        assert_eq!(img.points, vec![bv("101")]);
    }

    #[test]
    fn single_bit_balanced() {
        let f = BooleanOracle::from_fn(3, 1, |x| BitVector::new(1, x.bits() & 1)).unwrap();
        let engine = GpkEngine::default();
        let res = solver(&engine, 3).algorithm1(&f).unwrap();
        assert_eq!(res.r, 1);
        assert_eq!(res.ledger.gpk_calls(), 1);
    }

    #[test]
    fn early_stop_edges() {
        let engine = GpkEngine::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = gen_fully_balanced(4, 4, 4, &mut rng).unwrap();
        let res = solver(&engine, 0).algorithm1_early_stop(&f, 4).unwrap();
        assert_eq!((res.r, res.ledger.gpk_calls()), (4, 1));
        let c = gen_fully_balanced(4, 4, 0, &mut rng).unwrap();
        let res = solver(&engine, 0).algorithm1_early_stop(&c, 4).unwrap();
        assert_eq!((res.r, res.ledger.gpk_calls()), (0, 1));
        assert!(solver(&engine, 0).algorithm1_early_stop(&c, 0).is_err());
        assert!(solver(&engine, 0).algorithm1_early_stop(&c, 5).is_err());
        // r0 = 1 behaves like algorithm 1
        for seed in 0..10 {
            let g = gen_fully_balanced(3, 3, seed as usize % 2, &mut rng).unwrap();
            let a = solver(&engine, seed).algorithm1(&g).unwrap();
            let b = solver(&engine, seed).algorithm1_early_stop(&g, 1).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn algorithm2_examples() {
        let engine = GpkEngine::default();
        let res = solver(&engine, 5).algorithm2(&worked_example()).unwrap();
        assert_eq!(res.r, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for r in [1, 2] {
            for _ in 0..20 {
                let f = gen_fully_balanced(4, 4, r, &mut rng).unwrap();
                let res = solver(&engine, 7).algorithm2(&f).unwrap();
                assert_eq!(res.r, r);
                assert!(res.ledger.gpk_calls() <= 7);
            }
        }
        // m = 1 forces r = 1 without any call
        let f = BooleanOracle::from_fn(2, 1, |x| BitVector::new(1, x.bits() & 1)).unwrap();
        let res = solver(&engine, 0).algorithm2(&f).unwrap();
        assert_eq!((res.r, res.ledger.gpk_calls()), (1, 0));
    }

    #[test]
    fn algorithm3_sweep() {
        let engine = GpkEngine::default();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 1..=5 {
            for m in 1..=5 {
                for r in 0..=n.min(m) {
                    let f = gen_fully_balanced(n, m, r, &mut rng).unwrap();
                    let res = solver(&engine, 9).algorithm3(&f).unwrap();
                    assert_eq!(res.r, image_analysis(&f).dim());
                    assert!(res.ledger.gpk_calls() <= algorithm3_bound(m, r));
                    let img = reconstruct_image(&f, &res.ledger).unwrap();
                    let mut truth = image_analysis(&f).points;
                    truth.sort();
                    assert_eq!(img.points, truth);
                }
            }
        }
    }

    #[test]
    fn classification_path_ignores_measurement_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let f = gen_fully_balanced(5, 5, 3, &mut rng).unwrap();
        let engine = GpkEngine::default();
        let a = solver(&engine, 1).algorithm3(&f).unwrap();
        let b = solver(&engine, 2).algorithm3(&f).unwrap();
        let path = |r: &FbiResult| {
            r.ledger
                .trace()
                .iter()
                .map(|e| (e.marker, e.classification))
                .collect::<Vec<_>>()
        };
        assert_eq!(path(&a), path(&b));
        let again = solver(&engine, 1).algorithm3(&f).unwrap();
        assert_eq!(a.ledger.trace_log(), again.ledger.trace_log());
    }

    #[test]
    fn max_calls_guard() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = gen_fully_balanced(4, 4, 4, &mut rng).unwrap();
        let engine = GpkEngine::default();
        let err = solver(&engine, 0).with_max_calls(5).algorithm3(&f).unwrap_err();
        assert_eq!(err, GpkError::BudgetExceeded { limit: 5 });
        let res = solver(&engine, 0).with_max_calls(15).algorithm3(&f).unwrap();
        assert_eq!(res.r, 4);
        assert_eq!(res.ledger.gpk_calls(), 15);
    }

    #[test]
    fn trace_log_format() {
        let engine = GpkEngine::default();
        let res = solver(&engine, 0).algorithm3(&worked_example()).unwrap();
        let log = res.ledger.trace_log();
        let lines: Vec<_> = log.lines().collect();
        assert_eq!(lines.len(), 7);
        assert!(lines[1].starts_with("2 0010 0000 constant"));
        let first: Vec<_> = lines[0].split(' ').collect();
        assert_eq!(first[0], "1");
        assert_eq!(first[1], "0001");
        assert_ne!(first[2], "0000");
        assert_eq!(first[3], "balanced");
    }
}
