//! The generalised phase kick-back circuit, simulated two ways.
//!
//! One run of GPK(y) on `f: {0,1}ⁿ → {0,1}ᵐ` prepares `|0⟩ₙ|y⟩ₘ`, applies a
//! Hadamard layer to every qubit, applies `U_f : |x,w⟩ ↦ |x, w⊕f(x)⟩`, applies
//! Hadamards to the first register and measures it. The first register ends
//! up with amplitudes `α_z = W_f(z, y) / 2ⁿ`, where
//! `W_f(z, y) = Σ_x (−1)^{y·f(x) ⊕ x·z}`.
//!
//! [`Backend::Fwht`] computes the amplitudes from the sign vector
//! `(−1)^{y·f(x)}` with one fast Walsh–Hadamard transform, exactly, in
//! integers. [`Backend::Statevector`] simulates the `n+m` qubit circuit gate
//! by gate on complex amplitudes.

use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::BooleanOracle;
use crate::error::{GpkError, Result};
use crate::gf2::BitVector;
use crate::walsh::fwht_inplace;

/// Input width limit for the transform backend.
pub const MAX_FWHT_QUBITS: usize = 22;
/// Limit on `n + m` for the statevector backend.
pub const MAX_STATEVECTOR_QUBITS: usize = 22;

/// Tolerance for per-amplitude agreement between backends.
pub const AGREEMENT_TOLERANCE: f64 = 1e-10;
/// Tolerance for normalization and eigenvector residuals.
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Fwht,
    Statevector,
}

/// First-register amplitudes after the final Hadamard layer of one GPK run.
#[derive(Debug, Clone, PartialEq)]
pub struct GpkDistribution {
    n: usize,
    alphas: Vec<f64>,
    /// Exact integer Walsh coefficients, when the backend produced them.
    walsh: Option<Vec<i64>>,
}

impl GpkDistribution {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn alpha(&self, z: &BitVector) -> f64 {
        assert_eq!(z.width(), self.n);
        self.alphas[z.index()]
    }

    /// `W_f(z, y)` for every `z`; only the transform backend provides these.
    pub fn walsh(&self) -> Option<&[i64]> {
        self.walsh.as_deref()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.alphas.iter().map(|a| a * a).collect()
    }

    pub fn total_probability(&self) -> f64 {
        self.alphas.iter().map(|a| a * a).sum()
    }
}

/// Diagnostics from a statevector run, alongside the distribution itself.
#[derive(Debug, Clone)]
pub struct StatevectorRun {
    pub distribution: GpkDistribution,
    /// `‖ψ − φ ⊗ |γ_y⟩‖` for the joint state after the final Hadamard layer.
    pub separability_residual: f64,
    /// Largest imaginary part left after the global phase was removed.
    pub max_imaginary: f64,
    /// Squared norm of the full `n+m` qubit state.
    pub joint_norm_sq: f64,
}

/// Runs GPK(y) and counts every run. The counter is the solvers' cost
/// metric; sampling again from an existing distribution is not a new run.
#[derive(Debug, Default)]
pub struct GpkEngine {
    backend: Backend,
    calls: AtomicU64,
}

impl GpkEngine {
    pub fn new(backend: Backend) -> Self {
        GpkEngine {
            backend,
            calls: AtomicU64::new(0),
        }
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    /// Number of GPK runs so far.
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    /// One GPK(y) run on the engine's configured backend.
    pub fn run(&self, oracle: &BooleanOracle, y: &BitVector) -> Result<GpkDistribution> {
        match self.backend {
            Backend::Fwht => self.distribution_fwht(oracle, y),
            Backend::Statevector => Ok(self.distribution_statevector(oracle, y)?.distribution),
        }
    }

    pub fn distribution_fwht(
        &self,
        oracle: &BooleanOracle,
        y: &BitVector,
    ) -> Result<GpkDistribution> {
        assert_eq!(y.width(), oracle.m(), "marker width mismatch");
        if oracle.n() > MAX_FWHT_QUBITS {
            return Err(GpkError::ResourceLimit {
                what: "input width n",
                actual: oracle.n(),
                limit: MAX_FWHT_QUBITS,
            });
        }
        self.calls.fetch_add(1, Ordering::Relaxed);
        let yb = y.bits();
        let mut walsh: Vec<i64> = oracle
            .table()
            .iter()
            .map(|&v| if (v & yb).count_ones() & 1 == 0 { 1 } else { -1 })
            .collect();
        fwht_inplace(&mut walsh);
        let scale = (oracle.table().len() as f64).recip();
        let alphas = walsh.iter().map(|&w| w as f64 * scale).collect();
        Ok(GpkDistribution {
            n: oracle.n(),
            alphas,
            walsh: Some(walsh),
        })
    }

    pub fn distribution_statevector(
        &self,
        oracle: &BooleanOracle,
        y: &BitVector,
    ) -> Result<StatevectorRun> {
        assert_eq!(y.width(), oracle.m(), "marker width mismatch");
        let (n, m) = (oracle.n(), oracle.m());
        if n + m > MAX_STATEVECTOR_QUBITS {
            return Err(GpkError::ResourceLimit {
                what: "qubit count n+m",
                actual: n + m,
                limit: MAX_STATEVECTOR_QUBITS,
            });
        }
        self.calls.fetch_add(1, Ordering::Relaxed);

        let mut state = Statevector::basis(n + m, y.index());
        for q in 0..n + m {
            state.hadamard(q);
        }
        state.apply_oracle(oracle);
        for q in m..n + m {
            state.hadamard(q);
        }

        // Project onto |γ_y⟩ = H|y⟩ in the second register.
        let second = 1usize << m;
        let inv_sqrt = (second as f64).sqrt().recip();
        let gamma: Vec<f64> = (0..second)
            .map(|w| sign((w as u32) & y.bits()) * inv_sqrt)
            .collect();
        let mut alphas: Vec<Complex64> = state
            .amps
            .chunks_exact(second)
            .map(|block| block.iter().zip(&gamma).map(|(a, g)| a * g).sum())
            .collect();

        let separability_residual = state
            .amps
            .chunks_exact(second)
            .zip(&alphas)
            .flat_map(|(block, alpha)| {
                block
                    .iter()
                    .zip(&gamma)
                    .map(move |(a, g)| (a - alpha * g).norm_sqr())
            })
            .sum::<f64>()
            .sqrt();

        // Remove the global phase: the largest-magnitude amplitude becomes
        // real and positive.
        let top = alphas
            .iter()
            .copied()
            .fold(Complex64::new(0.0, 0.0), |best, a| {
                if a.norm_sqr() > best.norm_sqr() {
                    a
                } else {
                    best
                }
            });
        let phase = top / top.norm();
        for a in alphas.iter_mut() {
            *a *= phase.conj();
        }
        let max_imaginary = alphas.iter().map(|a| a.im.abs()).fold(0.0, f64::max);
        assert!(
            max_imaginary < UNITARITY_TOLERANCE,
            "statevector amplitudes not real after phase fix: {max_imaginary:e}"
        );

        Ok(StatevectorRun {
            distribution: GpkDistribution {
                n,
                alphas: alphas.iter().map(|a| a.re).collect(),
                walsh: None,
            },
            separability_residual,
            max_imaginary,
            joint_norm_sq: state.norm_sq(),
        })
    }
}

#[inline]
fn sign(parity_bits: u32) -> f64 {
    if parity_bits.count_ones() & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Dense state of `n+m` qubits; basis index `x·2ᵐ + w` for `|x⟩ₙ|w⟩ₘ`.
#[derive(Debug, Clone)]
struct Statevector {
    amps: Vec<Complex64>,
}

impl Statevector {
    fn basis(qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Statevector { amps }
    }

    fn hadamard(&mut self, qubit: usize) {
        let stride = 1usize << qubit;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for block in self.amps.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = (x + y) * s;
                *b = (x - y) * s;
            }
        }
    }

    /// `|x, w⟩ ↦ |x, w ⊕ f(x)⟩`; a permutation within each `x` block.
    fn apply_oracle(&mut self, oracle: &BooleanOracle) {
        let second = 1usize << oracle.m();
        let mut scratch = vec![Complex64::new(0.0, 0.0); second];
        for (block, &fx) in self.amps.chunks_exact_mut(second).zip(oracle.table()) {
            for (w, a) in block.iter().enumerate() {
                scratch[w ^ fx as usize] = *a;
            }
            block.copy_from_slice(&scratch);
        }
    }

    fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// `W_f(z, y)` by direct summation over all inputs.
pub fn walsh_coefficient(oracle: &BooleanOracle, z: &BitVector, y: &BitVector) -> i64 {
    assert_eq!(z.width(), oracle.n(), "z width mismatch");
    assert_eq!(y.width(), oracle.m(), "marker width mismatch");
    oracle
        .table()
        .iter()
        .enumerate()
        .map(|(x, &fx)| {
            let parity = ((fx & y.bits()).count_ones() + (x as u32 & z.bits()).count_ones()) & 1;
            if parity == 0 {
                1
            } else {
                -1
            }
        })
        .sum()
}

/// `‖U_f v − (−1)^{y·f(x)} v‖` for `v = |x⟩ ⊗ H|y⟩`.
pub fn eigenvector_residual(oracle: &BooleanOracle, x: &BitVector, y: &BitVector) -> Result<f64> {
    assert_eq!(x.width(), oracle.n(), "x width mismatch");
    assert_eq!(y.width(), oracle.m(), "marker width mismatch");
    let (n, m) = (oracle.n(), oracle.m());
    if n + m > MAX_STATEVECTOR_QUBITS {
        return Err(GpkError::ResourceLimit {
            what: "qubit count n+m",
            actual: n + m,
            limit: MAX_STATEVECTOR_QUBITS,
        });
    }
    let mut v = Statevector::basis(n + m, (x.index() << m) | y.index());
    for q in 0..m {
        v.hadamard(q);
    }
    let mut u = v.clone();
    u.apply_oracle(oracle);
    let eigenvalue = sign(oracle.table()[x.index()] & y.bits());
    Ok(u
        .amps
        .iter()
        .zip(&v.amps)
        .map(|(a, b)| (a - b * eigenvalue).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Samples `z` with probability `α_z²`.
pub fn measure<R: Rng + ?Sized>(dist: &GpkDistribution, rng: &mut R) -> BitVector {
    let weights = WeightedIndex::new(dist.probabilities())
        .expect("a normalized distribution has positive total weight");
    BitVector::new(dist.n(), weights.sample(rng) as u32)
}

/// Largest per-amplitude difference between two distributions, minimized
/// over a global sign flip of the second.
pub fn max_discrepancy(a: &GpkDistribution, b: &GpkDistribution) -> f64 {
    assert_eq!(a.n(), b.n());
    let diff = |s: f64| {
        a.alphas
            .iter()
            .zip(&b.alphas)
            .map(|(x, y)| (x - s * y).abs())
            .fold(0.0, f64::max)
    };
    diff(1.0).min(diff(-1.0))
}
