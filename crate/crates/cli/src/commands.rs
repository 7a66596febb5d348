use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use gpk_core::boolfn::{
    classify_marker, gen_affine, gen_fully_balanced, gen_simon, image_analysis, matrix_rank,
    MarkerCensus, MAX_MARKER_WIDTH,
};
use gpk_core::fbi::{early_stop_bound, reconstruct_image, Algorithm, FbiSolver, TraceEntry};
use gpk_core::gf2::{random_subspace, MAX_WIDTH};
use gpk_core::gpk::{max_discrepancy, measure};
use gpk_core::simon::{
    empirical_vs_theoretical, recover_hidden_subgroup, recover_with_mode, EmpiricalComparison,
    MarkerMode,
};
use gpk_core::walsh::butterfly_count;
use gpk_core::{
    Backend, BitVector, BooleanOracle, GpkDistribution, GpkEngine, GpkError, MarkerClass,
    SubspaceBasis,
};
use rand::Rng;
use serde::Serialize;

use crate::report::{answer_file_string, emit, load_oracle, parse_answer, rng, sha256_hex, Stream};
use crate::{
    BackendChoice, BenchArgs, FbiArgs, Failure, GenArgs, GenKind, GpkArgs, SimonArgs, Suite,
    VerifyArgs,
};

fn parse_vector(text: &str, width: usize, what: &str) -> Result<BitVector, Failure> {
    let v: BitVector = text
        .parse()
        .map_err(|e| Failure::Input(format!("bad {what} {text:?}: {e}")))?;
    if v.width() != width {
        return Err(Failure::Input(format!(
            "{what} {text} has width {}, expected {width}",
            v.width()
        )));
    }
    Ok(v)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents)
        .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

// ---------------------------------------------------------------- gen

fn check_widths(n: usize, m: usize) -> Result<(), Failure> {
    if !(1..=MAX_WIDTH).contains(&n) || !(1..=MAX_MARKER_WIDTH).contains(&m) {
        return Err(Failure::Input(format!(
            "need 1 ≤ n ≤ {MAX_WIDTH} and 1 ≤ m ≤ {MAX_MARKER_WIDTH}, got n={n}, m={m}"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct GenReport {
    kind: &'static str,
    n: usize,
    m: usize,
    r: Option<usize>,
    k: Option<usize>,
    output: String,
    output_sha256: String,
    answer: Option<String>,
    answer_sha256: Option<String>,
}

/// Random `m × n` matrix of the requested rank (uniformly random if `None`).
fn random_matrix<R: Rng>(
    n: usize,
    m: usize,
    rank: Option<usize>,
    rng: &mut R,
) -> Result<Vec<BitVector>, Failure> {
    let Some(rank) = rank else {
        return Ok((0..m).map(|_| BitVector::new(n, rng.gen_range(0..1u32 << n))).collect());
    };
    if rank > n.min(m) {
        return Err(Failure::Input(format!("rank {rank} exceeds min(n, m) = {}", n.min(m))));
    }
    let row_space = random_subspace(n, rank, rng).rows();
    loop {
        let matrix: Vec<BitVector> = (0..m)
            .map(|_| {
                row_space
                    .iter()
                    .filter(|_| rng.gen())
                    .fold(BitVector::zero(n), |acc, &v| acc ^ v)
            })
            .collect();
        if matrix_rank(&matrix) == rank {
            return Ok(matrix);
        }
    }
}

pub fn gen(a: &GenArgs) -> Result<(), Failure> {
    let (n, m) = (a.n, a.m);
    check_widths(n, m)?;
    let mut rng = rng(a.common.seed, Stream::Generation);
    let require = |v: Option<usize>, flag: &str| {
        v.ok_or_else(|| Failure::Input(format!("{flag} is required for this kind")))
    };
    let mut hidden = None;
    let (kind, oracle) = match a.kind {
        GenKind::FullyBalanced => {
            let r = require(a.r, "--r")?;
            ("fully_balanced", gen_fully_balanced(n, m, r, &mut rng)?)
        }
        GenKind::Simon => {
            let k = require(a.k, "--k")?;
            let (oracle, basis) = gen_simon(n, m, k, &mut rng)?;
            hidden = Some(basis);
            ("simon", oracle)
        }
        GenKind::Affine => {
            let matrix = random_matrix(n, m, a.r, &mut rng)?;
            let offset = BitVector::new(m, rng.gen_range(0..1u32 << m));
            ("affine", gen_affine(n, &matrix, offset)?)
        }
        GenKind::Constant => {
            let value = match &a.value {
                Some(text) => parse_vector(text, m, "value")?,
                None => BitVector::new(m, rng.gen_range(0..1u32 << m)),
            };
            ("constant", BooleanOracle::constant(n, value)?)
        }
    };

    let text = oracle.to_file_string();
    write_file(&a.out, &text)?;
    let (answer, answer_sha256) = match &hidden {
        Some(basis) => {
            let mut path = a.out.clone().into_os_string();
            path.push(".answer");
            let path = std::path::PathBuf::from(path);
            let answer = answer_file_string(basis);
            write_file(&path, &answer)?;
            (Some(path.display().to_string()), Some(sha256_hex(answer.as_bytes())))
        }
        None => (None, None),
    };
    let report = GenReport {
        kind,
        n,
        m,
        r: match a.kind {
            GenKind::FullyBalanced | GenKind::Affine => a.r,
            _ => None,
        },
        k: hidden.as_ref().map(SubspaceBasis::dim),
        output: a.out.display().to_string(),
        output_sha256: sha256_hex(text.as_bytes()),
        answer,
        answer_sha256,
    };
    emit("gen", a.common.seed, None, report, a.common.format, None)
}

// ---------------------------------------------------------------- gpk

#[derive(Serialize)]
struct OutcomeRow {
    z: BitVector,
    walsh: Option<i64>,
    alpha: f64,
    probability: f64,
}

#[derive(Serialize)]
struct StatevectorDiagnostics {
    separability_residual: f64,
    max_imaginary: f64,
    joint_norm_sq: f64,
}

#[derive(Serialize)]
struct GpkReport {
    n: usize,
    m: usize,
    marker: BitVector,
    backend: &'static str,
    marker_class: MarkerClass,
    gpk_calls: u64,
    sampled: BitVector,
    total_probability: f64,
    max_discrepancy: Option<f64>,
    statevector: Option<StatevectorDiagnostics>,
    distribution: Vec<OutcomeRow>,
}

pub fn gpk(a: &GpkArgs) -> Result<(), Failure> {
    let (oracle, digest) = load_oracle(&a.oracle)?;
    let marker = parse_vector(&a.marker, oracle.m(), "marker")?;
    let engine = GpkEngine::default();

    let mut diagnostics = None;
    let mut statevector = |engine: &GpkEngine| -> Result<GpkDistribution, Failure> {
        let run = engine.distribution_statevector(&oracle, &marker)?;
        diagnostics = Some(StatevectorDiagnostics {
            separability_residual: run.separability_residual,
            max_imaginary: run.max_imaginary,
            joint_norm_sq: run.joint_norm_sq,
        });
        Ok(run.distribution)
    };
    let (backend, dist, discrepancy) = match a.backend {
        BackendChoice::Fwht => ("fwht", engine.distribution_fwht(&oracle, &marker)?, None),
        BackendChoice::Statevector => ("statevector", statevector(&engine)?, None),
        BackendChoice::Both => {
            let fwht = engine.distribution_fwht(&oracle, &marker)?;
            let sv = statevector(&engine)?;
            let d = max_discrepancy(&fwht, &sv);
            ("both", fwht, Some(d))
        }
    };

    let sampled = measure(&dist, &mut rng(a.common.seed, Stream::Measurement));
    let walsh = dist.walsh();
    let distribution = BitVector::all(oracle.n())
        .map(|z| {
            let alpha = dist.alpha(&z);
            OutcomeRow {
                z,
                walsh: walsh.map(|w| w[z.index()]),
                alpha,
                probability: alpha * alpha,
            }
        })
        .collect();
    let report = GpkReport {
        n: oracle.n(),
        m: oracle.m(),
        marker,
        backend,
        marker_class: classify_marker(&oracle, &marker),
        gpk_calls: engine.calls(),
        sampled,
        total_probability: dist.total_probability(),
        max_discrepancy: discrepancy,
        statevector: diagnostics,
        distribution,
    };
    emit("gpk", a.common.seed, Some(&digest), report, a.common.format, a.out.as_deref())
}

// ---------------------------------------------------------------- fbi

#[derive(Serialize)]
struct ImageReport {
    offset: BitVector,
    direction: Vec<BitVector>,
    points: Vec<BitVector>,
    /// Classical evaluations of `f` used for the reconstruction.
    classical_queries: u64,
}

#[derive(Serialize)]
struct FbiReport {
    algorithm: u8,
    r0: Option<usize>,
    n: usize,
    m: usize,
    r: usize,
    gpk_calls: u64,
    call_bound: u64,
    within_bound: bool,
    complete: bool,
    constants: Vec<BitVector>,
    constant_span: Vec<BitVector>,
    balancing: Vec<BitVector>,
    trace: Vec<TraceEntry>,
    image: Option<ImageReport>,
}

pub fn fbi(a: &FbiArgs) -> Result<(), Failure> {
    let (oracle, digest) = load_oracle(&a.oracle)?;
    let algorithm = Algorithm::from_number(a.algorithm)
        .ok_or_else(|| Failure::Input(format!("unknown algorithm {}", a.algorithm)))?;
    let engine = GpkEngine::new(a.backend.into());
    let mut solver = FbiSolver::new(&engine, rng(a.common.seed, Stream::Measurement));
    let (result, bound) = match (algorithm, a.r0) {
        (Algorithm::One, Some(r0)) => {
            let result = solver.algorithm1_early_stop(&oracle, r0)?;
            (result, early_stop_bound(oracle.m(), r0))
        }
        (_, Some(_)) => return Err(Failure::Input("--r0 applies to algorithm 1 only".into())),
        (alg, None) => {
            let result = solver.run(alg, &oracle)?;
            let bound = result.call_bound();
            (result, bound)
        }
    };
    let ledger = &result.ledger;
    let image = if result.is_complete() {
        let before = oracle.query_count();
        let rec = reconstruct_image(&oracle, ledger)?;
        Some(ImageReport {
            offset: rec.offset,
            direction: rec.direction.rows(),
            points: rec.points,
            classical_queries: oracle.query_count() - before,
        })
    } else {
        None
    };
    let within_bound = ledger.gpk_calls() <= bound;
    let report = FbiReport {
        algorithm: algorithm.number(),
        r0: a.r0,
        n: oracle.n(),
        m: oracle.m(),
        r: result.r,
        gpk_calls: ledger.gpk_calls(),
        call_bound: bound,
        within_bound,
        complete: result.is_complete(),
        constants: ledger.constants().to_vec(),
        constant_span: ledger.constant_span().rows(),
        balancing: ledger.balancing().to_vec(),
        trace: ledger.trace().to_vec(),
        image,
    };
    emit("fbi", a.common.seed, Some(&digest), report, a.common.format, a.out.as_deref())?;
    if !within_bound {
        return Err(Failure::Verification(format!(
            "{} GPK calls exceed the bound {bound}",
            ledger.gpk_calls()
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------- simon

#[derive(Serialize)]
struct SimonReport {
    n: usize,
    m: usize,
    stall_limit: usize,
    iterations: usize,
    samples: Vec<BitVector>,
    collected: Vec<BitVector>,
    recovered: Vec<BitVector>,
    recovered_dim: usize,
    verified: bool,
    answer_match: Option<bool>,
    distribution: Option<EmpiricalComparison>,
}

pub fn simon(a: &SimonArgs) -> Result<(), Failure> {
    let (oracle, digest) = load_oracle(&a.oracle)?;
    let answer = match &a.answer {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
            let basis = parse_answer(&text)?;
            if basis.width() != oracle.n() {
                return Err(Failure::Input(format!(
                    "answer basis has width {}, oracle has n = {}",
                    basis.width(),
                    oracle.n()
                )));
            }
            Some(basis)
        }
        None => None,
    };
    let engine = GpkEngine::new(a.backend.into());
    let mut markers = rng(a.common.seed, Stream::Markers);
    let mut measurements = rng(a.common.seed, Stream::Measurement);
    let run = recover_hidden_subgroup(&engine, &oracle, &mut markers, &mut measurements, a.stall_limit)?;

    let answer_match = answer.as_ref().map(|b| *b == run.recovered);
    let reference = if run.verified { Some(&run.recovered) } else { answer.as_ref() };
    let distribution = match reference {
        Some(hidden) if a.draws > 0 => Some(empirical_vs_theoretical(
            &engine,
            &oracle,
            hidden,
            &MarkerMode::UniformNonzero,
            a.draws,
            &mut markers,
            &mut measurements,
        )?),
        _ => None,
    };
    let report = SimonReport {
        n: oracle.n(),
        m: oracle.m(),
        stall_limit: a.stall_limit,
        iterations: run.iterations,
        samples: run.samples.clone(),
        collected: run.collected.rows(),
        recovered: run.recovered.rows(),
        recovered_dim: run.recovered.dim(),
        verified: run.verified,
        answer_match,
        distribution,
    };
    emit("simon", a.common.seed, Some(&digest), report, a.common.format, a.out.as_deref())?;
    if !run.verified {
        return Err(Failure::Verification(
            "recovered subgroup does not describe the oracle's periods".into(),
        ));
    }
    if answer_match == Some(false) {
        return Err(Failure::Verification("recovered subgroup differs from the answer file".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------- verify

#[derive(Serialize)]
struct ParameterCheck {
    expected_constant_count: u64,
    expected_balancing_count: u64,
    expected_balancing_index: u64,
    holds: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    n: usize,
    m: usize,
    fully_balanced: bool,
    image_size: usize,
    affine: bool,
    uniform: bool,
    /// Dimension of the image when it is an affine subspace.
    image_dim: Option<usize>,
    constant_count: u64,
    constant_span: Vec<BitVector>,
    balancing_count: usize,
    balancing_index: String,
    neither_count: usize,
    neither_witness: Option<BitVector>,
    parameters: Option<ParameterCheck>,
}

pub fn verify(a: &VerifyArgs) -> Result<(), Failure> {
    let (oracle, digest) = load_oracle(&a.oracle)?;
    let census = MarkerCensus::of(&oracle)?;
    let image = image_analysis(&oracle);
    let fully_balanced = census.is_fully_balanced();
    let image_dim = image.is_affine.then(|| image.dim());
    let parameters = image_dim.filter(|_| fully_balanced).map(|r| {
        let m = oracle.m();
        let expected_constant_count = 1u64 << (m - r);
        let expected_balancing_count = ((1u64 << r) - 1) << (m - r);
        let expected_balancing_index = (1u64 << r) - 1;
        ParameterCheck {
            holds: census.constant_count == expected_constant_count
                && census.balancing.len() as u64 == expected_balancing_count
                && census.balancing_index() == expected_balancing_index.into(),
            expected_constant_count,
            expected_balancing_count,
            expected_balancing_index,
        }
    });
    let report = VerifyReport {
        n: oracle.n(),
        m: oracle.m(),
        fully_balanced,
        image_size: image.points.len(),
        affine: image.is_affine,
        uniform: image.uniform,
        image_dim,
        constant_count: census.constant_count,
        constant_span: census.constant_set.rows(),
        balancing_count: census.balancing.len(),
        balancing_index: census.balancing_index().to_string(),
        neither_count: census.neither.len(),
        neither_witness: census.neither.first().copied(),
        parameters,
    };
    emit("verify", a.common.seed, Some(&digest), report, a.common.format, a.out.as_deref())
}

// ---------------------------------------------------------------- bench

#[derive(Serialize)]
struct ScalingRow {
    qubits: usize,
    n: usize,
    m: usize,
    /// Butterflies in one length-2ⁿ transform.
    fwht_ops: u64,
    /// Hadamard butterflies over `2n + m` qubits plus the `2ⁿ⁺ᵐ` oracle permutation.
    statevector_ops: u64,
    max_discrepancy: f64,
    fwht_seconds: Option<f64>,
    statevector_seconds: Option<f64>,
}

#[derive(Serialize)]
struct FbiCallsRow {
    algorithm: &'static str,
    m: usize,
    r: usize,
    r0: Option<usize>,
    runs: usize,
    max_calls: u64,
    mean_calls: f64,
    bound: u64,
    within_bound: bool,
    correct: usize,
}

#[derive(Serialize)]
struct SimonItersRow {
    mode: &'static str,
    k: usize,
    runs: usize,
    verified: usize,
    mean_iterations: f64,
    histogram: BTreeMap<usize, usize>,
}

#[derive(Serialize)]
#[serde(tag = "suite", rename_all = "snake_case")]
enum BenchReport {
    FwhtScaling {
        rows: Vec<ScalingRow>,
    },
    FbiCalls {
        runs: usize,
        all_within_bound: bool,
        all_correct: bool,
        rows: Vec<FbiCallsRow>,
    },
    SimonIters {
        n: usize,
        m: usize,
        stall_limit: usize,
        rows: Vec<SimonItersRow>,
    },
}

pub fn bench(a: &BenchArgs) -> Result<(), Failure> {
    let report = match a.suite {
        Suite::FwhtScaling => bench_scaling(a)?,
        Suite::FbiCalls => bench_fbi_calls(a)?,
        Suite::SimonIters => bench_simon_iters(a)?,
    };
    let failed = matches!(
        report,
        BenchReport::FbiCalls { all_within_bound: false, .. } | BenchReport::FbiCalls { all_correct: false, .. }
    );
    emit("bench", a.common.seed, None, report, a.common.format, a.out.as_deref())?;
    if failed {
        return Err(Failure::Verification("an FBI run broke its call bound or answer".into()));
    }
    Ok(())
}

fn random_oracle<R: Rng>(n: usize, m: usize, rng: &mut R) -> Result<BooleanOracle, GpkError> {
    BooleanOracle::from_fn(n, m, |_| BitVector::new(m, rng.gen_range(0..1u32 << m)))
}

fn bench_scaling(a: &BenchArgs) -> Result<BenchReport, Failure> {
    if a.max_qubits > gpk_core::gpk::MAX_STATEVECTOR_QUBITS {
        return Err(GpkError::ResourceLimit {
            what: "benchmark qubit count",
            actual: a.max_qubits,
            limit: gpk_core::gpk::MAX_STATEVECTOR_QUBITS,
        }
        .into());
    }
    let mut gen_rng = rng(a.common.seed, Stream::Generation);
    let mut marker_rng = rng(a.common.seed, Stream::Markers);
    let engine = GpkEngine::default();
    let mut rows = Vec::new();
    for qubits in 2..=a.max_qubits {
        let n = qubits.div_ceil(2);
        let m = qubits - n;
        let oracle = random_oracle(n, m, &mut gen_rng)?;
        let marker = BitVector::new(m, marker_rng.gen_range(1..1u32 << m));

        let start = Instant::now();
        let fwht = engine.distribution_fwht(&oracle, &marker)?;
        let fwht_time = start.elapsed().as_secs_f64();
        let start = Instant::now();
        let sv = engine.distribution_statevector(&oracle, &marker)?.distribution;
        let sv_time = start.elapsed().as_secs_f64();

        let amplitudes = 1u64 << qubits;
        rows.push(ScalingRow {
            qubits,
            n,
            m,
            fwht_ops: butterfly_count(n as u32),
            statevector_ops: (2 * n + m) as u64 * (amplitudes / 2) + amplitudes,
            max_discrepancy: max_discrepancy(&fwht, &sv),
            fwht_seconds: a.wall_time.then_some(fwht_time),
            statevector_seconds: a.wall_time.then_some(sv_time),
        });
    }
    Ok(BenchReport::FwhtScaling { rows })
}

#[derive(Default)]
struct CallStats {
    runs: usize,
    max_calls: u64,
    total_calls: u64,
    bound: u64,
    correct: usize,
}

fn bench_fbi_calls(a: &BenchArgs) -> Result<BenchReport, Failure> {
    if a.max_m == 0 || a.max_m > 10 {
        return Err(Failure::Input("--max-m must lie in 1..=10".into()));
    }
    let mut gen_rng = rng(a.common.seed, Stream::Generation);
    let mut measure_rng = rng(a.common.seed, Stream::Measurement);
    let engine = GpkEngine::default();
    let mut stats: BTreeMap<(&'static str, usize, usize, Option<usize>), CallStats> = BTreeMap::new();

    for m in 1..=a.max_m {
        for r in 0..=m {
            for _ in 0..a.instances {
                let oracle = gen_fully_balanced(m, m, r, &mut gen_rng)?;
                let truth = image_analysis(&oracle).dim();
                let mut runs: Vec<(&'static str, Option<usize>)> = vec![("3", None)];
                if r <= 1 {
                    runs.push(("1", None));
                }
                if (1..=2).contains(&r) {
                    runs.push(("2", None));
                }
                if r == 0 {
                    runs.extend((1..=m).map(|r0| ("1_early_stop", Some(r0))));
                } else {
                    runs.push(("1_early_stop", Some(r)));
                }
                for (label, r0) in runs {
                    let mut solver = FbiSolver::new(&engine, &mut measure_rng);
                    let (result, bound) = match (label, r0) {
                        ("1_early_stop", Some(r0)) => {
                            (solver.algorithm1_early_stop(&oracle, r0)?, early_stop_bound(m, r0))
                        }
                        _ => {
                            let alg = match label {
                                "1" => Algorithm::One,
                                "2" => Algorithm::Two,
                                _ => Algorithm::Three,
                            };
                            let result = solver.run(alg, &oracle)?;
                            let bound = alg.call_bound(m, truth);
                            (result, bound)
                        }
                    };
                    let s = stats.entry((label, m, r, r0)).or_default();
                    let calls = result.ledger.gpk_calls();
                    s.runs += 1;
                    s.max_calls = s.max_calls.max(calls);
                    s.total_calls += calls;
                    s.bound = bound;
                    s.correct += usize::from(result.r == truth);
                }
            }
        }
    }

    let rows: Vec<FbiCallsRow> = stats
        .into_iter()
        .map(|((algorithm, m, r, r0), s)| FbiCallsRow {
            algorithm,
            m,
            r,
            r0,
            runs: s.runs,
            max_calls: s.max_calls,
            mean_calls: s.total_calls as f64 / s.runs as f64,
            bound: s.bound,
            within_bound: s.max_calls <= s.bound,
            correct: s.correct,
        })
        .collect();
    Ok(BenchReport::FbiCalls {
        runs: rows.iter().map(|r| r.runs).sum(),
        all_within_bound: rows.iter().all(|r| r.within_bound),
        all_correct: rows.iter().all(|r| r.correct == r.runs),
        rows,
    })
}

fn bench_simon_iters(a: &BenchArgs) -> Result<BenchReport, Failure> {
    let (n, m) = (a.n, a.m);
    check_widths(n, m)?;
    let mut gen_rng = rng(a.common.seed, Stream::Generation);
    let mut marker_rng = rng(a.common.seed, Stream::Markers);
    let mut measure_rng = rng(a.common.seed, Stream::Measurement);
    let engine = GpkEngine::new(Backend::Fwht);
    let modes = ["uniform_nonzero", "uniform", "fixed"];
    let mut rows = Vec::new();

    let max_k = n.min(3);
    for k in (0..=max_k).filter(|&k| n - k <= m) {
        let mut histograms = vec![BTreeMap::<usize, usize>::new(); modes.len()];
        let mut verified = vec![0usize; modes.len()];
        for _ in 0..a.runs {
            let (oracle, _) = gen_simon(n, m, k, &mut gen_rng)?;
            for (i, label) in modes.iter().enumerate() {
                let run = match *label {
                    "uniform_nonzero" => recover_hidden_subgroup(
                        &engine,
                        &oracle,
                        &mut marker_rng,
                        &mut measure_rng,
                        a.stall_limit,
                    )?,
                    other => {
                        let mode = if other == "uniform" {
                            MarkerMode::Uniform
                        } else {
                            MarkerMode::Fixed(BitVector::new(m, marker_rng.gen_range(1..1u32 << m)))
                        };
                        recover_with_mode(
                            &engine,
                            &oracle,
                            &mode,
                            &mut marker_rng,
                            &mut measure_rng,
                            a.stall_limit,
                        )?
                    }
                };
                *histograms[i].entry(run.iterations).or_default() += 1;
                verified[i] += usize::from(run.verified);
            }
        }
        for (i, label) in modes.iter().enumerate() {
            let total: usize = histograms[i].iter().map(|(it, c)| it * c).sum();
            rows.push(SimonItersRow {
                mode: label,
                k,
                runs: a.runs,
                verified: verified[i],
                mean_iterations: if a.runs == 0 { 0.0 } else { total as f64 / a.runs as f64 },
                histogram: std::mem::take(&mut histograms[i]),
            });
        }
    }
    Ok(BenchReport::SimonIters {
        n,
        m,
        stall_limit: a.stall_limit,
        rows,
    })
}
