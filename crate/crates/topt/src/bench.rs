//! Benchmark harness: seeded random instances, channel-equivalence
//! verification, batch runs with CSV/JSON reporting, and scaling fits.

use crate::circuit::{Circuit, Gate};
use crate::optimizers::{run_pipeline, OptimizerChoice, OptimizerKind};
use crate::phase::SignatureTensor3;
use crate::resynth::{compile, HadamardMode, SynthError};
use crate::sim::{random_state, simulate_branches, Statevector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

/// Verification is capped below the raw simulator limit; gadgetized outputs
/// carry ancillas on top of the data register.
pub const MAX_VERIFY_QUBITS: usize = 12;

const VERIFY_TOLERANCE: f64 = 1e-10;
const VERIFY_STATES: usize = 3;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("circuit width {0} exceeds the {1}-qubit verification cap")]
    TooLarge(usize, usize),
    #[error("need at least 3 distinct n values to fit a slope, got {0}")]
    InsufficientData(usize),
    #[error("original circuit contains measurements")]
    NonUnitaryOriginal,
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("simulation failed: {0}")]
    Sim(String),
}

/// Uniform random signature tensor: every independent entry i.i.d.
/// Bernoulli(1/2), deterministic per (n, seed).
pub fn random_signature(n: usize, seed: u64) -> SignatureTensor3 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((n as u64) << 32));
    let mut s = SignatureTensor3::new(n);
    for a in 0..n {
        s.set_diag(a, rng.gen_bool(0.5));
    }
    for a in 0..n {
        for b in a + 1..n {
            s.set_pair(a, b, rng.gen_bool(0.5));
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                s.set_triple(a, b, c, rng.gen_bool(0.5));
            }
        }
    }
    s
}

/// Random Clifford+T circuit with exactly `h_internal` internal Hadamards.
/// Non-H gates are sampled uniformly from {S, T, CNOT}; each H is inserted
/// between chunks and guarded by a T on its qubit on both sides so it cannot
/// commute to either end. Deterministic per seed.
pub fn random_clifford_t_circuit(n: usize, depth: usize, h_internal: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(n);
    let chunks = h_internal + 1;
    let per_chunk = depth / chunks.max(1);
    let sample_gate = |rng: &mut ChaCha8Rng, c: &mut Circuit| {
        let q = rng.gen_range(0..n);
        match rng.gen_range(0..3) {
            0 => c.push(Gate::S(q)),
            1 => c.push(Gate::T(q)),
            _ => {
                if n >= 2 {
                    let mut t = rng.gen_range(0..n);
                    while t == q {
                        t = rng.gen_range(0..n);
                    }
                    c.push(Gate::Cnot { control: q, target: t });
                } else {
                    c.push(Gate::T(q));
                }
            }
        }
    };
    for chunk in 0..chunks {
        for _ in 0..per_chunk {
            sample_gate(&mut rng, &mut c);
        }
        if chunk + 1 < chunks {
            let q = rng.gen_range(0..n);
            c.push(Gate::T(q));
            c.push(Gate::H(q));
            c.push(Gate::T(q));
        }
    }
    c
}

/// Checks that `compiled` implements the unitary of `original` on the data
/// register for every measurement branch and a set of random input states.
/// Ancillas start in |+> and are expected back in |+> on every branch (the
/// compiler resets consumed gadget wires). Returns the pass flag and the
/// worst branch infidelity observed.
pub fn verify_equivalence(original: &Circuit, compiled: &Circuit) -> Result<(bool, f64), BenchError> {
    let n = original.width();
    if compiled.width() > MAX_VERIFY_QUBITS {
        return Err(BenchError::TooLarge(compiled.width(), MAX_VERIFY_QUBITS));
    }
    if original
        .gates
        .iter()
        .any(|g| matches!(g, Gate::MeasureX { .. } | Gate::Classical { .. }))
    {
        return Err(BenchError::NonUnitaryOriginal);
    }
    assert_eq!(compiled.n, n, "compiled data register width mismatch");
    let mut worst = 0.0f64;
    for k in 0..VERIFY_STATES {
        let psi = random_state(n, 0xBEEF ^ k as u64);
        let mut expect = psi.clone();
        for g in &original.gates {
            expect.apply_gate(g);
        }
        let expect_full = Statevector::with_plus_ancillas(&expect, compiled.h);
        let input = Statevector::with_plus_ancillas(&psi, compiled.h);
        let branches =
            simulate_branches(compiled, &input).map_err(|e| BenchError::Sim(e.to_string()))?;
        let mut total_p = 0.0;
        for b in &branches {
            total_p += b.probability;
            let infidelity = 1.0 - b.state.fidelity(&expect_full);
            worst = worst.max(infidelity);
        }
        if (total_p - 1.0).abs() > 1e-10 {
            return Ok((false, 1.0));
        }
    }
    Ok((worst <= VERIFY_TOLERANCE, worst))
}

/// One benchmark result row.
#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkRecord {
    pub name: String,
    pub n: usize,
    pub h: usize,
    pub np: usize,
    pub optimizer: String,
    pub t_before: usize,
    pub t_after: usize,
    pub saving_pct: f64,
    pub seconds: f64,
    pub seed: u64,
}

impl BenchmarkRecord {
    pub fn csv_header() -> &'static str {
        "name,n,h,Np,optimizer,T_before,T_after,saving_pct,seconds,seed"
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{:.4},{:.6},{}",
            self.name,
            self.n,
            self.h,
            self.np,
            self.optimizer,
            self.t_before,
            self.t_after,
            self.saving_pct,
            self.seconds,
            self.seed
        )
    }
}

fn saving(t_ref: usize, t_after: usize) -> f64 {
    if t_ref == 0 {
        0.0
    } else {
        100.0 * (t_ref as f64 - t_after as f64) / t_ref as f64
    }
}

/// Optimizes one random signature tensor; the RE baseline column count
/// serves as the pre-optimization reference.
pub fn run_random_instance(
    n: usize,
    optimizer: OptimizerKind,
    seed: u64,
) -> Result<BenchmarkRecord, BenchError> {
    let s = random_signature(n, seed);
    let baseline = run_pipeline(&s, &OptimizerChoice::with_seed(OptimizerKind::Re, seed))
        .map_err(SynthError::Optimizer)?
        .proper()
        .cols();
    let start = std::time::Instant::now();
    let a = run_pipeline(&s, &OptimizerChoice::with_seed(optimizer, seed))
        .map_err(SynthError::Optimizer)?;
    let seconds = start.elapsed().as_secs_f64();
    let t_after = a.proper().cols();
    debug_assert_eq!(a.signature(), s);
    Ok(BenchmarkRecord {
        name: format!("random-n{n}"),
        n,
        h: 0,
        np: 1,
        optimizer: optimizer.name().to_string(),
        t_before: baseline,
        t_after,
        saving_pct: saving(baseline, t_after),
        seconds,
        seed,
    })
}

/// Compiles a fixture circuit end to end.
pub fn run_circuit_instance(
    name: &str,
    c: &Circuit,
    optimizer: OptimizerKind,
    mode: HadamardMode,
    h_cap: Option<usize>,
    seed: u64,
    verify: bool,
) -> Result<BenchmarkRecord, BenchError> {
    let start = std::time::Instant::now();
    let (out, report) = compile(c, &OptimizerChoice::with_seed(optimizer, seed), mode, h_cap)?;
    let seconds = start.elapsed().as_secs_f64();
    if verify {
        if out.width() > MAX_VERIFY_QUBITS {
            return Err(BenchError::TooLarge(out.width(), MAX_VERIFY_QUBITS));
        }
        let (ok, worst) = verify_equivalence(c, &out)?;
        if !ok {
            return Err(BenchError::Sim(format!(
                "branch infidelity {worst:.3e} for {name}"
            )));
        }
    }
    Ok(BenchmarkRecord {
        name: name.to_string(),
        n: report.n,
        h: report.h,
        np: report.n_p,
        optimizer: optimizer.name().to_string(),
        t_before: report.t_before,
        t_after: report.t_after,
        saving_pct: saving(report.t_before, report.t_after),
        seconds,
        seed,
    })
}

/// Per-(optimizer, n) aggregate of the random benchmark.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingPoint {
    pub optimizer: String,
    pub n: usize,
    pub mean_t: f64,
    pub stderr_t: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub points: Vec<ScalingPoint>,
}

impl ScalingReport {
    pub fn from_records(records: &[BenchmarkRecord]) -> ScalingReport {
        let mut groups: Vec<(String, usize, Vec<f64>)> = Vec::new();
        for r in records {
            match groups
                .iter_mut()
                .find(|(opt, n, _)| *opt == r.optimizer && *n == r.n)
            {
                Some((_, _, vals)) => vals.push(r.t_after as f64),
                None => groups.push((r.optimizer.clone(), r.n, vec![r.t_after as f64])),
            }
        }
        let points = groups
            .into_iter()
            .map(|(optimizer, n, vals)| {
                let k = vals.len() as f64;
                let mean = vals.iter().sum::<f64>() / k;
                let stderr = if vals.len() > 1 {
                    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                        / (k - 1.0);
                    (var / k).sqrt()
                } else {
                    0.0
                };
                ScalingPoint { optimizer, n, mean_t: mean, stderr_t: stderr, trials: vals.len() }
            })
            .collect();
        ScalingReport { points }
    }

    /// Least-squares slope of log(mean T) against log(n) for one optimizer.
    pub fn fit_scaling(&self, optimizer: &str) -> Result<(f64, f64), BenchError> {
        let pts: Vec<(f64, f64)> = self
            .points
            .iter()
            .filter(|p| p.optimizer == optimizer && p.mean_t > 0.0)
            .map(|p| ((p.n as f64).ln(), p.mean_t.ln()))
            .collect();
        if pts.len() < 3 {
            return Err(BenchError::InsufficientData(pts.len()));
        }
        let k = pts.len() as f64;
        let mx = pts.iter().map(|(x, _)| x).sum::<f64>() / k;
        let my = pts.iter().map(|(_, y)| y).sum::<f64>() / k;
        let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
        let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let ss_res: f64 = pts
            .iter()
            .map(|(x, y)| {
                let r = y - (slope * x + intercept);
                r * r
            })
            .sum();
        let stderr = if pts.len() > 2 {
            (ss_res / (k - 2.0) / sxx).sqrt()
        } else {
            0.0
        };
        Ok((slope, stderr))
    }
}

/// Runs the random benchmark over a grid of n values.
pub fn run_random_benchmark(
    ns: &[usize],
    trials: usize,
    optimizers: &[OptimizerKind],
    seed: u64,
) -> Result<Vec<BenchmarkRecord>, BenchError> {
    let mut records = Vec::new();
    for &n in ns {
        for t in 0..trials {
            let inst_seed = seed
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add((n as u64) << 20)
                .wrapping_add(t as u64);
            for &opt in optimizers {
                records.push(run_random_instance(n, opt, inst_seed)?);
            }
        }
    }
    Ok(records)
}

pub fn records_to_csv(records: &[BenchmarkRecord]) -> String {
    let mut out = String::from(BenchmarkRecord::csv_header());
    out.push('\n');
    for r in records {
        out.push_str(&r.to_csv_row());
        out.push('\n');
    }
    out
}
