//! Small-scale statevector simulator with measurement branching.
//!
//! Used as the verification oracle for the compiler: it enumerates every
//! Pauli-X measurement outcome deterministically (outcome 0 first) and applies
//! classically controlled blocks per branch. Capped at 14 qubits.

use crate::circuit::{Circuit, Gate};
use num_complex::Complex64;
use thiserror::Error;

/// Largest width the oracle will simulate.
pub const MAX_SIM_QUBITS: usize = 14;

/// Branches with probability below this are dropped from the enumeration.
const BRANCH_EPS: f64 = 1e-14;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("circuit width {width} exceeds the {max}-qubit simulator cap")]
    TooLarge { width: usize, max: usize },
    #[error("state dimension {0} does not match circuit width {1}")]
    DimensionMismatch(usize, usize),
}

/// Dense state over `n_qubits`; qubit `i` is bit `i` of the amplitude index.
#[derive(Debug, Clone)]
pub struct Statevector {
    pub n_qubits: usize,
    pub amps: Vec<Complex64>,
}

impl Statevector {
    pub fn zero_state(n_qubits: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Statevector { n_qubits, amps }
    }

    /// |psi> on the first `n` qubits tensored with |+>^h on the rest.
    pub fn with_plus_ancillas(psi: &Statevector, h: usize) -> Self {
        let n = psi.n_qubits;
        let total = n + h;
        let scale = (1.0 / (1u64 << h) as f64).sqrt();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << total];
        for idx in 0..amps.len() {
            let low = idx & ((1 << n) - 1);
            amps[idx] = psi.amps[low] * scale;
        }
        Statevector { n_qubits: total, amps }
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// |<self|other>|^2, insensitive to global phase.
    pub fn fidelity(&self, other: &Statevector) -> f64 {
        assert_eq!(self.n_qubits, other.n_qubits);
        let ip: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        ip.norm_sqr()
    }

    fn apply_1q(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1usize << q;
        for idx in 0..self.amps.len() {
            if idx & bit == 0 {
                let a0 = self.amps[idx];
                let a1 = self.amps[idx | bit];
                self.amps[idx] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[idx | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn phase_if(&mut self, phase: Complex64, pred: impl Fn(usize) -> bool) {
        for idx in 0..self.amps.len() {
            if pred(idx) {
                self.amps[idx] *= phase;
            }
        }
    }

    pub fn apply_gate(&mut self, g: &Gate) {
        let omega = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match g {
            Gate::H(q) => {
                let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                self.apply_1q(*q, [[s, s], [s, -s]]);
            }
            Gate::X(q) => self.apply_1q(*q, [[zero, one], [one, zero]]),
            Gate::Y(q) => self.apply_1q(*q, [[zero, -i], [i, zero]]),
            Gate::Z(q) => {
                let bit = 1usize << q;
                self.phase_if(-one, |idx| idx & bit != 0);
            }
            Gate::S(q) => {
                let bit = 1usize << q;
                self.phase_if(i, |idx| idx & bit != 0);
            }
            Gate::Sdg(q) => {
                let bit = 1usize << q;
                self.phase_if(-i, |idx| idx & bit != 0);
            }
            Gate::T(q) => {
                let bit = 1usize << q;
                self.phase_if(omega, |idx| idx & bit != 0);
            }
            Gate::Tdg(q) => {
                let bit = 1usize << q;
                self.phase_if(omega.conj(), |idx| idx & bit != 0);
            }
            Gate::Cz(a, b) => {
                let (ba, bb) = (1usize << a, 1usize << b);
                self.phase_if(-one, |idx| idx & ba != 0 && idx & bb != 0);
            }
            Gate::Cs(a, b) => {
                let (ba, bb) = (1usize << a, 1usize << b);
                self.phase_if(i, |idx| idx & ba != 0 && idx & bb != 0);
            }
            Gate::Ccz(a, b, c) => {
                let (ba, bb, bc) = (1usize << a, 1usize << b, 1usize << c);
                self.phase_if(-one, |idx| idx & ba != 0 && idx & bb != 0 && idx & bc != 0);
            }
            Gate::Cnot { control, target } => {
                let (bc, bt) = (1usize << control, 1usize << target);
                for idx in 0..self.amps.len() {
                    if idx & bc != 0 && idx & bt == 0 {
                        self.amps.swap(idx, idx | bt);
                    }
                }
            }
            Gate::MeasureX { .. } | Gate::Classical { .. } => {
                panic!("measurement handled by simulate_branches, not apply_gate")
            }
        }
    }
}

/// One measurement branch: the outcome assignment (indexed by outcome id),
/// the normalized post-branch state and the branch probability.
#[derive(Debug, Clone)]
pub struct Branch {
    pub outcomes: Vec<(usize, bool)>,
    pub state: Statevector,
    pub probability: f64,
}

fn run_gates(
    gates: &[Gate],
    state: Statevector,
    prob: f64,
    outcomes: &mut Vec<(usize, bool)>,
    out: &mut Vec<Branch>,
) {
    let mut state = state;
    for (pos, g) in gates.iter().enumerate() {
        match g {
            Gate::MeasureX { qubit, outcome } => {
                // project onto |+> (outcome 0) and |-> (outcome 1) of `qubit`
                let rest = &gates[pos + 1..];
                for m in [false, true] {
                    let mut proj = state.clone();
                    let bit = 1usize << qubit;
                    // P_± = (I ± X_q)/2
                    for idx in 0..proj.amps.len() {
                        if idx & bit == 0 {
                            let a0 = proj.amps[idx];
                            let a1 = proj.amps[idx | bit];
                            let v = if m { (a0 - a1) * 0.5 } else { (a0 + a1) * 0.5 };
                            proj.amps[idx] = v;
                            proj.amps[idx | bit] = if m { -v } else { v };
                        }
                    }
                    let p = proj.norm().powi(2);
                    if p < BRANCH_EPS {
                        continue;
                    }
                    let scale = 1.0 / p.sqrt();
                    for a in proj.amps.iter_mut() {
                        *a *= scale;
                    }
                    outcomes.push((*outcome, m));
                    run_gates(rest, proj, prob * p, outcomes, out);
                    outcomes.pop();
                }
                return;
            }
            Gate::Classical { outcome, body } => {
                let fire = outcomes
                    .iter()
                    .rev()
                    .find(|(id, _)| id == outcome)
                    .map(|(_, v)| *v)
                    .unwrap_or(false);
                if fire {
                    for inner in body {
                        state.apply_gate(inner);
                    }
                }
            }
            _ => state.apply_gate(g),
        }
    }
    out.push(Branch {
        outcomes: outcomes.clone(),
        state,
        probability: prob,
    });
}

/// Runs `c` on `input`, enumerating all measurement branches. Branch
/// probabilities sum to 1; outcome-0 branches are enumerated first.
pub fn simulate_branches(c: &Circuit, input: &Statevector) -> Result<Vec<Branch>, SimError> {
    let width = c.width();
    if width > MAX_SIM_QUBITS {
        return Err(SimError::TooLarge { width, max: MAX_SIM_QUBITS });
    }
    if input.n_qubits != width {
        return Err(SimError::DimensionMismatch(input.n_qubits, width));
    }
    let mut out = Vec::new();
    let mut outcomes = Vec::new();
    run_gates(&c.gates, input.clone(), 1.0, &mut outcomes, &mut out);
    Ok(out)
}

/// Convenience: simulate starting from |psi> ⊗ |+>^h where h is the circuit's
/// ancilla register size.
pub fn simulate_with_ancillas(c: &Circuit, psi: &Statevector) -> Result<Vec<Branch>, SimError> {
    let input = Statevector::with_plus_ancillas(psi, c.h);
    simulate_branches(c, &input)
}

/// Seeded pseudo-random pure state (Gaussian amplitudes, normalized).
pub fn random_state(n_qubits: usize, seed: u64) -> Statevector {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut amps: Vec<Complex64> = (0..1usize << n_qubits)
        .map(|_| {
            Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
        })
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in amps.iter_mut() {
        *a /= norm;
    }
    Statevector { n_qubits, amps }
}
