//! Resynthesis: turn an optimized gate synthesis matrix back into a circuit
//! and assemble the final output.
//!
//! Each distinct column of A becomes one conjugation block: a CNOT network
//! maps a wire onto the column's linear form, a phase gate supplies
//! w^{k lambda(x)} where k is the column's multiplicity mod 8 (T for 1, S
//! for a duplicate pair, Tdg for 7, and so on), and the CNOTs are uncomputed
//! in reverse. The synthesized block therefore implements |A^T x| exactly
//! mod 8; the residual even-coefficient difference from the original block
//! is repaired by a T-free diagonal Clifford correction, and the linear part
//! E by a Gaussian-elimination CNOT network.

use crate::circuit::{Circuit, Gate};
use crate::gf2::{BitMatrix, BitVec};
use crate::optimizers::{run_pipeline, OptimizerChoice, OptimizerError};
use crate::phase::{extract, GateSynthesisMatrix, WeightedPolynomial};
use crate::preprocess::{
    gadgetize, preprocess_partition, PreprocessError, PreprocessedCircuit,
};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("gate synthesis matrix has an all-zero column (index {0})")]
    EmptyColumn(usize),
    #[error("linear part is singular")]
    SingularMatrix,
    #[error("weighted polynomials differ in coefficient parity")]
    ParityMismatch,
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error(transparent)]
    Optimizer(#[from] OptimizerError),
}

/// Phase gates realizing w^{k x} on `wire` for k in 0..8.
fn phase_gates(k: u8, wire: usize) -> Vec<Gate> {
    match k & 7 {
        0 => vec![],
        1 => vec![Gate::T(wire)],
        2 => vec![Gate::S(wire)],
        3 => vec![Gate::S(wire), Gate::T(wire)],
        4 => vec![Gate::Z(wire)],
        5 => vec![Gate::Z(wire), Gate::T(wire)],
        6 => vec![Gate::Sdg(wire)],
        _ => vec![Gate::Tdg(wire)],
    }
}

/// Emits w^{coeff . lambda(x)} for a linear form: CNOT-conjugate the form
/// onto its lowest set wire, apply the phase gates, uncompute.
fn form_phase_gates(form: &BitVec, coeff: u8, out: &mut Vec<Gate>) {
    let vars: Vec<usize> = form.iter_ones().collect();
    assert!(!vars.is_empty(), "phase term on the zero form");
    let target = vars[0];
    let conj: Vec<Gate> = vars[1..]
        .iter()
        .map(|&v| Gate::Cnot { control: v, target })
        .collect();
    out.extend(conj.iter().cloned());
    out.extend(phase_gates(coeff, target));
    out.extend(conj.into_iter().rev());
}

/// Synthesizes a diagonal CNOT+T circuit implementing |A^T x| mod 8. Every
/// distinct column with multiplicity k (mod 8) costs one conjugation block;
/// odd multiplicities use a single T or Tdg, so the T count equals the
/// column count of proper(A).
pub fn circuit_from_gsm(a: &GateSynthesisMatrix) -> Result<Circuit, SynthError> {
    let n = a.n();
    let cols = a.columns();
    for (j, c) in cols.iter().enumerate() {
        if c.is_zero() {
            return Err(SynthError::EmptyColumn(j));
        }
    }
    let mut counts: HashMap<&BitVec, u8> = HashMap::new();
    let mut order: Vec<&BitVec> = Vec::new();
    for c in &cols {
        let e = counts.entry(c).or_insert(0);
        if *e == 0 && !order.contains(&c) {
            order.push(c);
        }
        *e = (*e + 1) & 7;
    }
    let mut gates = Vec::new();
    for c in order {
        form_phase_gates(c, counts[c], &mut gates);
    }
    Ok(Circuit { n, h: 0, gates })
}

/// T-free circuit implementing U_{f_in - f_out}. Requires the two
/// polynomials to agree in coefficient parity, so the difference is even:
/// linear slots become S/Z/Sdg, quadratic slots with difference 2 mod 4
/// become CZ, cubic slots vanish mod 8.
pub fn clifford_correction(
    f_in: &WeightedPolynomial,
    f_out: &WeightedPolynomial,
) -> Result<Circuit, SynthError> {
    if !f_in.same_parity(f_out) {
        return Err(SynthError::ParityMismatch);
    }
    let n = f_in.n();
    let d = f_in.sub(f_out);
    let mut gates = Vec::new();
    for a in 0..n {
        gates.extend(phase_gates(d.lin(a), a));
    }
    for a in 0..n {
        for b in a + 1..n {
            // phase 2 q x_a x_b: q = 2 or 6 give a CZ, q = 0 or 4 vanish
            if d.quad(a, b) % 4 == 2 {
                gates.push(Gate::Cz(a, b));
            }
        }
    }
    Ok(Circuit { n, h: 0, gates })
}

/// CNOT-only circuit whose tracked linear action equals `e`, built by
/// Gaussian elimination (no CNOT-count optimization).
pub fn cnot_network_from_e(e: &BitMatrix) -> Result<Circuit, SynthError> {
    let n = e.rows();
    if e.cols() != n {
        return Err(SynthError::SingularMatrix);
    }
    let mut m = e.clone();
    let mut ops: Vec<(usize, usize)> = Vec::new(); // (src row, dst row)
    for c in 0..n {
        if !m.get(c, c) {
            let Some(r) = (c + 1..n).find(|&r| m.get(r, c)) else {
                return Err(SynthError::SingularMatrix);
            };
            m.xor_row_into(r, c);
            ops.push((r, c));
        }
        for r in 0..n {
            if r != c && m.get(r, c) {
                m.xor_row_into(c, r);
                ops.push((c, r));
            }
        }
    }
    // row ops applied in time order rebuild e when emitted reversed
    let gates = ops
        .into_iter()
        .rev()
        .map(|(src, dst)| Gate::Cnot { control: src, target: dst })
        .collect();
    Ok(Circuit { n, h: 0, gates })
}

/// The synthesized replacement of one gadgetized block, on the block's own
/// wire indexing: the conjugated phase circuit (one CNOT network, phase
/// gate, inverse network per distinct column), the T-free diagonal Clifford
/// correction, the CNOT network realizing E, and the measurement tail with
/// one conditional correction body per consumed wire.
#[derive(Debug, Clone)]
pub struct SynthesisPlan {
    pub blocks: Circuit,
    pub clifford_tail: Circuit,
    pub e_network: Circuit,
    pub post_tail: Vec<(usize, Vec<Gate>)>,
}

/// Plans the replacement circuitry for one block given its optimized gate
/// synthesis matrix.
pub fn plan_block(
    form: &crate::preprocess::GadgetizedForm,
    a_opt: &GateSynthesisMatrix,
) -> Result<SynthesisPlan, SynthError> {
    let (pp, _) =
        extract(&form.block).map_err(|e| PreprocessError::UnsupportedGate(e.to_string()))?;
    let f_in = pp.to_weighted();
    let blocks = circuit_from_gsm(a_opt)?;
    let clifford_tail = clifford_correction(&f_in, &a_opt.to_weighted())?;
    debug_assert_eq!(clifford_tail.t_count(), 0);
    let e_network = cnot_network_from_e(&form.e)?;
    let mut post_tail = Vec::with_capacity(form.post.len());
    for pm in &form.post {
        let mut body = Vec::new();
        for (form_vec, coeff) in &pm.correction.phase_terms {
            form_phase_gates(form_vec, *coeff, &mut body);
        }
        for w in pm.correction.x_mask.iter_ones() {
            body.push(Gate::X(w));
        }
        // reset the consumed wire to |+> so its ancilla can be reused
        body.push(Gate::Z(pm.qubit));
        post_tail.push((pm.qubit, body));
    }
    Ok(SynthesisPlan { blocks, clifford_tail, e_network, post_tail })
}

/// Remaps a gate's qubit indices.
fn remap(g: &Gate, map: &[usize]) -> Gate {
    match g {
        Gate::H(q) => Gate::H(map[*q]),
        Gate::X(q) => Gate::X(map[*q]),
        Gate::Y(q) => Gate::Y(map[*q]),
        Gate::Z(q) => Gate::Z(map[*q]),
        Gate::S(q) => Gate::S(map[*q]),
        Gate::Sdg(q) => Gate::Sdg(map[*q]),
        Gate::T(q) => Gate::T(map[*q]),
        Gate::Tdg(q) => Gate::Tdg(map[*q]),
        Gate::Cz(a, b) => Gate::Cz(map[*a], map[*b]),
        Gate::Cs(a, b) => Gate::Cs(map[*a], map[*b]),
        Gate::Ccz(a, b, c) => Gate::Ccz(map[*a], map[*b], map[*c]),
        Gate::Cnot { control, target } => {
            Gate::Cnot { control: map[*control], target: map[*target] }
        }
        Gate::MeasureX { qubit, outcome } => {
            Gate::MeasureX { qubit: map[*qubit], outcome: *outcome }
        }
        Gate::Classical { outcome, body } => Gate::Classical {
            outcome: *outcome,
            body: body.iter().map(|g| remap(g, map)).collect(),
        },
    }
}

/// Assembles the final circuit: per segment, the synthesized phase circuit,
/// the diagonal Clifford correction, the E network, then the deferred
/// measurements with their classically controlled corrections (each measured
/// wire is reset to |+> by a conditional Z so its ancilla can be reused by
/// later segments). A CNOT swap network returns every logical qubit to its
/// original wire, so wire i of the output is wire i of the input.
pub fn assemble(
    pre: &PreprocessedCircuit,
    optimized: &[GateSynthesisMatrix],
) -> Result<Circuit, SynthError> {
    assert_eq!(pre.forms.len(), optimized.len(), "one optimized A per block");
    let n = pre.n;
    let mut logical: Vec<usize> = (0..n).collect(); // logical -> global wire
    let mut pool: Vec<usize> = Vec::new();
    let mut total_wires = n;
    let mut outcome_counter = 0usize;
    let mut gates: Vec<Gate> = Vec::new();

    for (i, form) in pre.forms.iter().enumerate() {
        for g in &pre.layers[i] {
            let mapped: Vec<usize> = logical.clone();
            gates.push(remap(g, &mapped));
        }
        for &q in &form.pre {
            gates.push(Gate::H(logical[q]));
        }

        // local block wires: 0..n are the logicals at segment start, then
        // one wire per gadget ancilla drawn from the free pool
        let mut local_to_global: Vec<usize> = Vec::with_capacity(n + form.h);
        local_to_global.extend(logical.iter().copied());
        for _ in 0..form.h {
            let w = pool.pop().unwrap_or_else(|| {
                total_wires += 1;
                total_wires - 1
            });
            local_to_global.push(w);
        }

        // optimized replacement of the block: phase circuit + Clifford
        // correction + E network, then the measurement tail
        let plan = plan_block(form, &optimized[i])?;
        for g in plan
            .blocks
            .gates
            .iter()
            .chain(&plan.clifford_tail.gates)
            .chain(&plan.e_network.gates)
        {
            gates.push(remap(g, &local_to_global));
        }
        for (measured, body) in &plan.post_tail {
            let outcome = outcome_counter;
            outcome_counter += 1;
            gates.push(Gate::MeasureX { qubit: local_to_global[*measured], outcome });
            gates.push(Gate::Classical {
                outcome,
                body: body.iter().map(|g| remap(g, &local_to_global)).collect(),
            });
        }

        // role swaps: logical qubits now live on the gadget ancillas
        logical = form.wire_map.iter().map(|&w| local_to_global[w]).collect();
        for pm in &form.post {
            pool.push(local_to_global[pm.qubit]);
        }
        for &q in &form.suf {
            gates.push(Gate::H(logical[q]));
        }
    }
    for g in pre.layers[pre.forms.len()].iter() {
        gates.push(remap(g, &logical));
    }

    // swap every logical qubit back onto its original wire
    let mut occupant: Vec<Option<usize>> = vec![None; total_wires];
    for (q, &w) in logical.iter().enumerate() {
        occupant[w] = Some(q);
    }
    for q in 0..n {
        let w = logical[q];
        if w == q {
            continue;
        }
        for g in [
            Gate::Cnot { control: q, target: w },
            Gate::Cnot { control: w, target: q },
            Gate::Cnot { control: q, target: w },
        ] {
            gates.push(g);
        }
        let displaced = occupant[q];
        occupant[w] = displaced;
        if let Some(d) = displaced {
            logical[d] = w;
        }
        occupant[q] = Some(q);
        logical[q] = q;
    }

    for q in pre.tail_x.iter_ones() {
        gates.push(Gate::X(q));
    }
    Ok(Circuit { n, h: total_wires - n, gates })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HadamardMode {
    Gadget,
    Partition,
}

/// Per-compile report data.
#[derive(Debug, Clone)]
pub struct CompileReport {
    pub n: usize,
    pub h: usize,
    pub n_p: usize,
    pub t_before: usize,
    pub t_after: usize,
}

/// Full pipeline: preprocess, optimize each block's signature tensor,
/// resynthesize and assemble.
pub fn compile(
    c: &Circuit,
    choice: &OptimizerChoice,
    mode: HadamardMode,
    h_cap: Option<usize>,
) -> Result<(Circuit, CompileReport), SynthError> {
    let pre = match mode {
        HadamardMode::Gadget => gadgetize(c, h_cap)?,
        HadamardMode::Partition => preprocess_partition(c)?,
    };
    let mut optimized = Vec::with_capacity(pre.forms.len());
    let mut t_after = 0;
    for form in &pre.forms {
        let (pp, _) =
            extract(&form.block).map_err(|e| PreprocessError::UnsupportedGate(e.to_string()))?;
        let s = pp.to_weighted().signature();
        let a = run_pipeline(&s, choice)?;
        t_after += a.proper().cols();
        optimized.push(a);
    }
    let out = assemble(&pre, &optimized)?;
    debug_assert_eq!(out.t_count(), t_after);
    let report = CompileReport {
        n: c.width(),
        h: pre.forms.iter().map(|f| f.h).sum(),
        n_p: pre.forms.len(),
        t_before: c.t_count_expanded(),
        t_after,
    };
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse;

    fn inputs(n: usize) -> impl Iterator<Item = BitVec> {
        (0..1usize << n).map(move |bits| {
            let mut v = BitVec::zeros(n);
            for i in 0..n {
                if bits >> i & 1 == 1 {
                    v.set(i, true);
                }
            }
            v
        })
    }

    #[test]
    fn single_unit_column_is_one_t() {
        let a = GateSynthesisMatrix::from_cols(1, vec![BitVec::unit(1, 0)]);
        let c = circuit_from_gsm(&a).unwrap();
        assert_eq!(c.gates, vec![Gate::T(0)]);
    }

    #[test]
    fn weight_two_column_conjugates() {
        let a = GateSynthesisMatrix::from_cols(2, vec![BitVec::from_bits(&[true, true])]);
        let c = circuit_from_gsm(&a).unwrap();
        assert_eq!(
            c.gates,
            vec![
                Gate::Cnot { control: 1, target: 0 },
                Gate::T(0),
                Gate::Cnot { control: 1, target: 0 },
            ]
        );
    }

    #[test]
    fn duplicate_pair_becomes_s() {
        let col = BitVec::from_bits(&[true, true]);
        let a = GateSynthesisMatrix::from_cols(2, vec![col.clone(), col]);
        let c = circuit_from_gsm(&a).unwrap();
        assert_eq!(c.t_count(), 0);
        assert!(c.gates.contains(&Gate::S(0)));
    }

    #[test]
    fn empty_column_rejected() {
        let a = GateSynthesisMatrix::from_cols(2, vec![BitVec::zeros(2)]);
        assert!(matches!(
            circuit_from_gsm(&a),
            Err(SynthError::EmptyColumn(0))
        ));
    }

    #[test]
    fn synthesized_phase_matches_matrix() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..30 {
            let n = rng.gen_range(1..=5);
            let m = rng.gen_range(0..=10);
            let mut cols = Vec::new();
            for _ in 0..m {
                let mut v = BitVec::zeros(n);
                for i in 0..n {
                    v.set(i, rng.gen_bool(0.5));
                }
                if !v.is_zero() {
                    cols.push(v);
                }
            }
            let a = GateSynthesisMatrix::from_cols(n, cols);
            let circ = circuit_from_gsm(&a).unwrap();
            assert_eq!(circ.t_count(), a.proper().cols(), "T count must equal the proper column count");
            let (pp, e) = extract(&circ).unwrap();
            assert_eq!(e, BitMatrix::identity(n), "diagonal circuit");
            for x in inputs(n) {
                assert_eq!(pp.eval(&x), a.eval_phase(&x));
            }
        }
    }

    #[test]
    fn clifford_correction_identity_is_empty() {
        let mut f = WeightedPolynomial::new(2);
        f.add_quad(0, 1, 3);
        let c = clifford_correction(&f, &f).unwrap();
        assert!(c.gates.is_empty());
    }

    #[test]
    fn clifford_correction_quad_gap_is_cz() {
        // f_in - f_out has quadratic difference 2 -> one CZ
        let mut f_in = WeightedPolynomial::new(2);
        f_in.add_quad(0, 1, 3);
        let mut f_out = WeightedPolynomial::new(2);
        f_out.add_quad(0, 1, 1);
        let c = clifford_correction(&f_in, &f_out).unwrap();
        assert_eq!(c.gates, vec![Gate::Cz(0, 1)]);
        assert_eq!(c.t_count(), 0);
    }

    #[test]
    fn clifford_correction_lin_gap_is_z() {
        let mut f_in = WeightedPolynomial::new(1);
        f_in.add_lin(0, 5);
        let mut f_out = WeightedPolynomial::new(1);
        f_out.add_lin(0, 1);
        let c = clifford_correction(&f_in, &f_out).unwrap();
        assert_eq!(c.gates, vec![Gate::Z(0)]);
    }

    #[test]
    fn clifford_correction_rejects_parity_mismatch() {
        let mut f_in = WeightedPolynomial::new(1);
        f_in.add_lin(0, 1);
        let f_out = WeightedPolynomial::new(1);
        assert!(matches!(
            clifford_correction(&f_in, &f_out),
            Err(SynthError::ParityMismatch)
        ));
    }

    #[test]
    fn correction_restores_exact_phase() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(43);
        for _ in 0..20 {
            let n = rng.gen_range(1..=5);
            let mut f_in = WeightedPolynomial::new(n);
            for a in 0..n {
                f_in.add_lin(a, rng.gen_range(0..8));
                for b in a + 1..n {
                    f_in.add_quad(a, b, rng.gen_range(0..8));
                    for c in b + 1..n {
                        f_in.add_cub(a, b, c, rng.gen_range(0..8));
                    }
                }
            }
            let a = crate::optimizers::todd(&crate::optimizers::re_expand(&f_in).proper());
            let mut gates = circuit_from_gsm(&a).unwrap().gates;
            gates.extend(clifford_correction(&f_in, &a.to_weighted()).unwrap().gates);
            let circ = Circuit { n, h: 0, gates };
            let (pp, _) = extract(&circ).unwrap();
            for x in inputs(n) {
                assert_eq!(pp.eval(&x), f_in.eval(&x), "n={n}");
            }
        }
    }

    #[test]
    fn cnot_network_examples() {
        assert!(cnot_network_from_e(&BitMatrix::identity(3)).unwrap().gates.is_empty());

        let e = BitMatrix::from_rows(&[&[true, false], &[true, true]]);
        let c = cnot_network_from_e(&e).unwrap();
        assert_eq!(c.gates, vec![Gate::Cnot { control: 0, target: 1 }]);

        let singular = BitMatrix::from_rows(&[&[true, true], &[true, true]]);
        assert!(matches!(
            cnot_network_from_e(&singular),
            Err(SynthError::SingularMatrix)
        ));
    }

    #[test]
    fn cnot_network_roundtrip_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(47);
        let mut found = 0;
        while found < 20 {
            let n = rng.gen_range(1..=6);
            let mut e = BitMatrix::zeros(n, n);
            for r in 0..n {
                for c in 0..n {
                    e.set(r, c, rng.gen_bool(0.5));
                }
            }
            if e.invert().is_err() {
                continue;
            }
            found += 1;
            let circ = cnot_network_from_e(&e).unwrap();
            let (pp, got) = extract(&circ).unwrap();
            assert_eq!(pp.terms().count(), 0);
            assert_eq!(got, e);
        }
    }

    #[test]
    fn compile_tiny_circuit_preserves_t_or_reduces() {
        let c = parse("qubits 2\nT q0\nCNOT q0 q1\nT q1\nH q1\nT q1").unwrap();
        let choice = OptimizerChoice::new(crate::optimizers::OptimizerKind::Todd);
        let (out, report) = compile(&c, &choice, HadamardMode::Gadget, None).unwrap();
        assert_eq!(report.t_before, 3);
        assert!(report.t_after <= report.t_before);
        assert_eq!(out.t_count(), report.t_after);
        assert_eq!(out.n, 2);
    }
}
