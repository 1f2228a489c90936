//! Circuit preprocessing: isolate all non-Clifford content into diagonal
//! CNOT+T blocks.
//!
//! Three stages:
//!
//! 1. Pauli pushing — X and Y gates are commuted to the end of the circuit,
//!    flipping T/Tdg and S/Sdg along the way and emitting small diagonal
//!    compensations, so downstream stages only see {H, CNOT, diagonal} gates.
//! 2. Hadamard gadgetization — each internal H (one that cannot be commuted
//!    to the front or back of the circuit) is replaced by a teleportation
//!    gadget: a fresh |+> ancilla, a CZ entangler decomposed into CNOT+S, an
//!    X-basis measurement of the old wire and a classically controlled X on
//!    the new one, which takes over the qubit's role. External Hadamards
//!    stay outside the block. With an `h_cap` the circuit is cut into
//!    consecutive segments so no segment uses more than `h_cap` ancillas.
//! 3. Correction commutation — each classically controlled X is commuted to
//!    the end of its block, picking up a classically controlled diagonal
//!    Clifford computed from the phase polynomial of the block suffix. The
//!    corrections stay as (Pauli mask, phase-term list) pairs until
//!    assembly.
//!
//! The alternative to gadgetization is Hadamard-bounded partitioning, which
//! splits the circuit into H-free segments optimized independently.

use crate::circuit::{Circuit, Gate};
use crate::gf2::{BitMatrix, BitVec};
use crate::phase::{extract, PhasePolynomial, WeightedPolynomial};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PreprocessError {
    #[error("unsupported gate for preprocessing: {0}")]
    UnsupportedGate(String),
}

/// A classically controlled Clifford correction: the diagonal part first
/// (phase terms over block wires, all coefficients even), then the Pauli-X
/// mask. `global_phase` is mod 8 and only tracked for exact bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliffordCorrection {
    pub phase_terms: Vec<(BitVec, u8)>,
    pub x_mask: BitVec,
    pub global_phase: u8,
}

/// An X-basis measurement of a consumed gadget wire together with the
/// correction applied when the outcome is 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PostMeasurement {
    pub qubit: usize,
    pub outcome: usize,
    pub correction: CliffordCorrection,
}

/// One CNOT+T block with its boundary Hadamards and deferred measurements.
#[derive(Debug, Clone)]
pub struct GadgetizedForm {
    /// External Hadamards hoisted before the block, as logical qubit indices.
    pub pre: Vec<usize>,
    /// Diagonal CNOT+T circuit on n + h wires (no H, X, Y or measurement).
    pub block: Circuit,
    /// Invertible linear part of the block.
    pub e: BitMatrix,
    /// Measurements in gadget order with their commuted corrections.
    pub post: Vec<PostMeasurement>,
    /// External Hadamards trailing the block, as logical qubit indices.
    pub suf: Vec<usize>,
    /// logical qubit -> physical block wire at the end of the block.
    pub wire_map: Vec<usize>,
    /// Number of gadgetized internal Hadamards (= ancilla count).
    pub h: usize,
    /// Total segment count of the run this form belongs to.
    pub n_p: usize,
}

/// Full preprocessing result: blocks, the Hadamard layers between them
/// (partition mode), and the unconditional Pauli tail.
#[derive(Debug, Clone)]
pub struct PreprocessedCircuit {
    pub n: usize,
    pub forms: Vec<GadgetizedForm>,
    /// layers.len() == forms.len() + 1; layer i precedes form i, gates act
    /// on logical qubits.
    pub layers: Vec<Vec<Gate>>,
    /// Trailing Pauli-X mask over logical qubits.
    pub tail_x: BitVec,
    pub global_phase: u8,
}

/// Commutes every X and Y to the end of the circuit. Returns the X/Y-free
/// circuit, the trailing X mask and the accumulated global phase; Z
/// compensations are emitted inline as gates.
pub fn push_paulis(c: &Circuit) -> Result<(Circuit, BitVec, u8), PreprocessError> {
    let w = c.width();
    let mut frame = BitVec::zeros(w);
    let mut out = Circuit::with_ancillas(c.n, c.h);
    let mut phase = 0u8;
    let add = |p: &mut u8, k: u8| *p = (*p + k) & 7;

    for g in &c.gates {
        match g {
            Gate::X(q) => frame.flip(*q),
            Gate::Y(q) => {
                // Y = i X Z: the Z half first, then the X half
                if frame.get(*q) {
                    add(&mut phase, 4);
                }
                out.push(Gate::Z(*q));
                frame.flip(*q);
                add(&mut phase, 2);
            }
            Gate::Z(q) => {
                if frame.get(*q) {
                    add(&mut phase, 4);
                }
                out.push(Gate::Z(*q));
            }
            Gate::S(q) => {
                if frame.get(*q) {
                    add(&mut phase, 2);
                    out.push(Gate::S(*q));
                    out.push(Gate::Z(*q));
                } else {
                    out.push(Gate::S(*q));
                }
            }
            Gate::Sdg(q) => {
                if frame.get(*q) {
                    add(&mut phase, 6);
                    out.push(Gate::Sdg(*q));
                    out.push(Gate::Z(*q));
                } else {
                    out.push(Gate::Sdg(*q));
                }
            }
            Gate::T(q) => {
                if frame.get(*q) {
                    add(&mut phase, 1);
                    out.push(Gate::Tdg(*q));
                } else {
                    out.push(Gate::T(*q));
                }
            }
            Gate::Tdg(q) => {
                if frame.get(*q) {
                    add(&mut phase, 7);
                    out.push(Gate::T(*q));
                } else {
                    out.push(Gate::Tdg(*q));
                }
            }
            Gate::H(q) => {
                // H X = Z H: the frame bit leaves as a Z after the H
                out.push(Gate::H(*q));
                if frame.get(*q) {
                    out.push(Gate::Z(*q));
                    frame.set(*q, false);
                }
            }
            Gate::Cnot { control, target } => {
                if frame.get(*control) {
                    frame.flip(*target);
                }
                out.push(Gate::Cnot { control: *control, target: *target });
            }
            Gate::Cz(a, b) => {
                out.push(Gate::Cz(*a, *b));
                if frame.get(*a) && frame.get(*b) {
                    add(&mut phase, 4);
                }
                if frame.get(*a) {
                    out.push(Gate::Z(*b));
                }
                if frame.get(*b) {
                    out.push(Gate::Z(*a));
                }
            }
            Gate::Cs(a, b) => match (frame.get(*a), frame.get(*b)) {
                (false, false) => out.push(Gate::Cs(*a, *b)),
                (true, false) => {
                    // 2(1+u)v = 2v + 6uv mod 8
                    out.push(Gate::S(*b));
                    out.push(Gate::Cs(*a, *b));
                    out.push(Gate::Cs(*a, *b));
                    out.push(Gate::Cs(*a, *b));
                }
                (false, true) => {
                    out.push(Gate::S(*a));
                    out.push(Gate::Cs(*a, *b));
                    out.push(Gate::Cs(*a, *b));
                    out.push(Gate::Cs(*a, *b));
                }
                (true, true) => {
                    // 2(1+u)(1+v) = 2 + 6u + 6v + 2uv mod 8
                    add(&mut phase, 2);
                    out.push(Gate::Sdg(*a));
                    out.push(Gate::Sdg(*b));
                    out.push(Gate::Cs(*a, *b));
                }
            },
            Gate::Ccz(a, b, c2) => {
                let flips = [
                    (*a, frame.get(*a)),
                    (*b, frame.get(*b)),
                    (*c2, frame.get(*c2)),
                ];
                // 4(u+fa)(v+fb)(w+fc): lower-order products from flipped
                // factors become Z/CZ compensations; -4 = 4 mod 8 keeps all
                // multiplicities positive
                let set: Vec<usize> =
                    flips.iter().filter(|(_, f)| *f).map(|(q, _)| *q).collect();
                let clear: Vec<usize> =
                    flips.iter().filter(|(_, f)| !*f).map(|(q, _)| *q).collect();
                match set.len() {
                    0 => {}
                    1 => out.push(Gate::Cz(clear[0], clear[1])),
                    2 => {
                        out.push(Gate::Z(clear[0]));
                        out.push(Gate::Cz(set[0], clear[0]));
                        out.push(Gate::Cz(set[1], clear[0]));
                    }
                    _ => {
                        add(&mut phase, 4);
                        out.push(Gate::Z(*a));
                        out.push(Gate::Z(*b));
                        out.push(Gate::Z(*c2));
                        out.push(Gate::Cz(*a, *b));
                        out.push(Gate::Cz(*a, *c2));
                        out.push(Gate::Cz(*b, *c2));
                    }
                }
                out.push(Gate::Ccz(*a, *b, *c2));
            }
            other @ (Gate::MeasureX { .. } | Gate::Classical { .. }) => {
                return Err(PreprocessError::UnsupportedGate(format!("{other:?}")));
            }
        }
    }
    Ok((out, frame, phase))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum HKind {
    FrontExternal,
    BackExternal,
    Internal,
}

/// Classifies every H gate: front-external if every earlier gate on its
/// qubit is itself a front-external H, back-external symmetrically, else
/// internal (needs a gadget).
fn classify_hadamards(gates: &[Gate], width: usize) -> Vec<Option<HKind>> {
    let mut kind: Vec<Option<HKind>> = vec![None; gates.len()];
    let mut still_front = vec![true; width];
    for (i, g) in gates.iter().enumerate() {
        match g {
            Gate::H(q) if still_front[*q] => kind[i] = Some(HKind::FrontExternal),
            Gate::H(_) => kind[i] = Some(HKind::Internal),
            _ => {
                for q in g.qubits() {
                    still_front[q] = false;
                }
            }
        }
    }
    let mut still_back = vec![true; width];
    for (i, g) in gates.iter().enumerate().rev() {
        if let Gate::H(q) = g {
            if kind[i] == Some(HKind::Internal) && still_back[*q] {
                kind[i] = Some(HKind::BackExternal);
            }
        } else {
            for q in g.qubits() {
                still_back[q] = false;
            }
        }
    }
    kind
}

/// Greedy left-to-right partition into H-free segments and the H layers
/// between them. Gates go to the highest partition level any of their
/// qubits has reached; an H bumps its qubit to the next level. Concatenating
/// partitions and layers alternately reproduces the circuit.
pub fn partition_with_layers(c: &Circuit) -> (Vec<Circuit>, Vec<Vec<Gate>>) {
    let w = c.width();
    let mut level = vec![0usize; w];
    let mut parts: Vec<Vec<Gate>> = Vec::new();
    let mut layers: Vec<Vec<Gate>> = Vec::new();
    fn ensure(v: &mut Vec<Vec<Gate>>, k: usize) {
        while v.len() <= k {
            v.push(Vec::new());
        }
    }
    for g in &c.gates {
        match g {
            Gate::H(q) => {
                ensure(&mut layers, level[*q]);
                layers[level[*q]].push(g.clone());
                level[*q] += 1;
            }
            _ => {
                let k = g.qubits().iter().map(|&q| level[q]).max().unwrap_or(0);
                for q in g.qubits() {
                    level[q] = k;
                }
                ensure(&mut parts, k);
                parts[k].push(g.clone());
            }
        }
    }
    let count = parts.len().max(layers.len()).max(1);
    ensure(&mut parts, count - 1);
    ensure(&mut layers, count - 1);
    let circuits = parts
        .into_iter()
        .map(|gates| Circuit { n: c.n, h: c.h, gates })
        .collect();
    (circuits, layers)
}

/// The H-free segments of the greedy partition.
pub fn partition(c: &Circuit) -> Vec<Circuit> {
    partition_with_layers(c).0
}

/// g(x) = f(x + e_j) - f(x) mod 8, returned together with its constant term
/// (a global phase). The result has semantic degree <= 2 for any cubic f.
pub fn commute_correction(f: &WeightedPolynomial, j: usize) -> (WeightedPolynomial, u8) {
    let n = f.n();
    let mut g = WeightedPolynomial::new(n);
    let constant = f.lin(j);
    g.add_lin(j, (16 - 2 * f.lin(j) as u16) as u8 & 7);
    for a in 0..n {
        if a == j {
            continue;
        }
        let q = f.quad(a, j);
        g.add_lin(a, (2 * q) & 7);
        g.add_quad(a, j, (16 - 2 * q as u16) as u8 & 7);
        for b in a + 1..n {
            if b == j {
                continue;
            }
            let cc = f.cub(a, b, j);
            g.add_quad(a, b, (2 * cc) & 7);
            g.add_cub(a, b, j, (16 - 2 * cc as u16) as u8 & 7);
        }
    }
    (g, constant)
}

/// The CZ entangler of the Hadamard gadget, decomposed into CNOT+S:
/// S(p) S(a) CNOT(p,a) Sdg(a) CNOT(p,a) realizes the phase 4 x_p x_a.
fn cz_entangler(p: usize, a: usize) -> [Gate; 5] {
    [
        Gate::S(p),
        Gate::S(a),
        Gate::Cnot { control: p, target: a },
        Gate::Sdg(a),
        Gate::Cnot { control: p, target: a },
    ]
}

/// Commutes a classically controlled X on `wire` through the block suffix:
/// U_suf X_w U_suf^dag = X^{E v} . U_{g o E^-1} with
/// g = f(. + v) - f = sum_{lambda_k(v) = 1} a_k (1 - 2 lambda_k).
fn commute_conditional_x(
    suffix: &Circuit,
    wire: usize,
) -> Result<CliffordCorrection, PreprocessError> {
    let (pp, e): (PhasePolynomial, BitMatrix) =
        extract(suffix).map_err(|err| PreprocessError::UnsupportedGate(err.to_string()))?;
    let v = BitVec::unit(suffix.width(), wire);
    let x_mask = e.mul_vec(&v);
    let e_inv_t = e.invert().expect("block linear part is invertible").transpose();
    let mut phase_terms = Vec::new();
    let mut global_phase = 0u8;
    for (form, a) in pp.terms() {
        if form.dot(&v) {
            global_phase = (global_phase + a) & 7;
            let coeff = (16 - 2 * a as u16) as u8 & 7;
            if coeff != 0 {
                phase_terms.push((e_inv_t.mul_vec(form), coeff));
            }
        }
    }
    Ok(CliffordCorrection { phase_terms, x_mask, global_phase })
}

/// Gadgetizes one segment; `kinds` carries the globally computed H
/// classification for the segment's gates.
fn gadgetize_segment(
    n: usize,
    gates: &[Gate],
    kinds: &[Option<HKind>],
    n_internal: usize,
) -> Result<GadgetizedForm, PreprocessError> {
    let width = n + n_internal;
    let mut wire: Vec<usize> = (0..n).collect();
    let mut next_ancilla = n;
    let mut block = Circuit::with_ancillas(n, n_internal);
    let mut pre = Vec::new();
    let mut suf = Vec::new();
    // (measured wire, block position right after the entangler)
    let mut gadgets: Vec<(usize, usize)> = Vec::new();

    for (g, kind) in gates.iter().zip(kinds) {
        match g {
            Gate::H(q) => match kind.expect("classified H") {
                HKind::FrontExternal => pre.push(*q),
                HKind::BackExternal => suf.push(*q),
                HKind::Internal => {
                    let p = wire[*q];
                    let a = next_ancilla;
                    next_ancilla += 1;
                    for eg in cz_entangler(p, a) {
                        block.push(eg);
                    }
                    gadgets.push((p, block.gates.len()));
                    wire[*q] = a;
                }
            },
            Gate::T(q) => block.push(Gate::T(wire[*q])),
            Gate::Tdg(q) => block.push(Gate::Tdg(wire[*q])),
            Gate::S(q) => block.push(Gate::S(wire[*q])),
            Gate::Sdg(q) => block.push(Gate::Sdg(wire[*q])),
            Gate::Z(q) => block.push(Gate::Z(wire[*q])),
            Gate::Cz(a, b) => block.push(Gate::Cz(wire[*a], wire[*b])),
            Gate::Cs(a, b) => block.push(Gate::Cs(wire[*a], wire[*b])),
            Gate::Ccz(a, b, c) => block.push(Gate::Ccz(wire[*a], wire[*b], wire[*c])),
            Gate::Cnot { control, target } => block.push(Gate::Cnot {
                control: wire[*control],
                target: wire[*target],
            }),
            other => {
                return Err(PreprocessError::UnsupportedGate(format!("{other:?}")));
            }
        }
    }
    debug_assert_eq!(next_ancilla, width, "internal H count mismatch");

    // commute each gadget's conditional X to the end of the block; the
    // correction targets the ancilla the gadget teleported onto
    let mut post = Vec::new();
    for (i, &(measured, suffix_start)) in gadgets.iter().enumerate() {
        let target = n + i;
        let suffix = Circuit {
            n: width,
            h: 0,
            gates: block.gates[suffix_start..].to_vec(),
        };
        let correction = commute_conditional_x(&suffix, target)?;
        post.push(PostMeasurement { qubit: measured, outcome: i, correction });
    }

    let (_, e) =
        extract(&block).map_err(|err| PreprocessError::UnsupportedGate(err.to_string()))?;
    Ok(GadgetizedForm {
        pre,
        block,
        e,
        post,
        suf,
        wire_map: wire,
        h: n_internal,
        n_p: 1,
    })
}

/// Gadgetizes a Clifford+T circuit. Internal Hadamards become teleportation
/// gadgets; with `h_cap` the circuit is cut into consecutive segments that
/// each use at most `h_cap` ancillas. Internal/external status is decided on
/// the whole circuit, so a segment may open with a gadget.
pub fn gadgetize(
    c: &Circuit,
    h_cap: Option<usize>,
) -> Result<PreprocessedCircuit, PreprocessError> {
    let n = c.width();
    let (clean, tail_x, global_phase) = push_paulis(c)?;
    let kinds = classify_hadamards(&clean.gates, n);

    // cut before each internal H that would exceed the cap
    let mut segments: Vec<(usize, usize, usize)> = Vec::new();
    let mut start = 0;
    let mut internal = 0;
    for (i, k) in kinds.iter().enumerate() {
        if *k == Some(HKind::Internal) {
            if let Some(cap) = h_cap {
                if internal == cap {
                    segments.push((start, i, internal));
                    start = i;
                    internal = 0;
                }
            }
            internal += 1;
        }
    }
    segments.push((start, clean.gates.len(), internal));

    let n_p = segments.len();
    let mut forms = Vec::with_capacity(n_p);
    for &(s, e, ints) in &segments {
        let mut form = gadgetize_segment(n, &clean.gates[s..e], &kinds[s..e], ints)?;
        form.n_p = n_p;
        forms.push(form);
    }
    let layers = vec![Vec::new(); forms.len() + 1];
    Ok(PreprocessedCircuit { n, forms, layers, tail_x, global_phase })
}

/// Partition-mode preprocessing: H-free segments with the removed H layers
/// kept between them; no ancillas, no measurements.
pub fn preprocess_partition(c: &Circuit) -> Result<PreprocessedCircuit, PreprocessError> {
    let n = c.width();
    let (clean, tail_x, global_phase) = push_paulis(c)?;
    let (parts, mut hlayers) = partition_with_layers(&clean);
    let n_p = parts.len();
    let mut forms = Vec::with_capacity(n_p);
    for p in parts {
        let (_, e) =
            extract(&p).map_err(|err| PreprocessError::UnsupportedGate(err.to_string()))?;
        forms.push(GadgetizedForm {
            pre: Vec::new(),
            block: p,
            e,
            post: Vec::new(),
            suf: Vec::new(),
            wire_map: (0..n).collect(),
            h: 0,
            n_p,
        });
    }
    // the partition's layer i trails segment i; re-index so layer i precedes
    // form i, with an empty leading layer
    let mut layers = vec![Vec::new()];
    layers.append(&mut hlayers);
    while layers.len() < forms.len() + 1 {
        layers.push(Vec::new());
    }
    Ok(PreprocessedCircuit { n, forms, layers, tail_x, global_phase })
}
