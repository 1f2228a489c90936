//! End-to-end pipeline tests: compile random and hand-picked Clifford+T
//! circuits with every optimizer and mode, then check channel equivalence
//! against the statevector oracle.

use topt::bench::{random_clifford_t_circuit, verify_equivalence};
use topt::circuit::{emit, parse};
use topt::optimizers::OptimizerKind;
use topt::resynth::{compile, HadamardMode};
use topt::OptimizerChoice;

fn check(text: &str, kind: OptimizerKind, mode: HadamardMode, h_cap: Option<usize>) {
    let c = parse(text).unwrap();
    let choice = OptimizerChoice::with_seed(kind, 7);
    let (out, report) = compile(&c, &choice, mode, h_cap).unwrap();
    let (ok, worst) = verify_equivalence(&c, &out).unwrap();
    assert!(
        ok,
        "inequivalent ({kind:?}, {mode:?}, cap {h_cap:?}): infidelity {worst:.3e}\n{text}"
    );
    assert_eq!(out.t_count(), report.t_after);
}

#[test]
fn single_hadamard_gadget_both_branches() {
    check("qubits 1\nT q0\nH q0\nT q0", OptimizerKind::Todd, HadamardMode::Gadget, None);
}

#[test]
fn hadamard_heavy_two_qubits() {
    let text = "qubits 2\nT q0\nH q0\nCNOT q0 q1\nT q1\nH q1\nS q1\nT q0\nCNOT q1 q0\nT q0";
    for kind in [OptimizerKind::Re, OptimizerKind::ToolF, OptimizerKind::ToolNf, OptimizerKind::Todd]
    {
        check(text, kind, HadamardMode::Gadget, None);
    }
}

#[test]
fn partition_mode_equivalence() {
    let text = "qubits 2\nT q0\nH q0\nCNOT q0 q1\nT q1\nH q1\nT q0\nCNOT q0 q1\nT q1";
    check(text, OptimizerKind::Todd, HadamardMode::Partition, None);
    check(text, OptimizerKind::Re, HadamardMode::Partition, None);
}

#[test]
fn h_cap_segmentation_equivalence() {
    let text = "qubits 2\nT q0\nH q0\nT q0\nCNOT q0 q1\nH q1\nT q1\nH q0\nCNOT q1 q0\nT q0";
    for cap in [1, 2, 3] {
        check(text, OptimizerKind::Todd, HadamardMode::Gadget, Some(cap));
    }
}

#[test]
fn pauli_gates_in_input() {
    let text = "qubits 2\nX q0\nT q0\nH q0\nY q1\nCNOT q0 q1\nT q1\nZ q0\nH q1\nT q1";
    check(text, OptimizerKind::Todd, HadamardMode::Gadget, None);
    check(text, OptimizerKind::Todd, HadamardMode::Partition, None);
}

#[test]
fn ccz_and_cs_inputs() {
    let text = "qubits 3\nCCZ q0 q1 q2\nCS q0 q1\nT q2\nH q2\nCZ q0 q2\nT q2";
    for kind in [OptimizerKind::Todd, OptimizerKind::Rm] {
        check(text, kind, HadamardMode::Gadget, None);
        check(text, kind, HadamardMode::Partition, None);
    }
}

#[test]
fn toffoli_compiles_to_seven_t() {
    // tof = H CCZ H; the lone CCZ block must come out at exactly 7 T
    let text = ".v a b c\nBEGIN\ntof a b c\nEND\n";
    let c = topt::circuit::parse_qc(text).unwrap();
    let choice = OptimizerChoice::new(OptimizerKind::Todd);
    let (out, report) = compile(&c, &choice, HadamardMode::Gadget, None).unwrap();
    assert_eq!(report.t_before, 7);
    assert_eq!(report.t_after, 7);
    let (ok, _) = verify_equivalence(&c, &out).unwrap();
    assert!(ok);
}

#[test]
fn random_circuits_all_optimizers() {
    for seed in 0..6 {
        let c = random_clifford_t_circuit(3, 12, 2, seed);
        let text = emit(&c);
        for kind in [OptimizerKind::Todd, OptimizerKind::ToolF, OptimizerKind::Re] {
            check(&text, kind, HadamardMode::Gadget, None);
            check(&text, kind, HadamardMode::Partition, None);
        }
        check(&text, OptimizerKind::Todd, HadamardMode::Gadget, Some(1));
    }
}

#[test]
fn todd_never_increases_t_count_end_to_end() {
    // CNOT-heavy circuits produce wide forms whose canonical re-expansion is
    // much larger than the input T count; TODD must still come back down
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(61);
    for trial in 0..30u64 {
        let n = rng.gen_range(3..=8);
        let mut c = topt::Circuit::new(n);
        for _ in 0..rng.gen_range(10..=30) {
            let r: f64 = rng.gen();
            let q = rng.gen_range(0..n);
            if r < 0.7 {
                let mut t = rng.gen_range(0..n);
                while t == q {
                    t = rng.gen_range(0..n);
                }
                c.push(topt::Gate::Cnot { control: q, target: t });
            } else if r < 0.85 {
                c.push(topt::Gate::S(q));
            } else {
                c.push(topt::Gate::T(q));
            }
        }
        let choice = OptimizerChoice::with_seed(OptimizerKind::Todd, trial);
        let (_, report) = compile(&c, &choice, HadamardMode::Gadget, None).unwrap();
        assert!(
            report.t_after <= report.t_before,
            "trial {trial}: {} -> {}",
            report.t_before,
            report.t_after
        );
    }
}

#[test]
fn h_cap_bounds_live_ancillas_via_reuse() {
    // three internal Hadamards with a cap of one: consumed gadget wires are
    // reset to |+> and reused, so the output needs exactly one extra wire
    let c = parse("qubits 1\nT q0\nH q0\nT q0\nH q0\nT q0\nH q0\nT q0").unwrap();
    let choice = OptimizerChoice::new(OptimizerKind::Todd);
    let (out, report) = compile(&c, &choice, HadamardMode::Gadget, Some(1)).unwrap();
    assert_eq!(report.n_p, 3);
    assert_eq!(out.h, 1, "segments must share the single ancilla");
    let (ok, _) = verify_equivalence(&c, &out).unwrap();
    assert!(ok);

    // uncapped, the same circuit needs all three ancillas at once
    let (out, _) = compile(&c, &choice, HadamardMode::Gadget, None).unwrap();
    assert_eq!(out.h, 3);
}

#[test]
fn trivial_circuits_compile() {
    for text in ["qubits 1", "qubits 3", "qubits 2\nCNOT q0 q1", "qubits 2\nH q0\nH q1"] {
        let c = parse(text).unwrap();
        let choice = OptimizerChoice::new(OptimizerKind::Todd);
        for mode in [HadamardMode::Gadget, HadamardMode::Partition] {
            let (out, report) = compile(&c, &choice, mode, None).unwrap();
            assert_eq!(report.t_after, 0, "{text}");
            let (ok, _) = verify_equivalence(&c, &out).unwrap();
            assert!(ok, "{text}");
        }
    }
}

#[test]
fn beyond_oracle_scale_compile_is_sane() {
    // too wide to simulate, but the compile itself must hold together and
    // reduce the T count
    let c = random_clifford_t_circuit(8, 120, 10, 3);
    let choice = OptimizerChoice::new(OptimizerKind::Todd);
    let (out, report) = compile(&c, &choice, HadamardMode::Gadget, None).unwrap();
    assert_eq!(report.h, 10);
    assert!(report.t_after <= report.t_before);
    assert_eq!(out.t_count(), report.t_after);

    // capping the ancillas trades T count for width
    let (capped, capped_report) = compile(&c, &choice, HadamardMode::Gadget, Some(3)).unwrap();
    assert!(capped.h <= 3);
    assert!(capped_report.n_p >= 3);
}

#[test]
fn output_reparses_and_t_count_is_stable() {
    let c = random_clifford_t_circuit(4, 20, 3, 99);
    let choice = OptimizerChoice::new(OptimizerKind::Todd);
    let (out, report) = compile(&c, &choice, HadamardMode::Gadget, None).unwrap();
    let text = emit(&out);
    let back = parse(&text).unwrap();
    assert_eq!(back, out);
    assert_eq!(back.t_count(), report.t_after);
}
