//! T-count optimizing compiler for Clifford+T quantum circuits.
//!
//! The compiler isolates the non-Clifford content of a Clifford+T circuit
//! into diagonal CNOT+T blocks (gadgetizing internal Hadamard gates into
//! ancilla teleportations, or partitioning at Hadamard boundaries), maps each
//! block to a symmetric order-3 tensor over GF(2), re-factorizes that tensor
//! with one of several optimizers (RE, TOOL, TODD, Lempel-based, or an exact
//! brute-force decoder for small widths), and synthesizes the result back
//! into a circuit with fewer T gates plus a Clifford correction.
//!
//! The crate also ships a statevector oracle with measurement branching used
//! to check channel equivalence of input and output, and a benchmark harness
//! with seeded random instances and CSV/JSON reporting. The `topt` binary
//! exposes everything on the command line.

pub mod bench;
pub mod circuit;
pub mod gf2;
pub mod optimizers;
pub mod phase;
pub mod preprocess;
pub mod resynth;
pub mod sim;

pub use circuit::{Circuit, Gate};
pub use gf2::{BitMatrix, BitVec};
pub use optimizers::{run_pipeline, OptimizerChoice, OptimizerKind};
pub use phase::{
    GateSynthesisMatrix, PhasePolynomial, SignatureMatrix2, SignatureTensor3, WeightedPolynomial,
};
