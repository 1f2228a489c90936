//! The tensor-factorization optimizers: given a signature tensor (and for
//! TODD an initial matrix), produce a gate synthesis matrix with few columns.

pub mod lempel;
pub mod re;
pub mod rm;
pub mod todd;
pub mod tool;

pub use lempel::lempel_factor;
pub use re::re_expand;
pub use rm::{rm_decode, RmError, DEFAULT_RM_LIMIT};
pub use todd::{todd, todd_traced, ToddTrace};
pub use tool::{tool, tool_with_selector, ControlSelector, RandomSelector};

use crate::phase::{GateSynthesisMatrix, SignatureTensor3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OptimizerKind {
    Re,
    ToolF,
    ToolNf,
    Todd,
    Rm,
}

impl OptimizerKind {
    pub fn name(&self) -> &'static str {
        match self {
            OptimizerKind::Re => "re",
            OptimizerKind::ToolF => "tool-f",
            OptimizerKind::ToolNf => "tool-nf",
            OptimizerKind::Todd => "todd",
            OptimizerKind::Rm => "rm",
        }
    }

    pub fn parse(s: &str) -> Option<OptimizerKind> {
        match s.to_ascii_lowercase().as_str() {
            "re" => Some(OptimizerKind::Re),
            "tool-f" | "toolf" => Some(OptimizerKind::ToolF),
            "tool-nf" | "toolnf" => Some(OptimizerKind::ToolNf),
            "todd" => Some(OptimizerKind::Todd),
            "rm" => Some(OptimizerKind::Rm),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OptimizerChoice {
    pub kind: OptimizerKind,
    /// Seed for TOOL's random control selection.
    pub seed: u64,
    /// Width cap for the brute-force decoder (also TOOL's hand-off point).
    pub rm_limit: usize,
}

impl OptimizerChoice {
    pub fn new(kind: OptimizerKind) -> Self {
        OptimizerChoice { kind, seed: 0, rm_limit: DEFAULT_RM_LIMIT }
    }

    pub fn with_seed(kind: OptimizerKind, seed: u64) -> Self {
        OptimizerChoice { kind, seed, rm_limit: DEFAULT_RM_LIMIT }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OptimizerError {
    #[error(transparent)]
    Rm(#[from] RmError),
}

/// Dispatches a signature tensor to the chosen optimizer. RE and TOOL start
/// from the canonical weighted polynomial with odd coefficients exactly
/// where the tensor is 1; TODD starts from the proper RE expansion of it.
/// The output's signature always equals the input tensor.
pub fn run_pipeline(
    s: &SignatureTensor3,
    choice: &OptimizerChoice,
) -> Result<GateSynthesisMatrix, OptimizerError> {
    if s.is_zero() {
        return Ok(GateSynthesisMatrix::empty(s.n()));
    }
    let out = match choice.kind {
        OptimizerKind::Re => re_expand(&s.canonical_weighted()),
        OptimizerKind::Todd => todd(&re_expand(&s.canonical_weighted()).proper()),
        OptimizerKind::ToolF => tool(&s.canonical_weighted(), true, choice.seed, choice.rm_limit),
        OptimizerKind::ToolNf => {
            tool(&s.canonical_weighted(), false, choice.seed, choice.rm_limit)
        }
        OptimizerKind::Rm => rm_decode(s, choice.rm_limit)?,
    };
    Ok(out)
}
