//! Compilers from LB-ATM acceptance to model checking: a hierarchical
//! module language, its flattener, the gadget library, and the digit and
//! per-cell tape encodings.

pub mod compile;
pub mod encoding;
pub mod flatten;
pub mod gadgets;
pub mod hier;
pub mod simulate;

use thiserror::Error;

use crate::lbatm::LbatmError;
use crate::model::ModelError;

pub use compile::{
    check_invariants, compile, compile_digit, compile_unary, CompileOptions, CompileStats, Compiled, InvariantReport, Labelling, Mode,
};
pub use encoding::{decode_tape, encode_tape, max_value};
pub use flatten::{flatten, instance, Flattened, LocationMeta};
pub use gadgets::{Gadget, GadgetContract};
pub use hier::{parse_hierarchical, HierarchicalGame, Module};
pub use simulate::{balanced, simulate_flat, simulate_module, SimOutcome, Valuation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown module {0}")]
    UnknownModule(String),
    #[error("module {module} takes {expected} arguments, got {found}")]
    Arity { module: String, expected: usize, found: usize },
    #[error("cyclic instantiation: {0}")]
    Cycle(String),
    #[error("{name} is not bound to a resource in module {module}")]
    Unbound { module: String, name: String },
    #[error("invalid hierarchical game: {0}")]
    Invalid(String),
    #[error("no edge enabled at {0}")]
    Stuck(String),
    #[error("{count} edges enabled at {node}")]
    Nondeterministic { node: String, count: usize },
    #[error("simulation exceeded its step limit")]
    StepLimit,
    #[error("encoding: {0}")]
    Encoding(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Machine(#[from] LbatmError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
