//! Cyclic proof certificates, their validation, serialization and unfolding.

mod dot;
mod extract;
mod graph;
mod json;
mod validate;

use thiserror::Error;

pub use dot::to_dot;
pub use extract::extract_prefix;
pub(crate) use extract::replay_split_prefix;
pub use graph::{Judgment, Justification, PremiseItem, ProofGraph, ProofNode, StepItem};
pub use json::{from_json, to_json};
pub use validate::{validate, ValidationReport, Violation, ViolationCode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("malformed certificate document: {0}")]
    Format(String),
}
