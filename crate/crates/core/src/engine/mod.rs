//! Fixed-point solvers and proof search for the three infinitary relations.

mod relation;
mod search;
mod solve;
mod universe;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use relation::{lift, PairRelation};
pub use search::{search_proof, search_proof_seeded, SearchBudget, Verdict};
pub use solve::{decide, decide_ired, decide_nu, decide_nu_with_generator, generator};
pub use universe::{close_universe, Edge, Universe};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationKind {
    /// Infinitary equational reasoning.
    Ieq,
    /// Bi-infinite rewriting.
    Bi,
    /// Infinitary (strongly convergent) rewriting.
    Ired,
}

impl RelationKind {
    pub const ALL: [RelationKind; 3] = [RelationKind::Ieq, RelationKind::Bi, RelationKind::Ired];

    /// Whether root steps are used in both directions.
    pub fn symmetric(self) -> bool {
        self == RelationKind::Ieq
    }

    pub fn name(self) -> &'static str {
        match self {
            RelationKind::Ieq => "ieq",
            RelationKind::Bi => "bi",
            RelationKind::Ired => "ired",
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelationKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown relation `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("universe is not closed")]
    UniverseNotClosed,
    #[error("operation not defined for relation {0}")]
    UnsupportedKind(RelationKind),
}
