//! Rewriting with rational infinite terms: relations, proofs and compression.

pub mod cli;
pub mod compress;
pub mod engine;
pub mod proof;
pub mod syntax;
pub mod term;
pub mod trs;
