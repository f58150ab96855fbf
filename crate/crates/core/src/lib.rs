//! Two-database random symmetric private information retrieval.
//!
//! The user sends nothing; each database draws one answer uniformly from a
//! public answer set and the pair lets the user decode exactly one message,
//! uniformly distributed from each database's point of view, while learning
//! nothing about the rest. This crate builds such schemes over GF(2^m),
//! derives the user's decoder, verifies every privacy and reliability
//! constraint exactly by enumeration, simulates protocol runs, and searches
//! small linear scheme spaces.

pub mod decode;
pub mod dot;
pub mod entropy;
pub mod field;
pub mod matrix;
pub mod scheme;
pub mod search;
pub mod sim;
pub mod verify;

pub use decode::{decode, derive_decode_table, DecodeError, DecodeTable};
pub use dot::export_bipartite_dot;
pub use field::{Field, FieldError, FieldOp, Symbol};
pub use matrix::{FieldMatrix, Solution};
pub use scheme::{
    build_k4_scheme, build_pairwise_scheme, build_rotation_scheme, build_scheme, parse_scheme,
    serialize_scheme, Database, LinearAnswer, ParseError, Scheme, SchemeVariant,
};
pub use search::{search_schemes, SearchOutcome, SearchSpace};
pub use sim::{run_protocol, Transcript};
pub use verify::{verify, CheckName, CheckRecord, VerificationReport};
