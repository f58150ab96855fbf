//! Which message each answer pair reveals, and how the user recovers it.
//!
//! A message `W_k` is decodable from the pair `(A_a, B_b)` exactly when every
//! unit vector selecting one of its symbols lies in the row space of the
//! stacked map `[A_a; B_b]`. The coefficients expressing that unit vector as a
//! combination of observed rows form the recovery matrix, and by construction
//! the combination has zero weight on every randomness coordinate.

use thiserror::Error;

use crate::field::{FieldError, Symbol};
use crate::matrix::{FieldMatrix, Solution};
use crate::scheme::{Scheme, ShapeViolation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("scheme shape is invalid: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidShape(Vec<ShapeViolation>),
    #[error("pair (a={}, b={}) determines no message", .a + 1, .b + 1)]
    NotReliable { a: usize, b: usize },
    #[error("pair (a={}, b={}) is outside a {m1}x{m2} table", .a + 1, .b + 1)]
    PairOutOfRange {
        a: usize,
        b: usize,
        m1: usize,
        m2: usize,
    },
    #[error("observation has {found} symbols, pair expects {expected}")]
    ObservationLength { expected: usize, found: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// All messages fully determined by one answer pair, with their recovery maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairDecoding {
    pub decodable: Vec<(usize, FieldMatrix)>,
}

/// A pair that determines more than one message. Database privacy cannot hold there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrivacyBreach {
    pub a: usize,
    pub b: usize,
    pub messages: Vec<usize>,
}

/// θ and recovery maps for every answer pair. Indices are zero-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeTable {
    pub k: usize,
    pub l: usize,
    /// `theta[a][b]` is the message revealed by `(A_a, B_b)`.
    pub theta: Vec<Vec<usize>>,
    /// `recovery[a][b]` maps the observation `(A_a ‖ B_b)` to the L symbols of `W_theta`.
    pub recovery: Vec<Vec<FieldMatrix>>,
    /// Pairs revealing several messages; `theta` holds the lowest of them.
    pub breaches: Vec<PrivacyBreach>,
}

impl DecodeTable {
    pub fn m1(&self) -> usize {
        self.theta.len()
    }

    pub fn m2(&self) -> usize {
        self.theta.first().map_or(0, Vec::len)
    }
}

/// Decodability analysis for a single pair.
pub fn analyze_pair(s: &Scheme, a: usize, b: usize) -> PairDecoding {
    let stacked = s.pair_map(a, b);
    let transposed = stacked.transpose();
    let width = s.width();
    let mut decodable = Vec::new();
    'messages: for k in 0..s.k {
        let mut rows = Vec::with_capacity(s.l);
        for l in 0..s.l {
            let mut unit = vec![0; width];
            unit[s.message_col(k, l)] = 1;
            match transposed.solve(&unit).expect("dimensions agree") {
                Solution::Inconsistent => continue 'messages,
                sol => rows.push(sol.vector().expect("consistent").to_vec()),
            }
        }
        let recovery =
            FieldMatrix::from_rows(s.field, stacked.rows(), &rows).expect("row widths agree");
        decodable.push((k, recovery));
    }
    PairDecoding { decodable }
}

/// Derives θ and the recovery combinations for every pair of a well-formed scheme.
pub fn derive_decode_table(s: &Scheme) -> Result<DecodeTable, DecodeError> {
    let violations = s.validate_shape();
    if !violations.is_empty() {
        return Err(DecodeError::InvalidShape(violations));
    }
    let mut theta = Vec::with_capacity(s.m1());
    let mut recovery = Vec::with_capacity(s.m1());
    let mut breaches = Vec::new();
    for a in 0..s.m1() {
        let mut theta_row = Vec::with_capacity(s.m2());
        let mut recovery_row = Vec::with_capacity(s.m2());
        for b in 0..s.m2() {
            let mut pair = analyze_pair(s, a, b);
            if pair.decodable.is_empty() {
                return Err(DecodeError::NotReliable { a, b });
            }
            if pair.decodable.len() > 1 {
                breaches.push(PrivacyBreach {
                    a,
                    b,
                    messages: pair.decodable.iter().map(|(k, _)| *k).collect(),
                });
            }
            let (k, rec) = pair.decodable.swap_remove(0);
            theta_row.push(k);
            recovery_row.push(rec);
        }
        theta.push(theta_row);
        recovery.push(recovery_row);
    }
    Ok(DecodeTable {
        k: s.k,
        l: s.l,
        theta,
        recovery,
        breaches,
    })
}

/// User-side decoding of one block: returns `(θ, W_θ)`.
pub fn decode(
    s: &Scheme,
    table: &DecodeTable,
    a: usize,
    b: usize,
    observed: &[Symbol],
) -> Result<(usize, Vec<Symbol>), DecodeError> {
    if a >= table.m1() || b >= table.m2() || a >= s.m1() || b >= s.m2() {
        return Err(DecodeError::PairOutOfRange {
            a,
            b,
            m1: s.m1(),
            m2: s.m2(),
        });
    }
    let expected = s.db1[a].len() + s.db2[b].len();
    if observed.len() != expected {
        return Err(DecodeError::ObservationLength {
            expected,
            found: observed.len(),
        });
    }
    let w = table.recovery[a][b].mul_vec(observed)?;
    Ok((table.theta[a][b], w))
}
