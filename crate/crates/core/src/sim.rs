//! In-process protocol simulation: two database actors and a user.
//!
//! Each database draws its answer index once, uniformly and independently,
//! sends it to the user, then streams one answer per block. Both databases
//! derive the per-block common randomness from one shared seeded stream that
//! the user never sees. Index selection and common randomness come from
//! distinct ChaCha streams of the same seed.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::decode::{decode, DecodeError, DecodeTable};
use crate::field::{Field, Symbol};
use crate::scheme::{Database, Scheme};

const STREAM_COMMON_RANDOMNESS: u64 = 0;
const STREAM_DB1_INDEX: u64 = 1;
const STREAM_DB2_INDEX: u64 = 2;
const STREAM_MESSAGES: u64 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("expected {expected} messages, got {found}")]
    MessageCount { expected: usize, found: usize },
    #[error("message {message} has {found} symbols, expected {expected} (L x blocks)")]
    MessageLength {
        message: usize,
        expected: usize,
        found: usize,
    },
    #[error("at least one block is required")]
    NoBlocks,
    #[error("message symbol {0} is outside the field")]
    SymbolRange(Symbol),
    #[error("user decoded {decoded:?} but W_{theta} block {block} is {actual:?}")]
    DecodeMismatch {
        theta: usize,
        block: usize,
        decoded: Vec<Symbol>,
        actual: Vec<Symbol>,
    },
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

/// Download bookkeeping for one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Accounting {
    pub symbols: usize,
    /// Sent once, before the first block.
    pub index_bits: usize,
}

/// Everything exchanged in one protocol run. Indices are zero-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub scheme_id: String,
    pub blocks: usize,
    pub a: usize,
    pub b: usize,
    pub db1_symbols: Vec<Vec<Symbol>>,
    pub db2_symbols: Vec<Vec<Symbol>>,
    pub theta: usize,
    pub decoded: Vec<Symbol>,
    pub accounting: Accounting,
}

fn join(v: &[Symbol]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

impl Transcript {
    /// Line-oriented rendering. Identical runs produce identical bytes.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "transcript {} blocks {}", self.scheme_id, self.blocks);
        let _ = writeln!(out, "index 1 {}", self.a + 1);
        let _ = writeln!(out, "index 2 {}", self.b + 1);
        for (i, (x, y)) in self.db1_symbols.iter().zip(&self.db2_symbols).enumerate() {
            let _ = writeln!(out, "block {} 1 {}", i + 1, join(x));
            let _ = writeln!(out, "block {} 2 {}", i + 1, join(y));
        }
        let _ = writeln!(out, "decoded {} {}", self.theta + 1, join(&self.decoded));
        let _ = writeln!(
            out,
            "download symbols {} index_bits {}",
            self.accounting.symbols, self.accounting.index_bits
        );
        out
    }
}

fn stream(seed: u64, id: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Common randomness for `blocks` blocks, `r` symbols each, as both databases derive it.
pub fn common_randomness(seed: u64, blocks: usize, r: usize, field: Field) -> Vec<Vec<Symbol>> {
    let mut rng = stream(seed, STREAM_COMMON_RANDOMNESS);
    let q = field.order();
    (0..blocks)
        .map(|_| (0..r).map(|_| rng.gen_range(0..q) as Symbol).collect())
        .collect()
}

/// Uniform answer index for one database.
pub fn select_index(seed: u64, db: Database, count: usize) -> usize {
    let id = match db {
        Database::First => STREAM_DB1_INDEX,
        Database::Second => STREAM_DB2_INDEX,
    };
    stream(seed, id).gen_range(0..count)
}

/// Uniform random messages, `K` rows of `L · blocks` symbols.
pub fn random_messages(s: &Scheme, seed: u64, blocks: usize) -> Vec<Vec<Symbol>> {
    let mut rng = stream(seed, STREAM_MESSAGES);
    let q = s.field.order();
    (0..s.k)
        .map(|_| {
            (0..s.l * blocks)
                .map(|_| rng.gen_range(0..q) as Symbol)
                .collect()
        })
        .collect()
}

fn index_bits(count: usize) -> usize {
    if count <= 1 {
        0
    } else {
        (usize::BITS - (count - 1).leading_zeros()) as usize
    }
}

/// Runs the protocol over `blocks` blocks of `messages` (K rows of L·blocks symbols).
pub fn run_protocol(
    s: &Scheme,
    table: &DecodeTable,
    messages: &[Vec<Symbol>],
    seed: u64,
    blocks: usize,
) -> Result<Transcript, SimError> {
    if blocks == 0 {
        return Err(SimError::NoBlocks);
    }
    if messages.len() != s.k {
        return Err(SimError::MessageCount {
            expected: s.k,
            found: messages.len(),
        });
    }
    for (i, m) in messages.iter().enumerate() {
        if m.len() != s.l * blocks {
            return Err(SimError::MessageLength {
                message: i + 1,
                expected: s.l * blocks,
                found: m.len(),
            });
        }
        if let Some(&bad) = m.iter().find(|&&v| !s.field.contains(v as u32)) {
            return Err(SimError::SymbolRange(bad));
        }
    }

    // Databases pick once and reuse the pick for every block.
    let a = select_index(seed, Database::First, s.m1());
    let b = select_index(seed, Database::Second, s.m2());
    let shared = common_randomness(seed, blocks, s.r, s.field);

    let mut db1_symbols = Vec::with_capacity(blocks);
    let mut db2_symbols = Vec::with_capacity(blocks);
    let mut decoded = Vec::with_capacity(s.l * blocks);
    let mut theta = table.theta[a][b];
    for (block, randomness) in shared.iter().enumerate() {
        let mut x: Vec<Symbol> = messages
            .iter()
            .flat_map(|m| m[block * s.l..(block + 1) * s.l].iter().copied())
            .collect();
        x.extend_from_slice(randomness);
        let ya = s.db1[a].map.mul_vec(&x).expect("scheme width");
        let yb = s.db2[b].map.mul_vec(&x).expect("scheme width");

        // User side: only the indices and the received symbols.
        let mut observed = ya.clone();
        observed.extend_from_slice(&yb);
        let (k, w) = decode(s, table, a, b, &observed)?;
        theta = k;
        let actual = &messages[k][block * s.l..(block + 1) * s.l];
        if w != actual {
            return Err(SimError::DecodeMismatch {
                theta: k + 1,
                block: block + 1,
                decoded: w,
                actual: actual.to_vec(),
            });
        }
        decoded.extend(w);
        db1_symbols.push(ya);
        db2_symbols.push(yb);
    }

    let symbols = db1_symbols.iter().chain(&db2_symbols).map(Vec::len).sum();
    Ok(Transcript {
        scheme_id: s.fingerprint(),
        blocks,
        a,
        b,
        db1_symbols,
        db2_symbols,
        theta,
        decoded,
        accounting: Accounting {
            symbols,
            index_bits: index_bits(s.m1()) + index_bits(s.m2()),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct MessagesParseError {
    pub line: usize,
    pub message: String,
}

/// Parses a messages file: one line per message, whitespace-separated decimal
/// field elements, all blocks concatenated. `#` lines and blank lines are skipped.
pub fn parse_messages(text: &str, field: Field) -> Result<Vec<Vec<Symbol>>, MessagesParseError> {
    let mut out: Vec<Vec<Symbol>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<u32>()
                    .ok()
                    .filter(|&v| field.contains(v))
                    .map(|v| v as Symbol)
                    .ok_or_else(|| MessagesParseError {
                        line: i + 1,
                        message: format!("{tok:?} is not an element of GF({})", field.order()),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = out.first() {
            if first.len() != row.len() {
                return Err(MessagesParseError {
                    line: i + 1,
                    message: format!(
                        "{} symbols, previous messages have {}",
                        row.len(),
                        first.len()
                    ),
                });
            }
        }
        out.push(row);
    }
    Ok(out)
}
