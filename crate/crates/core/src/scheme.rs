//! Two-database scheme model, the shipped constructions, and the text file format.
//!
//! Every answer is a linear map applied to the column vector
//! `(W_1 ‖ … ‖ W_K ‖ S_1 … S_R)`, where each message `W_k` occupies `L`
//! consecutive coordinates. A scheme describes a single block; longer messages
//! repeat the block with fresh common randomness.

use std::fmt::{self, Write as _};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::field::{Field, FieldError, Symbol};
use crate::matrix::FieldMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Database {
    First,
    Second,
}

impl Database {
    pub fn number(self) -> usize {
        match self {
            Database::First => 1,
            Database::Second => 2,
        }
    }
}

impl fmt::Display for Database {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "database {}", self.number())
    }
}

/// One entry of an answer set. `index` is zero-based; files and reports are one-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearAnswer {
    pub index: usize,
    pub map: FieldMatrix,
}

impl LinearAnswer {
    pub fn len(&self) -> usize {
        self.map.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.map.rows() == 0
    }
}

/// Public description of a two-database protocol.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scheme {
    /// Number of messages.
    pub k: usize,
    /// Symbols per message per block.
    pub l: usize,
    /// Common-randomness symbols per block.
    pub r: usize,
    pub field: Field,
    pub db1: Vec<LinearAnswer>,
    pub db2: Vec<LinearAnswer>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeVariant {
    /// Randomness indices rotate across database-1 answers.
    RotationRandomness,
    /// Message indices rotate across database-1 answers; database 2 unchanged.
    RotationMessages,
    /// Pairwise message sums with K-1 randomness symbols, download K per block.
    Pairwise,
    /// The dedicated K = 4, L = 2 construction with download 6.
    K4Special,
    Custom,
}

impl SchemeVariant {
    pub fn name(self) -> &'static str {
        match self {
            SchemeVariant::RotationRandomness => "rotation-randomness",
            SchemeVariant::RotationMessages => "rotation-messages",
            SchemeVariant::Pairwise => "pairwise",
            SchemeVariant::K4Special => "k4",
            SchemeVariant::Custom => "custom",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "rotation-randomness" | "rotation" => SchemeVariant::RotationRandomness,
            "rotation-messages" => SchemeVariant::RotationMessages,
            "pairwise" => SchemeVariant::Pairwise,
            "k4" | "k4-special" => SchemeVariant::K4Special,
            "custom" => SchemeVariant::Custom,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("at least two messages are required, got K = {0}")]
    TooFewMessages(usize),
    #[error("variant {0} has no generic builder")]
    NoBuilder(&'static str),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShapeViolation {
    /// Answer-set size is not a positive multiple of K.
    Cardinality {
        db: Database,
        count: usize,
        k: usize,
    },
    /// Answer map width differs from K·L + R.
    Dimension {
        db: Database,
        index: usize,
        cols: usize,
        expected: usize,
    },
    FieldMismatch {
        db: Database,
        index: usize,
    },
    IndexMismatch {
        db: Database,
        position: usize,
        index: usize,
    },
    Degenerate(String),
}

impl fmt::Display for ShapeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeViolation::Cardinality { db, count, k } => write!(
                f,
                "{db} has {count} answers, which is not a positive multiple of K = {k}"
            ),
            ShapeViolation::Dimension {
                db,
                index,
                cols,
                expected,
            } => write!(
                f,
                "{db} answer {} has {cols} columns, expected {expected}",
                index + 1
            ),
            ShapeViolation::FieldMismatch { db, index } => {
                write!(f, "{db} answer {} uses a different field", index + 1)
            }
            ShapeViolation::IndexMismatch {
                db,
                position,
                index,
            } => write!(
                f,
                "{db} answer at position {} carries index {}",
                position + 1,
                index + 1
            ),
            ShapeViolation::Degenerate(msg) => f.write_str(msg),
        }
    }
}

impl Scheme {
    /// Width of every answer map: K·L + R.
    pub fn width(&self) -> usize {
        self.k * self.l + self.r
    }

    /// Column of symbol `l` of message `k` (both zero-based).
    pub fn message_col(&self, k: usize, l: usize) -> usize {
        k * self.l + l
    }

    /// Column of randomness symbol `j` (zero-based).
    pub fn randomness_col(&self, j: usize) -> usize {
        self.k * self.l + j
    }

    pub fn answers(&self, db: Database) -> &[LinearAnswer] {
        match db {
            Database::First => &self.db1,
            Database::Second => &self.db2,
        }
    }

    pub fn answers_mut(&mut self, db: Database) -> &mut Vec<LinearAnswer> {
        match db {
            Database::First => &mut self.db1,
            Database::Second => &mut self.db2,
        }
    }

    pub fn m1(&self) -> usize {
        self.db1.len()
    }

    pub fn m2(&self) -> usize {
        self.db2.len()
    }

    /// Worst-case symbols downloaded per block: longest answer from each database.
    pub fn download_cost(&self) -> usize {
        let longest = |set: &[LinearAnswer]| set.iter().map(LinearAnswer::len).max().unwrap_or(0);
        longest(&self.db1) + longest(&self.db2)
    }

    /// Stacked map `[A_a; B_b]` producing the user's observation for a pair.
    pub fn pair_map(&self, a: usize, b: usize) -> FieldMatrix {
        self.db1[a]
            .map
            .stack(&self.db2[b].map)
            .expect("validated schemes share one width")
    }

    /// Short content hash of the serialized scheme.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(serialize_scheme(self).as_bytes());
        digest[..8].iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    /// Cardinality and dimension invariants. Empty means the scheme is well formed.
    pub fn validate_shape(&self) -> Vec<ShapeViolation> {
        let mut out = Vec::new();
        if self.k < 2 {
            out.push(ShapeViolation::Degenerate(format!(
                "K = {} but at least two messages are required",
                self.k
            )));
        }
        if self.l == 0 {
            out.push(ShapeViolation::Degenerate("L must be at least 1".into()));
        }
        for db in [Database::First, Database::Second] {
            let set = self.answers(db);
            if set.is_empty() || self.k == 0 || !set.len().is_multiple_of(self.k) {
                out.push(ShapeViolation::Cardinality {
                    db,
                    count: set.len(),
                    k: self.k,
                });
            }
            for (position, ans) in set.iter().enumerate() {
                if ans.index != position {
                    out.push(ShapeViolation::IndexMismatch {
                        db,
                        position,
                        index: ans.index,
                    });
                }
                if ans.map.cols() != self.width() {
                    out.push(ShapeViolation::Dimension {
                        db,
                        index: position,
                        cols: ans.map.cols(),
                        expected: self.width(),
                    });
                }
                if ans.map.field() != self.field {
                    out.push(ShapeViolation::FieldMismatch {
                        db,
                        index: position,
                    });
                }
            }
        }
        out
    }

    /// Appends `extra` randomness symbols that no answer uses yet.
    pub fn add_randomness_symbols(&mut self, extra: usize) {
        let old = self.width();
        self.r += extra;
        let new = self.width();
        for set in [&mut self.db1, &mut self.db2] {
            for ans in set.iter_mut() {
                let mut widened = FieldMatrix::zeros(self.field, ans.map.rows(), new);
                for r in 0..ans.map.rows() {
                    for c in 0..old {
                        widened.set(r, c, ans.map.get(r, c));
                    }
                }
                ans.map = widened;
            }
        }
    }

    /// Reassigns `index` fields to match positions.
    pub fn renumber(&mut self) {
        for set in [&mut self.db1, &mut self.db2] {
            for (i, a) in set.iter_mut().enumerate() {
                a.index = i;
            }
        }
    }
}

/// Accumulates rows term by term; each term adds coefficient 1 at a column.
struct RowBuilder<'a> {
    scheme: &'a Scheme,
    rows: Vec<Vec<Symbol>>,
}

impl<'a> RowBuilder<'a> {
    fn new(scheme: &'a Scheme) -> Self {
        RowBuilder {
            scheme,
            rows: Vec::new(),
        }
    }

    fn row(mut self, message_terms: &[(usize, usize)], randomness_terms: &[usize]) -> Self {
        let mut row = vec![0; self.scheme.width()];
        for &(k, l) in message_terms {
            row[self.scheme.message_col(k, l)] ^= 1;
        }
        for &j in randomness_terms {
            row[self.scheme.randomness_col(j)] ^= 1;
        }
        self.rows.push(row);
        self
    }

    fn finish(self, index: usize) -> LinearAnswer {
        LinearAnswer {
            index,
            map: FieldMatrix::from_rows(self.scheme.field, self.scheme.width(), &self.rows)
                .expect("rows built to width"),
        }
    }
}

fn empty_scheme(k: usize, l: usize, r: usize, field: Field) -> Scheme {
    Scheme {
        k,
        l,
        r,
        field,
        db1: Vec::new(),
        db2: Vec::new(),
    }
}

/// Dispatches to the builder for `variant`. `k` is ignored for [`SchemeVariant::K4Special`].
pub fn build_scheme(variant: SchemeVariant, k: usize, field: Field) -> Result<Scheme, SchemeError> {
    match variant {
        SchemeVariant::RotationRandomness | SchemeVariant::RotationMessages => {
            build_rotation_scheme(k, variant, field)
        }
        SchemeVariant::Pairwise => build_pairwise_scheme(k, field),
        SchemeVariant::K4Special => Ok(build_k4_scheme_in(field)),
        SchemeVariant::Custom => Err(SchemeError::NoBuilder("custom")),
    }
}

/// Rotation construction: K randomness symbols, database 1 sends K masked
/// message symbols, database 2 sends a single randomness symbol.
pub fn build_rotation_scheme(
    k: usize,
    variant: SchemeVariant,
    field: Field,
) -> Result<Scheme, SchemeError> {
    if k < 2 {
        return Err(SchemeError::TooFewMessages(k));
    }
    let rotate_messages = match variant {
        SchemeVariant::RotationRandomness => false,
        SchemeVariant::RotationMessages => true,
        other => return Err(SchemeError::NoBuilder(other.name())),
    };
    let mut s = empty_scheme(k, 1, k, field);
    for a in 0..k {
        let mut rb = RowBuilder::new(&s);
        for j in 0..k {
            let shifted = (j + a) % k;
            rb = if rotate_messages {
                rb.row(&[(shifted, 0)], &[j])
            } else {
                rb.row(&[(j, 0)], &[shifted])
            };
        }
        let ans = rb.finish(a);
        s.db1.push(ans);
    }
    for b in 0..k {
        let ans = RowBuilder::new(&s).row(&[], &[b]).finish(b);
        s.db2.push(ans);
    }
    Ok(s)
}

/// Pairwise-sum construction with K-1 randomness symbols and download K per block.
///
/// Decodability relies on `x + x = 0`, which holds in every GF(2^m).
pub fn build_pairwise_scheme(k: usize, field: Field) -> Result<Scheme, SchemeError> {
    if k < 2 {
        return Err(SchemeError::TooFewMessages(k));
    }
    let mut s = empty_scheme(k, 1, k - 1, field);
    for a in 0..k {
        let mut rb = RowBuilder::new(&s);
        for j in 0..k - 1 {
            // a = 0 would give W_j + W_j, which cancels to the bare mask.
            rb = if a == 0 {
                rb.row(&[], &[j])
            } else {
                rb.row(&[(j, 0), ((j + a) % k, 0)], &[j])
            };
        }
        let ans = rb.finish(a);
        s.db1.push(ans);
    }
    for b in 0..k {
        let rb = RowBuilder::new(&s);
        let ans = if b < k - 1 {
            rb.row(&[(b, 0)], &[b])
        } else {
            let all: Vec<usize> = (0..k - 1).collect();
            rb.row(&[(b, 0)], &all)
        }
        .finish(b);
        s.db2.push(ans);
    }
    Ok(s)
}

const K4_DB1: [[&str; 3]; 4] = [
    ["S1", "S2", "S3"],
    ["a1+c1+c2+S1", "b2+d1+S1+S3", "c2+S4"],
    ["a1+d2+S1+S4", "a2+d1+d2+S2", "b1+c2+S2+S3"],
    ["b1+S4", "a1+a2+b1+b2+S1+S2", "c1+d2+S1+S2+S3"],
];

const K4_DB2: [[&str; 3]; 4] = [
    ["a1+S1", "a2+S2", "S4"],
    ["b1+b2+S1+S2", "b1+S2+S3", "a1+c1+d2+S1+S4"],
    ["d1+d2+S2", "b1+c2+S4", "d1+S1+S3"],
    ["c2+S2+S3", "c1+c2+S1", "a1+a2+b2+c1+d1+S3+S4"],
];

/// Parses `a1+c2+S3` style terms: letters a..d name messages, digits pick the symbol.
fn k4_terms(expr: &str) -> (Vec<(usize, usize)>, Vec<usize>) {
    let mut msgs = Vec::new();
    let mut rand = Vec::new();
    for term in expr.split('+') {
        let (head, digit) = term.split_at(1);
        let n: usize = digit.parse().expect("well-formed constant");
        match head {
            "S" => rand.push(n - 1),
            letter => msgs.push(((letter.as_bytes()[0] - b'a') as usize, n - 1)),
        }
    }
    (msgs, rand)
}

/// The K = 4 construction over GF(2): L = 2, R = 4, three symbols per answer.
pub fn build_k4_scheme() -> Scheme {
    build_k4_scheme_in(Field::GF2)
}

/// Same coefficients lifted into a larger binary field.
pub fn build_k4_scheme_in(field: Field) -> Scheme {
    let mut s = empty_scheme(4, 2, 4, field);
    for (table, db) in [(&K4_DB1, Database::First), (&K4_DB2, Database::Second)] {
        let answers: Vec<LinearAnswer> = table
            .iter()
            .enumerate()
            .map(|(i, rows)| {
                rows.iter()
                    .fold(RowBuilder::new(&s), |rb, expr| {
                        let (m, r) = k4_terms(expr);
                        rb.row(&m, &r)
                    })
                    .finish(i)
            })
            .collect();
        *s.answers_mut(db) = answers;
    }
    s
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("missing header line")]
    MissingHeader,
    #[error("malformed header: {0}")]
    BadHeader(String),
    #[error("{db} declares {count} answers, not a positive multiple of K = {k} (answer-set cardinality must be a multiple of K)")]
    Cardinality {
        db: Database,
        count: usize,
        k: usize,
    },
    #[error("expected `answer {db} {index} <rows>`, found {found:?}")]
    BadAnswerHeader {
        db: usize,
        index: usize,
        found: String,
    },
    #[error("expected {expected} coefficients, found {found}")]
    CoefficientCount { expected: usize, found: usize },
    #[error("coefficient {value:?} is not an element of GF({order})")]
    CoefficientRange { value: String, order: u32 },
    #[error("unexpected end of file: {0}")]
    UnexpectedEof(String),
    #[error("trailing content after the last answer")]
    Trailing,
}

/// Writes the canonical text form. `parse_scheme` inverts it exactly.
pub fn serialize_scheme(s: &Scheme) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "rspir {} {} {} {} {} {}",
        s.k,
        s.l,
        s.r,
        s.field.degree(),
        s.m1(),
        s.m2()
    );
    for db in [Database::First, Database::Second] {
        for ans in s.answers(db) {
            let _ = writeln!(
                out,
                "answer {} {} {}",
                db.number(),
                ans.index + 1,
                ans.len()
            );
            for row in ans.map.row_vectors() {
                let mut first = true;
                for v in row {
                    if !first {
                        out.push(' ');
                    }
                    first = false;
                    let _ = write!(out, "{v}");
                }
                out.push('\n');
            }
        }
    }
    out
}

fn parse_header(
    text: &str,
    line: usize,
) -> Result<(usize, usize, usize, Field, usize, usize), ParseError> {
    let err = |msg: String| ParseError {
        line,
        kind: ParseErrorKind::BadHeader(msg),
    };
    let mut parts = text.split_whitespace();
    if parts.next() != Some("rspir") {
        return Err(err("expected leading `rspir`".into()));
    }
    let nums: Vec<usize> = parts
        .map(|p| {
            p.parse::<usize>()
                .map_err(|_| err(format!("{p:?} is not a count")))
        })
        .collect::<Result<_, _>>()?;
    let [k, l, r, m, m1, m2] = nums[..] else {
        return Err(err(format!("expected 6 integers, found {}", nums.len())));
    };
    if k < 2 {
        return Err(err(format!("K = {k}, at least 2 messages required")));
    }
    if l == 0 {
        return Err(err("L must be at least 1".into()));
    }
    let field = u32::try_from(m)
        .ok()
        .and_then(|m| Field::new(m).ok())
        .ok_or_else(|| err(format!("unsupported extension degree m = {m}")))?;
    k.checked_mul(l)
        .and_then(|kl| kl.checked_add(r))
        .ok_or_else(|| err("K·L + R overflows".into()))?;
    Ok((k, l, r, field, m1, m2))
}

/// Parses the line-oriented scheme format. Blank lines and `#` comments are skipped.
pub fn parse_scheme(text: &str) -> Result<Scheme, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let last_line = text.lines().count().max(1);

    let (hline, htext) = lines.next().ok_or(ParseError {
        line: 1,
        kind: ParseErrorKind::MissingHeader,
    })?;
    let (k, l, r, field, m1, m2) = parse_header(htext, hline)?;
    for (db, count) in [(Database::First, m1), (Database::Second, m2)] {
        if count == 0 || count % k != 0 {
            return Err(ParseError {
                line: hline,
                kind: ParseErrorKind::Cardinality { db, count, k },
            });
        }
    }
    let mut scheme = empty_scheme(k, l, r, field);
    let width = scheme.width();

    for (db, count) in [(Database::First, m1), (Database::Second, m2)] {
        for index in 0..count {
            let eof = |what: String| ParseError {
                line: last_line,
                kind: ParseErrorKind::UnexpectedEof(what),
            };
            let (aline, atext) = lines
                .next()
                .ok_or_else(|| eof(format!("{db} answer {} missing", index + 1)))?;
            let bad = || ParseError {
                line: aline,
                kind: ParseErrorKind::BadAnswerHeader {
                    db: db.number(),
                    index: index + 1,
                    found: atext.to_string(),
                },
            };
            let fields: Vec<&str> = atext.split_whitespace().collect();
            let rows = match fields[..] {
                ["answer", d, i, n]
                    if d.parse() == Ok(db.number()) && i.parse() == Ok(index + 1) =>
                {
                    n.parse::<usize>().map_err(|_| bad())?
                }
                _ => return Err(bad()),
            };
            let mut entries = Vec::new();
            for row in 0..rows {
                let (rline, rtext) = lines.next().ok_or_else(|| {
                    eof(format!("{db} answer {} row {} missing", index + 1, row + 1))
                })?;
                let before = entries.len();
                for tok in rtext.split_whitespace() {
                    let v = tok
                        .parse::<u32>()
                        .ok()
                        .filter(|&v| field.contains(v))
                        .ok_or_else(|| ParseError {
                            line: rline,
                            kind: ParseErrorKind::CoefficientRange {
                                value: tok.to_string(),
                                order: field.order(),
                            },
                        })?;
                    entries.push(v as Symbol);
                    if entries.len() - before > width {
                        break;
                    }
                }
                let found = entries.len() - before;
                if found != width {
                    return Err(ParseError {
                        line: rline,
                        kind: ParseErrorKind::CoefficientCount {
                            expected: width,
                            found: rtext.split_whitespace().count(),
                        },
                    });
                }
            }
            let map = FieldMatrix::new(field, rows, width, entries).expect("entries checked");
            scheme.answers_mut(db).push(LinearAnswer { index, map });
        }
    }
    if let Some((line, _)) = lines.next() {
        return Err(ParseError {
            line,
            kind: ParseErrorKind::Trailing,
        });
    }
    Ok(scheme)
}
