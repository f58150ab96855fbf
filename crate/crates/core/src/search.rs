//! Exhaustive search over small linear schemes.
//!
//! Only the row space of an answer matters to the user, so each answer is
//! enumerated as a subspace of GF(q)^(K·L+R) in reduced row echelon form with
//! dimension at most the declared answer length. Answer sets are enumerated as
//! multisets (answer order inside a database is irrelevant), and results are
//! reported once per class under permutations of the randomness symbols.
//!
//! Pruning rules:
//! - answer-set sizes must be multiples of K, otherwise the space is empty;
//! - a single answer whose row space meets the message-only subspace can never
//!   appear in a valid scheme, since its row would reveal a fixed combination
//!   of messages for every θ in that row;
//! - a pair must reveal exactly one message and nothing about the others;
//! - partial θ rows and columns may not exceed their uniform counts.
//!
//! Every returned scheme is re-checked with the enumeration verifier.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::field::{Field, Symbol};
use crate::matrix::FieldMatrix;
use crate::scheme::{serialize_scheme, LinearAnswer, Scheme};
use crate::verify::verify;

/// Largest candidate-answer list the search will build.
pub const MAX_CANDIDATES: usize = 1 << 18;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchSpace {
    pub k: usize,
    pub l: usize,
    pub r: usize,
    pub field: Field,
    /// Maximum symbols per answer (dimension bound of each row space).
    pub max_len: usize,
    pub m1: usize,
    pub m2: usize,
}

impl SearchSpace {
    /// The K x K case with a shared answer-length bound.
    pub fn square(k: usize, l: usize, r: usize, field: Field, max_len: usize) -> Self {
        SearchSpace {
            k,
            l,
            r,
            field,
            max_len,
            m1: k,
            m2: k,
        }
    }

    pub fn width(&self) -> usize {
        self.k * self.l + self.r
    }
}

/// Position in the enumeration order: the candidate index chosen at every
/// depth on the way to the next unvisited node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchCursor(pub Vec<usize>);

impl std::fmt::Display for SearchCursor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl std::str::FromStr for SearchCursor {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().is_empty() {
            return Ok(SearchCursor(Vec::new()));
        }
        s.split(',')
            .map(|p| p.trim().parse())
            .collect::<Result<_, _>>()
            .map(SearchCursor)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found { schemes: Vec<Scheme>, nodes: u64 },
    ExhaustedWithNone { nodes: u64 },
}

impl SearchOutcome {
    pub fn schemes(&self) -> &[Scheme] {
        match self {
            SearchOutcome::Found { schemes, .. } => schemes,
            SearchOutcome::ExhaustedWithNone { .. } => &[],
        }
    }

    pub fn nodes(&self) -> u64 {
        match self {
            SearchOutcome::Found { nodes, .. } | SearchOutcome::ExhaustedWithNone { nodes } => {
                *nodes
            }
        }
    }

    pub fn is_exhausted_with_none(&self) -> bool {
        matches!(self, SearchOutcome::ExhaustedWithNone { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("node budget of {budget} exhausted with {} scheme(s) found so far", .found.len())]
    BudgetExceeded {
        budget: u64,
        found: Vec<Scheme>,
        cursor: SearchCursor,
    },
    #[error("search space is degenerate: {0}")]
    Degenerate(String),
    #[error("more than {MAX_CANDIDATES} candidate answers")]
    TooManyCandidates,
}

/// All subspaces of dimension `0..=max_dim` of GF(q)^n, as RREF bases.
pub fn candidate_answers(
    field: Field,
    n: usize,
    max_dim: usize,
) -> Result<Vec<FieldMatrix>, SearchError> {
    let mut out = Vec::new();
    let q = field.order() as u64;
    for dim in 0..=max_dim.min(n) {
        for pivots in combinations(n, dim) {
            // Free entries: row i, columns right of its pivot that are not pivots.
            let free: Vec<(usize, usize)> = pivots
                .iter()
                .enumerate()
                .flat_map(|(i, &p)| {
                    (p + 1..n)
                        .filter(|c| !pivots.contains(c))
                        .map(move |c| (i, c))
                })
                .collect();
            let fillings = q
                .checked_pow(free.len() as u32)
                .filter(|&f| f <= MAX_CANDIDATES as u64)
                .ok_or(SearchError::TooManyCandidates)?;
            for fill in 0..fillings {
                let mut m = FieldMatrix::zeros(field, dim, n);
                for (i, &p) in pivots.iter().enumerate() {
                    m.set(i, p, 1);
                }
                let mut rest = fill;
                for &(i, c) in &free {
                    m.set(i, c, (rest % q) as Symbol);
                    rest /= q;
                }
                out.push(m);
                if out.len() > MAX_CANDIDATES {
                    return Err(SearchError::TooManyCandidates);
                }
            }
        }
    }
    Ok(out)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn unit_rows(field: Field, n: usize, cols: impl Iterator<Item = usize>) -> FieldMatrix {
    let rows: Vec<Vec<Symbol>> = cols
        .map(|c| {
            let mut r = vec![0; n];
            r[c] = 1;
            r
        })
        .collect();
    FieldMatrix::from_rows(field, n, &rows).expect("unit rows")
}

struct Evaluator<'a> {
    space: &'a SearchSpace,
    candidates: Vec<FieldMatrix>,
    pairs: HashMap<(usize, usize), Option<usize>>,
}

impl<'a> Evaluator<'a> {
    fn message_cols(&self, k: usize) -> impl Iterator<Item = usize> {
        let l = self.space.l;
        k * l..(k + 1) * l
    }

    /// Row space avoids every nonzero message-only combination.
    fn answer_admissible(&self, m: &FieldMatrix) -> bool {
        let s = self.space;
        let units = unit_rows(s.field, s.width(), 0..s.k * s.l);
        m.stack(&units).expect("width").rank() == m.rank() + s.k * s.l
    }

    /// The single message a pair reveals while hiding the rest, if any.
    fn pair(&mut self, i: usize, j: usize) -> Option<usize> {
        if let Some(&v) = self.pairs.get(&(i, j)) {
            return v;
        }
        let s = self.space;
        let n = s.width();
        let g = self.candidates[i]
            .stack(&self.candidates[j])
            .expect("width");
        let rank = g.rank();
        let mut result = None;
        for k in 0..s.k {
            let own = unit_rows(s.field, n, self.message_cols(k));
            if g.stack(&own).expect("width").rank() != rank {
                continue;
            }
            let others = unit_rows(
                s.field,
                n,
                (0..s.k)
                    .filter(|&o| o != k)
                    .flat_map(|o| self.message_cols(o)),
            );
            if g.stack(&others).expect("width").rank() == rank + others.rows() {
                result = Some(k);
            }
            break;
        }
        self.pairs.insert((i, j), result);
        result
    }
}

/// Assignment order: A_0, then B_0..B_{M2-1}, then A_1..A_{M1-1}.
#[derive(Clone, Copy)]
enum Slot {
    A(usize),
    B(usize),
}

struct Searcher<'a> {
    eval: Evaluator<'a>,
    slots: Vec<Slot>,
    a: Vec<usize>,
    b: Vec<usize>,
    theta: Vec<Vec<Option<usize>>>,
    nodes: u64,
    budget: u64,
    path: Vec<usize>,
    found: BTreeMap<String, Scheme>,
}

enum Flow {
    Continue,
    Stop(SearchCursor),
}

impl<'a> Searcher<'a> {
    fn space(&self) -> &SearchSpace {
        self.eval.space
    }

    fn row_ok(&self, a: usize, complete: bool) -> bool {
        let s = self.space();
        let per = s.m2 / s.k;
        let mut counts = vec![0; s.k];
        for t in self.theta[a].iter().flatten() {
            counts[*t] += 1;
        }
        counts
            .iter()
            .all(|&c| if complete { c == per } else { c <= per })
    }

    fn col_ok(&self, b: usize, filled_rows: usize) -> bool {
        let s = self.space();
        let per = s.m1 / s.k;
        let mut counts = vec![0; s.k];
        for row in &self.theta[..filled_rows] {
            if let Some(t) = row[b] {
                counts[t] += 1;
            }
        }
        let complete = filled_rows == s.m1;
        counts
            .iter()
            .all(|&c| if complete { c == per } else { c <= per })
    }

    /// Places candidate `cand` into `slot`; returns false if a constraint fails.
    fn place(&mut self, slot: Slot, cand: usize) -> bool {
        let m2 = self.space().m2;
        match slot {
            Slot::B(j) => {
                self.b[j] = cand;
                let Some(t) = self.eval.pair(self.a[0], cand) else {
                    return false;
                };
                self.theta[0][j] = Some(t);
                self.row_ok(0, j + 1 == m2) && self.col_ok(j, 1)
            }
            Slot::A(i) => {
                self.a[i] = cand;
                if i == 0 {
                    return true;
                }
                for j in 0..m2 {
                    let Some(t) = self.eval.pair(cand, self.b[j]) else {
                        return false;
                    };
                    self.theta[i][j] = Some(t);
                }
                self.row_ok(i, true) && (0..m2).all(|j| self.col_ok(j, i + 1))
            }
        }
    }

    fn unplace(&mut self, slot: Slot) {
        match slot {
            Slot::B(j) => self.theta[0][j] = None,
            Slot::A(i) => {
                for t in &mut self.theta[i] {
                    *t = None;
                }
            }
        }
    }

    fn lower_bound(&self, slot: Slot) -> usize {
        match slot {
            Slot::A(0) | Slot::B(0) => 0,
            Slot::A(i) => self.a[i - 1],
            Slot::B(j) => self.b[j - 1],
        }
    }

    fn record(&mut self) {
        let s = *self.space();
        let build = |idx: &[usize], cands: &[FieldMatrix]| {
            idx.iter()
                .enumerate()
                .map(|(i, &c)| LinearAnswer {
                    index: i,
                    map: cands[c].clone(),
                })
                .collect::<Vec<_>>()
        };
        let scheme = Scheme {
            k: s.k,
            l: s.l,
            r: s.r,
            field: s.field,
            db1: build(&self.a, &self.eval.candidates),
            db2: build(&self.b, &self.eval.candidates),
        };
        let canon = canonical_form(&scheme);
        let key = serialize_scheme(&canon);
        self.found.entry(key).or_insert(canon);
    }

    fn rec(&mut self, depth: usize, resume: Option<&[usize]>) -> Flow {
        if depth == self.slots.len() {
            self.record();
            return Flow::Continue;
        }
        let slot = self.slots[depth];
        let lo = self.lower_bound(slot);
        let start = resume
            .and_then(|r| r.get(depth).copied())
            .unwrap_or(0)
            .max(lo);
        let total = self.eval.candidates.len();
        for pos in start..total {
            if self.nodes >= self.budget {
                let mut cursor = self.path.clone();
                cursor.push(pos);
                return Flow::Stop(SearchCursor(cursor));
            }
            self.nodes += 1;
            if self.place(slot, pos) {
                self.path.push(pos);
                let child_resume = resume.filter(|r| r.get(depth) == Some(&pos));
                let flow = self.rec(depth + 1, child_resume);
                self.path.pop();
                if let Flow::Stop(c) = flow {
                    self.unplace(slot);
                    return Flow::Stop(c);
                }
            }
            self.unplace(slot);
        }
        Flow::Continue
    }
}

/// Applies a column permutation of the randomness coordinates.
fn permute_randomness(s: &Scheme, perm: &[usize]) -> Scheme {
    let base = s.k * s.l;
    let mut out = s.clone();
    for (src, dst) in s
        .db1
        .iter()
        .chain(&s.db2)
        .zip(out.db1.iter_mut().chain(out.db2.iter_mut()))
    {
        let mut m = src.map.clone();
        for r in 0..m.rows() {
            for (j, &p) in perm.iter().enumerate() {
                m.set(r, base + p, src.map.get(r, base + j));
            }
        }
        dst.map = m.row_space_basis();
    }
    out
}

fn sort_answers(s: &mut Scheme) {
    for set in [&mut s.db1, &mut s.db2] {
        let mut maps: Vec<FieldMatrix> = set.iter().map(|a| a.map.row_space_basis()).collect();
        maps.sort_by(|x, y| (x.rows(), x.entries()).cmp(&(y.rows(), y.entries())));
        *set = maps
            .into_iter()
            .enumerate()
            .map(|(index, map)| LinearAnswer { index, map })
            .collect();
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Representative of a scheme's class under answer reordering within each
/// database, randomness-symbol permutation, and change of basis of each answer.
pub fn canonical_form(s: &Scheme) -> Scheme {
    permutations(s.r)
        .iter()
        .map(|perm| {
            let mut c = permute_randomness(s, perm);
            sort_answers(&mut c);
            c
        })
        .min_by_key(serialize_scheme)
        .expect("at least the identity permutation")
}

/// Enumerates every scheme in `space` that passes all verifier checks.
pub fn search_schemes(space: &SearchSpace, budget: u64) -> Result<SearchOutcome, SearchError> {
    search_schemes_from(space, budget, None)
}

/// Same as [`search_schemes`], resuming at a cursor from a previous budget error.
pub fn search_schemes_from(
    space: &SearchSpace,
    budget: u64,
    cursor: Option<&SearchCursor>,
) -> Result<SearchOutcome, SearchError> {
    if space.k < 2 || space.l == 0 {
        return Err(SearchError::Degenerate(format!(
            "K = {}, L = {}",
            space.k, space.l
        )));
    }
    if space.m1 == 0
        || space.m2 == 0
        || !space.m1.is_multiple_of(space.k)
        || !space.m2.is_multiple_of(space.k)
    {
        return Ok(SearchOutcome::ExhaustedWithNone { nodes: 0 });
    }
    let candidates = candidate_answers(space.field, space.width(), space.max_len)?;
    let mut eval = Evaluator {
        space,
        candidates,
        pairs: HashMap::new(),
    };
    let admissible: Vec<FieldMatrix> = eval
        .candidates
        .iter()
        .filter(|m| eval.answer_admissible(m))
        .cloned()
        .collect();
    eval.candidates = admissible;

    let mut slots = vec![Slot::A(0)];
    slots.extend((0..space.m2).map(Slot::B));
    slots.extend((1..space.m1).map(Slot::A));
    let mut searcher = Searcher {
        eval,
        slots,
        a: vec![0; space.m1],
        b: vec![0; space.m2],
        theta: vec![vec![None; space.m2]; space.m1],
        nodes: 0,
        budget,
        path: Vec::new(),
        found: BTreeMap::new(),
    };
    let flow = searcher.rec(0, cursor.map(|c| c.0.as_slice()));
    let nodes = searcher.nodes;
    let schemes: Vec<Scheme> = searcher
        .found
        .into_values()
        .filter(|s| verify(s).map(|r| r.all_checks_pass()).unwrap_or(false))
        .collect();
    match flow {
        Flow::Stop(cursor) => Err(SearchError::BudgetExceeded {
            budget,
            found: schemes,
            cursor,
        }),
        Flow::Continue if schemes.is_empty() => Ok(SearchOutcome::ExhaustedWithNone { nodes }),
        Flow::Continue => Ok(SearchOutcome::Found { schemes, nodes }),
    }
}
