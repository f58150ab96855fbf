//! Exact verification of the reliability and privacy constraints, plus rate and
//! randomness audits.
//!
//! Every check enumerates the full realization space of one block: all
//! `q^(K·L+R)` assignments of messages and common randomness, each with equal
//! weight. Decisions compare integer counts, so a PASS means exactly zero
//! leakage and exactly uniform θ laws.

use std::fmt::{self, Write as _};

use num_rational::Rational64;
use thiserror::Error;

use crate::decode::{analyze_pair, DecodeTable};
use crate::entropy::{
    conditional_entropy, digits, entropy, mutual_information, Base, Information, JointDistribution,
};
use crate::field::{Field, Symbol};
use crate::scheme::{Database, Scheme, ShapeViolation};

/// Largest realization space the verifier will enumerate.
pub const MAX_REALIZATIONS: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("scheme shape is invalid: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidShape(Vec<ShapeViolation>),
    #[error("realization space q^{exponent} with q = {order} exceeds the enumeration limit")]
    TooLarge { order: u32, exponent: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckName {
    Cardinality,
    Determinism,
    Independence,
    Reliability,
    DatabasePrivacy,
    UserPrivacy,
}

impl CheckName {
    pub const ALL: [CheckName; 6] = [
        CheckName::Cardinality,
        CheckName::Determinism,
        CheckName::Independence,
        CheckName::Reliability,
        CheckName::DatabasePrivacy,
        CheckName::UserPrivacy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Cardinality => "cardinality",
            CheckName::Determinism => "determinism",
            CheckName::Independence => "independence",
            CheckName::Reliability => "reliability",
            CheckName::DatabasePrivacy => "database_privacy",
            CheckName::UserPrivacy => "user_privacy",
        }
    }

    fn describe(self) -> &'static str {
        match self {
            CheckName::Cardinality => "answer-set sizes are multiples of K",
            CheckName::Determinism => "H(A_a, B_b | W, S) = 0",
            CheckName::Independence => "H(W, S) = H(W) + H(S)",
            CheckName::Reliability => "H(W_theta | A_a, B_b) = 0 for every pair",
            CheckName::DatabasePrivacy => "I(W_rest ; A_a, B_b) = 0 for every pair",
            CheckName::UserPrivacy => "theta uniform over [K] for each fixed a and each fixed b",
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of one check. `witness` names the first offending item in a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub name: CheckName,
    pub passed: bool,
    pub witness: Option<String>,
}

impl CheckRecord {
    fn pass(name: CheckName) -> Self {
        CheckRecord {
            name,
            passed: true,
            witness: None,
        }
    }

    fn fail(name: CheckName, witness: String) -> Self {
        CheckRecord {
            name,
            passed: false,
            witness: Some(witness),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditStatus {
    /// Measured value equals the known optimum.
    Meets,
    /// Valid but suboptimal (lower rate, or more randomness than needed).
    Suboptimal,
    /// Better than the converse bound allows; only possible for a broken scheme.
    ViolatesBound,
    /// No known optimum for this K.
    Open,
}

impl AuditStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            AuditStatus::Meets => "meets",
            AuditStatus::Suboptimal => "suboptimal",
            AuditStatus::ViolatesBound => "violates-bound",
            AuditStatus::Open => "open",
        }
    }
}

/// Known capacity of two-database random SPIR, where settled.
pub fn capacity(k: usize) -> Option<Rational64> {
    match k {
        2 => Some(Rational64::new(1, 2)),
        3 | 4 => Some(Rational64::new(1, 3)),
        _ => None,
    }
}

/// Minimum common randomness per message length L, where settled.
pub fn minimum_randomness_per_l(k: usize) -> Option<Rational64> {
    match k {
        2 => Some(Rational64::from_integer(1)),
        3 | 4 => Some(Rational64::from_integer(2)),
        _ => None,
    }
}

fn bits_for(count: usize) -> usize {
    if count <= 1 {
        0
    } else {
        (usize::BITS - (count - 1).leading_zeros()) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateAudit {
    /// Symbols per block: longest answer from each database.
    pub download_cost: usize,
    pub l: usize,
    pub rate: Rational64,
    pub capacity: Option<Rational64>,
    /// `capacity - rate`.
    pub gap: Option<Rational64>,
    pub status: AuditStatus,
    /// `ceil(log2 M1) + ceil(log2 M2)`, sent once per run.
    pub index_bits: usize,
    pub symbol_bits: u32,
}

impl RateAudit {
    /// Rate in bits when the answer indices are charged once over `blocks` blocks.
    pub fn finite_rate(&self, blocks: u64) -> Rational64 {
        let payload = self.l as i64 * blocks as i64 * self.symbol_bits as i64;
        let cost = self.download_cost as i64 * blocks as i64 * self.symbol_bits as i64
            + self.index_bits as i64;
        if cost == 0 {
            Rational64::from_integer(0)
        } else {
            Rational64::new(payload, cost)
        }
    }
}

pub fn audit_rate(s: &Scheme) -> RateAudit {
    let d = s.download_cost();
    let rate = if d == 0 {
        Rational64::from_integer(0)
    } else {
        Rational64::new(s.l as i64, d as i64)
    };
    let cap = capacity(s.k);
    let status = match cap {
        None => AuditStatus::Open,
        Some(c) if rate == c => AuditStatus::Meets,
        Some(c) if rate < c => AuditStatus::Suboptimal,
        Some(_) => AuditStatus::ViolatesBound,
    };
    RateAudit {
        download_cost: d,
        l: s.l,
        rate,
        capacity: cap,
        gap: cap.map(|c| c - rate),
        status,
        index_bits: bits_for(s.m1()) + bits_for(s.m2()),
        symbol_bits: s.field.degree(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomnessAudit {
    /// H(S) in q-ary symbols per block; S is uniform so this equals R.
    pub entropy: Rational64,
    pub per_l: Rational64,
    pub minimum_per_l: Option<Rational64>,
    /// `per_l - minimum_per_l`.
    pub gap: Option<Rational64>,
    pub status: AuditStatus,
}

pub fn audit_randomness(s: &Scheme) -> RandomnessAudit {
    // S is uniform over q^R.
    let h = Rational64::from_integer(s.r as i64);
    let per_l = h / Rational64::from_integer(s.l.max(1) as i64);
    let min = minimum_randomness_per_l(s.k);
    let status = match min {
        None => AuditStatus::Open,
        Some(m) if per_l == m => AuditStatus::Meets,
        Some(m) if per_l > m => AuditStatus::Suboptimal,
        Some(_) => AuditStatus::ViolatesBound,
    };
    RandomnessAudit {
        entropy: h,
        per_l,
        minimum_per_l: min,
        gap: min.map(|m| per_l - m),
        status,
    }
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

fn realization_count(field: Field, n: usize) -> Result<u64, VerifyError> {
    let too_large = VerifyError::TooLarge {
        order: field.order(),
        exponent: n,
    };
    let bits = field.degree() as usize * n;
    if bits >= 63 {
        return Err(too_large);
    }
    let size = 1u64 << bits;
    if size > MAX_REALIZATIONS {
        return Err(too_large);
    }
    Ok(size)
}

/// Joint distribution of `(observation ‖ W_θ ‖ other messages)` for one pair.
struct PairJoint {
    joint: JointDistribution,
    obs: Vec<usize>,
    target: Vec<usize>,
    rest: Vec<usize>,
}

type ThetaGrid = Vec<Vec<Option<usize>>>;

fn pair_joints(s: &Scheme, theta: &ThetaGrid) -> Result<Vec<Vec<Option<PairJoint>>>, VerifyError> {
    let size = realization_count(s.field, s.width())?;
    let mut out: Vec<Vec<Option<PairJoint>>> = theta
        .iter()
        .enumerate()
        .map(|(a, row)| {
            row.iter()
                .enumerate()
                .map(|(b, t)| {
                    t.map(|_| {
                        let n_obs = s.db1[a].len() + s.db2[b].len();
                        let ml = s.k * s.l;
                        PairJoint {
                            joint: JointDistribution::new(),
                            obs: (0..n_obs).collect(),
                            target: (n_obs..n_obs + s.l).collect(),
                            rest: (n_obs + s.l..n_obs + ml).collect(),
                        }
                    })
                })
                .collect()
        })
        .collect();
    for idx in 0..size {
        let x = digits(idx, s.field, s.width());
        let out1: Vec<Vec<Symbol>> = s
            .db1
            .iter()
            .map(|a| a.map.mul_vec(&x).expect("width"))
            .collect();
        let out2: Vec<Vec<Symbol>> = s
            .db2
            .iter()
            .map(|b| b.map.mul_vec(&x).expect("width"))
            .collect();
        for (a, row) in out.iter_mut().enumerate() {
            for (b, slot) in row.iter_mut().enumerate() {
                let (Some(pj), Some(k)) = (slot.as_mut(), theta[a][b]) else {
                    continue;
                };
                let mut tuple = out1[a].clone();
                tuple.extend_from_slice(&out2[b]);
                tuple.extend((0..s.l).map(|l| x[s.message_col(k, l)]));
                for other in (0..s.k).filter(|&o| o != k) {
                    tuple.extend((0..s.l).map(|l| x[s.message_col(other, l)]));
                }
                pj.joint.add(tuple, 1);
            }
        }
    }
    Ok(out)
}

fn table_grid(t: &DecodeTable) -> ThetaGrid {
    t.theta
        .iter()
        .map(|row| row.iter().map(|&k| Some(k)).collect())
        .collect()
}

fn pair_label(a: usize, b: usize) -> String {
    format!("a={} b={}", a + 1, b + 1)
}

fn reliability_from(
    s: &Scheme,
    theta: &ThetaGrid,
    joints: &[Vec<Option<PairJoint>>],
) -> CheckRecord {
    let name = CheckName::Reliability;
    for (a, row) in theta.iter().enumerate() {
        for (b, t) in row.iter().enumerate() {
            let Some(k) = t else {
                return CheckRecord::fail(name, format!("{} decodes no message", pair_label(a, b)));
            };
            let pj = joints[a][b]
                .as_ref()
                .expect("joint built for every decodable pair");
            if !pj.joint.determines(&pj.obs, &pj.target) {
                let h = conditional_entropy(&pj.joint, &pj.target, &pj.obs, Base::QAry(s.field));
                return CheckRecord::fail(
                    name,
                    format!("{} H(W_{}|A,B)={h}", pair_label(a, b), k + 1),
                );
            }
        }
    }
    CheckRecord::pass(name)
}

fn database_privacy_from(
    s: &Scheme,
    theta: &ThetaGrid,
    joints: &[Vec<Option<PairJoint>>],
) -> CheckRecord {
    let name = CheckName::DatabasePrivacy;
    for (a, row) in theta.iter().enumerate() {
        for (b, t) in row.iter().enumerate() {
            let (Some(k), Some(pj)) = (t, joints[a][b].as_ref()) else {
                continue;
            };
            if !pj.joint.independent(&pj.rest, &pj.obs) {
                let i = mutual_information(&pj.joint, &pj.rest, &pj.obs, Base::QAry(s.field));
                return CheckRecord::fail(
                    name,
                    format!("{} theta={} I(W_rest;A,B)={i}", pair_label(a, b), k + 1),
                );
            }
        }
    }
    CheckRecord::pass(name)
}

fn user_privacy_from(k: usize, theta: &ThetaGrid) -> CheckRecord {
    let name = CheckName::UserPrivacy;
    let m1 = theta.len();
    let m2 = theta.first().map_or(0, Vec::len);
    let tally = |cells: &mut dyn Iterator<Item = Option<usize>>| {
        let mut counts = vec![0usize; k];
        let mut undecided = 0;
        for c in cells {
            match c {
                Some(i) if i < k => counts[i] += 1,
                _ => undecided += 1,
            }
        }
        (counts, undecided)
    };
    let render = |counts: &[usize]| {
        counts
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",")
    };
    for (a, row) in theta.iter().enumerate() {
        let (counts, undecided) = tally(&mut row.iter().copied());
        if undecided > 0 || !m2.is_multiple_of(k) || counts.iter().any(|&c| c != m2 / k) {
            return CheckRecord::fail(name, format!("row a={} counts={}", a + 1, render(&counts)));
        }
    }
    for b in 0..m2 {
        let (counts, undecided) = tally(&mut theta.iter().map(|row| row[b]));
        if undecided > 0 || !m1.is_multiple_of(k) || counts.iter().any(|&c| c != m1 / k) {
            return CheckRecord::fail(
                name,
                format!("column b={} counts={}", b + 1, render(&counts)),
            );
        }
    }
    CheckRecord::pass(name)
}

/// Answer-set cardinalities are positive multiples of K.
pub fn check_cardinality(s: &Scheme) -> CheckRecord {
    for db in [Database::First, Database::Second] {
        let count = s.answers(db).len();
        if count == 0 || !count.is_multiple_of(s.k) {
            return CheckRecord::fail(
                CheckName::Cardinality,
                format!("db={} M={count} K={}", db.number(), s.k),
            );
        }
    }
    CheckRecord::pass(CheckName::Cardinality)
}

/// `H(W_θ | A_a, B_b) = 0` for every pair, by enumeration with θ from the table.
pub fn check_reliability(s: &Scheme, t: &DecodeTable) -> Result<CheckRecord, VerifyError> {
    let theta = table_grid(t);
    let joints = pair_joints(s, &theta)?;
    Ok(reliability_from(s, &theta, &joints))
}

/// `I(W_rest ; A_a, B_b) = 0` for every pair.
pub fn check_database_privacy(s: &Scheme, t: &DecodeTable) -> Result<CheckRecord, VerifyError> {
    let theta = table_grid(t);
    let joints = pair_joints(s, &theta)?;
    Ok(database_privacy_from(s, &theta, &joints))
}

/// Counting form of the uniform θ laws: every row holds each message M2/K
/// times and every column holds each message M1/K times. Together with
/// [`check_reliability`] (θ depends on the pair only, never on the
/// realization) this is exactly the independence of θ from each database's view.
pub fn check_user_privacy(s: &Scheme, t: &DecodeTable) -> CheckRecord {
    user_privacy_from(s.k, &table_grid(t))
}

/// Draws the common randomness for a given message assignment and seed.
pub type RandomnessSampler<'a> = dyn Fn(&[Symbol], u64) -> Vec<Symbol> + 'a;

/// Independence of messages and common randomness for an arbitrary sampler.
///
/// Messages range over all `q^(K·L)` values; for each, the sampler is run on
/// every seed in `seeds`. The resulting joint of `(W, S)` must factorize
/// exactly.
pub fn check_independence_with(
    s: &Scheme,
    sampler: &RandomnessSampler<'_>,
    seeds: std::ops::Range<u64>,
) -> Result<(CheckRecord, JointDistribution), VerifyError> {
    let ml = s.k * s.l;
    let size = realization_count(s.field, ml)?;
    let mut joint = JointDistribution::new();
    for idx in 0..size {
        let w = digits(idx, s.field, ml);
        for seed in seeds.clone() {
            let mut tuple = w.clone();
            tuple.extend(sampler(&w, seed));
            joint.add(tuple, 1);
        }
    }
    let n = joint.arity();
    let wc: Vec<usize> = (0..ml).collect();
    let sc: Vec<usize> = (ml..n).collect();
    let record = if joint.independent(&wc, &sc) {
        CheckRecord::pass(CheckName::Independence)
    } else {
        let i = mutual_information(&joint, &wc, &sc, Base::QAry(s.field));
        CheckRecord::fail(CheckName::Independence, format!("I(W;S)={i}"))
    };
    Ok((record, joint))
}

/// Answers are functions of `(W, S)`, and the uniform sampling model makes
/// `W` and `S` independent with `H(W, S) = K·L + R`.
pub fn check_determinism_and_independence(s: &Scheme) -> Result<[CheckRecord; 2], VerifyError> {
    determinism_and_independence(s).map(|(records, _)| records)
}

/// Also returns the measured `H(W, S)`.
fn determinism_and_independence(
    s: &Scheme,
) -> Result<([CheckRecord; 2], Information), VerifyError> {
    let size = realization_count(s.field, s.width())?;
    let mut determinism = CheckRecord::pass(CheckName::Determinism);
    'answers: for db in [Database::First, Database::Second] {
        for ans in s.answers(db) {
            if ans.map.cols() != s.width() {
                determinism = CheckRecord::fail(
                    CheckName::Determinism,
                    format!(
                        "db={} answer={} not a map of (W,S)",
                        db.number(),
                        ans.index + 1
                    ),
                );
                break 'answers;
            }
            let mut joint = JointDistribution::new();
            for idx in 0..size {
                let mut tuple = digits(idx, s.field, s.width());
                tuple.extend(ans.map.mul_vec(&tuple).expect("width checked"));
                joint.add(tuple, 1);
            }
            let inputs: Vec<usize> = (0..s.width()).collect();
            let outputs: Vec<usize> = (s.width()..joint.arity()).collect();
            if !joint.determines(&inputs, &outputs) {
                determinism = CheckRecord::fail(
                    CheckName::Determinism,
                    format!("db={} answer={}", db.number(), ans.index + 1),
                );
                break 'answers;
            }
        }
    }

    let field = s.field;
    let r = s.r;
    let uniform = move |_: &[Symbol], seed: u64| digits(seed, field, r);
    let seeds = 0..realization_count(s.field, s.r)?;
    let (mut independence, joint) = check_independence_with(s, &uniform, seeds)?;
    let h = entropy(&joint, Base::QAry(s.field));
    let expected = Rational64::from_integer(s.width() as i64);
    if independence.passed && h.exact != Some(expected) {
        independence = CheckRecord::fail(
            CheckName::Independence,
            format!("H(W,S)={h} expected {expected}"),
        );
    }
    Ok(([determinism, independence], h))
}

// ---------------------------------------------------------------------------
// Full report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub k: usize,
    pub l: usize,
    pub r: usize,
    pub field: Field,
    pub m1: usize,
    pub m2: usize,
    /// θ per pair (zero-based), `None` where no message is decodable.
    pub theta: Vec<Vec<Option<usize>>>,
    pub checks: Vec<CheckRecord>,
    pub rate: RateAudit,
    pub randomness: RandomnessAudit,
    /// `H(W, S)` in q-ary units.
    pub joint_entropy: Information,
    /// Largest `I(W_rest; A_a, B_b)` over pairs, q-ary units.
    pub max_leakage: Information,
}

impl VerificationReport {
    pub fn check(&self, name: CheckName) -> &CheckRecord {
        self.checks
            .iter()
            .find(|c| c.name == name)
            .expect("report covers every check")
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// All checks pass and neither audit reports a bound violation.
    pub fn passed(&self) -> bool {
        self.all_checks_pass()
            && self.rate.status != AuditStatus::ViolatesBound
            && self.randomness.status != AuditStatus::ViolatesBound
    }

    /// Machine-readable `CHECK` / `MEASURE` lines.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            match &c.witness {
                Some(w) => writeln!(out, "CHECK {} {verdict} {w}", c.name),
                None => writeln!(out, "CHECK {} {verdict}", c.name),
            }
            .unwrap();
        }
        let mut measure = |name: &str, v: String| writeln!(out, "MEASURE {name} {v}").unwrap();
        measure("download_cost", self.rate.download_cost.to_string());
        measure("rate", self.rate.rate.to_string());
        if let (Some(c), Some(g)) = (self.rate.capacity, self.rate.gap) {
            measure("capacity", c.to_string());
            measure("rate_gap", g.to_string());
        }
        measure("index_bits", self.rate.index_bits.to_string());
        measure("finite_rate_1", self.rate.finite_rate(1).to_string());
        measure("randomness", self.randomness.entropy.to_string());
        measure("randomness_per_l", self.randomness.per_l.to_string());
        if let (Some(m), Some(g)) = (self.randomness.minimum_per_l, self.randomness.gap) {
            measure("randomness_min_per_l", m.to_string());
            measure("randomness_gap_per_l", g.to_string());
        }
        measure("joint_entropy", self.joint_entropy.to_string());
        measure("max_leakage", self.max_leakage.to_string());
        out
    }

    /// Human-readable summary followed by the machine lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "scheme: K={} L={} R={} field=GF(2^{}) M1={} M2={}",
            self.k,
            self.l,
            self.r,
            self.field.degree(),
            self.m1,
            self.m2
        );
        out.push_str("theta (rows a, columns b):\n");
        for row in &self.theta {
            let cells: Vec<String> = row
                .iter()
                .map(|t| t.map_or("-".to_string(), |k| (k + 1).to_string()))
                .collect();
            let _ = writeln!(out, "  {}", cells.join(" "));
        }
        for c in &self.checks {
            let _ = writeln!(
                out,
                "  [{}] {:<17} {}{}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name.as_str(),
                c.name.describe(),
                c.witness
                    .as_ref()
                    .map_or(String::new(), |w| format!(" -- {w}"))
            );
        }
        let cap = self
            .rate
            .capacity
            .map_or("open".to_string(), |c| c.to_string());
        let _ = writeln!(
            out,
            "download cost D = {} symbols per block, rate L/D = {} (capacity {cap}: {})",
            self.rate.download_cost,
            self.rate.rate,
            self.rate.status.as_str()
        );
        let min = self
            .randomness
            .minimum_per_l
            .map_or("open".to_string(), |m| format!("{m}L"));
        let _ = writeln!(
            out,
            "common randomness H(S) = {} symbols = {}L (minimum {min}: {})",
            self.randomness.entropy,
            self.randomness.per_l,
            self.randomness.status.as_str()
        );
        let _ = writeln!(
            out,
            "overall: {}",
            if self.passed() { "PASS" } else { "FAIL" }
        );
        out.push_str(&self.to_lines());
        out
    }
}

/// Runs every check and both audits.
///
/// Cardinality problems are reported as a failed check; any other shape
/// violation makes the scheme unverifiable and is returned as an error.
pub fn verify(s: &Scheme) -> Result<VerificationReport, VerifyError> {
    let fatal: Vec<ShapeViolation> = s
        .validate_shape()
        .into_iter()
        .filter(|v| !matches!(v, ShapeViolation::Cardinality { .. }))
        .collect();
    if !fatal.is_empty() {
        return Err(VerifyError::InvalidShape(fatal));
    }
    realization_count(s.field, s.width())?;

    let theta: ThetaGrid = (0..s.m1())
        .map(|a| {
            (0..s.m2())
                .map(|b| analyze_pair(s, a, b).decodable.first().map(|(k, _)| *k))
                .collect()
        })
        .collect();
    let joints = pair_joints(s, &theta)?;
    let ([determinism, independence], joint_entropy) = determinism_and_independence(s)?;
    let checks = vec![
        check_cardinality(s),
        determinism,
        independence,
        reliability_from(s, &theta, &joints),
        database_privacy_from(s, &theta, &joints),
        user_privacy_from(s.k, &theta),
    ];

    let base = Base::QAry(s.field);
    let max_leakage = joints
        .iter()
        .flatten()
        .flatten()
        .map(|pj| mutual_information(&pj.joint, &pj.rest, &pj.obs, base))
        .fold(Information::zero(), |acc, i| match (acc.exact, i.exact) {
            (Some(x), Some(y)) if y > x => i,
            (Some(_), Some(_)) => acc,
            _ if i.approx > acc.approx => Information {
                exact: None,
                approx: i.approx,
            },
            _ => acc,
        });
    Ok(VerificationReport {
        k: s.k,
        l: s.l,
        r: s.r,
        field: s.field,
        m1: s.m1(),
        m2: s.m2(),
        theta,
        checks,
        rate: audit_rate(s),
        randomness: audit_randomness(s),
        joint_entropy,
        max_leakage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decode::derive_decode_table;
    use crate::matrix::FieldMatrix;
    use crate::scheme::{
        build_k4_scheme, build_pairwise_scheme, build_rotation_scheme, SchemeVariant,
    };

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn pairwise_k3_passes_everything() {
        let s = build_pairwise_scheme(3, Field::GF2).unwrap();
        let report = verify(&s).unwrap();
        assert!(report.passed(), "{}", report.to_text());
        assert_eq!(report.checks.len(), 6);
        assert_eq!(report.rate.rate, r(1, 3));
        assert_eq!(report.randomness.per_l, r(2, 1));
    }

    #[test]
    fn rotation_k3_database_privacy() {
        let s = build_rotation_scheme(3, SchemeVariant::RotationRandomness, Field::GF2).unwrap();
        let t = derive_decode_table(&s).unwrap();
        assert!(check_database_privacy(&s, &t).unwrap().passed);
        assert_eq!(audit_rate(&s).rate, r(1, 4));
    }

    #[test]
    fn removing_a_mask_leaks() {
        let mut s = build_pairwise_scheme(3, Field::GF2).unwrap();
        // S_2 := 0 everywhere
        let col = s.randomness_col(1);
        for set in [&mut s.db1, &mut s.db2] {
            for ans in set.iter_mut() {
                for row in 0..ans.map.rows() {
                    ans.map.set(row, col, 0);
                }
            }
        }
        let report = verify(&s).unwrap();
        let rec = report.check(CheckName::DatabasePrivacy);
        assert!(!rec.passed);
        assert!(rec.witness.as_ref().unwrap().contains("I(W_rest;A,B)="));
        assert!(!report.max_leakage.is_exactly_zero());
    }

    #[test]
    fn printed_k2_listing_is_unreliable_at_pair_1_2() {
        let mut s = build_pairwise_scheme(2, Field::GF2).unwrap();
        s.add_randomness_symbols(1);
        s.db1[1].map = FieldMatrix::from_rows(Field::GF2, 4, &[vec![1, 1, 0, 1]]).unwrap();
        s.db2[1].map = FieldMatrix::from_rows(Field::GF2, 4, &[vec![0, 1, 0, 1]]).unwrap();
        let report = verify(&s).unwrap();
        let rec = report.check(CheckName::Reliability);
        assert!(!rec.passed);
        assert!(rec.witness.as_ref().unwrap().starts_with("a=1 b=2"));
    }

    #[test]
    fn repeated_theta_in_a_row_fails_user_privacy() {
        let s = build_pairwise_scheme(3, Field::GF2).unwrap();
        let mut t = derive_decode_table(&s).unwrap();
        assert!(check_user_privacy(&s, &t).passed);
        t.theta[1][2] = t.theta[1][1];
        let rec = check_user_privacy(&s, &t);
        assert!(!rec.passed);
        assert_eq!(rec.witness.as_deref(), Some("row a=2 counts=0,1,2"));
        // The tampered θ also disagrees with what the pair actually reveals.
        assert!(!check_reliability(&s, &t).unwrap().passed);
    }

    #[test]
    fn correlated_sampler_fails_independence() {
        let s = build_pairwise_scheme(2, Field::GF2).unwrap();
        let leaky = |w: &[Symbol], seed: u64| vec![(seed as Symbol & 1) & w[0]];
        let honest = |_: &[Symbol], seed: u64| vec![seed as Symbol & 1];
        assert!(!check_independence_with(&s, &leaky, 0..2).unwrap().0.passed);
        // Independent of W, though the seed range only hits S = 0.
        assert!(check_independence_with(&s, &honest, 0..1).unwrap().0.passed);
    }

    #[test]
    fn determinism_and_independence_pass_for_builders() {
        let s = build_k4_scheme();
        let [d, i] = check_determinism_and_independence(&s).unwrap();
        assert!(d.passed && i.passed);
    }

    #[test]
    fn cardinality_failure_is_a_check_not_an_error() {
        let mut s = build_pairwise_scheme(2, Field::GF2).unwrap();
        let extra = s.db1[0].clone();
        s.db1.push(extra);
        s.renumber();
        let report = verify(&s).unwrap();
        assert!(!report.check(CheckName::Cardinality).passed);
        assert!(!report.check(CheckName::UserPrivacy).passed);
    }

    #[test]
    fn audits() {
        let k2 = build_pairwise_scheme(2, Field::GF2).unwrap();
        assert_eq!(audit_rate(&k2).status, AuditStatus::Meets);
        assert_eq!(audit_randomness(&k2).per_l, r(1, 1));
        let k4 = build_pairwise_scheme(4, Field::GF2).unwrap();
        assert_eq!(audit_rate(&k4).rate, r(1, 4));
        assert_eq!(audit_rate(&k4).gap, Some(r(1, 12)));
        assert_eq!(audit_rate(&k4).status, AuditStatus::Suboptimal);
        let special = build_k4_scheme();
        assert_eq!(audit_rate(&special).rate, r(1, 3));
        assert_eq!(audit_rate(&special).status, AuditStatus::Meets);
        assert_eq!(audit_randomness(&special).per_l, r(2, 1));
        let k5 = build_pairwise_scheme(5, Field::GF2).unwrap();
        assert_eq!(audit_rate(&k5).status, AuditStatus::Open);
    }

    #[test]
    fn finite_rate_charges_index_bits_once() {
        let s = build_rotation_scheme(2, SchemeVariant::RotationRandomness, Field::GF2).unwrap();
        let audit = audit_rate(&s);
        assert_eq!(audit.index_bits, 2);
        assert_eq!(audit.finite_rate(64), r(64, 3 * 64 + 2));
        assert_eq!(bits_for(1), 0);
        assert_eq!(bits_for(4), 2);
        assert_eq!(bits_for(5), 3);
    }

    #[test]
    fn report_lines_are_well_formed() {
        let report = verify(&build_k4_scheme()).unwrap();
        let lines = report.to_lines();
        assert!(lines.starts_with("CHECK cardinality PASS\n"));
        assert!(lines.contains("MEASURE rate 1/3\n"));
        assert!(lines.contains("MEASURE download_cost 6\n"));
        assert!(lines.contains("MEASURE max_leakage 0\n"));
        for line in lines.lines() {
            let mut parts = line.split(' ');
            match parts.next() {
                Some("CHECK") => assert!(matches!(parts.nth(1), Some("PASS" | "FAIL"))),
                Some("MEASURE") => assert_eq!(parts.count(), 2),
                other => panic!("unexpected line prefix {other:?}"),
            }
        }
    }
}
