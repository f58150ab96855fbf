//! Exact Shannon entropies of finite count distributions.
//!
//! Probabilities are stored as integer counts over a common total. When the
//! total and every count are powers of two, entropies in bits (and in q-ary
//! units for q = 2^m) are rationals and are returned exactly. Pass/fail
//! decisions elsewhere never use the floating-point fallback: independence and
//! functional dependence are decided by comparing counts.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;

use crate::field::{Field, Symbol};

/// Finite joint distribution over equal-length tuples of symbols.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JointDistribution {
    total: u64,
    counts: BTreeMap<Vec<Symbol>, u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Base {
    Bits,
    /// Logarithm base q = 2^m of the given field.
    QAry(Field),
}

/// Entropy-like quantity. `exact` is present whenever the value is rational.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Information {
    pub exact: Option<Rational64>,
    pub approx: f64,
}

impl Information {
    pub fn zero() -> Self {
        Information {
            exact: Some(Rational64::from_integer(0)),
            approx: 0.0,
        }
    }

    fn combine(self, other: Information, sign: i64) -> Information {
        Information {
            exact: self
                .exact
                .zip(other.exact)
                .map(|(a, b)| a + b * Rational64::from_integer(sign)),
            approx: self.approx + sign as f64 * other.approx,
        }
    }

    pub fn is_exactly_zero(&self) -> bool {
        self.exact == Some(Rational64::from_integer(0))
    }
}

impl fmt::Display for Information {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact {
            Some(r) => write!(f, "{r}"),
            None => write!(f, "~{:.6}", self.approx),
        }
    }
}

fn exact_log2(n: u64) -> Option<i64> {
    n.is_power_of_two().then(|| n.trailing_zeros() as i64)
}

impl JointDistribution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `weight` occurrences of `outcome`.
    pub fn add(&mut self, outcome: Vec<Symbol>, weight: u64) {
        if weight == 0 {
            return;
        }
        if let Some((first, _)) = self.counts.first_key_value() {
            assert_eq!(first.len(), outcome.len(), "outcome arity changed");
        }
        self.total += weight;
        *self.counts.entry(outcome).or_insert(0) += weight;
    }

    pub fn from_outcomes<I: IntoIterator<Item = Vec<Symbol>>>(outcomes: I) -> Self {
        let mut d = Self::new();
        for o in outcomes {
            d.add(o, 1);
        }
        d
    }

    /// Uniform distribution over all `q^n` tuples of length `n`.
    pub fn uniform(field: Field, n: usize) -> Self {
        let q = field.order() as u64;
        let size = q
            .checked_pow(n as u32)
            .expect("enumeration size fits in u64");
        Self::from_outcomes((0..size).map(|i| digits(i, field, n)))
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn support_size(&self) -> usize {
        self.counts.len()
    }

    pub fn arity(&self) -> usize {
        self.counts.keys().next().map_or(0, Vec::len)
    }

    pub fn count(&self, outcome: &[Symbol]) -> u64 {
        self.counts.get(outcome).copied().unwrap_or(0)
    }

    pub fn outcomes(&self) -> impl Iterator<Item = (&[Symbol], u64)> {
        self.counts.iter().map(|(k, &c)| (k.as_slice(), c))
    }

    /// Exact probability of an outcome.
    pub fn probability(&self, outcome: &[Symbol]) -> Rational64 {
        Rational64::new(self.count(outcome) as i64, self.total.max(1) as i64)
    }

    /// Marginal over the given coordinates, in the given order.
    pub fn marginal(&self, coords: &[usize]) -> JointDistribution {
        let mut m = JointDistribution::new();
        for (k, &c) in &self.counts {
            m.add(coords.iter().map(|&i| k[i]).collect(), c);
        }
        m
    }

    /// True iff the coordinates `x` and `y` are exactly independent, decided by
    /// `total · c(x,y) = c(x) · c(y)` over the whole product of supports.
    pub fn independent(&self, x: &[usize], y: &[usize]) -> bool {
        let mx = self.marginal(x);
        let my = self.marginal(y);
        let joint = self.marginal(&[x, y].concat());
        if joint.support_size() != mx.support_size() * my.support_size() {
            return false;
        }
        let n = self.total as u128;
        joint.counts.iter().all(|(k, &c)| {
            let (kx, ky) = k.split_at(x.len());
            n * c as u128 == mx.count(kx) as u128 * my.count(ky) as u128
        })
    }

    /// True iff coordinates `target` are a deterministic function of `given`.
    pub fn determines(&self, given: &[usize], target: &[usize]) -> bool {
        self.marginal(&[given, target].concat()).support_size()
            == self.marginal(given).support_size()
    }
}

/// Base-q digits of `index`, least significant first.
pub fn digits(mut index: u64, field: Field, n: usize) -> Vec<Symbol> {
    let m = field.degree();
    let mask = (field.order() - 1) as u64;
    (0..n)
        .map(|_| {
            let d = (index & mask) as Symbol;
            index >>= m;
            d
        })
        .collect()
}

/// Shannon entropy `H = log N - (1/N) Σ c log c`.
pub fn entropy(d: &JointDistribution, base: Base) -> Information {
    if d.total == 0 {
        return Information::zero();
    }
    let n = d.total;
    let approx_bits = (n as f64).log2()
        - d.counts
            .values()
            .map(|&c| c as f64 * (c as f64).log2())
            .sum::<f64>()
            / n as f64;
    let exact_bits = exact_log2(n).and_then(|log_n| {
        let mut sum: i128 = 0;
        for &c in d.counts.values() {
            sum += c as i128 * exact_log2(c)? as i128;
        }
        let numer = n as i128 * log_n as i128 - sum;
        Some(Rational64::new(i64::try_from(numer).ok()?, n as i64))
    });
    let divisor = match base {
        Base::Bits => 1,
        Base::QAry(field) => field.degree() as i64,
    };
    Information {
        exact: exact_bits.map(|h| h / Rational64::from_integer(divisor)),
        approx: approx_bits / divisor as f64,
    }
}

/// `I(X;Y) = H(X) + H(Y) - H(X,Y)` for coordinate groups `x` and `y`.
pub fn mutual_information(
    d: &JointDistribution,
    x: &[usize],
    y: &[usize],
    base: Base,
) -> Information {
    let hx = entropy(&d.marginal(x), base);
    let hy = entropy(&d.marginal(y), base);
    let hxy = entropy(&d.marginal(&[x, y].concat()), base);
    hx.combine(hy, 1).combine(hxy, -1)
}

/// `H(target | given) = H(target, given) - H(given)`.
pub fn conditional_entropy(
    d: &JointDistribution,
    target: &[usize],
    given: &[usize],
    base: Base,
) -> Information {
    let joint = entropy(&d.marginal(&[target, given].concat()), base);
    joint.combine(entropy(&d.marginal(given), base), -1)
}

/// Convenience split: `I(X;Y)` where X is the first `split` coordinates and Y the rest.
pub fn mutual_information_split(d: &JointDistribution, split: usize, base: Base) -> Information {
    let n = d.arity();
    let x: Vec<usize> = (0..split).collect();
    let y: Vec<usize> = (split..n).collect();
    mutual_information(d, &x, &y, base)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> Option<Rational64> {
        Some(Rational64::from_integer(n))
    }

    #[test]
    fn uniform_has_entropy_l_in_qary_units() {
        for m in 1..=3 {
            let f = Field::new(m).unwrap();
            for l in 1..=3 {
                let d = JointDistribution::uniform(f, l);
                assert_eq!(entropy(&d, Base::QAry(f)).exact, int(l as i64));
                assert_eq!(entropy(&d, Base::Bits).exact, int((l as u32 * m) as i64));
            }
        }
    }

    #[test]
    fn point_mass_has_zero_entropy() {
        let d = JointDistribution::from_outcomes([vec![3, 1]]);
        assert!(entropy(&d, Base::Bits).is_exactly_zero());
    }

    #[test]
    fn two_of_four_outcomes_is_one_bit() {
        let d = JointDistribution::from_outcomes([vec![0], vec![2]]);
        assert_eq!(entropy(&d, Base::Bits).exact, int(1));
    }

    #[test]
    fn non_dyadic_entropy_falls_back_to_approximation() {
        let d = JointDistribution::from_outcomes([vec![0], vec![1], vec![2]]);
        let h = entropy(&d, Base::Bits);
        assert_eq!(h.exact, None);
        assert!((h.approx - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn independent_bits_have_zero_information() {
        let d = JointDistribution::uniform(Field::GF2, 2);
        assert!(mutual_information_split(&d, 1, Base::Bits).is_exactly_zero());
        assert!(d.independent(&[0], &[1]));
    }

    #[test]
    fn copied_bit_carries_one_bit() {
        let d = JointDistribution::from_outcomes([vec![0, 0], vec![1, 1]]);
        assert_eq!(mutual_information_split(&d, 1, Base::Bits).exact, int(1));
        assert!(!d.independent(&[0], &[1]));
        assert!(d.determines(&[0], &[1]));
    }

    #[test]
    fn parity_of_two_bits_carries_one_bit() {
        // X = (x1, x2) uniform, Y = x1 ^ x2.
        let d = JointDistribution::from_outcomes(
            (0..4u16).map(|i| vec![i & 1, i >> 1, (i & 1) ^ (i >> 1)]),
        );
        assert_eq!(
            mutual_information(&d, &[0, 1], &[2], Base::Bits).exact,
            int(1)
        );
        assert!(d.independent(&[0], &[2]));
        assert!(conditional_entropy(&d, &[2], &[0, 1], Base::Bits).is_exactly_zero());
    }

    #[test]
    fn independence_needs_product_support() {
        // Uniform marginals but correlated support.
        let d = JointDistribution::from_outcomes([vec![0, 1], vec![1, 0]]);
        assert!(!d.independent(&[0], &[1]));
    }

    #[test]
    fn probabilities_are_exact() {
        let d = JointDistribution::uniform(Field::new(2).unwrap(), 2);
        assert_eq!(d.total(), 16);
        assert_eq!(d.probability(&[3, 1]), Rational64::new(1, 16));
        assert_eq!(d.probability(&[3, 3]) * 16, Rational64::from_integer(1));
    }

    #[test]
    fn digits_are_little_endian_base_q() {
        let f = Field::new(2).unwrap();
        assert_eq!(digits(0b11_10_01, f, 3), [1, 2, 3]);
    }
}
