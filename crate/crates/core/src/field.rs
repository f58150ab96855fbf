//! Arithmetic in binary extension fields GF(2^m).
//!
//! Elements are stored as `m`-bit integers in polynomial basis: bit `i` is the
//! coefficient of `x^i`. Addition is XOR. Multiplication reduces modulo the
//! lexicographically least irreducible polynomial of degree `m`:
//!
//! | m | reduction polynomial |
//! |---|----------------------|
//! | 1 | none (GF(2))         |
//! | 2 | x^2 + x + 1          |
//! | 3 | x^3 + x + 1          |
//! | 4 | x^4 + x + 1          |
//!
//! Larger degrees (up to [`MAX_DEGREE`]) use the same rule, found by search.

use std::fmt;

use thiserror::Error;

/// A field element. Only the low `m` bits are ever set.
pub type Symbol = u16;

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("extension degree {0} is outside 1..={MAX_DEGREE}")]
    UnsupportedDegree(u32),
    #[error("element {value} is not in GF({order})")]
    OutOfRange { value: u32, order: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Inv,
}

/// GF(2^m) described by its degree and reduction polynomial.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Field {
    m: u32,
    /// Full reduction polynomial including the `x^m` term; zero for m = 1.
    poly: u32,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{})", self.m)
    }
}

impl Default for Field {
    fn default() -> Self {
        Field::GF2
    }
}

impl Field {
    pub const GF2: Field = Field { m: 1, poly: 0 };

    pub fn new(m: u32) -> Result<Self, FieldError> {
        if !(1..=MAX_DEGREE).contains(&m) {
            return Err(FieldError::UnsupportedDegree(m));
        }
        let poly = if m == 1 { 0 } else { least_irreducible(m) };
        Ok(Field { m, poly })
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    /// Field order q = 2^m.
    pub fn order(&self) -> u32 {
        1 << self.m
    }

    /// Reduction polynomial as a bit pattern, `None` for GF(2).
    pub fn reduction_polynomial(&self) -> Option<u32> {
        (self.m > 1).then_some(self.poly)
    }

    pub fn contains(&self, x: u32) -> bool {
        x < self.order()
    }

    pub fn check(&self, x: u32) -> Result<Symbol, FieldError> {
        if self.contains(x) {
            Ok(x as Symbol)
        } else {
            Err(FieldError::OutOfRange {
                value: x,
                order: self.order(),
            })
        }
    }

    #[inline]
    pub fn add(&self, x: Symbol, y: Symbol) -> Symbol {
        x ^ y
    }

    #[inline]
    pub fn mul(&self, x: Symbol, y: Symbol) -> Symbol {
        if self.m == 1 {
            return x & y;
        }
        let (mut a, mut b) = (x as u32, y as u32);
        let mut acc = 0u32;
        let top = 1u32 << self.m;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= self.poly;
            }
        }
        acc as Symbol
    }

    pub fn inv(&self, x: Symbol) -> Result<Symbol, FieldError> {
        if x == 0 {
            return Err(FieldError::ZeroInverse);
        }
        // x^(q-2)
        let mut exp = self.order() - 2;
        let mut base = x;
        let mut acc: Symbol = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        Ok(acc)
    }

    /// Checked entry point covering all three operations. `y` is ignored for `Inv`.
    pub fn apply(&self, op: FieldOp, x: u32, y: u32) -> Result<Symbol, FieldError> {
        let x = self.check(x)?;
        match op {
            FieldOp::Add => Ok(self.add(x, self.check(y)?)),
            FieldOp::Mul => Ok(self.mul(x, self.check(y)?)),
            FieldOp::Inv => self.inv(x),
        }
    }

    /// Dot product of two equal-length vectors.
    pub fn dot(&self, x: &[Symbol], y: &[Symbol]) -> Symbol {
        x.iter()
            .zip(y)
            .fold(0, |acc, (&a, &b)| acc ^ self.mul(a, b))
    }
}

fn poly_degree(p: u32) -> u32 {
    31 - p.leading_zeros()
}

fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

fn is_irreducible(p: u32) -> bool {
    let d = poly_degree(p);
    (2u32..1 << (d / 2 + 1))
        .filter(|&f| poly_degree(f) <= d / 2)
        .all(|f| poly_rem(p, f) != 0)
}

fn least_irreducible(m: u32) -> u32 {
    ((1u32 << m)..(1u32 << (m + 1)))
        .find(|&p| is_irreducible(p))
        .expect("an irreducible polynomial exists in every degree")
}
