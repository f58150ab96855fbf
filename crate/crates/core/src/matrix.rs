//! Dense matrices over GF(2^m) with Gaussian elimination.

use std::fmt;

use crate::field::{Field, FieldError, Symbol};

/// Row-major matrix over a binary extension field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    entries: Vec<Symbol>,
}

/// Outcome of solving `A x = b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<Symbol>),
    /// Consistent with a solution space of dimension `nullity > 0`; `particular`
    /// sets every free variable to zero.
    Underdetermined {
        particular: Vec<Symbol>,
        nullity: usize,
    },
    Inconsistent,
}

impl Solution {
    pub fn vector(&self) -> Option<&[Symbol]> {
        match self {
            Solution::Unique(v) => Some(v),
            Solution::Underdetermined { particular, .. } => Some(particular),
            Solution::Inconsistent => None,
        }
    }
}

impl FieldMatrix {
    pub fn new(
        field: Field,
        rows: usize,
        cols: usize,
        entries: Vec<Symbol>,
    ) -> Result<Self, FieldError> {
        if entries.len() != rows * cols {
            return Err(FieldError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        for &e in &entries {
            field.check(e as u32)?;
        }
        Ok(FieldMatrix {
            field,
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        FieldMatrix {
            field,
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from row vectors, all of length `cols`.
    pub fn from_rows(field: Field, cols: usize, rows: &[Vec<Symbol>]) -> Result<Self, FieldError> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(FieldError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            entries.extend_from_slice(r);
        }
        Self::new(field, rows.len(), cols, entries)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Symbol] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> Symbol {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Symbol) {
        assert!(self.field.contains(v as u32), "entry outside the field");
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Symbol] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> impl Iterator<Item = &[Symbol]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn mul_vec(&self, v: &[Symbol]) -> Result<Vec<Symbol>, FieldError> {
        if v.len() != self.cols {
            return Err(FieldError::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok(self.row_vectors().map(|r| self.field.dot(r, v)).collect())
    }

    pub fn mul(&self, other: &FieldMatrix) -> Result<FieldMatrix, FieldError> {
        if self.cols != other.rows {
            return Err(FieldError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = FieldMatrix::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.entries[idx] ^= self.field.mul(a, other.get(k, j));
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> FieldMatrix {
        let mut out = FieldMatrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.entries[c * self.rows + r] = self.get(r, c);
            }
        }
        out
    }

    /// Stacks `other` below `self`.
    pub fn stack(&self, other: &FieldMatrix) -> Result<FieldMatrix, FieldError> {
        if self.cols != other.cols {
            return Err(FieldError::DimensionMismatch(format!(
                "stacking {} columns on {} columns",
                other.cols, self.cols
            )));
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(FieldMatrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// `row[dst] += factor * row[src]`
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, factor: Symbol) {
        if factor == 0 {
            return;
        }
        for c in 0..self.cols {
            let v = self.field.mul(factor, self.get(src, c));
            self.entries[dst * self.cols + c] ^= v;
        }
    }

    fn scale_row(&mut self, r: usize, factor: Symbol) {
        for c in 0..self.cols {
            let v = self.field.mul(factor, self.get(r, c));
            self.entries[r * self.cols + c] = v;
        }
    }

    /// Reduced row echelon form and pivot columns. Zero rows are kept at the bottom.
    pub fn rref(&self) -> (FieldMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.field.inv(m.get(r, c)).expect("pivot is nonzero");
            m.scale_row(r, inv);
            for i in 0..m.rows {
                if i != r {
                    let f = m.get(i, c);
                    m.add_row_multiple(i, r, f);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Canonical basis of the row space: the nonzero rows of the RREF.
    pub fn row_space_basis(&self) -> FieldMatrix {
        let (reduced, pivots) = self.rref();
        let k = pivots.len();
        FieldMatrix {
            field: self.field,
            rows: k,
            cols: self.cols,
            entries: reduced.entries[..k * self.cols].to_vec(),
        }
    }

    pub fn row_space_contains(&self, v: &[Symbol]) -> bool {
        assert_eq!(v.len(), self.cols);
        let extended = self
            .stack(&FieldMatrix {
                field: self.field,
                rows: 1,
                cols: self.cols,
                entries: v.to_vec(),
            })
            .expect("same width");
        extended.rank() == self.rank()
    }

    /// Gaussian elimination on `[A | b]`.
    pub fn solve(&self, b: &[Symbol]) -> Result<Solution, FieldError> {
        if b.len() != self.rows {
            return Err(FieldError::DimensionMismatch(format!(
                "right-hand side of length {} for {} equations",
                b.len(),
                self.rows
            )));
        }
        for &x in b {
            self.field.check(x as u32)?;
        }
        let mut aug = FieldMatrix::zeros(self.field, self.rows, self.cols + 1);
        for (r, &rhs) in b.iter().enumerate() {
            aug.entries[r * (self.cols + 1)..r * (self.cols + 1) + self.cols]
                .copy_from_slice(self.row(r));
            aug.entries[r * (self.cols + 1) + self.cols] = rhs;
        }
        let (reduced, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(Solution::Inconsistent);
        }
        let mut x = vec![0; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = reduced.get(r, self.cols);
        }
        let nullity = self.cols - pivots.len();
        Ok(if nullity == 0 {
            Solution::Unique(x)
        } else {
            Solution::Underdetermined {
                particular: x,
                nullity,
            }
        })
    }

    /// Basis of the right nullspace `{x : A x = 0}`, one vector per row.
    pub fn nullspace(&self) -> FieldMatrix {
        let (reduced, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = FieldMatrix::zeros(self.field, free.len(), self.cols);
        for (i, &f) in free.iter().enumerate() {
            basis.entries[i * self.cols + f] = 1;
            for (r, &p) in pivots.iter().enumerate() {
                // char 2: -x = x
                basis.entries[i * self.cols + p] = reduced.get(r, f);
            }
        }
        basis
    }
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:?} {}x{} [", self.field, self.rows, self.cols)?;
        for r in self.row_vectors() {
            writeln!(f, "  {r:?}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf2(rows: &[&[Symbol]]) -> FieldMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        FieldMatrix::from_rows(
            Field::GF2,
            cols,
            &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn identity_system_is_unique() {
        let id = FieldMatrix::identity(Field::GF2, 2);
        assert_eq!(id.solve(&[1, 0]), Ok(Solution::Unique(vec![1, 0])));
    }

    #[test]
    fn single_equation_two_unknowns_is_underdetermined() {
        let a = gf2(&[&[1, 1]]);
        assert!(matches!(
            a.solve(&[0]),
            Ok(Solution::Underdetermined { nullity: 1, .. })
        ));
    }

    #[test]
    fn inconsistent_system() {
        let a = gf2(&[&[1, 1], &[1, 1]]);
        assert_eq!(a.solve(&[0, 1]), Ok(Solution::Inconsistent));
    }

    #[test]
    fn solve_rejects_wrong_rhs_length() {
        let a = FieldMatrix::identity(Field::GF2, 3);
        assert!(matches!(
            a.solve(&[1]),
            Err(FieldError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(FieldMatrix::zeros(Field::GF2, 2, 2).rank(), 0);
        assert_eq!(FieldMatrix::identity(Field::GF2, 3).rank(), 3);
        assert_eq!(gf2(&[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]).rank(), 2);
    }

    #[test]
    fn nullspace_is_annihilated() {
        let f = Field::new(3).unwrap();
        let a = FieldMatrix::from_rows(f, 4, &[vec![1, 2, 3, 4], vec![5, 6, 7, 1]]).unwrap();
        let ns = a.nullspace();
        assert_eq!(ns.rows(), 4 - a.rank());
        for v in ns.row_vectors() {
            assert!(a.mul_vec(v).unwrap().iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn new_rejects_out_of_range_entries() {
        assert!(FieldMatrix::new(Field::GF2, 1, 2, vec![0, 2]).is_err());
        assert!(FieldMatrix::new(Field::GF2, 1, 2, vec![0]).is_err());
    }

    fn matrix_strategy() -> impl Strategy<Value = (u32, usize, usize, Vec<Symbol>, Vec<Symbol>)> {
        (1u32..=4, 1usize..6, 1usize..6).prop_flat_map(|(m, r, c)| {
            let q = 1u16 << m;
            (
                Just(m),
                Just(r),
                Just(c),
                proptest::collection::vec(0..q, r * c),
                proptest::collection::vec(0..q, c),
            )
        })
    }

    proptest! {
        #[test]
        fn solve_recovers_a_preimage((m, r, c, entries, v) in matrix_strategy()) {
            let f = Field::new(m).unwrap();
            let a = FieldMatrix::new(f, r, c, entries).unwrap();
            let b = a.mul_vec(&v).unwrap();
            let sol = a.solve(&b).unwrap();
            let x = sol.vector().expect("image vector is always consistent");
            prop_assert_eq!(a.mul_vec(x).unwrap(), b);
            if let Solution::Unique(x) = &sol {
                prop_assert_eq!(x, &v);
            }
        }

        #[test]
        fn rank_invariant_under_row_operations(
            (m, r, c, entries, _v) in matrix_strategy(),
            i in 0usize..6, j in 0usize..6, factor in 0u16..16,
        ) {
            let f = Field::new(m).unwrap();
            let a = FieldMatrix::new(f, r, c, entries).unwrap();
            let (i, j) = (i % r, j % r);
            let factor = factor % f.order() as u16;
            let mut swapped = a.clone();
            swapped.swap_rows(i, j);
            prop_assert_eq!(swapped.rank(), a.rank());
            if i != j {
                let mut added = a.clone();
                added.add_row_multiple(i, j, factor);
                prop_assert_eq!(added.rank(), a.rank());
            }
        }
    }
}
