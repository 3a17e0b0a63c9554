//! Exact linear algebra over prime fields `F_p`.
//!
//! Everything here is plain residue arithmetic on `u32` values with `u64`
//! intermediates, so any prime below `2^31` is supported. Matrices are dense
//! and row-major; the sizes that show up in the rest of the crate are a few
//! thousand columns at most.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("entry count {len} does not match a {rows}x{cols} matrix")]
    ShapeMismatch { rows: usize, cols: usize, len: usize },
    #[error("entry {value} is not a residue mod {p}")]
    EntryOutOfRange { value: u32, p: u32 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("fields differ: F_{0} vs F_{1}")]
    FieldMismatch(u32, u32),
    #[error("{0} has no inverse mod {1}")]
    NotInvertible(u32, u32),
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The prime field `Z/p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self, LinalgError> {
        if p >= (1 << 31) || !is_prime(p as u64) {
            return Err(LinalgError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(&self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u32) -> Result<u32, LinalgError> {
        let a = a % self.p;
        if a == 0 {
            return Err(LinalgError::NotInvertible(a, self.p));
        }
        Ok(self.pow(a, self.p as u64 - 2))
    }

    /// Reduces an arbitrary signed integer into `[0, p)`.
    #[inline]
    pub fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    /// `+1` or `-1` as a residue.
    #[inline]
    pub fn sign(&self, negative: bool) -> u32 {
        if negative {
            self.neg(1 % self.p)
        } else {
            1 % self.p
        }
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

/// Dense matrix over `F_p`, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl FpMatrix {
    pub fn new(
        field: PrimeField,
        rows: usize,
        cols: usize,
        entries: Vec<u32>,
    ) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::ShapeMismatch {
                rows,
                cols,
                len: entries.len(),
            });
        }
        if let Some(&value) = entries.iter().find(|&&v| v >= field.p()) {
            return Err(LinalgError::EntryOutOfRange {
                value,
                p: field.p(),
            });
        }
        Ok(FpMatrix {
            field,
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from signed integer rows, reducing mod `p`.
    pub fn from_rows(field: PrimeField, rows: &[Vec<i64>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(LinalgError::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            entries.extend(row.iter().map(|&v| field.from_i64(v)));
        }
        Ok(FpMatrix {
            field,
            rows: rows.len(),
            cols,
            entries,
        })
    }

    /// The matrix whose columns are the given vectors.
    pub fn from_columns(
        field: PrimeField,
        dim: usize,
        columns: &[Vec<u32>],
    ) -> Result<Self, LinalgError> {
        let mut m = FpMatrix::zeros(field, dim, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != dim {
                return Err(LinalgError::DimensionMismatch {
                    expected: dim,
                    found: col.len(),
                });
            }
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v % field.p());
            }
        }
        Ok(m)
    }

    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        FpMatrix {
            field,
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = FpMatrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1 % field.p());
        }
        m
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        debug_assert!(v < self.field.p());
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = FpMatrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    fn check_same_field(&self, other: &FpMatrix) -> Result<(), LinalgError> {
        if self.field != other.field {
            return Err(LinalgError::FieldMismatch(self.field.p(), other.field.p()));
        }
        Ok(())
    }

    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix, LinalgError> {
        self.check_same_field(other)?;
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let p = self.field.p() as u64;
        let mut out = FpMatrix::zeros(self.field, self.rows, other.cols);
        let mut acc = vec![0u64; other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for (slot, &b) in acc.iter_mut().zip(other.row(k)) {
                    *slot = (*slot + a * b as u64) % p;
                }
            }
            for (j, &v) in acc.iter().enumerate() {
                out.set(i, j, v as u32);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &FpMatrix) -> Result<FpMatrix, LinalgError> {
        self.check_same_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        let f = self.field;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Ok(FpMatrix { entries, ..*self })
    }

    pub fn scale(&self, c: u32) -> FpMatrix {
        let f = self.field;
        let c = c % f.p();
        FpMatrix {
            entries: self.entries.iter().map(|&a| f.mul(a, c)).collect(),
            ..self.clone()
        }
    }

    pub fn apply(&self, v: &[u32]) -> Result<Vec<u32>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let p = self.field.p() as u64;
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p)
                    as u32
            })
            .collect())
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (FpMatrix, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..m.cols {
                    m.entries.swap(pr * m.cols + j, r * m.cols + j);
                }
            }
            // pivot is non-zero, so the inverse exists
            let inv = f.inv(m.get(r, c)).unwrap();
            for j in c..m.cols {
                let v = f.mul(m.get(r, j), inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor == 0 {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        // Eliminate along the shorter side.
        if self.rows > self.cols {
            self.transpose().rref().1.len()
        } else {
            self.rref().1.len()
        }
    }

    /// A basis of the null space `{v : Mv = 0}`, returned as the rows of a
    /// matrix in reduced row echelon form.
    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        let f = self.field;
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let raw: Vec<Vec<u32>> = (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![0u32; self.cols];
                v[free] = 1 % f.p();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(r.get(row, free));
                }
                v
            })
            .collect();
        if raw.is_empty() {
            return raw;
        }
        let basis = FpMatrix::new(
            f,
            raw.len(),
            self.cols,
            raw.into_iter().flatten().collect(),
        )
        .expect("kernel vectors have the matrix column count");
        let (reduced, piv) = basis.rref();
        (0..piv.len()).map(|i| reduced.row(i).to_vec()).collect()
    }
}

impl fmt::Display for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(u32::to_string).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Rank of a family of vectors in `F_p^dim`.
pub fn rank_of_vectors(
    field: PrimeField,
    dim: usize,
    vectors: &[Vec<u32>],
) -> Result<usize, LinalgError> {
    if vectors.is_empty() {
        return Ok(0);
    }
    Ok(FpMatrix::from_columns(field, dim, vectors)?.rank())
}

/// True iff the sum of the spans of `subspaces` is direct: the rank of all
/// vectors together equals the sum of the ranks of each family.
pub fn is_direct_sum(
    field: PrimeField,
    subspaces: &[Vec<Vec<u32>>],
    ambient_dim: usize,
) -> Result<bool, LinalgError> {
    let mut total = 0;
    for family in subspaces {
        total += rank_of_vectors(field, ambient_dim, family)?;
    }
    let all: Vec<Vec<u32>> = subspaces.iter().flatten().cloned().collect();
    Ok(rank_of_vectors(field, ambient_dim, &all)? == total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn field_construction() {
        assert!(PrimeField::new(7).is_ok());
        assert_eq!(PrimeField::new(9), Err(LinalgError::NotPrime(9)));
        assert_eq!(PrimeField::new(1), Err(LinalgError::NotPrime(1)));
        let f5 = f(5);
        assert_eq!(f5.inv(2).unwrap(), 3);
        assert_eq!(f5.from_i64(-1), 4);
        assert!(f5.inv(0).is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(FpMatrix::zeros(f(5), 3, 3).rank(), 0);
        assert_eq!(FpMatrix::identity(f(2), 4).rank(), 4);
        let m = FpMatrix::from_rows(f(5), &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        assert!(FpMatrix::identity(f(3), 3).kernel_basis().is_empty());
        let k = FpMatrix::zeros(f(2), 2, 3).kernel_basis();
        assert_eq!(k, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let m = FpMatrix::from_rows(f(2), &[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(m.kernel_basis(), vec![vec![1, 1]]);
    }

    #[test]
    fn bad_shapes() {
        assert!(matches!(
            FpMatrix::new(f(3), 2, 2, vec![0, 1, 2]),
            Err(LinalgError::ShapeMismatch { .. })
        ));
        assert!(matches!(
            FpMatrix::new(f(3), 1, 1, vec![3]),
            Err(LinalgError::EntryOutOfRange { .. })
        ));
        let a = FpMatrix::identity(f(3), 2);
        let b = FpMatrix::identity(f(5), 2);
        assert!(a.mul(&b).is_err());
    }

    #[test]
    fn direct_sum_examples() {
        let e = |i: usize, n: usize| {
            let mut v = vec![0; n];
            v[i] = 1;
            v
        };
        assert!(is_direct_sum(f(2), &[vec![e(0, 3)], vec![e(1, 3)]], 3).unwrap());
        let fam = [vec![vec![1, 1]], vec![e(0, 2)], vec![e(1, 2)]];
        assert!(!is_direct_sum(f(3), &fam, 2).unwrap());
        assert!(matches!(
            is_direct_sum(f(3), &[vec![vec![1, 0, 0]], vec![vec![1, 0]]], 2),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn mul_identity() {
        let m = FpMatrix::from_rows(f(7), &[vec![1, 2, 3], vec![4, 5, 6]]).unwrap();
        assert_eq!(m.mul(&FpMatrix::identity(f(7), 3)).unwrap(), m);
        assert_eq!(FpMatrix::identity(f(7), 2).mul(&m).unwrap(), m);
    }
}
