//! Dense exact linear algebra over the rationals.
//!
//! Every certificate in the crate bottoms out here: kernels realize the
//! "vanishing" conditions, ranks certify direct sums, and [`RatMatrix::solve`]
//! either produces an exact solution or an exact infeasibility witness. There
//! is no tolerance anywhere in this module.
//!
//! Row reduction is fraction free: each row is scaled to integers and reduced
//! with Bareiss elimination, and only the final echelon form is normalized
//! back to rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar, always in lowest terms with a positive denominator.
///
/// `Display` produces the text form `p/q`, omitting `/q` when `q = 1`.
pub type Rational = BigRational;

/// Shorthand for an integer-valued [`Rational`].
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `numer / denom`.
///
/// # Panics
///
/// Panics when `denom` is zero.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses the `p/q` (or bare `p`) text form.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rational::new(p, q))
        }
        None => text.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Dense row-major matrix of rationals. Zero rows or zero columns are allowed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: RatMatrix,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Outcome of [`RatMatrix::solve`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    /// `M · X = B` holds exactly.
    Solution(RatMatrix),
    /// `yᵀ M = 0` while `yᵀ B ≠ 0`, so no `X` exists.
    Infeasible(Vec<Rational>),
}

impl Solution {
    pub fn into_option(self) -> Option<RatMatrix> {
        match self {
            Solution::Solution(x) => Some(x),
            Solution::Infeasible(_) => None,
        }
    }
}

/// Outcome of [`direct_sum_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DirectSum {
    /// The concatenated blocks are linearly independent.
    Certified(RatMatrix),
    /// A nontrivial coefficient vector that combines the block columns to zero.
    Failure(Vec<Rational>),
}

impl DirectSum {
    pub fn is_certified(&self) -> bool {
        matches!(self, DirectSum::Certified(_))
    }
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RatMatrix { rows, cols, data }
    }

    /// Builds a matrix from rows of rationals. All rows must share a length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "ragged rows: expected {cols} entries, found {}",
                bad.len()
            )));
        }
        let n = rows.len();
        Ok(RatMatrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Integer-entry constructor, mostly for tests and examples.
    ///
    /// # Panics
    ///
    /// Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_fn(rows.len(), cols, |i, j| rat(rows[i][j]))
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> impl Iterator<Item = Vec<Rational>> + '_ {
        (0..self.cols).map(|j| self.column(j))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// Checked product. Prefer the `*` operator when shapes are known to agree.
    pub fn try_mul(&self, rhs: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {:?} by {:?}",
                self.shape(),
                rhs.shape()
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Horizontal concatenation. With no blocks the result is `rows × 0`.
    pub fn hstack(rows: usize, blocks: &[&RatMatrix]) -> Result<RatMatrix> {
        if let Some(b) = blocks.iter().find(|b| b.rows != rows) {
            return Err(Error::DimensionMismatch(format!(
                "hstack: block has {} rows, expected {rows}",
                b.rows
            )));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            for i in 0..rows {
                for j in 0..b.cols {
                    out.set(i, offset + j, b.get(i, j).clone());
                }
            }
            offset += b.cols;
        }
        Ok(out)
    }

    /// Vertical concatenation. With no blocks the result is `0 × cols`.
    pub fn vstack(cols: usize, blocks: &[&RatMatrix]) -> Result<RatMatrix> {
        if let Some(b) = blocks.iter().find(|b| b.cols != cols) {
            return Err(Error::DimensionMismatch(format!(
                "vstack: block has {} columns, expected {cols}",
                b.cols
            )));
        }
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for b in blocks {
            data.extend(b.data.iter().cloned());
        }
        Ok(RatMatrix { rows, cols, data })
    }

    pub fn select_columns(&self, cols: &[usize]) -> RatMatrix {
        Self::from_fn(self.rows, cols.len(), |i, j| self.get(i, cols[j]).clone())
    }

    pub fn row_range(&self, start: usize, end: usize) -> RatMatrix {
        RatMatrix {
            rows: end - start,
            cols: self.cols,
            data: self.data[start * self.cols..end * self.cols].to_vec(),
        }
    }

    pub fn column_range(&self, start: usize, end: usize) -> RatMatrix {
        Self::from_fn(self.rows, end - start, |i, j| self.get(i, start + j).clone())
    }

    /// Exact reduced row echelon form.
    pub fn rref(&self) -> Rref {
        let (echelon, pivots) = bareiss_echelon(self);
        let mut m = RatMatrix::from_fn(self.rows, self.cols, |i, j| {
            Rational::from_integer(echelon[i][j].clone())
        });
        // normalize pivots to one and clear above, bottom-up
        for (r, &c) in pivots.iter().enumerate().rev() {
            let inv = m.get(r, c).recip();
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..r {
                let factor = m.get(i, c).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = m.get(i, j) - &factor * m.get(r, j);
                    m.set(i, j, v);
                }
            }
        }
        Rref { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        bareiss_echelon(self).1.len()
    }

    /// Columns spanning the right null space, one per free column of the
    /// reduced echelon form (so the basis is canonical for the row space).
    pub fn kernel_basis(&self) -> RatMatrix {
        let rref = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &rref.pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut out = RatMatrix::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            out.set(f, k, Rational::one());
            for (r, &p) in rref.pivots.iter().enumerate() {
                out.set(p, k, -rref.matrix.get(r, f));
            }
        }
        out
    }

    /// Solves `self · X = rhs`, or returns an infeasibility certificate.
    pub fn solve(&self, rhs: &RatMatrix) -> Result<Solution> {
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "solve: system has {} rows, right-hand side has {}",
                self.rows, rhs.rows
            )));
        }
        let augmented = RatMatrix::hstack(self.rows, &[self, rhs])?;
        let rref = augmented.rref();
        if rref.pivots.iter().any(|&p| p >= self.cols) {
            let left = self.transpose().kernel_basis();
            let witness = left
                .columns()
                .find(|y| {
                    (0..rhs.cols).any(|j| {
                        y.iter()
                            .enumerate()
                            .fold(Rational::zero(), |acc, (i, yi)| acc + yi * rhs.get(i, j))
                            != Rational::zero()
                    })
                })
                .expect("inconsistent system must have a separating left kernel vector");
            return Ok(Solution::Infeasible(witness));
        }
        let mut x = RatMatrix::zeros(self.cols, rhs.cols);
        for (r, &p) in rref.pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(p, j, rref.matrix.get(r, self.cols + j).clone());
            }
        }
        Ok(Solution::Solution(x))
    }

    /// Exact inverse of a square matrix, `None` when singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let augmented = RatMatrix::hstack(n, &[self, &RatMatrix::identity(n)]).ok()?;
        let rref = augmented.rref();
        if rref.pivots.len() < n || rref.pivots.iter().any(|&p| p >= n) {
            return None;
        }
        Some(rref.matrix.column_range(n, 2 * n))
    }

    pub fn determinant(&self) -> Option<Rational> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(Rational::one());
        }
        // Bareiss on the integer-scaled matrix, then undo the row scalings.
        let mut scale = Rational::one();
        let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for i in 0..n {
            let (row, lcm) = integer_row(self.row(i));
            scale *= Rational::from_integer(lcm);
            a.push(row);
        }
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return Some(Rational::zero());
            };
            if p != k {
                a.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        let det = Rational::from_integer(a[n - 1][n - 1].clone() * sign) / scale;
        Some(det)
    }
}

/// Checks that the concatenation of `blocks` is linearly independent in a
/// space of dimension `ambient_dim`.
pub fn direct_sum_check(blocks: &[&RatMatrix], ambient_dim: usize) -> Result<DirectSum> {
    let combined = RatMatrix::hstack(ambient_dim, blocks)?;
    let kernel = combined.kernel_basis();
    if kernel.cols() == 0 {
        Ok(DirectSum::Certified(combined))
    } else {
        Ok(DirectSum::Failure(kernel.column(0)))
    }
}

/// Row scaled to integers by the lcm of its denominators.
fn integer_row(row: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints = row
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    (ints, lcm)
}

/// Fraction-free (Bareiss) forward elimination to row echelon form.
///
/// Every intermediate entry is a minor of the integer-scaled input, so the
/// division by the previous pivot is exact.
fn bareiss_echelon(m: &RatMatrix) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut a: Vec<Vec<BigInt>> = (0..m.rows).map(|i| integer_row(m.row(i)).0).collect();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(p) = (r..m.rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in rest.iter_mut() {
            if row[c].is_zero() {
                for x in row[c + 1..].iter_mut() {
                    if !x.is_zero() {
                        *x = &*x * &pivot_row[c];
                        let (q, rem) = x.div_rem(&prev);
                        debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                        *x = q;
                    }
                }
                continue;
            }
            for j in c + 1..m.cols {
                let num = &pivot_row[c] * &row[j] - &row[c] * &pivot_row[j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                row[j] = q;
            }
            row[c] = BigInt::zero();
        }
        prev = pivot_row[c].clone();
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatMatrix {}x{} ", self.rows, self.cols)?;
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.to_string()).collect())
            .collect();
        f.debug_list().entries(rows).finish()
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.data.iter().map(|x| x.to_string()).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>width$}", cells[i * self.cols + j])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;

    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        self.try_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &RatMatrix {
    type Output = RatMatrix;

    fn add(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum shape mismatch");
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &RatMatrix {
    type Output = RatMatrix;

    fn sub(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference shape mismatch");
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &RatMatrix {
    type Output = RatMatrix;

    fn neg(self) -> RatMatrix {
        self.scale(&rat(-1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_i64(rows)
    }

    #[test]
    fn rref_identity_is_fixed() {
        let id = RatMatrix::identity(3);
        let r = id.rref();
        assert_eq!(r.matrix, id);
        assert_eq!(r.rank(), 3);
    }

    #[test]
    fn rref_zero_matrix() {
        let z = RatMatrix::zeros(2, 4);
        let r = z.rref();
        assert_eq!(r.matrix, z);
        assert_eq!(r.rank(), 0);
    }

    #[test]
    fn rref_rank_one() {
        let r = m(&[&[1, 2], &[2, 4]]).rref();
        assert_eq!(r.matrix, m(&[&[1, 2], &[0, 0]]));
        assert_eq!(r.pivots, vec![0]);
    }

    #[test]
    fn rref_with_fractions_and_skipped_columns() {
        let a = RatMatrix::from_rows(vec![
            vec![ratio(1, 2), rat(0), rat(1), rat(3)],
            vec![rat(1), rat(0), ratio(2, 3), rat(0)],
            vec![rat(3), rat(0), rat(2), rat(1)],
        ])
        .unwrap();
        let r = a.rref();
        assert_eq!(r.pivots, vec![0, 2, 3]);
        assert_eq!(
            r.matrix,
            m(&[&[1, 0, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]])
        );
    }

    #[test]
    fn kernel_of_row_of_ones() {
        let k = m(&[&[1, 1]]).kernel_basis();
        assert_eq!(k, m(&[&[-1], &[1]]));
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        assert_eq!(RatMatrix::identity(3).kernel_basis().shape(), (3, 0));
    }

    #[test]
    fn kernel_of_zero_row() {
        assert_eq!(RatMatrix::zeros(1, 2).kernel_basis(), RatMatrix::identity(2));
    }

    #[test]
    fn solve_scalar() {
        let x = m(&[&[2]]).solve(&m(&[&[1]])).unwrap();
        assert_eq!(x, Solution::Solution(RatMatrix::from_rows(vec![vec![ratio(1, 2)]]).unwrap()));
    }

    #[test]
    fn solve_zero_scalar_is_infeasible() {
        let x = m(&[&[0]]).solve(&m(&[&[1]])).unwrap();
        assert_eq!(x, Solution::Infeasible(vec![rat(1)]));
    }

    #[test]
    fn solve_identity_returns_rhs() {
        let b = m(&[&[1, -2], &[3, 4], &[0, 7]]);
        let x = RatMatrix::identity(3).solve(&b).unwrap();
        assert_eq!(x, Solution::Solution(b));
    }

    #[test]
    fn solve_dimension_mismatch() {
        assert!(matches!(
            RatMatrix::identity(2).solve(&RatMatrix::zeros(3, 1)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn direct_sum_of_unit_vectors() {
        let e1 = m(&[&[1], &[0]]);
        let e2 = m(&[&[0], &[1]]);
        let cert = direct_sum_check(&[&e1, &e2], 2).unwrap();
        assert!(cert.is_certified());
        let DirectSum::Certified(combined) = cert else { unreachable!() };
        assert_eq!(combined.rank(), 2);
    }

    #[test]
    fn direct_sum_failure_witness() {
        let e1 = m(&[&[1], &[0]]);
        let cert = direct_sum_check(&[&e1, &e1], 2).unwrap();
        assert_eq!(cert, DirectSum::Failure(vec![rat(-1), rat(1)]));
    }

    #[test]
    fn empty_direct_sum() {
        assert!(direct_sum_check(&[], 0).unwrap().is_certified());
    }

    #[test]
    fn determinant_and_inverse() {
        let a = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(a.determinant(), Some(rat(1)));
        assert_eq!(a.inverse(), Some(m(&[&[1, -1], &[-1, 2]])));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).inverse(), None);
        assert_eq!(m(&[&[0, 1], &[1, 0]]).determinant(), Some(rat(-1)));
    }

    #[test]
    fn rational_text_form() {
        assert_eq!(ratio(6, -4).to_string(), "-3/2");
        assert_eq!(rat(5).to_string(), "5");
        assert_eq!(parse_rational("-3/2"), Some(ratio(-3, 2)));
        assert_eq!(parse_rational("7"), Some(rat(7)));
        assert_eq!(parse_rational("1/0"), None);
    }

    fn small_matrix() -> impl Strategy<Value = RatMatrix> {
        (0usize..5, 0usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec((-3i64..=3, 1i64..=3), r * c).prop_map(move |entries| {
                RatMatrix::from_fn(r, c, |i, j| {
                    let (p, q) = entries[i * c + j];
                    ratio(p, q)
                })
            })
        })
    }

    proptest! {
        #[test]
        fn rref_is_idempotent(a in small_matrix()) {
            let once = a.rref();
            prop_assert_eq!(once.matrix.rref().matrix, once.matrix.clone());
        }

        #[test]
        fn rank_of_transpose(a in small_matrix()) {
            prop_assert_eq!(a.rank(), a.transpose().rank());
        }

        #[test]
        fn kernel_is_annihilated(a in small_matrix()) {
            let k = a.kernel_basis();
            prop_assert_eq!(k.cols(), a.cols() - a.rank());
            prop_assert!((&a * &k).is_zero());
            prop_assert_eq!(k.rank(), k.cols());
        }

        #[test]
        fn solve_is_exhaustive(a in small_matrix(), seed in proptest::collection::vec(-2i64..=2, 0..25)) {
            let b = RatMatrix::from_fn(a.rows(), 2, |i, j| rat(*seed.get(2 * i + j).unwrap_or(&1)));
            match a.solve(&b).unwrap() {
                Solution::Solution(x) => prop_assert_eq!(&a * &x, b),
                Solution::Infeasible(y) => {
                    let yt = RatMatrix::from_columns(y.len(), &[y]).transpose();
                    prop_assert!((&yt * &a).is_zero());
                    prop_assert!(!(&yt * &b).is_zero());
                }
            }
        }

        #[test]
        fn determinant_matches_invertibility(a in small_matrix()) {
            if a.is_square() {
                let det = a.determinant().unwrap();
                prop_assert_eq!(det.is_zero(), a.inverse().is_none());
                if let Some(inv) = a.inverse() {
                    prop_assert_eq!(&a * &inv, RatMatrix::identity(a.rows()));
                }
            }
        }
    }
}
