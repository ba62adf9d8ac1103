//! Exact integer and rational linear algebra.
//!
//! Smith normal form over arbitrary-precision integers, finitely generated
//! abelian groups, and a few dense rational routines (rank, nullspace, solve)
//! shared by the graph and monoid code.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("matrix entries length {len} does not match {rows}x{cols}")]
    Shape {
        rows: usize,
        cols: usize,
        len: usize,
    },
    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
    #[error("invariant factors {0:?} do not form a divisibility chain of values >= 2")]
    BadTorsion(Vec<BigInt>),
}

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, AlgebraError> {
        if entries.len() != rows * cols {
            return Err(AlgebraError::Shape {
                rows,
                cols,
                len: entries.len(),
            });
        }
        Ok(IntMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        Self::from_rows_with_width(rows, rows.first().map_or(0, |r| r.len()))
    }

    /// Like `from_i64` but fixes the column count, so empty relation sets keep their width.
    pub fn from_rows_with_width(rows: &[Vec<i64>], cols: usize) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            entries.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        IntMatrix {
            rows: rows.len(),
            cols,
            entries,
        }
    }

    pub fn from_big_rows(rows: &[Vec<BigInt>], cols: usize) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            entries.extend(r.iter().cloned());
        }
        IntMatrix {
            rows: rows.len(),
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = &out.entries[i * other.cols + j] + a * other.get(k, j);
                    out.entries[i * other.cols + j] = v;
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Determinant by fraction-free Bareiss elimination. Square matrices only.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(dst, j) + k * self.get(src, j);
            self.set(dst, j, v);
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, dst) + k * self.get(i, src);
            self.set(i, dst, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snf {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    /// Nonzero diagonal entries of `s`, in order.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.s.rows.min(self.s.cols);
        (0..k)
            .map(|i| self.s.get(i, i).clone())
            .take_while(|d| !d.is_zero())
            .collect()
    }
}

/// Smith normal form `U·M·V = S`.
///
/// Pivots are chosen as the entry of smallest absolute value in the active
/// block, ties broken by lowest row-major index, so output is reproducible.
pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let mut s = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let k = m.rows.min(m.cols);
    let mut t = 0;
    while t < k {
        // smallest nonzero in the active block
        let mut best: Option<(usize, usize)> = None;
        for i in t..s.rows {
            for j in t..s.cols {
                let x = s.get(i, j);
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs() < s.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);

        // clear column t and row t; restart on a smaller remainder
        let mut dirty = false;
        for i in t + 1..s.rows {
            if s.get(i, t).is_zero() {
                continue;
            }
            let q = -s.get(i, t).div_floor(s.get(t, t));
            s.add_row(i, t, &q);
            u.add_row(i, t, &q);
            if !s.get(i, t).is_zero() {
                dirty = true;
            }
        }
        for j in t + 1..s.cols {
            if s.get(t, j).is_zero() {
                continue;
            }
            let q = -s.get(t, j).div_floor(s.get(t, t));
            s.add_col(j, t, &q);
            v.add_col(j, t, &q);
            if !s.get(t, j).is_zero() {
                dirty = true;
            }
        }
        if dirty {
            continue;
        }
        // divisibility: pull an offending row into row t
        let p = s.get(t, t).clone();
        let offending =
            (t + 1..s.rows).find(|&i| (t + 1..s.cols).any(|j| !s.get(i, j).is_multiple_of(&p)));
        if let Some(i) = offending {
            let one = BigInt::one();
            s.add_row(t, i, &one);
            u.add_row(t, i, &one);
            continue;
        }
        if p.is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    Snf { u, s, v }
}

/// Finitely generated abelian group `Z^r x Z/d1 x ... x Z/dk` with `d1 | d2 | ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FgAbGroup {
    free_rank: usize,
    torsion: Vec<BigInt>,
}

impl FgAbGroup {
    pub fn new(free_rank: usize, torsion: Vec<BigInt>) -> Result<Self, AlgebraError> {
        let two = BigInt::from(2);
        let ok = torsion.iter().all(|d| *d >= two)
            && torsion.windows(2).all(|w| w[1].is_multiple_of(&w[0]));
        if !ok {
            return Err(AlgebraError::BadTorsion(torsion));
        }
        Ok(FgAbGroup { free_rank, torsion })
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn trivial() -> Self {
        Self::free(0)
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }

    /// Direct sum, renormalized to invariant factors.
    pub fn direct_sum(&self, other: &FgAbGroup) -> FgAbGroup {
        let ds: Vec<BigInt> = self
            .torsion
            .iter()
            .chain(other.torsion.iter())
            .cloned()
            .collect();
        let n = ds.len();
        let mut m = IntMatrix::zeros(n, n);
        for (i, d) in ds.into_iter().enumerate() {
            m.set(i, i, d);
        }
        let t = cokernel_group(&m);
        FgAbGroup {
            free_rank: self.free_rank + other.free_rank,
            torsion: t.torsion,
        }
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" x "))
        }
    }
}

/// `Z^cols` modulo the row space of `m`.
pub fn cokernel_group(m: &IntMatrix) -> FgAbGroup {
    let snf = smith_normal_form(m);
    let diag = snf.diagonal();
    let one = BigInt::one();
    FgAbGroup {
        free_rank: m.cols - diag.len(),
        torsion: diag.into_iter().filter(|d| *d != one).collect(),
    }
}

/// Integer solution `x` of `x·A = b` (b a row combination of A's rows), if any.
pub fn solve_row_combination(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(b.len(), a.cols);
    // x A = b  <=>  (x U^-1)(U A V) = b V ; with S = U A V, y = x U^{-1}
    let snf = smith_normal_form(a);
    let bv: Vec<BigInt> = (0..a.cols)
        .map(|j| (0..a.cols).map(|k| &b[k] * snf.v.get(k, j)).sum())
        .collect();
    let diag = snf.diagonal();
    let mut y = vec![BigInt::zero(); a.rows];
    for (j, c) in bv.iter().enumerate() {
        if j < diag.len() {
            if !c.is_multiple_of(&diag[j]) {
                return None;
            }
            y[j] = c / &diag[j];
        } else if !c.is_zero() {
            return None;
        }
    }
    // x = y U
    Some(
        (0..a.rows)
            .map(|j| (0..a.rows).map(|k| &y[k] * snf.u.get(k, j)).sum())
            .collect(),
    )
}

/// Parse `"a/b"` or `"a"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, AlgebraError> {
    let err = || AlgebraError::ParseRational(s.to_string());
    let t = s.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| err())?;
    let d: BigInt = d.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(n, d))
}

/// `"a/b"`, or `"a"` when the denominator is 1.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let v = &m[i][j] - &f * &m[r][j];
                    m[i][j] = v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank_q(m: &[Vec<Rational>]) -> usize {
    let mut w = m.to_vec();
    rref(&mut w).len()
}

/// Basis of `{x : M x = 0}` where `M` has `cols` columns.
pub fn nullspace_q(m: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut w = m.to_vec();
    let pivots = rref(&mut w);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![Rational::zero(); cols];
        x[free] = Rational::one();
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = -w[r][free].clone();
        }
        basis.push(x);
    }
    basis
}

/// Some solution of `M x = b`, or `None` if inconsistent.
pub fn solve_q(m: &[Vec<Rational>], b: &[Rational], cols: usize) -> Option<Vec<Rational>> {
    let mut aug: Vec<Vec<Rational>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[r][cols].clone();
    }
    Some(x)
}

pub fn to_q(v: &[BigInt]) -> Vec<Rational> {
    v.iter()
        .map(|x| Rational::from_integer(x.clone()))
        .collect()
}

/// Scale a rational vector to a primitive integer vector with the same direction.
pub fn primitive_integer(v: &[Rational]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|q| (q * Rational::from_integer(l.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn snf_identity() {
        let m = IntMatrix::identity(2);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.s, m);
        assert_eq!(snf.u, m);
        assert_eq!(snf.v, m);
    }

    #[test]
    fn snf_two_by_two() {
        let m = IntMatrix::from_i64(&[vec![2, 4], vec![6, 8]]);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.s, IntMatrix::from_i64(&[vec![2, 0], vec![0, 4]]));
        assert_eq!(snf.u.mul(&m).mul(&snf.v), snf.s);
    }

    #[test]
    fn snf_zero_row() {
        let m = IntMatrix::zeros(1, 3);
        assert!(smith_normal_form(&m).s.is_zero());
    }

    #[test]
    fn cokernels() {
        let empty = IntMatrix::from_rows_with_width(&[], 3);
        assert_eq!(cokernel_group(&empty), FgAbGroup::free(3));
        let m = IntMatrix::from_i64(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(cokernel_group(&m), FgAbGroup::new(0, big(&[6])).unwrap());
        let m = IntMatrix::from_i64(&[vec![1, 1]]);
        assert_eq!(cokernel_group(&m), FgAbGroup::free(1));
    }

    #[test]
    fn display_groups() {
        assert_eq!(FgAbGroup::free(2).to_string(), "Z^2");
        assert_eq!(FgAbGroup::new(1, big(&[3])).unwrap().to_string(), "Z x Z/3");
        assert_eq!(FgAbGroup::trivial().to_string(), "0");
    }

    #[test]
    fn bad_torsion_rejected() {
        assert!(FgAbGroup::new(0, big(&[2, 3])).is_err());
        assert!(FgAbGroup::new(0, big(&[1])).is_err());
    }

    #[test]
    fn direct_sum_normalizes() {
        let a = FgAbGroup::new(0, big(&[2])).unwrap();
        let b = FgAbGroup::new(1, big(&[3])).unwrap();
        assert_eq!(a.direct_sum(&b), FgAbGroup::new(1, big(&[6])).unwrap());
    }

    #[test]
    fn row_combination_solver() {
        let a = IntMatrix::from_i64(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(solve_row_combination(&a, &big(&[4, 9])), Some(big(&[2, 3])));
        assert_eq!(solve_row_combination(&a, &big(&[1, 0])), None);
    }

    #[test]
    fn rationals_roundtrip() {
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert_eq!(format_rational(&rat(3, 2)), "3/2");
        assert_eq!(format_rational(&rat(4, 2)), "2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn nullspace_of_sum() {
        let m = vec![vec![rat_int(1), rat_int(1)]];
        let ns = nullspace_q(&m, 2);
        assert_eq!(ns, vec![vec![rat_int(-1), rat_int(1)]]);
    }

    #[test]
    fn determinant_small() {
        let m = IntMatrix::from_i64(&[vec![2, 1], vec![7, 4]]);
        assert_eq!(m.determinant(), BigInt::from(1));
        let m = IntMatrix::from_i64(&[vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 9]]);
        assert_eq!(m.determinant(), BigInt::from(-3));
    }
}
