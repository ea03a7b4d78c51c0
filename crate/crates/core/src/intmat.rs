//! Exact integer matrices and the normal forms used to describe lattices.
//!
//! Every operation here works over arbitrary-precision integers. The matrices
//! that show up in the search are tiny (k <= 4), but adjugates of candidate
//! generator matrices overflow 64 bits long before the orders get interesting.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(k: usize) -> Self {
        let mut m = Self::zeros(k, k);
        for i in 0..k {
            m.data[i * k + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows of anything convertible to `BigInt`.
    ///
    /// Panics if the rows are ragged.
    pub fn from_rows<T, R>(rows: &[R]) -> Self
    where
        T: Clone + Into<BigInt>,
        R: AsRef<[T]>,
    {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend(r.iter().cloned().map(Into::into));
        }
        IntMatrix {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn diagonal<T: Clone + Into<BigInt>>(entries: &[T]) -> Self {
        let k = entries.len();
        let mut m = Self::zeros(k, k);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * k + i] = e.clone().into();
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Entries as `i64`, or `None` if any entry does not fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(ToPrimitive::to_i64).collect())
            .collect()
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

    pub fn scaled(&self, factor: &BigInt) -> Self {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn checked_mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.data[idx] += a * other.get(l, j);
                }
            }
        }
        Ok(out)
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols.min(i)).all(|j| self.get(i, j).is_zero()))
    }

    /// Exactly one 1 per row and column, zeros elsewhere.
    pub fn is_permutation(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows;
        let mut col_seen = vec![false; n];
        for i in 0..n {
            let mut ones = 0;
            for (j, seen) in col_seen.iter_mut().enumerate() {
                let x = self.get(i, j);
                if x.is_one() {
                    if *seen {
                        return false;
                    }
                    *seen = true;
                    ones += 1;
                } else if !x.is_zero() {
                    return false;
                }
            }
            if ones != 1 {
                return false;
            }
        }
        true
    }

    /// Fraction-free (Bareiss) determinant.
    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut negate = false;
        let mut prev = BigInt::one();
        for i in 0..n - 1 {
            if a[i][i].is_zero() {
                match (i + 1..n).find(|&r| !a[r][i].is_zero()) {
                    Some(r) => {
                        a.swap(i, r);
                        negate = !negate;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for j in i + 1..n {
                for l in i + 1..n {
                    let num = &a[j][l] * &a[i][i] - &a[j][i] * &a[i][l];
                    a[j][l] = num / &prev;
                }
            }
            prev = a[i][i].clone();
        }
        let det = a[n - 1][n - 1].clone();
        Ok(if negate { -det } else { det })
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> IntMatrix {
        let n = self.rows;
        let mut data = Vec::with_capacity((n - 1) * (n - 1));
        for i in (0..n).filter(|&i| i != skip_row) {
            for j in (0..n).filter(|&j| j != skip_col) {
                data.push(self.get(i, j).clone());
            }
        }
        IntMatrix {
            rows: n - 1,
            cols: n - 1,
            data,
        }
    }

    /// Classical adjugate, `adj(A) * A = det(A) * I`.
    pub fn adjugate(&self) -> Result<IntMatrix> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 1 {
            return Ok(IntMatrix::identity(1));
        }
        let mut adj = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let cof = self.minor(j, i).determinant()?;
                adj.set(i, j, if (i + j) % 2 == 0 { cof } else { -cof });
            }
        }
        Ok(adj)
    }

    /// Inverse of a unimodular matrix.
    pub fn unimodular_inverse(&self) -> Result<IntMatrix> {
        let det = self.determinant()?;
        if det.abs() != BigInt::one() {
            return Err(Error::InvalidParameter(format!(
                "matrix is not unimodular (det {det})"
            )));
        }
        Ok(self.adjugate()?.scaled(&det))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let idx = r * self.cols + j;
            self.data[idx] = -&self.data[idx];
        }
    }

    /// `row[target] -= factor * row[source]`
    fn sub_row_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let delta = factor * &self.data[source * self.cols + j];
            self.data[target * self.cols + j] -= delta;
        }
    }

    /// `col[target] -= factor * col[source]`
    fn sub_col_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let delta = factor * &self.data[i * self.cols + source];
            self.data[i * self.cols + target] -= delta;
        }
    }

    /// Replaces rows `(s, r)` by `(x*s + y*r, p*s + q*r)`.
    fn combine_rows(&mut self, s: usize, r: usize, coeffs: [&BigInt; 4]) {
        let [x, y, p, q] = coeffs;
        for j in 0..self.cols {
            let a = &self.data[s * self.cols + j];
            let b = &self.data[r * self.cols + j];
            let new_s = x * a + y * b;
            let new_r = p * a + q * b;
            self.data[s * self.cols + j] = new_s;
            self.data[r * self.cols + j] = new_r;
        }
    }

    fn permute_cols(&mut self, order: &[usize], start: usize) {
        let old = self.clone();
        for (offset, &src) in order.iter().enumerate() {
            for i in 0..self.rows {
                self.set(i, start + offset, old.get(i, src).clone());
            }
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl std::ops::Mul<&IntMatrix> for &IntMatrix {
    type Output = IntMatrix;

    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        self.checked_mul(rhs).expect("matrix dimension mismatch")
    }
}

/// Extended gcd with a non-negative gcd: `a*x + b*y = g`.
pub(crate) fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = &old_r / &r;
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
        let next_t = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, next_t);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

fn column_gcd(m: &IntMatrix, col: usize, from_row: usize) -> BigInt {
    (from_row..m.rows()).fold(BigInt::zero(), |g, i| g.gcd(m.get(i, col)))
}

/// Output of [`special_hnf`]: `U * B * V = T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HnfResult {
    pub t: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

/// Checks the three conditions of the special Hermite form on an upper
/// triangular matrix: increasing positive diagonal, reduced entries above the
/// diagonal, and `T(i,i) <= gcd(T(i..=j, j))` for `i < j`.
pub fn is_special_hnf(t: &IntMatrix) -> bool {
    if !t.is_square() || !t.is_upper_triangular() {
        return false;
    }
    let k = t.rows();
    for i in 0..k {
        if !t.get(i, i).is_positive() {
            return false;
        }
        if i + 1 < k && t.get(i, i) > t.get(i + 1, i + 1) {
            return false;
        }
    }
    for j in 0..k {
        for i in 0..j {
            let x = t.get(i, j);
            if x.is_negative() || x >= t.get(j, j) {
                return false;
            }
            let g = (i..=j).fold(BigInt::zero(), |g, r| g.gcd(t.get(r, j)));
            if t.get(i, i) > &g {
                return false;
            }
        }
    }
    true
}

/// Upper triangular basis `T = U B V` with `U` unimodular and `V` a column
/// permutation.
///
/// At each elimination level the remaining columns are stably sorted by the
/// gcd of their remaining entries, and the pivot column is reduced to
/// `(g, 0, ..., 0)` with extended-gcd row combinations. A matrix that already
/// satisfies [`is_special_hnf`] is returned unchanged with `U = V = I`.
pub fn special_hnf(b: &IntMatrix) -> Result<HnfResult> {
    if !b.is_square() {
        return Err(Error::NotSquare {
            rows: b.rows(),
            cols: b.cols(),
        });
    }
    if b.determinant()?.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let k = b.rows();
    if is_special_hnf(b) {
        return Ok(HnfResult {
            t: b.clone(),
            u: IntMatrix::identity(k),
            v: IntMatrix::identity(k),
        });
    }

    let mut a = b.clone();
    let mut u = IntMatrix::identity(k);
    let mut perm: Vec<usize> = (0..k).collect();

    for s in 0..k {
        let gcds: Vec<BigInt> = (0..k).map(|c| column_gcd(&a, c, s)).collect();
        let mut order: Vec<usize> = (s..k).collect();
        order.sort_by(|&x, &y| gcds[x].cmp(&gcds[y]));
        if order.iter().enumerate().any(|(i, &c)| c != s + i) {
            a.permute_cols(&order, s);
            let old = perm.clone();
            for (offset, &src) in order.iter().enumerate() {
                perm[s + offset] = old[src];
            }
        }

        for r in s + 1..k {
            if a.get(r, s).is_zero() {
                continue;
            }
            let (g, x, y) = ext_gcd(a.get(s, s), a.get(r, s));
            let p = -(a.get(r, s) / &g);
            let q = a.get(s, s) / &g;
            a.combine_rows(s, r, [&x, &y, &p, &q]);
            u.combine_rows(s, r, [&x, &y, &p, &q]);
        }
        if a.get(s, s).is_negative() {
            a.negate_row(s);
            u.negate_row(s);
        }
    }

    for j in 1..k {
        for i in 0..j {
            let q = a.get(i, j).div_floor(a.get(j, j));
            a.sub_row_multiple(i, j, &q);
            u.sub_row_multiple(i, j, &q);
        }
    }

    let mut v = IntMatrix::zeros(k, k);
    for (pos, &orig) in perm.iter().enumerate() {
        v.set(orig, pos, BigInt::one());
    }
    Ok(HnfResult { t: a, u, v })
}

/// Output of [`snf`]: `D = V * A * U`, invariant factors in decreasing
/// divisibility order (`d[i+1] | d[i]`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub invariant_factors: Vec<BigInt>,
}

/// Smith normal form of a nonsingular square matrix.
pub fn snf(a: &IntMatrix) -> Result<SnfResult> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if a.determinant()?.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let k = a.rows();
    let mut d = a.clone();
    let mut left = IntMatrix::identity(k);
    let mut right = IntMatrix::identity(k);

    for t in 0..k {
        loop {
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..k {
                for j in t..k {
                    let x = d.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    let better = match pivot {
                        None => true,
                        Some((pi, pj)) => x.abs().cmp(&d.get(pi, pj).abs()) == Ordering::Less,
                    };
                    if better {
                        pivot = Some((i, j));
                    }
                }
            }
            let (pi, pj) = pivot.ok_or(Error::SingularMatrix)?;
            d.swap_rows(t, pi);
            left.swap_rows(t, pi);
            d.swap_cols(t, pj);
            right.swap_cols(t, pj);

            let mut clean = true;
            for r in t + 1..k {
                let q = d.get(r, t).div_floor(d.get(t, t));
                d.sub_row_multiple(r, t, &q);
                left.sub_row_multiple(r, t, &q);
                clean &= d.get(r, t).is_zero();
            }
            for c in t + 1..k {
                let q = d.get(t, c).div_floor(d.get(t, t));
                d.sub_col_multiple(c, t, &q);
                right.sub_col_multiple(c, t, &q);
                clean &= d.get(t, c).is_zero();
            }
            if !clean {
                continue;
            }
            let offender =
                (t + 1..k).find(|&r| (t + 1..k).any(|c| !d.get(r, c).is_multiple_of(d.get(t, t))));
            match offender {
                Some(r) => {
                    // row t += row r, then re-reduce
                    let minus_one = -BigInt::one();
                    d.sub_row_multiple(t, r, &minus_one);
                    left.sub_row_multiple(t, r, &minus_one);
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            left.negate_row(t);
        }
    }

    // Reverse to the decreasing convention.
    for i in 0..k / 2 {
        let j = k - 1 - i;
        d.swap_rows(i, j);
        d.swap_cols(i, j);
        left.swap_rows(i, j);
        right.swap_cols(i, j);
    }
    let invariant_factors = (0..k).map(|i| d.get(i, i).clone()).collect();
    Ok(SnfResult {
        d,
        u: right,
        v: left,
        invariant_factors,
    })
}

/// `|det A| = 1`. Non-square input is never unimodular.
pub fn is_unimodular(a: &IntMatrix) -> bool {
    a.determinant().map(|d| d.abs().is_one()).unwrap_or(false)
}

/// Integer `W` with `W * T = M * I`, computed exactly as `M * adj(T) / det(T)`.
///
/// Fails with [`Error::NotSublattice`] when some entry does not divide
/// exactly, i.e. `M Z^k` is not contained in the row lattice of `T`.
pub fn scaled_inverse(t: &IntMatrix, m: &BigInt) -> Result<IntMatrix> {
    let det = t.determinant()?;
    if det.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let adj = t.adjugate()?;
    let k = t.rows();
    let mut w = IntMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let num = adj.get(i, j) * m;
            let (q, r) = num.div_rem(&det);
            if !r.is_zero() {
                return Err(Error::NotSublattice);
            }
            w.set(i, j, q);
        }
    }
    Ok(w)
}
