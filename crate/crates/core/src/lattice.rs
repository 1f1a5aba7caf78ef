//! Exact integer linear algebra: dense matrices over arbitrary-precision
//! integers, Smith and Hermite normal forms, quotient lattices and
//! smoothness of simplicial cones.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type IntVector = Vec<BigInt>;

pub fn int_vector(values: &[i64]) -> IntVector {
    values.iter().map(|&v| BigInt::from(v)).collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A vector is primitive when the gcd of its entries is 1.
pub fn is_primitive(v: &[BigInt]) -> bool {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x)).is_one()
}

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, BigInt::one())
    }

    pub fn scalar(n: usize, q: BigInt) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = q.clone();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_big_rows(rows.iter().map(|r| int_vector(r)).collect())
    }

    pub fn from_big_rows(rows: Vec<IntVector>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::DimensionMismatch("empty matrix".into()));
        }
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(IntMatrix {
            rows: n_rows,
            cols: n_cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds the matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[IntVector]) -> Result<Self> {
        Ok(Self::from_big_rows(cols.to_vec())?.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> IntVector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<IntVector> {
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
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> IntVector {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut m: Vec<IntVector> = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = num / &prev;
                }
            }
            prev = m[k][k].clone();
        }
        sign * &m[n - 1][n - 1]
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.determinant().abs().is_one()
    }

    /// Inverse of a unimodular matrix, computed over the rationals.
    pub fn unimodular_inverse(&self) -> Option<IntMatrix> {
        if !self.is_unimodular() {
            return None;
        }
        let inv = rational_inverse(self)?;
        let rows = inv
            .into_iter()
            .map(|r| r.into_iter().map(|x| x.to_integer()).collect())
            .collect();
        IntMatrix::from_big_rows(rows).ok()
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

    /// row[dst] += k * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let delta = k * self.get(src, j);
            self.data[dst * self.cols + j] += delta;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let delta = k * self.get(i, src);
            self.data[i * self.cols + dst] += delta;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let idx = i * self.cols + j;
            self.data[idx] = -std::mem::take(&mut self.data[idx]);
        }
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

/// Result of [`smith_normal_form`]: `u * a * v == s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    /// Diagonal of `s`, length `min(rows, cols)`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let k = self.s.rows().min(self.s.cols());
        (0..k).map(|i| self.s.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().iter().filter(|d| !d.is_zero()).count()
    }
}

/// Position (row-major) of the smallest-magnitude nonzero entry of the
/// trailing submatrix starting at `(t, t)`.
fn smallest_pivot(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a.get(bi, bj).abs() <= x.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// Smith normal form with unimodular transforms.
///
/// Pivot rule: smallest nonzero magnitude in the remaining submatrix, ties
/// broken by row-major position.
pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let (m, n) = (a.rows(), a.cols());
    let mut s = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    'diag: for t in 0..m.min(n) {
        loop {
            let Some((pi, pj)) = smallest_pivot(&s, t) else {
                break 'diag;
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let pivot = s.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..m {
                if s.get(i, t).is_zero() {
                    continue;
                }
                let q = -s.get(i, t).div_floor(&pivot);
                s.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                clean &= s.get(i, t).is_zero();
            }
            for j in t + 1..n {
                if s.get(t, j).is_zero() {
                    continue;
                }
                let q = -s.get(t, j).div_floor(&pivot);
                s.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                clean &= s.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }

            let offender = (t + 1..m).find(|&i| {
                (t + 1..n).any(|j| !s.get(i, j).is_multiple_of(&pivot))
            });
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    s.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    SnfResult { u, s, v }
}

/// Result of [`hermite_normal_form`]: `t * a == h` with `t` unimodular and
/// `h` in reduced row echelon form (positive pivots, entries above each
/// pivot reduced into `[0, pivot)`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HnfResult {
    pub t: IntMatrix,
    pub h: IntMatrix,
    pub pivots: Vec<usize>,
}

pub fn hermite_normal_form(a: &IntMatrix) -> HnfResult {
    let (m, n) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut t = IntMatrix::identity(m);
    let mut pivots = Vec::new();
    let mut r = 0;
    for j in 0..n {
        if r == m {
            break;
        }
        loop {
            let best = (r..m)
                .filter(|&i| !h.get(i, j).is_zero())
                .min_by(|&x, &y| h.get(x, j).abs().cmp(&h.get(y, j).abs()).then(x.cmp(&y)));
            let Some(p) = best else { break };
            h.swap_rows(r, p);
            t.swap_rows(r, p);
            let pivot = h.get(r, j).clone();
            let mut done = true;
            for i in r + 1..m {
                if h.get(i, j).is_zero() {
                    continue;
                }
                let q = -h.get(i, j).div_floor(&pivot);
                h.add_row_multiple(i, r, &q);
                t.add_row_multiple(i, r, &q);
                done &= h.get(i, j).is_zero();
            }
            if done {
                break;
            }
        }
        if h.get(r, j).is_zero() {
            continue;
        }
        if h.get(r, j).is_negative() {
            h.negate_row(r);
            t.negate_row(r);
        }
        let pivot = h.get(r, j).clone();
        for i in 0..r {
            let q = -h.get(i, j).div_floor(&pivot);
            h.add_row_multiple(i, r, &q);
            t.add_row_multiple(i, r, &q);
        }
        pivots.push(j);
        r += 1;
    }
    HnfResult { t, h, pivots }
}

/// The finite quotient `Z^n / A Z^n` of a nonsingular square matrix `A`,
/// presented through the Smith form: `x` is reduced by mapping `U x` into
/// the box `prod [0, s_i)` and pulling back through `U^{-1}`.
#[derive(Clone, Debug)]
pub struct QuotientLattice {
    u: IntMatrix,
    u_inv: IntMatrix,
    moduli: Vec<BigInt>,
}

impl QuotientLattice {
    pub fn new(a: &IntMatrix) -> Result<Self> {
        if !a.is_square() || a.determinant().is_zero() {
            return Err(Error::NotFiniteIndex);
        }
        let snf = smith_normal_form(a);
        let u_inv = snf
            .u
            .unimodular_inverse()
            .expect("Smith transform is unimodular");
        Ok(QuotientLattice {
            moduli: snf.invariant_factors(),
            u: snf.u,
            u_inv,
        })
    }

    pub fn dim(&self) -> usize {
        self.moduli.len()
    }

    /// Number of cosets, `|det A|`.
    pub fn index(&self) -> BigInt {
        self.moduli.iter().product()
    }

    pub fn moduli(&self) -> &[BigInt] {
        &self.moduli
    }

    /// Canonical representative of the coset of `x`.
    pub fn reduce(&self, x: &[BigInt]) -> IntVector {
        let w: IntVector = self
            .u
            .mul_vec(x)
            .iter()
            .zip(&self.moduli)
            .map(|(c, d)| c.mod_floor(d))
            .collect();
        self.u_inv.mul_vec(&w)
    }

    pub fn same_coset(&self, x: &[BigInt], y: &[BigInt]) -> bool {
        self.reduce(x) == self.reduce(y)
    }

    /// All canonical representatives, in lexicographic order of their box
    /// coordinates.
    pub fn representatives(&self) -> Vec<IntVector> {
        let n = self.dim();
        let mut out = Vec::new();
        let mut w = vec![BigInt::zero(); n];
        loop {
            out.push(self.u_inv.mul_vec(&w));
            let mut k = n;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                w[k] += 1;
                if w[k] < self.moduli[k] {
                    break;
                }
                w[k] = BigInt::zero();
            }
        }
    }
}

/// Canonical representatives of `Z^n / F Z^n` for nonsingular `F`.
pub fn coset_representatives(f: &IntMatrix) -> Result<Vec<IntVector>> {
    Ok(QuotientLattice::new(f)?.representatives())
}

/// True iff the given primitive rays extend to a basis of the ambient
/// lattice.
pub fn cone_is_smooth(rays: &[IntVector]) -> Result<bool> {
    if rays.is_empty() {
        return Ok(true);
    }
    let dim = rays[0].len();
    for r in rays {
        if r.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "ray of length {} in a rank-{dim} lattice",
                r.len()
            )));
        }
        if !is_primitive(r) {
            return Err(Error::RayNotPrimitive(format_vector(r)));
        }
    }
    if rays.len() > dim {
        return Ok(false);
    }
    let snf = smith_normal_form(&IntMatrix::from_columns(rays)?);
    let factors = snf.invariant_factors();
    Ok(factors.len() == rays.len() && factors.iter().all(One::is_one))
}

/// Integer basis of the kernel `{x : A x = 0}`, read off the Smith form.
pub fn integer_kernel(a: &IntMatrix) -> Vec<IntVector> {
    let snf = smith_normal_form(a);
    let rank = snf.rank();
    (rank..a.cols()).map(|j| snf.v.column(j)).collect()
}

pub fn format_vector(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

pub(crate) fn to_rational(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

/// Gauss-Jordan inverse over the rationals; `None` when singular.
pub fn rational_inverse(a: &IntMatrix) -> Option<Vec<Vec<BigRational>>> {
    assert!(a.is_square());
    let n = a.rows();
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = a.row(i).iter().map(to_rational).collect();
            row.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let k = m[i][c].clone();
                for j in 0..2 * n {
                    let delta = &k * &m[c][j];
                    m[i][j] -= delta;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solves `A x = b` for square nonsingular `A` over the rationals.
pub fn solve_rational(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigRational>> {
    let inv = rational_inverse(a)?;
    Some(
        inv.iter()
            .map(|row| row.iter().zip(b).map(|(x, y)| x * to_rational(y)).sum())
            .collect(),
    )
}
