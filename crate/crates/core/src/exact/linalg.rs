//! Dense vectors and matrices over a [`Ring`], with exact Gaussian
//! elimination when the ring is the rational field.

use std::fmt;
use std::ops::{Deref, Index, IndexMut};

use super::scalar::{int, Ring, Scalar};
use crate::error::{dim_mismatch, Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Vector<T = Scalar>(Vec<T>);

impl<T: Ring> Vector<T> {
    pub fn new(entries: Vec<T>) -> Self {
        Vector(entries)
    }

    pub fn zeros(n: usize) -> Self {
        Vector(vec![T::zero(); n])
    }

    /// The `i`-th standard basis vector of length `n`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = T::one();
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(T::is_zero)
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    fn check_len(&self, other: &Self, op: &str) -> Result<()> {
        if self.len() != other.len() {
            return Err(dim_mismatch(format!(
                "{op}: lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }

    pub fn dot(&self, other: &Self) -> Result<T> {
        self.check_len(other, "dot")?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .fold(T::zero(), |acc, (a, b)| acc.add(&a.mul(b))))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_len(other, "add")?;
        Ok(Vector(self.0.iter().zip(&other.0).map(|(a, b)| a.add(b)).collect()))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_len(other, "sub")?;
        Ok(Vector(self.0.iter().zip(&other.0).map(|(a, b)| a.sub(b)).collect()))
    }

    pub fn scale(&self, s: &T) -> Self {
        Vector(self.0.iter().map(|a| a.mul(s)).collect())
    }

    pub fn neg(&self) -> Self {
        Vector(self.0.iter().map(T::neg).collect())
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut out = self.0.clone();
        out.extend(other.0.iter().cloned());
        Vector(out)
    }

    /// `[start, start + len)` slice as a new vector.
    pub fn segment(&self, start: usize, len: usize) -> Self {
        Vector(self.0[start..start + len].to_vec())
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Vector<U> {
        Vector(self.0.iter().map(f).collect())
    }
}

impl Vector<Scalar> {
    pub fn from_ints(xs: &[i64]) -> Self {
        Vector(xs.iter().map(|&x| int(x)).collect())
    }

    /// Affine combination `λ·self + (1−λ)·other`.
    pub fn affine_combination(&self, other: &Self, lambda: &Scalar) -> Result<Self> {
        self.check_len(other, "affine combination")?;
        let mu = Scalar::from_integer(1.into()) - lambda;
        Ok(Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| lambda * a + &mu * b)
                .collect(),
        ))
    }
}

impl<T> Deref for Vector<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> Index<usize> for Vector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for Vector<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<T> FromIterator<T> for Vector<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        Vector(iter.into_iter().collect())
    }
}

impl fmt::Display for Vector<Scalar> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Matrix<T = Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Ring> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds from rows; every row must have `cols` entries. An empty row
    /// list yields a `0 × cols` matrix.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(dim_mismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend(r);
        }
        Ok(Matrix { rows: n, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(columns: &[Vector<T>], rows: usize) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i].clone())
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

    pub fn row(&self, i: usize) -> Vector<T> {
        Vector::new(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn column(&self, j: usize) -> Vector<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).into_inner()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(T::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(dim_mismatch(format!(
                "matrix product {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(T::zero(), |acc, k| {
                acc.add(&self[(i, k)].mul(&other[(k, j)]))
            })
        }))
    }

    pub fn mul_vec(&self, v: &Vector<T>) -> Result<Vector<T>> {
        if self.cols != v.len() {
            return Err(dim_mismatch(format!(
                "matrix-vector product {}x{} * {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                (0..self.cols).fold(T::zero(), |acc, k| acc.add(&self[(i, k)].mul(&v[k])))
            })
            .collect())
    }

    /// Row vector times matrix: `vᵀ · self`.
    pub fn vec_mul(&self, v: &Vector<T>) -> Result<Vector<T>> {
        self.transpose().mul_vec(v)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(dim_mismatch("matrix sum"));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(T::neg)
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|a| a.mul(s))
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Sub-block `[r0, r0+rows) × [c0, c0+cols)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    /// Determinant by cofactor expansion. Division-free, so it works over
    /// any commutative ring; intended for the small sizes used here.
    pub fn det_expand(&self) -> Result<T> {
        if !self.is_square() {
            return Err(dim_mismatch("determinant of a non-square matrix"));
        }
        Ok(det_rec(self))
    }

    /// Classical adjugate (transpose of the cofactor matrix).
    pub fn adjugate(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(dim_mismatch("adjugate of a non-square matrix"));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(self.clone());
        }
        if n == 1 {
            return Ok(Self::identity(1));
        }
        Ok(Self::from_fn(n, n, |i, j| {
            let minor = self.minor(j, i);
            let d = det_rec(&minor);
            if (i + j) % 2 == 0 {
                d
            } else {
                d.neg()
            }
        }))
    }

    fn minor(&self, skip_r: usize, skip_c: usize) -> Self {
        let n = self.rows;
        Self::from_fn(n - 1, n - 1, |i, j| {
            let r = if i < skip_r { i } else { i + 1 };
            let c = if j < skip_c { j } else { j + 1 };
            self[(r, c)].clone()
        })
    }
}

fn det_rec<T: Ring>(m: &Matrix<T>) -> T {
    match m.rows {
        0 => T::one(),
        1 => m[(0, 0)].clone(),
        2 => m[(0, 0)].mul(&m[(1, 1)]).sub(&m[(0, 1)].mul(&m[(1, 0)])),
        n => {
            let mut acc = T::zero();
            for j in 0..n {
                if m[(0, j)].is_zero() {
                    continue;
                }
                let term = m[(0, j)].mul(&det_rec(&m.minor(0, j)));
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Reduced row echelon form together with the pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
}

impl Matrix<Scalar> {
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Matrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect(),
            cols,
        )
        .expect("rectangular integer literal")
    }

    pub fn echelon(&self) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !Ring::is_zero(&m[(i, c)])) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = Scalar::from_integer(1.into()) / &m[(r, c)];
            for j in 0..m.cols {
                m[(r, j)] = &m[(r, j)] * &inv;
            }
            for i in 0..m.rows {
                if i != r && !Ring::is_zero(&m[(i, c)]) {
                    let f = m[(i, c)].clone();
                    for j in 0..m.cols {
                        let d = &f * &m[(r, j)];
                        m[(i, j)] = &m[(i, j)] - d;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { reduced: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Determinant by elimination.
    pub fn det(&self) -> Result<Scalar> {
        if !self.is_square() {
            return Err(dim_mismatch("determinant of a non-square matrix"));
        }
        let mut m = self.clone();
        let n = m.rows;
        let mut det: Scalar = Ring::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !Ring::is_zero(&m[(i, c)])) else {
                return Ok(Ring::zero());
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            det = &det * &m[(c, c)];
            for i in c + 1..n {
                if Ring::is_zero(&m[(i, c)]) {
                    continue;
                }
                let f = &m[(i, c)] / &m[(c, c)];
                for j in c..n {
                    let d = &f * &m[(c, j)];
                    m[(i, j)] = &m[(i, j)] - d;
                }
            }
        }
        Ok(det)
    }

    /// Exact inverse by Gauss–Jordan elimination on `[M | I]`.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(dim_mismatch("inverse of a non-square matrix"));
        }
        let n = self.rows;
        let aug = Matrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                Ring::one()
            } else {
                Ring::zero()
            }
        });
        let e = aug.echelon();
        if e.pivots.len() < n || e.pivots[n - 1] != n - 1 {
            return Err(Error::SingularMatrix);
        }
        Ok(e.reduced.block(0, n, n, n))
    }

    /// Basis of the right null space, as columns of an `cols × k` matrix.
    pub fn kernel(&self) -> Matrix {
        let e = self.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !e.pivots.contains(c)).collect();
        let basis: Vec<Vector> = free
            .iter()
            .map(|&f| {
                let mut v = Vector::zeros(self.cols);
                v[f] = Ring::one();
                for (r, &p) in e.pivots.iter().enumerate() {
                    v[p] = -e.reduced[(r, f)].clone();
                }
                v
            })
            .collect();
        Matrix::from_columns(&basis, self.cols)
    }

    /// Some solution of `self · x = b`, or `None` when inconsistent.
    pub fn solve(&self, b: &Vector) -> Result<Option<Vector>> {
        if b.len() != self.rows {
            return Err(dim_mismatch("right-hand side length"));
        }
        let aug = Matrix::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                b[i].clone()
            }
        });
        let e = aug.echelon();
        if e.pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = Vector::zeros(self.cols);
        for (r, &p) in e.pivots.iter().enumerate() {
            x[p] = e.reduced[(r, self.cols)].clone();
        }
        Ok(Some(x))
    }
}

impl fmt::Display for Matrix<Scalar> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", self.row(i))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::scalar::frac;

    #[test]
    fn identity_inverse() {
        let i3 = Matrix::<Scalar>::identity(3);
        assert_eq!(i3.inverse().unwrap(), i3);
    }

    #[test]
    fn diagonal_inverse() {
        let m = Matrix::from_rows(
            vec![vec![int(2), int(0)], vec![int(0), frac(1, 2)]],
            2,
        )
        .unwrap();
        let expected = Matrix::from_rows(
            vec![vec![frac(1, 2), int(0)], vec![int(0), int(2)]],
            2,
        )
        .unwrap();
        assert_eq!(m.inverse().unwrap(), expected);
    }

    #[test]
    fn singular_rejected() {
        let m = Matrix::from_ints(&[&[1, 2], &[2, 4]]);
        assert_eq!(m.inverse(), Err(Error::SingularMatrix));
        assert!(Ring::is_zero(&m.det().unwrap()));
    }

    #[test]
    fn kernel_is_annihilated() {
        let m = Matrix::from_ints(&[&[1, 1, 1], &[0, 1, 2]]);
        let k = m.kernel();
        assert_eq!(k.cols(), 1);
        assert!(m.mul(&k).unwrap().is_zero());
    }

    #[test]
    fn expansion_matches_elimination() {
        let m = Matrix::from_ints(&[&[2, -1, 0, 3], &[1, 4, 2, 0], &[0, 5, -3, 1], &[7, 0, 1, 1]]);
        assert_eq!(m.det().unwrap(), m.det_expand().unwrap());
        let adj = m.adjugate().unwrap();
        let prod = m.mul(&adj).unwrap();
        assert_eq!(prod, Matrix::identity(4).scale(&m.det().unwrap()));
    }

    #[test]
    fn solve_inconsistent() {
        let m = Matrix::from_ints(&[&[1, 1], &[1, 1]]);
        assert_eq!(m.solve(&Vector::from_ints(&[1, 2])).unwrap(), None);
        let x = m.solve(&Vector::from_ints(&[3, 3])).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), Vector::from_ints(&[3, 3]));
    }
}
