use super::linalg::{Matrix, Vector};
use super::scalar::{Ring, Scalar};
use crate::error::{dim_mismatch, Result};

/// Bilinear map `V₁ × V₂ → V₃` stored as a dense `(n₃, n₁, n₂)` array.
/// Component `u` of `Γ(y, z)` is `Σ_{i,b} Γ[u,i,b]·y_i·z_b`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Bilinear<T = Scalar> {
    n3: usize,
    n1: usize,
    n2: usize,
    data: Vec<T>,
}

impl<T: Ring> Bilinear<T> {
    pub fn zeros(n3: usize, n1: usize, n2: usize) -> Self {
        Bilinear {
            n3,
            n1,
            n2,
            data: vec![T::zero(); n3 * n1 * n2],
        }
    }

    pub fn from_fn(n3: usize, n1: usize, n2: usize, f: impl Fn(usize, usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n3 * n1 * n2);
        for u in 0..n3 {
            for i in 0..n1 {
                for b in 0..n2 {
                    data.push(f(u, i, b));
                }
            }
        }
        Bilinear { n3, n1, n2, data }
    }

    /// One `n₁ × n₂` slice per output component.
    pub fn from_slices(slices: &[Matrix<T>], n1: usize, n2: usize) -> Result<Self> {
        for s in slices {
            if s.rows() != n1 || s.cols() != n2 {
                return Err(dim_mismatch(format!(
                    "bilinear slice is {}x{}, expected {n1}x{n2}",
                    s.rows(),
                    s.cols()
                )));
            }
        }
        Ok(Self::from_fn(slices.len(), n1, n2, |u, i, b| slices[u][(i, b)].clone()))
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n3, self.n1, self.n2)
    }

    pub fn get(&self, u: usize, i: usize, b: usize) -> &T {
        &self.data[(u * self.n1 + i) * self.n2 + b]
    }

    pub fn set(&mut self, u: usize, i: usize, b: usize, value: T) {
        let idx = (u * self.n1 + i) * self.n2 + b;
        self.data[idx] = value;
    }

    pub fn slice(&self, u: usize) -> Matrix<T> {
        Matrix::from_fn(self.n1, self.n2, |i, b| self.get(u, i, b).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(T::is_zero)
    }

    pub fn apply(&self, y: &Vector<T>, z: &Vector<T>) -> Result<Vector<T>> {
        if y.len() != self.n1 || z.len() != self.n2 {
            return Err(dim_mismatch(format!(
                "bilinear map expects ({}, {}) arguments, got ({}, {})",
                self.n1,
                self.n2,
                y.len(),
                z.len()
            )));
        }
        Ok((0..self.n3)
            .map(|u| {
                let mut acc = T::zero();
                for i in 0..self.n1 {
                    if y[i].is_zero() {
                        continue;
                    }
                    for b in 0..self.n2 {
                        acc = acc.add(&self.get(u, i, b).mul(&y[i]).mul(&z[b]));
                    }
                }
                acc
            })
            .collect())
    }

    /// `(y, z) ↦ L · Γ(y, z)` for a linear map `L` on the output.
    pub fn post_compose(&self, l: &Matrix<T>) -> Result<Self> {
        if l.cols() != self.n3 {
            return Err(dim_mismatch("post-composition"));
        }
        Ok(Self::from_fn(l.rows(), self.n1, self.n2, |v, i, b| {
            (0..self.n3).fold(T::zero(), |acc, u| acc.add(&l[(v, u)].mul(self.get(u, i, b))))
        }))
    }

    /// `(y, z) ↦ Γ(A·y, B·z)`.
    pub fn pre_compose(&self, a: &Matrix<T>, b: &Matrix<T>) -> Result<Self> {
        if a.rows() != self.n1 || b.rows() != self.n2 {
            return Err(dim_mismatch("pre-composition"));
        }
        Ok(Self::from_fn(self.n3, a.cols(), b.cols(), |u, i, k| {
            let mut acc = T::zero();
            for j in 0..self.n1 {
                if a[(j, i)].is_zero() {
                    continue;
                }
                for c in 0..self.n2 {
                    acc = acc.add(&self.get(u, j, c).mul(&a[(j, i)]).mul(&b[(c, k)]));
                }
            }
            acc
        }))
    }

    /// The linear map `z ↦ Γ(y, z)` for fixed `y`, as an `n₃ × n₂` matrix.
    pub fn partial_left(&self, y: &Vector<T>) -> Result<Matrix<T>> {
        if y.len() != self.n1 {
            return Err(dim_mismatch("partial evaluation (left)"));
        }
        Ok(Matrix::from_fn(self.n3, self.n2, |u, b| {
            (0..self.n1).fold(T::zero(), |acc, i| acc.add(&self.get(u, i, b).mul(&y[i])))
        }))
    }

    /// The linear map `y ↦ Γ(y, z)` for fixed `z`, as an `n₃ × n₁` matrix.
    pub fn partial_right(&self, z: &Vector<T>) -> Result<Matrix<T>> {
        if z.len() != self.n2 {
            return Err(dim_mismatch("partial evaluation (right)"));
        }
        Ok(Matrix::from_fn(self.n3, self.n1, |u, i| {
            (0..self.n2).fold(T::zero(), |acc, b| acc.add(&self.get(u, i, b).mul(&z[b])))
        }))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.dims() != other.dims() {
            return Err(dim_mismatch("bilinear sum"));
        }
        Ok(Bilinear {
            n3: self.n3,
            n1: self.n1,
            n2: self.n2,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn neg(&self) -> Self {
        self.map(T::neg)
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Bilinear<U> {
        Bilinear {
            n3: self.n3,
            n1: self.n1,
            n2: self.n2,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Swaps the roles of the two arguments.
    pub fn swapped(&self) -> Self {
        Self::from_fn(self.n3, self.n2, self.n1, |u, b, i| self.get(u, i, b).clone())
    }
}

/// Free-standing form of [`Bilinear::apply`].
pub fn bilinear_apply(gamma: &Bilinear, u: &Vector, w: &Vector) -> Result<Vector> {
    gamma.apply(u, w)
}
