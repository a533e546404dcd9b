use super::linalg::{Matrix, Vector};
use super::poly::Poly;
use super::scalar::Ring;
use crate::error::{dim_mismatch, Error, Result};

/// Affine-invertible change of base coordinates `x' = P·x + q`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BaseMap {
    p: Matrix,
    q: Vector,
}

impl BaseMap {
    pub fn new(p: Matrix, q: Vector) -> Result<Self> {
        if !p.is_square() || p.rows() != q.len() {
            return Err(dim_mismatch("base map P must be m×m and q of length m"));
        }
        if Ring::is_zero(&p.det()?) {
            return Err(Error::SingularMatrix);
        }
        Ok(BaseMap { p, q })
    }

    pub fn identity(m: usize) -> Self {
        BaseMap {
            p: Matrix::identity(m),
            q: Vector::zeros(m),
        }
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn linear(&self) -> &Matrix {
        &self.p
    }

    pub fn translation(&self) -> &Vector {
        &self.q
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        self.p.mul_vec(x)?.try_add(&self.q)
    }

    /// `other ∘ self`: first `self`, then `other`.
    pub fn then(&self, other: &BaseMap) -> Result<BaseMap> {
        let p = other.p.mul(&self.p)?;
        let q = other.p.mul_vec(&self.q)?.try_add(&other.q)?;
        Ok(BaseMap { p, q })
    }

    pub fn inverse(&self) -> Result<BaseMap> {
        let pi = self.p.inverse()?;
        let q = pi.mul_vec(&self.q)?.neg();
        Ok(BaseMap { p: pi, q })
    }

    /// The components `x'_j` as polynomials in `x`.
    pub fn as_polys(&self) -> Vec<Poly> {
        (0..self.dim())
            .map(|j| Poly::linear(self.q[j].clone(), self.p.row(j).as_slice()))
            .collect()
    }

    /// `f ∘ self`, i.e. a function of the target coordinates rewritten in
    /// the source coordinates.
    pub fn pull_back(&self, f: &Poly) -> Result<Poly> {
        f.compose(&self.as_polys())
    }
}

/// Pulls a whole coefficient block back through a base map.
pub fn pull_back_all<'a>(base: &BaseMap, polys: impl IntoIterator<Item = &'a Poly>) -> Result<Vec<Poly>> {
    let subst = base.as_polys();
    polys.into_iter().map(|f| f.compose(&subst)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::scalar::int;

    #[test]
    fn inverse_round_trip() {
        let b = BaseMap::new(Matrix::from_ints(&[&[1, 2], &[0, 1]]), Vector::from_ints(&[3, -1])).unwrap();
        let id = b.then(&b.inverse().unwrap()).unwrap();
        assert_eq!(id, BaseMap::identity(2));
    }

    #[test]
    fn pull_back_matches_evaluation() {
        let b = BaseMap::new(Matrix::from_ints(&[&[2]]), Vector::from_ints(&[1])).unwrap();
        let f = Poly::var(0).pow(2);
        let g = b.pull_back(&f).unwrap();
        let x = [int(3)];
        let bx = b.apply(&Vector::new(x.to_vec())).unwrap();
        assert_eq!(g.eval(&x).unwrap(), f.eval(bx.as_slice()).unwrap());
    }

    #[test]
    fn singular_rejected() {
        assert_eq!(
            BaseMap::new(Matrix::from_ints(&[&[0]]), Vector::from_ints(&[0])),
            Err(Error::SingularMatrix)
        );
    }
}
