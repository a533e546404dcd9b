//! Special affine spaces stored through their vector hulls.
//!
//! An affine space `A` is the level set `{α = 1}` of a nonzero covector `α`
//! on its hull. Its model vector space is `ker α`. A special affine space
//! also carries a distinguished nonzero model vector `v`.

use crate::error::{dim_mismatch, Error, Result};
use crate::exact::{one, Matrix, Ring, Scalar, Vector};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BispecialRep {
    alpha: Vector,
    v: Option<Vector>,
}

impl BispecialRep {
    pub fn new(alpha: Vector, v: Option<Vector>) -> Result<Self> {
        if alpha.is_zero() {
            return Err(Error::ZeroFunctional);
        }
        if let Some(v) = &v {
            if v.len() != alpha.len() {
                return Err(dim_mismatch("distinguished vector and functional"));
            }
            if v.is_zero() {
                return Err(Error::Invalid("distinguished vector is zero".into()));
            }
            if !Ring::is_zero(&alpha.dot(v)?) {
                return Err(Error::Invalid("distinguished vector is not a model vector".into()));
            }
        }
        Ok(BispecialRep { alpha, v })
    }

    pub fn special(alpha: Vector, v: Vector) -> Result<Self> {
        Self::new(alpha, Some(v))
    }

    pub fn hull_dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &Vector {
        &self.alpha
    }

    pub fn v(&self) -> Option<&Vector> {
        self.v.as_ref()
    }

    pub fn is_special(&self) -> bool {
        self.v.is_some()
    }

    fn require_v(&self) -> Result<&Vector> {
        self.v.as_ref().ok_or(Error::NotSpecial)
    }

    pub fn contains(&self, x: &Vector) -> Result<bool> {
        Ok(self.alpha.dot(x)? == one())
    }

    pub fn is_model_vector(&self, x: &Vector) -> Result<bool> {
        Ok(Ring::is_zero(&self.alpha.dot(x)?))
    }

    pub fn point(&self, coords: Vector) -> Result<AffinePoint> {
        if !self.contains(&coords)? {
            return Err(Error::ConstraintViolated("point does not satisfy alpha = 1".into()));
        }
        Ok(AffinePoint {
            owner: self.clone(),
            coords,
        })
    }

    /// Some point of `A`: `α / |α|²` rescaled to the level set.
    pub fn base_point(&self) -> AffinePoint {
        let norm = self.alpha.dot(&self.alpha).expect("same length");
        let coords = self.alpha.scale(&(one() / norm));
        AffinePoint {
            owner: self.clone(),
            coords,
        }
    }

    /// Basis of the model space `ker α`, as columns.
    pub fn model_basis(&self) -> Matrix {
        Matrix::from_rows(vec![self.alpha.as_slice().to_vec()], self.hull_dim())
            .expect("one row")
            .kernel()
    }
}

/// The affine space `{l = 1}` inside `ℚ^dim`, whose hull is `ℚ^dim` itself.
pub fn level_set_hull(dim: usize, l: &Vector) -> Result<BispecialRep> {
    if l.len() != dim {
        return Err(dim_mismatch("functional length differs from the ambient dimension"));
    }
    BispecialRep::new(l.clone(), None)
}

/// `A^#`: special affine maps `A → (ℚ, 1)`, i.e. covectors `f` on the
/// hull with `f(v) = 1`. Its hull is the dual space, its functional is
/// evaluation at `v` and its distinguished vector is `α`.
pub fn special_dual(a: &BispecialRep) -> Result<BispecialRep> {
    let v = a.require_v()?;
    BispecialRep::special(v.clone(), a.alpha.clone())
}

/// `(A, −v)`.
pub fn adjoint(a: &BispecialRep) -> Result<BispecialRep> {
    let v = a.require_v()?;
    BispecialRep::special(a.alpha.clone(), v.neg())
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AffinePoint {
    owner: BispecialRep,
    coords: Vector,
}

impl AffinePoint {
    pub fn owner(&self) -> &BispecialRep {
        &self.owner
    }

    pub fn coords(&self) -> &Vector {
        &self.coords
    }

    /// `a + u` for a model vector `u`.
    pub fn translate(&self, u: &Vector) -> Result<AffinePoint> {
        if !self.owner.is_model_vector(u)? {
            return Err(Error::ConstraintViolated("translation is not a model vector".into()));
        }
        Ok(AffinePoint {
            owner: self.owner.clone(),
            coords: self.coords.try_add(u)?,
        })
    }

    /// Value at this point of a point of the special dual, which is an
    /// affine function on `A`.
    pub fn evaluate(&self, f: &AffinePoint) -> Result<Scalar> {
        let dual = special_dual(&self.owner)?;
        if f.owner != dual {
            return Err(Error::SpaceMismatch);
        }
        f.coords.dot(&self.coords)
    }
}

fn same_space(a: &AffinePoint, b: &AffinePoint) -> Result<()> {
    if a.owner != b.owner {
        return Err(Error::SpaceMismatch);
    }
    Ok(())
}

/// `aff(a, b; λ) = λ·a + (1−λ)·b` in hull coordinates.
pub fn aff(a: &AffinePoint, b: &AffinePoint, lambda: &Scalar) -> Result<AffinePoint> {
    same_space(a, b)?;
    Ok(AffinePoint {
        owner: a.owner.clone(),
        coords: a.coords.affine_combination(&b.coords, lambda)?,
    })
}

/// `[a, b] = b − a`.
pub fn model_vector(a: &AffinePoint, b: &AffinePoint) -> Result<Vector> {
    same_space(a, b)?;
    b.coords.try_sub(&a.coords)
}

/// Linear map between hulls sending `{α_s = 1}` into `{α_t = 1}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AffineMap {
    source: BispecialRep,
    target: BispecialRep,
    l: Matrix,
    special: bool,
}

impl AffineMap {
    pub fn new(source: BispecialRep, target: BispecialRep, l: Matrix, special: bool) -> Result<Self> {
        if l.rows() != target.hull_dim() || l.cols() != source.hull_dim() {
            return Err(dim_mismatch("affine map matrix shape"));
        }
        if l.vec_mul(&target.alpha)? != source.alpha {
            return Err(Error::ConstraintViolated("alpha_target ∘ L differs from alpha_source".into()));
        }
        if special {
            let vs = source.require_v()?;
            let vt = target.require_v()?;
            if &l.mul_vec(vs)? != vt {
                return Err(Error::ConstraintViolated(
                    "linear part does not preserve the distinguished vector".into(),
                ));
            }
        }
        Ok(AffineMap {
            source,
            target,
            l,
            special,
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.l
    }

    pub fn is_special(&self) -> bool {
        self.special
    }

    pub fn apply(&self, p: &AffinePoint) -> Result<AffinePoint> {
        if p.owner != self.source {
            return Err(Error::SpaceMismatch);
        }
        Ok(AffinePoint {
            owner: self.target.clone(),
            coords: self.l.mul_vec(&p.coords)?,
        })
    }

    /// The linear part, restricted to model vectors.
    pub fn linear_part(&self, u: &Vector) -> Result<Vector> {
        if !self.source.is_model_vector(u)? {
            return Err(Error::ConstraintViolated("not a model vector".into()));
        }
        self.l.mul_vec(u)
    }

    /// The transpose map `(B)^# → (A)^#` between special duals.
    pub fn dual(&self) -> Result<AffineMap> {
        if !self.special {
            return Err(Error::NotSpecial);
        }
        AffineMap::new(
            special_dual(&self.target)?,
            special_dual(&self.source)?,
            self.l.transpose(),
            true,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{frac, int};

    fn line() -> BispecialRep {
        BispecialRep::special(Vector::from_ints(&[0, 1]), Vector::from_ints(&[1, 0])).unwrap()
    }

    #[test]
    fn midpoint_on_the_line() {
        let a = line().point(Vector::from_ints(&[3, 1])).unwrap();
        let b = line().point(Vector::from_ints(&[5, 1])).unwrap();
        let m = aff(&a, &b, &frac(1, 2)).unwrap();
        assert_eq!(m.coords(), &Vector::from_ints(&[4, 1]));
        assert_eq!(aff(&a, &b, &int(1)).unwrap(), a);
        assert_eq!(aff(&a, &b, &int(0)).unwrap(), b);
        assert_eq!(model_vector(&a, &b).unwrap(), Vector::from_ints(&[2, 0]));
        assert!(model_vector(&a, &a).unwrap().is_zero());
    }

    #[test]
    fn scaling_through_aff() {
        let a = line().point(Vector::from_ints(&[3, 1])).unwrap();
        let b = line().point(Vector::from_ints(&[5, 1])).unwrap();
        let lhs = model_vector(&a, &b).unwrap().scale(&int(2));
        let rhs = model_vector(&a, &aff(&b, &a, &int(2)).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn dual_basis_example() {
        let d = special_dual(&line()).unwrap();
        assert_eq!(d.alpha(), &Vector::from_ints(&[1, 0]));
        assert_eq!(d.v(), Some(&Vector::from_ints(&[0, 1])));
        assert_eq!(special_dual(&d).unwrap(), line());
    }

    #[test]
    fn distinguished_dual_element_is_constant_one() {
        let a = line();
        let d = special_dual(&a).unwrap();
        let one_fn = d.v().unwrap();
        for x in [-2, 0, 7] {
            let p = a.point(Vector::from_ints(&[x, 1])).unwrap();
            assert_eq!(one_fn.dot(p.coords()).unwrap(), int(1));
        }
        let f = d.point(Vector::from_ints(&[1, 4])).unwrap();
        let p = a.point(Vector::from_ints(&[2, 1])).unwrap();
        assert_eq!(p.evaluate(&f).unwrap(), int(6));
    }

    #[test]
    fn adjoint_flips_sign() {
        let adj = adjoint(&line()).unwrap();
        assert_eq!(adj.v(), Some(&Vector::from_ints(&[-1, 0])));
        assert_eq!(adjoint(&adj).unwrap(), line());
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(level_set_hull(2, &Vector::from_ints(&[0, 0])), Err(Error::ZeroFunctional));
        let plain = level_set_hull(3, &Vector::from_ints(&[1, 1, 1])).unwrap();
        assert_eq!(plain.model_basis().cols(), 2);
        assert_eq!(special_dual(&plain), Err(Error::NotSpecial));
        let a = line().point(Vector::from_ints(&[0, 1])).unwrap();
        let b = plain.base_point();
        assert_eq!(aff(&a, &b, &int(1)), Err(Error::SpaceMismatch));
    }

    #[test]
    fn affine_map_checks_levels() {
        let l = Matrix::from_ints(&[&[2, 0], &[0, 1]]);
        let m = AffineMap::new(line(), line(), l.clone(), false).unwrap();
        let p = line().point(Vector::from_ints(&[1, 1])).unwrap();
        assert_eq!(m.apply(&p).unwrap().coords(), &Vector::from_ints(&[2, 1]));
        assert!(AffineMap::new(line(), line(), l, true).is_err());
        let bad = Matrix::from_ints(&[&[1, 0], &[0, 2]]);
        assert!(AffineMap::new(line(), line(), bad, false).is_err());
    }
}
