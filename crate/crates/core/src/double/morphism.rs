//! Morphisms of trivial double affine bundles in decomposed coordinates:
//!
//! ```text
//! y' = α₀ + α·y
//! z' = β₀ + β·z
//! c' = γ₀₀ + γ_y·y + γ_z·z + Γ(y, z) + Σ·c
//! ```
//!
//! Coefficients live in any [`Ring`]: scalars for fiberwise maps,
//! polynomials in the base coordinates for atlas transitions.

use crate::error::{dim_mismatch, Result};
use crate::exact::{Bilinear, Matrix, Ring, Scalar, Vector};

use super::{DecomposedDouble, DoublePoint};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DoubleMorphism<T: Ring = Scalar> {
    pub alpha0: Vector<T>,
    pub alpha: Matrix<T>,
    pub beta0: Vector<T>,
    pub beta: Matrix<T>,
    pub gamma00: Vector<T>,
    pub gamma_y: Matrix<T>,
    pub gamma_z: Matrix<T>,
    pub gamma_yz: Bilinear<T>,
    pub sigma: Matrix<T>,
}

impl<T: Ring> DoubleMorphism<T> {
    /// Pure double-vector morphism: all affine parts zero.
    pub fn linear(alpha: Matrix<T>, beta: Matrix<T>, gamma_yz: Bilinear<T>, sigma: Matrix<T>) -> Result<Self> {
        let (n1t, n1) = (alpha.rows(), alpha.cols());
        let (n2t, n2) = (beta.rows(), beta.cols());
        let n3t = sigma.rows();
        let m = DoubleMorphism {
            alpha0: Vector::zeros(n1t),
            alpha,
            beta0: Vector::zeros(n2t),
            beta,
            gamma00: Vector::zeros(n3t),
            gamma_y: Matrix::zeros(n3t, n1),
            gamma_z: Matrix::zeros(n3t, n2),
            gamma_yz,
            sigma,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn identity(d: DecomposedDouble) -> Self {
        DoubleMorphism::linear(
            Matrix::identity(d.n1),
            Matrix::identity(d.n2),
            Bilinear::zeros(d.n3, d.n1, d.n2),
            Matrix::identity(d.n3),
        )
        .expect("identity shapes agree")
    }

    pub fn source(&self) -> DecomposedDouble {
        DecomposedDouble::new(self.alpha.cols(), self.beta.cols(), self.sigma.cols())
    }

    pub fn target(&self) -> DecomposedDouble {
        DecomposedDouble::new(self.alpha.rows(), self.beta.rows(), self.sigma.rows())
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.source();
        let t = self.target();
        let ok = self.alpha0.len() == t.n1
            && self.beta0.len() == t.n2
            && self.gamma00.len() == t.n3
            && (self.gamma_y.rows(), self.gamma_y.cols()) == (t.n3, s.n1)
            && (self.gamma_z.rows(), self.gamma_z.cols()) == (t.n3, s.n2)
            && self.gamma_yz.dims() == (t.n3, s.n1, s.n2);
        if !ok {
            return Err(dim_mismatch(format!(
                "morphism blocks inconsistent with source {s} and target {t}"
            )));
        }
        Ok(())
    }

    pub fn is_linear(&self) -> bool {
        self.alpha0.is_zero()
            && self.beta0.is_zero()
            && self.gamma00.is_zero()
            && self.gamma_y.is_zero()
            && self.gamma_z.is_zero()
    }

    /// Drops every affine part.
    pub fn linear_part(&self) -> Self {
        let t = self.target();
        let s = self.source();
        DoubleMorphism {
            alpha0: Vector::zeros(t.n1),
            beta0: Vector::zeros(t.n2),
            gamma00: Vector::zeros(t.n3),
            gamma_y: Matrix::zeros(t.n3, s.n1),
            gamma_z: Matrix::zeros(t.n3, s.n2),
            ..self.clone()
        }
    }

    pub fn map_coeffs<U: Ring>(&self, f: impl Fn(&T) -> Result<U>) -> Result<DoubleMorphism<U>> {
        let vec = |v: &Vector<T>| -> Result<Vector<U>> { v.iter().map(&f).collect() };
        let mat = |m: &Matrix<T>| -> Result<Matrix<U>> {
            let rows: Result<Vec<Vec<U>>> = m
                .row_vecs()
                .iter()
                .map(|r| r.iter().map(&f).collect())
                .collect();
            Matrix::from_rows(rows?, m.cols())
        };
        let (n3, n1, n2) = self.gamma_yz.dims();
        let mut g = Vec::with_capacity(n3 * n1 * n2);
        for u in 0..n3 {
            for i in 0..n1 {
                for b in 0..n2 {
                    g.push(f(self.gamma_yz.get(u, i, b))?);
                }
            }
        }
        Ok(DoubleMorphism {
            alpha0: vec(&self.alpha0)?,
            alpha: mat(&self.alpha)?,
            beta0: vec(&self.beta0)?,
            beta: mat(&self.beta)?,
            gamma00: vec(&self.gamma00)?,
            gamma_y: mat(&self.gamma_y)?,
            gamma_z: mat(&self.gamma_z)?,
            gamma_yz: Bilinear::from_fn(n3, n1, n2, |u, i, b| g[(u * n1 + i) * n2 + b].clone()),
            sigma: mat(&self.sigma)?,
        })
    }

    /// `next ∘ self`. The coefficients of `next` are used as given, so for
    /// base-dependent data they must already be expressed in the source
    /// coordinates of `self`.
    pub fn then(&self, next: &DoubleMorphism<T>) -> Result<Self> {
        if next.source() != self.target() {
            return Err(dim_mismatch(format!(
                "cannot compose: target {} differs from source {}",
                self.target(),
                next.source()
            )));
        }
        let alpha0 = next.alpha0.try_add(&next.alpha.mul_vec(&self.alpha0)?)?;
        let alpha = next.alpha.mul(&self.alpha)?;
        let beta0 = next.beta0.try_add(&next.beta.mul_vec(&self.beta0)?)?;
        let beta = next.beta.mul(&self.beta)?;
        let s = &next.sigma;
        let gamma00 = next
            .gamma00
            .try_add(&next.gamma_y.mul_vec(&self.alpha0)?)?
            .try_add(&next.gamma_z.mul_vec(&self.beta0)?)?
            .try_add(&next.gamma_yz.apply(&self.alpha0, &self.beta0)?)?
            .try_add(&s.mul_vec(&self.gamma00)?)?;
        let gamma_y = next
            .gamma_y
            .try_add(&next.gamma_yz.partial_right(&self.beta0)?)?
            .mul(&self.alpha)?
            .try_add(&s.mul(&self.gamma_y)?)?;
        let gamma_z = next
            .gamma_z
            .try_add(&next.gamma_yz.partial_left(&self.alpha0)?)?
            .mul(&self.beta)?
            .try_add(&s.mul(&self.gamma_z)?)?;
        let gamma_yz = next
            .gamma_yz
            .pre_compose(&self.alpha, &self.beta)?
            .try_add(&self.gamma_yz.post_compose(s)?)?;
        let sigma = s.mul(&self.sigma)?;
        Ok(DoubleMorphism {
            alpha0,
            alpha,
            beta0,
            beta,
            gamma00,
            gamma_y,
            gamma_z,
            gamma_yz,
            sigma,
        })
    }

    /// Inverse, given a way to invert the three linear blocks.
    pub fn inverse_with(&self, invert: impl Fn(&Matrix<T>) -> Result<Matrix<T>>) -> Result<Self> {
        let ai = invert(&self.alpha)?;
        let bi = invert(&self.beta)?;
        let si = invert(&self.sigma)?;
        let p = ai.mul_vec(&self.alpha0)?.neg();
        let r = bi.mul_vec(&self.beta0)?.neg();
        let neg_si = si.neg();
        let gamma00 = neg_si.mul_vec(
            &self
                .gamma00
                .try_add(&self.gamma_y.mul_vec(&p)?)?
                .try_add(&self.gamma_z.mul_vec(&r)?)?
                .try_add(&self.gamma_yz.apply(&p, &r)?)?,
        )?;
        let gamma_y = neg_si.mul(&self.gamma_y.try_add(&self.gamma_yz.partial_right(&r)?)?.mul(&ai)?)?;
        let gamma_z = neg_si.mul(&self.gamma_z.try_add(&self.gamma_yz.partial_left(&p)?)?.mul(&bi)?)?;
        let gamma_yz = self.gamma_yz.pre_compose(&ai, &bi)?.post_compose(&neg_si)?;
        Ok(DoubleMorphism {
            alpha0: p,
            alpha: ai,
            beta0: r,
            beta: bi,
            gamma00,
            gamma_y,
            gamma_z,
            gamma_yz,
            sigma: si,
        })
    }

    /// Flip on both source and target: the two sides trade places.
    pub fn flip(&self) -> Self {
        DoubleMorphism {
            alpha0: self.beta0.clone(),
            alpha: self.beta.clone(),
            beta0: self.alpha0.clone(),
            beta: self.alpha.clone(),
            gamma00: self.gamma00.clone(),
            gamma_y: self.gamma_z.clone(),
            gamma_z: self.gamma_y.clone(),
            gamma_yz: self.gamma_yz.swapped(),
            sigma: self.sigma.clone(),
        }
    }

    /// Field-by-field comparison; names the first coefficient that differs.
    pub fn first_difference(&self, other: &Self) -> Option<String> {
        fn vec_diff<T: Ring>(name: &str, a: &Vector<T>, b: &Vector<T>) -> Option<String> {
            if a.len() != b.len() {
                return Some(format!("{name}: lengths {} and {}", a.len(), b.len()));
            }
            (0..a.len())
                .find(|&i| a[i] != b[i])
                .map(|i| format!("{name}[{i}]: {} vs {}", a[i], b[i]))
        }
        fn mat_diff<T: Ring>(name: &str, a: &Matrix<T>, b: &Matrix<T>) -> Option<String> {
            if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
                return Some(format!("{name}: shapes differ"));
            }
            for i in 0..a.rows() {
                for j in 0..a.cols() {
                    if a[(i, j)] != b[(i, j)] {
                        return Some(format!("{name}[{i}][{j}]: {} vs {}", a[(i, j)], b[(i, j)]));
                    }
                }
            }
            None
        }
        let g = || {
            if self.gamma_yz.dims() != other.gamma_yz.dims() {
                return Some("gamma_yz: shapes differ".to_string());
            }
            let (n3, n1, n2) = self.gamma_yz.dims();
            for u in 0..n3 {
                for i in 0..n1 {
                    for b in 0..n2 {
                        let (x, y) = (self.gamma_yz.get(u, i, b), other.gamma_yz.get(u, i, b));
                        if x != y {
                            return Some(format!("gamma_yz[{u}][{i}][{b}]: {x} vs {y}"));
                        }
                    }
                }
            }
            None
        };
        vec_diff("alpha0", &self.alpha0, &other.alpha0)
            .or_else(|| mat_diff("alpha", &self.alpha, &other.alpha))
            .or_else(|| vec_diff("beta0", &self.beta0, &other.beta0))
            .or_else(|| mat_diff("beta", &self.beta, &other.beta))
            .or_else(|| vec_diff("gamma00", &self.gamma00, &other.gamma00))
            .or_else(|| mat_diff("gamma_y", &self.gamma_y, &other.gamma_y))
            .or_else(|| mat_diff("gamma_z", &self.gamma_z, &other.gamma_z))
            .or_else(g)
            .or_else(|| mat_diff("sigma", &self.sigma, &other.sigma))
    }
}

impl DoubleMorphism<Scalar> {
    pub fn apply(&self, p: &DoublePoint) -> Result<DoublePoint> {
        self.source().check(p)?;
        let y = self.alpha0.try_add(&self.alpha.mul_vec(&p.y)?)?;
        let z = self.beta0.try_add(&self.beta.mul_vec(&p.z)?)?;
        let c = self
            .gamma00
            .try_add(&self.gamma_y.mul_vec(&p.y)?)?
            .try_add(&self.gamma_z.mul_vec(&p.z)?)?
            .try_add(&self.gamma_yz.apply(&p.y, &p.z)?)?
            .try_add(&self.sigma.mul_vec(&p.c)?)?;
        Ok(DoublePoint::new(y, z, c))
    }

    pub fn inverse(&self) -> Result<Self> {
        self.inverse_with(Matrix::inverse)
    }

    /// Random morphism with invertible linear blocks between spaces of
    /// the same dims.
    pub fn random(rng: &mut crate::random::TrialRng, d: DecomposedDouble, affine: bool) -> Self {
        use crate::random as r;
        let mut m = DoubleMorphism::linear(
            r::invertible(rng, d.n1),
            r::invertible(rng, d.n2),
            r::bilinear(rng, d.n3, d.n1, d.n2),
            r::invertible(rng, d.n3),
        )
        .expect("shapes agree");
        if affine {
            m.alpha0 = r::vector(rng, d.n1);
            m.beta0 = r::vector(rng, d.n2);
            m.gamma00 = r::vector(rng, d.n3);
            m.gamma_y = r::matrix(rng, d.n3, d.n1);
            m.gamma_z = r::matrix(rng, d.n3, d.n2);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::trial_rng;

    #[test]
    fn composition_matches_pointwise() {
        for t in 0..10 {
            let mut rng = trial_rng(11, t);
            let d = DecomposedDouble::new(2, 3, 2);
            let f = DoubleMorphism::random(&mut rng, d, true);
            let g = DoubleMorphism::random(&mut rng, d, true);
            let p = d.random_point(&mut rng);
            let fg = f.then(&g).unwrap();
            assert_eq!(fg.apply(&p).unwrap(), g.apply(&f.apply(&p).unwrap()).unwrap());
        }
    }

    #[test]
    fn inverse_round_trip() {
        let mut rng = trial_rng(12, 0);
        let d = DecomposedDouble::new(3, 2, 2);
        let f = DoubleMorphism::random(&mut rng, d, true);
        let id = f.then(&f.inverse().unwrap()).unwrap();
        assert_eq!(id, DoubleMorphism::identity(d));
        assert!(id.is_linear());
    }

    #[test]
    fn difference_is_named() {
        let d = DecomposedDouble::new(1, 1, 1);
        let mut g = DoubleMorphism::<Scalar>::identity(d);
        g.gamma_yz.set(0, 0, 0, crate::exact::int(3));
        let msg = DoubleMorphism::identity(d).first_difference(&g).unwrap();
        assert_eq!(msg, "gamma_yz[0][0][0]: 0 vs 3");
    }
}
