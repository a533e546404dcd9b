//! Double vector spaces over a point in decomposed form `V₁ × V₂ × V₃`
//! and the double affine subspaces `{l₁(y) = 1, l₂(z) = 1}` inside them.
//!
//! Coordinates: `y ∈ V₁` (degree (0,1)), `z ∈ V₂` (degree (1,0)), core
//! `c ∈ V₃` (degree (1,1)). The first structure `π₁` projects onto `y`, so
//! `aff1` acts inside a `π₁`-fiber (fixed `y`) and `aff2` inside a
//! `π₂`-fiber (fixed `z`).

pub mod duality;
pub mod levelset;
pub mod morphism;

use std::fmt;

use crate::error::{dim_mismatch, Error, Result};
use crate::exact::{one, Matrix, Ring, Scalar, Vector};
use crate::random::{self, TrialRng};

pub use duality::{
    adjoint_duality_check, gram_matrix, horizontal_dual, hvh_iso, iota, pairing,
    special_dual_horizontal, special_dual_vertical, vertical_dual, vertical_eval, horizontal_eval, HvhReport,
};
pub use levelset::{classify_level_set, LevelConstraint, LevelVerdict, Witness};
pub use morphism::DoubleMorphism;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct DecomposedDouble {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
}

impl DecomposedDouble {
    pub fn new(n1: usize, n2: usize, n3: usize) -> Self {
        DecomposedDouble { n1, n2, n3 }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n1, self.n2, self.n3)
    }

    pub fn total_dim(&self) -> usize {
        self.n1 + self.n2 + self.n3
    }

    pub fn flip(&self) -> Self {
        DecomposedDouble::new(self.n2, self.n1, self.n3)
    }

    pub fn zero_point(&self) -> DoublePoint {
        DoublePoint::new(
            Vector::zeros(self.n1),
            Vector::zeros(self.n2),
            Vector::zeros(self.n3),
        )
    }

    pub fn check(&self, p: &DoublePoint) -> Result<()> {
        if (p.y.len(), p.z.len(), p.c.len()) != self.dims() {
            return Err(dim_mismatch(format!(
                "point has dims ({}, {}, {}), space has {:?}",
                p.y.len(),
                p.z.len(),
                p.c.len(),
                self.dims()
            )));
        }
        Ok(())
    }

    /// The standard basis of the total space, side 1 first, then side 2,
    /// then the core.
    pub fn basis(&self) -> Vec<DoublePoint> {
        let n = self.total_dim();
        (0..n).map(|k| self.split(&Vector::basis(n, k))).collect()
    }

    pub fn split(&self, flat: &Vector) -> DoublePoint {
        DoublePoint::new(
            flat.segment(0, self.n1),
            flat.segment(self.n1, self.n2),
            flat.segment(self.n1 + self.n2, self.n3),
        )
    }

    pub fn random_point(&self, rng: &mut TrialRng) -> DoublePoint {
        DoublePoint::new(
            random::vector(rng, self.n1),
            random::vector(rng, self.n2),
            random::vector(rng, self.n3),
        )
    }
}

impl fmt::Display for DecomposedDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.n1, self.n2, self.n3)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DoublePoint {
    pub y: Vector,
    pub z: Vector,
    pub c: Vector,
}

impl DoublePoint {
    pub fn new(y: Vector, z: Vector, c: Vector) -> Self {
        DoublePoint { y, z, c }
    }

    pub fn flat(&self) -> Vector {
        self.y.concat(&self.z).concat(&self.c)
    }

    /// Swap of the two side coordinates.
    pub fn flip(&self) -> Self {
        DoublePoint::new(self.z.clone(), self.y.clone(), self.c.clone())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        Ok(DoublePoint::new(
            self.y.try_add(&other.y)?,
            self.z.try_add(&other.z)?,
            self.c.try_add(&other.c)?,
        ))
    }
}

impl fmt::Display for DoublePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(y={}; z={}; c={})", self.y, self.z, self.c)
    }
}

/// Affine combination inside a `π₁`-fiber: `y` is shared, `(z, c)` combine.
pub fn aff1(p: &DoublePoint, q: &DoublePoint, lambda: &Scalar) -> Result<DoublePoint> {
    if p.y != q.y {
        return Err(Error::FiberMismatch(format!("side-1 coordinates {} and {} differ", p.y, q.y)));
    }
    Ok(DoublePoint::new(
        p.y.clone(),
        p.z.affine_combination(&q.z, lambda)?,
        p.c.affine_combination(&q.c, lambda)?,
    ))
}

/// Affine combination inside a `π₂`-fiber: `z` is shared, `(y, c)` combine.
pub fn aff2(p: &DoublePoint, q: &DoublePoint, lambda: &Scalar) -> Result<DoublePoint> {
    if p.z != q.z {
        return Err(Error::FiberMismatch(format!("side-2 coordinates {} and {} differ", p.z, q.z)));
    }
    Ok(DoublePoint::new(
        p.y.affine_combination(&q.y, lambda)?,
        p.z.clone(),
        p.c.affine_combination(&q.c, lambda)?,
    ))
}

/// Double affine subspace `{l₁(y) = 1, l₂(z) = 1}` of `D`, special when
/// it carries a nonzero core element `σ`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DoubleAffine {
    d: DecomposedDouble,
    l1: Vector,
    l2: Vector,
    sigma: Option<Vector>,
}

impl DoubleAffine {
    pub fn new(d: DecomposedDouble, l1: Vector, l2: Vector, sigma: Option<Vector>) -> Result<Self> {
        if l1.len() != d.n1 || l2.len() != d.n2 {
            return Err(dim_mismatch("functionals must live on the side spaces"));
        }
        if l1.is_zero() || l2.is_zero() {
            return Err(Error::ZeroFunctional);
        }
        if let Some(s) = &sigma {
            if s.len() != d.n3 {
                return Err(dim_mismatch("core section must live in the core"));
            }
            if s.is_zero() {
                return Err(Error::Invalid("core section is zero".into()));
            }
        }
        Ok(DoubleAffine { d, l1, l2, sigma })
    }

    pub fn space(&self) -> DecomposedDouble {
        self.d
    }

    pub fn l1(&self) -> &Vector {
        &self.l1
    }

    pub fn l2(&self) -> &Vector {
        &self.l2
    }

    pub fn sigma(&self) -> Option<&Vector> {
        self.sigma.as_ref()
    }

    pub fn is_special(&self) -> bool {
        self.sigma.is_some()
    }

    pub(crate) fn require_sigma(&self) -> Result<&Vector> {
        self.sigma.as_ref().ok_or(Error::NotSpecial)
    }

    pub fn contains(&self, p: &DoublePoint) -> Result<bool> {
        self.d.check(p)?;
        Ok(self.l1.dot(&p.y)? == one() && self.l2.dot(&p.z)? == one())
    }

    /// The double vector hull is the ambient space itself.
    pub fn hull(&self) -> DecomposedDouble {
        self.d
    }

    pub fn model_vv(&self) -> ModelDouble {
        ModelDouble::of(self)
    }

    /// Swaps `(V₁, l₁)` with `(V₂, l₂)`; the core section is kept.
    pub fn flip(&self) -> Self {
        DoubleAffine {
            d: self.d.flip(),
            l1: self.l2.clone(),
            l2: self.l1.clone(),
            sigma: self.sigma.clone(),
        }
    }

    /// `(A, −σ)`.
    pub fn adjoint(&self) -> Result<Self> {
        let s = self.require_sigma()?;
        Ok(DoubleAffine {
            sigma: Some(s.neg()),
            ..self.clone()
        })
    }

    /// A point of `A` over the given side points; `l₁(y) = l₂(z) = 1` is
    /// required and the core coordinate is free.
    pub fn point(&self, y: Vector, z: Vector, c: Vector) -> Result<DoublePoint> {
        let p = DoublePoint::new(y, z, c);
        if !self.contains(&p)? {
            return Err(Error::ConstraintViolated("point is not on l1 = l2 = 1".into()));
        }
        Ok(p)
    }

    /// A random point of `{l = 1}` on a side: a random vector pushed to the
    /// level set along `l`.
    pub(crate) fn random_level_point(rng: &mut TrialRng, l: &Vector) -> Vector {
        let v = random::vector(rng, l.len());
        let lv = l.dot(&v).expect("same length");
        let ll = l.dot(l).expect("same length");
        let shift = (one() - lv) / ll;
        v.try_add(&l.scale(&shift)).expect("same length")
    }

    pub fn random_side1(&self, rng: &mut TrialRng) -> Vector {
        Self::random_level_point(rng, &self.l1)
    }

    pub fn random_side2(&self, rng: &mut TrialRng) -> Vector {
        Self::random_level_point(rng, &self.l2)
    }

    pub fn random_point(&self, rng: &mut TrialRng) -> DoublePoint {
        let y = self.random_side1(rng);
        let z = self.random_side2(rng);
        DoublePoint::new(y, z, random::vector(rng, self.d.n3))
    }

    /// Random instance with dims in `[1, max]³`, special when asked.
    pub fn random(rng: &mut TrialRng, max: (usize, usize, usize), special: bool) -> Self {
        let d = DecomposedDouble::new(
            random::dim(rng, 1, max.0),
            random::dim(rng, 1, max.1),
            random::dim(rng, 1, max.2),
        );
        let l1 = random::nonzero_vector(rng, d.n1);
        let l2 = random::nonzero_vector(rng, d.n2);
        let sigma = special.then(|| random::nonzero_vector(rng, d.n3));
        DoubleAffine::new(d, l1, l2, sigma).expect("valid random data")
    }

    /// Executable form of the three defining conditions: both projections
    /// are affine maps onto `{l₁ = 1}` and `{l₂ = 1}`, `(π₁, π₂)` is onto
    /// the product, and `aff₁`, `aff₂` are affine in the other structure.
    /// Returns the first failing condition.
    pub fn structure_check(&self, rng: &mut TrialRng) -> Result<Option<String>> {
        let p = self.random_point(rng);
        let q_same_y = DoublePoint::new(p.y.clone(), self.random_side2(rng), random::vector(rng, self.d.n3));
        let q_same_z = DoublePoint::new(self.random_side1(rng), p.z.clone(), random::vector(rng, self.d.n3));
        let lambda = random::rational(rng);
        // (i) aff combinations stay inside A and project affinely.
        let r1 = aff1(&p, &q_same_y, &lambda)?;
        if !self.contains(&r1)? || r1.z != p.z.affine_combination(&q_same_y.z, &lambda)? {
            return Ok(Some("aff1 leaves A or pi2 is not affine on pi1-fibers".into()));
        }
        let r2 = aff2(&p, &q_same_z, &lambda)?;
        if !self.contains(&r2)? || r2.y != p.y.affine_combination(&q_same_z.y, &lambda)? {
            return Ok(Some("aff2 leaves A or pi1 is not affine on pi2-fibers".into()));
        }
        // (ii) every pair of side points has a preimage.
        let y = self.random_side1(rng);
        let z = self.random_side2(rng);
        if !self.contains(&DoublePoint::new(y, z, Vector::zeros(self.d.n3)))? {
            return Ok(Some("(pi1, pi2) is not onto the product of the sides".into()));
        }
        // (iii) aff1 is a morphism for the second structure.
        let other_y = self.random_side1(rng);
        let r = DoublePoint::new(other_y.clone(), p.z.clone(), random::vector(rng, self.d.n3));
        let s = DoublePoint::new(other_y, q_same_y.z.clone(), random::vector(rng, self.d.n3));
        let mu = random::rational(rng);
        if !interchange_holds(&p, &q_same_y, &r, &s, &lambda, &mu)? {
            return Ok(Some("aff1 and aff2 do not commute".into()));
        }
        Ok(None)
    }
}

impl DoubleAffine {
    /// On a fiber with both `y` and `z` fixed, both structures restrict
    /// and `aff₁ = aff₂` there.
    pub fn core_fiber_check(&self, rng: &mut TrialRng) -> Result<Option<String>> {
        let p = self.random_point(rng);
        let q = DoublePoint::new(p.y.clone(), p.z.clone(), random::vector(rng, self.d.n3));
        let lambda = random::rational(rng);
        let (a, b) = (aff1(&p, &q, &lambda)?, aff2(&p, &q, &lambda)?);
        if a != b {
            return Ok(Some(format!("aff1 gives {a}, aff2 gives {b} at lambda {lambda}")));
        }
        if !self.contains(&a)? {
            return Ok(Some(format!("{a} leaves the fiber")));
        }
        Ok(None)
    }
}

/// Interchange law on four points `x₁, x₂` (one `π₁`-fiber) and `y₁, y₂`
/// (another `π₁`-fiber) with `x_k`, `y_k` in a common `π₂`-fiber:
/// `aff₂(aff₁(x₁,x₂;λ), aff₁(y₁,y₂;λ); μ) = aff₁(aff₂(x₁,y₁;μ), aff₂(x₂,y₂;μ); λ)`.
/// `x₂` is first moved into the `π₁`-fiber of `x₁`, and `y₁`, `y₂` into one
/// `π₁`-fiber over the `z`-coordinates of `x₁`, `x₂`, so that any four
/// points form such a square.
pub fn interchange_holds(
    x1: &DoublePoint,
    x2: &DoublePoint,
    y1: &DoublePoint,
    y2: &DoublePoint,
    lambda: &Scalar,
    mu: &Scalar,
) -> Result<bool> {
    let (lhs, rhs) = interchange_sides(x1, x2, y1, y2, lambda, mu)?;
    Ok(lhs == rhs)
}

/// Both sides of the interchange law, for reporting.
pub fn interchange_sides(
    x1: &DoublePoint,
    x2: &DoublePoint,
    y1: &DoublePoint,
    y2: &DoublePoint,
    lambda: &Scalar,
    mu: &Scalar,
) -> Result<(DoublePoint, DoublePoint)> {
    let x2 = &DoublePoint::new(x1.y.clone(), x2.z.clone(), x2.c.clone());
    let y1 = DoublePoint::new(y1.y.clone(), x1.z.clone(), y1.c.clone());
    let y2 = DoublePoint::new(y1.y.clone(), x2.z.clone(), y2.c.clone());
    let lhs = aff2(&aff1(x1, x2, lambda)?, &aff1(&y1, &y2, lambda)?, mu)?;
    let rhs = aff1(&aff2(x1, &y1, mu)?, &aff2(x2, &y2, mu)?, lambda)?;
    Ok((lhs, rhs))
}

/// Model double vector space `{l₁ = 0, l₂ = 0}` with bases of its sides.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModelDouble {
    ambient: DecomposedDouble,
    l1: Vector,
    l2: Vector,
    /// `n₁ × (n₁−1)`, columns span `ker l₁`.
    pub basis1: Matrix,
    /// `n₂ × (n₂−1)`, columns span `ker l₂`.
    pub basis2: Matrix,
}

impl ModelDouble {
    fn of(a: &DoubleAffine) -> Self {
        let k = |l: &Vector| {
            Matrix::from_rows(vec![l.as_slice().to_vec()], l.len())
                .expect("one row")
                .kernel()
        };
        ModelDouble {
            ambient: a.d,
            l1: a.l1.clone(),
            l2: a.l2.clone(),
            basis1: k(&a.l1),
            basis2: k(&a.l2),
        }
    }

    pub fn dims(&self) -> DecomposedDouble {
        DecomposedDouble::new(self.basis1.cols(), self.basis2.cols(), self.ambient.n3)
    }

    pub fn contains(&self, p: &DoublePoint) -> Result<bool> {
        self.ambient.check(p)?;
        Ok(Ring::is_zero(&self.l1.dot(&p.y)?) && Ring::is_zero(&self.l2.dot(&p.z)?))
    }

    /// Image of model coordinates in the ambient space.
    pub fn embed(&self, p: &DoublePoint) -> Result<DoublePoint> {
        self.dims().check(p)?;
        Ok(DoublePoint::new(
            self.basis1.mul_vec(&p.y)?,
            self.basis2.mul_vec(&p.z)?,
            p.c.clone(),
        ))
    }

    /// Constraints of the model as `(l₁, l₂)` with right-hand sides 0.
    pub fn constraints(&self) -> (&Vector, &Vector) {
        (&self.l1, &self.l2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{frac, int};
    use crate::random::trial_rng;

    fn unit() -> DoubleAffine {
        DoubleAffine::new(
            DecomposedDouble::new(1, 1, 1),
            Vector::from_ints(&[1]),
            Vector::from_ints(&[1]),
            Some(Vector::from_ints(&[1])),
        )
        .unwrap()
    }

    fn pt(y: &[i64], z: &[i64], c: &[i64]) -> DoublePoint {
        DoublePoint::new(Vector::from_ints(y), Vector::from_ints(z), Vector::from_ints(c))
    }

    #[test]
    fn membership() {
        let a = unit();
        assert!(a.contains(&pt(&[1], &[1], &[42])).unwrap());
        assert!(!a.contains(&pt(&[0], &[1], &[0])).unwrap());
        assert!(a.contains(&pt(&[1, 2], &[1], &[0])).is_err());
    }

    #[test]
    fn fiber_midpoint() {
        let p = pt(&[1], &[1], &[0]);
        let q = pt(&[1], &[3], &[2]);
        assert_eq!(aff1(&p, &q, &frac(1, 2)).unwrap(), pt(&[1], &[2], &[1]));
        assert_eq!(aff1(&p, &p, &int(7)).unwrap(), p);
        assert!(matches!(aff2(&p, &q, &int(1)), Err(Error::FiberMismatch(_))));
    }

    #[test]
    fn model_of_coordinate_functional() {
        let a = DoubleAffine::new(
            DecomposedDouble::new(2, 2, 1),
            Vector::from_ints(&[1, 0]),
            Vector::from_ints(&[1, 1]),
            None,
        )
        .unwrap();
        let m = a.model_vv();
        assert_eq!(m.dims().dims(), (1, 1, 1));
        assert_eq!(m.basis1.column(0), Vector::from_ints(&[0, 1]));
        assert!(m.contains(&pt(&[0, 5], &[1, -1], &[3])).unwrap());
        assert_eq!(a.hull(), a.space());
    }

    #[test]
    fn involutions() {
        let mut rng = trial_rng(1, 0);
        let a = DoubleAffine::random(&mut rng, (3, 3, 3), true);
        assert_eq!(a.flip().flip(), a);
        assert_eq!(a.adjoint().unwrap().adjoint().unwrap(), a);
        let plain = DoubleAffine::random(&mut rng, (2, 2, 2), false);
        assert_eq!(plain.adjoint(), Err(Error::NotSpecial));
    }

    #[test]
    fn structure_conditions_hold() {
        for t in 0..10 {
            let mut rng = trial_rng(3, t);
            let a = DoubleAffine::random(&mut rng, (3, 3, 3), false);
            assert_eq!(a.structure_check(&mut rng).unwrap(), None);
        }
    }
}
