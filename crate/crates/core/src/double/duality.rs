//! Vertical and horizontal duals of a decomposed double vector space, the
//! special duals of a special double affine space, their pairing, and the
//! identification of the triple dual with the adjoint of the flip.
//!
//! Conventions. For `D = V₁ × V₂ × V₃`:
//!
//! * `D^V = V₁ × V₃* × V₂*`, a point `(y; γ, ζ)` pairs with `(y, z, c)` by
//!   `ζ·z + γ·c`;
//! * `D^H = V₃* × V₂ × V₁*`, a point `(γ', z; η)` pairs with `(y, z, c)` by
//!   `η·y + γ'·c`.

use crate::error::{dim_mismatch, Error, Result};
use crate::exact::{Bilinear, Matrix, Scalar, Vector};
use crate::random::{self, TrialRng};

use super::{DecomposedDouble, DoubleAffine, DoubleMorphism, DoublePoint};

pub fn vertical_dual(d: DecomposedDouble) -> DecomposedDouble {
    DecomposedDouble::new(d.n1, d.n3, d.n2)
}

pub fn horizontal_dual(d: DecomposedDouble) -> DecomposedDouble {
    DecomposedDouble::new(d.n3, d.n2, d.n1)
}

/// `Φ(x)` for `Φ ∈ D^V` and `x ∈ D` over the same side-1 point.
pub fn vertical_eval(d: DecomposedDouble, phi: &DoublePoint, x: &DoublePoint) -> Result<Scalar> {
    vertical_dual(d).check(phi)?;
    d.check(x)?;
    if phi.y != x.y {
        return Err(Error::FiberMismatch("vertical dual element and point lie over different side-1 points".into()));
    }
    Ok(phi.c.dot(&x.z)? + phi.z.dot(&x.c)?)
}

/// `Ψ(x)` for `Ψ ∈ D^H` and `x ∈ D` over the same side-2 point.
pub fn horizontal_eval(d: DecomposedDouble, psi: &DoublePoint, x: &DoublePoint) -> Result<Scalar> {
    horizontal_dual(d).check(psi)?;
    d.check(x)?;
    if psi.z != x.z {
        return Err(Error::FiberMismatch("horizontal dual element and point lie over different side-2 points".into()));
    }
    Ok(psi.c.dot(&x.y)? + psi.y.dot(&x.c)?)
}

/// `(D^V; l₁, l₃; l₂)` where `l₃` is evaluation at `σ` on `V₃*`.
pub fn special_dual_vertical(a: &DoubleAffine) -> Result<DoubleAffine> {
    let sigma = a.require_sigma()?;
    DoubleAffine::new(
        vertical_dual(a.space()),
        a.l1().clone(),
        sigma.clone(),
        Some(a.l2().clone()),
    )
}

/// `(D^H; l₃, l₂; l₁)`.
pub fn special_dual_horizontal(a: &DoubleAffine) -> Result<DoubleAffine> {
    let sigma = a.require_sigma()?;
    DoubleAffine::new(
        horizontal_dual(a.space()),
        sigma.clone(),
        a.l2().clone(),
        Some(a.l1().clone()),
    )
}

/// `⟨Φ, Ψ⟩ = Φ(x) − Ψ(x)` for any `x` over the side points of `Φ` and `Ψ`.
/// Both must project to the same element of `V₃*`.
pub fn pairing(d: DecomposedDouble, phi: &DoublePoint, psi: &DoublePoint) -> Result<Scalar> {
    vertical_dual(d).check(phi)?;
    horizontal_dual(d).check(psi)?;
    if phi.z != psi.y {
        return Err(Error::BaseMismatch);
    }
    let at = |c: Vector| -> Result<Scalar> {
        let x = DoublePoint::new(phi.y.clone(), psi.z.clone(), c);
        Ok(vertical_eval(d, phi, &x)? - horizontal_eval(d, psi, &x)?)
    };
    let value = at(Vector::zeros(d.n3))?;
    debug_assert!(
        d.n3 == 0 || at((0..d.n3).map(|k| Scalar::from_integer((k as i64 + 1).into())).collect())? == value,
        "pairing depends on the core coordinate of the interpolating point"
    );
    Ok(value)
}

/// Pairing evaluated at an explicit interpolating point `x`; used to test
/// independence of `x`.
pub fn pairing_at(d: DecomposedDouble, phi: &DoublePoint, psi: &DoublePoint, c: &Vector) -> Result<Scalar> {
    if phi.z != psi.y {
        return Err(Error::BaseMismatch);
    }
    let x = DoublePoint::new(phi.y.clone(), psi.z.clone(), c.clone());
    Ok(vertical_eval(d, phi, &x)? - horizontal_eval(d, psi, &x)?)
}

/// Gram matrix of the pairing over `φ = 0`: rows run over `V₁` then `V₂*`
/// (elements `(d₁; 0, ζ)` of `D^V`), columns over `V₂` then `V₁*`
/// (elements `(0, d₂; η)` of `D^H`).
pub fn gram_matrix(d: DecomposedDouble) -> Result<Matrix> {
    let vd = vertical_dual(d);
    let hd = horizontal_dual(d);
    let rows: Vec<DoublePoint> = (0..d.n1)
        .map(|i| DoublePoint::new(Vector::basis(d.n1, i), Vector::zeros(d.n3), Vector::zeros(d.n2)))
        .chain((0..d.n2).map(|b| DoublePoint::new(Vector::zeros(d.n1), Vector::zeros(d.n3), Vector::basis(d.n2, b))))
        .collect();
    let cols: Vec<DoublePoint> = (0..d.n2)
        .map(|b| DoublePoint::new(Vector::zeros(d.n3), Vector::basis(d.n2, b), Vector::zeros(d.n1)))
        .chain((0..d.n1).map(|i| DoublePoint::new(Vector::zeros(d.n3), Vector::zeros(d.n2), Vector::basis(d.n1, i))))
        .collect();
    debug_assert!(rows.iter().all(|p| vd.check(p).is_ok()) && cols.iter().all(|p| hd.check(p).is_ok()));
    let mut g = Matrix::zeros(rows.len(), cols.len());
    for (i, phi) in rows.iter().enumerate() {
        for (j, psi) in cols.iter().enumerate() {
            g[(i, j)] = pairing(d, phi, psi)?;
        }
    }
    Ok(g)
}

/// The element of `F^{VH}` representing `Ψ ∈ F^H` through the pairing:
/// the unique `X` with `X(Φ) = ⟨Φ, Ψ⟩` for all `Φ ∈ F^V` over `φ(Ψ)`.
/// Computed by evaluating the pairing on a basis of `Φ`'s.
pub fn iota_apply(f: DecomposedDouble, psi: &DoublePoint) -> Result<DoublePoint> {
    horizontal_dual(f).check(psi)?;
    let gamma = psi.y.clone();
    // X = (w ∈ V₂, γ, η_V ∈ V₁*) in F^{VH}; X(Φ) = η_V·y + w·ζ.
    let w: Vector = (0..f.n2)
        .map(|k| {
            let phi = DoublePoint::new(Vector::zeros(f.n1), gamma.clone(), Vector::basis(f.n2, k));
            pairing(f, &phi, psi)
        })
        .collect::<Result<_>>()?;
    let eta: Vector = (0..f.n1)
        .map(|i| {
            let phi = DoublePoint::new(Vector::basis(f.n1, i), gamma.clone(), Vector::zeros(f.n2));
            pairing(f, &phi, psi)
        })
        .collect::<Result<_>>()?;
    Ok(DoublePoint::new(w, gamma, eta))
}

/// `ι_F : F^H → F^{VH}` as a morphism into the flip of `F^{VH}` (so that
/// both sides keep their meaning), built column by column from
/// [`iota_apply`].
pub fn iota(f: DecomposedDouble) -> Result<DoubleMorphism> {
    let src = horizontal_dual(f);
    let tgt = horizontal_dual(vertical_dual(f)).flip();
    let image = |p: DoublePoint| -> Result<DoublePoint> { Ok(iota_apply(f, &p)?.flip()) };
    let mut a = Matrix::zeros(tgt.n1, src.n1);
    let mut b = Matrix::zeros(tgt.n2, src.n2);
    let mut s = Matrix::zeros(tgt.n3, src.n3);
    for (k, e) in src.basis().into_iter().enumerate() {
        let im = image(e)?;
        if k < src.n1 {
            for r in 0..tgt.n1 {
                a[(r, k)] = im.y[r].clone();
            }
        } else if k < src.n1 + src.n2 {
            for r in 0..tgt.n2 {
                b[(r, k - src.n1)] = im.z[r].clone();
            }
        } else {
            for r in 0..tgt.n3 {
                s[(r, k - src.n1 - src.n2)] = im.c[r].clone();
            }
        }
    }
    let m = DoubleMorphism::linear(a, b, Bilinear::zeros(tgt.n3, src.n1, src.n2), s)?;
    // The image of a basis point must not leak into other blocks.
    for e in src.basis() {
        if m.apply(&e)? != image(e.clone())? {
            return Err(Error::Invalid("pairing representation is not block diagonal".into()));
        }
    }
    Ok(m)
}

/// Special data of one step of the dual cycle.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DualData {
    pub dims: (usize, usize, usize),
    pub l1: Vector,
    pub l2: Vector,
    pub sigma: Vector,
}

impl DualData {
    fn of(a: &DoubleAffine) -> Result<Self> {
        Ok(DualData {
            dims: a.space().dims(),
            l1: a.l1().clone(),
            l2: a.l2().clone(),
            sigma: a.require_sigma()?.clone(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct HvhReport {
    /// `A`, `A^H`, `A^{HV}`, `A^{HVH}`.
    pub cycle: Vec<DualData>,
    /// `A^{HVH} → adjoint(flip(A))`.
    pub iso: DoubleMorphism,
    pub sides_identity: bool,
    pub core_minus_identity: bool,
    pub data_preserved: bool,
}

impl HvhReport {
    pub fn ok(&self) -> bool {
        self.sides_identity && self.core_minus_identity && self.data_preserved && self.iso.is_linear()
    }
}

/// Builds `A^{HVH}` and the isomorphism onto the adjoint of the flip of
/// `A`, obtained from the pairing representation `ι` of `(A^H)^H ≅ A`.
pub fn hvh_iso(a: &DoubleAffine) -> Result<HvhReport> {
    let ah = special_dual_horizontal(a)?;
    let ahv = special_dual_vertical(&ah)?;
    let ahvh = special_dual_horizontal(&ahv)?;
    let target = a.flip().adjoint()?;
    let e = a.space();
    if ahvh.space() != target.space() {
        return Err(dim_mismatch("triple dual and flipped space differ"));
    }
    // (E^H)^H is E in our coordinates (double dual over the same leg), so
    // ι_{E^H} is a map E → flip(E^{HVH}).
    let k = iota(horizontal_dual(e))?;
    let iso = k.inverse()?.flip();
    let id1 = Matrix::identity(e.n2);
    let id2 = Matrix::identity(e.n1);
    let sides_identity = iso.alpha == id1 && iso.beta == id2;
    let core_minus_identity = iso.sigma == Matrix::identity(e.n3).neg() && iso.gamma_yz.is_zero();
    let data_preserved = iso.alpha.vec_mul(target.l1())? == *ahvh.l1()
        && iso.beta.vec_mul(target.l2())? == *ahvh.l2()
        && iso.sigma.mul_vec(ahvh.require_sigma()?)? == *target.require_sigma()?;
    let cycle = [a, &ah, &ahv, &ahvh]
        .into_iter()
        .map(DualData::of)
        .collect::<Result<_>>()?;
    Ok(HvhReport {
        cycle,
        iso,
        sides_identity,
        core_minus_identity,
        data_preserved,
    })
}

/// Checks on random elements that the pairing restricted to `A^V` and
/// `A^H` (over a common point of `{σ = 1}`) does not depend on the
/// interpolating point, is shifted by one when `Φ` moves along `l̄₂` or `Ψ`
/// along `−l̄₁`, and that the Gram matrix is non-degenerate. Returns the
/// first failure.
pub fn adjoint_duality_check(a: &DoubleAffine, rng: &mut TrialRng, trials: usize) -> Result<Option<String>> {
    let sigma = a.require_sigma()?;
    let d = a.space();
    let av = special_dual_vertical(a)?;
    let ah = special_dual_horizontal(a)?;
    if gram_matrix(d)?.rank() != d.n1 + d.n2 {
        return Ok(Some("pairing is degenerate".into()));
    }
    let one = Scalar::from_integer(1.into());
    for t in 0..trials {
        let gamma = DoubleAffine::random_level_point(rng, sigma);
        let phi = DoublePoint::new(a.random_side1(rng), gamma.clone(), random::vector(rng, d.n2));
        let psi = DoublePoint::new(gamma, a.random_side2(rng), random::vector(rng, d.n1));
        if !av.contains(&phi)? || !ah.contains(&psi)? {
            return Ok(Some(format!("trial {t}: sampled dual elements are off the level sets")));
        }
        let base = pairing(d, &phi, &psi)?;
        for _ in 0..3 {
            let c = random::vector(rng, d.n3);
            if pairing_at(d, &phi, &psi, &c)? != base {
                return Ok(Some(format!("trial {t}: pairing depends on the interpolating core point {c}")));
            }
        }
        let shifted_phi = DoublePoint::new(phi.y.clone(), phi.z.clone(), phi.c.try_add(a.l2())?);
        let shifted_psi = DoublePoint::new(psi.y.clone(), psi.z.clone(), psi.c.try_sub(a.l1())?);
        let lhs = pairing(d, &shifted_phi, &psi)?;
        let rhs = pairing(d, &phi, &shifted_psi)?;
        if lhs != &base + &one || rhs != &base + &one {
            return Ok(Some(format!("trial {t}: shifted pairings {lhs}, {rhs} vs {base} + 1")));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use crate::random::trial_rng;

    fn d111() -> DecomposedDouble {
        DecomposedDouble::new(1, 1, 1)
    }

    fn pt(y: &[i64], z: &[i64], c: &[i64]) -> DoublePoint {
        DoublePoint::new(Vector::from_ints(y), Vector::from_ints(z), Vector::from_ints(c))
    }

    #[test]
    fn dual_dims() {
        let d = DecomposedDouble::new(1, 2, 3);
        assert_eq!(vertical_dual(d).dims(), (1, 3, 2));
        assert_eq!(horizontal_dual(d).dims(), (3, 2, 1));
    }

    #[test]
    fn unit_special_duals() {
        let one = Vector::from_ints(&[1]);
        let a = DoubleAffine::new(d111(), one.clone(), one.clone(), Some(one.clone())).unwrap();
        let v = special_dual_vertical(&a).unwrap();
        assert_eq!((v.l1(), v.l2(), v.sigma()), (&one, &one, Some(&one)));
    }

    #[test]
    fn pairing_example() {
        let phi = pt(&[1], &[1], &[2]);
        let psi = pt(&[1], &[1], &[3]);
        assert_eq!(pairing(d111(), &phi, &psi).unwrap(), int(-1));
        for c in [0, 5] {
            assert_eq!(pairing_at(d111(), &phi, &psi, &Vector::from_ints(&[c])).unwrap(), int(-1));
        }
        let other = pt(&[2], &[1], &[3]);
        assert_eq!(pairing(d111(), &phi, &other), Err(Error::BaseMismatch));
    }

    #[test]
    fn gram_is_nondegenerate() {
        let d = DecomposedDouble::new(2, 3, 2);
        assert_eq!(gram_matrix(d).unwrap().rank(), 5);
    }

    #[test]
    fn double_dual_same_leg_is_evaluation() {
        let d = DecomposedDouble::new(2, 1, 3);
        let vv = vertical_dual(vertical_dual(d));
        assert_eq!(vv, d);
        let mut rng = trial_rng(5, 0);
        let x = d.random_point(&mut rng);
        // x as a function on D^V over x.y, read back through the second dual.
        let gamma = crate::random::vector(&mut rng, d.n3);
        let zeta = crate::random::vector(&mut rng, d.n2);
        let phi = DoublePoint::new(x.y.clone(), gamma, zeta);
        let via_dual = vertical_eval(vertical_dual(d), &x, &phi).unwrap();
        assert_eq!(via_dual, vertical_eval(d, &phi, &x).unwrap());
    }

    #[test]
    fn hvh_on_small_instances() {
        for t in 0..5 {
            let mut rng = trial_rng(9, t);
            let a = DoubleAffine::random(&mut rng, (3, 3, 3), true);
            let r = hvh_iso(&a).unwrap();
            assert!(r.ok(), "{r:?}");
            let last = &r.cycle[3];
            assert_eq!((&last.l1, &last.l2, &last.sigma), (a.l2(), a.l1(), a.sigma().unwrap()));
        }
    }

    #[test]
    fn adjoint_duality_on_random_instances() {
        for t in 0..10 {
            let mut rng = trial_rng(10, t);
            let a = DoubleAffine::random(&mut rng, (3, 3, 3), true);
            assert_eq!(adjoint_duality_check(&a, &mut rng, 5).unwrap(), None);
        }
    }
}
