//! Deciding whether a level set of degree-(1,1) functions is a double
//! affine subspace of `D = V₁ × V₂ × V₃`.
//!
//! The core rows are eliminated first: a row with a nonzero core part can
//! always be solved for `c`. What is left constrains `(y, z)` alone and
//! has to cut out a product of two affine subspaces.

use std::fmt;

use crate::error::{Error, Result};
use crate::exact::{frac, Matrix, Ring, Scalar, Vector};
use crate::random;

use super::DecomposedDouble;

/// `g₀₀ + g_y·y + g_z·z + yᵀ·G·z + s·c = value`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LevelConstraint {
    pub g00: Scalar,
    pub gy: Vector,
    pub gz: Vector,
    pub gyz: Matrix,
    pub sigma: Vector,
    pub value: Scalar,
}

impl LevelConstraint {
    pub fn zero(d: DecomposedDouble) -> Self {
        LevelConstraint {
            g00: Ring::zero(),
            gy: Vector::zeros(d.n1),
            gz: Vector::zeros(d.n2),
            gyz: Matrix::zeros(d.n1, d.n2),
            sigma: Vector::zeros(d.n3),
            value: Ring::zero(),
        }
    }

    fn validate(&self, d: DecomposedDouble) -> Result<()> {
        if self.gy.len() != d.n1
            || self.gz.len() != d.n2
            || (self.gyz.rows(), self.gyz.cols()) != (d.n1, d.n2)
            || self.sigma.len() != d.n3
        {
            return Err(Error::MalformedConstraint(format!("coefficient blocks do not match dims {d}")));
        }
        Ok(())
    }

    /// Left side minus right side at `(y, z, c)`.
    pub fn residual(&self, y: &Vector, z: &Vector, c: &Vector) -> Result<Scalar> {
        let yg = self.gyz.vec_mul(y)?;
        Ok(&self.g00 + self.gy.dot(y)? + self.gz.dot(z)? + yg.dot(z)? + self.sigma.dot(c)? - &self.value)
    }

    fn combine(&self, other: &Self, f: &Scalar) -> Self {
        LevelConstraint {
            g00: &self.g00 + f * &other.g00,
            gy: self.gy.try_add(&other.gy.scale(f)).expect("same dims"),
            gz: self.gz.try_add(&other.gz.scale(f)).expect("same dims"),
            gyz: self.gyz.try_add(&other.gyz.scale(f)).expect("same dims"),
            sigma: self.sigma.try_add(&other.sigma.scale(f)).expect("same dims"),
            value: &self.value + f * &other.value,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Witness {
    /// The set is empty.
    Empty,
    /// `y_mid = aff(y_a, y_b; 1/2)` with nonempty fibers over `y_a`, `y_b`
    /// and an empty fiber over `y_mid`: the side projection is not affine.
    AffineClosure { y_a: Vector, y_b: Vector, y_mid: Vector },
    /// `y ∈ π₁(S)`, `z ∈ π₂(S)` but `(y, z) ∉ (π₁, π₂)(S)`.
    FiberProduct { y: Vector, z: Vector },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Empty => write!(f, "level set is empty"),
            Witness::AffineClosure { y_a, y_b, y_mid } => write!(
                f,
                "y={y_mid} is the midpoint of y={y_a} and y={y_b} but has an empty fiber"
            ),
            Witness::FiberProduct { y, z } => {
                write!(f, "(y={y}, z={z}) lies in the product of the side projections but has no preimage")
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LevelVerdict {
    /// Side projections are the affine subspaces `p + span(K)`; the core of
    /// the subbundle has the given dimension.
    Subbundle {
        side1: (Vector, Matrix),
        side2: (Vector, Matrix),
        core_dim: usize,
    },
    NotSubbundle(Witness),
    /// A genuinely bilinear residue remains and no witness was found among
    /// the sampled fibers; exact classification would need more than
    /// linear algebra.
    Undecided(String),
}

impl LevelVerdict {
    pub fn is_subbundle(&self) -> bool {
        matches!(self, LevelVerdict::Subbundle { .. })
    }
}

/// Solution set of the side rows: `(y, z) = p + K·t`.
struct Param {
    p: Vector,
    k: Matrix,
}

fn solve_linear(rows: &[(Vector, Scalar)], n: usize) -> Result<Option<Param>> {
    if rows.is_empty() {
        return Ok(Some(Param {
            p: Vector::zeros(n),
            k: Matrix::identity(n),
        }));
    }
    let a = Matrix::from_rows(rows.iter().map(|(r, _)| r.as_slice().to_vec()).collect(), n)?;
    let b: Vector = rows.iter().map(|(_, v)| v.clone()).collect();
    Ok(a.solve(&b)?.map(|p| Param { p, k: a.kernel() }))
}

pub fn classify_level_set(d: DecomposedDouble, constraints: &[LevelConstraint]) -> Result<LevelVerdict> {
    for c in constraints {
        c.validate(d)?;
    }
    // Eliminate the core block.
    let mut rows: Vec<LevelConstraint> = constraints.to_vec();
    let mut pivots = 0;
    for col in 0..d.n3 {
        let Some(p) = (pivots..rows.len()).find(|&i| !Ring::is_zero(&rows[i].sigma[col])) else {
            continue;
        };
        rows.swap(pivots, p);
        let piv = rows[pivots].clone();
        for (i, r) in rows.iter_mut().enumerate() {
            if i != pivots && !Ring::is_zero(&r.sigma[col]) {
                let f = -(&r.sigma[col] / &piv.sigma[col]);
                *r = r.combine(&piv, &f);
            }
        }
        pivots += 1;
    }
    let core_dim = d.n3 - pivots;
    let residual: Vec<LevelConstraint> = rows.split_off(pivots);
    debug_assert!(residual.iter().all(|r| r.sigma.is_zero()));

    // Side rows in w = (y, z): linear ones and bilinear ones.
    let n = d.n1 + d.n2;
    let mut linear: Vec<(Vector, Scalar)> = Vec::new();
    let mut bilinear: Vec<LevelConstraint> = Vec::new();
    for r in residual {
        let coeffs = r.gy.concat(&r.gz);
        let rhs = &r.value - &r.g00;
        if r.gyz.is_zero() {
            if coeffs.is_zero() {
                if !Ring::is_zero(&rhs) {
                    return Ok(LevelVerdict::NotSubbundle(Witness::Empty));
                }
                continue;
            }
            linear.push((coeffs, rhs));
        } else {
            bilinear.push(r);
        }
    }

    // Substitute the linear solution set into the bilinear rows; rows whose
    // quadratic part vanishes there become linear. Repeat to a fixpoint.
    let param = loop {
        let Some(param) = solve_linear(&linear, n)? else {
            return Ok(LevelVerdict::NotSubbundle(Witness::Empty));
        };
        let before = bilinear.len();
        let mut still = Vec::new();
        for r in bilinear.drain(..) {
            match restrict(&r, &param, d)? {
                Restricted::Linear(coeffs, rhs) => {
                    if coeffs.is_zero() {
                        if !Ring::is_zero(&rhs) {
                            return Ok(LevelVerdict::NotSubbundle(Witness::Empty));
                        }
                        continue;
                    }
                    linear.push(lift_row(&coeffs, &rhs, &param)?);
                }
                Restricted::Quadratic => still.push(r),
            }
        }
        bilinear = still;
        if bilinear.len() == before {
            break param;
        }
    };

    if bilinear.is_empty() {
        return split_or_witness(d, &param, core_dim);
    }
    find_bilinear_witness(d, &param, &bilinear)
}

enum Restricted {
    Linear(Vector, Scalar),
    Quadratic,
}

/// Row `r` pulled back along `w = p + K t`.
fn restrict(r: &LevelConstraint, param: &Param, d: DecomposedDouble) -> Result<Restricted> {
    let k = &param.k;
    let ky = k.block(0, 0, d.n1, k.cols());
    let kz = k.block(d.n1, 0, d.n2, k.cols());
    let py = param.p.segment(0, d.n1);
    let pz = param.p.segment(d.n1, d.n2);
    // Quadratic part: Kyᵀ G Kz (as a bilinear form in t, symmetrised).
    let q = ky.transpose().mul(&r.gyz)?.mul(&kz)?;
    let sym = q.try_add(&q.transpose())?;
    if !sym.is_zero() {
        return Ok(Restricted::Quadratic);
    }
    // Linear part in t: gy·Ky + gz·Kz + pyᵀ G Kz + (Ky t)ᵀ G pz.
    let lin = ky
        .vec_mul(&r.gy)?
        .try_add(&kz.vec_mul(&r.gz)?)?
        .try_add(&kz.vec_mul(&r.gyz.vec_mul(&py)?)?)?
        .try_add(&ky.vec_mul(&r.gyz.mul_vec(&pz)?)?)?;
    let zero_t = Vector::zeros(d.n3);
    let c0 = r.residual(&py, &pz, &zero_t)?;
    Ok(Restricted::Linear(lin, -c0))
}

/// Turns `a·t = b` on `w = p + K t` into an equivalent row on `w`.
fn lift_row(a: &Vector, b: &Scalar, param: &Param) -> Result<(Vector, Scalar)> {
    // Any w-row u with Kᵀu = a works; shift the right side by u·p.
    let kt = param.k.transpose();
    let u = kt
        .solve(a)?
        .ok_or_else(|| Error::Invalid("restricted row is not expressible on the ambient space".into()))?;
    let rhs = b + u.dot(&param.p)?;
    Ok((u, rhs))
}

/// Linear case: the solution set is `p + span K` in `V₁ × V₂`; it is a
/// product iff `span K` splits into a `V₁` part and a `V₂` part.
fn split_or_witness(d: DecomposedDouble, param: &Param, core_dim: usize) -> Result<LevelVerdict> {
    let k = &param.k;
    let ky = k.block(0, 0, d.n1, k.cols());
    let kz = k.block(d.n1, 0, d.n2, k.cols());
    let r = k.rank();
    let ry = ky.rank();
    let rz = kz.rank();
    let py = param.p.segment(0, d.n1);
    let pz = param.p.segment(d.n1, d.n2);
    if ry + rz == r {
        let basis = |m: &Matrix| -> Matrix {
            let e = m.transpose().echelon();
            let cols: Vec<Vector> = (0..e.pivots.len()).map(|i| e.reduced.row(i)).collect();
            Matrix::from_columns(&cols, m.rows())
        };
        return Ok(LevelVerdict::Subbundle {
            side1: (py, basis(&ky)),
            side2: (pz, basis(&kz)),
            core_dim,
        });
    }
    // Not split: some direction t moves y while the fiber over the new y
    // misses pz. Take y = py + Ky t for a t outside the kernel of the
    // product projection and keep z = pz.
    for j in 0..k.cols() {
        let y = py.try_add(&ky.column(j))?;
        let w = y.concat(&pz);
        if !in_param(&w, param)? {
            return Ok(LevelVerdict::NotSubbundle(Witness::FiberProduct { y, z: pz }));
        }
    }
    Err(Error::Invalid("non-split solution set without a fiber-product witness".into()))
}

fn in_param(w: &Vector, param: &Param) -> Result<bool> {
    Ok(param.k.solve(&w.try_sub(&param.p)?)?.is_some())
}

/// Fiber of the side-row solution set over a fixed `y`: the affine set of
/// `z` with `(y, z)` satisfying every row, or `None` when empty.
fn z_fiber(d: DecomposedDouble, param: &Param, rows: &[LevelConstraint], y: &Vector) -> Result<Option<(Vector, Matrix)>> {
    // Unknowns t with Ky t = y − py, plus the rows, which are linear in t once y is fixed.
    let k = &param.k;
    let ky = k.block(0, 0, d.n1, k.cols());
    let kz = k.block(d.n1, 0, d.n2, k.cols());
    let py = param.p.segment(0, d.n1);
    let pz = param.p.segment(d.n1, d.n2);
    let mut a_rows: Vec<Vec<Scalar>> = ky.row_vecs();
    let mut b: Vec<Scalar> = y.try_sub(&py)?.into_inner();
    let zeros = Vector::zeros(d.n3);
    for r in rows {
        // row(y, pz + Kz t) = r(y, pz) + (gz + Gᵀ y)·Kz t
        let coeff = kz.vec_mul(&r.gz.try_add(&r.gyz.vec_mul(y)?)?)?;
        a_rows.push(coeff.into_inner());
        b.push(-r.residual(y, &pz, &zeros)?);
    }
    let a = Matrix::from_rows(a_rows, k.cols())?;
    let Some(t0) = a.solve(&Vector::new(b))? else {
        return Ok(None);
    };
    let z0 = pz.try_add(&kz.mul_vec(&t0)?)?;
    let dirs = kz.mul(&a.kernel())?;
    Ok(Some((z0, dirs)))
}

fn same_affine(a: &(Vector, Matrix), b: &(Vector, Matrix)) -> Result<bool> {
    let ra = a.1.rank();
    if ra != b.1.rank() {
        return Ok(false);
    }
    let both = Matrix::from_fn(a.1.rows(), a.1.cols() + b.1.cols(), |i, j| {
        if j < a.1.cols() {
            a.1[(i, j)].clone()
        } else {
            b.1[(i, j - a.1.cols())].clone()
        }
    });
    if both.rank() != ra {
        return Ok(false);
    }
    Ok(a.1.solve(&b.0.try_sub(&a.0)?)?.is_some() || (ra == 0 && a.0 == b.0))
}

fn find_bilinear_witness(d: DecomposedDouble, param: &Param, rows: &[LevelConstraint]) -> Result<LevelVerdict> {
    let k = &param.k;
    let ky = k.block(0, 0, d.n1, k.cols());
    let py = param.p.segment(0, d.n1);
    // Sample t: ± basis vectors, then seeded random rationals.
    let mut ts: Vec<Vector> = Vec::new();
    for j in 0..k.cols() {
        ts.push(Vector::basis(k.cols(), j));
        ts.push(Vector::basis(k.cols(), j).neg());
    }
    let mut rng = random::trial_rng(0, 0);
    for _ in 0..24 {
        ts.push(random::vector(&mut rng, k.cols()));
    }
    let mut found: Vec<(Vector, (Vector, Matrix))> = Vec::new();
    for t in &ts {
        let y = py.try_add(&ky.mul_vec(t)?)?;
        if found.iter().any(|(yy, _)| *yy == y) {
            continue;
        }
        if let Some(f) = z_fiber(d, param, rows, &y)? {
            found.push((y, f));
        }
    }
    let half = frac(1, 2);
    for (i, (ya, _)) in found.iter().enumerate() {
        for (yb, _) in found.iter().skip(i + 1) {
            let mid = ya.affine_combination(yb, &half)?;
            if z_fiber(d, param, rows, &mid)?.is_none() {
                return Ok(LevelVerdict::NotSubbundle(Witness::AffineClosure {
                    y_a: ya.clone(),
                    y_b: yb.clone(),
                    y_mid: mid,
                }));
            }
        }
    }
    for (i, (_, fa)) in found.iter().enumerate() {
        for (yb, fb) in found.iter().skip(i + 1) {
            if !same_affine(fa, fb)? {
                // A z over the first y that the second fiber misses.
                let cands = std::iter::once(fa.0.clone())
                    .chain((0..fa.1.cols()).map(|j| fa.0.try_add(&fa.1.column(j)).expect("same length")));
                for z in cands {
                    let on_b = fb.1.solve(&z.try_sub(&fb.0)?)?.is_some() || (fb.1.cols() == 0 && z == fb.0);
                    if !on_b {
                        return Ok(LevelVerdict::NotSubbundle(Witness::FiberProduct { y: yb.clone(), z }));
                    }
                }
            }
        }
    }
    Ok(LevelVerdict::Undecided(format!(
        "{} bilinear row(s) remain and {} sampled fibers agree",
        rows.len(),
        found.len()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    fn d111() -> DecomposedDouble {
        DecomposedDouble::new(1, 1, 1)
    }

    #[test]
    fn hyperbola_is_not_a_subbundle() {
        let mut r = LevelConstraint::zero(d111());
        r.gyz = Matrix::from_ints(&[&[1]]);
        r.value = int(1);
        let v = classify_level_set(d111(), &[r]).unwrap();
        match v {
            LevelVerdict::NotSubbundle(Witness::AffineClosure { y_mid, .. }) => {
                assert_eq!(y_mid, Vector::from_ints(&[0]))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn plane_is_a_subbundle() {
        let mut r = LevelConstraint::zero(d111());
        r.gy = Vector::from_ints(&[1]);
        r.gz = Vector::from_ints(&[1]);
        r.sigma = Vector::from_ints(&[1]);
        r.value = int(1);
        let v = classify_level_set(d111(), &[r]).unwrap();
        assert!(v.is_subbundle(), "{v:?}");
    }

    #[test]
    fn core_translate() {
        let mut r = LevelConstraint::zero(d111());
        r.sigma = Vector::from_ints(&[1]);
        r.value = int(1);
        match classify_level_set(d111(), &[r]).unwrap() {
            LevelVerdict::Subbundle { core_dim, side1, .. } => {
                assert_eq!(core_dim, 0);
                assert_eq!(side1.1.cols(), 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mixed_linear_row_fails() {
        let mut r = LevelConstraint::zero(d111());
        r.gy = Vector::from_ints(&[1]);
        r.gz = Vector::from_ints(&[-1]);
        let v = classify_level_set(d111(), &[r]).unwrap();
        assert!(matches!(v, LevelVerdict::NotSubbundle(Witness::FiberProduct { .. })), "{v:?}");
    }

    #[test]
    fn bilinear_row_killed_by_linear_row() {
        // y·z = 2 together with y = 1 forces z = 2: a point, hence a product.
        let mut a = LevelConstraint::zero(d111());
        a.gyz = Matrix::from_ints(&[&[1]]);
        a.value = int(2);
        let mut b = LevelConstraint::zero(d111());
        b.gy = Vector::from_ints(&[1]);
        b.value = int(1);
        let v = classify_level_set(d111(), &[a, b]).unwrap();
        assert!(v.is_subbundle(), "{v:?}");
    }

    #[test]
    fn inconsistent_rows() {
        let mut a = LevelConstraint::zero(d111());
        a.gy = Vector::from_ints(&[1]);
        a.value = int(1);
        let mut b = a.clone();
        b.value = int(2);
        assert_eq!(
            classify_level_set(d111(), &[a, b]).unwrap(),
            LevelVerdict::NotSubbundle(Witness::Empty)
        );
    }

    #[test]
    fn malformed() {
        let mut r = LevelConstraint::zero(d111());
        r.gy = Vector::from_ints(&[1, 2]);
        assert!(matches!(classify_level_set(d111(), &[r]), Err(Error::MalformedConstraint(_))));
    }
}
