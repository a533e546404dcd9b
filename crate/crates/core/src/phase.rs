//! The cotangent tower of a special affine bundle `A` over a single chart
//! `M = ℚ^m`.
//!
//! The hull `E` has fiber coordinates `y⁰ … y^{n+1}`, the base `x`, and
//! `T*E` adds momenta `p` (dual to `x`) and `π` (dual to `y`). In the
//! normal form `A = {y^{n+1} = 1}` and `v_A = e₀`. The two indices are
//! kept as parameters so the same code serves `A^#`, where they swap.
//!
//! Quotients by `χ` are stored as masks: a masked coordinate is set to `0`
//! in the canonical representative.

use std::fmt;

use crate::check::{first_failure, Check};
use crate::double::{
    adjoint_duality_check, special_dual_vertical, vertical_dual, vertical_eval, DecomposedDouble, DoubleAffine,
    DoublePoint,
};
use crate::error::{dim_mismatch, Error, Result};
use crate::exact::{one, zero, Matrix, Poly, Ring, Scalar, Vector};
use crate::random::{self, TrialRng};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct TrivialBispecial {
    m: usize,
    n: usize,
    v_idx: usize,
    alpha_idx: usize,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CotangentPoint {
    pub x: Vector,
    pub y: Vector,
    pub p: Vector,
    pub pi: Vector,
}

impl CotangentPoint {
    pub fn new(x: Vector, y: Vector, p: Vector, pi: Vector) -> Self {
        CotangentPoint { x, y, p, pi }
    }
}

impl fmt::Display for CotangentPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(x={}; y={}; p={}; pi={})", self.x, self.y, self.p, self.pi)
    }
}

/// Which `χ`-directions are quotiented out: `y_v` is the `χ₁` direction
/// (translation along `v_A`) and `pi_alpha` the `χ₂` direction (adding
/// multiples of `dα_A`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Mask {
    pub y_v: bool,
    pub pi_alpha: bool,
}

impl Mask {
    pub const NONE: Mask = Mask { y_v: false, pi_alpha: false };
    pub const CHI1: Mask = Mask { y_v: true, pi_alpha: false };
    pub const CHI2: Mask = Mask { y_v: false, pi_alpha: true };
    pub const BOTH: Mask = Mask { y_v: true, pi_alpha: true };
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ReducedCovector {
    point: CotangentPoint,
    mask: Mask,
}

impl ReducedCovector {
    pub fn point(&self) -> &CotangentPoint {
        &self.point
    }

    pub fn mask(&self) -> Mask {
        self.mask
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum PhaseSpace {
    AffCtg,
    PhaseP,
    Bbl,
    ContactC,
}

impl PhaseSpace {
    pub fn name(&self) -> &'static str {
        match self {
            PhaseSpace::AffCtg => "affctg",
            PhaseSpace::PhaseP => "phase",
            PhaseSpace::Bbl => "bbl",
            PhaseSpace::ContactC => "contact",
        }
    }

    pub fn mask(&self) -> Mask {
        match self {
            PhaseSpace::AffCtg | PhaseSpace::PhaseP => Mask::BOTH,
            PhaseSpace::Bbl => Mask::NONE,
            PhaseSpace::ContactC => Mask::CHI2,
        }
    }
}

/// A constructed space: its mask, defining equations, and double
/// structure in decomposed coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Constructed {
    pub kind: PhaseSpace,
    pub mask: Mask,
    pub constraints: Vec<(String, Scalar)>,
    pub side1: Vec<String>,
    pub side2: Vec<String>,
    pub core: Vec<String>,
    pub hull: DecomposedDouble,
    pub structure: Option<DoubleAffine>,
}

fn indicator(len: usize, at: usize) -> Vector {
    Vector::basis(len, at)
}

impl TrivialBispecial {
    /// Normal form: `α_A = y^{n+1}`, `v_A = e₀`.
    pub fn new(m: usize, n: usize) -> Self {
        TrivialBispecial {
            m,
            n,
            v_idx: 0,
            alpha_idx: n + 1,
        }
    }

    pub fn base_dim(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fiber_dim(&self) -> usize {
        self.n + 2
    }

    pub fn v_index(&self) -> usize {
        self.v_idx
    }

    pub fn alpha_index(&self) -> usize {
        self.alpha_idx
    }

    pub fn is_normal(&self) -> bool {
        self.v_idx == 0 && self.alpha_idx == self.n + 1
    }

    /// `A^#` on the dual hull: `α_{A^#}` is evaluation at `v_A` and
    /// `v_{A^#} = α_A`.
    pub fn dual(&self) -> Self {
        TrivialBispecial {
            v_idx: self.alpha_idx,
            alpha_idx: self.v_idx,
            ..*self
        }
    }

    fn without(&self, skip: &[usize]) -> Vec<usize> {
        (0..self.fiber_dim()).filter(|i| !skip.contains(i)).collect()
    }

    fn side1_indices(&self) -> Vec<usize> {
        self.without(&[self.v_idx])
    }

    fn side2_indices(&self) -> Vec<usize> {
        self.without(&[self.alpha_idx])
    }

    fn inner_indices(&self) -> Vec<usize> {
        self.without(&[self.v_idx, self.alpha_idx])
    }

    pub fn check(&self, w: &CotangentPoint) -> Result<()> {
        let nf = self.fiber_dim();
        if w.x.len() != self.m || w.p.len() != self.m || w.y.len() != nf || w.pi.len() != nf {
            return Err(dim_mismatch(format!(
                "cotangent point must have x, p of length {} and y, pi of length {nf}",
                self.m
            )));
        }
        Ok(())
    }

    pub fn chi(&self, s: &Scalar, t: &Scalar, w: &CotangentPoint) -> CotangentPoint {
        let mut out = w.clone();
        let mut y = out.y.into_inner();
        y[self.v_idx] += s;
        out.y = Vector::new(y);
        let mut pi = out.pi.into_inner();
        pi[self.alpha_idx] += t;
        out.pi = Vector::new(pi);
        out
    }

    /// `(l̃₁, l̃₂) = (α_A(y), ⟨ω, X_A⟩)`.
    pub fn lifts(&self, w: &CotangentPoint) -> (Scalar, Scalar) {
        (w.y[self.alpha_idx].clone(), w.pi[self.v_idx].clone())
    }

    /// Scales the fibers of `T*E → E`.
    pub fn h1(&self, t: &Scalar, w: &CotangentPoint) -> CotangentPoint {
        CotangentPoint::new(w.x.clone(), w.y.clone(), w.p.scale(t), w.pi.scale(t))
    }

    /// Scales the fibers of `T*E → E*`.
    pub fn h2(&self, t: &Scalar, w: &CotangentPoint) -> CotangentPoint {
        CotangentPoint::new(w.x.clone(), w.y.scale(t), w.p.scale(t), w.pi.clone())
    }

    pub fn reduce(&self, w: &CotangentPoint, mask: Mask) -> Result<ReducedCovector> {
        self.check(w)?;
        let mut point = w.clone();
        if mask.y_v {
            let mut y = point.y.into_inner();
            y[self.v_idx] = zero();
            point.y = Vector::new(y);
        }
        if mask.pi_alpha {
            let mut pi = point.pi.into_inner();
            pi[self.alpha_idx] = zero();
            point.pi = Vector::new(pi);
        }
        Ok(ReducedCovector { point, mask })
    }

    pub fn in_bbl(&self, w: &CotangentPoint) -> bool {
        let (l1, l2) = self.lifts(w);
        l1 == one() && l2 == one()
    }

    fn coord_names(&self, letter: &str, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|i| format!("{letter}{i}")).collect()
    }

    fn momenta_names(&self) -> Vec<String> {
        (1..=self.m).map(|a| format!("p{a}")).collect()
    }

    pub fn build(&self, kind: PhaseSpace, omega: Option<&Vector>) -> Result<Constructed> {
        if let Some(w) = omega {
            if w.len() != self.m {
                return Err(dim_mismatch("omega_M must be a covector on the base"));
            }
            if w.is_zero() {
                return Err(Error::ZeroForm);
            }
        }
        let all: Vec<usize> = (0..self.fiber_dim()).collect();
        let (s1, s2) = match kind {
            PhaseSpace::Bbl => (all.clone(), all),
            _ => (self.side1_indices(), self.side2_indices()),
        };
        let pos = |list: &[usize], i: usize| list.iter().position(|&k| k == i).expect("index kept");
        let l1 = indicator(s1.len(), pos(&s1, self.alpha_idx));
        let l2 = indicator(s2.len(), pos(&s2, self.v_idx));
        let mut core = self.momenta_names();
        let constraints = match kind {
            PhaseSpace::AffCtg => vec![],
            _ => vec![
                (format!("y{}", self.alpha_idx), one()),
                (format!("pi{}", self.v_idx), one()),
            ],
        };
        let (hull, structure) = match kind {
            PhaseSpace::AffCtg => (DecomposedDouble::new(s1.len(), s2.len(), self.m), None),
            PhaseSpace::PhaseP | PhaseSpace::Bbl => {
                let hull = DecomposedDouble::new(s1.len(), s2.len(), self.m);
                let sigma = if kind == PhaseSpace::PhaseP { omega.cloned() } else { None };
                (hull, Some(DoubleAffine::new(hull, l1, l2, sigma)?))
            }
            PhaseSpace::ContactC => {
                core.push(format!("y{}", self.v_idx));
                let hull = DecomposedDouble::new(s1.len(), s2.len(), self.m + 1);
                let sigma = indicator(self.m + 1, self.m);
                (hull, Some(DoubleAffine::new(hull, l1, l2, Some(sigma))?))
            }
        };
        Ok(Constructed {
            kind,
            mask: kind.mask(),
            constraints,
            side1: self.coord_names("y", &s1),
            side2: self.coord_names("pi", &s2),
            core,
            hull,
            structure,
        })
    }

    /// Decomposed coordinates of a class, following [`Self::build`].
    pub fn decompose(&self, r: &ReducedCovector) -> Result<DoublePoint> {
        let w = &r.point;
        let pick = |v: &Vector, idx: &[usize]| -> Vector { idx.iter().map(|&i| v[i].clone()).collect() };
        Ok(match r.mask {
            Mask::NONE => DoublePoint::new(w.y.clone(), w.pi.clone(), w.p.clone()),
            Mask::BOTH => DoublePoint::new(
                pick(&w.y, &self.side1_indices()),
                pick(&w.pi, &self.side2_indices()),
                w.p.clone(),
            ),
            Mask::CHI2 => DoublePoint::new(
                pick(&w.y, &self.side1_indices()),
                pick(&w.pi, &self.side2_indices()),
                w.p.concat(&Vector::new(vec![w.y[self.v_idx].clone()])),
            ),
            Mask::CHI1 => return Err(Error::Invalid("no double structure is attached to this quotient".into())),
        })
    }

    fn require_contact(&self, c: &ReducedCovector) -> Result<()> {
        self.check(&c.point)?;
        if c.mask != Mask::CHI2 {
            return Err(Error::ConstraintViolated("expected a class modulo the second action".into()));
        }
        if !self.in_bbl(&c.point) {
            return Err(Error::ConstraintViolated(format!(
                "expected y{} = 1 and pi{} = 1",
                self.alpha_idx, self.v_idx
            )));
        }
        Ok(())
    }

    /// `τ`: a class modulo `χ₂` to a class modulo `χ₁`; the masked momentum
    /// becomes `−Σ_{i≠α} y_i π_i`.
    pub fn tau(&self, c: &ReducedCovector) -> Result<ReducedCovector> {
        self.require_contact(c)?;
        let w = &c.point;
        let mut total = zero();
        for i in (0..self.fiber_dim()).filter(|&i| i != self.alpha_idx) {
            total += &w.y[i] * &w.pi[i];
        }
        let mut pi = w.pi.clone().into_inner();
        pi[self.alpha_idx] = -total;
        let out = CotangentPoint::new(w.x.clone(), w.y.clone(), w.p.clone(), Vector::new(pi));
        self.reduce(&out, Mask::CHI1)
    }

    /// `β(x, y, p, π) = (x, π, −p, y)` into `T*E*`.
    pub fn beta(&self, w: &CotangentPoint) -> CotangentPoint {
        CotangentPoint::new(w.x.clone(), w.pi.clone(), w.p.neg(), w.y.clone())
    }

    /// `β` on classes: the `χ₁` direction goes to the dual `χ₂` direction
    /// and vice versa.
    pub fn beta_reduced(&self, r: &ReducedCovector) -> Result<ReducedCovector> {
        let mask = Mask {
            y_v: r.mask.pi_alpha,
            pi_alpha: r.mask.y_v,
        };
        self.dual().reduce(&self.beta(&r.point), mask)
    }

    /// `κ = β ∘ τ`, from `C A` to `C A^#`.
    pub fn kappa(&self, c: &ReducedCovector) -> Result<ReducedCovector> {
        self.beta_reduced(&self.tau(c)?)
    }

    /// The projection of a contact element onto `A ×_M A^#`: the footpoint
    /// `y` and the fiber covector `π` completed by `τ`.
    pub fn contact_to_pair(&self, c: &ReducedCovector) -> Result<(Vector, Vector)> {
        let t = self.tau(c)?;
        Ok((c.point.y.clone(), t.point.pi.clone()))
    }

    /// `ι : T*𝒱(Ā) → Ŝ A` on fibers, as a matrix from `(u, ρ, p)` to the
    /// decomposed coordinates of `Ŝ A`.
    pub fn iota_matrix(&self) -> Matrix {
        let s1 = self.side1_indices();
        let s2 = self.side2_indices();
        let inner = self.inner_indices();
        let k = inner.len();
        let rows = s1.len() + s2.len() + self.m;
        let cols = 2 * k + self.m;
        let mut mtx = Matrix::zeros(rows, cols);
        for (j, i) in inner.iter().enumerate() {
            mtx[(s1.iter().position(|q| q == i).expect("inner"), j)] = one();
            mtx[(s1.len() + s2.iter().position(|q| q == i).expect("inner"), k + j)] = one();
        }
        for a in 0..self.m {
            mtx[(s1.len() + s2.len() + a, 2 * k + a)] = one();
        }
        mtx
    }

    pub fn affctg_dims(&self) -> DecomposedDouble {
        DecomposedDouble::new(self.n + 1, self.n + 1, self.m)
    }

    /// `Ŝ^• A` as a decomposed space: `(ȳ; ẋ, ẏ)` with `ẏ^α = 0` dropped.
    pub fn afftg_dims(&self) -> DecomposedDouble {
        vertical_dual(self.affctg_dims())
    }

    /// `⟨ω, X⟩ = p·ẋ + Σ_{i≠α} π_i ẏ^i` over a common point of `Ē`.
    pub fn afftg_pairing(&self, r: &ReducedCovector, t: &DoublePoint) -> Result<Scalar> {
        if r.mask != Mask::BOTH {
            return Err(Error::Invalid("expected a class modulo both actions".into()));
        }
        vertical_eval(self.affctg_dims(), t, &self.decompose(r)?)
    }

    /// `P^• A`, the vertical dual of `(P A, ω_M)`.
    pub fn phase_dual(&self, omega: &Vector) -> Result<DoubleAffine> {
        let pa = self.build(PhaseSpace::PhaseP, Some(omega))?;
        special_dual_vertical(pa.structure.as_ref().expect("phase bundle structure"))
    }

    pub fn random_point(&self, rng: &mut TrialRng) -> CotangentPoint {
        let nf = self.fiber_dim();
        CotangentPoint::new(
            random::vector(rng, self.m),
            random::vector(rng, nf),
            random::vector(rng, self.m),
            random::vector(rng, nf),
        )
    }

    pub fn random_bbl(&self, rng: &mut TrialRng) -> CotangentPoint {
        let mut w = self.random_point(rng);
        let mut y = w.y.into_inner();
        y[self.alpha_idx] = one();
        w.y = Vector::new(y);
        let mut pi = w.pi.into_inner();
        pi[self.v_idx] = one();
        w.pi = Vector::new(pi);
        w
    }

    pub fn random_contact(&self, rng: &mut TrialRng) -> ReducedCovector {
        let w = self.random_bbl(rng);
        self.reduce(&w, Mask::CHI2).expect("dims match")
    }
}

/// A change of adapted basis `π' = a π`, `y' = a^{-T} y` preserving
/// `v_A = e₀` and `α_A = y^{n+1}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AdaptedBasis {
    a: Matrix,
    a_inv_t: Matrix,
}

impl AdaptedBasis {
    pub fn new(n: usize, a: Matrix) -> Result<Self> {
        let nf = n + 2;
        if a.rows() != nf || a.cols() != nf {
            return Err(dim_mismatch("basis change must be square of size n + 2"));
        }
        let last = n + 1;
        if a[(0, 0)] != one() || a[(last, last)] != one() {
            return Err(Error::ConstraintViolated("a00 and the last diagonal entry must be 1".into()));
        }
        if (1..nf).any(|j| !Ring::is_zero(&a[(0, j)])) {
            return Err(Error::ConstraintViolated("row 0 must be e0".into()));
        }
        if (1..=n).any(|i| !Ring::is_zero(&a[(i, last)])) {
            return Err(Error::ConstraintViolated("the last column must be e_{n+1}".into()));
        }
        let a_inv_t = a.inverse()?.transpose();
        Ok(AdaptedBasis { a, a_inv_t })
    }

    pub fn random(rng: &mut TrialRng, n: usize) -> Self {
        let nf = n + 2;
        let b = random::unimodular(rng, n);
        let free: Vec<Scalar> = (0..nf * nf).map(|_| random::small_int(rng, -3, 3)).collect();
        let a = Matrix::from_fn(nf, nf, |i, j| {
            if i == 0 {
                if j == 0 {
                    one()
                } else {
                    zero()
                }
            } else if j == n + 1 {
                if i == n + 1 {
                    one()
                } else {
                    zero()
                }
            } else if (1..=n).contains(&i) && (1..=n).contains(&j) {
                b[(i - 1, j - 1)].clone()
            } else {
                free[i * nf + j].clone()
            }
        });
        AdaptedBasis::new(n, a).expect("constructed adapted")
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn transform(&self, w: &CotangentPoint) -> Result<CotangentPoint> {
        Ok(CotangentPoint::new(
            w.x.clone(),
            self.a_inv_t.mul_vec(&w.y)?,
            w.p.clone(),
            self.a.mul_vec(&w.pi)?,
        ))
    }

    /// Symbolic form of `π'_{n+1} ∘ τ = −y'_0 − Σ_{j=1}^n y'_j π'_j` on
    /// contact elements, in the variables `y₀ … y_n, π₁ … π_n`.
    pub fn tau_identity_holds(&self) -> Result<bool> {
        let nf = self.a.rows();
        let n = nf - 2;
        let var_y = |i: usize| Poly::var(i);
        let var_pi = |i: usize| Poly::var(n + i);
        let y: Vec<Poly> = (0..=n).map(var_y).chain(std::iter::once(Poly::one())).collect();
        let mut pi: Vec<Poly> = std::iter::once(Poly::one()).chain((1..=n).map(var_pi)).collect();
        let mut tau_last = Poly::zero();
        for i in 0..=n {
            tau_last = tau_last.sub(&y[i].mul(&pi[i]));
        }
        pi.push(tau_last);
        let cst = |s: &Scalar| Poly::constant(s.clone());
        let lin = |row: &dyn Fn(usize) -> Scalar, v: &[Poly]| -> Poly {
            v.iter().enumerate().fold(Poly::zero(), |acc, (k, p)| acc.add(&cst(&row(k)).mul(p)))
        };
        let lhs = lin(&|k| self.a[(n + 1, k)].clone(), &pi);
        let yp: Vec<Poly> = (0..nf).map(|i| lin(&|k| self.a_inv_t[(i, k)].clone(), &y)).collect();
        let pip: Vec<Poly> = (0..nf).map(|j| lin(&|k| self.a[(j, k)].clone(), &pi[..=n])).collect();
        let mut rhs = yp[0].neg();
        for j in 1..=n {
            rhs = rhs.sub(&yp[j].mul(&pip[j]));
        }
        Ok(lhs == rhs)
    }
}

/// A point of `T̄ A` over `Ā`: the diagonal action leaves `w = s + ṡ`
/// invariant, where `s = −y_v` is the coordinate with `X = −∂_s`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TbarClass {
    pub x: Vector,
    pub y: Vector,
    pub xdot: Vector,
    pub ydot: Vector,
    pub w: Scalar,
}

impl TrivialBispecial {
    pub fn tbar_class(&self, x: Vector, y: Vector, s: &Scalar, xdot: Vector, ydot: Vector, sdot: &Scalar) -> TbarClass {
        TbarClass {
            x,
            y,
            xdot,
            ydot,
            w: s + sdot,
        }
    }

    /// The bi-affine pairing `C A × T̄ A → ℚ`, computed with the tangent
    /// representative sitting at the footpoint of the contact element.
    pub fn contact_tbar_pairing(&self, c: &ReducedCovector, t: &TbarClass) -> Result<Scalar> {
        self.require_contact(c)?;
        let inner = self.inner_indices();
        let w = &c.point;
        let y_inner: Vector = inner.iter().map(|&i| w.y[i].clone()).collect();
        if w.x != t.x || y_inner != t.y {
            return Err(Error::BaseMismatch);
        }
        let pi_inner: Vector = inner.iter().map(|&i| w.pi[i].clone()).collect();
        let s = -w.y[self.v_idx].clone();
        let pi_s = -w.pi[self.v_idx].clone();
        let sdot = &t.w - &s;
        Ok(w.p.dot(&t.xdot)? + pi_inner.dot(&t.ydot)? + pi_s * sdot)
    }

    /// `X = −∂_s` added to a class.
    pub fn tbar_add_distinguished(&self, t: &TbarClass) -> TbarClass {
        TbarClass {
            w: &t.w - one(),
            ..t.clone()
        }
    }
}

fn signed_permutation(m: &Matrix) -> bool {
    let unit = |s: &Scalar| *s == one() || *s == -one();
    m.rows() == m.cols()
        && (0..m.rows()).all(|i| {
            let nz: Vec<usize> = (0..m.cols()).filter(|&j| !Ring::is_zero(&m[(i, j)])).collect();
            nz.len() == 1 && unit(&m[(i, nz[0])])
        })
        && (0..m.cols()).all(|j| (0..m.rows()).filter(|&i| !Ring::is_zero(&m[(i, j)])).count() == 1)
}

/// Randomized checks of the tower: invariance of the lifts, descent of the
/// homogeneity structures, `P A = 𝔹A/(ℚ×ℚ)`, the injection `ι`, the
/// `Ŝ × Ŝ^•` pairing, `P^• A`, the contact projections and `T̄ A`.
pub fn phase_tower_checks(
    e: &TrivialBispecial,
    omega: Option<&Vector>,
    rng: &mut TrialRng,
    trials: usize,
) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let affctg = e.build(PhaseSpace::AffCtg, None)?;
    let phase = e.build(PhaseSpace::PhaseP, omega)?;
    let phase_s = phase.structure.clone().expect("phase structure");

    out.push(Check::new(
        "chi-invariance",
        first_failure(trials, |_| {
            let w = e.random_point(rng);
            let (s, t) = (random::rational(rng), random::rational(rng));
            let moved = e.chi(&s, &t, &w);
            if e.lifts(&moved) != e.lifts(&w) {
                return Ok(Some(format!("lifts change at {w}")));
            }
            if e.in_bbl(&moved) != e.in_bbl(&w) {
                return Ok(Some(format!("membership in the double affine dual changes at {w}")));
            }
            for mask in [Mask::BOTH, Mask::CHI2] {
                let shifted = e.chi(&zero(), &t, &w);
                if e.reduce(&shifted, mask)? != e.reduce(&w, mask)? {
                    return Ok(Some(format!("class changes under the second action at {w}")));
                }
            }
            if e.reduce(&moved, Mask::BOTH)? != e.reduce(&w, Mask::BOTH)? {
                return Ok(Some(format!("class changes at {w}")));
            }
            Ok(None)
        })?,
    ));

    out.push(Check::new(
        "homogeneity",
        first_failure(trials, |_| {
            let w = e.random_point(rng);
            let (a, b) = (random::rational(rng), random::rational(rng));
            let (s, t) = (random::rational(rng), random::rational(rng));
            if e.h1(&a, &e.h2(&b, &w)) != e.h2(&b, &e.h1(&a, &w)) {
                return Ok(Some(format!("h1 and h2 do not commute at {w}")));
            }
            let moved = e.chi(&s, &t, &w);
            for h in [e.h1(&a, &w), e.h2(&a, &w)].into_iter().zip([e.h1(&a, &moved), e.h2(&a, &moved)]) {
                if e.reduce(&h.0, Mask::BOTH)? != e.reduce(&h.1, Mask::BOTH)? {
                    return Ok(Some(format!("homothety does not descend at {w}")));
                }
            }
            Ok(None)
        })?,
    ));

    out.push(Check::new(
        "phase-orbits",
        first_failure(trials, |_| {
            let w = e.random_bbl(rng);
            let (s, t) = (random::rational(rng), random::rational(rng));
            let a = e.reduce(&w, Mask::BOTH)?;
            let b = e.reduce(&e.chi(&s, &t, &w), Mask::BOTH)?;
            if a != b {
                return Ok(Some(format!("one orbit gives two phase points at {w}")));
            }
            if !phase_s.contains(&e.decompose(&a)?)? {
                return Ok(Some(format!("image of {w} is not on l1 = l2 = 1")));
            }
            Ok(None)
        })?,
    ));

    let iota = e.iota_matrix();
    let model = phase_s.model_vv();
    let (l1, l2) = model.constraints();
    let functionals = Matrix::from_rows(
        vec![
            l1.concat(&Vector::zeros(affctg.hull.n2 + affctg.hull.n3)).into_inner(),
            Vector::zeros(affctg.hull.n1).concat(l2).concat(&Vector::zeros(affctg.hull.n3)).into_inner(),
        ],
        affctg.hull.total_dim(),
    )?;
    let kernel_dim = affctg.hull.total_dim() - functionals.rank();
    let iota_witness = if iota.rank() != iota.cols() {
        Some("iota is not injective".to_string())
    } else if !functionals.mul(&iota)?.is_zero() {
        Some("iota leaves l1 = 0 = l2".to_string())
    } else if iota.cols() != kernel_dim {
        Some(format!("image has dim {} but the model has dim {kernel_dim}", iota.cols()))
    } else {
        None
    };
    out.push(Check::new("iota-bijection", iota_witness));

    let d = e.affctg_dims();
    let vd = e.afftg_dims();
    let y = random::vector(rng, d.n1);
    let cov: Vec<DoublePoint> = (0..d.n2)
        .map(|k| DoublePoint::new(y.clone(), Vector::basis(d.n2, k), Vector::zeros(d.n3)))
        .chain((0..d.n3).map(|a| DoublePoint::new(y.clone(), Vector::zeros(d.n2), Vector::basis(d.n3, a))))
        .collect();
    let tan: Vec<DoublePoint> = (0..vd.n2)
        .map(|a| DoublePoint::new(y.clone(), Vector::basis(vd.n2, a), Vector::zeros(vd.n3)))
        .chain((0..vd.n3).map(|k| DoublePoint::new(y.clone(), Vector::zeros(vd.n2), Vector::basis(vd.n3, k))))
        .collect();
    let mut gram = Matrix::zeros(cov.len(), tan.len());
    for (i, c) in cov.iter().enumerate() {
        for (j, t) in tan.iter().enumerate() {
            gram[(i, j)] = vertical_eval(d, t, c)?;
        }
    }
    out.push(Check::new(
        "afftg-pairing",
        (!signed_permutation(&gram)).then(|| format!("Gram matrix is not a signed permutation: {gram}")),
    ));

    if let Some(omega) = omega {
        let dual = e.phase_dual(omega)?;
        let v_pos = e.side2_indices().iter().position(|&i| i == e.v_idx).expect("v kept");
        let mut w = None;
        if dual.l2() != omega {
            w = Some(format!("side base is cut by {} instead of omega", dual.l2()));
        } else if dual.sigma() != Some(&indicator(d.n2, v_pos)) {
            w = Some("core section of the vertical dual is not v_A".into());
        } else if let Some(f) = adjoint_duality_check(&phase_s, rng, trials.min(10))? {
            w = Some(f);
        }
        out.push(Check::new("phase-duals", w));
    }

    out.push(Check::new(
        "contact-pairs",
        first_failure(trials, |_| {
            let c = e.random_contact(rng);
            let (a, f) = e.contact_to_pair(&c)?;
            let value = f.dot(&a)?;
            if !Ring::is_zero(&value) {
                return Ok(Some(format!("f(a) = {value} for {}", c.point)));
            }
            Ok(None)
        })?,
    ));

    out.push(Check::new(
        "tbar",
        first_failure(trials, |_| {
            let c = e.random_contact(rng);
            let inner = e.inner_indices();
            let y_inner: Vector = inner.iter().map(|&i| c.point.y[i].clone()).collect();
            let xdot = random::vector(rng, e.m);
            let ydot = random::vector(rng, inner.len());
            let (s, sdot, shift) = (random::rational(rng), random::rational(rng), random::rational(rng));
            let a = e.tbar_class(c.point.x.clone(), y_inner.clone(), &s, xdot.clone(), ydot.clone(), &sdot);
            let b = e.tbar_class(c.point.x.clone(), y_inner, &(&s + &shift), xdot, ydot, &(&sdot - &shift));
            if a != b {
                return Ok(Some("diagonal action changes the class".into()));
            }
            let base = e.contact_tbar_pairing(&c, &a)?;
            let bumped = e.contact_tbar_pairing(&c, &e.tbar_add_distinguished(&a))?;
            if bumped != &base + one() {
                return Ok(Some(format!("distinguished section pairs to {} instead of 1", bumped - base)));
            }
            let shifted_c = e.reduce(&e.chi(&zero(), &random::rational(rng), &c.point), Mask::CHI2)?;
            if e.contact_tbar_pairing(&shifted_c, &a)? != base {
                return Ok(Some("pairing depends on the contact representative".into()));
            }
            Ok(None)
        })?,
    ));
    Ok(out)
}

/// Checks of `τ`, `β` and `κ` in the normal form.
pub fn tau_kappa_checks(e: &TrivialBispecial, rng: &mut TrialRng, trials: usize) -> Result<Vec<Check>> {
    if !e.is_normal() {
        return Err(Error::Invalid("adapted bases are defined for the normal form".into()));
    }
    let dual = e.dual();
    let mut out = Vec::new();

    out.push(Check::new(
        "tau-adapted-basis",
        first_failure(trials, |_| {
            let basis = AdaptedBasis::random(rng, e.n);
            let c = e.random_contact(rng);
            let before = e.reduce(&basis.transform(&e.tau(&c)?.point)?, Mask::CHI1)?;
            let moved = e.reduce(&basis.transform(&c.point)?, Mask::CHI2)?;
            let after = e.tau(&moved)?;
            if before != after {
                return Ok(Some(format!("{} vs {} for {}", before.point, after.point, c.point)));
            }
            if !basis.tau_identity_holds()? {
                return Ok(Some(format!("symbolic identity fails for {}", basis.matrix())));
            }
            Ok(None)
        })?,
    ));

    out.push(Check::new(
        "beta-orbits",
        first_failure(trials, |_| {
            let w = e.random_bbl(rng);
            let b = e.beta(&w);
            if !dual.in_bbl(&b) {
                return Ok(Some(format!("image of {w} is off the dual constraints")));
            }
            let s = random::rational(rng);
            let t = random::rational(rng);
            if e.beta(&e.chi(&s, &zero(), &w)) != dual.chi(&zero(), &s, &b)
                || e.beta(&e.chi(&zero(), &t, &w)) != dual.chi(&t, &zero(), &b)
            {
                return Ok(Some(format!("orbits of {w} are not exchanged")));
            }
            Ok(None)
        })?,
    ));

    out.push(Check::new(
        "kappa",
        first_failure(trials, |_| {
            let c = e.random_contact(rng);
            let k = e.kappa(&c)?;
            if k.mask != Mask::CHI2 || !dual.in_bbl(&k.point) {
                return Ok(Some(format!("image of {} is not a dual contact element", c.point)));
            }
            let r = random::nonzero_rational(rng);
            let mut y = c.point.y.clone().into_inner();
            y[e.v_idx] += &r;
            let shifted = e.reduce(&CotangentPoint { y: Vector::new(y), ..c.point.clone() }, Mask::CHI2)?;
            let ks = e.kappa(&shifted)?;
            let expected = dual.reduce(&dual.chi(&-r.clone(), &zero(), &k.point), Mask::CHI2)?;
            if ks != expected {
                return Ok(Some(format!("shift by {r} maps to {} instead of the opposite shift", ks.point)));
            }
            let (ec, ek) = (e.decompose(&c)?, dual.decompose(&k)?);
            if ec.y != ek.z || ec.z != ek.y {
                return Ok(Some(format!("bases are not preserved for {}", c.point)));
            }
            let pc = e.beta_reduced(&e.reduce(&c.point, Mask::BOTH)?)?;
            if pc != dual.reduce(&k.point, Mask::BOTH)? {
                return Ok(Some("projection to the phase bundles does not commute".into()));
            }
            Ok(None)
        })?,
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::all_passed;
    use crate::exact::int;
    use crate::random::trial_rng;

    fn contact(e: &TrivialBispecial, y: &[i64], pi: &[i64]) -> ReducedCovector {
        let w = CotangentPoint::new(Vector::zeros(e.m), Vector::from_ints(y), Vector::zeros(e.m), Vector::from_ints(pi));
        e.reduce(&w, Mask::CHI2).unwrap()
    }

    #[test]
    fn chi_translates() {
        let e = TrivialBispecial::new(1, 1);
        let w = CotangentPoint::new(
            Vector::from_ints(&[0]),
            Vector::from_ints(&[1, 0, 1]),
            Vector::from_ints(&[0]),
            Vector::from_ints(&[0, 0, 2]),
        );
        let moved = e.chi(&int(3), &int(-2), &w);
        assert_eq!(moved.y[0], int(4));
        assert_eq!(moved.pi[2], int(0));
        assert_eq!(e.chi(&int(0), &int(0), &w), w);
    }

    #[test]
    fn tau_examples() {
        let e = TrivialBispecial::new(0, 1);
        let t = e.tau(&contact(&e, &[2, 3, 1], &[1, 5, 0])).unwrap();
        assert_eq!(t.point.y, Vector::from_ints(&[0, 3, 1]));
        assert_eq!(t.point.pi, Vector::from_ints(&[1, 5, -17]));
        let e0 = TrivialBispecial::new(0, 0);
        let t0 = e0.tau(&contact(&e0, &[7, 1], &[1, 0])).unwrap();
        assert_eq!(t0.point.pi, Vector::from_ints(&[1, -7]));
        assert!(e.tau(&contact(&e, &[2, 3, 2], &[1, 5, 0])).is_err());
    }

    #[test]
    fn kappa_lands_in_dual_contact() {
        let e = TrivialBispecial::new(0, 1);
        let k = e.kappa(&contact(&e, &[2, 3, 1], &[1, 5, 0])).unwrap();
        assert!(e.dual().in_bbl(&k.point));
        assert_eq!(k.point.y, Vector::from_ints(&[1, 5, -17]));
        assert_eq!(k.point.pi, Vector::from_ints(&[0, 3, 1]));
    }

    #[test]
    fn built_constraints() {
        let e = TrivialBispecial::new(2, 1);
        let bbl = e.build(PhaseSpace::Bbl, None).unwrap();
        assert_eq!(bbl.constraints, vec![("y2".to_string(), int(1)), ("pi0".to_string(), int(1))]);
        assert_eq!(bbl.hull.dims(), (3, 3, 2));
        let c = e.build(PhaseSpace::ContactC, None).unwrap();
        assert_eq!(c.core, vec!["p1", "p2", "y0"]);
        assert_eq!(c.structure.unwrap().sigma(), Some(&Vector::from_ints(&[0, 0, 1])));
        assert_eq!(e.build(PhaseSpace::PhaseP, Some(&Vector::from_ints(&[0, 0]))), Err(Error::ZeroForm));
    }

    #[test]
    fn phase_model_is_level_zero() {
        let e = TrivialBispecial::new(1, 2);
        let p = e.build(PhaseSpace::PhaseP, None).unwrap().structure.unwrap();
        let model = p.model_vv();
        let (l1, l2) = model.constraints();
        assert_eq!((l1, l2), (&Vector::from_ints(&[0, 0, 1]), &Vector::from_ints(&[1, 0, 0])));
    }

    #[test]
    fn towers_pass() {
        for (m, n) in [(1, 0), (1, 1), (2, 2), (2, 3)] {
            let e = TrivialBispecial::new(m, n);
            let mut rng = trial_rng(30, (m * 10 + n) as u64);
            let omega = random::nonzero_vector(&mut rng, m);
            let checks = phase_tower_checks(&e, Some(&omega), &mut rng, 10).unwrap();
            assert!(all_passed(&checks), "{checks:?}");
            let checks = tau_kappa_checks(&e, &mut rng, 10).unwrap();
            assert!(all_passed(&checks), "{checks:?}");
        }
    }
}
