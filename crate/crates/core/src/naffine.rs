//! `{0,1}ⁿ`-graded vector spaces over a point, n-affine level sets inside
//! them, and the (n+1)-affine dual `𝔹A ⊂ T*E`.
//!
//! Flat coordinates list the components in increasing bitstring order.
//! For `n = 2` the order is `(0,1), (1,0), (1,1)`, i.e. `y, z, c` of the
//! double module.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::affine::{special_dual, BispecialRep};
use crate::check::Check;
use crate::double::{
    adjoint_duality_check, special_dual_horizontal, special_dual_vertical, DecomposedDouble, DoubleAffine,
    DoubleMorphism,
};
use crate::error::{dim_mismatch, Error, Result};
use crate::exact::{one, Poly, Ring, Scalar, Vector};
use crate::random::{self, TrialRng};

pub type Degree = Vec<u8>;

pub fn degree_to_string(d: &[u8]) -> String {
    d.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
}

pub fn parse_degree(s: &str) -> Result<Degree> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Error::Invalid(format!("bitstring {s:?} contains {c:?}"))),
        })
        .collect()
}

fn unit_degree(n: usize, i: usize) -> Degree {
    (0..n).map(|k| u8::from(k == i)).collect()
}

fn leq(a: &[u32], b: &[u8]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x <= u32::from(*y))
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GradedSpace {
    n: usize,
    dims: BTreeMap<Degree, usize>,
}

impl GradedSpace {
    /// Components of dimension zero are dropped.
    pub fn new(n: usize, dims: BTreeMap<Degree, usize>) -> Result<Self> {
        for d in dims.keys() {
            if d.len() != n || d.iter().any(|b| *b > 1) {
                return Err(Error::Invalid(format!("degree {d:?} is not a bitstring of length {n}")));
            }
            if d.iter().all(|b| *b == 0) {
                return Err(Error::Invalid("the zero degree carries no fiber coordinates".into()));
            }
        }
        let dims = dims.into_iter().filter(|(_, k)| *k > 0).collect();
        Ok(GradedSpace { n, dims })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> &BTreeMap<Degree, usize> {
        &self.dims
    }

    pub fn dim(&self, d: &[u8]) -> usize {
        self.dims.get(d).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn offset(&self, d: &[u8]) -> Option<usize> {
        let mut off = 0;
        for (k, v) in &self.dims {
            if k.as_slice() == d {
                return Some(off);
            }
            off += v;
        }
        None
    }

    /// Degree of every flat coordinate.
    pub fn coordinate_degrees(&self) -> Vec<Degree> {
        self.dims
            .iter()
            .flat_map(|(d, k)| std::iter::repeat_n(d.clone(), *k))
            .collect()
    }

    pub fn core_degree(&self) -> Degree {
        vec![1; self.n]
    }

    pub fn core_dim(&self) -> usize {
        self.dim(&self.core_degree())
    }

    pub fn component<'a>(&self, x: &'a Vector, d: &[u8]) -> Option<&'a [Scalar]> {
        let off = self.offset(d)?;
        Some(&x.as_slice()[off..off + self.dim(d)])
    }

    /// Places per-component vectors into flat coordinates.
    pub fn embed(&self, parts: &[(Degree, Vector)]) -> Result<Vector> {
        let mut out = Vector::zeros(self.total_dim()).into_inner();
        for (d, v) in parts {
            let off = self.offset(d).ok_or_else(|| dim_mismatch(format!("no component {}", degree_to_string(d))))?;
            if v.len() != self.dim(d) {
                return Err(dim_mismatch(format!("component {} has dim {}", degree_to_string(d), self.dim(d))));
            }
            for (k, s) in v.iter().enumerate() {
                out[off + k] = s.clone();
            }
        }
        Ok(Vector::new(out))
    }

    /// `c + v`: core translation, which touches only the `1ⁿ` component.
    pub fn core_translate(&self, c: &Vector, v: &Vector) -> Result<Vector> {
        if c.len() != self.core_dim() || v.len() != self.total_dim() {
            return Err(dim_mismatch("core translation"));
        }
        let shift = self.embed(&[(self.core_degree(), c.clone())])?;
        v.try_add(&shift)
    }

    /// Projection onto the base `E_i` of the `i`-th side bundle
    /// (components with bit `i` equal to 0, other coordinates dropped).
    pub fn side_projection(&self, i: usize, v: &Vector) -> Vector {
        self.coordinate_degrees()
            .iter()
            .zip(v.iter())
            .filter(|(d, _)| d[i] == 0)
            .map(|(_, s)| s.clone())
            .collect()
    }

    pub fn random(rng: &mut TrialRng, n: usize, max_dim: usize) -> Self {
        let dims = (1u32..(1 << n))
            .map(|bits| {
                let d: Degree = (0..n).map(|k| ((bits >> (n - 1 - k)) & 1) as u8).collect();
                (d, random::dim(rng, 1, max_dim))
            })
            .collect();
        GradedSpace::new(n, dims).expect("valid degrees")
    }
}

impl fmt::Display for GradedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|(d, k)| format!("{}:{k}", degree_to_string(d))).collect();
        write!(f, "n={} {{{}}}", self.n, parts.join(", "))
    }
}

/// Multi-degree of a monomial under the grading of `space`.
fn monomial_degree(space: &[Degree], n: usize, mono: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32; n];
    for (var, e) in mono.iter().enumerate() {
        if *e == 0 {
            continue;
        }
        for (k, b) in space[var].iter().enumerate() {
            out[k] += u32::from(*b) * e;
        }
    }
    out
}

/// First violation of the degree bound by a polynomial map from `source`
/// to `target` (one polynomial per target coordinate, variables are the
/// flat source coordinates), or `None`.
pub fn filtration_violation(source: &GradedSpace, target: &GradedSpace, map: &[Poly]) -> Result<Option<String>> {
    if source.n != target.n {
        return Err(dim_mismatch("graded spaces of different order"));
    }
    if map.len() != target.total_dim() {
        return Err(dim_mismatch("one polynomial per target coordinate is required"));
    }
    let src = source.coordinate_degrees();
    if map.iter().any(|p| p.num_vars() > src.len()) {
        return Err(dim_mismatch("polynomial uses a variable outside the source"));
    }
    for (k, (mu, p)) in target.coordinate_degrees().iter().zip(map).enumerate() {
        for (mono, _) in p.terms() {
            let deg = monomial_degree(&src, source.n, mono);
            if !leq(&deg, mu) {
                let d: Vec<String> = deg.iter().map(u32::to_string).collect();
                return Ok(Some(format!(
                    "coordinate {k} of degree {} has a term of degree ({})",
                    degree_to_string(mu),
                    d.join(",")
                )));
            }
        }
    }
    Ok(None)
}

pub fn filtration_check(source: &GradedSpace, target: &GradedSpace, map: &[Poly]) -> Result<bool> {
    Ok(filtration_violation(source, target, map)?.is_none())
}

/// `g ∘ f` for polynomial maps given coordinatewise.
pub fn compose_maps(f: &[Poly], g: &[Poly]) -> Result<Vec<Poly>> {
    g.iter().map(|p| p.compose(f)).collect()
}

/// A [`DoubleMorphism`] as a polynomial map on the order-2 graded space
/// `y, z, c`.
pub fn double_morphism_polys(m: &DoubleMorphism) -> Vec<Poly> {
    let s = m.source();
    let y: Vec<Poly> = (0..s.n1).map(Poly::var).collect();
    let z: Vec<Poly> = (0..s.n2).map(|b| Poly::var(s.n1 + b)).collect();
    let c: Vec<Poly> = (0..s.n3).map(|u| Poly::var(s.n1 + s.n2 + u)).collect();
    let cst = |v: &Scalar| Poly::constant(v.clone());
    let t = m.target();
    let mut out = Vec::new();
    for j in 0..t.n1 {
        let mut p = cst(&m.alpha0[j]);
        for (i, yi) in y.iter().enumerate() {
            p = p.add(&cst(&m.alpha[(j, i)]).mul(yi));
        }
        out.push(p);
    }
    for a in 0..t.n2 {
        let mut p = cst(&m.beta0[a]);
        for (b, zb) in z.iter().enumerate() {
            p = p.add(&cst(&m.beta[(a, b)]).mul(zb));
        }
        out.push(p);
    }
    for u in 0..t.n3 {
        let mut p = cst(&m.gamma00[u]);
        for (i, yi) in y.iter().enumerate() {
            p = p.add(&cst(&m.gamma_y[(u, i)]).mul(yi));
            for (b, zb) in z.iter().enumerate() {
                p = p.add(&cst(m.gamma_yz.get(u, i, b)).mul(&yi.mul(zb)));
            }
        }
        for (b, zb) in z.iter().enumerate() {
            p = p.add(&cst(&m.gamma_z[(u, b)]).mul(zb));
        }
        for (w, cw) in c.iter().enumerate() {
            p = p.add(&cst(&m.sigma[(u, w)]).mul(cw));
        }
        out.push(p);
    }
    out
}

/// Random map `space → space` obeying the degree bound: constants, linear
/// terms and products of two coordinates whose degrees fit.
pub fn random_filtered_map(rng: &mut TrialRng, space: &GradedSpace) -> Vec<Poly> {
    let degs = space.coordinate_degrees();
    let n = space.n;
    degs.iter()
        .map(|mu| {
            let mut p = Poly::constant(random::rational(rng));
            for (k, dk) in degs.iter().enumerate() {
                if leq(&dk.iter().map(|b| u32::from(*b)).collect::<Vec<_>>(), mu) && random::small_int(rng, 0, 1) == one() {
                    p = p.add(&Poly::var(k).scale(&random::nonzero_rational(rng)));
                }
                for l in k..degs.len() {
                    let mut mono = vec![0u32; degs.len()];
                    mono[k] += 1;
                    mono[l] += 1;
                    if leq(&monomial_degree(&degs, n, &mono), mu) && random::small_int(rng, 0, 2) == one() {
                        p = p.add(&Poly::var(k).mul(&Poly::var(l)).scale(&random::nonzero_rational(rng)));
                    }
                }
            }
            p
        })
        .collect()
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct NAffine {
    space: GradedSpace,
    l: Vec<Vector>,
    sigma: Option<Vector>,
}

/// Side/core layout of a pair restriction: the degree and index of every
/// coordinate on side 1, side 2 and the core.
pub type PairLayout = [Vec<(Degree, usize)>; 3];

impl NAffine {
    /// `l[i]` lives on the component of degree `εᵢ`; `σ` on `1ⁿ`.
    pub fn new(space: GradedSpace, l: Vec<Vector>, sigma: Option<Vector>) -> Result<Self> {
        let n = space.n;
        if l.len() != n {
            return Err(dim_mismatch(format!("{n} functionals are required")));
        }
        for (i, li) in l.iter().enumerate() {
            let d = unit_degree(n, i);
            if space.dim(&d) == 0 {
                return Err(dim_mismatch(format!("no component of degree {} for l{}", degree_to_string(&d), i + 1)));
            }
            if li.len() != space.dim(&d) {
                return Err(dim_mismatch(format!("l{} has the wrong length", i + 1)));
            }
            if li.is_zero() {
                return Err(Error::ZeroFunctional);
            }
        }
        if let Some(s) = &sigma {
            if s.len() != space.core_dim() {
                return Err(dim_mismatch("sigma must live in the core component"));
            }
            if s.is_zero() {
                return Err(Error::Invalid("core section is zero".into()));
            }
        }
        Ok(NAffine { space, l, sigma })
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn functionals(&self) -> &[Vector] {
        &self.l
    }

    pub fn sigma(&self) -> Option<&Vector> {
        self.sigma.as_ref()
    }

    pub fn without_sigma(&self) -> NAffine {
        NAffine {
            sigma: None,
            ..self.clone()
        }
    }

    pub fn values(&self, x: &Vector) -> Result<Vec<Scalar>> {
        if x.len() != self.space.total_dim() {
            return Err(dim_mismatch("point of the wrong dimension"));
        }
        self.l
            .iter()
            .enumerate()
            .map(|(i, li)| {
                let comp = self.space.component(x, &unit_degree(self.space.n, i)).expect("component exists");
                li.dot(&Vector::new(comp.to_vec()))
            })
            .collect()
    }

    pub fn contains(&self, x: &Vector) -> Result<bool> {
        Ok(self.values(x)?.iter().all(|v| *v == one()))
    }

    pub fn random_point(&self, rng: &mut TrialRng) -> Vector {
        let n = self.space.n;
        let parts: Vec<(Degree, Vector)> = self
            .space
            .dims
            .iter()
            .map(|(d, k)| {
                let v = match (0..n).find(|&i| *d == unit_degree(n, i)) {
                    Some(i) => DoubleAffine::random_level_point(rng, &self.l[i]),
                    None => random::vector(rng, *k),
                };
                (d.clone(), v)
            })
            .collect();
        self.space.embed(&parts).expect("layout from the space itself")
    }

    pub fn random(rng: &mut TrialRng, space: GradedSpace, special: bool) -> Self {
        let n = space.n;
        let l = (0..n)
            .map(|i| random::nonzero_vector(rng, space.dim(&unit_degree(n, i))))
            .collect();
        let sigma = special.then(|| random::nonzero_vector(rng, space.core_dim()));
        NAffine::new(space, l, sigma).expect("random data is valid")
    }

    /// The special double affine space `(A, aff_i, aff_j)` over a point of
    /// the remaining base: side 1 has bit `i` = 0 and bit `j` = 1 and is cut
    /// by `l_j`; side 2 is the mirror image, cut by `l_i`; the core has both
    /// bits set and carries `σ` on `1ⁿ`.
    pub fn restrict_pair(&self, i: usize, j: usize) -> Result<(DoubleAffine, PairLayout)> {
        let n = self.space.n;
        if i == j || i >= n || j >= n {
            return Err(Error::Invalid(format!("pair ({i}, {j}) is not a pair of distinct structures")));
        }
        let mut layout: PairLayout = [vec![], vec![], vec![]];
        for (d, k) in &self.space.dims {
            let slot = match (d[i], d[j]) {
                (0, 1) => 0,
                (1, 0) => 1,
                (1, 1) => 2,
                _ => continue,
            };
            layout[slot].extend((0..*k).map(|c| (d.clone(), c)));
        }
        let coeffs = |slot: usize, target: &Degree, v: Option<&Vector>| -> Vector {
            layout[slot]
                .iter()
                .map(|(d, c)| match v {
                    Some(v) if d == target => v[*c].clone(),
                    _ => Scalar::from_integer(0.into()),
                })
                .collect()
        };
        let l1 = coeffs(0, &unit_degree(n, j), Some(&self.l[j]));
        let l2 = coeffs(1, &unit_degree(n, i), Some(&self.l[i]));
        let sigma = self.sigma.as_ref().map(|s| coeffs(2, &self.space.core_degree(), Some(s)));
        let dims = DecomposedDouble::new(layout[0].len(), layout[1].len(), layout[2].len());
        Ok((DoubleAffine::new(dims, l1, l2, sigma)?, layout))
    }

    pub fn to_double(&self) -> Result<DoubleAffine> {
        if self.space.n != 2 {
            return Err(Error::Invalid("only order 2 has a double form".into()));
        }
        Ok(self.restrict_pair(0, 1)?.0)
    }
}

impl fmt::Display for NAffine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.space)?;
        for (i, l) in self.l.iter().enumerate() {
            write!(f, " l{}={l}", i + 1)?;
        }
        if let Some(s) = &self.sigma {
            write!(f, " sigma={s}")?;
        }
        Ok(())
    }
}

/// `𝔹A ⊂ T*E`. A position coordinate of degree `α` keeps degree `(α, 0)`;
/// its momentum gets `1ⁿ⁺¹ − (α, 0)`. The new functional `l_{n+1}` is `σ`
/// read on the momenta of the core.
pub fn bbl_n(a: &NAffine) -> Result<NAffine> {
    let sigma = a.sigma.as_ref().ok_or(Error::NotSpecial)?;
    let n = a.space.n;
    let mut dims = BTreeMap::new();
    for (d, k) in &a.space.dims {
        let mut pos = d.clone();
        pos.push(0);
        let mut mom: Degree = d.iter().map(|b| 1 - b).collect();
        mom.push(1);
        dims.insert(pos, *k);
        dims.insert(mom, *k);
    }
    let space = GradedSpace::new(n + 1, dims)?;
    let mut l = a.l.clone();
    l.push(sigma.clone());
    NAffine::new(space, l, None)
}

/// Bases of the side bundles of an n-affine space: for each `i`, the
/// components with bit `i` = 0 (bit removed) cut by the other functionals.
pub fn side_bases(b: &NAffine) -> Result<Vec<NAffine>> {
    let n = b.space.n;
    if n == 0 {
        return Ok(vec![]);
    }
    (0..n)
        .map(|i| {
            let dims: BTreeMap<Degree, usize> = b
                .space
                .dims
                .iter()
                .filter(|(d, _)| d[i] == 0)
                .map(|(d, k)| (remove_bit(d, i), *k))
                .filter(|(d, _)| d.contains(&1))
                .collect();
            let l = (0..n).filter(|&j| j != i).map(|j| b.l[j].clone()).collect();
            NAffine::new(GradedSpace::new(n - 1, dims)?, l, None)
        })
        .collect()
}

fn remove_bit(d: &[u8], i: usize) -> Degree {
    d.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, b)| *b).collect()
}

fn insert_bit(d: &[u8], i: usize, bit: u8) -> Degree {
    let mut out = d.to_vec();
    out.insert(i, bit);
    out
}

/// Coordinate of `T*E` named by the degree of its position coordinate in `E`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Label {
    Position(Degree, usize),
    Momentum(Degree, usize),
}

/// Label of a coordinate of the `i`-th side base of `𝔹A`.
fn side_base_label(i: usize, d: &[u8], k: usize) -> Label {
    let full = insert_bit(d, i, 0);
    let (head, last) = full.split_at(full.len() - 1);
    if last[0] == 0 {
        Label::Position(head.to_vec(), k)
    } else {
        Label::Momentum(head.iter().map(|b| 1 - b).collect(), k)
    }
}

type Side = BTreeMap<Label, Scalar>;

fn labelled(labels: impl Iterator<Item = Label>, values: &Vector) -> Side {
    labels.zip(values.iter().cloned()).collect()
}

/// `(side 1 with l₁, side 2 with l₂, core labels)` of a double affine
/// space with labelled coordinates.
type LabelledDouble = (Side, Side, BTreeSet<Label>);

/// Runs the n-affine duality checks on a special `A`: the side bases of
/// `𝔹A` are `A` and the special duals over each `A_i`, and each pair
/// restriction matches the double duals and passes the adjoint-duality
/// check.
pub fn side_duality_checks(a: &NAffine, rng: &mut TrialRng, trials: usize) -> Result<Vec<Check>> {
    let n = a.space.n;
    let b = bbl_n(a)?;
    let bases = side_bases(&b)?;
    let mut out = Vec::new();

    let mut w = None;
    for (d, k) in &b.space.dims {
        let partner: Degree = d.iter().map(|x| 1 - x).collect();
        if b.space.dim(&partner) != *k && d[..n].contains(&1) && partner[..n].contains(&1) {
            w = Some(format!("component {} has no conjugate of the same size", degree_to_string(d)));
        }
    }
    out.push(Check::new("momentum-degrees", w));

    out.push(Check::new(
        "side-base-A",
        (bases[n] != a.without_sigma()).then(|| format!("last side base is {} instead of {}", bases[n], a)),
    ));

    let sigma = a.sigma.as_ref().ok_or(Error::NotSpecial)?;
    let mut w = None;
    for (i, base) in bases.iter().take(n).enumerate() {
        // Fiber of A → A_i as a special affine space, and its dual.
        let fiber: Vec<(Degree, usize)> = a.space.dims.iter().filter(|(d, _)| d[i] == 1).map(|(d, k)| (d.clone(), *k)).collect();
        let embed = |target: &Degree, v: &Vector| -> Vector {
            fiber
                .iter()
                .flat_map(|(d, k)| {
                    (0..*k).map(move |c| if d == target { v[c].clone() } else { Scalar::from_integer(0.into()) })
                })
                .collect()
        };
        let rep = BispecialRep::special(embed(&unit_degree(n, i), &a.l[i]), embed(&a.space.core_degree(), sigma))?;
        let dual = special_dual(&rep)?;
        // The functional of the base that lives on momenta.
        let last = base.l.len() - 1;
        let on_momenta = base
            .l
            .iter()
            .enumerate()
            .filter(|(j, _)| {
                let deg = unit_degree(n, *j);
                matches!(side_base_label(i, &deg, 0), Label::Momentum(..))
            })
            .count();
        let mut from_base = BTreeMap::new();
        let deg_last = unit_degree(n, last);
        for (d, k) in &base.space.dims {
            for c in 0..*k {
                if let Label::Momentum(alpha, idx) = side_base_label(i, d, c) {
                    let v = if *d == deg_last { base.l[last][c].clone() } else { Scalar::from_integer(0.into()) };
                    from_base.insert((alpha, idx), v);
                }
            }
        }
        let mut from_dual = BTreeMap::new();
        let mut pos = 0;
        for (d, k) in &fiber {
            for c in 0..*k {
                from_dual.insert((d.clone(), c), dual.alpha()[pos].clone());
                pos += 1;
            }
        }
        if on_momenta != 1 {
            w = Some(format!("side base {} is cut by {on_momenta} functionals on momenta", i + 1));
        } else if from_base != from_dual {
            w = Some(format!("side base {} is not the special dual over A_{}", i + 1, i + 1));
        }
        if w.is_some() {
            break;
        }
    }
    out.push(Check::new("side-base-duals", w));

    for i in 0..n {
        for j in (i + 1)..n {
            out.push(Check::new(format!("pair-{}{}", i + 1, j + 1), pair_check(a, &bases, i, j, rng, trials)?));
        }
    }
    Ok(out)
}

fn pair_check(a: &NAffine, bases: &[NAffine], i: usize, j: usize, rng: &mut TrialRng, trials: usize) -> Result<Option<String>> {
    let n = a.space.n;
    let (aij, layout) = a.restrict_pair(i, j)?;
    let pos = |slot: usize| layout[slot].iter().map(|(d, c)| Label::Position(d.clone(), *c)).collect::<Vec<_>>();
    let mom = |slot: usize| layout[slot].iter().map(|(d, c)| Label::Momentum(d.clone(), *c)).collect::<Vec<_>>();

    let v = special_dual_vertical(&aij)?;
    let expect_v: LabelledDouble = (
        labelled(pos(0).into_iter(), v.l1()),
        labelled(mom(2).into_iter(), v.l2()),
        mom(1).into_iter().collect(),
    );
    let h = special_dual_horizontal(&aij)?;
    let expect_h: LabelledDouble = (
        labelled(mom(2).into_iter(), h.l1()),
        labelled(pos(1).into_iter(), h.l2()),
        mom(0).into_iter().collect(),
    );

    let relabel = |base_idx: usize, other: usize| -> Result<LabelledDouble> {
        let shift = |k: usize| if k > base_idx { k - 1 } else { k };
        let (d, lay) = bases[base_idx].restrict_pair(shift(other), n - 1)?;
        let lab = |slot: usize| -> Vec<Label> {
            lay[slot].iter().map(|(deg, c)| side_base_label(base_idx, deg, *c)).collect()
        };
        Ok((labelled(lab(0).into_iter(), d.l1()), labelled(lab(1).into_iter(), d.l2()), lab(2).into_iter().collect()))
    };
    // B_i restricted to (aff_j, aff_{n+1}) is the flip of A_ij^V.
    let (s1, s2, core) = relabel(i, j)?;
    let got_v = (s2, s1, core);
    if got_v != expect_v {
        return Ok(Some(format!("side base {} does not match the vertical dual", i + 1)));
    }
    let got_h = relabel(j, i)?;
    if got_h != expect_h {
        return Ok(Some(format!("side base {} does not match the horizontal dual", j + 1)));
    }
    adjoint_duality_check(&aij, rng, trials)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::all_passed;
    use crate::phase::{PhaseSpace, TrivialBispecial};
    use crate::random::trial_rng;

    fn space(n: usize, parts: &[(&str, usize)]) -> GradedSpace {
        GradedSpace::new(n, parts.iter().map(|(d, k)| (parse_degree(d).unwrap(), *k)).collect()).unwrap()
    }

    fn ints(v: &[i64]) -> Vector {
        Vector::from_ints(v)
    }

    #[test]
    fn identity_and_bad_term() {
        let s = space(2, &[("01", 1), ("10", 1), ("11", 1)]);
        let id: Vec<Poly> = (0..3).map(Poly::var).collect();
        assert!(filtration_check(&s, &s, &id).unwrap());
        let mut bad = id.clone();
        bad[2] = Poly::var(0).pow(2);
        let w = filtration_violation(&s, &s, &bad).unwrap().unwrap();
        assert!(w.contains("(0,2)"), "{w}");
    }

    #[test]
    fn double_morphisms_are_filtered() {
        let mut rng = trial_rng(40, 0);
        let d = DecomposedDouble::new(2, 1, 2);
        let m = DoubleMorphism::random(&mut rng, d, true);
        let s = space(2, &[("01", 2), ("10", 1), ("11", 2)]);
        let polys = double_morphism_polys(&m);
        assert!(filtration_check(&s, &s, &polys).unwrap());
        let p = d.random_point(&mut rng);
        let values: Vec<Scalar> = polys.iter().map(|q| q.eval(p.flat().as_slice()).unwrap()).collect();
        assert_eq!(Vector::new(values), m.apply(&p).unwrap().flat());
    }

    #[test]
    fn composition_stays_filtered() {
        let mut rng = trial_rng(40, 1);
        for n in 1..=3 {
            let s = GradedSpace::random(&mut rng, n, 2);
            let f = random_filtered_map(&mut rng, &s);
            let g = random_filtered_map(&mut rng, &s);
            assert!(filtration_check(&s, &s, &f).unwrap());
            assert!(filtration_check(&s, &s, &compose_maps(&f, &g).unwrap()).unwrap());
        }
    }

    #[test]
    fn core_action() {
        let s = space(2, &[("01", 1), ("10", 1), ("11", 1)]);
        assert_eq!(s.core_dim(), 1);
        let a = NAffine::new(s.clone(), vec![ints(&[2]), ints(&[3])], Some(ints(&[1]))).unwrap();
        let x = a.space().embed(&[(vec![0, 1], ints(&[0])), (vec![1, 0], ints(&[0])), (vec![1, 1], ints(&[5]))]).unwrap();
        let mut rng = trial_rng(40, 2);
        let p = a.random_point(&mut rng);
        assert!(a.contains(&p).unwrap());
        let moved = s.core_translate(&ints(&[7]), &p).unwrap();
        assert_eq!(a.values(&moved).unwrap(), a.values(&p).unwrap());
        for i in 0..2 {
            assert_eq!(s.side_projection(i, &moved), s.side_projection(i, &p));
        }
        assert!(!a.contains(&x).unwrap());
    }

    #[test]
    fn order_one_core_is_the_fiber() {
        let s = space(1, &[("1", 3)]);
        assert_eq!(s.core_dim(), 3);
        let a = NAffine::new(s.clone(), vec![ints(&[0, 0, 1])], Some(ints(&[1, 0, 0]))).unwrap();
        let p = a.space().embed(&[(vec![1], ints(&[4, 2, 1]))]).unwrap();
        let moved = s.core_translate(&ints(&[-1, 3, 0]), &p).unwrap();
        assert!(a.contains(&moved).unwrap());
    }

    #[test]
    fn order_one_matches_phase_and_affine_duality() {
        let n = 2;
        let nf = n + 2;
        let s = space(1, &[("1", nf)]);
        let alpha = Vector::basis(nf, nf - 1);
        let v = Vector::basis(nf, 0);
        let a = NAffine::new(s, vec![alpha.clone()], Some(v.clone())).unwrap();
        let b = bbl_n(&a).unwrap();
        let phase = TrivialBispecial::new(0, n).build(PhaseSpace::Bbl, None).unwrap().structure.unwrap();
        assert_eq!(b.to_double().unwrap().flip(), phase);
        let bases = side_bases(&b).unwrap();
        let dual = special_dual(&BispecialRep::special(alpha, v).unwrap()).unwrap();
        assert_eq!(&bases[0].functionals()[0], dual.alpha());
        assert_eq!(bases[1], a.without_sigma());
    }

    #[test]
    fn order_two_bbl_degrees() {
        let s = space(2, &[("01", 1), ("10", 2), ("11", 1)]);
        let a = NAffine::new(s, vec![ints(&[1, 1]), ints(&[1])], Some(ints(&[2]))).unwrap();
        let b = bbl_n(&a).unwrap();
        assert_eq!(b.space().dim(&[0, 0, 1]), 1);
        assert_eq!(b.space().dim(&[1, 0, 1]), 1);
        assert_eq!(b.space().dim(&[0, 1, 1]), 2);
        assert_eq!(b.functionals()[2], ints(&[2]));
        assert_eq!(side_bases(&b).unwrap().len(), 3);
        assert_eq!(bbl_n(&a.without_sigma()), Err(Error::NotSpecial));
    }

    #[test]
    fn side_duality_on_random_instances() {
        for n in 2..=3 {
            for t in 0..3 {
                let mut rng = trial_rng(41, (n * 10 + t) as u64);
                let s = GradedSpace::random(&mut rng, n, 2);
                let a = NAffine::random(&mut rng, s, true);
                let checks = side_duality_checks(&a, &mut rng, 3).unwrap();
                assert!(all_passed(&checks), "{a}: {checks:?}");
                assert_eq!(checks.len(), 3 + n * (n - 1) / 2);
            }
        }
    }
}
