//! Atlases of double affine bundles over formal polynomial charts.
//!
//! A transition `t_ab` sends chart-`a` coordinates to chart-`b`
//! coordinates: `x_b = P·x_a + q` on the base, and a [`DoubleMorphism`]
//! with polynomial coefficients in `x_a` on the fibers.

use std::collections::BTreeMap;

use crate::double::{DecomposedDouble, DoubleMorphism};
use crate::error::{dim_mismatch, Error, Result};
use crate::exact::{BaseMap, Bilinear, Matrix, Poly, Ring, Scalar, Vector};
use crate::random::{self, TrialRng};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TransitionData {
    pub base_map: BaseMap,
    pub fiber: DoubleMorphism<Poly>,
}

/// Inverse of a polynomial matrix whose determinant is a nonzero constant.
pub fn poly_matrix_inverse(m: &Matrix<Poly>) -> Result<Matrix<Poly>> {
    let det = m.det_expand()?;
    let Some(c) = det.constant_value().filter(|c| !Ring::is_zero(c)) else {
        return Err(Error::NonPolynomialInverse(det.to_string()));
    };
    let inv = Scalar::from_integer(1.into()) / c;
    Ok(m.adjugate()?.map(|p| p.scale(&inv)))
}

impl TransitionData {
    pub fn new(base_map: BaseMap, fiber: DoubleMorphism<Poly>) -> Result<Self> {
        fiber.validate()?;
        let m = base_map.dim();
        let bad = std::cell::Cell::new(false);
        fiber.map_coeffs(|p| {
            bad.set(bad.get() || p.num_vars() > m);
            Ok(p.clone())
        })?;
        if bad.get() {
            return Err(dim_mismatch(format!("coefficient uses a variable beyond x{m}")));
        }
        Ok(TransitionData { base_map, fiber })
    }

    pub fn identity(m: usize, d: DecomposedDouble) -> Self {
        TransitionData {
            base_map: BaseMap::identity(m),
            fiber: DoubleMorphism::identity(d),
        }
    }

    pub fn dims(&self) -> DecomposedDouble {
        self.fiber.source()
    }

    /// Fiber map frozen at a base point (in source coordinates).
    pub fn eval_at(&self, x: &[Scalar]) -> Result<DoubleMorphism> {
        self.fiber.map_coeffs(|p| p.eval(x))
    }

    /// Checks that the three linear blocks are invertible at `x`.
    pub fn invertible_at(&self, x: &[Scalar]) -> Result<bool> {
        let f = self.eval_at(x)?;
        let ok = [&f.alpha, &f.beta, &f.sigma]
            .into_iter()
            .all(|m| !Ring::is_zero(&m.det().expect("square")));
        Ok(ok)
    }

    /// `t_bc ∘ t_ab`: the coefficients of `t_bc` are pulled back to chart `a`.
    pub fn compose(&self, next: &TransitionData) -> Result<TransitionData> {
        if self.base_map.dim() != next.base_map.dim() {
            return Err(dim_mismatch("base dimensions differ"));
        }
        let subst = self.base_map.as_polys();
        let pulled = next.fiber.map_coeffs(|p| p.compose(&subst))?;
        Ok(TransitionData {
            base_map: self.base_map.then(&next.base_map)?,
            fiber: self.fiber.then(&pulled)?,
        })
    }

    /// Formal inverse. Requires constant nonzero determinants on the three
    /// linear blocks so that the inverse stays polynomial.
    pub fn inverse(&self) -> Result<TransitionData> {
        let inv_base = self.base_map.inverse()?;
        let back = inv_base.as_polys();
        let fiber = self
            .fiber
            .inverse_with(poly_matrix_inverse)?
            .map_coeffs(|p| p.compose(&back))?;
        Ok(TransitionData {
            base_map: inv_base,
            fiber,
        })
    }

    /// `y' = α y`, `z' = β z`, `c' = Γ(y, z) + σ c`.
    pub fn induce_model(&self) -> TransitionData {
        TransitionData {
            base_map: self.base_map.clone(),
            fiber: self.fiber.linear_part(),
        }
    }

    /// Transition of the double vector hull on `(t, ŷ)`, `(s, ẑ)`, `ĉ`:
    /// the blocks gain a leading row/column for `t` and `s`, which are
    /// preserved, and the core keeps its dimension.
    pub fn induce_hull(&self) -> TransitionData {
        let f = &self.fiber;
        let DecomposedDouble { n1, n2, n3 } = f.source();
        let bordered = |lin: &Matrix<Poly>, shift: &Vector<Poly>| {
            Matrix::from_fn(lin.rows() + 1, lin.cols() + 1, |i, j| match (i, j) {
                (0, 0) => Poly::one(),
                (0, _) => Poly::zero(),
                (_, 0) => shift[i - 1].clone(),
                _ => lin[(i - 1, j - 1)].clone(),
            })
        };
        let gamma = Bilinear::from_fn(n3, n1 + 1, n2 + 1, |u, i, b| match (i, b) {
            (0, 0) => f.gamma00[u].clone(),
            (_, 0) => f.gamma_y[(u, i - 1)].clone(),
            (0, _) => f.gamma_z[(u, b - 1)].clone(),
            _ => f.gamma_yz.get(u, i - 1, b - 1).clone(),
        });
        let fiber = DoubleMorphism::linear(
            bordered(&f.alpha, &f.alpha0),
            bordered(&f.beta, &f.beta0),
            gamma,
            f.sigma.clone(),
        )
        .expect("bordered blocks agree");
        TransitionData {
            base_map: self.base_map.clone(),
            fiber,
        }
    }

    /// Substitutes constants for the hull coordinates `t` (side 1) and `s`
    /// (side 2) of a hull transition, returning a transition on the original
    /// fiber dims.
    pub fn restrict_hull(&self, s: &Scalar, t: &Scalar) -> Result<TransitionData> {
        let f = &self.fiber;
        let src = f.source();
        if src.n1 < 1 || src.n2 < 1 {
            return Err(dim_mismatch("not a hull transition"));
        }
        let (n1, n2, n3) = (src.n1 - 1, src.n2 - 1, src.n3);
        let tp = Poly::constant(t.clone());
        let sp = Poly::constant(s.clone());
        let st = Poly::constant(s * t);
        let fiber = DoubleMorphism {
            alpha0: (0..n1).map(|j| f.alpha[(j + 1, 0)].mul(&tp)).collect(),
            alpha: f.alpha.block(1, 1, n1, n1),
            beta0: (0..n2).map(|a| f.beta[(a + 1, 0)].mul(&sp)).collect(),
            beta: f.beta.block(1, 1, n2, n2),
            gamma00: (0..n3).map(|u| f.gamma_yz.get(u, 0, 0).mul(&st)).collect(),
            gamma_y: Matrix::from_fn(n3, n1, |u, i| f.gamma_yz.get(u, i + 1, 0).mul(&sp)),
            gamma_z: Matrix::from_fn(n3, n2, |u, b| f.gamma_yz.get(u, 0, b + 1).mul(&tp)),
            gamma_yz: Bilinear::from_fn(n3, n1, n2, |u, i, b| f.gamma_yz.get(u, i + 1, b + 1).clone()),
            sigma: f.sigma.clone(),
        };
        Ok(TransitionData {
            base_map: self.base_map.clone(),
            fiber,
        })
    }

    /// Linearization of one of the two affine structures. Linearizing along
    /// side 1 (the structure whose fibers have fixed `y`) drops `β₀`, `γ₀₀`
    /// and `γ_y`; along side 2 it drops `α₀`, `γ₀₀` and `γ_z`.
    pub fn linearize_along(&self, side: Side) -> TransitionData {
        let mut f = self.fiber.clone();
        let t = f.target();
        let s = f.source();
        f.gamma00 = Vector::zeros(t.n3);
        match side {
            Side::One => {
                f.beta0 = Vector::zeros(t.n2);
                f.gamma_y = Matrix::zeros(t.n3, s.n1);
            }
            Side::Two => {
                f.alpha0 = Vector::zeros(t.n1);
                f.gamma_z = Matrix::zeros(t.n3, s.n2);
            }
        }
        TransitionData {
            base_map: self.base_map.clone(),
            fiber: f,
        }
    }

    pub fn first_difference(&self, other: &TransitionData) -> Option<String> {
        if self.base_map != other.base_map {
            return Some("base map differs".into());
        }
        self.fiber.first_difference(&other.fiber)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    One,
    Two,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Edge {
    pub data: TransitionData,
    /// Base points (source coordinates) where the blocks must be invertible.
    pub samples: Vec<Vector>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Atlas {
    base_dim: usize,
    dims: DecomposedDouble,
    charts: Vec<String>,
    edges: BTreeMap<(usize, usize), Edge>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CocycleFailure {
    pub charts: (String, String, String),
    pub witness: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CocycleReport {
    pub triangles: usize,
    pub failures: Vec<CocycleFailure>,
    /// Edges whose blocks are singular at a declared sample point.
    pub singular_samples: Vec<String>,
}

impl CocycleReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.singular_samples.is_empty()
    }
}

impl Atlas {
    pub fn new(base_dim: usize, dims: DecomposedDouble, charts: Vec<String>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for c in &charts {
            if !seen.insert(c) {
                return Err(Error::Invalid(format!("duplicate chart {c}")));
            }
        }
        Ok(Atlas {
            base_dim,
            dims,
            charts,
            edges: BTreeMap::new(),
        })
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn dims(&self) -> DecomposedDouble {
        self.dims
    }

    pub fn charts(&self) -> &[String] {
        &self.charts
    }

    pub fn chart_index(&self, name: &str) -> Result<usize> {
        self.charts
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Invalid(format!("unknown chart {name}")))
    }

    pub fn edges(&self) -> impl Iterator<Item = (&(usize, usize), &Edge)> {
        self.edges.iter()
    }

    pub fn edge(&self, from: usize, to: usize) -> Option<&Edge> {
        self.edges.get(&(from, to))
    }

    pub fn insert(&mut self, from: &str, to: &str, data: TransitionData, samples: Vec<Vector>) -> Result<()> {
        let a = self.chart_index(from)?;
        let b = self.chart_index(to)?;
        if data.dims() != self.dims || data.fiber.target() != self.dims {
            return Err(dim_mismatch(format!("edge {from}->{to} does not act on fibers {}", self.dims)));
        }
        if data.base_map.dim() != self.base_dim {
            return Err(dim_mismatch(format!("edge {from}->{to} has the wrong base dimension")));
        }
        if samples.iter().any(|s| s.len() != self.base_dim) {
            return Err(dim_mismatch(format!("edge {from}->{to} has a sample of the wrong length")));
        }
        if self.edges.insert((a, b), Edge { data, samples }).is_some() {
            return Err(Error::Invalid(format!("duplicate edge {from}->{to}")));
        }
        Ok(())
    }

    fn transition(&self, a: usize, b: usize) -> Option<TransitionData> {
        if a == b {
            return Some(
                self.edges
                    .get(&(a, a))
                    .map(|e| e.data.clone())
                    .unwrap_or_else(|| TransitionData::identity(self.base_dim, self.dims)),
            );
        }
        self.edges.get(&(a, b)).map(|e| e.data.clone())
    }

    /// Applies `f` to every transition, keeping charts and samples.
    pub fn map_transitions(&self, f: impl Fn(&TransitionData) -> TransitionData) -> Atlas {
        let edges: BTreeMap<_, _> = self
            .edges
            .iter()
            .map(|(k, e)| {
                (
                    *k,
                    Edge {
                        data: f(&e.data),
                        samples: e.samples.clone(),
                    },
                )
            })
            .collect();
        let dims = edges.values().next().map_or(self.dims, |e| e.data.dims());
        Atlas {
            base_dim: self.base_dim,
            dims,
            charts: self.charts.clone(),
            edges,
        }
    }

    pub fn induce_model(&self) -> Atlas {
        self.map_transitions(TransitionData::induce_model)
    }

    pub fn induce_hull(&self) -> Atlas {
        let mut a = self.map_transitions(TransitionData::induce_hull);
        a.dims = DecomposedDouble::new(self.dims.n1 + 1, self.dims.n2 + 1, self.dims.n3);
        a
    }
}

/// Checks `t_bc ∘ t_ab = t_ac` for every triangle with `a ≠ b ≠ c`
/// (`c = a` compares against the identity), self-edges against the
/// identity, and invertibility at every declared sample.
pub fn cocycle_check(atlas: &Atlas) -> CocycleReport {
    let mut report = CocycleReport::default();
    let n = atlas.charts.len();
    let name = |i: usize| atlas.charts[i].clone();
    for (&(a, b), e) in &atlas.edges {
        for s in &e.samples {
            match e.data.invertible_at(s.as_slice()) {
                Ok(true) => {}
                _ => report
                    .singular_samples
                    .push(format!("{}->{} at x={}", name(a), name(b), s)),
            }
        }
        if a == b {
            report.triangles += 1;
            if let Some(w) = e.data.first_difference(&TransitionData::identity(atlas.base_dim, atlas.dims)) {
                report.failures.push(CocycleFailure {
                    charts: (name(a), name(a), name(a)),
                    witness: w,
                });
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let Some(ab) = atlas.transition(a, b) else { continue };
            for c in 0..n {
                if c == b {
                    continue;
                }
                let (Some(bc), Some(ac)) = (atlas.transition(b, c), atlas.transition(a, c)) else {
                    continue;
                };
                report.triangles += 1;
                let witness = match ab.compose(&bc) {
                    Ok(composed) => composed.first_difference(&ac),
                    Err(e) => Some(format!("composition failed: {e}")),
                };
                if let Some(w) = witness {
                    report.failures.push(CocycleFailure {
                        charts: (name(a), name(b), name(c)),
                        witness: w,
                    });
                }
            }
        }
    }
    report
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModelHullReport {
    pub model: CocycleReport,
    pub hull: CocycleReport,
    /// Edges where linearizing in the two orders disagrees.
    pub order_mismatches: Vec<String>,
    /// Edges where the hull at `(1,1)` / `(0,0)` is not the original /
    /// model transition.
    pub specialization_mismatches: Vec<String>,
}

impl ModelHullReport {
    pub fn passed(&self) -> bool {
        self.model.passed()
            && self.hull.passed()
            && self.order_mismatches.is_empty()
            && self.specialization_mismatches.is_empty()
    }
}

pub fn check_atlas_model_hull(atlas: &Atlas) -> ModelHullReport {
    let mut order_mismatches = Vec::new();
    let mut specialization_mismatches = Vec::new();
    let one = Scalar::from_integer(1.into());
    let zero = Scalar::from_integer(0.into());
    for (&(a, b), e) in &atlas.edges {
        let label = format!("{}->{}", atlas.charts[a], atlas.charts[b]);
        let t = &e.data;
        let v12 = t.linearize_along(Side::One).linearize_along(Side::Two);
        let v21 = t.linearize_along(Side::Two).linearize_along(Side::One);
        if let Some(w) = v12.first_difference(&v21).or_else(|| v12.first_difference(&t.induce_model())) {
            order_mismatches.push(format!("{label}: {w}"));
        }
        let hull = t.induce_hull();
        let checks = [
            (hull.restrict_hull(&one, &one), t.clone(), "(s,t)=(1,1)"),
            (hull.restrict_hull(&zero, &zero), t.induce_model(), "(s,t)=(0,0)"),
        ];
        for (got, want, at) in checks {
            match got {
                Ok(g) => {
                    if let Some(w) = g.first_difference(&want) {
                        specialization_mismatches.push(format!("{label} at {at}: {w}"));
                    }
                }
                Err(err) => specialization_mismatches.push(format!("{label} at {at}: {err}")),
            }
        }
    }
    ModelHullReport {
        model: cocycle_check(&atlas.induce_model()),
        hull: cocycle_check(&atlas.induce_hull()),
        order_mismatches,
        specialization_mismatches,
    }
}

/// Random polynomial of total degree ≤ 1 in `m` variables.
fn random_affine_poly(rng: &mut TrialRng, m: usize) -> Poly {
    let coeffs: Vec<Scalar> = (0..m).map(|_| random::small_int(rng, -2, 2)).collect();
    Poly::linear(random::small_int(rng, -2, 2), &coeffs)
}

/// Lower unitriangular polynomial matrix times a unimodular constant
/// matrix: polynomial entries, constant determinant ±1.
fn random_poly_invertible(rng: &mut TrialRng, n: usize, m: usize) -> Matrix<Poly> {
    let l = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => Poly::one(),
        std::cmp::Ordering::Less => Poly::zero(),
        std::cmp::Ordering::Greater => Poly::zero(),
    });
    let mut l = l;
    for i in 0..n {
        for j in 0..i {
            l[(i, j)] = random_affine_poly(rng, m);
        }
    }
    let u = random::unimodular(rng, n).map(|s| Poly::constant(s.clone()));
    l.mul(&u).expect("square")
}

fn random_chart_map(rng: &mut TrialRng, m: usize, d: DecomposedDouble) -> TransitionData {
    let p = loop {
        let p = random::unimodular(rng, m);
        if !Ring::is_zero(&p.det().expect("square")) {
            break p;
        }
    };
    let q: Vector = (0..m).map(|_| random::small_int(rng, -2, 2)).collect();
    let base_map = BaseMap::new(p, q).expect("unimodular");
    let vec = |rng: &mut TrialRng, n: usize| -> Vector<Poly> { (0..n).map(|_| random_affine_poly(rng, m)).collect() };
    let mat = |rng: &mut TrialRng, r: usize, c: usize| -> Matrix<Poly> {
        let entries: Vec<Poly> = (0..r * c).map(|_| random_affine_poly(rng, m)).collect();
        Matrix::from_fn(r, c, |i, j| entries[i * c + j].clone())
    };
    let alpha0 = vec(rng, d.n1);
    let alpha = random_poly_invertible(rng, d.n1, m);
    let beta0 = vec(rng, d.n2);
    let beta = random_poly_invertible(rng, d.n2, m);
    let gamma00 = vec(rng, d.n3);
    let gamma_y = mat(rng, d.n3, d.n1);
    let gamma_z = mat(rng, d.n3, d.n2);
    let entries: Vec<Poly> = (0..d.n3 * d.n1 * d.n2).map(|_| random_affine_poly(rng, m)).collect();
    let gamma_yz = Bilinear::from_fn(d.n3, d.n1, d.n2, |u, i, b| entries[(u * d.n1 + i) * d.n2 + b].clone());
    let sigma = random_poly_invertible(rng, d.n3, m);
    TransitionData {
        base_map,
        fiber: DoubleMorphism {
            alpha0,
            alpha,
            beta0,
            beta,
            gamma00,
            gamma_y,
            gamma_z,
            gamma_yz,
            sigma,
        },
    }
}

/// Random atlas whose transitions are `g_b ∘ g_a⁻¹` for random chart maps
/// `g_a` out of a common reference chart, so the cocycle condition holds
/// by construction. All ordered edges between distinct charts are present.
pub fn random_atlas(rng: &mut TrialRng, charts: usize, m: usize, d: DecomposedDouble) -> Result<Atlas> {
    let names: Vec<String> = (0..charts).map(|i| format!("U{i}")).collect();
    let mut atlas = Atlas::new(m, d, names.clone())?;
    let gs: Vec<TransitionData> = (0..charts).map(|_| random_chart_map(rng, m, d)).collect();
    let invs: Vec<TransitionData> = gs.iter().map(TransitionData::inverse).collect::<Result<_>>()?;
    for a in 0..charts {
        for b in 0..charts {
            if a == b {
                continue;
            }
            let t = invs[a].compose(&gs[b])?;
            let samples = vec![Vector::zeros(m), random::vector(rng, m)];
            atlas.insert(&names[a], &names[b], t, samples)?;
        }
    }
    Ok(atlas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use crate::random::trial_rng;

    fn d() -> DecomposedDouble {
        DecomposedDouble::new(2, 1, 2)
    }

    #[test]
    fn identity_is_neutral() {
        let mut rng = trial_rng(21, 0);
        let t = random_chart_map(&mut rng, 2, d());
        let id = TransitionData::identity(2, d());
        assert_eq!(t.compose(&id).unwrap(), t);
        assert_eq!(id.compose(&t).unwrap(), t);
    }

    #[test]
    fn inverse_composes_to_identity() {
        let mut rng = trial_rng(21, 1);
        let t = random_chart_map(&mut rng, 2, d());
        let ti = t.inverse().unwrap();
        assert_eq!(t.compose(&ti).unwrap(), TransitionData::identity(2, d()));
        assert_eq!(ti.compose(&t).unwrap(), TransitionData::identity(2, d()));
    }

    #[test]
    fn composition_agrees_with_evaluation() {
        let mut rng = trial_rng(21, 2);
        let s = random_chart_map(&mut rng, 2, d());
        let t = random_chart_map(&mut rng, 2, d());
        let st = s.compose(&t).unwrap();
        let x = random::vector(&mut rng, 2);
        let p = d().random_point(&mut rng);
        let direct = t
            .eval_at(s.base_map.apply(&x).unwrap().as_slice())
            .unwrap()
            .apply(&s.eval_at(x.as_slice()).unwrap().apply(&p).unwrap())
            .unwrap();
        assert_eq!(st.eval_at(x.as_slice()).unwrap().apply(&p).unwrap(), direct);
    }

    #[test]
    fn hull_specializations() {
        let mut rng = trial_rng(21, 3);
        let t = random_chart_map(&mut rng, 1, d());
        let h = t.induce_hull();
        assert_eq!(h.dims().dims(), (3, 2, 2));
        assert_eq!(h.restrict_hull(&int(1), &int(1)).unwrap(), t);
        assert_eq!(h.restrict_hull(&int(0), &int(0)).unwrap(), t.induce_model());
    }

    #[test]
    fn non_constant_determinant_rejected() {
        let m = Matrix::from_fn(1, 1, |_, _| Poly::var(0));
        assert!(matches!(poly_matrix_inverse(&m), Err(Error::NonPolynomialInverse(_))));
    }

    #[test]
    fn single_chart_passes() {
        let a = Atlas::new(1, d(), vec!["U".into()]).unwrap();
        let r = cocycle_check(&a);
        assert!(r.passed());
        assert_eq!(r.triangles, 0);
    }

    #[test]
    fn perturbation_is_reported() {
        let mut rng = trial_rng(21, 4);
        let atlas = random_atlas(&mut rng, 3, 1, DecomposedDouble::new(1, 1, 1)).unwrap();
        assert!(cocycle_check(&atlas).passed());
        let mut bad = atlas.clone();
        let e = bad.edges.get_mut(&(0, 1)).unwrap();
        let g = e.data.fiber.gamma_yz.get(0, 0, 0).add(&Poly::one());
        e.data.fiber.gamma_yz.set(0, 0, 0, g);
        let r = cocycle_check(&bad);
        assert!(!r.passed());
        assert!(r.failures.iter().any(|f| f.witness.starts_with("gamma_yz[0][0][0]")), "{r:?}");
    }
}
