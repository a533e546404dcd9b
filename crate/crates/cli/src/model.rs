//! Lowering of parsed blocks to kernel objects, and back.

use std::collections::BTreeMap;

use daff_core::affine::BispecialRep;
use daff_core::atlas::{Atlas, TransitionData};
use daff_core::double::{DecomposedDouble, DoubleAffine, DoubleMorphism, LevelConstraint};
use daff_core::exact::{BaseMap, Bilinear, Matrix, Poly, Ring, Scalar, Vector};
use daff_core::naffine::{degree_to_string, parse_degree, GradedSpace, NAffine};
use daff_core::phase::TrivialBispecial;
use thiserror::Error;

use crate::lexer::Pos;
use crate::syntax::{self, spanned, Block, Diagnostic, Document, Entry, Expr, Field, Key, Spanned, Value};

/// Order of graded blocks accepted by the command line.
pub const MAX_GRADED_ORDER: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("parse error at {0}")]
    Parse(Diagnostic),
    #[error("{pos}: duplicate block name `{name}`")]
    DuplicateName { name: String, pos: Pos },
    #[error("{pos}: unresolved reference `{name}`")]
    UnresolvedReference { name: String, pos: Pos },
    #[error("{0}")]
    Invalid(Diagnostic),
}

impl DslError {
    pub fn pos(&self) -> Pos {
        match self {
            DslError::Parse(d) | DslError::Invalid(d) => d.pos,
            DslError::DuplicateName { pos, .. } | DslError::UnresolvedReference { pos, .. } => *pos,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Object {
    Space(BispecialRep),
    Double(DoubleAffine),
    LevelSet {
        dims: DecomposedDouble,
        equations: Vec<LevelConstraint>,
    },
    Atlas(Atlas),
    Special {
        bundle: TrivialBispecial,
        omega: Option<Vector>,
    },
    Graded(NAffine),
}

impl Object {
    pub fn kind(&self) -> &'static str {
        match self {
            Object::Space(_) => "space",
            Object::Double(_) => "double",
            Object::LevelSet { .. } => "levelset",
            Object::Atlas(_) => "atlas",
            Object::Special { .. } => "special_bundle",
            Object::Graded(_) => "graded",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Named {
    pub name: String,
    pub object: Object,
}

type LResult<T> = Result<T, DslError>;

fn invalid(pos: Pos, message: impl Into<String>) -> DslError {
    DslError::Invalid(Diagnostic {
        pos,
        message: message.into(),
        expected: vec![],
    })
}

fn kernel<T>(pos: Pos, what: &str, r: daff_core::Result<T>) -> LResult<T> {
    r.map_err(|e| invalid(pos, format!("{what}: {e}")))
}

struct Fields<'a> {
    block: &'a Block,
}

impl<'a> Fields<'a> {
    fn get(&self, key: &str) -> Option<&'a Field> {
        self.block.field(key)
    }

    fn require(&self, key: &str) -> LResult<&'a Field> {
        self.get(key).ok_or_else(|| {
            invalid(
                self.block.pos,
                format!("missing field `{key}` in {} block `{}`", self.block.kind, self.block.name),
            )
        })
    }

    fn usize(&self, key: &str) -> LResult<usize> {
        let f = self.require(key)?;
        as_usize(&f.value, key)
    }

    fn vector(&self, key: &str) -> LResult<Vector> {
        let f = self.require(key)?;
        as_vector(&f.value, key)
    }

    fn opt_vector(&self, key: &str) -> LResult<Option<Vector>> {
        self.get(key).map(|f| as_vector(&f.value, key)).transpose()
    }
}

fn as_number(v: &Spanned, key: &str) -> LResult<Scalar> {
    match &v.value {
        Value::Number(s) => Ok(s.clone()),
        _ => Err(invalid(v.pos, format!("field `{key}`: expected a rational number"))),
    }
}

fn as_usize(v: &Spanned, key: &str) -> LResult<usize> {
    let s = as_number(v, key)?;
    if !s.is_integer() || s < Ring::zero() {
        return Err(invalid(v.pos, format!("field `{key}`: expected a non-negative integer")));
    }
    s.to_integer()
        .try_into()
        .map_err(|_| invalid(v.pos, format!("field `{key}`: too large")))
}

fn as_list<'a>(v: &'a Spanned, key: &str) -> LResult<&'a [Spanned]> {
    match &v.value {
        Value::List(items) => Ok(items),
        _ => Err(invalid(v.pos, format!("field `{key}`: expected a list"))),
    }
}

fn as_vector(v: &Spanned, key: &str) -> LResult<Vector> {
    let items = as_list(v, key)?;
    if items.is_empty() {
        return Err(invalid(v.pos, format!("field `{key}`: empty vector")));
    }
    items.iter().map(|i| as_number(i, key)).collect()
}

fn as_matrix(v: &Spanned, key: &str, rows: usize, cols: usize) -> LResult<Matrix> {
    let m = as_poly_matrix(v, key, rows, cols, &[])?;
    Ok(m.map(|p| p.constant_value().unwrap_or_else(Ring::zero)))
}

fn as_ident(v: &Spanned, key: &str) -> LResult<String> {
    match &v.value {
        Value::Ident(s) => Ok(s.clone()),
        _ => Err(invalid(v.pos, format!("field `{key}`: expected a name"))),
    }
}

/// Polynomial over the named variables, each given as `(prefix, count,
/// offset)`: `x3` with `('x', m, 0)` becomes variable 2.
fn as_poly(v: &Spanned, key: &str, vars: &[(char, usize, usize)]) -> LResult<Poly> {
    match &v.value {
        Value::Number(s) => Ok(Poly::constant(s.clone())),
        Value::Poly(Expr { vars: names, poly }) => {
            let subst = names
                .iter()
                .map(|n| {
                    let (head, k) = syntax::split_var(n).expect("validated by the parser");
                    vars.iter()
                        .find(|(h, count, _)| *h == head && k <= *count)
                        .map(|(_, _, off)| Poly::var(off + k - 1))
                        .ok_or_else(|| invalid(v.pos, format!("field `{key}`: variable `{n}` is not available here")))
                })
                .collect::<LResult<Vec<_>>>()?;
            Ok(poly.compose(&subst).expect("one substitute per variable"))
        }
        _ => Err(invalid(v.pos, format!("field `{key}`: expected a polynomial"))),
    }
}

fn as_poly_vector(v: &Spanned, key: &str, len: usize, vars: &[(char, usize, usize)]) -> LResult<Vector<Poly>> {
    let items = as_list(v, key)?;
    if items.len() != len {
        return Err(invalid(v.pos, format!("field `{key}`: expected {len} entries, found {}", items.len())));
    }
    items.iter().map(|i| as_poly(i, key, vars)).collect()
}

fn as_poly_matrix(v: &Spanned, key: &str, rows: usize, cols: usize, vars: &[(char, usize, usize)]) -> LResult<Matrix<Poly>> {
    let items = as_list(v, key)?;
    if items.len() != rows {
        return Err(invalid(v.pos, format!("field `{key}`: expected {rows} rows, found {}", items.len())));
    }
    let rows_v = items
        .iter()
        .map(|r| Ok(as_poly_vector(r, key, cols, vars)?.into_inner()))
        .collect::<LResult<Vec<_>>>()?;
    Ok(Matrix::from_rows(rows_v, cols).expect("rows checked"))
}

fn dims_of(f: &Fields) -> LResult<DecomposedDouble> {
    Ok(DecomposedDouble::new(f.usize("n1")?, f.usize("n2")?, f.usize("n3")?))
}

fn lower_space(f: &Fields) -> LResult<BispecialRep> {
    let dim = f.usize("hull_dim")?;
    let alpha = f.vector("alpha")?;
    if alpha.len() != dim {
        return Err(invalid(f.require("alpha")?.value.pos, format!("field `alpha`: expected {dim} entries")));
    }
    kernel(f.block.pos, "space", BispecialRep::new(alpha, f.opt_vector("v")?))
}

fn lower_double(f: &Fields, done: &[Named]) -> LResult<DoubleAffine> {
    if let Some(from) = f.get("from") {
        for k in ["n1", "n2", "n3", "l1", "l2", "sigma"] {
            if let Some(other) = f.get(k) {
                return Err(invalid(other.pos, format!("field `{k}` cannot be combined with `from`")));
            }
        }
        let name = as_ident(&from.value, "from")?;
        let Some(target) = done.iter().find(|n| n.name == name) else {
            return Err(DslError::UnresolvedReference { name, pos: from.value.pos });
        };
        let Object::Graded(g) = &target.object else {
            return Err(invalid(from.value.pos, format!("`{name}` is not a graded block")));
        };
        let pair = f.require("pair")?;
        let items = as_list(&pair.value, "pair")?;
        if items.len() != 2 {
            return Err(invalid(pair.value.pos, "field `pair`: expected two structure indices"));
        }
        let i = as_usize(&items[0], "pair")?;
        let j = as_usize(&items[1], "pair")?;
        let n = g.space().n();
        if i == 0 || j == 0 || i > n || j > n {
            return Err(invalid(pair.value.pos, format!("field `pair`: indices run from 1 to {n}")));
        }
        return Ok(kernel(pair.value.pos, "pair", g.restrict_pair(i - 1, j - 1))?.0);
    }
    if let Some(p) = f.get("pair") {
        return Err(invalid(p.pos, "field `pair` needs `from`"));
    }
    let d = dims_of(f)?;
    kernel(
        f.block.pos,
        "double",
        DoubleAffine::new(d, f.vector("l1")?, f.vector("l2")?, f.opt_vector("sigma")?),
    )
}

fn lower_levelset(f: &Fields) -> LResult<(DecomposedDouble, Vec<LevelConstraint>)> {
    let d = dims_of(f)?;
    let field = f.require("equations")?;
    let vars = [('y', d.n1, 0), ('z', d.n2, d.n1), ('c', d.n3, d.n1 + d.n2)];
    let mut out = Vec::new();
    for (k, eq) in as_list(&field.value, "equations")?.iter().enumerate() {
        let p = as_poly(eq, "equations", &vars)?;
        let mut c = LevelConstraint::zero(d);
        for (mono, coeff) in p.terms() {
            let nz: Vec<(usize, u32)> = mono.iter().copied().enumerate().filter(|(_, e)| *e > 0).collect();
            let slot = |i: usize| {
                if i < d.n1 {
                    (0, i)
                } else if i < d.n1 + d.n2 {
                    (1, i - d.n1)
                } else {
                    (2, i - d.n1 - d.n2)
                }
            };
            match nz.as_slice() {
                [] => c.g00 = coeff.clone(),
                [(i, 1)] => match slot(*i) {
                    (0, a) => c.gy[a] = coeff.clone(),
                    (1, a) => c.gz[a] = coeff.clone(),
                    (_, a) => c.sigma[a] = coeff.clone(),
                },
                [(i, 1), (j, 1)] if slot(*i).0 == 0 && slot(*j).0 == 1 => {
                    c.gyz[(slot(*i).1, slot(*j).1)] = coeff.clone();
                }
                _ => {
                    return Err(invalid(
                        eq.pos,
                        format!("equation {} has a term of degree above (1,1)", k + 1),
                    ))
                }
            }
        }
        out.push(c);
    }
    Ok((d, out))
}

fn entry<'a>(entries: &'a [Entry], key: &str) -> Option<&'a Spanned> {
    entries.iter().find(|e| e.key == Key::Ident(key.into())).map(|e| &e.value)
}

fn lower_atlas(f: &Fields) -> LResult<Atlas> {
    let m = f.usize("base")?;
    let d = dims_of(f)?;
    let charts_f = f.require("charts")?;
    let charts = as_list(&charts_f.value, "charts")?
        .iter()
        .map(|c| as_ident(c, "charts"))
        .collect::<LResult<Vec<_>>>()?;
    let mut atlas = kernel(charts_f.value.pos, "charts", Atlas::new(m, d, charts.clone()))?;
    let x = [('x', m, 0)];
    for edge in f.block.fields.iter().filter(|e| e.key == "edge") {
        let Value::Map(entries) = &edge.value.value else {
            return Err(invalid(edge.value.pos, "field `edge`: expected a map"));
        };
        for e in entries {
            if !matches!(&e.key, Key::Ident(k) if syntax::EDGE_KEYS.contains(&k.as_str())) {
                return Err(DslError::Invalid(Diagnostic {
                    pos: e.pos,
                    message: format!("unknown edge key `{}`", e.key),
                    expected: syntax::EDGE_KEYS.iter().map(|k| format!("`{k}`")).collect(),
                }));
            }
        }
        let chart = |key: &str| -> LResult<String> {
            let v = entry(entries, key).ok_or_else(|| invalid(edge.pos, format!("edge without `{key}`")))?;
            let name = as_ident(v, key)?;
            if !charts.contains(&name) {
                return Err(DslError::UnresolvedReference { name, pos: v.pos });
            }
            Ok(name)
        };
        let (from, to) = (chart("from")?, chart("to")?);
        let mat = |key: &str, rows: usize, cols: usize, identity: bool| -> LResult<Matrix<Poly>> {
            match entry(entries, key) {
                Some(v) => as_poly_matrix(v, key, rows, cols, &x),
                None if identity => Ok(Matrix::identity(rows)),
                None => Ok(Matrix::zeros(rows, cols)),
            }
        };
        let vec = |key: &str, len: usize| -> LResult<Vector<Poly>> {
            match entry(entries, key) {
                Some(v) => as_poly_vector(v, key, len, &x),
                None => Ok(Vector::zeros(len)),
            }
        };
        let p = match entry(entries, "P") {
            Some(v) => as_matrix(v, "P", m, m)?,
            None => Matrix::identity(m),
        };
        let q = match entry(entries, "q") {
            Some(v) => as_poly_vector(v, "q", m, &[])?.map(|p| p.constant_value().unwrap_or_else(Ring::zero)),
            None => Vector::zeros(m),
        };
        let gamma_yz = match entry(entries, "gamma_yz") {
            Some(v) => {
                let slices = as_list(v, "gamma_yz")?;
                if slices.len() != d.n3 {
                    return Err(invalid(v.pos, format!("field `gamma_yz`: expected {} slices", d.n3)));
                }
                let slices = slices
                    .iter()
                    .map(|s| as_poly_matrix(s, "gamma_yz", d.n1, d.n2, &x))
                    .collect::<LResult<Vec<_>>>()?;
                Bilinear::from_slices(&slices, d.n1, d.n2).expect("slices checked")
            }
            None => Bilinear::zeros(d.n3, d.n1, d.n2),
        };
        let fiber = DoubleMorphism {
            alpha0: vec("alpha0", d.n1)?,
            alpha: mat("alpha", d.n1, d.n1, true)?,
            beta0: vec("beta0", d.n2)?,
            beta: mat("beta", d.n2, d.n2, true)?,
            gamma00: vec("gamma00", d.n3)?,
            gamma_y: mat("gamma_y", d.n3, d.n1, false)?,
            gamma_z: mat("gamma_z", d.n3, d.n2, false)?,
            gamma_yz,
            sigma: mat("sigma", d.n3, d.n3, true)?,
        };
        let samples = match entry(entries, "samples") {
            Some(v) => as_list(v, "samples")?
                .iter()
                .map(|s| {
                    let p = as_poly_vector(s, "samples", m, &[])?;
                    Ok(p.map(|c| c.constant_value().unwrap_or_else(Ring::zero)))
                })
                .collect::<LResult<Vec<_>>>()?,
            None => vec![],
        };
        let base = kernel(edge.pos, "edge", BaseMap::new(p, q))?;
        let data = kernel(edge.pos, "edge", TransitionData::new(base, fiber))?;
        kernel(edge.pos, "edge", atlas.insert(&from, &to, data, samples))?;
    }
    Ok(atlas)
}

fn lower_special(f: &Fields) -> LResult<(TrivialBispecial, Option<Vector>)> {
    let m = f.usize("m")?;
    let n = f.usize("n")?;
    let omega = f.opt_vector("omega")?;
    if let (Some(w), Some(field)) = (&omega, f.get("omega")) {
        if w.len() != m {
            return Err(invalid(field.value.pos, format!("field `omega`: expected {m} entries")));
        }
        if w.is_zero() {
            return Err(invalid(field.value.pos, "field `omega`: one-form is zero"));
        }
    }
    Ok((TrivialBispecial::new(m, n), omega))
}

fn bits_map(f: &Fields, key: &str) -> LResult<Vec<(Vec<u8>, Spanned)>> {
    let field = f.require(key)?;
    let Value::Map(entries) = &field.value.value else {
        return Err(invalid(field.value.pos, format!("field `{key}`: expected a map keyed by bitstrings")));
    };
    entries
        .iter()
        .map(|e| match &e.key {
            Key::Bits(b) => Ok((parse_degree(b).expect("lexer admits only 0 and 1"), e.value.clone())),
            Key::Ident(k) => Err(invalid(e.pos, format!("field `{key}`: key `{k}` is not a bitstring"))),
        })
        .collect()
}

fn lower_graded(f: &Fields) -> LResult<NAffine> {
    let n = f.usize("n")?;
    if n == 0 || n > MAX_GRADED_ORDER {
        return Err(invalid(f.require("n")?.value.pos, format!("field `n`: order must be 1..={MAX_GRADED_ORDER}")));
    }
    let mut dims = BTreeMap::new();
    for (d, v) in bits_map(f, "dims")? {
        if d.len() != n {
            return Err(invalid(v.pos, format!("degree {} has length {}, expected {n}", degree_to_string(&d), d.len())));
        }
        dims.insert(d, as_usize(&v, "dims")?);
    }
    let space = kernel(f.block.pos, "graded", GradedSpace::new(n, dims))?;
    let mut ls: Vec<Option<Vector>> = vec![None; n];
    for (d, v) in bits_map(f, "l")? {
        let Some(i) = (d.len() == n && d.iter().filter(|b| **b == 1).count() == 1).then(|| d.iter().position(|b| *b == 1)).flatten() else {
            return Err(invalid(v.pos, format!("field `l`: {} is not a unit degree", degree_to_string(&d))));
        };
        ls[i] = Some(as_vector(&v, "l")?);
    }
    let l = ls
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| invalid(f.block.pos, format!("field `l`: no functional for structure {}", i + 1))))
        .collect::<LResult<Vec<_>>>()?;
    kernel(f.block.pos, "graded", NAffine::new(space, l, f.opt_vector("sigma")?))
}

/// Lowers every block, in order; references must point to earlier blocks.
pub fn lower(doc: &Document) -> LResult<Vec<Named>> {
    let mut out: Vec<Named> = Vec::new();
    for b in &doc.blocks {
        if out.iter().any(|n| n.name == b.name) {
            return Err(DslError::DuplicateName {
                name: b.name.clone(),
                pos: b.pos,
            });
        }
        let f = Fields { block: b };
        let object = match b.kind.as_str() {
            "space" => Object::Space(lower_space(&f)?),
            "double" => Object::Double(lower_double(&f, &out)?),
            "levelset" => {
                let (dims, equations) = lower_levelset(&f)?;
                Object::LevelSet { dims, equations }
            }
            "atlas" => Object::Atlas(lower_atlas(&f)?),
            "special_bundle" => {
                let (bundle, omega) = lower_special(&f)?;
                Object::Special { bundle, omega }
            }
            "graded" => Object::Graded(lower_graded(&f)?),
            other => return Err(invalid(b.pos, format!("unknown block kind `{other}`"))),
        };
        out.push(Named {
            name: b.name.clone(),
            object,
        });
    }
    Ok(out)
}

pub fn load(text: &str) -> LResult<(Document, Vec<Named>)> {
    let doc = syntax::parse(text).map_err(DslError::Parse)?;
    let objects = lower(&doc)?;
    Ok((doc, objects))
}

pub fn number(s: &Scalar) -> Value {
    Value::Number(s.clone())
}

pub fn int_value(n: usize) -> Value {
    Value::Number(Scalar::from_integer(n.into()))
}

pub fn vector_value(v: &Vector) -> Value {
    Value::List(v.iter().map(|s| spanned(number(s))).collect())
}

fn poly_value(p: &Poly, names: &[String]) -> Value {
    Expr::canonical(names.to_vec(), p.clone())
}

fn poly_vector_value(v: &Vector<Poly>, names: &[String]) -> Value {
    Value::List(v.iter().map(|p| spanned(poly_value(p, names))).collect())
}

fn poly_matrix_value(m: &Matrix<Poly>, names: &[String]) -> Value {
    Value::List(
        (0..m.rows())
            .map(|i| spanned(poly_vector_value(&m.row(i), names)))
            .collect(),
    )
}

fn ident(s: &str) -> Value {
    Value::Ident(s.into())
}

fn dims_block(block: Block, d: DecomposedDouble) -> Block {
    block.with("n1", int_value(d.n1)).with("n2", int_value(d.n2)).with("n3", int_value(d.n3))
}

pub fn double_block(name: &str, a: &DoubleAffine) -> Block {
    let mut b = dims_block(Block::new("double", name), a.space())
        .with("l1", vector_value(a.l1()))
        .with("l2", vector_value(a.l2()));
    if let Some(s) = a.sigma() {
        b = b.with("sigma", vector_value(s));
    }
    b
}

pub fn space_block(name: &str, a: &BispecialRep) -> Block {
    let mut b = Block::new("space", name)
        .with("hull_dim", int_value(a.hull_dim()))
        .with("alpha", vector_value(a.alpha()));
    if let Some(v) = a.v() {
        b = b.with("v", vector_value(v));
    }
    b
}

/// `n1, n2, n3` plus equations `l₁·y = rhs₁`, `l₂·z = rhs₂` as a level set.
pub fn levelset_block(name: &str, d: DecomposedDouble, equations: &[LevelConstraint]) -> Block {
    let names: Vec<String> = (1..=d.n1)
        .map(|i| format!("y{i}"))
        .chain((1..=d.n2).map(|b| format!("z{b}")))
        .chain((1..=d.n3).map(|u| format!("c{u}")))
        .collect();
    let eqs = equations
        .iter()
        .map(|c| {
            let mut p = Poly::constant(&c.g00 - &c.value);
            for i in 0..d.n1 {
                p = p.add(&Poly::var(i).scale(&c.gy[i]));
                for b in 0..d.n2 {
                    p = p.add(&Poly::var(i).mul(&Poly::var(d.n1 + b)).scale(&c.gyz[(i, b)]));
                }
            }
            for b in 0..d.n2 {
                p = p.add(&Poly::var(d.n1 + b).scale(&c.gz[b]));
            }
            for u in 0..d.n3 {
                p = p.add(&Poly::var(d.n1 + d.n2 + u).scale(&c.sigma[u]));
            }
            spanned(poly_value(&p, &names))
        })
        .collect();
    dims_block(Block::new("levelset", name), d).with("equations", Value::List(eqs))
}

pub fn atlas_block(name: &str, a: &Atlas) -> Block {
    let d = a.dims();
    let m = a.base_dim();
    let names: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
    let mut b = dims_block(Block::new("atlas", name).with("base", int_value(m)), d).with(
        "charts",
        Value::List(a.charts().iter().map(|c| spanned(ident(c))).collect()),
    );
    for (&(from, to), e) in a.edges() {
        let t = &e.data;
        let fm = &t.fiber;
        let entries: Vec<(&str, Value)> = vec![
            ("from", ident(&a.charts()[from])),
            ("to", ident(&a.charts()[to])),
            ("P", poly_matrix_value(&t.base_map.linear().map(|s| Poly::constant(s.clone())), &names)),
            ("q", vector_value(t.base_map.translation())),
            ("alpha0", poly_vector_value(&fm.alpha0, &names)),
            ("alpha", poly_matrix_value(&fm.alpha, &names)),
            ("beta0", poly_vector_value(&fm.beta0, &names)),
            ("beta", poly_matrix_value(&fm.beta, &names)),
            ("gamma00", poly_vector_value(&fm.gamma00, &names)),
            ("gamma_y", poly_matrix_value(&fm.gamma_y, &names)),
            ("gamma_z", poly_matrix_value(&fm.gamma_z, &names)),
            (
                "gamma_yz",
                Value::List(
                    (0..d.n3)
                        .map(|u| spanned(poly_matrix_value(&fm.gamma_yz.slice(u), &names)))
                        .collect(),
                ),
            ),
            ("sigma", poly_matrix_value(&fm.sigma, &names)),
            (
                "samples",
                Value::List(e.samples.iter().map(|s| spanned(vector_value(s))).collect()),
            ),
        ];
        let map = entries
            .into_iter()
            .map(|(k, v)| Entry {
                key: Key::Ident(k.into()),
                pos: Pos::default(),
                value: spanned(v),
            })
            .collect();
        b = b.with("edge", Value::Map(map));
    }
    b
}

pub fn graded_block(name: &str, a: &NAffine) -> Block {
    let s = a.space();
    let n = s.n();
    let dims = s
        .dims()
        .iter()
        .map(|(d, k)| Entry {
            key: Key::Bits(degree_to_string(d)),
            pos: Pos::default(),
            value: spanned(int_value(*k)),
        })
        .collect();
    let mut ls: Vec<Entry> = a
        .functionals()
        .iter()
        .enumerate()
        .map(|(i, l)| Entry {
            key: Key::Bits((0..n).map(|k| if k == i { '1' } else { '0' }).collect()),
            pos: Pos::default(),
            value: spanned(vector_value(l)),
        })
        .collect();
    ls.sort_by(|x, y| x.key.cmp(&y.key));
    let mut b = Block::new("graded", name)
        .with("n", int_value(n))
        .with("dims", Value::Map(dims))
        .with("l", Value::Map(ls));
    if let Some(sig) = a.sigma() {
        b = b.with("sigma", vector_value(sig));
    }
    b
}

pub fn special_block(name: &str, e: &TrivialBispecial, omega: Option<&Vector>) -> Block {
    let mut b = Block::new("special_bundle", name)
        .with("m", int_value(e.base_dim()))
        .with("n", int_value(e.n()));
    if let Some(w) = omega {
        b = b.with("omega", vector_value(w));
    }
    b
}

pub fn object_block(n: &Named) -> Block {
    match &n.object {
        Object::Space(a) => space_block(&n.name, a),
        Object::Double(a) => double_block(&n.name, a),
        Object::LevelSet { dims, equations } => levelset_block(&n.name, *dims, equations),
        Object::Atlas(a) => atlas_block(&n.name, a),
        Object::Special { bundle, omega } => special_block(&n.name, bundle, omega.as_ref()),
        Object::Graded(a) => graded_block(&n.name, a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_vector_names_the_field() {
        let e = load("double A { n1=1; n2=1; n3=1; l1=[]; l2=[1]; }").unwrap_err();
        assert!(e.to_string().contains("`l1`"), "{e}");
        assert_eq!(e.pos().col, 33);
    }

    #[test]
    fn references() {
        let e = load("double A { from = G; pair = [1, 2]; }").unwrap_err();
        assert!(matches!(e, DslError::UnresolvedReference { .. }));
        let e = load("space A { hull_dim = 1; alpha = [1]; }\nspace A { hull_dim = 1; alpha = [1]; }").unwrap_err();
        assert!(matches!(e, DslError::DuplicateName { .. }));
        let (_, objs) = load(
            "graded G { n = 2; dims = {#01: 1, #10: 1, #11: 1}; l = {#01: [1], #10: [2]}; sigma = [1]; }\n\
             double D { from = G; pair = [1, 2]; }",
        )
        .unwrap();
        assert!(matches!(&objs[1].object, Object::Double(d) if d.is_special()));
    }

    #[test]
    fn objects_round_trip_through_blocks() {
        let text = "levelset H { n1 = 1; n2 = 1; n3 = 1; equations = [y1*z1 - 1, y1 + z1 + c1 - 1]; }\n\
                    special_bundle E { m = 2; n = 1; omega = [1, 0]; }\n\
                    atlas T { base = 1; n1 = 1; n2 = 1; n3 = 1; charts = [U, V];\n\
                      edge = {from: U, to: V, alpha0: [x1], gamma_yz: [[[2*x1]]], samples: [[0], [1]]}; }";
        let (_, objs) = load(text).unwrap();
        let doc = Document {
            blocks: objs.iter().map(object_block).collect(),
        };
        let (_, again) = load(&syntax::print(&doc)).unwrap();
        assert_eq!(again, objs);
    }

    #[test]
    fn degree_bound_in_levelsets() {
        let e = load("levelset H { n1 = 1; n2 = 1; n3 = 1; equations = [y1^2]; }").unwrap_err();
        assert!(e.to_string().contains("degree above (1,1)"), "{e}");
        let e = load("levelset H { n1 = 1; n2 = 1; n3 = 1; equations = [x1]; }").unwrap_err();
        assert!(e.to_string().contains("`x1`"), "{e}");
    }
}
