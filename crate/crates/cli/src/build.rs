//! Constructions reachable from `build --op`.

use daff_core::affine::{adjoint, special_dual};
use daff_core::double::{
    classify_level_set, special_dual_horizontal, special_dual_vertical, DoubleAffine, LevelConstraint, LevelVerdict,
};
use daff_core::exact::Vector;
use daff_core::naffine::{bbl_n, side_bases};
use daff_core::phase::{PhaseSpace, TrivialBispecial};

use crate::model::{self, Named, Object};
use crate::report::Report;
use crate::syntax::{Block, Document};

pub const OPS: &[&str] = &[
    "hull",
    "model",
    "flip",
    "adjoint",
    "vertical-dual",
    "horizontal-dual",
    "special-dual",
    "classify",
    "affctg",
    "phase",
    "bbl",
    "contact",
    "tbar",
    "sides",
];

pub struct Built {
    pub report: Report,
    pub document: Document,
}

fn mask_text(m: daff_core::phase::Mask) -> String {
    match (m.y_v, m.pi_alpha) {
        (false, false) => "none".into(),
        (true, false) => "y_v".into(),
        (false, true) => "pi_alpha".into(),
        (true, true) => "y_v, pi_alpha".into(),
    }
}

fn model_equations(a: &DoubleAffine) -> Vec<LevelConstraint> {
    let d = a.space();
    let mut e1 = LevelConstraint::zero(d);
    e1.gy = a.l1().clone();
    let mut e2 = LevelConstraint::zero(d);
    e2.gz = a.l2().clone();
    vec![e1, e2]
}

fn double_op(op: &str, name: &str, a: &DoubleAffine, r: &mut Report, out: &mut Vec<Block>) {
    let emit = |r: &mut Report, out: &mut Vec<Block>, suffix: &str, res: daff_core::Result<DoubleAffine>| match res {
        Ok(b) => {
            let new = format!("{name}_{suffix}");
            r.fact(format!("{new}: {} l1={} l2={}", b.space(), b.l1(), b.l2()));
            out.push(model::double_block(&new, &b));
            r.outcome(name, op, None);
        }
        Err(e) => r.outcome(name, op, Some(format!("error: {e}"))),
    };
    if matches!(op, "adjoint" | "vertical-dual" | "horizontal-dual") && !a.is_special() {
        r.skip(name, op, "no core section");
        return;
    }
    match op {
        "hull" => {
            r.fact(format!("{name}: hull {} with A = {{l1 = 1, l2 = 1}}", a.hull()));
            r.fact(format!("{name}: l1 = {}, l2 = {}", a.l1(), a.l2()));
            out.push(model::double_block(name, a));
            r.outcome(name, op, None);
        }
        "model" => {
            let m = a.model_vv();
            let (l1, l2) = m.constraints();
            r.fact(format!("{name}: model {} given by l1 = 0 = l2", m.dims()));
            r.fact(format!("{name}: l1 = {l1}, l2 = {l2}"));
            out.push(model::levelset_block(&format!("{name}_model"), a.space(), &model_equations(a)));
            r.outcome(name, op, None);
        }
        "flip" => emit(r, out, "flip", Ok(a.flip())),
        "adjoint" => emit(r, out, "adjoint", a.adjoint()),
        "vertical-dual" => emit(r, out, "V", special_dual_vertical(a)),
        "horizontal-dual" => emit(r, out, "H", special_dual_horizontal(a)),
        _ => {}
    }
}

fn verdict_fact(name: &str, v: &LevelVerdict) -> String {
    match v {
        LevelVerdict::Subbundle { side1, side2, core_dim } => format!(
            "{name}: double affine subbundle; side 1 = {} + span of {} vectors, side 2 = {} + span of {} vectors, core dim {core_dim}",
            side1.0,
            side1.1.cols(),
            side2.0,
            side2.1.cols()
        ),
        LevelVerdict::NotSubbundle(w) => format!("{name}: not a double affine subbundle: {w}"),
        LevelVerdict::Undecided(why) => format!("{name}: undecided: {why}"),
    }
}

fn phase_op(op: &str, name: &str, e: &TrivialBispecial, omega: Option<&Vector>, r: &mut Report, out: &mut Vec<Block>) {
    if op == "tbar" {
        r.fact(format!(
            "{name}: classes (x, y, xdot, ydot, w) with y in R^{}, s = -y{} and w = s + sdot",
            e.fiber_dim(),
            e.v_index()
        ));
        r.fact(format!("{name}: distinguished element adds 1 to w"));
        r.outcome(name, op, None);
        return;
    }
    let kind = match op {
        "affctg" => PhaseSpace::AffCtg,
        "phase" => PhaseSpace::PhaseP,
        "bbl" => PhaseSpace::Bbl,
        _ => PhaseSpace::ContactC,
    };
    match e.build(kind, omega) {
        Ok(c) => {
            let eqs: Vec<String> = c.constraints.iter().map(|(v, s)| format!("{v} = {s}")).collect();
            r.fact(format!("{name}: {} mask [{}]", kind.name(), mask_text(c.mask)));
            r.fact(format!(
                "{name}: constraints [{}]",
                if eqs.is_empty() { "none".into() } else { eqs.join(", ") }
            ));
            r.fact(format!(
                "{name}: side 1 ({}), side 2 ({}), core ({}), hull {}",
                c.side1.join(", "),
                c.side2.join(", "),
                c.core.join(", "),
                c.hull
            ));
            if let Some(s) = &c.structure {
                out.push(model::double_block(&format!("{name}_{}", kind.name()), s));
            }
            r.outcome(name, op, None);
        }
        Err(err) => r.outcome(name, op, Some(format!("error: {err}"))),
    }
}

/// Runs `op` on every block that supports it; `None` when no block does.
pub fn build(op: &str, objects: &[Named]) -> Option<Built> {
    let mut r = Report::new(format!("build {op}"), 0, 0);
    let mut out = Vec::new();
    for n in objects {
        let name = n.name.as_str();
        match (op, &n.object) {
            ("hull" | "model" | "flip" | "adjoint" | "vertical-dual" | "horizontal-dual", Object::Double(a)) => {
                double_op(op, name, a, &mut r, &mut out)
            }
            ("model", Object::Atlas(a)) => {
                out.push(model::atlas_block(&format!("{name}_model"), &a.induce_model()));
                r.fact(format!("{name}: model transitions drop alpha0, beta0 and the affine core terms"));
                r.outcome(name, op, None);
            }
            ("hull", Object::Atlas(a)) => {
                let h = a.induce_hull();
                r.fact(format!("{name}: hull fibers {}", h.dims()));
                out.push(model::atlas_block(&format!("{name}_hull"), &h));
                r.outcome(name, op, None);
            }
            ("special-dual" | "adjoint", Object::Space(a)) if !a.is_special() => {
                r.skip(name, op, "no distinguished vector")
            }
            ("special-dual" | "adjoint", Object::Space(a)) => {
                let res = if op == "adjoint" { adjoint(a) } else { special_dual(a) };
                match res {
                    Ok(d) => {
                        let new = format!("{name}_{}", if op == "adjoint" { "adjoint" } else { "dual" });
                        r.fact(format!("{new}: alpha = {}", d.alpha()));
                        out.push(model::space_block(&new, &d));
                        r.outcome(name, op, None);
                    }
                    Err(e) => r.outcome(name, op, Some(format!("error: {e}"))),
                }
            }
            ("classify", Object::LevelSet { dims, equations }) => match classify_level_set(*dims, equations) {
                Ok(v) => {
                    r.fact(verdict_fact(name, &v));
                    r.outcome(name, op, None);
                }
                Err(e) => r.outcome(name, op, Some(format!("error: {e}"))),
            },
            ("affctg" | "phase" | "bbl" | "contact" | "tbar", Object::Special { bundle, omega }) => {
                phase_op(op, name, bundle, omega.as_ref(), &mut r, &mut out)
            }
            ("bbl", Object::Graded(g)) => match bbl_n(g) {
                Ok(b) => {
                    r.fact(format!("{name}_bbl: {b}"));
                    out.push(model::graded_block(&format!("{name}_bbl"), &b));
                    r.outcome(name, op, None);
                }
                Err(e) => r.outcome(name, op, Some(format!("error: {e}"))),
            },
            ("sides", Object::Graded(g)) => match side_bases(g) {
                Ok(bases) => {
                    for (i, b) in bases.iter().enumerate() {
                        let new = format!("{name}_side{}", i + 1);
                        r.fact(format!("{new}: {b}"));
                        if b.space().n() > 0 {
                            out.push(model::graded_block(&new, b));
                        }
                    }
                    r.outcome(name, op, None);
                }
                Err(e) => r.outcome(name, op, Some(format!("error: {e}"))),
            },
            _ => {}
        }
    }
    if r.records.is_empty() {
        return None;
    }
    Some(Built {
        report: r.finish(),
        document: Document { blocks: out },
    })
}
