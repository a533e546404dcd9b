//! Text format and command runner for the `daff` tool.
//!
//! Exit codes: 0 when every check passes, 1 when some check fails, 2 for
//! parse, validation and usage errors.

pub mod build;
pub mod lexer;
pub mod model;
pub mod report;
pub mod suites;
pub mod syntax;

use daff_core::double::classify_level_set;

use crate::model::{DslError, Named, Object};
use crate::report::{Format, Report};

pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
    /// Printed document produced by `build`.
    pub document: Option<String>,
}

impl Outcome {
    fn report(r: &Report, format: Format) -> Self {
        Outcome {
            stdout: r.render(format),
            stderr: String::new(),
            code: r.exit_code(),
            document: None,
        }
    }

    pub fn error(message: impl Into<String>) -> Self {
        Outcome {
            stdout: String::new(),
            stderr: message.into() + "\n",
            code: 2,
            document: None,
        }
    }
}

fn load(source: &str, text: &str) -> Result<Vec<Named>, Outcome> {
    model::load(text)
        .map(|(_, objs)| objs)
        .map_err(|e| Outcome::error(diagnostic(source, &e)))
}

pub fn diagnostic(source: &str, e: &DslError) -> String {
    match e {
        DslError::Parse(d) | DslError::Invalid(d) => format!("error: {source}:{d}"),
        other => format!("error: {source}:{other}"),
    }
}

fn describe(n: &Named) -> String {
    match &n.object {
        Object::Space(a) => format!("space of hull dim {}{}", a.hull_dim(), if a.is_special() { ", special" } else { "" }),
        Object::Double(a) => format!("double {}{}", a.space(), if a.is_special() { ", special" } else { "" }),
        Object::LevelSet { dims, equations } => {
            let verdict = match classify_level_set(*dims, equations) {
                Ok(v) if v.is_subbundle() => "double affine subbundle".to_string(),
                Ok(daff_core::double::LevelVerdict::NotSubbundle(w)) => format!("not a double affine subbundle: {w}"),
                Ok(v) => format!("{v:?}"),
                Err(e) => format!("error: {e}"),
            };
            format!("levelset in {dims} with {} equations; {verdict}", equations.len())
        }
        Object::Atlas(a) => format!("atlas over R^{} with fibers {} and {} charts", a.base_dim(), a.dims(), a.charts().len()),
        Object::Special { bundle, omega } => format!(
            "special bundle m={} n={}{}",
            bundle.base_dim(),
            bundle.n(),
            omega.as_ref().map(|w| format!(" omega={w}")).unwrap_or_default()
        ),
        Object::Graded(g) => format!("graded {g}"),
    }
}

/// Parses and validates; one `valid` record per block.
pub fn check(source: &str, text: &str, format: Format) -> Outcome {
    let objs = match load(source, text) {
        Ok(o) => o,
        Err(o) => return o,
    };
    let mut r = Report::new("check", 0, 0);
    for n in &objs {
        r.fact(format!("{}: {}", n.name, describe(n)));
        r.outcome(&n.name, "valid", None);
    }
    Outcome::report(&r.finish(), format)
}

pub fn build(source: &str, op: &str, text: &str, format: Format) -> Outcome {
    if !build::OPS.contains(&op) {
        return Outcome::error(format!("error: unknown op `{op}` (expected one of {})", build::OPS.join(", ")));
    }
    let objs = match load(source, text) {
        Ok(o) => o,
        Err(o) => return o,
    };
    match build::build(op, &objs) {
        Some(b) => {
            let mut out = Outcome::report(&b.report, format);
            out.document = Some(syntax::print(&b.document));
            out
        }
        None => Outcome::error(format!("error: {source}: no block supports op `{op}`")),
    }
}

pub fn verify(source: &str, suite: &str, text: &str, seed: u64, trials: usize, format: Format) -> Outcome {
    if !suites::SUITES.contains(&suite) {
        return Outcome::error(format!(
            "error: unknown suite `{suite}` (expected one of {})",
            suites::SUITES.join(", ")
        ));
    }
    let objs = match load(source, text) {
        Ok(o) => o,
        Err(o) => return o,
    };
    let r = suites::verify(suite, &objs, seed, trials).expect("suite name checked");
    Outcome::report(&r, format)
}
