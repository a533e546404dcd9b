//! Documents: parsing with positioned diagnostics, canonical printing.
//!
//! ```text
//! document := block*
//! block    := kind ident "{" field* "}"
//! field    := key "=" value ";"
//! value    := expr | bitstring | ident | "[" values "]" | "{" entries "}"
//! entry    := (ident | bitstring) ":" value
//! expr     := polynomial in x1.., y1.., z1.., c1.. with rational coefficients
//! ```

use std::collections::BTreeSet;
use std::fmt;

use daff_core::exact::{Poly, Ring, Scalar};

use crate::lexer::{lex, Pos, Tok, Token};

pub const KINDS: &[&str] = &["space", "double", "levelset", "atlas", "special_bundle", "graded"];

/// Field names in canonical order.
pub fn field_order(kind: &str) -> &'static [&'static str] {
    match kind {
        "space" => &["hull_dim", "alpha", "v"],
        "double" => &["n1", "n2", "n3", "l1", "l2", "sigma", "from", "pair"],
        "levelset" => &["n1", "n2", "n3", "equations"],
        "atlas" => &["base", "n1", "n2", "n3", "charts", "edge"],
        "special_bundle" => &["m", "n", "omega"],
        "graded" => &["n", "dims", "l", "sigma"],
        _ => &[],
    }
}

pub const EDGE_KEYS: &[&str] = &[
    "from", "to", "P", "q", "alpha0", "alpha", "beta0", "beta", "gamma00", "gamma_y", "gamma_z", "gamma_yz", "sigma",
    "samples",
];

fn repeatable(kind: &str, key: &str) -> bool {
    kind == "atlas" && key == "edge"
}

/// A polynomial together with the names of its variables, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub vars: Vec<String>,
    pub poly: Poly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Number(Scalar),
    Poly(Expr),
    Ident(String),
    Bits(String),
    List(Vec<Spanned>),
    Map(Vec<Entry>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spanned {
    pub value: Value,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Key {
    Ident(String),
    Bits(String),
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Key::Ident(s) => f.write_str(s),
            Key::Bits(b) => write!(f, "#{b}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub key: Key,
    pub pos: Pos,
    pub value: Spanned,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Field {
    pub key: String,
    pub pos: Pos,
    pub value: Spanned,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub kind: String,
    pub name: String,
    pub pos: Pos,
    pub fields: Vec<Field>,
}

impl Block {
    pub fn new(kind: &str, name: &str) -> Self {
        Block {
            kind: kind.into(),
            name: name.into(),
            pos: Pos::default(),
            fields: vec![],
        }
    }

    pub fn field(&self, key: &str) -> Option<&Field> {
        self.fields.iter().find(|f| f.key == key)
    }

    pub fn with(mut self, key: &str, value: Value) -> Self {
        self.fields.push(Field {
            key: key.into(),
            pos: Pos::default(),
            value: spanned(value),
        });
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Document {
    pub blocks: Vec<Block>,
}

pub fn spanned(value: Value) -> Spanned {
    Spanned {
        value,
        pos: Pos::default(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub pos: Pos,
    pub message: String,
    pub expected: Vec<String>,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnostic {}

/// `x3`, `y1`, `z2`, `c1`: a variable name and its 1-based index.
pub fn split_var(name: &str) -> Option<(char, usize)> {
    let mut chars = name.chars();
    let head = chars.next()?;
    if !"xyzc".contains(head) {
        return None;
    }
    let rest: &str = &name[1..];
    if rest.is_empty() || !rest.chars().all(|c| c.is_ascii_digit()) || rest.starts_with('0') {
        return None;
    }
    Some((head, rest.parse().ok()?))
}

fn var_key(name: &str) -> (char, usize) {
    split_var(name).expect("variables are validated when parsed")
}

impl Expr {
    /// Drops unused variables, sorts the rest, and returns a number when
    /// nothing is left.
    pub fn canonical(vars: Vec<String>, poly: Poly) -> Value {
        let used: BTreeSet<usize> = poly
            .terms()
            .flat_map(|(m, _)| m.iter().enumerate().filter(|(_, e)| **e > 0).map(|(i, _)| i))
            .collect();
        if used.is_empty() {
            return Value::Number(poly.constant_value().unwrap_or_else(Ring::zero));
        }
        let mut keep: Vec<usize> = used.into_iter().collect();
        keep.sort_by_key(|&i| var_key(&vars[i]));
        let subst: Vec<Poly> = (0..vars.len())
            .map(|i| match keep.iter().position(|&k| k == i) {
                Some(p) => Poly::var(p),
                None => Poly::zero(),
            })
            .collect();
        Value::Poly(Expr {
            vars: keep.iter().map(|&i| vars[i].clone()).collect(),
            poly: poly.compose(&subst).expect("one substitute per variable"),
        })
    }
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.at]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> PResult<T> {
        let t = self.peek();
        Err(Diagnostic {
            pos: t.pos,
            message: format!("unexpected {}", t.tok.describe()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn is_punct(&self, c: char) -> bool {
        self.peek().tok == Tok::Punct(c)
    }

    fn punct(&mut self, c: char, expected: &[&str]) -> PResult<Pos> {
        if self.is_punct(c) {
            Ok(self.next().pos)
        } else {
            self.fail(expected)
        }
    }

    fn ident(&mut self, expected: &[&str]) -> PResult<(String, Pos)> {
        match self.peek().tok.clone() {
            Tok::Ident(s) => {
                let pos = self.next().pos;
                Ok((s, pos))
            }
            _ => self.fail(expected),
        }
    }

    fn document(&mut self) -> PResult<Document> {
        let mut blocks = Vec::new();
        while self.peek().tok != Tok::Eof {
            blocks.push(self.block()?);
        }
        Ok(Document { blocks })
    }

    fn block(&mut self) -> PResult<Block> {
        let kinds: Vec<String> = KINDS.iter().map(|k| format!("`{k}`")).collect();
        let kinds: Vec<&str> = kinds.iter().map(String::as_str).collect();
        let (kind, pos) = self.ident(&kinds)?;
        if !KINDS.contains(&kind.as_str()) {
            return Err(Diagnostic {
                pos,
                message: format!("unknown block kind `{kind}`"),
                expected: kinds.iter().map(|s| s.to_string()).collect(),
            });
        }
        let (name, _) = self.ident(&["block name"])?;
        self.punct('{', &["`{`"])?;
        let order = field_order(&kind);
        let names: Vec<String> = order.iter().map(|k| format!("`{k}`")).collect();
        let mut expected: Vec<&str> = names.iter().map(String::as_str).collect();
        expected.push("`}`");
        let mut fields: Vec<Field> = Vec::new();
        while !self.is_punct('}') {
            let (key, kpos) = self.ident(&expected)?;
            if !order.contains(&key.as_str()) {
                return Err(Diagnostic {
                    pos: kpos,
                    message: format!("unknown field `{key}` in {kind} block"),
                    expected: expected.iter().map(|s| s.to_string()).collect(),
                });
            }
            if !repeatable(&kind, &key) && fields.iter().any(|f| f.key == key) {
                return Err(Diagnostic {
                    pos: kpos,
                    message: format!("field `{key}` given twice"),
                    expected: vec![],
                });
            }
            self.punct('=', &["`=`"])?;
            let value = self.value()?;
            self.punct(';', &["`;`"])?;
            fields.push(Field { key, pos: kpos, value });
        }
        self.next();
        let mut block = Block {
            kind,
            name,
            pos,
            fields,
        };
        canonicalize(&mut block);
        Ok(block)
    }

    fn value(&mut self) -> PResult<Spanned> {
        let pos = self.peek().pos;
        let value = match self.peek().tok.clone() {
            Tok::Punct('[') => {
                self.next();
                let mut items = Vec::new();
                while !self.is_punct(']') {
                    items.push(self.value()?);
                    if !self.is_punct(']') {
                        self.punct(',', &["`,`", "`]`"])?;
                    }
                }
                self.next();
                Value::List(items)
            }
            Tok::Punct('{') => {
                self.next();
                let mut entries: Vec<Entry> = Vec::new();
                while !self.is_punct('}') {
                    let kpos = self.peek().pos;
                    let key = match self.next().tok {
                        Tok::Ident(s) => Key::Ident(s),
                        Tok::Bits(b) => Key::Bits(b),
                        _ => {
                            self.at -= 1;
                            return self.fail(&["key", "`}`"]);
                        }
                    };
                    if entries.iter().any(|e| e.key == key) {
                        return Err(Diagnostic {
                            pos: kpos,
                            message: format!("key `{key}` given twice"),
                            expected: vec![],
                        });
                    }
                    self.punct(':', &["`:`"])?;
                    let value = self.value()?;
                    entries.push(Entry { key, pos: kpos, value });
                    if !self.is_punct('}') {
                        self.punct(',', &["`,`", "`}`"])?;
                    }
                }
                self.next();
                Value::Map(entries)
            }
            Tok::Bits(b) => {
                self.next();
                Value::Bits(b)
            }
            Tok::Ident(s) if split_var(&s).is_none() => {
                self.next();
                Value::Ident(s)
            }
            _ => {
                let mut vars = Vec::new();
                let p = self.expr(&mut vars)?;
                Expr::canonical(vars, p)
            }
        };
        Ok(Spanned { value, pos })
    }

    fn expr(&mut self, vars: &mut Vec<String>) -> PResult<Poly> {
        let mut acc = self.term(vars)?;
        loop {
            if self.is_punct('+') {
                self.next();
                acc = acc.add(&self.term(vars)?);
            } else if self.is_punct('-') {
                self.next();
                acc = acc.sub(&self.term(vars)?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self, vars: &mut Vec<String>) -> PResult<Poly> {
        let mut acc = self.unary(vars)?;
        loop {
            if self.is_punct('*') {
                self.next();
                acc = acc.mul(&self.unary(vars)?);
            } else if self.is_punct('/') {
                let pos = self.next().pos;
                let d = self.unary(vars)?;
                match d.constant_value() {
                    Some(c) if !Ring::is_zero(&c) => acc = acc.scale(&(Scalar::from_integer(1.into()) / c)),
                    _ => {
                        return Err(Diagnostic {
                            pos,
                            message: "division by zero or by a non-constant".into(),
                            expected: vec![],
                        })
                    }
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self, vars: &mut Vec<String>) -> PResult<Poly> {
        if self.is_punct('-') {
            self.next();
            return Ok(self.unary(vars)?.neg());
        }
        let base = self.atom(vars)?;
        if self.is_punct('^') {
            self.next();
            return match self.peek().tok.clone() {
                Tok::Int(n) => {
                    let pos = self.next().pos;
                    let e: u32 = n.try_into().map_err(|_| Diagnostic {
                        pos,
                        message: "exponent too large".into(),
                        expected: vec![],
                    })?;
                    Ok(base.pow(e))
                }
                _ => self.fail(&["exponent"]),
            };
        }
        Ok(base)
    }

    fn atom(&mut self, vars: &mut Vec<String>) -> PResult<Poly> {
        match self.peek().tok.clone() {
            Tok::Int(n) => {
                self.next();
                Ok(Poly::constant(Scalar::from_integer(n)))
            }
            Tok::Ident(s) if split_var(&s).is_some() => {
                self.next();
                let i = match vars.iter().position(|v| *v == s) {
                    Some(i) => i,
                    None => {
                        vars.push(s);
                        vars.len() - 1
                    }
                };
                Ok(Poly::var(i))
            }
            Tok::Punct('(') => {
                self.next();
                let p = self.expr(vars)?;
                self.punct(')', &["`)`"])?;
                Ok(p)
            }
            _ => self.fail(&["number", "variable", "`(`"]),
        }
    }
}

fn canonicalize_value(v: &mut Value, edge: bool) {
    match v {
        Value::List(items) => items.iter_mut().for_each(|i| canonicalize_value(&mut i.value, false)),
        Value::Map(entries) => {
            entries.iter_mut().for_each(|e| canonicalize_value(&mut e.value.value, false));
            if edge {
                let rank = |k: &Key| match k {
                    Key::Ident(s) => EDGE_KEYS.iter().position(|e| e == s).unwrap_or(EDGE_KEYS.len()),
                    Key::Bits(_) => EDGE_KEYS.len(),
                };
                entries.sort_by_key(|e| rank(&e.key));
            } else {
                entries.sort_by(|a, b| a.key.cmp(&b.key));
            }
        }
        _ => {}
    }
}

/// Sorts fields into canonical order (repeated fields keep their relative
/// order) and map entries by key.
pub fn canonicalize(block: &mut Block) {
    let order = field_order(&block.kind);
    block
        .fields
        .sort_by_key(|f| order.iter().position(|k| *k == f.key).unwrap_or(order.len()));
    for f in &mut block.fields {
        canonicalize_value(&mut f.value.value, block.kind == "atlas" && f.key == "edge");
    }
}

pub fn parse(text: &str) -> Result<Document, Diagnostic> {
    let toks = lex(text).map_err(|e| Diagnostic {
        pos: e.pos,
        message: e.message,
        expected: vec![],
    })?;
    Parser { toks, at: 0 }.document()
}

fn print_value(v: &Value, indent: usize, out: &mut String) {
    match v {
        Value::Number(s) => out.push_str(&s.to_string()),
        Value::Poly(e) => out.push_str(&e.poly.render_with(&e.vars)),
        Value::Ident(s) => out.push_str(s),
        Value::Bits(b) => {
            out.push('#');
            out.push_str(b);
        }
        Value::List(items) => {
            out.push('[');
            for (k, i) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                print_value(&i.value, indent, out);
            }
            out.push(']');
        }
        Value::Map(entries) => {
            let multiline = entries.iter().any(|e| matches!(e.key, Key::Ident(_)));
            out.push('{');
            for (k, e) in entries.iter().enumerate() {
                if multiline {
                    out.push('\n');
                    out.push_str(&"  ".repeat(indent + 1));
                } else if k > 0 {
                    out.push(' ');
                }
                out.push_str(&format!("{}: ", e.key));
                print_value(&e.value.value, indent + 1, out);
                if k + 1 < entries.len() {
                    out.push(',');
                }
            }
            if multiline && !entries.is_empty() {
                out.push('\n');
                out.push_str(&"  ".repeat(indent));
            }
            out.push('}');
        }
    }
}

pub fn print(doc: &Document) -> String {
    let mut out = String::new();
    for (k, b) in doc.blocks.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        out.push_str(&format!("{} {} {{\n", b.kind, b.name));
        for f in &b.fields {
            out.push_str(&format!("  {} = ", f.key));
            print_value(&f.value.value, 1, &mut out);
            out.push_str(";\n");
        }
        out.push_str("}\n");
    }
    out
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use daff_core::exact::frac;

    #[test]
    fn minimal_double() {
        let doc = parse("double A { n1=1; n2=1; n3=1; l1=[1]; l2=[1]; sigma=[1]; }").unwrap();
        assert_eq!(doc.blocks.len(), 1);
        assert_eq!(doc.blocks[0].fields.len(), 6);
        assert_eq!(parse(&print(&doc)).unwrap(), doc);
    }

    #[test]
    fn expressions_are_canonical() {
        let doc = parse("levelset L { equations = [z1*y1 - 2/4, (x2 + 1)^2 - x2^2 - 2*x2, 3/6]; }").unwrap();
        let Value::List(items) = &doc.blocks[0].fields[0].value.value else {
            panic!()
        };
        match &items[0].value {
            Value::Poly(e) => assert_eq!(e.poly.render_with(&e.vars), "y1*z1 - 1/2"),
            other => panic!("{other:?}"),
        }
        assert_eq!(items[1].value, Value::Number(frac(1, 1)));
        assert_eq!(items[2].value, Value::Number(frac(1, 2)));
    }

    #[test]
    fn fields_sorted() {
        let a = parse("double A { l2=[1]; n1=1; }").unwrap();
        assert_eq!(a.blocks[0].fields[0].key, "n1");
    }

    #[test]
    fn diagnostics() {
        let e = parse("double A {\n  l1 = [1 2];\n}").unwrap_err();
        assert_eq!((e.pos.line, e.pos.col), (2, 11));
        assert_eq!(e.expected, vec!["`,`", "`]`"]);
        let e = parse("doubel A {}").unwrap_err();
        assert!(e.message.contains("unknown block kind"));
        let e = parse("double A { l3 = [1]; }").unwrap_err();
        assert!(e.expected.contains(&"`l1`".to_string()));
        let e = parse("double A { l1 = [1]").unwrap_err();
        assert_eq!(e.expected, vec!["`;`"]);
        let e = parse("levelset L { equations = [y1 / z1]; }").unwrap_err();
        assert!(e.message.contains("non-constant"));
    }

    #[test]
    fn map_printing() {
        let doc = parse("graded G { n = 2; dims = {#11: 1, #01: 2}; }").unwrap();
        let text = print(&doc);
        assert!(text.contains("dims = {#01: 2, #11: 1};"), "{text}");
        assert_eq!(parse(&text).unwrap(), doc);
    }
}
