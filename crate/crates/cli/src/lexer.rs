use std::fmt;

use num_bigint::BigInt;

/// 1-based line and column (in characters).
#[derive(Clone, Copy, Debug, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

/// Positions never take part in structural equality.
impl PartialEq for Pos {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Pos {}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(BigInt),
    Bits(String),
    Punct(char),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("number `{n}`"),
            Tok::Bits(b) => format!("bitstring `#{b}`"),
            Tok::Punct(c) => format!("`{c}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub pos: Pos,
    pub message: String,
}

const PUNCT: &str = "{}[]()=;,:+-*/^";

pub fn lex(text: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let bump = |i: &mut usize, line: &mut usize, col: &mut usize, chars: &[char]| {
        let c = chars[*i];
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            bump(&mut i, &mut line, &mut col, &chars);
        } else if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump(&mut i, &mut line, &mut col, &chars);
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump(&mut i, &mut line, &mut col, &chars);
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                pos,
            });
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump(&mut i, &mut line, &mut col, &chars);
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token {
                tok: Tok::Int(s.parse().expect("digits")),
                pos,
            });
        } else if c == '#' {
            bump(&mut i, &mut line, &mut col, &chars);
            let start = i;
            while i < chars.len() && (chars[i] == '0' || chars[i] == '1') {
                bump(&mut i, &mut line, &mut col, &chars);
            }
            if start == i {
                return Err(LexError {
                    pos,
                    message: "expected binary digits after `#`".into(),
                });
            }
            out.push(Token {
                tok: Tok::Bits(chars[start..i].iter().collect()),
                pos,
            });
        } else if PUNCT.contains(c) {
            bump(&mut i, &mut line, &mut col, &chars);
            out.push(Token { tok: Tok::Punct(c), pos });
        } else {
            return Err(LexError {
                pos,
                message: format!("unexpected character {c:?}"),
            });
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_comments() {
        let toks = lex("double A { // note\n  l1 = [1/2, #01];\n}").unwrap();
        let l1 = toks.iter().find(|t| t.tok == Tok::Ident("l1".into())).unwrap();
        assert_eq!((l1.pos.line, l1.pos.col), (2, 3));
        assert!(toks.iter().any(|t| t.tok == Tok::Bits("01".into())));
        assert_eq!(toks.last().unwrap().tok, Tok::Eof);
    }

    #[test]
    fn bad_character() {
        let e = lex("a = $;").unwrap_err();
        assert_eq!((e.pos.line, e.pos.col), (1, 5));
    }
}
