//! Surface syntax.
//!
//! ```text
//! term  := '\' ident ':' type '.' term | app
//! app   := atom atom*                          (left-associative)
//! atom  := ident | number | '[]' | 'fst' atom | 'snd' atom
//!        | '(' term ')' | '(' term ',' term ')'
//! type  := prod ('->' type)?                   (arrow right-associative)
//! prod  := tatom ('*' tatom)*                  (product left-associative)
//! tatom := 'Real' | '(' type ')'
//! ```
//!
//! `--` starts a line comment. Numbers are decimal literals with an optional
//! leading minus and exponent; there are no infix operators, so the minus is
//! unambiguous. An identifier names a primitive when the registry defines it
//! and no enclosing binder shadows it.

use super::prims::Registry;
use super::{LambdaError, Result, SimpleType, Span, Term, TermKind};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Lambda,
    Dot,
    Colon,
    Comma,
    LParen,
    RParen,
    Arrow,
    Star,
    Hole,
    Fst,
    Snd,
    RealTy,
    Ident(String),
    Number(f64),
}

#[derive(Debug, Clone)]
struct Lexeme {
    tok: Tok,
    lo: usize,
    hi: usize,
    line: usize,
    col: usize,
}

fn err_at(line: usize, col: usize, msg: impl Into<String>) -> LambdaError {
    LambdaError::Parse { line, col, msg: msg.into() }
}

fn lex(src: &str) -> Result<Vec<Lexeme>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    let is_ident_start = |c: u8| c.is_ascii_alphabetic() || c == b'_';
    let is_ident = |c: u8| c.is_ascii_alphanumeric() || c == b'_' || c == b'\'';
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == b'-' && i + 1 < bytes.len() && bytes[i + 1] == b'-' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let (lo, l0, c0) = (i, line, col);
        let mut push = |tok: Tok, hi: usize| {
            out.push(Lexeme { tok, lo, hi, line: l0, col: c0 });
        };
        match c {
            b'\\' => {
                push(Tok::Lambda, i + 1);
                i += 1;
                col += 1;
            }
            b'.' => {
                push(Tok::Dot, i + 1);
                i += 1;
                col += 1;
            }
            b':' => {
                push(Tok::Colon, i + 1);
                i += 1;
                col += 1;
            }
            b',' => {
                push(Tok::Comma, i + 1);
                i += 1;
                col += 1;
            }
            b'(' => {
                push(Tok::LParen, i + 1);
                i += 1;
                col += 1;
            }
            b')' => {
                push(Tok::RParen, i + 1);
                i += 1;
                col += 1;
            }
            b'*' => {
                push(Tok::Star, i + 1);
                i += 1;
                col += 1;
            }
            b'[' => {
                if i + 1 < bytes.len() && bytes[i + 1] == b']' {
                    push(Tok::Hole, i + 2);
                    i += 2;
                    col += 2;
                } else {
                    return Err(err_at(line, col, "expected `[]`"));
                }
            }
            b'-' if i + 1 < bytes.len() && bytes[i + 1] == b'>' => {
                push(Tok::Arrow, i + 2);
                i += 2;
                col += 2;
            }
            _ if c.is_ascii_digit() || (c == b'-' && i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit()) => {
                let mut j = i + 1;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j < bytes.len() && bytes[j] == b'.' && j + 1 < bytes.len() && bytes[j + 1].is_ascii_digit() {
                    j += 1;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        j = k;
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                    }
                }
                let text = &src[i..j];
                let val: f64 = text
                    .parse()
                    .map_err(|_| err_at(line, col, format!("bad number literal `{text}`")))?;
                push(Tok::Number(val), j);
                col += j - i;
                i = j;
            }
            _ if is_ident_start(c) => {
                let mut j = i + 1;
                while j < bytes.len() && is_ident(bytes[j]) {
                    j += 1;
                }
                let word = &src[i..j];
                let tok = match word {
                    "fst" => Tok::Fst,
                    "snd" => Tok::Snd,
                    "Real" => Tok::RealTy,
                    "inf" => Tok::Number(f64::INFINITY),
                    _ => Tok::Ident(word.to_string()),
                };
                push(tok, j);
                col += j - i;
                i = j;
            }
            _ => {
                return Err(err_at(line, col, format!("unexpected character `{}`", c as char)));
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Lexeme>,
    pos: usize,
    reg: &'a Registry,
    binders: Vec<String>,
    end_line: usize,
    end_col: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Lexeme> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Lexeme> {
        let l = self.toks.get(self.pos).cloned();
        if l.is_some() {
            self.pos += 1;
        }
        l
    }

    fn here(&self) -> (usize, usize) {
        match self.peek() {
            Some(l) => (l.line, l.col),
            None => (self.end_line, self.end_col),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Lexeme> {
        let (line, col) = self.here();
        match self.next() {
            Some(l) if l.tok == tok => Ok(l),
            Some(l) => Err(err_at(l.line, l.col, format!("expected {what}"))),
            None => Err(err_at(line, col, format!("expected {what}, found end of input"))),
        }
    }

    fn parse_type(&mut self) -> Result<SimpleType> {
        let left = self.parse_prod_type()?;
        if matches!(self.peek().map(|l| &l.tok), Some(Tok::Arrow)) {
            self.next();
            let right = self.parse_type()?;
            Ok(SimpleType::arrow(left, right))
        } else {
            Ok(left)
        }
    }

    fn parse_prod_type(&mut self) -> Result<SimpleType> {
        let mut left = self.parse_type_atom()?;
        while matches!(self.peek().map(|l| &l.tok), Some(Tok::Star)) {
            self.next();
            let right = self.parse_type_atom()?;
            left = SimpleType::prod(left, right);
        }
        Ok(left)
    }

    fn parse_type_atom(&mut self) -> Result<SimpleType> {
        let (line, col) = self.here();
        match self.next() {
            Some(l) => match l.tok {
                Tok::RealTy => Ok(SimpleType::Real),
                Tok::LParen => {
                    let t = self.parse_type()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(t)
                }
                _ => Err(err_at(l.line, l.col, "expected a type")),
            },
            None => Err(err_at(line, col, "expected a type, found end of input")),
        }
    }

    fn parse_term(&mut self) -> Result<Term> {
        if matches!(self.peek().map(|l| &l.tok), Some(Tok::Lambda)) {
            let lam = self.next().unwrap();
            let (line, col) = self.here();
            let name = match self.next() {
                Some(Lexeme { tok: Tok::Ident(x), .. }) => x,
                Some(l) => return Err(err_at(l.line, l.col, "expected a binder name after `\\`")),
                None => return Err(err_at(line, col, "expected a binder name, found end of input")),
            };
            self.expect(Tok::Colon, "`:` after the binder name")?;
            let ty = self.parse_type()?;
            self.expect(Tok::Dot, "`.` after the binder type")?;
            self.binders.push(name.clone());
            let body = self.parse_term()?;
            self.binders.pop();
            let span = Span { lo: lam.lo, hi: body.span.hi };
            return Ok(Term { kind: TermKind::Lam(name, ty, Box::new(body)), span });
        }
        let head = self.parse_atom()?;
        let mut head = match head {
            Some(t) => t,
            None => {
                let (line, col) = self.here();
                return Err(err_at(line, col, "expected a term"));
            }
        };
        while let Some(arg) = self.parse_atom()? {
            let span = Span { lo: head.span.lo, hi: arg.span.hi };
            head = Term { kind: TermKind::App(Box::new(head), Box::new(arg)), span };
        }
        Ok(head)
    }

    /// One atom if the next token can start one, `None` otherwise.
    fn parse_atom(&mut self) -> Result<Option<Term>> {
        let l = match self.peek() {
            Some(l) => l.clone(),
            None => return Ok(None),
        };
        let term = match l.tok {
            Tok::Ident(ref x) => {
                self.next();
                let kind = if self.binders.iter().any(|b| b == x) {
                    TermKind::Var(x.clone())
                } else if self.reg.get(x).is_some() {
                    TermKind::Prim(x.clone())
                } else {
                    TermKind::Var(x.clone())
                };
                Term { kind, span: Span { lo: l.lo, hi: l.hi } }
            }
            Tok::Number(v) => {
                self.next();
                Term { kind: TermKind::RealConst(v), span: Span { lo: l.lo, hi: l.hi } }
            }
            Tok::Hole => {
                self.next();
                Term { kind: TermKind::Hole, span: Span { lo: l.lo, hi: l.hi } }
            }
            Tok::Fst | Tok::Snd => {
                self.next();
                let idx = if l.tok == Tok::Fst { 1 } else { 2 };
                let inner = match self.parse_atom()? {
                    Some(t) => t,
                    None => {
                        let (line, col) = self.here();
                        return Err(err_at(line, col, "expected an argument after the projection"));
                    }
                };
                let span = Span { lo: l.lo, hi: inner.span.hi };
                Term { kind: TermKind::Proj(idx, Box::new(inner)), span }
            }
            Tok::LParen => {
                self.next();
                let first = self.parse_term()?;
                match self.peek().map(|l| l.tok.clone()) {
                    Some(Tok::Comma) => {
                        self.next();
                        let second = self.parse_term()?;
                        let close = self.expect(Tok::RParen, "`)` to close the pair")?;
                        Term {
                            kind: TermKind::Pair(Box::new(first), Box::new(second)),
                            span: Span { lo: l.lo, hi: close.hi },
                        }
                    }
                    _ => {
                        let close = self.expect(Tok::RParen, "`)`")?;
                        Term { kind: first.kind, span: Span { lo: l.lo, hi: close.hi } }
                    }
                }
            }
            _ => return Ok(None),
        };
        Ok(Some(term))
    }
}

/// Parse a closed-or-open term. Identifiers that the registry defines and no
/// binder shadows become primitive constants; everything else is a variable.
pub fn parse(reg: &Registry, src: &str) -> Result<Term> {
    let toks = lex(src)?;
    let end_line = 1 + src.matches('\n').count();
    let end_col = 1 + src.rsplit('\n').next().unwrap_or("").chars().count();
    let mut p = Parser { toks, pos: 0, reg, binders: Vec::new(), end_line, end_col };
    let t = p.parse_term()?;
    if let Some(l) = p.peek() {
        return Err(err_at(l.line, l.col, "unexpected trailing input"));
    }
    Ok(t)
}

/// Parse a type in the surface grammar.
pub fn parse_type(src: &str) -> Result<SimpleType> {
    let toks = lex(src)?;
    let end_line = 1 + src.matches('\n').count();
    let end_col = 1 + src.rsplit('\n').next().unwrap_or("").chars().count();
    let reg = Registry::empty();
    let mut p = Parser { toks, pos: 0, reg: &reg, binders: Vec::new(), end_line, end_col };
    let t = p.parse_type()?;
    if let Some(l) = p.peek() {
        return Err(err_at(l.line, l.col, "unexpected trailing input"));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::super::{alpha_eq, pretty};
    use super::*;

    #[test]
    fn parses_prim_application_under_binder() {
        let reg = Registry::default();
        let t = parse(&reg, r"\x:Real. sin x").unwrap();
        let expect = Term::lam(
            "x",
            SimpleType::Real,
            Term::app(Term::prim("sin"), Term::var("x")),
        );
        assert!(alpha_eq(&t, &expect));
        // binder shadowing a primitive name demotes it to a variable
        let s = parse(&reg, r"\sin:Real. sin").unwrap();
        let expect = Term::lam("sin", SimpleType::Real, Term::var("sin"));
        assert!(alpha_eq(&s, &expect));
    }

    #[test]
    fn parses_projections_pairs_and_literals() {
        let reg = Registry::default();
        let t = parse(&reg, r"fst (3.0, \y:Real. y)").unwrap();
        let expect = Term::proj(
            1,
            Term::pair(
                Term::real(3.0),
                Term::lam("y", SimpleType::Real, Term::var("y")),
            ),
        );
        assert!(alpha_eq(&t, &expect));
        let neg = parse(&reg, "add -1.5 2e-2").unwrap();
        let expect = Term::app(
            Term::app(Term::prim("add"), Term::real(-1.5)),
            Term::real(0.02),
        );
        assert!(alpha_eq(&neg, &expect));
    }

    #[test]
    fn application_is_left_associative_and_lambda_extends_right() {
        let reg = Registry::default();
        let t = parse(&reg, "f a b").unwrap();
        let expect = Term::app(Term::app(Term::var("f"), Term::var("a")), Term::var("b"));
        assert!(alpha_eq(&t, &expect));
        let u = parse(&reg, r"\f:Real -> Real. f (f 0.0)").unwrap();
        let fnty = SimpleType::arrow(SimpleType::Real, SimpleType::Real);
        let expect = Term::lam(
            "f",
            fnty,
            Term::app(Term::var("f"), Term::app(Term::var("f"), Term::real(0.0))),
        );
        assert!(alpha_eq(&u, &expect));
    }

    #[test]
    fn type_grammar_matches_fixity() {
        assert_eq!(
            parse_type("Real * Real -> Real -> Real").unwrap(),
            SimpleType::arrow(
                SimpleType::prod(SimpleType::Real, SimpleType::Real),
                SimpleType::arrow(SimpleType::Real, SimpleType::Real)
            )
        );
        assert_eq!(
            parse_type("(Real -> Real) * Real").unwrap(),
            SimpleType::prod(
                SimpleType::arrow(SimpleType::Real, SimpleType::Real),
                SimpleType::Real
            )
        );
    }

    #[test]
    fn pretty_printing_round_trips() {
        let reg = Registry::default();
        let sources = [
            r"\x:Real. sin x",
            r"fst (3.0, \y:Real. y)",
            r"\f:(Real -> Real) -> Real. f (\x:Real. add x 1.0)",
            r"\p:Real * Real. mul (fst p) (snd p)",
            r"(\x:Real. x) 2.0",
            r"\y:Real. [] y",
            r"snd (fst ((1.0, 2.0), 3.0), -4.5)",
        ];
        for src in sources {
            let t = parse(&reg, src).unwrap();
            let printed = pretty(&t);
            let back = parse(&reg, &printed).unwrap();
            assert!(alpha_eq(&t, &back), "round trip failed: {src} -> {printed}");
        }
    }

    #[test]
    fn comments_and_newlines_are_skipped() {
        let reg = Registry::default();
        let src = "-- amplitude-shifted sine\n\\x:Real.   -- binder\n  sin x\n";
        let t = parse(&reg, src).unwrap();
        assert_eq!(pretty(&t), r"\x:Real. sin x");
    }

    #[test]
    fn errors_carry_line_and_column() {
        let reg = Registry::default();
        let err = parse(&reg, "\\x:Real.\n  sin (x").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
        assert!(msg.contains("end of input"), "{msg}");
        let err = parse(&reg, "fst ,").unwrap_err();
        assert!(err.to_string().contains("column 5"), "{err}");
        let err = parse(&reg, "\\x Real. x").unwrap_err();
        assert!(err.to_string().contains("`:`"), "{err}");
        let err = parse(&reg, "(1.0, 2.0) extra )").unwrap_err();
        assert!(err.to_string().contains("column 18") || err.to_string().contains("trailing"), "{err}");
    }

    #[test]
    fn spans_cover_source_slices() {
        let reg = Registry::default();
        let src = r"\x:Real. sin x";
        let t = parse(&reg, src).unwrap();
        assert_eq!(&src[t.span.lo..t.span.hi], src);
        if let TermKind::Lam(_, _, body) = &t.kind {
            assert_eq!(&src[body.span.lo..body.span.hi], "sin x");
        } else {
            panic!("expected a lambda");
        }
    }
}
