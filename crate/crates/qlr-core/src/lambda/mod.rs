//! Simply typed λ-calculus over the reals with primitive function symbols.
//!
//! Terms are Church-style at the surface (binders carry type annotations) so
//! typechecking is syntax-directed. The calculus is total: β-reduction plus
//! projection rules plus δ-rules on fully applied primitives with all-constant
//! arguments, strongly normalizing. Contexts are terms with a hole `[]`;
//! plugging is capture-permitting by convention.

mod normalize;
mod parse;
mod prims;
mod types;

pub use normalize::{beta_step, innermost_step, normalize, subst};
pub use parse::{parse, parse_type};
pub use prims::{PrimitiveSpec, Registry};
pub use types::{typecheck, typecheck_context};

use std::fmt;

#[derive(Debug, Clone, thiserror::Error)]
pub enum LambdaError {
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("type error: {msg}")]
    Type { msg: String },
}

pub type Result<T> = std::result::Result<T, LambdaError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimpleType {
    Real,
    Prod(Box<SimpleType>, Box<SimpleType>),
    Arrow(Box<SimpleType>, Box<SimpleType>),
}

impl SimpleType {
    pub fn arrow(a: SimpleType, b: SimpleType) -> SimpleType {
        SimpleType::Arrow(Box::new(a), Box::new(b))
    }

    pub fn prod(a: SimpleType, b: SimpleType) -> SimpleType {
        SimpleType::Prod(Box::new(a), Box::new(b))
    }

    /// Real → Real → … → Real with `arity` arguments.
    pub fn real_fn(arity: usize) -> SimpleType {
        let mut t = SimpleType::Real;
        for _ in 0..arity {
            t = SimpleType::arrow(SimpleType::Real, t);
        }
        t
    }

    pub fn is_first_order(&self) -> bool {
        match self {
            SimpleType::Real => true,
            SimpleType::Prod(a, b) => a.is_first_order() && b.is_first_order(),
            SimpleType::Arrow(a, b) => {
                fn no_arrow(t: &SimpleType) -> bool {
                    match t {
                        SimpleType::Real => true,
                        SimpleType::Prod(a, b) => no_arrow(a) && no_arrow(b),
                        SimpleType::Arrow(..) => false,
                    }
                }
                no_arrow(a) && b.is_first_order()
            }
        }
    }
}

impl fmt::Display for SimpleType {
    /// `->` right-associative, `*` left-associative and binding tighter.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleType::Real => write!(f, "Real"),
            SimpleType::Arrow(a, b) => {
                match **a {
                    SimpleType::Arrow(..) => write!(f, "({a}) -> {b}"),
                    _ => write!(f, "{a} -> {b}"),
                }
            }
            SimpleType::Prod(a, b) => {
                let left = match **a {
                    SimpleType::Arrow(..) => format!("({a})"),
                    _ => format!("{a}"),
                };
                let right = match **b {
                    SimpleType::Arrow(..) | SimpleType::Prod(..) => format!("({b})"),
                    _ => format!("{b}"),
                };
                write!(f, "{left} * {right}")
            }
        }
    }
}

/// Byte range into the source the node was parsed from; synthesized nodes
/// use an empty span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub lo: usize,
    pub hi: usize,
}

#[derive(Debug, Clone)]
pub struct Term {
    pub kind: TermKind,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum TermKind {
    Var(String),
    Lam(String, SimpleType, Box<Term>),
    App(Box<Term>, Box<Term>),
    Pair(Box<Term>, Box<Term>),
    /// 1-based projection index, 1 or 2.
    Proj(u8, Box<Term>),
    RealConst(f64),
    Prim(String),
    /// Context hole `[]`.
    Hole,
}

impl Term {
    pub fn new(kind: TermKind) -> Term {
        Term { kind, span: Span::default() }
    }

    pub fn var(name: impl Into<String>) -> Term {
        Term::new(TermKind::Var(name.into()))
    }

    pub fn lam(name: impl Into<String>, ty: SimpleType, body: Term) -> Term {
        Term::new(TermKind::Lam(name.into(), ty, Box::new(body)))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::new(TermKind::App(Box::new(f), Box::new(a)))
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::new(TermKind::Pair(Box::new(a), Box::new(b)))
    }

    pub fn proj(i: u8, t: Term) -> Term {
        Term::new(TermKind::Proj(i, Box::new(t)))
    }

    pub fn real(r: f64) -> Term {
        Term::new(TermKind::RealConst(r))
    }

    pub fn prim(name: impl Into<String>) -> Term {
        Term::new(TermKind::Prim(name.into()))
    }

    pub fn hole() -> Term {
        Term::new(TermKind::Hole)
    }

    pub fn free_vars(&self) -> Vec<String> {
        fn walk(t: &Term, bound: &mut Vec<String>, out: &mut Vec<String>) {
            match &t.kind {
                TermKind::Var(x) => {
                    if !bound.iter().any(|b| b == x) && !out.iter().any(|o| o == x) {
                        out.push(x.clone());
                    }
                }
                TermKind::Lam(x, _, b) => {
                    bound.push(x.clone());
                    walk(b, bound, out);
                    bound.pop();
                }
                TermKind::App(f, a) | TermKind::Pair(f, a) => {
                    walk(f, bound, out);
                    walk(a, bound, out);
                }
                TermKind::Proj(_, b) => walk(b, bound, out),
                TermKind::RealConst(_) | TermKind::Prim(_) | TermKind::Hole => {}
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn hole_count(&self) -> usize {
        match &self.kind {
            TermKind::Hole => 1,
            TermKind::Lam(_, _, b) | TermKind::Proj(_, b) => b.hole_count(),
            TermKind::App(f, a) | TermKind::Pair(f, a) => f.hole_count() + a.hole_count(),
            _ => 0,
        }
    }
}

/// Structural α-equivalence; spans and bound names are ignored.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    fn go(a: &Term, b: &Term, env_a: &mut Vec<String>, env_b: &mut Vec<String>) -> bool {
        use TermKind::*;
        match (&a.kind, &b.kind) {
            (Var(x), Var(y)) => {
                let ia = env_a.iter().rposition(|v| v == x);
                let ib = env_b.iter().rposition(|v| v == y);
                match (ia, ib) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (Lam(x, tx, ba), Lam(y, ty, bb)) => {
                if tx != ty {
                    return false;
                }
                env_a.push(x.clone());
                env_b.push(y.clone());
                let r = go(ba, bb, env_a, env_b);
                env_a.pop();
                env_b.pop();
                r
            }
            (App(f1, a1), App(f2, a2)) | (Pair(f1, a1), Pair(f2, a2)) => {
                go(f1, f2, env_a, env_b) && go(a1, a2, env_a, env_b)
            }
            (Proj(i, t1), Proj(j, t2)) => i == j && go(t1, t2, env_a, env_b),
            (RealConst(r), RealConst(s)) => r == s || (r.is_nan() && s.is_nan()),
            (Prim(p), Prim(q)) => p == q,
            (Hole, Hole) => true,
            _ => false,
        }
    }
    go(a, b, &mut Vec::new(), &mut Vec::new())
}

/// Capture-permitting hole filling: every `[]` in `c` becomes `t`, with the
/// context's binders allowed to capture free variables of `t`.
pub fn plug_context(c: &Term, t: &Term) -> Term {
    let kind = match &c.kind {
        TermKind::Hole => return t.clone(),
        TermKind::Var(x) => TermKind::Var(x.clone()),
        TermKind::Lam(x, ty, b) => {
            TermKind::Lam(x.clone(), ty.clone(), Box::new(plug_context(b, t)))
        }
        TermKind::App(f, a) => {
            TermKind::App(Box::new(plug_context(f, t)), Box::new(plug_context(a, t)))
        }
        TermKind::Pair(a, b) => {
            TermKind::Pair(Box::new(plug_context(a, t)), Box::new(plug_context(b, t)))
        }
        TermKind::Proj(i, b) => TermKind::Proj(*i, Box::new(plug_context(b, t))),
        TermKind::RealConst(r) => TermKind::RealConst(*r),
        TermKind::Prim(p) => TermKind::Prim(p.clone()),
    };
    Term { kind, span: c.span }
}

/// Pretty-print in the surface grammar; `parse(pretty(t))` is α-equal to `t`.
pub fn pretty(t: &Term) -> String {
    fn atom(t: &Term, out: &mut String) {
        match &t.kind {
            TermKind::Var(x) => out.push_str(x),
            TermKind::Prim(p) => out.push_str(p),
            TermKind::RealConst(r) => {
                if *r == f64::INFINITY {
                    out.push_str("inf");
                } else if r.fract() == 0.0 && r.abs() < 1e15 {
                    out.push_str(&format!("{r:.1}"));
                } else {
                    out.push_str(&format!("{r}"));
                }
            }
            TermKind::Hole => out.push_str("[]"),
            TermKind::Pair(a, b) => {
                out.push('(');
                term(a, out);
                out.push_str(", ");
                term(b, out);
                out.push(')');
            }
            TermKind::Proj(i, b) => {
                out.push_str(if *i == 1 { "fst " } else { "snd " });
                atom(b, out);
            }
            _ => {
                out.push('(');
                term(t, out);
                out.push(')');
            }
        }
    }
    fn term(t: &Term, out: &mut String) {
        match &t.kind {
            TermKind::Lam(x, ty, b) => {
                out.push_str(&format!("\\{x}:{ty}. "));
                term(b, out);
            }
            TermKind::App(f, a) => {
                match f.kind {
                    TermKind::App(..) => term(f, out),
                    _ => atom(f, out),
                }
                out.push(' ');
                atom(a, out);
            }
            _ => atom(t, out),
        }
    }
    let mut out = String::new();
    term(t, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type_display_matches_precedence() {
        let t = SimpleType::arrow(
            SimpleType::prod(SimpleType::Real, SimpleType::Real),
            SimpleType::Real,
        );
        assert_eq!(t.to_string(), "Real * Real -> Real");
        let nested = SimpleType::arrow(
            SimpleType::arrow(SimpleType::Real, SimpleType::Real),
            SimpleType::Real,
        );
        assert_eq!(nested.to_string(), "(Real -> Real) -> Real");
        let pr = SimpleType::prod(
            SimpleType::Real,
            SimpleType::prod(SimpleType::Real, SimpleType::Real),
        );
        assert_eq!(pr.to_string(), "Real * (Real * Real)");
    }

    #[test]
    fn alpha_equivalence_ignores_binder_names() {
        let a = Term::lam("x", SimpleType::Real, Term::var("x"));
        let b = Term::lam("y", SimpleType::Real, Term::var("y"));
        assert!(alpha_eq(&a, &b));
        let c = Term::lam("x", SimpleType::Real, Term::var("z"));
        let d = Term::lam("y", SimpleType::Real, Term::var("z"));
        assert!(alpha_eq(&c, &d));
        assert!(!alpha_eq(&a, &c));
    }

    #[test]
    fn plugging_permits_capture() {
        // C = λy:Real.[], t = y  →  λy. y
        let c = Term::lam("y", SimpleType::Real, Term::hole());
        let plugged = plug_context(&c, &Term::var("y"));
        assert!(alpha_eq(&plugged, &Term::lam("y", SimpleType::Real, Term::var("y"))));
        // empty context
        let id = Term::hole();
        assert!(alpha_eq(&plug_context(&id, &Term::real(1.0)), &Term::real(1.0)));
    }

    #[test]
    fn free_variable_listing_is_ordered_and_deduplicated() {
        let t = Term::app(
            Term::app(Term::var("f"), Term::lam("x", SimpleType::Real, Term::var("x"))),
            Term::app(Term::var("g"), Term::var("f")),
        );
        assert_eq!(t.free_vars(), vec!["f".to_string(), "g".to_string()]);
    }
}
