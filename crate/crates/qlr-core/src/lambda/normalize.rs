//! β-reduction: λ-redexes, projections of pairs, and δ-rules that fold a
//! primitive applied to a full spine of real constants. Substitution is
//! capture-avoiding; normalization is strong (reduces under binders), so
//! normal forms of well-typed terms are unique up to α-equivalence.

use super::prims::Registry;
use super::{Term, TermKind};

fn fresh_name(base: &str, forbidden: &[String]) -> String {
    let mut name = format!("{base}'");
    while forbidden.iter().any(|f| f == &name) {
        name.push('\'');
    }
    name
}

/// t[x := v], renaming binders that would capture free variables of `v`.
pub fn subst(t: &Term, x: &str, v: &Term) -> Term {
    match &t.kind {
        TermKind::Var(y) => {
            if y == x {
                v.clone()
            } else {
                t.clone()
            }
        }
        TermKind::Lam(y, ty, b) => {
            if y == x {
                t.clone()
            } else if v.free_vars().iter().any(|f| f == y) {
                let mut forbidden = v.free_vars();
                forbidden.extend(b.free_vars());
                forbidden.push(x.to_string());
                let fresh = fresh_name(y, &forbidden);
                let renamed = subst(b, y, &Term::var(fresh.clone()));
                Term::new(TermKind::Lam(fresh, ty.clone(), Box::new(subst(&renamed, x, v))))
            } else {
                Term::new(TermKind::Lam(y.clone(), ty.clone(), Box::new(subst(b, x, v))))
            }
        }
        TermKind::App(f, a) => Term::app(subst(f, x, v), subst(a, x, v)),
        TermKind::Pair(a, b) => Term::pair(subst(a, x, v), subst(b, x, v)),
        TermKind::Proj(i, b) => Term::proj(*i, subst(b, x, v)),
        TermKind::RealConst(_) | TermKind::Prim(_) | TermKind::Hole => t.clone(),
    }
}

/// Spine view: (head, arguments left to right).
fn spine(t: &Term) -> (&Term, Vec<&Term>) {
    let mut args = Vec::new();
    let mut cur = t;
    while let TermKind::App(f, a) = &cur.kind {
        args.push(a.as_ref());
        cur = f;
    }
    args.reverse();
    (cur, args)
}

/// δ-rule at the root: a primitive applied to exactly `arity` real constants
/// folds to its value.
fn delta_root(reg: &Registry, t: &Term) -> Option<Term> {
    let (head, args) = spine(t);
    let name = match &head.kind {
        TermKind::Prim(p) => p,
        _ => return None,
    };
    let prim = reg.get(name)?;
    if args.len() != prim.arity {
        return None;
    }
    let mut vals = Vec::with_capacity(args.len());
    for a in &args {
        match a.kind {
            TermKind::RealConst(r) => vals.push(r),
            _ => return None,
        }
    }
    Some(Term::real(prim.eval(&vals)))
}

fn root_step(reg: &Registry, t: &Term) -> Option<Term> {
    match &t.kind {
        TermKind::App(f, a) => {
            if let TermKind::Lam(x, _, body) = &f.kind {
                return Some(subst(body, x, a));
            }
            delta_root(reg, t)
        }
        TermKind::Proj(i, b) => match &b.kind {
            TermKind::Pair(l, r) => Some(if *i == 1 { (**l).clone() } else { (**r).clone() }),
            _ => None,
        },
        _ => None,
    }
}

/// One leftmost-outermost reduction step, `None` on normal forms.
pub fn beta_step(reg: &Registry, t: &Term) -> Option<Term> {
    if let Some(r) = root_step(reg, t) {
        return Some(r);
    }
    match &t.kind {
        TermKind::Lam(x, ty, b) => beta_step(reg, b)
            .map(|b2| Term::new(TermKind::Lam(x.clone(), ty.clone(), Box::new(b2)))),
        TermKind::App(f, a) => {
            if let Some(f2) = beta_step(reg, f) {
                return Some(Term::app(f2, (**a).clone()));
            }
            beta_step(reg, a).map(|a2| Term::app((**f).clone(), a2))
        }
        TermKind::Pair(a, b) => {
            if let Some(a2) = beta_step(reg, a) {
                return Some(Term::pair(a2, (**b).clone()));
            }
            beta_step(reg, b).map(|b2| Term::pair((**a).clone(), b2))
        }
        TermKind::Proj(i, b) => beta_step(reg, b).map(|b2| Term::proj(*i, b2)),
        _ => None,
    }
}

/// One rightmost-innermost reduction step; used to cross-check confluence.
pub fn innermost_step(reg: &Registry, t: &Term) -> Option<Term> {
    match &t.kind {
        TermKind::Lam(x, ty, b) => {
            if let Some(b2) = innermost_step(reg, b) {
                return Some(Term::new(TermKind::Lam(x.clone(), ty.clone(), Box::new(b2))));
            }
        }
        TermKind::App(f, a) => {
            if let Some(a2) = innermost_step(reg, a) {
                return Some(Term::app((**f).clone(), a2));
            }
            if let Some(f2) = innermost_step(reg, f) {
                return Some(Term::app(f2, (**a).clone()));
            }
        }
        TermKind::Pair(a, b) => {
            if let Some(b2) = innermost_step(reg, b) {
                return Some(Term::pair((**a).clone(), b2));
            }
            if let Some(a2) = innermost_step(reg, a) {
                return Some(Term::pair(a2, (**b).clone()));
            }
        }
        TermKind::Proj(i, b) => {
            if let Some(b2) = innermost_step(reg, b) {
                return Some(Term::proj(*i, b2));
            }
        }
        _ => {}
    }
    root_step(reg, t)
}

/// β-normal form. Well-typed terms always terminate; a generous fuel bound
/// guards against accidental use on untypeable self-application.
pub fn normalize(reg: &Registry, t: &Term) -> Term {
    let mut cur = t.clone();
    for _ in 0..1_000_000 {
        match beta_step(reg, &cur) {
            Some(next) => cur = next,
            None => return cur,
        }
    }
    panic!("normalization exceeded the step budget; the term is not simply typed");
}
