//! Syntax-directed typechecking; annotated binders make inference needless.

use super::prims::Registry;
use super::{LambdaError, Result, SimpleType, Term, TermKind};

fn type_err(msg: impl Into<String>) -> LambdaError {
    LambdaError::Type { msg: msg.into() }
}

fn check(
    reg: &Registry,
    env: &mut Vec<(String, SimpleType)>,
    hole: Option<&SimpleType>,
    t: &Term,
) -> Result<SimpleType> {
    match &t.kind {
        TermKind::Var(x) => match env.iter().rev().find(|(n, _)| n == x) {
            Some((_, ty)) => Ok(ty.clone()),
            None => Err(type_err(format!("unbound variable `{x}`"))),
        },
        TermKind::Lam(x, ty, body) => {
            env.push((x.clone(), ty.clone()));
            let out = check(reg, env, hole, body)?;
            env.pop();
            Ok(SimpleType::arrow(ty.clone(), out))
        }
        TermKind::App(f, a) => {
            let tf = check(reg, env, hole, f)?;
            let ta = check(reg, env, hole, a)?;
            match tf {
                SimpleType::Arrow(dom, cod) => {
                    if *dom == ta {
                        Ok(*cod)
                    } else {
                        Err(type_err(format!(
                            "application mismatch: function expects `{dom}`, argument has `{ta}`"
                        )))
                    }
                }
                other => Err(type_err(format!(
                    "application of a non-function of type `{other}`"
                ))),
            }
        }
        TermKind::Pair(a, b) => {
            let ta = check(reg, env, hole, a)?;
            let tb = check(reg, env, hole, b)?;
            Ok(SimpleType::prod(ta, tb))
        }
        TermKind::Proj(i, body) => {
            let tb = check(reg, env, hole, body)?;
            match tb {
                SimpleType::Prod(l, r) => Ok(if *i == 1 { *l } else { *r }),
                other => Err(type_err(format!(
                    "projection of a non-product of type `{other}`"
                ))),
            }
        }
        TermKind::RealConst(_) => Ok(SimpleType::Real),
        TermKind::Prim(name) => match reg.get(name) {
            Some(spec) => Ok(SimpleType::real_fn(spec.arity)),
            None => Err(type_err(format!("unknown primitive `{name}`"))),
        },
        TermKind::Hole => match hole {
            Some(ty) => Ok(ty.clone()),
            None => Err(type_err("hole outside a context typing".to_string())),
        },
    }
}

/// Type of `t` under `ctx`, which assigns types to free variables. Holes are
/// rejected; use [`typecheck_context`] for terms with a hole.
pub fn typecheck(reg: &Registry, ctx: &[(String, SimpleType)], t: &Term) -> Result<SimpleType> {
    let mut env = ctx.to_vec();
    check(reg, &mut env, None, t)
}

/// Type of context `c` when its hole is assigned `hole_ty`. Holes under
/// binders still receive `hole_ty`; plugging is capture-permitting, so the
/// typing of the plugged term is the caller's concern.
pub fn typecheck_context(
    reg: &Registry,
    ctx: &[(String, SimpleType)],
    c: &Term,
    hole_ty: &SimpleType,
) -> Result<SimpleType> {
    let mut env = ctx.to_vec();
    check(reg, &mut env, Some(hole_ty), c)
}
