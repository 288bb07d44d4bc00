//! The locally-Lipschitz model. A function value carries a family of
//! LL-constants alongside the function itself, and a difference at arrow type
//! is a function of the argument only (pointwise, not ball-quantified), so the
//! model's distances are pseudo-metrics and self-distance is exactly zero.
//!
//! Clauses of the derivative ∥t∥(x̄, ᾱ):
//!   constants ↦ 0, variables ↦ their budget, primitives ↦ Lip(f)(x̄)·Σᾱ,
//!   pair/projection structural,
//!   ∥λy.t∥(x̄, ᾱ) = λy. ∥t∥(x̄*y, ᾱ*0),
//!   ∥t u∥(x̄, ᾱ) = ∥t∥(x̄, ᾱ)(⟦u⟧) + fam(⟦t⟧)(⟦u⟧, ∥u∥(x̄, ᾱ)),
//! where fam(⟦t⟧) is the family component carried by the arrow value.
//! Every family is additive in its budget argument by construction: base
//! families are the linear maps α ↦ L·α with L finite.

mod check;
mod curry;

pub use check::{
    check_dlambda_props, check_lip_validity, default_lip_points, local_contextuality_bound,
    quotient_separate, LipReport, LocalCtxReport,
};
pub use curry::{check_additive, ll_curry, ll_uncurry, LLMap};

use std::sync::Arc;

use crate::ext::{self, INF};
use crate::lambda::{Registry, SimpleType, Term, TermKind};
use crate::quantale::{QuantaleError, Result};

type LLFn = Arc<dyn Fn(&LLValue) -> LLValue + Send + Sync>;
type LLFamFn = Arc<dyn Fn(&LLValue, &LLDiff) -> LLDiff + Send + Sync>;
type LLTableFn = Arc<dyn Fn(&LLValue) -> LLDiff + Send + Sync>;

/// A value of the model; arrow values are pairs of a function and a family of
/// LL-constants for it.
#[derive(Clone)]
pub enum LLValue {
    RealV(f64),
    PairV(Box<LLValue>, Box<LLValue>),
    ArrowV { f: LLFn, fam: LLFamFn },
}

impl LLValue {
    pub fn arrow(
        f: impl Fn(&LLValue) -> LLValue + Send + Sync + 'static,
        fam: impl Fn(&LLValue, &LLDiff) -> LLDiff + Send + Sync + 'static,
    ) -> Self {
        LLValue::ArrowV { f: Arc::new(f), fam: Arc::new(fam) }
    }

    pub fn as_real(&self) -> f64 {
        match self {
            LLValue::RealV(r) => *r,
            other => panic!("expected a real value, found {other:?}"),
        }
    }

    pub fn fst(&self) -> &LLValue {
        match self {
            LLValue::PairV(a, _) => a,
            other => panic!("expected a pair value, found {other:?}"),
        }
    }

    pub fn snd(&self) -> &LLValue {
        match self {
            LLValue::PairV(_, b) => b,
            other => panic!("expected a pair value, found {other:?}"),
        }
    }

    pub fn apply(&self, arg: &LLValue) -> LLValue {
        match self {
            LLValue::ArrowV { f, .. } => f(arg),
            other => panic!("expected a function value, found {other:?}"),
        }
    }

    /// The family component: a bound on the output difference when this very
    /// argument moves by the given budget.
    pub fn fam_apply(&self, arg: &LLValue, budget: &LLDiff) -> LLDiff {
        match self {
            LLValue::ArrowV { fam, .. } => fam(arg, budget),
            other => panic!("expected a function value, found {other:?}"),
        }
    }
}

impl std::fmt::Debug for LLValue {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LLValue::RealV(r) => write!(fm, "{r}"),
            LLValue::PairV(a, b) => write!(fm, "({a:?}, {b:?})"),
            LLValue::ArrowV { .. } => write!(fm, "<fn+family>"),
        }
    }
}

/// A difference; at arrow type it is indexed by the argument alone.
#[derive(Clone)]
pub enum LLDiff {
    DReal(f64),
    DPair(Box<LLDiff>, Box<LLDiff>),
    DFnTable(LLTableFn),
}

impl LLDiff {
    pub fn table(t: impl Fn(&LLValue) -> LLDiff + Send + Sync + 'static) -> Self {
        LLDiff::DFnTable(Arc::new(t))
    }

    pub fn as_real(&self) -> f64 {
        match self {
            LLDiff::DReal(r) => *r,
            other => panic!("expected a real difference, found {other:?}"),
        }
    }

    pub fn fst(&self) -> &LLDiff {
        match self {
            LLDiff::DPair(a, _) => a,
            other => panic!("expected a pair difference, found {other:?}"),
        }
    }

    pub fn snd(&self) -> &LLDiff {
        match self {
            LLDiff::DPair(_, b) => b,
            other => panic!("expected a pair difference, found {other:?}"),
        }
    }

    pub fn table_apply(&self, arg: &LLValue) -> LLDiff {
        match self {
            LLDiff::DFnTable(t) => t(arg),
            other => panic!("expected a tabled difference, found {other:?}"),
        }
    }
}

impl std::fmt::Debug for LLDiff {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LLDiff::DReal(r) => write!(fm, "{r}"),
            LLDiff::DPair(a, b) => write!(fm, "({a:?}, {b:?})"),
            LLDiff::DFnTable(_) => write!(fm, "<table>"),
        }
    }
}

/// Pointwise addition of differences.
pub fn ll_add(a: &LLDiff, b: &LLDiff) -> LLDiff {
    match (a, b) {
        (LLDiff::DReal(x), LLDiff::DReal(y)) => LLDiff::DReal(ext::add(*x, *y)),
        (LLDiff::DPair(a1, a2), LLDiff::DPair(b1, b2)) => {
            LLDiff::DPair(Box::new(ll_add(a1, b1)), Box::new(ll_add(a2, b2)))
        }
        (LLDiff::DFnTable(ta), LLDiff::DFnTable(tb)) => {
            let (ta, tb) = (ta.clone(), tb.clone());
            LLDiff::table(move |x| ll_add(&ta(x), &tb(x)))
        }
        _ => panic!("difference shapes disagree: {a:?} vs {b:?}"),
    }
}

/// The zero difference shaped after a value.
pub fn ll_zero_for(v: &LLValue) -> LLDiff {
    match v {
        LLValue::RealV(_) => LLDiff::DReal(0.0),
        LLValue::PairV(a, b) => LLDiff::DPair(Box::new(ll_zero_for(a)), Box::new(ll_zero_for(b))),
        LLValue::ArrowV { f, .. } => {
            let f = f.clone();
            LLDiff::table(move |x| ll_zero_for(&f(x)))
        }
    }
}

/// L·α with the 0-absorbing convention, so an infinite budget through a
/// constant stays zero.
fn ll_scale(l: f64, alpha: f64) -> f64 {
    if l == 0.0 || alpha == 0.0 {
        0.0
    } else {
        l * alpha
    }
}

#[derive(Clone, Debug, Default)]
pub struct LLEnv {
    vars: Vec<(String, LLValue)>,
}

impl LLEnv {
    pub fn empty() -> Self {
        LLEnv::default()
    }

    pub fn with(&self, name: &str, v: LLValue) -> Self {
        let mut vars = self.vars.clone();
        vars.push((name.to_string(), v));
        LLEnv { vars }
    }

    pub fn get(&self, name: &str) -> &LLValue {
        self.vars
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
            .unwrap_or_else(|| panic!("unbound variable `{name}` in the environment"))
    }
}

#[derive(Clone, Debug, Default)]
pub struct LLDiffEnv {
    vars: Vec<(String, LLDiff)>,
}

impl LLDiffEnv {
    pub fn empty() -> Self {
        LLDiffEnv::default()
    }

    pub fn with(&self, name: &str, d: LLDiff) -> Self {
        let mut vars = self.vars.clone();
        vars.push((name.to_string(), d));
        LLDiffEnv { vars }
    }

    pub fn get(&self, name: &str) -> &LLDiff {
        self.vars
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, d)| d)
            .unwrap_or_else(|| panic!("unbound variable `{name}` in the difference environment"))
    }

    /// Structurally zeroed copy, used when an abstraction freezes its context.
    pub fn zeroed(&self) -> Self {
        LLDiffEnv {
            vars: self.vars.iter().map(|(n, d)| (n.clone(), zero_of_diff(d))).collect(),
        }
    }
}

fn zero_of_diff(d: &LLDiff) -> LLDiff {
    match d {
        LLDiff::DReal(_) => LLDiff::DReal(0.0),
        LLDiff::DPair(a, b) => {
            LLDiff::DPair(Box::new(zero_of_diff(a)), Box::new(zero_of_diff(b)))
        }
        LLDiff::DFnTable(t) => {
            let t = t.clone();
            LLDiff::table(move |x| zero_of_diff(&t(x)))
        }
    }
}

/// Curried primitive value: each partial application carries the family that
/// bounds the effect of moving just-consumed argument k while later arguments
/// stay put, i.e. Lip(f)(x̄)·α with the budget concentrated in slot k.
fn prim_ll_value(spec: &crate::lambda::PrimitiveSpec, args: Vec<f64>) -> LLValue {
    let apply_spec = spec.clone();
    let app_args = args.clone();
    let fam_spec = spec.clone();
    LLValue::arrow(
        move |v: &LLValue| {
            let mut a = app_args.clone();
            a.push(v.as_real());
            if a.len() == apply_spec.arity {
                LLValue::RealV(apply_spec.eval(&a))
            } else {
                prim_ll_value(&apply_spec, a)
            }
        },
        move |v: &LLValue, d: &LLDiff| {
            let mut a = args.clone();
            a.push(v.as_real());
            prim_ll_fam(&fam_spec, a, d.as_real())
        },
    )
}

fn prim_ll_fam(spec: &crate::lambda::PrimitiveSpec, known: Vec<f64>, alpha: f64) -> LLDiff {
    if known.len() == spec.arity {
        let (l, _delta) = spec.lip(&known);
        LLDiff::DReal(ll_scale(l, alpha))
    } else {
        let spec = spec.clone();
        LLDiff::table(move |w: &LLValue| {
            let mut a = known.clone();
            a.push(w.as_real());
            prim_ll_fam(&spec, a, alpha)
        })
    }
}

/// Context-difference of a bare primitive: nested zero tables, since a
/// constant does not move with the context.
fn prim_ll_zero(spec: &crate::lambda::PrimitiveSpec, depth: usize) -> LLDiff {
    if depth == spec.arity {
        LLDiff::DReal(0.0)
    } else {
        let spec = spec.clone();
        LLDiff::table(move |_| prim_ll_zero(&spec, depth + 1))
    }
}

pub fn denote_ll(reg: &Registry, t: &Term, env: &LLEnv) -> LLValue {
    match &t.kind {
        TermKind::RealConst(r) => LLValue::RealV(*r),
        TermKind::Var(v) => env.get(v).clone(),
        TermKind::Prim(name) => {
            let spec = reg.get(name).unwrap_or_else(|| panic!("unknown primitive `{name}`"));
            prim_ll_value(spec, Vec::new())
        }
        TermKind::Pair(a, b) => LLValue::PairV(
            Box::new(denote_ll(reg, a, env)),
            Box::new(denote_ll(reg, b, env)),
        ),
        TermKind::Proj(1, p) => denote_ll(reg, p, env).fst().clone(),
        TermKind::Proj(_, p) => denote_ll(reg, p, env).snd().clone(),
        TermKind::Lam(v, _, body) => {
            let (reg_f, env_f, v_f, body_f) = (reg.clone(), env.clone(), v.clone(), (**body).clone());
            let (reg_g, env_g, v_g, body_g) = (reg.clone(), env.clone(), v.clone(), (**body).clone());
            LLValue::arrow(
                move |y: &LLValue| denote_ll(&reg_f, &body_f, &env_f.with(&v_f, y.clone())),
                // The family freezes the context (budgets 0) and charges only
                // the argument's budget.
                move |y: &LLValue, d: &LLDiff| {
                    deriv_ll(
                        &reg_g,
                        &body_g,
                        &env_g.with(&v_g, y.clone()),
                        &ll_zero_env(&env_g).with(&v_g, d.clone()),
                    )
                },
            )
        }
        TermKind::App(f, u) => denote_ll(reg, f, env).apply(&denote_ll(reg, u, env)),
        TermKind::Hole => panic!("hole outside a plugged context"),
    }
}

fn ll_zero_env(env: &LLEnv) -> LLDiffEnv {
    let mut denv = LLDiffEnv::empty();
    for (n, v) in &env.vars {
        denv = denv.with(n, ll_zero_for(v));
    }
    denv
}

pub fn deriv_ll(reg: &Registry, t: &Term, env: &LLEnv, denv: &LLDiffEnv) -> LLDiff {
    match &t.kind {
        TermKind::RealConst(_) => LLDiff::DReal(0.0),
        TermKind::Var(v) => denv.get(v).clone(),
        TermKind::Prim(name) => {
            let spec = reg.get(name).unwrap_or_else(|| panic!("unknown primitive `{name}`"));
            prim_ll_zero(spec, 0)
        }
        TermKind::Pair(a, b) => LLDiff::DPair(
            Box::new(deriv_ll(reg, a, env, denv)),
            Box::new(deriv_ll(reg, b, env, denv)),
        ),
        TermKind::Proj(1, p) => deriv_ll(reg, p, env, denv).fst().clone(),
        TermKind::Proj(_, p) => deriv_ll(reg, p, env, denv).snd().clone(),
        TermKind::Lam(v, _, body) => {
            let (reg, env, denv) = (reg.clone(), env.clone(), denv.clone());
            let (v, body) = (v.clone(), (**body).clone());
            LLDiff::table(move |y: &LLValue| {
                deriv_ll(&reg, &body, &env.with(&v, y.clone()), &denv.with(&v, ll_zero_for(y)))
            })
        }
        TermKind::App(f, u) => {
            let fv = denote_ll(reg, f, env);
            let uv = denote_ll(reg, u, env);
            let fd = deriv_ll(reg, f, env, denv);
            let ud = deriv_ll(reg, u, env, denv);
            ll_add(&fd.table_apply(&uv), &fv.fam_apply(&uv, &ud))
        }
        TermKind::Hole => panic!("hole outside a plugged context"),
    }
}

/// The model's distance is pointwise at arrow types:
/// a_{σ→τ}(f, g)(x) = a_τ(f(x), g(x)). Self-distance is exactly zero.
pub fn ll_dist(ty: &SimpleType, f: &LLValue, g: &LLValue) -> LLDiff {
    match ty {
        SimpleType::Real => LLDiff::DReal((f.as_real() - g.as_real()).abs()),
        SimpleType::Prod(a, b) => LLDiff::DPair(
            Box::new(ll_dist(a, f.fst(), g.fst())),
            Box::new(ll_dist(b, f.snd(), g.snd())),
        ),
        SimpleType::Arrow(_, cod) => {
            let (f, g, cod) = (f.clone(), g.clone(), (**cod).clone());
            LLDiff::table(move |x| ll_dist(&cod, &f.apply(x), &g.apply(x)))
        }
    }
}

/// Probe values per type layer, mirroring the sampled-distance probes.
pub fn ll_value_probes(ty: &SimpleType) -> Result<Vec<LLValue>> {
    match ty {
        SimpleType::Real => Ok([-2.0, -1.0, -0.4, 0.0, 0.5, 1.0, 1.5, 2.0]
            .iter()
            .map(|&r| LLValue::RealV(r))
            .collect()),
        SimpleType::Prod(a, b) => {
            let (pa, pb) = (ll_value_probes(a)?, ll_value_probes(b)?);
            let mut out = Vec::new();
            for (i, x) in pa.iter().enumerate() {
                // staggered pairing keeps the set small but varied
                let y = &pb[i % pb.len()];
                out.push(LLValue::PairV(Box::new(x.clone()), Box::new(y.clone())));
            }
            Ok(out)
        }
        SimpleType::Arrow(dom, cod) if **dom == SimpleType::Real && **cod == SimpleType::Real => {
            fn lift(name: &str, f: fn(f64) -> f64, l: f64) -> LLValue {
                let _ = name;
                LLValue::arrow(
                    move |x: &LLValue| LLValue::RealV(f(x.as_real())),
                    move |_, d: &LLDiff| LLDiff::DReal(ll_scale(l, d.as_real())),
                )
            }
            Ok(vec![
                lift("id", |x| x, 1.0),
                lift("sin", f64::sin, 1.0),
                lift("affine", |x| 2.0 * x + 1.0, 2.0),
                lift("const", |_| 0.7, 0.0),
            ])
        }
        other => Err(QuantaleError::Unsupported(format!(
            "no probe set for values of type {other}"
        ))),
    }
}

/// Largest scalar reachable in a difference by probing tables at the domain's
/// probe values. Used for gates and comparisons.
pub fn ll_diff_sup(ty: &SimpleType, d: &LLDiff) -> Result<f64> {
    match ty {
        SimpleType::Real => Ok(d.as_real()),
        SimpleType::Prod(a, b) => Ok(ll_diff_sup(a, d.fst())?.max(ll_diff_sup(b, d.snd())?)),
        SimpleType::Arrow(dom, cod) => {
            let mut sup: f64 = 0.0;
            for p in ll_value_probes(dom)? {
                sup = sup.max(ll_diff_sup(cod, &d.table_apply(&p))?);
            }
            Ok(sup)
        }
    }
}

/// Max disagreement of two differences over the probe set.
pub fn ll_diff_gap(ty: &SimpleType, a: &LLDiff, b: &LLDiff) -> Result<f64> {
    match ty {
        SimpleType::Real => Ok(ext::abs_diff(a.as_real(), b.as_real())),
        SimpleType::Prod(s, t) => {
            Ok(ll_diff_gap(s, a.fst(), b.fst())?.max(ll_diff_gap(t, a.snd(), b.snd())?))
        }
        SimpleType::Arrow(dom, cod) => {
            let mut gap: f64 = 0.0;
            for p in ll_value_probes(dom)? {
                gap = gap.max(ll_diff_gap(cod, &a.table_apply(&p), &b.table_apply(&p))?);
            }
            Ok(gap)
        }
    }
}

/// Max disagreement of two values over the probe set.
pub fn ll_value_gap(ty: &SimpleType, a: &LLValue, b: &LLValue) -> Result<f64> {
    match ty {
        SimpleType::Real => Ok(ext::abs_diff(a.as_real(), b.as_real())),
        SimpleType::Prod(s, t) => {
            Ok(ll_value_gap(s, a.fst(), b.fst())?.max(ll_value_gap(t, a.snd(), b.snd())?))
        }
        SimpleType::Arrow(dom, cod) => {
            let mut gap: f64 = 0.0;
            for p in ll_value_probes(dom)? {
                gap = gap.max(ll_value_gap(cod, &a.apply(&p), &b.apply(&p))?);
            }
            Ok(gap)
        }
    }
}

/// A downward set of budgets closed under addition; the finiteness side
/// condition of the model. For the half-line the filter is [0, ∞).
#[derive(Clone)]
pub struct FinFilter {
    pub name: &'static str,
    pred: Arc<dyn Fn(f64) -> bool + Send + Sync>,
}

impl FinFilter {
    pub fn finite_reals() -> Self {
        FinFilter { name: "[0,inf)", pred: Arc::new(|x| x < INF) }
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.pred)(x)
    }

    /// Componentwise at products, pointwise over domain probes at arrows.
    pub fn contains_diff(&self, ty: &SimpleType, d: &LLDiff) -> Result<bool> {
        Ok(self.contains(ll_diff_sup(ty, d)?))
    }
}

impl std::fmt::Debug for FinFilter {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(fm, "FinFilter({})", self.name)
    }
}

/// A local Lipschitz witness: the constant and the strictly positive radius
/// on which it is claimed.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct LipWitness {
    pub l: f64,
    pub delta: f64,
}

impl LipWitness {
    pub fn new(l: f64, delta: f64) -> Self {
        assert!(delta > 0.0, "a validity radius must be strictly positive");
        LipWitness { l, delta }
    }
}
