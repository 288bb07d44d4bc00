//! Denotational semantics over ℝ with derivative maps.
//!
//! Every typed term t gets a set-theoretic denotation ⟦t⟧ and a derivative
//! ∥t∥ measuring how much the output can move when the inputs move within
//! given budgets. Two derivative models are provided: the plain one (the
//! canonical lax interpretation) and the reflexive one, which subtracts the
//! self-variation of a function at abstraction sites and joins it back at
//! application sites. Derivatives of primitives use their modulus, an upper
//! bound on the true pointwise variation, so every derivative computed here
//! over-approximates while every sampled supremum under-approximates; sound
//! assertions compare sampled ≤ derived.

mod corpus;
mod ctx;
mod dist;
mod fig;

pub use corpus::{corpus_steps, soundness_corpus, CorpusTerm};
pub use ctx::{contextuality_bound, ContextualityReport};
pub use dist::{
    budget_probes, dist_d, dist_e, diff_probe_eq, diff_probe_leq, sample_dist, value_probe_eq,
    value_probes,
};
pub use fig::{fig1_csv, non_additivity_witness, reproduce_fig1, Fig1Report, Fig1Variant,
    NonAdditivityReport};

use crate::lambda::{Registry, Term, TermKind};
use std::fmt;
use std::sync::Arc;

type Clos = Arc<dyn Fn(&Value) -> Value + Send + Sync>;
type DiffClos = Arc<dyn Fn(&Value, &Diff) -> Diff + Send + Sync>;

/// ⟦Real⟧ = ℝ, ⟦σ×τ⟧ = pairs, ⟦σ→τ⟧ = host closures.
#[derive(Clone)]
pub enum Value {
    RealV(f64),
    PairV(Box<Value>, Box<Value>),
    ClosV(Clos),
}

impl Value {
    pub fn closure(f: impl Fn(&Value) -> Value + Send + Sync + 'static) -> Value {
        Value::ClosV(Arc::new(f))
    }

    /// Lift an ℝ→ℝ host function.
    pub fn real_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Value {
        Value::closure(move |v| Value::RealV(f(v.as_real())))
    }

    pub fn as_real(&self) -> f64 {
        match self {
            Value::RealV(r) => *r,
            _ => panic!("expected a real value"),
        }
    }

    pub fn fst(&self) -> &Value {
        match self {
            Value::PairV(a, _) => a,
            _ => panic!("expected a pair value"),
        }
    }

    pub fn snd(&self) -> &Value {
        match self {
            Value::PairV(_, b) => b,
            _ => panic!("expected a pair value"),
        }
    }

    pub fn apply(&self, arg: &Value) -> Value {
        match self {
            Value::ClosV(f) => f(arg),
            _ => panic!("applied a non-function value"),
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::RealV(r) => write!(f, "{r}"),
            Value::PairV(a, b) => write!(f, "({a:?}, {b:?})"),
            Value::ClosV(_) => write!(f, "<fn>"),
        }
    }
}

/// ∇Real = [0, ∞], ∇(σ×τ) = products, ∇(σ→τ) = functions over ⟦σ⟧ × ∇σ.
#[derive(Clone)]
pub enum Diff {
    DReal(f64),
    DPair(Box<Diff>, Box<Diff>),
    DFn(DiffClos),
}

impl Diff {
    pub fn dfn(f: impl Fn(&Value, &Diff) -> Diff + Send + Sync + 'static) -> Diff {
        Diff::DFn(Arc::new(f))
    }

    pub fn as_real(&self) -> f64 {
        match self {
            Diff::DReal(r) => *r,
            _ => panic!("expected a real difference"),
        }
    }

    pub fn fst(&self) -> &Diff {
        match self {
            Diff::DPair(a, _) => a,
            _ => panic!("expected a pair difference"),
        }
    }

    pub fn snd(&self) -> &Diff {
        match self {
            Diff::DPair(_, b) => b,
            _ => panic!("expected a pair difference"),
        }
    }

    pub fn apply(&self, v: &Value, d: &Diff) -> Diff {
        match self {
            Diff::DFn(f) => f(v, d),
            _ => panic!("applied a non-function difference"),
        }
    }
}

impl fmt::Debug for Diff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diff::DReal(r) => write!(f, "{r}"),
            Diff::DPair(a, b) => write!(f, "({a:?}, {b:?})"),
            Diff::DFn(_) => write!(f, "<dfn>"),
        }
    }
}

/// Pointwise join (maximum at the real layer).
pub fn diff_join(a: &Diff, b: &Diff) -> Diff {
    match (a, b) {
        (Diff::DReal(x), Diff::DReal(y)) => Diff::DReal(x.max(*y)),
        (Diff::DPair(a1, a2), Diff::DPair(b1, b2)) => {
            Diff::DPair(Box::new(diff_join(a1, b1)), Box::new(diff_join(a2, b2)))
        }
        (Diff::DFn(f), Diff::DFn(g)) => {
            let (f, g) = (f.clone(), g.clone());
            Diff::dfn(move |v, d| diff_join(&f(v, d), &g(v, d)))
        }
        _ => panic!("joined differences of different shapes"),
    }
}

/// Pointwise residuated difference: a ⇐ b is 0 where a ≤ b and a elsewhere.
pub fn diff_heyting(a: &Diff, b: &Diff) -> Diff {
    match (a, b) {
        (Diff::DReal(x), Diff::DReal(y)) => {
            Diff::DReal(if *x <= *y { 0.0 } else { *x })
        }
        (Diff::DPair(a1, a2), Diff::DPair(b1, b2)) => {
            Diff::DPair(Box::new(diff_heyting(a1, b1)), Box::new(diff_heyting(a2, b2)))
        }
        (Diff::DFn(f), Diff::DFn(g)) => {
            let (f, g) = (f.clone(), g.clone());
            Diff::dfn(move |v, d| diff_heyting(&f(v, d), &g(v, d)))
        }
        _ => panic!("compared differences of different shapes"),
    }
}

/// The bottom difference of the same shape as `d`; function layers are
/// zeroed lazily by zeroing whatever the original returns.
pub fn zero_like(d: &Diff) -> Diff {
    match d {
        Diff::DReal(_) => Diff::DReal(0.0),
        Diff::DPair(a, b) => Diff::DPair(Box::new(zero_like(a)), Box::new(zero_like(b))),
        Diff::DFn(f) => {
            let f = f.clone();
            Diff::dfn(move |v, d| zero_like(&f(v, d)))
        }
    }
}

#[derive(Clone, Default, Debug)]
pub struct Env {
    vars: Vec<(String, Value)>,
}

impl Env {
    pub fn empty() -> Env {
        Env::default()
    }

    pub fn with(&self, name: impl Into<String>, v: Value) -> Env {
        let mut vars = self.vars.clone();
        vars.push((name.into(), v));
        Env { vars }
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.vars.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

#[derive(Clone, Default, Debug)]
pub struct DiffEnv {
    vars: Vec<(String, Diff)>,
}

impl DiffEnv {
    pub fn empty() -> DiffEnv {
        DiffEnv::default()
    }

    pub fn with(&self, name: impl Into<String>, d: Diff) -> DiffEnv {
        let mut vars = self.vars.clone();
        vars.push((name.into(), d));
        DiffEnv { vars }
    }

    pub fn get(&self, name: &str) -> Option<&Diff> {
        self.vars.iter().rev().find(|(n, _)| n == name).map(|(_, d)| d)
    }

    pub fn zeroed(&self) -> DiffEnv {
        DiffEnv {
            vars: self.vars.iter().map(|(n, d)| (n.clone(), zero_like(d))).collect(),
        }
    }
}

/// Grid used by every sampled supremum. Suprema are taken over inclusive
/// uniform grids, so refining the point count (by an integer factor on
/// points−1) never loses previously seen samples.
#[derive(Clone, Debug)]
pub struct GridConfig {
    /// Points per bounded interval, endpoints included.
    pub points: usize,
    /// Half-width substituted for an infinite budget.
    pub window: f64,
    /// Probe radii used by the standard probe sets.
    pub radii: Vec<f64>,
}

impl Default for GridConfig {
    fn default() -> GridConfig {
        GridConfig {
            points: 1001,
            window: 8.0,
            radii: vec![0.0, 0.1, 1.0, std::f64::consts::FRAC_PI_2],
        }
    }
}

impl GridConfig {
    pub fn coarse(points: usize) -> GridConfig {
        GridConfig { points, ..GridConfig::default() }
    }

    pub fn grid(&self, lo: f64, hi: f64) -> Vec<f64> {
        if lo == hi || self.points <= 1 {
            return vec![lo];
        }
        let n = self.points - 1;
        (0..=n).map(|i| lo + (hi - lo) * (i as f64) / (n as f64)).collect()
    }

    /// Sample points of the closed ball around x with the given budget.
    pub fn ball(&self, x: f64, alpha: f64) -> Vec<f64> {
        if alpha <= 0.0 {
            return vec![x];
        }
        let r = if alpha.is_finite() { alpha } else { self.window };
        self.grid(x - r, x + r)
    }
}

/// Standard set-theoretic denotation. Pre: `t` is well typed and `env`
/// covers its free variables; holes have no denotation.
pub fn denote(reg: &Registry, t: &Term, env: &Env) -> Value {
    match &t.kind {
        TermKind::Var(x) => env
            .get(x)
            .unwrap_or_else(|| panic!("unbound variable `{x}` in evaluation"))
            .clone(),
        TermKind::RealConst(r) => Value::RealV(*r),
        TermKind::Prim(name) => prim_value(reg, name, Vec::new()),
        TermKind::Lam(x, _, body) => {
            let reg = reg.clone();
            let env = env.clone();
            let x = x.clone();
            let body = (**body).clone();
            Value::closure(move |v| denote(&reg, &body, &env.with(x.clone(), v.clone())))
        }
        TermKind::App(f, a) => denote(reg, f, env).apply(&denote(reg, a, env)),
        TermKind::Pair(a, b) => Value::PairV(
            Box::new(denote(reg, a, env)),
            Box::new(denote(reg, b, env)),
        ),
        TermKind::Proj(i, b) => {
            let v = denote(reg, b, env);
            if *i == 1 { v.fst().clone() } else { v.snd().clone() }
        }
        TermKind::Hole => panic!("a hole has no denotation; plug the context first"),
    }
}

fn prim_value(reg: &Registry, name: &str, acc: Vec<f64>) -> Value {
    let spec = reg.get(name).unwrap_or_else(|| panic!("unknown primitive `{name}`"));
    if acc.len() == spec.arity {
        return Value::RealV(spec.eval(&acc));
    }
    let reg = reg.clone();
    let name = name.to_string();
    Value::closure(move |v| {
        let mut acc = acc.clone();
        acc.push(v.as_real());
        prim_value(&reg, &name, acc)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivModel {
    /// Canonical derivative: primitives by modulus, variables by their
    /// budget, abstraction and application by the lax clauses.
    Q,
    /// Reflexive variant: abstraction subtracts the frozen-environment
    /// self-variation, application joins it back.
    Qr,
}

#[derive(Clone, Copy, Debug)]
pub struct DerivCfg {
    pub model: DerivModel,
    /// Budget granted to literal constants; 0 in the plain semantics,
    /// positive when bounding contexts whose constants are only known up
    /// to a radius.
    pub const_budget: f64,
}

impl DerivCfg {
    pub fn q() -> DerivCfg {
        DerivCfg { model: DerivModel::Q, const_budget: 0.0 }
    }

    pub fn qr() -> DerivCfg {
        DerivCfg { model: DerivModel::Qr, const_budget: 0.0 }
    }
}

/// Derivative in the plain model.
pub fn deriv_q(reg: &Registry, t: &Term, env: &Env, denv: &DiffEnv) -> Diff {
    deriv_with(reg, t, env, denv, DerivCfg::q())
}

/// Derivative in the reflexive model.
pub fn deriv_qr(reg: &Registry, t: &Term, env: &Env, denv: &DiffEnv) -> Diff {
    deriv_with(reg, t, env, denv, DerivCfg::qr())
}

pub fn deriv_with(reg: &Registry, t: &Term, env: &Env, denv: &DiffEnv, cfg: DerivCfg) -> Diff {
    match &t.kind {
        TermKind::RealConst(_) => Diff::DReal(cfg.const_budget),
        TermKind::Var(x) => denv
            .get(x)
            .unwrap_or_else(|| panic!("unbound variable `{x}` in derivative"))
            .clone(),
        TermKind::Prim(name) => prim_diff(reg, name, Vec::new(), Vec::new()),
        TermKind::Pair(a, b) => Diff::DPair(
            Box::new(deriv_with(reg, a, env, denv, cfg)),
            Box::new(deriv_with(reg, b, env, denv, cfg)),
        ),
        TermKind::Proj(i, b) => {
            let d = deriv_with(reg, b, env, denv, cfg);
            if *i == 1 { d.fst().clone() } else { d.snd().clone() }
        }
        TermKind::Lam(x, _, body) => {
            let reg = reg.clone();
            let env = env.clone();
            let denv = denv.clone();
            let x = x.clone();
            let body = (**body).clone();
            match cfg.model {
                DerivModel::Q => Diff::dfn(move |v, d| {
                    deriv_with(
                        &reg,
                        &body,
                        &env.with(x.clone(), v.clone()),
                        &denv.with(x.clone(), d.clone()),
                        cfg,
                    )
                }),
                DerivModel::Qr => Diff::dfn(move |v, d| {
                    let raw = deriv_with(
                        &reg,
                        &body,
                        &env.with(x.clone(), v.clone()),
                        &denv.with(x.clone(), d.clone()),
                        cfg,
                    );
                    // self-variation of the abstracted function with the
                    // enclosing environment frozen
                    let frozen = deriv_with(
                        &reg,
                        &body,
                        &env.with(x.clone(), v.clone()),
                        &denv.zeroed().with(x.clone(), d.clone()),
                        DerivCfg::q(),
                    );
                    diff_heyting(&raw, &frozen)
                }),
            }
        }
        TermKind::App(f, u) => {
            let phi = deriv_with(reg, f, env, denv, cfg);
            let uv = denote(reg, u, env);
            let ud = deriv_with(reg, u, env, denv, cfg);
            let base = phi.apply(&uv, &ud);
            match cfg.model {
                DerivModel::Q => base,
                DerivModel::Qr => {
                    let frozen =
                        deriv_with(reg, f, env, &denv.zeroed(), DerivCfg::q()).apply(&uv, &ud);
                    diff_join(&base, &frozen)
                }
            }
        }
        TermKind::Hole => panic!("a hole has no derivative; plug the context first"),
    }
}

fn prim_diff(reg: &Registry, name: &str, vals: Vec<f64>, buds: Vec<f64>) -> Diff {
    let spec = reg.get(name).unwrap_or_else(|| panic!("unknown primitive `{name}`"));
    if vals.len() == spec.arity {
        return Diff::DReal(spec.modulus(&vals, &buds));
    }
    let reg = reg.clone();
    let name = name.to_string();
    Diff::dfn(move |v, d| {
        let mut vals = vals.clone();
        let mut buds = buds.clone();
        vals.push(v.as_real());
        buds.push(d.as_real().max(0.0));
        prim_diff(&reg, &name, vals, buds)
    })
}
