//! Sampled lifted distances and probe-set comparisons.
//!
//! The lifted distance at an arrow type is
//! a(f,g)(x,α) = ⋁ { a(f(x), f(y)) ∨ a(f(x), g(y)) : y within α of x },
//! realized here with the supremum over an inclusive uniform grid. Sampled
//! values are lower bounds of the true suprema, while derivatives computed
//! from moduli are upper bounds, so comparisons are phrased sampled ≤ derived.

use super::{Diff, GridConfig, Value};
use crate::lambda::SimpleType;
use crate::quantale::{QuantaleError, Result};

fn unsupported<T>(msg: impl Into<String>) -> Result<T> {
    Err(QuantaleError::Unsupported(msg.into()))
}

/// Number of real axes of a gridable (arrow-free) type.
fn gridable_dims(ty: &SimpleType) -> Option<usize> {
    match ty {
        SimpleType::Real => Some(1),
        SimpleType::Prod(a, b) => Some(gridable_dims(a)? + gridable_dims(b)?),
        SimpleType::Arrow(..) => None,
    }
}

fn shape_supported(ty: &SimpleType) -> bool {
    match ty {
        SimpleType::Real => true,
        SimpleType::Prod(a, b) => shape_supported(a) && shape_supported(b),
        SimpleType::Arrow(dom, cod) => gridable_dims(dom).is_some() && shape_supported(cod),
    }
}

/// Per-axis resolution that keeps multi-axis balls tractable.
fn axis_points(cfg: &GridConfig, dims: usize) -> usize {
    match dims {
        0 | 1 => cfg.points,
        2 => cfg.points.min(41),
        _ => cfg.points.min(11),
    }
}

/// All grid points of the ball around `v` with budget `d`, for a gridable
/// domain type.
fn dom_ball(ty: &SimpleType, v: &Value, d: &Diff, cfg: &GridConfig, axis: usize) -> Vec<Value> {
    match ty {
        SimpleType::Real => {
            let axis_cfg = GridConfig { points: axis, ..cfg.clone() };
            axis_cfg.ball(v.as_real(), d.as_real()).into_iter().map(Value::RealV).collect()
        }
        SimpleType::Prod(a, b) => {
            let left = dom_ball(a, v.fst(), d.fst(), cfg, axis);
            let right = dom_ball(b, v.snd(), d.snd(), cfg, axis);
            let mut out = Vec::with_capacity(left.len() * right.len());
            for l in &left {
                for r in &right {
                    out.push(Value::PairV(Box::new(l.clone()), Box::new(r.clone())));
                }
            }
            out
        }
        SimpleType::Arrow(..) => unreachable!("ball over a non-gridable domain"),
    }
}

fn dist_unchecked(ty: &SimpleType, f: &Value, g: &Value, cfg: &GridConfig) -> Diff {
    match ty {
        SimpleType::Real => Diff::DReal((f.as_real() - g.as_real()).abs()),
        SimpleType::Prod(a, b) => Diff::DPair(
            Box::new(dist_unchecked(a, f.fst(), g.fst(), cfg)),
            Box::new(dist_unchecked(b, f.snd(), g.snd(), cfg)),
        ),
        SimpleType::Arrow(dom, cod) => {
            let dom = (**dom).clone();
            let cod = (**cod).clone();
            let (f, g) = (f.clone(), g.clone());
            let cfg = cfg.clone();
            let axis = axis_points(&cfg, gridable_dims(&dom).unwrap_or(1));
            Diff::dfn(move |x, alpha| {
                let fx = f.apply(x);
                let mut acc: Option<Diff> = None;
                for y in dom_ball(&dom, x, alpha, &cfg, axis) {
                    let to_f = dist_unchecked(&cod, &fx, &f.apply(&y), &cfg);
                    let to_g = dist_unchecked(&cod, &fx, &g.apply(&y), &cfg);
                    let both = super::diff_join(&to_f, &to_g);
                    acc = Some(match acc {
                        None => both,
                        Some(prev) => super::diff_join(&prev, &both),
                    });
                }
                acc.expect("a ball is never empty")
            })
        }
    }
}

/// Sampled lifted distance a(f, g) at type `ty`, as a difference value of
/// shape ∇ty. Supported shapes: Real, products, and arrows whose domains
/// are arrow-free.
pub fn sample_dist(ty: &SimpleType, f: &Value, g: &Value, cfg: &GridConfig) -> Result<Diff> {
    if !shape_supported(ty) {
        return unsupported(format!("cannot sample distances at type {ty}"));
    }
    Ok(dist_unchecked(ty, f, g, cfg))
}

/// Scalar distance d(f,g)(x,α) for Real or Real-ended single arrows.
pub fn dist_d(
    ty: &SimpleType,
    f: &Value,
    g: &Value,
    probe: Option<(&Value, &Diff)>,
    cfg: &GridConfig,
) -> Result<f64> {
    match ty {
        SimpleType::Real => Ok((f.as_real() - g.as_real()).abs()),
        SimpleType::Arrow(_, cod) if **cod == SimpleType::Real => {
            let (x, alpha) = match probe {
                Some(p) => p,
                None => {
                    return Err(QuantaleError::Domain(
                        "a probe point and budget are required at arrow types".into(),
                    ))
                }
            };
            Ok(sample_dist(ty, f, g, cfg)?.apply(x, alpha).as_real())
        }
        _ => unsupported(format!("dist_d supports Real and arrows into Real, not {ty}")),
    }
}

/// The reflexive scalar distance: d(f,g) where it exceeds the self-variation
/// D(f) = d(f,f), and 0 otherwise.
pub fn dist_e(
    ty: &SimpleType,
    f: &Value,
    g: &Value,
    probe: Option<(&Value, &Diff)>,
    cfg: &GridConfig,
) -> Result<f64> {
    let d = dist_d(ty, f, g, probe, cfg)?;
    let self_d = dist_d(ty, f, f, probe, cfg)?;
    Ok(if d > self_d { d } else { 0.0 })
}

/// Canonical inhabitants used as application arguments.
pub fn value_probes(ty: &SimpleType) -> Vec<Value> {
    match ty {
        SimpleType::Real => [-2.0, -1.0, -0.4, 0.0, 0.5, 1.0, 1.5, 2.0]
            .iter()
            .map(|r| Value::RealV(*r))
            .collect(),
        SimpleType::Prod(a, b) => {
            let left = value_probes(a);
            let right = value_probes(b);
            let mut out = Vec::new();
            'outer: for (i, l) in left.iter().enumerate() {
                for r in right.iter().skip(i % 2).step_by(2) {
                    out.push(Value::PairV(Box::new(l.clone()), Box::new(r.clone())));
                    if out.len() >= 8 {
                        break 'outer;
                    }
                }
            }
            out
        }
        SimpleType::Arrow(dom, cod) => {
            if **dom == SimpleType::Real && **cod == SimpleType::Real {
                vec![
                    Value::real_fn(|x| x),
                    Value::real_fn(f64::sin),
                    Value::real_fn(|x| 2.0 * x + 1.0),
                    Value::real_fn(|_| 0.7),
                    Value::real_fn(f64::abs),
                    Value::real_fn(|x| -x),
                ]
            } else {
                value_probes(cod)
                    .into_iter()
                    .take(4)
                    .map(|c| Value::closure(move |_| c.clone()))
                    .collect()
            }
        }
    }
}

fn zero_budget(ty: &SimpleType) -> Diff {
    match ty {
        SimpleType::Real => Diff::DReal(0.0),
        SimpleType::Prod(a, b) => {
            Diff::DPair(Box::new(zero_budget(a)), Box::new(zero_budget(b)))
        }
        SimpleType::Arrow(_, cod) => {
            let cod = (**cod).clone();
            Diff::dfn(move |_, _| zero_budget(&cod))
        }
    }
}

fn const_budget(ty: &SimpleType, r: f64) -> Diff {
    match ty {
        SimpleType::Real => Diff::DReal(r),
        SimpleType::Prod(a, b) => {
            Diff::DPair(Box::new(const_budget(a, r)), Box::new(const_budget(b, r)))
        }
        SimpleType::Arrow(_, cod) => {
            let cod = (**cod).clone();
            Diff::dfn(move |_, _| const_budget(&cod, r))
        }
    }
}

/// Canonical budgets in ∇ty, driven by the configured probe radii.
pub fn budget_probes(ty: &SimpleType, cfg: &GridConfig) -> Vec<Diff> {
    match ty {
        SimpleType::Real => cfg.radii.iter().map(|r| Diff::DReal(*r)).collect(),
        SimpleType::Prod(a, b) => {
            let left = budget_probes(a, cfg);
            let right = budget_probes(b, cfg);
            let n = left.len().min(right.len());
            let mut out = Vec::new();
            for i in 0..n {
                out.push(Diff::DPair(
                    Box::new(left[i].clone()),
                    Box::new(right[(i + 1) % n].clone()),
                ));
            }
            out
        }
        SimpleType::Arrow(dom, cod) => {
            let mut out = vec![zero_budget(ty), const_budget(ty, 0.1)];
            if dom == cod {
                // the identity's derivative: pass the budget through
                out.push(Diff::dfn(|_, d| d.clone()));
            }
            out
        }
    }
}

fn eq_args(ty: &SimpleType, n: usize) -> Vec<Value> {
    match ty {
        SimpleType::Real => {
            let n = n.max(2);
            (0..n)
                .map(|i| Value::RealV(-2.0 + 4.0 * (i as f64) / ((n - 1) as f64)))
                .collect()
        }
        SimpleType::Prod(a, b) => {
            let k = ((n as f64).sqrt().ceil() as usize).max(2);
            let left = eq_args(a, k);
            let right = eq_args(b, k);
            let mut out = Vec::new();
            for l in &left {
                for r in &right {
                    out.push(Value::PairV(Box::new(l.clone()), Box::new(r.clone())));
                }
            }
            out
        }
        SimpleType::Arrow(..) => value_probes(ty),
    }
}

/// Largest absolute disagreement between two values of type `ty` over the
/// standard probe arguments (64 points per real function axis).
pub fn value_probe_eq(ty: &SimpleType, a: &Value, b: &Value) -> f64 {
    match ty {
        SimpleType::Real => {
            let (x, y) = (a.as_real(), b.as_real());
            if x == y || (x.is_infinite() && y.is_infinite() && x == y) {
                0.0
            } else {
                (x - y).abs()
            }
        }
        SimpleType::Prod(l, r) => value_probe_eq(l, a.fst(), b.fst())
            .max(value_probe_eq(r, a.snd(), b.snd())),
        SimpleType::Arrow(dom, cod) => {
            let mut worst: f64 = 0.0;
            for arg in eq_args(dom, 64) {
                worst = worst.max(value_probe_eq(cod, &a.apply(&arg), &b.apply(&arg)));
            }
            worst
        }
    }
}

fn real_gap(x: f64, y: f64) -> f64 {
    if x == y || (x.is_infinite() && y.is_infinite()) {
        0.0
    } else if x.is_infinite() || y.is_infinite() {
        f64::INFINITY
    } else {
        (x - y).abs()
    }
}

/// Largest absolute disagreement between two differences of shape ∇ty over
/// the standard probes (16 points × configured radii per arrow layer).
pub fn diff_probe_eq(ty: &SimpleType, a: &Diff, b: &Diff, cfg: &GridConfig) -> f64 {
    match ty {
        SimpleType::Real => real_gap(a.as_real(), b.as_real()),
        SimpleType::Prod(l, r) => diff_probe_eq(l, a.fst(), b.fst(), cfg)
            .max(diff_probe_eq(r, a.snd(), b.snd(), cfg)),
        SimpleType::Arrow(dom, cod) => {
            let mut worst: f64 = 0.0;
            for x in eq_args(dom, 16) {
                for alpha in budget_probes(dom, cfg) {
                    worst = worst.max(diff_probe_eq(
                        cod,
                        &a.apply(&x, &alpha),
                        &b.apply(&x, &alpha),
                        cfg,
                    ));
                }
            }
            worst
        }
    }
}

/// Largest amount by which `a` exceeds `b` over the standard probes; 0 when
/// a ≤ b pointwise on all of them.
pub fn diff_probe_leq(ty: &SimpleType, a: &Diff, b: &Diff, cfg: &GridConfig) -> f64 {
    match ty {
        SimpleType::Real => {
            let (x, y) = (a.as_real(), b.as_real());
            if x <= y || y.is_infinite() {
                0.0
            } else if x.is_infinite() {
                f64::INFINITY
            } else {
                x - y
            }
        }
        SimpleType::Prod(l, r) => diff_probe_leq(l, a.fst(), b.fst(), cfg)
            .max(diff_probe_leq(r, a.snd(), b.snd(), cfg)),
        SimpleType::Arrow(dom, cod) => {
            let mut worst: f64 = 0.0;
            for x in eq_args(dom, 16) {
                for alpha in budget_probes(dom, cfg) {
                    worst = worst.max(diff_probe_leq(
                        cod,
                        &a.apply(&x, &alpha),
                        &b.apply(&x, &alpha),
                        cfg,
                    ));
                }
            }
            worst
        }
    }
}
