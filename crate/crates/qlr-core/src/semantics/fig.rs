//! Counterexample reproductions: the cosine triples on which the naive
//! lifted distance fails the partial-metric transitivity axiom and its
//! reflexive variant fails the triangle inequality, plus the witness that
//! pointwise variation is neither super- nor sub-additive in general.

use super::{dist_d, dist_e, Diff, GridConfig, Value};
use crate::lambda::SimpleType;
use serde::Serialize;

fn rr() -> SimpleType {
    SimpleType::arrow(SimpleType::Real, SimpleType::Real)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Fig1Variant {
    /// Naive distance d: partial-metric transitivity
    /// d(f,g) ≤ d(f,h) + d(h,g) − d(h,h) fails.
    A,
    /// Reflexive distance e: triangle e(f,g) ≤ e(f,h) + e(h,g) fails.
    B,
}

#[derive(Clone, Debug, Serialize)]
pub struct Fig1Report {
    pub variant: Fig1Variant,
    pub x: f64,
    pub r: f64,
    pub d_fg: f64,
    pub d_fh: f64,
    pub d_hg: f64,
    pub d_hh: f64,
    pub violated: bool,
}

/// The three functions of the counterexample picture for either variant:
/// variant A uses f ≡ 0.3, h(y) = 0.65 + 0.8·cos y, g(y) = 2.25 − 0.8·cos y;
/// variant B uses f(y) = 1.1 − 0.8·cos y, g(y) = 1.8 + 0.8·cos y and a
/// constant h placed just inside f's variation window at (x, r), so every
/// h(y) stays no farther from f(x) than f reaches by itself.
pub fn reproduce_fig1(variant: Fig1Variant, x: f64, r: f64, cfg: &GridConfig) -> Fig1Report {
    let ty = rr();
    let probe_x = Value::RealV(x);
    let probe_r = Diff::DReal(r);
    let probe = Some((&probe_x, &probe_r));
    match variant {
        Fig1Variant::A => {
            let f = Value::real_fn(|_| 0.3);
            let h = Value::real_fn(|y| 0.65 + 0.8 * y.cos());
            let g = Value::real_fn(|y| 2.25 - 0.8 * y.cos());
            let d_fg = dist_d(&ty, &f, &g, probe, cfg).unwrap();
            let d_fh = dist_d(&ty, &f, &h, probe, cfg).unwrap();
            let d_hg = dist_d(&ty, &h, &g, probe, cfg).unwrap();
            let d_hh = dist_d(&ty, &h, &h, probe, cfg).unwrap();
            Fig1Report {
                variant,
                x,
                r,
                d_fg,
                d_fh,
                d_hg,
                d_hh,
                violated: d_fg > d_fh + d_hg - d_hh,
            }
        }
        Fig1Variant::B => {
            let f = Value::real_fn(|y| 1.1 - 0.8 * y.cos());
            let g = Value::real_fn(|y| 1.8 + 0.8 * y.cos());
            // place h strictly inside the window [f(x), f(x) + D(f)(x,r)]
            let fx = f.apply(&probe_x).as_real();
            let window = dist_d(&ty, &f, &f, probe, cfg).unwrap();
            let level = fx + 0.999 * window;
            let h = Value::real_fn(move |_| level);
            let d_fg = dist_e(&ty, &f, &g, probe, cfg).unwrap();
            let d_fh = dist_e(&ty, &f, &h, probe, cfg).unwrap();
            let d_hg = dist_e(&ty, &h, &g, probe, cfg).unwrap();
            let d_hh = dist_e(&ty, &h, &h, probe, cfg).unwrap();
            Fig1Report {
                variant,
                x,
                r,
                d_fg,
                d_fh,
                d_hg,
                d_hh,
                violated: d_fg > d_fh + d_hg,
            }
        }
    }
}

/// Byte-stable CSV rendering: fixed 9-decimal floats, lowercase booleans.
pub fn fig1_csv(reports: &[Fig1Report]) -> String {
    let mut out = String::from("# fig1 schema v1\nx,r,d_fg,d_fh,d_hg,d_hh,violated\n");
    for rep in reports {
        out.push_str(&format!(
            "{:.9},{:.9},{:.9},{:.9},{:.9},{:.9},{}\n",
            rep.x, rep.r, rep.d_fg, rep.d_fh, rep.d_hg, rep.d_hh, rep.violated
        ));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct NonAdditivityReport {
    /// Variation of f(x) = x for |x| ≤ 1, 2x otherwise, at (0,1) and (0,2).
    pub d_f_1: f64,
    pub d_f_2: f64,
    /// Variation of g(x) = 2x for |x| ≤ 1, x otherwise, at (0,1) and (0,2).
    pub d_g_1: f64,
    pub d_g_2: f64,
    /// d_f_2 > d_f_1 + d_f_1: doubling the budget more than doubles reach.
    pub superadditive: bool,
    /// d_g_2 < d_g_1 + d_g_1.
    pub subadditive: bool,
}

/// Pointwise variation is not additive in the budget: a piecewise-linear f
/// is superadditive at 0 and its piece-swapped mirror g is subadditive.
pub fn non_additivity_witness(cfg: &GridConfig) -> NonAdditivityReport {
    let ty = rr();
    let f = Value::real_fn(|x| if x.abs() <= 1.0 { x } else { 2.0 * x });
    let g = Value::real_fn(|x| if x.abs() <= 1.0 { 2.0 * x } else { x });
    let zero = Value::RealV(0.0);
    let at = |func: &Value, r: f64| {
        let budget = Diff::DReal(r);
        dist_d(&ty, func, func, Some((&zero, &budget)), cfg).unwrap()
    };
    let (d_f_1, d_f_2) = (at(&f, 1.0), at(&f, 2.0));
    let (d_g_1, d_g_2) = (at(&g, 1.0), at(&g, 2.0));
    NonAdditivityReport {
        d_f_1,
        d_f_2,
        d_g_1,
        d_g_2,
        superadditive: d_f_2 > d_f_1 + d_f_1,
        subadditive: d_g_2 < d_g_1 + d_g_1,
    }
}
