//! Primitive real functions with derivative and Lipschitz metadata.
//!
//! Every primitive carries, besides its evaluator on ℝⁿ:
//!
//! * `modulus(x̄, ᾱ)`: an upper bound for the one-sided variation
//!   sup{|f(x̄) − f(ȳ)| : |xᵢ − yᵢ| ≤ αᵢ}, exact for every shipped
//!   primitive. Budgets live in [0, ∞]; modulus(x̄, 0̄) = 0 and it is
//!   monotone in each budget.
//! * `lip(x̄)`: a local Lipschitz constant together with the Euclidean
//!   radius around x̄ on which it is claimed.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

type EvalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type ModulusFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;
type LipFn = Arc<dyn Fn(&[f64]) -> (f64, f64) + Send + Sync>;

#[derive(Clone)]
pub struct PrimitiveSpec {
    pub name: String,
    pub arity: usize,
    eval: EvalFn,
    modulus: ModulusFn,
    lip: LipFn,
}

impl fmt::Debug for PrimitiveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrimitiveSpec")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .finish()
    }
}

impl PrimitiveSpec {
    pub fn new(
        name: impl Into<String>,
        arity: usize,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        modulus: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
        lip: impl Fn(&[f64]) -> (f64, f64) + Send + Sync + 'static,
    ) -> PrimitiveSpec {
        PrimitiveSpec {
            name: name.into(),
            arity,
            eval: Arc::new(eval),
            modulus: Arc::new(modulus),
            lip: Arc::new(lip),
        }
    }

    pub fn eval(&self, args: &[f64]) -> f64 {
        debug_assert_eq!(args.len(), self.arity);
        (self.eval)(args)
    }

    pub fn modulus(&self, args: &[f64], budgets: &[f64]) -> f64 {
        debug_assert_eq!(args.len(), self.arity);
        debug_assert_eq!(budgets.len(), self.arity);
        (self.modulus)(args, budgets)
    }

    /// (constant, radius): |f(ȳ) − f(z̄)| ≤ L·|ȳ − z̄|₂ whenever both points
    /// lie within the radius of the base point.
    pub fn lip(&self, args: &[f64]) -> (f64, f64) {
        debug_assert_eq!(args.len(), self.arity);
        (self.lip)(args)
    }
}

/// Product that treats a zero factor as absorbing even against ∞, matching
/// the quantale convention 0·∞ = 0 used by budget arithmetic.
fn m0(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// True iff some point θ + 2πk lies in [lo, hi].
fn contains_angle(lo: f64, hi: f64, theta: f64) -> bool {
    let tau = std::f64::consts::TAU;
    let k = ((lo - theta) / tau).ceil();
    theta + k * tau <= hi
}

/// Exact range of sin over [lo, hi] for finite bounds.
fn sin_range(lo: f64, hi: f64) -> (f64, f64) {
    if !lo.is_finite() || !hi.is_finite() || hi - lo >= std::f64::consts::TAU {
        return (-1.0, 1.0);
    }
    let mut mn = lo.sin().min(hi.sin());
    let mut mx = lo.sin().max(hi.sin());
    if contains_angle(lo, hi, std::f64::consts::FRAC_PI_2) {
        mx = 1.0;
    }
    if contains_angle(lo, hi, -std::f64::consts::FRAC_PI_2) {
        mn = -1.0;
    }
    (mn, mx)
}

fn cos_range(lo: f64, hi: f64) -> (f64, f64) {
    if !lo.is_finite() || !hi.is_finite() || hi - lo >= std::f64::consts::TAU {
        return (-1.0, 1.0);
    }
    let mut mn = lo.cos().min(hi.cos());
    let mut mx = lo.cos().max(hi.cos());
    if contains_angle(lo, hi, 0.0) {
        mx = 1.0;
    }
    if contains_angle(lo, hi, std::f64::consts::PI) {
        mn = -1.0;
    }
    (mn, mx)
}

/// One-sided variation of a trig function from the value at x over [x±α],
/// computed from the exact interval range. Never exceeds min(α, 2).
fn trig_modulus(range: fn(f64, f64) -> (f64, f64), v: f64, x: f64, alpha: f64) -> f64 {
    if alpha <= 0.0 {
        return 0.0;
    }
    let (lo, hi) = if alpha.is_finite() {
        (x - alpha, x + alpha)
    } else {
        (f64::NEG_INFINITY, f64::INFINITY)
    };
    let (mn, mx) = range(lo, hi);
    (mx - v).max(v - mn).max(0.0)
}

#[derive(Clone, Debug)]
pub struct Registry {
    prims: BTreeMap<String, PrimitiveSpec>,
}

impl Registry {
    pub fn empty() -> Registry {
        Registry { prims: BTreeMap::new() }
    }

    pub fn get(&self, name: &str) -> Option<&PrimitiveSpec> {
        self.prims.get(name)
    }

    pub fn insert(&mut self, spec: PrimitiveSpec) {
        self.prims.insert(spec.name.clone(), spec);
    }

    pub fn names(&self) -> Vec<&str> {
        self.prims.keys().map(|s| s.as_str()).collect()
    }

    /// Register x ↦ a·x + b under the given name.
    pub fn register_affine(&mut self, name: &str, a: f64, b: f64) {
        self.insert(PrimitiveSpec::new(
            name,
            1,
            move |args| a * args[0] + b,
            move |_, d| m0(a.abs(), d[0]),
            move |_| (a.abs(), f64::INFINITY),
        ));
    }
}

impl Default for Registry {
    /// add, sub, mul, min, max, sin, cos, abs, plus the affine instances
    /// neg = −x and affine_2_1 = 2x + 1.
    fn default() -> Registry {
        let mut reg = Registry::empty();
        reg.insert(PrimitiveSpec::new(
            "add",
            2,
            |a| a[0] + a[1],
            |_, d| d[0] + d[1],
            |_| (std::f64::consts::SQRT_2, f64::INFINITY),
        ));
        reg.insert(PrimitiveSpec::new(
            "sub",
            2,
            |a| a[0] - a[1],
            |_, d| d[0] + d[1],
            |_| (std::f64::consts::SQRT_2, f64::INFINITY),
        ));
        reg.insert(PrimitiveSpec::new(
            "mul",
            2,
            |a| a[0] * a[1],
            // sup over the budget box is attained at a corner:
            // |x₁x₂ − y₁y₂| ≤ |x₁|α₂ + |x₂|α₁ + α₁α₂, with equality for
            // sign-aligned corners.
            |a, d| m0(a[0].abs(), d[1]) + m0(a[1].abs(), d[0]) + m0(d[0], d[1]),
            // |∇mul(y)| = |y| ≤ |x| + r on the Euclidean ball of radius r
            |a| (a[0].hypot(a[1]) + 1.0, 1.0),
        ));
        reg.insert(PrimitiveSpec::new(
            "min",
            2,
            |a| a[0].min(a[1]),
            |_, d| d[0].max(d[1]),
            |_| (1.0, f64::INFINITY),
        ));
        reg.insert(PrimitiveSpec::new(
            "max",
            2,
            |a| a[0].max(a[1]),
            |_, d| d[0].max(d[1]),
            |_| (1.0, f64::INFINITY),
        ));
        reg.insert(PrimitiveSpec::new(
            "sin",
            1,
            |a| a[0].sin(),
            |a, d| trig_modulus(sin_range, a[0].sin(), a[0], d[0]),
            |_| (1.0, f64::INFINITY),
        ));
        reg.insert(PrimitiveSpec::new(
            "cos",
            1,
            |a| a[0].cos(),
            |a, d| trig_modulus(cos_range, a[0].cos(), a[0], d[0]),
            |_| (1.0, f64::INFINITY),
        ));
        reg.insert(PrimitiveSpec::new(
            "abs",
            1,
            |a| a[0].abs(),
            |_, d| d[0],
            |_| (1.0, f64::INFINITY),
        ));
        reg.register_affine("neg", -1.0, 0.0);
        reg.register_affine("affine_2_1", 2.0, 1.0);
        reg
    }
}
