//! Valuations on interval lattices and the induced (partial) metrics.
//!
//! A join-valuation is a monotone map F from a lattice into [0, ∞] that is
//! submodular wherever meets exist: F(a∨b) ≤ F(a) + (F(b) ∸ F(a∧b)).
//! Every such F induces a partial metric p_F(a,b) = F(a∨b) on the quotient by
//! a ≃_F b iff (a ≤ b or b ≤ a) and F(a) = F(b), and a dual valuation
//! F'(a,b) = F(b) ∸ F(a) whose metric is d(a,b) = F'(a,a∨b) + F'(b,b∨a).
//!
//! The Euclidean metric factors through the interval lattice: |x−y| equals
//! diam(u(x,y)) with u(x,y) = [min{x,y}, max{x,y}]. The same factorization
//! lifts to function spaces as the partial metric
//!   p(f,g)(x,I) = diam{f(y), g(z) | y,z ∈ {x}∨I}
//! and the metric m(f,g) = 2·p(f,g) − p(f,f) − p(g,g); both are evaluated on
//! the shared sampling grid.

use std::sync::Arc;

use crate::ext::{self, INF};
use crate::quantale::{IntervalElem, QuantaleError, Result};
use crate::semantics::{GridConfig, Value};

/// Join-semilattice interface for valuation targets. `meet` returns None when
/// the meet does not exist or is bottom; submodularity is only asserted
/// elsewhere when it returns Some.
pub trait JoinLattice: Clone + std::fmt::Debug {
    fn join(&self, other: &Self) -> Self;
    fn meet(&self, other: &Self) -> Option<Self>;
    fn leq(&self, other: &Self) -> bool;
}

impl JoinLattice for IntervalElem {
    fn join(&self, other: &Self) -> Self {
        self.hull(other)
    }

    fn meet(&self, other: &Self) -> Option<Self> {
        match self.intersect(other) {
            IntervalElem::Empty => None,
            m => Some(m),
        }
    }

    fn leq(&self, other: &Self) -> bool {
        self.subset(other)
    }
}

/// A finite union of closed bounded intervals, kept sorted, disjoint, and
/// with touching parts merged. The carrier of the Lebesgue valuation.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalUnion {
    parts: Vec<(f64, f64)>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion { parts: Vec::new() }
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "interval bounds out of order: [{lo},{hi}]");
        IntervalUnion { parts: vec![(lo, hi)] }
    }

    pub fn singleton(x: f64) -> Self {
        Self::interval(x, x)
    }

    pub fn of(parts: &[(f64, f64)]) -> Self {
        let mut u = IntervalUnion::empty();
        for &(lo, hi) in parts {
            u = u.join(&Self::interval(lo, hi));
        }
        u
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn parts(&self) -> &[(f64, f64)] {
        &self.parts
    }

    /// Total length; singletons and other null sets contribute 0.
    pub fn length(&self) -> f64 {
        self.parts.iter().map(|(lo, hi)| hi - lo).sum()
    }

    fn normalized(mut parts: Vec<(f64, f64)>) -> Self {
        parts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(parts.len());
        for (lo, hi) in parts {
            match out.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => out.push((lo, hi)),
            }
        }
        IntervalUnion { parts: out }
    }
}

impl JoinLattice for IntervalUnion {
    fn join(&self, other: &Self) -> Self {
        let mut parts = self.parts.clone();
        parts.extend_from_slice(&other.parts);
        Self::normalized(parts)
    }

    fn meet(&self, other: &Self) -> Option<Self> {
        let mut parts = Vec::new();
        for &(a, b) in &self.parts {
            for &(c, d) in &other.parts {
                let lo = a.max(c);
                let hi = b.min(d);
                if lo <= hi {
                    parts.push((lo, hi));
                }
            }
        }
        if parts.is_empty() {
            None
        } else {
            Some(Self::normalized(parts))
        }
    }

    fn leq(&self, other: &Self) -> bool {
        // Parts are disjoint with positive gaps, so a connected part of self
        // must sit inside a single part of other.
        self.parts
            .iter()
            .all(|&(lo, hi)| other.parts.iter().any(|&(a, b)| a <= lo && hi <= b))
    }
}

type ValuationFn<L> = Arc<dyn Fn(&L) -> Result<f64> + Send + Sync>;
type DualFn<L> = Arc<dyn Fn(&L, &L) -> Result<f64> + Send + Sync>;

/// A named monotone submodular map from a lattice into [0, ∞].
#[derive(Clone)]
pub struct JoinValuation<L> {
    pub name: &'static str,
    f: ValuationFn<L>,
}

impl<L: JoinLattice + 'static> JoinValuation<L> {
    pub fn new(
        name: &'static str,
        f: impl Fn(&L) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        JoinValuation { name, f: Arc::new(f) }
    }

    pub fn eval(&self, a: &L) -> Result<f64> {
        (self.f)(a)
    }

    /// p_F(a, b) = F(a ∨ b).
    pub fn induced_partial_metric(&self, a: &L, b: &L) -> Result<f64> {
        self.eval(&a.join(b))
    }

    /// a ≃_F b iff the elements are comparable and carry the same value.
    pub fn quotient_equiv(&self, a: &L, b: &L) -> Result<bool> {
        Ok((a.leq(b) || b.leq(a)) && ext::close(self.eval(a)?, self.eval(b)?, 0.0))
    }

    /// F'(a, b) = F(b) ∸ F(a), contravariant in the first argument.
    pub fn dual(&self) -> DualJoinValuation<L> {
        let f = self.f.clone();
        DualJoinValuation {
            name: self.name,
            d: Arc::new(move |a: &L, b: &L| Ok(ext::resid(f(b)?, f(a)?))),
        }
    }
}

impl<L> std::fmt::Debug for JoinValuation<L> {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(fm, "JoinValuation({})", self.name)
    }
}

/// A map D: L^op × L → [0, ∞] with D(a,a) = 0 and
/// D(a, b∨c) ≤ D(a,b) + D(b∧c, c) wherever b∧c exists.
#[derive(Clone)]
pub struct DualJoinValuation<L> {
    pub name: &'static str,
    d: DualFn<L>,
}

impl<L: JoinLattice> DualJoinValuation<L> {
    pub fn eval(&self, a: &L, b: &L) -> Result<f64> {
        (self.d)(a, b)
    }

    /// d_D(a, b) = D(a, a∨b) + D(b, b∨a).
    pub fn metric(&self, a: &L, b: &L) -> Result<f64> {
        let j = a.join(b);
        Ok(ext::add(self.eval(a, &j)?, self.eval(b, &j)?))
    }

    /// a ≃_D b iff comparable and both legs of the metric vanish.
    pub fn quotient_equiv(&self, a: &L, b: &L) -> Result<bool> {
        let j = a.join(b);
        Ok((a.leq(b) || b.leq(a)) && self.eval(a, &j)? == 0.0 && self.eval(b, &j)? == 0.0)
    }
}

impl<L> std::fmt::Debug for DualJoinValuation<L> {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(fm, "DualJoinValuation({})", self.name)
    }
}

/// The interval-valued partial ultra-metric u(x, y) = [min{x,y}, max{x,y}];
/// its self-distance u(x, x) = [x, x] is nonzero as a lattice element.
pub fn u_metric(x: f64, y: f64) -> IntervalElem {
    IntervalElem::bounded(x.min(y), x.max(y))
}

/// diam on nonempty intervals; the empty interval is outside its domain.
pub fn diam_valuation() -> JoinValuation<IntervalElem> {
    JoinValuation::new("diam", |i: &IntervalElem| i.diam())
}

/// Lebesgue measure on finite unions of intervals; agrees with diam on a
/// single interval, but ignores gaps: length([0,1]∪[2,3]) = 2, not 3.
pub fn lebesgue_valuation() -> JoinValuation<IntervalUnion> {
    JoinValuation::new("lebesgue", |u: &IntervalUnion| Ok(u.length()))
}

fn joint_image(f: &Value, g: &Value, x: f64, i: &IntervalElem, cfg: &GridConfig) -> Result<(f64, f64)> {
    let (lo, hi) = match u_metric(x, x).hull(i) {
        IntervalElem::Bounded(lo, hi) => (lo, hi),
        IntervalElem::FullLine => return Ok((-INF, INF)),
        IntervalElem::Empty => unreachable!("hull with a singleton is nonempty"),
    };
    match (f, g) {
        (Value::ClosV(_), Value::ClosV(_)) => {}
        _ => {
            return Err(QuantaleError::Unsupported(
                "lifted distances expect functions on the reals".into(),
            ))
        }
    }
    let mut min = INF;
    let mut max = -INF;
    for y in cfg.grid(lo, hi) {
        for v in [f.apply(&Value::RealV(y)).as_real(), g.apply(&Value::RealV(y)).as_real()] {
            min = min.min(v);
            max = max.max(v);
        }
    }
    Ok((min, max))
}

/// p(f,g)(x, I) = diam of the joint image of f and g over {x} ∨ I, the
/// smallest interval containing every f(y) and g(z) for y, z in the hull.
pub fn lifted_p(f: &Value, g: &Value, x: f64, i: &IntervalElem, cfg: &GridConfig) -> Result<f64> {
    let (min, max) = joint_image(f, g, x, i, cfg)?;
    if min == -INF || max == INF {
        return Ok(INF);
    }
    Ok((max - min).max(0.0))
}

/// m(f,g)(x, I) = 2·p(f,g) − p(f,f) − p(g,g); vanishes on the diagonal.
pub fn lifted_m(f: &Value, g: &Value, x: f64, i: &IntervalElem, cfg: &GridConfig) -> Result<f64> {
    let pfg = lifted_p(f, g, x, i, cfg)?;
    let pff = lifted_p(f, f, x, i, cfg)?;
    let pgg = lifted_p(g, g, x, i, cfg)?;
    // The joint image contains each single image, so 2·p(f,g) ≥ p(f,f)+p(g,g)
    // and the truncations never engage on finite inputs.
    Ok(ext::resid(ext::resid(ext::add(pfg, pfg), pff), pgg))
}
