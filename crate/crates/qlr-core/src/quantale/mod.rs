//! Commutative quantales (Q, 0, +, ≥) in the quantitative orientation:
//! 0 is the bottom element of integral kinds, meets are infima of "distances",
//! and + distributes over meets. The residual a ⊸ b = ⋀{δ | b + δ ≥ a}
//! measures how much must be added to b to dominate a; the Heyting arrow
//! a ⇐ b does the same with join in place of +.
//!
//! Elements are dynamically shaped ([`QuantaleElem`]) and every operation is
//! dispatched through a descriptor ([`QuantaleDesc`]) so that finite carriers,
//! the extended half-line, products, pointwise function quantales, powerset
//! monoids and the interval lattice share one interface.

mod diagonal;
mod laws;

pub use diagonal::{diagonal_compose, diagonal_member, diagonal_members};
pub use laws::{check_laws, check_laws_with, law_samples};

use crate::ext;
use serde::Serialize;
use std::fmt;

pub type Result<T> = std::result::Result<T, QuantaleError>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum QuantaleError {
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("element shape does not match quantale kind: {0}")]
    Shape(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
}

fn shape<T>(msg: impl Into<String>) -> Result<T> {
    Err(QuantaleError::Shape(msg.into()))
}

/// Closed real intervals extended with the empty interval and the full line,
/// ordered by containment. Doubles as the carrier of the interval lattice
/// quantale and as the value space of the valuation module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum IntervalElem {
    Empty,
    /// Invariant: lo ≤ hi, both finite.
    Bounded(f64, f64),
    FullLine,
}

impl IntervalElem {
    pub fn bounded(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "interval bounds out of order: [{lo},{hi}]");
        IntervalElem::Bounded(lo, hi)
    }

    pub fn point(x: f64) -> Self {
        IntervalElem::Bounded(x, x)
    }

    pub fn subset(&self, other: &IntervalElem) -> bool {
        use IntervalElem::*;
        match (self, other) {
            (Empty, _) => true,
            (_, Empty) => false,
            (_, FullLine) => true,
            (FullLine, _) => false,
            (Bounded(al, ah), Bounded(bl, bh)) => bl <= al && ah <= bh,
        }
    }

    /// Join: convex hull.
    pub fn hull(&self, other: &IntervalElem) -> IntervalElem {
        use IntervalElem::*;
        match (self, other) {
            (Empty, x) | (x, Empty) => *x,
            (FullLine, _) | (_, FullLine) => FullLine,
            (Bounded(al, ah), Bounded(bl, bh)) => Bounded(al.min(*bl), ah.max(*bh)),
        }
    }

    /// Meet: intersection.
    pub fn intersect(&self, other: &IntervalElem) -> IntervalElem {
        use IntervalElem::*;
        match (self, other) {
            (Empty, _) | (_, Empty) => Empty,
            (FullLine, x) | (x, FullLine) => *x,
            (Bounded(al, ah), Bounded(bl, bh)) => {
                let lo = al.max(*bl);
                let hi = ah.min(*bh);
                if lo <= hi {
                    Bounded(lo, hi)
                } else {
                    Empty
                }
            }
        }
    }

    /// Diameter in [0, ∞]. The empty interval has no diameter.
    pub fn diam(&self) -> Result<f64> {
        match self {
            IntervalElem::Empty => Err(QuantaleError::Domain(
                "diameter of the empty interval is undefined".into(),
            )),
            IntervalElem::Bounded(lo, hi) => Ok(hi - lo),
            IntervalElem::FullLine => Ok(ext::INF),
        }
    }
}

/// A finite commutative monoid, given by its multiplication table.
/// Carrier is 0..size; used by the powerset quantale kind.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteMonoid {
    pub name: String,
    pub unit: usize,
    pub table: Vec<Vec<usize>>,
}

impl FiniteMonoid {
    pub fn new(name: impl Into<String>, unit: usize, table: Vec<Vec<usize>>) -> Result<Self> {
        let m = FiniteMonoid { name: name.into(), unit, table };
        let n = m.table.len();
        if n == 0 || n > 16 || m.unit >= n || m.table.iter().any(|r| r.len() != n) {
            return Err(QuantaleError::Domain("malformed monoid table".into()));
        }
        for a in 0..n {
            for b in 0..n {
                if m.table[a][b] >= n || m.table[a][b] != m.table[b][a] {
                    return Err(QuantaleError::Domain("monoid not commutative".into()));
                }
                for c in 0..n {
                    if m.table[m.table[a][b]][c] != m.table[a][m.table[b][c]] {
                        return Err(QuantaleError::Domain("monoid not associative".into()));
                    }
                }
            }
            if m.table[a][m.unit] != a {
                return Err(QuantaleError::Domain("monoid unit law fails".into()));
            }
        }
        Ok(m)
    }

    /// The cyclic group Z/n under addition.
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteMonoid::new(format!("z{n}"), 0, table).expect("cyclic table is a monoid")
    }

    pub fn size(&self) -> usize {
        self.table.len()
    }
}

/// One quantale element. The shape must match the descriptor it is used with.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantaleElem {
    /// A value in [0, ∞]: Lawvere and sup-locale kinds.
    Ext(f64),
    /// Index into a finite enumeration: chain position, or a subset bitmask
    /// for the powerset kind.
    Idx(usize),
    /// Product element, one entry per factor.
    Tuple(Vec<QuantaleElem>),
    /// Interval lattice element.
    Interval(IntervalElem),
    /// Pointwise function element: values aligned with the descriptor's probe
    /// keys, one per probe.
    Table(Vec<QuantaleElem>),
}

impl QuantaleElem {
    pub fn ext(x: f64) -> Self {
        assert!(!x.is_nan(), "NaN is not a quantale element");
        QuantaleElem::Ext(ext::clamp(x))
    }

    pub fn as_ext(&self) -> Result<f64> {
        match self {
            QuantaleElem::Ext(x) => Ok(*x),
            other => shape(format!("expected real element, got {other:?}")),
        }
    }

    pub fn as_idx(&self) -> Result<usize> {
        match self {
            QuantaleElem::Idx(i) => Ok(*i),
            other => shape(format!("expected indexed element, got {other:?}")),
        }
    }

    pub fn as_tuple(&self) -> Result<&[QuantaleElem]> {
        match self {
            QuantaleElem::Tuple(v) => Ok(v),
            other => shape(format!("expected tuple element, got {other:?}")),
        }
    }

    pub fn as_interval(&self) -> Result<&IntervalElem> {
        match self {
            QuantaleElem::Interval(i) => Ok(i),
            other => shape(format!("expected interval element, got {other:?}")),
        }
    }

    pub fn as_table(&self) -> Result<&[QuantaleElem]> {
        match self {
            QuantaleElem::Table(v) => Ok(v),
            other => shape(format!("expected table element, got {other:?}")),
        }
    }
}

impl Eq for QuantaleElem {}

// Total order used for map keys and lexicographically-first witnesses.
// NaN is excluded by the `ext` constructor, so total_cmp agrees with ==.
impl Ord for QuantaleElem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use QuantaleElem::*;
        fn rank(e: &QuantaleElem) -> u8 {
            match e {
                Ext(_) => 0,
                Idx(_) => 1,
                Tuple(_) => 2,
                Interval(_) => 3,
                Table(_) => 4,
            }
        }
        fn ival_key(i: &IntervalElem) -> (u8, f64, f64) {
            match i {
                IntervalElem::Empty => (0, 0.0, 0.0),
                IntervalElem::Bounded(l, h) => (1, *l, *h),
                IntervalElem::FullLine => (2, 0.0, 0.0),
            }
        }
        match (self, other) {
            (Ext(a), Ext(b)) => a.total_cmp(b),
            (Idx(a), Idx(b)) => a.cmp(b),
            (Tuple(a), Tuple(b)) | (Table(a), Table(b)) => a.cmp(b),
            (Interval(a), Interval(b)) => {
                let (ra, la, ha) = ival_key(a);
                let (rb, lb, hb) = ival_key(b);
                ra.cmp(&rb).then(la.total_cmp(&lb)).then(ha.total_cmp(&hb))
            }
            (a, b) => rank(a).cmp(&rank(b)),
        }
    }
}

impl PartialOrd for QuantaleElem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Which quantale a descriptor denotes.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantaleKind {
    /// ([0,∞], 0, +, ≤), truncated subtraction as residual.
    Lawvere,
    /// ([0,∞], 0, sup, ≤): the locale on the extended half-line.
    SupLocale,
    /// Chain {0,…,n,∞}: finite sums saturate at n, ∞ absorbs.
    /// Element Idx(k) is k for k ≤ n and ∞ for k = n+1.
    TruncChain { n: usize },
    /// The two-element locale {0, ∞}: Idx(0) = 0, Idx(1) = ∞.
    DiscreteTwo,
    /// Componentwise product of the listed factors.
    Product(Vec<QuantaleDesc>),
    /// Functions from a fixed finite probe set into a base quantale,
    /// ordered and composed pointwise. Probe keys pair a carrier point
    /// index with a budget element of the source quantale.
    Pointwise { keys: Vec<(u32, QuantaleElem)>, base: Box<QuantaleDesc> },
    /// (℘(M), {e}, elementwise sum, ⊆) for a finite commutative monoid M.
    /// Elements are subset bitmasks in Idx.
    PowersetMonoid(FiniteMonoid),
    /// Closed intervals with ∅ and ℝ, ordered by containment; + is the
    /// convex hull. A complete lattice but not a locale: + does not
    /// distribute over meets, and the Heyting arrow does not exist.
    IntervalLattice,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantaleDesc {
    pub kind: QuantaleKind,
}

impl QuantaleDesc {
    pub fn lawvere() -> Self {
        QuantaleDesc { kind: QuantaleKind::Lawvere }
    }
    pub fn sup_locale() -> Self {
        QuantaleDesc { kind: QuantaleKind::SupLocale }
    }
    pub fn trunc_chain(n: usize) -> Self {
        QuantaleDesc { kind: QuantaleKind::TruncChain { n } }
    }
    pub fn discrete_two() -> Self {
        QuantaleDesc { kind: QuantaleKind::DiscreteTwo }
    }
    pub fn product(factors: Vec<QuantaleDesc>) -> Self {
        QuantaleDesc { kind: QuantaleKind::Product(factors) }
    }
    pub fn pointwise(keys: Vec<(u32, QuantaleElem)>, base: QuantaleDesc) -> Self {
        QuantaleDesc { kind: QuantaleKind::Pointwise { keys, base: Box::new(base) } }
    }
    pub fn powerset(m: FiniteMonoid) -> Self {
        QuantaleDesc { kind: QuantaleKind::PowersetMonoid(m) }
    }
    pub fn interval_lattice() -> Self {
        QuantaleDesc { kind: QuantaleKind::IntervalLattice }
    }

    pub fn name(&self) -> String {
        use QuantaleKind::*;
        match &self.kind {
            Lawvere => "lawvere".into(),
            SupLocale => "suplocale".into(),
            TruncChain { n } => format!("chain({n})"),
            DiscreteTwo => "two".into(),
            Product(fs) => {
                let inner: Vec<String> = fs.iter().map(|f| f.name()).collect();
                format!("product({})", inner.join(","))
            }
            Pointwise { keys, base } => format!("pointwise({} probes; {})", keys.len(), base.name()),
            PowersetMonoid(m) => format!("powerset({})", m.name),
            IntervalLattice => "interval".into(),
        }
    }

    /// 0 = ⊥ holds.
    pub fn is_integral(&self) -> bool {
        use QuantaleKind::*;
        match &self.kind {
            Lawvere | SupLocale | TruncChain { .. } | DiscreteTwo | IntervalLattice => true,
            Product(fs) => fs.iter().all(|f| f.is_integral()),
            Pointwise { base, .. } => base.is_integral(),
            PowersetMonoid(_) => false,
        }
    }

    /// + is idempotent and equal to the lattice join.
    pub fn plus_is_join(&self) -> bool {
        use QuantaleKind::*;
        match &self.kind {
            SupLocale | DiscreteTwo | IntervalLattice => true,
            TruncChain { n } => *n == 0,
            Product(fs) => fs.iter().all(|f| f.plus_is_join()),
            Pointwise { base, .. } => base.plus_is_join(),
            Lawvere | PowersetMonoid(_) => false,
        }
    }

    /// A genuine locale: + = ∨ and + distributes over arbitrary meets.
    pub fn is_locale(&self) -> bool {
        use QuantaleKind::*;
        match &self.kind {
            SupLocale | DiscreteTwo => true,
            TruncChain { n } => *n == 0,
            Product(fs) => fs.iter().all(|f| f.is_locale()),
            Pointwise { base, .. } => base.is_locale(),
            // hull does not distribute over intersections
            Lawvere | PowersetMonoid(_) | IntervalLattice => false,
        }
    }

    /// The Heyting arrow ⇐ exists (is right adjoint to ∨).
    pub fn is_heyting(&self) -> bool {
        use QuantaleKind::*;
        match &self.kind {
            Lawvere | SupLocale | TruncChain { .. } | DiscreteTwo | PowersetMonoid(_) => true,
            Product(fs) => fs.iter().all(|f| f.is_heyting()),
            Pointwise { base, .. } => base.is_heyting(),
            IntervalLattice => false,
        }
    }

    /// Declared to satisfy β ≤ (β ⇐ α) ∨ α. Holds whenever ⇐ is a genuine
    /// adjoint, so it coincides with `is_heyting` for the shipped kinds.
    pub fn has_star_star(&self) -> bool {
        self.is_heyting()
    }

    pub fn zero(&self) -> QuantaleElem {
        use QuantaleKind::*;
        match &self.kind {
            Lawvere | SupLocale => QuantaleElem::Ext(0.0),
            TruncChain { .. } | DiscreteTwo => QuantaleElem::Idx(0),
            Product(fs) => QuantaleElem::Tuple(fs.iter().map(|f| f.zero()).collect()),
            Pointwise { keys, base } => QuantaleElem::Table(vec![base.zero(); keys.len()]),
            PowersetMonoid(m) => QuantaleElem::Idx(1 << m.unit),
            IntervalLattice => QuantaleElem::Interval(IntervalElem::Empty),
        }
    }

    pub fn bottom(&self) -> QuantaleElem {
        use QuantaleKind::*;
        match &self.kind {
            PowersetMonoid(_) => QuantaleElem::Idx(0),
            Product(fs) => QuantaleElem::Tuple(fs.iter().map(|f| f.bottom()).collect()),
            Pointwise { keys, base } => QuantaleElem::Table(vec![base.bottom(); keys.len()]),
            _ => self.zero(),
        }
    }

    pub fn top(&self) -> QuantaleElem {
        use QuantaleKind::*;
        match &self.kind {
            Lawvere | SupLocale => QuantaleElem::Ext(ext::INF),
            TruncChain { n } => QuantaleElem::Idx(n + 1),
            DiscreteTwo => QuantaleElem::Idx(1),
            Product(fs) => QuantaleElem::Tuple(fs.iter().map(|f| f.top()).collect()),
            Pointwise { keys, base } => QuantaleElem::Table(vec![base.top(); keys.len()]),
            PowersetMonoid(m) => QuantaleElem::Idx((1 << m.size()) - 1),
            IntervalLattice => QuantaleElem::Interval(IntervalElem::FullLine),
        }
    }

    pub fn leq(&self, a: &QuantaleElem, b: &QuantaleElem) -> Result<bool> {
        use QuantaleKind::*;
        match &self.kind {
            Lawvere | SupLocale => Ok(a.as_ext()? <= b.as_ext()?),
            TruncChain { .. } | DiscreteTwo => Ok(a.as_idx()? <= b.as_idx()?),
            Product(fs) => {
                let (xs, ys) = (a.as_tuple()?, b.as_tuple()?);
                self.check_arity(xs.len(), fs.len())?;
                self.check_arity(ys.len(), fs.len())?;
                for ((f, x), y) in fs.iter().zip(xs).zip(ys) {
                    if !f.leq(x, y)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Pointwise { keys, base } => {
                let (xs, ys) = (a.as_table()?, b.as_table()?);
                self.check_arity(xs.len(), keys.len())?;
                self.check_arity(ys.len(), keys.len())?;
                for (x, y) in xs.iter().zip(ys) {
                    if !base.leq(x, y)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            PowersetMonoid(_) => Ok(a.as_idx()? & !b.as_idx()? == 0),
            IntervalLattice => Ok(a.as_interval()?.subset(b.as_interval()?)),
        }
    }

    pub fn plus(&self, a: &QuantaleElem, b: &QuantaleElem) -> Result<QuantaleElem> {
        use QuantaleKind::*;
        match &self.kind {
            Lawvere => Ok(QuantaleElem::Ext(ext::add(a.as_ext()?, b.as_ext()?))),
            SupLocale => Ok(QuantaleElem::Ext(a.as_ext()?.max(b.as_ext()?))),
            TruncChain { n } => {
                let (i, j) = (a.as_idx()?, b.as_idx()?);
                self.check_chain_idx(i)?;
                self.check_chain_idx(j)?;
                Ok(QuantaleElem::Idx(if i > *n || j > *n { n + 1 } else { (i + j).min(*n) }))
            }
            DiscreteTwo => Ok(QuantaleElem::Idx(a.as_idx()?.max(b.as_idx()?).min(1))),
            Product(fs) => self.zip_product(fs, a, b, |f, x, y| f.plus(x, y)),
            Pointwise { base, .. } => self.zip_table(base, a, b, |f, x, y| f.plus(x, y)),
            PowersetMonoid(m) => {
                let (x, y) = (a.as_idx()?, b.as_idx()?);
                let mut out = 0usize;
                for i in 0..m.size() {
                    if x & (1 << i) == 0 {
                        continue;
                    }
                    for j in 0..m.size() {
                        if y & (1 << j) != 0 {
                            out |= 1 << m.table[i][j];
                        }
                    }
                }
                Ok(QuantaleElem::Idx(out))
            }
            IntervalLattice => Ok(QuantaleElem::Interval(a.as_interval()?.hull(b.as_interval()?))),
        }
    }

    pub fn join2(&self, a: &QuantaleElem, b: &QuantaleElem) -> Result<QuantaleElem> {
        use QuantaleKind::*;
        match &self.kind {
            Lawvere | SupLocale => Ok(QuantaleElem::Ext(a.as_ext()?.max(b.as_ext()?))),
            TruncChain { .. } | DiscreteTwo => Ok(QuantaleElem::Idx(a.as_idx()?.max(b.as_idx()?))),
            Product(fs) => self.zip_product(fs, a, b, |f, x, y| f.join2(x, y)),
            Pointwise { base, .. } => self.zip_table(base, a, b, |f, x, y| f.join2(x, y)),
            PowersetMonoid(_) => Ok(QuantaleElem::Idx(a.as_idx()? | b.as_idx()?)),
            IntervalLattice => Ok(QuantaleElem::Interval(a.as_interval()?.hull(b.as_interval()?))),
        }
    }

    pub fn meet2(&self, a: &QuantaleElem, b: &QuantaleElem) -> Result<QuantaleElem> {
        use QuantaleKind::*;
        match &self.kind {
            Lawvere | SupLocale => Ok(QuantaleElem::Ext(a.as_ext()?.min(b.as_ext()?))),
            TruncChain { .. } | DiscreteTwo => Ok(QuantaleElem::Idx(a.as_idx()?.min(b.as_idx()?))),
            Product(fs) => self.zip_product(fs, a, b, |f, x, y| f.meet2(x, y)),
            Pointwise { base, .. } => self.zip_table(base, a, b, |f, x, y| f.meet2(x, y)),
            PowersetMonoid(_) => Ok(QuantaleElem::Idx(a.as_idx()? & b.as_idx()?)),
            IntervalLattice => {
                Ok(QuantaleElem::Interval(a.as_interval()?.intersect(b.as_interval()?)))
            }
        }
    }

    /// Join of finitely many elements; the empty join is ⊥.
    pub fn join<I>(&self, items: I) -> Result<QuantaleElem>
    where
        I: IntoIterator<Item = QuantaleElem>,
    {
        let mut acc = self.bottom();
        for x in items {
            acc = self.join2(&acc, &x)?;
        }
        Ok(acc)
    }

    /// Meet of finitely many elements; the empty meet is ⊤.
    pub fn meet<I>(&self, items: I) -> Result<QuantaleElem>
    where
        I: IntoIterator<Item = QuantaleElem>,
    {
        let mut acc = self.top();
        for x in items {
            acc = self.meet2(&acc, &x)?;
        }
        Ok(acc)
    }

    /// Residual a ⊸ b = ⋀{δ | b + δ ≥ a}. Closed forms where available,
    /// brute force over the carrier for the powerset kind.
    pub fn residual(&self, a: &QuantaleElem, b: &QuantaleElem) -> Result<QuantaleElem> {
        use QuantaleKind::*;
        match &self.kind {
            Lawvere => Ok(QuantaleElem::Ext(ext::resid(a.as_ext()?, b.as_ext()?))),
            SupLocale => Ok(QuantaleElem::Ext(ext::arrow(a.as_ext()?, b.as_ext()?))),
            TruncChain { n } => {
                let (i, j) = (a.as_idx()?, b.as_idx()?);
                self.check_chain_idx(i)?;
                self.check_chain_idx(j)?;
                // truncated subtraction in the chain, mirroring the half-line
                Ok(QuantaleElem::Idx(if j > *n {
                    0
                } else if i > *n {
                    n + 1
                } else {
                    i.saturating_sub(j)
                }))
            }
            DiscreteTwo => {
                let (i, j) = (a.as_idx()?, b.as_idx()?);
                Ok(QuantaleElem::Idx(if i == 1 && j == 0 { 1 } else { 0 }))
            }
            Product(fs) => self.zip_product(fs, a, b, |f, x, y| f.residual(x, y)),
            Pointwise { base, .. } => self.zip_table(base, a, b, |f, x, y| f.residual(x, y)),
            PowersetMonoid(m) => {
                // meet of every candidate; the defining infimum, adjoint or not
                let mut acc = (1usize << m.size()) - 1;
                for d in 0..(1usize << m.size()) {
                    let sum = self.plus(b, &QuantaleElem::Idx(d))?;
                    if self.leq(a, &sum)? {
                        acc &= d;
                    }
                }
                Ok(QuantaleElem::Idx(acc))
            }
            IntervalLattice => {
                // ⋀{δ | hull(b, δ) ⊇ a}: the interval lattice is not Heyting,
                // so this infimum need not itself satisfy the bound.
                let (ia, ib) = (a.as_interval()?, b.as_interval()?);
                use IntervalElem::*;
                let out = match (ia, ib) {
                    (Empty, _) => Empty,
                    (_, FullLine) => Empty,
                    (FullLine, _) => FullLine,
                    (Bounded(al, ah), Empty) => Bounded(*al, *ah),
                    (Bounded(al, ah), Bounded(bl, bh)) => {
                        let stick_left = al < bl;
                        let stick_right = ah > bh;
                        match (stick_left, stick_right) {
                            (true, true) => Bounded(*al, *ah),
                            // one-sided candidates have empty intersection
                            _ => Empty,
                        }
                    }
                };
                Ok(QuantaleElem::Interval(out))
            }
        }
    }

    /// Heyting arrow a ⇐ b = ⋀{δ | b ∨ δ ≥ a}. Errors on non-Heyting kinds.
    pub fn heyting_arrow(&self, a: &QuantaleElem, b: &QuantaleElem) -> Result<QuantaleElem> {
        use QuantaleKind::*;
        if !self.is_heyting() {
            return Err(QuantaleError::Unsupported(format!(
                "{} has no Heyting arrow",
                self.name()
            )));
        }
        match &self.kind {
            Lawvere | SupLocale => Ok(QuantaleElem::Ext(ext::arrow(a.as_ext()?, b.as_ext()?))),
            TruncChain { .. } | DiscreteTwo => {
                let (i, j) = (a.as_idx()?, b.as_idx()?);
                Ok(QuantaleElem::Idx(if i <= j { 0 } else { i }))
            }
            Product(fs) => self.zip_product(fs, a, b, |f, x, y| f.heyting_arrow(x, y)),
            Pointwise { base, .. } => self.zip_table(base, a, b, |f, x, y| f.heyting_arrow(x, y)),
            PowersetMonoid(_) => Ok(QuantaleElem::Idx(a.as_idx()? & !b.as_idx()?)),
            IntervalLattice => unreachable!("rejected above"),
        }
    }

    /// 0 ≪ δ in the way-below sense used for validity radii: strictly above
    /// zero in every coordinate. Defined for chain-like kinds and their
    /// products.
    pub fn way_above_zero(&self, d: &QuantaleElem) -> Result<bool> {
        use QuantaleKind::*;
        match &self.kind {
            Lawvere | SupLocale => Ok(d.as_ext()? > 0.0),
            TruncChain { .. } | DiscreteTwo => Ok(d.as_idx()? > 0),
            Product(fs) => {
                let xs = d.as_tuple()?;
                self.check_arity(xs.len(), fs.len())?;
                for (f, x) in fs.iter().zip(xs) {
                    if !f.way_above_zero(x)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Pointwise { keys, base } => {
                let xs = d.as_table()?;
                self.check_arity(xs.len(), keys.len())?;
                for x in xs {
                    if !base.way_above_zero(x)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => Err(QuantaleError::Unsupported(format!(
                "way-below is not defined for {}",
                self.name()
            ))),
        }
    }

    /// Full enumeration for finite kinds, in a fixed canonical order.
    /// `None` for infinite kinds or when the count would exceed 2^20.
    pub fn elements(&self) -> Option<Vec<QuantaleElem>> {
        use QuantaleKind::*;
        const CAP: usize = 1 << 20;
        match &self.kind {
            Lawvere | SupLocale | IntervalLattice => None,
            TruncChain { n } => Some((0..=n + 1).map(QuantaleElem::Idx).collect()),
            DiscreteTwo => Some(vec![QuantaleElem::Idx(0), QuantaleElem::Idx(1)]),
            Product(fs) => {
                let parts: Option<Vec<Vec<QuantaleElem>>> = fs.iter().map(|f| f.elements()).collect();
                let parts = parts?;
                let count: usize = parts.iter().map(|p| p.len()).product();
                if count > CAP {
                    return None;
                }
                let mut out = vec![Vec::new()];
                for p in &parts {
                    let mut next = Vec::with_capacity(out.len() * p.len());
                    for prefix in &out {
                        for x in p {
                            let mut v = prefix.clone();
                            v.push(x.clone());
                            next.push(v);
                        }
                    }
                    out = next;
                }
                Some(out.into_iter().map(QuantaleElem::Tuple).collect())
            }
            Pointwise { keys, base } => {
                let bs = base.elements()?;
                let count = bs.len().checked_pow(keys.len() as u32)?;
                if count > CAP {
                    return None;
                }
                let mut out = vec![Vec::new()];
                for _ in 0..keys.len() {
                    let mut next = Vec::with_capacity(out.len() * bs.len());
                    for prefix in &out {
                        for x in &bs {
                            let mut v = prefix.clone();
                            v.push(x.clone());
                            next.push(v);
                        }
                    }
                    out = next;
                }
                Some(out.into_iter().map(QuantaleElem::Table).collect())
            }
            PowersetMonoid(m) => Some((0..1usize << m.size()).map(QuantaleElem::Idx).collect()),
        }
    }

    /// Renders an element for reports and the text matrix format.
    pub fn render(&self, e: &QuantaleElem) -> String {
        use QuantaleKind::*;
        match (&self.kind, e) {
            (Lawvere | SupLocale, QuantaleElem::Ext(x)) => fmt_ext(*x),
            (TruncChain { n }, QuantaleElem::Idx(i)) => {
                if *i > *n {
                    "inf".into()
                } else {
                    i.to_string()
                }
            }
            (DiscreteTwo, QuantaleElem::Idx(i)) => {
                if *i == 0 {
                    "0".into()
                } else {
                    "inf".into()
                }
            }
            (Product(fs), QuantaleElem::Tuple(xs)) => {
                let inner: Vec<String> =
                    fs.iter().zip(xs).map(|(f, x)| f.render(x)).collect();
                format!("({})", inner.join(","))
            }
            (Pointwise { keys, base }, QuantaleElem::Table(xs)) => {
                let inner: Vec<String> = keys
                    .iter()
                    .zip(xs)
                    .map(|((p, _), x)| format!("p{}:{}", p, base.render(x)))
                    .collect();
                format!("{{{}}}", inner.join(" "))
            }
            (PowersetMonoid(m), QuantaleElem::Idx(mask)) => {
                let inner: Vec<String> =
                    (0..m.size()).filter(|i| mask & (1 << i) != 0).map(|i| i.to_string()).collect();
                format!("{{{}}}", inner.join(","))
            }
            (IntervalLattice, QuantaleElem::Interval(i)) => match i {
                IntervalElem::Empty => "empty".into(),
                IntervalElem::Bounded(l, h) => format!("[{},{}]", fmt_ext(*l), fmt_ext(*h)),
                IntervalElem::FullLine => "full".into(),
            },
            _ => format!("{e:?}"),
        }
    }

    /// Parses one element in the same syntax `render` produces.
    pub fn parse_elem(&self, s: &str) -> Result<QuantaleElem> {
        use QuantaleKind::*;
        let s = s.trim();
        let bad = || QuantaleError::Parse(format!("bad element {s:?} for {}", self.name()));
        match &self.kind {
            Lawvere | SupLocale => {
                if s == "inf" {
                    Ok(QuantaleElem::Ext(ext::INF))
                } else {
                    let x: f64 = s.parse().map_err(|_| bad())?;
                    if x < 0.0 {
                        return Err(bad());
                    }
                    Ok(QuantaleElem::ext(x))
                }
            }
            TruncChain { n } => {
                if s == "inf" {
                    Ok(QuantaleElem::Idx(n + 1))
                } else {
                    let i: usize = s.parse().map_err(|_| bad())?;
                    if i > *n {
                        return Err(bad());
                    }
                    Ok(QuantaleElem::Idx(i))
                }
            }
            DiscreteTwo => match s {
                "0" => Ok(QuantaleElem::Idx(0)),
                "inf" => Ok(QuantaleElem::Idx(1)),
                _ => Err(bad()),
            },
            Product(fs) => {
                let body = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
                let parts = split_top_level(body, ',');
                if parts.len() != fs.len() {
                    return Err(bad());
                }
                let xs: Result<Vec<QuantaleElem>> =
                    fs.iter().zip(parts).map(|(f, p)| f.parse_elem(p)).collect();
                Ok(QuantaleElem::Tuple(xs?))
            }
            IntervalLattice => match s {
                "empty" => Ok(QuantaleElem::Interval(IntervalElem::Empty)),
                "full" => Ok(QuantaleElem::Interval(IntervalElem::FullLine)),
                _ => {
                    let body =
                        s.strip_prefix('[').and_then(|t| t.strip_suffix(']')).ok_or_else(bad)?;
                    let parts: Vec<&str> = body.splitn(2, ',').collect();
                    if parts.len() != 2 {
                        return Err(bad());
                    }
                    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
                    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
                    if lo > hi {
                        return Err(bad());
                    }
                    Ok(QuantaleElem::Interval(IntervalElem::bounded(lo, hi)))
                }
            },
            _ => Err(QuantaleError::Unsupported(format!(
                "no text syntax for elements of {}",
                self.name()
            ))),
        }
    }

    /// Parses a descriptor from its textual config, e.g. `chain(4)`,
    /// `product(lawvere,two)`, `interval`, `powerset(z4)`.
    pub fn parse(s: &str) -> Result<QuantaleDesc> {
        let s = s.trim();
        let bad = || QuantaleError::Parse(format!("bad quantale config {s:?}"));
        match s {
            "lawvere" => return Ok(QuantaleDesc::lawvere()),
            "suplocale" => return Ok(QuantaleDesc::sup_locale()),
            "two" => return Ok(QuantaleDesc::discrete_two()),
            "interval" => return Ok(QuantaleDesc::interval_lattice()),
            _ => {}
        }
        if let Some(body) = s.strip_prefix("chain(").and_then(|t| t.strip_suffix(')')) {
            let n: usize = body.trim().parse().map_err(|_| bad())?;
            if n > 64 {
                return Err(bad());
            }
            return Ok(QuantaleDesc::trunc_chain(n));
        }
        if let Some(body) = s.strip_prefix("product(").and_then(|t| t.strip_suffix(')')) {
            let parts = split_top_level(body, ',');
            if parts.is_empty() {
                return Err(bad());
            }
            let fs: Result<Vec<QuantaleDesc>> = parts.iter().map(|p| QuantaleDesc::parse(p)).collect();
            return Ok(QuantaleDesc::product(fs?));
        }
        if let Some(body) = s.strip_prefix("powerset(").and_then(|t| t.strip_suffix(')')) {
            let body = body.trim();
            if let Some(n) = body.strip_prefix('z') {
                let n: usize = n.parse().map_err(|_| bad())?;
                if n == 0 || n > 8 {
                    return Err(bad());
                }
                return Ok(QuantaleDesc::powerset(FiniteMonoid::cyclic(n)));
            }
            return Err(bad());
        }
        Err(bad())
    }

    fn zip_product<F>(
        &self,
        fs: &[QuantaleDesc],
        a: &QuantaleElem,
        b: &QuantaleElem,
        op: F,
    ) -> Result<QuantaleElem>
    where
        F: Fn(&QuantaleDesc, &QuantaleElem, &QuantaleElem) -> Result<QuantaleElem>,
    {
        let (xs, ys) = (a.as_tuple()?, b.as_tuple()?);
        self.check_arity(xs.len(), fs.len())?;
        self.check_arity(ys.len(), fs.len())?;
        let out: Result<Vec<QuantaleElem>> =
            fs.iter().zip(xs.iter().zip(ys)).map(|(f, (x, y))| op(f, x, y)).collect();
        Ok(QuantaleElem::Tuple(out?))
    }

    fn zip_table<F>(
        &self,
        base: &QuantaleDesc,
        a: &QuantaleElem,
        b: &QuantaleElem,
        op: F,
    ) -> Result<QuantaleElem>
    where
        F: Fn(&QuantaleDesc, &QuantaleElem, &QuantaleElem) -> Result<QuantaleElem>,
    {
        let (xs, ys) = (a.as_table()?, b.as_table()?);
        if xs.len() != ys.len() {
            return shape(format!("table lengths differ: {} vs {}", xs.len(), ys.len()));
        }
        let out: Result<Vec<QuantaleElem>> =
            xs.iter().zip(ys).map(|(x, y)| op(base, x, y)).collect();
        Ok(QuantaleElem::Table(out?))
    }

    fn check_arity(&self, got: usize, want: usize) -> Result<()> {
        if got != want {
            shape(format!("{}: arity {} where {} expected", self.name(), got, want))
        } else {
            Ok(())
        }
    }

    fn check_chain_idx(&self, i: usize) -> Result<()> {
        if let QuantaleKind::TruncChain { n } = &self.kind {
            if i > n + 1 {
                return shape(format!("chain({n}) has no element with index {i}"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for QuantaleDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Approximate element equality, recursive; `tol` applies on real components.
pub fn elems_close(q: &QuantaleDesc, a: &QuantaleElem, b: &QuantaleElem, tol: f64) -> bool {
    use QuantaleElem::*;
    match (a, b) {
        (Ext(x), Ext(y)) => ext::close(*x, *y, tol),
        (Idx(x), Idx(y)) => x == y,
        (Tuple(xs), Tuple(ys)) => {
            if let QuantaleKind::Product(fs) = &q.kind {
                xs.len() == ys.len()
                    && fs.len() == xs.len()
                    && fs.iter().zip(xs.iter().zip(ys)).all(|(f, (x, y))| elems_close(f, x, y, tol))
            } else {
                false
            }
        }
        (Table(xs), Table(ys)) => {
            if let QuantaleKind::Pointwise { base, .. } = &q.kind {
                xs.len() == ys.len()
                    && xs.iter().zip(ys).all(|(x, y)| elems_close(base, x, y, tol))
            } else {
                false
            }
        }
        (Interval(x), Interval(y)) => match (x, y) {
            (IntervalElem::Empty, IntervalElem::Empty) => true,
            (IntervalElem::FullLine, IntervalElem::FullLine) => true,
            (IntervalElem::Bounded(al, ah), IntervalElem::Bounded(bl, bh)) => {
                ext::close(*al, *bl, tol) && ext::close(*ah, *bh, tol)
            }
            _ => false,
        },
        _ => false,
    }
}

fn fmt_ext(x: f64) -> String {
    if x == ext::INF {
        "inf".into()
    } else {
        format!("{x}")
    }
}

fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(s[start..].trim());
    parts.into_iter().filter(|p| !p.is_empty()).collect()
}
