//! Exact engine for quantitative logical relations on finite carriers: a QLR
//! is a set with a quantale-valued distance matrix and no axioms at all; maps
//! carry a derivative table φ with a(x,y) ≤ α ⟹ b(f x, f y) ≤ φ(x,α).
//! Everything here is brute force by design: joins are computed over the
//! whole carrier, exponentials enumerate all functions, and validity is
//! decided by comparing against the pointwise-smallest derivative.

pub mod axioms;
pub mod curry;
pub mod exp;
pub mod laws;
pub mod text;

pub use axioms::{check_axioms, induced_metric, AxiomId};
pub use curry::{curry_q, curry_qr, normalize_qr, uncurry_q, uncurry_qr};
pub use exp::{check_symmetric_exp, distance_via_hfg, exp_q, exp_qr, ExpQlr};
pub use laws::check_derivative_laws;
pub use text::{parse_space, render_space};

use crate::quantale::{QuantaleDesc, QuantaleElem, QuantaleError, Result};
use std::collections::BTreeMap;

/// Size caps for the double-exponential constructions.
pub const MAX_CARRIER: usize = 4;
pub const MAX_QUANTALE: usize = 8;
pub const MAX_EXP_CARRIER: usize = 4096;

/// A finite quantitative logical relation (X, Q, a).
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteQlr {
    pub name: String,
    pub quantale: QuantaleDesc,
    pub points: Vec<String>,
    /// dist[i][j] = a(x_i, x_j); no axioms assumed.
    pub dist: Vec<Vec<QuantaleElem>>,
}

impl FiniteQlr {
    pub fn new(
        name: impl Into<String>,
        quantale: QuantaleDesc,
        points: Vec<String>,
        dist: Vec<Vec<QuantaleElem>>,
    ) -> Result<Self> {
        let n = points.len();
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(QuantaleError::Shape(format!(
                "distance matrix must be {n}x{n} for {n} points"
            )));
        }
        let s = FiniteQlr { name: name.into(), quantale, points, dist };
        for row in &s.dist {
            for e in row {
                s.quantale.leq(e, e)?; // shape check against the descriptor
            }
        }
        Ok(s)
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn d(&self, i: usize, j: usize) -> &QuantaleElem {
        &self.dist[i][j]
    }

    /// a(x,x) ≤ 0 at every point.
    pub fn is_reflexive(&self) -> Result<bool> {
        let zero = self.quantale.zero();
        for i in 0..self.size() {
            if !self.quantale.leq(self.d(i, i), &zero)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The discrete space: self-distance 0, distinct points at ⊤.
    pub fn discrete(name: impl Into<String>, n: usize, quantale: QuantaleDesc) -> Result<Self> {
        let points: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let zero = quantale.zero();
        let top = quantale.top();
        let dist = (0..n)
            .map(|i| (0..n).map(|j| if i == j { zero.clone() } else { top.clone() }).collect())
            .collect();
        FiniteQlr::new(name, quantale, points, dist)
    }
}

/// A function together with a derivative candidate.
/// `phi[x][k]` is φ(x, α_k) where α_k is the k-th element of the domain
/// quantale's canonical enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteQlrMap {
    pub f: Vec<usize>,
    pub phi: Vec<Vec<QuantaleElem>>,
}

impl FiniteQlrMap {
    pub fn new(f: Vec<usize>, phi: Vec<Vec<QuantaleElem>>) -> Self {
        FiniteQlrMap { f, phi }
    }
}

/// The smallest derivative at one probe:
/// D(f)(x, α) = ⋁ { b(f(x), f(y)) | a(x,y) ≤ α }.
/// The join over an empty neighbourhood is ⊥ of the codomain quantale;
/// y = x itself participates only when a(x,x) ≤ α.
pub fn derivative(
    dom: &FiniteQlr,
    cod: &FiniteQlr,
    f: &[usize],
    x: usize,
    alpha: &QuantaleElem,
) -> Result<QuantaleElem> {
    let mut vals = Vec::new();
    for y in 0..dom.size() {
        if dom.quantale.leq(dom.d(x, y), alpha)? {
            vals.push(cod.d(f[x], f[y]).clone());
        }
    }
    cod.quantale.join(vals)
}

/// The full derivative table, rows indexed by carrier point, columns by the
/// domain quantale's canonical enumeration. Errors when the domain quantale
/// is not finitely enumerable.
pub fn derivative_table(
    dom: &FiniteQlr,
    cod: &FiniteQlr,
    f: &[usize],
) -> Result<Vec<Vec<QuantaleElem>>> {
    let elems = dom_elements(dom)?;
    let mut out = Vec::with_capacity(dom.size());
    for x in 0..dom.size() {
        let mut row = Vec::with_capacity(elems.len());
        for a in &elems {
            row.push(derivative(dom, cod, f, x, a)?);
        }
        out.push(row);
    }
    Ok(out)
}

/// The map (f, D(f)) with the smallest valid derivative.
pub fn canonical_map(dom: &FiniteQlr, cod: &FiniteQlr, f: Vec<usize>) -> Result<FiniteQlrMap> {
    let phi = derivative_table(dom, cod, &f)?;
    Ok(FiniteQlrMap::new(f, phi))
}

/// The QLR-map condition, decided by comparing φ against the smallest
/// derivative pointwise: (f, φ) is valid iff φ(x, α) ≥ D(f)(x, α) everywhere.
pub fn is_valid_map(dom: &FiniteQlr, cod: &FiniteQlr, m: &FiniteQlrMap) -> Result<bool> {
    let elems = dom_elements(dom)?;
    if m.f.len() != dom.size()
        || m.f.iter().any(|&y| y >= cod.size())
        || m.phi.len() != dom.size()
        || m.phi.iter().any(|row| row.len() != elems.len())
    {
        return Err(QuantaleError::Shape("map tables do not fit the given spaces".into()));
    }
    for x in 0..dom.size() {
        for (k, a) in elems.iter().enumerate() {
            let d = derivative(dom, cod, &m.f, x, a)?;
            if !cod.quantale.leq(&d, &m.phi[x][k])? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// All functions {0..nx} → {0..ny} as tables, in lexicographic order with
/// the image of point 0 most significant.
pub fn enumerate_functions(nx: usize, ny: usize) -> Vec<Vec<usize>> {
    let total = ny.checked_pow(nx as u32).expect("function space overflow");
    let mut out = Vec::with_capacity(total);
    for mut code in 0..total {
        let mut f = vec![0usize; nx];
        for slot in (0..nx).rev() {
            f[slot] = code % ny;
            code /= ny;
        }
        out.push(f);
    }
    out
}

/// Every valid map (f, φ): all functions paired with every φ in the up-set
/// of D(f), slot by slot. Errors when the total would exceed `cap`.
pub fn enumerate_valid_maps(
    dom: &FiniteQlr,
    cod: &FiniteQlr,
    cap: usize,
) -> Result<Vec<FiniteQlrMap>> {
    let elems = dom_elements(dom)?;
    let cod_elems = dom_elements_of(&cod.quantale)?;
    let mut out = Vec::new();
    for f in enumerate_functions(dom.size(), cod.size()) {
        // per-slot up-sets of the smallest derivative
        let mut slots: Vec<Vec<QuantaleElem>> = Vec::with_capacity(dom.size() * elems.len());
        for x in 0..dom.size() {
            for a in &elems {
                let d = derivative(dom, cod, &f, x, a)?;
                let mut up = Vec::new();
                for e in &cod_elems {
                    if cod.quantale.leq(&d, e)? {
                        up.push(e.clone());
                    }
                }
                slots.push(up);
            }
        }
        let count: usize = slots.iter().map(|s| s.len()).product();
        if count == 0 {
            continue;
        }
        if out.len() + count > cap {
            return Err(QuantaleError::Domain(format!(
                "valid-map enumeration exceeds cap {cap}"
            )));
        }
        let mut idx = vec![0usize; slots.len()];
        'emit: loop {
            let mut phi = vec![Vec::with_capacity(elems.len()); dom.size()];
            for (s, slot) in slots.iter().enumerate() {
                phi[s / elems.len()].push(slot[idx[s]].clone());
            }
            out.push(FiniteQlrMap::new(f.clone(), phi));
            // odometer, last slot fastest
            let mut s = slots.len();
            loop {
                if s == 0 {
                    break 'emit;
                }
                s -= 1;
                idx[s] += 1;
                if idx[s] < slots[s].len() {
                    break;
                }
                idx[s] = 0;
            }
        }
    }
    Ok(out)
}

/// Cartesian product: carrier X×Y, quantale Q×R, pairwise distance.
/// Point (i, j) sits at index i·|Y| + j.
pub fn product_qlr(a: &FiniteQlr, b: &FiniteQlr) -> Result<FiniteQlr> {
    let points: Vec<String> = a
        .points
        .iter()
        .flat_map(|p| b.points.iter().map(move |q| format!("({p},{q})")))
        .collect();
    let quantale = QuantaleDesc::product(vec![a.quantale.clone(), b.quantale.clone()]);
    let (na, nb) = (a.size(), b.size());
    let mut dist = Vec::with_capacity(na * nb);
    for i in 0..na {
        for j in 0..nb {
            let mut row = Vec::with_capacity(na * nb);
            for i2 in 0..na {
                for j2 in 0..nb {
                    row.push(QuantaleElem::Tuple(vec![
                        a.d(i, i2).clone(),
                        b.d(j, j2).clone(),
                    ]));
                }
            }
            dist.push(row);
        }
    }
    FiniteQlr::new(format!("({}x{})", a.name, b.name), quantale, points, dist)
}

/// The terminal QLR: one point over the empty-product quantale.
pub fn unit_qlr() -> FiniteQlr {
    FiniteQlr::new(
        "unit",
        QuantaleDesc::product(vec![]),
        vec!["*".into()],
        vec![vec![QuantaleElem::Tuple(vec![])]],
    )
    .expect("unit space is well formed")
}

/// Flat index of the pair (i, j) in `product_qlr(a, b)` with |Y| = nb.
pub fn pair_idx(i: usize, j: usize, nb: usize) -> usize {
    i * nb + j
}

/// The join-closure of the distances realized from `x` (always contains ⊥,
/// the empty join). These are the budgets at which the identity and
/// projection derivative laws are exact theorems on arbitrary instances.
pub fn realized_budgets(space: &FiniteQlr, x: usize) -> Result<Vec<QuantaleElem>> {
    let q = &space.quantale;
    let mut set: Vec<QuantaleElem> = vec![q.bottom()];
    for y in 0..space.size() {
        let e = space.d(x, y).clone();
        if !set.contains(&e) {
            set.push(e);
        }
    }
    loop {
        let mut grew = false;
        let snapshot = set.clone();
        for a in &snapshot {
            for b in &snapshot {
                let j = q.join2(a, b)?;
                if !set.contains(&j) {
                    set.push(j);
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    set.sort();
    Ok(set)
}

/// Canonical element index for a finitely enumerable quantale.
pub fn elem_index(q: &QuantaleDesc) -> Result<BTreeMap<QuantaleElem, usize>> {
    let elems = dom_elements_of(q)?;
    Ok(elems.into_iter().enumerate().map(|(i, e)| (e, i)).collect())
}

pub(crate) fn dom_elements(space: &FiniteQlr) -> Result<Vec<QuantaleElem>> {
    dom_elements_of(&space.quantale)
}

pub(crate) fn dom_elements_of(q: &QuantaleDesc) -> Result<Vec<QuantaleElem>> {
    q.elements().ok_or_else(|| {
        QuantaleError::Unsupported(format!(
            "{} is not finitely enumerable; this operation needs the full carrier",
            q.name()
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain_space(name: &str, n: usize, rows: &[&[usize]]) -> FiniteQlr {
        let q = QuantaleDesc::trunc_chain(n);
        let points = (0..rows.len()).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
        let dist = rows
            .iter()
            .map(|r| r.iter().map(|&k| QuantaleElem::Idx(k)).collect())
            .collect();
        FiniteQlr::new(name, q, points, dist).unwrap()
    }

    #[test]
    fn derivative_golden_three_point_chain() {
        // hand-derived before implementation: X over chain(3) = {0,1,2,3,inf},
        // rows a=[1,2,inf], b=[0,0,3], c=[2,inf,1], f the cycle a→b→c→a
        let x = chain_space("X", 3, &[&[1, 2, 4], &[0, 0, 3], &[2, 4, 1]]);
        let f = vec![1, 2, 0];
        let got = derivative_table(&x, &x, &f).unwrap();
        let want: Vec<Vec<QuantaleElem>> = [
            [0, 0, 3, 3, 3],
            [4, 4, 4, 4, 4],
            [0, 1, 2, 2, 4],
        ]
        .iter()
        .map(|row| row.iter().map(|&k| QuantaleElem::Idx(k)).collect())
        .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn constant_map_derivative_is_self_distance() {
        let x = chain_space("X", 3, &[&[0, 2, 4], &[2, 0, 3], &[4, 3, 0]]);
        let f = vec![1, 1, 1];
        let table = derivative_table(&x, &x, &f).unwrap();
        for row in table {
            for v in row {
                assert_eq!(v, QuantaleElem::Idx(0));
            }
        }
    }

    #[test]
    fn identity_derivative_at_realized_budgets() {
        // D(id)(x, α) = α whenever α is a join of distances realized from x
        let x = chain_space("X", 3, &[&[1, 2, 4], &[0, 0, 3], &[2, 4, 1]]);
        let id: Vec<usize> = (0..3).collect();
        for p in 0..3 {
            for alpha in realized_budgets(&x, p).unwrap() {
                let d = derivative(&x, &x, &id, p, &alpha).unwrap();
                assert_eq!(d, alpha, "point {p}");
            }
        }
    }

    #[test]
    fn identity_derivative_fails_at_unrealized_budget() {
        // all-zero matrix over DiscreteTwo: at the unrealized budget ∞ the
        // defining sup only sees the realized distance 0 — the textbook
        // equality D(id)(x,α) = α genuinely fails here, which is why law
        // checks quantify over realized joins
        let q = QuantaleDesc::discrete_two();
        let z = QuantaleElem::Idx(0);
        let x = FiniteQlr::new(
            "Z",
            q,
            vec!["u".into(), "v".into()],
            vec![vec![z.clone(), z.clone()], vec![z.clone(), z.clone()]],
        )
        .unwrap();
        let d = derivative(&x, &x, &[0, 1], 0, &QuantaleElem::Idx(1)).unwrap();
        assert_eq!(d, QuantaleElem::Idx(0));
        assert_ne!(d, QuantaleElem::Idx(1));
    }

    #[test]
    fn validity_is_dominating_the_smallest_derivative() {
        let x = chain_space("X", 2, &[&[0, 1], &[1, 0]]);
        let f = vec![1, 0];
        let m = canonical_map(&x, &x, f.clone()).unwrap();
        assert!(is_valid_map(&x, &x, &m).unwrap());
        // shrink one slot strictly below D(f): no longer valid
        let mut bad = m.clone();
        let slot = bad.phi[0]
            .iter()
            .position(|e| *e != QuantaleElem::Idx(0))
            .expect("some nonzero derivative entry");
        bad.phi[0][slot] = QuantaleElem::Idx(0);
        assert!(!is_valid_map(&x, &x, &bad).unwrap());
        // inflate a slot: still valid
        let mut big = m.clone();
        big.phi[1][0] = x.quantale.top();
        assert!(is_valid_map(&x, &x, &big).unwrap());
    }

    #[test]
    fn product_distances_are_pairwise() {
        let a = chain_space("A", 2, &[&[0, 2], &[1, 0]]);
        let b = chain_space("B", 2, &[&[0, 3], &[3, 0]]);
        let p = product_qlr(&a, &b).unwrap();
        assert_eq!(p.size(), 4);
        let got = p.d(pair_idx(0, 1, 2), pair_idx(1, 0, 2));
        assert_eq!(
            *got,
            QuantaleElem::Tuple(vec![QuantaleElem::Idx(2), QuantaleElem::Idx(3)])
        );
    }

    #[test]
    fn unit_product_is_isomorphic_to_space() {
        // unit × X has the same distance table as X modulo the tuple wrapper
        let x = chain_space("X", 2, &[&[0, 2], &[1, 0]]);
        let u = unit_qlr();
        let p = product_qlr(&u, &x).unwrap();
        assert_eq!(p.size(), x.size());
        for i in 0..x.size() {
            for j in 0..x.size() {
                let t = p.d(i, j).as_tuple().unwrap();
                assert_eq!(t[0], QuantaleElem::Tuple(vec![]));
                assert_eq!(t[1], *x.d(i, j));
            }
        }
    }

    #[test]
    fn valid_map_enumeration_counts() {
        // discrete 1-point chain(1) spaces: f unique, D = 0 at all three
        // budgets, up-set sizes 3·3·3 → 27 valid maps
        let x = chain_space("X", 1, &[&[0]]);
        let maps = enumerate_valid_maps(&x, &x, 10_000).unwrap();
        assert_eq!(maps.len(), 27);
        for m in &maps {
            assert!(is_valid_map(&x, &x, m).unwrap());
        }
    }

    #[test]
    fn realized_budgets_are_join_closed() {
        let x = chain_space("X", 3, &[&[1, 2, 4], &[0, 0, 3], &[2, 4, 1]]);
        let budgets = realized_budgets(&x, 0).unwrap();
        // row a realizes {1,2,inf}; closure adds bottom 0
        let want: Vec<QuantaleElem> = [0usize, 1, 2, 4].iter().map(|&k| QuantaleElem::Idx(k)).collect();
        assert_eq!(budgets, want);
    }
}
