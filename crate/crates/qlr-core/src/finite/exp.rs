//! Exponential QLR: the carrier is every function X → Y, distances live in
//! the pointwise quantale over probe keys (x, α) with
//!
//!   d^Q(f,g)(x,α) = ⋁ { b(f x, g y), b(f x, f y) | a(x,y) ≤ α }
//!
//! and the reflexive variant corrects by the self-variation,
//! d^{Q^r}(f,g) = d^Q(f,g) ⇐ D(f). The self-distance laws d^Q(f,f) = D(f)
//! and d^{Q^r}(f,f) = 0 fall out structurally and are pinned in tests, as is
//! the characterization of d^Q through the derivative of the tagged map
//! h_{f,g} on 2 × X.

use super::{
    check_axioms, derivative, dom_elements, enumerate_functions, pair_idx, product_qlr, AxiomId,
    FiniteQlr, MAX_CARRIER, MAX_EXP_CARRIER, MAX_QUANTALE,
};
use crate::quantale::{QuantaleDesc, QuantaleElem, QuantaleError, Result};

/// An exponential space plus the bookkeeping to map carrier indices back to
/// function tables and probe keys.
#[derive(Debug, Clone)]
pub struct ExpQlr {
    pub space: FiniteQlr,
    /// funcs[i] is the function table of carrier point i.
    pub funcs: Vec<Vec<usize>>,
    /// Probe keys (domain point, budget), aligned with every Table element.
    pub keys: Vec<(u32, QuantaleElem)>,
}

impl ExpQlr {
    pub fn key_count(&self) -> usize {
        self.keys.len()
    }

    /// Index of the probe key (x, α) in every distance Table.
    pub fn key_index(&self, x: usize, alpha: &QuantaleElem) -> Option<usize> {
        self.keys.iter().position(|(p, a)| *p == x as u32 && a == alpha)
    }

    /// Carrier index of a function table.
    pub fn func_index(&self, f: &[usize]) -> Option<usize> {
        self.funcs.iter().position(|g| g == f)
    }
}

fn check_caps(dom: &FiniteQlr, cod: &FiniteQlr) -> Result<(Vec<QuantaleElem>, usize)> {
    let elems = dom_elements(dom)?;
    if dom.size() > MAX_CARRIER || cod.size() > MAX_CARRIER || elems.len() > MAX_QUANTALE {
        return Err(QuantaleError::Domain(format!(
            "exponential caps exceeded: |X|={} |Y|={} |Q|={} (limits {MAX_CARRIER}/{MAX_QUANTALE})",
            dom.size(),
            cod.size(),
            elems.len()
        )));
    }
    let carrier = cod.size().pow(dom.size() as u32);
    if carrier > MAX_EXP_CARRIER {
        return Err(QuantaleError::Domain(format!(
            "exponential carrier |Y|^|X| = {carrier} exceeds {MAX_EXP_CARRIER}"
        )));
    }
    Ok((elems, carrier))
}

/// One d^Q entry as a Table aligned with `keys`.
fn dq_entry(
    dom: &FiniteQlr,
    cod: &FiniteQlr,
    keys: &[(u32, QuantaleElem)],
    f: &[usize],
    g: &[usize],
) -> Result<QuantaleElem> {
    let mut vals = Vec::with_capacity(keys.len());
    for (x, alpha) in keys {
        let x = *x as usize;
        let mut parts = Vec::new();
        for y in 0..dom.size() {
            if dom.quantale.leq(dom.d(x, y), alpha)? {
                parts.push(cod.d(f[x], g[y]).clone());
                parts.push(cod.d(f[x], f[y]).clone());
            }
        }
        vals.push(cod.quantale.join(parts)?);
    }
    Ok(QuantaleElem::Table(vals))
}

/// The exponential (Y^X, R^{X×Q}, d^Q).
pub fn exp_q(dom: &FiniteQlr, cod: &FiniteQlr) -> Result<ExpQlr> {
    let (elems, _) = check_caps(dom, cod)?;
    let mut keys = Vec::with_capacity(dom.size() * elems.len());
    for x in 0..dom.size() {
        for a in &elems {
            keys.push((x as u32, a.clone()));
        }
    }
    let funcs = enumerate_functions(dom.size(), cod.size());
    let quantale = QuantaleDesc::pointwise(keys.clone(), cod.quantale.clone());
    let points: Vec<String> = funcs
        .iter()
        .map(|f| {
            let names: Vec<&str> = f.iter().map(|&y| cod.points[y].as_str()).collect();
            format!("[{}]", names.join(","))
        })
        .collect();
    let mut dist = Vec::with_capacity(funcs.len());
    for f in &funcs {
        let mut row = Vec::with_capacity(funcs.len());
        for g in &funcs {
            row.push(dq_entry(dom, cod, &keys, f, g)?);
        }
        dist.push(row);
    }
    let space = FiniteQlr::new(
        format!("({}^{})", cod.name, dom.name),
        quantale,
        points,
        dist,
    )?;
    Ok(ExpQlr { space, funcs, keys })
}

/// The reflexive-variant exponential with d^{Q^r}(f,g) = d^Q(f,g) ⇐ D(f).
/// Requires reflexive operands and a Heyting codomain quantale with the
/// separation property.
pub fn exp_qr(dom: &FiniteQlr, cod: &FiniteQlr) -> Result<ExpQlr> {
    if !cod.quantale.is_heyting() || !cod.quantale.has_star_star() {
        return Err(QuantaleError::Unsupported(format!(
            "reflexive exponential needs a Heyting codomain quantale with the separation \
             property; {} does not qualify",
            cod.quantale.name()
        )));
    }
    if !dom.is_reflexive()? || !cod.is_reflexive()? {
        return Err(QuantaleError::Domain(
            "reflexive exponential requires reflexive operand spaces".into(),
        ));
    }
    let mut exp = exp_q(dom, cod)?;
    let base = &cod.quantale;
    let n = exp.funcs.len();
    for fi in 0..n {
        let df: Vec<QuantaleElem> = {
            let f = &exp.funcs[fi];
            let mut out = Vec::with_capacity(exp.keys.len());
            for (x, alpha) in &exp.keys {
                out.push(derivative(dom, cod, f, *x as usize, alpha)?);
            }
            out
        };
        for gi in 0..n {
            let entry = exp.space.dist[fi][gi].as_table()?.to_vec();
            let corrected: Result<Vec<QuantaleElem>> =
                entry.iter().zip(&df).map(|(e, d)| base.heyting_arrow(e, d)).collect();
            exp.space.dist[fi][gi] = QuantaleElem::Table(corrected?);
        }
    }
    exp.space.name = format!("({}^{} r)", cod.name, dom.name);
    Ok(exp)
}

/// d^Q(f,g) computed through the tagged map h(i,x) = (f x if i=0 else g x)
/// on the product of the discrete two-point space with X, probed at
/// ((0,x), (∞,α)). Returns the Table aligned with exp_q keys.
pub fn distance_via_hfg(
    dom: &FiniteQlr,
    cod: &FiniteQlr,
    f: &[usize],
    g: &[usize],
) -> Result<QuantaleElem> {
    let elems = dom_elements(dom)?;
    let two = FiniteQlr::discrete("2", 2, QuantaleDesc::discrete_two())?;
    let prod = product_qlr(&two, dom)?;
    let nb = dom.size();
    let mut h = vec![0usize; 2 * nb];
    for x in 0..nb {
        h[pair_idx(0, x, nb)] = f[x];
        h[pair_idx(1, x, nb)] = g[x];
    }
    let inf = QuantaleElem::Idx(1);
    let mut vals = Vec::new();
    for x in 0..nb {
        for a in &elems {
            let budget = QuantaleElem::Tuple(vec![inf.clone(), a.clone()]);
            vals.push(derivative(&prod, cod, &h, pair_idx(0, x, nb), &budget)?);
        }
    }
    Ok(QuantaleElem::Table(vals))
}

/// Whether the plain exponential of two spaces passes the symmetry axiom.
pub fn check_symmetric_exp(dom: &FiniteQlr, cod: &FiniteQlr) -> Result<bool> {
    let exp = exp_q(dom, cod)?;
    let report = check_axioms(&exp.space, &[AxiomId::Symmetric])?;
    Ok(report.all_pass())
}
