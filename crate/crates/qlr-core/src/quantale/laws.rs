//! Law audit for a quantale descriptor: commutative-monoid laws, monotonicity
//! of +, distribution of + over meets (binary and the empty meet ⊤), the
//! residual adjunction, and where declared the Heyting adjunction and the
//! separation property β ≤ (β ⇐ α) ∨ α.
//!
//! Finite carriers are checked on all triples; infinite ones on a seeded
//! sample. Every law lands in the report with a pass flag and, on failure,
//! the first witnessing triple. Nothing here asserts: kinds that genuinely
//! break a law (the powerset monoid breaks distributivity over meets) simply
//! get an honest failing row.

use super::{elems_close, QuantaleDesc, QuantaleElem, QuantaleKind, Result};
use crate::ext;
use crate::report::{LawEntry, LawReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// x ≤ y up to `tol` on real components; exact on discrete components.
fn leq_slack(q: &QuantaleDesc, a: &QuantaleElem, b: &QuantaleElem, tol: f64) -> Result<bool> {
    use QuantaleElem::*;
    match (a, b) {
        (Ext(x), Ext(y)) => Ok(ext::leq_tol(*x, *y, tol)),
        (Tuple(xs), Tuple(ys)) => {
            if let QuantaleKind::Product(fs) = &q.kind {
                for (f, (x, y)) in fs.iter().zip(xs.iter().zip(ys)) {
                    if !leq_slack(f, x, y, tol)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            } else {
                q.leq(a, b)
            }
        }
        (Table(xs), Table(ys)) => {
            if let QuantaleKind::Pointwise { base, .. } = &q.kind {
                for (x, y) in xs.iter().zip(ys) {
                    if !leq_slack(base, x, y, tol)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            } else {
                q.leq(a, b)
            }
        }
        _ => q.leq(a, b),
    }
}

/// Deterministic element pool for sampled checking. Finite kinds return the
/// whole carrier; infinite ones a fixed spread plus seeded draws.
pub fn law_samples(q: &QuantaleDesc, seed: u64, n: usize) -> Vec<QuantaleElem> {
    if let Some(el) = q.elements() {
        if el.len() <= n.max(2) {
            return el;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = vec![q.bottom(), q.top()];
        for _ in 0..n {
            out.push(el[rng.gen_range(0..el.len())].clone());
        }
        return out;
    }
    use QuantaleKind::*;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match &q.kind {
        Lawvere | SupLocale => {
            let mut out = vec![
                QuantaleElem::ext(0.0),
                QuantaleElem::ext(1e-9),
                QuantaleElem::ext(1.0),
                QuantaleElem::Ext(ext::INF),
            ];
            for _ in 0..n {
                out.push(QuantaleElem::ext(rng.gen_range(0.0..50.0)));
            }
            out
        }
        IntervalLattice => {
            let mut out = vec![
                QuantaleElem::Interval(super::IntervalElem::Empty),
                QuantaleElem::Interval(super::IntervalElem::FullLine),
                QuantaleElem::Interval(super::IntervalElem::point(0.0)),
            ];
            for _ in 0..n {
                let a: f64 = rng.gen_range(-10.0..10.0);
                let b: f64 = rng.gen_range(-10.0..10.0);
                out.push(QuantaleElem::Interval(super::IntervalElem::bounded(
                    a.min(b),
                    a.max(b),
                )));
            }
            out
        }
        Product(fs) => {
            let parts: Vec<Vec<QuantaleElem>> = fs
                .iter()
                .enumerate()
                .map(|(i, f)| law_samples(f, seed.wrapping_add(i as u64 + 1), n))
                .collect();
            let m = parts.iter().map(|p| p.len()).min().unwrap_or(0);
            (0..m)
                .map(|i| QuantaleElem::Tuple(parts.iter().map(|p| p[i].clone()).collect()))
                .collect()
        }
        Pointwise { keys, base } => {
            let bs = law_samples(base, seed, n);
            (0..bs.len())
                .map(|i| {
                    QuantaleElem::Table(
                        (0..keys.len()).map(|k| bs[(i + k) % bs.len()].clone()).collect(),
                    )
                })
                .collect()
        }
        // finite kinds covered by elements() above
        TruncChain { .. } | DiscreteTwo | PowersetMonoid(_) => q.elements().unwrap(),
    }
}

/// Checks laws on the supplied triples. `tol` applies to real components.
pub fn check_laws_with(
    q: &QuantaleDesc,
    triples: &[(QuantaleElem, QuantaleElem, QuantaleElem)],
    tol: f64,
) -> Result<LawReport> {
    let mut report = LawReport::new(q.name());
    let w3 = |a: &QuantaleElem, b: &QuantaleElem, c: &QuantaleElem| {
        format!("a={} b={} c={}", q.render(a), q.render(b), q.render(c))
    };

    let mut assoc: Option<String> = None;
    let mut comm: Option<String> = None;
    let mut unit: Option<String> = None;
    let mut mono: Option<String> = None;
    let mut distr: Option<String> = None;
    let mut adj: Option<String> = None;
    let mut heyt: Option<String> = None;
    let mut star: Option<String> = None;

    let zero = q.zero();
    let top = q.top();
    for (a, b, c) in triples {
        if assoc.is_none() {
            let l = q.plus(&q.plus(a, b)?, c)?;
            let r = q.plus(a, &q.plus(b, c)?)?;
            if !elems_close(q, &l, &r, tol) {
                assoc = Some(w3(a, b, c));
            }
        }
        if comm.is_none() && !elems_close(q, &q.plus(a, b)?, &q.plus(b, a)?, tol) {
            comm = Some(w3(a, b, c));
        }
        if unit.is_none() && !elems_close(q, &q.plus(a, &zero)?, a, tol) {
            unit = Some(format!("a={}", q.render(a)));
        }
        if mono.is_none() && q.leq(a, b)? {
            let l = q.plus(a, c)?;
            let r = q.plus(b, c)?;
            if !leq_slack(q, &l, &r, tol)? {
                mono = Some(w3(a, b, c));
            }
        }
        if distr.is_none() {
            let l = q.plus(a, &q.meet2(b, c)?)?;
            let r = q.meet2(&q.plus(a, b)?, &q.plus(a, c)?)?;
            if !elems_close(q, &l, &r, tol) {
                distr = Some(w3(a, b, c));
            } else if !elems_close(q, &q.plus(a, &top)?, &top, tol) {
                // empty meet: α + ⊤ = ⊤
                distr = Some(format!("a={} (top absorption)", q.render(a)));
            }
        }
        if adj.is_none() {
            let res = q.residual(a, b)?;
            let lhs = leq_slack(q, &res, c, tol)?;
            let rhs = leq_slack(q, a, &q.plus(b, c)?, tol)?;
            if lhs != rhs {
                adj = Some(w3(a, b, c));
            }
        }
        if q.is_heyting() && heyt.is_none() {
            let arr = q.heyting_arrow(a, b)?;
            let lhs = leq_slack(q, &arr, c, tol)?;
            let rhs = leq_slack(q, a, &q.join2(b, c)?, tol)?;
            if lhs != rhs {
                heyt = Some(w3(a, b, c));
            }
        }
        if q.has_star_star() && star.is_none() {
            let arr = q.heyting_arrow(b, a)?;
            let v = q.join2(&arr, a)?;
            if !leq_slack(q, b, &v, tol)? {
                star = Some(format!("a={} b={}", q.render(a), q.render(b)));
            }
        }
    }

    let push = |rep: &mut LawReport, law: &str, witness: Option<String>| match witness {
        None => rep.push(LawEntry::pass(law)),
        Some(w) => rep.push(LawEntry::fail(law, w)),
    };
    push(&mut report, "plus-associative", assoc);
    push(&mut report, "plus-commutative", comm);
    push(&mut report, "plus-unit", unit);
    push(&mut report, "plus-monotone", mono);
    push(&mut report, "plus-distributes-over-meet", distr);
    push(&mut report, "residual-adjunction", adj);
    if q.is_heyting() {
        push(&mut report, "heyting-adjunction", heyt);
    }
    if q.has_star_star() {
        push(&mut report, "separation-arrow-join", star);
    }
    Ok(report)
}

/// Exhaustive on small finite carriers, otherwise a seeded sample of
/// 1000 triples from the element pool.
pub fn check_laws(q: &QuantaleDesc, seed: u64, tol: f64) -> Result<LawReport> {
    if let Some(el) = q.elements() {
        if el.len() <= 16 {
            let mut triples = Vec::with_capacity(el.len().pow(3));
            for a in &el {
                for b in &el {
                    for c in &el {
                        triples.push((a.clone(), b.clone(), c.clone()));
                    }
                }
            }
            return check_laws_with(q, &triples, tol);
        }
    }
    let pool = law_samples(q, seed, 24);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let triples: Vec<_> = (0..1000)
        .map(|_| {
            (
                pool[rng.gen_range(0..pool.len())].clone(),
                pool[rng.gen_range(0..pool.len())].clone(),
                pool[rng.gen_range(0..pool.len())].clone(),
            )
        })
        .collect();
    check_laws_with(q, &triples, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_kinds_pass_all_laws() {
        for q in [
            QuantaleDesc::lawvere(),
            QuantaleDesc::sup_locale(),
            QuantaleDesc::trunc_chain(4),
            QuantaleDesc::discrete_two(),
            QuantaleDesc::product(vec![QuantaleDesc::lawvere(), QuantaleDesc::trunc_chain(2)]),
        ] {
            let rep = check_laws(&q, 7, 1e-12).unwrap();
            assert!(rep.all_pass(), "{}:\n{}", q.name(), rep.render_text());
        }
    }

    #[test]
    fn powerset_breaks_meet_distribution_and_residuation() {
        // ℘(Z/4): elementwise + does not distribute over intersections, and
        // the residual adjunction (equivalent to that distribution) fails
        // with it. The join side is still a frame, so ⇐ is genuine.
        let q = QuantaleDesc::powerset(crate::quantale::FiniteMonoid::cyclic(4));
        let rep = check_laws(&q, 7, 0.0).unwrap();
        assert!(!rep.get("plus-distributes-over-meet").unwrap().pass);
        assert!(!rep.get("residual-adjunction").unwrap().pass);
        for law in [
            "plus-associative",
            "plus-commutative",
            "plus-unit",
            "plus-monotone",
            "heyting-adjunction",
            "separation-arrow-join",
        ] {
            assert!(rep.get(law).unwrap().pass, "{law}");
        }
    }

    #[test]
    fn interval_lattice_breaks_distribution_and_adjunction() {
        let q = QuantaleDesc::interval_lattice();
        let rep = check_laws(&q, 7, 1e-12).unwrap();
        assert!(!rep.get("plus-distributes-over-meet").unwrap().pass);
        assert!(!rep.get("residual-adjunction").unwrap().pass);
        for law in ["plus-associative", "plus-commutative", "plus-unit", "plus-monotone"] {
            assert!(rep.get(law).unwrap().pass, "{law}");
        }
        assert!(rep.get("separation-arrow-join").is_none());
    }

    #[test]
    fn reports_are_deterministic() {
        let q = QuantaleDesc::lawvere();
        let a = check_laws(&q, 42, 1e-12).unwrap().render_text();
        let b = check_laws(&q, 42, 1e-12).unwrap().render_text();
        assert_eq!(a, b);
    }
}
