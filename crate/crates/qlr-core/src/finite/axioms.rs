//! Metric-axiom checks on finite QLR instances. Every check is exhaustive
//! over the carrier and reports the lexicographically first witness under
//! the carrier ordering on failure.
//!
//! The partial-metric axioms follow the diagonal presentation: with
//! t x = a(x,x), membership a(x,y) ∈ D(Q)(t_y, t_x) plus the transitivity
//! a(x,z) ≤ a(x,y) +_{t_y} a(y,z) = a(x,y) + (a(y,z) ⊸ a(y,y)). Over the
//! Lawvere quantale these are precisely PMS1-4. The ultra variants replace
//! + by ∨ and the membership by plain domination of both self-distances.

use super::FiniteQlr;
use crate::quantale::{diagonal_member, QuantaleError, Result};
use crate::report::{AxiomReport, LawEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomId {
    Reflexive,
    Symmetric,
    Separated,
    Transitive,
    Relaxed,
    HyperRelaxed,
    PartialMetric,
    UltraMetric,
    PartialUltraMetric,
}

impl AxiomId {
    pub const ALL: [AxiomId; 9] = [
        AxiomId::Reflexive,
        AxiomId::Symmetric,
        AxiomId::Separated,
        AxiomId::Transitive,
        AxiomId::Relaxed,
        AxiomId::HyperRelaxed,
        AxiomId::PartialMetric,
        AxiomId::UltraMetric,
        AxiomId::PartialUltraMetric,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AxiomId::Reflexive => "reflexive",
            AxiomId::Symmetric => "symmetric",
            AxiomId::Separated => "separated",
            AxiomId::Transitive => "transitive",
            AxiomId::Relaxed => "relaxed",
            AxiomId::HyperRelaxed => "hyperRelaxed",
            AxiomId::PartialMetric => "partialMetric",
            AxiomId::UltraMetric => "ultraMetric",
            AxiomId::PartialUltraMetric => "partialUltraMetric",
        }
    }

    pub fn parse(s: &str) -> Option<AxiomId> {
        AxiomId::ALL.into_iter().find(|a| a.name() == s)
    }
}

/// Exhaustive axiom audit with first-witness reporting.
pub fn check_axioms(space: &FiniteQlr, which: &[AxiomId]) -> Result<AxiomReport> {
    let mut report = AxiomReport::new(space.name.clone());
    for ax in which {
        let witness = match ax {
            AxiomId::Reflexive => reflexive_witness(space)?,
            AxiomId::Symmetric => symmetric_witness(space)?,
            AxiomId::Separated => separated_witness(space)?,
            AxiomId::Transitive | AxiomId::Relaxed => triangle_witness(space)?,
            AxiomId::HyperRelaxed => hyper_relaxed_witness(space)?,
            AxiomId::PartialMetric => partial_metric_witness(space)?,
            AxiomId::UltraMetric => ultra_witness(space)?,
            AxiomId::PartialUltraMetric => partial_ultra_witness(space)?,
        };
        match witness {
            None => report.push(LawEntry::pass(ax.name())),
            Some(w) => report.push(LawEntry::fail(ax.name(), w)),
        }
    }
    Ok(report)
}

fn reflexive_witness(s: &FiniteQlr) -> Result<Option<String>> {
    let zero = s.quantale.zero();
    for i in 0..s.size() {
        if !s.quantale.leq(s.d(i, i), &zero)? {
            return Ok(Some(format!(
                "a({p},{p}) = {} > 0",
                s.quantale.render(s.d(i, i)),
                p = s.points[i]
            )));
        }
    }
    Ok(None)
}

fn symmetric_witness(s: &FiniteQlr) -> Result<Option<String>> {
    for i in 0..s.size() {
        for j in 0..s.size() {
            if s.d(i, j) != s.d(j, i) {
                return Ok(Some(format!(
                    "a({},{}) = {} but a({},{}) = {}",
                    s.points[i],
                    s.points[j],
                    s.quantale.render(s.d(i, j)),
                    s.points[j],
                    s.points[i],
                    s.quantale.render(s.d(j, i))
                )));
            }
        }
    }
    Ok(None)
}

/// Plain separation a(x,y) = 0 ⟹ x = y when the space is reflexive, and the
/// partial-metric form (a(x,y) = a(x,x) = a(y,y) ⟹ x = y) otherwise; the two
/// coincide on reflexive integral spaces.
fn separated_witness(s: &FiniteQlr) -> Result<Option<String>> {
    let reflexive = s.is_reflexive()?;
    let zero = s.quantale.zero();
    for i in 0..s.size() {
        for j in 0..s.size() {
            if i == j {
                continue;
            }
            let collapse = if reflexive {
                s.quantale.leq(s.d(i, j), &zero)?
            } else {
                s.d(i, j) == s.d(i, i) && s.d(i, j) == s.d(j, j)
            };
            if collapse {
                return Ok(Some(format!(
                    "{} and {} are at distance {} yet distinct",
                    s.points[i],
                    s.points[j],
                    s.quantale.render(s.d(i, j))
                )));
            }
        }
    }
    Ok(None)
}

fn triangle_witness(s: &FiniteQlr) -> Result<Option<String>> {
    for i in 0..s.size() {
        for j in 0..s.size() {
            for k in 0..s.size() {
                let path = s.quantale.plus(s.d(i, j), s.d(j, k))?;
                if !s.quantale.leq(s.d(i, k), &path)? {
                    return Ok(Some(triple_witness(s, i, j, k, &path)));
                }
            }
        }
    }
    Ok(None)
}

fn hyper_relaxed_witness(s: &FiniteQlr) -> Result<Option<String>> {
    for i in 0..s.size() {
        for j in 0..s.size() {
            for k in 0..s.size() {
                let mid = s.quantale.plus(s.d(j, j), s.d(j, k))?;
                let path = s.quantale.plus(s.d(i, j), &mid)?;
                if !s.quantale.leq(s.d(i, k), &path)? {
                    return Ok(Some(triple_witness(s, i, j, k, &path)));
                }
            }
        }
    }
    Ok(None)
}

fn partial_metric_witness(s: &FiniteQlr) -> Result<Option<String>> {
    if !s.quantale.is_integral() {
        return Err(QuantaleError::Unsupported(format!(
            "partial-metric axioms need an integral quantale; {} is not",
            s.quantale.name()
        )));
    }
    // membership: a(x,y) ∈ D(Q)(a(y,y), a(x,x))
    for i in 0..s.size() {
        for j in 0..s.size() {
            if !diagonal_member(&s.quantale, s.d(i, j), s.d(j, j), s.d(i, i))? {
                return Ok(Some(format!(
                    "a({},{}) = {} is not a diagonal from {} to {}",
                    s.points[i],
                    s.points[j],
                    s.quantale.render(s.d(i, j)),
                    s.quantale.render(s.d(j, j)),
                    s.quantale.render(s.d(i, i))
                )));
            }
        }
    }
    // transitivity through the diagonal composition
    for i in 0..s.size() {
        for j in 0..s.size() {
            for k in 0..s.size() {
                let hop = s.quantale.residual(s.d(j, k), s.d(j, j))?;
                let path = s.quantale.plus(s.d(i, j), &hop)?;
                if !s.quantale.leq(s.d(i, k), &path)? {
                    return Ok(Some(triple_witness(s, i, j, k, &path)));
                }
            }
        }
    }
    Ok(None)
}

fn ultra_witness(s: &FiniteQlr) -> Result<Option<String>> {
    for i in 0..s.size() {
        for j in 0..s.size() {
            for k in 0..s.size() {
                let path = s.quantale.join2(s.d(i, j), s.d(j, k))?;
                if !s.quantale.leq(s.d(i, k), &path)? {
                    return Ok(Some(triple_witness(s, i, j, k, &path)));
                }
            }
        }
    }
    Ok(None)
}

fn partial_ultra_witness(s: &FiniteQlr) -> Result<Option<String>> {
    // lattice-diagonal membership: a(x,y) dominates both self-distances
    for i in 0..s.size() {
        for j in 0..s.size() {
            let selfs = s.quantale.join2(s.d(i, i), s.d(j, j))?;
            if !s.quantale.leq(&selfs, s.d(i, j))? {
                return Ok(Some(format!(
                    "a({},{}) = {} does not dominate the self-distances {}",
                    s.points[i],
                    s.points[j],
                    s.quantale.render(s.d(i, j)),
                    s.quantale.render(&selfs)
                )));
            }
        }
    }
    ultra_witness(s)
}

fn triple_witness(s: &FiniteQlr, i: usize, j: usize, k: usize, path: &crate::quantale::QuantaleElem) -> String {
    format!(
        "a({x},{z}) = {} exceeds the {x}→{y}→{z} path bound {}",
        s.quantale.render(s.d(i, k)),
        s.quantale.render(path),
        x = s.points[i],
        y = s.points[j],
        z = s.points[k]
    )
}

/// The metric induced by a partial metric:
/// a*(x,y) = (a(x,y) ⊸ a(x,x)) + (a(x,y) ⊸ a(y,y)).
/// Requires the input to pass the symmetric and separated partial-metric
/// axioms; the output is verified to pass the symmetric separated metric
/// axioms before being returned.
pub fn induced_metric(s: &FiniteQlr) -> Result<FiniteQlr> {
    let pre = check_axioms(s, &[AxiomId::Symmetric, AxiomId::Separated, AxiomId::PartialMetric])?;
    if !pre.all_pass() {
        let bad = pre.entries.iter().find(|e| !e.pass).unwrap();
        return Err(QuantaleError::Domain(format!(
            "input is not a symmetric separated partial metric: {} fails ({})",
            bad.law,
            bad.witness.as_deref().unwrap_or("")
        )));
    }
    let n = s.size();
    let mut dist = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let l = s.quantale.residual(s.d(i, j), s.d(i, i))?;
            let r = s.quantale.residual(s.d(i, j), s.d(j, j))?;
            row.push(s.quantale.plus(&l, &r)?);
        }
        dist.push(row);
    }
    let out = FiniteQlr::new(
        format!("{}*", s.name),
        s.quantale.clone(),
        s.points.clone(),
        dist,
    )?;
    let post = check_axioms(
        &out,
        &[AxiomId::Reflexive, AxiomId::Symmetric, AxiomId::Separated, AxiomId::Transitive],
    )?;
    if !post.all_pass() {
        let bad = post.entries.iter().find(|e| !e.pass).unwrap();
        return Err(QuantaleError::Domain(format!(
            "induced distance failed the {} axiom ({})",
            bad.law,
            bad.witness.as_deref().unwrap_or("")
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantale::{IntervalElem, QuantaleDesc, QuantaleElem};

    fn lawvere_space(name: &str, rows: &[&[f64]]) -> FiniteQlr {
        FiniteQlr::new(
            name,
            QuantaleDesc::lawvere(),
            (0..rows.len()).map(|i| ((b'a' + i as u8) as char).to_string()).collect(),
            rows.iter().map(|r| r.iter().map(|&v| QuantaleElem::ext(v)).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn discrete_metric_passes_everything_metric() {
        let s = FiniteQlr::discrete("D", 2, QuantaleDesc::discrete_two()).unwrap();
        let rep = check_axioms(
            &s,
            &[
                AxiomId::Reflexive,
                AxiomId::Symmetric,
                AxiomId::Separated,
                AxiomId::Transitive,
                AxiomId::UltraMetric,
            ],
        )
        .unwrap();
        assert!(rep.all_pass(), "{}", rep.render_text());
    }

    #[test]
    fn triangle_witness_is_lexicographically_first() {
        // two violations exist; the reported one must use the earliest triple
        let s = lawvere_space("T", &[&[0.0, 10.0, 1.0], &[10.0, 0.0, 1.0], &[1.0, 1.0, 0.0]]);
        let rep = check_axioms(&s, &[AxiomId::Transitive]).unwrap();
        let entry = rep.get("transitive").unwrap();
        assert!(!entry.pass);
        // first failing triple scanning (i,j,k): a(a,b)=10 > a(a,c)+a(c,b)=2
        assert!(entry.witness.as_ref().unwrap().contains("a→c→b"));
    }

    #[test]
    fn interval_partial_metric_axioms_and_induced_distance() {
        // p([r,s],[r',s']) = max{s,s'} − min{r,r'} on three chosen intervals
        let iv = [[0.0, 1.0], [2.0, 3.0], [0.5, 2.5]];
        let p = |a: [f64; 2], b: [f64; 2]| a[1].max(b[1]) - a[0].min(b[0]);
        let rows: Vec<Vec<QuantaleElem>> = iv
            .iter()
            .map(|a| iv.iter().map(|b| QuantaleElem::ext(p(*a, *b))).collect())
            .collect();
        let s = FiniteQlr::new(
            "I",
            QuantaleDesc::lawvere(),
            iv.iter().map(|[l, h]| format!("[{l},{h}]")).collect(),
            rows,
        )
        .unwrap();
        let rep =
            check_axioms(&s, &[AxiomId::Symmetric, AxiomId::Separated, AxiomId::PartialMetric])
                .unwrap();
        assert!(rep.all_pass(), "{}", rep.render_text());
        // a*([0,1],[2,3]) = (3⊸1) + (3⊸1) = 4
        let induced = induced_metric(&s).unwrap();
        assert_eq!(*induced.d(0, 1), QuantaleElem::ext(4.0));
        assert_eq!(*induced.d(0, 0), QuantaleElem::ext(0.0));
    }

    #[test]
    fn partial_metric_needs_integral_quantale() {
        let q = QuantaleDesc::powerset(crate::quantale::FiniteMonoid::cyclic(2));
        let z = q.zero();
        let s = FiniteQlr::new("P", q, vec!["p".into()], vec![vec![z]]).unwrap();
        assert!(matches!(
            check_axioms(&s, &[AxiomId::PartialMetric]),
            Err(QuantaleError::Unsupported(_))
        ));
    }

    #[test]
    fn hyper_relaxed_strictly_weaker_than_triangle() {
        // self-distance padding rescues a triangle violation:
        // a(a,c) = 5 > a(a,b)+a(b,c) = 4 but ≤ 4 + a(b,b) = 6
        let s = lawvere_space("H", &[&[0.0, 2.0, 5.0], &[2.0, 2.0, 2.0], &[5.0, 2.0, 0.0]]);
        let rep = check_axioms(&s, &[AxiomId::Transitive, AxiomId::HyperRelaxed]).unwrap();
        assert!(!rep.get("transitive").unwrap().pass);
        assert!(rep.get("hyperRelaxed").unwrap().pass, "{}", rep.render_text());
    }

    #[test]
    fn interval_lattice_partial_ultra_metric() {
        // u(x,y) = [min,max] as interval-lattice distances on 3 reals
        let pts = [0.0f64, 1.0, 3.0];
        let rows: Vec<Vec<QuantaleElem>> = pts
            .iter()
            .map(|&x| {
                pts.iter()
                    .map(|&y| QuantaleElem::Interval(IntervalElem::bounded(x.min(y), x.max(y))))
                    .collect()
            })
            .collect();
        let s = FiniteQlr::new(
            "U",
            QuantaleDesc::interval_lattice(),
            pts.iter().map(|p| p.to_string()).collect(),
            rows,
        )
        .unwrap();
        let rep = check_axioms(
            &s,
            &[AxiomId::Symmetric, AxiomId::Separated, AxiomId::PartialUltraMetric],
        )
        .unwrap();
        assert!(rep.all_pass(), "{}", rep.render_text());
    }

    #[test]
    fn induced_metric_rejects_non_partial_metrics() {
        // triangle-violating input must be refused with the failing axiom named
        let s = lawvere_space("B", &[&[0.0, 10.0, 1.0], &[10.0, 0.0, 1.0], &[1.0, 1.0, 0.0]]);
        let err = induced_metric(&s).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("partialMetric"), "{msg}");
    }
}
