//! Diagonals of a quantale: the hom-sets of the one-object quantaloid whose
//! arrows α → β are the elements δ with α + (δ ⊸ α) = δ = (δ ⊸ β) + β.
//! Composition of η : α → β with γ : β → ζ is η + (γ ⊸ β), and the
//! identity on α is α itself.
//!
//! When + is the join, the residual adjunction may be missing (interval
//! lattice), but the defining equations collapse to plain domination:
//! δ is an arrow α → β exactly when δ ≥ α ∨ β, and composition is join.
//! That characterization is used directly for every join-composed kind.

use super::{QuantaleDesc, QuantaleElem, QuantaleError, Result};

/// Is `delta` an arrow α → β in the diagonal quantaloid?
pub fn diagonal_member(
    q: &QuantaleDesc,
    delta: &QuantaleElem,
    alpha: &QuantaleElem,
    beta: &QuantaleElem,
) -> Result<bool> {
    if q.plus_is_join() {
        let ab = q.join2(alpha, beta)?;
        return q.leq(&ab, delta);
    }
    let left = q.plus(alpha, &q.residual(delta, alpha)?)?;
    let right = q.plus(&q.residual(delta, beta)?, beta)?;
    Ok(left == *delta && right == *delta)
}

/// Composite of η : α → β and γ : β → ζ, namely η + (γ ⊸ β).
/// Join-composed kinds compose by η ∨ γ.
pub fn diagonal_compose(
    q: &QuantaleDesc,
    eta: &QuantaleElem,
    beta: &QuantaleElem,
    gamma: &QuantaleElem,
) -> Result<QuantaleElem> {
    if q.plus_is_join() {
        return q.join2(eta, gamma);
    }
    q.plus(eta, &q.residual(gamma, beta)?)
}

/// All arrows α → β, for finite kinds, in canonical element order.
pub fn diagonal_members(
    q: &QuantaleDesc,
    alpha: &QuantaleElem,
    beta: &QuantaleElem,
) -> Result<Vec<QuantaleElem>> {
    let elems = q.elements().ok_or_else(|| {
        QuantaleError::Unsupported(format!("{} is not finitely enumerable", q.name()))
    })?;
    let mut out = Vec::new();
    for d in elems {
        if diagonal_member(q, &d, alpha, beta)? {
            out.push(d);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantale::IntervalElem;

    #[test]
    fn lawvere_diagonals_dominate_endpoints() {
        // in ([0,∞],+): δ : α → β iff δ ≥ α and δ ≥ β (with ∞ handled)
        let q = QuantaleDesc::lawvere();
        let e = QuantaleElem::ext;
        for &(d, a, b, want) in &[
            (4.0, 3.0, 2.0, true),
            (3.0, 3.0, 3.0, true),
            (2.0, 3.0, 1.0, false),
            (0.0, 0.0, 0.0, true),
            (f64::INFINITY, 1.0, 2.0, true),
        ] {
            assert_eq!(diagonal_member(&q, &e(d), &e(a), &e(b)).unwrap(), want, "{d} {a} {b}");
        }
    }

    #[test]
    fn lawvere_compose_is_shifted_sum() {
        // η + (γ − β) for η : α → β and γ : β → ζ
        let q = QuantaleDesc::lawvere();
        let e = QuantaleElem::ext;
        let got = diagonal_compose(&q, &e(4.0), &e(3.0), &e(5.0)).unwrap();
        assert_eq!(got, e(6.0));
    }

    #[test]
    fn chain5_members_golden() {
        // frozen: in chain(5), the arrows 2 → 3 are exactly {3, 4, 5, ∞}
        let q = QuantaleDesc::trunc_chain(5);
        let got = diagonal_members(&q, &QuantaleElem::Idx(2), &QuantaleElem::Idx(3)).unwrap();
        let want: Vec<QuantaleElem> = [3, 4, 5, 6].into_iter().map(QuantaleElem::Idx).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn identity_is_smallest_endo_arrow() {
        // id_α = α belongs to D(α,α) and lower-bounds every member
        for q in
            [QuantaleDesc::trunc_chain(4), QuantaleDesc::discrete_two(), QuantaleDesc::trunc_chain(0)]
        {
            for a in q.elements().unwrap() {
                let members = diagonal_members(&q, &a, &a).unwrap();
                assert!(members.contains(&a), "{} id missing at {a:?}", q.name());
                for m in &members {
                    assert!(q.leq(&a, m).unwrap());
                }
            }
        }
    }

    #[test]
    fn identity_laws_on_finite_carriers() {
        // composing with id_α / id_β leaves an arrow α → β unchanged
        let q = QuantaleDesc::trunc_chain(3);
        let elems = q.elements().unwrap();
        for a in &elems {
            for b in &elems {
                for d in diagonal_members(&q, a, b).unwrap() {
                    let l = diagonal_compose(&q, a, a, &d).unwrap();
                    let r = diagonal_compose(&q, &d, b, b).unwrap();
                    assert_eq!(l, d, "left identity at {a:?}→{b:?}");
                    assert_eq!(r, d, "right identity at {a:?}→{b:?}");
                }
            }
        }
    }

    #[test]
    fn composition_closes_and_associates() {
        let q = QuantaleDesc::trunc_chain(3);
        let elems = q.elements().unwrap();
        for a in &elems {
            for b in &elems {
                for c in &elems {
                    for n in diagonal_members(&q, a, b).unwrap() {
                        for g in diagonal_members(&q, b, c).unwrap() {
                            let ng = diagonal_compose(&q, &n, b, &g).unwrap();
                            assert!(
                                diagonal_member(&q, &ng, a, c).unwrap(),
                                "composite {ng:?} escapes D({a:?},{c:?})"
                            );
                            for z in &elems {
                                for h in diagonal_members(&q, c, z).unwrap() {
                                    let left = diagonal_compose(&q, &ng, c, &h).unwrap();
                                    let gh = diagonal_compose(&q, &g, c, &h).unwrap();
                                    let right = diagonal_compose(&q, &n, b, &gh).unwrap();
                                    assert_eq!(left, right, "associativity");
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn lattice_extension_on_intervals() {
        // join-composed kinds: δ : α → β iff δ ⊇ α ∨ β
        let q = QuantaleDesc::interval_lattice();
        let iv = |l, h| QuantaleElem::Interval(IntervalElem::bounded(l, h));
        assert!(diagonal_member(&q, &iv(0.0, 3.0), &iv(0.0, 1.0), &iv(2.0, 3.0)).unwrap());
        assert!(!diagonal_member(&q, &iv(0.0, 2.0), &iv(0.0, 1.0), &iv(2.0, 3.0)).unwrap());
        let got = diagonal_compose(&q, &iv(0.0, 1.0), &iv(0.5, 1.0), &iv(0.5, 2.0)).unwrap();
        assert_eq!(got, iv(0.0, 2.0));
    }
}
