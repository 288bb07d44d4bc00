//! The currying isomorphism of the locally-Lipschitz function space.
//!
//! A map on a product splits into a curried pair: the inner family charges
//! the second coordinate's budget with the first frozen,
//!   λ₀(φ)(z)(x, α) = φ(⟨z,x⟩, ⟨0,α⟩),
//! while the outer family charges the first with the second frozen,
//!   λ₁(φ)(⟨z,ζ⟩)(x) = φ(⟨z,x⟩, ⟨ζ,0⟩).
//! Evaluation adds the two restrictions back together:
//!   ev(ψ,χ)(⟨z,x⟩, ⟨ζ,α⟩) = χ(⟨z,ζ⟩)(x) + ψ(z)(⟨x,α⟩).
//! The round trip is the identity precisely because families are additive in
//! their budget argument; a non-additive family is rejected up front.

use std::sync::Arc;

use super::{ll_add, ll_zero_for, LLDiff, LLValue};
use crate::quantale::{QuantaleError, Result};

type MapFn = Arc<dyn Fn(&LLValue) -> LLValue + Send + Sync>;
type FamFn = Arc<dyn Fn(&LLValue, &LLDiff) -> LLDiff + Send + Sync>;

/// A standalone morphism: a function together with a family of LL-constants.
#[derive(Clone)]
pub struct LLMap {
    f: MapFn,
    fam: FamFn,
}

impl LLMap {
    pub fn new(
        f: impl Fn(&LLValue) -> LLValue + Send + Sync + 'static,
        fam: impl Fn(&LLValue, &LLDiff) -> LLDiff + Send + Sync + 'static,
    ) -> Self {
        LLMap { f: Arc::new(f), fam: Arc::new(fam) }
    }

    pub fn apply(&self, v: &LLValue) -> LLValue {
        (self.f)(v)
    }

    pub fn fam_apply(&self, v: &LLValue, d: &LLDiff) -> LLDiff {
        (self.fam)(v, d)
    }
}

impl std::fmt::Debug for LLMap {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(fm, "LLMap")
    }
}

/// Additivity guard: φ(x, 0) = 0 and φ(x, α+α) = φ(x,α) + φ(x,α) on scalar
/// probes. Both curry and uncurry require it; the split is lossy otherwise.
pub fn check_additive(m: &LLMap, probes: &[(LLValue, LLDiff)], tol: f64) -> Result<()> {
    for (x, alpha) in probes {
        let zero = m.fam_apply(x, &ll_zero_for_diff(alpha));
        if scalar(&zero).map(|z| z > tol).unwrap_or(false) {
            return Err(QuantaleError::Domain(format!(
                "family is not additive: φ(x, 0) = {zero:?} on probe {x:?}"
            )));
        }
        let one = m.fam_apply(x, alpha);
        let two = m.fam_apply(x, &ll_add(alpha, alpha));
        if let (Some(a), Some(b)) = (scalar(&one), scalar(&two)) {
            if (b - 2.0 * a).abs() > tol {
                return Err(QuantaleError::Domain(format!(
                    "family is not additive: φ(x, 2α) = {b} but 2·φ(x, α) = {}",
                    2.0 * a
                )));
            }
        }
    }
    Ok(())
}

fn scalar(d: &LLDiff) -> Option<f64> {
    match d {
        LLDiff::DReal(r) => Some(*r),
        _ => None,
    }
}

fn ll_zero_for_diff(d: &LLDiff) -> LLDiff {
    match d {
        LLDiff::DReal(_) => LLDiff::DReal(0.0),
        LLDiff::DPair(a, b) => {
            LLDiff::DPair(Box::new(ll_zero_for_diff(a)), Box::new(ll_zero_for_diff(b)))
        }
        LLDiff::DFnTable(t) => {
            let t = t.clone();
            LLDiff::table(move |x| ll_zero_for_diff(&t(x)))
        }
    }
}

/// From a map on pairs to a map into the function space. The result's values
/// carry the inner family and the map carries the outer one.
pub fn ll_curry(m: &LLMap, probes: &[(LLValue, LLDiff)]) -> Result<LLMap> {
    check_additive(m, probes, 1e-9)?;
    let inner = m.clone();
    let outer = m.clone();
    Ok(LLMap::new(
        move |z: &LLValue| {
            let (mf, mfam) = (inner.clone(), inner.clone());
            let (zf, zfam) = (z.clone(), z.clone());
            LLValue::arrow(
                move |x: &LLValue| {
                    mf.apply(&LLValue::PairV(Box::new(zf.clone()), Box::new(x.clone())))
                },
                move |x: &LLValue, alpha: &LLDiff| {
                    let pair = LLValue::PairV(Box::new(zfam.clone()), Box::new(x.clone()));
                    let budget = LLDiff::DPair(
                        Box::new(ll_zero_for(&zfam)),
                        Box::new(alpha.clone()),
                    );
                    mfam.fam_apply(&pair, &budget)
                },
            )
        },
        move |z: &LLValue, zeta: &LLDiff| {
            let (m, z, zeta) = (outer.clone(), z.clone(), zeta.clone());
            LLDiff::table(move |x: &LLValue| {
                let pair = LLValue::PairV(Box::new(z.clone()), Box::new(x.clone()));
                let budget =
                    LLDiff::DPair(Box::new(zeta.clone()), Box::new(ll_zero_for(x)));
                m.fam_apply(&pair, &budget)
            })
        },
    ))
}

/// From a map into the function space back to a map on pairs. The family adds
/// the outer contribution (first coordinate moves, argument fixed) to the
/// inner one (value fixed, argument moves).
pub fn ll_uncurry(m: &LLMap) -> LLMap {
    let mf = m.clone();
    let mfam = m.clone();
    LLMap::new(
        move |zx: &LLValue| mf.apply(zx.fst()).apply(zx.snd()),
        move |zx: &LLValue, zeta_alpha: &LLDiff| {
            let (z, x) = (zx.fst(), zx.snd());
            let (zeta, alpha) = (zeta_alpha.fst(), zeta_alpha.snd());
            let outer = mfam.fam_apply(z, zeta).table_apply(x);
            let inner = mfam.apply(z).fam_apply(x, alpha);
            ll_add(&outer, &inner)
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    /// mult on pairs with its honest family L(z,x)·(ζ+α), L = hypot + 1.
    fn mult_map() -> LLMap {
        LLMap::new(
            |p: &LLValue| LLValue::RealV(p.fst().as_real() * p.snd().as_real()),
            |p: &LLValue, d: &LLDiff| {
                let l = p.fst().as_real().hypot(p.snd().as_real()) + 1.0;
                let budget = d.fst().as_real() + d.snd().as_real();
                LLDiff::DReal(if budget == 0.0 { 0.0 } else { l * budget })
            },
        )
    }

    fn probes() -> Vec<(LLValue, LLDiff)> {
        let points = [(3.0, 4.0), (0.0, 0.0), (-1.5, 2.0)];
        let budgets = [(0.0, 0.0), (1.0, 0.0), (0.25, 0.5)];
        points
            .iter()
            .zip(budgets.iter())
            .map(|(&(z, x), &(zc, xc))| {
                (
                    LLValue::PairV(Box::new(LLValue::RealV(z)), Box::new(LLValue::RealV(x))),
                    LLDiff::DPair(Box::new(LLDiff::DReal(zc)), Box::new(LLDiff::DReal(xc))),
                )
            })
            .collect()
    }

    #[test]
    fn curry_sections_recover_the_restricted_families() {
        let curried = ll_curry(&mult_map(), &probes()).unwrap();
        let z = LLValue::RealV(3.0);
        let x = LLValue::RealV(4.0);
        let l = 3.0f64.hypot(4.0) + 1.0;
        // Inner family: argument budget only.
        let section = curried.apply(&z);
        assert_eq!(section.fam_apply(&x, &LLDiff::DReal(0.5)).as_real(), l * 0.5);
        // Outer family: first-coordinate budget only, tabled on the argument.
        let outer = curried.fam_apply(&z, &LLDiff::DReal(0.25));
        assert_eq!(outer.table_apply(&x).as_real(), l * 0.25);
        // Each section evaluates the original map.
        assert_eq!(section.apply(&x).as_real(), 12.0);
    }

    #[test]
    fn round_trips_are_the_identity_on_probes() {
        let m = mult_map();
        let back = ll_uncurry(&ll_curry(&m, &probes()).unwrap());
        for (p, d) in probes() {
            assert_eq!(back.apply(&p).as_real(), m.apply(&p).as_real());
            let split = back.fam_apply(&p, &d).as_real();
            let whole = m.fam_apply(&p, &d).as_real();
            // The split sums two linear pieces; only rounding separates them.
            assert!((split - whole).abs() <= 1e-12, "{split} vs {whole}");
        }
        // And the other way: a curried map with independent components.
        let curried = LLMap::new(
            |z: &LLValue| {
                let z0 = z.as_real();
                LLValue::arrow(
                    move |x: &LLValue| LLValue::RealV(z0.sin() + 2.0 * x.as_real()),
                    |_, alpha: &LLDiff| LLDiff::DReal(2.0 * alpha.as_real()),
                )
            },
            |_, zeta: &LLDiff| {
                let zeta = zeta.as_real();
                LLDiff::table(move |_| LLDiff::DReal(zeta))
            },
        );
        let flat = ll_uncurry(&curried);
        let again = ll_curry(&flat, &probes()).unwrap();
        let (z, x) = (LLValue::RealV(0.5), LLValue::RealV(-1.0));
        assert_eq!(
            again.apply(&z).apply(&x).as_real(),
            curried.apply(&z).apply(&x).as_real()
        );
        assert_eq!(
            again.apply(&z).fam_apply(&x, &LLDiff::DReal(0.3)).as_real(),
            curried.apply(&z).fam_apply(&x, &LLDiff::DReal(0.3)).as_real()
        );
        assert_eq!(
            again.fam_apply(&z, &LLDiff::DReal(0.7)).table_apply(&x).as_real(),
            curried.fam_apply(&z, &LLDiff::DReal(0.7)).table_apply(&x).as_real()
        );
    }

    #[test]
    fn non_additive_families_are_rejected() {
        // φ(x, α) = α² is not additive: φ(2α) = 4φ(α) ≠ 2φ(α).
        let crooked = LLMap::new(
            |p: &LLValue| p.fst().clone(),
            |_, d: &LLDiff| {
                let a = d.fst().as_real() + d.snd().as_real();
                LLDiff::DReal(a * a)
            },
        );
        let err = ll_curry(&crooked, &probes()).unwrap_err();
        assert!(format!("{err}").contains("not additive"), "{err}");
    }
}
