//! Contextual distance bounds: how far can an observation C[·] : σ ⊢ Real
//! separate two closed terms of type σ? The derivative of the context,
//! applied to ⟦t⟧ and the sampled lifted distance a_σ(⟦t⟧, ⟦u⟧), bounds the
//! observable gap |⟦C[t]⟧ − ⟦C[u]⟧|.

use super::{denote, deriv_with, sample_dist, DerivCfg, DiffEnv, Env, GridConfig};
use crate::lambda::{plug_context, typecheck, typecheck_context, Registry, SimpleType, Term};
use crate::quantale::{QuantaleError, Result};
use serde::Serialize;

/// Internal name for the plugged hole; not expressible in the surface
/// grammar, so no context binder can collide with it.
const HOLE_VAR: &str = "%hole";

#[derive(Clone, Debug, Serialize)]
pub struct ContextualityReport {
    /// ∥C∥(⟦t⟧, a_σ(⟦t⟧, ⟦u⟧)) with literals widened by the probe radius.
    pub bound: f64,
    /// |⟦C[t]⟧ − ⟦C[u]⟧|.
    pub actual: f64,
    pub radius: f64,
}

fn domain_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(QuantaleError::Domain(msg.into()))
}

/// Bound the observable gap of `t` and `u` under context `c`, with literal
/// constants in `c` treated as known only up to `radius`.
pub fn contextuality_bound(
    reg: &Registry,
    c: &Term,
    t: &Term,
    u: &Term,
    sigma: &SimpleType,
    radius: f64,
    cfg: &GridConfig,
) -> Result<ContextualityReport> {
    let t_ty = typecheck(reg, &[], t).map_err(|e| QuantaleError::Domain(e.to_string()))?;
    let u_ty = typecheck(reg, &[], u).map_err(|e| QuantaleError::Domain(e.to_string()))?;
    if t_ty != *sigma || u_ty != *sigma {
        return domain_err(format!(
            "plugged terms must both have type {sigma}; got {t_ty} and {u_ty}"
        ));
    }
    let c_ty = typecheck_context(reg, &[], c, sigma)
        .map_err(|e| QuantaleError::Domain(e.to_string()))?;
    if c_ty != SimpleType::Real {
        return domain_err(format!("observable contexts must end at Real, not {c_ty}"));
    }

    let vt = denote(reg, t, &Env::empty());
    let vu = denote(reg, u, &Env::empty());
    let gap = sample_dist(sigma, &vt, &vu, cfg)?;

    let opened = plug_context(c, &Term::var(HOLE_VAR));
    let env = Env::empty().with(HOLE_VAR, vt);
    let denv = DiffEnv::empty().with(HOLE_VAR, gap);
    let deriv_cfg = DerivCfg { const_budget: radius.max(0.0), ..DerivCfg::q() };
    let bound = deriv_with(reg, &opened, &env, &denv, deriv_cfg).as_real();

    let ct = denote(reg, &plug_context(c, t), &Env::empty()).as_real();
    let cu = denote(reg, &plug_context(c, u), &Env::empty()).as_real();
    Ok(ContextualityReport { bound, actual: (ct - cu).abs(), radius })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse;

    fn rr() -> SimpleType {
        SimpleType::arrow(SimpleType::Real, SimpleType::Real)
    }

    #[test]
    fn observing_sine_versus_identity_at_zero() {
        let reg = Registry::default();
        let cfg = GridConfig::default();
        let c = parse(&reg, "[] 0.0").unwrap();
        let t = parse(&reg, r"\x:Real. sin x").unwrap();
        let u = parse(&reg, r"\x:Real. x").unwrap();
        // at the exact point both functions agree and the bound collapses
        let exact = contextuality_bound(&reg, &c, &t, &u, &rr(), 0.0, &cfg).unwrap();
        assert_eq!(exact.actual, 0.0);
        assert!(exact.bound.abs() < 1e-12, "{}", exact.bound);
        // an input known only within 0.1 still observes at most ~0.1
        let fuzzy = contextuality_bound(&reg, &c, &t, &u, &rr(), 0.1, &cfg).unwrap();
        assert!(fuzzy.bound <= 0.2, "{}", fuzzy.bound);
        assert!((fuzzy.bound - 0.1).abs() < 1e-9, "{}", fuzzy.bound);
        assert!(fuzzy.actual <= fuzzy.bound + 1e-9);
    }

    #[test]
    fn identity_context_reports_the_plain_distance() {
        let reg = Registry::default();
        let cfg = GridConfig::default();
        let c = parse(&reg, "[]").unwrap();
        let t = parse(&reg, "3.0").unwrap();
        let u = parse(&reg, "5.0").unwrap();
        let rep = contextuality_bound(&reg, &c, &t, &u, &SimpleType::Real, 0.0, &cfg).unwrap();
        assert_eq!(rep.bound, 2.0);
        assert_eq!(rep.actual, 2.0);
    }

    #[test]
    fn observation_through_primitives_respects_the_bound() {
        let reg = Registry::default();
        let cfg = GridConfig::default();
        let contexts = ["abs (sub ([] 1.0) 0.5)", "mul ([] 0.5) ([] -1.0)", "sin ([] 2.0)"];
        let t = parse(&reg, r"\x:Real. sin x").unwrap();
        let u = parse(&reg, r"\x:Real. mul x 0.9").unwrap();
        for src in contexts {
            let c = parse(&reg, src).unwrap();
            for radius in [0.0, 0.1, 1.0] {
                let rep = contextuality_bound(&reg, &c, &t, &u, &rr(), radius, &cfg).unwrap();
                assert!(
                    rep.actual <= rep.bound + 1e-9,
                    "{src} at radius {radius}: actual {} > bound {}",
                    rep.actual,
                    rep.bound
                );
            }
        }
    }

    #[test]
    fn rejects_mismatched_plugs_and_nonreal_contexts() {
        let reg = Registry::default();
        let cfg = GridConfig::default();
        let c = parse(&reg, "[] 0.0").unwrap();
        let t = parse(&reg, "1.0").unwrap();
        let u = parse(&reg, "2.0").unwrap();
        assert!(contextuality_bound(&reg, &c, &t, &u, &SimpleType::Real, 0.0, &cfg).is_err());
        let c_fn = parse(&reg, "[]").unwrap();
        let f = parse(&reg, r"\x:Real. x").unwrap();
        let err = contextuality_bound(&reg, &c_fn, &f, &f, &rr(), 0.0, &cfg).unwrap_err();
        assert!(err.to_string().contains("end at Real"), "{err}");
        let open = parse(&reg, "y").unwrap();
        assert!(contextuality_bound(&reg, &c, &open, &open, &rr(), 0.0, &cfg).is_err());
    }
}
