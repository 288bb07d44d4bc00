//! Checkers for the locally-Lipschitz model: sampled validity of derivative
//! bounds, the local contextuality gate, the differential-structure law
//! suite, and separation quotients of finite pseudo-metric spaces.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{denote_ll, deriv_ll, ll_dist, LLDiff, LLDiffEnv, LLEnv, LLValue};
use crate::finite::FiniteQlr;
use crate::lambda::{plug_context, typecheck, typecheck_context, Registry, SimpleType, Term};
use crate::quantale::{QuantaleError, Result};
use crate::report::{LawEntry, LawReport};

/// One sampled validity check of a derivative bound at a base point.
#[derive(Clone, Debug, Serialize)]
pub struct LipReport {
    pub point: Vec<f64>,
    pub radius: f64,
    pub bound: f64,
    pub observed: f64,
    pub margin: f64,
}

fn flat_arity(ty: &SimpleType) -> Option<usize> {
    match ty {
        SimpleType::Real => Some(0),
        SimpleType::Arrow(dom, cod) if **dom == SimpleType::Real => {
            flat_arity(cod).map(|n| n + 1)
        }
        _ => None,
    }
}

fn apply_reals(v: &LLValue, args: &[f64]) -> f64 {
    let mut cur = v.clone();
    for &a in args {
        cur = cur.apply(&LLValue::RealV(a));
    }
    cur.as_real()
}

/// Derivative bound for a closed first-order term at a point, with every
/// coordinate granted the same budget: the applied term's derivative in a
/// context of fresh variables.
fn point_bound(reg: &Registry, t: &Term, point: &[f64], budget: f64) -> f64 {
    let mut applied = t.clone();
    let mut env = LLEnv::empty();
    let mut denv = LLDiffEnv::empty();
    for (i, &p) in point.iter().enumerate() {
        let name = format!("%p{i}");
        applied = Term::app(applied, Term::var(&name));
        env = env.with(&name, LLValue::RealV(p));
        denv = denv.with(&name, LLDiff::DReal(budget));
    }
    deriv_ll(reg, &applied, &env, &denv).as_real()
}

/// Sampled local-Lipschitz validity: for each base point, find a radius from
/// a fixed ladder on which pairs within the radius (and within the budget of
/// each other, per coordinate) never exceed the derivative bound. The radius
/// is searched and reported, never assumed; exhausting the ladder is an
/// error, since the model promises some strictly positive radius exists.
pub fn check_lip_validity(
    reg: &Registry,
    t: &Term,
    points: &[Vec<f64>],
    budget: f64,
) -> Result<Vec<LipReport>> {
    let ty = typecheck(reg, &[], t).map_err(|e| QuantaleError::Domain(e.to_string()))?;
    let arity = flat_arity(&ty)
        .filter(|&n| n >= 1)
        .ok_or_else(|| QuantaleError::Unsupported(format!("not a first-order function type: {ty}")))?;
    let value = denote_ll(reg, t, &LLEnv::empty());
    let ladder = [1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125];
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut out = Vec::with_capacity(points.len());
    for point in points {
        assert_eq!(point.len(), arity, "point arity mismatch");
        let bound = point_bound(reg, t, point, budget);
        let mut found = None;
        for &delta in &ladder {
            // per-coordinate cap keeps the pair inside the Euclidean ball
            let cap = delta / (arity as f64).sqrt();
            let mut observed: f64 = 0.0;
            for _ in 0..160 {
                let y: Vec<f64> =
                    point.iter().map(|&p| p + rng.gen_range(-cap..=cap)).collect();
                let z: Vec<f64> = y
                    .iter()
                    .zip(point.iter())
                    .map(|(&yi, &pi)| {
                        let lo = (yi - budget).max(pi - cap);
                        let hi = (yi + budget).min(pi + cap);
                        rng.gen_range(lo..=hi)
                    })
                    .collect();
                observed = observed.max((apply_reals(&value, &y) - apply_reals(&value, &z)).abs());
            }
            if observed <= bound + 1e-9 {
                found = Some((delta, observed));
                break;
            }
        }
        let (radius, observed) = found.ok_or_else(|| {
            QuantaleError::Domain(format!(
                "no validity radius found at {point:?}: bound {bound} is exceeded at every scale"
            ))
        })?;
        out.push(LipReport { point: point.clone(), radius, bound, observed, margin: bound - observed });
    }
    Ok(out)
}

/// Default probe points for a first-order arity.
pub fn default_lip_points(arity: usize) -> Vec<Vec<f64>> {
    let axis = [-2.0, -0.5, 0.0, 1.0, 3.0];
    match arity {
        1 => axis.iter().map(|&x| vec![x]).collect(),
        2 => {
            let mut out = Vec::new();
            for &x in &axis {
                for &y in &[-1.0, 0.5, 4.0] {
                    out.push(vec![x, y]);
                }
            }
            out
        }
        n => axis.iter().map(|&x| vec![x; n]).collect(),
    }
}

/// Outcome of the local contextuality check. The bound is only contractual
/// when the gate passes: the sampled distance must stay below the declared
/// radius on the probe window.
#[derive(Clone, Debug, Serialize)]
pub struct LocalCtxReport {
    pub delta: f64,
    pub window: f64,
    pub gate_gap: f64,
    pub in_regime: bool,
    pub bound: f64,
    pub actual: f64,
}

fn window_sup(ty: &SimpleType, d: &LLDiff, window: f64) -> Result<f64> {
    match ty {
        SimpleType::Real => Ok(d.as_real()),
        SimpleType::Prod(a, b) => {
            Ok(window_sup(a, d.fst(), window)?.max(window_sup(b, d.snd(), window)?))
        }
        SimpleType::Arrow(dom, cod) if **dom == SimpleType::Real => {
            let mut sup: f64 = 0.0;
            for i in 0..=40 {
                let x = -window + 2.0 * window * (i as f64) / 40.0;
                sup = sup.max(window_sup(cod, &d.table_apply(&LLValue::RealV(x)), window)?);
            }
            Ok(sup)
        }
        other => Err(QuantaleError::Unsupported(format!(
            "no gate probes for type {other}"
        ))),
    }
}

const HOLE_VAR: &str = "%hole";

pub fn local_contextuality_bound(
    reg: &Registry,
    c: &Term,
    t: &Term,
    u: &Term,
    sigma: &SimpleType,
    delta: f64,
    window: f64,
) -> Result<LocalCtxReport> {
    let err = |e: crate::lambda::LambdaError| QuantaleError::Domain(e.to_string());
    for side in [t, u] {
        let ty = typecheck(reg, &[], side).map_err(err)?;
        if &ty != sigma {
            return Err(QuantaleError::Domain(format!(
                "plugged term has type {ty}, context expects {sigma}"
            )));
        }
    }
    let cty = typecheck_context(reg, &[], c, sigma).map_err(err)?;
    if cty != SimpleType::Real {
        return Err(QuantaleError::Unsupported(format!(
            "context must observe at type Real, found {cty}"
        )));
    }
    let vt = denote_ll(reg, t, &LLEnv::empty());
    let vu = denote_ll(reg, u, &LLEnv::empty());
    let dist = ll_dist(sigma, &vt, &vu);
    let gate_gap = window_sup(sigma, &dist, window)?;
    let opened = plug_context(c, &Term::var(HOLE_VAR));
    let env = LLEnv::empty().with(HOLE_VAR, vt);
    let denv = LLDiffEnv::empty().with(HOLE_VAR, dist);
    let bound = deriv_ll(reg, &opened, &env, &denv).as_real();
    let ct = denote_ll(reg, &plug_context(c, t), &LLEnv::empty()).as_real();
    let cu = denote_ll(reg, &plug_context(c, u), &LLEnv::empty()).as_real();
    Ok(LocalCtxReport {
        delta,
        window,
        gate_gap,
        in_regime: gate_gap <= delta,
        bound,
        actual: (ct - cu).abs(),
    })
}

fn real_probes() -> [f64; 5] {
    [-2.0, -0.5, 0.0, 0.8, 1.5]
}

fn gap_entry(report: &mut LawReport, law: &str, gap: f64, tol: f64) {
    if gap <= tol {
        report.push(LawEntry::pass(law));
    } else {
        report.push(LawEntry::fail(law, format!("max gap {gap:.3e} exceeds {tol:.0e}")));
    }
}

/// The differential-structure law suite for the derivative assignment
/// t ↦ ∥t∥: functoriality, additivity, compatibility with products, and
/// compatibility with currying and application.
pub fn check_dlambda_props(reg: &Registry) -> LawReport {
    use crate::lambda::parse;
    let mut report = LawReport::new("derivative structure, locally-Lipschitz model");

    // (1) functoriality: the identity's derivative returns the budget, and
    // composition chains families through the intermediate point.
    {
        let ident = parse(reg, "x").unwrap();
        let mut gap: f64 = 0.0;
        for &x in &real_probes() {
            for &a in &[0.0, 0.25, 1.0] {
                let env = LLEnv::empty().with("x", LLValue::RealV(x));
                let denv = LLDiffEnv::empty().with("x", LLDiff::DReal(a));
                gap = gap.max((deriv_ll(reg, &ident, &env, &denv).as_real() - a).abs());
            }
        }
        gap_entry(&mut report, "1a identity derivative is the budget", gap, 0.0);

        let f = parse(reg, "sin x").unwrap();
        let g = parse(reg, "mul y y").unwrap();
        let composite = parse(reg, "mul (sin x) (sin x)").unwrap();
        let mut gap: f64 = 0.0;
        for &x in &real_probes() {
            for &a in &[0.0, 0.5, 1.0] {
                let env = LLEnv::empty().with("x", LLValue::RealV(x));
                let denv = LLDiffEnv::empty().with("x", LLDiff::DReal(a));
                let lhs = deriv_ll(reg, &composite, &env, &denv).as_real();
                let fx = denote_ll(reg, &f, &env);
                let fd = deriv_ll(reg, &f, &env, &denv);
                let genv = LLEnv::empty().with("y", fx);
                let gdenv = LLDiffEnv::empty().with("y", fd);
                let rhs = deriv_ll(reg, &g, &genv, &gdenv).as_real();
                gap = gap.max((lhs - rhs).abs());
            }
        }
        gap_entry(&mut report, "1b composition chains the families", gap, 1e-12);
    }

    // (2) additivity in the budget, exact at doubled budgets.
    {
        let terms = ["sin (mul x x)", "add (abs x) (affine_2_1 x)", "min x (cos x)"];
        let mut gap: f64 = 0.0;
        for src in terms {
            let t = parse(reg, src).unwrap();
            for &x in &real_probes() {
                let env = LLEnv::empty().with("x", LLValue::RealV(x));
                let at = |b: f64| {
                    deriv_ll(reg, &t, &env, &LLDiffEnv::empty().with("x", LLDiff::DReal(b)))
                        .as_real()
                };
                gap = gap.max(at(0.0));
                gap = gap.max((at(0.6) - 2.0 * at(0.3)).abs());
            }
        }
        gap_entry(&mut report, "2 additivity in the budget", gap, 0.0);
    }

    // (3) projections forward the component budgets.
    {
        let t1 = parse(reg, "fst p").unwrap();
        let t2 = parse(reg, "snd p").unwrap();
        let env = LLEnv::empty().with(
            "p",
            LLValue::PairV(Box::new(LLValue::RealV(1.0)), Box::new(LLValue::RealV(-2.0))),
        );
        let denv = LLDiffEnv::empty().with(
            "p",
            LLDiff::DPair(Box::new(LLDiff::DReal(0.3)), Box::new(LLDiff::DReal(0.7))),
        );
        let ok = deriv_ll(reg, &t1, &env, &denv).as_real() == 0.3
            && deriv_ll(reg, &t2, &env, &denv).as_real() == 0.7;
        report.push(if ok {
            LawEntry::pass("3 projections forward budgets")
        } else {
            LawEntry::fail("3 projections forward budgets", "component budget lost")
        });
    }

    // (4) pairing is componentwise.
    {
        let pair = parse(reg, "(sin x, mul x x)").unwrap();
        let mut gap: f64 = 0.0;
        for &x in &real_probes() {
            let env = LLEnv::empty().with("x", LLValue::RealV(x));
            let denv = LLDiffEnv::empty().with("x", LLDiff::DReal(0.5));
            let d = deriv_ll(reg, &pair, &env, &denv);
            let d1 = deriv_ll(reg, &parse(reg, "sin x").unwrap(), &env, &denv).as_real();
            let d2 = deriv_ll(reg, &parse(reg, "mul x x").unwrap(), &env, &denv).as_real();
            gap = gap.max((d.fst().as_real() - d1).abs().max((d.snd().as_real() - d2).abs()));
        }
        gap_entry(&mut report, "4 pairing is componentwise", gap, 0.0);
    }

    // (5) currying: the abstraction's derivative at an argument probe equals
    // the open body's derivative with the binder's budget zeroed.
    {
        let lam = parse(reg, r"\x:Real. mul z x").unwrap();
        let body = parse(reg, "mul z x").unwrap();
        let mut gap: f64 = 0.0;
        for &z in &real_probes() {
            for &zeta in &[0.0, 0.25, 1.0] {
                let env = LLEnv::empty().with("z", LLValue::RealV(z));
                let denv = LLDiffEnv::empty().with("z", LLDiff::DReal(zeta));
                let lhs = deriv_ll(reg, &lam, &env, &denv);
                for &x in &real_probes() {
                    let benv = env.with("x", LLValue::RealV(x));
                    let bdenv = denv.with("x", LLDiff::DReal(0.0));
                    let rhs = deriv_ll(reg, &body, &benv, &bdenv).as_real();
                    gap = gap.max((lhs.table_apply(&LLValue::RealV(x)).as_real() - rhs).abs());
                }
            }
        }
        gap_entry(&mut report, "5 curry zeroes the binder budget", gap, 0.0);
    }

    // (6) application: the derivative of h g splits into the context motion
    // of h evaluated at g plus h's family charged with g's motion.
    {
        let h = parse(reg, r"\w:Real. mul z w").unwrap();
        let g = parse(reg, "sin z").unwrap();
        let app = parse(reg, r"(\w:Real. mul z w) (sin z)").unwrap();
        let mut gap: f64 = 0.0;
        for &z in &real_probes() {
            for &zeta in &[0.0, 0.5, 1.0] {
                let env = LLEnv::empty().with("z", LLValue::RealV(z));
                let denv = LLDiffEnv::empty().with("z", LLDiff::DReal(zeta));
                let lhs = deriv_ll(reg, &app, &env, &denv).as_real();
                let gv = denote_ll(reg, &g, &env);
                let first = deriv_ll(reg, &h, &env, &denv).table_apply(&gv).as_real();
                let second = denote_ll(reg, &h, &env)
                    .fam_apply(&gv, &deriv_ll(reg, &g, &env, &denv))
                    .as_real();
                gap = gap.max((lhs - (first + second)).abs());
            }
        }
        gap_entry(&mut report, "6 application adds both motions", gap, 0.0);
    }

    report
}

/// Quotient a finite pseudo-metric space by its zero-distance classes. The
/// result is separated; if zero distances fail to propagate (a transitivity
/// failure), the quotient distance is ill-defined and an error names the
/// witnessing triple.
pub fn quotient_separate(space: &FiniteQlr) -> Result<FiniteQlr> {
    let n = space.size();
    let zero = space.quantale.zero();
    // union-find closure of the zero-distance relation
    let mut root: Vec<usize> = (0..n).collect();
    fn find(root: &mut Vec<usize>, i: usize) -> usize {
        let mut i = i;
        while root[i] != i {
            root[i] = root[root[i]];
            i = root[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if *space.d(i, j) == zero && *space.d(j, i) == zero {
                let (ri, rj) = (find(&mut root, i), find(&mut root, j));
                root[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    // the quotient distance must not depend on representatives
    for i in 0..n {
        for j in 0..n {
            if find(&mut root, i) == find(&mut root, j) && i != j {
                for k in 0..n {
                    if space.d(i, k) != space.d(j, k) || space.d(k, i) != space.d(k, j) {
                        return Err(QuantaleError::Domain(format!(
                            "zero distance between {} and {} does not propagate: \
                             distances to {} disagree",
                            space.points[i], space.points[j], space.points[k]
                        )));
                    }
                }
            }
        }
    }
    let mut reps: Vec<usize> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    for i in 0..n {
        if find(&mut root, i) == i {
            reps.push(i);
            let members: Vec<&str> = (0..n)
                .filter(|&j| find(&mut root, j) == i)
                .map(|j| space.points[j].as_str())
                .collect();
            names.push(members.join("|"));
        }
    }
    let dist = reps
        .iter()
        .map(|&i| reps.iter().map(|&j| space.d(i, j).clone()).collect())
        .collect();
    FiniteQlr::new(format!("{} (separated)", space.name), space.quantale.clone(), names, dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse;
    use crate::quantale::{QuantaleDesc, QuantaleElem};

    fn reg() -> Registry {
        Registry::default()
    }

    #[test]
    fn lip_validity_holds_on_a_first_order_corpus() {
        let reg = reg();
        let terms = [
            r"\x:Real. sin x",
            r"\x:Real. affine_2_1 x",
            r"\x:Real. sin (mul x x)",
            r"\x:Real. \y:Real. mul x y",
            r"\x:Real. max (abs x) (cos x)",
        ];
        for src in terms {
            let t = parse(&reg, src).unwrap();
            let ty = typecheck(&reg, &[], &t).unwrap();
            let points = default_lip_points(flat_arity(&ty).unwrap());
            let reports = check_lip_validity(&reg, &t, &points, 0.1).unwrap();
            assert_eq!(reports.len(), points.len());
            for r in &reports {
                assert!(r.radius > 0.0);
                assert!(
                    r.observed <= r.bound + 1e-9,
                    "{src} at {:?}: observed {} > bound {}",
                    r.point,
                    r.observed,
                    r.bound
                );
                assert!(r.margin >= -1e-9);
            }
        }
        // The sine bound at the origin is the budget itself.
        let t = parse(&reg, r"\x:Real. sin x").unwrap();
        let r = &check_lip_validity(&reg, &t, &[vec![0.0]], 0.1).unwrap()[0];
        assert_eq!(r.bound, 0.1);
        assert!(r.observed > 0.09 && r.observed <= 0.1);
    }

    #[test]
    fn local_constants_grow_where_no_global_constant_exists() {
        let reg = reg();
        let t = parse(&reg, r"\x:Real. \y:Real. mul x y").unwrap();
        let near = point_bound(&reg, &t, &[3.0, 4.0], 1.0);
        let far = point_bound(&reg, &t, &[30.0, 4.0], 1.0);
        assert!(far > near, "local constants must grow along the point");
        // The bound taken at the near point really is violated far away:
        // moving y by 1 at x = 30 changes the product by 30 > near bound.
        let v = denote_ll(&reg, &t, &LLEnv::empty());
        let observed_far =
            (apply_reals(&v, &[30.0, 5.0]) - apply_reals(&v, &[30.0, 4.0])).abs();
        assert!(observed_far > near);
    }

    #[test]
    fn contextuality_gate_passes_and_fails_by_distance() {
        let reg = reg();
        let c = parse(&reg, "[] 0.0").unwrap();
        let t = parse(&reg, r"\x:Real. sin x").unwrap();
        let sigma = SimpleType::real_fn(1);
        // Close observee: within the window the distance is tiny.
        let u = parse(&reg, r"\x:Real. x").unwrap();
        let r = local_contextuality_bound(&reg, &c, &t, &u, &sigma, 0.1, 0.5).unwrap();
        assert!(r.in_regime, "gate gap {} exceeds {}", r.gate_gap, r.delta);
        assert!(r.actual <= r.bound + 1e-9);
        assert_eq!(r.actual, 0.0);
        // Identical observees: distance 0 passes any positive gate.
        let r = local_contextuality_bound(&reg, &c, &t, &t, &sigma, 1e-6, 2.0).unwrap();
        assert!(r.in_regime && r.gate_gap == 0.0 && r.actual == 0.0);
        // A far observee with a tiny radius is out of the local regime.
        let far = parse(&reg, r"\x:Real. add x 100.0").unwrap();
        let r = local_contextuality_bound(&reg, &c, &t, &far, &sigma, 0.1, 0.5).unwrap();
        assert!(!r.in_regime);
        assert!(r.gate_gap > 99.0);
    }

    #[test]
    fn differential_structure_laws_all_pass() {
        let report = check_dlambda_props(&reg());
        assert_eq!(report.entries.len(), 7);
        for entry in &report.entries {
            assert!(entry.pass, "{}: {:?}", entry.law, entry.witness);
        }
    }

    fn chain_space(name: &str, dist: Vec<Vec<usize>>) -> FiniteQlr {
        let n = dist.len();
        let points = (0..n).map(|i| format!("p{i}")).collect();
        let dist = dist
            .into_iter()
            .map(|row| row.into_iter().map(QuantaleElem::Idx).collect())
            .collect();
        FiniteQlr::new(name, QuantaleDesc::trunc_chain(4), points, dist).unwrap()
    }

    #[test]
    fn quotients_collapse_zero_classes_and_reject_ill_defined_ones() {
        // Two points at distance zero collapse into one class.
        let s = chain_space("glued", vec![vec![0, 0, 2], vec![0, 0, 2], vec![2, 2, 0]]);
        let q = quotient_separate(&s).unwrap();
        assert_eq!(q.size(), 2);
        assert_eq!(q.points[0], "p0|p1");
        assert_eq!(*q.d(0, 1), QuantaleElem::Idx(2));
        // An already-separated space is untouched.
        let s = chain_space("apart", vec![vec![0, 1], vec![1, 0]]);
        let q = quotient_separate(&s).unwrap();
        assert_eq!(q.size(), 2);
        // Zero distances that do not propagate make the quotient ill-defined.
        let s = chain_space(
            "broken",
            vec![vec![0, 0, 3], vec![0, 0, 0], vec![3, 0, 0]],
        );
        let err = quotient_separate(&s).unwrap_err();
        assert!(format!("{err}").contains("does not propagate"), "{err}");
    }

    #[test]
    fn random_transitive_spaces_quotient_to_separated_ones() {
        let desc = QuantaleDesc::trunc_chain(4);
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..20 {
            let n = 5;
            // random symmetric matrix with zero diagonal over {0..4, ∞}
            let mut idx = vec![vec![0usize; n]; n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = rng.gen_range(0..=5);
                    idx[i][j] = v;
                    idx[j][i] = v;
                }
            }
            // shortest-path closure enforces transitivity
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let via = match desc
                            .plus(&QuantaleElem::Idx(idx[i][k]), &QuantaleElem::Idx(idx[k][j]))
                            .unwrap()
                        {
                            QuantaleElem::Idx(v) => v,
                            other => panic!("chain element expected, got {other:?}"),
                        };
                        idx[i][j] = idx[i][j].min(via);
                    }
                }
            }
            let space = chain_space("random", idx);
            let q = quotient_separate(&space).unwrap();
            let zero = q.quantale.zero();
            for i in 0..q.size() {
                for j in 0..q.size() {
                    if i != j {
                        assert_ne!(*q.d(i, j), zero, "quotient not separated");
                    }
                }
            }
        }
    }
}
