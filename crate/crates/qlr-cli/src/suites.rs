//! Law suites behind `qlr verify`. Each suite assembles a LawReport from
//! library checkers over pinned, seeded inputs so repeated runs are
//! byte-identical.

use std::f64::consts::FRAC_PI_2;

use anyhow::{anyhow, Result};

use qlr_core::finite::{
    check_axioms, curry_q, curry_qr, enumerate_valid_maps, exp_q, exp_qr, product_qlr,
    uncurry_q, uncurry_qr, AxiomId,
};
use qlr_core::lambda::parse;
use qlr_core::ll::{
    check_dlambda_props, check_lip_validity, default_lip_points, quotient_separate,
};
use qlr_core::quantale::check_laws;
use qlr_core::semantics::{
    contextuality_bound, corpus_steps, diff_probe_eq, dist_d, fig1_csv, non_additivity_witness,
    reproduce_fig1, soundness_corpus, value_probe_eq, Fig1Variant,
};
use qlr_core::valuation::{diam_valuation, lebesgue_valuation, lifted_p, u_metric};
use qlr_core::{
    denote, denote_ll, deriv_q, ext, ll_dist, Diff, DiffEnv, Env, FiniteQlr, GridConfig,
    IntervalElem, JoinLattice, LLEnv, LawEntry, LawReport, QuantaleDesc, QuantaleElem, Registry,
    SimpleType, Value,
};

use crate::config::RunConfig;

pub const SUITE_NAMES: &[&str] = &[
    "derivative",
    "dlambda",
    "fig1",
    "finite",
    "ll",
    "motivating",
    "quantale",
    "soundness",
    "valuation",
];

/// Appends `from`'s entries to `into`, prefixing each law with a subject tag.
fn merge(into: &mut LawReport, from: LawReport, tag: &str) {
    for e in from.entries {
        let law = format!("{tag}: {}", e.law);
        into.push(match e.witness {
            Some(w) => LawEntry::fail(law, w),
            None => LawEntry::pass(law),
        });
    }
}

fn entry(law: impl Into<String>, ok: bool, witness: String) -> LawEntry {
    if ok {
        LawEntry::pass(law)
    } else {
        LawEntry::fail(law, witness)
    }
}

pub fn suite_quantale(run: &RunConfig) -> Result<LawReport> {
    let mut rep = LawReport::new("quantale laws");
    for n in 0..=8 {
        let q = QuantaleDesc::trunc_chain(n);
        merge(&mut rep, check_laws(&q, run.seed, 0.0)?, &q.name());
    }
    let d2 = QuantaleDesc::discrete_two();
    merge(&mut rep, check_laws(&d2, run.seed, 0.0)?, &d2.name());
    for q in [
        QuantaleDesc::product(vec![QuantaleDesc::discrete_two(), QuantaleDesc::discrete_two()]),
        QuantaleDesc::product(vec![
            QuantaleDesc::trunc_chain(2),
            QuantaleDesc::trunc_chain(1),
        ]),
    ] {
        merge(&mut rep, check_laws(&q, run.seed, 0.0)?, &q.name());
    }
    for q in [QuantaleDesc::lawvere(), QuantaleDesc::sup_locale()] {
        merge(&mut rep, check_laws(&q, run.seed, 1e-12)?, &q.name());
    }
    // the interval hull monoid is the pinned non-example: a monotone monoid
    // on a complete lattice that is not residuated
    let iv = QuantaleDesc::interval_lattice();
    let ivr = check_laws(&iv, run.seed, 1e-12)?;
    for law in ["plus-associative", "plus-commutative", "plus-unit", "plus-monotone"] {
        let e = ivr.get(law).ok_or_else(|| anyhow!("missing interval law {law}"))?;
        rep.push(entry(
            format!("{}: {law}", iv.name()),
            e.pass,
            e.witness.clone().unwrap_or_default(),
        ));
    }
    for law in ["residual-adjunction", "plus-distributes-over-meet"] {
        let e = ivr.get(law).ok_or_else(|| anyhow!("missing interval law {law}"))?;
        rep.push(entry(
            format!("{}: {law} fails as expected", iv.name()),
            !e.pass,
            "no counterexample found".into(),
        ));
    }
    Ok(rep)
}

fn idx_space(q: &QuantaleDesc, name: &str, rows: &[&[usize]]) -> FiniteQlr {
    let n = rows.len();
    let dist = rows
        .iter()
        .map(|r| r.iter().map(|i| QuantaleElem::Idx(*i)).collect())
        .collect();
    FiniteQlr::new(name.to_string(), q.clone(), (0..n).map(|i| format!("p{i}")).collect(), dist)
        .expect("pinned space is well-formed")
}

/// All partial ultra-metric spaces over `q` up to `max` points, one
/// representative per point-relabeling class.
fn ultra_pool(q: &QuantaleDesc, max: usize) -> Result<Vec<FiniteQlr>> {
    const PERMS3: [[usize; 3]; 6] =
        [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let elems = q.elements().expect("finite quantale");
    let mut pool = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for n in 1..=max.min(3) {
        let perms: Vec<Vec<usize>> = match n {
            1 => vec![vec![0]],
            2 => vec![vec![0, 1], vec![1, 0]],
            _ => PERMS3.iter().map(|p| p.to_vec()).collect(),
        };
        let slots = n * n;
        for code in 0..elems.len().pow(slots as u32) {
            let mut c = code;
            let mut flat = Vec::with_capacity(slots);
            for _ in 0..slots {
                flat.push(c % elems.len());
                c /= elems.len();
            }
            let canon = perms
                .iter()
                .map(|p| {
                    let mut out = Vec::with_capacity(slots);
                    for i in 0..n {
                        for j in 0..n {
                            out.push(flat[p[i] * n + p[j]]);
                        }
                    }
                    out
                })
                .min()
                .unwrap();
            if !seen.insert((n, canon.clone())) {
                continue;
            }
            let dist = (0..n)
                .map(|i| (0..n).map(|j| elems[canon[i * n + j]].clone()).collect())
                .collect();
            let s = FiniteQlr::new(
                format!("u{n}-{code}"),
                q.clone(),
                (0..n).map(|i| format!("p{i}")).collect(),
                dist,
            )
            .expect("enumerated space is well-formed");
            if check_axioms(&s, &[AxiomId::PartialUltraMetric])?.all_pass() {
                pool.push(s);
            }
        }
    }
    Ok(pool)
}

pub fn suite_finite(max_size: usize, space: Option<&FiniteQlr>) -> Result<LawReport> {
    if let Some(s) = space {
        let mut rep = check_axioms(s, &AxiomId::ALL)?;
        rep.subject = format!("axioms of {}", s.name);
        return Ok(rep);
    }
    let mut rep = LawReport::new("finite liftings");
    let d2 = QuantaleDesc::discrete_two();
    let pool = ultra_pool(&d2, max_size)?;
    rep.push(entry(
        format!("partial ultra-metric spaces up to {} points enumerated", max_size.min(3)),
        pool.len() >= 2,
        format!("only {} spaces", pool.len()),
    ));
    let mut q_bad = None;
    let mut qr_bad = None;
    let (mut q_n, mut qr_n) = (0usize, 0usize);
    for dom in &pool {
        for cod in &pool {
            let e = exp_q(dom, cod)?;
            if let Some(en) =
                check_axioms(&e.space, &[AxiomId::UltraMetric])?.entries.iter().find(|en| !en.pass)
            {
                q_bad.get_or_insert(format!("{}: {:?}", e.space.name, en.witness));
            }
            q_n += 1;
            let symmetric = check_axioms(dom, &[AxiomId::Symmetric])?.all_pass()
                && check_axioms(cod, &[AxiomId::Symmetric])?.all_pass();
            let reflexive = dom.is_reflexive()? && cod.is_reflexive()?;
            if symmetric && reflexive {
                let er = exp_qr(dom, cod)?;
                if let Some(en) = check_axioms(&er.space, &[AxiomId::Reflexive, AxiomId::UltraMetric])?
                    .entries
                    .iter()
                    .find(|en| !en.pass)
                {
                    qr_bad.get_or_insert(format!("{}: {:?}", er.space.name, en.witness));
                }
                qr_n += 1;
            }
        }
    }
    rep.push(entry(
        format!("plain lifting keeps join-transitivity on all {q_n} exponent pairs"),
        q_bad.is_none(),
        q_bad.unwrap_or_default(),
    ));
    rep.push(entry(
        format!("reflexive lifting keeps it on all {qr_n} reflexive symmetric pairs"),
        qr_bad.is_none(),
        qr_bad.unwrap_or_default(),
    ));

    // transposes are mutually inverse on every valid map of a pinned triple
    let z = FiniteQlr::discrete("Z", 2, d2.clone())?;
    let x = FiniteQlr::discrete("X", 2, d2.clone())?;
    let y = FiniteQlr::discrete("Y", 2, d2.clone())?;
    let prod = product_qlr(&z, &x)?;
    let maps = enumerate_valid_maps(&prod, &y, 200_000)?;
    let mut roundtrip = true;
    for m in &maps {
        let c = curry_q(&z, &x, &y, m)?;
        if uncurry_q(&z, &x, &y, &c)? != *m {
            roundtrip = false;
        }
        let cr = curry_qr(&z, &x, &y, m)?;
        if uncurry_qr(&z, &x, &y, &cr)? != *m {
            roundtrip = false;
        }
    }
    rep.push(entry(
        format!("transpose round trips on all {} valid maps of a discrete triple", maps.len()),
        roundtrip && !maps.is_empty(),
        "a transpose failed to invert".into(),
    ));
    Ok(rep)
}

pub fn suite_derivative() -> Result<LawReport> {
    let mut rep = LawReport::new("derivative laws");
    for q in [QuantaleDesc::trunc_chain(2), QuantaleDesc::discrete_two()] {
        let spaces = [
            FiniteQlr::discrete("d1", 1, q.clone())?,
            FiniteQlr::discrete("d2", 2, q.clone())?,
            idx_space(&q, "zero2", &[&[0, 0], &[0, 0]]),
            idx_space(&q, "asym2", &[&[0, 1], &[1, 0]]),
        ];
        for w in spaces.windows(3) {
            let r = qlr_core::finite::check_derivative_laws(&w[0], &w[1], &w[2], 15)?;
            merge(&mut rep, r, &format!("{} [{},{},{}]", q.name(), w[0].name, w[1].name, w[2].name));
        }
    }
    // a composite whose budget map is strictly below the chained bound
    let tc2 = QuantaleDesc::trunc_chain(2);
    let x1 = FiniteQlr::discrete("pt", 1, tc2.clone())?;
    let y2 = idx_space(&tc2, "codisc", &[&[0, 0], &[0, 0]]);
    let z2 = idx_space(&tc2, "apart", &[&[0, 1], &[1, 0]]);
    let f = qlr_core::finite::canonical_map(&x1, &y2, vec![0])?;
    let g = qlr_core::finite::canonical_map(&y2, &z2, vec![0, 1])?;
    let comp = qlr_core::finite::derivative(&x1, &z2, &[g.f[f.f[0]]], 0, &QuantaleElem::Idx(1))?;
    let mid = qlr_core::finite::derivative(&x1, &y2, &f.f, 0, &QuantaleElem::Idx(1))?;
    let chained = qlr_core::finite::derivative(&y2, &z2, &g.f, f.f[0], &mid)?;
    rep.push(entry(
        "chain bound is strict somewhere",
        comp == QuantaleElem::Idx(0) && chained == QuantaleElem::Idx(1),
        format!("composite {comp:?} vs chained {chained:?}"),
    ));
    Ok(rep)
}

pub fn suite_soundness(reg: &Registry, run: &RunConfig) -> Result<LawReport> {
    let mut rep = LawReport::new("reduction soundness");
    let tol = run.tolerance.max(1e-9);
    for item in soundness_corpus(reg) {
        let deep = matches!(&item.ty, SimpleType::Arrow(_, cod) if !matches!(**cod, SimpleType::Real));
        let cfg = if deep { GridConfig::coarse(11) } else { GridConfig::coarse(61) };
        let steps = corpus_steps(reg, &item.term);
        let mut worst: f64 = 0.0;
        for pair in steps.windows(2) {
            let (va, vb) =
                (denote(reg, &pair[0], &Env::empty()), denote(reg, &pair[1], &Env::empty()));
            worst = worst.max(value_probe_eq(&item.ty, &va, &vb));
            let (da, db) = (
                deriv_q(reg, &pair[0], &Env::empty(), &DiffEnv::empty()),
                deriv_q(reg, &pair[1], &Env::empty(), &DiffEnv::empty()),
            );
            worst = worst.max(diff_probe_eq(&item.ty, &da, &db, &cfg));
            let (la, lb) = (
                denote_ll(reg, &pair[0], &LLEnv::empty()),
                denote_ll(reg, &pair[1], &LLEnv::empty()),
            );
            worst = worst.max(qlr_core::ll::ll_value_gap(&item.ty, &la, &lb)?);
            let (ka, kb) = (
                qlr_core::deriv_ll(reg, &pair[0], &LLEnv::empty(), &qlr_core::LLDiffEnv::empty()),
                qlr_core::deriv_ll(reg, &pair[1], &LLEnv::empty(), &qlr_core::LLDiffEnv::empty()),
            );
            worst = worst.max(qlr_core::ll::ll_diff_gap(&item.ty, &ka, &kb)?);
        }
        rep.push(entry(
            format!("{} invariant across {} reduction steps", item.name, steps.len() - 1),
            worst <= tol,
            format!("probe gap {worst:.3e}"),
        ));
    }
    Ok(rep)
}

pub fn suite_fig1(run: &RunConfig) -> Result<(LawReport, String)> {
    let grid = run.grid();
    let a = reproduce_fig1(Fig1Variant::A, 0.0, 2.0, &grid);
    let b = reproduce_fig1(Fig1Variant::B, 0.0, 2.0, &grid);
    let mut rep = LawReport::new("lifted-distance counter-examples");
    rep.push(entry(
        "partial-metric axiom fails at x=0, r=2",
        a.violated,
        format!("d_fg {} vs d_fh+d_hg-d_hh {}", a.d_fg, a.d_fh + a.d_hg - a.d_hh),
    ));
    rep.push(entry(
        "triangle fails at x=0, r=2",
        b.violated,
        format!("d_fg {} vs d_fh+d_hg {}", b.d_fg, b.d_fh + b.d_hg),
    ));
    let csv = fig1_csv(&[a, b]);
    Ok((rep, csv))
}

pub fn suite_valuation(run: &RunConfig) -> Result<LawReport> {
    let mut rep = LawReport::new("valuation laws");
    let diam = diam_valuation();
    let leb = lebesgue_valuation();
    let samples = [
        IntervalElem::bounded(0.0, 1.0),
        IntervalElem::bounded(0.0, 2.0),
        IntervalElem::bounded(1.0, 3.0),
        IntervalElem::bounded(-1.0, 1.0),
        IntervalElem::bounded(2.0, 2.0),
        IntervalElem::FullLine,
    ];
    let mut monotone = true;
    let mut submodular = true;
    for a in &samples {
        for b in &samples {
            let j = a.join(b);
            if diam.eval(a)? > diam.eval(&j)? + 1e-12 {
                monotone = false;
            }
            if let Some(m) = a.meet(b) {
                let bound = ext::add(diam.eval(a)?, ext::resid(diam.eval(b)?, diam.eval(&m)?));
                if !ext::leq_tol(diam.eval(&j)?, bound, 1e-12) {
                    submodular = false;
                }
            }
        }
    }
    rep.push(entry("diameter is monotone on interval samples", monotone, String::new()));
    rep.push(entry("diameter is submodular where meets exist", submodular, String::new()));
    let gap = {
        use qlr_core::valuation::IntervalUnion;
        let ua = IntervalUnion::interval(0.0, 1.0);
        let ub = IntervalUnion::interval(2.0, 3.0);
        (leb.eval(&ua.join(&ub))? - 2.0).abs()
    };
    rep.push(entry("measure ignores gaps that the hull counts", gap == 0.0, format!("{gap}")));
    let mut factors = true;
    for (x, y) in [(1.0, 3.0), (2.0, 2.0), (-1.5, 0.25)] {
        if diam.eval(&u_metric(x, y))? != (x - y).abs() {
            factors = false;
        }
    }
    rep.push(entry(
        "euclidean distance factors through the interval metric",
        factors,
        String::new(),
    ));

    // the lifted partial distance satisfies the partial-metric identity at
    // the counter-example functions, where the plain axioms fail
    let grid = run.grid();
    let f = Value::real_fn(|_| 0.3);
    let h = Value::real_fn(|x: f64| 0.65 + 0.8 * x.cos());
    let g = Value::real_fn(|x: f64| 2.25 - 0.8 * x.cos());
    let i = IntervalElem::bounded(-2.0, 2.0);
    let lhs = lifted_p(&f, &g, 0.0, &i, &grid)?;
    let rhs = lifted_p(&f, &h, 0.0, &i, &grid)? + lifted_p(&h, &g, 0.0, &i, &grid)?
        - lifted_p(&h, &h, 0.0, &i, &grid)?;
    rep.push(entry(
        "lifted partial distance satisfies the sharpened triangle",
        (lhs - rhs).abs() <= 1e-6,
        format!("p(f,g) {lhs} vs {rhs}"),
    ));
    Ok(rep)
}

pub fn suite_dlambda(reg: &Registry) -> LawReport {
    check_dlambda_props(reg)
}

pub fn suite_ll(reg: &Registry, run: &RunConfig) -> Result<LawReport> {
    let mut rep = LawReport::new("locally-lipschitz model");
    for (src, arity) in [
        (r"\x:Real. sin x", 1usize),
        (r"\x:Real. add (mul x x) 1.0", 1),
        (r"\x:Real. \y:Real. mul x y", 2),
    ] {
        let t = parse(reg, src).map_err(|e| anyhow!("{e}"))?;
        let points = default_lip_points(arity);
        match check_lip_validity(reg, &t, &points, 0.1) {
            Ok(reports) => {
                let ok = reports
                    .iter()
                    .all(|r| r.radius > 0.0 && r.observed <= r.bound + run.tolerance);
                let worst =
                    reports.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
                rep.push(entry(
                    format!("{src} admits a validity radius at {} points", reports.len()),
                    ok,
                    format!("worst margin {worst:.3e}"),
                ));
            }
            Err(e) => rep.push(LawEntry::fail(format!("{src} admits a validity radius"), e.to_string())),
        }
    }
    // pointwise self-distance vanishes on the shared corpus
    let mut worst: f64 = 0.0;
    for item in soundness_corpus(reg).into_iter().take(10) {
        let v = denote_ll(reg, &item.term, &LLEnv::empty());
        worst = worst.max(qlr_core::ll::ll_diff_sup(&item.ty, &ll_dist(&item.ty, &v, &v))?);
    }
    rep.push(entry("self-distance is zero pointwise", worst == 0.0, format!("sup {worst}")));

    // quotients: zero classes collapse, ill-defined gluings are rejected
    let tc4 = QuantaleDesc::trunc_chain(4);
    let glued = idx_space(&tc4, "glued", &[&[0, 0, 2], &[0, 0, 2], &[2, 2, 0]]);
    let q = quotient_separate(&glued)?;
    rep.push(entry(
        "zero-distance points collapse to one class",
        q.points.len() == 2,
        format!("{} classes", q.points.len()),
    ));
    let broken = idx_space(&tc4, "broken", &[&[0, 0, 3], &[0, 0, 0], &[3, 0, 0]]);
    let refused = quotient_separate(&broken).is_err();
    rep.push(entry("non-transitive gluing is refused", refused, "quotient accepted".into()));
    Ok(rep)
}

pub fn suite_motivating(reg: &Registry, run: &RunConfig) -> Result<LawReport> {
    let mut rep = LawReport::new("sine vs identity");
    let grid = run.grid();
    let rr = SimpleType::real_fn(1);
    let t = parse(reg, r"\x:Real. sin x").map_err(|e| anyhow!("{e}"))?;
    let u = parse(reg, r"\x:Real. x").map_err(|e| anyhow!("{e}"))?;
    let (vt, vu) = (denote(reg, &t, &Env::empty()), denote(reg, &u, &Env::empty()));

    let probe = (Value::RealV(0.0), Diff::DReal(FRAC_PI_2));
    let far = dist_d(&rr, &vt, &vu, Some((&probe.0, &probe.1)), &grid)
        .map_err(|e| anyhow!("{e}"))?;
    rep.push(entry(
        "sup-style distance at radius π/2 exceeds 3/2",
        far > 1.5,
        format!("distance {far}"),
    ));

    let c = parse(reg, "[] 0.0").map_err(|e| anyhow!("{e}"))?;
    let ctx =
        contextuality_bound(reg, &c, &t, &u, &rr, 0.1, &grid).map_err(|e| anyhow!("{e}"))?;
    rep.push(entry(
        "context bound at radius 0.1 stays within twice the radius",
        ctx.bound <= 0.2 && ctx.actual <= ctx.bound + run.tolerance,
        format!("bound {} actual {}", ctx.bound, ctx.actual),
    ));

    let na = non_additivity_witness(&grid);
    rep.push(entry(
        "budget maps bend both ways",
        na.superadditive && na.subadditive,
        format!(
            "D(f): {} vs 2·{}; D(g): {} vs 2·{}",
            na.d_f_2, na.d_f_1, na.d_g_2, na.d_g_1
        ),
    ));

    let lv = denote_ll(reg, &t, &LLEnv::empty());
    let zero = qlr_core::ll::ll_diff_sup(&rr, &ll_dist(&rr, &lv, &lv))?;
    rep.push(entry("pointwise model sees no self-distance", zero == 0.0, format!("{zero}")));
    Ok(rep)
}
