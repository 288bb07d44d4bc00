//! Acceptance suite: one test per shipped guarantee, each ending with a
//! single "acceptance NN <subject>: pass" line. A failing assertion marks
//! the criterion failed; the timing criteria assert wall-clock budgets.

use std::collections::HashSet;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use qlr_core::finite::{
    canonical_map, check_axioms, check_derivative_laws, check_symmetric_exp, curry_q, curry_qr,
    derivative, derivative_table, distance_via_hfg, enumerate_functions, enumerate_valid_maps,
    exp_q, exp_qr, product_qlr, uncurry_q, uncurry_qr, AxiomId,
};
use qlr_core::lambda::{parse, typecheck};
use qlr_core::ll::{
    check_dlambda_props, check_lip_validity, default_lip_points, ll_diff_gap, ll_diff_sup,
    ll_value_gap, local_contextuality_bound,
};
use qlr_core::quantale::check_laws;
use qlr_core::semantics::{
    contextuality_bound, corpus_steps, diff_probe_eq, diff_probe_leq, dist_d, dist_e, fig1_csv,
    non_additivity_witness, reproduce_fig1, sample_dist, soundness_corpus, value_probe_eq,
    Fig1Variant,
};
use qlr_core::valuation::lifted_p;
use qlr_core::{
    denote, denote_ll, deriv_ll, deriv_q, ll_dist, Diff, DiffEnv, Env, FiniteQlr, FiniteQlrMap,
    GridConfig, IntervalElem, LLDiffEnv, LLEnv, QuantaleDesc, QuantaleElem, Registry, SimpleType,
    Value,
};

/// A finite space with Idx-valued entries (chains and the two-point frame).
fn idx_space(q: &QuantaleDesc, name: &str, rows: &[&[usize]]) -> FiniteQlr {
    let points = (0..rows.len()).map(|i| format!("p{i}")).collect();
    let dist =
        rows.iter().map(|r| r.iter().map(|&k| QuantaleElem::Idx(k)).collect()).collect();
    FiniteQlr::new(name, q.clone(), points, dist).unwrap()
}

/// All-zero distance matrix: every point indistinguishable from every other.
fn codiscrete(q: &QuantaleDesc, name: &str, n: usize) -> FiniteQlr {
    let zero = q.zero();
    let points = (0..n).map(|i| format!("p{i}")).collect();
    let dist = (0..n).map(|_| vec![zero.clone(); n]).collect();
    FiniteQlr::new(name, q.clone(), points, dist).unwrap()
}

/// Seeded matrix over the quantale's full element pool; `reflexive` pins the
/// diagonal at zero, otherwise diagonal entries are drawn like any other.
fn seeded_space(q: &QuantaleDesc, name: &str, n: usize, seed: u64, reflexive: bool) -> FiniteQlr {
    let elems = q.elements().expect("seeded spaces need a finite quantale");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n).map(|i| format!("p{i}")).collect();
    let dist = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if reflexive && i == j {
                        q.zero()
                    } else {
                        elems[rng.gen_range(0..elems.len())].clone()
                    }
                })
                .collect()
        })
        .collect();
    FiniteQlr::new(name, q.clone(), points, dist).unwrap()
}

#[test]
fn acceptance_01_quantale_law_suite() {
    let t0 = Instant::now();
    for n in 0..=8 {
        let q = QuantaleDesc::trunc_chain(n);
        let rep = check_laws(&q, 7, 0.0).unwrap();
        assert!(rep.all_pass(), "chain {n}:\n{}", rep.render_text());
    }
    let rep = check_laws(&QuantaleDesc::discrete_two(), 7, 0.0).unwrap();
    assert!(rep.all_pass(), "{}", rep.render_text());
    let products = [
        QuantaleDesc::product(vec![QuantaleDesc::discrete_two(), QuantaleDesc::discrete_two()]),
        QuantaleDesc::product(vec![QuantaleDesc::trunc_chain(1), QuantaleDesc::discrete_two()]),
        QuantaleDesc::product(vec![QuantaleDesc::trunc_chain(2), QuantaleDesc::trunc_chain(1)]),
    ];
    for q in &products {
        let rep = check_laws(q, 7, 0.0).unwrap();
        assert!(rep.all_pass(), "{}:\n{}", q.name(), rep.render_text());
    }
    // real-valued carrier: seeded sample of 10^3 triples at tight tolerance
    let rep = check_laws(&QuantaleDesc::lawvere(), 7, 1e-12).unwrap();
    assert!(rep.all_pass(), "{}", rep.render_text());
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "law suite took {elapsed:?}");
    println!("acceptance 01 quantale law suite: pass");
}

#[test]
fn acceptance_02_derivative_laws() {
    let t0 = Instant::now();
    let quantales = [
        QuantaleDesc::trunc_chain(0),
        QuantaleDesc::trunc_chain(1),
        QuantaleDesc::trunc_chain(2),
        QuantaleDesc::trunc_chain(3),
        QuantaleDesc::discrete_two(),
        QuantaleDesc::product(vec![QuantaleDesc::discrete_two(), QuantaleDesc::discrete_two()]),
    ];
    for (qi, q) in quantales.iter().enumerate() {
        assert!(q.elements().unwrap().len() <= 5, "{} exceeds the size cap", q.name());
        // carrier sizes 1–3: edge instances plus seeded general ones,
        // non-reflexive diagonals included
        let mut pool: Vec<FiniteQlr> = vec![
            FiniteQlr::discrete("one", 1, q.clone()).unwrap(),
            FiniteQlr::discrete("disc2", 2, q.clone()).unwrap(),
            FiniteQlr::discrete("disc3", 3, q.clone()).unwrap(),
            codiscrete(q, "codisc2", 2),
            codiscrete(q, "codisc3", 3),
        ];
        for n in 1..=3 {
            pool.push(seeded_space(q, &format!("rand{n}"), n, 100 + qi as u64 * 10 + n as u64, false));
            pool.push(seeded_space(q, &format!("refl{n}"), n, 200 + qi as u64 * 10 + n as u64, true));
        }
        for i in 0..pool.len() {
            let (x, y, z) =
                (&pool[i], &pool[(i + 1) % pool.len()], &pool[(i + 2) % pool.len()]);
            let rep = check_derivative_laws(x, y, z, 25).unwrap();
            assert!(rep.all_pass(), "{}:\n{}", q.name(), rep.render_text());
        }
    }
    // a pinned strict chain-rule instance: constant-through-codiscrete
    // composite has derivative 0, while the chained bound pays for the
    // codiscrete middle space collapsing two separated images
    let q = QuantaleDesc::trunc_chain(2);
    let x = idx_space(&q, "X", &[&[0]]);
    let y = codiscrete(&q, "Y", 2);
    let z = idx_space(&q, "Z", &[&[0, 1], &[1, 0]]);
    let f = vec![0usize]; // X → Y
    let g = vec![0usize, 1]; // Y → Z
    let gf = vec![g[f[0]]];
    let alpha = QuantaleElem::Idx(1);
    let composite = derivative(&x, &z, &gf, 0, &alpha).unwrap();
    let inner = derivative(&x, &y, &f, 0, &alpha).unwrap();
    let chained = derivative(&y, &z, &g, f[0], &inner).unwrap();
    assert!(q.leq(&composite, &chained).unwrap());
    assert_eq!(composite, QuantaleElem::Idx(0));
    assert_eq!(chained, QuantaleElem::Idx(1));
    assert_ne!(composite, chained, "chain rule must be strict here");
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "derivative laws took {elapsed:?}");
    println!("acceptance 02 derivative laws: pass");
}

#[test]
fn acceptance_03_exponential_self_distance() {
    let tc1 = QuantaleDesc::trunc_chain(1);
    let tc2 = QuantaleDesc::trunc_chain(2);
    let d2 = QuantaleDesc::discrete_two();
    let instances = vec![
        (idx_space(&tc1, "X", &[&[0, 2], &[1, 0]]), idx_space(&tc1, "Y", &[&[0, 1], &[2, 0]])),
        (
            idx_space(&tc2, "X", &[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]),
            idx_space(&tc2, "Y", &[&[0, 1], &[1, 0]]),
        ),
        // non-reflexive diagonals on both sides
        (
            idx_space(&tc2, "X", &[&[1, 2], &[2, 1]]),
            idx_space(&tc2, "Y", &[&[0, 1, 3], &[1, 1, 1], &[3, 1, 0]]),
        ),
        (
            FiniteQlr::discrete("X", 2, d2.clone()).unwrap(),
            FiniteQlr::discrete("Y", 3, d2.clone()).unwrap(),
        ),
        (codiscrete(&d2, "X", 2), FiniteQlr::discrete("Y", 2, d2.clone()).unwrap()),
    ];
    for (dom, cod) in &instances {
        let e = exp_q(dom, cod).unwrap();
        let zero = e.space.quantale.zero();
        let cod_refl_sep = check_axioms(cod, &[AxiomId::Reflexive, AxiomId::Separated])
            .unwrap()
            .all_pass();
        for i in 0..e.space.size() {
            // self-distance is exactly the smallest derivative
            let table: Vec<QuantaleElem> =
                derivative_table(dom, cod, &e.funcs[i]).unwrap().into_iter().flatten().collect();
            assert_eq!(*e.space.d(i, i), QuantaleElem::Table(table), "func {:?}", e.funcs[i]);
            if cod_refl_sep {
                // zero self-distance characterizes the constants
                let constant = e.funcs[i].iter().all(|&v| v == e.funcs[i][0]);
                assert_eq!(
                    *e.space.d(i, i) == zero,
                    constant,
                    "constant characterization failed for {:?}",
                    e.funcs[i]
                );
            }
        }
        // the tagged-map construction reproduces every entry
        for i in 0..e.space.size() {
            for j in 0..e.space.size() {
                let via = distance_via_hfg(dom, cod, &e.funcs[i], &e.funcs[j]).unwrap();
                assert_eq!(via, *e.space.d(i, j), "h_(f,g) disagrees at ({i},{j})");
            }
        }
    }
    // reflexive variant: corrected self-distance vanishes identically
    let reflexive = vec![
        (idx_space(&tc1, "X", &[&[0, 2], &[1, 0]]), idx_space(&tc1, "Y", &[&[0, 1], &[2, 0]])),
        (
            idx_space(&tc2, "X", &[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]),
            idx_space(&tc2, "Y", &[&[0, 1], &[1, 0]]),
        ),
        (
            FiniteQlr::discrete("X", 2, d2.clone()).unwrap(),
            FiniteQlr::discrete("Y", 2, d2.clone()).unwrap(),
        ),
    ];
    for (dom, cod) in &reflexive {
        let e = exp_qr(dom, cod).unwrap();
        let zero = e.space.quantale.zero();
        for i in 0..e.space.size() {
            assert_eq!(*e.space.d(i, i), zero, "reflexive self-distance must vanish");
        }
    }
    println!("acceptance 03 exponential self-distance identities: pass");
}

/// Canonical maps of every function plus seeded valid inflations of each.
fn sampled_valid_maps(
    dom: &FiniteQlr,
    cod: &FiniteQlr,
    seed: u64,
    per_func: usize,
) -> Vec<FiniteQlrMap> {
    let elems = cod.quantale.elements().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for f in enumerate_functions(dom.size(), cod.size()) {
        let m = canonical_map(dom, cod, f).unwrap();
        for _ in 0..per_func {
            let mut inflated = m.clone();
            for row in &mut inflated.phi {
                for slot in row.iter_mut() {
                    if rng.gen_range(0..3) == 0 {
                        let up: Vec<&QuantaleElem> = elems
                            .iter()
                            .filter(|e| cod.quantale.leq(slot, e).unwrap())
                            .collect();
                        *slot = up[rng.gen_range(0..up.len())].clone();
                    }
                }
            }
            out.push(inflated);
        }
        out.push(m);
    }
    out
}

#[test]
fn acceptance_04_transpose_round_trips() {
    let d2 = QuantaleDesc::discrete_two();
    let disc = |name: &str, n: usize| FiniteQlr::discrete(name, n, d2.clone()).unwrap();
    // every valid map between two-point-frame spaces, exhaustively
    let triples = vec![
        (disc("Z", 2), disc("X", 2), disc("Y", 2)),
        (disc("Z", 2), disc("X", 1), codiscrete(&d2, "Y", 2)),
        (idx_space(&d2, "Z", &[&[0, 1], &[0, 0]]), disc("X", 2), disc("Y", 2)),
        (disc("Z", 2), disc("X", 2), idx_space(&d2, "Y", &[&[0, 0], &[1, 0]])),
        // non-reflexive diagonals exercise the plain variant only
        (idx_space(&d2, "Z", &[&[1, 1], &[1, 1]]), disc("X", 2), disc("Y", 2)),
        (disc("Z", 2), idx_space(&d2, "X", &[&[1, 0], &[0, 1]]), disc("Y", 2)),
    ];
    for (z, x, y) in &triples {
        let prod = product_qlr(z, x).unwrap();
        let maps = enumerate_valid_maps(&prod, y, 300_000).unwrap();
        assert!(!maps.is_empty());
        let mut images = HashSet::new();
        for m in &maps {
            let w = curry_q(z, x, y, m).unwrap();
            assert_eq!(uncurry_q(z, x, y, &w).unwrap(), *m, "transpose round trip broke");
            assert_eq!(curry_q(z, x, y, &uncurry_q(z, x, y, &w).unwrap()).unwrap(), w);
            images.insert(format!("{w:?}"));
        }
        assert_eq!(images.len(), maps.len(), "transpose must be injective");
        let reflexive = z.is_reflexive().unwrap()
            && x.is_reflexive().unwrap()
            && y.is_reflexive().unwrap();
        if reflexive {
            for m in &maps {
                let w = curry_qr(z, x, y, m).unwrap();
                assert_eq!(uncurry_qr(z, x, y, &w).unwrap(), *m);
                // the image of the reflexive transpose is fixed pointwise
                assert_eq!(curry_qr(z, x, y, &uncurry_qr(z, x, y, &w).unwrap()).unwrap(), w);
            }
        }
    }
    // a non-Boolean quantale, sampled: canonical maps plus valid inflations
    let tc1 = QuantaleDesc::trunc_chain(1);
    let z = idx_space(&tc1, "Z", &[&[0, 1], &[2, 0]]);
    let x = idx_space(&tc1, "X", &[&[0, 2], &[1, 0]]);
    let y = idx_space(&tc1, "Y", &[&[0, 2], &[1, 0]]);
    let prod = product_qlr(&z, &x).unwrap();
    for m in sampled_valid_maps(&prod, &y, 33, 12) {
        let w = curry_q(&z, &x, &y, &m).unwrap();
        assert_eq!(uncurry_q(&z, &x, &y, &w).unwrap(), m);
        let wr = curry_qr(&z, &x, &y, &m).unwrap();
        assert_eq!(uncurry_qr(&z, &x, &y, &wr).unwrap(), m);
        assert_eq!(curry_qr(&z, &x, &y, &uncurry_qr(&z, &x, &y, &wr).unwrap()).unwrap(), wr);
    }
    println!("acceptance 04 transpose round trips: pass");
}

#[test]
fn acceptance_05_soundness_corpus() {
    let reg = Registry::default();
    let corpus = soundness_corpus(&reg);
    assert!(corpus.len() >= 25, "corpus has only {} terms", corpus.len());
    let cfg = GridConfig::coarse(201);
    for item in &corpus {
        let steps = corpus_steps(&reg, &item.term);
        assert!(steps.len() >= 3, "{} has fewer than two reduction steps", item.name);
        for pair in steps.windows(2) {
            // general-quantale model
            let v0 = denote(&reg, &pair[0], &Env::empty());
            let v1 = denote(&reg, &pair[1], &Env::empty());
            let vgap = value_probe_eq(&item.ty, &v0, &v1);
            assert!(vgap <= 1e-9, "{}: denotation moved by {vgap}", item.name);
            let d0 = deriv_q(&reg, &pair[0], &Env::empty(), &DiffEnv::empty());
            let d1 = deriv_q(&reg, &pair[1], &Env::empty(), &DiffEnv::empty());
            let dgap = diff_probe_eq(&item.ty, &d0, &d1, &cfg);
            assert!(dgap <= 1e-9, "{}: derivative moved by {dgap}", item.name);
            // locally-Lipschitz model
            let l0 = denote_ll(&reg, &pair[0], &LLEnv::empty());
            let l1 = denote_ll(&reg, &pair[1], &LLEnv::empty());
            let lgap = ll_value_gap(&item.ty, &l0, &l1).unwrap();
            assert!(lgap <= 1e-9, "{}: ll denotation moved by {lgap}", item.name);
            let e0 = deriv_ll(&reg, &pair[0], &LLEnv::empty(), &LLDiffEnv::empty());
            let e1 = deriv_ll(&reg, &pair[1], &LLEnv::empty(), &LLDiffEnv::empty());
            let egap = ll_diff_gap(&item.ty, &e0, &e1).unwrap();
            assert!(egap <= 1e-9, "{}: ll derivative moved by {egap}", item.name);
        }
    }
    println!("acceptance 05 soundness corpus: pass");
}

#[test]
fn acceptance_06_reflexivity_bounds() {
    let reg = Registry::default();
    let corpus = soundness_corpus(&reg);
    // curried results nest a grid sup per arrow, so they get a coarse ball
    fn has_arrow(ty: &SimpleType) -> bool {
        match ty {
            SimpleType::Real => false,
            SimpleType::Prod(a, b) => has_arrow(a) || has_arrow(b),
            SimpleType::Arrow(..) => true,
        }
    }
    fn curried(ty: &SimpleType) -> bool {
        matches!(ty, SimpleType::Arrow(_, cod) if has_arrow(cod))
    }
    let mut sampled = 0usize;
    for item in &corpus {
        let cfg =
            if curried(&item.ty) { GridConfig::coarse(11) } else { GridConfig::coarse(101) };
        let v = denote(&reg, &item.term, &Env::empty());
        // sampled self-distance never exceeds the derivative bound
        if let Ok(a) = sample_dist(&item.ty, &v, &v, &cfg) {
            let d = deriv_q(&reg, &item.term, &Env::empty(), &DiffEnv::empty());
            let excess = diff_probe_leq(&item.ty, &a, &d, &cfg);
            assert!(excess <= 1e-9, "{}: self-distance exceeds bound by {excess}", item.name);
            sampled += 1;
            // the corrected distance cancels self-variation entirely
            let e = match &item.ty {
                SimpleType::Real => Some(dist_e(&item.ty, &v, &v, None, &cfg).unwrap()),
                SimpleType::Arrow(_, cod) if **cod == SimpleType::Real => {
                    let probe = (Value::RealV(0.5), Diff::DReal(1.0));
                    Some(dist_e(&item.ty, &v, &v, Some((&probe.0, &probe.1)), &cfg).unwrap())
                }
                _ => None,
            };
            if let Some(e) = e {
                assert_eq!(e, 0.0, "{}", item.name);
            }
        }
        // pointwise model: self-distance is exactly zero at every probe
        let lv = denote_ll(&reg, &item.term, &LLEnv::empty());
        let sup = ll_diff_sup(&item.ty, &ll_dist(&item.ty, &lv, &lv)).unwrap();
        assert_eq!(sup, 0.0, "{}: pointwise self-distance is {sup}", item.name);
    }
    assert!(sampled >= 15, "only {sampled} corpus terms admit sampled distances");
    println!("acceptance 06 reflexivity bounds: pass");
}

#[test]
fn acceptance_07_counterexample_figure() {
    let cfg = GridConfig::default();
    let a = reproduce_fig1(Fig1Variant::A, 0.0, 2.0, &cfg);
    let cos2 = (2.0f64).cos();
    assert!((a.d_fg - (1.95 - 0.8 * cos2)).abs() < 1e-9);
    assert!((a.d_fh - 1.15).abs() < 1e-9);
    assert!((a.d_hh - 0.8 * (1.0 - cos2)).abs() < 1e-9);
    assert!(a.violated, "sharpened-triangle violation must hold for the naive distance");
    let b = reproduce_fig1(Fig1Variant::B, 0.0, 2.0, &cfg);
    assert!(b.violated, "triangle violation must hold for the corrected distance");
    // rendered table is byte-stable against the frozen golden file
    let golden_path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/fig1_golden.csv");
    let golden = std::fs::read(golden_path).expect("golden CSV missing");
    assert_eq!(fig1_csv(&[a, b]).into_bytes(), golden, "CSV output drifted from the golden file");
    // the valuation lifting turns the violation into an exact equality
    let i = IntervalElem::bounded(-2.0, 2.0);
    let f = Value::real_fn(|_| 0.3);
    let h = Value::real_fn(|y| 0.65 + 0.8 * y.cos());
    let g = Value::real_fn(|y| 2.25 - 0.8 * y.cos());
    let p_fg = lifted_p(&f, &g, 0.0, &i, &cfg).unwrap();
    let p_fh = lifted_p(&f, &h, 0.0, &i, &cfg).unwrap();
    let p_hg = lifted_p(&h, &g, 0.0, &i, &cfg).unwrap();
    let p_hh = lifted_p(&h, &h, 0.0, &i, &cfg).unwrap();
    assert!(
        (p_fg - (p_fh + p_hg - p_hh)).abs() <= 1e-6,
        "lifted distances miss the equality: {p_fg} vs {}",
        p_fh + p_hg - p_hh
    );
    println!("acceptance 07 counterexample figure: pass");
}

#[test]
fn acceptance_08_non_additive_budgets() {
    let rep = non_additivity_witness(&GridConfig::default());
    assert!(rep.d_f_2 > 2.0 * rep.d_f_1, "{} vs {}", rep.d_f_2, rep.d_f_1);
    assert!(rep.d_g_2 < 2.0 * rep.d_g_1, "{} vs {}", rep.d_g_2, rep.d_g_1);
    assert!(rep.superadditive && rep.subadditive);
    // the grid hits the breakpoints exactly
    assert_eq!((rep.d_f_1, rep.d_f_2), (1.0, 4.0));
    assert_eq!((rep.d_g_1, rep.d_g_2), (2.0, 2.0));
    println!("acceptance 08 non-additive budgets: pass");
}

/// All join-idempotent-valued spaces of size ≤ 3 passing the partial
/// ultra-metric axioms, deduplicated up to point relabeling.
fn ultra_pool(q: &QuantaleDesc) -> Vec<FiniteQlr> {
    let elems = q.elements().unwrap();
    let perms: [&[&[usize]]; 3] = [
        &[&[0]],
        &[&[0, 1], &[1, 0]],
        &[&[0, 1, 2], &[0, 2, 1], &[1, 0, 2], &[1, 2, 0], &[2, 0, 1], &[2, 1, 0]],
    ];
    let mut pool = Vec::new();
    let mut seen = HashSet::new();
    for n in 1..=3usize {
        let slots = n * n;
        for code in 0..elems.len().pow(slots as u32) {
            let mut flat = Vec::with_capacity(slots);
            let mut c = code;
            for _ in 0..slots {
                flat.push(c % elems.len());
                c /= elems.len();
            }
            // canonical representative under point relabeling
            let canon = perms[n - 1]
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
            .unwrap();
            if check_axioms(&s, &[AxiomId::PartialUltraMetric]).unwrap().all_pass() {
                pool.push(s);
            }
        }
    }
    pool
}

#[test]
fn acceptance_09_ultra_metric_lifting() {
    let d2 = QuantaleDesc::discrete_two();
    assert!(d2.is_locale());
    let pool = ultra_pool(&d2);
    assert!(pool.len() >= 10, "pool unexpectedly small: {}", pool.len());
    let mut checked = 0usize;
    let mut checked_r = 0usize;
    for dom in &pool {
        for cod in &pool {
            let e = exp_q(dom, cod).unwrap();
            let rep = check_axioms(&e.space, &[AxiomId::UltraMetric]).unwrap();
            assert!(
                rep.all_pass(),
                "{} ^ {} loses join-transitivity:\n{}",
                cod.name,
                dom.name,
                rep.render_text()
            );
            // join-idempotent lifting is also symmetric on symmetric inputs
            let symmetric = check_axioms(dom, &[AxiomId::Symmetric]).unwrap().all_pass()
                && check_axioms(cod, &[AxiomId::Symmetric]).unwrap().all_pass();
            if symmetric {
                assert!(check_symmetric_exp(dom, cod).unwrap());
            }
            checked += 1;
            // the reflexive lifting preserves join-transitivity only for
            // reflexive symmetric inputs; asymmetric pairs genuinely fail
            let reflexive = dom.is_reflexive().unwrap() && cod.is_reflexive().unwrap();
            if reflexive && symmetric {
                let er = exp_qr(dom, cod).unwrap();
                let rep =
                    check_axioms(&er.space, &[AxiomId::Reflexive, AxiomId::UltraMetric]).unwrap();
                assert!(rep.all_pass(), "{}", rep.render_text());
                checked_r += 1;
            }
        }
    }
    assert!(checked >= 100, "too few exponentials audited: {checked}");
    assert!(checked_r >= 25, "too few reflexive exponentials audited: {checked_r}");

    // outside the join-idempotent world the lifting loses transitivity:
    // search plus-transitive reflexive symmetric chain spaces whose
    // exponential fails the triangle, and demand a concrete witness
    let tc2 = QuantaleDesc::trunc_chain(2);
    let mut doms = Vec::new();
    for d01 in 0..=3usize {
        let s = idx_space(&tc2, &format!("m2-{d01}"), &[&[0, d01], &[d01, 0]]);
        if check_axioms(&s, &[AxiomId::Reflexive, AxiomId::Symmetric, AxiomId::Transitive])
            .unwrap()
            .all_pass()
        {
            doms.push(s);
        }
    }
    for (d01, d02, d12) in
        (0..=3usize).flat_map(|a| (0..=3usize).flat_map(move |b| (0..=3usize).map(move |c| (a, b, c))))
    {
        let s = idx_space(
            &tc2,
            &format!("m3-{d01}{d02}{d12}"),
            &[&[0, d01, d02], &[d01, 0, d12], &[d02, d12, 0]],
        );
        if check_axioms(&s, &[AxiomId::Reflexive, AxiomId::Symmetric, AxiomId::Transitive])
            .unwrap()
            .all_pass()
        {
            doms.push(s);
        }
    }
    // two failure modes over a non-idempotent quantale: the plain lifting of
    // (partial) metric spaces loses the partial-metric axiom, and the
    // reflexive lifting of metric spaces loses plain transitivity
    let mut witness_pms = None;
    'pms: for dom in &doms {
        for cod in &doms {
            let e = exp_q(dom, cod).unwrap();
            let rep = check_axioms(&e.space, &[AxiomId::PartialMetric]).unwrap();
            if let Some(entry) = rep.entries.iter().find(|en| !en.pass) {
                witness_pms = entry.witness.clone();
                break 'pms;
            }
        }
    }
    let mut witness_tr = None;
    'tr: for dom in &doms {
        for cod in &doms {
            let er = exp_qr(dom, cod).unwrap();
            let rep = check_axioms(&er.space, &[AxiomId::Transitive]).unwrap();
            if let Some(entry) = rep.entries.iter().find(|en| !en.pass) {
                witness_tr = entry.witness.clone();
                break 'tr;
            }
        }
    }
    let witness = witness_pms
        .or(witness_tr.clone())
        .expect("every chain-valued exponential stayed transitive");
    assert!(!witness.is_empty());
    println!(
        "acceptance 09 ultra-metric lifting: pass (non-idempotent witness: {witness}{})",
        if witness_tr.is_some() { "; reflexive lifting also fails" } else { "" }
    );
}

#[test]
fn acceptance_10_context_sensitive_bound() {
    let t0 = Instant::now();
    let reg = Registry::default();
    let cfg = GridConfig::default();
    let rr = SimpleType::real_fn(1);
    let c = parse(&reg, "[] 0.0").unwrap();
    let t = parse(&reg, r"\x:Real. sin x").unwrap();
    let u = parse(&reg, r"\x:Real. x").unwrap();
    // observing at 0 with inputs known to within 0.1 gives a tight bound
    let rep = contextuality_bound(&reg, &c, &t, &u, &rr, 0.1, &cfg).unwrap();
    assert!(rep.bound <= 0.2, "contextual bound {} too loose", rep.bound);
    assert!(rep.actual <= rep.bound + 1e-9);
    // worst-case distance over a quarter-turn budget is far larger
    let sin = denote(&reg, &t, &Env::empty());
    let id = denote(&reg, &u, &Env::empty());
    let probe = (Value::RealV(0.0), Diff::DReal(std::f64::consts::FRAC_PI_2));
    let worst = dist_d(&rr, &sin, &id, Some((&probe.0, &probe.1)), &cfg).unwrap();
    assert!(worst > 1.5, "worst-case distance {worst} not > 1.5");
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "bound computation took {elapsed:?}");
    println!("acceptance 10 context-sensitive bound: pass");
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

#[test]
fn acceptance_11_locally_lipschitz_checks() {
    let reg = Registry::default();
    // validity on the first-order slice of the corpus
    let corpus = soundness_corpus(&reg);
    let mut first_order = 0usize;
    for item in &corpus {
        let arity = match flat_arity(&item.ty) {
            Some(n) if n >= 1 => n,
            _ => continue,
        };
        first_order += 1;
        let nf = corpus_steps(&reg, &item.term).pop().unwrap();
        let points = default_lip_points(arity);
        let reports = check_lip_validity(&reg, &nf, &points, 0.1)
            .unwrap_or_else(|e| panic!("{}: {e}", item.name));
        assert_eq!(reports.len(), points.len());
        for r in &reports {
            assert!(r.radius > 0.0, "{}: no positive validity radius", item.name);
            assert!(
                r.observed <= r.bound + 1e-9,
                "{}: observed {} exceeds bound {} at {:?}",
                item.name,
                r.observed,
                r.bound,
                r.point
            );
        }
    }
    assert!(first_order >= 6, "only {first_order} first-order corpus terms");
    // derivative-structure law suite
    let rep = check_dlambda_props(&reg);
    assert!(rep.entries.len() >= 6);
    assert!(rep.all_pass(), "{}", rep.render_text());
    // contextual gate: in regime the bound is contractual, out of regime
    // the gate reports the breach instead of promising anything
    let c = parse(&reg, "[] 0.0").unwrap();
    let t = parse(&reg, r"\x:Real. sin x").unwrap();
    let near = parse(&reg, r"\x:Real. x").unwrap();
    let rr = SimpleType::real_fn(1);
    let rep = local_contextuality_bound(&reg, &c, &t, &near, &rr, 0.1, 0.5).unwrap();
    assert!(rep.in_regime, "gate gap {} should sit inside 0.1", rep.gate_gap);
    assert!(rep.actual <= rep.bound + 1e-9);
    let far = parse(&reg, r"\x:Real. add x 100.0").unwrap();
    let rep = local_contextuality_bound(&reg, &c, &t, &far, &rr, 0.1, 0.5).unwrap();
    assert!(!rep.in_regime, "a 100-unit gap cannot pass a 0.1 gate");
    assert!(rep.gate_gap > 99.0);
    println!("acceptance 11 locally-lipschitz checks: pass");
}
