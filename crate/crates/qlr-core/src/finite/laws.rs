//! The six derivative laws, checked exhaustively over sampled function
//! tables on finite instances.
//!
//!   D1  D(id)(x,α) = α                         at realized-join budgets
//!   D2  D(π_i)(⟨x,y⟩,⟨α,β⟩) = α_i              realized × witnessed budgets
//!   D3  D(⟨f,g⟩)(x,α) = ⟨D(f)(x,α), D(g)(x,α)⟩ all budgets
//!   D4  D(g∘f)(x,α) ≤ D(g)(f x, D(f)(x,α))     all budgets, can be strict
//!   D5  D(λf)(z,γ) ≤ λ(D(f))(z,γ)              reflexive integral outer Z
//!   D6  D(ev)(⟨g,x⟩,⟨β,α⟩) ≤ β(x,α)            all budgets
//!
//! The budget scoping is not a convenience: D1 and D2 are false at budgets
//! no distance realizes (an all-zero instance has D(id)(x,⊤) = 0 ≠ ⊤), and
//! D5 is false when the outer space is not reflexive, because the
//! exponential distance sees the slice self-variation through any admissible
//! neighbour while the product derivative only sees it through z itself.
//! Each law is checked on the largest domain on which it is a theorem;
//! counterexample tests pin the boundaries.

use super::{
    derivative, dom_elements, enumerate_functions, exp_q, pair_idx, product_qlr,
    realized_budgets, FiniteQlr,
};
use crate::quantale::{QuantaleDesc, QuantaleElem, Result};
use crate::report::{LawEntry, LawReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Cap on join-closure budget pools for exponential-valued quantales.
const POOL_CAP: usize = 64;
/// Full quantale carriers up to this size are used as budget pools directly.
const FULL_POOL: usize = 1024;

/// Join-closure of `seed` under binary joins, deterministic order, size-capped.
fn bounded_closure(
    q: &QuantaleDesc,
    seed: Vec<QuantaleElem>,
    cap: usize,
) -> Result<Vec<QuantaleElem>> {
    let mut set: Vec<QuantaleElem> = Vec::new();
    for e in seed {
        if !set.contains(&e) {
            set.push(e);
        }
    }
    set.sort();
    loop {
        let mut grew = false;
        let snapshot = set.clone();
        'outer: for a in &snapshot {
            for b in &snapshot {
                if set.len() >= cap {
                    break 'outer;
                }
                let j = q.join2(a, b)?;
                if !set.contains(&j) {
                    set.push(j);
                    grew = true;
                }
            }
        }
        if !grew || set.len() >= cap {
            break;
        }
    }
    set.sort();
    Ok(set)
}

/// Budgets at which the projection laws can reach their target: joins of
/// nonempty neighbour sets, so every budget has at least one witness point.
fn witnessed_budgets(space: &FiniteQlr, p: usize) -> Result<Vec<QuantaleElem>> {
    let row: Vec<QuantaleElem> = (0..space.size()).map(|y| space.d(p, y).clone()).collect();
    bounded_closure(&space.quantale, row, POOL_CAP)
}

/// General-purpose budget pool: the full carrier when small, otherwise the
/// capped join-closure of the realized row distances.
fn budget_pool(space: &FiniteQlr, p: usize) -> Result<Vec<QuantaleElem>> {
    if let Some(es) = space.quantale.elements() {
        if es.len() <= FULL_POOL {
            return Ok(es);
        }
    }
    let mut seed = vec![space.quantale.bottom()];
    seed.extend((0..space.size()).map(|y| space.d(p, y).clone()));
    bounded_closure(&space.quantale, seed, POOL_CAP)
}

/// All function tables nx → ny when few, otherwise a seeded sample.
fn sample_functions(nx: usize, ny: usize, cap: usize, seed: u64) -> Vec<Vec<usize>> {
    let total = ny.checked_pow(nx as u32).expect("function space overflow");
    if total <= cap {
        return enumerate_functions(nx, ny);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..cap)
        .map(|_| {
            let mut code = rng.gen_range(0..total);
            let mut f = vec![0usize; nx];
            for slot in (0..nx).rev() {
                f[slot] = code % ny;
                code /= ny;
            }
            f
        })
        .collect()
}

fn entry(report: &mut LawReport, law: &str, witness: Option<String>) {
    match witness {
        None => report.push(LawEntry::pass(law)),
        Some(w) => report.push(LawEntry::fail(law, w)),
    }
}

/// Check D1–D6 on the triple (X, Y, Z), sampling at most `samples` function
/// tables per role. All checks are deterministic for fixed inputs.
pub fn check_derivative_laws(
    x: &FiniteQlr,
    y: &FiniteQlr,
    z: &FiniteQlr,
    samples: usize,
) -> Result<LawReport> {
    let mut report = LawReport::new(format!("{}/{}/{}", x.name, y.name, z.name));
    entry(&mut report, "d1-identity", d1(&[x, y, z])?);
    entry(&mut report, "d2-projections", d2(x, y)?);
    entry(&mut report, "d3-pairing", d3(x, y, z, samples)?);
    entry(&mut report, "d4-chain", d4(x, y, z, samples)?);
    if z.is_reflexive()? && z.quantale.is_integral() {
        entry(&mut report, "d5-curry-lax", d5(x, y, z, samples)?);
    } else {
        report.push(LawEntry {
            law: "d5-curry-lax".into(),
            pass: true,
            witness: Some(
                "vacuous: the law requires a reflexive outer space over an integral quantale"
                    .into(),
            ),
        });
    }
    entry(&mut report, "d6-ev-lax", d6(x, y)?);
    Ok(report)
}

fn d1(spaces: &[&FiniteQlr]) -> Result<Option<String>> {
    for s in spaces {
        let id: Vec<usize> = (0..s.size()).collect();
        for p in 0..s.size() {
            for alpha in realized_budgets(s, p)? {
                let d = derivative(s, s, &id, p, &alpha)?;
                if d != alpha {
                    return Ok(Some(format!(
                        "{}: D(id)({},{}) = {} ≠ the budget",
                        s.name,
                        s.points[p],
                        s.quantale.render(&alpha),
                        s.quantale.render(&d)
                    )));
                }
            }
        }
    }
    Ok(None)
}

fn d2(x: &FiniteQlr, y: &FiniteQlr) -> Result<Option<String>> {
    let prod = product_qlr(x, y)?;
    let (nx, ny) = (x.size(), y.size());
    let pi1: Vec<usize> = (0..nx * ny).map(|p| p / ny).collect();
    let pi2: Vec<usize> = (0..nx * ny).map(|p| p % ny).collect();
    for i in 0..nx {
        for j in 0..ny {
            let p = pair_idx(i, j, ny);
            for a in realized_budgets(x, i)? {
                for b in witnessed_budgets(y, j)? {
                    let budget = QuantaleElem::Tuple(vec![a.clone(), b.clone()]);
                    let d = derivative(&prod, x, &pi1, p, &budget)?;
                    if d != a {
                        return Ok(Some(format!(
                            "D(π1)({},{}) = {} ≠ {}",
                            prod.points[p],
                            prod.quantale.render(&budget),
                            x.quantale.render(&d),
                            x.quantale.render(&a)
                        )));
                    }
                }
            }
            for a in witnessed_budgets(x, i)? {
                for b in realized_budgets(y, j)? {
                    let budget = QuantaleElem::Tuple(vec![a.clone(), b.clone()]);
                    let d = derivative(&prod, y, &pi2, p, &budget)?;
                    if d != b {
                        return Ok(Some(format!(
                            "D(π2)({},{}) = {} ≠ {}",
                            prod.points[p],
                            prod.quantale.render(&budget),
                            y.quantale.render(&d),
                            y.quantale.render(&b)
                        )));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn d3(x: &FiniteQlr, y: &FiniteQlr, z: &FiniteQlr, samples: usize) -> Result<Option<String>> {
    let prod = product_qlr(x, y)?;
    let budgets = dom_elements(z)?;
    let fs = sample_functions(z.size(), x.size(), samples, 3);
    let gs = sample_functions(z.size(), y.size(), samples, 5);
    for f in &fs {
        for g in &gs {
            let paired: Vec<usize> =
                (0..z.size()).map(|p| pair_idx(f[p], g[p], y.size())).collect();
            for p in 0..z.size() {
                for gamma in &budgets {
                    let got = derivative(z, &prod, &paired, p, gamma)?;
                    let want = QuantaleElem::Tuple(vec![
                        derivative(z, x, f, p, gamma)?,
                        derivative(z, y, g, p, gamma)?,
                    ]);
                    if got != want {
                        return Ok(Some(format!(
                            "D(⟨f,g⟩)({},{}) = {} ≠ {} for f={f:?} g={g:?}",
                            z.points[p],
                            z.quantale.render(gamma),
                            prod.quantale.render(&got),
                            prod.quantale.render(&want)
                        )));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn d4(x: &FiniteQlr, y: &FiniteQlr, z: &FiniteQlr, samples: usize) -> Result<Option<String>> {
    let budgets = dom_elements(x)?;
    let fs = sample_functions(x.size(), y.size(), samples, 7);
    let gs = sample_functions(y.size(), z.size(), samples, 11);
    for f in &fs {
        for g in &gs {
            let comp: Vec<usize> = f.iter().map(|&i| g[i]).collect();
            for p in 0..x.size() {
                for alpha in &budgets {
                    let lhs = derivative(x, z, &comp, p, alpha)?;
                    let df = derivative(x, y, f, p, alpha)?;
                    let rhs = derivative(y, z, g, f[p], &df)?;
                    if !z.quantale.leq(&lhs, &rhs)? {
                        return Ok(Some(format!(
                            "D(g∘f)({},{}) = {} > {} for f={f:?} g={g:?}",
                            x.points[p],
                            x.quantale.render(alpha),
                            z.quantale.render(&lhs),
                            z.quantale.render(&rhs)
                        )));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn d5(x: &FiniteQlr, y: &FiniteQlr, z: &FiniteQlr, samples: usize) -> Result<Option<String>> {
    let exp = exp_q(x, y)?;
    let prod = product_qlr(z, x)?;
    let gammas = dom_elements(z)?;
    let (nz, nx) = (z.size(), x.size());
    let fs = sample_functions(nz * nx, y.size(), samples, 13);
    for f in &fs {
        let lam: Vec<usize> = (0..nz)
            .map(|zi| {
                let slice: Vec<usize> = (0..nx).map(|xi| f[pair_idx(zi, xi, nx)]).collect();
                exp.func_index(&slice).expect("slice is in the exponential carrier")
            })
            .collect();
        for zi in 0..nz {
            for gamma in &gammas {
                let lhs = derivative(z, &exp.space, &lam, zi, gamma)?;
                let mut rhs = Vec::with_capacity(exp.keys.len());
                for (xi, alpha) in &exp.keys {
                    let budget = QuantaleElem::Tuple(vec![gamma.clone(), alpha.clone()]);
                    rhs.push(derivative(&prod, y, f, pair_idx(zi, *xi as usize, nx), &budget)?);
                }
                let rhs = QuantaleElem::Table(rhs);
                if !exp.space.quantale.leq(&lhs, &rhs)? {
                    return Ok(Some(format!(
                        "D(λf)({},{}) = {} ≰ {} for f={f:?}",
                        z.points[zi],
                        z.quantale.render(gamma),
                        exp.space.quantale.render(&lhs),
                        exp.space.quantale.render(&rhs)
                    )));
                }
            }
        }
    }
    Ok(None)
}

fn d6(x: &FiniteQlr, y: &FiniteQlr) -> Result<Option<String>> {
    let exp = exp_q(x, y)?;
    let w = &exp.space;
    let prod = product_qlr(w, x)?;
    let alphas = dom_elements(x)?;
    let nx = x.size();
    let ev: Vec<usize> = (0..w.size() * nx).map(|p| exp.funcs[p / nx][p % nx]).collect();
    for gi in 0..w.size() {
        let betas = budget_pool(w, gi)?;
        for beta in &betas {
            for xi in 0..nx {
                for (ai, alpha) in alphas.iter().enumerate() {
                    let budget = QuantaleElem::Tuple(vec![beta.clone(), alpha.clone()]);
                    let lhs = derivative(&prod, y, &ev, pair_idx(gi, xi, nx), &budget)?;
                    let rhs = &beta.as_table()?[xi * alphas.len() + ai];
                    if !y.quantale.leq(&lhs, rhs)? {
                        return Ok(Some(format!(
                            "D(ev)({},{}) = {} ≰ β(x,α) = {}",
                            prod.points[pair_idx(gi, xi, nx)],
                            prod.quantale.render(&budget),
                            y.quantale.render(&lhs),
                            y.quantale.render(rhs)
                        )));
                    }
                }
            }
        }
    }
    Ok(None)
}
