//! A fixed corpus of closed, well-typed terms, each at least two reduction
//! steps from normal form, used by the soundness and fundamental-property
//! sweeps. Types stay within the sampled-distance fragment so every term
//! can be probed extensionally.

use crate::lambda::{beta_step, parse, typecheck, Registry, SimpleType, Term};

#[derive(Clone, Debug)]
pub struct CorpusTerm {
    pub name: &'static str,
    pub term: Term,
    pub ty: SimpleType,
}

const SOURCES: &[(&str, &str)] = &[
    ("double-id", r"(\x:Real. add x x) ((\y:Real. y) 1.5)"),
    ("sin-comp", r"\x:Real. (\y:Real. sin y) ((\z:Real. z) x)"),
    ("twice-square", r"(\f:Real -> Real. \x:Real. f (f x)) (\y:Real. mul y y)"),
    ("pair-sum", r"(\p:Real * Real. add (fst p) (snd p)) ((\x:Real. (x, cos x)) 0.5)"),
    ("abs-at-two", r"(\f:Real -> Real. f 2.0) (\x:Real. abs x)"),
    ("shift-scale", r"\x:Real. (\y:Real. add y ((\w:Real. w) 1.0)) (mul x 2.0)"),
    ("const-drop", r"(\x:Real. \y:Real. x) ((\z:Real. z) 3.0)"),
    ("swap-pair", r"(\p:Real * Real. (snd p, fst p)) ((1.0, (\x:Real. x) 2.0))"),
    ("proj-chain", r"fst ((\x:Real. (sin x, cos x)) 0.0)"),
    ("clamp", r"(\x:Real. min (max x 0.0) 1.0) ((\y:Real. y) 0.7)"),
    (
        "twice-twice",
        r"(\f:Real -> Real. \x:Real. f (f x)) ((\f:Real -> Real. \x:Real. f (f x)) (\y:Real. add y 1.0))",
    ),
    ("eta-expand", r"(\f:Real -> Real. \x:Real. f x) (\y:Real. sin y)"),
    ("cos-shift", r"\x:Real. (\s:Real. cos (add x s)) ((\e:Real. e) 0.5)"),
    ("neg-abs", r"(\g:Real -> Real. \x:Real. neg (g x)) (\v:Real. abs v)"),
    ("affine-stack", r"(\f:Real -> Real. f (f 1.0)) (\x:Real. affine_2_1 x)"),
    (
        "apply-at-zero",
        r"(\h:(Real -> Real) -> Real. h (\x:Real. sin x)) (\f:Real -> Real. f 0.0)",
    ),
    ("curried-add", r"(\x:Real. \y:Real. add x y) ((\z:Real. z) 2.0)"),
    ("pair-of-apps", r"((\x:Real. sin x) 1.0, (\y:Real. cos y) 1.0)"),
    ("sub-chain", r"(\x:Real. sub x ((\y:Real. y) 1.0)) 5.0"),
    ("mul-pair", r"(\p:Real * Real. mul (fst p) (snd p)) ((2.0, (\x:Real. x) 3.0))"),
    (
        "compose",
        r"(\f:Real -> Real. \g:Real -> Real. \x:Real. f (g x)) (\a:Real. abs a) (\b:Real. sub b 1.0)",
    ),
    ("shadowing", r"(\x:Real. (\x:Real. add x 1.0) (mul x 2.0)) ((\w:Real. w) 1.5)"),
    (
        "capture-stress",
        r"(\x:Real. (\f:Real -> Real. \x:Real. f x) (\y:Real. add y x)) 2.0",
    ),
    ("max-pair", r"(\p:Real * Real. max (fst p) (snd p)) ((\x:Real. (x, sub 1.0 x)) 0.3)"),
    ("sin-twice", r"\x:Real. (\f:Real -> Real. f (f x)) (\y:Real. sin y)"),
    ("poly", r"(\x:Real. add (mul x x) ((\c:Real. c) 1.0)) ((\z:Real. z) 2.0)"),
    ("partial-mul", r"(\x:Real. mul x) ((\y:Real. y) 3.0)"),
    ("const-fn", r"(\c:Real. \x:Real. c) ((\y:Real. abs y) -0.8)"),
    ("add-flip", r"\x:Real. \y:Real. add ((\i:Real. i) y) ((\j:Real. j) x)"),
    ("pair-fn", r"\x:Real. ((\a:Real. a) x, (\b:Real. cos b) x)"),
];

/// Parse and typecheck the whole corpus; every term is closed.
pub fn soundness_corpus(reg: &Registry) -> Vec<CorpusTerm> {
    SOURCES
        .iter()
        .map(|(name, src)| {
            let term = parse(reg, src)
                .unwrap_or_else(|e| panic!("corpus term {name} does not parse: {e}"));
            let ty = typecheck(reg, &[], &term)
                .unwrap_or_else(|e| panic!("corpus term {name} does not typecheck: {e}"));
            CorpusTerm { name, term, ty }
        })
        .collect()
}

/// The full reduction trace t = t₀ → t₁ → … → normal form, inclusive.
pub fn corpus_steps(reg: &Registry, t: &Term) -> Vec<Term> {
    let mut out = vec![t.clone()];
    let mut cur = t.clone();
    while let Some(next) = beta_step(reg, &cur) {
        out.push(next.clone());
        cur = next;
        assert!(out.len() < 10_000, "corpus term failed to normalize");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn corpus_is_large_closed_and_busy() {
        let reg = Registry::default();
        let corpus = soundness_corpus(&reg);
        assert!(corpus.len() >= 25, "only {} corpus terms", corpus.len());
        let names: BTreeSet<_> = corpus.iter().map(|c| c.name).collect();
        assert_eq!(names.len(), corpus.len(), "duplicate corpus names");
        for entry in &corpus {
            assert!(entry.term.free_vars().is_empty(), "{} is open", entry.name);
            let steps = corpus_steps(&reg, &entry.term);
            assert!(
                steps.len() >= 3,
                "{} reaches normal form in {} steps",
                entry.name,
                steps.len() - 1
            );
        }
    }

    #[test]
    fn denotation_survives_reduction_on_a_sample() {
        let reg = Registry::default();
        let corpus = soundness_corpus(&reg);
        for entry in corpus.iter().take(6) {
            let steps = corpus_steps(&reg, &entry.term);
            let first = denote(&reg, &steps[0], &Env::empty());
            let last = denote(&reg, steps.last().unwrap(), &Env::empty());
            let dev = value_probe_eq(&entry.ty, &first, &last);
            assert!(dev <= 1e-9, "{} drifts by {dev}", entry.name);
        }
    }

    #[test]
    fn derivative_survives_reduction_on_a_sample() {
        let reg = Registry::default();
        let cfg = GridConfig::default();
        let corpus = soundness_corpus(&reg);
        for entry in corpus.iter().take(6) {
            let steps = corpus_steps(&reg, &entry.term);
            let first = deriv_q(&reg, &steps[0], &Env::empty(), &DiffEnv::empty());
            let last = deriv_q(&reg, steps.last().unwrap(), &Env::empty(), &DiffEnv::empty());
            let dev = diff_probe_eq(&entry.ty, &first, &last, &cfg);
            assert!(dev <= 1e-9, "{} derivative drifts by {dev}", entry.name);
        }
    }
}
