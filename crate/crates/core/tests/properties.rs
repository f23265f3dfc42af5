use std::collections::HashSet;

use mbasimp::boolfunc::{quine_mccluskey, TruthTable};
use mbasimp::expr::{
    and, canonicalize, classify, constant, not, or, parse, power, print, product, sum, xor, Expr, Name, Width,
};
use mbasimp::linear::{
    conjunction_basis, decompose_two_terms, partition_by_variables, result_vector, simplify_linear, LinearCombination,
    LinearConfig, ResultVector,
};
use mbasimp::pipeline::{
    collect_substitution_candidates, expand, factorize, polish, simplify_general, substitute_and_simplify,
    SimplifyConfig,
};
use mbasimp::sample;
use mbasimp::verify::{check, exhaustive_equivalence, random_equivalence, OutcomeClass, VerifyConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn w8() -> Width {
    Width::new(8).unwrap()
}

fn w4() -> Width {
    Width::new(4).unwrap()
}

fn var_names(t: usize) -> Vec<Name> {
    sample::names(&["x", "y", "z", "w", "a", "b"][..t])
}

/// Random expression built through the normalizing constructors.
fn arb_expr(w: Width) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["x", "y", "z", "w"]).prop_map(Expr::var),
        any::<u64>().prop_map(move |c| constant(w.reduce(c), w)),
        (-5i64..=5).prop_map(move |c| constant(w.from_i64(c), w)),
    ];
    leaf.prop_recursive(5, 48, 3, move |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(move |v| sum(v, w)),
            prop::collection::vec(inner.clone(), 2..3).prop_map(move |v| product(v, w)),
            prop::collection::vec(inner.clone(), 2..4).prop_map(move |v| and(v, w)),
            prop::collection::vec(inner.clone(), 2..4).prop_map(move |v| or(v, w)),
            prop::collection::vec(inner.clone(), 2..4).prop_map(move |v| xor(v, w)),
            inner.clone().prop_map(move |e| not(e, w)),
            (inner.clone(), 0u64..4).prop_map(move |(b, k)| power(b, Expr::Const(k), w)),
        ]
    })
}

fn fuzz_expr(max_vars: usize, depth: usize) -> impl Strategy<Value = Expr> {
    (any::<u64>(), 1..=max_vars).prop_map(move |(seed, t)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        sample::fuzz(&mut rng, &var_names(t), depth, Width::W64)
    })
}

fn linear_expr(t: usize) -> impl Strategy<Value = (Expr, Vec<Name>)> {
    any::<u64>().prop_map(move |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vars = var_names(t);
        (sample::linear_mba(&mut rng, &vars, Width::W64).0, vars)
    })
}

fn reverse_commutative(e: &Expr) -> Expr {
    let children: Vec<Expr> = e.children().into_iter().map(reverse_commutative).collect();
    match e {
        Expr::Sum(_) | Expr::Product(_) | Expr::And(_) | Expr::Or(_) | Expr::Xor(_) => {
            e.with_children(children.into_iter().rev().collect())
        }
        _ if e.is_leaf() => e.clone(),
        _ => e.with_children(children),
    }
}

fn normalized(e: &Expr, w: Width) -> bool {
    let ok = match e {
        Expr::Const(c) => *c == w.reduce(*c),
        Expr::Sum(v) | Expr::Product(v) | Expr::And(v) | Expr::Or(v) | Expr::Xor(v) => {
            v.len() >= 2 && v.iter().filter(|o| matches!(o, Expr::Const(_))).count() <= 1
        }
        _ => true,
    };
    ok && e.children().into_iter().all(|c| normalized(c, w))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn print_parse_round_trip(e in arb_expr(w8())) {
        let text = print(&e, w8());
        prop_assert_eq!(parse(&text, w8()).unwrap(), e, "{}", text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn constructors_normalize(e in arb_expr(w8())) {
        prop_assert!(normalized(&e, w8()));
        prop_assert!(normalized(&polish(&e), w8()));
    }

    #[test]
    fn classification_ignores_operand_order(e in arb_expr(w8())) {
        prop_assert_eq!(classify(&e, w8()), classify(&reverse_commutative(&e), w8()));
    }

    #[test]
    fn polish_is_idempotent(e in arb_expr(w8())) {
        let once = polish(&e);
        prop_assert_eq!(polish(&once), once);
    }

    #[test]
    fn conjunction_basis_reproduces_vector((e, vars) in (1usize..=4).prop_flat_map(linear_expr)) {
        let w = Width::W64;
        let f = result_vector(&e, &vars, w).unwrap();
        prop_assert_eq!(f.values.len(), 1 << vars.len());
        let lc = conjunction_basis(&f);
        prop_assert!(lc.terms.iter().all(|(_, b)| classify(b, w) == mbasimp::expr::Classification::Bitwise));
        prop_assert_eq!(lc.result_vector(&vars, w).unwrap(), f);
    }

    #[test]
    fn equal_vectors_mean_equivalent(seed in any::<u64>(), t in 1usize..=3) {
        // two obfuscations of the same linear MBA share a result vector
        let w = Width::W64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vars = var_names(t);
        let truth = sample::simple_linear(&mut rng, &vars, w);
        let a = sample::obfuscate(&mut rng, &truth, &vars, 3, w);
        let b = sample::obfuscate(&mut rng, &truth, &vars, 4, w);
        prop_assert_eq!(result_vector(&a, &vars, w).unwrap(), result_vector(&b, &vars, w).unwrap());
        prop_assert!(random_equivalence(&a, &b, w, 500, seed).is_none());
        prop_assert!(exhaustive_equivalence(&a.at_width(w4()), &b.at_width(w4()), w4()).is_none());
    }

    #[test]
    fn partition_is_disjoint_cover(seed in any::<u64>()) {
        let w = Width::W64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vars = var_names(6);
        let mut lc = LinearCombination::default();
        for _ in 0..4 {
            let k = 1 + rand::Rng::gen_range(&mut rng, 0..3usize);
            let sub: Vec<Name> = rand::seq::SliceRandom::choose_multiple(&vars[..], &mut rng, k).cloned().collect();
            lc.terms.push((rand::Rng::gen_range(&mut rng, 1..9u64), sample::bitwise(&mut rng, &sub, 2, w)));
        }
        // the input is a conjunction-basis combination, so every variable
        // it mentions matters
        let f = result_vector(&lc.to_expr(w), &vars, w).unwrap();
        let lc = conjunction_basis(&f);
        let parts = partition_by_variables(&lc, &LinearConfig::default());
        let all: HashSet<Name> = lc.vars().into_iter().collect();
        let mut seen = HashSet::new();
        for p in &parts {
            for v in p.vars() {
                prop_assert!(seen.insert(v), "parts share a variable");
            }
        }
        prop_assert_eq!(&seen, &all, "{} -> {:?}", print(&lc.to_expr(w), w),
            parts.iter().map(|p| print(&p.to_expr(w), w)).collect::<Vec<_>>());
    }

    #[test]
    fn qm_reproduces_table(t in 1usize..=4, index in any::<u64>()) {
        let tt = TruthTable::from_index(t, index & ((1u64 << (1 << t)) - 1));
        let vars = var_names(t);
        let e = quine_mccluskey(&tt, &vars, Width::W64).unwrap();
        prop_assert_eq!(TruthTable::from_expr(&e, &vars).unwrap(), tt);
    }

    #[test]
    fn linear_simplification_agrees_on_bits(e in fuzz_expr(3, 4)) {
        // exact on 0/1 inputs even when the input is not linear
        let w = Width::W64;
        let vars = e.vars();
        let out = simplify_linear(&e, &LinearConfig::default());
        prop_assert_eq!(result_vector(&out, &vars, w).unwrap(), result_vector(&e, &vars, w).unwrap());
    }

    #[test]
    fn factorize_expand_round_trip(seed in any::<u64>(), t in 1usize..=3) {
        let w = Width::W64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vars = var_names(t);
        let p = product(vec![sample::simple_linear(&mut rng, &vars, w), sample::simple_linear(&mut rng, &vars, w)], w);
        let x = expand(&p, 512, w).unwrap_or_else(|| p.clone());
        let back = factorize(&x, 512, w);
        prop_assert!(exhaustive_equivalence(&p.at_width(w4()), &x.at_width(w4()), w4()).is_none());
        prop_assert!(exhaustive_equivalence(&p.at_width(w4()), &back.at_width(w4()), w4()).is_none());
    }

    #[test]
    fn substitution_keeps_semantics(e in fuzz_expr(3, 4)) {
        let w = Width::W64;
        let cands = collect_substitution_candidates(&e, w);
        let out = substitute_and_simplify(&e, &cands, &SimplifyConfig::default());
        let before: HashSet<Name> = e.vars().into_iter().collect();
        prop_assert!(out.vars().iter().all(|v| before.contains(v)), "fresh variable leaked");
        prop_assert!(exhaustive_equivalence(&e.at_width(w4()), &out.at_width(w4()), w4()).is_none());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn general_simplification_is_sound(e in fuzz_expr(4, 4)) {
        let out = simplify_general(&e, &SimplifyConfig::default()).expr;
        prop_assert!(exhaustive_equivalence(&e.at_width(w4()), &out.at_width(w4()), w4()).is_none(),
            "{} -> {}", print(&e, Width::W64), print(&out, Width::W64));
        prop_assert!(random_equivalence(&e, &out, Width::W64, 200, 3).is_none());
    }

    #[test]
    fn verdicts_are_consistent(a in fuzz_expr(2, 3), b in fuzz_expr(2, 3)) {
        let w = Width::W64;
        let outcome = check(&a, &b, &VerifyConfig::default());
        if outcome.class == OutcomeClass::Identical {
            let pa = polish(&a);
            prop_assert!(pa == polish(&b) || pa == simplify_general(&b, &SimplifyConfig::default()).expr);
        }
        if let Some(cx) = outcome.counterexample {
            let cw = Width::new(cx.bits).unwrap();
            let env = |n: &str| cx.assignment.iter().find(|(v, _)| v == n).map(|(_, x)| *x);
            let l = mbasimp::expr::eval_with(&a.at_width(cw), &env, cw).unwrap();
            let r = mbasimp::expr::eval_with(&b.at_width(cw), &env, cw).unwrap();
            prop_assert_ne!(l, r);
            prop_assert_eq!((l, r), (cx.left, cx.right));
        }
        let _ = w;
    }
}

/// Every combination returned for a 2-variable vector reproduces it; all
/// 16^4 vectors at four bits.
#[test]
fn two_term_decompositions_are_exact() {
    let w = w4();
    let vars = var_names(2);
    let metric = Default::default();
    let mut found = 0;
    for n in 0..1u64 << 16 {
        let f = ResultVector::new(vars.clone(), (0..4).map(|i| n >> (4 * i) & 15).collect(), w);
        if let Some(lc) = decompose_two_terms(&f, &metric) {
            found += 1;
            assert!(lc.len() <= 2);
            assert_eq!(lc.result_vector(&vars, w).unwrap(), f, "{n:#x}");
        }
    }
    assert!(found > 0);
}

#[test]
fn polynomial_example_round_trips() {
    let w = Width::W64;
    let e = parse("y*(x^y) - (x&y)**2 - 1", w).unwrap();
    assert_eq!(parse(&print(&e, w), w).unwrap(), e);
    assert_eq!(canonicalize(&parse(&print(&e, w), w).unwrap()), canonicalize(&e));
}
