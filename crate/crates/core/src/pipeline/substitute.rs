//! Substitution of nonlinear subexpressions under bitwise operations by
//! fresh variables, so that the rest becomes linear.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{factor_step, linear_step, polish, refine, Ctx, SimplifyConfig};
use crate::expr::{canonicalize, product, scale, split_coefficient, sum, Expr, MetricKey, Name, Program, Width};

/// Candidates beyond this many are ignored.
const MAX_CANDIDATES: usize = 10;

/// Fresh variables and the subexpressions they stand for, in the order they
/// were introduced. A later binding may mention earlier fresh variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubstitutionMap {
    pub bindings: Vec<(Name, Expr)>,
}

impl SubstitutionMap {
    /// Replaces the fresh variables by their subexpressions.
    pub fn back_substitute(&self, e: &Expr, w: Width) -> Expr {
        self.bindings.iter().rev().fold(e.clone(), |acc, (v, c)| {
            acc.substitute_vars(&|n: &str| (n == &**v).then(|| c.clone()), w)
        })
    }
}

fn is_bitwise_atom(e: &Expr, w: Width) -> bool {
    match e {
        Expr::Var(_) => true,
        Expr::Const(c) => *c == 0 || *c == w.minus_one(),
        _ => e.kind().is_bitwise_op(),
    }
}

/// Non-bitwise operands of bitwise operations, deduplicated, with
/// constants after all other candidates.
pub fn collect_substitution_candidates(e: &Expr, w: Width) -> Vec<Expr> {
    fn walk(e: &Expr, under: bool, w: Width, out: &mut Vec<Expr>, consts: &mut Vec<Expr>) {
        if under && !is_bitwise_atom(e, w) {
            let c = canonicalize(e);
            let list = if matches!(e, Expr::Const(_)) { &mut *consts } else { &mut *out };
            if !list.contains(&c) {
                list.push(c);
            }
        }
        let bitwise = e.kind().is_bitwise_op();
        for c in e.children() {
            walk(c, bitwise, w, out, consts);
        }
    }
    let (mut out, mut consts) = (Vec::new(), Vec::new());
    walk(e, false, w, &mut out, &mut consts);
    out.append(&mut consts);
    out
}

/// `(x, k, d)` when `c = k*x + d` for odd `k`, so that `x` can be
/// expressed through a variable standing for `c`. Checked by evaluation;
/// results built on it are verified anyway.
fn affine_in_var(c: &Expr, w: Width) -> Option<(Name, u64, u64)> {
    let vars = c.vars();
    if vars.len() != 1 || matches!(c, Expr::Var(_)) {
        return None;
    }
    let prog = Program::compile(c, &vars).ok()?;
    let d = prog.run(&[0], w);
    let k = w.sub(prog.run(&[1], w), d);
    if k & 1 == 0 {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xaff1);
    for i in 0..64u64 {
        let x = if i < 16 { i } else { w.reduce(rng.gen()) };
        if prog.run(&[x], w) != w.add(w.mul(k, x), d) {
            return None;
        }
    }
    let r = Width::new(4).unwrap();
    if w.bits() > r.bits() {
        let small = Program::compile(&c.at_width(r), &vars).ok()?;
        if (0..16).any(|x| small.run(&[x], r) != r.add(r.mul(r.reduce(k), x), r.reduce(d))) {
            return None;
        }
    }
    Some((vars[0].clone(), k, d))
}

/// Replaces occurrences of `c` by `v`, including multiples of `c` inside
/// sums and the factors of `c` inside larger products.
fn replace_scaled(e: &Expr, c: &Expr, v: &Expr, w: Width) -> Expr {
    if e == c {
        return v.clone();
    }
    if e.is_leaf() {
        return e.clone();
    }
    match e {
        Expr::Sum(ts) => {
            let terms = ts
                .iter()
                .map(|t| match split_coefficient(t) {
                    (k, Some(r)) if r == *c => scale(v.clone(), k, w),
                    _ => replace_scaled(t, c, v, w),
                })
                .collect();
            sum(terms, w)
        }
        Expr::Product(fs) => {
            if let Expr::Product(cs) = c {
                if !cs.iter().any(|f| matches!(f, Expr::Const(_))) {
                    let mut rest = fs.clone();
                    let all = cs.iter().all(|f| match rest.iter().position(|g| g == f) {
                        Some(i) => {
                            rest.remove(i);
                            true
                        }
                        None => false,
                    });
                    if all {
                        let mut out: Vec<Expr> = rest.iter().map(|f| replace_scaled(f, c, v, w)).collect();
                        out.push(v.clone());
                        return product(out, w);
                    }
                }
            }
            e.rebuild(fs.iter().map(|f| replace_scaled(f, c, v, w)).collect(), w)
        }
        _ => e.rebuild(e.children().into_iter().map(|ch| replace_scaled(ch, c, v, w)).collect(), w),
    }
}

fn fresh_name(taken: &[Name], i: usize) -> Name {
    let mut k = i;
    loop {
        let n: Name = Arc::from(format!("_s{k}").as_str());
        if !taken.contains(&n) {
            return n;
        }
        k += 1;
    }
}

/// Substitutes the subset, simplifies, substitutes back and refines.
fn try_subset(e: &Expr, subset: &[Expr], ctx: &Ctx) -> Option<Expr> {
    let w = ctx.w();
    let mut taken = e.vars();
    let mut host = canonicalize(e);
    let mut pending = subset.to_vec();
    let mut map = SubstitutionMap::default();
    for i in 0..pending.len() {
        let c = pending[i].clone();
        let v = fresh_name(&taken, i);
        taken.push(v.clone());
        let var = Expr::Var(v.clone());
        let before = host.clone();
        match affine_in_var(&c, w) {
            Some((x, k, d)) => {
                let kinv = w.inverse(k)?;
                let repl = sum(vec![scale(var, kinv, w), Expr::Const(w.neg(w.mul(kinv, d)))], w);
                let f = |n: &str| (n == &*x).then(|| repl.clone());
                host = host.substitute_vars(&f, w);
                for p in pending[i + 1..].iter_mut() {
                    *p = canonicalize(&p.substitute_vars(&f, w));
                }
            }
            None => host = canonicalize(&replace_scaled(&host, &c, &var, w)),
        }
        if host == before || !host.contains_var(&v) {
            return None;
        }
        map.bindings.push((v, c));
    }
    let h = refine(&host, w);
    let h = factor_step(&h, ctx);
    let h = linear_step(&h, ctx);
    let back = map.back_substitute(&h, w);
    let out = polish(&refine(&back, w));
    ctx.equal(e, &out).then_some(out)
}

/// Subsets of `0..n` of size `k` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub(crate) fn substitute_with(e: &Expr, candidates: &[Expr], ctx: &Ctx) -> Expr {
    let cands = &candidates[..candidates.len().min(MAX_CANDIDATES)];
    let base = ctx.key(e);
    let mut best: Option<(MetricKey, Expr)> = None;
    let mut tried = 0;
    'all: for size in 1..=ctx.cfg.max_substitution_size.min(cands.len()) {
        for subset in combinations(cands.len(), size) {
            if tried >= ctx.cfg.max_substitution_subsets || ctx.expired() {
                break 'all;
            }
            tried += 1;
            let chosen: Vec<Expr> = subset.iter().map(|&i| cands[i].clone()).collect();
            if let Some(r) = try_subset(e, &chosen, ctx) {
                let k = ctx.key(&r);
                if k < base && best.as_ref().is_none_or(|(bk, be)| (&k, &r) < (bk, be)) {
                    best = Some((k, r));
                }
            }
        }
    }
    best.map_or_else(|| e.clone(), |(_, r)| r)
}

pub(crate) fn sweep(e: &Expr, ctx: &Ctx) -> Expr {
    let candidates = collect_substitution_candidates(e, ctx.w());
    if candidates.is_empty() {
        return e.clone();
    }
    substitute_with(e, &candidates, ctx)
}

/// Tries substituting subsets of `candidates` (smallest first) and keeps
/// the best verified result that improves the metric; `e` otherwise.
pub fn substitute_and_simplify(e: &Expr, candidates: &[Expr], cfg: &SimplifyConfig) -> Expr {
    substitute_with(e, candidates, &Ctx::new(cfg))
}
