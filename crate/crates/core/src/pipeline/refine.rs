//! Local rewrite rules, applied bottom-up until nothing changes.

use crate::boolfunc::simplify_bitwise_node;
use crate::expr::{
    and, canonicalize, classify, join_coefficient, neg, not, or, power, product, scale, split_coefficient, sum, xor,
    Classification, Expr, Kind, Width,
};

const MAX_PASSES: usize = 32;

/// Where a node sits: the preferred form of a negation depends on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Context {
    Top,
    Arithmetic,
    Bitwise,
}

/// Applies the rewrite catalog until a fixpoint (or a pass limit) is reached.
pub fn refine(e: &Expr, w: Width) -> Expr {
    let mut cur = e.clone();
    for _ in 0..MAX_PASSES {
        let next = pass(&cur, w, Context::Top);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

fn pass(e: &Expr, w: Width, ctx: Context) -> Expr {
    if e.is_leaf() {
        return e.clone();
    }
    let inner = if e.kind().is_bitwise_op() { Context::Bitwise } else { Context::Arithmetic };
    let children = e.children().into_iter().map(|c| pass(c, w, inner)).collect();
    rewrite(e.rebuild(children, w), w, ctx)
}

fn rewrite(e: Expr, w: Width, ctx: Context) -> Expr {
    match e.kind() {
        Kind::Not => rewrite_not(e, w, ctx),
        Kind::And | Kind::Or | Kind::Xor => {
            let e = simplify_bitwise_node(e, w);
            if !matches!(e.kind(), Kind::And | Kind::Or | Kind::Xor) {
                return e;
            }
            factor_powers_of_two(&e, w).unwrap_or(e)
        }
        Kind::Sum => rewrite_sum(e, w, ctx),
        Kind::Product => merge_powers(e, w),
        Kind::Power => rewrite_power(e, w),
        _ => e,
    }
}

fn is_arithmetic(e: &Expr) -> bool {
    e.kind().is_arithmetic_op()
}

/// `-e-1`.
fn arithmetic_not(e: &Expr, w: Width) -> Expr {
    sum(vec![neg(e.clone(), w), Expr::Const(w.minus_one())], w)
}

/// The complement of `e` in whichever of `~e` and `-e-1` is smaller.
fn negate(e: &Expr, w: Width) -> Expr {
    let plain = not(e.clone(), w);
    if is_arithmetic(e) {
        let alt = arithmetic_not(e, w);
        if alt.node_count() < plain.node_count() {
            return alt;
        }
    }
    plain
}

fn rewrite_not(e: Expr, w: Width, ctx: Context) -> Expr {
    let Expr::Not(x) = &e else { return e };
    match x.kind() {
        Kind::Sum | Kind::Product | Kind::Power => {
            let alt = arithmetic_not(x, w);
            if ctx == Context::Arithmetic || alt.node_count() < e.node_count() {
                alt
            } else {
                e
            }
        }
        Kind::And | Kind::Or => {
            let ops: Vec<Expr> = x.operands().unwrap().iter().map(|o| negate(o, w)).collect();
            let alt = if x.kind() == Kind::And { or(ops, w) } else { and(ops, w) };
            if alt.node_count() < e.node_count() {
                alt
            } else {
                e
            }
        }
        Kind::Xor => {
            let ops = x.operands().unwrap();
            match ops.iter().position(|o| matches!(o, Expr::Not(_))) {
                Some(i) => {
                    let mut ops = ops.to_vec();
                    ops[i] = not(ops[i].clone(), w);
                    xor(ops, w)
                }
                None => e,
            }
        }
        _ => e,
    }
}

fn build(kind: Kind, ops: Vec<Expr>, w: Width) -> Expr {
    match kind {
        Kind::And => and(ops, w),
        Kind::Or => or(ops, w),
        Kind::Xor => xor(ops, w),
        Kind::Sum => sum(ops, w),
        Kind::Product => product(ops, w),
        _ => unreachable!("not an n-ary kind"),
    }
}

/// Power of two dividing the constant factor of a product.
fn even_factor(e: &Expr) -> Option<u32> {
    match e {
        Expr::Product(fs) => match fs.first() {
            Some(Expr::Const(c)) if *c != 0 && c.trailing_zeros() > 0 => Some(c.trailing_zeros()),
            _ => None,
        },
        _ => None,
    }
}

fn shift_down(e: &Expr, m: u32, w: Width) -> Expr {
    let Expr::Product(fs) = e else { unreachable!() };
    let mut fs = fs.clone();
    fs[0] = Expr::Const(fs[0].as_const().unwrap() >> m);
    product(fs, w)
}

/// Moves a common power of two out of a bitwise operation:
/// `op(2^m*A_i + r_i) = 2^m*op(A_i) + op(r_i)` for `r_i < 2^m`. Covers
/// `~(2X)&2Y = 2(~X&Y)`, `~(2X)|2Y = 2(~X|Y)+1` and `(2a+1)^2X = 2(a^X)+1`.
fn factor_powers_of_two(e: &Expr, w: Width) -> Option<Expr> {
    let kind = e.kind();
    let ops = e.operands()?;
    let mut m = u32::MAX;
    for o in ops {
        let v = match o {
            Expr::Const(_) => continue,
            Expr::Not(inner) => even_factor(inner)?,
            other => even_factor(other)?,
        };
        m = m.min(v);
    }
    if m == u32::MAX {
        return None;
    }
    let low = (1u64 << m) - 1;
    let mut highs = Vec::with_capacity(ops.len());
    let mut lows = Vec::with_capacity(ops.len());
    for o in ops {
        match o {
            Expr::Const(c) => {
                highs.push(Expr::Const(c >> m));
                lows.push(c & low);
            }
            Expr::Not(inner) => {
                highs.push(not(shift_down(inner, m, w), w));
                lows.push(low);
            }
            other => {
                highs.push(shift_down(other, m, w));
                lows.push(0);
            }
        }
    }
    let r = match kind {
        Kind::And => lows.iter().fold(low, |a, b| a & b),
        Kind::Or => lows.iter().fold(0, |a, b| a | b),
        _ => lows.iter().fold(0, |a, b| a ^ b),
    };
    Some(sum(vec![scale(build(kind, highs, w), 1 << m, w), Expr::Const(r)], w))
}

/// `x*x*x**2` becomes `x**4`. Exponents are merged only when they are
/// constants whose sum does not wrap around.
fn merge_powers(e: Expr, w: Width) -> Expr {
    let Expr::Product(fs) = &e else { return e };
    let mut groups: Vec<(Expr, u64)> = Vec::new();
    let mut others = Vec::new();
    let mut merged = false;
    for f in fs {
        let (base, exp) = match f {
            Expr::Const(_) => {
                others.push(f.clone());
                continue;
            }
            Expr::Power(b, x) => match x.as_const() {
                Some(k) => ((**b).clone(), k),
                None => {
                    others.push(f.clone());
                    continue;
                }
            },
            _ => (f.clone(), 1),
        };
        match groups.iter_mut().find(|g| g.0 == base) {
            Some(g) if g.1.checked_add(exp).is_some_and(|s| s <= w.mask()) => {
                g.1 += exp;
                merged = true;
            }
            _ => groups.push((base, exp)),
        }
    }
    if !merged {
        return e;
    }
    others.extend(groups.into_iter().map(|(b, k)| power(b, Expr::Const(k), w)));
    product(others, w)
}

fn rewrite_power(e: Expr, w: Width) -> Expr {
    if let Expr::Power(b, x) = &e {
        if let (Expr::Power(bb, inner), Some(k2)) = (&**b, x.as_const()) {
            if let Some(k1) = inner.as_const() {
                if let Some(k) = k1.checked_mul(k2).filter(|k| *k <= w.mask()) {
                    return power((**bb).clone(), Expr::Const(k), w);
                }
            }
        }
    }
    e
}

fn rewrite_sum(e: Expr, w: Width, ctx: Context) -> Expr {
    let Expr::Sum(terms) = e else { return e };
    let terms = collect_like_terms(terms, w);
    let terms = expand_negations(terms, w);
    let terms = flatten_disjoint_or(terms, w);
    let terms = merge_pairs(terms, w);
    let s = sum(terms, w);
    if ctx == Context::Bitwise {
        if let Some(n) = as_negation(&s, w) {
            return n;
        }
    }
    s
}

/// Adds up the coefficients of terms that differ only in their constant
/// factor. The constant goes last.
pub(crate) fn collect_like_terms(terms: Vec<Expr>, w: Width) -> Vec<Expr> {
    let mut constant = 0u64;
    let mut groups: Vec<(Expr, u64)> = Vec::new();
    for t in terms {
        match split_coefficient(&t) {
            (c, None) => constant = w.add(constant, c),
            (c, Some(r)) => {
                let r = canonicalize(&r);
                match groups.iter_mut().find(|g| g.0 == r) {
                    Some(g) => g.1 = w.add(g.1, c),
                    None => groups.push((r, c)),
                }
            }
        }
    }
    let mut out: Vec<Expr> =
        groups.into_iter().filter(|g| g.1 != 0).map(|(r, c)| join_coefficient(c, Some(r), w)).collect();
    if constant != 0 {
        out.push(Expr::Const(constant));
    }
    out
}

/// Writes the negated terms `k*~X` of a sum as `-k*X-k` when the sum gets
/// smaller that way.
fn expand_negations(terms: Vec<Expr>, w: Width) -> Vec<Expr> {
    let has_not = |t: &Expr| matches!(split_coefficient(t).1, Some(Expr::Not(_)));
    if !terms.iter().any(has_not) {
        return terms;
    }
    let alt: Vec<Expr> = terms
        .iter()
        .map(|t| match split_coefficient(t) {
            (k, Some(Expr::Not(x))) => scale(arithmetic_not(&x, w), k, w),
            _ => t.clone(),
        })
        .collect();
    let alt = collect_like_terms(alt, w);
    if sum(alt.clone(), w).node_count() < sum(terms.clone(), w).node_count() {
        alt
    } else {
        terms
    }
}

/// `R-1` in a bitwise context is `~(-R)` when that is smaller.
fn as_negation(s: &Expr, w: Width) -> Option<Expr> {
    let Expr::Sum(ts) = s else { return None };
    let i = ts.iter().position(|t| *t == Expr::Const(w.minus_one()))?;
    let mut rest = ts.clone();
    rest.remove(i);
    let alt = not(neg(sum(rest, w), w), w);
    (alt.node_count() < s.node_count()).then_some(alt)
}

/// `(X&Y)|(X^Y)` and `X|(X^Y)` inside a sum become `(X&Y)+(X^Y)` when `X`
/// or `Y` is not bitwise, so that the parts can be simplified separately.
fn flatten_disjoint_or(terms: Vec<Expr>, w: Width) -> Vec<Expr> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let (k, rest) = split_coefficient(&t);
        let split = rest.as_ref().and_then(|r| match r {
            Expr::Or(ops) if ops.len() == 2 => {
                (0..2).find_map(|i| split_or(&ops[i], &ops[1 - i], w))
            }
            _ => None,
        });
        match split {
            Some((a, x)) => {
                out.push(scale(a, k, w));
                out.push(scale(x, k, w));
            }
            None => out.push(t),
        }
    }
    out
}

fn split_or(u: &Expr, v: &Expr, w: Width) -> Option<(Expr, Expr)> {
    let Expr::Xor(xs) = v else { return None };
    if xs.len() != 2 {
        return None;
    }
    if xs.iter().all(|x| classify(x, w) == Classification::Bitwise) {
        return None;
    }
    let conj = canonicalize(&and(xs.clone(), w));
    let u = canonicalize(u);
    let matches = u == conj || xs.iter().any(|x| canonicalize(x) == u);
    matches.then(|| (conj, v.clone()))
}

/// Size of a list of sum terms, then the number of constants under bitwise
/// operations; smaller is better.
fn score(terms: &[Expr]) -> (usize, usize) {
    fn bitwise_constants(e: &Expr) -> usize {
        let own = match e {
            Expr::And(ops) | Expr::Or(ops) | Expr::Xor(ops) => {
                ops.iter().filter(|o| matches!(o, Expr::Const(_))).count()
            }
            _ => 0,
        };
        own + e.children().into_iter().map(bitwise_constants).sum::<usize>()
    }
    let mut flat = Vec::new();
    for t in terms {
        match t {
            Expr::Sum(ts) => flat.extend(ts.iter()),
            _ => flat.push(t),
        }
    }
    (flat.iter().map(|t| t.node_count()).sum(), flat.iter().map(|t| bitwise_constants(t)).sum())
}

/// Repeatedly replaces a pair of terms by the right-hand side of one of the
/// constant or inverse-element identities, while that shrinks the sum.
fn merge_pairs(mut terms: Vec<Expr>, w: Width) -> Vec<Expr> {
    let mut budget = 4 * terms.len();
    'outer: while budget > 0 {
        budget -= 1;
        for i in 0..terms.len() {
            for j in i + 1..terms.len() {
                let repl = merge_pair(&terms[i], &terms[j], w).or_else(|| merge_pair(&terms[j], &terms[i], w));
                if let Some(repl) = repl {
                    if score(&repl) < score(&[terms[i].clone(), terms[j].clone()]) {
                        terms.remove(j);
                        terms.remove(i);
                        terms.extend(repl);
                        continue 'outer;
                    }
                }
            }
        }
        break;
    }
    terms
}

/// Splits a bitwise node into its single constant operand and the rest.
fn split_constant_operand(e: &Expr, w: Width) -> Option<(u64, Expr)> {
    let ops = e.operands()?;
    let consts: Vec<usize> = (0..ops.len()).filter(|&i| matches!(ops[i], Expr::Const(_))).collect();
    if consts.len() != 1 || ops.len() < 2 {
        return None;
    }
    let c = ops[consts[0]].as_const().unwrap();
    let rest: Vec<Expr> = ops.iter().enumerate().filter(|(i, _)| *i != consts[0]).map(|(_, o)| o.clone()).collect();
    Some((c, canonicalize(&build(e.kind(), rest, w))))
}

fn is_complement(a: &Expr, b: &Expr, w: Width) -> bool {
    canonicalize(&not(a.clone(), w)) == canonicalize(b)
}

/// Ratios `m` with `k2 = m*k1` for which identities exist.
fn ratios(k1: u64, k2: u64, w: Width) -> impl Iterator<Item = i64> {
    [1i64, -1, -2, 2].into_iter().filter(move |&m| w.mul(w.from_i64(m), k1) == k2)
}

/// The identity for `k1*t1 + k2*t2`, scaled by `k1`, if one applies.
fn merge_pair(t1: &Expr, t2: &Expr, w: Width) -> Option<Vec<Expr>> {
    let (k1, r1) = split_coefficient(t1);
    let (k2, r2) = split_coefficient(t2);
    let (r1, r2) = (r1?, r2?);
    let bitwise = |k: Kind| matches!(k, Kind::And | Kind::Or | Kind::Xor);
    let (op1, op2) = (r1.kind(), r2.kind());
    if !bitwise(op1) || !bitwise(op2) {
        return None;
    }
    let scaled = |v: Vec<Expr>| v.into_iter().map(|t| scale(t, k1, w)).collect::<Vec<_>>();
    if let (Some((a, x1)), Some((b, x2))) = (split_constant_operand(&r1, w), split_constant_operand(&r2, w)) {
        if x1 == x2 && a & b == 0 {
            for m in ratios(k1, k2, w) {
                if let Some(v) = constant_rule(op1, op2, m, a, b, &x1, w) {
                    return Some(scaled(v));
                }
            }
        }
    }
    let (ops1, ops2) = (r1.operands()?, r2.operands()?);
    for p in 0..ops1.len() {
        for q in 0..ops2.len() {
            if !is_complement(&ops1[p], &ops2[q], w) {
                continue;
            }
            let rest = |ops: &[Expr], skip: usize| {
                let mut v: Vec<Expr> =
                    ops.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, o)| canonicalize(o)).collect();
                v.sort();
                v
            };
            let (rest1, rest2) = (rest(ops1, p), rest(ops2, q));
            if rest1 != rest2 || rest1.is_empty() || (op1 != op2 && rest1.len() != 1) {
                continue;
            }
            let y = build(op1, rest1, w);
            for m in ratios(k1, k2, w) {
                if let Some(v) = inverse_rule(op1, op2, m, &ops1[p], &y, w) {
                    return Some(scaled(v));
                }
            }
        }
    }
    None
}

/// `t1 = op1(X, Y)`, `t2 = m * op2(~X, Y)`; the terms of `t1 + t2`.
fn inverse_rule(op1: Kind, op2: Kind, m: i64, x: &Expr, y: &Expr, w: Width) -> Option<Vec<Expr>> {
    let minus_one = Expr::Const(w.minus_one());
    use Kind::*;
    Some(match (op1, op2, m) {
        (And, And, 1) => vec![y.clone()],
        (Or, Or, 1) => vec![y.clone(), minus_one],
        (Xor, Xor, 1) => vec![minus_one],
        (Or, And, -1) => vec![x.clone()],
        (Xor, And, -2) => vec![x.clone(), neg(y.clone(), w)],
        (Xor, Or, 2) => vec![not(x.clone(), w), y.clone(), minus_one],
        _ => return None,
    })
}

/// `t1 = op1(a, X)`, `t2 = m * op2(b, X)` with `a&b = 0`; the terms of
/// `t1 + t2`.
fn constant_rule(op1: Kind, op2: Kind, m: i64, a: u64, b: u64, x: &Expr, w: Width) -> Option<Vec<Expr>> {
    let s = a | b;
    let masked = || scale(and(vec![Expr::Const(w.not(s)), x.clone()], w), 2, w);
    use Kind::*;
    Some(match (op1, op2, m) {
        (And, And, 1) => vec![and(vec![Expr::Const(s), x.clone()], w)],
        (Or, Or, 1) => vec![or(vec![Expr::Const(s), x.clone()], w), x.clone()],
        (Xor, Xor, 1) => vec![masked(), Expr::Const(s)],
        (Or, And, -1) => vec![and(vec![Expr::Const(w.not(s)), x.clone()], w), Expr::Const(a)],
        (Xor, And, -2) => vec![masked(), neg(x.clone(), w), Expr::Const(a)],
        (Xor, Or, 2) => vec![masked(), x.clone(), Expr::Const(w.add(a, w.mul(2, b)))],
        _ => return None,
    })
}
