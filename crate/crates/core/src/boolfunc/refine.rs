//! Size-reducing rewrites of bitwise expressions.
//!
//! [`simplify_bitwise_node`] applies the basic laws of logic to one node.
//! [`bitwise_refine`] additionally tries, in order, exclusive-or insertion,
//! moving negations, and factoring common operands, keeping a rewrite only
//! when it shrinks the node count. Operands that are not bitwise are treated
//! as opaque atoms, so both functions are sound on any expression.

use crate::expr::{and, not, or, sort_operands, xor, Expr, Kind, Width};

/// The complement of `e`, removing a negation when there is one.
pub fn complement(e: &Expr, w: Width) -> Expr {
    not(e.clone(), w)
}

fn is_complement(a: &Expr, b: &Expr, w: Width) -> bool {
    match (a, b) {
        (Expr::Not(x), _) if **x == *b => true,
        (_, Expr::Not(y)) if **y == *a => true,
        (Expr::Const(x), Expr::Const(y)) => w.not(*x) == *y,
        _ => false,
    }
}

fn build(kind: Kind, ops: Vec<Expr>, w: Width) -> Expr {
    match kind {
        Kind::And => and(ops, w),
        Kind::Or => or(ops, w),
        Kind::Xor => xor(ops, w),
        _ => unreachable!("not an n-ary bitwise kind"),
    }
}

fn dual(kind: Kind) -> Kind {
    match kind {
        Kind::And => Kind::Or,
        Kind::Or => Kind::And,
        k => k,
    }
}

/// Identities, duplicates, complements and absorption on a single node whose
/// operands are already simplified. The result has sorted operands.
pub fn simplify_bitwise_node(e: Expr, w: Width) -> Expr {
    let ones = w.minus_one();
    let kind = e.kind();
    let e = match e {
        Expr::Not(inner) => return not(*inner, w),
        Expr::And(ops) | Expr::Or(ops) => {
            let is_and = kind == Kind::And;
            let flat = match build(kind, ops, w) {
                Expr::And(v) | Expr::Or(v) if v.len() >= 2 => v,
                other => return sort_operands(other),
            };
            let mut ops: Vec<Expr> = Vec::with_capacity(flat.len());
            for o in flat {
                if !ops.contains(&o) {
                    ops.push(o);
                }
            }
            for i in 0..ops.len() {
                for j in i + 1..ops.len() {
                    if is_complement(&ops[i], &ops[j], w) {
                        return Expr::Const(if is_and { 0 } else { ones });
                    }
                }
            }
            // Absorption: X & (X | Y) = X and X | (X & Y) = X.
            let inner = dual(kind);
            let snapshot = ops.clone();
            ops.retain(|o| {
                o.kind() != inner
                    || !o
                        .operands()
                        .unwrap()
                        .iter()
                        .any(|x| snapshot.iter().any(|s| s == x && s != o))
            });
            build(kind, ops, w)
        }
        Expr::Xor(ops) => {
            let flat = match xor(ops, w) {
                Expr::Xor(v) => v,
                other => return sort_operands(other),
            };
            // Pairs cancel; a complementary pair contributes -1.
            let mut negate = false;
            let mut ops: Vec<Expr> = Vec::with_capacity(flat.len());
            for o in flat {
                if let Some(pos) = ops.iter().position(|x| *x == o) {
                    ops.remove(pos);
                } else if let Some(pos) = ops.iter().position(|x| is_complement(x, &o, w)) {
                    ops.remove(pos);
                    negate = !negate;
                } else {
                    ops.push(o);
                }
            }
            if let Some(pos) = ops.iter().position(|x| *x == Expr::Const(ones)) {
                ops.remove(pos);
                negate = !negate;
            }
            let body = xor(ops, w);
            if negate {
                not(sort_operands(body), w)
            } else {
                body
            }
        }
        other => other,
    };
    sort_operands(e)
}

/// Applies the basic rules bottom-up through the whole tree.
pub(crate) fn simplify_bitwise_tree(e: &Expr, w: Width) -> Expr {
    if e.is_leaf() {
        return e.clone();
    }
    let children: Vec<Expr> = e.children().into_iter().map(|c| simplify_bitwise_tree(c, w)).collect();
    let node = e.rebuild(children, w);
    if node.kind().is_bitwise_op() {
        simplify_bitwise_node(node, w)
    } else {
        node
    }
}

/// Operands of `e` seen as an n-ary node of kind `kind` (a single operand
/// when `e` has another kind).
fn as_operands(e: &Expr, kind: Kind) -> Vec<Expr> {
    if e.kind() == kind {
        e.operands().unwrap().to_vec()
    } else {
        vec![e.clone()]
    }
}

/// Removes one occurrence of each element of `sub` from `from`; `None` if
/// `sub` is not contained.
fn multiset_minus(from: &[Expr], sub: &[Expr]) -> Option<Vec<Expr>> {
    let mut rest = from.to_vec();
    for s in sub {
        let pos = rest.iter().position(|x| x == s)?;
        rest.remove(pos);
    }
    Some(rest)
}

fn common(a: &[Expr], b: &[Expr]) -> Vec<Expr> {
    let mut pool = b.to_vec();
    let mut out = Vec::new();
    for x in a {
        if let Some(pos) = pool.iter().position(|y| y == x) {
            pool.remove(pos);
            out.push(x.clone());
        }
    }
    out
}

/// `(R&p&q) | (R&~p&~q)` becomes `R&(p^~q)`; dually
/// `(R|p|q) & (R|~p|~q)` becomes `R|(p^q)`.
fn insert_xor(e: &Expr, w: Width) -> Option<Expr> {
    let (outer, inner) = match e {
        Expr::Or(_) => (Kind::Or, Kind::And),
        Expr::And(_) => (Kind::And, Kind::Or),
        _ => return None,
    };
    let ops = e.operands().unwrap();
    let base = e.node_count();
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            let a = as_operands(&ops[i], inner);
            let b = as_operands(&ops[j], inner);
            let r = common(&a, &b);
            let ra = multiset_minus(&a, &r).unwrap();
            let rb = multiset_minus(&b, &r).unwrap();
            if ra.len() != 2 || rb.len() != 2 {
                continue;
            }
            let (p, q) = (&ra[0], &ra[1]);
            let matched = (is_complement(p, &rb[0], w) && is_complement(q, &rb[1], w))
                || (is_complement(p, &rb[1], w) && is_complement(q, &rb[0], w));
            if !matched {
                continue;
            }
            let x = if outer == Kind::Or {
                let plain = xor(vec![p.clone(), complement(q, w)], w);
                let other = xor(vec![complement(p, w), q.clone()], w);
                if other.node_count() < plain.node_count() {
                    other
                } else {
                    plain
                }
            } else {
                xor(vec![p.clone(), q.clone()], w)
            };
            let x = simplify_bitwise_node(x, w);
            let mut merged = r;
            merged.push(x);
            let term = simplify_bitwise_node(build(inner, merged, w), w);
            let mut rest: Vec<Expr> = ops
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i && *k != j)
                .map(|(_, o)| o.clone())
                .collect();
            rest.push(term);
            let cand = simplify_bitwise_node(build(outer, rest, w), w);
            if cand.node_count() < base {
                return Some(cand);
            }
        }
    }
    None
}

/// Alternative forms of a node obtained by moving negations.
fn flip_negations(e: &Expr, w: Width) -> Option<Expr> {
    let base = e.node_count();
    let mut best: Option<Expr> = None;
    let mut consider = |cand: Expr| {
        let cand = simplify_bitwise_node(cand, w);
        let n = cand.node_count();
        if n < base && best.as_ref().is_none_or(|b| (n, &cand) < (b.node_count(), b)) {
            best = Some(cand);
        }
    };
    match e {
        Expr::And(ops) | Expr::Or(ops) => {
            let kind = e.kind();
            let (negs, others): (Vec<&Expr>, Vec<&Expr>) =
                ops.iter().partition(|o| matches!(o, Expr::Not(_)));
            if negs.len() >= 2 {
                let inner: Vec<Expr> = negs.iter().map(|o| complement(o, w)).collect();
                let mut v: Vec<Expr> = others.into_iter().cloned().collect();
                v.push(not(build(dual(kind), inner, w), w));
                consider(build(kind, v, w));
            }
        }
        Expr::Xor(ops) => {
            let mut parity = false;
            let stripped: Vec<Expr> = ops
                .iter()
                .map(|o| match o {
                    Expr::Not(x) => {
                        parity = !parity;
                        (**x).clone()
                    }
                    other => other.clone(),
                })
                .collect();
            let body = xor(stripped, w);
            consider(if parity { not(body, w) } else { body });
        }
        Expr::Not(inner) => match &**inner {
            Expr::And(ops) | Expr::Or(ops) => {
                let v = ops.iter().map(|o| complement(o, w)).collect();
                consider(build(dual(inner.kind()), v, w));
            }
            Expr::Xor(ops) => {
                if let Some(pos) = ops.iter().position(|o| matches!(o, Expr::Not(_))) {
                    let mut v = ops.clone();
                    v[pos] = complement(&v[pos], w);
                    consider(xor(v, w));
                }
            }
            _ => {}
        },
        _ => {}
    }
    best
}

/// `(X&Y)|(X&Z)` becomes `X&(Y|Z)`, with the duals for `&` over `|` and
/// `&` under `^`.
fn factor_common(e: &Expr, w: Width) -> Option<Expr> {
    let (outer, inner) = match e {
        Expr::Or(_) => (Kind::Or, Kind::And),
        Expr::And(_) => (Kind::And, Kind::Or),
        Expr::Xor(_) => (Kind::Xor, Kind::And),
        _ => return None,
    };
    let ops = e.operands().unwrap();
    let views: Vec<Vec<Expr>> = ops.iter().map(|o| as_operands(o, inner)).collect();
    let mut counts: Vec<(Expr, usize)> = Vec::new();
    for v in &views {
        let mut seen: Vec<&Expr> = Vec::new();
        for x in v {
            if seen.contains(&x) {
                continue;
            }
            seen.push(x);
            match counts.iter_mut().find(|(y, _)| y == x) {
                Some((_, c)) => *c += 1,
                None => counts.push((x.clone(), 1)),
            }
        }
    }
    counts.retain(|(_, c)| *c >= 2);
    counts.sort_by(|(a, ca), (b, cb)| cb.cmp(ca).then_with(|| a.cmp(b)));
    let base = e.node_count();
    let identity = |k: Kind| if k == Kind::And { w.minus_one() } else { 0 };
    for (x, _) in counts {
        let mut group = Vec::new();
        let mut rest = Vec::new();
        for (o, v) in ops.iter().zip(&views) {
            match multiset_minus(v, std::slice::from_ref(&x)) {
                Some(r) => group.push(if r.is_empty() {
                    Expr::Const(identity(inner))
                } else {
                    simplify_bitwise_node(build(inner, r, w), w)
                }),
                None => rest.push(o.clone()),
            }
        }
        let combined = simplify_bitwise_node(build(outer, group, w), w);
        let term = simplify_bitwise_node(build(inner, vec![x.clone(), combined], w), w);
        rest.push(term);
        let cand = simplify_bitwise_node(build(outer, rest, w), w);
        if cand.node_count() < base {
            return Some(cand);
        }
    }
    None
}

type Rule = fn(&Expr, Width) -> Option<Expr>;

fn pass(e: &Expr, w: Width, rule: Rule) -> Expr {
    if e.is_leaf() {
        return e.clone();
    }
    let children: Vec<Expr> = e.children().into_iter().map(|c| pass(c, w, rule)).collect();
    let mut node = e.rebuild(children, w);
    if node.kind().is_bitwise_op() {
        node = simplify_bitwise_node(node, w);
        while let Some(next) = rule(&node, w) {
            node = next;
        }
    }
    node
}

/// Rewrites `e` to a fixpoint of the bitwise refinement rules. The result is
/// equivalent to `e` and never has more nodes.
pub fn bitwise_refine(e: &Expr, w: Width) -> Expr {
    let rules: [Rule; 3] = [insert_xor, flip_negations, factor_common];
    let mut cur = simplify_bitwise_tree(e, w);
    let limit = cur.node_count() + 1;
    for _ in 0..limit {
        let mut next = cur.clone();
        for rule in rules {
            next = pass(&next, w, rule);
        }
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}
