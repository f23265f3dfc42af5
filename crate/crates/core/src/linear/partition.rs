//! Splitting a combination into parts over disjoint variable sets.

use super::basis::{conjunction_basis, conjunction_coefficients, subset_sums};
use super::{result_vector, solve_connected, Best, LinearCombination, LinearConfig, ResultVector};
use crate::expr::{canonicalize, sum, Expr, Name};

/// Variable masks of the connected components of the basis terms, where two
/// variables are connected when they occur in a common conjunction.
fn components(coefs: &[u64], t: usize) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..t).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let mut used = 0usize;
    for (mask, &c) in coefs.iter().enumerate().skip(1) {
        if c == 0 {
            continue;
        }
        used |= mask;
        let first = mask.trailing_zeros() as usize;
        for j in first + 1..t {
            if mask >> j & 1 == 1 {
                let (a, b) = (find(&mut parent, first), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut out: Vec<usize> = Vec::new();
    for j in 0..t {
        if used >> j & 1 == 0 {
            continue;
        }
        let r = find(&mut parent, j);
        let member: usize = (0..t).filter(|&k| used >> k & 1 == 1 && find(&mut parent, k) == r).fold(0, |m, k| m | 1 << k);
        if !out.contains(&member) {
            out.push(member);
        }
    }
    out
}

/// The part of `f` on the variables in `mask`, plus `constant`.
fn part_vector(f: &ResultVector, coefs: &[u64], mask: usize, constant: u64) -> ResultVector {
    let positions: Vec<usize> = (0..f.t()).filter(|j| mask >> j & 1 == 1).collect();
    let vars: Vec<Name> = positions.iter().map(|&j| f.vars[j].clone()).collect();
    let sub: Vec<u64> = (0..1usize << positions.len())
        .map(|s| {
            if s == 0 {
                return constant;
            }
            let full = positions.iter().enumerate().fold(0usize, |m, (k, &j)| m | (s >> k & 1) << j);
            coefs[full]
        })
        .collect();
    ResultVector { vars, values: subset_sums(&sub, f.width), width: f.width }
}

/// Simplifies each independent part separately, attaching the constant
/// wherever it helps most. `None` when `f` does not split.
pub(crate) fn simplify_split(f: &ResultVector, cfg: &LinearConfig) -> Option<Expr> {
    let w = f.width;
    let coefs = conjunction_coefficients(&f.values, w);
    let parts = components(&coefs, f.t());
    if parts.len() < 2 {
        return None;
    }
    let constant = coefs[0];
    let plain: Vec<Expr> = parts.iter().map(|&m| solve_connected(&part_vector(f, &coefs, m, 0), cfg)).collect();
    let mut best = Best::new(cfg);
    let mut separate = plain.clone();
    separate.push(Expr::Const(constant));
    best.offer(canonicalize(&sum(separate, w)));
    if constant != 0 {
        for (i, &m) in parts.iter().enumerate() {
            let mut terms = plain.clone();
            terms[i] = solve_connected(&part_vector(f, &coefs, m, constant), cfg);
            best.offer(canonicalize(&sum(terms, w)));
        }
    }
    Some(best.finish())
}

/// Splits a conjunction-basis combination into parts over pairwise disjoint
/// variable sets. A constant joins the part where it gives the best result
/// after simplification, or forms its own part if that is best.
pub fn partition_by_variables(lc: &LinearCombination, cfg: &LinearConfig) -> Vec<LinearCombination> {
    let w = cfg.width;
    let vars = lc.vars();
    let f = result_vector(&lc.to_expr(w), &vars, w).expect("variables are bound");
    let coefs = conjunction_coefficients(&f.values, w);
    let parts = components(&coefs, f.t());
    let constant = coefs[0];
    let mut out: Vec<LinearCombination> =
        parts.iter().map(|&m| conjunction_basis(&part_vector(&f, &coefs, m, 0))).collect();
    if constant == 0 {
        return out;
    }
    let simplified: Vec<Expr> =
        parts.iter().map(|&m| solve_connected(&part_vector(&f, &coefs, m, 0), cfg)).collect();
    let mut options: Vec<(Vec<usize>, Expr, Option<usize>)> = Vec::new();
    let key = |e: &Expr| cfg.metric.key(e, w);
    let mut separate = simplified.clone();
    separate.push(Expr::Const(constant));
    let e = canonicalize(&sum(separate, w));
    options.push((key(&e), e, None));
    for (i, &m) in parts.iter().enumerate() {
        let mut terms = simplified.clone();
        terms[i] = solve_connected(&part_vector(&f, &coefs, m, constant), cfg);
        let e = canonicalize(&sum(terms, w));
        options.push((key(&e), e, Some(i)));
    }
    let (_, _, choice) = options.into_iter().min_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1))).unwrap();
    let constant_term = (w.neg(constant), Expr::Const(w.minus_one()));
    match choice {
        Some(i) => out[i].terms.push(constant_term),
        None => out.push(LinearCombination { terms: vec![constant_term] }),
    }
    out
}
