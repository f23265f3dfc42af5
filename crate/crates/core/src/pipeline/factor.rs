//! Expansion of products and extraction of common factors from sums.

use super::refine::collect_like_terms;
use crate::expr::{canonicalize, product, split_coefficient, sum, Expr, Width};

/// Largest constant exponent expanded into repeated factors.
const MAX_REPEAT: u64 = 8;

fn repeat_power(e: &Expr) -> Option<(&Expr, u64)> {
    match e {
        Expr::Power(b, x) => match x.as_const() {
            Some(k) if (2..=MAX_REPEAT).contains(&k) => Some((b, k)),
            _ => None,
        },
        _ => None,
    }
}

/// Monomials of `e`, or `None` when there would be more than `budget`.
fn monomials(e: &Expr, budget: usize, w: Width) -> Option<Vec<Expr>> {
    match e {
        Expr::Sum(ts) => {
            let mut out = Vec::new();
            for t in ts {
                out.extend(monomials(t, budget, w)?);
                if out.len() > budget {
                    return None;
                }
            }
            Some(out)
        }
        Expr::Product(fs) => {
            let mut acc = vec![Expr::Const(1)];
            for f in fs {
                let parts = monomials(f, budget, w)?;
                if acc.len() * parts.len() > budget {
                    return None;
                }
                acc = acc
                    .iter()
                    .flat_map(|a| parts.iter().map(move |p| product(vec![a.clone(), p.clone()], w)))
                    .collect();
            }
            Some(acc)
        }
        _ => match repeat_power(e) {
            Some((b, k)) if matches!(b, Expr::Sum(_)) => {
                monomials(&Expr::Product(vec![b.clone(); k as usize]), budget, w)
            }
            _ => Some(vec![e.clone()]),
        },
    }
}

fn has_expandable(e: &Expr) -> bool {
    match e {
        Expr::Sum(ts) => ts.iter().any(has_expandable),
        Expr::Product(fs) => fs.iter().any(|f| matches!(f, Expr::Sum(_)) || has_expandable(f)),
        _ => repeat_power(e).is_some_and(|(b, _)| matches!(b, Expr::Sum(_))),
    }
}

/// Multiplies out products of sums (and small powers of sums) outside of
/// bitwise operations, collecting like terms. `None` when there is nothing
/// to expand or the result would have more than `budget` terms.
pub fn expand(e: &Expr, budget: usize, w: Width) -> Option<Expr> {
    if !has_expandable(e) {
        return None;
    }
    let terms = monomials(e, budget, w)?;
    Some(sum(collect_like_terms(terms, w), w))
}

/// A term as its coefficient and list of factors, with small constant
/// powers spelled out.
fn factors_of(term: &Expr) -> (u64, Vec<Expr>) {
    let (c, rest) = split_coefficient(term);
    let mut out = Vec::new();
    let push = |f: &Expr, out: &mut Vec<Expr>| match repeat_power(f) {
        Some((b, k)) => out.extend(std::iter::repeat_n(canonicalize(b), k as usize)),
        None => out.push(canonicalize(f)),
    };
    match rest {
        None => {}
        Some(Expr::Product(fs)) => fs.iter().for_each(|f| push(f, &mut out)),
        Some(f) => push(&f, &mut out),
    }
    (c, out)
}

fn to_term(c: u64, fs: Vec<Expr>, w: Width) -> Expr {
    let mut v = vec![Expr::Const(c)];
    v.extend(fs);
    product(v, w)
}

fn factor_terms(terms: Vec<(u64, Vec<Expr>)>, w: Width) -> Expr {
    let mut counts: Vec<(Expr, usize)> = Vec::new();
    for (_, fs) in &terms {
        let mut seen: Vec<&Expr> = Vec::new();
        for f in fs {
            if seen.contains(&f) {
                continue;
            }
            seen.push(f);
            match counts.iter_mut().find(|c| c.0 == *f) {
                Some(c) => c.1 += 1,
                None => counts.push((f.clone(), 1)),
            }
        }
    }
    let best = counts.into_iter().filter(|c| c.1 >= 2).min_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let Some((f, _)) = best else {
        return sum(terms.into_iter().map(|(c, fs)| to_term(c, fs, w)).collect(), w);
    };
    let (mut with, mut without) = (Vec::new(), Vec::new());
    for (c, mut fs) in terms {
        match fs.iter().position(|g| *g == f) {
            Some(i) => {
                fs.remove(i);
                with.push((c, fs));
            }
            None => without.push((c, fs)),
        }
    }
    let inner = factor_terms(with, w);
    let outer = product(vec![f, inner], w);
    let rest = if without.is_empty() { Expr::Const(0) } else { factor_terms(without, w) };
    merge_cofactors(sum(vec![outer, rest], w), w)
}

/// `a*S + b*S` becomes `(a+b)*S` for a sum `S`, repeatedly.
fn merge_cofactors(e: Expr, w: Width) -> Expr {
    let Expr::Sum(mut terms) = e else { return e };
    loop {
        let split: Vec<(u64, Vec<Expr>)> = terms.iter().map(factors_of).collect();
        let mut counts: Vec<(Expr, usize)> = Vec::new();
        for (_, fs) in &split {
            for f in fs.iter().filter(|f| matches!(f, Expr::Sum(_))) {
                match counts.iter_mut().find(|c| c.0 == *f) {
                    Some(c) => c.1 += 1,
                    None => counts.push((f.clone(), 1)),
                }
            }
        }
        let Some((s, _)) =
            counts.into_iter().filter(|c| c.1 >= 2).min_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)))
        else {
            return sum(terms, w);
        };
        let before = terms.clone();
        let mut multipliers = Vec::new();
        let mut rest = Vec::new();
        for (t, (c, mut fs)) in terms.into_iter().zip(split) {
            match fs.iter().position(|g| *g == s) {
                Some(i) => {
                    fs.remove(i);
                    multipliers.push(to_term(c, fs, w));
                }
                None => rest.push(t),
            }
        }
        rest.push(product(vec![sum(multipliers, w), s], w));
        // a constant multiplier distributes back over `s`; stop unless the
        // merge shortened the sum
        match sum(rest, w) {
            Expr::Sum(ts) if ts.len() < before.len() => terms = ts,
            Expr::Sum(_) => return sum(before, w),
            other => return other,
        }
    }
}

/// Pulls the factors shared by most terms out of every sum, bottom-up,
/// merging groups whose cofactors coincide. Sums whose terms are all
/// products of sums are expanded first when that stays within `budget`
/// terms.
pub fn factorize(e: &Expr, budget: usize, w: Width) -> Expr {
    if e.is_leaf() {
        return e.clone();
    }
    let children = e.children().into_iter().map(|c| factorize(c, budget, w)).collect();
    let node = e.rebuild(children, w);
    match &node {
        Expr::Sum(_) => {
            let base = expand(&node, budget, w).unwrap_or_else(|| node.clone());
            factor_sum(&base, w)
        }
        _ => node,
    }
}

/// Factors one sum without descending into its terms.
pub(crate) fn factor_sum(e: &Expr, w: Width) -> Expr {
    match e {
        Expr::Sum(ts) => factor_terms(ts.iter().map(factors_of).collect(), w),
        _ => e.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::verify::exhaustive_equivalence;

    #[test]
    fn six_terms() {
        let w = Width::W64;
        let e = parse("-x*~(x|z)-y*~(x|z)-x*(x&~z)-y*(x&~z)-x*z-y*z", w).unwrap();
        let f = factorize(&e, 512, w);
        let expect = parse("(x+y)*(-(~(x|z))-(x&~z)-z)", w).unwrap();
        assert_eq!(canonicalize(&f), canonicalize(&expect));
        let e = parse("x+y", w).unwrap();
        assert_eq!(factorize(&e, 512, w), e);
    }

    #[test]
    fn expansion() {
        let w = Width::W64;
        let e = parse("(x+y)*(x-y)", w).unwrap();
        let x = expand(&e, 512, w).unwrap();
        assert_eq!(canonicalize(&x), canonicalize(&parse("x*x-y*y", w).unwrap()));
        let e = parse("(x+y+z)**2*(a+b)", w).unwrap();
        assert!(expand(&e, 4, w).is_none());
        let w4 = Width::new(4).unwrap();
        let x = expand(&e, 512, w).unwrap();
        assert!(exhaustive_equivalence(&e.at_width(w4), &x.at_width(w4), w4).is_none());
        let back = factorize(&x, 512, w);
        assert!(exhaustive_equivalence(&e.at_width(w4), &back.at_width(w4), w4).is_none());
    }
}
