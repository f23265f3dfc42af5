//! Decompositions of a result vector into few truth-value vectors.
//!
//! A bitwise expression `B` evaluated on 0/1 inputs takes the value `T[i]`
//! when `B(0,…,0) = 0`, and `T[i] - 2` otherwise (all higher bits are set).
//! Everything below works on such (coefficient, truth table) pairs; the
//! caller turns truth tables into expressions.

use crate::boolfunc::TruthTable;
use crate::expr::Width;

use super::modsolve;

/// One term `coef · B` where `B` has truth table `truth`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Term {
    pub coef: u64,
    pub truth: TruthTable,
}

impl Term {
    /// Constant `c`, carried as `-c` times the all-ones expression.
    pub fn constant(c: u64, t: usize, w: Width) -> Term {
        Term { coef: w.neg(c), truth: TruthTable::from_fn(t, |_| true) }
    }

    pub fn value(&self, i: usize, w: Width) -> u64 {
        w.mul(self.coef, unit_value(self.truth.get(0), self.truth.get(i), w))
    }
}

fn unit_value(negated: bool, bit: bool, w: Width) -> u64 {
    match (negated, bit) {
        (false, b) => u64::from(b),
        (true, true) => w.minus_one(),
        (true, false) => w.from_i64(-2),
    }
}

pub(crate) fn values_of(terms: &[Term], len: usize, w: Width) -> Vec<u64> {
    (0..len).map(|i| terms.iter().fold(0, |acc, term| w.add(acc, term.value(i, w)))).collect()
}

/// Distinct values in order of first occurrence.
fn distinct(values: &[u64]) -> Vec<u64> {
    let mut out = Vec::new();
    for &v in values {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// All ways to write `f` as `Σ c_j · B_j` with the given coefficients and
/// negation flags (`B_j(0) = negated_j`), as truth tables of the `B_j`.
/// Stops after `budget` solutions. Solutions with a constant `B_j` or two
/// equal tables are skipped since a shorter combination exists.
pub(crate) fn enumerate(f: &[u64], kinds: &[(u64, bool)], w: Width, budget: usize) -> Vec<Vec<TruthTable>> {
    let k = kinds.len();
    let n = f.len();
    let t = n.trailing_zeros() as usize;
    let pattern_value = |p: usize| {
        kinds.iter().enumerate().fold(0u64, |acc, (j, &(c, neg))| {
            w.add(acc, w.mul(c, unit_value(neg, p >> j & 1 == 1, w)))
        })
    };
    let values: Vec<u64> = (0..1usize << k).map(pattern_value).collect();
    let zero_pattern = kinds.iter().enumerate().fold(0, |acc, (j, &(_, neg))| acc | usize::from(neg) << j);
    let mut choices: Vec<Vec<usize>> = Vec::with_capacity(n);
    for (i, &fi) in f.iter().enumerate() {
        let opts: Vec<usize> = if i == 0 {
            if values[zero_pattern] == fi { vec![zero_pattern] } else { vec![] }
        } else {
            (0..values.len()).filter(|&p| values[p] == fi).collect()
        };
        if opts.is_empty() {
            return Vec::new();
        }
        choices.push(opts);
    }
    let mut out = Vec::new();
    let mut digits = vec![0usize; n];
    loop {
        let tables: Vec<TruthTable> =
            (0..k).map(|j| TruthTable::from_fn(t, |i| choices[i][digits[i]] >> j & 1 == 1)).collect();
        let degenerate = tables.iter().any(|tt| tt.is_const().is_some())
            || (0..k).any(|a| (a + 1..k).any(|b| tables[a] == tables[b]));
        if !degenerate {
            out.push(tables);
            if out.len() >= budget {
                break;
            }
        }
        // advance the mixed-radix counter
        let mut pos = 0;
        loop {
            if pos == n {
                return out;
            }
            digits[pos] += 1;
            if digits[pos] < choices[pos].len() {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
    out
}

fn with_coefs(kinds: &[(u64, bool)], tables: Vec<TruthTable>) -> Vec<Term> {
    kinds.iter().zip(tables).map(|(&(coef, _), truth)| Term { coef, truth }).collect()
}

/// Combinations of at most `max_terms` unnegated terms plus the constant
/// `f[0]`, with coefficients drawn from differences of the values of `f`.
pub(crate) fn unnegated(f: &[u64], w: Width, max_terms: usize, budget: usize) -> Vec<Vec<Term>> {
    let t = f.len().trailing_zeros() as usize;
    let a = f[0];
    let g: Vec<u64> = f.iter().map(|&v| w.sub(v, a)).collect();
    let base: Vec<Term> = if a == 0 { Vec::new() } else { vec![Term::constant(a, t, w)] };
    let vals: Vec<u64> = distinct(&g).into_iter().filter(|&v| v != 0).collect();
    let mut out = Vec::new();
    if vals.is_empty() {
        out.push(base);
        return out;
    }
    if vals.len() == 1 && max_terms >= 1 {
        let truth = TruthTable::from_fn(t, |i| g[i] == vals[0]);
        let mut terms = base.clone();
        terms.push(Term { coef: vals[0], truth });
        out.push(terms);
    }
    if max_terms >= 2 && vals.len() <= 3 {
        let mut coefs = vals.clone();
        for &u in &vals {
            for &v in &vals {
                let d = w.sub(v, u);
                if d != 0 && !coefs.contains(&d) {
                    coefs.push(d);
                }
            }
        }
        for (x, &c1) in coefs.iter().enumerate() {
            for &c2 in &coefs[x..] {
                let kinds = [(c1, false), (c2, false)];
                for tables in enumerate(&g, &kinds, w, budget) {
                    let mut terms = base.clone();
                    terms.extend(with_coefs(&kinds, tables));
                    out.push(terms);
                }
            }
        }
    }
    out
}

/// `a + Σ_v (v - a)·[F = v]`: always valid, one term per distinct value.
pub(crate) fn disjoint(f: &[u64], w: Width) -> Vec<Term> {
    let t = f.len().trailing_zeros() as usize;
    let a = f[0];
    let mut terms = if a == 0 { Vec::new() } else { vec![Term::constant(a, t, w)] };
    for v in distinct(f) {
        if v != a {
            terms.push(Term { coef: w.sub(v, a), truth: TruthTable::from_fn(t, |i| f[i] == v) });
        }
    }
    terms
}

/// `-a·B` when every value of `f` is `a = f[0]` or `2a`.
pub(crate) fn single_negated(f: &[u64], w: Width) -> Option<Vec<Term>> {
    let a = f[0];
    let two_a = w.add(a, a);
    if a == 0 || f.iter().any(|&v| v != a && v != two_a) {
        return None;
    }
    let t = f.len().trailing_zeros() as usize;
    Some(vec![Term { coef: w.neg(a), truth: TruthTable::from_fn(t, |i| f[i] == a) }])
}

/// Combinations of one plain and one negated expression, and of two negated
/// expressions, for `f` with three or four distinct values and `f[0] ≠ 0`.
///
/// With `F = c·U - a·~T`, the pairs (U, T) map to the values `a` (0,0),
/// `2a` (0,1), `c + a` (1,0) and `c + 2a` (1,1), so every value other than
/// `a` and `2a` fixes `c` up to two choices. With `F = c₁·~T₁ + c₂·~T₂` we
/// get `c₁ + c₂ = -a` and the extra values `b = a - c₁`, `3a - b`.
///
/// In `strict` mode only the textbook cases are tried: one extra value `b`
/// (plain plus negated, `c ∈ {b - a, b - 2a}`), two extra values `b`, `b + a`
/// (plain plus negated, `c = b - a`), and two extra values with `b + c = 3a`
/// (two negated). Otherwise every coefficient consistent with some extra
/// value is tried, which also covers a single extra value shared by both
/// negated terms, as in `~x+~y`.
pub(crate) fn negated(f: &[u64], w: Width, budget: usize, strict: bool) -> Vec<Vec<Term>> {
    let a = f[0];
    let vals = distinct(f);
    if a == 0 || !(3..=4).contains(&vals.len()) {
        return Vec::new();
    }
    let two_a = w.add(a, a);
    let three_a = w.add(two_a, a);
    let extra: Vec<u64> = vals.iter().copied().filter(|&v| v != a && v != two_a).collect();
    if extra.is_empty() || extra.len() > 2 {
        return Vec::new();
    }
    let mut out: Vec<Vec<Term>> = Vec::new();
    let push = |kinds: &[(u64, bool)], out: &mut Vec<Vec<Term>>| {
        for tables in enumerate(f, kinds, w, budget) {
            let terms = with_coefs(kinds, tables);
            if !out.contains(&terms) {
                out.push(terms);
            }
        }
    };
    let neg_a = w.neg(a);
    let mut plain = Vec::new();
    let mut both = Vec::new();
    match (strict, extra.as_slice()) {
        (true, &[b]) => plain.extend([w.sub(b, a), w.sub(b, two_a)]),
        (true, &[b, c]) => {
            for (b, c) in [(b, c), (c, b)] {
                if w.sub(c, b) == a {
                    plain.push(w.sub(b, a));
                }
                if w.add(b, c) == three_a {
                    both.push(b);
                }
            }
            both.truncate(1);
        }
        _ => {
            for &b in &extra {
                plain.extend([w.sub(b, a), w.sub(b, two_a)]);
                both.push(b);
            }
        }
    }
    for c in plain {
        if c != 0 {
            push(&[(c, false), (neg_a, true)], &mut out);
        }
    }
    for b in both {
        let c1 = w.sub(a, b);
        let c2 = w.sub(neg_a, c1);
        if c1 != 0 && c2 != 0 {
            push(&[(c1, true), (c2, true)], &mut out);
        }
    }
    out
}

/// Combinations with exactly the given coefficients on plain expressions,
/// used to look for equally short alternatives of a known solution.
pub(crate) fn fixed_coefficients(f: &[u64], coefs: &[u64], w: Width, budget: usize) -> Vec<Vec<Term>> {
    let t = f.len().trailing_zeros() as usize;
    let a = f[0];
    let g: Vec<u64> = f.iter().map(|&v| w.sub(v, a)).collect();
    let kinds: Vec<(u64, bool)> = coefs.iter().map(|&c| (c, false)).collect();
    enumerate(&g, &kinds, w, budget)
        .into_iter()
        .map(|tables| {
            let mut terms = if a == 0 { Vec::new() } else { vec![Term::constant(a, t, w)] };
            terms.extend(with_coefs(&kinds, tables));
            terms
        })
        .collect()
}

/// Exhaustive search over sets of fewer than `limit` truth tables (all
/// `2^(2^t) - 1` nonzero ones, including the all-ones constant), solving for
/// coefficients. Only sensible for `t ≤ 2`.
pub(crate) fn exhaustive(f: &[u64], w: Width, limit: usize) -> Vec<Vec<Term>> {
    let n = f.len();
    let t = n.trailing_zeros() as usize;
    let tables: Vec<TruthTable> = (1..1u64 << n).map(|idx| TruthTable::from_index(t, idx)).collect();
    let vectors: Vec<Vec<u64>> = tables
        .iter()
        .map(|tt| values_of(&[Term { coef: 1, truth: tt.clone() }], n, w))
        .collect();
    let mut out = Vec::new();
    let mut subset = Vec::new();
    fn rec(
        start: usize,
        k: usize,
        subset: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
        total: usize,
    ) {
        if subset.len() == k {
            visit(subset);
            return;
        }
        for s in start..total {
            subset.push(s);
            rec(s + 1, k, subset, visit, total);
            subset.pop();
        }
    }
    for k in 1..limit {
        let mut visit = |sel: &[usize]| {
            let rows: Vec<Vec<u64>> = (0..n).map(|i| sel.iter().map(|&s| vectors[s][i]).collect()).collect();
            if let Some(x) = modsolve::solve(&rows, f, w) {
                if x.iter().all(|&c| c != 0) {
                    out.push(
                        sel.iter().zip(x).map(|(&s, coef)| Term { coef, truth: tables[s].clone() }).collect(),
                    );
                }
            }
        };
        rec(0, k, &mut subset, &mut visit, tables.len());
    }
    out
}
