//! Quine–McCluskey minimization to a disjunctive normal form.

use std::collections::HashSet;

use super::{BoolFuncError, TruthTable};
use crate::expr::{and, canonicalize, not, or, Expr, Name, Width};

/// Largest variable count accepted by [`quine_mccluskey`].
pub const MAX_QM_VARS: usize = 12;

/// Exact cover search is used up to this many non-essential implicants.
const PETRICK_LIMIT: usize = 16;

/// A product term: variables whose bit is set in `mask` are free, the others
/// must equal the corresponding bit of `value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube {
    pub value: u32,
    pub mask: u32,
}

impl Cube {
    pub fn covers(&self, minterm: usize) -> bool {
        (minterm as u32 & !self.mask) == self.value
    }

    pub fn literals(&self, t: usize) -> u32 {
        t as u32 - self.mask.count_ones()
    }

    /// True when every minterm of `other` is a minterm of `self`.
    pub fn contains(&self, other: &Cube) -> bool {
        other.mask & !self.mask == 0 && (other.value & !self.mask) == self.value
    }
}

/// All prime implicants of `tt`, sorted.
pub fn prime_implicants(tt: &TruthTable) -> Vec<Cube> {
    let t = tt.vars();
    let mut level: HashSet<Cube> = tt.minterms().map(|m| Cube { value: m as u32, mask: 0 }).collect();
    let mut primes = Vec::new();
    while !level.is_empty() {
        let mut next = HashSet::new();
        let mut used = HashSet::new();
        for c in &level {
            for j in 0..t {
                let bit = 1u32 << j;
                if c.mask & bit != 0 || c.value & bit != 0 {
                    continue;
                }
                let partner = Cube { value: c.value | bit, mask: c.mask };
                if level.contains(&partner) {
                    next.insert(Cube { value: c.value, mask: c.mask | bit });
                    used.insert(*c);
                    used.insert(partner);
                }
            }
        }
        primes.extend(level.iter().filter(|c| !used.contains(c)).copied());
        level = next;
    }
    primes.sort();
    primes
}

/// Picks a small set of prime implicants covering every minterm.
fn select_cover(tt: &TruthTable, primes: &[Cube]) -> Vec<Cube> {
    let t = tt.vars();
    let minterms: Vec<usize> = tt.minterms().collect();
    let mut chosen: Vec<Cube> = Vec::new();
    let mut covered = vec![false; minterms.len()];

    for (k, &m) in minterms.iter().enumerate() {
        if covered[k] {
            continue;
        }
        let mut only = None;
        let mut count = 0;
        for p in primes {
            if p.covers(m) {
                count += 1;
                only = Some(*p);
            }
        }
        if count == 1 {
            let p = only.unwrap();
            if !chosen.contains(&p) {
                chosen.push(p);
            }
            for (k2, &m2) in minterms.iter().enumerate() {
                if p.covers(m2) {
                    covered[k2] = true;
                }
            }
        }
    }

    let open: Vec<usize> = (0..minterms.len()).filter(|&k| !covered[k]).map(|k| minterms[k]).collect();
    if open.is_empty() {
        chosen.sort();
        return chosen;
    }
    let candidates: Vec<Cube> = primes
        .iter()
        .filter(|p| !chosen.contains(p) && open.iter().any(|&m| p.covers(m)))
        .copied()
        .collect();

    if candidates.len() <= PETRICK_LIMIT {
        // Exact: smallest subset, then fewest literals, then lowest mask order.
        let words = open.len().div_ceil(64);
        let cover_sets: Vec<Vec<u64>> = candidates
            .iter()
            .map(|p| {
                let mut bits = vec![0u64; words];
                for (k, &m) in open.iter().enumerate() {
                    if p.covers(m) {
                        bits[k / 64] |= 1 << (k % 64);
                    }
                }
                bits
            })
            .collect();
        let full: Vec<u64> = (0..words)
            .map(|i| if (i + 1) * 64 <= open.len() { u64::MAX } else { (1u64 << (open.len() % 64)) - 1 })
            .collect();
        let mut best: Option<(u32, u32, u32)> = None;
        let mut acc = vec![0u64; words];
        for subset in 1u32..(1u32 << candidates.len()) {
            let size = subset.count_ones();
            if best.is_some_and(|(bs, _, _)| size > bs) {
                continue;
            }
            acc.iter_mut().for_each(|a| *a = 0);
            for (i, set) in cover_sets.iter().enumerate() {
                if subset >> i & 1 == 1 {
                    for (a, b) in acc.iter_mut().zip(set) {
                        *a |= b;
                    }
                }
            }
            if acc != full {
                continue;
            }
            let lits: u32 = (0..candidates.len())
                .filter(|i| subset >> i & 1 == 1)
                .map(|i| candidates[i].literals(t))
                .sum();
            let key = (size, lits, subset.reverse_bits());
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
        let subset = best.expect("primes always cover the function").2.reverse_bits();
        chosen.extend((0..candidates.len()).filter(|i| subset >> i & 1 == 1).map(|i| candidates[i]));
    } else {
        let mut remaining = open;
        while !remaining.is_empty() {
            let best = candidates
                .iter()
                .filter(|p| !chosen.contains(p))
                .max_by(|a, b| {
                    let ca = remaining.iter().filter(|&&m| a.covers(m)).count();
                    let cb = remaining.iter().filter(|&&m| b.covers(m)).count();
                    ca.cmp(&cb)
                        .then_with(|| b.literals(t).cmp(&a.literals(t)))
                        .then_with(|| b.cmp(a))
                })
                .copied()
                .expect("primes always cover the function");
            remaining.retain(|&m| !best.covers(m));
            chosen.push(best);
        }
    }
    chosen.sort();
    chosen
}

fn cube_expr(c: &Cube, vars: &[Name], w: Width) -> Expr {
    let lits: Vec<Expr> = (0..vars.len())
        .filter(|j| c.mask >> j & 1 == 0)
        .map(|j| {
            let v = Expr::Var(vars[j].clone());
            if c.value >> j & 1 == 1 {
                v
            } else {
                not(v, w)
            }
        })
        .collect();
    and(lits, w)
}

/// Minimal-ish DNF of `tt` over `vars` (variable `j` is bit `j` of the
/// table index). Constant functions give `0` and `-1`.
pub fn quine_mccluskey(tt: &TruthTable, vars: &[Name], w: Width) -> Result<Expr, BoolFuncError> {
    let t = tt.vars();
    if t > MAX_QM_VARS {
        return Err(BoolFuncError::Capacity(t));
    }
    assert_eq!(vars.len(), t, "one name per table variable");
    match tt.is_const() {
        Some(false) => return Ok(Expr::Const(0)),
        Some(true) => return Ok(Expr::Const(w.minus_one())),
        None => {}
    }
    let primes = prime_implicants(tt);
    let cover = select_cover(tt, &primes);
    let terms = cover.iter().map(|c| cube_expr(c, vars, w)).collect();
    Ok(canonicalize(&or(terms, w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, print};

    fn names(n: usize) -> Vec<Name> {
        ["x", "y", "z", "w"][..n].iter().map(|s| Name::from(*s)).collect()
    }

    #[test]
    fn two_variable_xor_in_three_variables() {
        let w = Width::W64;
        let tt = TruthTable::new(vec![false, true, true, false, false, true, true, false]).unwrap();
        let e = quine_mccluskey(&tt, &names(3), w).unwrap();
        assert_eq!(e, canonicalize(&parse("(x&~y)|(~x&y)", w).unwrap()));
        assert_eq!(print(&e, w), "x&~y|~x&y");
    }

    #[test]
    fn constants() {
        let w = Width::new(8).unwrap();
        let zero = TruthTable::from_fn(2, |_| false);
        assert_eq!(quine_mccluskey(&zero, &names(2), w).unwrap(), Expr::Const(0));
        let one = TruthTable::from_fn(2, |_| true);
        assert_eq!(quine_mccluskey(&one, &names(2), w).unwrap(), Expr::Const(255));
    }

    #[test]
    fn capacity_guard() {
        let tt = TruthTable::from_fn(13, |i| i % 3 == 0);
        let vars: Vec<Name> = (0..13).map(|i| Name::from(format!("v{i}"))).collect();
        assert_eq!(
            quine_mccluskey(&tt, &vars, Width::W64),
            Err(BoolFuncError::Capacity(13))
        );
    }

    #[test]
    fn all_three_variable_tables() {
        let vars = names(3);
        for idx in 0..256u64 {
            let tt = TruthTable::from_index(3, idx);
            let e = quine_mccluskey(&tt, &vars, Width::W64).unwrap();
            assert_eq!(TruthTable::from_expr(&e, &vars).unwrap(), tt, "table {idx}");
        }
    }

    #[test]
    fn primes_of_majority() {
        let tt = TruthTable::from_fn(3, |i| i.count_ones() >= 2);
        let primes = prime_implicants(&tt);
        assert_eq!(primes.len(), 3);
        for a in &primes {
            for b in &primes {
                assert!(a == b || !a.contains(b));
            }
        }
    }
}
