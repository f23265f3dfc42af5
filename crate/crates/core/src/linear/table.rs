//! Smallest bitwise expressions for every Boolean function of up to three
//! variables.
//!
//! The tables live in `data/bitwise_t{1,2,3}.txt`, one `<index>:<expr>` line
//! per function, where the index is `Σ T[i]·2^i` over the truth table `T`.
//! They are produced by [`generate`], a dynamic program over expression
//! trees with n-ary `&`, `|` and `^` that finds, for each function, the
//! minimal node count over all trees and among those the canonically
//! smallest tree.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::expr::{and, canonicalize, not, or, parse, print, xor, Expr, Name, Width};

const TABLE_T1: &str = include_str!("../../data/bitwise_t1.txt");
const TABLE_T2: &str = include_str!("../../data/bitwise_t2.txt");
const TABLE_T3: &str = include_str!("../../data/bitwise_t3.txt");

/// Variable names used in the stored expressions, by position.
pub const TABLE_VARS: [&str; 3] = ["x", "y", "z"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("table for {t} variables has {found} entries, expected {expected}")]
    Incomplete { t: usize, found: usize, expected: usize },
}

/// Parses a table file for `t` variables.
pub fn parse_table(src: &str, t: usize) -> Result<Vec<Expr>, TableError> {
    let size = 1usize << (1 << t);
    let mut out: Vec<Option<Expr>> = vec![None; size];
    for (n, line) in src.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed = |message: String| TableError::Malformed { line: n + 1, message };
        let (idx, expr) = line.split_once(':').ok_or_else(|| malformed("missing `:`".into()))?;
        let idx: usize = idx.trim().parse().map_err(|_| malformed(format!("bad index `{idx}`")))?;
        if idx >= size {
            return Err(malformed(format!("index {idx} out of range")));
        }
        let e = parse(expr, Width::W64).map_err(|e| malformed(e.to_string()))?;
        out[idx] = Some(e);
    }
    let found = out.iter().filter(|e| e.is_some()).count();
    if found != size {
        return Err(TableError::Incomplete { t, found, expected: size });
    }
    Ok(out.into_iter().map(Option::unwrap).collect())
}

fn tables() -> &'static [Vec<Expr>; 3] {
    static TABLES: OnceLock<[Vec<Expr>; 3]> = OnceLock::new();
    TABLES.get_or_init(|| {
        [
            parse_table(TABLE_T1, 1).expect("bundled table for one variable"),
            parse_table(TABLE_T2, 2).expect("bundled table for two variables"),
            parse_table(TABLE_T3, 3).expect("bundled table for three variables"),
        ]
    })
}

/// Stored expression for truth-table index `index` over `vars`
/// (`1 ≤ vars.len() ≤ 3`), with constants reduced to width `w`.
pub fn lookup(index: u64, vars: &[Name], w: Width) -> Expr {
    let t = vars.len();
    assert!((1..=3).contains(&t), "tables cover one to three variables");
    let e = &tables()[t - 1][index as usize];
    let renamed = e.substitute_vars(
        &|n| TABLE_VARS.iter().position(|v| *v == n).map(|i| Expr::Var(vars[i].clone())),
        w,
    );
    let renamed = renamed.at_width(w);
    if vars.iter().map(|v| &**v).eq(TABLE_VARS[..t].iter().copied()) {
        renamed
    } else {
        canonicalize(&renamed)
    }
}

/// Renders a table in the file format.
pub fn render(table: &[Expr]) -> String {
    let mut s = String::new();
    for (i, e) in table.iter().enumerate() {
        s.push_str(&format!("{i}:{}\n", print(e, Width::W64)));
    }
    s
}

// ---------------------------------------------------------------------------
// Generation

const INF: u32 = u32::MAX / 4;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Root {
    Leaf,
    Not,
    And,
    Or,
    Xor,
}

struct Dp {
    full: usize,
    leaf: Vec<u32>,
    not: Vec<u32>,
    and: Vec<u32>,
    or: Vec<u32>,
    xor: Vec<u32>,
}

impl Dp {
    fn cost(&self, f: usize, r: Root) -> u32 {
        match r {
            Root::Leaf => self.leaf[f],
            Root::Not => self.not[f],
            Root::And => self.and[f],
            Root::Or => self.or[f],
            Root::Xor => self.xor[f],
        }
    }

    fn any(&self, f: usize) -> u32 {
        self.leaf[f].min(self.not[f]).min(self.and[f]).min(self.or[f]).min(self.xor[f])
    }

    /// Cheapest way to supply `f` as one or more operands of an n-ary `r`.
    fn chain(&self, f: usize, r: Root) -> u32 {
        let other = [Root::Leaf, Root::Not, Root::And, Root::Or, Root::Xor]
            .into_iter()
            .filter(|&k| k != r)
            .map(|k| self.cost(f, k))
            .min()
            .unwrap();
        other.min(self.cost(f, r).saturating_sub(1))
    }

    fn solve(t: usize) -> Dp {
        let n = 1usize << t;
        let size = 1usize << n;
        let full = size - 1;
        let mut leaf = vec![INF; size];
        for (j, _) in TABLE_VARS.iter().enumerate().take(t) {
            let f = (0..n).filter(|i| i >> j & 1 == 1).fold(0usize, |acc, i| acc | 1 << i);
            leaf[f] = 1;
        }
        leaf[0] = 1;
        leaf[full] = 1;
        let mut dp = Dp {
            full,
            leaf,
            not: vec![INF; size],
            and: vec![INF; size],
            or: vec![INF; size],
            xor: vec![INF; size],
        };
        loop {
            let mut changed = false;
            for f in 0..size {
                // Constants are only useful on their own.
                if f == 0 || f == full {
                    continue;
                }
                let g = full & !f;
                let nn = [Root::Leaf, Root::And, Root::Or, Root::Xor]
                    .into_iter()
                    .map(|k| dp.cost(g, k))
                    .min()
                    .unwrap();
                let c = nn.saturating_add(1);
                if g != 0 && g != full && c < dp.not[f] {
                    dp.not[f] = c;
                    changed = true;
                }
            }
            for g in 1..full {
                for h in g..full {
                    let pairs = [
                        (Root::And, g & h),
                        (Root::Or, g | h),
                        (Root::Xor, g ^ h),
                    ];
                    for (r, f) in pairs {
                        if f == 0 || f == full || f == g || f == h {
                            continue;
                        }
                        let c = 1 + dp.chain(g, r) + dp.chain(h, r);
                        let slot = match r {
                            Root::And => &mut dp.and[f],
                            Root::Or => &mut dp.or[f],
                            _ => &mut dp.xor[f],
                        };
                        if c < *slot {
                            *slot = c;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        dp
    }
}

struct Builder<'a> {
    dp: &'a Dp,
    t: usize,
    vars: Vec<Name>,
    w: Width,
    node: HashMap<(usize, Root), Option<Expr>>,
    chain: HashMap<(usize, Root), Vec<Expr>>,
}

impl Builder<'_> {
    fn leaf(&self, f: usize) -> Expr {
        if f == 0 {
            return Expr::Const(0);
        }
        if f == self.dp.full {
            return Expr::Const(self.w.minus_one());
        }
        let n = 1usize << self.t;
        for j in 0..self.t {
            let v = (0..n).filter(|i| i >> j & 1 == 1).fold(0usize, |acc, i| acc | 1 << i);
            if v == f {
                return Expr::Var(self.vars[j].clone());
            }
        }
        unreachable!("not a leaf function")
    }

    fn best(&mut self, f: usize) -> Expr {
        let c = self.dp.any(f);
        [Root::Leaf, Root::Not, Root::And, Root::Or, Root::Xor]
            .into_iter()
            .filter(|&r| self.dp.cost(f, r) == c)
            .filter_map(|r| self.node(f, r))
            .min()
            .expect("every function has an expression")
    }

    fn node(&mut self, f: usize, r: Root) -> Option<Expr> {
        if let Some(e) = self.node.get(&(f, r)) {
            return e.clone();
        }
        let cost = self.dp.cost(f, r);
        let e = if cost >= INF {
            None
        } else {
            match r {
                Root::Leaf => Some(self.leaf(f)),
                Root::Not => {
                    let g = self.dp.full & !f;
                    let target = cost - 1;
                    let mut best: Option<Expr> = None;
                    for k in [Root::Leaf, Root::And, Root::Or, Root::Xor] {
                        if self.dp.cost(g, k) == target {
                            if let Some(inner) = self.node(g, k) {
                                let cand = not(inner, self.w);
                                if best.as_ref().is_none_or(|b| cand < *b) {
                                    best = Some(cand);
                                }
                            }
                        }
                    }
                    best
                }
                _ => {
                    let full = self.dp.full;
                    let mut best: Option<Expr> = None;
                    for g in 1..full {
                        for h in g..full {
                            let combined = match r {
                                Root::And => g & h,
                                Root::Or => g | h,
                                _ => g ^ h,
                            };
                            if combined != f || g == f || h == f {
                                continue;
                            }
                            if 1 + self.dp.chain(g, r) + self.dp.chain(h, r) != cost {
                                continue;
                            }
                            let mut ops = self.chain(g, r);
                            ops.extend(self.chain(h, r));
                            let cand = canonicalize(&match r {
                                Root::And => and(ops, self.w),
                                Root::Or => or(ops, self.w),
                                _ => xor(ops, self.w),
                            });
                            if best.as_ref().is_none_or(|b| cand < *b) {
                                best = Some(cand);
                            }
                        }
                    }
                    best
                }
            }
        };
        self.node.insert((f, r), e.clone());
        e
    }

    /// Operands supplying `f` under an n-ary `r`.
    fn chain(&mut self, f: usize, r: Root) -> Vec<Expr> {
        if let Some(v) = self.chain.get(&(f, r)) {
            return v.clone();
        }
        let target = self.dp.chain(f, r);
        let mut options: Vec<Vec<Expr>> = Vec::new();
        for k in [Root::Leaf, Root::Not, Root::And, Root::Or, Root::Xor] {
            if k != r && self.dp.cost(f, k) == target {
                if let Some(e) = self.node(f, k) {
                    options.push(vec![e]);
                }
            }
        }
        if self.dp.cost(f, r) < INF && self.dp.cost(f, r) - 1 == target {
            if let Some(e) = self.node(f, r) {
                options.push(e.operands().unwrap().to_vec());
            }
        }
        let best = options
            .into_iter()
            .min_by(|a, b| {
                let mut a = a.clone();
                let mut b = b.clone();
                a.sort();
                b.sort();
                a.cmp(&b)
            })
            .expect("chain target is reachable");
        self.chain.insert((f, r), best.clone());
        best
    }
}

/// Builds the table for `t` variables (`1 ≤ t ≤ 3`).
pub fn generate(t: usize) -> Vec<Expr> {
    assert!((1..=3).contains(&t));
    let dp = Dp::solve(t);
    let vars: Vec<Name> = TABLE_VARS[..t].iter().map(|s| Name::from(*s)).collect();
    let mut b = Builder { dp: &dp, t, vars, w: Width::W64, node: HashMap::new(), chain: HashMap::new() };
    (0..=dp.full).map(|f| b.best(f)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfunc::TruthTable;

    fn names(t: usize) -> Vec<Name> {
        TABLE_VARS[..t].iter().map(|s| Name::from(*s)).collect()
    }

    #[test]
    fn bundled_tables_are_correct() {
        for t in 1..=3 {
            let vars = names(t);
            let table = &tables()[t - 1];
            assert_eq!(table.len(), 1 << (1 << t));
            for (i, e) in table.iter().enumerate() {
                let tt = TruthTable::from_expr(e, &vars).unwrap();
                assert_eq!(tt.index(), Some(i as u64), "t={t} entry {i}");
            }
        }
    }

    #[test]
    fn bundled_tables_match_generator() {
        for t in 1..=2 {
            assert_eq!(generate(t), tables()[t - 1], "t={t}");
        }
    }

    #[test]
    fn known_entries() {
        let w = Width::W64;
        let v = names(2);
        assert_eq!(print(&lookup(0b0110, &v, w), w), "x^y");
        assert_eq!(print(&lookup(0b0100, &v, w), w), "~x&y");
        assert_eq!(print(&lookup(0b0111, &v, w), w), "~(x&y)");
        assert_eq!(print(&lookup(0b1001, &v, w), w), "~(x^y)");
        assert_eq!(print(&lookup(0, &v, w), w), "0");
        assert_eq!(print(&lookup(15, &v, w), w), "-1");
        let abc: Vec<Name> = ["a", "b"].iter().map(|s| Name::from(*s)).collect();
        assert_eq!(print(&lookup(0b1110, &abc, w), w), "a|b");
    }
}
