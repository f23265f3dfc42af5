//! Expression trees over `n`-bit words.
//!
//! An [`Expr`] is an immutable AST built from variables, constants, bitwise
//! negation, and the n-ary operators `+`, `*`, `&`, `^`, `|` plus binary `**`.
//! Constants are stored as unsigned residues modulo `2^n`; the width is not
//! part of the tree and is passed alongside it wherever arithmetic happens.
//!
//! The constructors in this module ([`sum`], [`product`], [`and`], ...)
//! normalize as they build: nested operators of the same kind are flattened,
//! constant operands are folded into one, and identity constants are dropped.

mod classify;
mod eval;
mod metric;
mod parse;
mod print;

pub use classify::{classify, collect_linear_subtrees, Classification, LinearSite};
pub use eval::{eval, eval_with, EvalError, Program};
pub use metric::{metric_value, Metric, MetricKey, MetricOrder, UnknownMetric};
pub use parse::{parse, ParseError};
pub use print::{print, print_with, PrintStyle};

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Variable identifier.
pub type Name = Arc<str>;

/// Word length `n` of the modular arithmetic, `1 ≤ n ≤ 64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Width(u32);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bit width must be between 1 and 64, got {0}")]
pub struct WidthError(pub u32);

impl Width {
    pub const W64: Width = Width(64);

    pub fn new(bits: u32) -> Result<Self, WidthError> {
        if (1..=64).contains(&bits) {
            Ok(Width(bits))
        } else {
            Err(WidthError(bits))
        }
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn mask(self) -> u64 {
        if self.0 == 64 {
            u64::MAX
        } else {
            (1u64 << self.0) - 1
        }
    }

    pub fn reduce(self, v: u64) -> u64 {
        v & self.mask()
    }

    /// Residue of a signed integer.
    pub fn from_i64(self, v: i64) -> u64 {
        self.reduce(v as u64)
    }

    pub fn minus_one(self) -> u64 {
        self.mask()
    }

    pub fn add(self, a: u64, b: u64) -> u64 {
        self.reduce(a.wrapping_add(b))
    }

    pub fn sub(self, a: u64, b: u64) -> u64 {
        self.reduce(a.wrapping_sub(b))
    }

    pub fn mul(self, a: u64, b: u64) -> u64 {
        self.reduce(a.wrapping_mul(b))
    }

    pub fn neg(self, a: u64) -> u64 {
        self.reduce(a.wrapping_neg())
    }

    pub fn not(self, a: u64) -> u64 {
        self.reduce(!a)
    }

    pub fn pow(self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base = self.reduce(base);
        while exp != 0 {
            if exp & 1 == 1 {
                acc = acc.wrapping_mul(base);
            }
            base = base.wrapping_mul(base);
            exp >>= 1;
        }
        self.reduce(acc)
    }

    /// Residues above `2^(n-1)` are shown as negative numbers.
    pub fn is_negative(self, v: u64) -> bool {
        let half = 1u64 << (self.0 - 1);
        v > half
    }

    /// Multiplicative inverse of an odd residue.
    pub fn inverse(self, a: u64) -> Option<u64> {
        if a & 1 == 0 {
            return None;
        }
        // Newton iteration doubles the number of correct low bits each step.
        let mut x = a;
        for _ in 0..6 {
            x = x.wrapping_mul(2u64.wrapping_sub(a.wrapping_mul(x)));
        }
        Some(self.reduce(x))
    }
}

impl Default for Width {
    fn default() -> Self {
        Width::W64
    }
}

impl fmt::Display for Width {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An MBA expression tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(u64),
    Var(Name),
    /// Bitwise negation `~`.
    Not(Box<Expr>),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Power(Box<Expr>, Box<Expr>),
    And(Vec<Expr>),
    Xor(Vec<Expr>),
    Or(Vec<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Var,
    Not,
    And,
    Or,
    Xor,
    Product,
    Power,
    Sum,
    Const,
}

impl Kind {
    pub fn is_bitwise_op(self) -> bool {
        matches!(self, Kind::Not | Kind::And | Kind::Or | Kind::Xor)
    }

    pub fn is_arithmetic_op(self) -> bool {
        matches!(self, Kind::Sum | Kind::Product | Kind::Power)
    }
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(Arc::from(name))
    }

    pub fn kind(&self) -> Kind {
        match self {
            Expr::Const(_) => Kind::Const,
            Expr::Var(_) => Kind::Var,
            Expr::Not(_) => Kind::Not,
            Expr::Sum(_) => Kind::Sum,
            Expr::Product(_) => Kind::Product,
            Expr::Power(..) => Kind::Power,
            Expr::And(_) => Kind::And,
            Expr::Xor(_) => Kind::Xor,
            Expr::Or(_) => Kind::Or,
        }
    }

    pub fn as_const(&self) -> Option<u64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Expr::Const(_) | Expr::Var(_))
    }

    /// Operand list of an n-ary node.
    pub fn operands(&self) -> Option<&[Expr]> {
        match self {
            Expr::Sum(v) | Expr::Product(v) | Expr::And(v) | Expr::Xor(v) | Expr::Or(v) => Some(v),
            _ => None,
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Const(_) | Expr::Var(_) => Vec::new(),
            Expr::Not(c) => vec![c],
            Expr::Power(b, e) => vec![b, e],
            Expr::Sum(v) | Expr::Product(v) | Expr::And(v) | Expr::Xor(v) | Expr::Or(v) => {
                v.iter().collect()
            }
        }
    }

    pub fn child(&self, index: usize) -> Option<&Expr> {
        match self {
            Expr::Not(c) if index == 0 => Some(c),
            Expr::Power(b, _) if index == 0 => Some(b),
            Expr::Power(_, e) if index == 1 => Some(e),
            _ => self.operands().and_then(|ops| ops.get(index)),
        }
    }

    /// Rebuilds the node with the same kind and new children, without
    /// normalizing.
    pub fn with_children(&self, mut children: Vec<Expr>) -> Expr {
        match self {
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Not(_) => Expr::Not(Box::new(children.remove(0))),
            Expr::Power(..) => {
                let e = children.pop().expect("power exponent");
                let b = children.pop().expect("power base");
                Expr::Power(Box::new(b), Box::new(e))
            }
            Expr::Sum(_) => Expr::Sum(children),
            Expr::Product(_) => Expr::Product(children),
            Expr::And(_) => Expr::And(children),
            Expr::Xor(_) => Expr::Xor(children),
            Expr::Or(_) => Expr::Or(children),
        }
    }

    /// Rebuilds the node through the normalizing constructors.
    pub fn rebuild(&self, children: Vec<Expr>, w: Width) -> Expr {
        match self {
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Not(_) => not(children.into_iter().next().expect("negation operand"), w),
            Expr::Power(..) => {
                let mut it = children.into_iter();
                let b = it.next().expect("power base");
                let e = it.next().expect("power exponent");
                power(b, e, w)
            }
            Expr::Sum(_) => sum(children, w),
            Expr::Product(_) => product(children, w),
            Expr::And(_) => and(children, w),
            Expr::Xor(_) => xor(children, w),
            Expr::Or(_) => or(children, w),
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(|c| c.node_count()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Sorted set of variable names.
    pub fn vars(&self) -> Vec<Name> {
        let mut set = BTreeSet::new();
        self.collect_vars(&mut set);
        set.into_iter().collect()
    }

    fn collect_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Expr::Var(n) => {
                out.insert(n.clone());
            }
            _ => {
                for c in self.children() {
                    c.collect_vars(out);
                }
            }
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self {
            Expr::Var(n) => &**n == name,
            _ => self.children().iter().any(|c| c.contains_var(name)),
        }
    }

    /// Bottom-up structural map; `f` sees each node after its children were
    /// rewritten.
    pub fn map_bottom_up(&self, f: &mut impl FnMut(Expr) -> Expr) -> Expr {
        let node = if self.is_leaf() {
            self.clone()
        } else {
            let children = self.children().into_iter().map(|c| c.map_bottom_up(f)).collect();
            self.with_children(children)
        };
        f(node)
    }

    /// Replaces every occurrence of `target` by `replacement`, renormalizing.
    pub fn replace(&self, target: &Expr, replacement: &Expr, w: Width) -> Expr {
        if self == target {
            return replacement.clone();
        }
        if self.is_leaf() {
            return self.clone();
        }
        let children = self
            .children()
            .into_iter()
            .map(|c| c.replace(target, replacement, w))
            .collect();
        self.rebuild(children, w)
    }

    /// Substitutes variables by expressions, renormalizing.
    pub fn substitute_vars(&self, map: &dyn Fn(&str) -> Option<Expr>, w: Width) -> Expr {
        match self {
            Expr::Var(n) => map(n).unwrap_or_else(|| self.clone()),
            Expr::Const(_) => self.clone(),
            _ => {
                let children = self
                    .children()
                    .into_iter()
                    .map(|c| c.substitute_vars(map, w))
                    .collect();
                self.rebuild(children, w)
            }
        }
    }

    /// Subtree at a child-index path.
    pub fn at_path(&self, path: &[usize]) -> Option<&Expr> {
        let mut cur = self;
        for &i in path {
            cur = cur.child(i)?;
        }
        Some(cur)
    }

    /// Replaces the subtree at `path` without renormalizing ancestors.
    pub fn replace_at(&self, path: &[usize], replacement: Expr) -> Expr {
        match path.split_first() {
            None => replacement,
            Some((&i, rest)) => {
                let mut children: Vec<Expr> = self.children().into_iter().cloned().collect();
                children[i] = children[i].replace_at(rest, replacement);
                self.with_children(children)
            }
        }
    }

    /// Reduces all constants to the given width and renormalizes.
    pub fn at_width(&self, w: Width) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(w.reduce(*c)),
            Expr::Var(_) => self.clone(),
            _ => {
                let children = self.children().into_iter().map(|c| c.at_width(w)).collect();
                self.rebuild(children, w)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Normalizing constructors

pub fn constant(v: u64, w: Width) -> Expr {
    Expr::Const(w.reduce(v))
}

pub fn var(name: &str) -> Expr {
    Expr::var(name)
}

fn flatten_into(kind: Kind, operands: Vec<Expr>, out: &mut Vec<Expr>) {
    for op in operands {
        if op.kind() == kind {
            match op {
                Expr::Sum(v) | Expr::Product(v) | Expr::And(v) | Expr::Xor(v) | Expr::Or(v) => {
                    flatten_into(kind, v, out)
                }
                _ => unreachable!(),
            }
        } else {
            out.push(op);
        }
    }
}

/// Flattens and folds constants. The folded constant takes the position of
/// the first constant operand; it is dropped when equal to `identity`.
fn fold_nary(
    kind: Kind,
    operands: Vec<Expr>,
    identity: u64,
    fold: impl Fn(u64, u64) -> u64,
) -> (Vec<Expr>, Option<u64>) {
    let mut flat = Vec::with_capacity(operands.len());
    flatten_into(kind, operands, &mut flat);
    let mut acc: Option<u64> = None;
    let mut first_const = None;
    let mut out = Vec::with_capacity(flat.len());
    for op in flat {
        if let Expr::Const(c) = op {
            acc = Some(match acc {
                None => c,
                Some(a) => fold(a, c),
            });
            if first_const.is_none() {
                first_const = Some(out.len());
            }
        } else {
            out.push(op);
        }
    }
    if let (Some(c), Some(pos)) = (acc, first_const) {
        if c != identity {
            out.insert(pos, Expr::Const(c));
        }
    }
    (out, acc)
}

fn finish_nary(mut ops: Vec<Expr>, identity: u64, make: fn(Vec<Expr>) -> Expr) -> Expr {
    match ops.len() {
        0 => Expr::Const(identity),
        1 => ops.pop().unwrap(),
        _ => make(ops),
    }
}

pub fn sum(terms: Vec<Expr>, w: Width) -> Expr {
    let (ops, _) = fold_nary(Kind::Sum, terms, 0, |a, b| w.add(a, b));
    finish_nary(ops, 0, Expr::Sum)
}

pub fn product(factors: Vec<Expr>, w: Width) -> Expr {
    let (ops, acc) = fold_nary(Kind::Product, factors, 1, |a, b| w.mul(a, b));
    if acc == Some(0) {
        return Expr::Const(0);
    }
    finish_nary(ops, 1, Expr::Product)
}

pub fn and(operands: Vec<Expr>, w: Width) -> Expr {
    let ones = w.minus_one();
    let (ops, acc) = fold_nary(Kind::And, operands, ones, |a, b| a & b);
    if acc == Some(0) {
        return Expr::Const(0);
    }
    finish_nary(ops, ones, Expr::And)
}

pub fn or(operands: Vec<Expr>, w: Width) -> Expr {
    let ones = w.minus_one();
    let (ops, acc) = fold_nary(Kind::Or, operands, 0, |a, b| a | b);
    if acc == Some(ones) {
        return Expr::Const(ones);
    }
    finish_nary(ops, 0, Expr::Or)
}

pub fn xor(operands: Vec<Expr>, w: Width) -> Expr {
    let (ops, _) = fold_nary(Kind::Xor, operands, 0, |a, b| a ^ b);
    let _ = w;
    finish_nary(ops, 0, Expr::Xor)
}

pub fn not(e: Expr, w: Width) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(w.not(c)),
        Expr::Not(inner) => *inner,
        other => Expr::Not(Box::new(other)),
    }
}

pub fn power(base: Expr, exponent: Expr, w: Width) -> Expr {
    match (&base, &exponent) {
        (_, Expr::Const(0)) => Expr::Const(w.reduce(1)),
        (_, Expr::Const(1)) => base,
        (Expr::Const(b), Expr::Const(e)) => Expr::Const(w.pow(*b, *e)),
        (Expr::Const(1), _) => Expr::Const(w.reduce(1)),
        _ => Expr::Power(Box::new(base), Box::new(exponent)),
    }
}

/// `-e`, folding into a leading constant factor.
pub fn neg(e: Expr, w: Width) -> Expr {
    scale(e, w.minus_one(), w)
}

/// `c * e`, distributing over sums.
pub fn scale(e: Expr, c: u64, w: Width) -> Expr {
    let c = w.reduce(c);
    match e {
        Expr::Sum(terms) => sum(terms.into_iter().map(|t| scale(t, c, w)).collect(), w),
        Expr::Const(v) => Expr::Const(w.mul(v, c)),
        other => product(vec![Expr::Const(c), other], w),
    }
}

/// Splits a term into its constant coefficient and the remaining factor.
/// A bare constant yields `(c, None)`.
pub fn split_coefficient(term: &Expr) -> (u64, Option<Expr>) {
    match term {
        Expr::Const(c) => (*c, None),
        Expr::Product(fs) => {
            let mut coef = 1u64;
            let mut has_const = false;
            let mut rest = Vec::with_capacity(fs.len());
            for f in fs {
                match f {
                    Expr::Const(c) if !has_const => {
                        coef = *c;
                        has_const = true;
                    }
                    _ => rest.push(f.clone()),
                }
            }
            if !has_const {
                return (1, Some(term.clone()));
            }
            let rest = match rest.len() {
                0 => None,
                1 => rest.pop(),
                _ => Some(Expr::Product(rest)),
            };
            (coef, rest)
        }
        other => (1, Some(other.clone())),
    }
}

/// Inverse of [`split_coefficient`].
pub fn join_coefficient(coef: u64, rest: Option<Expr>, w: Width) -> Expr {
    let coef = w.reduce(coef);
    match rest {
        None => Expr::Const(coef),
        Some(_) if coef == 0 => Expr::Const(0),
        Some(r) if coef == 1 => r,
        Some(r) => product(vec![Expr::Const(coef), r], w),
    }
}

// ---------------------------------------------------------------------------
// Canonical order

/// Negated operands sort directly after their operand, so `~x` falls
/// between `x` and `y`.
impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, na) = strip_not(self);
        let (b, nb) = strip_not(other);
        a.cmp_base(b).then(na.cmp(&nb))
    }
}

fn strip_not(e: &Expr) -> (&Expr, bool) {
    match e {
        Expr::Not(inner) => (inner, true),
        _ => (e, false),
    }
}

impl Expr {
    fn cmp_base(&self, other: &Self) -> Ordering {
        let k = self.kind().cmp(&other.kind());
        if k != Ordering::Equal {
            return k;
        }
        match (self, other) {
            (Expr::Var(a), Expr::Var(b)) => a.cmp(b),
            (Expr::Const(a), Expr::Const(b)) => a.cmp(b),
            (Expr::Not(a), Expr::Not(b)) => a.cmp(b),
            (Expr::Power(b1, e1), Expr::Power(b2, e2)) => b1.cmp(b2).then_with(|| e1.cmp(e2)),
            _ => {
                let a = self.operands().unwrap_or(&[]);
                let b = other.operands().unwrap_or(&[]);
                a.len().cmp(&b.len()).then_with(|| a.cmp(b))
            }
        }
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Order of sum terms: compares the non-constant part first, then the
/// coefficient. Pure constants go last.
pub fn cmp_terms(a: &Expr, b: &Expr) -> Ordering {
    let (ca, ra) = split_coefficient(a);
    let (cb, rb) = split_coefficient(b);
    match (ra, rb) {
        (None, None) => ca.cmp(&cb),
        (None, Some(_)) => Ordering::Greater,
        (Some(_), None) => Ordering::Less,
        (Some(x), Some(y)) => x.cmp(&y).then_with(|| ca.cmp(&cb)),
    }
}

/// Order of product factors and bitwise operands: constants first.
pub fn cmp_factors(a: &Expr, b: &Expr) -> Ordering {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => x.cmp(y),
        (Expr::Const(_), _) => Ordering::Less,
        (_, Expr::Const(_)) => Ordering::Greater,
        _ => a.cmp(b),
    }
}

/// Sorts the operands of one commutative node (not recursive).
pub fn sort_operands(e: Expr) -> Expr {
    match e {
        Expr::Sum(mut v) => {
            v.sort_by(cmp_terms);
            Expr::Sum(v)
        }
        Expr::Product(mut v) => {
            v.sort_by(cmp_factors);
            Expr::Product(v)
        }
        Expr::And(mut v) => {
            v.sort_by(cmp_factors);
            Expr::And(v)
        }
        Expr::Or(mut v) => {
            v.sort_by(cmp_factors);
            Expr::Or(v)
        }
        Expr::Xor(mut v) => {
            v.sort_by(cmp_factors);
            Expr::Xor(v)
        }
        other => other,
    }
}

/// Recursively sorts operands of all commutative nodes.
pub fn canonicalize(e: &Expr) -> Expr {
    e.map_bottom_up(&mut sort_operands)
}
