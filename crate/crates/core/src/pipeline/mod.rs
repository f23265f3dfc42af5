//! The general simplifier for polynomial and mixed expressions.
//!
//! Each outer iteration refines the tree with local rules, factors
//! nonlinear sums, replaces linear parts by their simplest linear form and
//! finally tries substituting nonlinear subexpressions under bitwise
//! operations by fresh variables. Every step is checked by evaluation and
//! rolled back if the check fails; iterations stop once the metric no
//! longer improves.

mod factor;
mod refine;
mod substitute;

use std::cell::RefCell;
use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

pub use factor::{expand, factorize};
pub use refine::refine;
pub use substitute::{collect_substitution_candidates, substitute_and_simplify, SubstitutionMap};

use crate::expr::{canonicalize, classify, collect_linear_subtrees, Expr, MetricKey, MetricOrder, Width};
use crate::linear::{conjunction_basis, result_vector, simplify_linear, LinearConfig};
use crate::verify::{exhaustive_equivalence, probably_equal, random_equivalence};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplifyConfig {
    pub width: Width,
    pub metric: MetricOrder,
    pub max_outer_iterations: usize,
    /// Largest number of subexpressions substituted at once.
    pub max_substitution_size: usize,
    /// Subsets of candidates tried per substitution sweep.
    pub max_substitution_subsets: usize,
    /// Sums are not expanded beyond this many terms.
    pub expansion_budget: usize,
    pub time_budget_ms: u64,
    /// Linear parts with more variables are left alone.
    pub max_linear_vars: usize,
    /// Nonlinear nodes with more variables are not probed for a linear form.
    pub max_probe_vars: usize,
    /// Random assignments used to check each rewrite.
    pub check_samples: usize,
    pub seed: u64,
}

impl Default for SimplifyConfig {
    fn default() -> Self {
        SimplifyConfig {
            width: Width::W64,
            metric: MetricOrder::default(),
            max_outer_iterations: 20,
            max_substitution_size: 3,
            max_substitution_subsets: 64,
            expansion_budget: 512,
            time_budget_ms: 10_000,
            max_linear_vars: 16,
            max_probe_vars: 8,
            check_samples: 64,
            seed: 0x5eed,
        }
    }
}

impl SimplifyConfig {
    pub fn with_width(width: Width) -> Self {
        SimplifyConfig { width, ..Self::default() }
    }

    pub fn linear_config(&self) -> LinearConfig {
        LinearConfig {
            width: self.width,
            metric: self.metric.clone(),
            max_vars: self.max_linear_vars,
            ..LinearConfig::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simplified {
    pub expr: Expr,
    /// Set when the time budget ran out; `expr` is then the best verified
    /// intermediate result.
    pub budget_exceeded: bool,
}

/// Canonical operand order for every commutative node.
pub fn polish(e: &Expr) -> Expr {
    canonicalize(e)
}

/// Shared state of one simplification call.
pub(crate) struct Ctx<'a> {
    cfg: &'a SimplifyConfig,
    linear: LinearConfig,
    deadline: Instant,
    probes: RefCell<HashMap<Expr, Option<Expr>>>,
    linear_forms: RefCell<HashMap<Expr, Expr>>,
}

impl<'a> Ctx<'a> {
    pub fn new(cfg: &'a SimplifyConfig) -> Self {
        Ctx {
            cfg,
            linear: cfg.linear_config(),
            deadline: Instant::now() + Duration::from_millis(cfg.time_budget_ms),
            probes: RefCell::new(HashMap::new()),
            linear_forms: RefCell::new(HashMap::new()),
        }
    }

    pub fn w(&self) -> Width {
        self.cfg.width
    }

    pub fn key(&self, e: &Expr) -> MetricKey {
        self.cfg.metric.key(e, self.cfg.width)
    }

    pub fn expired(&self) -> bool {
        Instant::now() >= self.deadline
    }

    pub fn equal(&self, a: &Expr, b: &Expr) -> bool {
        probably_equal(a, b, self.cfg.width, self.cfg.check_samples, self.cfg.seed)
    }

    /// Memoized [`simplify_linear`]; the same sites recur across factoring
    /// options and substitution subsets.
    fn linear(&self, e: &Expr) -> Expr {
        if let Some(hit) = self.linear_forms.borrow().get(e) {
            return hit.clone();
        }
        let out = simplify_linear(e, &self.linear);
        self.linear_forms.borrow_mut().insert(e.clone(), out.clone());
        out
    }

    /// Linear form of a nonlinear node, if it is equivalent to one.
    fn probe(&self, e: &Expr) -> Option<Expr> {
        if let Some(hit) = self.probes.borrow().get(e) {
            return hit.clone();
        }
        // the conjunction basis is cheap and equivalent iff any linear form is
        let reducible = result_vector(e, &e.vars(), self.w())
            .is_ok_and(|f| self.equal(e, &conjunction_basis(&f).to_expr(self.w())));
        let found = reducible
            .then(|| self.linear(e))
            .filter(|cand| self.key(cand) <= self.key(e) && self.equal(e, cand));
        self.probes.borrow_mut().insert(e.clone(), found.clone());
        found
    }
}

/// Recursive rebuild through the normalizing constructors.
pub(crate) fn normalize(e: &Expr, w: Width) -> Expr {
    if e.is_leaf() {
        return e.clone();
    }
    e.rebuild(e.children().into_iter().map(|c| normalize(c, w)).collect(), w)
}

/// Replaces nonlinear nodes that turn out to be equivalent to a linear
/// expression, top-down.
fn probe_nonlinear(e: &Expr, ctx: &Ctx, budget: &mut usize) -> Expr {
    let w = ctx.w();
    if e.is_leaf() || classify(e, w).is_linear() {
        return e.clone();
    }
    if ctx.expired() {
        return e.clone();
    }
    if *budget > 0 && e.vars().len() <= ctx.cfg.max_probe_vars {
        *budget -= 1;
        if let Some(l) = ctx.probe(e) {
            return l;
        }
    }
    let children = e.children().into_iter().map(|c| probe_nonlinear(c, ctx, budget)).collect();
    e.rebuild(children, w)
}

/// Replaces every maximal linear part by its simplest linear form unless
/// that is worse under the metric. Exact by construction.
pub(crate) fn simplify_linear_parts(e: &Expr, ctx: &Ctx) -> Expr {
    let w = ctx.w();
    let mut sites = collect_linear_subtrees(e, w);
    sites.sort_by_key(|s| std::cmp::Reverse(s.path.len()));
    let mut out = e.clone();
    for site in sites {
        if site.expr.vars().len() > ctx.cfg.max_linear_vars || ctx.expired() {
            continue;
        }
        let s = ctx.linear(&site.expr);
        if s == canonicalize(&site.expr) || ctx.key(&s) > ctx.key(&site.expr) {
            continue;
        }
        out = match site.group {
            None => out.replace_at(&site.path, s),
            Some(idx) => {
                let node = out.at_path(&site.path).expect("site path");
                let ops = node.operands().expect("grouped sum");
                let mut terms: Vec<Expr> =
                    ops.iter().enumerate().filter(|(i, _)| !idx.contains(i)).map(|(_, t)| t.clone()).collect();
                terms.push(s);
                out.replace_at(&site.path, Expr::Sum(terms))
            }
        };
    }
    normalize(&out, w)
}

/// Probing followed by linear-part simplification.
pub(crate) fn linear_step(e: &Expr, ctx: &Ctx) -> Expr {
    let mut budget = 64;
    let probed = probe_nonlinear(e, ctx, &mut budget);
    simplify_linear_parts(&probed, ctx)
}

/// Factors nonlinear sums bottom-up, keeping a factorization only when it
/// pays off once the linear parts are simplified.
pub(crate) fn factor_step(e: &Expr, ctx: &Ctx) -> Expr {
    let w = ctx.w();
    if e.is_leaf() || classify(e, w).is_linear() {
        return e.clone();
    }
    let children = e.children().into_iter().map(|c| factor_step(c, ctx)).collect();
    let node = e.rebuild(children, w);
    if !matches!(node, Expr::Sum(_)) || ctx.expired() {
        return node;
    }
    let base_key = ctx.key(&simplify_linear_parts(&node, ctx));
    let mut best: Option<(MetricKey, Expr)> = None;
    let mut options = vec![factor::factor_sum(&node, w)];
    if let Some(x) = expand(&node, ctx.cfg.expansion_budget, w) {
        options.push(factor::factor_sum(&x, w));
        options.push(x);
    }
    for o in options {
        let k = ctx.key(&simplify_linear_parts(&o, ctx));
        if k < base_key && best.as_ref().is_none_or(|(bk, _)| k < *bk) {
            best = Some((k, o));
        }
    }
    best.map_or(node, |(_, o)| o)
}

#[derive(Clone, Copy)]
enum Step {
    Refine,
    Factorize,
    Linear,
    Substitute,
}

fn iteration(e: &Expr, ctx: &Ctx) -> Expr {
    let w = ctx.w();
    let mut cur = e.clone();
    for step in [Step::Refine, Step::Factorize, Step::Linear, Step::Substitute] {
        if ctx.expired() {
            break;
        }
        let next = match step {
            Step::Refine => refine(&cur, w),
            Step::Factorize => factor_step(&cur, ctx),
            Step::Linear => linear_step(&cur, ctx),
            Step::Substitute => substitute::sweep(&cur, ctx),
        };
        if next != cur && ctx.equal(&cur, &next) {
            cur = next;
        }
    }
    polish(&cur)
}

/// Final safety net: exhaustive at four bits when affordable, sampled at
/// the full width.
fn final_check(a: &Expr, b: &Expr, cfg: &SimplifyConfig) -> bool {
    let w = cfg.width;
    if random_equivalence(a, b, w, 4 * cfg.check_samples, cfg.seed ^ 1).is_some() {
        return false;
    }
    let rw = Width::new(4).unwrap();
    if w.bits() <= rw.bits() {
        return true;
    }
    let mut vars = a.vars();
    vars.extend(b.vars());
    vars.sort();
    vars.dedup();
    if vars.len() <= 4 {
        exhaustive_equivalence(&a.at_width(rw), &b.at_width(rw), rw).is_none()
    } else {
        random_equivalence(&a.at_width(rw), &b.at_width(rw), rw, 16 * cfg.check_samples, cfg.seed ^ 2).is_none()
    }
}

/// Simplifies `e` by iterating refinement, factorization, linear
/// simplification and substitution while the metric does not get worse.
pub fn simplify_general(e: &Expr, cfg: &SimplifyConfig) -> Simplified {
    let ctx = Ctx::new(cfg);
    let input = polish(e);
    let mut cur = input.clone();
    let mut cur_key = ctx.key(&cur);
    let mut seen = HashSet::new();
    seen.insert(cur.clone());
    let mut exceeded = false;
    for _ in 0..cfg.max_outer_iterations {
        if ctx.expired() {
            exceeded = true;
            break;
        }
        let next = iteration(&cur, &ctx);
        let k = ctx.key(&next);
        if next == cur || k > cur_key || !seen.insert(next.clone()) {
            break;
        }
        cur = next;
        cur_key = k;
    }
    exceeded |= ctx.expired();
    if cur != input && !final_check(&input, &cur, cfg) {
        cur = input;
    }
    Simplified { expr: cur, budget_exceeded: exceeded }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, print};

    fn s(src: &str) -> Expr {
        let w = Width::W64;
        simplify_general(&parse(src, w).unwrap(), &SimplifyConfig::default()).expr
    }

    fn p(src: &str) -> Expr {
        polish(&parse(src, Width::W64).unwrap())
    }

    #[test]
    fn worked_examples() {
        let w = Width::W64;
        assert_eq!(print(&s("(x|3)&~(x|3)"), w), "0");
        assert_eq!(print(&s("(x^y)+(~x^y)"), w), "-1");
        assert_eq!(print(&s("(5&x)+(2&x)"), w), "7&x");
        assert_eq!(print(&s("-x*~(x|z)-y*~(x|z)-x*(x&~z)-y*(x&~z)-x*z-y*z"), w), "x+y");
        assert_eq!(s("((-x)^y)-2*((~-x)&y)"), p("-x-y"));
        assert_eq!(print(&s("~x+~(y-1)+2+((-(~x+1)-1)|(-(~(y-1))-1))"), w), "-x|-y");
        assert_eq!(print(&s("x"), w), "x");
    }

    #[test]
    fn reducible_to_linear() {
        let w = Width::W64;
        let e1 = "(-~(x|y)+(x|~y))*(-(x^y)-~(x^y))+(-2*~(y|x)+~x+~(y^x))*(-~y-y)";
        let e2 = "(-~(x|y)+(x|~y))**(-(x^y)-~(x^y))+(-2*~(y|x)+~x+~(y^x))**(-~y-y)";
        assert_eq!(print(&s(e1), w), "x+y");
        assert_eq!(print(&s(e2), w), "x+y");
        assert_eq!(print(&s("(x&y)+(x|y)"), w), "x+y");
    }

    #[test]
    fn polish_is_idempotent() {
        let e = p("y+x*(b|a)");
        assert_eq!(polish(&e), e);
        assert_eq!(print(&e, Width::W64), "y+x*(a|b)");
    }
}
