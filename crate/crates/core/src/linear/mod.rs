//! Simplification of MBAs that are equivalent to a linear combination of
//! bitwise expressions.
//!
//! Such an expression is determined by its values on the `2^t` inputs where
//! every variable is 0 or 1. [`simplify_linear`] evaluates there, rewrites
//! the result vector in the conjunction basis, and then searches for shorter
//! combinations: table lookups for up to three variables, decompositions
//! into one or two (possibly negated) bitwise expressions, splitting by
//! independent variable sets, and two-level synthesis for larger parts.

mod basis;
mod decompose;
mod modsolve;
mod partition;
pub mod table;

use std::collections::HashMap;

pub use basis::{conjunction_basis, conjunction_coefficients, restrict, result_vector, subset_sums, used_variables};
pub use modsolve::solve as solve_mod;
pub use partition::partition_by_variables;

use crate::boolfunc::{bitwise_refine, quine_mccluskey, TruthTable};
use crate::expr::{canonicalize, join_coefficient, sum, EvalError, Expr, MetricOrder, Name, Width};
use decompose::Term;

/// Values of an expression on all 0/1 assignments. Entry `i` sets variable
/// `j` to bit `j` of `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResultVector {
    pub vars: Vec<Name>,
    pub values: Vec<u64>,
    pub width: Width,
}

impl ResultVector {
    pub fn new(vars: Vec<Name>, values: Vec<u64>, width: Width) -> Self {
        assert_eq!(values.len(), 1 << vars.len(), "result vector needs 2^t entries");
        let values = values.into_iter().map(|v| width.reduce(v)).collect();
        ResultVector { vars, values, width }
    }

    pub fn t(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }
}

/// `Σ coef · bw` with bitwise `bw`. A constant `c` is the term
/// `(-c, -1)`, i.e. a multiple of the all-ones expression.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearCombination {
    pub terms: Vec<(u64, Expr)>,
}

impl LinearCombination {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn vars(&self) -> Vec<Name> {
        let mut vs: Vec<Name> = self.terms.iter().flat_map(|(_, e)| e.vars()).collect();
        vs.sort();
        vs.dedup();
        vs
    }

    /// The combination as a canonical sum.
    pub fn to_expr(&self, w: Width) -> Expr {
        let terms = self
            .terms
            .iter()
            .map(|(c, bw)| match bw {
                Expr::Const(k) => Expr::Const(w.mul(*c, *k)),
                _ => join_coefficient(*c, Some(bw.clone()), w),
            })
            .collect();
        canonicalize(&sum(terms, w))
    }

    pub fn result_vector(&self, vars: &[Name], w: Width) -> Result<ResultVector, EvalError> {
        result_vector(&self.to_expr(w), vars, w)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConfig {
    pub width: Width,
    pub metric: MetricOrder,
    /// Inputs with more variables are returned unchanged.
    pub max_vars: usize,
    /// Solutions enumerated per coefficient choice in two-term decompositions.
    pub decomposition_budget: usize,
    /// Solutions enumerated when looking for equally short alternatives.
    pub equal_term_budget: usize,
    /// Largest part synthesized with Quine–McCluskey; larger parts keep the
    /// conjunction basis.
    pub max_synthesis_vars: usize,
}

impl Default for LinearConfig {
    fn default() -> Self {
        LinearConfig {
            width: Width::W64,
            metric: MetricOrder::default(),
            max_vars: 16,
            decomposition_budget: 1 << 12,
            equal_term_budget: 10_000,
            max_synthesis_vars: 12,
        }
    }
}

/// Simplest linear MBA with the same values as `e` on all 0/1 inputs.
///
/// The result equals `e` whenever `e` is equivalent to some linear MBA; for
/// other inputs the caller has to verify it.
pub fn simplify_linear(e: &Expr, cfg: &LinearConfig) -> Expr {
    let vars = e.vars();
    if vars.len() > cfg.max_vars {
        return e.clone();
    }
    let f = result_vector(e, &vars, cfg.width).expect("all variables are bound");
    simplify_result_vector(&f, cfg)
}

/// Simplest linear MBA with result vector `f`.
pub fn simplify_result_vector(f: &ResultVector, cfg: &LinearConfig) -> Expr {
    let w = f.width;
    if f.is_zero() {
        return Expr::Const(0);
    }
    let f = restrict(f, used_variables(f));
    let out = if f.t() > 3 {
        partition::simplify_split(&f, cfg).unwrap_or_else(|| solve_connected(&f, cfg))
    } else {
        solve_connected(&f, cfg)
    };
    debug_assert_eq!(result_vector(&out, &f.vars, w).unwrap().values, f.values);
    out
}

/// Turns truth tables into bitwise expressions over fixed variables.
pub(crate) struct Synth<'a> {
    vars: &'a [Name],
    w: Width,
    max_vars: usize,
    cache: HashMap<TruthTable, Option<Expr>>,
}

impl<'a> Synth<'a> {
    pub fn new(vars: &'a [Name], w: Width, max_vars: usize) -> Self {
        Synth { vars, w, max_vars, cache: HashMap::new() }
    }

    pub fn available(&self) -> bool {
        self.vars.len() <= 3 || self.vars.len() <= self.max_vars
    }

    pub fn expr(&mut self, tt: &TruthTable) -> Option<Expr> {
        if let Some(e) = self.cache.get(tt) {
            return e.clone();
        }
        let e = self.build(tt);
        self.cache.insert(tt.clone(), e.clone());
        e
    }

    fn build(&self, tt: &TruthTable) -> Option<Expr> {
        let w = self.w;
        if let Some(c) = tt.is_const() {
            return Some(Expr::Const(if c { w.minus_one() } else { 0 }));
        }
        let t = self.vars.len();
        if t <= 3 {
            return Some(table::lookup(tt.index()?, self.vars, w));
        }
        if t > self.max_vars {
            return None;
        }
        let direct = bitwise_refine(&quine_mccluskey(tt, self.vars, w).ok()?, w);
        let via_complement = bitwise_refine(
            &crate::expr::not(quine_mccluskey(&tt.complement(), self.vars, w).ok()?, w),
            w,
        );
        let pick = if (via_complement.node_count(), &via_complement) < (direct.node_count(), &direct) {
            via_complement
        } else {
            direct
        };
        Some(canonicalize(&pick))
    }

    fn combination(&mut self, terms: &[Term]) -> Option<LinearCombination> {
        let mut out = Vec::with_capacity(terms.len());
        for term in terms {
            out.push((term.coef, self.expr(&term.truth)?));
        }
        Some(LinearCombination { terms: out })
    }

    fn cost(&mut self, terms: &[Term]) -> usize {
        terms.iter().map(|t| self.expr(&t.truth).map_or(usize::MAX / 64, |e| e.node_count())).sum()
    }
}

/// At most this many candidates of one shape are fully built and scored.
const SHORTLIST: usize = 64;

/// Candidates for a vector whose variables do not split into independent
/// groups (or that has at most three variables), best one returned.
pub(crate) fn solve_connected(f: &ResultVector, cfg: &LinearConfig) -> Expr {
    let w = f.width;
    let t = f.t();
    let values = &f.values;
    let basis = conjunction_basis(f);
    let basis_len = basis.len();
    let mut best = Best::new(cfg);
    best.offer(basis.to_expr(w));
    let mut synth = Synth::new(&f.vars, w, cfg.max_synthesis_vars);
    if !synth.available() || basis_len <= 1 {
        return best.finish();
    }

    let budget = if t <= 3 { cfg.decomposition_budget } else { cfg.decomposition_budget.min(256) };
    let mut pool: Vec<Vec<Term>> = Vec::new();
    pool.extend(decompose::single_negated(values, w));
    pool.extend(decompose::unnegated(values, w, 2, budget));
    pool.extend(decompose::negated(values, w, budget, false));
    pool.push(decompose::disjoint(values, w));
    if t <= 2 {
        pool.extend(decompose::exhaustive(values, w, basis_len));
    }
    pool.retain(|c| c.len() < basis_len);

    // Equally short alternatives of the shortest plain solutions.
    if t <= 3 {
        if let Some(shortest) = pool.iter().map(Vec::len).min() {
            let mut coef_sets: Vec<Vec<u64>> = pool
                .iter()
                .filter(|c| c.len() == shortest && c.len() >= 3)
                .filter(|c| c.iter().all(|term| !term.truth.get(0) || term.truth.is_const() == Some(true)))
                .map(|c| {
                    let mut cs: Vec<u64> =
                        c.iter().filter(|term| term.truth.is_const().is_none()).map(|term| term.coef).collect();
                    cs.sort_unstable();
                    cs
                })
                .collect();
            coef_sets.sort();
            coef_sets.dedup();
            for cs in coef_sets {
                pool.extend(decompose::fixed_coefficients(values, &cs, w, cfg.equal_term_budget));
            }
        }
    }

    // Cheap pre-ranking by term count and bitwise size keeps the number of
    // fully scored candidates bounded.
    let mut scored: Vec<(usize, usize, Vec<Term>)> =
        pool.into_iter().map(|c| (c.len(), synth.cost(&c), c)).collect();
    scored.sort_by_key(|s| (s.0, s.1));
    let mut per_len: HashMap<usize, usize> = HashMap::new();
    for (len, _, terms) in scored {
        let seen = per_len.entry(len).or_default();
        if *seen >= SHORTLIST {
            continue;
        }
        *seen += 1;
        if let Some(lc) = synth.combination(&terms) {
            best.offer(lc.to_expr(w));
        }
    }
    best.finish()
}

/// Running minimum under the metric order, ties broken by canonical order.
pub(crate) struct Best<'c> {
    cfg: &'c LinearConfig,
    best: Option<(Vec<usize>, Expr)>,
}

impl<'c> Best<'c> {
    pub fn new(cfg: &'c LinearConfig) -> Self {
        Best { cfg, best: None }
    }

    pub fn offer(&mut self, e: Expr) {
        let key = self.cfg.metric.key(&e, self.cfg.width);
        let better = match &self.best {
            None => true,
            Some((k, b)) => (&key, &e) < (k, b),
        };
        if better {
            self.best = Some((key, e));
        }
    }

    pub fn finish(self) -> Expr {
        self.best.expect("at least one candidate").1
    }
}

/// Metric-best combination of at most two bitwise expressions (a constant
/// counts as one), if `f` has one.
pub fn decompose_two_terms(f: &ResultVector, metric: &MetricOrder) -> Option<LinearCombination> {
    let w = f.width;
    let cfg = LinearConfig { width: w, metric: metric.clone(), ..LinearConfig::default() };
    let mut synth = Synth::new(&f.vars, w, cfg.max_synthesis_vars);
    if f.is_zero() {
        return Some(LinearCombination::default());
    }
    let values = &f.values;
    let mut pool: Vec<Vec<Term>> = Vec::new();
    pool.extend(decompose::single_negated(values, w));
    pool.extend(decompose::unnegated(values, w, 2, cfg.decomposition_budget));
    pool.extend(decompose::negated(values, w, cfg.decomposition_budget, false));
    if f.t() <= 2 {
        pool.extend(decompose::exhaustive(values, w, 3));
    }
    pool.retain(|c| c.len() <= 2);
    let mut best: Option<(Vec<usize>, Expr, LinearCombination)> = None;
    for terms in pool {
        let Some(lc) = synth.combination(&terms) else { continue };
        let e = lc.to_expr(w);
        let key = metric.key(&e, w);
        if best.as_ref().is_none_or(|(k, b, _)| (&key, &e) < (k, b)) {
            best = Some((key, e, lc));
        }
    }
    best.map(|(_, _, lc)| lc)
}

/// Combinations of a plain and a negated bitwise expression, or of two
/// negated ones, for vectors with three or four distinct values and a
/// nonzero first entry. Empty otherwise.
pub fn decompose_with_negations(f: &ResultVector) -> Vec<LinearCombination> {
    let w = f.width;
    let mut synth = Synth::new(&f.vars, w, LinearConfig::default().max_synthesis_vars);
    decompose::negated(&f.values, w, LinearConfig::default().decomposition_budget, true)
        .into_iter()
        .filter_map(|terms| synth.combination(&terms))
        .collect()
}
