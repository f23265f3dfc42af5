//! Equivalence checking of a simplified expression against a reference.
//!
//! [`check`] proves equality structurally when it can and otherwise falls
//! back to evaluation: exhaustively at a small width, then by random
//! sampling at the full width. A mismatch is always reported with the
//! offending assignment; an evaluation-based "equivalent" is probabilistic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::expr::{canonicalize, neg, sum, Expr, Name, Program, Width};
use crate::pipeline::{simplify_general, SimplifyConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum OutcomeClass {
    Identical,
    Equivalent,
    Unproven,
}

impl OutcomeClass {
    pub fn symbol(self) -> &'static str {
        match self {
            OutcomeClass::Identical => "≡",
            OutcomeClass::Equivalent => "≈",
            OutcomeClass::Unproven => "×",
        }
    }
}

/// Which strategy decided the outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Evidence {
    Structural,
    SimplifiedGroundTruth,
    Difference,
    Evaluation,
    Counterexample,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub assignment: Vec<(String, u64)>,
    pub bits: u32,
    pub left: u64,
    pub right: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub class: OutcomeClass,
    pub evidence: Evidence,
    pub counterexample: Option<Counterexample>,
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub simplify: SimplifyConfig,
    /// Width of the exhaustive check.
    pub reduced_width: Width,
    /// Exhaustive checks needing more evaluations are skipped.
    pub exhaustive_limit: u64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            simplify: SimplifyConfig::default(),
            reduced_width: Width::new(4).unwrap(),
            exhaustive_limit: 1 << 24,
            samples: 10_000,
            seed: 0x5eed,
        }
    }
}

/// Classifies `simplified` against `ground_truth`.
///
/// The reduced-width exhaustive search runs first so that a pair with a
/// known difference is never reported as equal by a structural strategy.
pub fn check(simplified: &Expr, ground_truth: &Expr, cfg: &VerifyConfig) -> Outcome {
    let w = cfg.simplify.width;
    let vars = union_vars(simplified, ground_truth);
    let rw = cfg.reduced_width;
    let work = 1u64.checked_shl(rw.bits() * vars.len() as u32).unwrap_or(u64::MAX);
    if work <= cfg.exhaustive_limit {
        if let Some(cx) = exhaustive_equivalence(&simplified.at_width(rw), &ground_truth.at_width(rw), rw) {
            return unproven(cx);
        }
    }
    let e = canonicalize(simplified);
    if e == canonicalize(ground_truth) {
        return Outcome { class: OutcomeClass::Identical, evidence: Evidence::Structural, counterexample: None };
    }
    let gt = simplify_general(ground_truth, &cfg.simplify).expr;
    if e == gt {
        return Outcome {
            class: OutcomeClass::Identical,
            evidence: Evidence::SimplifiedGroundTruth,
            counterexample: None,
        };
    }
    let diff = sum(vec![simplified.clone(), neg(ground_truth.clone(), w)], w);
    if simplify_general(&diff, &cfg.simplify).expr == Expr::Const(0) {
        return Outcome { class: OutcomeClass::Equivalent, evidence: Evidence::Difference, counterexample: None };
    }
    match random_equivalence(simplified, ground_truth, w, cfg.samples, cfg.seed) {
        Some(cx) => unproven(cx),
        None => Outcome { class: OutcomeClass::Equivalent, evidence: Evidence::Evaluation, counterexample: None },
    }
}

fn unproven(cx: Counterexample) -> Outcome {
    Outcome { class: OutcomeClass::Unproven, evidence: Evidence::Counterexample, counterexample: Some(cx) }
}

fn union_vars(a: &Expr, b: &Expr) -> Vec<Name> {
    let mut vars = a.vars();
    vars.extend(b.vars());
    vars.sort();
    vars.dedup();
    vars
}

struct Pair {
    vars: Vec<Name>,
    left: Program,
    right: Program,
    stack: Vec<u64>,
}

impl Pair {
    fn new(a: &Expr, b: &Expr) -> Pair {
        let vars = union_vars(a, b);
        let left = Program::compile(a, &vars).expect("variables are bound");
        let right = Program::compile(b, &vars).expect("variables are bound");
        Pair { vars, left, right, stack: Vec::new() }
    }

    fn differs(&mut self, args: &[u64], w: Width) -> Option<Counterexample> {
        let l = self.left.run_with(args, w, &mut self.stack);
        let r = self.right.run_with(args, w, &mut self.stack);
        (l != r).then(|| Counterexample {
            assignment: self.vars.iter().map(|v| v.to_string()).zip(args.iter().copied()).collect(),
            bits: w.bits(),
            left: l,
            right: r,
        })
    }
}

/// First assignment (first variable most significant) where the two
/// expressions differ at width `w`, trying all of them.
pub fn exhaustive_equivalence(a: &Expr, b: &Expr, w: Width) -> Option<Counterexample> {
    let mut pair = Pair::new(a, b);
    let t = pair.vars.len();
    let bits = w.bits() as usize;
    assert!(bits * t < 64, "exhaustive check too large");
    let mut args = vec![0u64; t];
    for i in 0..1u64 << (bits * t) {
        for (j, a) in args.iter_mut().enumerate() {
            *a = (i >> (bits * (t - 1 - j))) & w.mask();
        }
        if let Some(cx) = pair.differs(&args, w) {
            return Some(cx);
        }
    }
    None
}

fn sample(rng: &mut ChaCha8Rng, w: Width) -> u64 {
    if rng.gen_ratio(1, 8) {
        let special = [0, 1, 2, w.minus_one(), w.neg(2), 1 << (w.bits() - 1)];
        w.reduce(special[rng.gen_range(0..special.len())])
    } else {
        w.reduce(rng.gen())
    }
}

/// First differing assignment among `samples` pseudo-random ones drawn from
/// `seed`, if any.
pub fn random_equivalence(a: &Expr, b: &Expr, w: Width, samples: usize, seed: u64) -> Option<Counterexample> {
    assert!(samples >= 1, "at least one sample is needed");
    let mut pair = Pair::new(a, b);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut args = vec![0u64; pair.vars.len()];
    for _ in 0..samples {
        for a in args.iter_mut() {
            *a = sample(&mut rng, w);
        }
        if let Some(cx) = pair.differs(&args, w) {
            return Some(cx);
        }
    }
    None
}

/// Cheap check used to guard individual rewrites: sampled evaluation at the
/// full width, plus exhaustive (or sampled, for many variables) evaluation
/// at width 4 so that accepted rewrites do not depend on the width.
pub(crate) fn probably_equal(a: &Expr, b: &Expr, w: Width, samples: usize, seed: u64) -> bool {
    if a == b {
        return true;
    }
    if random_equivalence(a, b, w, samples, seed).is_some() {
        return false;
    }
    let rw = Width::new(4).unwrap();
    if rw.bits() >= w.bits() {
        return true;
    }
    let (ra, rb) = (a.at_width(rw), b.at_width(rw));
    if union_vars(a, b).len() <= 3 {
        exhaustive_equivalence(&ra, &rb, rw).is_none()
    } else {
        random_equivalence(&ra, &rb, rw, 4 * samples, seed ^ 0x9e37).is_none()
    }
}
