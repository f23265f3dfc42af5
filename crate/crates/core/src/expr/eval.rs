//! Evaluation under modular semantics.
//!
//! [`eval`] walks the tree directly. [`Program`] compiles an expression to a
//! postfix instruction list over a fixed variable order, which is much faster
//! when the same expression is evaluated on many assignments, and supports
//! batched (structure-of-arrays) evaluation.

use std::collections::HashMap;

use super::{Expr, Name, Width};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
}

/// Evaluates `e` with variables looked up in `env`.
pub fn eval(e: &Expr, env: &HashMap<String, u64>, w: Width) -> Result<u64, EvalError> {
    eval_with(e, &|n| env.get(n).copied(), w)
}

pub fn eval_with(
    e: &Expr,
    env: &dyn Fn(&str) -> Option<u64>,
    w: Width,
) -> Result<u64, EvalError> {
    let v = match e {
        Expr::Const(c) => *c,
        Expr::Var(n) => env(n).ok_or_else(|| EvalError::Unbound(n.to_string()))?,
        Expr::Not(c) => !eval_with(c, env, w)?,
        Expr::Sum(ts) => {
            let mut acc = 0u64;
            for t in ts {
                acc = acc.wrapping_add(eval_with(t, env, w)?);
            }
            acc
        }
        Expr::Product(fs) => {
            let mut acc = 1u64;
            for f in fs {
                acc = acc.wrapping_mul(eval_with(f, env, w)?);
            }
            acc
        }
        Expr::Power(b, x) => {
            let b = eval_with(b, env, w)?;
            let x = eval_with(x, env, w)?;
            w.pow(b, x)
        }
        Expr::And(os) => {
            let mut acc = u64::MAX;
            for o in os {
                acc &= eval_with(o, env, w)?;
            }
            acc
        }
        Expr::Or(os) => {
            let mut acc = 0;
            for o in os {
                acc |= eval_with(o, env, w)?;
            }
            acc
        }
        Expr::Xor(os) => {
            let mut acc = 0;
            for o in os {
                acc ^= eval_with(o, env, w)?;
            }
            acc
        }
    };
    Ok(w.reduce(v))
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Const(u64),
    Var(usize),
    Not,
    Sum(usize),
    Product(usize),
    Power,
    And(usize),
    Or(usize),
    Xor(usize),
}

/// An expression compiled against a fixed variable order.
#[derive(Clone, Debug)]
pub struct Program {
    ops: Vec<Op>,
    max_stack: usize,
    arity: usize,
}

/// Lane count of one batch in [`Program::run_batch`].
pub const BATCH: usize = 256;

impl Program {
    /// Compiles `e`; every variable of `e` must occur in `vars`.
    pub fn compile(e: &Expr, vars: &[Name]) -> Result<Program, EvalError> {
        let mut ops = Vec::with_capacity(e.node_count());
        emit(e, vars, &mut ops)?;
        let mut depth = 0usize;
        let mut max_stack = 0usize;
        for op in &ops {
            match op {
                Op::Const(_) | Op::Var(_) => depth += 1,
                Op::Not => {}
                Op::Power => depth -= 1,
                Op::Sum(k) | Op::Product(k) | Op::And(k) | Op::Or(k) | Op::Xor(k) => {
                    depth -= k - 1
                }
            }
            max_stack = max_stack.max(depth);
        }
        Ok(Program { ops, max_stack, arity: vars.len() })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn run(&self, args: &[u64], w: Width) -> u64 {
        let mut stack = Vec::with_capacity(self.max_stack);
        self.run_with(args, w, &mut stack)
    }

    /// Like [`Program::run`] but reuses the caller's stack buffer.
    pub fn run_with(&self, args: &[u64], w: Width, stack: &mut Vec<u64>) -> u64 {
        stack.clear();
        for op in &self.ops {
            match *op {
                Op::Const(c) => stack.push(c),
                Op::Var(i) => stack.push(args[i]),
                Op::Not => {
                    let top = stack.last_mut().unwrap();
                    *top = !*top;
                }
                Op::Power => {
                    let x = stack.pop().unwrap();
                    let b = stack.last_mut().unwrap();
                    *b = w.pow(*b, w.reduce(x));
                }
                Op::Sum(k) => fold(stack, k, |a, b| a.wrapping_add(b)),
                Op::Product(k) => fold(stack, k, |a, b| a.wrapping_mul(b)),
                Op::And(k) => fold(stack, k, |a, b| a & b),
                Op::Or(k) => fold(stack, k, |a, b| a | b),
                Op::Xor(k) => fold(stack, k, |a, b| a ^ b),
            }
        }
        w.reduce(stack.pop().unwrap_or(0))
    }

    /// Evaluates on `lanes` assignments at once. `args[v]` holds the values
    /// of variable `v` for every lane; the result is written to `out`.
    pub fn run_batch(&self, args: &[&[u64]], lanes: usize, w: Width, out: &mut [u64]) {
        let mut scratch = BatchScratch::default();
        self.run_batch_with(args, lanes, w, out, &mut scratch);
    }

    pub fn run_batch_with(
        &self,
        args: &[&[u64]],
        lanes: usize,
        w: Width,
        out: &mut [u64],
        scratch: &mut BatchScratch,
    ) {
        assert!(lanes <= BATCH);
        let need = self.max_stack.max(1);
        if scratch.slots.len() < need {
            scratch.slots.resize(need, [0u64; BATCH]);
        }
        let slots = &mut scratch.slots;
        let mut sp = 0usize;
        for op in &self.ops {
            match *op {
                Op::Const(c) => {
                    slots[sp][..lanes].fill(c);
                    sp += 1;
                }
                Op::Var(i) => {
                    slots[sp][..lanes].copy_from_slice(&args[i][..lanes]);
                    sp += 1;
                }
                Op::Not => {
                    for v in &mut slots[sp - 1][..lanes] {
                        *v = !*v;
                    }
                }
                Op::Power => {
                    sp -= 1;
                    let (lo, hi) = slots.split_at_mut(sp);
                    let b = &mut lo[sp - 1];
                    for (bv, &xv) in b[..lanes].iter_mut().zip(&hi[0][..lanes]) {
                        *bv = w.pow(*bv, w.reduce(xv));
                    }
                }
                Op::Sum(k) => sp = batch_fold(slots, sp, k, lanes, |a, b| a.wrapping_add(b)),
                Op::Product(k) => sp = batch_fold(slots, sp, k, lanes, |a, b| a.wrapping_mul(b)),
                Op::And(k) => sp = batch_fold(slots, sp, k, lanes, |a, b| a & b),
                Op::Or(k) => sp = batch_fold(slots, sp, k, lanes, |a, b| a | b),
                Op::Xor(k) => sp = batch_fold(slots, sp, k, lanes, |a, b| a ^ b),
            }
        }
        let mask = w.mask();
        for (o, v) in out[..lanes].iter_mut().zip(&slots[0][..lanes]) {
            *o = v & mask;
        }
    }
}

/// Reusable buffers for [`Program::run_batch_with`].
#[derive(Default, Clone)]
pub struct BatchScratch {
    slots: Vec<[u64; BATCH]>,
}

fn fold(stack: &mut Vec<u64>, k: usize, f: impl Fn(u64, u64) -> u64) {
    let base = stack.len() - k;
    let mut acc = stack[base];
    for &v in &stack[base + 1..] {
        acc = f(acc, v);
    }
    stack.truncate(base);
    stack.push(acc);
}

#[inline]
fn batch_fold(
    slots: &mut [[u64; BATCH]],
    sp: usize,
    k: usize,
    lanes: usize,
    f: impl Fn(u64, u64) -> u64 + Copy,
) -> usize {
    let base = sp - k;
    let (lo, hi) = slots.split_at_mut(base + 1);
    let acc = &mut lo[base];
    for src in &hi[..k - 1] {
        for (a, &b) in acc[..lanes].iter_mut().zip(&src[..lanes]) {
            *a = f(*a, b);
        }
    }
    base + 1
}

fn emit(e: &Expr, vars: &[Name], ops: &mut Vec<Op>) -> Result<(), EvalError> {
    match e {
        Expr::Const(c) => ops.push(Op::Const(*c)),
        Expr::Var(n) => {
            let i = vars
                .iter()
                .position(|v| v == n)
                .ok_or_else(|| EvalError::Unbound(n.to_string()))?;
            ops.push(Op::Var(i));
        }
        Expr::Not(c) => {
            emit(c, vars, ops)?;
            ops.push(Op::Not);
        }
        Expr::Power(b, x) => {
            emit(b, vars, ops)?;
            emit(x, vars, ops)?;
            ops.push(Op::Power);
        }
        Expr::Sum(v) | Expr::Product(v) | Expr::And(v) | Expr::Or(v) | Expr::Xor(v) => {
            for o in v {
                emit(o, vars, ops)?;
            }
            let k = v.len();
            ops.push(match e {
                Expr::Sum(_) => Op::Sum(k),
                Expr::Product(_) => Op::Product(k),
                Expr::And(_) => Op::And(k),
                Expr::Or(_) => Op::Or(k),
                _ => Op::Xor(k),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn env(pairs: &[(&str, u64)]) -> HashMap<String, u64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn non_linear_counterexample_value() {
        let w = Width::W64;
        let e3 = parse("(x&y)*(x|y)+(x&~y)*(~x&y)", w).unwrap();
        assert_eq!(eval(&e3, &env(&[("x", 1), ("y", 2)]), w).unwrap(), 2);
        let l = parse("x&y", w).unwrap();
        assert_eq!(eval(&l, &env(&[("x", 1), ("y", 2)]), w).unwrap(), 0);
    }

    #[test]
    fn xor_self_is_zero() {
        let w = Width::new(16).unwrap();
        let e = Expr::Xor(vec![Expr::var("x"), Expr::var("x")]);
        for x in [0u64, 1, 77, 65535] {
            assert_eq!(eval(&e, &env(&[("x", x)]), w).unwrap(), 0);
        }
    }

    #[test]
    fn unbound_variable_is_an_error() {
        let w = Width::W64;
        let e = parse("x+y", w).unwrap();
        assert_eq!(
            eval(&e, &env(&[("x", 1)]), w),
            Err(EvalError::Unbound("y".into()))
        );
    }

    #[test]
    fn program_matches_tree_walk() {
        let w = Width::new(8).unwrap();
        let e = parse("3*(x^~y)**2 - (x|5)*y + ~(x&y) + x**y", w).unwrap();
        let vars = e.vars();
        let p = Program::compile(&e, &vars).unwrap();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for x in 0..16u64 {
            for y in 0..16u64 {
                let direct = eval(&e, &env(&[("x", x), ("y", y)]), w).unwrap();
                assert_eq!(p.run(&[x, y], w), direct);
                xs.push(x);
                ys.push(y);
            }
        }
        let mut out = vec![0u64; 256];
        p.run_batch(&[&xs, &ys], 256, w, &mut out);
        for i in 0..256 {
            assert_eq!(out[i], p.run(&[xs[i], ys[i]], w));
        }
    }
}
