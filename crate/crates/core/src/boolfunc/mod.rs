//! Boolean functions: truth tables, two-level synthesis and refinement of
//! bitwise expressions.

mod qm;
mod refine;

pub use qm::{prime_implicants, quine_mccluskey, Cube, MAX_QM_VARS};
pub use refine::{bitwise_refine, complement, simplify_bitwise_node};

use crate::expr::{Expr, Name, Program, Width};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoolFuncError {
    #[error("truth table length {0} is not a power of two")]
    BadLength(usize),
    #[error("{0} variables exceed the synthesis limit of {max}", max = MAX_QM_VARS)]
    Capacity(usize),
    #[error("expression is not bitwise or uses unlisted variables")]
    NotBitwise,
}

/// Values of a Boolean function on all `2^t` inputs. Entry `i` is the value
/// at the assignment where variable `j` equals bit `j` of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruthTable {
    t: usize,
    bits: Vec<bool>,
}

impl TruthTable {
    pub fn new(bits: Vec<bool>) -> Result<Self, BoolFuncError> {
        let len = bits.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(BoolFuncError::BadLength(len));
        }
        Ok(TruthTable { t: len.trailing_zeros() as usize, bits })
    }

    pub fn from_fn(t: usize, f: impl FnMut(usize) -> bool) -> Self {
        TruthTable { t, bits: (0..1usize << t).map(f).collect() }
    }

    /// Table of a `t`-variable function given by its index `Σ T[i]·2^i`.
    pub fn from_index(t: usize, index: u64) -> Self {
        assert!(t <= 6);
        Self::from_fn(t, |i| (index >> i) & 1 == 1)
    }

    /// Evaluates a bitwise expression at width 1.
    pub fn from_expr(e: &Expr, vars: &[Name]) -> Result<Self, BoolFuncError> {
        let w = Width::new(1).unwrap();
        let prog = Program::compile(e, vars).map_err(|_| BoolFuncError::NotBitwise)?;
        let t = vars.len();
        let mut args = vec![0u64; t];
        Ok(Self::from_fn(t, |i| {
            for (j, a) in args.iter_mut().enumerate() {
                *a = ((i >> j) & 1) as u64;
            }
            prog.run(&args, w) == 1
        }))
    }

    pub fn vars(&self) -> usize {
        self.t
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// `Σ T[i]·2^i`, defined for up to six variables.
    pub fn index(&self) -> Option<u64> {
        if self.bits.len() > 64 {
            return None;
        }
        Some(self.bits.iter().enumerate().map(|(i, &b)| (b as u64) << i).sum())
    }

    pub fn complement(&self) -> Self {
        TruthTable { t: self.t, bits: self.bits.iter().map(|b| !b).collect() }
    }

    pub fn is_const(&self) -> Option<bool> {
        let first = self.bits[0];
        self.bits.iter().all(|&b| b == first).then_some(first)
    }

    pub fn minterms(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }
}
