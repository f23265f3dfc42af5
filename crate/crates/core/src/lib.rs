//! Simplification of mixed Boolean-arithmetic (MBA) expressions.
//!
//! The crate is organised bottom-up:
//!
//! - [`expr`]: the AST, parser, printer, metrics and classification;
//! - [`boolfunc`]: truth tables, Quine–McCluskey synthesis and bitwise
//!   refinement;
//! - [`linear`]: simplification of expressions that are equivalent to a
//!   linear combination of bitwise expressions;
//! - [`pipeline`]: the general simplifier for polynomial and mixed inputs;
//! - [`verify`]: equivalence checking of a result against a reference;
//! - [`harness`]: dataset loading, batch runs and reports.
//!
//! ```
//! use mbasimp::expr::{parse, print, Width};
//! use mbasimp::pipeline::{simplify_general, SimplifyConfig};
//!
//! let w = Width::W64;
//! let e = parse("(x&y)+(x|y)", w).unwrap();
//! let s = simplify_general(&e, &SimplifyConfig::default());
//! assert_eq!(print(&s.expr, w), "x+y");
//! ```

pub mod expr;
pub mod boolfunc;
pub mod linear;
pub mod pipeline;
pub mod verify;
pub mod harness;
pub mod sample;
