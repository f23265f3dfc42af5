//! Bottom-up classification into bitwise, linear and nonlinear expressions.

use super::{Expr, Width};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Bitwise,
    Linear,
    Nonlinear,
}

impl Classification {
    /// Bitwise expressions are linear combinations with a single term.
    pub fn is_linear(self) -> bool {
        self != Classification::Nonlinear
    }
}

pub fn classify(e: &Expr, w: Width) -> Classification {
    use Classification::*;
    match e {
        Expr::Var(_) => Bitwise,
        Expr::Const(c) => {
            if *c == 0 || *c == w.minus_one() {
                Bitwise
            } else {
                Linear
            }
        }
        Expr::Not(c) => {
            if classify(c, w) == Bitwise {
                Bitwise
            } else {
                Nonlinear
            }
        }
        Expr::And(os) | Expr::Or(os) | Expr::Xor(os) => {
            if os.iter().all(|o| classify(o, w) == Bitwise) {
                Bitwise
            } else {
                Nonlinear
            }
        }
        Expr::Sum(ts) => {
            if ts.iter().any(|t| classify(t, w) == Nonlinear) {
                Nonlinear
            } else {
                Linear
            }
        }
        Expr::Product(fs) => match fs.as_slice() {
            [a, b] => {
                let linear_pair = |c: &Expr, other: &Expr| {
                    matches!(c, Expr::Const(_)) && classify(other, w) != Nonlinear
                };
                if linear_pair(a, b) || linear_pair(b, a) {
                    Linear
                } else {
                    Nonlinear
                }
            }
            _ => Nonlinear,
        },
        Expr::Power(..) => Nonlinear,
    }
}

/// A maximal linear part of an expression. When `group` is set, the site
/// is the listed operands of the sum at `path`, taken together.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSite {
    pub path: Vec<usize>,
    pub group: Option<Vec<usize>>,
    pub expr: Expr,
}

/// Collects maximal non-leaf subtrees classified [`Classification::Linear`].
/// Inside a nonlinear sum, its linear and bitwise terms are reported together
/// as one group when there are at least two of them.
pub fn collect_linear_subtrees(e: &Expr, w: Width) -> Vec<LinearSite> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    collect(e, w, &mut path, &mut out);
    out
}

fn collect(e: &Expr, w: Width, path: &mut Vec<usize>, out: &mut Vec<LinearSite>) {
    if e.is_leaf() {
        return;
    }
    let class = classify(e, w);
    if class == Classification::Linear {
        out.push(LinearSite { path: path.clone(), group: None, expr: e.clone() });
        return;
    }
    if class == Classification::Bitwise {
        return;
    }
    if let Expr::Sum(ts) = e {
        let classes: Vec<_> = ts.iter().map(|t| classify(t, w)).collect();
        let group: Vec<usize> = (0..ts.len()).filter(|&i| classes[i].is_linear()).collect();
        if group.len() >= 2 {
            let terms = group.iter().map(|&i| ts[i].clone()).collect();
            out.push(LinearSite { path: path.clone(), group: Some(group), expr: Expr::Sum(terms) });
        } else {
            for &i in &group {
                if classes[i] == Classification::Linear && !ts[i].is_leaf() {
                    path.push(i);
                    out.push(LinearSite { path: path.clone(), group: None, expr: ts[i].clone() });
                    path.pop();
                }
            }
        }
        for (i, t) in ts.iter().enumerate() {
            if classes[i] == Classification::Nonlinear {
                path.push(i);
                collect(t, w, path, out);
                path.pop();
            }
        }
        return;
    }
    for (i, c) in e.children().into_iter().enumerate() {
        path.push(i);
        collect(c, w, path, out);
        path.pop();
    }
}
