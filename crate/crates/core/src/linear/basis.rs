//! Result vectors and the conjunction basis.

use super::{LinearCombination, ResultVector};
use crate::expr::{and, EvalError, Expr, Name, Program, Width};

/// Evaluates `e` on all `2^t` assignments of 0 and 1 to `vars`.
pub fn result_vector(e: &Expr, vars: &[Name], w: Width) -> Result<ResultVector, EvalError> {
    let prog = Program::compile(e, vars)?;
    let t = vars.len();
    let mut args = vec![0u64; t];
    let mut stack = Vec::new();
    let values = (0..1usize << t)
        .map(|i| {
            for (j, a) in args.iter_mut().enumerate() {
                *a = ((i >> j) & 1) as u64;
            }
            prog.run_with(&args, w, &mut stack)
        })
        .collect();
    Ok(ResultVector { vars: vars.to_vec(), values, width: w })
}

/// Coefficients `a_S` with `F[i] = Σ_{S ⊆ i} a_S`, indexed by the subset's
/// bit mask; `a_0` is the constant.
pub fn conjunction_coefficients(values: &[u64], w: Width) -> Vec<u64> {
    let mut a = values.to_vec();
    let n = a.len();
    let mut bit = 1;
    while bit < n {
        for i in 0..n {
            if i & bit != 0 {
                a[i] = w.sub(a[i], a[i ^ bit]);
            }
        }
        bit <<= 1;
    }
    a
}

/// Inverse of [`conjunction_coefficients`].
pub fn subset_sums(coefs: &[u64], w: Width) -> Vec<u64> {
    let mut f = coefs.to_vec();
    let n = f.len();
    let mut bit = 1;
    while bit < n {
        for i in 0..n {
            if i & bit != 0 {
                f[i] = w.add(f[i], f[i ^ bit]);
            }
        }
        bit <<= 1;
    }
    f
}

pub(crate) fn conjunction(mask: usize, vars: &[Name], w: Width) -> Expr {
    let ops = (0..vars.len())
        .filter(|j| mask >> j & 1 == 1)
        .map(|j| Expr::Var(vars[j].clone()))
        .collect();
    and(ops, w)
}

/// The linear combination of conjunctions of variables (plus a constant)
/// whose result vector is `f`. Terms are ordered by subset mask.
pub fn conjunction_basis(f: &ResultVector) -> LinearCombination {
    let w = f.width;
    let a = conjunction_coefficients(&f.values, w);
    let mut terms = Vec::new();
    for (mask, &c) in a.iter().enumerate().skip(1) {
        if c != 0 {
            terms.push((c, conjunction(mask, &f.vars, w)));
        }
    }
    if a[0] != 0 {
        // The constant is carried as a multiple of the all-ones expression.
        terms.push((w.neg(a[0]), Expr::Const(w.minus_one())));
    }
    LinearCombination { terms }
}

/// Variables (as a bit mask over `f.vars`) with a nonzero coefficient in the
/// conjunction basis, i.e. the variables `f` actually depends on.
pub fn used_variables(f: &ResultVector) -> usize {
    let a = conjunction_coefficients(&f.values, f.width);
    a.iter().enumerate().filter(|(_, &c)| c != 0).fold(0, |acc, (m, _)| acc | m)
}

/// Restriction of `f` to the variables in `mask`, others fixed to zero.
pub fn restrict(f: &ResultVector, mask: usize) -> ResultVector {
    let positions: Vec<usize> = (0..f.vars.len()).filter(|j| mask >> j & 1 == 1).collect();
    let vars = positions.iter().map(|&j| f.vars[j].clone()).collect();
    let values = (0..1usize << positions.len())
        .map(|i| {
            let full = positions.iter().enumerate().fold(0usize, |acc, (k, &j)| acc | ((i >> k) & 1) << j);
            f.values[full]
        })
        .collect();
    ResultVector { vars, values, width: f.width }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn names(s: &[&str]) -> Vec<Name> {
        s.iter().map(|n| Name::from(*n)).collect()
    }

    #[test]
    fn vectors() {
        let w = Width::W64;
        let f = result_vector(&parse("x+y-z", w).unwrap(), &names(&["x", "y", "z"]), w).unwrap();
        let expect: Vec<u64> = [0i64, 1, 1, 2, -1, 0, 0, 1].iter().map(|&v| w.from_i64(v)).collect();
        assert_eq!(f.values, expect);
        let f = result_vector(&parse("x^y^z", w).unwrap(), &names(&["x", "y", "z"]), w).unwrap();
        assert_eq!(f.values, vec![0, 1, 1, 0, 1, 0, 0, 1]);
        let f = result_vector(&Expr::Const(0), &names(&["x", "y"]), w).unwrap();
        assert_eq!(f.values, vec![0; 4]);
    }

    #[test]
    fn basis_round_trip() {
        let w = Width::new(16).unwrap();
        let vars = names(&["x", "y", "z"]);
        let e = parse("3*(x|~y)-(x^z)+7*~(x&y&z)", w).unwrap();
        let f = result_vector(&e, &vars, w).unwrap();
        let lc = conjunction_basis(&f);
        assert_eq!(lc.result_vector(&vars, w).unwrap(), f);
        assert_eq!(subset_sums(&conjunction_coefficients(&f.values, w), w), f.values);
    }

    #[test]
    fn restriction_drops_unused() {
        let w = Width::W64;
        let vars = names(&["a", "x", "y"]);
        let e = parse("x+(a&0)+2*y", w).unwrap();
        let f = result_vector(&e, &vars, w).unwrap();
        assert_eq!(used_variables(&f), 0b110);
        let g = restrict(&f, 0b110);
        assert_eq!(g.vars, names(&["x", "y"]));
        assert_eq!(g.values, vec![0, 1, 2, 3]);
    }
}
