//! Random expression generators for tests, benchmarks and synthetic
//! datasets. All of them are deterministic given the RNG state.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::expr::{and, constant, not, or, power, product, sum, xor, Expr, Name, Width};
use crate::linear::{conjunction_coefficients, result_vector};
use crate::pipeline::expand;

pub fn names(vars: &[&str]) -> Vec<Name> {
    vars.iter().map(|v| Name::from(*v)).collect()
}

/// A random bitwise expression with at most `depth` levels of operators.
pub fn bitwise<R: Rng>(rng: &mut R, vars: &[Name], depth: usize, w: Width) -> Expr {
    if depth == 0 || rng.gen_ratio(1, 4) {
        let v = Expr::Var(vars.choose(rng).unwrap().clone());
        return if rng.gen_ratio(1, 3) { not(v, w) } else { v };
    }
    let a = bitwise(rng, vars, depth - 1, w);
    let b = bitwise(rng, vars, depth - 1, w);
    let e = match rng.gen_range(0..3) {
        0 => and(vec![a, b], w),
        1 => or(vec![a, b], w),
        _ => xor(vec![a, b], w),
    };
    if rng.gen_ratio(1, 5) {
        not(e, w)
    } else {
        e
    }
}

fn small_coefficient<R: Rng>(rng: &mut R, max: i64, w: Width) -> u64 {
    let mut c = 0;
    while c == 0 {
        c = rng.gen_range(-max..=max);
    }
    w.from_i64(c)
}

/// A short linear MBA: one or two bitwise terms with small coefficients,
/// sometimes with a constant.
pub fn simple_linear<R: Rng>(rng: &mut R, vars: &[Name], w: Width) -> Expr {
    let mut terms = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let b = bitwise(rng, vars, 2, w);
        terms.push(product(vec![Expr::Const(small_coefficient(rng, 3, w)), b], w));
    }
    if rng.gen_ratio(1, 4) {
        terms.push(Expr::Const(small_coefficient(rng, 9, w)));
    }
    sum(terms, w)
}

/// A linear MBA with the values of `truth` on all 0/1 inputs, written as
/// `extra` random bitwise terms with random coefficients, compensated by
/// terms of the conjunction basis.
pub fn obfuscate<R: Rng>(rng: &mut R, truth: &Expr, vars: &[Name], extra: usize, w: Width) -> Expr {
    let target = result_vector(truth, vars, w).expect("variables are bound");
    let mut coefs = conjunction_coefficients(&target.values, w);
    let mut terms = Vec::new();
    for _ in 0..extra {
        let b = bitwise(rng, vars, 2, w);
        let k = small_coefficient(rng, 7, w);
        let f = result_vector(&b, vars, w).expect("variables are bound");
        for (c, d) in coefs.iter_mut().zip(conjunction_coefficients(&f.values, w)) {
            *c = w.sub(*c, w.mul(k, d));
        }
        terms.push(product(vec![Expr::Const(k), b], w));
    }
    for (mask, &c) in coefs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        if mask == 0 {
            terms.push(Expr::Const(c));
            continue;
        }
        let conj = (0..vars.len()).filter(|j| mask >> j & 1 == 1).map(|j| Expr::Var(vars[j].clone())).collect();
        terms.push(product(vec![Expr::Const(c), and(conj, w)], w));
    }
    terms.shuffle(rng);
    sum(terms, w)
}

/// A random linear MBA over `vars` with 5 to 15 terms and its ground truth.
pub fn linear_mba<R: Rng>(rng: &mut R, vars: &[Name], w: Width) -> (Expr, Expr) {
    let truth = simple_linear(rng, vars, w);
    let target_terms = rng.gen_range(5..=15usize);
    let extra = target_terms.saturating_sub(1 << vars.len()).max(2);
    (obfuscate(rng, &truth, vars, extra, w), truth)
}

/// The expanded product of a random linear MBA and a linear MBA equivalent
/// to 1, with the ground truth of the first factor.
pub fn product_with_one<R: Rng>(rng: &mut R, vars: &[Name], w: Width) -> (Expr, Expr) {
    let truth = simple_linear(rng, vars, w);
    let extra = rng.gen_range(1..=3);
    let left = obfuscate(rng, &truth, vars, extra, w);
    let extra_one = rng.gen_range(1..=2);
    let one = obfuscate(rng, &Expr::Const(1), vars, extra_one, w);
    let p = product(vec![left, one], w);
    (expand(&p, 4096, w).unwrap_or(p), truth)
}

/// A random expression over all operators with small constants.
pub fn fuzz<R: Rng>(rng: &mut R, vars: &[Name], depth: usize, w: Width) -> Expr {
    if depth == 0 || rng.gen_ratio(1, 5) {
        return if rng.gen_ratio(1, 5) {
            constant(w.from_i64(rng.gen_range(-4..=7)), w)
        } else {
            Expr::Var(vars.choose(rng).unwrap().clone())
        };
    }
    let mut sub = || fuzz(rng, vars, depth - 1, w);
    let (a, b) = (sub(), sub());
    match rng.gen_range(0..16) {
        0..=2 => sum(vec![a, b], w),
        3 => sum(vec![a, product(vec![Expr::Const(w.minus_one()), b], w)], w),
        4..=5 => product(vec![a, b], w),
        6..=7 => and(vec![a, b], w),
        8..=9 => or(vec![a, b], w),
        10..=11 => xor(vec![a, b], w),
        12..=13 => not(a, w),
        14 => product(vec![Expr::Const(w.from_i64(rng.gen_range(-3..=3))), a], w),
        _ => power(a, Expr::Const(2), w),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn obfuscation_keeps_values() {
        let w = Width::W64;
        let vars = names(&["x", "y", "z"]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let (e, gt) = linear_mba(&mut rng, &vars, w);
            assert_eq!(result_vector(&e, &vars, w).unwrap(), result_vector(&gt, &vars, w).unwrap());
            let (p, gt) = product_with_one(&mut rng, &vars, w);
            assert!(crate::verify::random_equivalence(&p, &gt, w, 200, 1).is_none());
        }
    }
}
