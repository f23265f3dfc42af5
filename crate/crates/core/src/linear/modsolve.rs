//! Linear systems over the integers modulo `2^n`.
//!
//! Elimination to a diagonal form: each step picks the pivot with the fewest
//! trailing zero bits, so every other entry in its row and column is a
//! multiple of it and can be cleared exactly.

use crate::expr::Width;

/// Finds `x` with `A·x = b (mod 2^n)`, where `a` holds the rows of `A`.
/// Free variables are set to zero.
pub fn solve(a: &[Vec<u64>], b: &[u64], w: Width) -> Option<Vec<u64>> {
    let m = a.len();
    let k = if m == 0 { 0 } else { a[0].len() };
    let mut a: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|&v| w.reduce(v)).collect()).collect();
    let mut b: Vec<u64> = b.iter().map(|&v| w.reduce(v)).collect();
    // Column operations are tracked in `v` so that x = v·y.
    let mut v: Vec<Vec<u64>> = (0..k).map(|i| (0..k).map(|j| u64::from(i == j)).collect()).collect();
    let mut shifts = Vec::new();
    let rank_bound = m.min(k);
    let mut r = 0;
    while r < rank_bound {
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(r) {
            for (j, &val) in row.iter().enumerate().skip(r) {
                if val != 0 {
                    let tz = val.trailing_zeros();
                    if best.is_none_or(|(bt, _, _)| tz < bt) {
                        best = Some((tz, i, j));
                    }
                }
            }
        }
        let Some((s, pi, pj)) = best else { break };
        a.swap(r, pi);
        b.swap(r, pi);
        for row in a.iter_mut() {
            row.swap(r, pj);
        }
        for row in v.iter_mut() {
            row.swap(r, pj);
        }
        let odd = a[r][r] >> s;
        let inv = w.inverse(odd).expect("odd part is invertible");
        for val in a[r].iter_mut() {
            *val = w.mul(*val, inv);
        }
        b[r] = w.mul(b[r], inv);
        for i in 0..m {
            if i != r && a[i][r] != 0 {
                let q = a[i][r] >> s;
                for j in 0..k {
                    let d = w.mul(q, a[r][j]);
                    a[i][j] = w.sub(a[i][j], d);
                }
                b[i] = w.sub(b[i], w.mul(q, b[r]));
            }
        }
        for j in 0..k {
            if j != r && a[r][j] != 0 {
                let q = a[r][j] >> s;
                for row in a.iter_mut() {
                    let d = w.mul(q, row[r]);
                    row[j] = w.sub(row[j], d);
                }
                for row in v.iter_mut() {
                    let d = w.mul(q, row[r]);
                    row[j] = w.sub(row[j], d);
                }
            }
        }
        shifts.push(s);
        r += 1;
    }
    let rank = r;
    if b[rank..].iter().any(|&x| x != 0) {
        return None;
    }
    let mut y = vec![0u64; k];
    for (i, &s) in shifts.iter().enumerate() {
        if s > 0 && b[i].trailing_zeros() < s {
            return None;
        }
        y[i] = b[i] >> s;
    }
    let x = (0..k)
        .map(|i| (0..k).fold(0u64, |acc, j| w.add(acc, w.mul(v[i][j], y[j]))))
        .collect();
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn apply(a: &[Vec<u64>], x: &[u64], w: Width) -> Vec<u64> {
        a.iter()
            .map(|row| row.iter().zip(x).fold(0, |acc, (&p, &q)| w.add(acc, w.mul(p, q))))
            .collect()
    }

    #[test]
    fn solvable_and_unsolvable() {
        let w = Width::new(8).unwrap();
        let a = vec![vec![2, 4], vec![6, 3]];
        let b = vec![10, 15];
        let x = solve(&a, &b, w).unwrap();
        assert_eq!(apply(&a, &x, w), b);
        // 2x = 1 has no solution modulo 2^8
        assert!(solve(&[vec![2]], &[1], w).is_none());
        // inconsistent overdetermined system
        assert!(solve(&[vec![1], vec![1]], &[1, 2], w).is_none());
    }

    #[test]
    fn exhaustive_small_systems() {
        // Every 2x2 system over Z/16 with a right-hand side in the image is solved.
        let w = Width::new(4).unwrap();
        for seed in 0..4096u64 {
            let a = vec![vec![seed & 15, (seed >> 4) & 15], vec![(seed >> 8) & 15, (seed * 7 + 3) & 15]];
            let mut image = std::collections::HashSet::new();
            for x0 in 0..16 {
                for x1 in 0..16 {
                    image.insert(apply(&a, &[x0, x1], w));
                }
            }
            for b0 in 0..16 {
                for b1 in 0..16 {
                    let b = vec![b0, b1];
                    match solve(&a, &b, w) {
                        Some(x) => assert_eq!(apply(&a, &x, w), b),
                        None => assert!(!image.contains(&b), "missed solution for {a:?} {b:?}"),
                    }
                }
            }
        }
    }
}
