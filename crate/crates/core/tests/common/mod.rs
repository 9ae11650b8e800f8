#![allow(dead_code)]

use bell_bounds::polytope::{Inequality, TermKey};
use num_rational::Rational64;

/// Relabels events by `perm` (`perm[i - 1]` is the new index of event `i`).
pub fn relabel(ineq: &Inequality, perm: &[usize]) -> Inequality {
    let map = |i: usize| perm[i - 1];
    let coeffs = ineq.coeffs().iter().map(|(&k, &c)| {
        let k = match k {
            TermKey::Single(i) => TermKey::Single(map(i)),
            TermKey::Joint(i, j) => TermKey::joint(map(i), map(j)),
        };
        (k, c)
    });
    Inequality::new(coeffs, ineq.lower(), ineq.upper()).unwrap()
}

/// One-sided pieces of a (possibly two-sided) inequality, canonicalized.
pub fn sides(ineq: &Inequality) -> Vec<Inequality> {
    let mut out = Vec::new();
    if let Some(l) = ineq.lower() {
        out.push(
            Inequality::new(ineq.coeffs().clone(), Some(l), None)
                .unwrap()
                .canonical(),
        );
    }
    if let Some(u) = ineq.upper() {
        out.push(
            Inequality::new(ineq.coeffs().clone(), None, Some(u))
                .unwrap()
                .canonical(),
        );
    }
    out
}

/// Setting swaps within each side and, for equal side sizes, the exchange of
/// the two observers, for a bipartite structure with `n` settings per side.
pub fn bipartite_symmetries(n: usize) -> Vec<Vec<usize>> {
    let perms = permutations(n);
    let mut out = Vec::new();
    for p in &perms {
        for q in &perms {
            let base: Vec<usize> = p.iter().map(|&x| x + 1).chain(q.iter().map(|&x| x + n + 1)).collect();
            let exchanged: Vec<usize> = q.iter().map(|&x| x + n + 1).chain(p.iter().map(|&x| x + 1)).collect();
            out.push(base);
            out.push(exchanged);
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn int(x: i64) -> Rational64 {
    Rational64::from_integer(x)
}
