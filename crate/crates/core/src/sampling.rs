//! Seeded parameter samples for the verification suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::asymmetry::d_star;
use crate::bounds::BoundParams;
use crate::concordance::closed::{select_case, CaseVars, LOWER_M_CASES, UPPER_W_CASES};
use crate::copula::UnitPoint;

const MAX_TRIES: usize = 1_000_000;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform `(a, b)` and `c` uniform on `[0, min{a, b, 1 − a, 1 − b}]`; every
/// fourth draw puts `c` at the limit, where several branches degenerate.
pub fn random_triple(rng: &mut impl Rng) -> BoundParams {
    loop {
        let a: f64 = rng.random();
        let b: f64 = rng.random();
        if a <= 0.0 || b <= 0.0 {
            continue;
        }
        let limit = a.min(b).min(1.0 - a).min(1.0 - b);
        let c = if rng.random_ratio(1, 4) {
            limit
        } else {
            limit * rng.random::<f64>()
        };
        if let Ok(p) = BoundParams::new(a, b, c) {
            return p;
        }
    }
}

/// Like [`random_triple`] but with `c ≤ d*(a, b)`.
pub fn random_attaining_triple(rng: &mut impl Rng) -> BoundParams {
    loop {
        let a: f64 = rng.random();
        let b: f64 = rng.random();
        if a <= 0.0 || b <= 0.0 {
            continue;
        }
        let c = d_star(UnitPoint { u: a, v: b }) * rng.random::<f64>();
        if let Ok(p) = BoundParams::new(a, b, c) {
            return p;
        }
    }
}

/// Branch of `Q(M, lower)` selected for `p`.
pub fn lower_case(p: &BoundParams) -> usize {
    select_case(
        &LOWER_M_CASES,
        CaseVars {
            a: p.a(),
            b: p.b(),
            d: p.d1(),
        },
    )
}

/// Branch of `Q(W, upper)` selected for `p`.
pub fn upper_case(p: &BoundParams) -> usize {
    select_case(
        &UPPER_W_CASES,
        CaseVars {
            a: p.a(),
            b: p.b(),
            d: p.d2(),
        },
    )
}

/// `count` admissible triples (at least 18) such that every branch of
/// `Q(M, lower)` and of `Q(W, upper)` is selected by at least one triple.
pub fn covering_triples(count: usize, seed: u64) -> Vec<BoundParams> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count.max(18));
    for (select, cases) in [
        (lower_case as fn(&BoundParams) -> usize, LOWER_M_CASES.len()),
        (upper_case as fn(&BoundParams) -> usize, UPPER_W_CASES.len()),
    ] {
        for target in 0..cases {
            let hit = (0..MAX_TRIES)
                .map(|_| random_triple(&mut rng))
                .find(|p| select(p) == target)
                .unwrap_or_else(|| panic!("branch {target} not reached by sampling"));
            out.push(hit);
        }
    }
    while out.len() < count {
        out.push(random_triple(&mut rng));
    }
    out
}

/// `count` triples with `c ≤ d*(a, b)`.
pub fn attaining_triples(count: usize, seed: u64) -> Vec<BoundParams> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| random_attaining_triple(&mut rng))
        .collect()
}

/// `count` admissible triples.
pub fn triples(count: usize, seed: u64) -> Vec<BoundParams> {
    let mut rng = rng(seed);
    (0..count).map(|_| random_triple(&mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn covers_all_branches() {
        let ps = covering_triples(30, 7);
        assert_eq!(ps.len(), 30);
        let lower: HashSet<usize> = ps.iter().map(lower_case).collect();
        let upper: HashSet<usize> = ps.iter().map(upper_case).collect();
        assert_eq!(lower.len(), 9);
        assert_eq!(upper.len(), 9);
    }

    #[test]
    fn deterministic() {
        assert_eq!(triples(5, 3), triples(5, 3));
        assert!(attaining_triples(20, 1)
            .iter()
            .all(BoundParams::attains_eq3));
    }
}
